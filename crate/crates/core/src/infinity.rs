//! Ramification at the infinite places.
//!
//! For positive parts free of primes `q ≡ 3 mod 4`, the unramified
//! H8-extension is totally real iff
//! `(d1d2/d3)₄ (d2d3/d1)₄ (d3d1/d2)₄ = (d1/d2)(d2/d3)(d3/d1)`.

use serde::Serialize;

use crate::construct::{prime_three_mod_four, ExtensionCertificate};
use crate::error::{Error, Result};
use crate::factorizations::H8Factorization;
use crate::symbols::{kronecker, quartic_symbol_composite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InfinityVerdict {
    pub applicable: bool,
    pub lhs: Option<i32>,
    pub rhs: Option<i32>,
    pub totally_real: bool,
    /// Some `q ≡ 3 mod 4` divides `d` and all parts are positive: a totally
    /// negative `μ` is replaced by `−qμ`.
    pub sign_twist_available: bool,
}

pub fn infinity_verdict(f: &H8Factorization) -> Result<InfinityVerdict> {
    let [d1, d2, d3] = f.parts;
    let positive = f.parts.iter().all(|&v| v > 0);
    let q = prime_three_mod_four(f.d);
    if !positive || q.is_some() {
        // real K with q | d: ±μ can always be made totally positive;
        // a negative part leaves no real places upstairs
        return Ok(InfinityVerdict {
            applicable: false,
            lhs: None,
            rhs: None,
            totally_real: positive,
            sign_twist_available: positive,
        });
    }
    let quartic = |a: i64, m: i64| {
        quartic_symbol_composite(a, m)
            .map_err(|e| Error::Internal(format!("quartic symbol for an H8-factorization: {e}")))
    };
    let lhs = quartic(d1 * d2, d3)? * quartic(d2 * d3, d1)? * quartic(d3 * d1, d2)?;
    let rhs = kronecker(d1, d2) * kronecker(d2, d3) * kronecker(d3, d1);
    Ok(InfinityVerdict {
        applicable: true,
        lhs: Some(lhs),
        rhs: Some(rhs),
        totally_real: lhs == rhs,
        sign_twist_available: false,
    })
}

/// The verdict agrees with the exact signs of the certificate's `μ`.
pub fn sign_consistency_check(f: &H8Factorization, cert: &ExtensionCertificate) -> Result<bool> {
    let v = infinity_verdict(f)?;
    let direct = cert.mu.mu.is_totally_positive();
    Ok(match direct {
        Some(pos) => pos == v.totally_real,
        None => !v.totally_real,
    })
}
