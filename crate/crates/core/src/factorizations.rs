//! H8- and D4-factorizations of a fundamental discriminant.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::gcd_i64;
use crate::error::{Error, Result};
use crate::symbols::{canonical_key, factor_discriminant, is_fundamental, kronecker, PrimeDiscriminant};

/// One evaluated symbol `(numerator/prime)` from a factorization check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolCheck {
    /// Index (0-based) of the part whose prime is the denominator.
    pub part: usize,
    pub prime: u64,
    pub numerator: i64,
    pub value: i32,
}

/// `d = d1·d2·d3` with `(dj·dk / pi) = +1` for every prime `pi | di`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H8Factorization {
    pub d: i64,
    pub parts: [i64; 3],
    pub checks: Vec<SymbolCheck>,
}

impl H8Factorization {
    pub fn d1(&self) -> i64 {
        self.parts[0]
    }
    pub fn d2(&self) -> i64 {
        self.parts[1]
    }
    pub fn d3(&self) -> i64 {
        self.parts[2]
    }

    /// `true` when each part is itself a prime discriminant.
    pub fn has_prime_parts(&self) -> bool {
        self.parts.iter().all(|&p| PrimeDiscriminant::new(p).is_ok())
    }

    /// Parts sorted into canonical order.
    pub fn canonical(&self) -> [i64; 3] {
        canonical_triple(self.parts)
    }
}

impl fmt::Display for H8Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} · {} · {}", self.d, self.parts[0], self.parts[1], self.parts[2])
    }
}

/// `d = d1·d2·d3` with `(d1/p2) = (d2/p1) = +1`; `d3` may be 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D4Factorization {
    pub d: i64,
    pub d1: i64,
    pub d2: i64,
    pub d3: i64,
}

impl fmt::Display for D4Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} · {} ; {}", self.d, self.d1, self.d2, self.d3)
    }
}

fn canonical_triple(mut parts: [i64; 3]) -> [i64; 3] {
    parts.sort_by_key(|&v| canonical_key(v));
    parts
}

fn check_part(v: i64) -> Result<()> {
    if v == 1 {
        return Err(Error::InvalidInput("parts must be nontrivial discriminants".into()));
    }
    if !matches!(v.rem_euclid(4), 0 | 1) {
        return Err(Error::NotDiscriminant(v));
    }
    if !is_fundamental(v) {
        return Err(Error::NotFundamental(v));
    }
    Ok(())
}

fn check_coprime(parts: &[i64]) -> Result<()> {
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if gcd_i64(parts[i], parts[j]) != 1 {
                return Err(Error::NotCoprime(parts[i], parts[j]));
            }
        }
    }
    Ok(())
}

fn primes_of(v: i64) -> Vec<u64> {
    let mut ps: Vec<u64> =
        factor_discriminant(v).map(|f| f.parts.iter().map(|p| p.prime()).collect()).unwrap_or_default();
    ps.sort_unstable();
    ps
}

/// Validates `(d1, d2, d3)` as an H8-factorization of their product.
///
/// Rejects with the first failing `(prime, symbol)` pair, scanning parts in
/// order and primes ascending.
pub fn is_h8_factorization(d1: i64, d2: i64, d3: i64) -> Result<H8Factorization> {
    let parts = [d1, d2, d3];
    for &p in &parts {
        check_part(p)?;
    }
    check_coprime(&parts)?;
    let d = d1
        .checked_mul(d2)
        .and_then(|x| x.checked_mul(d3))
        .ok_or_else(|| Error::InvalidInput("product overflows".into()))?;
    let mut checks = Vec::new();
    for i in 0..3 {
        let numerator = parts[(i + 1) % 3] * parts[(i + 2) % 3];
        for prime in primes_of(parts[i]) {
            let value = kronecker(numerator, prime as i64);
            if value != 1 {
                return Err(Error::SymbolCondition { numerator, prime, value });
            }
            checks.push(SymbolCheck { part: i, prime, numerator, value });
        }
    }
    Ok(H8Factorization { d, parts, checks })
}

/// Like [`is_h8_factorization`] but also requires the product to equal `d`.
pub fn is_h8_factorization_of(d: i64, d1: i64, d2: i64, d3: i64) -> Result<H8Factorization> {
    if let Some(product) = d1.checked_mul(d2).and_then(|x| x.checked_mul(d3)) {
        if product != d {
            return Err(Error::ProductMismatch { product, expected: d });
        }
    }
    is_h8_factorization(d1, d2, d3)
}

/// Calls `visit` with the part products for every assignment of the prime
/// discriminants of `d` to three labelled groups.
fn for_each_split(d: i64, mut visit: impl FnMut([i64; 3])) -> Result<()> {
    let parts: Vec<i64> = factor_discriminant(d)?.values();
    let n = parts.len() as u32;
    for code in 0..3u64.pow(n) {
        let mut products = [1i64; 3];
        let mut c = code;
        for &p in &parts {
            products[(c % 3) as usize] *= p;
            c /= 3;
        }
        visit(products);
    }
    Ok(())
}

/// Splits of `d` into three nontrivial coprime discriminants, up to
/// permutation, in canonical order; the symbol conditions are not checked.
pub fn h8_candidates(d: i64) -> Result<Vec<[i64; 3]>> {
    let mut triples = BTreeSet::new();
    for_each_split(d, |products| {
        if products.iter().all(|&v| v != 1) {
            let c = canonical_triple(products);
            triples.insert((c.map(canonical_key), c));
        }
    })?;
    Ok(triples.into_iter().map(|(_, t)| t).collect())
}

/// All H8-factorizations of `d` up to permutation, in canonical order.
pub fn enumerate_h8(d: i64) -> Result<Vec<H8Factorization>> {
    Ok(h8_candidates(d)?.into_iter().filter_map(|t| is_h8_factorization(t[0], t[1], t[2]).ok()).collect())
}

/// Validates `(d1, d2; d3)` as a D4-factorization; `d3 = 1` is allowed.
pub fn is_d4_factorization(d1: i64, d2: i64, d3: i64) -> Result<D4Factorization> {
    check_part(d1)?;
    check_part(d2)?;
    if d3 != 1 {
        check_part(d3)?;
    }
    check_coprime(&[d1, d2, d3])?;
    if d1 < 0 && d2 < 0 {
        return Err(Error::TooManyNegative);
    }
    for (num, den) in [(d2, d1), (d1, d2)] {
        for prime in primes_of(den) {
            let value = kronecker(num, prime as i64);
            if value != 1 {
                return Err(Error::SymbolCondition { numerator: num, prime, value });
            }
        }
    }
    Ok(D4Factorization { d: d1 * d2 * d3, d1, d2, d3 })
}

/// Splits `d = d1·d2·d3` with `d1, d2 ≠ 1`, up to swapping `d1 ↔ d2`, in
/// canonical order; the symbol conditions are not checked.
pub fn d4_candidates(d: i64) -> Result<Vec<[i64; 3]>> {
    let mut candidates = BTreeSet::new();
    for_each_split(d, |[a, b, c]| {
        if a != 1 && b != 1 {
            let (x, y) = if canonical_key(a) <= canonical_key(b) { (a, b) } else { (b, a) };
            candidates.insert((canonical_key(x), canonical_key(y), canonical_key(c), [x, y, c]));
        }
    })?;
    Ok(candidates.into_iter().map(|(_, _, _, t)| t).collect())
}

/// All D4-factorizations of `d` up to swapping `d1 ↔ d2`, in canonical order.
pub fn enumerate_d4(d: i64) -> Result<Vec<D4Factorization>> {
    Ok(d4_candidates(d)?.into_iter().filter_map(|[x, y, c]| is_d4_factorization(x, y, c).ok()).collect())
}

/// At most one part is negative. Follows from the symbol conditions via
/// reciprocity; evaluated rather than assumed.
pub fn negativity_check(f: &H8Factorization) -> bool {
    f.parts.iter().filter(|&&v| v < 0).count() <= 1
}
