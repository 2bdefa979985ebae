//! Unramified D4-extensions `M = k(√d1, √d2, √α)` with `α ∈ Q(√d1)`.
//!
//! `α` is `X + Y√d1` for a solution of `X² − d1·Y² − d2·Z² = 0`, divided by
//! its integral content and twisted by one of `±1, ±2` to make it 2-primary;
//! with `s` the combined rational scale, `α·α' = d2·(sZ)²`. The sign pattern
//! over `K12 = Q(√d1, √d2)` is that of a dihedral extension, cyclic over `Q(√(d1·d2))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::conic::{solve_conic, ConicEquation, SearchLimits};
use crate::construct::{classify, compute_alpha, unramified_above_two, GaloisClass, SVector};
use crate::error::{Error, Result};
use crate::factorizations::{is_d4_factorization, D4Factorization};
use crate::field::{Element, GaloisAction};
use crate::serial;

pub const D4_SCHEMA: &str = "d4cert/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D4Certificate {
    #[serde(with = "serial::string")]
    pub d: i64,
    #[serde(with = "serial::string")]
    pub d1: i64,
    #[serde(with = "serial::string")]
    pub d2: i64,
    #[serde(with = "serial::string")]
    pub d3: i64,
    /// Primitive `(X, Y, Z)` with `X² − d1·Y² = d2·Z²`.
    #[serde(with = "serial::string_array")]
    pub solution: [BigInt; 3],
    /// `twist / content`, where `content` is the integral content of `X + Y√d1`.
    #[serde(with = "serial::rational")]
    pub scale: BigRational,
    /// `scale·(X + Y√d1)` over `Q(√d1)`.
    pub alpha: Element,
    #[serde(with = "serial::string")]
    pub twist: i64,
    /// Generators of the field in which 2-primarity was decided.
    #[serde(with = "serial::string_array")]
    pub oracle_base: [i64; 3],
    /// Signs over `Q(√d1, √d2)` for `√d2 ↦ −√d2`, `√d1 ↦ −√d1`, and both.
    pub s_vector: SVector,
    pub group: GaloisClass,
    /// `α^(1+ψ)` for `ψ` negating both roots; `−1` means cyclic over `Q(√(d1d2))`.
    #[serde(with = "serial::string")]
    pub cyclic_sign: i32,
    pub totally_positive: Option<bool>,
    /// `d3 ≠ 1`: `M` is a compositum with `Q(√d3)`.
    pub compositum: bool,
}

#[derive(Serialize, Deserialize)]
struct D4CertDoc {
    schema: String,
    #[serde(flatten)]
    cert: D4Certificate,
}

impl D4Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&D4CertDoc { schema: D4_SCHEMA.into(), cert: self.clone() }).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(D4CertDoc { schema: D4_SCHEMA.into(), cert: self.clone() }).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let doc: D4CertDoc = serde_json::from_value(v).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if doc.schema != D4_SCHEMA {
            return Err(Error::InvalidInput(format!("schema {:?}, expected {D4_SCHEMA}", doc.schema)));
        }
        Ok(doc.cert)
    }

    /// `α·α' = d2·(scale·Z)²`.
    pub fn norm_relation_holds(&self) -> bool {
        let z = &self.scale * BigRational::from_integer(self.solution[2].clone());
        self.alpha.norm() == BigRational::from_integer(self.d2.into()) * &z * &z
    }
}

fn alpha_of(d1: i64, sol: &[BigInt; 3]) -> Element {
    let g = [d1];
    let mut a = Element::rational(&g, BigRational::from_integer(sol[0].clone()));
    a = &a + &Element::monomial(&g, 1, BigRational::from_integer(sol[1].clone()));
    a
}

fn oracle_base(f: &D4Factorization) -> Vec<i64> {
    if f.d3 % 2 == 0 {
        vec![f.d1, f.d2, f.d3]
    } else {
        vec![f.d1, f.d2]
    }
}

fn k12_signs(alpha: &Element, d1: i64, d2: i64) -> Result<SVector> {
    let x = alpha.embed(&[d1, d2])?;
    Ok(SVector {
        sigma: compute_alpha(&x, GaloisAction::sigma())?.1,
        tau: compute_alpha(&x, GaloisAction::tau())?.1,
        sigma_tau: compute_alpha(&x, GaloisAction::sigma_tau())?.1,
    })
}

fn passes(alpha: &Element, base: &[i64], twist: i64) -> bool {
    let Ok(x) = alpha.scale_int(twist.signum()).embed(base) else { return false };
    unramified_above_two(&x, twist.abs() == 2).unwrap_or(false)
}

pub fn d4_construct(f: &D4Factorization, limits: &SearchLimits) -> Result<D4Certificate> {
    is_d4_factorization(f.d1, f.d2, f.d3)?;
    let eq = ConicEquation::new(1, -f.d1, -f.d2)?;
    let sol = solve_conic(&eq, limits)?;
    if sol.w.is_zero() {
        return Err(Error::Internal("conic solution with Z = 0".into()));
    }
    let solution = [sol.u.clone(), sol.v.clone(), sol.w.clone()];
    let base = oracle_base(f);
    let raw = alpha_of(f.d1, &solution);
    let content = BigRational::from_integer(raw.integral_content().ok_or(Error::NotIntegral)?);
    let alpha0 = raw.scale(&content.recip());
    let twist = [1i64, -1, 2, -2].into_iter().find(|&t| passes(&alpha0, &base, t)).ok_or(Error::NoTwoPrimaryTwist)?;
    let scale = BigRational::from_integer(twist.into()) / content;
    let alpha = raw.scale(&scale);
    let s = k12_signs(&alpha, f.d1, f.d2)?;
    let mut ob = [1i64; 3];
    ob[..base.len()].copy_from_slice(&base);
    Ok(D4Certificate {
        d: f.d,
        d1: f.d1,
        d2: f.d2,
        d3: f.d3,
        solution,
        scale,
        totally_positive: alpha.is_totally_positive(),
        alpha,
        twist,
        oracle_base: ob,
        group: classify(&s),
        cyclic_sign: s.sigma_tau,
        s_vector: s,
        compositum: f.d3 != 1,
    })
}

/// Rechecks every invariant of a certificate from scratch.
pub fn d4_verify(cert: &D4Certificate) -> bool {
    let check = || -> Result<bool> {
        let f = is_d4_factorization(cert.d1, cert.d2, cert.d3)?;
        let [x, y, z] = &cert.solution;
        let eq = ConicEquation::new(1, -cert.d1, -cert.d2)?;
        let base: Vec<i64> = cert.oracle_base.iter().copied().filter(|&g| g != 1).collect();
        let raw = cert.alpha.scale(&BigRational::from_integer(cert.twist.into()).recip());
        Ok(f.d == cert.d
            && !z.is_zero()
            && eq.eval(x, y, z).is_zero()
            && cert.alpha == alpha_of(cert.d1, &cert.solution).scale(&cert.scale)
            && raw.integral_content() == Some(BigInt::from(1))
            && cert.norm_relation_holds()
            && base == oracle_base(&f)
            && passes(&raw, &base, cert.twist)
            && k12_signs(&cert.alpha, cert.d1, cert.d2)? == cert.s_vector
            && classify(&cert.s_vector) == GaloisClass::D4
            && cert.group == GaloisClass::D4
            && cert.cyclic_sign == -1
            && cert.compositum == (cert.d3 != 1))
    };
    check().unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorizations::enumerate_d4;

    fn build(d1: i64, d2: i64, d3: i64) -> D4Certificate {
        d4_construct(&is_d4_factorization(d1, d2, d3).unwrap(), &SearchLimits::default()).unwrap()
    }

    #[test]
    fn example_680() {
        let c = build(8, 17, 5);
        assert_eq!(c.solution, [5, 1, 1].map(BigInt::from));
        assert_eq!(c.alpha, Element::from_ints(&[8], &[5, 1]).unwrap().scale_int(c.twist));
        assert_eq!(c.cyclic_sign, -1);
        assert!(c.norm_relation_holds());
        assert!(d4_verify(&c));
    }

    #[test]
    fn degenerate_d3() {
        let f = enumerate_d4(-68).unwrap();
        assert!(!f.is_empty());
        for f in f {
            let c = d4_construct(&f, &SearchLimits::default()).unwrap();
            assert!(c.d3 == 1 && !c.compositum);
            assert!(d4_verify(&c));
        }
    }

    #[test]
    fn wrong_square_class_is_rejected() {
        let mut c = build(8, 17, 5);
        c.alpha = c.alpha.scale_int(8);
        assert!(!c.norm_relation_holds());
        assert!(!d4_verify(&c));
    }

    #[test]
    fn json_round_trip() {
        let c = build(8, 17, 5);
        let back = D4Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn sign_pattern() {
        let c = build(8, 17, 5);
        let mut e = c.s_vector.entries();
        e.sort_unstable();
        assert_eq!(e, [-1, 1, 1]);
    }
}
