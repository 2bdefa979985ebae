//! Reference generators for nine discriminants and the comparison used to
//! validate pipeline output against them.

use serde::Serialize;

use crate::conic::SearchLimits;
use crate::construct::{construct_h8, discriminant_twist, ExtensionCertificate};
use crate::error::{Error, Result};
use crate::factorizations::is_h8_factorization;
use crate::field::Element;

/// `Σ coef·√radicand`; radicand 1 is the rational part, −1 is `i`.
pub type Term = (i64, i64);

#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    pub d: i64,
    pub parts: [i64; 3],
    pub factors: [&'static [Term]; 2],
    pub text: &'static str,
}

pub const REFERENCE_ROWS: [ReferenceRow; 9] = [
    ReferenceRow {
        d: 3848,
        parts: [8, 13, 37],
        factors: [&[(12, 2), (5, 13)], &[(18, 1), (-5, 13)]],
        text: "(12√2+5√13)(18−5√13)",
    },
    ReferenceRow {
        d: 2120,
        parts: [5, 8, 53],
        factors: [&[(3, 5), (7, 2)], &[(1, 1), (1, 2)]],
        text: "(3√5+7√2)(1+√2)",
    },
    ReferenceRow {
        d: 1480,
        parts: [5, 8, 37],
        factors: [&[(3, 5), (2, 2)], &[(2, 1), (-1, 5)]],
        text: "(3√5+2√2)(2−√5)",
    },
    ReferenceRow {
        d: 520, parts: [5, 8, 13], factors: [&[(3, 2), (1, 5)], &[(1, 1), (1, 2)]], text: "(3√2+√5)(1+√2)"
    },
    ReferenceRow {
        d: -120,
        parts: [-3, 5, 8],
        factors: [&[(2, 2), (1, 5)], &[(2, 1), (1, 5)]],
        text: "(2√2+√5)(2+√5)",
    },
    ReferenceRow {
        d: -255,
        parts: [-3, 5, 17],
        factors: [&[(1, 5), (2, -3)], &[(2, 1), (1, 5)]],
        text: "(√5+2√−3)(2+√5)",
    },
    ReferenceRow {
        d: -420,
        parts: [-4, 5, 21],
        factors: [&[(4, -1), (-1, 5)], &[(2, 1), (1, 5)]],
        text: "(4i−√5)(2+√5)",
    },
    ReferenceRow {
        d: -455,
        parts: [-7, 5, 13],
        factors: [&[(2, 13), (-3, 5)], &[(2, 1), (1, 5)]],
        text: "(2√13−3√5)(2+√5)",
    },
    ReferenceRow {
        d: -520,
        parts: [-8, 5, 13],
        factors: [&[(2, -2), (1, 5)], &[(2, 1), (1, 5)]],
        text: "(2√−2+√5)(2+√5)",
    },
];

fn build_factor(gens: &[i64], terms: &[Term]) -> Result<Element> {
    let mut acc = Element::zero(gens);
    for &(c, rad) in terms {
        let s = Element::sqrt_of_integer(gens, rad)
            .ok_or_else(|| Error::InvalidInput(format!("√{rad} not in the field")))?;
        acc = &acc + &s.scale_int(c);
    }
    Ok(acc)
}

impl ReferenceRow {
    /// The reference generator as an element of `K = Q(√d1, √d2, √d3)`.
    pub fn mu(&self) -> Result<Element> {
        Ok(&build_factor(&self.parts, self.factors[0])? * &build_factor(&self.parts, self.factors[1])?)
    }

    /// Every part is a prime discriminant, so the extension is unique.
    pub fn prime_parts_only(&self) -> bool {
        self.parts.iter().all(|&p| crate::symbols::PrimeDiscriminant::new(p).is_ok())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RowOutcome {
    #[serde(serialize_with = "crate::serial::string::serialize")]
    pub d: i64,
    #[serde(serialize_with = "crate::serial::string_array::serialize")]
    pub parts: [i64; 3],
    pub reference: &'static str,
    /// `δ | d` with reference `≐ δ·μ` over `K`, if any.
    #[serde(serialize_with = "crate::serial::string_option::serialize")]
    pub twist: Option<i64>,
    /// `true` when `δ` is a square in `K`.
    pub same_class: bool,
    pub unique: bool,
    pub passed: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub certificate: Option<ExtensionCertificate>,
}

/// Builds the certificate for a row and compares it with the reference.
pub fn check_row(row: &ReferenceRow, limits: &SearchLimits) -> RowOutcome {
    let mut out = RowOutcome {
        d: row.d,
        parts: row.parts,
        reference: row.text,
        twist: None,
        same_class: false,
        unique: row.prime_parts_only(),
        passed: false,
        error: None,
        certificate: None,
    };
    let run = || -> Result<(ExtensionCertificate, Option<i64>, bool)> {
        let f = is_h8_factorization(row.parts[0], row.parts[1], row.parts[2])?;
        if f.d != row.d {
            return Err(Error::ProductMismatch { product: f.d, expected: row.d });
        }
        let cert = construct_h8(&f, None, limits)?;
        let reference = row.mu()?;
        let mu = cert.mu.mu.embed(&row.parts)?;
        let twist = discriminant_twist(&mu, &reference, row.d)?;
        let same = crate::field::square_class_equal(&mu, &reference)?;
        Ok((cert, twist, same))
    };
    match run() {
        Ok((cert, twist, same)) => {
            out.twist = twist;
            out.same_class = same;
            out.passed = if out.unique { same } else { twist.is_some() };
            out.certificate = Some(cert);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rows_are_h8_factorizations() {
        for row in REFERENCE_ROWS {
            let f = is_h8_factorization(row.parts[0], row.parts[1], row.parts[2]).unwrap();
            assert_eq!(f.d, row.d);
        }
    }

    #[test]
    fn row_520_expands() {
        // (3√2 + √5)(1 + √2) = 6 + 3√2 + √5 + √10
        let mu = REFERENCE_ROWS[3].mu().unwrap();
        let s2 = Element::sqrt_of_integer(&[5, 8, 13], 2).unwrap();
        let s5 = Element::sqrt_of_integer(&[5, 8, 13], 5).unwrap();
        let expect = &(&Element::integer(&[5, 8, 13], 6) + &s2.scale_int(3)) + &(&s5 + &(&s2 * &s5));
        assert_eq!(mu, expect);
    }

    #[test]
    fn row_520_matches() {
        let o = check_row(&REFERENCE_ROWS[3], &SearchLimits::default());
        assert!(o.passed, "{o:?}");
    }
}
