//! Arithmetic modulo 2 and 4 in the ring of integers of a multiquadratic
//! field with coprime fundamental-discriminant generators, and the resulting
//! tests for ramification above 2 in `F(√x)/F`.
//!
//! `O/4O` splits as a product over the primes above 2; the factors are cut
//! out by primitive idempotents, found by brute force in `O/2O` and lifted.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::Element;

type Vector = Vec<i64>;

#[derive(Debug, Clone)]
pub struct TwoAdicStructure {
    gens: Vec<i64>,
    /// `ω_S·ω_T = Σ_U table[S][T][U]·ω_U`.
    table: Vec<Vec<Vector>>,
    /// Primitive idempotents of `O/4O`, one per prime above 2.
    idempotents: Vec<Vector>,
}

fn reduce(v: &mut [i64], m: i64) {
    for c in v.iter_mut() {
        *c = c.rem_euclid(m);
    }
}

impl TwoAdicStructure {
    pub fn new(gens: &[i64]) -> Self {
        let n = 1usize << gens.len();
        let omegas: Vec<Element> = (0..n).map(|s| Element::omega(gens, s)).collect();
        let table = (0..n)
            .map(|s| {
                (0..n)
                    .map(|t| {
                        (&omegas[s] * &omegas[t])
                            .integral_basis_coords()
                            .iter()
                            .map(|c| c.to_integer().to_i64().expect("small structure constant"))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut s = Self { gens: gens.to_vec(), table, idempotents: Vec::new() };
        s.idempotents = s.find_idempotents();
        s
    }

    pub fn gens(&self) -> &[i64] {
        &self.gens
    }

    fn dim(&self) -> usize {
        self.table.len()
    }

    fn mul(&self, a: &[i64], b: &[i64], m: i64) -> Vector {
        let mut out = vec![0i64; self.dim()];
        for (s, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (t, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let ab = x * y;
                for (o, c) in out.iter_mut().zip(&self.table[s][t]) {
                    *o += ab * c;
                }
            }
            reduce(&mut out, m);
        }
        out
    }

    fn vector_of_bits(&self, bits: u64) -> Vector {
        (0..self.dim()).map(|i| (bits >> i & 1) as i64).collect()
    }

    fn find_idempotents(&self) -> Vec<Vector> {
        let n = self.dim();
        let all: Vec<Vector> =
            (1u64..1 << n).map(|b| self.vector_of_bits(b)).filter(|v| &self.mul(v, v, 2) == v).collect();
        // primitive: no nonzero idempotent strictly below it
        let primitive: Vec<&Vector> =
            all.iter().filter(|e| !all.iter().any(|f| f != *e && &self.mul(f, e, 2) == f)).collect();
        primitive
            .into_iter()
            .map(|e| {
                // Hensel lift e ↦ 3e² − 2e³ from mod 2 to mod 4
                let e2 = self.mul(e, e, 4);
                let e3 = self.mul(&e2, e, 4);
                let mut v: Vector = e2.iter().zip(&e3).map(|(a, b)| 3 * a - 2 * b).collect();
                reduce(&mut v, 4);
                v
            })
            .collect()
    }

    /// Number of primes above 2.
    pub fn prime_count(&self) -> usize {
        self.idempotents.len()
    }

    /// Integral-basis coordinates modulo `m`; error if `x` is not integral.
    pub fn residue(&self, x: &Element, m: i64) -> Result<Vector> {
        if x.gens() != self.gens.as_slice() {
            return Err(Error::BaseMismatch);
        }
        let mbig = BigInt::from(m);
        x.integral_basis_coords()
            .iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.numer().mod_floor(&mbig).to_i64().expect("residue"))
                } else {
                    Err(Error::NotIntegral)
                }
            })
            .collect()
    }

    /// `x` is a unit at the `i`-th prime above 2.
    pub fn is_unit_at(&self, x: &Element, i: usize) -> Result<bool> {
        let mut e = self.idempotents[i].clone();
        reduce(&mut e, 2);
        let mut y = self.mul(&self.residue(x, 2)?, &e, 2);
        // the component is local; its maximal ideal is nil of index ≤ dim
        for _ in 0..self.dim().trailing_zeros() + 1 {
            y = self.mul(&y, &y, 2);
        }
        Ok(y.iter().any(|&c| c != 0))
    }

    /// `x` is a unit at every prime above 2.
    pub fn is_odd(&self, x: &Element) -> Result<bool> {
        for i in 0..self.prime_count() {
            if !self.is_unit_at(x, i)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn xi_squares(&self) -> impl Iterator<Item = Vector> + '_ {
        (0u64..1 << self.dim()).map(|b| {
            let xi = self.vector_of_bits(b);
            self.mul(&xi, &xi, 4)
        })
    }

    /// `x ≡ ξ²` modulo the 4-part at the `i`-th prime, for some `ξ`.
    pub fn is_square_mod_four_at(&self, x: &Element, i: usize) -> Result<bool> {
        let r = self.residue(x, 4)?;
        let e = &self.idempotents[i];
        for sq in self.xi_squares() {
            let mut diff: Vector = r.iter().zip(&sq).map(|(a, b)| a - b).collect();
            reduce(&mut diff, 4);
            if self.mul(&diff, e, 4).iter().all(|&c| c == 0) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `x ≡ ξ² mod 4` for some integral `ξ`; `x` must be integral and odd.
    pub fn two_primary(&self, x: &Element) -> Result<bool> {
        let r = self.residue(x, 4)?;
        if !self.is_odd(x)? {
            return Err(Error::NotOdd);
        }
        Ok(self.xi_squares().any(|sq| r.iter().zip(&sq).all(|(a, b)| (a - b).rem_euclid(4) == 0)))
    }

    /// Whether `F(√x)/F` is unramified above 2, for `x` integral and a unit
    /// at some prime above 2, assuming `F(√x)/Q` is normal: the primes above
    /// 2 are then permuted transitively, so one prime decides.
    pub fn unramified_above_two_normal(&self, x: &Element) -> Result<bool> {
        for i in 0..self.prime_count() {
            if self.is_unit_at(x, i)? {
                return self.is_square_mod_four_at(x, i);
            }
        }
        Err(Error::NotOdd)
    }
}

/// `x ≡ ξ² mod 4` for some integral `ξ`; `x` must be integral and odd.
pub fn two_primary_oracle(x: &Element) -> Result<bool> {
    TwoAdicStructure::new(x.gens()).two_primary(x)
}

/// An odd element of the field of `gens` in the square class of 2, when one
/// generator is `4m` with `m ≡ 3 mod 4`: `(1 + √m)² = 2·((1 + m)/2 + √m)`.
/// For a generator `±8`, `2 ≐ ±1`.
pub fn odd_class_of_two(gens: &[i64]) -> Option<Element> {
    use num_rational::BigRational;
    for (j, &g) in gens.iter().enumerate() {
        if g.rem_euclid(8) == 4 {
            let m = g / 4;
            let half = BigRational::new(1.into(), 2.into());
            let mut u = Element::monomial(gens, 1 << j, half);
            u = &u + &Element::integer(gens, (1 + m) / 2);
            return Some(u);
        }
        if g == 8 || g == -8 {
            return Some(Element::integer(gens, g.signum()));
        }
    }
    None
}
