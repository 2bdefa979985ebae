//! Ternary quadratic equations `c1·U² + c2·V² + c3·W² = 0`: local solvability,
//! small-box search, Legendre descent, and the system used to build μ.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, odd_primes, prime_divisors, sqrt_mod_squarefree, squarefree_decompose};
use crate::error::{Error, Place, Result};
use crate::symbols::{kronecker, prime_parts};

/// Bounds for the searches in this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest candidate for the auxiliary parameter `a`.
    pub max_a: u64,
    /// Half-width of the box scanned before falling back to descent.
    pub conic_box: i64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { max_a: 1_000_000, conic_box: 16 }
    }
}

/// `c1·U² + c2·V² + c3·W² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConicEquation {
    pub coeffs: [i64; 3],
}

impl ConicEquation {
    pub fn new(c1: i64, c2: i64, c3: i64) -> Result<Self> {
        if c1 == 0 || c2 == 0 || c3 == 0 {
            return Err(Error::InvalidInput("conic coefficients must be nonzero".into()));
        }
        Ok(Self { coeffs: [c1, c2, c3] })
    }

    pub fn eval(&self, u: &BigInt, v: &BigInt, w: &BigInt) -> BigInt {
        let [c1, c2, c3] = self.coeffs.map(BigInt::from);
        c1 * u * u + c2 * v * v + c3 * w * w
    }

    /// The first place where the equation has no nontrivial solution, if any.
    ///
    /// Solvability at `p` is the Hilbert symbol `(−c1c3, −c2c3)_p = 1`.
    pub fn local_obstruction(&self) -> Option<Place> {
        let [c1, c2, c3] = self.coeffs.map(|c| c as i128);
        if (c1 > 0) == (c2 > 0) && (c2 > 0) == (c3 > 0) {
            return Some(Place::Infinity);
        }
        let a = -c1 * c3;
        let b = -c2 * c3;
        let mut primes = prime_divisors(2 * c1 * c2 * c3);
        primes.dedup();
        primes.into_iter().find(|&p| hilbert_symbol(a, b, p) == -1).map(|p| Place::Prime(p as u64))
    }
}

impl fmt::Display for ConicEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c1, c2, c3] = self.coeffs;
        let term = |c: i64, var: &str, first: bool| -> String {
            let sign = if c < 0 {
                "−"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.unsigned_abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            if first {
                format!("{sign}{coef}{var}²")
            } else {
                format!(" {sign} {coef}{var}²")
            }
        };
        write!(f, "{}{}{} = 0", term(c1, "U", true), term(c2, "V", false), term(c3, "W", false))
    }
}

/// Hilbert symbol `(a, b)_p` for nonzero integers.
pub fn hilbert_symbol(a: i128, b: i128, p: u128) -> i32 {
    assert!(a != 0 && b != 0);
    let split = |mut x: i128| {
        let mut v = 0u32;
        while x % p as i128 == 0 {
            x /= p as i128;
            v += 1;
        }
        (v, x)
    };
    let (alpha, u) = split(a);
    let (beta, v) = split(b);
    if p == 2 {
        let eps = |x: i128| ((x.rem_euclid(8) - 1) / 2) % 2;
        let omega = |x: i128| {
            let r = x.rem_euclid(8);
            if r == 3 || r == 5 {
                1
            } else {
                0
            }
        };
        let e = eps(u) * eps(v) + alpha as i128 * omega(v) + beta as i128 * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s = if (alpha as u128 * beta as u128 * ((p - 1) / 2)).is_multiple_of(2) { 1 } else { -1 };
        let leg = |x: i128| kronecker(x.rem_euclid(p as i128) as i64, p as i64);
        if beta % 2 == 1 {
            s *= leg(u);
        }
        if alpha % 2 == 1 {
            s *= leg(v);
        }
        s
    }
}

/// A primitive integer point on a [`ConicEquation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicSolution {
    pub u: BigInt,
    pub v: BigInt,
    pub w: BigInt,
    pub equation: ConicEquation,
}

impl ConicSolution {
    pub fn verify(&self) -> bool {
        let nonzero = !(self.u.is_zero() && self.v.is_zero() && self.w.is_zero());
        let g = self.u.gcd(&self.v).gcd(&self.w);
        nonzero && g.is_one() && self.equation.eval(&self.u, &self.v, &self.w).is_zero()
    }

    pub fn triple(&self) -> [BigInt; 3] {
        [self.u.clone(), self.v.clone(), self.w.clone()]
    }
}

/// Order in which one coordinate is scanned: 0, 1, −1, 2, −2, …
fn signed_range(h: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=h).flat_map(|k| [k, -k]))
}

/// Scans points with `max(|u|,|v|,|w|) ≤ bound` and `w > 0` by increasing height.
pub fn box_search(eq: &ConicEquation, bound: i64) -> Option<[i64; 3]> {
    let [c1, c2, c3] = eq.coeffs.map(|c| c as i128);
    for h in 1..=bound {
        for w in 1..=h {
            for u in signed_range(h) {
                for v in signed_range(h) {
                    if u.abs().max(v.abs()).max(w) != h {
                        continue;
                    }
                    let (u, v, w) = (u as i128, v as i128, w as i128);
                    if c1 * u * u + c2 * v * v + c3 * w * w == 0 {
                        return Some([u as i64, v as i64, w as i64]);
                    }
                }
            }
        }
    }
    None
}

/// Solves `X² = a·Y² + b·Z²` for squarefree nonzero `a, b` by Legendre descent.
pub fn legendre_descent(a: i128, b: i128) -> Option<[BigInt; 3]> {
    let one = BigInt::one;
    if a == 1 {
        return Some([one(), one(), BigInt::zero()]);
    }
    if b == 1 {
        return Some([one(), BigInt::zero(), one()]);
    }
    if a.abs() > b.abs() {
        let [x, y, z] = legendre_descent(b, a)?;
        return Some([x, z, y]);
    }
    if b == -1 {
        // a = −1 here
        return None;
    }
    let m = b.unsigned_abs();
    let mut t = sqrt_mod_squarefree(a, m)? as i128;
    if t > (m / 2) as i128 {
        t -= m as i128;
    }
    let q = (t * t - a) / b;
    if q == 0 {
        return None;
    }
    let (b2, k) = squarefree_decompose(q);
    let [x, y, z] = legendre_descent(a, b2)?;
    let (tb, ab) = (BigInt::from(t), BigInt::from(a));
    Some([&tb * &x + &ab * &y, &x + &tb * &y, BigInt::from(b2) * BigInt::from(k) * z])
}

fn primitive(mut p: [BigInt; 3]) -> [BigInt; 3] {
    let g = p[0].gcd(&p[1]).gcd(&p[2]);
    if !g.is_zero() && !g.is_one() {
        for c in p.iter_mut() {
            *c /= &g;
        }
    }
    if p[2].is_negative() || (p[2].is_zero() && (p[1].is_negative() || (p[1].is_zero() && p[0].is_negative()))) {
        for c in p.iter_mut() {
            *c = -c.clone();
        }
    }
    p
}

fn descent_point(eq: &ConicEquation) -> Option<[BigInt; 3]> {
    let [c1, c2, c3] = eq.coeffs.map(|c| c as i128);
    let (a, s) = squarefree_decompose(-c1 * c3);
    let (b, t) = squarefree_decompose(-c2 * c3);
    let [x, y, z] = legendre_descent(a, b)?;
    let (s, t, c3) = (BigInt::from(s), BigInt::from(t), BigInt::from(c3));
    Some(primitive([y * &t * &c3, z * &s * &c3, x * &s * &t]))
}

/// Moves a point with `w = 0` to another point on the same conic with `w ≠ 0`
/// by intersecting lines through it with the conic.
fn lift_off_line_at_infinity(eq: &ConicEquation, p: [BigInt; 3]) -> Option<[BigInt; 3]> {
    let c = eq.coeffs.map(BigInt::from);
    let directions: [[i64; 3]; 8] =
        [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1], [1, -1, 1], [2, 1, 1], [1, 2, 1], [2, -1, 1]];
    for dir in directions {
        let d = dir.map(BigInt::from);
        let q: BigInt = (0..3).map(|i| &c[i] * &d[i] * &d[i]).sum();
        let bil: BigInt = (0..3).map(|i| &c[i] * &p[i] * &d[i]).sum();
        let two_b = bil * 2;
        let next: [BigInt; 3] = std::array::from_fn(|i| &q * &p[i] - &two_b * &d[i]);
        if !next[2].is_zero() {
            return Some(primitive(next));
        }
    }
    None
}

/// Finds a primitive solution with nonzero last coordinate.
///
/// Order: local solvability check, a small box search, then Legendre descent.
/// The same input always yields the same output.
pub fn solve_conic(eq: &ConicEquation, limits: &SearchLimits) -> Result<ConicSolution> {
    if let Some(place) = eq.local_obstruction() {
        return Err(Error::LocallyUnsolvable(place));
    }
    let point = match box_search(eq, limits.conic_box) {
        Some(p) => p.map(BigInt::from),
        None => {
            let p = descent_point(eq).ok_or(Error::ConicSearchExhausted)?;
            if p[2].is_zero() {
                lift_off_line_at_infinity(eq, p).ok_or(Error::ConicSearchExhausted)?
            } else {
                p
            }
        }
    };
    let [u, v, w] = point;
    let sol = ConicSolution { u, v, w, equation: *eq };
    if !sol.verify() || sol.w.is_zero() {
        return Err(Error::Internal(format!("conic solver produced an invalid point for {eq}")));
    }
    Ok(sol)
}

fn sign(v: i64) -> i32 {
    if v < 0 {
        -1
    } else {
        1
    }
}

/// Checks conditions (1)–(4) for a candidate parameter.
pub fn parameter_conditions_hold(d1: i64, d2: i64, a: u64) -> Result<bool> {
    let a_i = a as i64;
    let d1_parts = prime_parts(d1)?;
    let d2_parts = prime_parts(d2)?;
    let cond1 = d1 > 0 || a_i > 0;
    let cond2 = kronecker(d1, a_i) == 1 && kronecker(d2, a_i) == 1;
    let cond3 = d1_parts.iter().all(|p| kronecker(p.value(), a_i) == 1);
    let cond4 = d2_parts.iter().all(|p| kronecker(p.value(), a_i) == sign(p.value()));
    Ok(cond1 && cond2 && cond3 && cond4)
}

/// Smallest admissible `a`: 1 if possible, else the least odd prime satisfying
/// conditions (1)–(4). Requires `d2 > 0`.
pub fn find_parameter_a(d1: i64, d2: i64, limits: &SearchLimits) -> Result<u64> {
    parameter_candidates(d1, d2, limits)?.next().ok_or(Error::ParameterSearchExhausted(limits.max_a))
}

/// Every admissible `a` up to `limits.max_a`: first 1, then odd primes ascending.
pub fn parameter_candidates(d1: i64, d2: i64, limits: &SearchLimits) -> Result<impl Iterator<Item = u64>> {
    if d2 <= 0 {
        return Err(Error::InvalidInput(format!("d2 = {d2} must be positive; exchange d1 and d2")));
    }
    if d1.gcd(&d2) != 1 {
        return Err(Error::NotCoprime(d1, d2));
    }
    parameter_conditions_hold(d1, d2, 1)?;
    let max = limits.max_a;
    Ok(std::iter::once(1)
        .chain(odd_primes().take_while(move |&p| p <= max))
        .filter(move |&a| parameter_conditions_hold(d1, d2, a).unwrap_or(false)))
}

/// Solutions of
/// `d1·x1² − d2·x2² = −a·d3·x3²`, `y1² − d1·y2² = a·y3²`, `z1² − d2·z2² = −a·z3²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSolution {
    pub x: ConicSolution,
    pub y: ConicSolution,
    pub z: ConicSolution,
}

pub fn system_equations(d1: i64, d2: i64, d3: i64, a: u64) -> Result<[ConicEquation; 3]> {
    let a = a as i64;
    Ok([ConicEquation::new(d1, -d2, a * d3)?, ConicEquation::new(1, -d1, -a)?, ConicEquation::new(1, -d2, a)?])
}

pub fn solve_system(d1: i64, d2: i64, d3: i64, a: u64, limits: &SearchLimits) -> Result<SystemSolution> {
    let [e1, e2, e3] = system_equations(d1, d2, d3, a)?;
    Ok(SystemSolution { x: solve_conic(&e1, limits)?, y: solve_conic(&e2, limits)?, z: solve_conic(&e3, limits)? })
}

/// Existence of a nonzero point with all coordinates in `[−bound, bound]`,
/// by scanning `(u, v)` and testing whether `w²` is a perfect square.
pub fn brute_force_exists(eq: &ConicEquation, bound: i64) -> bool {
    let [c1, c2, c3] = eq.coeffs.map(|c| c as i128);
    for u in 0..=bound as i128 {
        for v in 0..=bound as i128 {
            if u == 0 && v == 0 {
                continue;
            }
            let s = -(c1 * u * u + c2 * v * v);
            if s % c3 != 0 {
                continue;
            }
            let w2 = s / c3;
            if w2 < 0 {
                continue;
            }
            let w = crate::arith::isqrt(w2 as u128) as i128;
            if w * w == w2 && w <= bound as i128 {
                return true;
            }
        }
    }
    false
}

/// Distinct prime factors of the coefficients, for diagnostics.
pub fn coefficient_primes(eq: &ConicEquation) -> Vec<u128> {
    let mut ps: Vec<u128> =
        eq.coeffs.iter().flat_map(|&c| factorize(c.unsigned_abs() as u128).into_iter().map(|(p, _)| p)).collect();
    ps.sort_unstable();
    ps.dedup();
    ps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: [i64; 3]) -> [BigInt; 3] {
        v.map(BigInt::from)
    }

    #[test]
    fn solve_examples() {
        let lim = SearchLimits::default();
        let s = solve_conic(&ConicEquation::new(5, -8, 13).unwrap(), &lim).unwrap();
        assert_eq!(s.triple(), b([2, 3, 2]));
        let s = solve_conic(&ConicEquation::new(1, -5, -1).unwrap(), &lim).unwrap();
        assert_eq!(s.triple(), b([1, 0, 1]));
        let s = solve_conic(&ConicEquation::new(1, -8, 1).unwrap(), &lim).unwrap();
        assert_eq!(s.triple(), b([2, 1, 2]));
    }

    #[test]
    fn descent_without_box() {
        let lim = SearchLimits { conic_box: 0, ..Default::default() };
        for c in [[5, -8, 13], [1, -5, -1], [1, -8, 1], [3, 5, -7], [-3, -5, 17 * 3], [7, 11, -2]] {
            let eq = ConicEquation::new(c[0], c[1], c[2]).unwrap();
            match solve_conic(&eq, &lim) {
                Ok(s) => {
                    assert!(s.verify(), "{eq}");
                    assert!(!s.w.is_zero());
                    assert_eq!(solve_conic(&eq, &lim).unwrap(), s, "determinism");
                }
                Err(Error::LocallyUnsolvable(_)) => assert!(!brute_force_exists(&eq, 60), "{eq}"),
                Err(e) => panic!("{eq}: {e}"),
            }
        }
    }

    #[test]
    fn obstruction_places() {
        let eq = ConicEquation::new(1, 1, 1).unwrap();
        assert_eq!(eq.local_obstruction(), Some(Place::Infinity));
        // x² + y² = 3z²
        let eq = ConicEquation::new(1, 1, -3).unwrap();
        assert!(matches!(eq.local_obstruction(), Some(Place::Prime(2 | 3))));
        assert!(matches!(solve_conic(&eq, &SearchLimits::default()), Err(Error::LocallyUnsolvable(_))));
    }

    #[test]
    fn hilbert_symbol_values() {
        assert_eq!(hilbert_symbol(-1, -1, 2), -1);
        assert_eq!(hilbert_symbol(2, 3, 3), -1);
        assert_eq!(hilbert_symbol(5, 3, 5), -1);
        assert_eq!(hilbert_symbol(2, 7, 2), 1);
        assert_eq!(hilbert_symbol(-1, 5, 2), 1);
    }

    #[test]
    fn parameter_examples() {
        let lim = SearchLimits::default();
        assert_eq!(find_parameter_a(5, 13, &lim).unwrap(), 1);
        assert_eq!(find_parameter_a(5, 8, &lim).unwrap(), 1);
        assert!(!parameter_conditions_hold(5, 13, 3).unwrap());
        assert_eq!(kronecker(5, 3), -1);
        assert!(matches!(find_parameter_a(5, -3, &lim), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn system_example() {
        let s = solve_system(5, 8, 13, 1, &SearchLimits::default()).unwrap();
        assert_eq!(s.x.triple(), b([2, 3, 2]));
        assert_eq!(s.y.triple(), b([1, 0, 1]));
        assert_eq!(s.z.triple(), b([2, 1, 2]));
    }

    #[test]
    fn system_with_negative_part() {
        let lim = SearchLimits::default();
        let a = find_parameter_a(-3, 5, &lim).unwrap();
        let s = solve_system(-3, 5, 8, a, &lim).unwrap();
        for sol in [&s.x, &s.y, &s.z] {
            assert!(sol.verify());
            assert!(!sol.w.is_zero());
        }
    }
}
