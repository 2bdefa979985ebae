//! Kronecker and quartic residue symbols, and the factorization of a
//! fundamental discriminant into prime discriminants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, is_squarefree, pow_mod};
use crate::error::{Error, Result};

/// `(a/2)` for odd `a`.
fn kronecker_two(a: i128) -> i32 {
    match a.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Jacobi symbol for odd positive `n`.
fn jacobi(a: i128, n: i128) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

fn kronecker_i128(a: i128, n: i128) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -1;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= v;
        if v % 2 == 1 {
            result *= kronecker_two(a);
        }
    }
    result * jacobi(a, n)
}

/// Kronecker symbol `(a/n)` with `(a/2)` read off `a mod 8` and `(a/−1) = sign(a)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    kronecker_i128(a as i128, n as i128)
}

/// Kronecker symbol with a big numerator; `n` stays small.
pub fn kronecker_big(a: &BigInt, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == BigInt::from(1) { 1 } else { 0 };
    }
    let modulus = BigInt::from(8i128 * (n as i128).abs());
    let reduced = a.mod_floor(&modulus).to_i128().expect("reduced residue fits");
    let sign = if n < 0 && a.is_negative() { -1 } else { 1 };
    sign * kronecker_i128(reduced, (n as i128).abs())
}

/// Quartic residue symbol `(a/p)_4`.
///
/// For odd `p ≡ 1 mod 4` and `a` a nonzero square mod `p` this is
/// `a^((p−1)/4) mod p` read as `±1`; for `p = 2` it is `(−1)^((a−1)/8)`
/// and requires `a ≡ 1 mod 8`.
pub fn quartic_symbol(a: i64, p: u64) -> Result<i32> {
    if p == 2 {
        if a.rem_euclid(8) != 1 {
            return Err(Error::SymbolUndefined { a, p, reason: "requires a ≡ 1 mod 8" });
        }
        return Ok(if (a - 1).div_euclid(8).rem_euclid(2) == 0 { 1 } else { -1 });
    }
    if !is_prime(p as u128) {
        return Err(Error::SymbolUndefined { a, p, reason: "modulus is not prime" });
    }
    if p % 4 == 3 {
        return Err(Error::SymbolUndefined { a, p, reason: "p ≡ 3 mod 4" });
    }
    if kronecker(a, p as i64) != 1 {
        return Err(Error::SymbolUndefined { a, p, reason: "a is not a nonzero square mod p" });
    }
    let r = pow_mod(a.rem_euclid(p as i64) as u128, (p as u128 - 1) / 4, p as u128);
    match r {
        1 => Ok(1),
        r if r == p as u128 - 1 => Ok(-1),
        _ => Err(Error::Internal(format!("a^((p-1)/4) = {r} mod {p} is not ±1"))),
    }
}

/// Product of `(a/p)_4` over the distinct primes of the positive discriminant `modulus`,
/// with 2 counted once when `8 | modulus`.
pub fn quartic_symbol_composite(a: i64, modulus: i64) -> Result<i32> {
    if modulus <= 0 {
        return Err(Error::InvalidInput(format!("quartic symbol modulus {modulus} must be positive")));
    }
    let mut value = 1;
    for (p, e) in factorize(modulus as u128) {
        if p == 2 && e < 3 {
            return Err(Error::SymbolUndefined { a, p: 2, reason: "2 divides the modulus but 8 does not" });
        }
        value *= quartic_symbol(a, p as u64)?;
    }
    Ok(value)
}

/// `true` iff `d` is the discriminant of a quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d as i128),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m as i128)
        }
        _ => false,
    }
}

/// One of `−4`, `±8`, or `p* = (−1)^((p−1)/2) p` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct PrimeDiscriminant(i64);

impl PrimeDiscriminant {
    pub fn new(value: i64) -> Result<Self> {
        let ok = match value {
            -4 | 8 | -8 => true,
            v => v.rem_euclid(4) == 1 && is_prime(v.unsigned_abs() as u128),
        };
        if ok {
            Ok(Self(value))
        } else {
            Err(Error::InvalidInput(format!("{value} is not a prime discriminant")))
        }
    }

    /// `p*` for an odd prime `p`.
    pub fn for_odd_prime(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && is_prime(p as u128));
        let p = p as i64;
        Self(if p % 4 == 1 { p } else { -p })
    }

    pub fn value(self) -> i64 {
        self.0
    }

    /// The rational prime dividing this discriminant.
    pub fn prime(self) -> u64 {
        match self.0 {
            -4 | 8 | -8 => 2,
            v => v.unsigned_abs(),
        }
    }
}

impl TryFrom<i64> for PrimeDiscriminant {
    type Error = Error;
    fn try_from(v: i64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PrimeDiscriminant> for i64 {
    fn from(p: PrimeDiscriminant) -> i64 {
        p.0
    }
}

impl fmt::Display for PrimeDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sort key used for every user-visible list of discriminants:
/// negative values first, then by absolute value.
pub fn canonical_key(v: i64) -> (bool, u64) {
    (v > 0, v.unsigned_abs())
}

/// A fundamental discriminant together with its prime discriminant factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantFactorization {
    pub d: i64,
    pub parts: Vec<PrimeDiscriminant>,
}

impl DiscriminantFactorization {
    pub fn product(&self) -> i64 {
        self.parts.iter().map(|p| p.value()).product()
    }

    pub fn values(&self) -> Vec<i64> {
        self.parts.iter().map(|p| p.value()).collect()
    }
}

impl fmt::Display for DiscriminantFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(" · "))
    }
}

/// Splits a fundamental discriminant into its unique list of prime discriminants.
///
/// Odd primes contribute `p*`; whatever is left over is the 2-part and is one of
/// `1, −4, 8, −8`.
pub fn factor_discriminant(d: i64) -> Result<DiscriminantFactorization> {
    if d == 1 {
        return Err(Error::UnitDiscriminant);
    }
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    let mut parts = Vec::new();
    let mut odd_product = 1i64;
    for (p, _) in factorize(d.unsigned_abs() as u128) {
        if p == 2 {
            continue;
        }
        let pd = PrimeDiscriminant::for_odd_prime(p as u64);
        odd_product *= pd.value();
        parts.push(pd);
    }
    let two_part = d / odd_product;
    match two_part {
        1 => {}
        -4 | 8 | -8 => parts.push(PrimeDiscriminant(two_part)),
        other => {
            return Err(Error::Internal(format!("2-part of {d} came out as {other}")));
        }
    }
    parts.sort_by_key(|p| canonical_key(p.value()));
    Ok(DiscriminantFactorization { d, parts })
}

/// Prime discriminant factors of a product of coprime fundamental discriminants
/// (accepts `1`, giving the empty list).
pub fn prime_parts(d: i64) -> Result<Vec<PrimeDiscriminant>> {
    if d == 1 {
        return Ok(Vec::new());
    }
    Ok(factor_discriminant(d)?.parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(40, 13), 1);
        assert_eq!(kronecker(65, 2), 1);
        for d in [-7, 0, 5, 12, 1_000_003] {
            assert_eq!(kronecker(d, 1), 1);
        }
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(-5, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3i64, 5, 7, 11, 13, 97] {
            for a in -50i64..50 {
                let e = pow_mod(a.rem_euclid(p) as u128, (p as u128 - 1) / 2, p as u128);
                let expected = match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker(a, p), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_big_agrees() {
        for a in -300i64..300 {
            for n in [-24i64, -7, -1, 1, 2, 8, 15, 40, 97] {
                assert_eq!(kronecker_big(&BigInt::from(a), n), kronecker(a, n));
            }
        }
    }

    #[test]
    fn quartic_examples() {
        assert_eq!(quartic_symbol(40, 13).unwrap(), 1);
        assert_eq!(quartic_symbol(104, 5).unwrap(), -1);
        assert_eq!(quartic_symbol(65, 2).unwrap(), 1);
        assert_eq!(quartic_symbol(17, 2).unwrap(), 1);
        assert_eq!(quartic_symbol(9, 2).unwrap(), -1);
        assert_eq!(quartic_symbol(-7, 2).unwrap(), -1);
        assert_eq!(quartic_symbol_composite(40, 13).unwrap(), 1);
        assert_eq!(quartic_symbol_composite(12345, 1).unwrap(), 1);
        assert_eq!(quartic_symbol_composite(65, 8).unwrap(), 1);
    }

    #[test]
    fn quartic_rejections() {
        assert!(matches!(quartic_symbol(2, 5), Err(Error::SymbolUndefined { .. })));
        assert!(matches!(quartic_symbol(2, 7), Err(Error::SymbolUndefined { .. })));
        assert!(matches!(quartic_symbol(3, 2), Err(Error::SymbolUndefined { .. })));
        assert!(matches!(quartic_symbol(10, 5), Err(Error::SymbolUndefined { .. })));
        assert!(quartic_symbol_composite(5, 12).is_err());
    }

    #[test]
    fn fundamental_examples() {
        assert!(is_fundamental(5));
        assert!(!is_fundamental(1));
        assert!(is_fundamental(-120));
        assert!(is_fundamental(-4));
        assert!(is_fundamental(8));
        assert!(!is_fundamental(4));
        assert!(!is_fundamental(-16));
        assert!(!is_fundamental(20));
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor_discriminant(520).unwrap().values(), vec![5, 8, 13]);
        assert_eq!(factor_discriminant(-4).unwrap().values(), vec![-4]);
        assert_eq!(factor_discriminant(12).unwrap().values(), vec![-3, -4]);
        assert_eq!(factor_discriminant(-120).unwrap().values(), vec![-3, 5, 8]);
        assert_eq!(factor_discriminant(1), Err(Error::UnitDiscriminant));
        assert_eq!(factor_discriminant(16), Err(Error::NotFundamental(16)));
    }

    #[test]
    fn factorization_remultiplies() {
        for d in -10_000i64..=10_000 {
            if is_fundamental(d) {
                let f = factor_discriminant(d).unwrap();
                assert_eq!(f.product(), d);
                let mut primes: Vec<u64> = f.parts.iter().map(|p| p.prime()).collect();
                primes.sort_unstable();
                primes.dedup();
                assert_eq!(primes.len(), f.parts.len());
            }
        }
    }
}
