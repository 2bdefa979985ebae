//! Small-integer helpers: trial factorization, modular square roots, squarefree parts.
//!
//! Everything here works on `i128`/`u64` and assumes desk-scale inputs
//! (trial division up to the square root is acceptable).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Prime factorization of `n > 0` by trial division, primes ascending.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    assert!(n > 0, "factorize(0)");
    let mut out = Vec::new();
    let mut push = |p: u128, n: &mut u128| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u128;
    let mut step = 2;
    while p * p <= n {
        push(p, &mut n);
        p += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors of `|n|`, ascending. Empty for `n = ±1`.
pub fn prime_divisors(n: i128) -> Vec<u128> {
    if n == 0 {
        return Vec::new();
    }
    factorize(n.unsigned_abs()).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut p = 5u128;
    while p * p <= n {
        if n.is_multiple_of(p) || n.is_multiple_of(p + 2) {
            return false;
        }
        p += 6;
    }
    true
}

/// Odd primes in increasing order starting at 3.
pub fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| is_prime(n as u128))
}

pub fn is_squarefree(n: i128) -> bool {
    n != 0 && factorize(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Writes `n = core * k^2` with `core` squarefree (sign carried by `core`).
pub fn squarefree_decompose(n: i128) -> (i128, u128) {
    assert!(n != 0, "squarefree part of 0");
    let mut core: i128 = n.signum();
    let mut k: u128 = 1;
    for (p, e) in factorize(n.unsigned_abs()) {
        if e % 2 == 1 {
            core *= p as i128;
        }
        k *= p.pow(e / 2);
    }
    (core, k)
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

pub fn pow_mod(base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut b = base % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    // only reached for moduli beyond 64 bits
    let (mut a, mut b, mut acc) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    acc
}

/// Square root of `a` modulo the prime `p` (Tonelli–Shanks), the smaller of the two roots.
pub fn sqrt_mod_prime(a: i128, p: u128) -> Option<u128> {
    let a = a.rem_euclid(p as i128) as u128;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        let mut q = p - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while pow_mod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = mul_mod(tt, tt, p);
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    };
    Some(root.min(p - root))
}

/// Square root of `a` modulo a squarefree `m > 0`, via CRT over its prime factors.
/// Returns the representative in `[0, m)`.
pub fn sqrt_mod_squarefree(a: i128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let mut acc: u128 = 0;
    let mut modulus: u128 = 1;
    for (p, e) in factorize(m) {
        debug_assert_eq!(e, 1);
        let r = sqrt_mod_prime(a, p)?;
        // combine acc (mod modulus) with r (mod p)
        let inv = mod_inverse(modulus % p, p).expect("coprime moduli");
        let diff = (r + p - acc % p) % p;
        let k = mul_mod(diff, inv, p);
        acc += modulus * k;
        modulus *= p;
    }
    Some(acc % modulus)
}

pub fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u128)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Convert a `BigInt` to `i128`, if it fits.
pub fn to_i128(n: &BigInt) -> Option<i128> {
    n.to_i128()
}

/// `n mod m` for a big integer and a small positive modulus.
pub fn big_mod(n: &BigInt, m: u128) -> u128 {
    let r = n.mod_floor(&BigInt::from(m));
    r.to_u128().expect("residue fits")
}

/// `p`-adic valuation of a nonzero big integer.
pub fn valuation(n: &BigInt, p: u128) -> u32 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}
