//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use h8ext::conic::{
    brute_force_exists, parameter_candidates, solve_conic, solve_system, system_equations, ConicEquation, SearchLimits,
};
use h8ext::construct::{
    classify, closed_forms_hold, compute_alpha, construct_h8, s_vector, uniqueness_twist, verify_certificate,
    ExtensionCertificate, GaloisClass, RHO,
};
use h8ext::dihedral::{d4_construct, d4_verify};
use h8ext::factorizations::{enumerate_d4, enumerate_h8, is_h8_factorization, negativity_check, H8Factorization};
use h8ext::field::{square_class_equal, Element};
use h8ext::infinity::infinity_verdict;
use h8ext::symbols::{is_fundamental, kronecker, quartic_symbol, quartic_symbol_composite};
use h8ext::table::{check_row, REFERENCE_ROWS};

const BOUND: i64 = 2000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn fundamentals() -> Vec<i64> {
    (-BOUND..=BOUND).filter(|&d| is_fundamental(d)).collect()
}

fn h8_factorizations() -> Vec<H8Factorization> {
    fundamentals().into_iter().flat_map(|d| enumerate_h8(d).unwrap()).collect()
}

// --- independent helpers: trial division and Euler's criterion ---

fn primes_of(n: u64) -> Vec<u64> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// `(a/p)` for a prime `p`, by Euler's criterion or `a mod 8`.
fn legendre(a: i64, p: u64) -> i32 {
    if p == 2 {
        return match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    match pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Prime discriminants of `d`, by trial division.
fn prime_discriminants(d: i64) -> Vec<i64> {
    let mut odd = 1i64;
    let mut out = Vec::new();
    for p in primes_of(d.unsigned_abs()) {
        if p != 2 {
            let ps = if p % 4 == 1 { p as i64 } else { -(p as i64) };
            odd *= ps;
            out.push(ps);
        }
    }
    if d / odd != 1 {
        out.push(d / odd);
    }
    out
}

fn brute_force_h8(d: i64) -> BTreeSet<[i64; 3]> {
    let parts = prime_discriminants(d);
    let mut out = BTreeSet::new();
    for code in 0..3u64.pow(parts.len() as u32) {
        let mut g = [1i64; 3];
        let mut c = code;
        for &p in &parts {
            g[(c % 3) as usize] *= p;
            c /= 3;
        }
        if g.contains(&1) {
            continue;
        }
        let ok = (0..3).all(|i| {
            let num = g[(i + 1) % 3] * g[(i + 2) % 3];
            primes_of(g[i].unsigned_abs()).into_iter().all(|p| legendre(num, p) == 1)
        });
        if ok {
            g.sort_unstable();
            out.insert(g);
        }
    }
    out
}

// --- criteria ---

fn criterion_1() -> Outcome {
    let limits = SearchLimits::default();
    let rows: Vec<_> = REFERENCE_ROWS.iter().map(|r| check_row(r, &limits)).collect();
    let bad: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| format!("{} {:?}", r.d, r.error)).collect();
    let unique_same = rows.iter().filter(|r| r.unique).all(|r| r.same_class);
    if bad.is_empty() && unique_same {
        pass(format!("{}/9 rows; every prime-part row has δ a square in K", rows.len()))
    } else {
        fail(format!("failing rows: {bad:?}"))
    }
}

fn galois_ok(c: &ExtensionCertificate) -> bool {
    let mu = c.mu_in_k();
    let s = s_vector(&mu).unwrap();
    s.entries() == [-1, -1, -1]
        && c.s_vector == s
        && classify(&s) == GaloisClass::H8
        && c.group == GaloisClass::H8
        && compute_alpha(&mu, RHO).unwrap().1 == -1
        && c.rho_sign == -1
        && closed_forms_hold(c).unwrap_or(false)
        && verify_certificate(c).is_ok()
}

fn criterion_2(certs: &[ExtensionCertificate]) -> Outcome {
    let limits = SearchLimits::default();
    let table: Vec<ExtensionCertificate> =
        REFERENCE_ROWS.iter().filter_map(|r| check_row(r, &limits).certificate).collect();
    let all: Vec<&ExtensionCertificate> = certs.iter().chain(&table).collect();
    let bad: Vec<i64> = all.iter().filter(|c| !galois_ok(c)).map(|c| c.d).collect();
    if bad.is_empty() && table.len() == 9 {
        pass(format!("{} certificates with S = (−1, −1, −1), H8, ρ-sign −1", all.len()))
    } else {
        fail(format!("bad certificates for d in {bad:?}"))
    }
}

fn criterion_3(factorizations: &[H8Factorization]) -> Outcome {
    let limits = SearchLimits::default();
    let mut found = Vec::new();
    let mut pool = BTreeSet::new();
    for f in factorizations {
        let c = construct_h8(f, None, &limits).unwrap();
        let [d1, d2, d3] = c.parts;
        let sol = solve_system(d1, d2, d3, c.a, &limits).unwrap();
        if ![&sol.x, &sol.y, &sol.z].iter().all(|s| s.verify()) {
            return fail(format!("solution for {:?}, a = {} does not verify", c.parts, c.a));
        }
        // the found a, plus small parameters that may violate the conditions
        for a in [c.a, 1, 3, 5, 7, 11, 13] {
            for eq in system_equations(d1, d2, d3, a).unwrap() {
                pool.insert(eq.coeffs);
            }
        }
        found.push(c);
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut pool: Vec<[i64; 3]> = pool.into_iter().collect();
    pool.shuffle(&mut rng);
    let mut solvable = 0;
    for coeffs in pool.iter().take(100) {
        let eq = ConicEquation { coeffs: *coeffs };
        let solver = match solve_conic(&eq, &limits) {
            Ok(s) => {
                if !s.verify() {
                    return fail(format!("{coeffs:?}: solver output does not verify"));
                }
                true
            }
            Err(_) => false,
        };
        if solver != brute_force_exists(&eq, 500) {
            return fail(format!("{coeffs:?}: solver says {solver}, box-500 disagrees"));
        }
        solvable += solver as usize;
    }
    pass(format!("{} systems verify; 100 sampled equations agree with box-500 ({solvable} solvable)", found.len()))
}

fn criterion_4() -> Outcome {
    let mut count = 0;
    for d in fundamentals() {
        let got: BTreeSet<[i64; 3]> = enumerate_h8(d)
            .unwrap()
            .iter()
            .map(|f| {
                let mut p = f.parts;
                p.sort_unstable();
                p
            })
            .collect();
        if got != brute_force_h8(d) {
            return fail(format!("d = {d}: enumeration differs from the brute-force colouring"));
        }
        for f in enumerate_h8(d).unwrap() {
            if !negativity_check(&f) || f.parts.iter().filter(|&&v| v < 0).count() > 1 {
                return fail(format!("{:?} has two negative parts", f.parts));
            }
        }
        count += got.len();
    }
    pass(format!("{count} factorizations match the brute-force colouring; none has two negative parts"))
}

fn criterion_5(certs: &[ExtensionCertificate]) -> Outcome {
    let worked = infinity_verdict(&is_h8_factorization(5, 8, 13).unwrap()).unwrap();
    if (worked.lhs, worked.rhs, worked.totally_real) != (Some(-1), Some(-1), true) {
        return fail(format!("(5, 8, 13): {worked:?}"));
    }
    let mut applicable = 0;
    for c in certs {
        let f = is_h8_factorization(c.parts[0], c.parts[1], c.parts[2]).unwrap();
        let v = infinity_verdict(&f).unwrap();
        if !v.applicable {
            continue;
        }
        applicable += 1;
        let direct = c.mu.mu.is_totally_positive() == Some(true);
        if direct != v.totally_real {
            return fail(format!("{:?}: predicate {} but μ totally positive is {direct}", c.parts, v.totally_real));
        }
    }
    if applicable == 0 {
        return fail("no applicable factorization");
    }
    pass(format!("{applicable} applicable factorizations agree; (5, 8, 13) has lhs = rhs = −1"))
}

fn criterion_6() -> Outcome {
    let odd_primes: Vec<u64> = (3..500).filter(|&n| primes_of(n) == [n]).collect();
    for &p in &odd_primes {
        let star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        for &q in &odd_primes {
            if p != q && kronecker(q as i64, p as i64) != kronecker(star, q as i64) {
                return fail(format!("reciprocity fails for p = {p}, q = {q}"));
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..10_000 {
        let a: i64 = rng.gen_range(-100_000..=100_000);
        let b: i64 = rng.gen_range(-100_000..=100_000);
        let n: i64 = rng.gen_range(-100_000..=100_000);
        if n == 0 || b == 0 {
            continue;
        }
        if kronecker(a * b, n) != kronecker(a, n) * kronecker(b, n) {
            return fail(format!("({a}·{b}/{n}) is not multiplicative"));
        }
        if kronecker(a, b * n) != kronecker(a, b) * kronecker(a, n) {
            return fail(format!("({a}/{b}·{n}) is not multiplicative"));
        }
        // against the product of Legendre symbols for odd positive n
        if n > 0 && n % 2 == 1 {
            let mut expect = 1;
            let mut m = n as u64;
            for p in primes_of(m) {
                while m.is_multiple_of(p) {
                    expect *= legendre(a, p);
                    m /= p;
                }
            }
            if kronecker(a, n) != expect {
                return fail(format!("({a}/{n}) disagrees with the Legendre product"));
            }
        }
    }
    let mut checked = 0;
    for p in (5..100u64).filter(|&n| primes_of(n) == [n] && n % 4 == 1) {
        let fourth: BTreeSet<u64> = (1..p).map(|x| pow_mod(x, 4, p)).collect();
        for a in 1..p {
            if legendre(a as i64, p) != 1 {
                continue;
            }
            let want = if fourth.contains(&a) { 1 } else { -1 };
            if quartic_symbol(a as i64, p).unwrap() != want {
                return fail(format!("({a}/{p})_4 disagrees with the brute-force fourth powers"));
            }
            checked += 1;
        }
    }
    if quartic_symbol_composite(40, 13).unwrap() != 1 {
        return fail("(40/13)_4 ≠ 1");
    }
    pass(format!(
        "reciprocity over {} primes, 10⁴ multiplicativity triples, {checked} quartic residues",
        odd_primes.len()
    ))
}

fn criterion_7() -> Outcome {
    let limits = SearchLimits::default();
    let mut n = 0;
    for d in fundamentals() {
        for f in enumerate_d4(d).unwrap() {
            let c = match d4_construct(&f, &limits) {
                Ok(c) => c,
                Err(e) => return fail(format!("{f}: {e}")),
            };
            let [x, y, z] = c.solution.clone();
            let raw =
                Element::new(vec![f.d1], vec![BigRational::from_integer(x), BigRational::from_integer(y)]).unwrap();
            let rhs = BigRational::from_integer(BigInt::from(f.d2) * &z * &z);
            if raw.norm() != rhs || z.is_zero() || !c.norm_relation_holds() {
                return fail(format!("{f}: norm relation fails"));
            }
            let mut e = c.s_vector.entries();
            e.sort_unstable();
            if e != [-1, 1, 1] || !d4_verify(&c) {
                return fail(format!("{f}: sign pattern {:?}", c.s_vector.entries()));
            }
            n += 1;
        }
    }
    pass(format!("{n} D4-factorizations: construction, α·α' = d2·Z², signs (−1, +1, +1)"))
}

fn criterion_8() -> Outcome {
    let limits = SearchLimits::default();
    let mut ds: Vec<i64> = (1..50_000).flat_map(|n| [-n, n]).filter(|&d| is_fundamental(d)).collect();
    ds.sort_by_key(|d| d.unsigned_abs());
    let mut done = Vec::new();
    for d in ds {
        if done.len() == 10 {
            break;
        }
        let Some(f) = enumerate_h8(d).unwrap().into_iter().find(|f| f.has_prime_parts()) else { continue };
        let c1 = construct_h8(&f, None, &limits).unwrap();
        let [d1, d2, _] = c1.parts;
        let Some(a2) = parameter_candidates(d1, d2, &limits).unwrap().find(|&a| a != c1.a) else { continue };
        let c2 = match construct_h8(&f, Some(a2), &limits) {
            Ok(c) => c,
            Err(e) => return fail(format!("d = {d}, a = {a2}: {e}")),
        };
        let same = square_class_equal(&c1.mu_in_k(), &c2.mu_in_k()).unwrap();
        if !same || uniqueness_twist(&c1, &c2).ok() != Some(1) {
            return fail(format!("d = {d}: a = {} and a = {a2} give different classes", c1.a));
        }
        done.push(format!("{d} (a = {}, {a2})", c1.a));
    }
    if done.len() < 10 {
        return fail(format!("only {} discriminants found", done.len()));
    }
    pass(format!("square-class-equal μ for {}", done.join(", ")))
}

fn main() {
    let factorizations = h8_factorizations();
    let limits = SearchLimits::default();
    let certs: Vec<ExtensionCertificate> =
        factorizations.iter().map(|f| construct_h8(f, None, &limits).unwrap()).collect();

    type Check<'a> = (u32, &'a str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);
    let secs = |s| Some(Duration::from_secs(s));
    let checks: Vec<Check> = vec![
        (1, "reference generators", secs(10), Box::new(criterion_1)),
        (2, "Galois certification", None, Box::new(|| criterion_2(&certs))),
        (3, "conic oracle equivalence", secs(120), Box::new(|| criterion_3(&factorizations))),
        (4, "enumeration oracle", secs(60), Box::new(criterion_4)),
        (5, "infinity criterion", secs(120), Box::new(|| criterion_5(&certs))),
        (6, "symbol suite", secs(10), Box::new(criterion_6)),
        (7, "D4 suite", secs(60), Box::new(criterion_7)),
        (8, "uniqueness", None, Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in checks {
        let t = Instant::now();
        let mut out = check();
        let elapsed = t.elapsed();
        if let Some(l) = limit {
            if elapsed > l {
                out.ok = false;
                out.detail.push_str(&format!("; exceeded {}s", l.as_secs()));
            }
        }
        let status = if out.ok { "PASS" } else { "FAIL" };
        println!("criterion {n} [{status}] {name} ({:.2}s): {}", elapsed.as_secs_f64(), out.detail);
        failed += !out.ok as u32;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
