//! Assembly and certification of quaternion extensions `K(√μ)` of `k = Q(√d)`.
//!
//! With `d = d1·d2·d3` an H8-factorization and `(x, y, z)` solving the
//! system for some `a`, the generator is
//! `μ = (x1√d1 + x2√d2)(y1 + y2√d1)(z1 + z2√d2) / r` in `K12 = Q(√d1, √d2)`.
//! Galois data is computed over `K = Q(√d1, √d2, √d3)`, whose automorphisms
//! are flip masks on `(√d1, √d2, √d3)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{prime_divisors, squarefree_decompose};
use crate::conic::{find_parameter_a, parameter_conditions_hold, solve_system, SearchLimits, SystemSolution};
use crate::error::{Error, Result};
use crate::factorizations::{is_h8_factorization, H8Factorization};
use crate::field::{Element, GaloisAction};
use crate::primary::{odd_class_of_two, TwoAdicStructure};
use crate::serial;
use crate::symbols::prime_parts;

/// Fixes `√d1`, negates `√d2` and `√d3`.
pub const SIGMA: GaloisAction = GaloisAction { mask: 0b110 };
/// Negates `√d1` and `√d3`, fixes `√d2`.
pub const TAU: GaloisAction = GaloisAction { mask: 0b101 };
/// Negates `√d1` and `√d2`, fixes `√d3`.
pub const SIGMA_TAU: GaloisAction = GaloisAction { mask: 0b011 };
/// Negates all three; not trivial on `k`.
pub const RHO: GaloisAction = GaloisAction { mask: 0b111 };

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuGenerator {
    pub beta: Element,
    pub gamma: Element,
    pub delta: Element,
    /// `μ = β·γ·δ / r`; absorbs the content and any sign or 2 twist.
    #[serde(with = "serial::rational")]
    pub r: BigRational,
    pub mu: Element,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SVector {
    #[serde(with = "serial::string")]
    pub sigma: i32,
    #[serde(with = "serial::string")]
    pub tau: i32,
    #[serde(with = "serial::string")]
    pub sigma_tau: i32,
}

impl SVector {
    pub fn entries(&self) -> [i32; 3] {
        [self.sigma, self.tau, self.sigma_tau]
    }
}

impl fmt::Display for SVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}, {:+}, {:+})", self.sigma, self.tau, self.sigma_tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaloisClass {
    #[serde(rename = "(2,2,2)")]
    Elementary,
    #[serde(rename = "(2,4)")]
    Abelian24,
    D4,
    H8,
}

impl fmt::Display for GaloisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaloisClass::Elementary => "(2,2,2)",
            GaloisClass::Abelian24 => "(2,4)",
            GaloisClass::D4 => "D4",
            GaloisClass::H8 => "H8",
        })
    }
}

/// Group of `K(√μ)/F` from the S-vector, up to permutation of entries.
pub fn classify(s: &SVector) -> GaloisClass {
    match s.entries().iter().filter(|&&e| e == -1).count() {
        0 => GaloisClass::Elementary,
        1 => GaloisClass::D4,
        2 => GaloisClass::Abelian24,
        _ => GaloisClass::H8,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionCertificate {
    #[serde(with = "serial::string")]
    pub d: i64,
    /// The labelling `(d1, d2, d3)` used by the construction; `d2 > 0`.
    #[serde(with = "serial::string_array")]
    pub parts: [i64; 3],
    #[serde(with = "serial::string")]
    pub a: u64,
    #[serde(with = "serial::string_array")]
    pub x: [BigInt; 3],
    #[serde(with = "serial::string_array")]
    pub y: [BigInt; 3],
    #[serde(with = "serial::string_array")]
    pub z: [BigInt; 3],
    pub mu: MuGenerator,
    pub s_vector: SVector,
    #[serde(with = "serial::string")]
    pub rho_sign: i32,
    pub group: GaloisClass,
    #[serde(with = "serial::string")]
    pub two_primary_twist: i64,
    /// `−q` when a totally negative `μ` was moved to a totally positive one.
    #[serde(with = "serial::string")]
    pub infinity_twist: i64,
    pub totally_real: Option<bool>,
}

pub const H8_SCHEMA: &str = "h8cert/1";

#[derive(Serialize, Deserialize)]
struct H8CertDoc {
    schema: String,
    #[serde(flatten)]
    cert: ExtensionCertificate,
}

impl ExtensionCertificate {
    pub fn d1(&self) -> i64 {
        self.parts[0]
    }
    pub fn d2(&self) -> i64 {
        self.parts[1]
    }
    pub fn d3(&self) -> i64 {
        self.parts[2]
    }

    /// `μ` embedded in `K = Q(√d1, √d2, √d3)`.
    pub fn mu_in_k(&self) -> Element {
        self.mu.mu.embed(&self.parts).expect("μ lies in K12 ⊂ K")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&H8CertDoc { schema: H8_SCHEMA.into(), cert: self.clone() }).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(H8CertDoc { schema: H8_SCHEMA.into(), cert: self.clone() }).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let doc: H8CertDoc = serde_json::from_value(v).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if doc.schema != H8_SCHEMA {
            return Err(Error::InvalidInput(format!("schema {:?}, expected {H8_SCHEMA}", doc.schema)));
        }
        Ok(doc.cert)
    }
}

fn int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

fn sqrt_gen(gens: &[i64], j: usize) -> Element {
    Element::monomial(gens, 1 << j, BigRational::one())
}

/// `(x1√d1 + x2√d2, y1 + y2√d1, z1 + z2√d2)` over `Q(√d1, √d2)`.
pub fn factors(d1: i64, d2: i64, sol: &SystemSolution) -> (Element, Element, Element) {
    let g = [d1, d2];
    let [x1, x2, _] = sol.x.triple();
    let [y1, y2, _] = sol.y.triple();
    let [z1, z2, _] = sol.z.triple();
    let beta = &sqrt_gen(&g, 0).scale(&int(&x1)) + &sqrt_gen(&g, 1).scale(&int(&x2));
    let gamma = &Element::rational(&g, int(&y1)) + &sqrt_gen(&g, 0).scale(&int(&y2));
    let delta = &Element::rational(&g, int(&z1)) + &sqrt_gen(&g, 1).scale(&int(&z2));
    (beta, gamma, delta)
}

/// Forms `βγδ` and divides by its integral content, so that no rational
/// prime divides the result.
pub fn build_mu(d1: i64, d2: i64, sol: &SystemSolution) -> Result<MuGenerator> {
    for s in [&sol.x, &sol.y, &sol.z] {
        if !s.verify() || s.w.is_zero() {
            return Err(Error::Internal(format!("unverified conic solution {:?}", s.triple())));
        }
    }
    let (beta, gamma, delta) = factors(d1, d2, sol);
    let raw = &(&beta * &gamma) * &delta;
    assert!(!raw.is_zero(), "μ vanishes for verified solutions");
    let content = raw.integral_content().ok_or(Error::NotIntegral)?;
    let r = int(&content);
    let mu = raw.scale(&r.recip());
    Ok(MuGenerator { beta, gamma, delta, r, mu })
}

/// `α` with `α² = μ^(1−g)` and the sign `α^(1+g)`.
pub fn compute_alpha(mu: &Element, g: GaloisAction) -> Result<(Element, i32)> {
    let q = mu.try_div(&mu.apply(g))?;
    let alpha = q.sqrt().ok_or_else(|| Error::NotNormal(g.label()))?;
    let n = alpha.norm_under(g);
    let sign = match n.as_rational() {
        Some(v) if v.is_one() => 1,
        Some(v) if (-v).is_one() => -1,
        _ => return Err(Error::Internal(format!("α^(1+g) = {n} is not ±1"))),
    };
    Ok((alpha, sign))
}

/// S-vector of `μ ∈ K` relative to `K/k`.
pub fn s_vector(mu_k: &Element) -> Result<SVector> {
    Ok(SVector {
        sigma: compute_alpha(mu_k, SIGMA)?.1,
        tau: compute_alpha(mu_k, TAU)?.1,
        sigma_tau: compute_alpha(mu_k, SIGMA_TAU)?.1,
    })
}

/// `α_ρ^(1+ρ)` for `ρ` negating every `√di`; `−1` for the pipeline.
pub fn check_normal_over_q(cert: &ExtensionCertificate) -> Result<i32> {
    Ok(compute_alpha(&cert.mu_in_k(), RHO)?.1)
}

/// Closed forms for `α_σ, α_τ, α_στ, α_ρ` in terms of the solution.
pub fn closed_form_alphas(cert: &ExtensionCertificate) -> Result<[Element; 4]> {
    let g = &cert.parts;
    let emb = |e: &Element| e.embed(g);
    let (beta, gamma, delta) = (emb(&cert.mu.beta)?, emb(&cert.mu.gamma)?, emb(&cert.mu.delta)?);
    let a = BigRational::from_integer(cert.a.into());
    let (x3, y3, z3) = (int(&cert.x[2]), int(&cert.y[2]), int(&cert.z[2]));
    let sqrt_d3 = sqrt_gen(g, 2);
    let alpha_sigma = sqrt_d3.scale(&(&a * &x3 * &z3)).try_div(&(&beta.apply(SIGMA) * &delta.apply(SIGMA)))?;
    let alpha_tau = sqrt_d3.scale(&(&a * &x3 * &y3)).try_div(&(&beta.apply(TAU) * &gamma.apply(TAU)))?;
    let ayz = Element::rational(g, &a * &y3 * &z3);
    let alpha_st = ayz.try_div(&(&gamma.apply(SIGMA_TAU) * &delta.apply(SIGMA_TAU)))?;
    let alpha_rho = ayz.try_div(&(&gamma.apply(RHO) * &delta.apply(RHO)))?;
    Ok([alpha_sigma, alpha_tau, alpha_st, alpha_rho])
}

/// The closed forms square to `μ^(1−ψ)` and have `α^(1+ψ) = −1`.
pub fn closed_forms_hold(cert: &ExtensionCertificate) -> Result<bool> {
    let mu = cert.mu_in_k();
    let alphas = closed_form_alphas(cert)?;
    for (alpha, g) in alphas.iter().zip([SIGMA, TAU, SIGMA_TAU, RHO]) {
        if alpha.square() != mu.try_div(&mu.apply(g))? {
            return Ok(false);
        }
        if alpha.norm_under(g) != Element::integer(&cert.parts, -1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relative norms of `μ` to the quadratic subfields of `K12`: `≐ d3` for
/// `√d1 ↦ −√d1` and `√d2 ↦ −√d2`, `≐ 1` for negating both.
pub fn norm_relations_hold(cert: &ExtensionCertificate) -> bool {
    let mu = &cert.mu.mu;
    let g = mu.gens().to_vec();
    let d3 = Element::integer(&g, cert.d3());
    let checks =
        [(GaloisAction::tau(), &d3), (GaloisAction::sigma(), &d3), (GaloisAction::sigma_tau(), &Element::one(&g))];
    checks.iter().all(|(act, target)| mu.norm_under(*act).try_div(target).map(|q| q.is_square()).unwrap_or(false))
}

/// The absolute norm of `μ`, up to squares, involves only `−1`, 2 and primes of `d`.
pub fn odd_support_ok(mu: &Element, d: i64) -> bool {
    let n = mu.norm();
    let allowed = prime_divisors(d as i128);
    let check = |v: &BigInt| -> bool {
        let Some(v) = crate::arith::to_i128(v) else { return false };
        let (core, _) = squarefree_decompose(v);
        prime_divisors(core).iter().all(|p| *p == 2 || allowed.contains(p))
    };
    check(n.numer()) && check(n.denom())
}

pub use crate::primary::two_primary_oracle;

/// Whether `K(√x)/K` is unramified above 2 for `x ∈ K` with `K(√x)/Q`
/// normal. A rational factor 2 is replaced by an odd element of its square class.
pub fn unramified_above_two(x: &Element, two_twist: bool) -> Result<bool> {
    let x = if two_twist {
        let u = odd_class_of_two(x.gens()).ok_or_else(|| Error::Internal("no odd class for 2".into()))?;
        x * &u
    } else {
        x.clone()
    };
    TwoAdicStructure::new(x.gens()).unramified_above_two_normal(&x)
}

/// Twist set for the 2-primary normalization of `μ ∈ Q(√d1, √d2)`.
pub fn two_primary_candidates(d1: i64, d2: i64) -> [i64; 2] {
    let p = (d1 as i128 * d2 as i128).rem_euclid(8);
    if p == 4 {
        [1, 2]
    } else {
        [1, -1]
    }
}

/// Picks the 2-primary twist of `μ`, decided over `K`. Ties go to the
/// totally positive choice, then to the first candidate.
pub fn two_primary_normalize(mu: &Element, parts: [i64; 3]) -> Result<(Element, i64)> {
    let mut passing = Vec::new();
    for t in two_primary_candidates(parts[0], parts[1]) {
        let unramified = if t == 2 {
            unramified_above_two(&mu.embed(&parts)?, true)
        } else {
            unramified_above_two(&mu.scale_int(t).embed(&parts)?, false)
        };
        if unramified.unwrap_or(false) {
            passing.push((mu.scale_int(t), t));
        }
    }
    if passing.is_empty() {
        return Err(Error::NoTwoPrimaryTwist);
    }
    let best = passing.iter().position(|(m, _)| m.is_totally_positive() == Some(true)).unwrap_or(0);
    Ok(passing.swap_remove(best))
}

/// Smallest prime `q ≡ 3 mod 4` dividing `d`.
pub fn prime_three_mod_four(d: i64) -> Option<u64> {
    prime_divisors(d as i128).into_iter().find(|p| p % 4 == 3).map(|p| p as u64)
}

/// Puts the labelling in the form the construction needs: `d2 > 0`.
pub fn construction_labelling(parts: [i64; 3]) -> [i64; 3] {
    let [d1, d2, d3] = parts;
    if d2 < 0 {
        [d2, d1, d3]
    } else {
        [d1, d2, d3]
    }
}

/// Full pipeline for one H8-factorization.
pub fn construct_h8(f: &H8Factorization, forced_a: Option<u64>, limits: &SearchLimits) -> Result<ExtensionCertificate> {
    let parts = construction_labelling(f.parts);
    let [d1, d2, d3] = parts;
    is_h8_factorization(d1, d2, d3)?;
    let a = match forced_a {
        Some(a) => {
            if !parameter_conditions_hold(d1, d2, a)? {
                return Err(Error::InvalidInput(format!("a = {a} violates the solvability conditions")));
            }
            a
        }
        None => find_parameter_a(d1, d2, limits)?,
    };
    let sol = solve_system(d1, d2, d3, a, limits)?;
    let mut gen = build_mu(d1, d2, &sol)?;

    let (mu, twist) = two_primary_normalize(&gen.mu, parts)?;
    let mut mu = mu;
    let mut infinity_twist = 1;
    if parts.iter().all(|&v| v > 0) && mu.is_totally_negative() == Some(true) {
        if let Some(q) = prime_three_mod_four(f.d) {
            infinity_twist = -(q as i64);
            mu = mu.scale_int(infinity_twist);
        }
    }
    gen.r = &gen.r / BigRational::from_integer((twist * infinity_twist).into());
    gen.mu = mu;

    let mu_k = gen.mu.embed(&parts)?;
    let s = s_vector(&mu_k)?;
    let rho_sign = compute_alpha(&mu_k, RHO)?.1;
    let totally_real = if parts.iter().all(|&v| v > 0) { gen.mu.is_totally_positive() } else { None };
    Ok(ExtensionCertificate {
        d: f.d,
        parts,
        a,
        x: sol.x.triple(),
        y: sol.y.triple(),
        z: sol.z.triple(),
        mu: gen,
        group: classify(&s),
        s_vector: s,
        rho_sign,
        two_primary_twist: twist,
        infinity_twist,
        totally_real,
    })
}

/// Rechecks every certificate claim from the stored data.
pub fn verify_certificate(cert: &ExtensionCertificate) -> Result<()> {
    let fail = |what: &str| Err(Error::Internal(format!("certificate check failed: {what}")));
    let [d1, d2, d3] = cert.parts;
    is_h8_factorization(d1, d2, d3)?;
    if d1 * d2 * d3 != cert.d {
        return fail("product");
    }
    let eqs = crate::conic::system_equations(d1, d2, d3, cert.a)?;
    for (eq, t) in eqs.iter().zip([&cert.x, &cert.y, &cert.z]) {
        if !eq.eval(&t[0], &t[1], &t[2]).is_zero() || t[2].is_zero() {
            return fail("conic solution");
        }
    }
    let raw = &(&cert.mu.beta * &cert.mu.gamma) * &cert.mu.delta;
    if raw.scale(&cert.r_inv()) != cert.mu.mu {
        return fail("μ = βγδ/r");
    }
    let two = cert.two_primary_twist.abs() == 2;
    let mut odd_mu = cert.mu_in_k();
    if two {
        odd_mu = odd_mu.scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
    }
    if !unramified_above_two(&odd_mu, two)? {
        return fail("2-primarity");
    }
    if !odd_support_ok(&cert.mu.mu, cert.d) {
        return fail("odd support");
    }
    let mu_k = cert.mu_in_k();
    if s_vector(&mu_k)? != cert.s_vector || classify(&cert.s_vector) != cert.group {
        return fail("S-vector");
    }
    if compute_alpha(&mu_k, RHO)?.1 != cert.rho_sign {
        return fail("ρ sign");
    }
    if !closed_forms_hold(cert)? {
        return fail("closed-form α");
    }
    if !norm_relations_hold(cert) {
        return fail("norm relations");
    }
    Ok(())
}

impl ExtensionCertificate {
    fn r_inv(&self) -> BigRational {
        self.mu.r.recip()
    }
}

/// Products of subsets of the prime discriminants of `d`, smallest subsets first.
pub fn discriminant_divisors(d: i64) -> Result<Vec<i64>> {
    let parts: Vec<i64> = prime_parts(d)?.iter().map(|p| p.value()).collect();
    let mut out: Vec<(u32, i64)> = (0u32..1 << parts.len())
        .map(|m| {
            let prod = parts.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, v)| v).product();
            (m.count_ones(), prod)
        })
        .collect();
    out.sort_by_key(|&(c, v)| (c, crate::symbols::canonical_key(v)));
    Ok(out.into_iter().map(|(_, v)| v).collect())
}

/// The first discriminant `δ | d` with `y ≐ δ·x` over the field of `x`.
pub fn discriminant_twist(x: &Element, y: &Element, d: i64) -> Result<Option<i64>> {
    let q = y.try_div(x)?;
    for delta in discriminant_divisors(d)? {
        if q.scale(&BigRational::from_integer(delta.into()).recip()).is_square() {
            return Ok(Some(delta));
        }
    }
    Ok(None)
}

/// `δ` with `m2.μ ≐ δ·m1.μ` over `K`; `1` means the same extension.
pub fn uniqueness_twist(m1: &ExtensionCertificate, m2: &ExtensionCertificate) -> Result<i64> {
    let mut p1 = m1.parts;
    let mut p2 = m2.parts;
    p1.sort_unstable();
    p2.sort_unstable();
    if p1 != p2 {
        return Err(Error::BaseMismatch);
    }
    let y = m2.mu.mu.embed(&m1.parts)?;
    discriminant_twist(&m1.mu_in_k(), &y, m1.d)?.ok_or(Error::NoDiscriminantTwist)
}

/// `y ≐ x` over the field with the given generators.
pub fn same_square_class_in(gens: &[i64], x: &Element, y: &Element) -> Result<bool> {
    crate::field::square_class_equal(&x.embed(gens)?, &y.embed(gens)?)
}
