//! Exact arithmetic in multiquadratic fields `Q(√g1, …, √gk)`.
//!
//! An element is stored as its `2^k` rational coordinates in the basis
//! `{∏_{j∈S} √gj : S ⊆ {1..k}}`, with `S` encoded as a bitmask (bit `j`
//! set means `√gj` is a factor). For two generators `(m, n)` this is the
//! familiar `c0 + c1√m + c2√n + c3√(mn)`.
//!
//! Generators are assumed multiplicatively independent modulo squares, so
//! the representation is unique. The integral-basis helpers additionally
//! assume they are pairwise coprime fundamental discriminants, in which case
//! the ring of integers is `Z[ω1, …, ωk]` with `ωj = (gj + √gj)/2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Automorphism of a multiquadratic field: negates `√gj` for each bit `j` of `mask`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaloisAction {
    pub mask: u32,
}

impl GaloisAction {
    pub const IDENTITY: GaloisAction = GaloisAction { mask: 0 };

    pub fn from_mask(mask: u32) -> Self {
        Self { mask }
    }

    /// On `Q(√m, √n)`: fixes `√m`, negates `√n`.
    pub fn sigma() -> Self {
        Self { mask: 0b10 }
    }

    /// On `Q(√m, √n)`: negates `√m`, fixes `√n`.
    pub fn tau() -> Self {
        Self { mask: 0b01 }
    }

    pub fn sigma_tau() -> Self {
        Self { mask: 0b11 }
    }

    pub fn compose(self, other: Self) -> Self {
        Self { mask: self.mask ^ other.mask }
    }

    pub fn label(self) -> String {
        match self.mask {
            0 => "id".into(),
            m => {
                let flips: Vec<String> = (0..32).filter(|j| m >> j & 1 == 1).map(|j| format!("√g{}", j + 1)).collect();
                format!("flip[{}]", flips.join(","))
            }
        }
    }
}

impl fmt::Display for GaloisAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// An element of `Q(√g1, …, √gk)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    gens: Vec<i64>,
    coords: Vec<BigRational>,
}

/// Element of a biquadratic field `Q(√m, √n)`.
pub type BiquadElement = Element;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Element {
    pub fn new(gens: Vec<i64>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != 1 << gens.len() {
            return Err(Error::InvalidInput(format!("{} coordinates for {} generators", coords.len(), gens.len())));
        }
        if gens.iter().any(|&g| g == 0 || g == 1) {
            return Err(Error::InvalidInput("generators must differ from 0 and 1".into()));
        }
        Ok(Self { gens, coords })
    }

    pub fn from_ints(gens: &[i64], coords: &[i64]) -> Result<Self> {
        Self::new(gens.to_vec(), coords.iter().map(|&c| q(c)).collect())
    }

    /// `c0 + c1√m + c2√n + c3√(mn)`.
    pub fn biquad(m: i64, n: i64, coords: [BigRational; 4]) -> Result<Self> {
        Self::new(vec![m, n], coords.to_vec())
    }

    pub fn zero(gens: &[i64]) -> Self {
        Self { gens: gens.to_vec(), coords: vec![BigRational::zero(); 1 << gens.len()] }
    }

    pub fn rational(gens: &[i64], value: BigRational) -> Self {
        let mut e = Self::zero(gens);
        e.coords[0] = value;
        e
    }

    pub fn integer(gens: &[i64], value: i64) -> Self {
        Self::rational(gens, q(value))
    }

    pub fn one(gens: &[i64]) -> Self {
        Self::integer(gens, 1)
    }

    /// Basis element `∏_{j ∈ mask} √gj` times `c`.
    pub fn monomial(gens: &[i64], mask: usize, c: BigRational) -> Self {
        let mut e = Self::zero(gens);
        e.coords[mask] = c;
        e
    }

    /// `√k` for an integer `k` whose square root lies in the field, using the
    /// convention `√k = i·√|k|` for negative `k`.
    pub fn sqrt_of_integer(gens: &[i64], k: i64) -> Option<Self> {
        if k == 0 {
            return Some(Self::zero(gens));
        }
        for mask in 0..1usize << gens.len() {
            let prod: BigInt = (0..gens.len()).filter(|j| mask >> j & 1 == 1).map(|j| BigInt::from(gens[j])).product();
            // √prod = √k · √(prod/k) with prod/k a positive rational square
            let ratio = BigRational::new(prod, BigInt::from(k));
            if let Some(s) = rational_sqrt(&ratio) {
                return Some(Self::monomial(gens, mask, s.recip()));
            }
        }
        None
    }

    pub fn gens(&self) -> &[i64] {
        &self.gens
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.gens == other.gens {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    /// `∏_{j ∈ a∧b} gj`, the scalar from multiplying two basis elements.
    fn basis_product_scalar(&self, a: usize, b: usize) -> BigInt {
        let common = a & b;
        (0..self.gens.len()).filter(|j| common >> j & 1 == 1).map(|j| BigInt::from(self.gens[j])).product()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(Self { gens: self.gens.clone(), coords })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(Self { gens: self.gens.clone(), coords })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let n = self.coords.len();
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let s = self.basis_product_scalar(i, j);
                out[i ^ j] += a * b * BigRational::from_integer(s);
            }
        }
        Ok(Self { gens: self.gens.clone(), coords: out })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { gens: self.gens.clone(), coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&q(c))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn apply(&self, g: GaloisAction) -> Self {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| if (i as u32 & g.mask).count_ones() % 2 == 1 { -c } else { c.clone() })
            .collect();
        Self { gens: self.gens.clone(), coords }
    }

    /// `x · g(x)`, the relative norm to the fixed field of an involution `g`.
    pub fn norm_under(&self, g: GaloisAction) -> Self {
        self * &self.apply(g)
    }

    fn group(&self) -> impl Iterator<Item = GaloisAction> {
        (0..self.coords.len() as u32).map(GaloisAction::from_mask)
    }

    /// Absolute norm to `Q`.
    pub fn norm(&self) -> BigRational {
        let mut acc = Self::one(&self.gens);
        for g in self.group() {
            acc = &acc * &self.apply(g);
        }
        acc.as_rational().cloned().expect("norm is rational")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut others = Self::one(&self.gens);
        for g in self.group().skip(1) {
            others = &others * &self.apply(g);
        }
        let n = (&others * self).as_rational().cloned().expect("norm is rational");
        Ok(others.scale(&n.recip()))
    }

    /// Re-expresses the element over a larger generator list containing all of
    /// this element's generators.
    pub fn embed(&self, gens: &[i64]) -> Result<Self> {
        let positions: Vec<usize> = self
            .gens
            .iter()
            .map(|g| gens.iter().position(|h| h == g).ok_or(Error::BaseMismatch))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(gens);
        for (i, c) in self.coords.iter().enumerate() {
            let mut mask = 0usize;
            for (j, &p) in positions.iter().enumerate() {
                if i >> j & 1 == 1 {
                    mask |= 1 << p;
                }
            }
            out.coords[mask] = c.clone();
        }
        Ok(out)
    }

    /// Writes `x = a + b·√g_last` with `a, b` over the first `k − 1` generators.
    fn split_last(&self) -> (Self, Self, i64) {
        let k = self.gens.len();
        let half = 1 << (k - 1);
        let sub = self.gens[..k - 1].to_vec();
        let a = Self { gens: sub.clone(), coords: self.coords[..half].to_vec() };
        let b = Self { gens: sub, coords: self.coords[half..].to_vec() };
        (a, b, self.gens[k - 1])
    }

    fn join_last(a: Self, b: Self, g: i64) -> Self {
        let mut gens = a.gens;
        gens.push(g);
        let mut coords = a.coords;
        coords.extend(b.coords);
        Self { gens, coords }
    }

    /// A square root in the same field, if one exists.
    ///
    /// Works down the tower: for `x = a + b√g`, a root `u + v√g` has
    /// `u² = (a ± √(a² − g b²))/2` and `v = b/(2u)`.
    pub fn sqrt(&self) -> Option<Self> {
        if self.gens.is_empty() {
            return rational_sqrt(&self.coords[0]).map(|r| Self { gens: vec![], coords: vec![r] });
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let (a, b, g) = self.split_last();
        let zero = Self::zero(&a.gens);
        if b.is_zero() {
            if let Some(u) = a.sqrt() {
                return Some(Self::join_last(u, zero, g));
            }
            let v = a.scale(&q(g).recip()).sqrt()?;
            return Some(Self::join_last(zero, v, g));
        }
        let disc = &(&a * &a) - (&(&b * &b).scale_int(g));
        let n = disc.sqrt()?;
        for s in [n.clone(), -&n] {
            let u2 = (&a + &s).scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
            if let Some(u) = u2.sqrt() {
                if u.is_zero() {
                    continue;
                }
                let v = (&b * &u.inv().ok()?).scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
                let root = Self::join_last(u, v, g);
                if &root.square() == self {
                    return Some(root);
                }
            }
        }
        None
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// Characteristic polynomial over `Q`, constant term first, monic.
    pub fn char_poly(&self) -> Vec<BigRational> {
        let mut poly: Vec<Element> = vec![Self::one(&self.gens)];
        for g in self.group() {
            let root = self.apply(g);
            // multiply by (T − root)
            let mut next = vec![Self::zero(&self.gens); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * &root);
            }
            poly = next;
        }
        poly.into_iter().map(|c| c.as_rational().cloned().expect("rational coefficient")).collect()
    }

    /// Integrality via the characteristic polynomial.
    pub fn is_integral(&self) -> bool {
        self.char_poly().iter().all(|c| c.is_integer())
    }

    /// `ω_S = ∏_{j∈S} (gj + √gj)/2`.
    pub fn omega(gens: &[i64], mask: usize) -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut acc = Self::one(gens);
        for j in 0..gens.len() {
            if mask >> j & 1 == 1 {
                let mut w = Self::monomial(gens, 1 << j, half.clone());
                w.coords[0] = &half * q(gens[j]);
                acc = &acc * &w;
            }
        }
        acc
    }

    /// Coordinates in the basis `{ω_S}`.
    pub fn integral_basis_coords(&self) -> Vec<BigRational> {
        let k = self.gens.len();
        let n = self.coords.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&m| std::cmp::Reverse(m.count_ones()));
        let mut b = vec![BigRational::zero(); n];
        for &t in &order {
            // c_t = Σ_{S ⊇ t} b_S · ∏_{S∖t} g / 2^{|S|}
            let mut rest = self.coords[t].clone();
            #[allow(clippy::needless_range_loop)]
            for s in 0..n {
                if s != t && s & t == t {
                    let prod: BigInt =
                        (0..k).filter(|j| (s & !t) >> j & 1 == 1).map(|j| BigInt::from(self.gens[j])).product();
                    let denom = BigInt::one() << s.count_ones();
                    rest -= &b[s] * BigRational::new(prod, denom);
                }
            }
            b[t] = rest * BigRational::from_integer(BigInt::one() << t.count_ones());
        }
        b
    }

    /// Integrality via coordinates in `Z[ω1, …, ωk]`.
    pub fn is_integral_in_basis(&self) -> bool {
        self.integral_basis_coords().iter().all(|c| c.is_integer())
    }

    /// Positive gcd of the integral-basis coordinates; `None` unless integral.
    pub fn integral_content(&self) -> Option<BigInt> {
        let coords = self.integral_basis_coords();
        if !coords.iter().all(|c| c.is_integer()) {
            return None;
        }
        Some(coords.iter().fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, c.numer())))
    }

    /// Integral with odd norm, i.e. coprime to 2.
    pub fn is_odd_integral(&self) -> bool {
        self.is_integral_in_basis() && self.norm().numer().bit(0)
    }

    /// Sign at the real embedding obtained by applying `g` and then taking all
    /// square roots positive. `None` when some generator is negative.
    pub fn real_sign(&self, g: GaloisAction) -> Option<i32> {
        if self.gens.iter().any(|&x| x < 0) {
            return None;
        }
        Some(self.apply(g).principal_sign())
    }

    fn principal_sign(&self) -> i32 {
        if self.gens.is_empty() {
            let c = &self.coords[0];
            return if c.is_positive() {
                1
            } else if c.is_negative() {
                -1
            } else {
                0
            };
        }
        let (a, b, g) = self.split_last();
        let (sa, sb) = (a.principal_sign(), b.principal_sign());
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let diff = &(&a * &a) - &(&b * &b).scale_int(g);
        match diff.principal_sign() {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }

    /// Signs at every real embedding, indexed by the flip mask.
    pub fn real_signs(&self) -> Option<Vec<i32>> {
        self.group().map(|g| self.real_sign(g)).collect()
    }

    pub fn is_totally_positive(&self) -> Option<bool> {
        self.real_signs().map(|s| s.iter().all(|&x| x == 1))
    }

    pub fn is_totally_negative(&self) -> Option<bool> {
        self.real_signs().map(|s| s.iter().all(|&x| x == -1))
    }

    fn basis_label(&self, mask: usize) -> String {
        let parts: Vec<String> =
            (0..self.gens.len()).filter(|j| mask >> j & 1 == 1).map(|j| self.gens[j].to_string()).collect();
        match parts.len() {
            0 => String::new(),
            1 => format!("√{}", parts[0]),
            _ => format!("√({})", parts.join("·")),
        }
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("({}/{})", c.numer(), c.denom())
    }
}

impl fmt::Display for Element {
    /// All coordinates in basis order: `c0 + c1√m + c2√n + c3√(m·n)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            let mag = fmt_rational(&c.abs());
            if i == 0 {
                let sign = if c.is_negative() { "-" } else { "" };
                write!(f, "{sign}{mag}")?;
            } else {
                let sign = if c.is_negative() { "-" } else { "+" };
                write!(f, " {sign} {mag}{}", self.basis_label(i))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl<'a> $trait<&'a Element> for &'a Element {
            type Output = Element;
            /// Panics on a base mismatch; use the `try_` form to get an error.
            fn $method(self, rhs: &'a Element) -> Element {
                self.$try(rhs).expect("operands over the same base")
            }
        }
        impl $trait<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$try(&rhs).expect("operands over the same base")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element { gens: self.gens.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// `x / y` is a square in the field.
pub fn square_class_equal(x: &Element, y: &Element) -> Result<bool> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(x.try_div(y)?.is_square())
}
