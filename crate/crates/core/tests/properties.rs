use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use h8ext::conic::SearchLimits;
use h8ext::construct::{construct_h8, ExtensionCertificate};
use h8ext::dihedral::{d4_construct, D4Certificate};
use h8ext::factorizations::{enumerate_d4, enumerate_h8, is_h8_factorization};
use h8ext::field::{Element, GaloisAction};
use h8ext::report::{d4_report, h8_report, RunReport};
use h8ext::serial::{parse_rational, rational_to_string};
use h8ext::symbols::{is_fundamental, kronecker};

const BASES: [&[i64]; 6] = [&[5], &[-4], &[8, -3], &[5, 8, 13], &[-3, 5, 17], &[-4, 5, 21]];

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=3).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn element_in(gens: &'static [i64]) -> impl Strategy<Value = Element> {
    prop::collection::vec(rational(), 1 << gens.len()).prop_map(move |c| Element::new(gens.to_vec(), c).unwrap())
}

fn triple() -> impl Strategy<Value = (Element, Element, Element)> {
    (0..BASES.len()).prop_flat_map(|i| (element_in(BASES[i]), element_in(BASES[i]), element_in(BASES[i])))
}

fn action(n: usize) -> impl Strategy<Value = GaloisAction> {
    (0u32..1 << n).prop_map(GaloisAction::from_mask)
}

proptest! {
    #[test]
    fn ring_axioms((x, y, z) in triple()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.inv().unwrap(), Element::one(x.gens()));
        }
    }

    #[test]
    fn galois_is_a_homomorphism(((x, y, _), m) in triple().prop_flat_map(|t| {
        let n = t.0.gens().len();
        (Just(t), action(n))
    })) {
        prop_assert_eq!((&x * &y).apply(m), &x.apply(m) * &y.apply(m));
        prop_assert_eq!((&x + &y).apply(m), &x.apply(m) + &y.apply(m));
        prop_assert_eq!(x.apply(m).apply(m), x.clone());
    }

    #[test]
    fn norm_is_multiplicative((x, y, _) in triple()) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn squares_are_detected((x, _, _) in triple()) {
        let sq = x.square();
        prop_assert!(sq.is_square());
        let r = sq.sqrt().unwrap();
        prop_assert_eq!(r.square(), sq);
    }

    #[test]
    fn char_poly_annihilates((x, _, _) in triple()) {
        // Σ c_i·x^i with the leading coefficient last
        let mut acc = Element::zero(x.gens());
        let mut pow = Element::one(x.gens());
        for c in x.char_poly() {
            acc = &acc + &pow.scale(&c);
            pow = &pow * &x;
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn integrality_tests_agree((x, _, _) in triple()) {
        prop_assert_eq!(x.is_integral(), x.is_integral_in_basis());
    }

    #[test]
    fn element_json_round_trip((x, _, _) in triple()) {
        let s = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<Element>(&s).unwrap(), x);
    }

    #[test]
    fn rational_text_round_trip(q in rational()) {
        prop_assert_eq!(parse_rational(&rational_to_string(&q)).unwrap(), q);
    }

    #[test]
    fn kronecker_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000, n in -10_000i64..10_000) {
        prop_assume!(n != 0 && b != 0);
        prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
        prop_assert_eq!(kronecker(a, b * n), kronecker(a, b) * kronecker(a, n));
    }

    #[test]
    fn kronecker_periodic_in_numerator(a in -10_000i64..10_000, n in 1i64..10_000, k in -5i64..5) {
        // for n ≢ 2 mod 4 the period divides n (n odd) or 4n
        let period = if n % 2 == 1 { n } else { 4 * n };
        prop_assume!(n % 4 != 2);
        prop_assert_eq!(kronecker(a + k * period, n), kronecker(a, n));
    }

    #[test]
    fn enumeration_is_permutation_invariant(d in -3000i64..3000) {
        prop_assume!(is_fundamental(d));
        for f in enumerate_h8(d).unwrap() {
            let [a, b, c] = f.parts;
            for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                let g = is_h8_factorization(p[0], p[1], p[2]);
                prop_assert!(g.is_ok(), "{:?}", p);
                prop_assert_eq!(g.unwrap().canonical(), f.canonical());
            }
        }
    }
}

fn h8_certs() -> &'static [ExtensionCertificate] {
    static CERTS: OnceLock<Vec<ExtensionCertificate>> = OnceLock::new();
    CERTS.get_or_init(|| {
        [520, -120, -255, -420, -455, 1480, -795]
            .iter()
            .flat_map(|&d| enumerate_h8(d).unwrap())
            .map(|f| construct_h8(&f, None, &SearchLimits::default()).unwrap())
            .collect()
    })
}

fn d4_certs() -> &'static [D4Certificate] {
    static CERTS: OnceLock<Vec<D4Certificate>> = OnceLock::new();
    CERTS.get_or_init(|| {
        [680, -68, -120, 205, -455]
            .iter()
            .flat_map(|&d| enumerate_d4(d).unwrap())
            .map(|f| d4_construct(&f, &SearchLimits::default()).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn h8_certificate_json_round_trip(i in 0usize..8) {
        let certs = h8_certs();
        let c = &certs[i % certs.len()];
        prop_assert_eq!(&ExtensionCertificate::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn d4_certificate_json_round_trip(i in 0usize..8) {
        let certs = d4_certs();
        let c = &certs[i % certs.len()];
        prop_assert_eq!(&D4Certificate::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn run_report_round_trip(d in -800i64..800, dihedral in any::<bool>()) {
        prop_assume!(is_fundamental(d));
        let limits = SearchLimits::default();
        let r = if dihedral { d4_report(d, None, &limits) } else { h8_report(d, None, None, &limits) }.unwrap();
        let back = RunReport::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(RunReport { format: r.format, ..back }, r);
    }
}

#[test]
fn certificate_schema_is_checked() {
    let c = &h8_certs()[0];
    let wrong = c.to_json().replace("h8cert/1", "h8cert/0");
    assert!(ExtensionCertificate::from_json(&wrong).is_err());
}
