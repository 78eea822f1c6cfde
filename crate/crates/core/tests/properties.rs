use akdq::cli::{parse_jet, parse_scalar};
use akdq::jets::scalar::{gi, gq, render};
use akdq::jets::{GaussianRational, Jet, JetMatrix, MultiIndex};
use akdq::wick::{delta, delta_inverse, hodge_decompose, multiply, Key, Pairing, TruncationPolicy, WickElement};
use proptest::prelude::*;

const DIM: usize = 3;
const ORDER: u32 = 4;

fn scalar() -> impl Strategy<Value = GaussianRational> {
    (-5i64..=5, 1i64..=4, -3i64..=3, 1i64..=4).prop_map(|(a, b, c, d)| gq(a, b) + gi(c, d))
}

fn exponents(max_degree: u32) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0u32..=max_degree, DIM)
        .prop_filter("degree within bound", move |e| e.iter().sum::<u32>() <= max_degree)
}

fn jet() -> impl Strategy<Value = Jet> {
    proptest::collection::vec((exponents(ORDER), scalar()), 0..6).prop_map(|terms| {
        let mut acc = Jet::zero(DIM, ORDER);
        for (e, c) in terms {
            acc.add_assign_jet(&Jet::from_coeffs(DIM, ORDER, [(e, c)]).unwrap());
        }
        acc
    })
}

fn element(form_degree: u32) -> impl Strategy<Value = WickElement> {
    let key = (0u32..=1, exponents(3), proptest::sample::subsequence(vec![0u8, 1, 2], form_degree as usize));
    proptest::collection::vec((key, jet()), 0..4).prop_map(|terms| {
        let mut out = WickElement::zero(DIM, ORDER);
        for ((nu, y, dx), c) in terms {
            let mask = dx.iter().fold(0u8, |m, j| m | (1 << j));
            out.add_term(Key::new(nu, MultiIndex::new(&y).unwrap(), mask), &c);
        }
        out
    })
}

/// A constant Wick pairing in dimension 3 is not symplectic, but the product
/// identities below do not need that.
fn pairing() -> Pairing {
    let c = |v: GaussianRational| Jet::constant(DIM, ORDER, v);
    Pairing::from_matrix(
        JetMatrix::from_rows(vec![
            vec![c(gi(-1, 1)), c(gq(-1, 1)), c(gq(0, 1))],
            vec![c(gq(1, 1)), c(gi(-1, 1)), c(gq(1, 2))],
            vec![c(gq(0, 1)), c(gq(-1, 2)), c(gi(-2, 1))],
        ])
        .unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_axioms(a in jet(), b in jet(), c in jet()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &Jet::one(DIM, ORDER), a);
    }

    #[test]
    fn leibniz_rule(a in jet(), b in jet(), j in 0usize..DIM) {
        let lhs = (&a * &b).derivative(j).unwrap();
        let rhs = &(&a.derivative(j).unwrap() * &b) + &(&a * &b.derivative(j).unwrap());
        prop_assert_eq!(lhs.order(), ORDER - 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_partials_commute(a in jet(), j in 0usize..DIM, k in 0usize..DIM) {
        let jk = a.derivative(j).unwrap().derivative(k).unwrap();
        let kj = a.derivative(k).unwrap().derivative(j).unwrap();
        prop_assert_eq!(jk, kj);
    }

    #[test]
    fn matrix_inverse_composes_to_identity(entries in proptest::collection::vec(jet(), 4)) {
        // constant term forced to the identity keeps the matrix invertible
        let id = JetMatrix::identity(2, DIM, ORDER);
        let rows = (0..2)
            .map(|i| (0..2).map(|j| {
                let e = &entries[2 * i + j];
                &(e - &Jet::constant(DIM, ORDER, e.value())) + id.get(i, j)
            }).collect())
            .collect();
        let m = JetMatrix::from_rows(rows).unwrap();
        let inv = m.inverse().unwrap();
        prop_assert_eq!(m.mul(&inv).unwrap(), id.clone());
        prop_assert_eq!(inv.mul(&m).unwrap(), id);
    }

    #[test]
    fn rendered_values_parse_back(v in scalar(), a in jet()) {
        prop_assert_eq!(parse_scalar(&render(&v)).unwrap(), v);
        prop_assert_eq!(parse_jet(&a.to_poly_string(), DIM, ORDER).unwrap(), a);
    }

    #[test]
    fn fibre_product_is_associative(a in element(0), b in element(1), c in element(1)) {
        let (p, policy) = (pairing(), TruncationPolicy::unbounded());
        let left = multiply(&multiply(&a, &b, &p, &policy).unwrap(), &c, &p, &policy).unwrap();
        let right = multiply(&a, &multiply(&b, &c, &p, &policy).unwrap(), &p, &policy).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn product_respects_total_degree(a in element(1), b in element(0), d in 0u32..5, e in 0u32..5) {
        let a = a.degree_component(d);
        let b = b.degree_component(e);
        let ab = multiply(&a, &b, &pairing(), &TruncationPolicy::unbounded()).unwrap();
        prop_assert!(ab.terms().all(|(k, _)| k.total_degree() == d + e));
    }

    #[test]
    fn koszul_operators(a in element(1), b in element(2)) {
        let a = a.add(&b);
        prop_assert!(delta(&delta(&a)).is_zero());
        prop_assert!(delta_inverse(&delta_inverse(&a)).is_zero());
        let (x, y, z) = hodge_decompose(&a);
        prop_assert_eq!(x.add(&y).add(&z), a);
    }
}
