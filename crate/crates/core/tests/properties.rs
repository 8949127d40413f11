//! Invariants as property tests.

mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use tori::document::{parse_expression, TorusDocument};
use tori::lattice::hnf_rows;
use tori::neronseveri::{canonical_form_coordinates, compute_n_d, compute_ns, form_from_coords, CanonicalFormCoords};
use tori::papercheck::{chosen_pair, random_torus_with_sqrt_d, LambdaSolver};
use tori::neronseveri::{lambda_inverse, lambda_map, rational_alt_form};
use tori::{FieldElement, GeneratorSpec, NumberField};

fn field() -> Arc<NumberField> {
    let gens = vec![GeneratorSpec::sqrt("w", 2).unwrap(), GeneratorSpec::cube_root("r", 3).unwrap()];
    NumberField::new(gens, true).unwrap()
}

fn element(f: &Arc<NumberField>, c: &[(i64, i64)]) -> FieldElement {
    let coeffs = c.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect();
    FieldElement::from_coeffs(f, coeffs)
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((-20i64..20, 1i64..7), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_multiplication_is_associative_and_distributive(a in coeffs(12), b in coeffs(12), c in coeffs(12)) {
        let f = field();
        let (a, b, c) = (element(&f, &a), element(&f, &b), element(&f, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn nonzero_elements_are_invertible(a in coeffs(12)) {
        let f = field();
        let a = element(&f, &a);
        prop_assume!(!a.is_zero());
        let inv = FieldElement::one(&f).div(&a).unwrap();
        prop_assert!((&a * &inv).is_one());
    }

    #[test]
    fn display_parses_back(a in coeffs(12)) {
        let f = field();
        let a = element(&f, &a);
        prop_assert_eq!(parse_expression(&f, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn hnf_is_idempotent_and_preserves_the_span(rows in proptest::collection::vec(proptest::collection::vec(-6i64..6, 4), 1..5)) {
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let h = hnf_rows(&rows);
        prop_assert_eq!(hnf_rows(&h), h.clone());
        let mut both = h.clone();
        both.extend(rows.iter().cloned());
        prop_assert_eq!(hnf_rows(&both), h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn random_tori_have_rank_two_nd_and_consistent_complex_structure(
        d in prop::sample::select(vec![2i64, 3, 5, 6, -1, -2, -3, -5]),
        seed in 0u64..1000,
    ) {
        let (t, mult) = random_torus_with_sqrt_d(d, seed).unwrap();
        let j = common::checked_j(&t);
        prop_assert_eq!(j.mul(&j), tori::FMatrix::identity(t.field(), 4).scale(&FieldElement::from_int(t.field(), -1)));
        let ns = compute_ns(&t).unwrap();
        prop_assert_eq!(ns.rank(), common::ns_rank_oracle(&t));
        let nd = compute_n_d(&ns, &mult).unwrap();
        prop_assert_eq!(nd.rank(), 2);
        for b in &nd.basis {
            prop_assert!(common::is_type_11(&t, &b.e));
        }
    }

    #[test]
    fn canonical_coordinates_invert_the_normal_form(
        d in prop::sample::select(vec![2i64, -1, -3]),
        a in (-30i64..30, 1i64..9),
        b in (-30i64..30, 1i64..9),
    ) {
        let (t, mult) = random_torus_with_sqrt_d(d, 7).unwrap();
        let f = &mult.diag_field;
        let c = CanonicalFormCoords {
            a: FieldElement::from_rational(f, BigRational::new(a.0.into(), a.1.into())),
            b: FieldElement::from_rational(f, BigRational::new(b.0.into(), b.1.into())),
        };
        let m = form_from_coords(&mult, &c).unwrap();
        prop_assert!(m.is_hermitian());
        prop_assert_eq!(canonical_form_coordinates(&mult, &m).unwrap(), c.clone());
        let (e1, e2) = chosen_pair(&mult).unwrap();
        let image = lambda_map(&t, &mult, &e1, &e2, &c).unwrap();
        prop_assert_eq!(lambda_inverse(&t, &mult, &e1, &e2, &image.u, &image.v).unwrap(), c);
    }

    #[test]
    fn rational_lambda_values_come_from_rational_forms(
        d in prop::sample::select(vec![3i64, -2]),
        u in (-30i64..30, 1i64..9),
        v in (-30i64..30, 1i64..9),
    ) {
        let (t, mult) = random_torus_with_sqrt_d(d, 11).unwrap();
        let (e1, e2) = chosen_pair(&mult).unwrap();
        let u = BigRational::new(u.0.into(), u.1.into());
        let v = BigRational::new(v.0.into(), v.1.into());
        let c = LambdaSolver::new(&t, &mult, &e1, &e2).unwrap().inverse(&u, &v).unwrap();
        let m = form_from_coords(&mult, &c).unwrap();
        prop_assert!(rational_alt_form(&t, &m).is_some());
        prop_assert_eq!(lambda_map(&t, &mult, &e1, &e2, &c).unwrap().as_rational().unwrap(), (u, v));
    }

    #[test]
    fn documents_round_trip(d in prop::sample::select(vec![2i64, 3, -1, -7]), seed in 0u64..100) {
        let (t, mult) = random_torus_with_sqrt_d(d, seed).unwrap();
        let doc = TorusDocument::from_torus(&t, &[mult]).unwrap();
        let text = doc.to_json();
        let back = TorusDocument::parse(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        let t2 = back.torus().unwrap();
        prop_assert_eq!(t2.period(), t.period());
        prop_assert_eq!(back.attach_all(&t2).unwrap()[0].r_d.clone(), doc.attach_all(&t).unwrap()[0].r_d.clone());
    }
}
