mod common;

use common::{end_rank_oracle, is_type_11, ns_rank_oracle};
use tori::endo::{compute_endo_ring, endo_box_oracle};
use tori::neronseveri::compute_ns;
use tori::papercheck::{example1, example2, random_torus_with_sqrt_d, scalar_cm_product};
use tori::torus::Torus;
use tori::GeneratorSpec;

fn tori_under_test() -> Vec<(&'static str, Torus)> {
    vec![
        ("example1 m=1", example1(1, None).unwrap().0),
        ("example1 m=2 r=cbrt3", example1(2, Some(GeneratorSpec::cube_root("r", 3).unwrap())).unwrap().0),
        ("example2 m=1 n=2", example2(1, 2).unwrap().0),
        ("example2 m=2 n=3", example2(2, 3).unwrap().0),
        ("scalar m=1", scalar_cm_product(1).unwrap()),
        ("scalar m=2", scalar_cm_product(2).unwrap()),
        ("random d=3", random_torus_with_sqrt_d(3, 4).unwrap().0),
        ("random d=-5", random_torus_with_sqrt_d(-5, 4).unwrap().0),
    ]
}

#[test]
fn ns_rank_matches_type_decomposition_oracle() {
    for (name, t) in tori_under_test() {
        let ns = compute_ns(&t).unwrap();
        assert_eq!(ns.rank(), ns_rank_oracle(&t), "{name}");
        for b in &ns.basis {
            assert!(is_type_11(&t, &b.e), "{name}: basis form has a (2,0)-part");
        }
    }
}

#[test]
fn end_rank_matches_commutant_oracle() {
    for (name, t) in tori_under_test() {
        let ring = compute_endo_ring(&t).unwrap();
        assert_eq!(ring.rank(), end_rank_oracle(&t), "{name}");
    }
}

#[test]
fn ns_and_end_ranks_of_the_worked_examples() {
    let expected = [2, 2, 3, 3, 4, 4];
    let end = [2, 2, 4, 4, 8, 8];
    for (((name, t), ns), e) in tori_under_test().into_iter().zip(expected).zip(end) {
        assert_eq!(ns_rank_oracle(&t), ns, "{name}");
        assert_eq!(end_rank_oracle(&t), e, "{name}");
    }
}

#[test]
fn box_enumeration_matches_ring_box() {
    for (name, t) in tori_under_test().into_iter().filter(|(n, _)| n.starts_with("example1") || *n == "scalar m=1") {
        let ring = compute_endo_ring(&t).unwrap();
        let mut from_ring = ring.box_points(1);
        let mut oracle = endo_box_oracle(&t, 1).unwrap();
        from_ring.sort();
        oracle.sort();
        assert_eq!(from_ring, oracle, "{name}");
    }
}
