//! The worked examples: endomorphism rings, classifications, NS ranks and
//! algebraicity verdicts.

use num_bigint::BigInt;
use tori::endo::{classify_algebra, compute_endo_ring, AlgebraTag};
use tori::neronseveri::{compute_ns, is_algebraic, AlgebraicityVerdict, Obstruction};
use tori::papercheck::{
    example1, example2, example2_units, quaternion_presentation, scalar_cm_multiplications, scalar_cm_product,
};
use tori::torus::attach_multiplication;
use tori::{Error, GeneratorSpec};

fn data(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn example_one_has_imaginary_quadratic_multiplication() {
    for (m, c) in [(1, 2), (2, 3), (3, 2)] {
        let (t, _) = example1(m, Some(GeneratorSpec::cube_root("r", c).unwrap())).unwrap();
        let ring = compute_endo_ring(&t).unwrap();
        assert_eq!(ring.rank(), 2, "m={m}");
        let class = classify_algebra(&ring).unwrap();
        assert_eq!(class.tag, AlgebraTag::ImaginaryQuadratic);
        assert_eq!(class.discriminant_data, data(&[-m]));
    }
}

#[test]
fn example_one_is_not_algebraic() {
    let (t, mult) = example1(1, None).unwrap();
    let ns = compute_ns(&t).unwrap();
    assert_eq!(ns.rank(), 2);
    match is_algebraic(&t, &ns, &[mult]).unwrap() {
        AlgebraicityVerdict::NotAlgebraic(Obstruction::Antidiagonal { coords, .. }) => assert_eq!(coords.len(), 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn example_two_units_are_endomorphisms_with_the_stated_relations() {
    for (m, n) in [(1, 2), (2, 3)] {
        let (t, _) = example2(m, n).unwrap();
        let (i, j) = example2_units(&t, m, n).unwrap();
        assert!(attach_multiplication(&t, &i, -m).is_ok());
        assert!(attach_multiplication(&t, &j, -1 - 4 * n).is_ok());
        assert_eq!(i.mul(&j), j.mul(&i).scale(&tori::FieldElement::from_int(t.field(), -1)));
    }
}

#[test]
fn example_two_ring_is_a_definite_quaternion_order() {
    for (m, n) in [(1, 2), (2, 3)] {
        let (t, _) = example2(m, n).unwrap();
        let ring = compute_endo_ring(&t).unwrap();
        assert_eq!(ring.rank(), 4);
        assert_eq!(classify_algebra(&ring).unwrap().tag, AlgebraTag::DefiniteQuaternion);
        assert!(quaternion_presentation(&ring, m, n, 3).is_some(), "m={m} n={n}");
    }
}

#[test]
fn example_two_is_not_algebraic() {
    let (t, mult) = example2(1, 2).unwrap();
    let ns = compute_ns(&t).unwrap();
    assert_eq!(ns.rank(), 3);
    assert!(matches!(
        is_algebraic(&t, &ns, &[mult]).unwrap(),
        AlgebraicityVerdict::NotAlgebraic(Obstruction::DiagonalLine { .. })
    ));
}

#[test]
fn example_two_rejects_square_products() {
    assert!(matches!(example2(2, 8), Err(Error::SquareProduct(16))));
}

#[test]
fn scalar_case_is_a_matrix_algebra() {
    for m in [1, 2] {
        let t = scalar_cm_product(m).unwrap();
        let ring = compute_endo_ring(&t).unwrap();
        assert_eq!(ring.rank(), 8);
        let class = classify_algebra(&ring).unwrap();
        assert_eq!(class.tag, AlgebraTag::MatrixAlgebraOverQuadratic);
        assert_eq!(class.discriminant_data, data(&[-m]));
        assert_eq!(compute_ns(&t).unwrap().rank(), 4);
        let (scalar, nonscalar) = scalar_cm_multiplications(&t, m).unwrap();
        assert!(scalar.is_scalar && !nonscalar.is_scalar);
        assert!(matches!(
            is_algebraic(&t, &compute_ns(&t).unwrap(), &[nonscalar]).unwrap(),
            AlgebraicityVerdict::Algebraic(_)
        ));
    }
}

#[test]
fn example_two_admits_no_rosati_involution() {
    let (t, _) = example2(1, 2).unwrap();
    let ring = compute_endo_ring(&t).unwrap();
    let ns = compute_ns(&t).unwrap();
    let mut candidates: Vec<tori::FMatrix> = ns.basis.iter().map(|b| b.m.clone()).collect();
    for c in [[1, 1, 1], [0, 2, 1], [1, -3, 1]] {
        candidates.push(ns.combination(&data(&c)).m);
    }
    candidates.push(tori::FMatrix::identity(t.field(), 2));
    for h0 in candidates {
        assert!(matches!(
            tori::endo::rosati_involution(&t, &ring, &h0),
            Err(Error::NotPolarization(_))
        ));
    }
}
