//! Independent oracles: plain rational elimination (pivoting from the last
//! column) over equations assembled directly from the period matrix.
#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use tori::torus::Torus;
use tori::{FMatrix, FieldElement, IntMatrix};

/// Rank of a rational matrix, eliminating columns from right to left.
pub fn rank_reverse(rows: &[Vec<BigRational>], cols: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut rank = 0;
    for c in (0..cols).rev() {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / m[rank][c].clone();
        let pivot: Vec<BigRational> = m[rank].iter().map(|x| x * &inv).collect();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        m[rank] = pivot;
        rank += 1;
    }
    rank
}

/// One rational equation per monomial coefficient of a field-valued linear
/// form in the unknowns.
fn expand(forms: &[Vec<FieldElement>], unknowns: usize) -> Vec<Vec<BigRational>> {
    let mut rows = Vec::new();
    for form in forms {
        let dim = form[0].coeffs().len();
        for k in 0..dim {
            rows.push((0..unknowns).map(|u| form[u].coeffs()[k].clone()).collect());
        }
    }
    rows
}

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Q with Pi Q = I and conj(Pi) Q = 0, checked exactly.
pub fn checked_q(t: &Torus) -> FMatrix {
    let q = t.right_inverse();
    let pi = t.period();
    let f = t.field();
    let id = FMatrix::identity(f, 2);
    assert_eq!(pi.mul(&q), id, "Pi Q != I");
    assert!(pi.conj().mul(&q).is_zero(), "conj(Pi) Q != 0");
    q
}

/// Coefficients c_kl of the (2,0)-part (Q^t E Q)_{01} in the unknowns e_kl.
fn type_20_coefficients(t: &Torus) -> Vec<FieldElement> {
    let q = checked_q(t);
    PAIRS
        .iter()
        .map(|&(k, l)| &(q.get(k, 0) * q.get(l, 1)) - &(q.get(l, 0) * q.get(k, 1)))
        .collect()
}

/// NS rank as the dimension of alternating forms with vanishing (2,0)-part.
pub fn ns_rank_oracle(t: &Torus) -> usize {
    let c = type_20_coefficients(t);
    6 - rank_reverse(&expand(&[c], 6), 6)
}

/// True when the alternating integer form has vanishing (2,0)-part.
pub fn is_type_11(t: &Torus, e: &IntMatrix) -> bool {
    let c = type_20_coefficients(t);
    let f = t.field();
    let acc = PAIRS.iter().zip(&c).fold(FieldElement::zero(f), |acc, (&(k, l), ckl)| {
        &acc + &ckl.scale(&BigRational::from_integer(e.0[k][l].clone()))
    });
    acc.is_zero() && e.is_antisymmetric()
}

/// J from Pi J = i Pi, checked exactly.
pub fn checked_j(t: &Torus) -> FMatrix {
    let j = t.complex_structure().clone();
    let pi = t.period();
    assert_eq!(pi.mul(&j), pi.scale(&FieldElement::i(t.field())), "Pi J != i Pi");
    assert!(j.is_real());
    j
}

/// End rank as the dimension of rational R with RJ = JR.
pub fn end_rank_oracle(t: &Torus) -> usize {
    let j = checked_j(t);
    let f = t.field();
    let mut forms = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            let mut form = vec![FieldElement::zero(f); 16];
            for k in 0..4 {
                // (RJ)_ab = sum_k R_ak J_kb ; (JR)_ab = sum_k J_ak R_kb
                form[a * 4 + k] = &form[a * 4 + k] + j.get(k, b);
                form[k * 4 + b] = &form[k * 4 + b] - j.get(a, k);
            }
            forms.push(form);
        }
    }
    16 - rank_reverse(&expand(&forms, 16), 16)
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}
