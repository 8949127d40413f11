//! Integer lattices: Hermite normal form, saturated integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::linalg;
use crate::rational::{big_rat, lcm_denominators, Rational};

pub type IVec = Vec<BigInt>;

/// Row-style Hermite normal form of the lattice spanned by `rows`: echelon
/// rows with positive pivots, entries above each pivot reduced into
/// [0, pivot). Zero rows are dropped.
pub fn hnf_rows(rows: &[IVec]) -> Vec<IVec> {
    let mut m: Vec<IVec> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        // move the smallest nonzero |entry| of column c (rows >= r) to row r
        while let Some(p) = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].abs()) {
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot = m[r].clone();
            for i in 0..r {
                let q = m[i][c].div_floor(&pivot[c]);
                if !q.is_zero() {
                    for (x, y) in m[i].iter_mut().zip(&pivot) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

fn integer_rows(a: &[Vec<Rational>]) -> Vec<IVec> {
    a.iter()
        .map(|row| {
            let l = lcm_denominators(row);
            row.iter().map(|x| (x * big_rat(&l)).to_integer()).collect()
        })
        .collect()
}

/// HNF basis of {x in Z^n : a x = 0}. Column-style unimodular reduction of
/// `a`; the trailing columns of the transform span the integer kernel, which
/// is saturated by construction.
pub fn integer_kernel(a: &[Vec<Rational>], n: usize) -> Vec<IVec> {
    let mut m = integer_rows(a);
    let mut u: Vec<IVec> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let col_op = |mat: &mut Vec<IVec>, k: usize, j: usize, coef: [&BigInt; 4]| {
        for row in mat.iter_mut() {
            let (xk, xj) = (row[k].clone(), row[j].clone());
            row[k] = coef[0] * &xk + coef[1] * &xj;
            row[j] = coef[2] * &xk + coef[3] * &xj;
        }
    };
    let mut k = 0;
    for r in 0..m.len() {
        if k == n {
            break;
        }
        for j in k + 1..n {
            let y = m[r][j].clone();
            if y.is_zero() {
                continue;
            }
            let x = m[r][k].clone();
            if x.is_zero() {
                for row in m.iter_mut().chain(u.iter_mut()) {
                    row.swap(k, j);
                }
                continue;
            }
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let a2 = -(&y / &g);
            let b2 = &x / &g;
            col_op(&mut m, k, j, [&s, &t, &a2, &b2]);
            col_op(&mut u, k, j, [&s, &t, &a2, &b2]);
        }
        if !m[r][k].is_zero() {
            k += 1;
        }
    }
    let basis: Vec<IVec> = (k..n).map(|c| u.iter().map(|row| row[c].clone()).collect()).collect();
    hnf_rows(&basis)
}

/// HNF basis of Z^n intersected with the Q-span of `vectors`.
pub fn saturate(vectors: &[Vec<Rational>], n: usize) -> Vec<IVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let complement = linalg::kernel(&vectors.to_vec(), n);
    integer_kernel(&complement, n)
}

pub fn to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(big_rat).collect()
}

/// Determinant of a square integer matrix.
pub fn int_det(m: &[IVec]) -> BigInt {
    let q: Vec<Vec<Rational>> = m.iter().map(|r| to_rational(r)).collect();
    linalg::det(&q).to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};
    use proptest::prelude::*;

    fn iv(xs: &[i64]) -> IVec {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_of_small_lattice() {
        let h = hnf_rows(&[iv(&[2, 4]), iv(&[3, 5])]);
        // lattice has determinant |2*5 - 4*3| = 2
        assert_eq!(h, vec![iv(&[1, 1]), iv(&[0, 2])]);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x - 2y = 0: kernel is Z(1,1), not 2Z(1,1)
        let k = integer_kernel(&[vec![rat(2), rat(-2)]], 2);
        assert_eq!(k, vec![iv(&[1, 1])]);
        // x/2 + y/3 + z = 0
        let k = integer_kernel(&[vec![frac(1, 2), frac(1, 3), rat(1)]], 3);
        assert_eq!(k.len(), 2);
        assert!(int_det(&[k[0].clone(), k[1].clone(), iv(&[0, 0, 1])]).abs() > BigInt::zero());
    }

    #[test]
    fn saturation_of_scaled_vector() {
        let s = saturate(&[vec![rat(4), rat(6), rat(0)]], 3);
        assert_eq!(s, vec![iv(&[2, 3, 0])]);
        assert!(saturate(&[], 3).is_empty());
    }

    proptest! {
        #[test]
        fn kernel_vectors_solve_system(rows in proptest::collection::vec(proptest::collection::vec(-5i64..5, 5), 1..4)) {
            let a: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
            let k = integer_kernel(&a, 5);
            prop_assert_eq!(k.len(), 5 - linalg::rank(&a));
            for v in &k {
                let img = linalg::mat_vec(&a, &to_rational(v));
                prop_assert!(img.iter().all(Zero::is_zero));
            }
            // saturated: HNF of kernel equals HNF of the saturation of its span
            let span: Vec<Vec<Rational>> = k.iter().map(|v| to_rational(v)).collect();
            prop_assert_eq!(saturate(&span, 5), k);
        }
    }
}
