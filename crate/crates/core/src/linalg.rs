//! Dense linear algebra over Q: reduced row echelon form, kernels, solves.

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type QMatrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of {x : m x = 0}, one vector per free column, with the free
/// coordinate set to 1.
pub fn kernel(m: &QMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut a: QMatrix = m.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of m x = b, or `None` when inconsistent.
pub fn solve(m: &QMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: QMatrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut aug: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &QMatrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn transpose(a: &QMatrix) -> QMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn det(m: &QMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Precomputed solver for coordinates with respect to a fixed set of
/// linearly independent column vectors.
#[derive(Debug, Clone)]
pub struct CoordinateSolver {
    rref: QMatrix,
    pivots: Vec<usize>,
    vars: usize,
}

impl CoordinateSolver {
    /// `columns[k]` is the k-th spanning vector.
    pub fn new(columns: &[Vec<Rational>]) -> Self {
        let vars = columns.len();
        let len = columns.first().map_or(0, Vec::len);
        let mut m: QMatrix = (0..len)
            .map(|r| {
                let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
                row.extend((0..len).map(|j| if j == r { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let pivots = rref(&mut m);
        CoordinateSolver { rref: m, pivots, vars }
    }

    pub fn independent(&self) -> bool {
        self.pivots.iter().take_while(|&&p| p < self.vars).count() == self.vars
    }

    /// Coordinates of `v`, or `None` when `v` is outside the span.
    pub fn solve(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        // rows of [A | I] reduced to [R | T]: T v gives R x = T v
        let len = v.len();
        let tv: Vec<Rational> = self
            .rref
            .iter()
            .map(|row| row[self.vars..].iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        let mut x = vec![Rational::zero(); self.vars];
        for (r, t) in tv.iter().enumerate() {
            match self.pivots.get(r) {
                Some(&p) if p < self.vars => x[p] = t.clone(),
                _ => {
                    if !t.is_zero() {
                        return None;
                    }
                }
            }
        }
        debug_assert_eq!(len, self.rref.len());
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};

    fn m(rows: &[&[i64]]) -> QMatrix {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert_eq!(det(&a), rat(1));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn solve_inconsistent() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &[rat(1), rat(2)]).is_none());
        assert_eq!(solve(&a, &[rat(1), rat(1)]).unwrap(), vec![rat(1), rat(0)]);
    }

    #[test]
    fn coordinate_solver_roundtrip() {
        let cols = vec![vec![rat(1), rat(0), rat(1)], vec![rat(0), rat(2), rat(0)]];
        let s = CoordinateSolver::new(&cols);
        assert!(s.independent());
        assert_eq!(s.solve(&[rat(3), rat(1), rat(3)]).unwrap(), vec![rat(3), frac(1, 2)]);
        assert!(s.solve(&[rat(1), rat(0), rat(0)]).is_none());
    }
}
