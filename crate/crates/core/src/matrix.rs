//! Small dense matrices over a number field and over Z.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::lattice::IVec;
use crate::rational::{big_rat, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl FMatrix {
    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        FMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FMatrix { rows, cols, data }
    }

    pub fn zeros(field: &Arc<NumberField>, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| FieldElement::zero(field))
    }

    pub fn identity(field: &Arc<NumberField>, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| FieldElement::from_int(field, (i == j) as i64))
    }

    pub fn diag(entries: &[FieldElement]) -> Self {
        let field = entries[0].field().clone();
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { FieldElement::zero(&field) })
    }

    pub fn from_int(field: &Arc<NumberField>, m: &IntMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| FieldElement::from_rational(field, big_rat(&m.0[i][j])))
    }

    pub fn from_rational(field: &Arc<NumberField>, m: &[Vec<Rational>]) -> Self {
        Self::from_fn(m.len(), m[0].len(), |i, j| FieldElement::from_rational(field, m[i][j].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.data[0].field()
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        FMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &FMatrix) -> FMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let field = self.field().clone();
        FMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(FieldElement::zero(&field), |acc, k| {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    &acc + &(a * b)
                }
            })
        })
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(FieldElement::zero(self.field()), |acc, k| &acc + &(self.get(i, k) * &v[k]))
            })
            .collect()
    }

    pub fn add(&self, other: &FMatrix) -> FMatrix {
        FMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &FMatrix) -> FMatrix {
        FMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, c: &FieldElement) -> FMatrix {
        self.map(|x| x * c)
    }

    pub fn scale_rational(&self, q: &Rational) -> FMatrix {
        self.map(|x| x.scale(q))
    }

    pub fn conj(&self) -> FMatrix {
        self.map(FieldElement::conj)
    }

    pub fn transpose(&self) -> FMatrix {
        FMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj_transpose(&self) -> FMatrix {
        FMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(FieldElement::is_real)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.conj_transpose()
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> FMatrix {
        let (r0, c0) = (rows.start, cols.start);
        FMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn lift_to(&self, target: &Arc<NumberField>) -> Result<FMatrix> {
        Ok(FMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.lift_to(target)).collect::<Result<_>>()?,
        })
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> FMatrix {
        FMatrix::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let r = if i < skip_row { i } else { i + 1 };
            let c = if j < skip_col { j } else { j + 1 };
            self.get(r, c).clone()
        })
    }

    /// Determinant by cofactor expansion (the matrices here are at most 4x4).
    pub fn det(&self) -> FieldElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        match self.rows {
            0 => FieldElement::one(self.field()),
            1 => self.get(0, 0).clone(),
            2 => &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0)),
            n => (0..n).fold(FieldElement::zero(self.field()), |acc, j| {
                let a = self.get(0, j);
                if a.is_zero() {
                    return acc;
                }
                let term = a * &self.minor(0, j).det();
                if j % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                }
            }),
        }
    }

    /// Inverse via the adjugate; a single field division.
    pub fn inverse(&self) -> Result<FMatrix> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dinv = d.inv()?;
        let n = self.rows;
        if n == 1 {
            return Ok(FMatrix::from_fn(1, 1, |_, _| dinv.clone()));
        }
        Ok(FMatrix::from_fn(n, n, |i, j| {
            let c = &self.minor(j, i).det() * &dinv;
            if (i + j) % 2 == 0 {
                c
            } else {
                -c
            }
        }))
    }

    /// The integer matrix when every entry is an integer.
    pub fn to_int(&self) -> Option<IntMatrix> {
        let rows = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).as_integer()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix(rows))
    }

    /// Entries stacked row-major as one coefficient vector over Q.
    pub fn flatten_coeffs(&self) -> Vec<Rational> {
        self.data.iter().flat_map(|x| x.coeffs().iter().cloned()).collect()
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        self.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    }
}

/// Integer matrix (rational representation of an endomorphism, alternating
/// forms on lattice generators).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix(pub Vec<IVec>);

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix(vec![vec![BigInt::zero(); cols]; rows])
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix((0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect())
    }

    pub fn scalar(n: usize, c: &BigInt) -> Self {
        IntMatrix((0..n).map(|i| (0..n).map(|j| if i == j { c.clone() } else { BigInt::zero() }).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn cols(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let (n, m, p) = (self.rows(), other.rows(), other.cols());
        IntMatrix(
            (0..n)
                .map(|i| (0..p).map(|j| (0..m).map(|k| &self.0[i][k] * &other.0[k][j]).sum()).collect())
                .collect(),
        )
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IVec {
        self.0.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix(self.0.iter().zip(&other.0).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect())
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix(self.0.iter().zip(&other.0).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect())
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix(self.0.iter().map(|r| r.iter().map(|x| x * c).collect()).collect())
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix((0..self.cols()).map(|j| self.0.iter().map(|r| r[j].clone()).collect()).collect())
    }

    pub fn is_antisymmetric(&self) -> bool {
        *self == self.transpose().scale(&-BigInt::one())
    }

    /// Row-major entries.
    pub fn flatten(&self) -> IVec {
        self.0.iter().flatten().cloned().collect()
    }

    pub fn from_flat(n: usize, v: &[BigInt]) -> Self {
        IntMatrix(v.chunks(n).map(<[BigInt]>::to_vec).collect())
    }

    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        self.0.iter().map(|r| r.iter().map(big_rat).collect()).collect()
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        self.0.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    }
}

/// Rational combination of field matrices.
pub fn combine(mats: &[FMatrix], coeffs: &[Rational]) -> FMatrix {
    let mut acc = FMatrix::zeros(mats[0].field(), mats[0].rows(), mats[0].cols());
    for (m, c) in mats.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&m.scale_rational(c));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GeneratorSpec;

    #[test]
    fn inverse_of_big_period_matrix() {
        let f = NumberField::new(vec![GeneratorSpec::sqrt("s", 2).unwrap()], true).unwrap();
        let i = FieldElement::i(&f);
        let s = FieldElement::generator(&f, "s").unwrap();
        let one = FieldElement::one(&f);
        let zero = FieldElement::zero(&f);
        let m = FMatrix::from_rows(vec![
            vec![one.clone(), i.clone(), zero.clone(), s.clone()],
            vec![zero.clone(), one.clone(), s.clone(), i.clone()],
            vec![one.clone(), -&i, zero.clone(), s.clone()],
            vec![s.clone(), one.clone(), -&s, -&i],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FMatrix::identity(&f, 4));
    }

    #[test]
    fn int_matrix_algebra() {
        let r = IntMatrix::from_i64(&[&[0, 2], &[1, 0]]);
        assert_eq!(r.mul(&r), IntMatrix::scalar(2, &BigInt::from(2)));
        assert!(IntMatrix::from_i64(&[&[0, 3], &[-3, 0]]).is_antisymmetric());
    }
}
