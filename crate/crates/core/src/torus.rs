//! Period matrices, the big period matrix, the complex structure and
//! multiplications by a square root.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::{find_sqrt, FieldElement, GeneratorSpec, NumberField};
use crate::matrix::{FMatrix, IntMatrix};
use crate::rational::{is_perfect_square_i64, rat, squarefree_part};

/// A 2x4 matrix whose columns generate the lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodMatrix(pub FMatrix);

impl PeriodMatrix {
    pub fn new(entries: FMatrix) -> Result<Self> {
        if entries.rows() != 2 || entries.cols() != 4 {
            return Err(Error::Validation(format!(
                "period matrix must be 2x4, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        Ok(PeriodMatrix(entries))
    }

    pub fn from_columns(cols: &[[FieldElement; 2]; 4]) -> Self {
        PeriodMatrix(FMatrix::from_fn(2, 4, |i, j| cols[j][i].clone()))
    }

    pub fn matrix(&self) -> &FMatrix {
        &self.0
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.0.field()
    }
}

/// A complex torus C^2 / Pi Z^4 with its derived matrices.
#[derive(Debug, Clone)]
pub struct Torus {
    period: FMatrix,
    big: FMatrix,
    big_inv: FMatrix,
    j: FMatrix,
}

impl Torus {
    pub fn field(&self) -> &Arc<NumberField> {
        self.period.field()
    }

    /// The 2x4 period matrix Pi.
    pub fn period(&self) -> &FMatrix {
        &self.period
    }

    /// The 4x4 matrix [Pi; conj(Pi)].
    pub fn big_period(&self) -> &FMatrix {
        &self.big
    }

    pub fn big_period_inverse(&self) -> &FMatrix {
        &self.big_inv
    }

    /// Multiplication by i in lattice coordinates: Pi J = i Pi.
    pub fn complex_structure(&self) -> &FMatrix {
        &self.j
    }

    /// Columns 0..2 of P^-1; Pi Q = I.
    pub fn right_inverse(&self) -> FMatrix {
        self.big_inv.submatrix(0..4, 0..2)
    }

    /// Columns 2..4 of P^-1; conj(Pi) Q' = I and Pi Q' = 0.
    pub fn conj_right_inverse(&self) -> FMatrix {
        self.big_inv.submatrix(0..4, 2..4)
    }

    /// Point of C^2 with the given rational lattice coordinates.
    pub fn point(&self, coords: &[FieldElement]) -> Vec<FieldElement> {
        self.period.mul_vec(coords)
    }

    /// Lattice coordinates of a point of C^2 (real when the point lies in
    /// the real span of the lattice, which is all of C^2).
    pub fn coordinates(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        let stacked = vec![x[0].clone(), x[1].clone(), x[0].conj(), x[1].conj()];
        self.big_inv.mul_vec(&stacked)
    }

    /// The same torus with entries re-expressed in a larger field.
    pub fn lift_to(&self, field: &Arc<NumberField>) -> Result<Torus> {
        Ok(Torus {
            period: self.period.lift_to(field)?,
            big: self.big.lift_to(field)?,
            big_inv: self.big_inv.lift_to(field)?,
            j: self.j.lift_to(field)?,
        })
    }
}

fn big_period_matrix(pi: &FMatrix) -> FMatrix {
    FMatrix::from_fn(4, 4, |r, c| if r < 2 { pi.get(r, c).clone() } else { pi.get(r - 2, c).conj() })
}

/// Certifies det P != 0 and assembles the torus.
pub fn build_torus(period: PeriodMatrix) -> Result<Torus> {
    let pi = period.0;
    let field = pi.field().clone();
    let big = big_period_matrix(&pi);
    let det = big.det();
    if det.is_zero() {
        return Err(Error::DegenerateLattice("det P = 0".into()));
    }
    let norm = &det * &det.conj();
    match norm.exact_sign() {
        Ok(1) => {}
        Ok(_) => return Err(Error::DegenerateLattice("|det P|^2 is not positive".into())),
        Err(e) => return Err(Error::DegenerateLattice(format!("could not certify det P != 0: {e}"))),
    }
    let big_inv = big.inverse()?;
    let i = FieldElement::i(&field);
    let diag = FMatrix::diag(&[i.clone(), i.clone(), -&i, -&i]);
    let j = big_inv.mul(&diag).mul(&big);
    if !j.is_real() {
        return Err(Error::NotReal("complex structure J has non-real entries".into()));
    }
    debug_assert_eq!(j.mul(&j), FMatrix::identity(&field, 4).scale_rational(&rat(-1)));
    Ok(Torus { period: pi, big, big_inv, j })
}

/// Multiplication by sqrt(d) on a torus.
#[derive(Debug, Clone)]
pub struct MultiplicationDatum {
    pub d_analytic: FMatrix,
    pub r_d: IntMatrix,
    pub d: i64,
    pub epsilon: i8,
    pub is_scalar: bool,
    /// Columns are a +sqrt(d) and a -sqrt(d) eigenvector; `None` for scalar D.
    /// Lives in `diag_field`, which contains sqrt(d).
    pub diagonalizer: Option<FMatrix>,
    pub diag_field: Arc<NumberField>,
    pub sqrt_d: FieldElement,
}

impl MultiplicationDatum {
    /// D in the coordinates given by the diagonalizer.
    pub fn diagonal_form(&self) -> Option<FMatrix> {
        let t = self.diagonalizer.as_ref()?;
        let d = self.d_analytic.lift_to(&self.diag_field).ok()?;
        Some(t.inverse().ok()?.mul(&d).mul(t))
    }
}

/// sqrt(d) as an element of `field` or of `field` with one real square root
/// adjoined. For d < 0 the root with positive imaginary part.
pub fn sqrt_in_field(field: &Arc<NumberField>, d: i64) -> Result<(Arc<NumberField>, FieldElement)> {
    if let Some(s) = find_sqrt(field, d)? {
        return Ok((field.clone(), s));
    }
    let (d0, _) = squarefree_part(&BigInt::from(d.abs()));
    let d0 = d0.to_i64().ok_or_else(|| Error::Validation("d too large".into()))?;
    let name = (0..)
        .map(|k| if k == 0 { "w".to_string() } else { format!("w{k}") })
        .find(|n| field.generator_index(n).is_none())
        .expect("unbounded name supply");
    let bigger = field.adjoin(GeneratorSpec::sqrt(&name, d0)?)?;
    let s = find_sqrt(&bigger, d)?.ok_or_else(|| Error::Validation(format!("no square root of {d} after adjoining")))?;
    Ok((bigger, s))
}

/// Eigenvector of the rank-1 matrix D - lambda I, first nonzero coordinate 1.
fn eigenvector(d: &FMatrix, lambda: &FieldElement) -> Result<[FieldElement; 2]> {
    let n = FMatrix::from_fn(2, 2, |r, c| if r == c { d.get(r, c) - lambda } else { d.get(r, c).clone() });
    let row = (0..2).find(|&r| !n.get(r, 0).is_zero() || !n.get(r, 1).is_zero()).ok_or(Error::NotSquareRootOfD)?;
    let (x, y) = (-n.get(row, 1), n.get(row, 0).clone());
    if !x.is_zero() {
        let yx = y.div(&x)?;
        Ok([FieldElement::one(x.field()), yx])
    } else {
        Ok([FieldElement::zero(x.field()), FieldElement::one(x.field())])
    }
}

/// Validates D^2 = d, D Lambda in Lambda and computes the rational
/// representation and, for nonscalar D, a diagonalizer.
pub fn attach_multiplication(t: &Torus, d_analytic: &FMatrix, d: i64) -> Result<MultiplicationDatum> {
    if d >= 0 && is_perfect_square_i64(d) {
        return Err(Error::PerfectSquare(d));
    }
    if d_analytic.rows() != 2 || d_analytic.cols() != 2 {
        return Err(Error::Validation("D must be 2x2".into()));
    }
    let field = t.field().clone();
    let dm = d_analytic.lift_to(&field)?;
    if dm.mul(&dm) != FMatrix::identity(&field, 2).scale_rational(&rat(d)) {
        return Err(Error::NotSquareRootOfD);
    }
    let dpi = dm.mul(t.period());
    let stacked = FMatrix::from_fn(4, 4, |r, c| if r < 2 { dpi.get(r, c).clone() } else { dpi.get(r - 2, c).conj() });
    let r = t.big_period_inverse().mul(&stacked);
    let r_d = r.to_int().ok_or_else(|| {
        let bad = r.entries().iter().find(|x| x.as_integer().is_none()).unwrap();
        Error::NotAnEndomorphism(format!("rational representation has entry {bad}"))
    })?;
    let is_scalar = dm.get(0, 1).is_zero() && dm.get(1, 0).is_zero() && dm.get(0, 0) == dm.get(1, 1);
    let (diag_field, sqrt_d) = sqrt_in_field(&field, d)?;
    let diagonalizer = if is_scalar {
        None
    } else {
        let dl = dm.lift_to(&diag_field)?;
        let plus = eigenvector(&dl, &sqrt_d)?;
        let minus = eigenvector(&dl, &-&sqrt_d)?;
        let tm = FMatrix::from_rows(vec![
            vec![plus[0].clone(), minus[0].clone()],
            vec![plus[1].clone(), minus[1].clone()],
        ]);
        let check = tm.inverse()?.mul(&dl).mul(&tm);
        if check != FMatrix::diag(&[sqrt_d.clone(), -&sqrt_d]) {
            return Err(Error::NotSquareRootOfD);
        }
        Some(tm)
    };
    Ok(MultiplicationDatum {
        d_analytic: dm,
        r_d,
        d,
        epsilon: if d > 0 { 1 } else { -1 },
        is_scalar,
        diagonalizer,
        diag_field,
        sqrt_d,
    })
}

/// The lattice Z e1 + Z e2 + Z De1 + Z De2 with D = diag(sqrt d, -sqrt d).
pub fn sqrt_d_basis_lattice(
    d: i64,
    e1: &[FieldElement; 2],
    e2: &[FieldElement; 2],
) -> Result<(Torus, MultiplicationDatum)> {
    if d >= 0 && is_perfect_square_i64(d) {
        return Err(Error::PerfectSquare(d));
    }
    let (field, s) = sqrt_in_field(e1[0].field(), d)?;
    let lift = |v: &[FieldElement; 2]| -> Result<[FieldElement; 2]> { Ok([v[0].lift_to(&field)?, v[1].lift_to(&field)?]) };
    let (e1, e2) = (lift(e1)?, lift(e2)?);
    let de = |v: &[FieldElement; 2]| [&s * &v[0], -(&s * &v[1])];
    let cols = [e1.clone(), e2.clone(), de(&e1), de(&e2)];
    let torus = build_torus(PeriodMatrix::from_columns(&cols))?;
    let dm = FMatrix::diag(&[s.clone(), -&s]);
    let mult = attach_multiplication(&torus, &dm, d)?;
    Ok((torus, mult))
}

/// Exact check of the datum's defining identities (used by verifiers).
pub fn check_multiplication(t: &Torus, m: &MultiplicationDatum) -> bool {
    let field = t.field();
    let r = FMatrix::from_int(field, &m.r_d);
    let d = BigInt::from(m.d);
    m.r_d.mul(&m.r_d) == IntMatrix::scalar(4, &d)
        && m.d_analytic.mul(t.period()) == t.period().mul(&r)
        && (m.d > 0) == (m.epsilon > 0)
}
