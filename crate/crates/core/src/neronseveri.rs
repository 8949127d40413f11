//! Neron-Severi lattices: integral alternating forms compatible with the
//! complex structure, their hermitian lifts, the sublattice N_D, the normal
//! forms M_{a,b}, the lambda map and polarization search.

use nalgebra::{Matrix4, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::endo::{analytic_solver, RosatiData};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::lattice::{integer_kernel, IVec};
use crate::linalg;
use crate::matrix::{combine, FMatrix, IntMatrix};
use crate::rational::{best_rational, big_rat, gcd_all, lcm_denominators, Rational};
use crate::torus::{MultiplicationDatum, Torus};

/// An element of NS: the alternating form E on lattice generators and the
/// hermitian matrix M with H(x, y) = x^t M conj(y) and Im H = E.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NSElement {
    pub e: IntMatrix,
    pub m: FMatrix,
}

#[derive(Debug, Clone)]
pub struct NSLattice {
    pub basis: Vec<NSElement>,
    /// For sublattices, the coordinates of each basis element in the parent.
    pub parent_coords: Option<Vec<IVec>>,
}

impl NSLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Integer combination of basis elements.
    pub fn combination(&self, coeffs: &[BigInt]) -> NSElement {
        let e = coeffs
            .iter()
            .zip(&self.basis)
            .fold(IntMatrix::zeros(4, 4), |acc, (c, b)| acc.add(&b.e.scale(c)));
        let q: Vec<Rational> = coeffs.iter().map(big_rat).collect();
        let m = combine(&self.basis.iter().map(|b| b.m.clone()).collect::<Vec<_>>(), &q);
        NSElement { e, m }
    }

    /// Hermitian matrix of a rational combination.
    pub fn rational_combination(&self, coeffs: &[Rational]) -> FMatrix {
        combine(&self.basis.iter().map(|b| b.m.clone()).collect::<Vec<_>>(), coeffs)
    }
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn alternating_from(v: &[BigInt]) -> IntMatrix {
    let mut e = IntMatrix::zeros(4, 4);
    for (x, &(k, l)) in v.iter().zip(&PAIRS) {
        e.0[k][l] = x.clone();
        e.0[l][k] = -x;
    }
    e
}

/// H(x, y) = E(ix, y) + i E(x, y): in lattice coordinates G = J^t E + i E,
/// and M = Q^t G Q' satisfies Pi^t M conj(Pi) = G.
pub fn hermitian_lift(t: &Torus, e: &IntMatrix) -> Result<FMatrix> {
    let field = t.field();
    let ef = FMatrix::from_int(field, e);
    let g = t.complex_structure().transpose().mul(&ef).add(&ef.scale(&FieldElement::i(field)));
    let m = t.right_inverse().transpose().mul(&g).mul(&t.conj_right_inverse());
    if !m.is_hermitian() || t.period().transpose().mul(&m).mul(&t.period().conj()) != g {
        return Err(Error::Validation("alternating form is not compatible with the complex structure".into()));
    }
    Ok(m)
}

/// E = Im(Pi^t M conj(Pi)) when it is an integer matrix.
pub fn alt_form_of(t: &Torus, m: &FMatrix) -> Option<IntMatrix> {
    rational_alt_form(t, m).and_then(|q| {
        let rows = q.iter().map(|r| r.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect::<Option<Vec<_>>>());
        rows.collect::<Option<Vec<_>>>().map(IntMatrix)
    })
}

/// E = Im(Pi^t M conj(Pi)) when all entries are rational.
pub fn rational_alt_form(t: &Torus, m: &FMatrix) -> Option<Vec<Vec<Rational>>> {
    let g = match m.lift_to(t.field()) {
        Ok(m) => t.period().transpose().mul(&m).mul(&t.period().conj()),
        Err(_) => real_alt_form(t, m).ok()?,
    };
    g.to_rows().iter().map(|r| r.iter().map(|x| x.imag_part().as_rational()).collect()).collect()
}

/// Solves J^t E J = E for alternating E in the 6 upper-triangular unknowns
/// and saturates.
pub fn compute_ns(t: &Torus) -> Result<NSLattice> {
    let j = t.complex_structure();
    let dim = t.field().dim();
    let mut rows = vec![vec![Rational::zero(); 6]; 16 * dim];
    for a in 0..4 {
        for b in 0..4 {
            for (p, &(k, l)) in PAIRS.iter().enumerate() {
                let mut c = &(j.get(k, a) * j.get(l, b)) - &(j.get(l, a) * j.get(k, b));
                if (a, b) == (k, l) {
                    c = &c - &FieldElement::one(t.field());
                } else if (a, b) == (l, k) {
                    c = &c + &FieldElement::one(t.field());
                }
                for (m, x) in c.coeffs().iter().enumerate() {
                    rows[(a * 4 + b) * dim + m][p] = x.clone();
                }
            }
        }
    }
    let basis = integer_kernel(&rows, 6)
        .iter()
        .map(|v| {
            let e = alternating_from(v);
            Ok(NSElement { m: hermitian_lift(t, &e)?, e })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NSLattice { basis, parent_coords: None })
}

/// Exact: M_11 > 0 and det M > 0.
pub fn is_positive_definite(m: &FMatrix) -> Result<bool> {
    if !m.is_hermitian() {
        return Err(Error::Validation("matrix is not hermitian".into()));
    }
    Ok(m.get(0, 0).exact_sign()? > 0 && m.det().exact_sign()? > 0)
}

/// N_D = {E in NS : E(x, R_D y) is alternating}, i.e. R_D^t E = E R_D,
/// saturated inside NS.
pub fn compute_n_d(ns: &NSLattice, mult: &MultiplicationDatum) -> Result<NSLattice> {
    if mult.is_scalar {
        return Err(Error::ScalarD);
    }
    let r = &mult.r_d;
    let rt = r.transpose();
    let diffs: Vec<IntMatrix> = ns.basis.iter().map(|b| rt.mul(&b.e).sub(&b.e.mul(r))).collect();
    let rows: Vec<Vec<Rational>> = (0..16)
        .map(|idx| diffs.iter().map(|dm| big_rat(&dm.0[idx / 4][idx % 4])).collect())
        .collect();
    let coords = integer_kernel(&rows, ns.rank());
    let dbar = mult.d_analytic.conj();
    let basis = coords
        .iter()
        .map(|c| {
            let el = ns.combination(c);
            if !el.m.mul(&dbar).is_hermitian() {
                return Err(Error::NotInND("twisted form is not hermitian".into()));
            }
            Ok(el)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NSLattice { basis, parent_coords: Some(coords) })
}

/// (a, b) with M' = diag(a, b) for d > 0, or M'_12 = a + ib antidiagonal for
/// d < 0; both real, in the field of the diagonalizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalFormCoords {
    pub a: FieldElement,
    pub b: FieldElement,
}

/// M' = T^t M conj(T) for the diagonalizer T: the matrix of H in the
/// coordinates x = T x'.
pub fn transported(mult: &MultiplicationDatum, m: &FMatrix) -> Result<FMatrix> {
    let t = mult.diagonalizer.as_ref().ok_or(Error::ScalarD)?;
    let m = m.lift_to(&mult.diag_field)?;
    Ok(t.transpose().mul(&m).mul(&t.conj()))
}

pub fn canonical_form_coordinates(mult: &MultiplicationDatum, m: &FMatrix) -> Result<CanonicalFormCoords> {
    let mp = transported(mult, m)?;
    if mult.d > 0 {
        if !mp.get(0, 1).is_zero() || !mp.get(1, 0).is_zero() {
            return Err(Error::NotInND("transported matrix is not diagonal".into()));
        }
        Ok(CanonicalFormCoords { a: mp.get(0, 0).clone(), b: mp.get(1, 1).clone() })
    } else {
        if !mp.get(0, 0).is_zero() || !mp.get(1, 1).is_zero() {
            return Err(Error::NotInND("transported matrix is not antidiagonal".into()));
        }
        let z = mp.get(0, 1);
        Ok(CanonicalFormCoords { a: z.real_part(), b: z.imag_part() })
    }
}

/// The normal form M_{a,b} in diagonalizer coordinates.
pub fn normal_form(mult: &MultiplicationDatum, c: &CanonicalFormCoords) -> FMatrix {
    let f = &mult.diag_field;
    let zero = FieldElement::zero(f);
    if mult.d > 0 {
        FMatrix::from_rows(vec![vec![c.a.clone(), zero.clone()], vec![zero, c.b.clone()]])
    } else {
        let ib = &FieldElement::i(f) * &c.b;
        FMatrix::from_rows(vec![vec![zero.clone(), &c.a + &ib], vec![&c.a - &ib, zero]])
    }
}

/// M in the original coordinates with M' = M_{a,b}.
pub fn form_from_coords(mult: &MultiplicationDatum, c: &CanonicalFormCoords) -> Result<FMatrix> {
    let t = mult.diagonalizer.as_ref().ok_or(Error::ScalarD)?;
    let mp = normal_form(mult, c);
    Ok(t.transpose().inverse()?.mul(&mp).mul(&t.conj().inverse()?))
}

/// Real alternating form E = Im(Pi^t M conj(Pi)) in the field of M.
fn real_alt_form(t: &Torus, m: &FMatrix) -> Result<FMatrix> {
    let p = t.period().lift_to(m.field())?;
    let g = p.transpose().mul(m).mul(&p.conj());
    Ok(g.map(FieldElement::imag_part))
}

/// Values of E_{a,b} on a chosen pair e1, e2 (rational lattice coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ETable {
    pub e1_e2: FieldElement,
    pub e1_de1: FieldElement,
    pub e1_de2: FieldElement,
    pub e2_de1: FieldElement,
    pub e2_de2: FieldElement,
    pub de1_de2: FieldElement,
}

impl ETable {
    /// The six identities of the table for u = E(e1, e2), v = E(e1, De2).
    pub fn holds(&self, d: i64) -> bool {
        let u = &self.e1_e2;
        let v = &self.e1_de2;
        self.e1_de1.is_zero()
            && self.e2_de2.is_zero()
            && self.e2_de1 == -v
            && self.de1_de2 == u.scale(&Rational::from_integer(d.into()))
    }
}

fn check_basis(mult: &MultiplicationDatum, e1: &[Rational], e2: &[Rational]) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let r = mult.r_d.to_rational();
    let de1 = linalg::mat_vec(&r, e1);
    let de2 = linalg::mat_vec(&r, e2);
    let m = vec![e1.to_vec(), e2.to_vec(), de1.clone(), de2.clone()];
    if e1.len() != 4 || e2.len() != 4 || linalg::rank(&m) != 4 {
        return Err(Error::NotABasis);
    }
    Ok((de1, de2))
}

fn bilinear(e: &FMatrix, x: &[Rational], y: &[Rational]) -> FieldElement {
    let f = e.field();
    let mut acc = FieldElement::zero(f);
    for (k, xk) in x.iter().enumerate() {
        if xk.is_zero() {
            continue;
        }
        for (l, yl) in y.iter().enumerate() {
            if !yl.is_zero() {
                acc = &acc + &e.get(k, l).scale(&(xk * yl));
            }
        }
    }
    acc
}

pub fn e_table(
    t: &Torus,
    mult: &MultiplicationDatum,
    e1: &[Rational],
    e2: &[Rational],
    coords: &CanonicalFormCoords,
) -> Result<ETable> {
    let (de1, de2) = check_basis(mult, e1, e2)?;
    let e = real_alt_form(t, &form_from_coords(mult, coords)?)?;
    Ok(ETable {
        e1_e2: bilinear(&e, e1, e2),
        e1_de1: bilinear(&e, e1, &de1),
        e1_de2: bilinear(&e, e1, &de2),
        e2_de1: bilinear(&e, e2, &de1),
        e2_de2: bilinear(&e, e2, &de2),
        de1_de2: bilinear(&e, &de1, &de2),
    })
}

/// lambda(a, b) = (E_{a,b}(e1, e2), E_{a,b}(e1, De2)). The values are real
/// field elements; use [`LambdaValue::as_rational`] when they must be in Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaValue {
    pub u: FieldElement,
    pub v: FieldElement,
}

impl LambdaValue {
    pub fn as_rational(&self) -> Result<(Rational, Rational)> {
        let u = self.u.as_rational().ok_or_else(|| Error::NotRational(format!("u = {}", self.u)))?;
        let v = self.v.as_rational().ok_or_else(|| Error::NotRational(format!("v = {}", self.v)))?;
        Ok((u, v))
    }
}

pub fn lambda_map(
    t: &Torus,
    mult: &MultiplicationDatum,
    e1: &[Rational],
    e2: &[Rational],
    coords: &CanonicalFormCoords,
) -> Result<LambdaValue> {
    let table = e_table(t, mult, e1, e2, coords)?;
    Ok(LambdaValue { u: table.e1_e2, v: table.e1_de2 })
}

/// Solves lambda(a, b) = (u, v) for real (a, b).
pub fn lambda_inverse(
    t: &Torus,
    mult: &MultiplicationDatum,
    e1: &[Rational],
    e2: &[Rational],
    u: &FieldElement,
    v: &FieldElement,
) -> Result<CanonicalFormCoords> {
    let f = &mult.diag_field;
    let (zero, one) = (FieldElement::zero(f), FieldElement::one(f));
    let c1 = lambda_map(t, mult, e1, e2, &CanonicalFormCoords { a: one.clone(), b: zero.clone() })?;
    let c2 = lambda_map(t, mult, e1, e2, &CanonicalFormCoords { a: zero, b: one })?;
    let u = u.lift_to(f)?;
    let v = v.lift_to(f)?;
    let det = &(&c1.u * &c2.v) - &(&c2.u * &c1.v);
    if det.is_zero() {
        return Err(Error::NotABasis);
    }
    let a = (&(&u * &c2.v) - &(&c2.u * &v)).div(&det)?;
    let b = (&(&c1.u * &v) - &(&u * &c1.v)).div(&det)?;
    Ok(CanonicalFormCoords { a, b })
}

/// Every basis element of `lattice` transported by a d < 0 multiplication is
/// antidiagonal, so det M' = -(a^2 + b^2) <= 0 on the whole real span.
pub fn antidiagonal_certificate(lattice: &NSLattice, mult: &MultiplicationDatum) -> Result<Vec<CanonicalFormCoords>> {
    if mult.is_scalar {
        return Err(Error::ScalarD);
    }
    if mult.d > 0 {
        return Err(Error::Validation("the antidiagonal certificate needs d < 0".into()));
    }
    lattice.basis.iter().map(|b| canonical_form_coordinates(mult, &b.m)).collect()
}

/// Diagonal parts (p_k, q_k) of the transported basis, when they all lie on
/// one real line through (p, q) with pq <= 0. Returns (p, q) and the
/// multiples t_k with (p_k, q_k) = t_k (p, q).
pub fn diagonal_line_certificate(
    lattice: &NSLattice,
    mult: &MultiplicationDatum,
) -> Result<Option<(FieldElement, FieldElement, Vec<FieldElement>)>> {
    if mult.is_scalar || mult.d > 0 {
        return Ok(None);
    }
    let diagonals: Vec<(FieldElement, FieldElement)> = lattice
        .basis
        .iter()
        .map(|b| transported(mult, &b.m).map(|mp| (mp.get(0, 0).clone(), mp.get(1, 1).clone())))
        .collect::<Result<_>>()?;
    let Some((p, q)) = diagonals.iter().find(|(p, q)| !p.is_zero() || !q.is_zero()).cloned() else {
        return Ok(None);
    };
    if (&p * &q).exact_sign()? > 0 {
        return Ok(None);
    }
    let mut multiples = Vec::with_capacity(diagonals.len());
    for (pk, qk) in &diagonals {
        if !(&(pk * &q) - &(qk * &p)).is_zero() {
            return Ok(None);
        }
        multiples.push(if p.is_zero() { qk.div(&q)? } else { pk.div(&p)? });
    }
    Ok(Some((p, q, multiples)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchPhase {
    Ascent,
    Box(u32),
}

/// A certified positive definite element of a lattice.
#[derive(Debug, Clone)]
pub struct Polarization {
    pub coeffs: Vec<BigInt>,
    pub form: NSElement,
    pub phase: SearchPhase,
}

#[derive(Debug, Clone)]
pub enum PolarizationOutcome {
    Found(Polarization),
    NoneFound,
}

impl PolarizationOutcome {
    pub fn found(&self) -> Option<&Polarization> {
        match self {
            PolarizationOutcome::Found(p) => Some(p),
            PolarizationOutcome::NoneFound => None,
        }
    }
}

pub const ASCENT_RESTARTS: u64 = 32;
pub const ASCENT_STEPS: usize = 300;
pub const MAX_DENOMINATOR: u64 = 10_000;
pub const BOX_BOUNDS: [u32; 4] = [1, 2, 4, 8];
const BOX_CANDIDATE_CAP: usize = 2_000_000;

/// Real symmetric S_k = J^t E_k: S_c(x, x) = H_c(x, x) on lattice coordinates.
fn gram_matrices(t: &Torus, lattice: &NSLattice) -> Vec<Matrix4<f64>> {
    let j = t.complex_structure();
    let jf = Matrix4::from_fn(|r, c| j.get(r, c).approx().0);
    lattice
        .basis
        .iter()
        .map(|b| {
            let e = Matrix4::from_fn(|r, c| b.e.0[r][c].to_f64().unwrap_or(f64::NAN));
            let s = jf.transpose() * e;
            (s + s.transpose()) * 0.5
        })
        .collect()
}

fn combo(s: &[Matrix4<f64>], c: &[f64]) -> Matrix4<f64> {
    s.iter().zip(c).fold(Matrix4::zeros(), |acc, (m, x)| acc + m * *x)
}

fn min_eigen(m: &Matrix4<f64>) -> (f64, nalgebra::Vector4<f64>) {
    let eig = SymmetricEigen::new(*m);
    let (k, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
    (val, eig.eigenvectors.column(k).into_owned())
}

fn normalize(c: &mut [f64]) {
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        c.iter_mut().for_each(|x| *x /= n);
    }
}

/// Maximizes the smallest eigenvalue of S_c over unit c by projected
/// supergradient ascent from seeded restarts; returns the best c.
fn ascent(s: &[Matrix4<f64>]) -> Option<(f64, Vec<f64>)> {
    let r = s.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for seed in 0..ASCENT_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c: Vec<f64> = (0..r).map(|_| rng.random_range(-1.0..1.0)).collect();
        normalize(&mut c);
        let mut local = (f64::NEG_INFINITY, c.clone());
        for step in 0..ASCENT_STEPS {
            let (val, v) = min_eigen(&combo(s, &c));
            if val > local.0 {
                local = (val, c.clone());
            }
            let g: Vec<f64> = s.iter().map(|m| (v.transpose() * m * v)[(0, 0)]).collect();
            let eta = 0.5 / ((step + 1) as f64).sqrt();
            for (x, gk) in c.iter_mut().zip(&g) {
                *x += eta * gk;
            }
            normalize(&mut c);
        }
        if best.as_ref().is_none_or(|b| local.0 > b.0) {
            best = Some(local);
        }
    }
    best
}

fn rationalize(c: &[f64], max_denominator: u64) -> Vec<BigInt> {
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let q: Vec<Rational> = c.iter().map(|x| best_rational(x / scale, max_denominator)).collect();
    let l = big_rat(&lcm_denominators(&q));
    let ints: Vec<BigInt> = q.iter().map(|x| (x * &l).to_integer()).collect();
    let g = gcd_all(&ints);
    if g.is_zero() {
        return ints;
    }
    ints.iter().map(|x| x / &g).collect()
}

fn certify(lattice: &NSLattice, coeffs: &[BigInt]) -> Result<Option<NSElement>> {
    if coeffs.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let el = lattice.combination(coeffs);
    Ok(is_positive_definite(&el.m)?.then_some(el))
}

/// Two-phase search for a positive definite element: numeric ascent with
/// exact certification of the rationalized optimum (denominator caps
/// 1, 4, 16, ... up to the maximum), then box search over
/// [-B, B]^rank for B = 1, 2, 4, 8 in lexicographic order.
pub fn polarization_search(t: &Torus, lattice: &NSLattice) -> Result<PolarizationOutcome> {
    let r = lattice.rank();
    if r == 0 {
        return Ok(PolarizationOutcome::NoneFound);
    }
    let s = gram_matrices(t, lattice);
    if let Some((val, c)) = ascent(&s) {
        if val > 0.0 {
            let caps = std::iter::successors(Some(1u64), |&q| (q < MAX_DENOMINATOR).then(|| (q * 4).min(MAX_DENOMINATOR)));
            for cap in caps {
                let coeffs = rationalize(&c, cap);
                if let Some(form) = certify(lattice, &coeffs)? {
                    return Ok(PolarizationOutcome::Found(Polarization { coeffs, form, phase: SearchPhase::Ascent }));
                }
            }
        }
    }
    let scale = s.iter().map(|m| m.abs().max()).fold(0.0, f64::max).max(1.0);
    for b in BOX_BOUNDS {
        let side = 2 * b as usize + 1;
        let Some(total) = side.checked_pow(r as u32).filter(|&n| n <= BOX_CANDIDATE_CAP) else { break };
        for idx in 0..total {
            let c: Vec<i64> = (0..r)
                .map(|k| ((idx / side.pow((r - 1 - k) as u32)) % side) as i64 - b as i64)
                .collect();
            let cf: Vec<f64> = c.iter().map(|&x| x as f64).collect();
            let m = combo(&s, &cf);
            if m.cholesky().is_none() && min_eigen(&m).0 < -1e-9 * scale * b as f64 {
                continue;
            }
            let coeffs: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            if let Some(form) = certify(lattice, &coeffs)? {
                return Ok(PolarizationOutcome::Found(Polarization { coeffs, form, phase: SearchPhase::Box(b) }));
            }
        }
    }
    Ok(PolarizationOutcome::NoneFound)
}

#[derive(Debug, Clone)]
pub enum Obstruction {
    /// NS = 0: no nonzero hermitian form with integral imaginary part.
    TrivialNS,
    /// Every NS element is antidiagonal after the D-diagonalizing change of
    /// coordinates for the multiplication with the given index.
    Antidiagonal { mult_index: usize, coords: Vec<CanonicalFormCoords> },
    /// After the same change of coordinates the diagonal parts of all NS
    /// elements are real multiples of diag(p, q) with pq <= 0, so
    /// det M' <= pq t^2 <= 0 on the whole real span.
    DiagonalLine { mult_index: usize, p: FieldElement, q: FieldElement, multiples: Vec<FieldElement> },
}

#[derive(Debug, Clone)]
pub enum AlgebraicityVerdict {
    Algebraic(Polarization),
    NotAlgebraic(Obstruction),
    Unknown,
}

/// Sound verdict: Algebraic only with an exactly certified polarization,
/// NotAlgebraic only with a structural obstruction.
pub fn is_algebraic(t: &Torus, ns: &NSLattice, mults: &[MultiplicationDatum]) -> Result<AlgebraicityVerdict> {
    if ns.rank() == 0 {
        return Ok(AlgebraicityVerdict::NotAlgebraic(Obstruction::TrivialNS));
    }
    for (k, m) in mults.iter().enumerate() {
        if m.is_scalar || m.d > 0 {
            continue;
        }
        match antidiagonal_certificate(ns, m) {
            Ok(coords) => {
                return Ok(AlgebraicityVerdict::NotAlgebraic(Obstruction::Antidiagonal { mult_index: k, coords }))
            }
            Err(Error::NotInND(_)) => {}
            Err(e) => return Err(e),
        }
    }
    for (k, m) in mults.iter().enumerate() {
        if let Some((p, q, multiples)) = diagonal_line_certificate(ns, m)? {
            return Ok(AlgebraicityVerdict::NotAlgebraic(Obstruction::DiagonalLine { mult_index: k, p, q, multiples }));
        }
    }
    Ok(match polarization_search(t, ns)? {
        PolarizationOutcome::Found(p) => AlgebraicityVerdict::Algebraic(p),
        PolarizationOutcome::NoneFound => AlgebraicityVerdict::Unknown,
    })
}

/// H -> phi_{H0}^-1 phi_H: the endomorphism with analytic matrix
/// conj(M0)^-1 conj(M), as coordinates in the ring basis.
pub fn ns_to_symmetric_endo(t: &Torus, h: &FMatrix, ros: &RosatiData) -> Result<Vec<Rational>> {
    let h = h.lift_to(t.field()).map_err(|e| Error::NotInEndo(e.to_string()))?;
    if !h.is_hermitian() || rational_alt_form(t, &h).is_none() {
        return Err(Error::NotInEndo("form is not in NS_Q".into()));
    }
    let f = ros.h0.conj().inverse()?.mul(&h.conj());
    let coords = analytic_solver(&ros.ring)
        .solve(&f.flatten_coeffs())
        .ok_or_else(|| Error::NotInEndo("image is not in End_Q".into()))?;
    if ros.apply(&coords) != coords {
        return Err(Error::NotInEndo("image is not Rosati-symmetric".into()));
    }
    Ok(coords)
}

/// Coordinates of an integral alternating form in a lattice basis, if any.
pub fn ns_coordinates(lattice: &NSLattice, e: &IntMatrix) -> Option<Vec<Rational>> {
    let cols: Vec<Vec<Rational>> = lattice.basis.iter().map(|b| b.e.flatten().iter().map(big_rat).collect()).collect();
    linalg::CoordinateSolver::new(&cols).solve(&e.flatten().iter().map(big_rat).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::torus::{attach_multiplication, build_torus, PeriodMatrix};

    fn gaussian_square() -> Torus {
        let f = NumberField::gaussian();
        let (o, z, i) = (FieldElement::one(&f), FieldElement::zero(&f), FieldElement::i(&f));
        let pi = FMatrix::from_rows(vec![vec![o.clone(), i.clone(), z.clone(), z.clone()], vec![z.clone(), z, o, i]]);
        build_torus(PeriodMatrix::new(pi).unwrap()).unwrap()
    }

    #[test]
    fn gaussian_square_ns_and_nd() {
        let t = gaussian_square();
        let ns = compute_ns(&t).unwrap();
        assert_eq!(ns.rank(), 4);
        for b in &ns.basis {
            assert_eq!(alt_form_of(&t, &b.m).unwrap(), b.e);
        }
        let i = FieldElement::i(t.field());
        let mult = attach_multiplication(&t, &FMatrix::diag(&[i.clone(), -&i]), -1).unwrap();
        let nd = compute_n_d(&ns, &mult).unwrap();
        assert_eq!(nd.rank(), 2);
        assert!(antidiagonal_certificate(&nd, &mult).is_ok());
        let scalar = attach_multiplication(&t, &FMatrix::diag(&[i.clone(), i.clone()]), -1).unwrap();
        assert!(matches!(compute_n_d(&ns, &scalar), Err(Error::ScalarD)));
        let pol = polarization_search(&t, &ns).unwrap();
        assert!(pol.found().is_some());
    }

    #[test]
    fn definiteness_examples() {
        let f = NumberField::gaussian();
        let (o, z, i) = (FieldElement::one(&f), FieldElement::zero(&f), FieldElement::i(&f));
        assert!(is_positive_definite(&FMatrix::identity(&f, 2)).unwrap());
        assert!(!is_positive_definite(&FMatrix::diag(&[o.clone(), -&o])).unwrap());
        let anti = FMatrix::from_rows(vec![vec![z.clone(), &o + &i], vec![&o - &i, z]]);
        assert!(!is_positive_definite(&anti).unwrap());
    }
}
