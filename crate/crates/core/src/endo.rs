//! Endomorphism rings of two-dimensional tori, classification of the
//! endomorphism algebra, the Rosati involution and real multiplication.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::lattice::{hnf_rows, integer_kernel, IVec};
use crate::linalg::{self, CoordinateSolver, QMatrix};
use crate::matrix::{FMatrix, IntMatrix};
use crate::neronseveri::{alt_form_of, is_positive_definite};
use crate::poly::{char_poly, Poly};
use crate::rational::{big_rat, exact_sqrt, gcd_all, lcm_denominators, rat, rational_is_square, squarefree_part, Rational};
use crate::torus::Torus;

/// An endomorphism: rational representation R on lattice coordinates and
/// analytic representation A on C^2 with A Pi = Pi R.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    pub r: IntMatrix,
    pub a: FMatrix,
}

impl Endomorphism {
    /// Validates an integer matrix as an endomorphism and recovers A.
    pub fn from_rational_rep(t: &Torus, r: &IntMatrix) -> Result<Self> {
        let rf = FMatrix::from_int(t.field(), r);
        let pi_r = t.period().mul(&rf);
        if !pi_r.mul(&t.conj_right_inverse()).is_zero() {
            return Err(Error::NotAnEndomorphism("R does not commute with the complex structure".into()));
        }
        Ok(Endomorphism { r: r.clone(), a: pi_r.mul(&t.right_inverse()) })
    }

    pub fn identity(t: &Torus) -> Self {
        Endomorphism { r: IntMatrix::identity(4), a: FMatrix::identity(t.field(), 2) }
    }

    pub fn mul(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism { r: self.r.mul(&other.r), a: self.a.mul(&other.a) }
    }
}

/// Z-basis of End(Lambda), identity first, with integer structure constants
/// basis[i] * basis[j] = sum_k structure[i][j][k] basis[k].
#[derive(Debug, Clone)]
pub struct EndoRing {
    pub basis: Vec<Endomorphism>,
    pub structure: Vec<Vec<IVec>>,
}

impl EndoRing {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn solver(&self) -> CoordinateSolver {
        let cols: Vec<Vec<Rational>> = self.basis.iter().map(|e| flat_rational(&e.r)).collect();
        CoordinateSolver::new(&cols)
    }

    /// Rational coordinates of an integer 4x4 matrix in the ring basis.
    pub fn coordinates(&self, r: &IntMatrix) -> Option<Vec<Rational>> {
        self.solver().solve(&flat_rational(r))
    }

    /// Rational representation of a Q-combination of basis elements.
    pub fn rational_rep(&self, coeffs: &[Rational]) -> QMatrix {
        let mut out = vec![vec![Rational::zero(); 4]; 4];
        for (e, c) in self.basis.iter().zip(coeffs) {
            for (r, row) in out.iter_mut().enumerate() {
                for (col, x) in row.iter_mut().enumerate() {
                    *x += c * big_rat(&e.r.0[r][col]);
                }
            }
        }
        out
    }

    /// Analytic representation of a Q-combination of basis elements.
    pub fn analytic_rep(&self, coeffs: &[Rational]) -> FMatrix {
        let mats: Vec<FMatrix> = self.basis.iter().map(|e| e.a.clone()).collect();
        crate::matrix::combine(&mats, coeffs)
    }

    /// Product of two coordinate vectors via the structure tensor.
    pub fn mul_coords(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.rank();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    if !self.structure[i][j][k].is_zero() {
                        *o += &c * big_rat(&self.structure[i][j][k]);
                    }
                }
            }
        }
        out
    }

    /// Matrix of left multiplication by `x` on coordinates.
    pub fn left_mul_matrix(&self, x: &[Rational]) -> QMatrix {
        let n = self.rank();
        let cols: Vec<Vec<Rational>> = (0..n).map(|j| self.mul_coords(x, &unit(n, j))).collect();
        linalg::transpose(&cols)
    }

    /// Hermite normal form of the lattice of rational representations.
    pub fn hnf(&self) -> Vec<IVec> {
        hnf_rows(&self.basis.iter().map(|e| e.r.flatten()).collect::<Vec<_>>())
    }

    /// All ring elements whose rational representation has entries in
    /// [-bound, bound], sorted.
    pub fn box_points(&self, bound: i64) -> Vec<IntMatrix> {
        let h = self.hnf();
        let pivots: Vec<usize> = h.iter().map(|row| row.iter().position(|x| !x.is_zero()).unwrap()).collect();
        let b = BigInt::from(bound);
        let mut out = Vec::new();
        let mut acc = vec![BigInt::zero(); 16];
        box_dfs(&h, &pivots, 0, &b, &mut acc, &mut out);
        out.sort();
        out
    }
}

fn box_dfs(h: &[IVec], pivots: &[usize], k: usize, b: &BigInt, acc: &mut IVec, out: &mut Vec<IntMatrix>) {
    if k == h.len() {
        if acc.iter().all(|x| x.abs() <= *b) {
            out.push(IntMatrix::from_flat(4, acc));
        }
        return;
    }
    let p = pivots[k];
    let piv = &h[k][p];
    let s = acc[p].clone();
    let lo = (-b - &s).div_ceil(piv);
    let hi = (b - &s).div_floor(piv);
    let mut c = lo;
    while c <= hi {
        for (a, x) in acc.iter_mut().zip(&h[k]) {
            *a += &c * x;
        }
        box_dfs(h, pivots, k + 1, b, acc, out);
        for (a, x) in acc.iter_mut().zip(&h[k]) {
            *a -= &c * x;
        }
        c += 1;
    }
}

fn unit(n: usize, k: usize) -> Vec<Rational> {
    (0..n).map(|i| if i == k { Rational::one() } else { Rational::zero() }).collect()
}

fn flat_rational(r: &IntMatrix) -> Vec<Rational> {
    r.flatten().iter().map(big_rat).collect()
}

/// Solves "upper-right block of P R P^-1 vanishes", i.e. Pi R Q' = 0, over
/// Q for the 16 entries of R and saturates to the integer lattice.
pub fn compute_endo_ring(t: &Torus) -> Result<EndoRing> {
    let dim = t.field().dim();
    let pi = t.period();
    let qp = t.conj_right_inverse();
    // column (k,l) holds the coefficients of Pi[:,k] * Q'[l,:]
    let mut rows = vec![vec![Rational::zero(); 16]; 4 * dim];
    for k in 0..4 {
        for l in 0..4 {
            for r in 0..2 {
                for c in 0..2 {
                    let v = pi.get(r, k) * qp.get(l, c);
                    for (m, coeff) in v.coeffs().iter().enumerate() {
                        rows[(r * 2 + c) * dim + m][k * 4 + l] = coeff.clone();
                    }
                }
            }
        }
    }
    let mut hnf = integer_kernel(&rows, 16);
    // R_00 is the first coordinate and the identity lies in the lattice, so
    // the first HNF row has R_00 = 1 and may be swapped for the identity.
    if hnf.is_empty() || !hnf[0][0].is_one() {
        return Err(Error::NotClosed);
    }
    hnf[0] = IntMatrix::identity(4).flatten();
    let basis = hnf
        .iter()
        .map(|v| Endomorphism::from_rational_rep(t, &IntMatrix::from_flat(4, v)))
        .collect::<Result<Vec<_>>>()?;
    let mut ring = EndoRing { basis, structure: Vec::new() };
    ring.structure = structure_constants(&ring)?;
    Ok(ring)
}

/// Integer structure constants; fails with `NotClosed` if a product leaves
/// the Z-span.
pub fn structure_constants(ring: &EndoRing) -> Result<Vec<Vec<IVec>>> {
    let solver = ring.solver();
    let n = ring.rank();
    let mut out = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = ring.basis[i].r.mul(&ring.basis[j].r);
            let c = solver.solve(&flat_rational(&prod)).ok_or(Error::NotClosed)?;
            out[i][j] = c.iter().map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::NotClosed) }).collect::<Result<_>>()?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlgebraTag {
    RationalField,
    RealQuadratic,
    ImaginaryQuadratic,
    CMField,
    IndefiniteQuaternion,
    DefiniteQuaternion,
    MatrixAlgebraOverQuadratic,
    Other,
}

/// Classification of End_Q with integer witnesses: the squarefree
/// discriminant of a quadratic field or center, the real quadratic subfield
/// of a CM field, a pair (a, b) of squarefree integers with the algebra
/// isomorphic to (a, b)_Q for quaternions, or (rank, center dimension) for
/// `Other`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraClass {
    pub tag: AlgebraTag,
    pub discriminant_data: Vec<BigInt>,
}

/// Basis of the center of End_Q as coordinate vectors.
pub fn center(ring: &EndoRing) -> Vec<Vec<Rational>> {
    let n = ring.rank();
    let mut rows = Vec::new();
    for j in 0..n {
        for k in 0..n {
            rows.push((0..n).map(|i| big_rat(&(&ring.structure[i][j][k] - &ring.structure[j][i][k]))).collect());
        }
    }
    linalg::kernel(&rows, n)
}

/// (t, n) with x^2 = t x - n, when x satisfies a quadratic over Q and is not
/// rational.
fn quadratic_relation(ring: &EndoRing, x: &[Rational]) -> Option<(Rational, Rational)> {
    let n = ring.rank();
    if x.iter().skip(1).all(Zero::is_zero) {
        return None;
    }
    let x2 = ring.mul_coords(x, x);
    // t x - n e0 = x^2
    let m: QMatrix = (0..n).map(|k| vec![x[k].clone(), if k == 0 { rat(-1) } else { rat(0) }]).collect();
    let s = linalg::solve(&m, &x2)?;
    Some((s[0].clone(), s[1].clone()))
}

/// Squarefree part of a nonzero rational, as an integer with the same sign.
pub fn squarefree_rational(q: &Rational) -> BigInt {
    let n = q.numer() * q.denom();
    squarefree_part(&n).0
}

fn quadratic_discriminant(ring: &EndoRing, x: &[Rational]) -> Option<Rational> {
    let (t, n) = quadratic_relation(ring, x)?;
    Some(&t * &t - rat(4) * n)
}

fn reduced_trace(ring: &EndoRing, x: &[Rational]) -> Rational {
    let l = ring.left_mul_matrix(x);
    (0..ring.rank()).fold(Rational::zero(), |acc, i| acc + &l[i][i]) / rat(2)
}

pub fn classify_algebra(ring: &EndoRing) -> Result<AlgebraClass> {
    let n = ring.rank();
    let z = center(ring);
    let other = |c: usize| AlgebraClass { tag: AlgebraTag::Other, discriminant_data: vec![n.into(), c.into()] };
    match n {
        1 => Ok(AlgebraClass { tag: AlgebraTag::RationalField, discriminant_data: vec![] }),
        2 => {
            let disc = quadratic_discriminant(ring, &unit(2, 1)).ok_or_else(|| {
                Error::UnrecognizedStructure("rank-2 generator is not quadratic".into())
            })?;
            if rational_is_square(&disc) {
                return Ok(other(z.len()));
            }
            let tag = if disc.is_positive() { AlgebraTag::RealQuadratic } else { AlgebraTag::ImaginaryQuadratic };
            Ok(AlgebraClass { tag, discriminant_data: vec![squarefree_rational(&disc)] })
        }
        4 if z.len() == 4 => classify_commutative_quartic(ring),
        4 if z.len() == 1 => classify_quaternion(ring),
        4 => Ok(other(z.len())),
        8 => {
            if z.len() != 2 {
                return Err(Error::UnrecognizedStructure(format!("rank 8 with center of dimension {}", z.len())));
            }
            let w = z
                .iter()
                .find(|v| v.iter().skip(1).any(|x| !x.is_zero()))
                .ok_or_else(|| Error::UnrecognizedStructure("center is Q".into()))?;
            let disc = quadratic_discriminant(ring, w)
                .ok_or_else(|| Error::UnrecognizedStructure("center is not quadratic".into()))?;
            if rational_is_square(&disc) {
                return Err(Error::UnrecognizedStructure("center is not a field".into()));
            }
            Ok(AlgebraClass { tag: AlgebraTag::MatrixAlgebraOverQuadratic, discriminant_data: vec![squarefree_rational(&disc)] })
        }
        3 | 5 | 6 | 7 => Ok(other(z.len())),
        _ => Err(Error::UnrecognizedStructure(format!("rank {n} is impossible for a 2-dimensional torus"))),
    }
}

fn classify_commutative_quartic(ring: &EndoRing) -> Result<AlgebraClass> {
    let other = AlgebraClass { tag: AlgebraTag::Other, discriminant_data: vec![4.into(), 4.into()] };
    // primitive element: an element whose characteristic polynomial on the
    // algebra is squarefree
    let candidates: Vec<Vec<i64>> = vec![
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
        vec![0, 1, 1, 0],
        vec![0, 1, 0, 1],
        vec![0, 0, 1, 1],
        vec![0, 1, 1, 1],
        vec![0, 1, 2, 3],
        vec![0, 1, -1, 2],
        vec![0, 3, 1, -2],
    ];
    let Some(f) = candidates.iter().find_map(|c| {
        let x: Vec<Rational> = c.iter().map(|&v| rat(v)).collect();
        let p = char_poly(&ring.left_mul_matrix(&x));
        p.is_squarefree().then_some(p)
    }) else {
        return Ok(other);
    };
    // scale the element so that the polynomial is monic with integer
    // coefficients: coefficient of x^(4-k) gets multiplied by N^k
    let scale = lcm_denominators(&f.0);
    let c: Vec<BigInt> = (0..=4)
        .map(|k| (&f.0[k] * big_rat(&num_traits::pow(scale.clone(), 4 - k))).to_integer())
        .collect();
    let (a, b, cc, d) = (&c[3], &c[2], &c[1], &c[0]);
    let fi = Poly::new(c.iter().map(big_rat).collect());
    if !fi.integer_roots().is_empty() {
        return Ok(other);
    }
    let resolvent = Poly::new(
        [
            -(a * a * d - BigInt::from(4) * b * d + cc * cc),
            a * cc - BigInt::from(4) * d,
            -b.clone(),
            BigInt::one(),
        ]
        .iter()
        .map(big_rat)
        .collect(),
    );
    let mut real_subfield = None;
    for y in resolvent.integer_roots() {
        let disc_s = a * a - BigInt::from(4) * (b - &y);
        let disc_p = &y * &y - BigInt::from(4) * d;
        let sq = |v: &BigInt| !v.is_negative() && exact_sqrt(v).is_some();
        if sq(&disc_s) && sq(&disc_p) && splits_over_q(a, b, cc, d, &y) {
            return Ok(other);
        }
        let sub = if !sq(&disc_s) { disc_s } else { disc_p };
        if sub.is_positive() && real_subfield.is_none() {
            real_subfield = Some(squarefree_part(&sub).0);
        }
    }
    if fi.count_all_real_roots() > 0 {
        return Ok(other);
    }
    Ok(match real_subfield {
        Some(s) => AlgebraClass { tag: AlgebraTag::CMField, discriminant_data: vec![s] },
        None => other,
    })
}

/// Whether x^4 + a x^3 + b x^2 + c x + d = (x^2 + p x + q)(x^2 + r x + s)
/// over Q with q + s = y.
fn splits_over_q(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt, y: &BigInt) -> bool {
    let (sa, sp) = (exact_sqrt(&(a * a - BigInt::from(4) * (b - y))), exact_sqrt(&(y * y - BigInt::from(4) * d)));
    let (Some(sa), Some(sp)) = (sa, sp) else { return false };
    let half = |x: BigInt| big_rat(&x) / rat(2);
    let (p, r) = (half(a + &sa), half(a - &sa));
    for (q, s) in [(half(y + &sp), half(y - &sp)), (half(y - &sp), half(y + &sp))] {
        if &p * &s + &q * &r == big_rat(c) {
            return true;
        }
    }
    false
}

fn classify_quaternion(ring: &EndoRing) -> Result<AlgebraClass> {
    let traces: Vec<Rational> = (0..4).map(|k| reduced_trace(ring, &unit(4, k))).collect();
    let pure = linalg::kernel(&vec![traces], 4);
    let form = |x: &[Rational], y: &[Rational]| -> Rational {
        let xy = ring.mul_coords(x, y);
        let yx = ring.mul_coords(y, x);
        let s: Vec<Rational> = xy.iter().zip(&yx).map(|(a, b)| a + b).collect();
        -reduced_trace(ring, &s) / rat(4)
    };
    let gram: QMatrix = pure.iter().map(|x| pure.iter().map(|y| form(x, y)).collect()).collect();
    let m1 = gram[0][0].clone();
    let m2 = &gram[0][0] * &gram[1][1] - &gram[0][1] * &gram[1][0];
    let m3 = linalg::det(&gram);
    if m3.is_zero() {
        return Err(Error::UnrecognizedStructure("degenerate reduced norm form".into()));
    }
    let definite = m1.is_positive() && m2.is_positive() && m3.is_positive();
    // orthogonal pair u1, u2 with u1^2 = -nrd(u1), u2^2 = -nrd(u2)
    let (u1, u2) = orthogonal_pair(&pure, &gram, &form);
    let a = -form(&u1, &u1);
    let b = -form(&u2, &u2);
    let tag = if definite { AlgebraTag::DefiniteQuaternion } else { AlgebraTag::IndefiniteQuaternion };
    Ok(AlgebraClass { tag, discriminant_data: vec![squarefree_rational(&a), squarefree_rational(&b)] })
}

fn orthogonal_pair(
    pure: &[Vec<Rational>],
    gram: &QMatrix,
    form: &dyn Fn(&[Rational], &[Rational]) -> Rational,
) -> (Vec<Rational>, Vec<Rational>) {
    // an anisotropic first vector: a basis vector or a sum of two
    let mut first = None;
    'outer: for i in 0..3 {
        if !gram[i][i].is_zero() {
            first = Some(pure[i].clone());
            break;
        }
        for j in i + 1..3 {
            let v: Vec<Rational> = pure[i].iter().zip(&pure[j]).map(|(a, b)| a + b).collect();
            if !form(&v, &v).is_zero() {
                first = Some(v);
                break 'outer;
            }
        }
    }
    let u1 = first.expect("nondegenerate ternary form has an anisotropic vector");
    let n1 = form(&u1, &u1);
    let project = |w: &[Rational]| -> Vec<Rational> {
        let c = form(&u1, w) / &n1;
        w.iter().zip(&u1).map(|(x, y)| x - &c * y).collect()
    };
    let mut best = None;
    for w in pure {
        let v = project(w);
        if !form(&v, &v).is_zero() {
            best = Some(v);
            break;
        }
    }
    let u2 = best.unwrap_or_else(|| {
        let v: Vec<Rational> = pure[0].iter().zip(&pure[1]).zip(&pure[2]).map(|((a, b), c)| a + b + c).collect();
        project(&v)
    });
    (u1, u2)
}

/// Rosati involution attached to a polarization H0 (hermitian matrix M0).
#[derive(Debug, Clone)]
pub struct RosatiData {
    pub ring: EndoRing,
    pub h0: FMatrix,
    /// Column k holds the coordinates of basis[k]'.
    pub involution: QMatrix,
}

pub(crate) fn analytic_solver(ring: &EndoRing) -> CoordinateSolver {
    let cols: Vec<Vec<Rational>> = ring.basis.iter().map(|e| e.a.flatten_coeffs()).collect();
    CoordinateSolver::new(&cols)
}

/// alpha' = conj(M0)^-1 conj(A)^t conj(M0), from H(alpha x, y) = H(x, alpha' y).
pub fn rosati_involution(t: &Torus, ring: &EndoRing, h0: &FMatrix) -> Result<RosatiData> {
    let m0 = h0.lift_to(t.field())?;
    if !m0.is_hermitian() {
        return Err(Error::NotPolarization("H0 is not hermitian".into()));
    }
    if !is_positive_definite(&m0)? {
        return Err(Error::NotPolarization("H0 is not positive definite".into()));
    }
    if alt_form_of(t, &m0).is_none() {
        return Err(Error::NotPolarization("Im H0 is not integral on the lattice".into()));
    }
    let m0c = m0.conj();
    let m0c_inv = m0c.inverse()?;
    let solver = analytic_solver(ring);
    let n = ring.rank();
    let mut cols = Vec::with_capacity(n);
    for (k, e) in ring.basis.iter().enumerate() {
        let image = m0c_inv.mul(&e.a.conj_transpose()).mul(&m0c);
        let c = solver
            .solve(&image.flatten_coeffs())
            .ok_or_else(|| Error::NotStable(format!("image of basis element {k}")))?;
        cols.push(c);
    }
    let involution = linalg::transpose(&cols);
    let ros = RosatiData { ring: ring.clone(), h0: m0, involution };
    if linalg::mat_mul(&ros.involution, &ros.involution) != linalg::identity(n) {
        return Err(Error::NotStable("Rosati map is not an involution".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = linalg::mat_vec(&ros.involution, &ring.mul_coords(&unit(n, i), &unit(n, j)));
            let rhs = ring.mul_coords(&cols[j], &cols[i]);
            if lhs != rhs {
                return Err(Error::NotStable(format!("(b{i} b{j})' != b{j}' b{i}'")));
            }
        }
    }
    Ok(ros)
}

impl RosatiData {
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.involution, x)
    }
}

/// Basis of the Rosati-fixed subspace and its dimension.
pub fn symmetric_subspace(ros: &RosatiData) -> (Vec<Vec<Rational>>, usize) {
    let n = ros.ring.rank();
    let mut m = ros.involution.clone();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= Rational::one();
    }
    let basis = linalg::kernel(&m, n);
    let dim = basis.len();
    (basis, dim)
}

/// A real multiplication beta with beta^2 = d'' and d' the squarefree part.
#[derive(Debug, Clone)]
pub struct RealMultiplication {
    pub d_prime: BigInt,
    pub d_double_prime: BigInt,
    pub beta: Endomorphism,
    /// Coordinates of the symmetric element alpha the construction used.
    pub alpha: Vec<Rational>,
    /// False when the squarefree reduction could not rule out a large
    /// square factor.
    pub squarefree_complete: bool,
}

fn integer_direction(v: &[Rational]) -> Vec<Rational> {
    let l = big_rat(&lcm_denominators(v));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = gcd_all(&ints);
    if g.is_zero() {
        return v.to_vec();
    }
    ints.iter().map(|x| big_rat(&(x / &g))).collect()
}

/// Picks a symmetric alpha outside Q with a non-square discriminant
/// t^2 - 4n, and returns beta = c (2 alpha - t) with beta^2 = c^2 (t^2 - 4n).
pub fn find_real_multiplication(t: &Torus, ros: &RosatiData) -> Result<RealMultiplication> {
    let (sym, dim) = symmetric_subspace(ros);
    let ring = &ros.ring;
    let basis: Vec<Vec<Rational>> = sym.iter().map(|v| integer_direction(v)).collect();
    if dim < 2 {
        return Err(Error::NoSuchElement);
    }
    let try_alpha = |alpha: &[Rational], strict: bool| -> Result<Option<RealMultiplication>> {
        let Some((tr, nm)) = quadratic_relation(ring, alpha) else {
            if strict && alpha.iter().skip(1).any(|x| !x.is_zero()) {
                return Err(Error::NotQuadratic);
            }
            return Ok(None);
        };
        let disc = &tr * &tr - rat(4) * &nm;
        if disc.is_negative() {
            return Err(Error::NegativeDiscriminant(disc.to_string()));
        }
        if disc.is_zero() || rational_is_square(&disc) {
            return Ok(None);
        }
        // beta0 = 2 alpha - t, scaled to an integer matrix
        let mut beta0: Vec<Rational> = alpha.iter().map(|x| x * rat(2)).collect();
        beta0[0] -= &tr;
        let r = ring.rational_rep(&beta0);
        let c = lcm_denominators(r.iter().flatten());
        let rc = IntMatrix(r.iter().map(|row| row.iter().map(|x| (x * big_rat(&c)).to_integer()).collect()).collect());
        let dd = &disc * big_rat(&(&c * &c));
        if !dd.is_integer() {
            return Err(Error::NotClosed);
        }
        let dd = dd.to_integer();
        let beta = Endomorphism::from_rational_rep(t, &rc)?;
        if beta.r.mul(&beta.r) != IntMatrix::scalar(4, &dd) {
            return Err(Error::NotQuadratic);
        }
        let (d_prime, complete) = squarefree_part(&dd);
        Ok(Some(RealMultiplication {
            d_prime,
            d_double_prime: dd,
            beta,
            alpha: alpha.to_vec(),
            squarefree_complete: complete,
        }))
    };
    for v in &basis {
        if let Some(rm) = try_alpha(v, true)? {
            return Ok(rm);
        }
    }
    // small integer combinations of the symmetric basis, lexicographic
    let k = basis.len().min(4);
    let total = 5usize.pow(k as u32);
    for idx in 0..total {
        let coeffs: Vec<i64> = (0..k).map(|j| ((idx / 5usize.pow((k - 1 - j) as u32)) % 5) as i64 - 2).collect();
        if coeffs.iter().filter(|&&c| c != 0).count() < 2 {
            continue;
        }
        let mut alpha = vec![Rational::zero(); ring.rank()];
        for (c, v) in coeffs.iter().zip(&basis) {
            for (a, x) in alpha.iter_mut().zip(v) {
                *a += x * rat(*c);
            }
        }
        if let Some(rm) = try_alpha(&alpha, false)? {
            return Ok(rm);
        }
    }
    Err(Error::NoSuchElement)
}

/// Integer rows of the equations R J - J R = 0 over the monomial basis.
fn commutation_equations(t: &Torus) -> Result<Vec<Vec<i128>>> {
    let j = t.complex_structure();
    let dim = t.field().dim();
    let mut rows: Vec<Vec<Rational>> = vec![vec![Rational::zero(); 16]; 16 * dim];
    for a in 0..4 {
        for b in 0..4 {
            for x in 0..4 {
                for y in 0..4 {
                    // d/dR_xy of (RJ - JR)_ab
                    let mut coef = FieldElement::zero(t.field());
                    if x == a {
                        coef = &coef + j.get(y, b);
                    }
                    if y == b {
                        coef = &coef - j.get(a, x);
                    }
                    for (m, c) in coef.coeffs().iter().enumerate() {
                        rows[(a * 4 + b) * dim + m][x * 4 + y] = c.clone();
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<i128>> = Vec::new();
    for row in rows {
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        let l = big_rat(&lcm_denominators(&row));
        let ints: Vec<BigInt> = row.iter().map(|x| (x * &l).to_integer()).collect();
        let g = gcd_all(&ints);
        let r: Vec<i128> = ints
            .iter()
            .map(|x| (x / &g).to_i128().ok_or_else(|| Error::Validation("oracle coefficient overflow".into())))
            .collect::<Result<_>>()?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Brute-force enumeration of integer matrices R with entries in
/// [-bound, bound] commuting with J, independent of [`compute_endo_ring`].
pub fn endo_box_oracle(t: &Torus, bound: u32) -> Result<Vec<IntMatrix>> {
    endo_box_oracle_restricted(t, bound, &(0..16).collect::<Vec<_>>())
}

/// As [`endo_box_oracle`] with only the listed row-major positions free and
/// the rest fixed at zero (e.g. `[0, 5, 10, 15]` for diagonal matrices).
pub fn endo_box_oracle_restricted(t: &Torus, bound: u32, free: &[usize]) -> Result<Vec<IntMatrix>> {
    if bound > 3 {
        return Err(Error::BoundTooLarge(bound));
    }
    let eqs: Vec<Vec<i128>> = commutation_equations(t)?
        .into_iter()
        .map(|row| free.iter().map(|&p| row[p]).collect::<Vec<i128>>())
        .filter(|row: &Vec<i128>| row.iter().any(|&x| x != 0))
        .collect();
    let b = bound as i128;
    let nv = free.len();
    // suffix[e][k] = bound * sum_{v >= k} |eq_e[v]|
    let suffix: Vec<Vec<i128>> = eqs
        .iter()
        .map(|row| {
            let mut s = vec![0i128; nv + 1];
            for k in (0..nv).rev() {
                s[k] = s[k + 1] + row[k].abs() * b;
            }
            s
        })
        .collect();
    let mut partial = vec![0i128; eqs.len()];
    let mut vals = vec![0i128; nv];
    let mut out = Vec::new();
    oracle_dfs(&eqs, &suffix, b, 0, &mut partial, &mut vals, &mut out);
    let mut mats: Vec<IntMatrix> = out
        .into_iter()
        .map(|v| {
            let mut flat = vec![BigInt::zero(); 16];
            for (p, x) in free.iter().zip(v) {
                flat[*p] = BigInt::from(x);
            }
            IntMatrix::from_flat(4, &flat)
        })
        .collect();
    mats.sort();
    Ok(mats)
}

fn oracle_dfs(
    eqs: &[Vec<i128>],
    suffix: &[Vec<i128>],
    b: i128,
    k: usize,
    partial: &mut [i128],
    vals: &mut [i128],
    out: &mut Vec<Vec<i128>>,
) {
    if partial.iter().zip(suffix).any(|(p, s)| p.abs() > s[k]) {
        return;
    }
    if k == vals.len() {
        out.push(vals.to_vec());
        return;
    }
    for x in -b..=b {
        vals[k] = x;
        for (p, e) in partial.iter_mut().zip(eqs) {
            *p += e[k] * x;
        }
        oracle_dfs(eqs, suffix, b, k + 1, partial, vals, out);
        for (p, e) in partial.iter_mut().zip(eqs) {
            *p -= e[k] * x;
        }
    }
    vals[k] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::torus::{build_torus, PeriodMatrix};

    fn gaussian_square() -> Torus {
        let f = NumberField::gaussian();
        let (o, z, i) = (FieldElement::one(&f), FieldElement::zero(&f), FieldElement::i(&f));
        let pi = FMatrix::from_rows(vec![vec![o.clone(), i.clone(), z.clone(), z.clone()], vec![z.clone(), z, o, i]]);
        build_torus(PeriodMatrix::new(pi).unwrap()).unwrap()
    }

    #[test]
    fn gaussian_square_has_rank_eight() {
        let t = gaussian_square();
        let ring = compute_endo_ring(&t).unwrap();
        assert_eq!(ring.rank(), 8);
        assert_eq!(ring.basis[0].r, IntMatrix::identity(4));
        // identity row of the structure tensor is a unit vector
        for j in 0..8 {
            assert_eq!(ring.structure[0][j], unit(8, j).iter().map(|x| x.to_integer()).collect::<Vec<_>>());
        }
        let c = classify_algebra(&ring).unwrap();
        assert_eq!(c.tag, AlgebraTag::MatrixAlgebraOverQuadratic);
        assert_eq!(c.discriminant_data, vec![BigInt::from(-1)]);
    }

    #[test]
    fn rosati_on_gaussian_square() {
        let t = gaussian_square();
        let ring = compute_endo_ring(&t).unwrap();
        let id = FMatrix::identity(t.field(), 2);
        let ros = rosati_involution(&t, &ring, &id).unwrap();
        // conjugate transpose involution: symmetric part = hermitian matrices
        let (_, dim) = symmetric_subspace(&ros);
        assert_eq!(dim, 4);
        let rm = find_real_multiplication(&t, &ros).unwrap();
        assert!(rm.d_prime > BigInt::one());
        assert_eq!(rm.beta.r.mul(&rm.beta.r), IntMatrix::scalar(4, &rm.d_double_prime));
        let bad = FMatrix::diag(&[FieldElement::one(t.field()), -FieldElement::one(t.field())]);
        assert!(matches!(rosati_involution(&t, &ring, &bad), Err(Error::NotPolarization(_))));
    }

    #[test]
    fn oracle_guards_and_identity() {
        let t = gaussian_square();
        assert_eq!(endo_box_oracle(&t, 5).unwrap_err(), Error::BoundTooLarge(5));
        let diag = endo_box_oracle_restricted(&t, 1, &[0, 5, 10, 15]).unwrap();
        assert!(diag.contains(&IntMatrix::identity(4)));
    }

    #[test]
    fn box_points_match_oracle_on_gaussian_square() {
        let t = gaussian_square();
        let ring = compute_endo_ring(&t).unwrap();
        assert_eq!(ring.box_points(1), endo_box_oracle(&t, 1).unwrap());
    }
}
