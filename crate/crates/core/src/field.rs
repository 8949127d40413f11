//! Exact arithmetic in number fields given as a tensor product of simple
//! extensions Q(g1) (x) Q(g2) (x) ..., one monic minimal polynomial per
//! generator, together with certified complex embeddings.
//!
//! Every field contains the generator `i` (x^2 + 1). Linear independence of
//! the monomial basis over Q is declared by whoever builds the field; zero
//! tests are exact coefficient comparisons and sign tests refine interval
//! enclosures of the declared roots.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{ComplexBox, RealInterval};
use crate::linalg;
use crate::poly::Poly;
use crate::rational::{frac, rat, Rational};

/// How complex conjugation acts on a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjKind {
    /// The chosen root is real and fixed by conjugation.
    Real,
    /// The chosen root is purely imaginary; conjugation sends it to its
    /// negative (requires an even minimal polynomial).
    ImaginaryNegation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    /// Ascending coefficients of the monic minimal polynomial.
    pub min_poly: Vec<Rational>,
    pub root_box: ComplexBox,
    pub conj: ConjKind,
}

impl GeneratorSpec {
    pub fn new(name: &str, min_poly: Vec<Rational>, root_box: ComplexBox, conj: ConjKind) -> Self {
        GeneratorSpec { name: name.to_string(), min_poly, root_box, conj }
    }

    pub fn imaginary_unit() -> Self {
        GeneratorSpec::new(
            "i",
            vec![rat(1), rat(0), rat(1)],
            ComplexBox::from_bounds(rat(0), rat(0), frac(1, 2), frac(3, 2)),
            ConjKind::ImaginaryNegation,
        )
    }

    /// Square root of a nonsquare integer: the positive real root for n > 0,
    /// the root with positive imaginary part for n < 0.
    pub fn sqrt(name: &str, n: i64) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidGenerator { name: name.into(), reason: reason.into() };
        if n == 0 || crate::rational::is_perfect_square_i64(n.abs()) && n > 0 {
            return Err(invalid("radicand must be a nonsquare integer"));
        }
        let a = n.unsigned_abs();
        let k = a.sqrt() as i64;
        let (lo, hi) = if (k as u64) * (k as u64) == a {
            // n = -k^2: root is exactly k*i, still isolate it in a box.
            (frac(2 * k - 1, 2), frac(2 * k + 1, 2))
        } else {
            (rat(k), rat(k + 1))
        };
        let poly = vec![rat(-n), rat(0), rat(1)];
        Ok(if n > 0 {
            GeneratorSpec::new(name, poly, ComplexBox::from_bounds(lo, hi, rat(0), rat(0)), ConjKind::Real)
        } else {
            GeneratorSpec::new(
                name,
                poly,
                ComplexBox::from_bounds(rat(0), rat(0), lo, hi),
                ConjKind::ImaginaryNegation,
            )
        })
    }

    /// Real cube root of an integer that is not a perfect cube.
    pub fn cube_root(name: &str, n: i64) -> Result<Self> {
        let k = n.abs().cbrt();
        if k * k * k == n.abs() {
            return Err(Error::InvalidGenerator { name: name.into(), reason: "perfect cube".into() });
        }
        let (lo, hi) = if n > 0 { (rat(k), rat(k + 1)) } else { (rat(-k - 1), rat(-k)) };
        Ok(GeneratorSpec::new(
            name,
            vec![rat(-n), rat(0), rat(0), rat(1)],
            ComplexBox::from_bounds(lo, hi, rat(0), rat(0)),
            ConjKind::Real,
        ))
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len().saturating_sub(1)
    }

    /// Real polynomial whose root in [`Self::isolating_interval`] locates the
    /// generator: p(x) itself for real roots, p(iy) for imaginary ones.
    fn isolating_poly(&self) -> Poly {
        match self.conj {
            ConjKind::Real => Poly::new(self.min_poly.clone()),
            ConjKind::ImaginaryNegation => Poly::new(
                self.min_poly
                    .iter()
                    .enumerate()
                    .map(|(k, c)| match k % 4 {
                        0 => c.clone(),
                        2 => -c,
                        _ => Rational::zero(),
                    })
                    .collect(),
            ),
        }
    }

    fn isolating_interval(&self) -> RealInterval {
        match self.conj {
            ConjKind::Real => self.root_box.re.clone(),
            ConjKind::ImaginaryNegation => self.root_box.im.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidGenerator { name: self.name.clone(), reason };
        let valid_name = self.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_name {
            return Err(invalid("name must be an identifier".into()));
        }
        if self.degree() < 2 {
            return Err(invalid("minimal polynomial must have degree >= 2".into()));
        }
        if !self.min_poly.last().unwrap().is_one() {
            return Err(invalid("minimal polynomial must be monic".into()));
        }
        let b = &self.root_box;
        if b.re.lo > b.re.hi || b.im.lo > b.im.hi {
            return Err(invalid("root box has inverted bounds".into()));
        }
        match self.conj {
            ConjKind::Real => {
                if !b.im.contains_zero() {
                    return Err(invalid("real generator needs a root box meeting the real axis".into()));
                }
            }
            ConjKind::ImaginaryNegation => {
                if self.min_poly.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
                    return Err(invalid("imaginary-negation requires an even minimal polynomial".into()));
                }
                if !b.re.contains_zero() || b.im.contains_zero() {
                    return Err(invalid("imaginary generator needs a purely imaginary root box off zero".into()));
                }
            }
        }
        let f = self.isolating_poly();
        if !f.is_squarefree() {
            return Err(invalid("minimal polynomial has repeated roots".into()));
        }
        let iv = self.isolating_interval();
        if f.eval(&iv.lo).is_zero() {
            return Err(invalid("root box endpoint is a root; widen the box".into()));
        }
        let count = f.count_real_roots(&iv.lo, &iv.hi);
        if count != 1 {
            return Err(invalid(format!("root box contains {count} roots, expected exactly 1")));
        }
        Ok(())
    }
}

/// A tensor product of simple extensions of Q with a distinguished complex
/// embedding. Shared behind an `Arc`; immutable apart from the cache of
/// refined root enclosures.
pub struct NumberField {
    generators: Vec<GeneratorSpec>,
    degrees: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
    mul_table: Vec<Vec<Vec<(usize, Rational)>>>,
    /// mul_table scaled by table_den to integers.
    int_table: Vec<Vec<Vec<(usize, BigInt)>>>,
    table_den: BigInt,
    conj_negates: Vec<bool>,
    independence_declared: bool,
    roots: Vec<Mutex<RealInterval>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.generators.iter().map(|g| g.name.as_str()).collect();
        write!(f, "NumberField{names:?}")
    }
}

/// Maximum number of precision doublings in [`FieldElement::exact_sign`].
pub const MAX_DOUBLINGS: u32 = 20;
const SIGN_START_BITS: u32 = 64;

impl NumberField {
    /// Builds the field, adjoining `i` first when it is not declared.
    pub fn new(mut generators: Vec<GeneratorSpec>, independence_declared: bool) -> Result<Arc<Self>> {
        match generators.iter().position(|g| g.name == "i") {
            Some(k) => {
                let g = &generators[k];
                let expected = GeneratorSpec::imaginary_unit();
                if g.min_poly != expected.min_poly || g.conj != ConjKind::ImaginaryNegation {
                    return Err(Error::InvalidGenerator {
                        name: "i".into(),
                        reason: "`i` is reserved for a root of x^2 + 1 with imaginary-negation".into(),
                    });
                }
            }
            None => generators.insert(0, GeneratorSpec::imaginary_unit()),
        }
        for (k, g) in generators.iter().enumerate() {
            g.validate()?;
            if generators[..k].iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidGenerator { name: g.name.clone(), reason: "duplicate name".into() });
            }
        }
        let degrees: Vec<usize> = generators.iter().map(GeneratorSpec::degree).collect();
        let mut strides = vec![1usize; degrees.len()];
        for k in (0..degrees.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * degrees[k + 1];
        }
        let dim = degrees.iter().product();
        let reductions: Vec<Vec<Vec<Rational>>> = generators.iter().map(power_reductions).collect();
        let exps = |idx: usize| -> Vec<usize> {
            degrees.iter().zip(&strides).map(|(d, s)| (idx / s) % d).collect()
        };
        let mut mul_table = vec![vec![Vec::new(); dim]; dim];
        for a in 0..dim {
            let ea = exps(a);
            for b in a..dim {
                let eb = exps(b);
                let mut terms: Vec<(usize, Rational)> = vec![(0, Rational::one())];
                for g in 0..degrees.len() {
                    let red = &reductions[g][ea[g] + eb[g]];
                    let mut next = Vec::new();
                    for (idx, c) in &terms {
                        for (k, rc) in red.iter().enumerate() {
                            if !rc.is_zero() {
                                next.push((idx + k * strides[g], c * rc));
                            }
                        }
                    }
                    terms = next;
                }
                mul_table[a][b] = terms.clone();
                mul_table[b][a] = terms;
            }
        }
        let table_den = mul_table
            .iter()
            .flatten()
            .flatten()
            .fold(BigInt::one(), |acc, (_, c)| num_integer::lcm(acc, c.denom().clone()));
        let int_table = mul_table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|terms| terms.iter().map(|(k, c)| (*k, (c * &table_den).to_integer())).collect())
                    .collect()
            })
            .collect();
        let conj_negates = (0..dim)
            .map(|idx| {
                let e = exps(idx);
                let odd: usize = generators
                    .iter()
                    .zip(&e)
                    .filter(|(g, _)| g.conj == ConjKind::ImaginaryNegation)
                    .map(|(_, k)| *k)
                    .sum();
                odd % 2 == 1
            })
            .collect();
        let roots = generators.iter().map(|g| Mutex::new(g.isolating_interval())).collect();
        Ok(Arc::new(NumberField {
            generators,
            degrees,
            strides,
            dim,
            mul_table,
            int_table,
            table_den,
            conj_negates,
            independence_declared,
            roots,
        }))
    }

    /// The field Q(i).
    pub fn gaussian() -> Arc<Self> {
        NumberField::new(Vec::new(), true).expect("Q(i) is valid")
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn independence_declared(&self) -> bool {
        self.independence_declared
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Exponent vector of a monomial-basis index.
    pub fn exponents(&self, idx: usize) -> Vec<usize> {
        self.degrees.iter().zip(&self.strides).map(|(d, s)| (idx / s) % d).collect()
    }

    pub fn monomial_index(&self, exps: &[usize]) -> usize {
        exps.iter().zip(&self.strides).map(|(e, s)| e * s).sum()
    }

    pub fn monomial_name(&self, idx: usize) -> String {
        let parts: Vec<String> = self
            .exponents(idx)
            .iter()
            .zip(&self.generators)
            .filter(|(e, _)| **e > 0)
            .map(|(e, g)| if *e == 1 { g.name.clone() } else { format!("{}^{}", g.name, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// True when the monomial's value is purely imaginary.
    pub fn monomial_is_imaginary(&self, idx: usize) -> bool {
        self.conj_negates[idx]
    }

    pub fn same_as(&self, other: &NumberField) -> bool {
        std::ptr::eq(self, other)
            || self.generators.len() == other.generators.len()
                && self.generators.iter().zip(&other.generators).all(|(a, b)| {
                    a.name == b.name && a.min_poly == b.min_poly && a.conj == b.conj
                })
    }

    /// A new field with one more generator; elements of `self` lift into it
    /// with [`FieldElement::lift_to`].
    pub fn adjoin(&self, generator: GeneratorSpec) -> Result<Arc<NumberField>> {
        let mut gens = self.generators.clone();
        gens.push(generator);
        NumberField::new(gens, self.independence_declared)
    }

    /// Enclosure of generator `g` with width at most 2^-bits.
    fn root_enclosure(&self, g: usize, bits: u32) -> Result<RealInterval> {
        let spec = &self.generators[g];
        let mut cached = self.roots[g].lock().unwrap_or_else(|e| e.into_inner());
        let target = Rational::new(BigInt::one(), BigInt::one() << bits);
        if cached.width() <= target {
            return Ok(cached.clone());
        }
        let refined = refine_root(&spec.isolating_poly(), cached.clone(), bits).map_err(|_| {
            Error::PrecisionExhausted(format!("root of `{}` did not refine to {bits} bits", spec.name))
        })?;
        *cached = refined.clone();
        Ok(refined)
    }

    /// Enclosures of all monomial values at the given working precision.
    fn monomial_boxes(&self, bits: u32) -> Result<Vec<ComplexBox>> {
        let max_deg = *self.degrees.iter().max().unwrap_or(&1) as u32;
        let inner = bits + 8 + 4 * max_deg;
        let mut powers: Vec<Vec<ComplexBox>> = Vec::with_capacity(self.generators.len());
        for (g, spec) in self.generators.iter().enumerate() {
            let iv = self.root_enclosure(g, inner)?;
            let base = match spec.conj {
                ConjKind::Real => ComplexBox::real(iv),
                ConjKind::ImaginaryNegation => ComplexBox::imaginary(iv),
            };
            let mut ps = vec![ComplexBox::real(RealInterval::point(Rational::one()))];
            for k in 1..self.degrees[g] {
                let next = ps[k - 1].mul(&base).round_out(inner + 4);
                ps.push(next);
            }
            powers.push(ps);
        }
        Ok((0..self.dim)
            .map(|idx| {
                self.exponents(idx)
                    .iter()
                    .enumerate()
                    .fold(ComplexBox::real(RealInterval::point(Rational::one())), |acc, (g, &e)| {
                        acc.mul(&powers[g][e]).round_out(inner + 4)
                    })
            })
            .collect())
    }

    /// Numeric screen for integer relations among the monomial basis: for
    /// every real-valued and every imaginary-valued class of monomials,
    /// search coefficient vectors of height <= `height`. Returns the first
    /// relation whose value encloses zero at 2^-128 width.
    pub fn screen_independence(self: &Arc<Self>, height: i64) -> Result<Option<Vec<i64>>> {
        for imaginary in [false, true] {
            let idxs: Vec<usize> = (0..self.dim).filter(|&k| self.conj_negates[k] == imaginary).collect();
            let values: Vec<FieldElement> = idxs
                .iter()
                .map(|&k| {
                    let m = FieldElement::basis(self, k);
                    if imaginary {
                        m.imag_part()
                    } else {
                        m
                    }
                })
                .collect();
            if let Some(rel) = screen_relations(&values, height)? {
                let mut full = vec![0i64; self.dim];
                for (k, c) in idxs.iter().zip(rel) {
                    full[*k] = c;
                }
                return Ok(Some(full));
            }
        }
        Ok(None)
    }
}

/// x^k reduced modulo the minimal polynomial, for k = 0 ..= 2(deg-1).
fn power_reductions(g: &GeneratorSpec) -> Vec<Vec<Rational>> {
    let n = g.degree();
    let mut out = Vec::with_capacity(2 * n - 1);
    let mut cur = vec![Rational::zero(); n];
    cur[0] = Rational::one();
    out.push(cur.clone());
    for _ in 1..(2 * n - 1) {
        let top = cur[n - 1].clone();
        let mut next = vec![Rational::zero(); n];
        for k in (1..n).rev() {
            next[k] = cur[k - 1].clone();
        }
        for (k, slot) in next.iter_mut().enumerate() {
            *slot -= &top * &g.min_poly[k];
        }
        cur = next;
        out.push(cur.clone());
    }
    out
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Approximate log2 of a positive rational, rounded down.
fn log2_floor(x: &Rational) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64 - 1
}

/// Refines an isolating interval of a simple real root of `f` to width at
/// most 2^-bits. Newton steps from the midpoint are accepted only when a
/// sign change certifies the shrunken interval; otherwise the interval is
/// bisected.
pub(crate) fn refine_root(f: &Poly, start: RealInterval, bits: u32) -> std::result::Result<RealInterval, ()> {
    let df = f.derivative();
    let (mut lo, mut hi) = (start.lo, start.hi);
    if f.eval(&hi).is_zero() {
        return Ok(RealInterval::point(hi));
    }
    let s_lo = sign(&f.eval(&lo));
    if s_lo == 0 {
        return Ok(RealInterval::point(lo));
    }
    let target = Rational::new(BigInt::one(), BigInt::one() << bits);
    let cap = 4 * bits as usize + 256;
    for _ in 0..cap {
        let width = &hi - &lo;
        if width <= target {
            return Ok(RealInterval::new(lo, hi));
        }
        let grid = (-log2_floor(&width)).max(0) as u32 + 3;
        let mid = crate::rational::floor_dyadic(&((&lo + &hi) / rat(2)), grid);
        let mid = if mid <= lo { (&lo + &hi) / rat(2) } else { mid };
        let fm = f.eval(&mid);
        if fm.is_zero() {
            return Ok(RealInterval::point(mid));
        }
        let dm = df.eval(&mid);
        if !dm.is_zero() {
            let x = &mid - &fm / &dm;
            // shrink to roughly width^2, never below the target
            let w_exp = (2 * log2_floor(&width) + 4).max(-(bits as i64) - 2).min(-1);
            let w = Rational::new(BigInt::one(), BigInt::one() << (-w_exp) as u32);
            let x = crate::rational::floor_dyadic(&x, (-w_exp) as u32 + 4);
            let (a, b) = (&x - &w, &x + &w);
            if a > lo && b < hi {
                let (sa, sb) = (sign(&f.eval(&a)), sign(&f.eval(&b)));
                if sa == 0 {
                    return Ok(RealInterval::point(a));
                }
                if sb == 0 {
                    return Ok(RealInterval::point(b));
                }
                if sa != sb {
                    lo = a;
                    hi = b;
                    continue;
                }
            }
        }
        if sign(&fm) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(())
}

/// Exact element of a [`NumberField`]: one rational coefficient per monomial.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<Rational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    if !a.field.same_as(&b.field) {
        return Err(Error::FieldMismatch);
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.div(b)?,
    })
}

impl FieldElement {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        FieldElement { field: field.clone(), coeffs: vec![Rational::zero(); field.dim] }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, q: Rational) -> Self {
        let mut e = Self::zero(field);
        e.coeffs[0] = q;
        e
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, rat(n))
    }

    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<Rational>) -> Self {
        assert_eq!(coeffs.len(), field.dim, "coefficient vector has wrong length");
        FieldElement { field: field.clone(), coeffs }
    }

    /// The monomial-basis element with the given index.
    pub fn basis(field: &Arc<NumberField>, idx: usize) -> Self {
        let mut e = Self::zero(field);
        e.coeffs[idx] = Rational::one();
        e
    }

    pub fn generator(field: &Arc<NumberField>, name: &str) -> Result<Self> {
        let g = field
            .generator_index(name)
            .ok_or_else(|| Error::Validation(format!("unknown generator `{name}`")))?;
        let mut exps = vec![0; field.generators.len()];
        exps[g] = 1;
        Ok(Self::basis(field, field.monomial_index(&exps)))
    }

    pub fn i(field: &Arc<NumberField>) -> Self {
        Self::generator(field, "i").expect("every field contains i")
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| self.coeffs[0].clone())
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(&self.field), |acc, _| &acc * self)
    }

    pub fn conj(&self) -> Self {
        FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&self.field.conj_negates)
                .map(|(c, &neg)| if neg { -c } else { c.clone() })
                .collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().zip(&self.field.conj_negates).all(|(c, &neg)| !neg || c.is_zero())
    }

    /// (x + conj x) / 2
    pub fn real_part(&self) -> Self {
        FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&self.field.conj_negates)
                .map(|(c, &neg)| if neg { Rational::zero() } else { c.clone() })
                .collect(),
        }
    }

    /// (x - conj x) / 2i
    pub fn imag_part(&self) -> Self {
        let odd = FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&self.field.conj_negates)
                .map(|(c, &neg)| if neg { c.clone() } else { Rational::zero() })
                .collect(),
        };
        -(&odd * &Self::i(&self.field))
    }

    /// Matrix of multiplication by `self` on the monomial basis (columns are
    /// images of basis elements).
    fn mul_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.field.dim;
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for b in 0..n {
                for (k, c) in &self.field.mul_table[a][b] {
                    m[*k][b] += ca * c;
                }
            }
        }
        m
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(&self.field, q.recip()));
        }
        let mut rhs = vec![Rational::zero(); self.field.dim];
        rhs[0] = Rational::one();
        let x = linalg::solve(&self.mul_matrix(), &rhs).ok_or(Error::NotInvertible)?;
        Ok(FieldElement { field: self.field.clone(), coeffs: x })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Re-expresses the element in a field whose generators include all of
    /// this field's generators (matched by name and minimal polynomial).
    pub fn lift_to(&self, target: &Arc<NumberField>) -> Result<Self> {
        if self.field.same_as(target) {
            return Ok(FieldElement { field: target.clone(), coeffs: self.coeffs.clone() });
        }
        let mut map = Vec::with_capacity(self.field.generators.len());
        for g in &self.field.generators {
            let k = target.generator_index(&g.name).ok_or(Error::FieldMismatch)?;
            if target.generators[k].min_poly != g.min_poly || target.generators[k].conj != g.conj {
                return Err(Error::FieldMismatch);
            }
            map.push(k);
        }
        let mut out = Self::zero(target);
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut exps = vec![0; target.generators.len()];
            for (g, e) in self.field.exponents(idx).into_iter().enumerate() {
                exps[map[g]] = e;
            }
            out.coeffs[target.monomial_index(&exps)] += c;
        }
        Ok(out)
    }

    /// Sound enclosure of the complex value under the declared root choices.
    pub fn embed(&self, precision_bits: u32) -> Result<ComplexBox> {
        if precision_bits < 8 {
            return Err(Error::Validation("precision_bits must be at least 8".into()));
        }
        let height = self
            .coeffs
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0) as u32;
        let work = precision_bits + 8 + height + (self.field.dim as u32).ilog2() + 1;
        let mons = self.field.monomial_boxes(work)?;
        let mut acc = ComplexBox::zero();
        for (c, m) in self.coeffs.iter().zip(&mons) {
            if !c.is_zero() {
                acc = acc.add(&m.scale(c));
            }
        }
        Ok(acc.round_out(precision_bits + 4))
    }

    /// Midpoint of a 64-bit enclosure.
    pub fn approx(&self) -> (f64, f64) {
        self.embed(64).map(|b| b.midpoint_f64()).unwrap_or((f64::NAN, f64::NAN))
    }

    /// Exact sign of a real element: zero is decided on coefficients,
    /// nonzero signs by refining the embedding until it excludes zero.
    pub fn exact_sign(&self) -> Result<i8> {
        self.exact_sign_with(SIGN_START_BITS, MAX_DOUBLINGS)
    }

    pub fn exact_sign_with(&self, start_bits: u32, doublings: u32) -> Result<i8> {
        if !self.is_real() {
            return Err(Error::NotReal(self.to_string()));
        }
        if self.is_zero() {
            return Ok(0);
        }
        if let Some(q) = self.as_rational() {
            return Ok(sign(&q));
        }
        let mut bits = start_bits.max(8);
        for _ in 0..=doublings {
            let b = self.embed(bits)?;
            if b.re.lo.is_positive() {
                return Ok(1);
            }
            if b.re.hi.is_negative() {
                return Ok(-1);
            }
            bits = bits.saturating_mul(2);
        }
        Err(Error::PrecisionExhausted(format!("sign of {self} undecided after {doublings} doublings")))
    }

    /// Squares of the coefficient vector exceeding this many bits make the
    /// formatted output unwieldy; used by callers that print summaries.
    pub fn height_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0)
    }
}

/// Searches integer vectors of height <= `height` for a relation among real
/// field elements whose value encloses zero at 2^-128 width
/// (meet-in-the-middle on 64-bit approximations, then exact enclosure).
pub fn screen_relations(values: &[FieldElement], height: i64) -> Result<Option<Vec<i64>>> {
    let n = values.len();
    if n == 0 {
        return Ok(None);
    }
    let approx: Vec<f64> = values
        .iter()
        .map(|v| v.embed(96).map(|b| b.re.midpoint_f64()))
        .collect::<Result<_>>()?;
    let scale: f64 = approx.iter().map(|v| v.abs()).sum::<f64>().max(1.0) * height as f64;
    let tol = 1e-9 * scale;
    let half = n / 2;
    let combos = |lo: usize, hi: usize| -> Vec<(f64, Vec<i64>)> {
        let mut out = vec![(0.0, Vec::new())];
        for k in lo..hi {
            let mut next = Vec::with_capacity(out.len() * (2 * height as usize + 1));
            for (s, c) in &out {
                for a in -height..=height {
                    let mut c2 = c.clone();
                    c2.push(a);
                    next.push((s + a as f64 * approx[k], c2));
                }
            }
            out = next;
        }
        out
    };
    let mut left = combos(0, half);
    left.sort_by(|a, b| a.0.total_cmp(&b.0));
    let right = combos(half, n);
    let keys: Vec<f64> = left.iter().map(|x| x.0).collect();
    let mut best: Option<Vec<i64>> = None;
    for (sr, cr) in &right {
        let start = keys.partition_point(|&v| v < -sr - tol);
        for (_, cl) in left[start..].iter().take_while(|(v, _)| *v <= -sr + tol) {
            let rel: Vec<i64> = cl.iter().chain(cr).copied().collect();
            if rel.iter().all(|&c| c == 0) {
                continue;
            }
            let mut acc = FieldElement::zero(values[0].field());
            for (c, v) in rel.iter().zip(values) {
                if *c != 0 {
                    acc = &acc + &v.scale(&rat(*c));
                }
            }
            if acc.is_zero() || acc.embed(128)?.contains_zero() {
                // prefer the lexicographically smallest relation for reproducibility
                if best.as_ref().is_none_or(|b| rel < *b) {
                    best = Some(rel);
                }
            }
        }
    }
    Ok(best)
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = self.field.monomial_name(idx);
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono == "1" {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn check_same(a: &FieldElement, b: &FieldElement) {
    assert!(a.field.same_as(&b.field), "field mismatch: {:?} vs {:?}", a.field, b.field);
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        check_same(self, rhs);
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        check_same(self, rhs);
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        check_same(self, rhs);
        let field = &self.field;
        let (na, da) = integer_coeffs(&self.coeffs);
        let (nb, db) = integer_coeffs(&rhs.coeffs);
        let mut out = vec![BigInt::zero(); field.dim];
        for (a, ca) in na.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in nb.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let cab = ca * cb;
                for (k, c) in &field.int_table[a][b] {
                    out[*k] += &cab * c;
                }
            }
        }
        let den = da * db * &field.table_den;
        let coeffs = out.into_iter().map(|x| Rational::new(x, den.clone())).collect();
        FieldElement { field: field.clone(), coeffs }
    }
}

/// Numerators over the lcm of the denominators.
fn integer_coeffs(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let nums = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    (nums, den)
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Square root of the integer `d` inside the field when it is a rational
/// multiple of a single monomial: the positive root for d > 0, the root with
/// positive imaginary part for d < 0.
pub fn find_sqrt(field: &Arc<NumberField>, d: i64) -> Result<Option<FieldElement>> {
    let target = rat(d);
    for idx in 0..field.dim() {
        let mu = FieldElement::basis(field, idx);
        let Some(sq) = (&mu * &mu).as_rational() else { continue };
        if sq.is_zero() {
            continue;
        }
        let ratio = &target / &sq;
        if !crate::rational::rational_is_square(&ratio) {
            continue;
        }
        let s = Rational::new(
            crate::rational::exact_sqrt(ratio.numer()).unwrap(),
            crate::rational::exact_sqrt(ratio.denom()).unwrap(),
        );
        let cand = mu.scale(&s);
        let sgn = if d > 0 {
            if !cand.is_real() {
                continue;
            }
            cand.exact_sign()?
        } else {
            if cand.real_part().is_zero() {
                cand.imag_part().exact_sign()?
            } else {
                continue;
            }
        };
        return Ok(Some(if sgn < 0 { -cand } else { cand }));
    }
    Ok(None)
}

/// Field element from a sparse map of exponent vectors, for builders.
pub fn element_from_terms(field: &Arc<NumberField>, terms: &BTreeMap<Vec<usize>, Rational>) -> FieldElement {
    let mut e = FieldElement::zero(field);
    for (exps, c) in terms {
        e.coeffs[field.monomial_index(exps)] += c;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q_i_sqrt2() -> Arc<NumberField> {
        NumberField::new(vec![GeneratorSpec::sqrt("s", 2).unwrap()], true).unwrap()
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let f = q_i_sqrt2();
        let s = FieldElement::generator(&f, "s").unwrap();
        assert_eq!(&s * &s, FieldElement::from_int(&f, 2));
    }

    #[test]
    fn i_times_sqrt_minus_two_squares_to_two() {
        let f = NumberField::new(vec![GeneratorSpec::sqrt("t", -2).unwrap()], true).unwrap();
        let i = FieldElement::i(&f);
        let t = FieldElement::generator(&f, "t").unwrap();
        let it = &i * &t;
        // the product is the single monomial i*t
        assert_eq!(f.monomial_name(it.coeffs.iter().position(|c| !c.is_zero()).unwrap()), "i*t");
        assert_eq!(&it * &it, FieldElement::from_int(&f, 2));
        // oracle: embed both factors and the product, check the product box
        // overlaps the product of the boxes
        let lhs = it.embed(50).unwrap();
        let rhs = i.embed(50).unwrap().mul(&t.embed(50).unwrap());
        assert!(lhs.re.lo <= rhs.re.hi && rhs.re.lo <= lhs.re.hi);
        assert!(lhs.im.lo <= rhs.im.hi && rhs.im.lo <= lhs.im.hi);
    }

    #[test]
    fn division_by_self_is_one_and_zero_fails() {
        let f = q_i_sqrt2();
        let x = &FieldElement::one(&f) + &FieldElement::i(&f);
        assert!(x.div(&x).unwrap().is_one());
        assert_eq!(x.div(&FieldElement::zero(&f)), Err(Error::DivisionByZero));
    }

    #[test]
    fn conjugation_examples() {
        let f = q_i_sqrt2();
        let i = FieldElement::i(&f);
        let s = FieldElement::generator(&f, "s").unwrap();
        assert_eq!(i.conj(), -&i);
        assert_eq!(s.conj(), s);
        let x = &FieldElement::one(&f) + &(&i * &s);
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn embed_examples() {
        let f = NumberField::new(vec![GeneratorSpec::cube_root("r", 2).unwrap()], true).unwrap();
        let half = FieldElement::from_rational(&f, frac(1, 2));
        let b = half.embed(16).unwrap();
        assert!(b.re.contains(&frac(1, 2)) && b.im.contains_zero());
        let r = FieldElement::generator(&f, "r").unwrap();
        let b = r.embed(64).unwrap();
        // 1.2599210498948731647672106072782283505702514647015...
        let cbrt2 = crate::rational::parse_rational(
            "12599210498948731647672106072782283505702514647015/10000000000000000000000000000000000000000000000000",
        )
        .unwrap();
        let tol = Rational::new(BigInt::one(), BigInt::one() << 60u32);
        assert!(&b.re.lo - &tol <= cbrt2 && cbrt2 <= &b.re.hi + &tol);
        assert!(b.re.width() < tol);
        let i = FieldElement::i(&f);
        let m1 = (&i * &i).embed(16).unwrap();
        assert_eq!(m1.re, RealInterval::point(rat(-1)));
    }

    #[test]
    fn sign_examples() {
        let f = q_i_sqrt2();
        let s = FieldElement::generator(&f, "s").unwrap();
        let one = FieldElement::one(&f);
        assert_eq!(FieldElement::zero(&f).exact_sign().unwrap(), 0);
        assert_eq!((&s - &one).exact_sign().unwrap(), 1);
        assert_eq!((&one - &s).exact_sign().unwrap(), -1);
        assert!(matches!(FieldElement::i(&f).exact_sign(), Err(Error::NotReal(_))));
    }

    #[test]
    fn dependent_basis_exhausts_sign_budget() {
        // x^2 - 1 with root 1: the declared basis {1, r} is dependent, so
        // r - 1 is zero numerically but not coefficient-wise.
        let g = GeneratorSpec::new(
            "r",
            vec![rat(-1), rat(0), rat(1)],
            ComplexBox::from_bounds(frac(1, 2), frac(3, 2), rat(0), rat(0)),
            ConjKind::Real,
        );
        let f = NumberField::new(vec![g], true).unwrap();
        let r = FieldElement::generator(&f, "r").unwrap();
        let x = &r - &FieldElement::one(&f);
        assert!(matches!(x.exact_sign_with(16, 3), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn rejects_bad_generators() {
        let not_monic = GeneratorSpec::new(
            "r",
            vec![rat(-2), rat(0), rat(2)],
            ComplexBox::from_bounds(rat(0), rat(2), rat(0), rat(0)),
            ConjKind::Real,
        );
        assert!(NumberField::new(vec![not_monic], true).is_err());
        let two_roots = GeneratorSpec::new(
            "r",
            vec![rat(-2), rat(0), rat(1)],
            ComplexBox::from_bounds(rat(-2), rat(2), rat(0), rat(0)),
            ConjKind::Real,
        );
        assert!(NumberField::new(vec![two_roots], true).is_err());
        let odd_imag = GeneratorSpec::new(
            "t",
            vec![rat(1), rat(1), rat(1)],
            ComplexBox::from_bounds(rat(0), rat(0), rat(0), rat(1)),
            ConjKind::ImaginaryNegation,
        );
        assert!(NumberField::new(vec![odd_imag], true).is_err());
    }

    #[test]
    fn lifting_preserves_values() {
        let f = q_i_sqrt2();
        let g = f.adjoin(GeneratorSpec::sqrt("u", 3).unwrap()).unwrap();
        let s = FieldElement::generator(&f, "s").unwrap();
        let x = &s + &FieldElement::i(&f);
        let y = x.lift_to(&g).unwrap();
        assert_eq!(&y * &y, (&x * &x).lift_to(&g).unwrap());
        assert_eq!(find_sqrt(&g, 6).unwrap().unwrap().to_string(), "s*u");
        assert_eq!(find_sqrt(&g, -3).unwrap().unwrap().to_string(), "i*u");
        assert!(find_sqrt(&g, 5).unwrap().is_none());
    }

    #[test]
    fn multiquadratic_basis_passes_screen() {
        let f = NumberField::new(
            vec![GeneratorSpec::sqrt("a", 2).unwrap(), GeneratorSpec::sqrt("b", 3).unwrap()],
            true,
        )
        .unwrap();
        assert_eq!(f.screen_independence(10).unwrap(), None);
    }

    fn arb_element(f: Arc<NumberField>) -> impl Strategy<Value = FieldElement> {
        proptest::collection::vec((-6i64..=6, 1i64..=4), f.dim()).prop_map(move |cs| {
            FieldElement::from_coeffs(&f, cs.into_iter().map(|(n, d)| frac(n, d)).collect())
        })
    }

    fn boxes_overlap(a: &ComplexBox, b: &ComplexBox) -> bool {
        a.re.lo <= b.re.hi && b.re.lo <= a.re.hi && a.im.lo <= b.im.hi && b.im.lo <= a.im.hi
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn conjugation_is_a_ring_automorphism(
            (a, b) in {
                let f = q_i_sqrt2();
                (arb_element(f.clone()), arb_element(f))
            }
        ) {
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        }

        #[test]
        fn embedding_respects_arithmetic(
            (a, b) in {
                let f = NumberField::new(vec![GeneratorSpec::cube_root("r", 3).unwrap()], true).unwrap();
                (arb_element(f.clone()), arb_element(f))
            }
        ) {
            let (ea, eb) = (a.embed(40).unwrap(), b.embed(40).unwrap());
            prop_assert!(boxes_overlap(&(&a * &b).embed(40).unwrap(), &ea.mul(&eb)));
            prop_assert!(boxes_overlap(&(&a + &b).embed(40).unwrap(), &ea.add(&eb)));
        }

        #[test]
        fn sign_zero_iff_coefficients_zero(a in arb_element(q_i_sqrt2())) {
            let re = a.real_part();
            prop_assert_eq!(re.exact_sign().unwrap() == 0, re.is_zero());
        }
    }
}
