//! Dense univariate polynomials over Q, with Sturm sequences for real-root
//! counting and isolation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{big_rat, rat, Rational};

/// Coefficients in ascending order; no trailing zeros (the zero polynomial
/// is the empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + crate::rational::to_f64(c))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    let a = self.0.get(k).cloned().unwrap_or_else(Rational::zero);
                    let b = other.0.get(k).cloned().unwrap_or_else(Rational::zero);
                    a - b
                })
                .collect(),
        )
    }

    /// Quotient and remainder; panics on division by the zero polynomial.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Poly(Vec::new()), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = &rem[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.0.iter().enumerate() {
                rem[k - dd + j] -= &c * dc;
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => Poly(self.0.iter().map(|c| c / l).collect()),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Bound B with every complex root of modulus < B (Cauchy).
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().expect("root bound of zero polynomial").abs();
        let max = self.0[..self.0.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        max + Rational::one()
    }

    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval (lo, hi].
    pub fn count_real_roots(&self, lo: &Rational, hi: &Rational) -> usize {
        let seq = self.sturm_sequence();
        let v = |x: &Rational| sign_changes(seq.iter().map(|p| p.eval(x)));
        v(lo).saturating_sub(v(hi))
    }

    pub fn count_all_real_roots(&self) -> usize {
        let b = self.root_bound();
        self.count_real_roots(&-b.clone(), &b)
    }

    /// Disjoint intervals (lo, hi] each containing exactly one real root,
    /// refined until every width is below `width`.
    pub fn isolate_real_roots(&self, width: &Rational) -> Vec<(Rational, Rational)> {
        let seq = self.sturm_sequence();
        let v = |x: &Rational| sign_changes(seq.iter().map(|p| p.eval(x)));
        let b = self.root_bound();
        let mut stack = vec![(-b.clone(), b)];
        let mut out = Vec::new();
        while let Some((lo, hi)) = stack.pop() {
            let n = v(&lo).saturating_sub(v(&hi));
            if n == 0 {
                continue;
            }
            if n == 1 && &hi - &lo < *width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / rat(2);
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        out.sort();
        out
    }

    /// All integer roots, found exactly.
    pub fn integer_roots(&self) -> Vec<BigInt> {
        let mut roots = Vec::new();
        for (lo, hi) in self.isolate_real_roots(&Rational::one()) {
            for cand in [lo.ceil().to_integer(), hi.floor().to_integer()] {
                let c = big_rat(&cand);
                if c > lo && c <= hi && self.eval(&c).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
        roots.sort();
        roots
    }
}

fn sign_changes(values: impl Iterator<Item = Rational>) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for v in values {
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Characteristic polynomial det(xI - M) of a square rational matrix
/// (Faddeev-LeVerrier).
pub fn char_poly(m: &[Vec<Rational>]) -> Poly {
    let n = m.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = M * (M_{k-1} + c_{n-k+1} I)
        let mut prev = mk.clone();
        for (i, row) in prev.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(Rational::zero(), |acc, l| acc + &m[i][l] * &prev[l][j]))
                    .collect()
            })
            .collect();
        let tr = (0..n).fold(Rational::zero(), |acc, i| acc + &mk[i][i]);
        coeffs[n - k] = -tr / rat(k as i64);
    }
    Poly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn sturm_counts_roots() {
        // (x-1)(x-2)(x+3)
        let p = Poly::from_i64(&[6, -7, 0, 1]);
        assert_eq!(p.count_all_real_roots(), 3);
        assert_eq!(p.count_real_roots(&rat(0), &rat(3)), 2);
        assert_eq!(p.integer_roots(), vec![BigInt::from(-3), BigInt::from(1), BigInt::from(2)]);
        let q = Poly::from_i64(&[1, 0, 1]);
        assert_eq!(q.count_all_real_roots(), 0);
        let cubic = Poly::from_i64(&[-2, 0, 0, 1]);
        assert_eq!(cubic.count_real_roots(&frac(5, 4), &frac(63, 50)), 1);
    }

    #[test]
    fn char_poly_of_companion() {
        // rotation by 90 degrees: x^2 + 1
        let m = vec![vec![rat(0), rat(-1)], vec![rat(1), rat(0)]];
        assert_eq!(char_poly(&m), Poly::from_i64(&[1, 0, 1]));
        let m3 = vec![
            vec![rat(2), rat(0), rat(0)],
            vec![rat(1), rat(3), rat(0)],
            vec![rat(4), rat(5), rat(-1)],
        ];
        assert_eq!(char_poly(&m3), Poly::from_i64(&[6, 1, -4, 1]));
    }

    #[test]
    fn gcd_detects_repeated_roots() {
        let p = Poly::from_i64(&[1, -2, 1]);
        assert!(!p.is_squarefree());
        assert!(Poly::from_i64(&[-2, 0, 1]).is_squarefree());
    }
}
