//! Rational numbers and small integer helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big_rat(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Parses `p`, `-p` or `p/q` with decimal integers. Anything else is rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let body = t.strip_prefix('-').unwrap_or(t);
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Largest multiple of 2^-bits that is <= x.
pub fn floor_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = (x * big_rat(&scale)).floor().to_integer();
    Rational::new(scaled, scale)
}

/// Smallest multiple of 2^-bits that is >= x.
pub fn ceil_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = (x * big_rat(&scale)).ceil().to_integer();
    Rational::new(scaled, scale)
}

pub fn to_f64(x: &Rational) -> f64 {
    // to_f64 on BigRational can overflow to NaN for huge parts; go through
    // a scaled integer quotient instead.
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Returns `Some(r)` with `r*r == n` when n is a perfect square (n >= 0).
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn is_perfect_square_i64(n: i64) -> bool {
    exact_sqrt(&BigInt::from(n)).is_some()
}

pub fn rational_is_square(x: &Rational) -> bool {
    !x.is_negative() && exact_sqrt(x.numer()).is_some() && exact_sqrt(x.denom()).is_some()
}

/// Trial-division bound used by [`squarefree_part`].
pub const SQUAREFREE_TRIAL_BOUND: u64 = 1_000_000;

/// Squarefree part of a nonzero integer, keeping its sign.
///
/// Primes up to [`SQUAREFREE_TRIAL_BOUND`] are removed exactly; the remaining
/// cofactor is only checked for being a perfect square. The flag is `false`
/// when the cofactor is larger than the bound squared and not a square, so a
/// hidden square factor may remain.
pub fn squarefree_part(n: &BigInt) -> (BigInt, bool) {
    assert!(!n.is_zero(), "squarefree part of zero");
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p: u64 = 2;
    while p <= SQUAREFREE_TRIAL_BOUND {
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0u32;
        while m.is_multiple_of(&bp) {
            m /= &bp;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let bound = BigInt::from(SQUAREFREE_TRIAL_BOUND);
    let complete = if m.is_one() {
        true
    } else if exact_sqrt(&m).is_some() {
        m = BigInt::one();
        true
    } else {
        // m has no prime factor <= p; it is prime (hence squarefree) when
        // below the square of the trial bound.
        m < &bound * &bound
    };
    (sign * out * m, complete)
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn best_rational(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let err_s = (ps as f64 / qs as f64 - x.abs()).abs();
            let err_c = (p1 as f64 / q1.max(1) as f64 - x.abs()).abs();
            if qs > 0 && err_s < err_c {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - v.floor();
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1.max(1)));
    if neg {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_literals() {
        assert_eq!(parse_rational("1/3"), Some(frac(1, 3)));
        assert_eq!(parse_rational("-4/6"), Some(frac(-2, 3)));
        assert_eq!(parse_rational("7"), Some(rat(7)));
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1e3"), None);
    }

    #[test]
    fn squarefree_parts() {
        let sf = |n: i64| squarefree_part(&BigInt::from(n)).0;
        assert_eq!(sf(72), BigInt::from(2));
        assert_eq!(sf(-9), BigInt::from(-1));
        assert_eq!(sf(45), BigInt::from(5));
        assert_eq!(sf(1), BigInt::from(1));
        assert_eq!(sf(1_000_003 * 4), BigInt::from(1_000_003));
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = frac(1, 3);
        let lo = floor_dyadic(&x, 10);
        let hi = ceil_dyadic(&x, 10);
        assert!(lo <= x && x <= hi);
        assert_eq!(&hi - &lo, frac(1, 1024));
    }

    #[test]
    fn best_rational_recovers_simple_fractions() {
        assert_eq!(best_rational(0.75, 10_000), frac(3, 4));
        assert_eq!(best_rational(-1.0 / 3.0, 10_000), frac(-1, 3));
        let pi = best_rational(std::f64::consts::PI, 1000);
        assert_eq!(pi, frac(355, 113));
    }
}
