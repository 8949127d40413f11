//! Interval arithmetic with rational endpoints. Every operation returns a
//! sound enclosure; `round_out` coarsens endpoints to a dyadic grid so that
//! repeated products do not grow without bound.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{ceil_dyadic, floor_dyadic, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RealInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        RealInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        RealInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (to_f64(&self.lo) + to_f64(&self.hi))
    }

    pub fn add(&self, o: &RealInterval) -> RealInterval {
        RealInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn neg(&self) -> RealInterval {
        RealInterval::new(-&self.hi, -&self.lo)
    }

    pub fn sub(&self, o: &RealInterval) -> RealInterval {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> RealInterval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            RealInterval::new(b, a)
        } else {
            RealInterval::new(a, b)
        }
    }

    pub fn mul(&self, o: &RealInterval) -> RealInterval {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        RealInterval::new(lo, hi)
    }

    pub fn round_out(&self, bits: u32) -> RealInterval {
        RealInterval::new(floor_dyadic(&self.lo, bits), ceil_dyadic(&self.hi, bits))
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexBox {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexBox {
    pub fn new(re: RealInterval, im: RealInterval) -> Self {
        ComplexBox { re, im }
    }

    pub fn from_bounds(re_lo: Rational, re_hi: Rational, im_lo: Rational, im_hi: Rational) -> Self {
        ComplexBox::new(RealInterval::new(re_lo, re_hi), RealInterval::new(im_lo, im_hi))
    }

    pub fn real(x: RealInterval) -> Self {
        ComplexBox::new(x, RealInterval::zero())
    }

    pub fn imaginary(y: RealInterval) -> Self {
        ComplexBox::new(RealInterval::zero(), y)
    }

    pub fn zero() -> Self {
        ComplexBox::new(RealInterval::zero(), RealInterval::zero())
    }

    pub fn add(&self, o: &ComplexBox) -> ComplexBox {
        ComplexBox::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &ComplexBox) -> ComplexBox {
        ComplexBox::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &ComplexBox) -> ComplexBox {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        ComplexBox::new(re, im)
    }

    pub fn scale(&self, c: &Rational) -> ComplexBox {
        ComplexBox::new(self.re.scale(c), self.im.scale(c))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Larger of the two side lengths.
    pub fn width(&self) -> Rational {
        let (a, b) = (self.re.width(), self.im.width());
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn round_out(&self, bits: u32) -> ComplexBox {
        ComplexBox::new(self.re.round_out(bits), self.im.round_out(bits))
    }

    pub fn midpoint_f64(&self) -> (f64, f64) {
        (self.re.midpoint_f64(), self.im.midpoint_f64())
    }
}

impl fmt::Display for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.midpoint_f64();
        write!(f, "{re:.12e} + {im:.12e}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};
    use proptest::prelude::*;

    fn iv(a: i64, b: i64) -> RealInterval {
        RealInterval::new(rat(a.min(b)), rat(a.max(b)))
    }

    proptest! {
        #[test]
        fn product_encloses_pointwise_products(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, s in 0i64..=8, t in 0i64..=8) {
            let x = iv(a, b);
            let y = iv(c, d);
            let px = &x.lo + (&x.width() * frac(s, 8));
            let py = &y.lo + (&y.width() * frac(t, 8));
            prop_assert!(x.mul(&y).contains(&(&px * &py)));
            prop_assert!(x.add(&y).contains(&(&px + &py)));
        }
    }

    #[test]
    fn complex_product_of_i_with_i() {
        let i = ComplexBox::imaginary(RealInterval::point(rat(1)));
        let p = i.mul(&i);
        assert_eq!(p.re, RealInterval::point(rat(-1)));
        assert!(p.im.contains_zero());
    }

    #[test]
    fn round_out_is_outward() {
        let x = RealInterval::new(frac(1, 3), frac(2, 3));
        let r = x.round_out(4);
        assert!(r.lo <= x.lo && r.hi >= x.hi);
    }
}
