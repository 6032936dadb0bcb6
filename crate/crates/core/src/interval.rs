//! Closed intervals with outward rounding.
//!
//! `Interval<T>` encloses a real number between two endpoints of scalar type
//! `T`. Every arithmetic operation rounds the lower endpoint down and the upper
//! endpoint up at the interval's working precision, so the true result of the
//! operation on any pair of enclosed reals stays enclosed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::{Dyadic, Rounding};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use Rounding::{Down, Up};

#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T: Scalar> {
    lo: T,
    hi: T,
    prec: u32,
}

impl<T: Scalar> Interval<T> {
    /// Panics if `lo > hi`.
    pub fn new(lo: T, hi: T, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo:?} > {hi:?}");
        Interval { lo, hi, prec }
    }

    pub fn point(v: T, prec: u32) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::point(T::from_i64(v), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Interval {
            lo: T::from_rational(q, prec, Down),
            hi: T::from_rational(q, prec, Up),
            prec,
        }
    }

    pub fn from_rational_bounds(lo: &BigRational, hi: &BigRational, prec: u32) -> Self {
        Interval::new(
            T::from_rational(lo, prec, Down),
            T::from_rational(hi, prec, Up),
            prec,
        )
    }

    pub fn from_dyadic_bounds(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Self {
        Interval::new(
            T::from_dyadic(lo, prec, Down),
            T::from_dyadic(hi, prec, Up),
            prec,
        )
    }

    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    /// Center of the interval, rounded to nearest-ish; the enclosure is what
    /// carries the guarantee.
    pub fn value(&self) -> T {
        let s = self.lo.add_r(&self.hi, self.prec + 1, Down);
        s.mul_r(&half::<T>(self.prec), self.prec + 1, Down)
    }

    /// Upper bound on the distance from [`value`](Self::value) to either end.
    pub fn radius(&self) -> T {
        let m = self.value();
        let a = self.hi.sub_r(&m, self.prec, Up);
        let b = m.sub_r(&self.lo, self.prec, Up);
        T::max_of(&a, &b)
    }

    pub fn width(&self) -> T {
        self.hi.sub_r(&self.lo, self.prec, Up)
    }

    pub fn contains(&self, v: &T) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        match (self.lo.to_rational(), self.hi.to_rational()) {
            (Some(lo), Some(hi)) => lo <= *q && *q <= hi,
            _ => false,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&T::zero())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > T::zero()
    }

    pub fn is_negative(&self) -> bool {
        self.hi < T::zero()
    }

    /// Every point of `self` is below every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_gt(&self, other: &Self) -> bool {
        other.certainly_lt(self)
    }

    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    pub fn hull(&self, other: &Self) -> Self {
        Interval {
            lo: T::min_of(&self.lo, &other.lo),
            hi: T::max_of(&self.hi, &other.hi),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = T::max_of(&self.lo, &other.lo);
        let hi = T::min_of(&self.hi, &other.hi);
        (lo <= hi).then(|| Interval {
            lo,
            hi,
            prec: self.prec.max(other.prec),
        })
    }

    fn prec_with(&self, other: &Self) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn add_i(&self, rhs: &Self) -> Self {
        let p = self.prec_with(rhs);
        Interval {
            lo: self.lo.add_r(&rhs.lo, p, Down),
            hi: self.hi.add_r(&rhs.hi, p, Up),
            prec: p,
        }
    }

    pub fn sub_i(&self, rhs: &Self) -> Self {
        let p = self.prec_with(rhs);
        Interval {
            lo: self.lo.sub_r(&rhs.hi, p, Down),
            hi: self.hi.sub_r(&rhs.lo, p, Up),
            prec: p,
        }
    }

    pub fn mul_i(&self, rhs: &Self) -> Self {
        let p = self.prec_with(rhs);
        let ends = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo = ends[0].0.mul_r(ends[0].1, p, Down);
        let mut hi = ends[0].0.mul_r(ends[0].1, p, Up);
        for (a, b) in &ends[1..] {
            lo = T::min_of(&lo, &a.mul_r(b, p, Down));
            hi = T::max_of(&hi, &b.mul_r(a, p, Up));
        }
        Interval { lo, hi, prec: p }
    }

    /// Fails if the divisor contains zero.
    pub fn div_i(&self, rhs: &Self) -> Result<Self> {
        if rhs.contains_zero() {
            return Err(Error::Domain("interval division by an interval containing 0".into()));
        }
        let p = self.prec_with(rhs);
        let ends = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo = ends[0].0.div_r(ends[0].1, p, Down);
        let mut hi = ends[0].0.div_r(ends[0].1, p, Up);
        for (a, b) in &ends[1..] {
            lo = T::min_of(&lo, &a.div_r(b, p, Down));
            hi = T::max_of(&hi, &a.div_r(b, p, Up));
        }
        Ok(Interval { lo, hi, prec: p })
    }

    pub fn recip(&self) -> Result<Self> {
        Interval::from_i64(1, self.prec).div_i(self)
    }

    /// Square root of the non-negative part; fails if the interval is
    /// entirely negative.
    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain("square root of a negative interval".into()));
        }
        let lo = if self.lo.lt_zero() {
            T::zero()
        } else {
            self.lo.sqrt_r(self.prec, Down)
        };
        Ok(Interval {
            lo,
            hi: self.hi.sqrt_r(self.prec, Up),
            prec: self.prec,
        })
    }

    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return Interval::from_i64(1, self.prec);
        }
        if n % 2 == 0 && self.contains_zero() {
            let a = self.lo.neg();
            let m = T::max_of(&a, &self.hi);
            let hi = Interval::point(m, self.prec).powi(n).hi;
            return Interval {
                lo: T::zero(),
                hi,
                prec: self.prec,
            };
        }
        // square and multiply; even powers of a sign-definite interval stay
        // sign-definite so mul_i is tight enough
        let mut base = self.clone();
        let mut acc = Interval::from_i64(1, self.prec);
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_i(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_i(&base);
            }
        }
        acc
    }

    pub fn neg_i(&self) -> Self {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.mul_i(&Interval::from_i64(k, self.prec))
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        self.value().to_f64()
    }

    pub fn radius_f64(&self) -> f64 {
        let r = self.radius().to_f64();
        // round the reported radius up so it still bounds the error
        if r > 0.0 {
            r.next_up()
        } else {
            r
        }
    }

    pub fn lo_rational(&self) -> Option<BigRational> {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> Option<BigRational> {
        self.hi.to_rational()
    }

    /// Re-express the enclosure with another endpoint type. Infinite
    /// endpoints become the widest values `U` can represent.
    pub fn convert<U: Scalar>(&self) -> Interval<U> {
        let huge = BigRational::from_integer(num_bigint::BigInt::one() << 4096);
        let lo = self.lo.to_rational().unwrap_or_else(|| -huge.clone());
        let hi = self.hi.to_rational().unwrap_or(huge);
        Interval {
            lo: U::from_rational(&lo, self.prec, Down),
            hi: U::from_rational(&hi, self.prec, Up),
            prec: self.prec,
        }
    }
}

fn half<T: Scalar>(prec: u32) -> T {
    T::one().div_r(&T::from_i64(2), prec, Down)
}

impl Interval<Dyadic> {
    /// Rational endpoints, always available for dyadic intervals.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        (self.lo.to_rational(), self.hi.to_rational())
    }

    /// Decimal rendering of the center with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.value().round(self.prec.max(64), Down).to_decimal(digits)
    }

    /// `floor` of every enclosed value when they all share one, else `None`.
    pub fn floor_if_decided(&self) -> Option<num_bigint::BigInt> {
        let a = self.lo.floor();
        (a == self.hi.floor()).then_some(a)
    }
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl<T: Scalar> Zero for Interval<T> {
    fn zero() -> Self {
        Interval::point(T::zero(), 64)
    }

    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl<T: Scalar> One for Interval<T> {
    fn one() -> Self {
        Interval::point(T::one(), 64)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl<T: Scalar> $tr<&Interval<T>> for &Interval<T> {
            type Output = Interval<T>;
            fn $m(self, rhs: &Interval<T>) -> Interval<T> {
                self.$imp(rhs)
            }
        }
        impl<T: Scalar> $tr for Interval<T> {
            type Output = Interval<T>;
            fn $m(self, rhs: Interval<T>) -> Interval<T> {
                self.$imp(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_i);
forward_binop!(Sub, sub, sub_i);
forward_binop!(Mul, mul, mul_i);

impl<T: Scalar> Neg for Interval<T> {
    type Output = Interval<T>;
    fn neg(self) -> Interval<T> {
        self.neg_i()
    }
}

impl<T: Scalar> Neg for &Interval<T> {
    type Output = Interval<T>;
    fn neg(self) -> Interval<T> {
        self.neg_i()
    }
}
