//! Scalar types usable as interval endpoints.
//!
//! Every operation takes a working precision and a rounding direction. Hardware
//! floats ignore the precision and use error-free transformations to round
//! outward by one ulp only when the nearest result was inexact. Rationals are
//! exact and ignore both arguments.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dyadic::{Dyadic, Rounding};

pub trait Scalar: Clone + Debug + PartialOrd + Zero + One + Send + Sync + 'static {
    /// Mantissa bits carried natively, `None` when the type is unbounded.
    const NATIVE_BITS: Option<u32>;

    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &BigRational, prec: u32, r: Rounding) -> Self;
    fn from_dyadic(d: &Dyadic, prec: u32, r: Rounding) -> Self;
    fn add_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self;
    fn sub_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self;
    fn mul_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self;
    fn div_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self;
    fn sqrt_r(&self, prec: u32, r: Rounding) -> Self;
    fn neg(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value, when finite.
    fn to_rational(&self) -> Option<BigRational>;

    /// `⌊self⌋`, `None` when not finite.
    fn floor_int(&self) -> Option<BigInt> {
        self.to_rational().map(|q| q.floor().to_integer())
    }

    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

trait HardwareAdjust: Sized {
    fn adjust(v: Self, err: Self, r: Rounding) -> Self;
    fn from_dyadic_checked(v: Self, d: &Dyadic, r: Rounding) -> Self;
}

macro_rules! impl_hardware_float {
    ($t:ty, $bits:expr) => {
        impl HardwareAdjust for $t {
            fn adjust(v: Self, err: Self, r: Rounding) -> Self {
                if err.is_nan() || !v.is_finite() {
                    return v;
                }
                match r {
                    Rounding::Down if err < 0.0 => v.next_down(),
                    Rounding::Up if err > 0.0 => v.next_up(),
                    _ => v,
                }
            }

            fn from_dyadic_checked(v: Self, d: &Dyadic, r: Rounding) -> Self {
                // powi may round for subnormal results; fix direction exactly
                let exact = d.to_rational();
                let got = Dyadic::from_f64(v as f64).to_rational();
                match r {
                    Rounding::Down if got > exact => v.next_down(),
                    Rounding::Up if got < exact => v.next_up(),
                    _ => v,
                }
            }
        }

        impl Scalar for $t {
            const NATIVE_BITS: Option<u32> = Some($bits);

            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn from_rational(q: &BigRational, _prec: u32, r: Rounding) -> Self {
                Self::from_dyadic(&Dyadic::from_rational(q, $bits + 8, r), $bits, r)
            }

            fn from_dyadic(d: &Dyadic, _prec: u32, r: Rounding) -> Self {
                let d = d.round($bits, r);
                if d.is_zero() {
                    return 0.0;
                }
                let m = d.mantissa().to_i64().unwrap_or(0) as $t;
                let v = m * (2.0 as $t).powi(d.exponent().clamp(-2000, 2000) as i32);
                // outside the exponent range: saturate outward
                if v == 0.0 {
                    return match r {
                        Rounding::Up if !d.is_negative() => (0.0 as $t).next_up(),
                        Rounding::Down if d.is_negative() => (0.0 as $t).next_down(),
                        _ => 0.0,
                    };
                }
                if !v.is_finite() {
                    return match r {
                        Rounding::Up if d.is_negative() => <$t>::MIN,
                        Rounding::Down if !d.is_negative() => <$t>::MAX,
                        _ => v,
                    };
                }
                Self::from_dyadic_checked(v, &d, r)
            }

            fn add_r(&self, rhs: &Self, _prec: u32, r: Rounding) -> Self {
                let s = self + rhs;
                // two-sum: exact error of the rounded sum
                let bb = s - self;
                let err = (self - (s - bb)) + (rhs - bb);
                <$t as HardwareAdjust>::adjust(s, err, r)
            }

            fn sub_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self {
                self.add_r(&-rhs, prec, r)
            }

            fn mul_r(&self, rhs: &Self, _prec: u32, r: Rounding) -> Self {
                let p = self * rhs;
                let err = self.mul_add(*rhs, -p);
                <$t as HardwareAdjust>::adjust(p, err, r)
            }

            fn div_r(&self, rhs: &Self, _prec: u32, r: Rounding) -> Self {
                let q = self / rhs;
                // self - q*rhs, exact
                let rem = (-q).mul_add(*rhs, *self);
                let err = if *rhs > 0.0 { rem } else { -rem };
                <$t as HardwareAdjust>::adjust(q, err, r)
            }

            fn sqrt_r(&self, _prec: u32, r: Rounding) -> Self {
                let s = self.sqrt();
                let err = (-s).mul_add(s, *self);
                <$t as HardwareAdjust>::adjust(s, err, r)
            }

            fn neg(&self) -> Self {
                -*self
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn to_rational(&self) -> Option<BigRational> {
                if self.is_finite() {
                    Some(Dyadic::from_f64(*self as f64).to_rational())
                } else {
                    None
                }
            }
        }
    };
}

impl_hardware_float!(f64, 53);
impl_hardware_float!(f32, 24);

impl Scalar for Dyadic {
    const NATIVE_BITS: Option<u32> = None;

    fn from_i64(v: i64) -> Self {
        Dyadic::from_i64(v)
    }

    fn from_rational(q: &BigRational, prec: u32, r: Rounding) -> Self {
        Dyadic::from_rational(q, prec, r)
    }

    fn from_dyadic(d: &Dyadic, prec: u32, r: Rounding) -> Self {
        d.round(prec, r)
    }

    fn add_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self {
        (self + rhs).round(prec, r)
    }

    fn sub_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self {
        (self - rhs).round(prec, r)
    }

    fn mul_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self {
        (self * rhs).round(prec, r)
    }

    fn div_r(&self, rhs: &Self, prec: u32, r: Rounding) -> Self {
        self.div_rounded(rhs, prec, r)
    }

    fn sqrt_r(&self, prec: u32, r: Rounding) -> Self {
        self.sqrt_rounded(prec, r)
    }

    fn neg(&self) -> Self {
        -self
    }

    fn to_f64(&self) -> f64 {
        Dyadic::to_f64(self)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(Dyadic::to_rational(self))
    }

    fn floor_int(&self) -> Option<BigInt> {
        Some(self.floor())
    }
}

impl Scalar for BigRational {
    const NATIVE_BITS: Option<u32> = None;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &BigRational, _prec: u32, _r: Rounding) -> Self {
        q.clone()
    }

    fn from_dyadic(d: &Dyadic, _prec: u32, _r: Rounding) -> Self {
        d.to_rational()
    }

    fn add_r(&self, rhs: &Self, _prec: u32, _r: Rounding) -> Self {
        self + rhs
    }

    fn sub_r(&self, rhs: &Self, _prec: u32, _r: Rounding) -> Self {
        self - rhs
    }

    fn mul_r(&self, rhs: &Self, _prec: u32, _r: Rounding) -> Self {
        self * rhs
    }

    fn div_r(&self, rhs: &Self, _prec: u32, _r: Rounding) -> Self {
        self / rhs
    }

    fn sqrt_r(&self, prec: u32, r: Rounding) -> Self {
        // not closed under square roots; round through a dyadic
        Dyadic::from_rational(self, prec + 4, r)
            .sqrt_rounded(prec, r)
            .to_rational()
    }

    fn neg(&self) -> Self {
        -self
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}
