//! Binary floating point numbers with an unbounded mantissa.
//!
//! A [`Dyadic`] is `mantissa * 2^exponent`. Addition, subtraction and
//! multiplication are exact; division and square roots round in a requested
//! direction to a requested number of mantissa bits. This is the endpoint type
//! behind [`PrecisionReal`](crate::PrecisionReal).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Direction of rounding for an inexact operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rounding {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

impl Rounding {
    pub fn flip(self) -> Self {
        match self {
            Rounding::Down => Rounding::Up,
            Rounding::Up => Rounding::Down,
        }
    }
}

/// `mantissa * 2^exponent`, kept with an odd mantissa (zero is `0 * 2^0`).
#[derive(Clone, Debug)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn shr_rounded(m: &BigInt, shift: u64, r: Rounding) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    let d = BigInt::one() << shift;
    match r {
        Rounding::Down => m.div_floor(&d),
        Rounding::Up => m.div_ceil(&d),
    }
}

fn div_rounded(n: &BigInt, d: &BigInt, r: Rounding) -> BigInt {
    match r {
        Rounding::Down => n.div_floor(d),
        Rounding::Up => n.div_ceil(d),
    }
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    /// Exact conversion of a finite float. Non-finite input maps to zero.
    pub fn from_f64(v: f64) -> Self {
        if !v.is_finite() || v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0xf_ffff_ffff_ffff;
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), exp - 1075)
        };
        Self::new(BigInt::from(sign) * BigInt::from(m), e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    pub fn signum(&self) -> Ordering {
        match self.mantissa.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Round to at most `prec` mantissa bits.
    pub fn round(&self, prec: u32, r: Rounding) -> Self {
        let bits = self.bits();
        let prec = prec.max(2) as u64;
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        Self::new(
            shr_rounded(&self.mantissa, shift, r),
            self.exponent + shift as i64,
        )
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn div_rounded(&self, other: &Self, prec: u32, r: Rounding) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let prec = prec.max(2) as i64;
        let k = (prec + other.bits() as i64 - self.bits() as i64 + 2).max(0);
        let num = &self.mantissa << (k as u64);
        let q = div_rounded(&num, &other.mantissa, r);
        Self::new(q, self.exponent - other.exponent - k).round(prec as u32, r)
    }

    /// Square root rounded in direction `r`. Negative input panics.
    pub fn sqrt_rounded(&self, prec: u32, r: Rounding) -> Self {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        let want = 2 * prec.max(2) as i64 + 4;
        let mut shift = (want - self.bits() as i64).max(0);
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let n = &self.mantissa << (shift as u64);
        let mut root = n.sqrt();
        if r == Rounding::Up && &root * &root != n {
            root += 1;
        }
        Self::new(root, (self.exponent - shift) / 2).round(prec, r)
    }

    pub fn from_rational(q: &BigRational, prec: u32, r: Rounding) -> Self {
        Self::from_bigint(q.numer().clone()).div_rounded(&Self::from_bigint(q.denom().clone()), prec, r)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << (self.exponent as u64))
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << ((-self.exponent) as u64))
        }
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << (self.exponent as u64)
        } else {
            shr_rounded(&self.mantissa, (-self.exponent) as u64, Rounding::Down)
        }
    }

    /// Nearest-ish conversion to `f64` (truncates the mantissa to 64 bits first).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            (&self.mantissa >> s, self.exponent + s as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let mf = m.to_f64().unwrap_or(0.0);
        if e > i32::MAX as i64 {
            return mf.signum() * f64::INFINITY;
        }
        if e < i32::MIN as i64 {
            return 0.0;
        }
        ldexp(mf, e)
    }

    /// Decimal rendering with `digits` digits after the point, rounded toward
    /// negative infinity.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled = self.to_rational() * BigRational::from_integer(BigInt::from(10).pow(digits as u32));
        let floor = scaled.floor().to_integer();
        let neg = floor.is_negative();
        let s = floor.abs().to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }
    fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Self::from_i64(1)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << ((self.exponent - e) as u64);
        let b = &rhs.mantissa << ((rhs.exponent - e) as u64);
        Dyadic::new(a + b, e)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -(self.clone())
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.mantissa == other.mantissa && self.exponent == other.exponent
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(f.precision().unwrap_or(20)))
    }
}


fn ldexp(mut v: f64, mut e: i64) -> f64 {
    // powi underflows early when the exponent alone is subnormal
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}
