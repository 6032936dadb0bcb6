//! Real numbers that can be enclosed to any requested precision.
//!
//! [`Real`] keeps rationals and algebraic numbers exact and falls back to a
//! lazily evaluated [`Computable`] closure otherwise. Bases and values flow
//! through the library as `Real` so that boundary cases such as the golden
//! ratio base are decided exactly rather than by tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebraic::{AlgebraicField, FieldElement, Root};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::PrecisionReal;

/// Highest precision tried before a sign query on a computable real gives up.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

type EncloseFn = dyn Fn(u32) -> Result<PrecisionReal> + Send + Sync;

/// A real given by a function from precision to enclosure.
///
/// The closure must return an interval containing the value for every
/// precision, and the width should shrink roughly like `2^-prec`.
#[derive(Clone)]
pub struct Computable {
    f: Arc<EncloseFn>,
    cache: Arc<Mutex<Option<PrecisionReal>>>,
}

impl Computable {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(u32) -> Result<PrecisionReal> + Send + Sync + 'static,
    {
        Computable {
            f: Arc::new(f),
            cache: Arc::new(Mutex::new(None)),
        }
    }

    pub fn enclose(&self, prec: u32) -> Result<PrecisionReal> {
        if let Some(c) = self.cache.lock().unwrap().as_ref() {
            if c.precision_bits() >= prec {
                return Ok(c.clone());
            }
        }
        let e = (self.f)(prec)?;
        *self.cache.lock().unwrap() = Some(e.clone());
        Ok(e)
    }
}

#[derive(Clone)]
pub enum Real {
    Rational(BigRational),
    Algebraic(FieldElement),
    Computable(Computable),
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Real {
    pub fn from_i64(v: i64) -> Self {
        Real::Rational(BigRational::from_integer(v.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Real::Rational(rational(n, d))
    }

    pub fn from_root(r: Root) -> Self {
        match r {
            Root::Rational(q) => Real::Rational(q),
            Root::Field(f) => Real::Algebraic(FieldElement::generator(f)),
        }
    }

    pub fn computable<F>(f: F) -> Self
    where
        F: Fn(u32) -> Result<PrecisionReal> + Send + Sync + 'static,
    {
        Real::Computable(Computable::new(f))
    }

    /// Parse `7/5`, `-3`, `1.25`, `1.5e-3` or `2E4` exactly.
    pub fn parse(s: &str) -> Result<Self> {
        parse_rational(s).map(Real::Rational)
    }

    /// Exact rational value, when known.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Real::Rational(q) => Some(q.clone()),
            Real::Algebraic(e) => e.as_rational(),
            Real::Computable(_) => None,
        }
    }

    pub fn as_field_element(&self) -> Option<&FieldElement> {
        match self {
            Real::Algebraic(e) => Some(e),
            _ => None,
        }
    }

    /// Whether arithmetic on this value is exact.
    pub fn is_exact(&self) -> bool {
        !matches!(self, Real::Computable(_))
    }

    pub fn enclose(&self, prec: u32) -> Result<PrecisionReal> {
        match self {
            Real::Rational(q) => Ok(Interval::from_rational(q, prec)),
            Real::Algebraic(e) => Ok(e.enclose(prec)),
            Real::Computable(c) => c.enclose(prec),
        }
    }

    /// An enclosure of radius at most `tol`, raising precision up to `cap`.
    pub fn enclose_within(&self, tol: &BigRational, cap: u32) -> Result<PrecisionReal> {
        let mut prec = 64;
        loop {
            let e = self.enclose(prec)?;
            let (lo, hi) = e.bounds();
            if (hi - lo) <= tol * BigRational::from_integer(2.into()) {
                return Ok(e);
            }
            if prec >= cap {
                return Err(Error::PrecisionExhausted {
                    bits: prec,
                    context: "enclosure wider than the requested tolerance".into(),
                });
            }
            prec = (prec * 2).min(cap);
        }
    }

    /// Approximate value for reporting; never used for decisions.
    pub fn to_f64(&self) -> f64 {
        self.enclose(64).map(|e| e.mid_f64()).unwrap_or(f64::NAN)
    }

    /// Sign, exact for rational and algebraic values; computable values are
    /// refined up to [`DEFAULT_PRECISION_CAP`] bits.
    pub fn sign(&self) -> Result<Ordering> {
        self.sign_with_cap(DEFAULT_PRECISION_CAP)
    }

    pub fn sign_with_cap(&self, cap: u32) -> Result<Ordering> {
        match self {
            Real::Rational(q) => Ok(q.cmp(&BigRational::zero())),
            Real::Algebraic(e) => Ok(e.sign()),
            Real::Computable(c) => {
                let mut prec = 64;
                loop {
                    let e = c.enclose(prec)?;
                    if e.is_positive() {
                        return Ok(Ordering::Greater);
                    }
                    if e.is_negative() {
                        return Ok(Ordering::Less);
                    }
                    if prec >= cap {
                        return Err(Error::Undecidable(format!(
                            "sign of a value enclosed by {e} at {prec} bits"
                        )));
                    }
                    prec = (prec * 2).min(cap);
                }
            }
        }
    }

    pub fn cmp_real(&self, other: &Real) -> Result<Ordering> {
        self.sub(other).sign()
    }

    pub fn cmp_rational(&self, q: &BigRational) -> Result<Ordering> {
        self.cmp_real(&Real::Rational(q.clone()))
    }

    pub fn cmp_i64(&self, v: i64) -> Result<Ordering> {
        self.cmp_rational(&BigRational::from_integer(v.into()))
    }

    fn lift(a: &Real, b: &Real, op: fn(&PrecisionReal, &PrecisionReal) -> Result<PrecisionReal>) -> Real {
        let (a, b) = (a.clone(), b.clone());
        Real::computable(move |prec| {
            let w = prec + 16;
            op(&a.enclose(w)?, &b.enclose(w)?).map(|e| e.with_precision(prec))
        })
    }

    pub fn add(&self, other: &Real) -> Real {
        use Real::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a + b),
            (Algebraic(e), Rational(q)) | (Rational(q), Algebraic(e)) => Algebraic(e.add_rational(q)),
            (Algebraic(a), Algebraic(b)) => match FieldElement::unify(a, b) {
                Some((a, b)) => Algebraic(a.add(&b)),
                None => Real::lift(self, other, |x, y| Ok(x + y)),
            },
            _ => Real::lift(self, other, |x, y| Ok(x + y)),
        }
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Rational(q) => Real::Rational(-q),
            Real::Algebraic(e) => Real::Algebraic(e.neg()),
            Real::Computable(_) => {
                let a = self.clone();
                Real::computable(move |prec| Ok(-a.enclose(prec)?))
            }
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Real) -> Real {
        use Real::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a * b),
            (Algebraic(e), Rational(q)) | (Rational(q), Algebraic(e)) => Algebraic(e.scale(q)),
            (Algebraic(a), Algebraic(b)) => match FieldElement::unify(a, b) {
                Some((a, b)) => Algebraic(a.mul(&b)),
                None => Real::lift(self, other, |x, y| Ok(x * y)),
            },
            _ => Real::lift(self, other, |x, y| Ok(x * y)),
        }
    }

    pub fn recip(&self) -> Result<Real> {
        match self {
            Real::Rational(q) if q.is_zero() => Err(Error::Domain("division by zero".into())),
            Real::Rational(q) => Ok(Real::Rational(q.recip())),
            Real::Algebraic(e) => e.inverse().map(Real::Algebraic),
            Real::Computable(_) => {
                let a = self.clone();
                Ok(Real::computable(move |prec| {
                    let e = a.enclose(prec + 16)?;
                    e.recip().map(|r| r.with_precision(prec))
                }))
            }
        }
    }

    pub fn div(&self, other: &Real) -> Result<Real> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, n: u32) -> Real {
        let mut acc = Real::from_i64(1);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn add_i64(&self, v: i64) -> Real {
        self.add(&Real::from_i64(v))
    }

    pub fn mul_i64(&self, v: i64) -> Real {
        self.mul(&Real::from_i64(v))
    }

    /// Decimal string with `digits` fractional digits and a certified radius.
    pub fn to_decimal(&self, digits: usize) -> String {
        let bits = (digits as f64 * 3.33) as u32 + 32;
        match self.enclose(bits) {
            Ok(e) => e.to_decimal(digits),
            Err(err) => format!("<{err}>"),
        }
    }
}

impl From<BigRational> for Real {
    fn from(q: BigRational) -> Self {
        Real::Rational(q)
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Self {
        Real::from_i64(v)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(q) => write!(f, "Rational({q})"),
            Real::Algebraic(e) => write!(f, "Algebraic({e:?})"),
            Real::Computable(c) => match c.enclose(64) {
                Ok(e) => write!(f, "Computable({e})"),
                Err(err) => write!(f, "Computable(<{err}>)"),
            },
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            _ => write!(f, "{}", self.to_decimal(f.precision().unwrap_or(12))),
        }
    }
}

/// The positive root of `t^2 - b t - c` for rationals with `b^2 + 4c > 0`
/// and `c > 0`.
pub fn quadratic_root(b: &BigRational, c: &BigRational) -> Result<Real> {
    use crate::poly::Poly;
    let p = Poly::new(vec![-c.clone(), -b.clone(), BigRational::one()]);
    // the positive root lies in (0, |b| + c + 1)
    let hi = b.abs() + c + BigRational::one();
    let lo = Dyadic::zero();
    let hi = Dyadic::from_rational(&hi, 64, crate::Rounding::Up);
    AlgebraicField::root_in(&p, &lo, &hi).map(Real::from_root)
}

/// Exact rational from a decimal, scientific or fraction literal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a real literal: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(digits);
    if scale >= 0 {
        q *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        q /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Ok(if neg { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("7/5").unwrap(), rational(7, 5));
        assert_eq!(parse_rational("1.25").unwrap(), rational(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rational(-1, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), rational(1, 1000));
        assert_eq!(parse_rational("2E2").unwrap(), rational(200, 1));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn golden_identities_are_exact() {
        let phi = quadratic_root(&rational(1, 1), &rational(1, 1)).unwrap();
        assert!(matches!(phi, Real::Algebraic(_)));
        let lhs = phi.mul(&phi);
        let rhs = phi.add_i64(1);
        assert_eq!(lhs.cmp_real(&rhs).unwrap(), Ordering::Equal);
        // 1/(φ-1) = φ
        let x = phi.add_i64(-1).recip().unwrap();
        assert_eq!(x.cmp_real(&phi).unwrap(), Ordering::Equal);
        assert!((phi.to_f64() - 1.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn perfect_square_discriminant_is_exact() {
        // t^2 - t - 2 = (t - 2)(t + 1)
        let r = quadratic_root(&rational(1, 1), &rational(2, 1)).unwrap();
        assert_eq!(r.cmp_i64(2).unwrap(), Ordering::Equal);
    }

    #[test]
    fn computable_sign_escalates() {
        let tiny = Real::computable(|prec| {
            let e = Interval::from_rational(&rational(1, 1 << 40), prec);
            Ok(e)
        });
        assert_eq!(tiny.sign().unwrap(), Ordering::Greater);
        let zero = Real::computable(|prec| Ok(Interval::from_i64(0, prec).hull(&Interval::from_rational(&rational(1, 1 << 20), prec).neg_i())));
        assert!(matches!(zero.sign_with_cap(256), Err(Error::Undecidable(_))));
    }

    #[test]
    fn mixed_exact_and_computable() {
        let phi = quadratic_root(&rational(1, 1), &rational(1, 1)).unwrap();
        let c = Real::computable(|prec| Ok(Interval::from_rational(&rational(1, 3), prec)));
        let s = phi.add(&c);
        assert!((s.to_f64() - (1.618033988749895 + 1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Real::from_ratio(1, 3).to_decimal(5), "0.33333");
        let two = Real::from_i64(2);
        assert_eq!(format!("{two}"), "2");
    }

    #[test]
    fn enclose_within_meets_tolerance() {
        let phi = quadratic_root(&rational(1, 1), &rational(1, 1)).unwrap();
        let e = phi.enclose_within(&rational(1, 1_000_000_000_000), 4096).unwrap();
        let (lo, hi) = e.bounds();
        assert!(hi - lo <= rational(2, 1_000_000_000_000));
    }
}
