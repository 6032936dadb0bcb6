//! Univariate polynomials over the rationals and the integers.
//!
//! [`Poly`] carries exact rational coefficients and supports the Euclidean
//! operations used by the algebraic number layer. [`IntPoly`] is the
//! primitive integer form used for fast sign evaluation at dyadic points and
//! for Descartes root counting on an interval.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::Dyadic;
use crate::interval::Interval;
use crate::scalar::Scalar;

/// Coefficients from the constant term upward, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Poly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn constant(v: BigRational) -> Self {
        Self::new(vec![v])
    }

    /// The polynomial `t`.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn monomial(coef: BigRational, k: usize) -> Self {
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = coef;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.c.first().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![BigRational::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * rat(i as i64))
                .collect(),
        )
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead_inv = d.lead().recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = &r[i + dd] * &lead_inv;
            if !coef.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    r[i + j] -= &coef * dc;
                }
            }
            q[i] = coef;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            // keep coefficient growth in check
            b = r.monic();
        }
        a.monic()
    }

    /// `(g, s)` with `g` the monic gcd and `s·a ≡ g (mod b)`.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.is_zero() {
            return (r0, s0);
        }
        let k = r0.lead().recip();
        (r0.scale(&k), s0.scale(&k))
    }

    /// `self / gcd(self, self')`, monic.
    pub fn squarefree(&self) -> Poly {
        let g = Poly::gcd(self, &self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Horner evaluation with outward rounding.
    pub fn eval_interval<T: Scalar>(&self, x: &Interval<T>) -> Interval<T> {
        let p = x.precision_bits();
        let mut acc = Interval::<T>::from_i64(0, p);
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + &Interval::from_rational(a, p);
        }
        acc
    }

    pub fn to_int(&self) -> IntPoly {
        IntPoly::from_poly(self)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::from_i64s(&[1])
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.c.len().max(rhs.c.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) + rhs.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if a.is_negative() { '-' } else { '+' })?;
            } else if a.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let m = a.abs();
            match i {
                0 => write!(f, "{m}")?,
                1 if m.is_one() => write!(f, "t")?,
                1 => write!(f, "{m}*t")?,
                _ if m.is_one() => write!(f, "t^{i}")?,
                _ => write!(f, "{m}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Primitive integer polynomial with positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    c: Vec<BigInt>,
}

impl IntPoly {
    pub fn from_poly(p: &Poly) -> Self {
        let den = p
            .coeffs()
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let mut c: Vec<BigInt> = p
            .coeffs()
            .iter()
            .map(|a| (a * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let content = c.iter().fold(BigInt::zero(), |g, a| g.gcd(a));
        if !content.is_zero() {
            for a in &mut c {
                *a /= &content;
            }
        }
        if c.last().is_some_and(Signed::is_negative) {
            for a in &mut c {
                *a = -&*a;
            }
        }
        IntPoly { c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.c.iter().cloned().map(BigRational::from_integer).collect())
    }

    /// Sign of the value at a dyadic point, computed exactly.
    pub fn sign_at(&self, x: &Dyadic) -> Ordering {
        let d = match self.degree() {
            None => return Ordering::Equal,
            Some(d) => d,
        };
        // P(m 2^e): for e >= 0 evaluate directly, else homogenize by 2^{-e d}
        let m = x.mantissa();
        let e = x.exponent();
        let v = if e >= 0 {
            let xi = m << (e as u64);
            self.c.iter().rev().fold(BigInt::zero(), |acc, a| acc * &xi + a)
        } else {
            let k = (-e) as u64;
            let mut acc = self.c[d].clone();
            for i in (0..d).rev() {
                acc = acc * m + (&self.c[i] << (k * (d - i) as u64));
            }
            acc
        };
        v.sign_cmp()
    }

    /// Sign variations of the Descartes transform on `(lo, hi)`. Zero means
    /// no root in the open interval, one means exactly one.
    pub fn descartes_bound(&self, lo: &Dyadic, hi: &Dyadic) -> usize {
        let d = match self.degree() {
            None | Some(0) => return 0,
            Some(d) => d,
        };
        // lo = a 2^-k, hi - lo = b 2^-k
        let w = hi - lo;
        let k = (-lo.exponent().min(w.exponent())).max(0) as u64;
        let a = lo.mul_pow2(k as i64).floor();
        let b = w.mul_pow2(k as i64).floor();
        // 2^{kd} P(lo + (hi-lo) x) by Horner in x, coefficients low to high
        let mut acc: Vec<BigInt> = vec![self.c[d].clone()];
        for i in (0..d).rev() {
            let mut next = vec![BigInt::zero(); acc.len() + 1];
            for (j, c) in acc.iter().enumerate() {
                next[j] += c * &a;
                next[j + 1] += c * &b;
            }
            next[0] += &self.c[i] << (k * (d - i) as u64);
            acc = next;
        }
        // roots in (0,1) become positive roots of (1+x)^d P1(1/(1+x))
        acc.reverse();
        for i in 0..d {
            for j in (i..d).rev() {
                let t = acc[j + 1].clone();
                acc[j] += t;
            }
        }
        let mut count = 0;
        let mut last = Ordering::Equal;
        for c in &acc {
            let s = c.sign_cmp();
            if s != Ordering::Equal {
                if last != Ordering::Equal && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}
