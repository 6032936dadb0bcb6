//! Real algebraic numbers and exact arithmetic in the fields they generate.
//!
//! An [`AlgebraicField`] is a real root `α` of a monic squarefree rational
//! polynomial `P`, pinned down by a dyadic isolating interval that contains no
//! other root of `P`. Elements of `Q(α)` are polynomials reduced modulo `P`.
//! `P` need not be irreducible: an element `e` vanishes at `α` exactly when
//! `α` is a root of `gcd(e, P)`, which is decided by a sign change of the gcd
//! over the isolating interval.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::{Dyadic, Rounding};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::{IntPoly, Poly};
use crate::PrecisionReal;

/// A root of a squarefree polynomial together with its isolating interval.
pub struct AlgebraicField {
    poly: Poly,
    ipoly: IntPoly,
    lo: Dyadic,
    hi: Dyadic,
    lo_sign: Ordering,
    // narrowest bracket found so far; always inside (lo, hi)
    cache: Mutex<(Dyadic, Dyadic)>,
}

/// Outcome of locating a root: polynomials can have rational roots.
pub enum Root {
    Rational(BigRational),
    Field(Arc<AlgebraicField>),
}

fn mid(a: &Dyadic, b: &Dyadic) -> Dyadic {
    (a + b).mul_pow2(-1)
}

fn log2_width(a: &Dyadic, b: &Dyadic) -> i64 {
    let w = b - a;
    if w.is_zero() {
        return i64::MIN / 4;
    }
    w.exponent() + w.bits() as i64
}

impl AlgebraicField {
    /// The root of `p` bracketed by `(lo, hi)`, where `p(lo)` and `p(hi)` have
    /// strictly opposite signs. If the bracket holds several roots, the one
    /// reached by sign-change bisection is taken.
    pub fn root_in(p: &Poly, lo: &Dyadic, hi: &Dyadic) -> Result<Root> {
        if p.is_zero() || p.is_constant() {
            return Err(Error::Domain("constant polynomial has no isolated root".into()));
        }
        let p = p.squarefree();
        let ip = p.to_int();
        let (mut lo, mut hi) = (lo.clone(), hi.clone());
        let mut s_lo = ip.sign_at(&lo);
        let s_hi = ip.sign_at(&hi);
        if s_lo == Ordering::Equal {
            return Ok(Root::Rational(lo.to_rational()));
        }
        if s_hi == Ordering::Equal {
            return Ok(Root::Rational(hi.to_rational()));
        }
        if s_lo == s_hi {
            return Err(Error::Domain(format!("no sign change of {p} on the bracket")));
        }
        if p.degree() == Some(1) {
            let c = p.coeffs();
            return Ok(Root::Rational(-&c[0] / &c[1]));
        }
        while ip.descartes_bound(&lo, &hi) != 1 {
            let m = mid(&lo, &hi);
            match ip.sign_at(&m) {
                Ordering::Equal => return Ok(Root::Rational(m.to_rational())),
                s if s == s_lo => {
                    lo = m;
                    s_lo = s;
                }
                _ => hi = m,
            }
        }
        Ok(Root::Field(Arc::new(AlgebraicField {
            poly: p,
            ipoly: ip,
            cache: Mutex::new((lo.clone(), hi.clone())),
            lo,
            hi,
            lo_sign: s_lo,
        })))
    }

    /// The factor `q` of this field's polynomial that still vanishes at the
    /// root, as a field with the same isolating interval.
    fn narrowed(&self, q: &Poly) -> Arc<AlgebraicField> {
        let q = q.monic();
        let ip = q.to_int();
        let lo_sign = ip.sign_at(&self.lo);
        let cache = self.cache.lock().unwrap().clone();
        Arc::new(AlgebraicField {
            poly: q,
            ipoly: ip,
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_sign,
            cache: Mutex::new(cache),
        })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn isolating_interval(&self) -> (Dyadic, Dyadic) {
        (self.lo.clone(), self.hi.clone())
    }

    /// Whether both fields name the same real root, so elements can move
    /// from `self` into `other` by reduction.
    pub fn embeds_into(&self, other: &AlgebraicField) -> bool {
        if self.poly.rem(&other.poly).is_zero() {
            // other's root lies inside our isolating interval
            return other.lo >= self.lo && other.hi <= self.hi;
        }
        false
    }

    /// A dyadic bracket of the root of width at most `2^-bits`.
    pub fn bracket(&self, bits: u32) -> (Dyadic, Dyadic) {
        let target = -(bits as i64);
        let mut guard = self.cache.lock().unwrap();
        let (mut lo, mut hi) = guard.clone();
        while log2_width(&lo, &hi) > target {
            let lw = log2_width(&lo, &hi);
            if lw < -16 && self.newton_step(&mut lo, &mut hi, target) {
                continue;
            }
            for _ in 0..4 {
                let m = mid(&lo, &hi);
                match self.ipoly.sign_at(&m) {
                    Ordering::Equal => {
                        lo = m.clone();
                        hi = m;
                        break;
                    }
                    s if s == self.lo_sign => lo = m,
                    _ => hi = m,
                }
            }
        }
        *guard = (lo.clone(), hi.clone());
        (lo, hi)
    }

    // One Newton iteration from the midpoint, accepted only if the new
    // bracket is certified by an exact sign change.
    fn newton_step(&self, lo: &mut Dyadic, hi: &mut Dyadic, target: i64) -> bool {
        let lw = log2_width(lo, hi);
        let new_w = (2 * lw + 6).max(target - 2);
        let prec = (-new_w + 64).max(64) as u32;
        let x0 = mid(lo, hi);
        let (mut f, mut df) = (Dyadic::zero(), Dyadic::zero());
        for c in self.poly.coeffs().iter().rev() {
            df = (&df * &x0 + f.clone()).round(prec, Rounding::Down);
            f = (&f * &x0 + Dyadic::from_rational(c, prec, Rounding::Down)).round(prec, Rounding::Down);
        }
        if df.is_zero() {
            return false;
        }
        let x1 = (&x0 - &f.div_rounded(&df, prec, Rounding::Down)).round(prec, Rounding::Down);
        let eps = Dyadic::new(BigInt::one(), new_w - 1);
        let (a, b) = (&x1 - &eps, &x1 + &eps);
        if a <= *lo || b >= *hi {
            return false;
        }
        let sa = self.ipoly.sign_at(&a);
        let sb = self.ipoly.sign_at(&b);
        if sa == Ordering::Equal {
            *lo = a.clone();
            *hi = a;
            return true;
        }
        if sb == Ordering::Equal {
            *lo = b.clone();
            *hi = b;
            return true;
        }
        if sa == self.lo_sign && sb != self.lo_sign {
            *lo = a;
            *hi = b;
            return true;
        }
        false
    }

    /// Enclosure of the root at `prec` bits.
    pub fn enclose(&self, prec: u32) -> PrecisionReal {
        let (lo, hi) = self.bracket(prec + 4);
        Interval::from_dyadic_bounds(&lo, &hi, prec)
    }

    /// Whether `g` (a factor of this field's polynomial) vanishes at the root.
    fn root_of_factor(&self, g: &Poly) -> bool {
        let ig = g.to_int();
        let a = ig.sign_at(&self.lo);
        let b = ig.sign_at(&self.hi);
        a != Ordering::Equal && b != Ordering::Equal && a != b
    }
}

impl fmt::Debug for AlgebraicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root of {} in ({}, {})",
            self.poly,
            self.lo.to_f64(),
            self.hi.to_f64()
        )
    }
}

impl PartialEq for AlgebraicField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && self.lo == other.lo && self.hi == other.hi
    }
}

/// An element of `Q(α)` stored as a polynomial of degree below `deg P`.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<AlgebraicField>,
    p: Poly,
}

impl FieldElement {
    pub fn new(field: Arc<AlgebraicField>, p: Poly) -> Self {
        let p = p.rem(&field.poly);
        FieldElement { field, p }
    }

    /// The root `α` itself.
    pub fn generator(field: Arc<AlgebraicField>) -> Self {
        Self::new(field, Poly::x())
    }

    pub fn from_rational(field: Arc<AlgebraicField>, q: BigRational) -> Self {
        FieldElement {
            field,
            p: Poly::constant(q),
        }
    }

    pub fn field(&self) -> &Arc<AlgebraicField> {
        &self.field
    }

    pub fn poly(&self) -> &Poly {
        &self.p
    }

    /// The value when it is a rational constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.p.is_constant().then(|| self.p.constant_term())
    }

    pub fn same_field(&self, other: &FieldElement) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    /// Reduce into `target` when both fields name the same root.
    pub fn move_to(&self, target: &Arc<AlgebraicField>) -> Option<FieldElement> {
        if Arc::ptr_eq(&self.field, target) || *self.field == **target {
            return Some(FieldElement {
                field: target.clone(),
                p: self.p.clone(),
            });
        }
        self.field
            .embeds_into(target)
            .then(|| FieldElement::new(target.clone(), self.p.clone()))
    }

    /// Bring two elements into a common field, if there is one.
    pub fn unify(a: &FieldElement, b: &FieldElement) -> Option<(FieldElement, FieldElement)> {
        if a.same_field(b) {
            return Some((a.clone(), b.with_field(&a.field)));
        }
        if let Some(b2) = b.move_to(&a.field) {
            return Some((a.clone(), b2));
        }
        a.move_to(&b.field).map(|a2| (a2, b.clone()))
    }

    fn with_field(&self, field: &Arc<AlgebraicField>) -> FieldElement {
        FieldElement {
            field: field.clone(),
            p: self.p.clone(),
        }
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            p: &self.p + &other.p,
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            p: &self.p - &other.p,
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        Self::new(self.field.clone(), &self.p * &other.p)
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            p: -&self.p,
        }
    }

    pub fn add_rational(&self, q: &BigRational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            p: &self.p + &Poly::constant(q.clone()),
        }
    }

    pub fn scale(&self, q: &BigRational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            p: self.p.scale(q),
        }
    }

    /// Multiplicative inverse. The result may live in a narrower field when
    /// the defining polynomial factors.
    pub fn inverse(&self) -> Result<FieldElement> {
        let mut cur = self.clone();
        loop {
            let (g, s) = Poly::ext_gcd(&cur.p, &cur.field.poly);
            if g.is_zero() {
                return Err(Error::Domain("division by zero".into()));
            }
            if g.degree() == Some(0) {
                return Ok(FieldElement::new(cur.field.clone(), s));
            }
            if cur.field.root_of_factor(&g) {
                return Err(Error::Domain("division by zero".into()));
            }
            let rest = cur.field.poly.div_rem(&g).0;
            let field = cur.field.narrowed(&rest);
            cur = FieldElement::new(field, cur.p.clone());
        }
    }

    /// Enclosure of the value at roughly `prec` bits.
    pub fn enclose(&self, prec: u32) -> PrecisionReal {
        if let Some(q) = self.as_rational() {
            return Interval::from_rational(&q, prec);
        }
        let extra = 8 + 2 * (64 - (self.p.coeffs().len() as u64).leading_zeros()) + self.coeff_bits();
        let work = prec + extra;
        let a = self.field.enclose(work);
        self.p.eval_interval(&a).with_precision(prec)
    }

    fn coeff_bits(&self) -> u32 {
        self.p
            .coeffs()
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
            .min(4096) as u32
    }

    /// Exact sign of the value.
    pub fn sign(&self) -> Ordering {
        if let Some(q) = self.as_rational() {
            return q.cmp(&BigRational::zero());
        }
        for prec in [64, 128, 256] {
            if let Some(s) = decided_sign(&self.enclose(prec)) {
                return s;
            }
        }
        let g = Poly::gcd(&self.p, &self.field.poly);
        if g.degree().unwrap_or(0) > 0 && self.field.root_of_factor(&g) {
            return Ordering::Equal;
        }
        // nonzero, so refinement terminates
        let mut prec = 512;
        loop {
            if let Some(s) = decided_sign(&self.enclose(prec)) {
                return s;
            }
            prec *= 2;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
}

fn decided_sign(e: &PrecisionReal) -> Option<Ordering> {
    if e.is_positive() {
        Some(Ordering::Greater)
    } else if e.is_negative() {
        Some(Ordering::Less)
    } else if e.is_point() && e.lo().is_zero() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) at {:?}", self.p, self.field)
    }
}

/// Convenience for tests and constants: the root of `p` in `(lo, hi)` given
/// as rationals.
pub fn root_between(p: &Poly, lo: &BigRational, hi: &BigRational) -> Result<Root> {
    let l = Dyadic::from_rational(lo, 128, Rounding::Down);
    let h = Dyadic::from_rational(hi, 128, Rounding::Up);
    AlgebraicField::root_in(p, &l, &h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<AlgebraicField> {
        let p = Poly::from_i64s(&[-1, -1, 1]);
        match AlgebraicField::root_in(&p, &Dyadic::from_i64(1), &Dyadic::from_i64(2)).unwrap() {
            Root::Field(f) => f,
            Root::Rational(_) => unreachable!(),
        }
    }

    #[test]
    fn golden_ratio_enclosure() {
        let f = golden();
        let e = f.enclose(200);
        let (lo, hi) = e.bounds();
        let five = BigRational::from_integer(5.into());
        // (2φ - 1)^2 = 5
        let two = BigRational::from_integer(2.into());
        let one = BigRational::one();
        let a = &two * &lo - &one;
        let b = &two * &hi - &one;
        assert!(&a * &a <= five && five <= &b * &b);
        assert!((hi - lo) < BigRational::new(1.into(), BigInt::one() << 190));
    }

    #[test]
    fn exact_zero_and_signs() {
        let f = golden();
        let phi = FieldElement::generator(f.clone());
        // φ^2 - φ - 1 = 0
        let z = phi.mul(&phi).sub(&phi).add_rational(&-BigRational::one());
        assert_eq!(z.sign(), Ordering::Equal);
        let w = phi.add_rational(&BigRational::new((-13).into(), 8.into()));
        assert_eq!(w.sign(), Ordering::Less);
    }

    #[test]
    fn inverse_in_golden_field() {
        let phi = FieldElement::generator(golden());
        let inv = phi.inverse().unwrap();
        // 1/φ = φ - 1
        assert_eq!(inv.poly(), &Poly::from_i64s(&[-1, 1]));
    }

    #[test]
    fn zero_test_in_reducible_field() {
        // (t^2 - t - 1)(t - 3), root near φ
        let p = &Poly::from_i64s(&[-1, -1, 1]) * &Poly::from_i64s(&[-3, 1]);
        let f = match AlgebraicField::root_in(&p, &Dyadic::from_i64(1), &Dyadic::from_i64(2)).unwrap() {
            Root::Field(f) => f,
            Root::Rational(_) => unreachable!(),
        };
        let x = FieldElement::generator(f.clone());
        let e = x.mul(&x).sub(&x).add_rational(&-BigRational::one());
        assert!(e.is_zero());
        let t3 = x.add_rational(&BigRational::from_integer((-3).into()));
        assert_eq!(t3.sign(), Ordering::Less);
        let inv = t3.inverse().unwrap();
        let v = inv.enclose(64).mid_f64();
        assert!((v - 1.0 / (1.618033988749895 - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rational_root_detected() {
        let p = Poly::from_i64s(&[-3, 2]);
        match AlgebraicField::root_in(&p, &Dyadic::from_i64(1), &Dyadic::from_i64(2)).unwrap() {
            Root::Rational(q) => assert_eq!(q, BigRational::new(3.into(), 2.into())),
            Root::Field(_) => panic!("expected rational"),
        }
    }

    #[test]
    fn high_precision_bracket_is_fast() {
        let f = golden();
        let (lo, hi) = f.bracket(4096);
        assert!(log2_width(&lo, &hi) <= -4096);
    }
}
