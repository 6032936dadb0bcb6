//! Bases from expansions, and the named constants `q_x`, `q_G`, `q_KL`,
//! `x_G`, `x_KL`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::dimension::{LexShiftAutomaton, Strictness};
use crate::expansion::{self, pi_polys};
use crate::interval::Interval;
use crate::poly::Poly;
use crate::real::{quadratic_root, Real};
use crate::words::{thue_morse, Alphabet, EventuallyPeriodicWord};
use crate::{Dyadic, PrecisionReal, Rounding};

/// Default radius for reported constants.
pub const DEFAULT_TOL: f64 = 1e-12;

/// `q_x = min{M + 1, 1 + M/x}`, the largest base in which `x` has an expansion.
pub fn q_of_x(x: &Real, m: Alphabet) -> Result<Real> {
    if x.sign()? != Ordering::Greater {
        return Err(Error::Domain("q_x needs x > 0".into()));
    }
    if x.cmp_i64(1)? != Ordering::Greater {
        return Ok(Real::from_i64(m.size() as i64));
    }
    Ok(Real::from_i64(m.m() as i64).div(x)?.add_i64(1))
}

/// A sign decision at a point, raising precision up to a cap.
fn sign_at<F>(f: &F, t: &Dyadic, prec: u32) -> Result<Ordering>
where
    F: Fn(&Dyadic, u32) -> Result<(PrecisionReal, Option<Dyadic>)>,
{
    let mut w = prec;
    loop {
        let (v, _) = f(t, w)?;
        if v.is_positive() {
            return Ok(Ordering::Greater);
        }
        if v.is_negative() {
            return Ok(Ordering::Less);
        }
        if v.is_point() {
            return Ok(Ordering::Equal);
        }
        if w >= 4 * prec.max(expansion::DEFAULT_PRECISION_CAP) {
            return Err(Error::PrecisionExhausted {
                bits: w,
                context: "sign of the target function near the root".into(),
            });
        }
        w *= 2;
    }
}

/// Root of a strictly decreasing function on the open bracket `(lo, hi)`,
/// to within `2^-prec`. `f(t, w)` encloses `f(t)` at `w` bits and may offer
/// an approximate slope, which is only used to propose Newton steps; every
/// accepted bracket is certified by sign tests.
pub(crate) fn decreasing_root<F>(f: &F, lo: &Dyadic, hi: &Dyadic, prec: u32) -> Result<PrecisionReal>
where
    F: Fn(&Dyadic, u32) -> Result<(PrecisionReal, Option<Dyadic>)>,
{
    let w = prec + 32;
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let half = |a: &Dyadic, b: &Dyadic| (a + b).mul_pow2(-1);
    let target = Dyadic::new(BigInt::one(), -(prec as i64));
    let done = |lo: &Dyadic, hi: &Dyadic| hi - lo <= target;

    // coarse bisection gives Newton a start inside the basin
    for _ in 0..24 {
        if done(&lo, &hi) {
            break;
        }
        let m = half(&lo, &hi);
        match sign_at(f, &m, 64)? {
            Ordering::Greater => lo = m,
            Ordering::Less => hi = m,
            Ordering::Equal => return Ok(Interval::from_dyadic_bounds(&m, &m, prec)),
        }
    }

    // Newton from the left end, precision doubling
    let mut t = half(&lo, &hi);
    let mut cur = 64u32;
    let mut polish = 0;
    while !done(&lo, &hi) && polish < 3 {
        let (v, slope) = match f(&t, cur) {
            Ok(r) => r,
            Err(_) => break,
        };
        let Some(s) = slope.filter(|s| !s.is_zero()) else { break };
        let step = v.value().div_rounded(&s, cur, Rounding::Down);
        let next = &t - &step;
        if next <= lo || next >= hi {
            break;
        }
        t = next.round(w, Rounding::Down);
        if cur >= w {
            polish += 1;
        }
        cur = (cur * 2).min(w);
    }
    if !done(&lo, &hi) {
        let eps = Dyadic::new(BigInt::one(), -(prec as i64 + 2));
        let (a, b) = (&t - &eps, &t + &eps);
        if a > lo && b < hi && sign_at(f, &a, w)? == Ordering::Greater && sign_at(f, &b, w)? == Ordering::Less {
            lo = a;
            hi = b;
        }
    }

    while !done(&lo, &hi) {
        let m = half(&lo, &hi);
        match sign_at(f, &m, w)? {
            Ordering::Greater => lo = m,
            Ordering::Less => hi = m,
            Ordering::Equal => return Ok(Interval::from_dyadic_bounds(&m, &m, prec)),
        }
    }
    Ok(Interval::from_dyadic_bounds(&lo, &hi, prec))
}

fn eval_at(p: &Poly, t: &Dyadic, prec: u32) -> PrecisionReal {
    p.eval_interval(&Interval::from_dyadic_bounds(t, t, prec))
}

/// Numerator and denominator of `π_t(d)` with the common factor `t − 1`
/// removed when `d` ends with `0^∞`, so both stay positive on `(1, ∞)`.
fn reduced_pi_polys(d: &EventuallyPeriodicWord) -> (Poly, Poly) {
    if d.ends_with_zeros() {
        let pre = d.preperiod();
        let n = pre.len();
        let a = Poly::new(
            (0..n)
                .map(|k| BigRational::from_integer(BigInt::from(pre.digits()[n - 1 - k])))
                .collect(),
        );
        (a, Poly::monomial(BigRational::one(), n))
    } else {
        pi_polys(d)
    }
}

/// The base `q ∈ (1, M+1]` with `π_q(d) = x`. Exact (rational or algebraic)
/// when `x` is rational; otherwise a computable real refined by certified
/// bracketing.
pub fn invert_base(d: &EventuallyPeriodicWord, x: &Real) -> Result<Real> {
    invert_base_with(d, x, true)
}

/// `invert_base` as a computable real even for rational `x`. Exact field
/// arithmetic in degree `≳ 64` costs far more than certified bracketing.
pub fn invert_base_numeric(d: &EventuallyPeriodicWord, x: &Real) -> Result<Real> {
    invert_base_with(d, x, false)
}

fn invert_base_with(d: &EventuallyPeriodicWord, x: &Real, exact: bool) -> Result<Real> {
    if d.is_zero() {
        return Err(Error::Domain("every base expands 0 as 0^∞; no base is determined".into()));
    }
    let m = d.alphabet();
    let top = BigRational::from_integer(BigInt::from(m.size()));
    let (num, den) = reduced_pi_polys(d);
    // π at q = M+1 is the infimum over the range
    let at_top = num.eval(&top) / den.eval(&top);
    match x.cmp_rational(&at_top)? {
        Ordering::Less => {
            return Err(Error::NoRoot(format!("x is below π_(M+1)(d) = {at_top}")))
        }
        Ordering::Equal => return Ok(Real::Rational(top)),
        Ordering::Greater => {}
    }
    if d.ends_with_zeros() {
        // π_q(d) increases to the digit sum as q → 1+
        let sum: u64 = d.preperiod().digits().iter().map(|&v| v as u64).sum();
        if x.cmp_i64(sum as i64)? != Ordering::Less {
            return Err(Error::NoRoot(format!("x is not below the digit sum {sum}, the limit at q → 1+")));
        }
    }
    if let Some(xr) = x.as_rational().filter(|_| exact) {
        let f = &num - &den.scale(&xr);
        let root = crate::algebraic::AlgebraicField::root_in(&f, &Dyadic::from_i64(1), &Dyadic::from_i64(m.size() as i64))?;
        return Ok(Real::from_root(root));
    }
    let x = x.clone();
    let (dn, dd) = (num.derivative(), den.derivative());
    let hi = Dyadic::from_i64(m.size() as i64);
    Ok(Real::computable(move |prec| {
        let f = |t: &Dyadic, w: u32| -> Result<(PrecisionReal, Option<Dyadic>)> {
            let n = eval_at(&num, t, w);
            let dv = eval_at(&den, t, w);
            let v = n.div_i(&dv)?.sub_i(&x.enclose(w)?);
            // (N'D − ND') / D²
            let sl = eval_at(&dn, t, w)
                .mul_i(&dv)
                .sub_i(&n.mul_i(&eval_at(&dd, t, w)))
                .div_i(&dv.mul_i(&dv))
                .ok()
                .map(|s| s.value());
            Ok((v, sl))
        };
        decreasing_root(&f, &Dyadic::from_i64(1), &hi, prec)
    }))
}

/// `invert_base` enclosed to radius `tol`.
pub fn invert_base_within(d: &EventuallyPeriodicWord, x: &Real, tol: &BigRational) -> Result<PrecisionReal> {
    invert_base(d, x)?.enclose_within(tol, 8 * expansion::DEFAULT_PRECISION_CAP)
}

/// The generalized golden ratio: `k + 1` for `M = 2k`, and the positive
/// root of `t² = (k+1)(t+1)` for `M = 2k + 1`.
pub fn golden_ratio_base(m: Alphabet) -> Real {
    let k = (m.m() / 2) as i64;
    if m.m() % 2 == 0 {
        Real::from_i64(k + 1)
    } else {
        let c = BigRational::from_integer(BigInt::from(k + 1));
        quadratic_root(&c, &c).expect("t² − (k+1)t − (k+1) has a positive root")
    }
}

/// How a constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Closed form, exact arithmetic.
    Exact,
    /// Certified enclosure of a defining equation.
    Certified,
    /// Numerical search whose correctness rests on a depth-bounded test.
    Oracle,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Certified => "certified",
            Provenance::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Constant {
    pub value: Real,
    pub provenance: Provenance,
}

/// `q_KL(1)`: the root of `Σ τ_i q^{-i} = 1`.
fn thue_morse_base() -> Real {
    let lo = Dyadic::from_rational(&BigRational::new(17.into(), 10.into()), 64, Rounding::Down);
    let hi = Dyadic::from_rational(&BigRational::new(19.into(), 10.into()), 64, Rounding::Up);
    Real::computable(move |prec| {
        let f = |t: &Dyadic, w: u32| -> Result<(PrecisionReal, Option<Dyadic>)> {
            let q = Interval::from_dyadic_bounds(t, t, w);
            let r = q.recip()?;
            // q^{-n}/(q − 1) < 2^{-w} once n ≥ (w + 4) / log2(1.7)
            let depth = ((w as f64 + 4.0) / 0.76) as usize + 8;
            let mut pow = Interval::from_i64(1, w);
            let mut acc = Interval::from_i64(0, w);
            let mut slope = Dyadic::from_i64(0);
            for i in 1..=depth {
                pow = &pow * &r;
                if thue_morse(i) == 1 {
                    acc = &acc + &pow;
                    slope = &slope - &(&pow.value() * &Dyadic::from_i64(i as i64));
                }
            }
            let tail_hi = pow.div_i(&q.sub_i(&Interval::from_i64(1, w)))?;
            let acc = &acc + &Interval::new(Dyadic::from_i64(0), tail_hi.hi().clone(), w);
            let slope = slope.div_rounded(t, w, Rounding::Down);
            Ok((acc.sub_i(&Interval::from_i64(1, w)), Some(slope)))
        };
        decreasing_root(&f, &lo, &hi, prec)
    })
}

/// α-prefix length for the `M ≥ 2` oracle at tolerance `tol`.
fn oracle_depth(q: f64, tol: f64) -> usize {
    let d = 2.0 * (1.0 / tol).ln() / q.ln() + 16.0;
    (d.ceil() as usize).clamp(32, 512)
}

/// Whether the strict window shift on the first `n` digits of `α(q)` has
/// positive entropy. Monotone in `q`; for large `n` it holds exactly when
/// `q` lies above a threshold that decreases to `q_KL`.
pub fn inner_shift_grows(q: &BigRational, m: Alphabet, n: usize) -> Result<bool> {
    let alpha = expansion::alpha_prefix(&Real::Rational(q.clone()), m, n)?;
    Ok(LexShiftAutomaton::build(&alpha, Strictness::Inner)?.has_positive_entropy())
}

/// Bisection for the smallest base whose α-window shift has positive
/// entropy. Returns a bracket `[a, b]` of width at most `tol` with the
/// predicate false at `a` and true at `b`.
fn komornik_loreti_oracle(m: Alphabet, tol: f64) -> Result<(BigRational, BigRational)> {
    let mut a = golden_ratio_base(m).enclose(64)?.bounds().1;
    let mut b = BigRational::from_integer(BigInt::from(m.size()));
    let n = oracle_depth(a.to_f64().unwrap_or(2.0), tol);
    let tol_q = BigRational::from_float(tol).filter(|t| t.is_positive()).ok_or_else(|| Error::Domain("tolerance must be positive".into()))?;
    while &b - &a > tol_q {
        let mid = Dyadic::from_rational(&((&a + &b) / BigRational::from_integer(2.into())), 160, Rounding::Down).to_rational();
        if mid <= a || mid >= b {
            break;
        }
        if inner_shift_grows(&mid, m, n)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok((a, b))
}

/// `q_KL(M)`, the smallest univoque base. Certified for `M = 1`; an oracle
/// bracket of width `tol` for `M ≥ 2`.
pub fn komornik_loreti_base(m: Alphabet, tol: f64) -> Result<Constant> {
    if m.m() == 1 {
        return Ok(Constant {
            value: thue_morse_base(),
            provenance: Provenance::Certified,
        });
    }
    let (a, b) = komornik_loreti_oracle(m, tol)?;
    let e = Interval::from_rational_bounds(&a, &b, 64);
    Ok(Constant {
        value: Real::computable(move |_| Ok(e.clone())),
        provenance: Provenance::Oracle,
    })
}

#[derive(Clone, Debug)]
pub struct CriticalConstants {
    pub m: Alphabet,
    pub q_g: Real,
    pub q_kl: Real,
    pub x_g: Real,
    pub x_kl: Real,
    pub q_kl_provenance: Provenance,
}

impl CriticalConstants {
    /// `(name, value)` in the order q_G, q_KL, x_G, x_KL.
    pub fn named(&self) -> [(&'static str, &Real); 4] {
        [("q_G", &self.q_g), ("q_KL", &self.q_kl), ("x_G", &self.x_g), ("x_KL", &self.x_kl)]
    }
}

pub fn critical_constants(m: Alphabet, tol: f64) -> Result<CriticalConstants> {
    let q_g = golden_ratio_base(m);
    let kl = komornik_loreti_base(m, tol)?;
    let mm = Real::from_i64(m.m() as i64);
    let x_g = mm.div(&q_g.add_i64(-1))?;
    let x_kl = mm.div(&kl.value.add_i64(-1))?;
    Ok(CriticalConstants {
        m,
        q_g,
        q_kl: kl.value,
        x_g,
        x_kl,
        q_kl_provenance: kl.provenance,
    })
}

/// `|a − b| ≤ tol` for two enclosures, decided on their bounds.
pub fn within(a: &PrecisionReal, b: &PrecisionReal, tol: f64) -> bool {
    let (alo, ahi) = a.bounds();
    let (blo, bhi) = b.bounds();
    let t = BigRational::from_float(tol).unwrap_or_else(BigRational::zero);
    (&ahi - &blo).abs() <= t && (&bhi - &alo).abs() <= t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rational;

    fn m(v: u32) -> Alphabet {
        Alphabet::new(v).unwrap()
    }

    #[test]
    fn q_of_x_examples() {
        assert_eq!(q_of_x(&Real::from_i64(1), m(1)).unwrap().as_rational(), Some(rational(2, 1)));
        assert_eq!(q_of_x(&Real::from_i64(2), m(1)).unwrap().as_rational(), Some(rational(3, 2)));
        assert_eq!(q_of_x(&Real::from_ratio(1, 2), m(3)).unwrap().as_rational(), Some(rational(4, 1)));
        assert!(q_of_x(&Real::from_i64(0), m(1)).is_err());
    }

    #[test]
    fn golden_ratio_examples() {
        assert!((golden_ratio_base(m(1)).to_f64() - 1.618_033_988_7).abs() < 1e-10);
        assert_eq!(golden_ratio_base(m(2)).as_rational(), Some(rational(2, 1)));
        assert!((golden_ratio_base(m(3)).to_f64() - (1.0 + 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn invert_geometric_and_golden() {
        let d = EventuallyPeriodicWord::parse("(1)", m(1)).unwrap();
        let q = invert_base(&d, &Real::from_i64(2)).unwrap();
        assert_eq!(q.as_rational(), Some(rational(3, 2)));
        let d = EventuallyPeriodicWord::parse("(10)", m(1)).unwrap();
        let q = invert_base(&d, &Real::from_i64(1)).unwrap();
        let phi = golden_ratio_base(m(1));
        assert_eq!(q.cmp_real(&phi).unwrap(), Ordering::Equal);
    }

    #[test]
    fn invert_out_of_range() {
        let d = EventuallyPeriodicWord::parse("1", m(1)).unwrap();
        assert!(matches!(invert_base(&d, &Real::from_i64(1)), Err(Error::NoRoot(_))));
        assert!(matches!(invert_base(&d, &Real::from_ratio(1, 3)), Err(Error::NoRoot(_))));
        let z = EventuallyPeriodicWord::parse("0", m(1)).unwrap();
        assert!(invert_base(&z, &Real::from_i64(1)).is_err());
    }

    #[test]
    fn invert_with_computable_target() {
        let d = EventuallyPeriodicWord::parse("1(10)", m(1)).unwrap();
        let x = Real::computable(|p| Ok(Interval::from_i64(1, p)));
        let q = invert_base(&d, &x).unwrap();
        let exact = invert_base(&d, &Real::from_i64(1)).unwrap();
        let a = q.enclose(200).unwrap();
        let b = exact.enclose(200).unwrap();
        assert!(within(&a, &b, 1e-50));
    }

    #[test]
    fn thue_morse_constant() {
        let q = komornik_loreti_base(m(1), 1e-12).unwrap();
        assert_eq!(q.provenance, Provenance::Certified);
        let e = q.value.enclose(256).unwrap();
        assert!((e.mid_f64() - 1.787_231_650).abs() < 1e-8);
        assert!(e.radius_f64() < 1e-70);
    }

    /// Root of `Σ λ_i q^{-i} = 1` for the generalized Thue–Morse digits, by
    /// plain f64 bisection; independent of the oracle search.
    fn generalized_thue_morse_root(mm: u32) -> f64 {
        let k = (mm / 2) as i32;
        let digit = |i: usize| -> f64 {
            let t = |j: usize| thue_morse(j) as i32;
            (if mm % 2 == 0 { k + t(i) - t(i - 1) } else { k + t(i) }) as f64
        };
        let f = |q: f64| (1..400).map(|i| digit(i) * q.powi(-(i as i32))).sum::<f64>() - 1.0;
        let (mut lo, mut hi) = (1.0 + 1e-9, mm as f64 + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        lo
    }

    #[test]
    fn oracle_matches_generalized_thue_morse() {
        for mm in 2..=4 {
            let c = komornik_loreti_base(m(mm), 1e-9).unwrap();
            assert_eq!(c.provenance, Provenance::Oracle);
            let e = c.value.enclose(64).unwrap();
            let want = generalized_thue_morse_root(mm);
            assert!(
                (e.mid_f64() - want).abs() < 1e-8,
                "M={mm}: oracle {e} vs {want}"
            );
        }
    }
}
