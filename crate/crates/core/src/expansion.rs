//! The projection `π_q`, greedy and quasi-greedy expansions, `α(q)` and the
//! lexicographic uniqueness test.
//!
//! Expansions run in one of two modes. When `x` and `q` are rational or lie
//! in a common algebraic field, residuals are exact, digit boundaries are
//! decided by exact sign tests, and a repeated residual proves the expansion
//! eventually periodic. Otherwise residuals are enclosed in intervals and a
//! digit is emitted only when the enclosure of `q·r` sits inside a single
//! digit cell; precision doubles until that happens or the cap is reached.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::Poly;
use crate::real::Real;
use crate::scalar::Scalar;
use crate::words::{Alphabet, Digit, EventuallyPeriodicWord, Sequence, Word};
use crate::PrecisionReal;

pub const DEFAULT_ALPHA_DEPTH: usize = 64;
pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansionKind {
    Greedy,
    QuasiGreedy,
}

#[derive(Clone, Debug)]
pub struct ExpansionOptions {
    /// Starting precision for interval mode.
    pub precision_bits: u32,
    /// Interval mode fails beyond this precision.
    pub precision_cap: u32,
    /// In exact mode, keep iterating past the requested length up to this
    /// many digits while looking for a repeated residual.
    pub cycle_search: usize,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            precision_bits: DEFAULT_PRECISION_BITS,
            precision_cap: DEFAULT_PRECISION_CAP,
            cycle_search: 256,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpansionResult {
    /// The first `n` digits.
    pub digits: Word,
    pub kind: ExpansionKind,
    /// Encloses `x − π_q(digits·0^∞)`.
    pub residual_bound: PrecisionReal,
    /// The whole expansion, when it was proved eventually periodic.
    pub exact: Option<EventuallyPeriodicWord>,
}

/// Numerator and denominator of `π_t(d)` as polynomials in `t`:
/// `π_t(d) = N(t) / D(t)` with `D(t) = t^L (t^p − 1)`.
pub fn pi_polys(d: &EventuallyPeriodicWord) -> (Poly, Poly) {
    let l = d.preperiod_len();
    let p = d.period_len();
    let horner = |digits: &[Digit]| {
        // Σ a_i t^{len−i}
        let n = digits.len();
        Poly::new(
            (0..n)
                .map(|k| BigRational::from_integer(BigInt::from(digits[n - 1 - k])))
                .collect(),
        )
    };
    let a = horner(d.preperiod().digits());
    let b = horner(d.period().digits());
    let tp1 = &Poly::monomial(BigRational::one(), p) - &Poly::one();
    let num = &(&a * &tp1) + &b;
    let den = (&tp1).shift_up(l);
    (num, den)
}

fn eval_poly_real(p: &Poly, q: &Real) -> Real {
    let mut acc = Real::from_i64(0);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(q).add(&Real::Rational(c.clone()));
    }
    acc
}

fn check_base_interval<T: Scalar>(q: &Interval<T>) -> Result<()> {
    if *q.lo() > T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("base enclosure {q} is not above 1")))
    }
}

/// `π_q(d)` on an enclosure of `q`. Eventually periodic input uses the closed
/// form; streams are summed to `depth` with the tail bound `M q^{-depth}/(q−1)`
/// folded in.
pub fn pi_q_interval<T: Scalar>(d: &Sequence, q: &Interval<T>, depth: usize) -> Result<Interval<T>> {
    check_base_interval(q)?;
    let prec = q.precision_bits();
    match d {
        Sequence::Periodic(w) => {
            let (num, den) = pi_polys(w);
            num.eval_interval(q).div_i(&den.eval_interval(q))
        }
        Sequence::Stream(s) => {
            let r = q.recip()?;
            let mut pow = Interval::<T>::from_i64(1, prec);
            let mut acc = Interval::<T>::from_i64(0, prec);
            for i in 0..depth {
                pow = &pow * &r;
                let di = s.digit(i);
                if di != 0 {
                    acc = &acc + &pow.scale_i64(di as i64);
                }
            }
            let qm1 = q.sub_i(&Interval::from_i64(1, prec));
            let tail_hi = pow.scale_i64(s.alphabet().m() as i64).div_i(&qm1)?;
            let tail = Interval::new(T::zero(), tail_hi.hi().clone(), prec);
            Ok(&acc + &tail)
        }
    }
}

/// `π_q(d)` as a real: exact when `q` is rational or algebraic.
pub fn pi_q(d: &EventuallyPeriodicWord, q: &Real) -> Result<Real> {
    if q.cmp_i64(1)? != Ordering::Greater {
        return Err(Error::Domain("π_q needs q > 1".into()));
    }
    if q.is_exact() {
        let (num, den) = pi_polys(d);
        return eval_poly_real(&num, q).div(&eval_poly_real(&den, q));
    }
    let d = Sequence::Periodic(d.clone());
    let q = q.clone();
    Ok(Real::computable(move |prec| {
        let w = prec + 32;
        pi_q_interval(&d, &q.enclose(w)?, 0).map(|e| e.with_precision(prec))
    }))
}

/// `π_q(d)` for a stream, summed to `depth` digits with the tail bound folded
/// into the enclosure.
pub fn pi_q_stream(d: &Sequence, q: &Real, depth: usize, prec: u32) -> Result<PrecisionReal> {
    pi_q_interval(d, &q.enclose(prec)?, depth)
}

/// Exact residuals are keyed by their polynomial in the field generator.
#[derive(PartialEq, Eq, Hash)]
struct ResidualKey(Poly);

fn residual_key(r: &Real) -> Option<ResidualKey> {
    match r {
        Real::Rational(q) => Some(ResidualKey(Poly::constant(q.clone()))),
        Real::Algebraic(e) => Some(ResidualKey(e.poly().clone())),
        Real::Computable(_) => None,
    }
}

/// `(⌊t⌋, t is an integer)`, decided exactly for exact `t`.
fn floor_exact(t: &Real) -> Result<(BigInt, bool)> {
    if let Some(q) = t.as_rational() {
        let f = q.floor().to_integer();
        let is_int = q.is_integer();
        return Ok((f, is_int));
    }
    let e = t.enclose(64)?;
    let (lo, hi) = e.bounds();
    let k0 = lo.floor().to_integer();
    let k1 = hi.floor().to_integer();
    let mut j = k1.clone();
    while j > k0 {
        match t.cmp_rational(&BigRational::from_integer(j.clone()))? {
            Ordering::Greater => return Ok((j, false)),
            Ordering::Equal => return Ok((j, true)),
            Ordering::Less => j -= 1,
        }
    }
    let is_int = t.cmp_rational(&BigRational::from_integer(k0.clone()))? == Ordering::Equal;
    Ok((k0, is_int))
}

fn choose_digit(floor: &BigInt, is_int: bool, kind: ExpansionKind, m: Digit) -> Digit {
    let f = match kind {
        ExpansionKind::Greedy => floor.clone(),
        ExpansionKind::QuasiGreedy if is_int => floor - 1,
        ExpansionKind::QuasiGreedy => floor.clone(),
    };
    if f < BigInt::zero() {
        0
    } else {
        f.to_u32().map_or(m, |v| v.min(m as u32) as Digit)
    }
}

/// Common field for two exact reals, if any.
fn exact_pair(x: &Real, q: &Real) -> Option<(Real, Real)> {
    match (x, q) {
        (Real::Computable(_), _) | (_, Real::Computable(_)) => None,
        (Real::Algebraic(a), Real::Algebraic(b)) => {
            crate::algebraic::FieldElement::unify(a, b).map(|(a, b)| (Real::Algebraic(a), Real::Algebraic(b)))
        }
        _ => Some((x.clone(), q.clone())),
    }
}

fn check_domain(x: &Real, q: &Real, m: Alphabet, kind: ExpansionKind) -> Result<()> {
    if q.cmp_i64(1)? != Ordering::Greater {
        return Err(Error::Domain("base must exceed 1".into()));
    }
    if q.cmp_i64(m.size() as i64)? == Ordering::Greater {
        return Err(Error::Domain(format!("base exceeds M+1 = {}", m.size())));
    }
    let xs = x.sign()?;
    match kind {
        ExpansionKind::Greedy if xs == Ordering::Less => {
            return Err(Error::Domain("x must be non-negative".into()))
        }
        ExpansionKind::QuasiGreedy if xs != Ordering::Greater => {
            return Err(Error::Domain("quasi-greedy expansion needs x > 0".into()))
        }
        _ => {}
    }
    // x ≤ M/(q−1), equivalently x(q−1) ≤ M; beyond it q exceeds q_x
    let lhs = x.mul(&q.add_i64(-1));
    if lhs.cmp_i64(m.m() as i64)? == Ordering::Greater {
        return Err(Error::Domain(
            "x exceeds M/(q−1): the base lies above q_x where expansions are undefined".into(),
        ));
    }
    Ok(())
}

/// Greedy or quasi-greedy `q`-expansion of `x`, first `n` digits.
pub fn expand(
    x: &Real,
    q: &Real,
    m: Alphabet,
    n: usize,
    kind: ExpansionKind,
    opts: &ExpansionOptions,
) -> Result<ExpansionResult> {
    check_domain(x, q, m, kind)?;
    match exact_pair(x, q) {
        Some((x, q)) => expand_exact(&x, &q, m, n, kind, opts),
        None => expand_escalating(x, q, m, n, kind, opts),
    }
}

fn expand_exact(
    x: &Real,
    q: &Real,
    m: Alphabet,
    n: usize,
    kind: ExpansionKind,
    opts: &ExpansionOptions,
) -> Result<ExpansionResult> {
    let mut seen: HashMap<ResidualKey, usize> = HashMap::new();
    let mut digits: Vec<Digit> = Vec::new();
    let mut r = x.clone();
    let limit = n.max(opts.cycle_search);
    let mut exact = None;
    while digits.len() < limit {
        if let Some(key) = residual_key(&r) {
            let k = digits.len();
            if let Some(&j) = seen.get(&key) {
                exact = Some(EventuallyPeriodicWord::new(
                    digits[..j].to_vec(),
                    digits[j..k].to_vec(),
                    m,
                )?);
                break;
            }
            seen.insert(key, k);
        }
        let t = q.mul(&r);
        let (fl, is_int) = floor_exact(&t)?;
        let d = choose_digit(&fl, is_int, kind, m.m());
        r = t.add_i64(-(d as i64));
        digits.push(d);
    }
    let prefix: Vec<Digit> = match &exact {
        Some(w) => (0..n).map(|i| w.digit(i)).collect(),
        None => digits[..n].to_vec(),
    };
    let word = Word::new(prefix, m)?;
    let residual = x.sub(&pi_q(&word.then_zeros(), q)?);
    Ok(ExpansionResult {
        digits: word,
        kind,
        residual_bound: residual.enclose(opts.precision_bits)?,
        exact,
    })
}

fn expand_escalating(
    x: &Real,
    q: &Real,
    m: Alphabet,
    n: usize,
    kind: ExpansionKind,
    opts: &ExpansionOptions,
) -> Result<ExpansionResult> {
    let mut prec = opts.precision_bits.max(64);
    loop {
        let xe = x.enclose(prec)?;
        let qe = q.enclose(prec)?;
        match expand_interval(&xe, &qe, m, n, kind)? {
            Some(digits) => {
                let word = Word::new(digits, m)?;
                let approx = pi_q_interval(&Sequence::Periodic(word.then_zeros()), &qe, 0)?;
                return Ok(ExpansionResult {
                    digits: word,
                    kind,
                    residual_bound: &xe - &approx,
                    exact: None,
                });
            }
            None if prec >= opts.precision_cap => {
                return Err(Error::PrecisionExhausted {
                    bits: prec,
                    context: "a digit boundary could not be separated".into(),
                })
            }
            None => prec = (prec * 2).min(opts.precision_cap),
        }
    }
}

/// One pass of the digit recursion on enclosures. `Ok(None)` means some
/// digit was undecided at this precision.
pub fn expand_interval<T: Scalar>(
    x: &Interval<T>,
    q: &Interval<T>,
    m: Alphabet,
    n: usize,
    kind: ExpansionKind,
) -> Result<Option<Vec<Digit>>> {
    check_base_interval(q)?;
    let mm = m.m();
    let mut r = x.clone();
    let mut digits = Vec::with_capacity(n);
    for _ in 0..n {
        let t = q * &r;
        let (lo, hi) = match (t.lo().floor_int(), t.hi().floor_int()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(None),
        };
        let d = match kind {
            ExpansionKind::Greedy => {
                let a = choose_digit(&lo, false, kind, mm);
                let b = choose_digit(&hi, false, kind, mm);
                if a != b || *t.hi() < T::zero() {
                    return Ok(None);
                }
                a
            }
            ExpansionKind::QuasiGreedy => {
                // the digit is min(M, ⌈t⌉ − 1); an integer endpoint counts
                // as undecided unless both ends share the same cell
                let lo_int = is_integer(t.lo());
                let a = choose_digit(&lo, lo_int, kind, mm);
                let hi_int = is_integer(t.hi());
                let b = choose_digit(&hi, hi_int, kind, mm);
                if a != b || !t.is_positive() {
                    return Ok(None);
                }
                a
            }
        };
        r = &t - &Interval::from_i64(d as i64, t.precision_bits());
        digits.push(d);
    }
    Ok(Some(digits))
}

fn is_integer<T: Scalar>(v: &T) -> bool {
    v.to_rational().is_some_and(|r| r.is_integer())
}

pub fn greedy_expand(x: &Real, q: &Real, m: Alphabet, n: usize) -> Result<ExpansionResult> {
    expand(x, q, m, n, ExpansionKind::Greedy, &ExpansionOptions::default())
}

pub fn quasi_greedy_expand(x: &Real, q: &Real, m: Alphabet, n: usize) -> Result<ExpansionResult> {
    expand(x, q, m, n, ExpansionKind::QuasiGreedy, &ExpansionOptions::default())
}

/// `α(q)`, the quasi-greedy expansion of 1.
pub fn alpha(q: &Real, m: Alphabet, n: usize) -> Result<ExpansionResult> {
    alpha_with(q, m, n, &ExpansionOptions::default())
}

pub fn alpha_with(q: &Real, m: Alphabet, n: usize, opts: &ExpansionOptions) -> Result<ExpansionResult> {
    expand(&Real::from_i64(1), q, m, n, ExpansionKind::QuasiGreedy, opts)
}

/// The first `n` digits of `α(q)`. See [`expansion_prefix`].
pub fn alpha_prefix(q: &Real, m: Alphabet, n: usize) -> Result<Word> {
    expansion_prefix(&Real::from_i64(1), q, m, n, ExpansionKind::QuasiGreedy)
}

/// The first `n` digits of a greedy or quasi-greedy expansion, computed on
/// enclosures first and exactly only when a digit boundary is hit. Exact
/// arithmetic costs grow quadratically with `n`; enclosures do not.
pub fn expansion_prefix(x: &Real, q: &Real, m: Alphabet, n: usize, kind: ExpansionKind) -> Result<Word> {
    check_domain(x, q, m, kind)?;
    let bits = (n as f64 * (m.size() as f64).log2()) as u32 + 64;
    let opts = ExpansionOptions {
        precision_bits: bits,
        precision_cap: 2 * bits,
        ..ExpansionOptions::default()
    };
    match expand_escalating(x, q, m, n, kind, &opts) {
        Ok(r) => return Ok(r.digits),
        Err(Error::PrecisionExhausted { .. }) if x.is_exact() && q.is_exact() => {}
        Err(e) => return Err(e),
    }
    let opts = ExpansionOptions {
        cycle_search: n,
        ..ExpansionOptions::default()
    };
    Ok(expand(x, q, m, n, kind, &opts)?.digits)
}

/// What is known about `α(q)`: the whole sequence or a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaView {
    Exact(EventuallyPeriodicWord),
    Prefix(Word),
}

impl AlphaView {
    pub fn of(q: &Real, m: Alphabet, depth: usize) -> Result<AlphaView> {
        let opts = ExpansionOptions {
            cycle_search: depth.max(ExpansionOptions::default().cycle_search),
            ..ExpansionOptions::default()
        };
        let res = alpha_with(q, m, depth, &opts)?;
        Ok(match res.exact {
            Some(w) => AlphaView::Exact(w),
            None => AlphaView::Prefix(res.digits),
        })
    }

    pub fn prefix(&self, n: usize) -> Word {
        match self {
            AlphaView::Exact(w) => w.prefix(n),
            AlphaView::Prefix(p) => p.prefix(n),
        }
    }

    pub fn known_len(&self) -> Option<usize> {
        match self {
            AlphaView::Exact(_) => None,
            AlphaView::Prefix(p) => Some(p.len()),
        }
    }

    /// Compare a sequence against `α(q)`. `None` when they agree through the
    /// known prefix (or through `depth` digits for a stream).
    pub fn compare(&self, s: &Sequence, depth: usize) -> Option<Ordering> {
        match (self, s) {
            (AlphaView::Exact(a), Sequence::Periodic(w)) => Some(w.cmp(a)),
            _ => {
                let len = self.known_len().unwrap_or(depth).min(depth.max(self.known_len().unwrap_or(0)));
                let a = self.prefix(len);
                (0..a.len())
                    .map(|i| s.digit(i).cmp(&a.digits()[i]))
                    .find(|o| *o != Ordering::Equal)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Uniqueness {
    Unique,
    NotUnique,
    Undecided,
}

/// Apply the two clauses of the lexicographic characterization of `U_q`
/// to the tails of `d`.
pub fn uniqueness_against(d: &Sequence, alpha: &AlphaView, depth: usize) -> Uniqueness {
    let m = d.alphabet().m();
    let mut verdict = Uniqueness::Unique;
    let mut check = |tail: Sequence| match alpha.compare(&tail, depth) {
        Some(Ordering::Less) => true,
        Some(_) => false,
        None => {
            verdict = Uniqueness::Undecided;
            true
        }
    };
    let ok = match d {
        Sequence::Periodic(w) => w.tails().all(|(dn, tail)| {
            (dn == m || check(Sequence::Periodic(tail.clone())))
                && (dn == 0 || check(Sequence::Periodic(tail.reflect())))
        }),
        Sequence::Stream(s) => (1..=depth).all(|n| {
            let dn = s.digit(n - 1);
            let tail = s.shift(n);
            (dn == m || check(Sequence::Stream(tail.clone())))
                && (dn == 0 || check(Sequence::Stream(tail.reflect())))
        }),
    };
    if !ok {
        return Uniqueness::NotUnique;
    }
    match d {
        // a stream can only be refuted, never confirmed
        Sequence::Stream(_) => Uniqueness::Undecided,
        Sequence::Periodic(_) => verdict,
    }
}

/// First `n ≥ 1` at which a tail of the finite word `d` provably breaks the
/// uniqueness clauses against the prefix `alpha`, comparing only digits
/// present in both.
pub fn prefix_violation(d: &Word, alpha: &Word) -> Option<usize> {
    let m = d.alphabet().m();
    let dd = d.digits();
    let a = alpha.digits();
    let beats = |tail: &mut dyn Iterator<Item = Digit>| {
        for (x, y) in tail.zip(a.iter().copied()) {
            match x.cmp(&y) {
                Ordering::Less => return false,
                Ordering::Greater => return true,
                Ordering::Equal => {}
            }
        }
        false
    };
    (1..dd.len()).find(|&n| {
        let dn = dd[n - 1];
        (dn < m && beats(&mut dd[n..].iter().copied()))
            || (dn > 0 && beats(&mut dd[n..].iter().map(|&x| m - x)))
    })
}

/// Whether `d` is the unique `q`-expansion of `π_q(d)`.
/// Strict comparisons decided inside a prefix of `α(q)` hold for all of it,
/// so the cheap prefix is tried first and the exact sequence only on a tie.
pub fn is_unique_expansion(d: &EventuallyPeriodicWord, q: &Real, alpha_depth: usize) -> Result<Uniqueness> {
    let seq = Sequence::Periodic(d.clone());
    if let Ok(p) = alpha_prefix(q, d.alphabet(), alpha_depth) {
        let v = uniqueness_against(&seq, &AlphaView::Prefix(p), alpha_depth);
        if v != Uniqueness::Undecided || !q.is_exact() {
            return Ok(v);
        }
    }
    let alpha = AlphaView::of(q, d.alphabet(), alpha_depth)?;
    Ok(uniqueness_against(&seq, &alpha, alpha_depth))
}
