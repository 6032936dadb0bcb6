//! Isolated points of `𝒰(x)` for `M = 1`, built from the Thue–Morse
//! sequence and the bases `q_n` with `α(q_n) = (τ_1 … τ_{2^n}⁻)^∞`,
//! which increase to `q_KL`.
//!
//! Every word here ends with `α(q_n)` or its reflection; both are shifts
//! of the same periodic sequence, so checks only ever compare eventually
//! periodic words and are exact.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion::{is_unique_expansion, pi_q, Uniqueness};
use crate::real::Real;
use crate::solver::{golden_ratio_base, invert_base, invert_base_numeric, q_of_x, within};
use crate::words::{thue_morse, Alphabet, Digit, EventuallyPeriodicWord, Word};

/// α-prefix length for uniqueness checks in certificates.
pub const CERTIFICATE_DEPTH: usize = 256;

fn binary() -> Alphabet {
    Alphabet::new(1).expect("M = 1 is valid")
}

fn require_binary(m: Alphabet) -> Result<()> {
    if m.m() != 1 {
        return Err(Error::Unsupported(format!(
            "isolated-point families are defined for M = 1 only (got M = {})",
            m.m()
        )));
    }
    Ok(())
}

/// `τ_i`, the parity of the binary digit sum of `i`.
pub fn tau(i: usize) -> Digit {
    thue_morse(i)
}

/// `τ_1 … τ_{2^n}`.
pub fn tau_block(n: u32) -> Word {
    let len = 1usize << n;
    Word::new((1..=len).map(tau).collect(), binary()).expect("binary digits")
}

/// `(τ_1 … τ_{2^n})⁻`, the period of `α(q_n)`.
pub fn bifurcation_word(n: u32) -> Word {
    tau_block(n).minus_one().expect("τ_{2^n} = 1 for n ≥ 1")
}

/// `α(q_n)` as a sequence.
pub fn alpha_q(n: u32) -> EventuallyPeriodicWord {
    bifurcation_word(n).periodic().expect("period is nonempty")
}

/// A base from the increasing sequence `q_1 < q_2 < … → q_KL`.
#[derive(Clone, Debug)]
pub struct BifurcationBase {
    pub n: u32,
    pub alpha_word: Word,
    pub q: Real,
}

/// Largest `n` for which `q_n` is kept as an exact algebraic number.
pub const EXACT_BASE_MAX_N: u32 = 5;

/// `q_n`, the root of `π_q((τ_1 … τ_{2^n}⁻)^∞) = 1`: exact for
/// `n ≤ EXACT_BASE_MAX_N`, a certified computable real beyond.
pub fn bifurcation_base(n: u32) -> Result<BifurcationBase> {
    if n == 0 {
        return Err(Error::Domain("q_n is defined for n ≥ 1".into()));
    }
    let alpha_word = bifurcation_word(n);
    let one = Real::from_i64(1);
    let q = if n <= EXACT_BASE_MAX_N {
        invert_base(&alpha_q(n), &one)?
    } else {
        invert_base_numeric(&alpha_q(n), &one)?
    };
    Ok(BifurcationBase { n, alpha_word, q })
}

fn k_power(w: &Word, k: usize) -> Word {
    w.repeat(k)
}

/// `reflect(τ_1 … τ_{2^n})⁺`.
fn reflected_plus(n: u32) -> Word {
    tau_block(n).reflect().plus_one().expect("reflected block ends in 0")
}

/// Which construction a word or certificate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    C,
    D,
    /// `x ≥ x_G`, where `𝒰(x) = {q_x}`.
    Singleton,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::C => "C",
            Family::D => "D",
            Family::Singleton => "SINGLETON",
        }
    }
}

/// `c_{n,k} = τ_1…τ_{2^{n−1}} (reflect(τ_1…τ_{2^{n−1}})⁺)^k (reflect(τ_1…τ_{2^n})⁺)^∞`;
/// `k = None` gives `c_{n,∞} = τ_1…τ_{2^{n−1}} (reflect(τ_1…τ_{2^{n−1}})⁺)^∞`.
pub fn c_family(n: u32, k: Option<usize>) -> Result<EventuallyPeriodicWord> {
    if n == 0 || k == Some(0) {
        return Err(Error::Domain("c_{n,k} needs n ≥ 1 and k ≥ 1".into()));
    }
    let head = tau_block(n - 1);
    let step = reflected_plus(n - 1);
    match k {
        None => EventuallyPeriodicWord::from_words(&head, &step),
        Some(k) => EventuallyPeriodicWord::from_words(&head.concat(&k_power(&step, k)), &reflected_plus(n)),
    }
}

/// `d_{n,k} = τ_1…τ_{2^{n−1}} (reflect(τ_1…τ_{2^{n−1}})⁺)^k reflect(τ_1…τ_{2^{n−2}})⁺ (reflect(τ_1…τ_{2^n})⁺)^∞`.
pub fn d_family(n: u32, k: usize) -> Result<EventuallyPeriodicWord> {
    if n < 2 || k == 0 {
        return Err(Error::Domain("d_{n,k} needs n ≥ 2 and k ≥ 1".into()));
    }
    let pre = tau_block(n - 1)
        .concat(&k_power(&reflected_plus(n - 1), k))
        .concat(&reflected_plus(n - 2));
    EventuallyPeriodicWord::from_words(&pre, &reflected_plus(n))
}

pub fn family_word(family: Family, n: u32, k: usize) -> Result<EventuallyPeriodicWord> {
    match family {
        Family::C => c_family(n, Some(k)),
        Family::D => d_family(n, k),
        Family::Singleton => Err(Error::Domain("the singleton branch has no word family".into())),
    }
}

/// First `j` with `σ^j(w) = α(q_n)` or `reflect(α(q_n))`.
pub fn tail_start(w: &EventuallyPeriodicWord, n: u32) -> Option<usize> {
    let a = alpha_q(n);
    let r = a.reflect();
    (0..=w.preperiod_len() + w.period_len()).find(|&j| {
        let t = w.shift(j);
        t == a || t == r
    })
}

/// Membership in `𝐔*_{q_{n+1}}`: for every `j ≥ 1`, `σ^j(w) ≺ α(q_{n+1})`
/// when `w_j = 0` and `σ^j(w) ≻ reflect(α(q_{n+1}))` when `w_j = 1`; and
/// `w` ends with `α(q_n)` up to reflection. The clauses are conditional:
/// the unconditional two-sided bound fails on runs such as `c_{1,2} = 1^3(01)^∞`.
pub fn verify_member_star(w: &EventuallyPeriodicWord, n: u32) -> bool {
    if n == 0 || w.alphabet().m() != 1 {
        return false;
    }
    let hi = alpha_q(n + 1);
    let lo = hi.reflect();
    let windows = w.tails().all(|(d, t)| if d == 0 { t < hi } else { t > lo });
    windows && tail_start(w, n).is_some()
}

/// `z_n = π_{q_n}(c_{n,∞})`.
pub fn z_point(n: u32) -> Result<Real> {
    pi_q(&c_family(n, None)?, &bifurcation_base(n)?.q)
}

/// An interval `(π_{q_{n+1}}(w), π_{q_n}(w))` of `x` values whose `𝒰(x)`
/// has an isolated point, for `w = c_{n,k}` or `d_{n,k}`.
#[derive(Clone, Debug)]
pub struct IsoInterval {
    pub lo: Real,
    pub hi: Real,
    pub n: u32,
    pub k: usize,
    pub family: Family,
}

fn bases(n_max: u32) -> Result<Vec<Real>> {
    // index i holds q_{i+1}
    (1..=n_max + 1).into_par_iter().map(|n| Ok(bifurcation_base(n)?.q)).collect()
}

fn interval_for(qs: &[Real], family: Family, n: u32, k: usize) -> Result<IsoInterval> {
    let w = family_word(family, n, k)?;
    let (q_n, q_next) = (&qs[n as usize - 1], &qs[n as usize]);
    Ok(IsoInterval {
        lo: pi_q(&w, q_next)?,
        hi: pi_q(&w, q_n)?,
        n,
        k,
        family,
    })
}

/// All c-intervals for `n ≤ n_max`, `k ≤ k_max`, then all d-intervals for
/// `2 ≤ n ≤ n_max`, each group ordered by `(n, k)`.
pub fn iso_intervals(n_max: u32, k_max: usize) -> Result<Vec<IsoInterval>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let qs = bases(n_max)?;
    let mut keys: Vec<(Family, u32, usize)> = Vec::new();
    for family in [Family::C, Family::D] {
        let first = if family == Family::C { 1 } else { 2 };
        for n in first..=n_max {
            keys.extend((1..=k_max).map(|k| (family, n, k)));
        }
    }
    keys.par_iter().map(|&(f, n, k)| interval_for(&qs, f, n, k)).collect()
}

/// Evidence that `p` is an isolated point of `𝒰(x)`.
#[derive(Clone, Debug)]
pub struct IsolationCertificate {
    pub x: Real,
    pub p: Real,
    pub n: u32,
    pub k: usize,
    pub family: Family,
    pub expansion: EventuallyPeriodicWord,
    /// Any base of `𝒰(x) ∩ (q_n, q_{n+1})` whose expansion agrees with this
    /// one on this many digits is `p` itself.
    pub match_length: usize,
}

impl IsolationCertificate {
    /// Re-derive every invariant at `prec` bits: `p ∈ (q_n, q_{n+1})`,
    /// `π_p(expansion) = x`, uniqueness at `p`, and the `𝐔*` tail.
    pub fn verify(&self, prec: u32) -> Result<bool> {
        let again = invert_base(&self.expansion, &self.x)?.enclose(prec)?;
        let tol = 2f64.powi(2 - prec.min(1000) as i32);
        if !within(&again, &self.p.enclose(prec)?, tol) {
            return Ok(false);
        }
        if is_unique_expansion(&self.expansion, &self.p, CERTIFICATE_DEPTH)? != Uniqueness::Unique {
            return Ok(false);
        }
        if self.family == Family::Singleton {
            return Ok(self.p.cmp_real(&q_of_x(&self.x, binary())?)? == Ordering::Equal);
        }
        let q_n = bifurcation_base(self.n)?.q;
        let q_next = bifurcation_base(self.n + 1)?.q;
        let inside = self.p.cmp_real(&q_n)? == Ordering::Greater && self.p.cmp_real(&q_next)? == Ordering::Less;
        Ok(inside && verify_member_star(&self.expansion, self.n))
    }
}

fn strictly_inside(x: &Real, iv: &IsoInterval) -> Result<bool> {
    Ok(x.cmp_real(&iv.lo)? == Ordering::Greater && x.cmp_real(&iv.hi)? == Ordering::Less)
}

fn certify(x: &Real, qs: &[Real], iv: &IsoInterval) -> Result<Option<IsolationCertificate>> {
    let w = family_word(iv.family, iv.n, iv.k)?;
    let p = invert_base(&w, x)?;
    let (q_n, q_next) = (&qs[iv.n as usize - 1], &qs[iv.n as usize]);
    if p.cmp_real(q_n)? != Ordering::Greater || p.cmp_real(q_next)? != Ordering::Less {
        return Ok(None);
    }
    let start = tail_start(&w, iv.n).ok_or_else(|| Error::Precondition("family word lacks the α(q_n) tail".into()))?;
    let cert = IsolationCertificate {
        x: x.clone(),
        p,
        n: iv.n,
        k: iv.k,
        family: iv.family,
        match_length: start + (1usize << iv.n),
        expansion: w,
    };
    Ok(cert.verify(128)?.then_some(cert))
}

/// Find `(n, k, family)` whose interval contains `x > 1` and certify the
/// isolated base. The c-family is searched first; the d-family covers the
/// points `z_n` the c-intervals miss. `x ≥ x_G` takes the singleton branch.
pub fn isolate(x: &Real, m: Alphabet, n_max: u32, k_max: usize) -> Result<Option<IsolationCertificate>> {
    require_binary(m)?;
    if x.cmp_i64(1)? != Ordering::Greater {
        return Err(Error::Domain("isolation search needs x > 1".into()));
    }
    let x_g = Real::from_i64(1).div(&golden_ratio_base(m).add_i64(-1))?;
    if x.cmp_real(&x_g)? != Ordering::Less {
        let cert = IsolationCertificate {
            x: x.clone(),
            p: q_of_x(x, m)?,
            n: 0,
            k: 0,
            family: Family::Singleton,
            expansion: EventuallyPeriodicWord::constant(1, m),
            match_length: 0,
        };
        return Ok(cert.verify(128)?.then_some(cert));
    }
    let qs = bases(n_max)?;
    for family in [Family::C, Family::D] {
        let first = if family == Family::C { 1 } else { 2 };
        for n in first..=n_max {
            for k in 1..=k_max {
                let iv = interval_for(&qs, family, n, k)?;
                if strictly_inside(x, &iv)? {
                    if let Some(c) = certify(x, &qs, &iv)? {
                        return Ok(Some(c));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `isolate` with the default search bounds `n ≤ 6`, `k ≤ 8`.
pub fn isolate_default(x: &Real) -> Result<Option<IsolationCertificate>> {
    isolate(x, binary(), 6, 8)
}
