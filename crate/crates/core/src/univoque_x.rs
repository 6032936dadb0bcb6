//! The slice `𝒰(x)`: bases in which a fixed `x` has exactly one expansion.
//!
//! Membership of a base `p` is decided through its expansion: `p ∈ 𝒰(x)`
//! exactly when `Φ_x(p)` passes the lexicographic uniqueness test at `p`.
//! Witnesses therefore carry the expansion and recover the base from it.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dimension::{widen_down, widen_up, LexShiftAutomaton, Strictness};
use crate::error::{Error, Result};
use crate::expansion::{
    alpha_prefix, expand, expansion_prefix, is_unique_expansion, prefix_violation, ExpansionKind, ExpansionOptions,
    Uniqueness,
};
use crate::real::Real;
use crate::solver::{critical_constants, golden_ratio_base, invert_base, q_of_x, within};
use crate::words::{Alphabet, Digit, EventuallyPeriodicWord, Word};

/// α-prefix length used when verifying witnesses.
pub const DEFAULT_UNIQUENESS_DEPTH: usize = 128;

/// The four regimes of `𝒰(x)` as `x` crosses `1`, `x_KL` and `x_G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `x ≤ 1`: full Hausdorff dimension.
    FullDim,
    /// `1 < x < x_KL`: positive dimension.
    PositiveDim,
    /// `x_KL ≤ x < x_G`: countable, infinite.
    Countable,
    /// `x ≥ x_G`: only `q_x`.
    Singleton,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::FullDim => "FULL_DIM",
            Regime::PositiveDim => "POSITIVE_DIM",
            Regime::Countable => "COUNTABLE",
            Regime::Singleton => "SINGLETON",
        }
    }
}

/// A base `p ∈ 𝒰(x)` together with `Φ_x(p)`.
#[derive(Clone, Debug)]
pub struct MemberWitness {
    pub base: Real,
    pub expansion: EventuallyPeriodicWord,
    pub uniqueness_depth: usize,
}

impl MemberWitness {
    /// Recover the base from the expansion at `prec` bits and repeat the
    /// uniqueness test. Passing means the stored pair is consistent.
    pub fn verify(&self, x: &Real, prec: u32) -> Result<bool> {
        let again = invert_base(&self.expansion, x)?.enclose(prec)?;
        let mine = self.base.enclose(prec)?;
        let tol = 2f64.powi(2 - prec.min(1000) as i32);
        if !within(&again, &mine, tol) {
            return Ok(false);
        }
        Ok(is_unique_expansion(&self.expansion, &self.base, self.uniqueness_depth)? == Uniqueness::Unique)
    }
}

#[derive(Clone, Debug)]
pub struct RegimeClassification {
    pub x: Real,
    pub regime: Regime,
    /// Exactly one witness `(q_x, M^∞)` for `Singleton`, none otherwise.
    pub witnesses: Vec<MemberWitness>,
}

fn decided(r: Result<Ordering>, what: &str) -> Result<Ordering> {
    r.map_err(|e| match e {
        Error::PrecisionExhausted { .. } | Error::Undecidable(_) => {
            Error::Undecidable(format!("x straddles {what} at the available precision"))
        }
        other => other,
    })
}

/// The regime of `x`. Thresholds are compared with certified enclosures and
/// an unseparated comparison is an error. `tol` is the radius used for
/// `q_KL` when it comes from an oracle (`M ≥ 2`).
pub fn classify(x: &Real, m: Alphabet, tol: f64) -> Result<RegimeClassification> {
    if decided(x.sign(), "0")? != Ordering::Greater {
        return Err(Error::Domain("classification needs x > 0".into()));
    }
    let done = |regime, witnesses| Ok(RegimeClassification { x: x.clone(), regime, witnesses });
    if decided(x.cmp_i64(1), "1")? != Ordering::Greater {
        return done(Regime::FullDim, Vec::new());
    }
    let c = critical_constants(m, tol)?;
    if decided(x.cmp_real(&c.x_kl), "x_KL")? == Ordering::Less {
        return done(Regime::PositiveDim, Vec::new());
    }
    if decided(x.cmp_real(&c.x_g), "x_G")? == Ordering::Less {
        return done(Regime::Countable, Vec::new());
    }
    let witness = MemberWitness {
        base: q_of_x(x, m)?,
        expansion: EventuallyPeriodicWord::constant(m.m(), m),
        uniqueness_depth: DEFAULT_UNIQUENESS_DEPTH,
    };
    done(Regime::Singleton, vec![witness])
}

/// `α(q_G)` in closed form: `(k)^∞` for `M = 2k`, `((k+1)k)^∞` for `M = 2k+1`.
pub fn golden_alpha(m: Alphabet) -> EventuallyPeriodicWord {
    let k = m.m() / 2;
    let period = if m.m() % 2 == 0 { vec![k] } else { vec![k + 1, k] };
    EventuallyPeriodicWord::new(Vec::new(), period, m).expect("digits are at most M")
}

fn top_word(m: Alphabet, k: usize) -> Word {
    Word::new(vec![m.m(); k], m).expect("M is a digit")
}

/// Members `M^k α(q_G)` of `𝐔(x)` for `1 < x < x_G`, `k ≤ k_max`. Each base
/// `p_k` solves `π_{p_k}(M^k α(q_G)) = x`; those in `(q_G, q_x)` that pass
/// the uniqueness test are kept. The bases increase to `q_x`.
pub fn golden_tail_family(x: &Real, m: Alphabet, k_max: usize, depth: usize) -> Result<Vec<MemberWitness>> {
    let q_g = golden_ratio_base(m);
    let x_g = Real::from_i64(m.m() as i64).div(&q_g.add_i64(-1))?;
    if x.cmp_i64(1)? != Ordering::Greater || x.cmp_real(&x_g)? != Ordering::Less {
        return Err(Error::Domain("the golden tail family needs 1 < x < x_G".into()));
    }
    let q_x = q_of_x(x, m)?;
    let tail = golden_alpha(m);
    let mut out: Vec<MemberWitness> = Vec::new();
    for k in 0..=k_max {
        let w = tail.prepend(&top_word(m, k));
        let p = match invert_base(&w, x) {
            Ok(p) => p,
            Err(Error::NoRoot(_)) => continue,
            Err(e) => return Err(e),
        };
        if p.cmp_real(&q_g)? != Ordering::Greater || p.cmp_real(&q_x)? != Ordering::Less {
            continue;
        }
        if is_unique_expansion(&w, &p, depth)? != Uniqueness::Unique {
            continue;
        }
        if let Some(last) = out.last() {
            if p.cmp_real(&last.base)? != Ordering::Greater {
                return Err(Error::Precondition(format!("base for k = {k} does not exceed its predecessor")));
            }
        }
        out.push(MemberWitness {
            base: p,
            expansion: w,
            uniqueness_depth: depth,
        });
    }
    Ok(out)
}

/// The quasi-greedy `(M+1)`-expansion of `x`, exact when it is eventually
/// periodic within `search` digits.
fn base_top_expansion(x: &Real, m: Alphabet, search: usize) -> Result<(Word, Option<EventuallyPeriodicWord>)> {
    let top = Real::from_i64(m.size() as i64);
    if x.is_exact() {
        let opts = ExpansionOptions {
            cycle_search: search,
            ..ExpansionOptions::default()
        };
        let r = expand(x, &top, m, search, ExpansionKind::QuasiGreedy, &opts)?;
        return Ok((r.digits, r.exact));
    }
    Ok((expansion_prefix(x, &top, m, search, ExpansionKind::QuasiGreedy)?, None))
}

/// The fixed head of the Lemma-style construction for `x ∈ (0, 1)`:
/// `ε_1 … ε_{N+N_j} w`, plus the window length `N_j` the tail must respect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseHead {
    /// `true` when `ε` ends with `M^∞` and the connector is empty.
    pub ends_with_top: bool,
    pub head: Word,
    pub window: usize,
}

/// Build the head for the `j`-th window length.
pub fn dense_head(x: &Real, m: Alphabet, j: usize) -> Result<DenseHead> {
    if j == 0 {
        return Err(Error::Domain("j starts at 1".into()));
    }
    if x.sign()? != Ordering::Greater || x.cmp_i64(1)? != Ordering::Less {
        return Err(Error::Domain("the dense family needs 0 < x < 1".into()));
    }
    const SEARCH: usize = 4096;
    let (prefix, exact) = base_top_expansion(x, m, SEARCH)?;
    let mm = m.m();
    if let Some(e) = exact.as_ref().filter(|e| e.period().digits() == [mm]) {
        // ε = ε_1 … ε_m M^∞ with ε_m < M; N = m and N_j = m + j
        let n = e.preperiod_len();
        let window = n + j;
        return Ok(DenseHead {
            ends_with_top: true,
            head: e.prefix(n + window),
            window,
        });
    }
    let eps = |i: usize| -> Option<Digit> { prefix.digits().get(i - 1).copied() };
    let n = (3..SEARCH).find(|&n| eps(n - 2).is_some_and(|d| d > 0)).ok_or_else(|| {
        Error::Precondition("no positive digit in the searched prefix".into())
    })?;
    let mut found = 0;
    let mut pos = 0;
    let mut nonzero = 0;
    let mut nontop = 0;
    for t in 1..SEARCH {
        let d = eps(t).ok_or_else(|| Error::Precondition("expansion prefix exhausted".into()))?;
        nonzero += (d > 0) as usize;
        nontop += (d < mm) as usize;
        if t <= n || nonzero < n + 1 || nontop < n + 1 {
            continue;
        }
        match eps(n + t + 1) {
            Some(v) if v > 0 => {
                found += 1;
                if found == j {
                    pos = t;
                    break;
                }
            }
            Some(_) => {}
            None => break,
        }
    }
    if found < j {
        return Err(Error::Precondition(format!("window length N_{j} not found within {SEARCH} digits")));
    }
    let connector = Word::new(vec![0, mm], m)?;
    Ok(DenseHead {
        ends_with_top: false,
        head: prefix.prefix(n + pos).concat(&connector),
        window: pos,
    })
}

/// Longest cyclic run of `d` in `block`; `usize::MAX` when the block is
/// constant `d`.
fn cyclic_run(block: &[Digit], d: Digit) -> usize {
    if block.iter().all(|&v| v == d) {
        return usize::MAX;
    }
    let n = block.len();
    let mut best = 0;
    let mut run = 0;
    for i in 0..2 * n {
        if block[i % n] == d {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// `sample` members of `𝐔(x)` for `0 < x < 1`: the head from
/// [`dense_head`] followed by random periodic tails that avoid `0^{N_j}`
/// and `M^{N_j}`. Each member is inverted and its uniqueness verified;
/// a failed verification is an error.
pub fn dense_family(
    x: &Real,
    m: Alphabet,
    j: usize,
    sample: usize,
    seed: u64,
    depth: usize,
) -> Result<Vec<MemberWitness>> {
    let head = dense_head(x, m, j)?;
    let nj = head.window;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(sample);
    let mut attempts = 0;
    while out.len() < sample {
        attempts += 1;
        if attempts > 1000 * sample.max(1) {
            return Err(Error::Precondition("too few distinct admissible tails".into()));
        }
        let len = rng.gen_range(nj + 1..=2 * nj + 1);
        let block: Vec<Digit> = (0..len).map(|_| rng.gen_range(0..=m.m())).collect();
        if cyclic_run(&block, 0) >= nj || cyclic_run(&block, m.m()) >= nj {
            continue;
        }
        let w = EventuallyPeriodicWord::from_words(&head.head, &Word::new(block, m)?)?;
        if !seen.insert(w.clone()) {
            continue;
        }
        let base = invert_base(&w, x)?;
        match is_unique_expansion(&w, &base, depth)? {
            Uniqueness::Unique => out.push(MemberWitness {
                base,
                expansion: w,
                uniqueness_depth: depth,
            }),
            v => return Err(Error::Precondition(format!("member {w} failed verification: {v:?}"))),
        }
    }
    Ok(out)
}

/// Outcome of the depth-bounded test at one grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScanVerdict {
    /// A uniqueness clause fails within the depth at the cell midpoint.
    Violated,
    /// Not refuted at this depth. Not a membership claim.
    Candidate,
}

impl ScanVerdict {
    pub fn label(self) -> &'static str {
        match self {
            ScanVerdict::Violated => "VIOLATED",
            ScanVerdict::Candidate => "CANDIDATE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub lo: BigRational,
    pub hi: BigRational,
    pub verdict: ScanVerdict,
    /// One-based tail index at which the midpoint test failed.
    pub violation_at: Option<usize>,
}

/// A rational at or below `q` (exact when `q` is rational).
fn rational_below(q: &Real) -> Result<BigRational> {
    match q.as_rational() {
        Some(r) => Ok(r),
        None => Ok(q.enclose(128)?.bounds().0),
    }
}

/// Depth-bounded scan of `𝒰(x)` over `steps` equal cells of `range ∩ (1, q_x]`
/// (default the whole of it). Each cell midpoint is tested by comparing
/// the first `depth` digits of `Φ_x` and `α`; the cell holding `q_x` is
/// always a candidate since `q_x ∈ 𝒰(x)`.
pub fn enumerate_ux(
    x: &Real,
    m: Alphabet,
    range: Option<(BigRational, BigRational)>,
    steps: usize,
    depth: usize,
) -> Result<Vec<ScanRow>> {
    if steps == 0 {
        return Ok(Vec::new());
    }
    let q_x = q_of_x(x, m)?;
    let one = BigRational::one();
    let q_x_low = rational_below(&q_x)?;
    let (lo, hi) = match range {
        Some((a, b)) => (a.max(one), b.min(q_x_low)),
        None => (one, q_x_low),
    };
    if hi <= lo {
        return Ok(Vec::new());
    }
    let step = (&hi - &lo) / BigInt::from(steps);
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let a = &lo + &step * BigInt::from(i);
            let b = if i + 1 == steps { hi.clone() } else { &a + &step };
            let holds_qx = q_x.cmp_rational(&a)? == Ordering::Greater && q_x.cmp_rational(&b)? != Ordering::Greater;
            let (verdict, violation_at) = if holds_qx {
                (ScanVerdict::Candidate, None)
            } else {
                let mid = Real::Rational((&a + &b) / BigInt::from(2));
                let phi = expansion_prefix(x, &mid, m, depth, ExpansionKind::QuasiGreedy)?;
                let alpha = alpha_prefix(&mid, m, depth)?;
                match prefix_violation(&phi, &alpha) {
                    Some(n) => (ScanVerdict::Violated, Some(n)),
                    None => (ScanVerdict::Candidate, None),
                }
            };
            Ok(ScanRow { lo: a, hi: b, verdict, violation_at })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct HolderRow {
    pub p1: Real,
    pub p2: Real,
    /// One-based index of the first differing digit; `None` for equal expansions.
    pub first_difference: Option<usize>,
    /// `a^{-n} − (a−1)x|p₁−p₂|/(M b²)`; the lower inequality holds when `≥ 0`.
    pub lower_margin: f64,
    /// `M b^{i₀}|p₁−p₂|/(a−1)² − b^{-n}`; the upper inequality holds when `≥ 0`.
    pub upper_margin: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

#[derive(Clone, Debug)]
pub struct HolderReport {
    /// First index with `α_{i₀}(b) < M`.
    pub i0: usize,
    pub rows: Vec<HolderRow>,
}

impl HolderReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.lower_ok && r.upper_ok)
    }
}

/// Check the two-sided Hölder bound between base distance and the metric
/// `ρ` on expansions, for pairs of witnesses of `x` with bases in `(a, b)`.
///
/// Both inequalities are compared after raising to the power `log_{M+1} a`
/// (resp. `b`), which removes every logarithm:
/// `C₁|Δ|^{1/log a} ≤ ρ` iff `(a−1)x|Δ|/(M b²) ≤ a^{-n}`, and
/// `ρ ≤ C₂|Δ|^{1/log b}` iff `b^{-n} ≤ M b^{i₀}|Δ|/(a−1)²`.
pub fn holder_check(
    x: &Real,
    a: &BigRational,
    b: &BigRational,
    m: Alphabet,
    pairs: &[(MemberWitness, MemberWitness)],
) -> Result<HolderReport> {
    let top = BigRational::from_integer(BigInt::from(m.size()));
    if !(&BigRational::one() < a && a < b && b < &top) {
        return Err(Error::Domain("need 1 < a < b < M+1".into()));
    }
    let mut len = 64;
    let i0 = loop {
        let alpha = alpha_prefix(&Real::Rational(b.clone()), m, len)?;
        if let Some(i) = alpha.digits().iter().position(|&d| d < m.m()) {
            break i + 1;
        }
        len *= 2;
    };
    let mr = BigRational::from_integer(BigInt::from(m.m()));
    let am1 = a - BigRational::one();
    let c_lower = Real::Rational(&am1 / (&mr * b * b)).mul(x);
    let c_upper = Real::Rational(&mr * b.pow(i0 as i32) / (&am1 * &am1));
    let (ra, rb) = (Real::Rational(a.clone()), Real::Rational(b.clone()));
    let mut rows = Vec::with_capacity(pairs.len());
    for (w1, w2) in pairs {
        for w in [w1, w2] {
            if w.base.cmp_real(&ra)? != Ordering::Greater || w.base.cmp_real(&rb)? != Ordering::Less {
                return Err(Error::Domain("a witness base lies outside (a, b)".into()));
            }
            if !w.verify(x, 128)? {
                return Err(Error::Precondition(format!("pair member {} is not verifiable in 𝒰(x)", w.expansion)));
            }
        }
        let diff = w1.base.sub(&w2.base);
        let delta = match diff.sign() {
            Ok(Ordering::Less) => diff.neg(),
            Ok(_) => diff,
            // equal computable bases cannot be told apart; their expansions can
            Err(_) if w1.expansion == w2.expansion => Real::from_i64(0),
            Err(e) => return Err(e),
        };
        let row = match w1.expansion.first_difference(&w2.expansion) {
            None => {
                let zero = delta.sign()? == Ordering::Equal;
                HolderRow {
                    p1: w1.base.clone(),
                    p2: w2.base.clone(),
                    first_difference: None,
                    lower_margin: 0.0,
                    upper_margin: 0.0,
                    lower_ok: zero,
                    upper_ok: zero,
                }
            }
            Some(i) => {
                let n = i as i32 + 1;
                let lower = Real::Rational(a.pow(-n)).sub(&c_lower.mul(&delta));
                let upper = c_upper.mul(&delta).sub(&Real::Rational(b.pow(-n)));
                HolderRow {
                    p1: w1.base.clone(),
                    p2: w2.base.clone(),
                    first_difference: Some(n as usize),
                    lower_margin: lower.to_f64(),
                    upper_margin: upper.to_f64(),
                    lower_ok: lower.sign()? != Ordering::Less,
                    upper_ok: upper.sign()? != Ordering::Less,
                }
            }
        };
        rows.push(row);
    }
    Ok(HolderReport { i0, rows })
}

/// One row of the exploratory local-dimension comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDimRow {
    pub delta: f64,
    /// Share of scan cells in `(q−δ, q+δ)` not refuted at depth.
    pub candidate_fraction: f64,
    /// Bracket for `dim_H(𝒰_q ∩ I)` where `I` is the cylinder of `Φ_x(q)`
    /// of length `⌈log_q(1/δ)⌉`, a neighbourhood of `x` of size about `δ`.
    pub uq_lower: f64,
    pub uq_upper: f64,
}

/// Exploratory comparison of the local structure of `𝒰(x)` near `q` with
/// that of `𝒰_q` near `x`. No pass/fail: the limits as `δ → 0` are not
/// certifiable at finite depth.
pub fn local_dim_experiment(
    x: &Real,
    q: &Real,
    deltas: &[f64],
    m: Alphabet,
    n_alpha: usize,
    depth: usize,
) -> Result<Vec<LocalDimRow>> {
    let q_x = q_of_x(x, m)?;
    if q.cmp_i64(1)? != Ordering::Greater || q.cmp_real(&q_x)? == Ordering::Greater {
        return Err(Error::Domain("need 1 < q ≤ q_x".into()));
    }
    let alpha = alpha_prefix(q, m, n_alpha)?;
    let inner = LexShiftAutomaton::build(&alpha, Strictness::Inner)?;
    let outer = LexShiftAutomaton::build(&alpha, Strictness::Outer)?;
    let qe = q.enclose(64)?;
    let base = (m.size() as f64).ln();
    let (log_lo, log_hi) = (widen_down(qe.lo_f64().ln() / base), widen_up(qe.hi_f64().ln() / base));
    let qf = qe.mid_f64();
    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(Error::Domain("δ must be positive".into()));
            }
            let d = BigRational::from_float(delta).unwrap_or_else(BigRational::zero);
            let centre = rational_below(q)?;
            let rows = enumerate_ux(x, m, Some((&centre - &d, &centre + &d)), 32, depth)?;
            let candidate_fraction = if rows.is_empty() {
                0.0
            } else {
                rows.iter().filter(|r| r.verdict == ScanVerdict::Candidate).count() as f64 / rows.len() as f64
            };
            let len = ((1.0 / delta).ln() / qf.ln()).ceil().max(1.0) as usize;
            let cyl = expansion_prefix(x, q, m, len, ExpansionKind::QuasiGreedy)?;
            let local = |a: &LexShiftAutomaton| a.state_after(&cyl).map_or((0.0, 0.0), |s| a.entropy_bounds_from(s));
            let (lo, _) = local(&inner);
            let (_, hi) = local(&outer);
            let (uq_lower, uq_upper) = if log_hi >= 1.0 {
                (lo, hi)
            } else {
                (widen_down(lo / log_hi).max(0.0), if hi == 0.0 { 0.0 } else { widen_up(hi / log_lo).min(1.0) })
            };
            Ok(LocalDimRow {
                delta,
                candidate_fraction,
                uq_lower,
                uq_upper,
            })
        })
        .collect()
}

/// `f64` view of a scan row's endpoints, for reporting.
pub fn row_bounds_f64(r: &ScanRow) -> (f64, f64) {
    (r.lo.to_f64().unwrap_or(f64::NAN), r.hi.to_f64().unwrap_or(f64::NAN))
}
