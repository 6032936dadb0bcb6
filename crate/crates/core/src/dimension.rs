//! Hausdorff dimension of `𝐔_q` and `𝐔(x)` through lexicographic window
//! shifts.
//!
//! For a prefix `a = α_1 … α_N` of `α(q)`, the INNER shift keeps sequences
//! whose every length-`N` window `w` satisfies `ā ≺ w ≺ a`; it is contained
//! in `𝐔_q`. The OUTER shift relaxes both inequalities to `≼` and contains
//! every tail of every element of `𝐔_q`. Their entropies bracket
//! `dim_H 𝐔_q` in base-`(M+1)` logarithms.
//!
//! Entropies are spectral radii of the automaton graphs. Each strongly
//! connected component is bounded separately by the Collatz–Wielandt
//! inequalities `min (Av)_i / v_i ≤ ρ ≤ max (Av)_i / v_i`, evaluated with
//! outward rounding, so the bracket does not depend on convergence of the
//! power iteration that supplies `v`.

use std::collections::HashMap;

use num_bigint::BigUint;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion::alpha_prefix;
use crate::real::Real;
use crate::solver::q_of_x;
use crate::words::{Alphabet, Digit, Word};
use crate::{Interval64, PrecisionReal};

pub const DEFAULT_N: usize = 16;
pub const DEFAULT_WORD_LEN: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strictness {
    /// Windows strictly between `ā` and `a`.
    Inner,
    /// Windows between `ā` and `a`, equality allowed.
    Outer,
}

/// One window constraint `w ≼ word` (or `≺` when strict), applied to the
/// sequence itself or to its reflection.
#[derive(Clone, Debug)]
struct Bound {
    word: Vec<Digit>,
    strict: bool,
    reflected: bool,
}

/// Tied window lengths: `k` is present when the last `k` digits equal
/// `word[..k]`, so the window starting there is still undecided.
type Ties = Vec<u16>;

impl Bound {
    fn step(&self, ties: &Ties, c: Digit, m: Digit) -> Option<Ties> {
        let c = if self.reflected { m - c } else { c };
        let n = self.word.len();
        let mut next = Vec::with_capacity(ties.len() + 1);
        for k in std::iter::once(0u16).chain(ties.iter().copied()) {
            let a = self.word[k as usize];
            if c > a {
                return None;
            }
            if c == a {
                if k as usize + 1 == n {
                    if self.strict {
                        return None;
                    }
                } else {
                    next.push(k + 1);
                }
            }
        }
        next.sort_unstable();
        Some(next)
    }
}

/// Deterministic automaton for a finite set of window bounds. State 0 is
/// the initial state; every state is reachable and non-rejecting.
#[derive(Clone, Debug)]
pub struct LexShiftAutomaton {
    alpha_prefix: Word,
    strictness: Strictness,
    /// `transitions[s][c]` is the state after digit `c`, or `None` on reject.
    transitions: Vec<Vec<Option<usize>>>,
}

impl LexShiftAutomaton {
    /// The window shift of `α_1 … α_N` with both bounds.
    pub fn build(alpha_prefix: &Word, strictness: Strictness) -> Result<Self> {
        if alpha_prefix.is_empty() {
            return Err(Error::Precondition("α prefix must be nonempty".into()));
        }
        let a = alpha_prefix.digits();
        let n = a.len();
        if let Some(i) = (1..n).find(|&i| a[i..] > a[..n - i]) {
            return Err(Error::Precondition(format!(
                "prefix {alpha_prefix} is not admissible: its shift by {i} exceeds it"
            )));
        }
        let strict = strictness == Strictness::Inner;
        let bounds = vec![
            Bound { word: a.to_vec(), strict, reflected: false },
            Bound { word: a.to_vec(), strict, reflected: true },
        ];
        Ok(Self::from_bounds(alpha_prefix.clone(), strictness, &bounds))
    }

    /// The shift whose windows satisfy `w ≼ upper` only (`≺` when
    /// `Inner`); no admissibility is required of `upper`.
    pub fn upper_only(upper: &Word, strictness: Strictness) -> Result<Self> {
        if upper.is_empty() {
            return Err(Error::Precondition("bound must be nonempty".into()));
        }
        let bounds = vec![Bound {
            word: upper.digits().to_vec(),
            strict: strictness == Strictness::Inner,
            reflected: false,
        }];
        Ok(Self::from_bounds(upper.clone(), strictness, &bounds))
    }

    fn from_bounds(prefix: Word, strictness: Strictness, bounds: &[Bound]) -> Self {
        let m = prefix.alphabet().m();
        let start: Vec<Ties> = vec![Vec::new(); bounds.len()];
        let mut ids: HashMap<Vec<Ties>, usize> = HashMap::from([(start.clone(), 0)]);
        let mut queue = vec![start];
        let mut transitions: Vec<Vec<Option<usize>>> = Vec::new();
        let mut head = 0;
        while head < queue.len() {
            let state = queue[head].clone();
            head += 1;
            let mut row = Vec::with_capacity(m as usize + 1);
            for c in 0..=m {
                let next: Option<Vec<Ties>> = bounds.iter().zip(&state).map(|(b, t)| b.step(t, c, m)).collect();
                row.push(next.map(|s| {
                    let len = ids.len();
                    *ids.entry(s.clone()).or_insert_with(|| {
                        queue.push(s);
                        len
                    })
                }));
            }
            transitions.push(row);
        }
        LexShiftAutomaton {
            alpha_prefix: prefix,
            strictness,
            transitions,
        }
    }

    pub fn alpha_prefix(&self) -> &Word {
        &self.alpha_prefix
    }

    pub fn strictness(&self) -> Strictness {
        self.strictness
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alpha_prefix.alphabet()
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn next(&self, state: usize, c: Digit) -> Option<usize> {
        self.transitions[state][c as usize]
    }

    /// Whether the automaton reads `w` from the initial state.
    pub fn accepts(&self, w: &Word) -> bool {
        w.digits()
            .iter()
            .try_fold(0, |s, &c| self.next(s, c))
            .is_some()
    }

    /// State reached after reading `w` from the initial state.
    pub fn state_after(&self, w: &Word) -> Option<usize> {
        w.digits().iter().try_fold(0, |s, &c| self.next(s, c))
    }

    fn reachable_from(&self, state: usize) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let mut stack = vec![state];
        seen[state] = true;
        while let Some(s) = stack.pop() {
            for &t in self.transitions[s].iter().flatten() {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Number of accepted words of length `n`.
    pub fn count_words(&self, n: usize) -> BigUint {
        let mut v = vec![BigUint::zero(); self.state_count()];
        v[0] = BigUint::from(1u8);
        for _ in 0..n {
            let mut w = vec![BigUint::zero(); self.state_count()];
            for (s, row) in self.transitions.iter().enumerate() {
                if v[s].is_zero() {
                    continue;
                }
                for t in row.iter().flatten() {
                    w[*t] += &v[s];
                }
            }
            v = w;
        }
        v.into_iter().sum()
    }

    /// Strongly connected components with at least one internal edge.
    fn cyclic_components(&self) -> Vec<Vec<usize>> {
        let edges = self
            .transitions
            .iter()
            .enumerate()
            .flat_map(|(s, r)| r.iter().flatten().map(move |&t| (s as u32, t as u32)));
        let g = DiGraph::<(), ()>::from_edges(edges);
        tarjan_scc(&g)
            .into_iter()
            .filter(|c| c.len() > 1 || g.contains_edge(c[0], c[0]))
            .map(|c| c.into_iter().map(|n| n.index()).collect())
            .collect()
    }

    fn internal_edges(&self, comp: &[usize], index: &HashMap<usize, usize>) -> Vec<Vec<usize>> {
        comp.iter()
            .map(|s| self.transitions[*s].iter().flatten().filter_map(|t| index.get(t).copied()).collect())
            .collect()
    }

    /// Whether the language grows exponentially: some component carries more
    /// internal edges than states. Decided exactly.
    pub fn has_positive_entropy(&self) -> bool {
        self.cyclic_components().iter().any(|c| {
            let index: HashMap<usize, usize> = c.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            let edges: usize = self.internal_edges(c, &index).iter().map(Vec::len).sum();
            edges > c.len()
        })
    }

    /// Certified enclosure of the spectral radius of the transition graph.
    pub fn spectral_radius_bounds(&self) -> (f64, f64) {
        self.radius_over(|_| true)
    }

    fn radius_over(&self, keep: impl Fn(&[usize]) -> bool) -> (f64, f64) {
        let mut best = (0.0f64, 0.0f64);
        for c in self.cyclic_components().into_iter().filter(|c| keep(c)) {
            let index: HashMap<usize, usize> = c.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            let edges = self.internal_edges(&c, &index);
            let count: usize = edges.iter().map(Vec::len).sum();
            let (lo, hi) = if count == c.len() {
                // a single cycle
                (1.0, 1.0)
            } else {
                collatz_wielandt(&edges)
            };
            best = (best.0.max(lo), best.1.max(hi));
        }
        best
    }

    /// Certified bracket for the entropy in base-`(M+1)` logarithms.
    pub fn entropy_bounds(&self) -> (f64, f64) {
        self.log_bracket(self.spectral_radius_bounds())
    }

    /// Entropy bracket of the language of continuations from `state`: only
    /// components reachable from it count.
    pub fn entropy_bounds_from(&self, state: usize) -> (f64, f64) {
        let seen = self.reachable_from(state);
        self.log_bracket(self.radius_over(|c| seen[c[0]]))
    }

    fn log_bracket(&self, (lo, hi): (f64, f64)) -> (f64, f64) {
        let size = self.alphabet().size() as f64;
        let base = size.ln();
        let lo = if lo <= 1.0 {
            0.0
        } else if lo >= size {
            1.0
        } else {
            widen_down(lo.ln() / base)
        };
        let hi = if hi <= 1.0 { 0.0 } else { widen_up(hi.ln() / base) };
        (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0))
    }
}

/// Outward margin for `ln` and one division, which are correctly rounded to
/// within one ulp each.
pub(crate) fn widen_down(v: f64) -> f64 {
    (0..4).fold(v, |x, _| x.next_down())
}

pub(crate) fn widen_up(v: f64) -> f64 {
    (0..4).fold(v, |x, _| x.next_up())
}

/// Bounds on the spectral radius of an irreducible 0/1 multigraph. Power
/// iteration runs on `A + I`, which is primitive, and the bound is shifted
/// back by one.
fn collatz_wielandt(edges: &[Vec<usize>]) -> (f64, f64) {
    let n = edges.len();
    // constant out-degree d: the all-ones vector is an eigenvector
    if edges.iter().all(|e| e.len() == edges[0].len()) {
        let d = edges[0].len() as f64;
        return (d, d);
    }
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..n).map(|i| v[i] + edges[i].iter().map(|&j| v[j]).sum::<f64>()).collect()
    };
    let mut v = vec![1.0; n];
    for _ in 0..4000 {
        let w = apply(&v);
        let s = w.iter().cloned().fold(0.0, f64::max);
        let w: Vec<f64> = w.iter().map(|x| x / s).collect();
        let delta = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if delta < 1e-15 {
            break;
        }
    }
    // v is only a guess; every entry must be positive for the inequalities
    let floor = f64::MIN_POSITIVE * 1e20;
    let v: Vec<f64> = v.iter().map(|x| x.max(floor)).collect();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..n {
        let mut s = Interval64::point(v[i], 53);
        for &j in &edges[i] {
            s = s.add_i(&Interval64::point(v[j], 53));
        }
        let r = s
            .div_i(&Interval64::point(v[i], 53))
            .expect("entries are positive");
        lo = lo.min(*r.lo());
        hi = hi.max(*r.hi());
    }
    (((lo - 1.0).next_down()).max(0.0), (hi - 1.0).next_up())
}

/// `log_{M+1}` of a big integer, accurate to about 1e-15 relative.
fn log_base(v: &BigUint, base: u32) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(64);
    let top = (v >> shift).to_f64().unwrap_or(f64::MAX);
    (top.ln() + shift as f64 * std::f64::consts::LN_2) / (base as f64).ln()
}

/// Growth-rate estimate `(log C(n_hi) − log C(n_lo)) / (n_hi − n_lo)` in
/// base-`(M+1)` logarithms, clamped to `[0, 1]`.
pub fn entropy_estimate(a: &LexShiftAutomaton, n_lo: usize, n_hi: usize) -> Result<f64> {
    if n_hi <= n_lo || n_lo < 8 {
        return Err(Error::Precondition("need n_hi > n_lo ≥ 8".into()));
    }
    let (c_lo, c_hi) = (a.count_words(n_lo), a.count_words(n_hi));
    if c_lo.is_zero() || c_hi.is_zero() {
        return Ok(0.0);
    }
    let base = a.alphabet().size();
    let h = (log_base(&c_hi, base) - log_base(&c_lo, base)) / (n_hi - n_lo) as f64;
    Ok(h.clamp(0.0, 1.0))
}

#[derive(Clone, Debug)]
pub struct DimensionEstimate {
    /// Certified lower bound.
    pub lower: f64,
    /// Certified upper bound.
    pub upper: f64,
    /// Length of the α prefix.
    pub n_alpha: usize,
    /// Word length of the counting estimate.
    pub n_words: usize,
    /// Finite-difference estimate from INNER word counts; not a bound.
    pub count_estimate: f64,
    pub q: PrecisionReal,
}

impl DimensionEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Bracket for `ψ(q) = dim_H 𝐔_q`.
pub fn dim_uq(q: &Real, m: Alphabet, n_alpha: usize, n_words: usize) -> Result<DimensionEstimate> {
    let a = alpha_prefix(q, m, n_alpha)?;
    let inner = LexShiftAutomaton::build(&a, Strictness::Inner)?;
    let outer = LexShiftAutomaton::build(&a, Strictness::Outer)?;
    let (lower, _) = inner.entropy_bounds();
    let (_, upper) = outer.entropy_bounds();
    let count_estimate = entropy_estimate(&inner, (n_words / 2).max(8), n_words.max(9)).unwrap_or(0.0);
    Ok(DimensionEstimate {
        lower,
        upper,
        n_alpha,
        n_words,
        count_estimate,
        q: q.enclose(64)?,
    })
}

/// Bracket for `φ(x) = dim_H 𝐔(x) = ψ(q_x)`.
pub fn dim_ux(x: &Real, m: Alphabet, n_alpha: usize, n_words: usize) -> Result<DimensionEstimate> {
    dim_uq(&q_of_x(x, m)?, m, n_alpha, n_words)
}

/// Bracket for `dim_H 𝒰_q = dim_H 𝐔_q / log_{M+1} q`.
pub fn dim_real_uq(q: &Real, m: Alphabet, n_alpha: usize, n_words: usize) -> Result<DimensionEstimate> {
    let mut e = dim_uq(q, m, n_alpha, n_words)?;
    let base = (m.size() as f64).ln();
    let (lo, hi) = (e.q.lo_f64(), e.q.hi_f64());
    let log_lo = widen_down(lo.ln() / base);
    let log_hi = widen_up(hi.ln() / base);
    if q.cmp_i64(m.size() as i64)? == std::cmp::Ordering::Equal {
        return Ok(e);
    }
    e.lower = widen_down(e.lower / log_hi).max(0.0);
    e.upper = if e.upper == 0.0 { 0.0 } else { widen_up(e.upper / log_lo).min(1.0) };
    e.count_estimate /= (log_lo + log_hi) / 2.0;
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StaircaseKind {
    /// `q ↦ dim_H 𝐔_q` on `(1, M+1]`.
    Psi,
    /// `x ↦ dim_H 𝐔(x)` on `(0, ∞)`.
    Phi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseRow {
    pub abscissa: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Brackets at each grid point, in grid order.
pub fn staircase_samples(
    kind: StaircaseKind,
    m: Alphabet,
    grid: &[f64],
    n_alpha: usize,
    n_words: usize,
) -> Result<Vec<StaircaseRow>> {
    grid.par_iter()
        .map(|&t| {
            let v = BigRational::from_float(t)
                .map(Real::Rational)
                .ok_or_else(|| Error::Domain(format!("grid value {t} is not finite")))?;
            let e = match kind {
                StaircaseKind::Psi => dim_uq(&v, m, n_alpha, n_words)?,
                StaircaseKind::Phi => dim_ux(&v, m, n_alpha, n_words)?,
            };
            Ok(StaircaseRow {
                abscissa: t,
                lower: e.lower,
                upper: e.upper,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str, m: u32) -> Word {
        Word::parse(s, Alphabet::new(m).unwrap()).unwrap()
    }

    #[test]
    fn small_automata() {
        let a = LexShiftAutomaton::build(&word("1", 1), Strictness::Inner).unwrap();
        assert!(a.count_words(1).is_zero());
        let a = LexShiftAutomaton::build(&word("11", 1), Strictness::Inner).unwrap();
        assert_eq!(a.count_words(8), BigUint::from(2u8));
        let a = LexShiftAutomaton::build(&word("1111", 1), Strictness::Outer).unwrap();
        assert_eq!(a.count_words(10), BigUint::from(1024u32));
        assert!(LexShiftAutomaton::build(&word("011", 1), Strictness::Inner).is_err());
    }

    #[test]
    fn entropies() {
        let full = LexShiftAutomaton::build(&word("1111", 1), Strictness::Outer).unwrap();
        assert_eq!(full.entropy_bounds(), (1.0, 1.0));
        assert!((entropy_estimate(&full, 16, 32).unwrap() - 1.0).abs() < 1e-12);
        let alt = LexShiftAutomaton::build(&word("11", 1), Strictness::Inner).unwrap();
        assert_eq!(alt.entropy_bounds(), (0.0, 0.0));
        assert_eq!(entropy_estimate(&alt, 16, 32).unwrap(), 0.0);
        let golden = LexShiftAutomaton::upper_only(&word("10", 1), Strictness::Outer).unwrap();
        let (lo, hi) = golden.entropy_bounds();
        let want = ((1.0 + 5f64.sqrt()) / 2.0).log2();
        assert!(lo <= want && want <= hi && hi - lo < 1e-12, "{lo} {hi}");
    }

    #[test]
    fn positive_entropy_is_exact() {
        let alt = LexShiftAutomaton::build(&word("11", 1), Strictness::Inner).unwrap();
        assert!(!alt.has_positive_entropy());
        let a = LexShiftAutomaton::build(&word("110", 1), Strictness::Inner).unwrap();
        assert!(a.has_positive_entropy() == (a.entropy_bounds().0 > 0.0));
    }

    #[test]
    fn dimension_examples() {
        let m1 = Alphabet::new(1).unwrap();
        let e = dim_uq(&Real::from_i64(2), m1, 16, 48).unwrap();
        assert!(e.lower >= 0.99 && e.upper == 1.0, "{e:?}");
        let e = dim_uq(&Real::from_ratio(17, 10), m1, 16, 48).unwrap();
        assert!(e.upper <= 0.05, "{e:?}");
        let e = dim_uq(&Real::from_ratio(1618, 1000), m1, 12, 36).unwrap();
        assert_eq!((e.lower, e.upper), (0.0, 0.0));
    }
}
