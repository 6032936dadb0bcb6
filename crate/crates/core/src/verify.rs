//! Named property suites. Each check has a stable identifier; a runner
//! stops at the first failing check and reports it.

use std::cmp::Ordering;

use crate::error::Result;
use crate::expansion::{greedy_expand, is_unique_expansion, pi_q, quasi_greedy_expand, Uniqueness};
use crate::isolated_points::{self as iso, bifurcation_base, c_family, d_family, tau, tau_block, verify_member_star, z_point};
use crate::real::{quadratic_root, rational, Real};
use crate::solver::{critical_constants, golden_ratio_base};
use crate::univoque_x::{classify, golden_tail_family, Regime, DEFAULT_UNIQUENESS_DEPTH};
use crate::words::{Alphabet, EventuallyPeriodicWord, Word};

pub const SUITES: [&str; 6] = ["thue-morse", "families", "cover", "constants", "golden", "univoque-x"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Record a check; returns whether to continue.
    fn push(&mut self, id: &'static str, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(CheckResult {
            id,
            passed,
            detail: detail.into(),
        });
        passed
    }
}

fn binary() -> Alphabet {
    Alphabet::new(1).expect("M = 1 is valid")
}

/// `τ_{2^n+1} … τ_{2^{n+1}} = reflect(τ_1 … τ_{2^n})⁺` for all `n ≤ n_max`.
pub fn thue_morse_doubling(n_max: u32) -> Option<u32> {
    (0..=n_max).find(|&n| {
        let len = 1usize << n;
        let second = Word::new((len + 1..=2 * len).map(tau).collect(), binary()).expect("binary");
        tau_block(n).reflect().plus_one().ok() != Some(second)
    })
}

/// `reflect(τ_1…τ_{2^n−i}) ≺ τ_{i+1}…τ_{2^n} ≼ τ_1…τ_{2^n−i}` for all
/// `0 ≤ i < 2^n`, `n ≤ n_max`. Returns the first failing `(n, i)`.
pub fn thue_morse_windows(n_max: u32) -> Option<(u32, usize)> {
    for n in 0..=n_max {
        let t = tau_block(n);
        let d = t.digits();
        let len = d.len();
        for i in 0..len {
            let window = &d[i..];
            let head = &d[..len - i];
            let reflected: Vec<_> = head.iter().map(|v| 1 - v).collect();
            if !(reflected.as_slice() < window && window <= head) {
                return Some((n, i));
            }
        }
    }
    None
}

fn thue_morse_suite(r: &mut SuiteReport) -> Result<()> {
    let first: Vec<_> = (0..8).map(tau).collect();
    if r.push("tm.prefix", first == [0, 1, 1, 0, 1, 0, 0, 1], format!("{first:?}"))
        && r.push("tm.doubling", thue_morse_doubling(12).is_none(), "n ≤ 12")
    {
        r.push("tm.windows", thue_morse_windows(8).is_none(), "n ≤ 8, all i");
    }
    Ok(())
}

fn families_suite(r: &mut SuiteReport) -> Result<()> {
    let mut bad = None;
    'c: for n in 1..=5 {
        for k in 1..=5 {
            if !verify_member_star(&c_family(n, Some(k))?, n) {
                bad = Some((n, k));
                break 'c;
            }
        }
    }
    if !r.push("fam.c-member", bad.is_none(), format!("n ≤ 5, k ≤ 5; first failure {bad:?}")) {
        return Ok(());
    }
    'd: for n in 2..=5 {
        for k in 1..=5 {
            if !verify_member_star(&d_family(n, k)?, n) {
                bad = Some((n, k));
                break 'd;
            }
        }
    }
    if !r.push("fam.d-member", bad.is_none(), format!("2 ≤ n ≤ 5, k ≤ 5; first failure {bad:?}")) {
        return Ok(());
    }
    let ident = (1..=6).find(|&n| c_family(n, Some(1)).ok() != c_family(n + 1, None).ok());
    if !r.push("fam.c-identity", ident.is_none(), format!("c_(n,1) = c_(n+1,∞), n ≤ 6; first failure {ident:?}")) {
        return Ok(());
    }
    let mut order_ok = true;
    for n in 1..=4u32 {
        let c_inf = c_family(n, None)?;
        for k in 1..=6 {
            let (c0, c1) = (c_family(n, Some(k))?, c_family(n, Some(k + 1))?);
            order_ok &= c0 < c1 && c1 < c_inf;
            if n >= 2 {
                let (d0, d1) = (d_family(n, k)?, d_family(n, k + 1)?);
                order_ok &= d0 > d1 && d1 > c_inf;
            }
        }
    }
    r.push("fam.monotone", order_ok, "c_(n,k) ↗ c_(n,∞) and d_(n,k) ↘ c_(n,∞), n ≤ 4, k ≤ 6");
    Ok(())
}

fn cover_suite(r: &mut SuiteReport) -> Result<()> {
    let qs: Vec<Real> = (1..=6).map(|n| bifurcation_base(n).map(|b| b.q)).collect::<Result<_>>()?;
    let increasing = qs.windows(2).all(|w| w[0].cmp_real(&w[1]).ok() == Some(Ordering::Less));
    if !r.push("cover.bases-increasing", increasing, "q_1 < … < q_6") {
        return Ok(());
    }
    let mut chain_ok = true;
    for n in 1..=4u32 {
        let (q_n, q_next) = (&qs[n as usize - 1], &qs[n as usize]);
        for k in 1..=6 {
            let lo_next = pi_q(&c_family(n, Some(k + 1))?, q_next)?;
            let hi = pi_q(&c_family(n, Some(k))?, q_n)?;
            chain_ok &= lo_next.cmp_real(&hi)? == Ordering::Less;
        }
    }
    if !r.push("cover.chain", chain_ok, "π_(q_(n+1))(c_(n,k+1)) < π_(q_n)(c_(n,k)), n ≤ 4, k ≤ 6") {
        return Ok(());
    }
    let x_g = Real::from_i64(1).div(&golden_ratio_base(binary()).add_i64(-1))?;
    let z: Vec<Real> = (1..=6).map(z_point).collect::<Result<_>>()?;
    if !r.push("cover.z1", z[0].cmp_real(&x_g)? == Ordering::Equal, "z_1 = x_G") {
        return Ok(());
    }
    let decreasing = z.windows(2).all(|w| w[0].cmp_real(&w[1]).ok() == Some(Ordering::Greater));
    let near_one = z[5].cmp_rational(&rational(105, 100))? == Ordering::Less;
    if !r.push("cover.z-decreasing", decreasing && near_one, format!("z_6 ≈ {}", z[5].to_f64())) {
        return Ok(());
    }
    let cert = iso::isolate_default(&Real::from_ratio(3, 2))?;
    let ok = match &cert {
        Some(c) => c.verify(256)?,
        None => false,
    };
    r.push("cover.isolate-1.5", ok, "certificate for x = 1.5 re-verifies at 256 bits");
    Ok(())
}

fn constants_suite(r: &mut SuiteReport) -> Result<()> {
    let c1 = critical_constants(binary(), 1e-12)?;
    let close = |v: &Real, target: (i64, i64), tol: (i64, i64)| -> Result<bool> {
        let d = v.sub(&Real::from_ratio(target.0, target.1));
        let t = Real::from_ratio(tol.0, tol.1);
        Ok(d.cmp_real(&t)? == Ordering::Less && d.neg().cmp_real(&t)? == Ordering::Less)
    };
    let phi = quadratic_root(&rational(1, 1), &rational(1, 1))?;
    let m3 = Alphabet::new(3).expect("valid");
    let root3 = quadratic_root(&rational(2, 1), &rational(2, 1))?;
    let ok = c1.q_g.cmp_real(&phi)? == Ordering::Equal
        && golden_ratio_base(Alphabet::new(2).expect("valid")).as_rational() == Some(rational(2, 1))
        && golden_ratio_base(m3).cmp_real(&root3)? == Ordering::Equal;
    if !r.push("const.golden", ok, "q_G for M = 1, 2, 3 in closed form") {
        return Ok(());
    }
    let ok = close(&c1.q_kl, (178723, 100000), (1, 10000))?
        && close(&c1.x_kl, (127028, 100000), (1, 10000))?
        && close(&c1.x_g, (161803, 100000), (1, 10000))?;
    r.push("const.figure-values", ok, format!("q_KL ≈ {}, x_KL ≈ {}", c1.q_kl.to_f64(), c1.x_kl.to_f64()));
    Ok(())
}

fn golden_suite(r: &mut SuiteReport) -> Result<()> {
    let phi = quadratic_root(&rational(1, 1), &rational(1, 1))?;
    let m = binary();
    let w = |s: &str| EventuallyPeriodicWord::parse(s, m);
    let one = Real::from_i64(1);
    let ok = pi_q(&w("(10)")?, &phi)?.cmp_i64(1)? == Ordering::Equal;
    if !r.push("golden.pi", ok, "π_φ((10)^∞) = 1") {
        return Ok(());
    }
    let g = greedy_expand(&one, &phi, m, 8)?.exact;
    let q = quasi_greedy_expand(&one, &phi, m, 8)?.exact;
    let ok = g == Some(w("11(0)")?) && q == Some(w("(10)")?);
    if !r.push("golden.expansions", ok, format!("greedy {g:?}, quasi-greedy {q:?}")) {
        return Ok(());
    }
    let ok = is_unique_expansion(&w("11(0)")?, &phi, 32)? == Uniqueness::NotUnique
        && is_unique_expansion(&w("(10)")?, &phi, 32)? == Uniqueness::NotUnique;
    r.push("golden.not-unique", ok, "neither expansion of 1 at φ is unique");
    Ok(())
}

fn univoque_x_suite(r: &mut SuiteReport) -> Result<()> {
    let m = binary();
    let cases = [((1, 2), Regime::FullDim), ((11, 10), Regime::PositiveDim), ((7, 5), Regime::Countable), ((2, 1), Regime::Singleton)];
    let mut ok = true;
    for ((a, b), want) in cases {
        ok &= classify(&Real::from_ratio(a, b), m, 1e-9)?.regime == want;
    }
    if !r.push("ux.classify", ok, "x ∈ {0.5, 1.1, 1.4, 2}") {
        return Ok(());
    }
    let x = Real::from_ratio(7, 5);
    let ws = golden_tail_family(&x, m, 8, DEFAULT_UNIQUENESS_DEPTH)?;
    let mut ok = ws.len() >= 3;
    for w in &ws {
        ok &= w.verify(&x, 256)?;
    }
    r.push("ux.golden-tail", ok, format!("{} witnesses for x = 1.4", ws.len()));
    Ok(())
}

/// Run one named suite, or all of them for `"all"`, stopping at the first
/// failing check. `None` for an unknown name.
pub fn run_suite(name: &str) -> Option<Result<SuiteReport>> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        n if SUITES.contains(&n) => vec![n],
        _ => return None,
    };
    let mut report = SuiteReport::default();
    for n in names {
        let step = match n {
            "thue-morse" => thue_morse_suite(&mut report),
            "families" => families_suite(&mut report),
            "cover" => cover_suite(&mut report),
            "constants" => constants_suite(&mut report),
            "golden" => golden_suite(&mut report),
            _ => univoque_x_suite(&mut report),
        };
        if let Err(e) = step {
            return Some(Err(e));
        }
        if !report.passed() {
            break;
        }
    }
    Some(Ok(report))
}
