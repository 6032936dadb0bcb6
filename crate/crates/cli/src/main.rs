mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, Signed, ToPrimitive};
use output::{Cell, Format, Report};
use univoque::dimension::{dim_uq, dim_ux, staircase_samples, DimensionEstimate, StaircaseKind};
use univoque::expansion::{alpha, expand, ExpansionKind, ExpansionOptions};
use univoque::isolated_points::{bifurcation_base, iso_intervals, isolate};
use univoque::real::parse_rational;
use univoque::solver::{critical_constants, golden_ratio_base, invert_base};
use univoque::univoque_x::{
    classify, dense_family, enumerate_ux, golden_tail_family, local_dim_experiment, MemberWitness,
};
use univoque::verify::{run_suite, SUITES};
use univoque::words::{Alphabet, EventuallyPeriodicWord};
use univoque::Real;

#[derive(Parser, Debug)]
#[command(name = "univoque", version, about = "Unique expansions in non-integer bases")]
struct Cli {
    /// Largest digit of the alphabet {0, …, M}.
    #[arg(long = "M", global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=255))]
    m: u32,
    /// Working precision for enclosures and printed digits.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(64..))]
    precision_bits: u32,
    /// Tolerance for numerically located constants.
    #[arg(long, global = true, default_value = "1e-12", value_parser = parse_tol)]
    tol: f64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for commands that fan out.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Greedy,
    Quasi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Staircase {
    Psi,
    Phi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Golden,
    Dense,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// q_G, q_KL, x_G and x_KL with radii.
    Constants,
    /// First digits of the greedy or quasi-greedy expansion of x in base q.
    Expand {
        #[arg(long)]
        x: String,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Greedy)]
        kind: Kind,
    },
    /// First digits of α(q), the quasi-greedy expansion of 1.
    Alpha {
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
    },
    /// The base in which a word `pre(period)` expands x.
    Invert {
        #[arg(long)]
        word: String,
        #[arg(long)]
        x: String,
    },
    /// Bracket for the dimension of the univoque set at base q.
    DimUq {
        #[arg(long)]
        q: String,
        #[arg(long = "N", default_value_t = 16)]
        n_alpha: usize,
        #[arg(long = "n", default_value_t = 48)]
        n_words: usize,
    },
    /// Bracket for the dimension of the univoque bases of x.
    DimUx {
        #[arg(long)]
        x: String,
        #[arg(long = "N", default_value_t = 16)]
        n_alpha: usize,
        #[arg(long = "n", default_value_t = 48)]
        n_words: usize,
    },
    /// Sampled dimension brackets over a grid, as CSV `abscissa,lower,upper`.
    Staircase {
        #[arg(long, value_enum)]
        kind: Staircase,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
        #[arg(long = "N", default_value_t = 16)]
        n_alpha: usize,
        #[arg(long = "n", default_value_t = 48)]
        n_words: usize,
    },
    /// Regime of the univoque bases of x.
    Classify {
        #[arg(long)]
        x: String,
    },
    /// Verified members of the univoque bases of x.
    Members {
        #[arg(long)]
        x: String,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Largest k for the golden family, sample size for the dense one.
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Head index for the dense family.
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value_t = 128)]
        depth: usize,
    },
    /// Depth-bounded scan of the univoque bases of x over equal cells.
    ScanUx {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
    },
    /// Exploratory local structure of the univoque bases of x near q.
    LocalDim {
        #[arg(long)]
        x: String,
        #[arg(long)]
        q: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4])]
        deltas: Vec<f64>,
        #[arg(long = "N", default_value_t = 16)]
        n_alpha: usize,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Certificate for an isolated univoque base of x (M = 1).
    Isolated {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
    },
    /// Intervals of x covered by the isolated-point families (M = 1).
    IsoCover {
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
    /// Re-run the exact property suites; stops at the first violation.
    VerifyPaper {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(suite_names()))]
        suite: String,
    },
}

fn suite_names() -> Vec<&'static str> {
    let mut v = vec!["all"];
    v.extend(SUITES);
    v
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if !r.is_positive() {
        return Err("tolerance must be positive".into());
    }
    r.to_f64().filter(|v| *v > 0.0).ok_or_else(|| "tolerance out of range".into())
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<univoque::Error> for Failure {
    fn from(e: univoque::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

struct Ctx {
    m: Alphabet,
    bits: u32,
    tol: f64,
    seed: u64,
}

impl Ctx {
    /// A decimal literal, a fraction, or a named constant.
    fn real(&self, s: &str) -> Outcome<Real> {
        let named = |name: &str| -> Outcome<Option<Real>> {
            let c = || critical_constants(self.m, self.tol);
            Ok(Some(match name {
                "phi" => golden_ratio_base(Alphabet::new(1)?),
                "qG" => golden_ratio_base(self.m),
                "qKL" => c()?.q_kl,
                "xG" => c()?.x_g,
                "xKL" => c()?.x_kl,
                _ => match name.strip_prefix('q').and_then(|n| n.parse::<u32>().ok()) {
                    Some(n) if self.m.m() != 1 => {
                        return Err(Failure::Usage(format!("q{n} is defined only for M = 1")))
                    }
                    Some(0) => return Err(Failure::Usage("bifurcation bases start at q1".into())),
                    Some(n) => bifurcation_base(n)?.q,
                    None => return Ok(None),
                },
            }))
        };
        match named(s.trim())? {
            Some(r) => Ok(r),
            None => Real::parse(s).map_err(|e| Failure::Usage(e.to_string())),
        }
    }

    fn rational(&self, s: &str) -> Outcome<BigRational> {
        let r = self.real(s)?;
        match r.as_rational() {
            Some(q) => Ok(q),
            None => Ok(r.enclose(self.bits)?.bounds().0),
        }
    }

    fn digits(&self) -> usize {
        (self.bits as f64 * std::f64::consts::LOG10_2) as usize - 1
    }

    /// Decimal value and outward-rounded radius; rationals print exactly
    /// when their expansion terminates within the working digits.
    fn show(&self, r: &Real) -> Outcome<(String, Cell)> {
        if let Some(q) = r.as_rational() {
            return Ok((self.show_rational(&q), Cell::Float(0.0)));
        }
        let e = r.enclose(self.bits)?;
        Ok((e.to_decimal(self.digits()), Cell::Text(format!("{:.3e}", e.radius_f64()))))
    }

    /// `q` rounded to the working digits, trailing zeros dropped.
    fn show_rational(&self, q: &BigRational) -> String {
        let scale = BigInt::from(10).pow(self.digits() as u32);
        let n = (q * BigRational::from_integer(scale.clone())).round().to_integer();
        let (int, frac) = n.abs().div_rem(&scale);
        let sign = if n.is_negative() { "-" } else { "" };
        let frac = format!("{:0>width$}", frac, width = self.digits());
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

fn dimension_row(r: &mut Report, at: &str, e: &DimensionEstimate) {
    r.row(vec![at.into(), e.lower.into(), e.upper.into(), e.count_estimate.into()]);
}

fn witness_rows(ctx: &Ctx, r: &mut Report, x: &Real, ws: &[MemberWitness]) -> Outcome<()> {
    for w in ws {
        let (base, radius) = ctx.show(&w.base)?;
        let ok = w.verify(x, ctx.bits)?;
        r.row(vec![base.into(), radius, w.expansion.to_string().into(), ok.into()]);
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome<(Report, Format)> {
    let ctx = Ctx {
        m: Alphabet::new(cli.m)?,
        bits: cli.precision_bits,
        tol: cli.tol,
        seed: cli.seed,
    };
    let m = ctx.m;
    let csv = |r: Report| Ok((r, Format::Csv));
    match &cli.command {
        Command::Constants => {
            let c = critical_constants(m, ctx.tol)?;
            let mut r = Report::new("constants", &["name", "value", "radius", "provenance"]);
            r.meta("M", cli.m);
            for (name, v) in c.named() {
                let (value, radius) = ctx.show(v)?;
                let prov = if name == "q_KL" || name == "x_KL" { c.q_kl_provenance.label() } else { "exact" };
                r.row(vec![name.into(), value.into(), radius, prov.into()]);
            }
            csv(r)
        }
        Command::Expand { x, q, n, kind } => {
            let (xr, qr) = (ctx.real(x)?, ctx.real(q)?);
            let kind = match kind {
                Kind::Greedy => ExpansionKind::Greedy,
                Kind::Quasi => ExpansionKind::QuasiGreedy,
            };
            let opts = ExpansionOptions { precision_bits: ctx.bits, ..ExpansionOptions::default() };
            let e = expand(&xr, &qr, m, *n, kind, &opts)?;
            let mut r = Report::new("expand", &["digits", "exact"]);
            r.row(vec![e.digits.to_string().into(), e.exact.map(|w| w.to_string()).into()]);
            csv(r)
        }
        Command::Alpha { q, n } => {
            let e = alpha(&ctx.real(q)?, m, *n)?;
            let mut r = Report::new("alpha", &["digits", "exact"]);
            r.row(vec![e.digits.to_string().into(), e.exact.map(|w| w.to_string()).into()]);
            csv(r)
        }
        Command::Invert { word, x } => {
            let w = EventuallyPeriodicWord::parse(word, m).map_err(|e| Failure::Usage(e.to_string()))?;
            let base = invert_base(&w, &ctx.real(x)?)?;
            let (value, radius) = ctx.show(&base)?;
            let mut r = Report::new("invert", &["word", "base", "radius"]);
            r.row(vec![w.to_string().into(), value.into(), radius]);
            csv(r)
        }
        Command::DimUq { q, n_alpha, n_words } => {
            let e = dim_uq(&ctx.real(q)?, m, *n_alpha, *n_words)?;
            let mut r = Report::new("dim-uq", &["q", "lower", "upper", "count_estimate"]);
            dimension_row(&mut r, q, &e);
            csv(r)
        }
        Command::DimUx { x, n_alpha, n_words } => {
            let e = dim_ux(&ctx.real(x)?, m, *n_alpha, *n_words)?;
            let mut r = Report::new("dim-ux", &["x", "lower", "upper", "count_estimate"]);
            dimension_row(&mut r, x, &e);
            csv(r)
        }
        Command::Staircase { kind, from, to, steps, n_alpha, n_words } => {
            let (a, b) = (ctx.rational(from)?, ctx.rational(to)?);
            let last = BigRational::from_integer(BigInt::from((*steps).max(2) - 1));
            let grid: Vec<f64> = (0..*steps)
                .map(|i| {
                    let t = &a + (&b - &a) * BigRational::from_integer(BigInt::from(i)) / &last;
                    t.to_f64().unwrap_or(f64::NAN)
                })
                .collect();
            let kind = match kind {
                Staircase::Psi => StaircaseKind::Psi,
                Staircase::Phi => StaircaseKind::Phi,
            };
            let mut r = Report::new("staircase", &["abscissa", "lower", "upper"]);
            for row in staircase_samples(kind, m, &grid, *n_alpha, *n_words)? {
                r.row(vec![row.abscissa.into(), row.lower.into(), row.upper.into()]);
            }
            csv(r)
        }
        Command::Classify { x } => {
            let c = classify(&ctx.real(x)?, m, ctx.tol)?;
            let mut r = Report::new("classify", &["x", "regime", "witness_base", "witness_expansion"]);
            let w = c.witnesses.first();
            let base = w.map(|w| ctx.show(&w.base)).transpose()?.map(|(v, _)| v);
            r.row(vec![x.as_str().into(), c.regime.label().into(), base.into(), w.map(|w| w.expansion.to_string()).into()]);
            csv(r)
        }
        Command::Members { x, family, k, j, depth } => {
            let xr = ctx.real(x)?;
            let ws = match family {
                FamilyArg::Golden => golden_tail_family(&xr, m, *k, *depth)?,
                FamilyArg::Dense => dense_family(&xr, m, *j, *k, ctx.seed, *depth)?,
            };
            let mut r = Report::new("members", &["base", "radius", "expansion", "verified"]);
            r.meta("x", x.as_str());
            r.meta("M", cli.m);
            r.meta("seed", ctx.seed);
            witness_rows(&ctx, &mut r, &xr, &ws)?;
            Ok((r, Format::Json))
        }
        Command::ScanUx { x, steps, depth, from, to } => {
            let range = match (from, to) {
                (Some(a), Some(b)) => Some((ctx.rational(a)?, ctx.rational(b)?)),
                (None, None) => None,
                _ => return Err(Failure::Usage("--from and --to go together".into())),
            };
            let rows = enumerate_ux(&ctx.real(x)?, m, range, *steps, *depth)?;
            let mut r = Report::new("scan-ux", &["q_lo", "q_hi", "verdict"]);
            r.meta("depth", *depth);
            for row in rows {
                r.row(vec![ctx.show_rational(&row.lo).into(), ctx.show_rational(&row.hi).into(), row.verdict.label().into()]);
            }
            csv(r)
        }
        Command::LocalDim { x, q, deltas, n_alpha, depth } => {
            let rows = local_dim_experiment(&ctx.real(x)?, &ctx.real(q)?, deltas, m, *n_alpha, *depth)?;
            let mut r = Report::new("local-dim", &["delta", "candidate_fraction", "uq_lower", "uq_upper"]);
            for row in rows {
                r.row(vec![row.delta.into(), row.candidate_fraction.into(), row.uq_lower.into(), row.uq_upper.into()]);
            }
            csv(r)
        }
        Command::Isolated { x, n_max, k_max } => {
            let xr = ctx.real(x)?;
            let cert = isolate(&xr, m, *n_max, *k_max)?
                .ok_or_else(|| Failure::Compute(format!("no isolated base found for x = {x} within the search bounds")))?;
            let (p, radius) = ctx.show(&cert.p)?;
            let verified = cert.verify(2 * ctx.bits)?;
            let mut r = Report::new(
                "isolated",
                &["x", "p", "radius", "n", "k", "family", "expansion", "match_length", "verified"],
            );
            r.row(vec![
                x.as_str().into(),
                p.into(),
                radius,
                cert.n.into(),
                cert.k.into(),
                cert.family.label().into(),
                cert.expansion.to_string().into(),
                cert.match_length.into(),
                verified.into(),
            ]);
            Ok((r, Format::Json))
        }
        Command::IsoCover { n_max, k_max } => {
            let mut r = Report::new("iso-cover", &["lo", "hi", "n", "k", "family"]);
            for iv in iso_intervals(*n_max, *k_max)? {
                let (lo, _) = ctx.show(&iv.lo)?;
                let (hi, _) = ctx.show(&iv.hi)?;
                r.row(vec![lo.into(), hi.into(), iv.n.into(), iv.k.into(), iv.family.label().into()]);
            }
            csv(r)
        }
        Command::VerifyPaper { suite } => {
            let report = run_suite(suite).ok_or_else(|| Failure::Usage(format!("unknown suite {suite}")))??;
            if let Some(f) = report.first_failure() {
                return Err(Failure::Compute(format!("invariant {} violated: {}", f.id, f.detail)));
            }
            let mut r = Report::new("verify-paper", &["id", "passed", "detail"]);
            for c in &report.checks {
                r.row(vec![c.id.into(), c.passed.into(), c.detail.as_str().into()]);
            }
            csv(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        // fails only when a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }
    let result = run(&cli).and_then(|(report, default)| {
        report
            .emit(cli.format.unwrap_or(default), cli.out.as_deref())
            .map_err(|e| Failure::Compute(format!("cannot write output: {e}")))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("univoque: usage: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("univoque: error: {msg}");
            ExitCode::from(1)
        }
    }
}
