//! The `halton-gain` command line: argument grammar and subcommand runners.
//!
//! [`dispatch`] takes the full argument vector and two output streams, so the
//! binary, the examples and the tests all drive the same code path.
//!
//! Exit codes: 0 on success, 1 for invalid input or unknown flags, 2 when an
//! internal check fails (an oracle mismatch or an I/O error).

mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

pub use output::{format_sig17, rational_cells, Cell, Format, Report};

use crate::error::{invalid, Error, Result};
use crate::gains::{
    bounds_table, gain_bruteforce, gain_curve, gain_exact, gamma_max, CoordSubset, GainQuery, BRUTEFORCE_MAX_N,
};
use crate::halton::PointSet;
use crate::primes::first_primes;
use crate::rational::Rational;
use crate::rqmc::{mc_estimate, rqmc_estimate, HaarIntegrand};
use crate::scramble::{randomize, ScrambleKind, ScrambleSpec};

/// Largest `n_max` for `figure 3`.
pub const FIGURE3_MAX_N: u64 = 100_000;

/// Largest `n_max` for `gain-curve`.
pub const GAIN_CURVE_MAX_N: u64 = 10_000_000;

/// Largest point count for `points`.
pub const POINTS_MAX_N: usize = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "halton-gain", version, about = "Scrambled Halton sequences and exact gain coefficients")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every randomized quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all available.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The first d primes.
    Primes {
        #[arg(long)]
        d: usize,
    },
    /// Halton points, optionally scrambled.
    Points {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "none", value_parser = parse_kind)]
        scramble: ScrambleKind,
        #[arg(long, default_value_t = 0)]
        replicate: u64,
    },
    /// One exact gain coefficient.
    Gain {
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        n: u64,
    },
    /// Gains for n = 1..=n_max.
    GainCurve {
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        n_max: u64,
    },
    /// Worst-case gain over all sample sizes.
    Gamma {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n_cap: Option<u64>,
    },
    /// Lower and upper bounds on the worst-case gain for d = 1..=d_max.
    Bounds {
        #[arg(long)]
        d_max: usize,
    },
    /// Replicated estimate of a Haar integrand's variance.
    Variance {
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        /// `none`, `nested` or `linear`; `mc` uses IID uniform points instead.
        #[arg(long, default_value = "nested")]
        scramble: String,
    },
    /// Compares closed-form gains with the pair-counting definition.
    OracleCheck {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = 1)]
        k_max: u32,
    },
    /// Plot-ready data for the bounds figure (1) and the gain-curve figures (2, 3).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        /// Largest dimension for figure 1.
        #[arg(long, default_value_t = 100)]
        d_max: usize,
        /// Largest n for figures 2 and 3.
        #[arg(long)]
        n_max: Option<u64>,
    },
}

fn parse_kind(s: &str) -> std::result::Result<ScrambleKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a subcommand produced.
enum Outcome {
    Report { report: Report, default_format: Format },
    Text(String),
}

/// Nonzero exit requested after the output was written.
struct CheckFailed(String);

/// Runs one command line; `args[0]` is the program name.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().ansi().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };

    let run = || execute(&cli);
    let result = match cli.common.threads {
        Some(0) => Err(invalid("--threads must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start thread pool: {e}");
                return 2;
            }
        },
        None => run(),
    };
    let (outcome, failure) = match result {
        Ok(pair) => pair,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    if let Err(e) = emit(&cli.common, outcome, out) {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    match failure {
        Some(CheckFailed(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            2
        }
        None => 0,
    }
}

fn emit(common: &Common, outcome: Outcome, out: &mut dyn Write) -> std::io::Result<()> {
    let mut file;
    let mut stdout_buf;
    let sink: &mut dyn Write = match &common.out {
        Some(path) => {
            file = BufWriter::new(File::create(path)?);
            &mut file
        }
        None => {
            stdout_buf = BufWriter::new(out);
            &mut stdout_buf
        }
    };
    match outcome {
        Outcome::Text(text) => match common.format {
            Some(_) => unreachable!("text outcomes are only produced without --format"),
            None => writeln!(sink, "{text}")?,
        },
        Outcome::Report { report, default_format } => report.write(common.format.unwrap_or(default_format), sink)?,
    }
    sink.flush()
}

fn config(command: &str, common: &Common, params: &[(&str, Value)]) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("command".into(), Value::from(command));
    map.insert("seed".into(), Value::from(common.seed));
    for (k, v) in params {
        map.insert(k.to_string(), v.clone());
    }
    map
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn basis_for(u: &[usize]) -> Result<crate::primes::PrimeBasis> {
    let d = u.iter().copied().max().ok_or_else(|| invalid("--u must list at least one coordinate"))?;
    if u.contains(&0) {
        return Err(invalid("coordinates are 1-based"));
    }
    first_primes(d)
}

fn execute(cli: &Cli) -> Result<(Outcome, Option<CheckFailed>)> {
    let common = &cli.common;
    let report = |report: Report, default_format: Format| Outcome::Report { report, default_format };
    let outcome = match &cli.command {
        Command::Primes { d } => {
            let basis = first_primes(*d)?;
            let mut rep = Report::new(config("primes", common, &[("d", Value::from(*d))]), vec!["j", "prime"]);
            for (j, &p) in basis.bases().iter().enumerate() {
                rep.push(vec![Cell::from(j + 1), Cell::from(p)]);
            }
            report(rep, Format::Csv)
        }
        Command::Points { d, start, n, scramble, replicate } => {
            if *n > POINTS_MAX_N {
                return Err(Error::SizeGuard { what: "n", value: *n as u128, limit: POINTS_MAX_N as u128 });
            }
            let basis = first_primes(*d)?;
            let spec = ScrambleSpec::new(*scramble, common.seed).with_replicate(*replicate);
            let points = randomize(&PointSet::halton(&basis, *start, *n)?, &spec)?;
            let cfg = config(
                "points",
                common,
                &[
                    ("d", Value::from(*d)),
                    ("start", Value::from(*start)),
                    ("n", Value::from(*n)),
                    ("scramble", Value::from(scramble.to_string())),
                    ("replicate", Value::from(*replicate)),
                ],
            );
            let columns = std::iter::once("i".to_string()).chain((1..=*d).map(|j| format!("x{j}")));
            let mut rep = Report::new(cfg, columns);
            if *scramble != ScrambleKind::None {
                rep.comments.push(format!("scramble={scramble} seed={} replicate={replicate}", common.seed));
            }
            for (i, row) in points.rows() {
                rep.push(std::iter::once(Cell::from(i)).chain(row.iter().map(|&x| Cell::from(x))).collect());
            }
            report(rep, Format::Csv)
        }
        Command::Gain { u, k, n } => {
            let basis = basis_for(u)?;
            let g = gain_exact(&GainQuery::new(&basis, u, k, *n)?)?;
            if common.format.is_none() {
                Outcome::Text(format!("{g} ({})", g.to_f64()))
            } else {
                let cfg = config(
                    "gain",
                    common,
                    &[("u", Value::from(u.clone())), ("k", Value::from(k.clone())), ("n", Value::from(*n))],
                );
                let mut rep = Report::new(cfg, vec!["gain", "gain_num", "gain_den", "gain_float"]);
                let [num, den, float] = rational_cells(g);
                rep.push(vec![Cell::from(g.to_string()), num, den, float]);
                rep.single = true;
                report(rep, Format::Csv)
            }
        }
        Command::GainCurve { u, k, n_max } => {
            if *n_max > GAIN_CURVE_MAX_N {
                return Err(Error::SizeGuard { what: "n_max", value: *n_max as u128, limit: GAIN_CURVE_MAX_N as u128 });
            }
            let basis = basis_for(u)?;
            let curve = gain_curve(&GainQuery::new(&basis, u, k, 1)?, *n_max)?;
            let cfg = config(
                "gain-curve",
                common,
                &[("u", Value::from(u.clone())), ("k", Value::from(k.clone())), ("n_max", Value::from(*n_max))],
            );
            let mut rep = Report::new(cfg, vec!["n", "gain_num", "gain_den", "gain_float"]);
            for (n, g) in curve {
                let [num, den, float] = rational_cells(g);
                rep.push(vec![Cell::from(n), num, den, float]);
            }
            report(rep, Format::Csv)
        }
        Command::Gamma { d, n_cap } => {
            let basis = first_primes(*d)?;
            let s = gamma_max(*d, &basis, *n_cap)?;
            let cfg =
                config("gamma", common, &[("d", Value::from(*d)), ("n_cap", n_cap.map_or(Value::Null, Value::from))]);
            let mut rep = Report::new(
                cfg,
                vec![
                    "d",
                    "gamma",
                    "gamma_num",
                    "gamma_den",
                    "gamma_float",
                    "argmax_n",
                    "n_searched",
                    "exhaustive",
                    "lower_bound",
                    "upper_bound",
                ],
            );
            let [num, den, float] = rational_cells(s.gamma);
            rep.push(vec![
                Cell::from(*d),
                Cell::from(s.gamma.to_string()),
                num,
                den,
                float,
                Cell::from(s.argmax_n),
                Cell::from(s.n_searched),
                Cell::from(s.exhaustive),
                Cell::from(s.lower_bound),
                Cell::from(s.upper_bound),
            ]);
            rep.single = true;
            report(rep, Format::Json)
        }
        Command::Bounds { d_max } => {
            let mut rep = Report::new(
                config("bounds", common, &[("d_max", Value::from(*d_max))]),
                vec!["d", "lower", "upper", "guide"],
            );
            for row in bounds_table(*d_max)? {
                rep.push(vec![Cell::from(row.d), Cell::from(row.lower), Cell::from(row.upper), Cell::from(row.guide)]);
            }
            report(rep, Format::Csv)
        }
        Command::Variance { u, k, n, reps, scramble } => {
            let basis = basis_for(u)?;
            let f = HaarIntegrand::with_default_tables(u, k, &basis)?;
            let summary = if scramble == "mc" {
                mc_estimate(&f, basis.dimension(), *n, *reps, common.seed)?
            } else {
                let kind: ScrambleKind = scramble.parse()?;
                rqmc_estimate(&f, &basis, *n, *reps, &ScrambleSpec::new(kind, common.seed))?
            };
            let expected = if scramble == "mc" { Rational::ONE } else { gain_exact(&f.gain_query(&basis, *n)?)? };
            let diff = summary.empirical_gain - expected.to_f64();
            let z = if summary.gain_std_error > 0.0 {
                diff / summary.gain_std_error
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY * diff.signum()
            };
            let cfg = config(
                "variance",
                common,
                &[
                    ("u", Value::from(u.clone())),
                    ("k", Value::from(k.clone())),
                    ("n", Value::from(*n)),
                    ("reps", Value::from(*reps)),
                    ("scramble", Value::from(scramble.clone())),
                ],
            );
            let mut rep = Report::new(
                cfg,
                vec![
                    "n",
                    "R",
                    "mean",
                    "var",
                    "sigma2",
                    "empirical_gain",
                    "gain_std_error",
                    "expected_gain_num",
                    "expected_gain_den",
                    "z_score",
                ],
            );
            rep.comments.push(format!("scramble={scramble} seed={}", common.seed));
            rep.push(vec![
                Cell::from(*n),
                Cell::from(*reps),
                Cell::from(summary.grand_mean),
                Cell::from(summary.sample_variance),
                Cell::from(summary.sigma2),
                Cell::from(summary.empirical_gain),
                Cell::from(summary.gain_std_error),
                Cell::Int(expected.numer()),
                Cell::Int(expected.denom()),
                Cell::from(z),
            ]);
            rep.single = true;
            report(rep, Format::Json)
        }
        Command::OracleCheck { d, n_max, k_max } => {
            return oracle_check(common, *d, *n_max, *k_max).map(|(rep, fail)| (report(rep, Format::Csv), fail));
        }
        Command::Figure { which, d_max, n_max } => report(figure(common, *which, *d_max, *n_max)?, Format::Csv),
    };
    Ok((outcome, None))
}

/// Level vectors on `bases` with every entry in `0..=k_max`.
fn level_grid(len: usize, k_max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|p| (0..=k_max).map(move |k| [p.clone(), vec![k]].concat())).collect();
    }
    out
}

fn oracle_check(common: &Common, d: usize, n_max: u64, k_max: u32) -> Result<(Report, Option<CheckFailed>)> {
    if n_max == 0 || n_max > BRUTEFORCE_MAX_N {
        return Err(invalid(format!("--n-max must lie in 1..={BRUTEFORCE_MAX_N}")));
    }
    if d == 0 || d > 8 {
        return Err(invalid("--d must lie in 1..=8"));
    }
    if k_max > 4 {
        return Err(invalid("--k-max must be at most 4"));
    }
    let basis = first_primes(d)?;
    let cfg = config(
        "oracle-check",
        common,
        &[("d", Value::from(d)), ("n_max", Value::from(n_max)), ("k_max", Value::from(k_max))],
    );
    let mut rep = Report::new(cfg, vec!["u", "k", "n", "exact", "bruteforce"]);
    let mut checked = 0u64;
    for u in CoordSubset::nonempty_of(d) {
        let idx: Vec<usize> = u.indices().collect();
        for k in level_grid(idx.len(), k_max) {
            for n in 1..=n_max {
                let q = GainQuery::new(&basis, &idx, &k, n)?;
                let (exact, brute) = (gain_exact(&q)?, gain_bruteforce(&q)?);
                checked += 1;
                if exact != brute {
                    rep.push(vec![
                        Cell::from(joined(&idx)),
                        Cell::from(joined(&k)),
                        Cell::from(n),
                        Cell::from(exact.to_string()),
                        Cell::from(brute.to_string()),
                    ]);
                }
            }
        }
    }
    rep.comments.push(format!("checked={checked} mismatches={}", rep.rows.len()));
    rep.config.insert("checked".into(), Value::from(checked));
    rep.config.insert("mismatches".into(), Value::from(rep.rows.len()));
    let failure =
        (!rep.rows.is_empty()).then(|| CheckFailed(format!("{} of {checked} queries disagree", rep.rows.len())));
    Ok((rep, failure))
}

fn figure(common: &Common, which: u8, d_max: usize, n_max: Option<u64>) -> Result<Report> {
    let curve_columns = vec!["u", "k", "n", "gain_num", "gain_den", "gain_float"];
    match which {
        1 => {
            if d_max < 2 {
                return Err(invalid("figure 1 needs --d-max of at least 2"));
            }
            let cfg = config("figure", common, &[("which", Value::from(1)), ("d_max", Value::from(d_max))]);
            let mut rep = Report::new(cfg, vec!["d", "lower", "upper", "guide"]);
            for row in bounds_table(d_max)?.skip(1) {
                rep.push(vec![Cell::from(row.d), Cell::from(row.lower), Cell::from(row.upper), Cell::from(row.guide)]);
            }
            Ok(rep)
        }
        2 => {
            let n_max = n_max.unwrap_or(36);
            let basis = first_primes(2)?;
            let cfg = config("figure", common, &[("which", Value::from(2)), ("n_max", Value::from(n_max))]);
            let mut rep = Report::new(cfg, curve_columns);
            for k in [[0, 0], [0, 1], [1, 0], [1, 1]] {
                for (n, g) in gain_curve(&GainQuery::new(&basis, &[1, 2], &k, 1)?, n_max)? {
                    let [num, den, float] = rational_cells(g);
                    rep.push(vec![Cell::from("1;2"), Cell::from(joined(&k)), Cell::from(n), num, den, float]);
                }
            }
            Ok(rep)
        }
        3 => {
            let n_max = n_max.unwrap_or(1000);
            if n_max > FIGURE3_MAX_N {
                return Err(Error::SizeGuard { what: "n_max", value: n_max as u128, limit: FIGURE3_MAX_N as u128 });
            }
            let basis = first_primes(3)?;
            let cfg = config("figure", common, &[("which", Value::from(3)), ("n_max", Value::from(n_max))]);
            let mut rep = Report::new(cfg, curve_columns);
            for u in CoordSubset::nonempty_of(3) {
                let idx: Vec<usize> = u.indices().collect();
                let bases: Vec<u64> = idx.iter().map(|&j| basis.base(j)).collect();
                for k in levels_below(&bases, n_max) {
                    let q = GainQuery::new(&basis, &idx, &k, 1)?;
                    let first = q.m_under() as u64 + 1;
                    let kernel = crate::gains::GainKernel::new(&q)?;
                    for n in first..=n_max {
                        let [num, den, float] = rational_cells(kernel.gain(n)?);
                        rep.push(vec![
                            Cell::from(joined(&idx)),
                            Cell::from(joined(&k)),
                            Cell::from(n),
                            num,
                            den,
                            float,
                        ]);
                    }
                }
            }
            Ok(rep)
        }
        _ => Err(invalid("figure must be 1, 2 or 3")),
    }
}

/// Level vectors with `prod b_j^{k_j} < n_max`, in lexicographic order.
fn levels_below(bases: &[u64], n_max: u64) -> Vec<Vec<u32>> {
    let Some((&b, rest)) = bases.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    let mut power = 1u64;
    let mut k = 0;
    while power < n_max {
        for tail in levels_below(rest, n_max.div_ceil(power)) {
            out.push([vec![k], tail].concat());
        }
        k += 1;
        power = power.saturating_mul(b);
    }
    out
}
