//! `ellbeta`: run identity suites and evaluate single quantities.
//!
//! Exit status is 0 when every case passes, 1 when any case fails and 2 on a
//! configuration error (bad arguments, unknown suite, unwritable report).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ellbeta::beta::{e_f4, e_m, BetaParams, F4IntegralParams};
use ellbeta::quadrature::QuadratureConfig;
use ellbeta::series::{sum_phi, sum_vwp_w, PhiSeriesSpec};
use ellbeta::special::{pq_poch_with_err, qpoch_inf_with_err, EllipticBase, TruncationPolicy, C64};
use ellbeta::verify::{emit_report, run_suite, BaseEnvelope, Destination, ReportFormat, Suite, SuiteSpec, ALL_IDENTITIES};

/// Default directory for JSON reports when `--json` is absent.
const REPORT_DIR_ENV: &str = "ELLBETA_REPORT_DIR";

#[derive(Parser)]
#[command(name = "ellbeta", version, about = "Elliptic beta integral identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite (or `all`) and print a per-case report.
    Verify(VerifyArgs),
    /// List the registered suites with their default point counts.
    ListSuites,
    /// Evaluate one quantity and print it with an error estimate.
    Eval {
        #[command(subcommand)]
        what: EvalCommand,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (case-insensitive), or `all`.
    suite: String,
    /// Number of sampled points (suite default otherwise)
    #[arg(long)]
    points: Option<usize>,
    /// Sampler seed; the same seed reproduces the same report
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance for every identity in the suite.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here; defaults to `$ELLBETA_REPORT_DIR/<SUITE>.json` when that is set.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Print the JSON report to standard output instead of the text report.
    #[arg(long)]
    json_stdout: bool,
    /// Fix the nome `p` (needs `--q`).
    #[arg(long, requires = "q", allow_hyphen_values = true)]
    p: Option<String>,
    /// Fix the nome `q` (needs `--p`).
    #[arg(long, requires = "p", allow_hyphen_values = true)]
    q: Option<String>,
    /// Upper bound on sampled |p|
    #[arg(long)]
    p_max: Option<f64>,
    /// Upper bound on sampled |q|
    #[arg(long)]
    q_max: Option<f64>,
    /// Minimum relative distance of every pole family from the unit circle.
    #[arg(long)]
    margin: Option<f64>,
    /// Directory for `<SUITE>.json` reports when `--json` is absent
    #[arg(long, env = REPORT_DIR_ENV, hide_env_values = true)]
    report_dir: Option<PathBuf>,
}

/// Complex numbers are written `re` or `re,im`.
#[derive(Subcommand)]
enum EvalCommand {
    /// Elliptic gamma function Γ(x;p,q).
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Theta function θ(x;p) = (x, p/x; p).
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
    },
    /// r+1 phi r series; repeat `--num` and `--den`.
    Phi {
        #[arg(long = "num", allow_hyphen_values = true)]
        num: Vec<String>,
        #[arg(long = "den", allow_hyphen_values = true)]
        den: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Very-well-poised W series with leading parameter `a`; repeat `--b`.
    W {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long = "b", allow_hyphen_values = true)]
        b: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// E^0 by quadrature; six `--t` with product pq.
    E0 {
        #[arg(long = "t", allow_hyphen_values = true)]
        t: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// The F4-symmetric integral E(b;t); four `--t`.
    Ef4 {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long = "t", allow_hyphen_values = true)]
        t: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
}

fn parse_complex(s: &str) -> anyhow::Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().with_context(|| format!("`{s}` is not `re` or `re,im`"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => bail!("`{s}` is not `re` or `re,im`"),
    }
}

fn parse_all(xs: &[String]) -> anyhow::Result<Vec<C64>> {
    xs.iter().map(|x| parse_complex(x)).collect()
}

fn fmt_complex(z: C64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

fn print_value(value: C64, err: f64, extra: &[(&str, String)]) {
    println!("value = {}", fmt_complex(value));
    println!("error_estimate = {err:.3e}");
    for (k, v) in extra {
        println!("{k} = {v}");
    }
}

/// Sum of the relative error estimates of a quotient's two sides.
fn quotient_err(num: (C64, f64), den: (C64, f64)) -> f64 {
    num.1 / num.0.norm().max(f64::MIN_POSITIVE) + den.1 / den.0.norm().max(f64::MIN_POSITIVE)
}

fn eval(what: EvalCommand) -> anyhow::Result<()> {
    let policy = TruncationPolicy::default();
    match what {
        EvalCommand::Gamma { x, p, q } => {
            let x = parse_complex(&x)?;
            let base = EllipticBase::new(parse_complex(&p)?, parse_complex(&q)?)?;
            let num = pq_poch_with_err(base.pq() / x, &base)?;
            let den = pq_poch_with_err(x, &base)?;
            if den.0 == C64::new(0.0, 0.0) {
                bail!(ellbeta::Error::Pole { re: x.re, im: x.im });
            }
            let value = num.0 / den.0;
            print_value(value, quotient_err(num, den) * value.norm(), &[]);
        }
        EvalCommand::Theta { x, p } => {
            let (x, p) = (parse_complex(&x)?, parse_complex(&p)?);
            let a = qpoch_inf_with_err(x, p, &policy)?;
            let b = qpoch_inf_with_err(p / x, p, &policy)?;
            let value = a.0 * b.0;
            print_value(value, quotient_err(a, b) * value.norm(), &[]);
        }
        EvalCommand::Phi { num, den, q, z } => {
            let spec = PhiSeriesSpec::new(parse_all(&num)?, parse_all(&den)?, parse_complex(&q)?, parse_complex(&z)?)?;
            let r = sum_phi(&spec, &policy)?;
            print_value(
                r.value,
                r.tail_estimate,
                &[("terms_used", r.terms_used.to_string()), ("terminated", r.terminated.to_string())],
            );
        }
        EvalCommand::W { a, b, q, z } => {
            let r = sum_vwp_w(parse_complex(&a)?, &parse_all(&b)?, parse_complex(&q)?, parse_complex(&z)?, &policy)?;
            print_value(
                r.value,
                r.tail_estimate,
                &[("terms_used", r.terms_used.to_string()), ("terminated", r.terminated.to_string())],
            );
        }
        EvalCommand::E0 { t, p, q } => {
            let base = EllipticBase::new(parse_complex(&p)?, parse_complex(&q)?)?;
            let params = BetaParams::from_tuple(0, parse_all(&t)?, &base)?;
            let r = e_m(&params, &base, &QuadratureConfig::default())?;
            print_value(r.value, r.err_estimate, &[("n_used", r.n_used.to_string())]);
        }
        EvalCommand::Ef4 { b, t, p, q } => {
            let base = EllipticBase::new(parse_complex(&p)?, parse_complex(&q)?)?;
            let t = parse_all(&t)?;
            let t: [C64; 4] = t.try_into().map_err(|v: Vec<C64>| anyhow::anyhow!("expected four --t values, got {}", v.len()))?;
            let params = F4IntegralParams::new(parse_complex(&b)?, t, base)?;
            let r = e_f4(&params, &QuadratureConfig::default())?;
            print_value(r.value, r.err_estimate, &[("n_used", r.n_used.to_string())]);
        }
    }
    Ok(())
}

fn suite_spec(suite: Suite, args: &VerifyArgs) -> anyhow::Result<SuiteSpec> {
    let mut spec = SuiteSpec::new(suite);
    if let Some(n) = args.points {
        spec = spec.with_points(n)?;
    }
    if let Some(seed) = args.seed {
        spec = spec.with_seed(seed);
    }
    if let Some(tol) = args.tol {
        spec = spec.with_tolerance(ALL_IDENTITIES, tol)?;
    }
    if args.p_max.is_some() || args.q_max.is_some() || args.margin.is_some() {
        let e = spec.envelope();
        spec = spec.with_envelope(BaseEnvelope {
            p_max: args.p_max.unwrap_or(e.p_max),
            q_max: args.q_max.unwrap_or(e.q_max),
            pole_margin: args.margin.unwrap_or(e.pole_margin),
        })?;
    }
    if let (Some(p), Some(q)) = (&args.p, &args.q) {
        spec = spec.with_fixed_base(parse_complex(p)?, parse_complex(q)?)?;
    }
    Ok(spec)
}

/// `Ok(true)` when every case of every requested suite passed.
fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let suites: Vec<Suite> = if args.suite.eq_ignore_ascii_case("all") {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse()?]
    };
    if args.json.is_some() && suites.len() > 1 {
        bail!("--json takes a single suite; use {REPORT_DIR_ENV} or --report-dir for `all`");
    }
    let specs = suites.iter().map(|&s| suite_spec(s, &args)).collect::<anyhow::Result<Vec<_>>>()?;
    let mut all_pass = true;
    for spec in specs {
        let report = run_suite(&spec)?;
        all_pass &= report.all_pass();
        let stdout_format = if args.json_stdout { ReportFormat::Json } else { ReportFormat::Text };
        emit_report(&report, stdout_format, &Destination::Stdout)?;
        let file = args
            .json
            .clone()
            .or_else(|| args.report_dir.as_ref().map(|d| d.join(format!("{}.json", spec.suite().name()))));
        if let Some(path) = file {
            emit_report(&report, ReportFormat::Json, &Destination::File(path))?;
        }
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::ListSuites => {
            for s in Suite::ALL {
                println!("{:<16} {:>4}  {}", s.name(), s.default_points(), s.description());
            }
            Ok(true)
        }
        Command::Eval { what } => eval(what).map(|()| true),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
