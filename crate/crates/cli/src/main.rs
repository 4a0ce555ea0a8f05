//! Command-line front end for ergodic capacity computations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use ergocap::asymptotics::{
    frechet_gaps, gap_report, multiuser_gap_asymptotic, multiuser_oa_ci_conjecture, space_diversity_gaps,
};
use ergocap::distributions::{DistributionKind, DistributionSpec, FadingDistribution};
use ergocap::mc::{mc_scheme, DEFAULT_SEED};
use ergocap::schemes::{CapacityResult, Scheme, SchemeSpec, Threshold};
use ergocap::Error;

#[derive(Parser)]
#[command(
    name = "ergocap",
    version,
    about = "Ergodic capacity of adaptive transmission over fading channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity of one scheme at one SNR, as a JSON record
    Capacity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: String,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
    },
    /// Capacities over an SNR grid, as CSV
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated, e.g. `awgn,oa,ra,ci,tci:opt,ctci:0.5`
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<String>,
        /// `start:stop:step` in dB, or a single value
        #[arg(long, allow_hyphen_values = true)]
        snr_db: String,
        /// CSV destination; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// High-SNR gaps between the schemes
    Gaps {
        #[arg(long)]
        dist: String,
        #[arg(long, value_enum, default_value_t = Units::Bits)]
        units: Units,
    },
    /// Run the invariant checks for one law
    Verify {
        #[arg(long)]
        dist: String,
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Monte-Carlo estimate of one scheme's capacity
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: String,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Fading law, e.g. `miso:N=2,K=2`, `frechet:alpha=2,K=4`, `tab:path=gains.csv`
    #[arg(long)]
    dist: String,
    /// Threshold for `tci`/`ctci` entries given without one
    #[arg(long)]
    zt: Option<f64>,
    /// Whether thresholds are effective gains `z_t` or SNRs `γ_t = S·z_t`
    #[arg(long, value_enum, default_value_t = ZtUnits::Z)]
    zt_units: ZtUnits,
    #[arg(long, value_enum, default_value_t = Units::Bits)]
    units: Units,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Bits,
    Nats,
}

impl Units {
    fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Bits => nats / std::f64::consts::LN_2,
            Units::Nats => nats,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ZtUnits {
    Z,
    Gamma,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Level {
    Fast,
    Full,
}

pub(crate) enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Domain(_) | Error::Format(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            other => Failure::Invariant(other.to_string()),
        }
    }
}

/// JSON number, or `"inf"` for infinities that JSON cannot hold.
pub(crate) fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        Value::Null
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn load(dist: &str) -> Result<(DistributionSpec, Box<dyn FadingDistribution>), Failure> {
    let spec: DistributionSpec = dist.parse()?;
    let law = spec.build()?;
    Ok((spec, law))
}

fn linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("--snr-db must be a number or start:stop:step, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| f64::from_str(p.trim()))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|_| bad())?;
    match nums[..] {
        [x] if x.is_finite() => Ok(vec![x]),
        [start, stop, step] => {
            if !(step > 0.0) || !(start <= stop) || !start.is_finite() || !stop.is_finite() {
                return Err(Failure::Usage(format!(
                    "grid needs start <= stop and step > 0, got {text:?}"
                )));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(bad()),
    }
}

fn parse_schemes(items: &[String], zt: Option<f64>) -> Result<Vec<SchemeSpec>, Failure> {
    let specs = items
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| Ok(s.parse::<SchemeSpec>()?.or_threshold(zt)))
        .collect::<Result<Vec<_>, Failure>>()?;
    if specs.is_empty() {
        return Err(Failure::Usage("at least one scheme is required".into()));
    }
    for spec in &specs {
        if matches!(spec.scheme, Scheme::Tci | Scheme::Ctci) && spec.threshold.is_none() {
            return Err(Failure::Usage(format!(
                "{} needs a threshold: write {}:<z_t> or pass --zt",
                spec.scheme, spec.scheme
            )));
        }
    }
    Ok(specs)
}

/// Converts a threshold given as an SNR into effective-gain units.
fn at_power(spec: SchemeSpec, s: f64, zt_units: ZtUnits) -> SchemeSpec {
    match (zt_units, spec.threshold) {
        (ZtUnits::Gamma, Some(Threshold::Fixed(g))) => SchemeSpec::with_threshold(spec.scheme, g / s),
        _ => spec,
    }
}

fn record(label: &str, snr_db: f64, r: &CapacityResult, units: Units) -> Value {
    json!({
        "dist": label,
        "scheme": r.scheme.name(),
        "snr_db": snr_db,
        "avg_power": r.avg_power,
        "capacity": units.convert(r.capacity_nats),
        "units": units.name(),
        "z_t": opt(r.threshold_z_t),
        "d_max": opt(r.d_max),
        "residual": opt(r.power_constraint_residual),
        "degenerate": r.degenerate,
    })
}

fn cmd_capacity(common: &Common, scheme: &str, snr_db: f64) -> Result<(), Failure> {
    let (_, law) = load(&common.dist)?;
    let spec = parse_schemes(&[scheme.to_string()], common.zt)?[0];
    let s = linear(snr_db);
    let r = at_power(spec, s, common.zt_units).evaluate(&law, s)?;
    println!("{}", record(&law.label(), snr_db, &r, common.units));
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.6e}"),
        Some(v) if v > 0.0 => "inf".into(),
        _ => String::new(),
    }
}

fn cmd_sweep(common: &Common, schemes: &[String], grid: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    let (_, law) = load(&common.dist)?;
    let specs = parse_schemes(schemes, common.zt)?;
    let grid = parse_grid(grid)?;
    let cells: Vec<(f64, SchemeSpec)> = grid.iter().flat_map(|&x| specs.iter().map(move |&s| (x, s))).collect();
    let rows = cells
        .par_iter()
        .map(|&(x, spec)| {
            let s = linear(x);
            let r = at_power(spec, s, common.zt_units).evaluate(&law, s)?;
            Ok(format!(
                "{x},{spec},{:.6},{},{}\n",
                common.units.convert(r.capacity_nats),
                fmt_opt(r.threshold_z_t),
                fmt_opt(r.d_max)
            ))
        })
        .collect::<Result<Vec<String>, Error>>()?;
    let mut csv = String::from("snr_db,scheme,capacity,z_t,d_max\n");
    rows.iter().for_each(|r| csv.push_str(r));
    match out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            println!(
                "{}",
                json!({"dist": law.label(), "rows": rows.len(), "units": common.units.name(), "out": path.display().to_string()})
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_gaps(dist: &str, units: Units) -> Result<(), Failure> {
    let (spec, law) = load(dist)?;
    let factor = units.convert(1.0);
    let report = gap_report(&law).scaled(factor);
    let mut out = json!({
        "dist": law.label(),
        "units": units.name(),
        "gaps": report,
    });
    let param = |k: &str| spec.parameters.get(k).copied();
    let extra = match spec.kind {
        DistributionKind::GammaDiversity => match param("N") {
            Some(n) if n >= 2.0 => {
                let g = space_diversity_gaps(n as u32)?;
                Some(json!({
                    "gap_oa_ci": g.gap_oa_ci * factor,
                    "gap_awgn_ci": g.gap_awgn_ci * factor,
                    "expansion_oa_ci": g.expansion_oa_ci * factor,
                    "expansion_awgn_ci": g.expansion_awgn_ci * factor,
                }))
            }
            _ => None,
        },
        DistributionKind::Frechet => match param("alpha") {
            Some(a) => {
                let g = frechet_gaps(a)?;
                Some(json!({
                    "gap_oa_ci": g.gap_oa_ci * factor,
                    "gap_awgn_ci": num(g.gap_awgn_ci * factor),
                }))
            }
            None => None,
        },
        DistributionKind::MaxExponential => match param("K") {
            Some(k) if k >= 2.0 => {
                let k = k as u32;
                let conj = multiuser_oa_ci_conjecture(k)?;
                Some(json!({
                    "gap_awgn_ci_asymptotic": multiuser_gap_asymptotic(k)? * factor,
                    "gap_oa_ci_conjecture": conj.value * factor,
                    "approximate": true,
                }))
            }
            _ => None,
        },
        _ => None,
    };
    if let Some(extra) = extra {
        out["closed_form"] = extra;
    }
    println!("{out}");
    Ok(())
}

fn cmd_mc(common: &Common, scheme: &str, snr_db: f64, seed: u64, samples: u64) -> Result<(), Failure> {
    let (_, law) = load(&common.dist)?;
    let spec = parse_schemes(&[scheme.to_string()], common.zt)?[0];
    let s = linear(snr_db);
    let spec = at_power(spec, s, common.zt_units);
    let est = mc_scheme(&law, &spec, s, samples, seed)?;
    let reference = spec.evaluate(&law, s)?;
    let u = common.units;
    println!(
        "{}",
        json!({
            "dist": law.label(),
            "scheme": spec.to_string(),
            "snr_db": snr_db,
            "avg_power": s,
            "units": u.name(),
            "estimate": u.convert(est.mean_nats),
            "std_error": u.convert(est.std_error),
            "quadrature": u.convert(reference.capacity_nats),
            "n_samples": est.n_samples,
            "seed": est.seed,
            "power_mean": est.power_mean,
            "power_std_error": est.power_std_error,
            "degenerate": est.degenerate,
        })
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Capacity { common, scheme, snr_db } => cmd_capacity(&common, &scheme, snr_db),
        Command::Sweep {
            common,
            schemes,
            snr_db,
            out,
        } => cmd_sweep(&common, &schemes, &snr_db, out.as_ref()),
        Command::Gaps { dist, units } => cmd_gaps(&dist, units),
        Command::Verify {
            dist,
            level,
            seed,
            samples,
        } => {
            let (_, law) = load(&dist)?;
            let report = verify::run(&law, level, seed, samples);
            println!("{}", verify::to_json(&law.label(), level, &report));
            match report.iter().find(|c| !c.pass) {
                Some(c) => Err(Failure::Invariant(format!("check failed: {}", c.name))),
                None => Ok(()),
            }
        }
        Command::Mc {
            common,
            scheme,
            snr_db,
            seed,
            samples,
        } => cmd_mc(&common, &scheme, snr_db, seed, samples),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
