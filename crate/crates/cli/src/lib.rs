//! Command dispatch for the `vai` binary.
//!
//! Exit codes: 0 success (or VAI holds), 1 computation failed, 2 input
//! error, 3 VAI fails, 4 no invariant measure.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use vai_core::catalog;
use vai_core::exact::{Rat, Subspace};
use vai_core::io::{
    parse_algebra, parse_bound, parse_parabolic, parse_subalgebra, parse_theta, FitCheck,
    InputHash, Report, ReportPayload,
};
use vai_core::lie::{LieAlgebra, Subalgebra};
use vai_core::reductivity::{vai_verdict, vai_verdict_with_theta, CartanData, Verdict};
use vai_core::volume::{self, model_by_name, VolumeSeries, MODEL_NAMES};
use vai_core::witness::{
    build_n1, mt_report, predict_lower_bound, predict_symmetric_exponent, unipotent_witness,
    ParabolicData,
};
use vai_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const FIT_TOLERANCE: f64 = 0.2;

#[derive(Parser, Debug)]
#[command(
    name = "vai",
    version,
    about = "Volume asymptotics of homogeneous spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide unimodularity and reductive type of a pair (g, h).
    Check(CheckArgs),
    /// Build a decay witness for a pair where VAI fails.
    Witness(WitnessArgs),
    /// Growth exponents along a direction x in q ∩ p.
    Bound(BoundArgs),
    /// Monte Carlo volumes of balls along a curve in a model space.
    Estimate(EstimateArgs),
}

#[derive(Args, Debug)]
pub struct PairArgs {
    /// Algebra file, or `catalog:NAME` for a bundled one.
    #[arg(long)]
    pub algebra: String,
    #[arg(long)]
    pub subalgebra: String,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub parabolic: Option<String>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub theta: String,
    /// File with the direction `x` and nilradical `u`.
    #[arg(long)]
    pub bound: String,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub space: String,
    /// `A:B:STEP`.
    #[arg(long, allow_hyphen_values = true)]
    pub t_range: String,
    #[arg(long, default_value_t = volume::DEFAULT_RADIUS)]
    pub radius: f64,
    #[arg(long, default_value_t = volume::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub fit: bool,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<String>,
}

/// A failure with its exit code and optional structured detail.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub detail: Option<serde_json::Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
            detail: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidAlgebra(_)
            | Error::InvalidCartan(_)
            | Error::DimensionMismatch { .. }
            | Error::LinearlyDependent
            | Error::NotClosed(_)
            | Error::EmptyBox(_)
            | Error::TooFewPoints { .. } => EXIT_INPUT,
            _ => EXIT_FAILURE,
        };
        let detail = match &e {
            Error::GammaNotPositive(p) => serde_json::to_value(p).ok(),
            _ => None,
        };
        Failure {
            code,
            message: e.to_string(),
            detail,
        }
    }
}

type CmdResult = Result<(Report, i32), Failure>;

struct Inputs {
    hashes: Vec<InputHash>,
}

impl Inputs {
    fn new() -> Self {
        Inputs { hashes: Vec::new() }
    }

    /// Reads a path or a `catalog:NAME` fixture and records its hash.
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        let text = match path.strip_prefix("catalog:") {
            Some(name) => catalog::file(name)
                .map(str::to_string)
                .ok_or_else(|| Failure::input(format!("no catalog entry named {name:?}")))?,
            None => {
                std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))?
            }
        };
        self.hashes.push(InputHash {
            path: path.to_string(),
            sha256: hex(&Sha256::digest(text.as_bytes())),
        });
        Ok(text)
    }

    fn algebra(&mut self, path: &str) -> Result<LieAlgebra, Failure> {
        let text = self.read(path)?;
        Ok(parse_algebra(&text, path)?)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn load_pair<'g>(
    inputs: &mut Inputs,
    g: &'g LieAlgebra,
    path: &str,
) -> Result<Subalgebra<'g>, Failure> {
    let text = inputs.read(path)?;
    let f = parse_subalgebra(&text, path, g)?;
    if f.algebra != g.name() {
        return Err(Failure::input(format!(
            "{path}: subalgebra belongs to {:?}, not {:?}",
            f.algebra,
            g.name()
        )));
    }
    Ok(Subalgebra::new(g, f.basis)?)
}

fn load_cartan(inputs: &mut Inputs, g: &LieAlgebra, path: &str) -> Result<CartanData, Failure> {
    let text = inputs.read(path)?;
    Ok(CartanData::new(g, parse_theta(&text, path, g)?)?)
}

fn cmd_check(args: &CheckArgs, inputs: &mut Inputs) -> Result<(ReportPayload, i32), Failure> {
    let g = inputs.algebra(&args.pair.algebra)?;
    let h = load_pair(inputs, &g, &args.pair.subalgebra)?;
    let report = match &args.theta {
        Some(path) => {
            let c = load_cartan(inputs, &g, path)?;
            vai_verdict_with_theta(&g, &h, &c)?
        }
        None => vai_verdict(&g, &h)?,
    };
    let code = report.vai.exit_code();
    Ok((ReportPayload::Reductivity(report), code))
}

fn cmd_witness(args: &WitnessArgs, inputs: &mut Inputs) -> Result<(ReportPayload, i32), Failure> {
    let g = inputs.algebra(&args.pair.algebra)?;
    let h = load_pair(inputs, &g, &args.pair.subalgebra)?;
    let verdict = vai_verdict(&g, &h)?;
    if verdict.vai != Verdict::Fails {
        return Err(Failure::input(format!(
            "a decay witness needs a pair where VAI fails; verdict is {:?}",
            verdict.vai
        )));
    }
    match &args.parabolic {
        Some(path) => {
            let text = inputs.read(path)?;
            let p = ParabolicData::from_file(&g, &parse_parabolic(&text, path, &g)?)?;
            let witness = build_n1(&g, &h, &p)?;
            let mt = mt_report(&g, &witness)?;
            let code = if mt.holds() { EXIT_OK } else { EXIT_FAILURE };
            Ok((ReportPayload::DecayWitness { witness, mt }, code))
        }
        None if g.acts_nilpotently(h.space()) => Ok((
            ReportPayload::UnipotentWitness(unipotent_witness(&g, &h, None)?),
            EXIT_OK,
        )),
        None => Err(Failure::input("h is not ad-nilpotent; pass --parabolic")),
    }
}

fn cmd_bound(args: &BoundArgs, inputs: &mut Inputs) -> Result<(ReportPayload, i32), Failure> {
    let g = inputs.algebra(&args.pair.algebra)?;
    let h = load_pair(inputs, &g, &args.pair.subalgebra)?;
    let c = load_cartan(inputs, &g, &args.theta)?;
    let text = inputs.read(&args.bound)?;
    let b = parse_bound(&text, &args.bound, &g)?;
    let cert = predict_lower_bound(&g, &h, &c, &b.x)?;
    let u = Subspace::new(g.dim(), b.u.clone())?;
    let symmetric_exponent = match predict_symmetric_exponent(&g, &h, &c, &u, &b.x) {
        Ok(r) => Some(r),
        Err(Error::NotSymmetric) => None,
        Err(e) => return Err(e.into()),
    };
    Ok((
        ReportPayload::LowerBound {
            cert,
            symmetric_exponent,
        },
        EXIT_OK,
    ))
}

/// Grid `A, A + STEP, ..., <= B`.
pub fn parse_t_range(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Failure::input(format!("malformed --t-range {s:?}; expected A:B:STEP"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let (a, b, step) = (v[0], v[1], v[2]);
    if !(a.is_finite() && b.is_finite() && step > 0.0 && step.is_finite() && b >= a) {
        return Err(bad());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + step * i as f64).collect())
}

/// Exact exponent each model is compared against, from the bundled pairs.
fn predicted_exponent(space: &str) -> Result<(String, Rat, Option<Rat>), Failure> {
    let sl2 = parse_algebra(catalog::file("sl2").expect("bundled"), "catalog:sl2")?;
    let sub = |name: &str| -> Result<Subalgebra<'_>, Failure> {
        let f = parse_subalgebra(catalog::file(name).expect("bundled"), name, &sl2)?;
        Ok(Subalgebra::new(&sl2, f.basis)?)
    };
    let symmetric = |h: &str, bound: &str| -> Result<Rat, Failure> {
        let h = sub(h)?;
        let c = CartanData::negative_transpose(&sl2)?;
        let b = parse_bound(catalog::file(bound).expect("bundled"), bound, &sl2)?;
        let u = Subspace::new(sl2.dim(), b.u)?;
        Ok(predict_symmetric_exponent(&sl2, &h, &c, &u, &b.x)?)
    };
    Ok(match space {
        "sl2-mod-n" | "sl2-orbit-cone" => {
            let n = sub("nE")?;
            (
                "exact".into(),
                unipotent_witness(&sl2, &n, None)?.gamma,
                None,
            )
        }
        "spd2" => ("exact".into(), symmetric("so2", "sl2-so2-bound")?, None),
        "sl2-orbit-hyperboloid" => (
            "lower-bound".into(),
            Rat::zero(),
            Some(symmetric("so11", "sl2-so11-bound")?),
        ),
        _ => return Err(Failure::input(format!("unknown space {space:?}"))),
    })
}

fn fit_check(series: &VolumeSeries) -> Result<FitCheck, Failure> {
    let (mode, predicted, reference) = predicted_exponent(&series.space)?;
    let (slope, half_width) = volume::fit_log_slope(series)?;
    let p = predicted.to_f64();
    let ok = if mode == "exact" {
        (slope - p).abs() <= FIT_TOLERANCE
    } else {
        slope >= p - FIT_TOLERANCE
    };
    let bounded_below =
        (series.space == "spd2" || series.space == "sl2-orbit-hyperboloid").then(|| {
            let min = series
                .estimates
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            min >= 0.5 * series.estimates[0]
        });
    let pass = ok && bounded_below.unwrap_or(true);
    Ok(FitCheck {
        mode,
        predicted,
        tolerance: FIT_TOLERANCE,
        slope,
        slope_half_width: half_width,
        reference,
        bounded_below,
        verdict: if pass { "MATCH" } else { "MISMATCH" }.into(),
    })
}

fn cmd_estimate(
    args: &EstimateArgs,
    err: &mut (dyn Write + Send),
) -> Result<(ReportPayload, i32), Failure> {
    let model = model_by_name(&args.space).ok_or_else(|| {
        Failure::input(format!(
            "unknown space {:?}; expected one of {}",
            args.space,
            MODEL_NAMES.join(", ")
        ))
    })?;
    let grid = parse_t_range(&args.t_range)?;
    if args.fit && grid.len() < 4 {
        return Err(Failure::input("need ≥ 4 grid points for --fit"));
    }
    let series = volume::volume_along_curve(model, &grid, args.radius, args.samples, args.seed)?;
    if let Some(path) = &args.out {
        std::fs::write(path, volume::series_csv(&series))
            .map_err(|e| Failure::input(format!("{path}: {e}")))?;
    }
    let mut code = EXIT_OK;
    let check = if args.fit {
        let c = fit_check(&series)?;
        let _ = writeln!(
            err,
            "slope {:.4} ± {:.4} vs {} {}: {}",
            c.slope, c.slope_half_width, c.mode, c.predicted, c.verdict
        );
        if let Some(b) = c.bounded_below {
            let _ = writeln!(
                err,
                "min volume ≥ 0.5 × v(t0): {}",
                if b { "PASS" } else { "FAIL" }
            );
        }
        if c.verdict != "MATCH" {
            code = EXIT_FAILURE;
        }
        Some(c)
    } else {
        None
    };
    Ok((
        ReportPayload::VolumeSeries {
            series,
            fit_check: check,
        },
        code,
    ))
}

fn dispatch(cli: &Cli, command: Vec<String>, err: &mut (dyn Write + Send)) -> CmdResult {
    let mut inputs = Inputs::new();
    let (payload, code) = match &cli.command {
        Command::Check(a) => cmd_check(a, &mut inputs)?,
        Command::Witness(a) => cmd_witness(a, &mut inputs)?,
        Command::Bound(a) => cmd_bound(a, &mut inputs)?,
        Command::Estimate(a) => cmd_estimate(a, err)?,
    };
    Ok((Report::new(command, inputs.hashes, payload), code))
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("VAI_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::input(format!(
                "VAI_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs one invocation; the report goes to `out`, diagnostics to `err`.
pub fn run(args: Vec<String>, out: &mut dyn Write, err: &mut (dyn Write + Send)) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = threads_from_env().and_then(|threads| match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure {
                code: EXIT_FAILURE,
                message: e.to_string(),
                detail: None,
            })?
            .install(|| dispatch(&cli, args.clone(), err)),
        None => dispatch(&cli, args.clone(), err),
    });
    match result {
        Ok((report, code)) => {
            let _ = writeln!(out, "{}", report.to_json());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            if let Some(d) = f.detail {
                let _ = writeln!(
                    err,
                    "{}",
                    serde_json::to_string_pretty(&d).unwrap_or_default()
                );
            }
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_range_grid() {
        let g = parse_t_range("-4:0:0.5").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], -4.0);
        assert_eq!(*g.last().unwrap(), 0.0);
        assert_eq!(parse_t_range("0:0:1").unwrap(), vec![0.0]);
        for bad in ["0:1", "a:1:1", "0:1:0", "1:0:1", "0:1:-1"] {
            assert_eq!(parse_t_range(bad).unwrap_err().code, EXIT_INPUT, "{bad}");
        }
    }

    #[test]
    fn predicted_exponents() {
        assert_eq!(predicted_exponent("sl2-mod-n").unwrap().1, Rat::from_int(2));
        assert_eq!(predicted_exponent("spd2").unwrap().1, Rat::from_int(2));
        let (mode, p, r) = predicted_exponent("sl2-orbit-hyperboloid").unwrap();
        assert_eq!(
            (mode.as_str(), p, r),
            ("lower-bound", Rat::zero(), Some(Rat::from_int(2)))
        );
        assert!(predicted_exponent("torus").is_err());
    }
}
