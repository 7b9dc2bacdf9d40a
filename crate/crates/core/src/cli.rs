//! The `wunc` command line: `bounds`, `sweep`, `fuzz`.
//!
//! Exit codes: 0 success, 1 fuzz violation, 2 usage error, 3 precondition
//! failure (including unwritable output), 4 numeric failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fuzz::{self, FuzzConfig};
use crate::instance::{Instance, PerpRequest, ProblemInstance};
use crate::multi::{self, MultiInstance, MultiPerps, PairIndex, RemainingPairs};
use crate::optimize::GridSpec;
use crate::pair::{self, GeneralWeights};
use crate::report::BoundReport;
use crate::state::{make_perp, Perp};
use crate::sweep::{self, Figure, LambdaRange, DEFAULT_THETA_STEPS};

#[derive(Debug, Parser)]
#[command(
    name = "wunc",
    version,
    about = "Weighted variance-based uncertainty relations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound on an instance file.
    Bounds(BoundsArgs),
    /// Write spin-1 figure data as CSV.
    Sweep(SweepArgs),
    /// Check every relation on seeded random instances.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Robertson,
    Schrodinger,
    Mp1,
    Mp2,
    Ahr,
    L1,
    L2,
    T3,
    T4,
    C1,
    R1,
    Lemma1,
    L0,
    Lij,
    T7,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Instance file (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub bound: BoundKind,
    /// Weight λ (l1, l2, t3); weight x for t4. Default 1.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Weight y for t4. Default 1.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda2: Option<f64>,
    /// Pair i,j (1-based) for lij.
    #[arg(long)]
    pub pair: Option<String>,
    /// optimal | vaidman[:NAME] | explicit:eK | explicit:[[re,im],..] | basis:K
    #[arg(long)]
    pub perp: Option<String>,
    /// Number of series terms for r1.
    #[arg(long, default_value_t = 20)]
    pub series_terms: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub figure: u8,
    #[arg(long, default_value_t = DEFAULT_THETA_STEPS)]
    pub theta_steps: usize,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// θ for figure 3.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    pub theta: f64,
    /// lo:hi:N for figure 3.
    #[arg(long, default_value = "0.1:10:100")]
    pub lambda_range: String,
}

#[derive(Debug, Clone, Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 6)]
    pub dim_max: usize,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A relation name, or `all`.
    #[arg(long, default_value = "all")]
    pub relation: String,
}

/// Runs a parsed command, writing its normal output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Bounds(a) => {
            let r = cmd_bounds(a)?;
            let text = if a.json {
                serde_json::to_string_pretty(&r).map_err(|e| Error::numeric(e.to_string()))? + "\n"
            } else {
                r.render()
            };
            emit(out, &text)?;
            Ok(0)
        }
        Command::Sweep(a) => {
            let csv = cmd_sweep(a)?;
            match &a.out {
                Some(path) => sweep::write_file(path, &csv)?,
                None => emit(out, &csv)?,
            }
            Ok(0)
        }
        Command::Fuzz(a) => {
            let summary = fuzz::run(&FuzzConfig {
                trials: a.trials,
                dim_max: a.dim_max,
                n_max: a.n_max,
                seed: a.seed,
                relation: Some(a.relation.clone()),
            })?;
            emit(out, &summary.render())?;
            Ok(if summary.passed() { 0 } else { 1 })
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::precondition(format!("cannot write output: {e}")))
}

fn positive(name: &str, v: Option<f64>) -> Result<f64> {
    let v = v.unwrap_or(1.0);
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::usage(format!("--{name} must be positive, got {v}")));
    }
    Ok(v)
}

fn parse_pair(s: &str, n: usize) -> Result<PairIndex> {
    let bad = || Error::usage(format!("--pair {s:?} is not i,j"));
    let (i, j) = s.split_once(',').ok_or_else(bad)?;
    let i = i.trim().parse().map_err(|_| bad())?;
    let j = j.trim().parse().map_err(|_| bad())?;
    PairIndex::one_based(i, j, n)
}

/// Evaluates the requested bound. Flag values are checked before the input
/// file is read.
pub fn cmd_bounds(a: &BoundsArgs) -> Result<BoundReport> {
    let lambda = positive("lambda", a.lambda)?;
    let lambda2 = positive("lambda2", a.lambda2)?;
    let cli_perp = a.perp.as_deref().map(PerpRequest::parse).transpose()?;
    let path = a
        .input
        .as_ref()
        .ok_or_else(|| Error::usage("--input is required"))?;
    let inst = ProblemInstance::load(path)?.validate()?;
    let request = cli_perp.or_else(|| inst.perp.clone());
    evaluate(
        &inst,
        a.bound,
        lambda,
        lambda2,
        a.pair.as_deref(),
        request.as_ref(),
        a.series_terms,
    )
}

/// The requested perp, or `default` when none (or `optimal`) was asked for.
fn resolve(
    inst: &Instance,
    request: Option<&PerpRequest>,
    default: impl FnOnce() -> Result<Perp>,
) -> Result<Perp> {
    match request.map(|r| r.choice(inst)).transpose()?.flatten() {
        Some(choice) => make_perp(&choice, &inst.psi),
        None => default(),
    }
}

pub fn evaluate(
    inst: &Instance,
    kind: BoundKind,
    lambda: f64,
    lambda2: f64,
    pair_flag: Option<&str>,
    request: Option<&PerpRequest>,
    series_terms: u32,
) -> Result<BoundReport> {
    use BoundKind::*;
    let psi = &inst.psi;
    if matches!(kind, Lemma1 | L0 | Lij | T7) {
        let weights = inst
            .weights
            .clone()
            .unwrap_or_else(|| vec![1.0; inst.observables.len()]);
        let m = MultiInstance::new(inst.observables.clone(), psi.clone(), weights)?;
        return match kind {
            Lemma1 => multi::lemma1(&m),
            L0 => {
                let u = resolve(inst, request, || {
                    make_perp(&crate::PerpChoice::Vaidman(m.sum_observable()), psi)
                })?;
                multi::l0(&m, &u)
            }
            Lij => {
                let p = parse_pair(
                    pair_flag.ok_or_else(|| Error::usage("lij needs --pair i,j"))?,
                    m.n(),
                )?;
                let u = resolve(inst, request, || multi::pair_optimal_perp(&m, p))?;
                multi::lij(&m, p, &u, RemainingPairs::AllOthers)
            }
            _ => {
                let perps = match request.map(|r| r.choice(inst)).transpose()?.flatten() {
                    Some(choice) => MultiPerps::Fixed(make_perp(&choice, psi)?),
                    None => MultiPerps::Default,
                };
                multi::theorem7(&m, &perps)
            }
        };
    }
    let (a, b) = inst.pair()?;
    match kind {
        Robertson => pair::robertson(a, b, psi),
        Schrodinger => pair::schrodinger(a, b, psi),
        Mp2 => pair::mp2(a, b, psi),
        Mp1 => pair::mp1(
            a,
            b,
            psi,
            &resolve(inst, request, || pair::mp1_optimal_perp(a, b, psi))?,
        ),
        Ahr => pair::amended_hr(
            a,
            b,
            psi,
            &resolve(inst, request, || pair::amended_hr_optimal_perp(a, b, psi))?,
        ),
        L1 => match request.map(|r| r.choice(inst)).transpose()?.flatten() {
            Some(choice) => {
                let u = make_perp(&choice, psi)?;
                pair::l1(a, b, psi, lambda, &u, &u)
            }
            None => {
                let (u1, u2) = pair::l1_saturating_perps(a, b, psi, lambda)?;
                pair::l1(a, b, psi, lambda, &u1, &u2)
            }
        },
        L2 => pair::l2(
            a,
            b,
            psi,
            lambda,
            &resolve(inst, request, || {
                pair::l2_saturating_perp(a, b, psi, lambda)
            })?,
        ),
        T3 => match request.map(|r| r.choice(inst)).transpose()?.flatten() {
            Some(choice) => {
                let u = make_perp(&choice, psi)?;
                pair::theorem3(a, b, psi, lambda, (&u, &u), &u)
            }
            None => {
                let (u1, u2) = pair::l1_saturating_perps(a, b, psi, lambda)?;
                let u = pair::l2_saturating_perp(a, b, psi, lambda)?;
                pair::theorem3(a, b, psi, lambda, (&u1, &u2), &u)
            }
        },
        T4 => {
            let w = GeneralWeights::new(lambda, lambda2)?;
            let u = resolve(inst, request, || {
                pair::l2_saturating_perp(a, b, psi, lambda / lambda2)
            })?;
            pair::theorem4(a, b, psi, w, &u)
        }
        C1 => {
            let u = resolve(inst, request, || pair::l2_saturating_perp(a, b, psi, 1.0))?;
            pair::corollary1_on_grid(a, b, psi, &u, &GridSpec::default())
        }
        R1 => {
            let u = resolve(inst, request, || pair::l2_saturating_perp(a, b, psi, 1.0))?;
            pair::remark1(a, b, psi, &u, series_terms)
        }
        Lemma1 | L0 | Lij | T7 => unreachable!("handled above"),
    }
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    let figure = Figure::from_number(a.figure)?;
    let range = if figure == Figure::Three {
        LambdaRange::parse(&a.lambda_range)?
    } else {
        LambdaRange::default()
    };
    sweep::figure_csv(figure, a.theta_steps, a.theta, &range)
}
