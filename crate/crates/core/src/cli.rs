//! Command-line front end.
//!
//! Exit status: 0 when the verdict is positive, 1 when it is negative or
//! inconclusive, 2 on input or usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::certify::{bounded_certificate, certify_weakly_bounded_with, CertifyOptions};
use crate::error::{MomentError, Result};
use crate::harmonizable::{
    covariance_check, sample_series, sample_transform, uniform_grid, Classification, CovarianceOptions,
    DEFAULT_TRUNCATION,
};
use crate::index::MultiIndex;
use crate::io::{
    kernel_csv, parse_json, parse_moment_tensor, parse_polymeasure, polymeasure_to_json, to_json_string,
    CertificateJson, HankelJson, HarmonizableJson, MeasureJson, MomentTensorJson, MonotoneJson, PolysJson,
    SemivariationJson, StrongSolutionJson,
};
use crate::moment::{check_completely_monotone, MomentTensor};
use crate::polymeasure::random_polymeasure;
use crate::scalar::{parse_rational, Field, Rational, Real, ScalarJson, ScalarMode};
use crate::strong::{
    check_hankel, diagonal_sequence, reconstruct_multivariate, reconstruct_univariate, solve_strong,
    verify_strong_identity, StrongOptions, StrongRefusal, DEFAULT_N,
};

pub const MODE_ENV: &str = "POLYMOMENT_MODE";
pub const DEFAULT_ORDER: usize = 8;

#[derive(Debug, Parser)]
#[command(
    name = "polymoment",
    version,
    about = "Multilinear Hausdorff moment problems: certificates, reconstruction and kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Input file; repeat for commands taking several inputs.
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,

    /// Maximum order, one value for every axis or a comma-separated list.
    #[arg(long, global = true)]
    pub order: Option<String>,

    /// Reconstruction order N (comma-separated per axis for `reconstruct multivariate`).
    #[arg(long = "n-recon", global = true)]
    pub n_recon: Option<String>,

    /// Truncation degree of the kernel power series.
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNCATION)]
    pub trunc: usize,

    /// Time grid: `lo:hi:count` or a comma-separated list.
    #[arg(long, global = true)]
    pub grid: Option<String>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Arithmetic mode; the POLYMOMENT_MODE environment variable overrides it.
    #[arg(long, global = true, default_value = "rational")]
    pub mode: ScalarMode,

    /// Claimed constant checked against every scanned order.
    #[arg(long = "claimed-c", global = true)]
    pub claimed_c: Option<String>,

    /// Worker threads for the order scans.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReconstructKind {
    Univariate,
    Multivariate,
    Strong,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounded constant max_k sum_m |lambda_(k;m)|.
    CheckBounded,
    /// Weak-bound constant over sign vertices.
    CheckWeak,
    /// Nonnegativity of every finite difference.
    CheckMonotone,
    /// Hankel test mu_{k+1_l} = mu_{k+1_{l+1}}.
    CheckHankel,
    /// Moment tensor of a polymeasure.
    Moments,
    /// Variation and semivariation of a polymeasure.
    Semivariation,
    /// Bernstein-weight reconstruction.
    Reconstruct {
        #[arg(value_enum)]
        kind: ReconstructKind,
        /// Largest total degree with a reported residual (strong only).
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        degree: usize,
    },
    /// Residual of the strong identity; inputs: moments, solution, polynomials.
    VerifyStrong,
    /// Covariance classifier for a bimeasure moment sequence.
    HarmonizableCheck,
    /// Kernel samples as CSV, from moments (series) or a bimeasure (transform).
    KernelSample,
    /// Seeded random atomic polymeasure.
    GenOracle {
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        /// Coefficient range `lo,hi`.
        #[arg(long = "coeff-range", default_value = "-2,2", allow_hyphen_values = true)]
        coeff_range: String,
    },
}

/// Report text and exit status of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

fn outcome(body: String, positive: bool) -> Outcome {
    Outcome {
        body,
        code: if positive { 0 } else { 1 },
    }
}

fn input_text(cli: &Cli, i: usize, what: &str) -> Result<String> {
    let path = cli
        .input
        .get(i)
        .ok_or_else(|| MomentError::Input(format!("missing --input for the {what}")))?;
    fs::read_to_string(path).map_err(|e| MomentError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| MomentError::Input(format!("--{flag}: `{s}` is not a nonnegative integer")))
        })
        .collect()
}

/// A single value applies to every axis; a list must match the arity.
fn multi_index(text: &str, n: usize, flag: &str) -> Result<MultiIndex> {
    let v = parse_list(text, flag)?;
    match v.len() {
        1 => Ok(MultiIndex::splat(n, v[0])),
        len if len == n => Ok(MultiIndex::new(v)),
        len => Err(MomentError::Input(format!("--{flag} has {len} entries for {n} axes"))),
    }
}

/// `--order`, defaulting to 8 per axis clamped to the tensor bounds.
fn order_for(cli: &Cli, bounds: &MultiIndex) -> Result<MultiIndex> {
    match &cli.order {
        Some(text) => multi_index(text, bounds.arity(), "order"),
        None => Ok(bounds.min(&MultiIndex::splat(bounds.arity(), DEFAULT_ORDER))),
    }
}

fn claimed<T: Field>(cli: &Cli) -> Result<Option<T>> {
    cli.claimed_c
        .as_deref()
        .map(|s| {
            parse_rational(s)
                .map(|r| T::from_rational(&r))
                .map_err(|m| MomentError::Input(format!("--claimed-c: {m}")))
        })
        .transpose()
}

fn grid(cli: &Cli) -> Result<Vec<f64>> {
    let Some(text) = cli.grid.as_deref() else {
        return Ok(uniform_grid(0.0, 2.0, 8));
    };
    let bad = |s: &str| MomentError::Input(format!("--grid: cannot parse `{s}`"));
    let points: Vec<f64> = if let [lo, hi, count] = text.split(':').collect::<Vec<_>>()[..] {
        uniform_grid(
            lo.trim().parse().map_err(|_| bad(lo))?,
            hi.trim().parse().map_err(|_| bad(hi))?,
            count.trim().parse().map_err(|_| bad(count))?,
        )
    } else {
        text.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad(s)))
            .collect::<Result<_>>()?
    };
    if points.is_empty() || points.iter().any(|t| !t.is_finite()) {
        return Err(MomentError::Input("--grid needs at least one finite point".into()));
    }
    Ok(points)
}

fn single_n_recon(cli: &Cli) -> Result<usize> {
    match &cli.n_recon {
        None => Ok(DEFAULT_N),
        Some(text) => match parse_list(text, "n-recon")?[..] {
            [n] => Ok(n),
            _ => Err(MomentError::Input("--n-recon takes a single value here".into())),
        },
    }
}

#[derive(Serialize)]
struct Refusal<'a, R: Serialize> {
    refused: &'a str,
    #[serde(flatten)]
    report: R,
}

#[derive(Serialize)]
struct HankelRefusal {
    hankel: HankelJson,
}

#[derive(Serialize)]
struct BoundRefusal {
    bounded: CertificateJson,
}

#[derive(Serialize)]
struct IdentityResidual {
    residual: ScalarJson,
}

/// Accepts either a bare measure or a strong solution.
#[derive(Deserialize)]
struct NodesWeights {
    nodes: Vec<String>,
    weights: Vec<ScalarJson>,
}

fn run_typed<T: Real>(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::CheckBounded => {
            let mu: MomentTensor<T> = parse_moment_tensor(&input_text(cli, 0, "moment tensor")?)?;
            let order = order_for(cli, mu.bounds())?;
            let report = bounded_certificate(&mu, &order, claimed::<T>(cli)?.as_ref())?;
            Ok(outcome(
                to_json_string(&CertificateJson::from_report(&report)),
                report.holds(),
            ))
        }
        Command::CheckWeak => {
            let mu: MomentTensor<T> = parse_moment_tensor(&input_text(cli, 0, "moment tensor")?)?;
            let order = order_for(cli, mu.bounds())?;
            let opts = CertifyOptions {
                claimed: claimed::<T>(cli)?,
                seed: cli.seed,
                ..Default::default()
            };
            let report = certify_weakly_bounded_with(&mu, &order, &opts)?;
            Ok(outcome(
                to_json_string(&CertificateJson::from_report(&report)),
                report.holds(),
            ))
        }
        Command::CheckMonotone => {
            let mu: MomentTensor<T> = parse_moment_tensor(&input_text(cli, 0, "moment tensor")?)?;
            let order = order_for(cli, mu.bounds())?;
            let v = check_completely_monotone(&mu, &order)?;
            Ok(outcome(to_json_string(&MonotoneJson::from_verdict(&v)), v.holds()))
        }
        Command::CheckHankel => {
            let mu: MomentTensor<T> = parse_moment_tensor(&input_text(cli, 0, "moment tensor")?)?;
            let order = order_for(cli, mu.bounds())?;
            let r = check_hankel(&mu, &order)?;
            Ok(outcome(to_json_string(&HankelJson::from_report(&r)), r.is_hankel()))
        }
        Command::Moments => {
            let g = parse_polymeasure::<T>(&input_text(cli, 0, "polymeasure")?)?;
            let bounds = match &cli.order {
                Some(text) => multi_index(text, g.arity(), "order")?,
                None => MultiIndex::splat(g.arity(), DEFAULT_ORDER),
            };
            let mu = g.moments(&bounds)?;
            Ok(outcome(to_json_string(&MomentTensorJson::from_tensor(&mu)), true))
        }
        Command::Semivariation => {
            let g = parse_polymeasure::<T>(&input_text(cli, 0, "polymeasure")?)?;
            let s = g.semivariation();
            Ok(outcome(
                to_json_string(&SemivariationJson::new(&g.variation(), &s)),
                true,
            ))
        }
        Command::Reconstruct { kind, degree } => {
            let mu: MomentTensor<T> = parse_moment_tensor(&input_text(cli, 0, "moment tensor")?)?;
            match kind {
                ReconstructKind::Univariate => {
                    let n = single_n_recon(cli)?;
                    let nu = if mu.arity() == 1 {
                        mu.values().data().to_vec()
                    } else {
                        diagonal_sequence(&mu, n)?
                    };
                    let m = reconstruct_univariate(&nu, n)?;
                    Ok(outcome(to_json_string(&MeasureJson::from_measure(&m, n)), true))
                }
                ReconstructKind::Multivariate => {
                    let n = match &cli.n_recon {
                        Some(text) => multi_index(text, mu.arity(), "n-recon")?,
                        None => mu.bounds().clone(),
                    };
                    let g = reconstruct_multivariate(&mu, &n)?;
                    Ok(outcome(polymeasure_to_json(&g), true))
                }
                ReconstructKind::Strong => {
                    let opts = StrongOptions {
                        max_degree: *degree,
                        n_recon: single_n_recon(cli)?,
                        check_order: Some(order_for(cli, mu.bounds())?),
                        claimed: claimed::<T>(cli)?,
                    };
                    match solve_strong(&mu, &opts) {
                        Ok(s) => Ok(outcome(to_json_string(&StrongSolutionJson::from_solution(&s)), true)),
                        Err(StrongRefusal::Invalid(e)) => Err(e),
                        Err(StrongRefusal::NotHankel(h)) => Ok(outcome(
                            to_json_string(&Refusal {
                                refused: "not-hankel",
                                report: HankelRefusal {
                                    hankel: HankelJson::from_report(&h),
                                },
                            }),
                            false,
                        )),
                        Err(StrongRefusal::BoundViolated(c)) => Ok(outcome(
                            to_json_string(&Refusal {
                                refused: "bound-violated",
                                report: BoundRefusal {
                                    bounded: CertificateJson::from_report(&c),
                                },
                            }),
                            false,
                        )),
                    }
                }
            }
        }
        Command::VerifyStrong => {
            let mu: MomentTensor<T> = parse_moment_tensor(&input_text(cli, 0, "moment tensor")?)?;
            let nw: NodesWeights = parse_json(&input_text(cli, 1, "measure")?)?;
            let measure = MeasureJson {
                n_recon: 0,
                nodes: nw.nodes,
                weights: nw.weights,
                mass: ScalarJson::Number(0.0),
            }
            .to_measure::<T>()?;
            let polys = parse_json::<PolysJson>(&input_text(cli, 2, "polynomials")?)?.to_polys::<T>()?;
            let residual = verify_strong_identity(&measure, &mu, &polys)?;
            Ok(outcome(
                to_json_string(&IdentityResidual {
                    residual: residual.to_json(),
                }),
                true,
            ))
        }
        Command::HarmonizableCheck => {
            let mu: MomentTensor<Complex<T>> = parse_moment_tensor(&input_text(cli, 0, "moment tensor")?)?;
            let opts = CovarianceOptions {
                grid: grid(cli)?,
                max_order: order_for(cli, mu.bounds())?,
                trunc: cli.trunc,
                claimed: claimed::<T>(cli)?,
            };
            let r = covariance_check(&mu, &opts)?;
            Ok(outcome(
                to_json_string(&HarmonizableJson::from_report(&r)),
                r.classification == Classification::HarmonizableHausdorff,
            ))
        }
        Command::KernelSample => {
            let text = input_text(cli, 0, "moment tensor or bimeasure")?;
            let value: serde_json::Value = parse_json(&text)?;
            let samples = if value.get("atoms").is_some() {
                sample_transform(&parse_polymeasure::<Complex<T>>(&text)?, &grid(cli)?)?
            } else {
                let mu: MomentTensor<Complex<T>> = parse_moment_tensor(&text)?;
                sample_series(&mu, &grid(cli)?, cli.trunc)?.0
            };
            Ok(outcome(kernel_csv(&samples), true))
        }
        Command::GenOracle {
            arity,
            atoms,
            coeff_range,
        } => {
            let parts: Vec<&str> = coeff_range.split(',').collect();
            let [lo, hi] = parts[..] else {
                return Err(MomentError::Input("--coeff-range expects `lo,hi`".into()));
            };
            let parse =
                |s: &str| parse_rational(s.trim()).map_err(|m| MomentError::Input(format!("--coeff-range: {m}")));
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(MomentError::Input("--coeff-range: lo exceeds hi".into()));
            }
            if *arity == 0 || *atoms == 0 || *atoms > 65 {
                return Err(MomentError::Input(
                    "--arity must be positive and --atoms in 1..=65".into(),
                ));
            }
            let g = random_polymeasure(*arity, *atoms, (lo, hi), cli.seed);
            Ok(outcome(polymeasure_to_json(&g.map(|c| T::from_rational(c))), true))
        }
    }
}

/// Resolves the arithmetic mode (environment over flag) and runs the command.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let mode = match std::env::var(MODE_ENV) {
        Ok(v) if !v.is_empty() => v
            .parse()
            .map_err(|m: String| MomentError::Input(format!("{MODE_ENV}: {m}")))?,
        _ => cli.mode,
    };
    let run = || match mode {
        ScalarMode::Rational => run_typed::<Rational>(cli),
        ScalarMode::Float => run_typed::<f64>(cli),
    };
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| MomentError::Input(format!("--threads: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Parses arguments, runs, writes the report and returns the exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = match execute(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut body = out.body;
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{body}"),
    }
    out.code
}
