//! The `jschur` command line front end.
//!
//! Exit codes: `0` success, `1` usage, file or malformed-input errors, `2`
//! numerical precondition failures. Failures print the error name on
//! standard error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::{a_posteriori_bound, operator_inverse_norm, t_hat, BoundReport, GroundTruthModel};
use crate::error::Error;
use crate::harness::{
    distance_to_nearest, enumerate_exact_triangularizers, gen_components, gen_ground_truth, gen_tensor,
    sigma_sweep, verify_bounds, GeneratorSpec,
};
use crate::io::{self, FrameFile, GroundTruthFile, IoError, TensorFile};
use crate::linalg::Matrix;
use crate::random;
use crate::tensor::{component_error_bound, decompose, match_columns, normalized_components};
use crate::triangularizer::{
    descend, loss, find_separating_beta, schur_initializer, BetaStrategy, CombinationVector,
    OptimizerConfig,
};

#[derive(Debug, Parser)]
#[command(name = "jschur", version, about = "Approximate joint triangularization with perturbation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Model,
    Tensor,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Strategy {
    Ones,
    Random,
}

impl From<Strategy> for BetaStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Ones => BetaStrategy::Ones,
            Strategy::Random => BetaStrategy::Random,
        }
    }
}

#[derive(Debug, Args)]
struct Solver {
    /// Gradient-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long = "max-iters", default_value_t = 500)]
    max_iters: usize,
    /// Combination strategy for the Schur initializer.
    #[arg(long, value_enum, default_value_t = Strategy::Ones)]
    beta: Strategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Solver {
    fn config(&self) -> Result<OptimizerConfig<f64>, Error> {
        let c = OptimizerConfig { max_iters: self.max_iters, grad_tol: self.tol, ..Default::default() };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
struct ModelSource {
    /// Ground-truth file; when absent a model is generated from the flags.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long = "N", default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

impl ModelSource {
    fn load(&self, seed: u64) -> Result<GroundTruthModel<f64>, CliError> {
        match &self.input {
            Some(p) => Ok(io::load_ground_truth(p)?),
            None => Ok(gen_ground_truth(&GeneratorSpec::new(self.d, self.n, self.kappa, self.gamma, seed))?),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded ground-truth model or tensor.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        d: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Jointly triangularize a matrix set.
    Triangularize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Noise level used in the a posteriori bound.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[command(flatten)]
        solver: Solver,
    },
    /// Evaluate every bound for a ground-truth model.
    Bounds {
        #[arg(long)]
        input: PathBuf,
        /// Frame to assess (a triangularization result works); computed
        /// when absent.
        #[arg(long)]
        frame: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        solver: Solver,
    },
    /// Decompose a symmetric tensor.
    Tensor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Number of components; defaults to the file's `d`, else `N`.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value_t = Strategy::Ones)]
        theta: Strategy,
        /// Noise level for the component bound; defaults to the file's.
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        solver: Solver,
    },
    /// First-order scaling study over `σ, σ/2, σ/4, σ/8`.
    Sweep {
        #[command(flatten)]
        model: ModelSource,
        #[arg(long, default_value_t = 1e-3)]
        sigma: f64,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        solver: Solver,
    },
    /// Bound containment study at one noise level.
    Verify {
        #[command(flatten)]
        model: ModelSource,
        #[arg(long, default_value_t = 1e-3)]
        sigma: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        solver: Solver,
    },
}

#[derive(Debug)]
enum CliError {
    Io(IoError),
    Numeric(Error),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Invalid(e) => CliError::Numeric(e),
            other => CliError::Io(other),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl CliError {
    fn report(&self) -> i32 {
        let (name, msg, code) = match self {
            CliError::Io(e) => (e.name(), e.to_string(), 1),
            CliError::Numeric(e) => {
                let code = match e {
                    Error::DimensionMismatch(_) | Error::InvalidInput(_) => 1,
                    _ => 2,
                };
                (e.name(), e.to_string(), code)
            }
        };
        eprintln!("error: {name}: {msg}");
        code
    }
}

/// Runs the front end on `argv` (program name first); returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => e.report(),
    }
}

fn emit(output: Option<&Path>, value: &Value) -> Result<(), CliError> {
    match output {
        Some(p) => io::write_json(p, value)?,
        None => print!("{}", io::to_canonical_string(value)?),
    }
    Ok(())
}

fn to_value<S: serde::Serialize>(s: &S) -> Result<Value, CliError> {
    Ok(serde_json::to_value(s).map_err(IoError::from)?)
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn row_major(m: &Matrix<f64>) -> Vec<f64> {
    m.transpose().into_vec()
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Generate { kind, d, n, kappa, gamma, sigma, seed, output } => {
            let value = match kind {
                Kind::Model => {
                    let spec = GeneratorSpec { sigma, ..GeneratorSpec::new(d, n, kappa, gamma, seed) };
                    to_value(&GroundTruthFile::from_model(&gen_ground_truth(&spec)?))?
                }
                Kind::Tensor => {
                    let z = gen_components(n, d, kappa, seed)?;
                    let t = gen_tensor(&z, sigma, 1.0, seed)?;
                    to_value(&TensorFile::from_tensor(&t).with_components(&z, sigma, 1.0))?
                }
            };
            emit(output.as_deref(), &value)
        }
        Command::Triangularize { input, output, sigma, solver } => {
            let set = io::load_matrix_set(&input)?;
            let config = solver.config()?;
            let sep = find_separating_beta(&set, solver.beta.into(), solver.seed, 100)?;
            let u_init = schur_initializer(&set, &sep.beta)?;
            let (u, trace) = descend(&set, &u_init, &config)?;
            let bound = a_posteriori_bound(&set, &u, sep.beta.as_slice(), sigma)?;
            let inv = operator_inverse_norm(&t_hat(&set, &u, &sep.beta)?)?;
            let value = merge(
                to_value(&FrameFile::from_frame(&u))?,
                json!({
                    "N": set.len(),
                    "U_init": u_init.matrix().as_slice(),
                    "beta": sep.beta.as_slice(),
                    "beta_gap": sep.gap,
                    "trace": io::trace_json(&trace),
                    "loss": loss(&u, &set)?,
                    "alpha_aposteriori": bound,
                    "t_hat_inv_norm": inv,
                    "sigma": sigma,
                }),
            );
            emit(output.as_deref(), &value)
        }
        Command::Bounds { input, frame, output, solver } => {
            let gt = io::load_ground_truth(&input)?;
            let config = solver.config()?;
            let set = gt.observed_set();
            let beta = find_separating_beta(&set, solver.beta.into(), solver.seed, 100)?.beta;
            let u_init = schur_initializer(&set, &beta)?;
            let u = match frame {
                Some(p) => io::load_frame(&p)?,
                None => descend(&set, &u_init, &config)?.0,
            };
            let family = enumerate_exact_triangularizers(&gt)?;
            let (alpha, idx) = distance_to_nearest(&u, &family)?;
            let report = BoundReport::evaluate(&gt, &u, &family.frames[idx], &beta, &u_init, Some(alpha))?;
            let value = merge(
                io::bound_report_json(&report),
                json!({
                    "U": u.matrix().as_slice(),
                    "U_circ": family.frames[idx].matrix().as_slice(),
                    "frame_index": idx,
                    "beta": beta.as_slice(),
                    "sigma": gt.sigma(),
                }),
            );
            emit(output.as_deref(), &value)
        }
        Command::Tensor { input, output, d, theta, sigma, solver } => {
            let file: TensorFile = io::read_json(&input)?;
            let t = file.to_tensor()?;
            let truth = file.components()?;
            let d = d.or(file.d).unwrap_or(file.n);
            let sigma = sigma.or(file.sigma).unwrap_or(0.0);
            let eps = file.eps.unwrap_or(1.0);
            let config = solver.config()?;
            let theta = match theta {
                Strategy::Ones => CombinationVector::ones(t.n()),
                Strategy::Random => {
                    let mut rng = random::stream(solver.seed, 1);
                    CombinationVector::normalized(random::unit_vector(&mut rng, t.n()))?
                }
            };
            let dec = decompose(&t, d, &theta, solver.beta.into(), solver.seed, &config)?;
            let bound_z = truth.as_ref().filter(|z| z.d() == d).unwrap_or(&dec.components);
            let bound = component_error_bound(bound_z, eps, sigma)?;
            let comparison = match &truth {
                Some(z) if z.d() == d => {
                    let m = match_columns(dec.ratios.matrix(), normalized_components(z, &theta)?.matrix())?;
                    json!({ "perm": m.perm, "max_error": m.max_error, "total_error": m.total_error })
                }
                _ => Value::Null,
            };
            let value = json!({
                "N": t.n(),
                "d": d,
                "Z": row_major(dec.components.matrix()),
                "Y": row_major(dec.ratios.matrix()),
                "U": dec.frame.matrix().as_slice(),
                "beta": dec.beta.as_slice(),
                "theta": theta.as_slice(),
                "trace": io::trace_json(&dec.trace),
                "sigma": sigma,
                "eps": eps,
                "bound": {
                    "source": if truth.as_ref().is_some_and(|z| z.d() == d) { "truth" } else { "estimate" },
                    "bound": bound.bound,
                    "bound_as_stated": bound.bound_as_stated,
                    "gamma": bound.gamma,
                    "m_const": bound.m_const,
                    "w_const": bound.w_const,
                },
                "truth": comparison,
            });
            emit(output.as_deref(), &value)
        }
        Command::Sweep { model, sigma, trials, output, solver } => {
            let gt = model.load(solver.seed)?;
            let config = solver.config()?;
            if !(sigma > 0.0) || !sigma.is_finite() {
                return Err(Error::InvalidInput("sweep needs a positive sigma".into()).into());
            }
            let grid: Vec<f64> = (0..4).map(|k| sigma / f64::from(1u32 << k)).collect();
            let rep = sigma_sweep(&gt, &grid, trials, solver.seed, &config)?;
            emit(output.as_deref(), &io::sweep_report_json(&rep))
        }
        Command::Verify { model, sigma, trials, output, solver } => {
            let gt = model.load(solver.seed)?;
            let config = solver.config()?;
            let rep = verify_bounds(&gt, sigma, trials, solver.seed, &config)?;
            emit(output.as_deref(), &io::verify_report_json(&rep))
        }
    }
}
