//! `qspectral`: command-line driver for quaternionic spectral computations.
//!
//! Exit codes: 0 on success, 1 on numerical failure (with a diagnostic on
//! stderr), 2 on bad arguments (clap usage errors and range violations).

mod json;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qspectral::funcalc::{self, ContourCircle, SliceContour};
use qspectral::perturb::{self, Arc, ArcSpectrumEnsemble, SegmentProbe};
use qspectral::quat::{ImaginaryUnit, Quaternion};
use qspectral::slicefun::SliceSeries;
use qspectral::spectrum;
use qspectral::QMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Parser)]
#[command(
    name = "qspectral",
    version,
    about = "S-spectrum, S-resolvents, functional calculus, Schatten norms and \
             perturbation experiments for quaternionic matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// S-spectrum of a matrix as canonical spheres with multiplicities.
    Spectrum {
        /// Matrix JSON file with fields n and entries (row-major; each entry
        /// a quaternion 4-array x0,x1,x2,x3).
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pseudo-resolvent or left/right S-resolvent at a point.
    Resolvent {
        matrix: PathBuf,
        /// Evaluation point as comma-separated components x0,x1,x2,x3.
        #[arg(long)]
        s: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S-functional calculus f(T) by contour quadrature.
    Funcalc {
        matrix: PathBuf,
        /// Series JSON file with fields side ("left"/"right"), radius and
        /// coefficients (a list of quaternion 4-arrays).
        #[arg(long)]
        series: PathBuf,
        /// Slice unit: e1 | e2 | e3 | x,y,z (normalized).
        #[arg(long, default_value = "e1")]
        slice: String,
        /// Contour circle radius (default 2‖T‖ + 1, centered at the origin).
        #[arg(long)]
        radius: Option<f64>,
        /// Quadrature nodes per circle.
        #[arg(long, default_value_t = funcalc::DEFAULT_NODES)]
        nodes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schatten p-norm (p >= 1, or "inf").
    Schatten {
        matrix: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regularized determinant delta_k in the slice of the given unit.
    Delta {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "e1")]
        slice: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perturbation experiments.
    Perturb {
        #[command(subcommand)]
        experiment: PerturbCommand,
    },
    /// Run the built-in invariant suite; exits nonzero on the first failure.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum PerturbCommand {
    /// Resolvent growth along a non-tangent probe for a normal arc ensemble
    /// plus a Schatten-k perturbation. Writes a CSV report.
    Growth(GrowthArgs),
}

#[derive(Args, Clone)]
struct GrowthArgs {
    /// Arc carrying the unperturbed spectrum: halfcircle | segment.
    #[arg(long, default_value = "halfcircle")]
    arc: String,
    /// Ensemble dimension (1..=64).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Schatten order of the perturbation (>= 1).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Schatten-k norm of the perturbation (>= 0).
    #[arg(long, default_value_t = 0.05)]
    bnorm: f64,
    /// RNG seed (QSPECTRAL_SEED overrides).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Probe anchor parameter on the arc, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    probe_t: f64,
    /// Probe direction in the (u, v) half-plane.
    #[arg(long, default_value = "0,1")]
    direction: String,
    /// Worker threads for the probe points (default 1 for reproducibility;
    /// results are identical for any count).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; fields present in it override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Left,
    Right,
    Pseudo,
}

/// Errors split by exit code.
enum CliError {
    /// Exit 2: argument or input-format problems.
    Usage(String),
    /// Exit 1: numerical failure.
    Numerical(String),
}

impl From<qspectral::Error> for CliError {
    fn from(e: qspectral::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn read_matrix(path: &Path) -> CliResult<QMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad matrix JSON in {}: {e}", path.display())))
}

fn read_series(path: &Path) -> CliResult<SliceSeries> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad series JSON in {}: {e}", path.display())))
}

fn parse_slice_unit(spec: &str) -> CliResult<ImaginaryUnit> {
    match spec {
        "e1" => Ok(ImaginaryUnit::e1()),
        "e2" => Ok(ImaginaryUnit::e2()),
        "e3" => Ok(ImaginaryUnit::e3()),
        other => {
            let comps = parse_floats(other)?;
            if comps.len() != 3 {
                return usage(format!(
                    "slice unit must be e1|e2|e3 or x,y,z, got `{other}`"
                ));
            }
            ImaginaryUnit::from_vector(comps[0], comps[1], comps[2])
                .map_err(|_| CliError::Usage(format!("cannot normalize slice unit `{other}`")))
        }
    }
}

fn parse_floats(csv: &str) -> CliResult<Vec<f64>> {
    csv.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("not a number: `{part}`")))
        })
        .collect()
}

fn parse_quaternion(csv: &str) -> CliResult<Quaternion> {
    let comps = parse_floats(csv)?;
    if comps.len() != 4 {
        return usage(format!(
            "quaternion needs 4 components x0,x1,x2,x3, got `{csv}`"
        ));
    }
    Ok(Quaternion::new(comps[0], comps[1], comps[2], comps[3]))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> CliResult<()> {
    match out {
        None => {
            println!("{payload}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{payload}\n"))
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
    }
}

/// `QSPECTRAL_SEED` overrides any `--seed` flag.
fn resolve_seed(flag: u64) -> CliResult<u64> {
    match std::env::var("QSPECTRAL_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("QSPECTRAL_SEED is not a u64: `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Spectrum { matrix, out } => {
            let t = read_matrix(&matrix)?;
            let spec = spectrum::s_spectrum(&t)?;
            emit(&out, &json::to_string(&spec))
        }
        Command::Resolvent {
            matrix,
            s,
            side,
            out,
        } => {
            let t = read_matrix(&matrix)?;
            let point = parse_quaternion(&s)?;
            let value = match side {
                SideArg::Left => spectrum::s_resolvent_left(&t, &point)?,
                SideArg::Right => spectrum::s_resolvent_right(&t, &point)?,
                SideArg::Pseudo => spectrum::pseudo_resolvent(&t, &point)?.value,
            };
            emit(&out, &json::to_string(&value))
        }
        Command::Funcalc {
            matrix,
            series,
            slice,
            radius,
            nodes,
            out,
        } => {
            let t = read_matrix(&matrix)?;
            let f = read_series(&series)?;
            let unit = parse_slice_unit(&slice)?;
            if !(8..=1_000_000).contains(&nodes) {
                return usage(format!("--nodes must lie in 8..=1000000, got {nodes}"));
            }
            let r = radius.unwrap_or_else(|| 2.0 * t.operator_norm() + 1.0);
            if !(r > 0.0) {
                return usage(format!("--radius must be positive, got {r}"));
            }
            let contour =
                SliceContour::from_circles(unit, &[ContourCircle::new(0.0, 0.0, r)], nodes)?;
            let ft = funcalc::functional_calculus(&t, &f, &contour)?;
            emit(&out, &json::to_string(&ft))
        }
        Command::Schatten { matrix, p, out } => {
            let t = read_matrix(&matrix)?;
            let p = match p.as_str() {
                "inf" | "infinity" => f64::INFINITY,
                other => other.parse::<f64>().map_err(|_| {
                    CliError::Usage(format!("--p must be a number or inf: `{other}`"))
                })?,
            };
            if !(p >= 1.0) {
                return usage(format!("--p must satisfy p >= 1, got {p}"));
            }
            let value = qspectral::schatten::schatten_norm(&t, p)?;
            emit(&out, &json::float(value))
        }
        Command::Delta {
            matrix,
            k,
            slice,
            out,
        } => {
            let t = read_matrix(&matrix)?;
            if k < 1 {
                return usage(format!("--k must be >= 1, got {k}"));
            }
            let unit = parse_slice_unit(&slice)?;
            let d = qspectral::schatten::delta_k(&t, k, &unit)?;
            emit(&out, &json::to_string(&d))
        }
        Command::Perturb {
            experiment: PerturbCommand::Growth(args),
        } => run_growth(args),
        Command::Verify { seed } => {
            let seed = resolve_seed(seed)?;
            verify::run_suite(seed).map_err(|failure| {
                CliError::Numerical(format!(
                    "invariant `{}` violated\n{}",
                    failure.name, failure.detail
                ))
            })
        }
    }
}

/// Optional JSON configuration for `perturb growth`; present fields override
/// the command-line flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GrowthConfig {
    arc: Option<String>,
    n: Option<usize>,
    k: Option<usize>,
    bnorm: Option<f64>,
    seed: Option<u64>,
    probe_t: Option<f64>,
    direction: Option<(f64, f64)>,
    threads: Option<usize>,
}

fn run_growth(mut args: GrowthArgs) -> CliResult<()> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let cfg: GrowthConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config JSON in {}: {e}", path.display())))?;
        if let Some(v) = cfg.arc {
            args.arc = v;
        }
        if let Some(v) = cfg.n {
            args.n = v;
        }
        if let Some(v) = cfg.k {
            args.k = v;
        }
        if let Some(v) = cfg.bnorm {
            args.bnorm = v;
        }
        if let Some(v) = cfg.seed {
            args.seed = v;
        }
        if let Some(v) = cfg.probe_t {
            args.probe_t = v;
        }
        if let Some((du, dv)) = cfg.direction {
            args.direction = format!("{du},{dv}");
        }
        if let Some(v) = cfg.threads {
            args.threads = v;
        }
    }

    if !(1..=64).contains(&args.n) {
        return usage(format!("--n must lie in 1..=64, got {}", args.n));
    }
    if args.k < 1 {
        return usage(format!("--k must be >= 1, got {}", args.k));
    }
    if !(args.bnorm >= 0.0) {
        return usage(format!("--bnorm must be >= 0, got {}", args.bnorm));
    }
    if args.threads < 1 {
        return usage("--threads must be >= 1".to_string());
    }
    if !(args.probe_t > 0.0 && args.probe_t < 1.0) {
        return usage(format!(
            "--probe-t must lie in (0, 1), got {}",
            args.probe_t
        ));
    }
    let arc: Arc = args.arc.parse().map_err(|e: String| CliError::Usage(e))?;
    let dir = parse_floats(&args.direction)?;
    if dir.len() != 2 {
        return usage(format!(
            "--direction needs two components, got `{}`",
            args.direction
        ));
    }
    let seed = resolve_seed(args.seed)?;

    let ensemble = ArcSpectrumEnsemble::new(arc, args.n, seed);
    let (a, _) = ensemble.generate();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = perturb::schatten_perturbation(&mut rng, args.n, args.k, args.bnorm);
    let probe = SegmentProbe::from_arc(
        &arc,
        args.probe_t,
        (dir[0], dir[1]),
        SegmentProbe::default_distances(),
    )?;
    let report = perturb::growth_experiment_threaded(&a, &b, args.k, &probe, args.threads)?;

    let mut csv = String::from("d,norm_Q,norm_SL,fitted_K\n");
    for row in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            json::float(row.d),
            json::float(row.norm_q),
            json::float(row.norm_sl),
            json::float(row.fitted_k),
        ));
    }
    match &args.out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `qspectral --help` for usage");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
    }
}
