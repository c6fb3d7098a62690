//! `dctx` binary: validation suites, criterion time sweeps and dressed-CHSH
//! time scans for decaying two-level multipartite systems.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dctx::cli::{
    parse_scan_signs, resolve_seed, run_scan_chsh, run_sweep, run_validate, Criterion,
    FileConfig, OptimizeMode, ProjectorSpec, ScanOptions, Scenario, StateLabel, SweepOptions,
    ValidateSuite,
};
use dctx::evolution::DecayParams;
use dctx::observables::VectorMode;
use dctx::optimizer::{OptimizerConfig, SignMode};
use dctx::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dctx",
    about = "Decay-modified contextuality and Bell criteria for two-level multipartite systems",
    version
)]
struct Cli {
    /// Optional plain-text config file of `key = value` lines; flags
    /// override file values, unknown keys are errors.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named invariant suite; exits 0 iff every check passes.
    Validate {
        /// kraus | lindblad | signs | square | all
        #[arg(long)]
        suite: Option<String>,
    },
    /// Sweep one criterion over a time grid and emit CSV.
    Sweep {
        /// kcbs | mp | mermin3 | chsh
        #[arg(long)]
        criterion: Option<String>,
        /// psi-plus | psi-minus | phi-plus | phi-minus | ghz
        #[arg(long)]
        state: Option<String>,
        /// End of the time grid, in units of the short lifetime.
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        /// Number of grid points (>= 2).
        #[arg(long)]
        steps: Option<usize>,
        /// per-time | fixed (kcbs and chsh only)
        #[arg(long)]
        optimize: Option<String>,
        /// optimal | naive decay-sign reading (kcbs only)
        #[arg(long)]
        signs: Option<String>,
        /// complex | real pentagram coefficients (kcbs only)
        #[arg(long)]
        mode: Option<String>,
        /// Optimizer restarts per grid point (kcbs only).
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        gamma1: Option<f64>,
        #[arg(long)]
        gamma2: Option<f64>,
        #[arg(long = "delta-m")]
        delta_m: Option<f64>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Persist the final optimized pentagram (kcbs only).
        #[arg(long = "pentagram-out")]
        pentagram_out: Option<PathBuf>,
    },
    /// Dressed-observable CHSH over a (t_l, t_r) grid with fixed projectors.
    ScanChsh {
        #[arg(long)]
        state: Option<String>,
        /// `strangeness` or Bloch angles `theta,phi` (radians).
        #[arg(long)]
        projector: Option<String>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        /// Points per grid axis (>= 2).
        #[arg(long)]
        grid: Option<usize>,
        /// Four decay signs, e.g. `++--`.
        #[arg(long)]
        signs: Option<String>,
        #[arg(long)]
        gamma1: Option<f64>,
        #[arg(long)]
        gamma2: Option<f64>,
        #[arg(long = "delta-m")]
        delta_m: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Usage(_) | Error::NotAProjector(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<FileConfig> {
    match &cli.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

/// Flag value, else config value, else default.
fn resolve<T: Clone + std::str::FromStr>(
    flag: &Option<T>,
    config: &FileConfig,
    key: &str,
    default: Option<T>,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v.clone());
    }
    if let Some(v) = config.get_parsed::<T>(key)? {
        return Ok(v);
    }
    default.ok_or_else(|| Error::Usage(format!("missing required option --{key}")))
}

fn resolve_params(
    gamma1: &Option<f64>,
    gamma2: &Option<f64>,
    delta_m: &Option<f64>,
    config: &FileConfig,
) -> Result<DecayParams> {
    let kaon = DecayParams::kaon();
    DecayParams::new(
        resolve(gamma1, config, "gamma1", Some(kaon.gamma1()))?,
        resolve(gamma2, config, "gamma2", Some(kaon.gamma2()))?,
        resolve(delta_m, config, "delta-m", Some(kaon.delta_m()))?,
    )
}

/// Stream to `--out` when given, stdout otherwise.
fn with_output<F>(out: &Option<PathBuf>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| Error::Usage(format!("cannot create {}: {e}", path.display())))?;
            f(&mut file)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Validate { suite } => {
            let suite = ValidateSuite::parse(&resolve(
                suite,
                &config,
                "suite",
                Some("all".to_string()),
            )?)?;
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            Ok(run_validate(suite, &mut lock)? as u8)
        }
        Command::Sweep {
            criterion,
            state,
            t_max,
            steps,
            optimize,
            signs,
            mode,
            restarts,
            seed,
            gamma1,
            gamma2,
            delta_m,
            out,
            pentagram_out,
        } => {
            let criterion = Criterion::parse(&resolve::<String>(criterion, &config, "criterion", None)?)?;
            let label = StateLabel::parse(&resolve::<String>(state, &config, "state", None)?)?;
            let params = resolve_params(gamma1, gamma2, delta_m, &config)?;
            let t_max = resolve(t_max, &config, "t-max", Some(5.0))?;
            let steps = resolve(steps, &config, "steps", Some(200))?;
            let needs_optimizer = matches!(criterion, Criterion::Kcbs | Criterion::Chsh);
            if !needs_optimizer {
                for (name, given) in [
                    ("optimize", optimize.is_some()),
                    ("signs", signs.is_some()),
                    ("mode", mode.is_some()),
                    ("restarts", restarts.is_some()),
                ] {
                    if given {
                        return Err(Error::Usage(format!(
                            "--{name} does not apply to this criterion"
                        )));
                    }
                }
            }
            let optimize = OptimizeMode::parse(&resolve(
                optimize,
                &config,
                "optimize",
                Some("per-time".to_string()),
            )?)?;
            let sign_mode = SignMode::parse(&resolve(
                signs,
                &config,
                "signs",
                Some("optimal".to_string()),
            )?)?;
            let vector_mode = VectorMode::parse(&resolve(
                mode,
                &config,
                "mode",
                Some("complex".to_string()),
            )?)?;
            let defaults = OptimizerConfig::default();
            let optimizer = OptimizerConfig {
                restarts: resolve(restarts, &config, "restarts", Some(defaults.restarts))?,
                max_iterations: config
                    .get_parsed("max-iterations")?
                    .unwrap_or(defaults.max_iterations),
                penalty_weight: config
                    .get_parsed("penalty-weight")?
                    .unwrap_or(defaults.penalty_weight),
                tolerance: config.get_parsed("tolerance")?.unwrap_or(defaults.tolerance),
                seed: resolve_seed(*seed, &config)?,
                mode: vector_mode,
            };
            let opts = SweepOptions {
                criterion,
                scenario: Scenario::preset(label, params)?,
                t_max,
                steps,
                optimize,
                sign_mode,
                vector_mode,
                optimizer,
                pentagram_out: pentagram_out.clone(),
            };
            with_output(out, |w| run_sweep(&opts, w))?;
            Ok(0)
        }
        Command::ScanChsh {
            state,
            projector,
            t_max,
            grid,
            signs,
            gamma1,
            gamma2,
            delta_m,
            out,
        } => {
            let label = StateLabel::parse(&resolve::<String>(state, &config, "state", None)?)?;
            let params = resolve_params(gamma1, gamma2, delta_m, &config)?;
            let projector = ProjectorSpec::parse(&resolve(
                projector,
                &config,
                "projector",
                Some("strangeness".to_string()),
            )?)?;
            let opts = ScanOptions {
                scenario: Scenario::preset(label, params)?,
                projector,
                t_max: resolve(t_max, &config, "t-max", Some(5.0))?,
                grid: resolve(grid, &config, "grid", Some(100))?,
                signs: parse_scan_signs(&resolve(
                    signs,
                    &config,
                    "signs",
                    Some("++++".to_string()),
                )?)?,
            };
            let mut summary = None;
            with_output(out, |w| {
                summary = Some(run_scan_chsh(&opts, w)?);
                Ok(())
            })?;
            let summary = summary.expect("scan ran");
            eprintln!(
                "max |value| = {:.12e} at t_l = {:.12e}, t_r = {:.12e}",
                summary.max_abs_value, summary.at.0, summary.at.1
            );
            Ok(0)
        }
    }
}
