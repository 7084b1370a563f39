use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use macrocoh::coherence::DistanceMeasure;
use macrocoh_cli::output::{bounds_gnuplot_script, sweep_gnuplot_script, CsvDocument};
use macrocoh_cli::sweep::{
    run_bounds_compare, run_boson_sweep, run_decoherence_check, run_spin_sweep,
    BosonSweepConfig, BoundsCompareConfig, CliError, DecoherenceCheckConfig, SigmaGrid, Spacing,
    SpinSweepConfig,
};

#[derive(Parser)]
#[command(
    name = "macrocoh",
    version,
    about = "Disturbance-based macroscopic coherence under coarse-grained measurements",
    after_help = "Exit codes: 0 success, 2 usage error, 3 numerical-validation failure, \
                  4 convergence failure. MACROCOH_THREADS caps parallelism (0 = auto)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep M over sigma for collective-spin states; emits CSV.
    SpinSweep(SpinSweepArgs),
    /// Sweep M over sigma for bosonic states under the X-quadrature; emits CSV.
    BosonSweep(BosonSweepArgs),
    /// Compare the fidelity lower bounds for a partially decohered GHZ state; emits CSV.
    BoundsCompare(BoundsCompareArgs),
    /// Verify the decoherence channel against the measurement channel.
    DecoherenceCheck(DecoherenceCheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DistanceArg {
    Bures,
    Relent,
}

impl From<DistanceArg> for DistanceMeasure {
    fn from(d: DistanceArg) -> Self {
        match d {
            DistanceArg::Bures => DistanceMeasure::Bures,
            DistanceArg::Relent => DistanceMeasure::RelativeEntropy,
        }
    }
}

#[derive(Args)]
struct SigmaArgs {
    /// Sigma grid as MIN MAX POINTS.
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "POINTS"], required = true)]
    sigma: Vec<f64>,
    /// Logarithmic sigma spacing (the default).
    #[arg(long, conflicts_with = "linear")]
    log: bool,
    /// Linear sigma spacing.
    #[arg(long)]
    linear: bool,
}

impl SigmaArgs {
    fn grid(&self) -> Result<SigmaGrid, CliError> {
        let points = self.sigma[2];
        if points.fract() != 0.0 || !(1.0..=1e7).contains(&points) {
            return Err(CliError::Usage(format!(
                "sigma point count must be a positive integer (got {points})"
            )));
        }
        let spacing = if self.linear { Spacing::Linear } else { Spacing::Log };
        SigmaGrid::new(self.sigma[0], self.sigma[1], points as usize, spacing)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a companion gnuplot script next to --out.
    #[arg(long, requires = "out")]
    gnuplot: bool,
}

#[derive(Args)]
struct SpinSweepArgs {
    /// Number of spin-1/2 particles.
    #[arg(long)]
    n: usize,
    /// Comma-separated state specs: ghz, product:theta=..,
    /// rdicke:k=..[;theta=..][;phi=..], decoghz:gamma=..
    #[arg(long, value_delimiter = ',', required = true)]
    states: Vec<String>,
    #[command(flatten)]
    sigma: SigmaArgs,
    /// Distance used for the measure.
    #[arg(long, value_enum, default_value = "bures")]
    distance: DistanceArg,
    #[command(flatten)]
    output: OutputArgs,
    /// Seed echoed into the output for reproducibility.
    #[arg(long, default_value_t = 12345)]
    seed: u64,
}

#[derive(Args)]
struct BosonSweepArgs {
    /// Comma-separated state specs: coherent:alpha=.., cat:alpha=.., fock:n=..
    #[arg(long, value_delimiter = ',', required = true)]
    states: Vec<String>,
    #[command(flatten)]
    sigma: SigmaArgs,
    /// Distance used for the measure.
    #[arg(long, value_enum, default_value = "bures")]
    distance: DistanceArg,
    /// Fock-space cutoff override (default: per-state requirement).
    #[arg(long)]
    cutoff: Option<usize>,
    /// Position-grid point count (default 2048).
    #[arg(long)]
    grid_points: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
    /// Seed echoed into the output for reproducibility.
    #[arg(long, default_value_t = 12345)]
    seed: u64,
}

#[derive(Args)]
struct BoundsCompareArgs {
    /// Number of spin-1/2 particles.
    #[arg(long)]
    n: usize,
    /// GHZ off-diagonal survival in [0, 1].
    #[arg(long)]
    gamma: f64,
    #[command(flatten)]
    sigma: SigmaArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DecoherenceCheckArgs {
    /// Number of spin-1/2 particles.
    #[arg(long)]
    n: usize,
    /// Coupling constant.
    #[arg(long)]
    g: f64,
    /// Elapsed time (0 gives the identity channel).
    #[arg(long)]
    t: f64,
    /// Gaussian environment width parameter.
    #[arg(long, conflicts_with_all = ["beta", "omega"])]
    mu: Option<f64>,
    /// Inverse bath temperature (requires --omega).
    #[arg(long, requires = "omega")]
    beta: Option<f64>,
    /// Bath oscillator frequency (requires --beta).
    #[arg(long, requires = "beta")]
    omega: Option<f64>,
    /// Seed for the random test states.
    #[arg(long, default_value_t = 12345)]
    seed: u64,
}

fn emit(doc: &CsvDocument, output: &OutputArgs, labels: Option<&[String]>) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            fs::write(path, doc.to_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            if output.gnuplot {
                let script_path = path.with_extension("gp");
                let csv_name = path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                let script = match labels {
                    Some(labels) => sweep_gnuplot_script(&csv_name, labels),
                    None => bounds_gnuplot_script(&csv_name),
                };
                fs::write(&script_path, script).map_err(|e| {
                    CliError::Usage(format!("cannot write {}: {e}", script_path.display()))
                })?;
            }
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            doc.write_to(&mut lock)
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))?;
            lock.flush().ok();
            Ok(())
        }
    }
}

fn sorted_labels(states: &[String]) -> Vec<String> {
    let mut labels: Vec<String> = states.iter().map(|s| s.trim().to_string()).collect();
    labels.sort();
    labels.dedup();
    labels
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SpinSweep(args) => {
            let cfg = SpinSweepConfig {
                n: args.n,
                states: args.states.clone(),
                grid: args.sigma.grid()?,
                distance: args.distance.into(),
                seed: args.seed,
            };
            let doc = run_spin_sweep(&cfg)?;
            emit(&doc, &args.output, Some(&sorted_labels(&args.states)))
        }
        Command::BosonSweep(args) => {
            let cfg = BosonSweepConfig {
                states: args.states.clone(),
                grid: args.sigma.grid()?,
                distance: args.distance.into(),
                cutoff: args.cutoff,
                grid_points: args.grid_points,
                seed: args.seed,
            };
            let doc = run_boson_sweep(&cfg)?;
            emit(&doc, &args.output, Some(&sorted_labels(&args.states)))
        }
        Command::BoundsCompare(args) => {
            let cfg = BoundsCompareConfig {
                n: args.n,
                gamma: args.gamma,
                grid: args.sigma.grid()?,
            };
            let doc = run_bounds_compare(&cfg)?;
            emit(&doc, &args.output, None)
        }
        Command::DecoherenceCheck(args) => {
            let report = run_decoherence_check(&DecoherenceCheckConfig {
                n: args.n,
                g: args.g,
                t: args.t,
                mu: args.mu,
                beta: args.beta,
                omega: args.omega,
                seed: args.seed,
            })?;
            for line in &report.lines {
                println!("{line}");
            }
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "decoherence/channel deviation {} exceeds 1e-10",
                    report.max_deviation
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
