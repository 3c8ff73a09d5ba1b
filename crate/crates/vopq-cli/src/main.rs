//! Command-line entry point: figure-data sweeps, Monte-Carlo protocol
//! sessions, and eavesdropping experiments with deterministic CSV/JSON
//! output.
//!
//! Exit codes: 0 on success, 2 on usage errors, 3 on runtime or domain
//! errors.

mod report;
mod sweep;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vopq::analysis::DetectionStrategy;
use vopq::channel::LossModel;
use vopq::hilbert::PureState;
use vopq::protocol::{
    detect_eavesdropper, non_arrival_p_value, run, Encoding, EveMode, ProtocolConfig,
    ProtocolKind,
};

use report::{RunReport, VerdictInfo};
use sweep::{Surface, SweepSettings};

#[derive(Parser)]
#[command(
    name = "vopq",
    version,
    about = "Quantum key distribution with vacuum-one-photon qubits: \
             analytic sweeps and seeded Monte-Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit figure data: yield surfaces or loss-threshold curves.
    Sweep(SweepArgs),
    /// Run a seeded protocol session and print a run report.
    Simulate(SimulateArgs),
    /// Run a B92 session under intercept-resend eavesdropping and report
    /// the detection verdict.
    Eve(EveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Bb84,
    B92,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EncodingArg {
    /// One photon per qubit; channel loss removes signals.
    Pol,
    /// Vacuum-one-photon superpositions; channel loss damps states.
    Vopq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DetectionArg {
    Pvm,
    Povm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct LossArgs {
    /// Photon-loss probability in [0, 1].
    #[arg(long, conflicts_with_all = ["alpha", "length"])]
    gamma: Option<f64>,
    /// Fiber attenuation in dB/km (use together with --length).
    #[arg(long, requires = "length")]
    alpha: Option<f64>,
    /// Fiber length in km (use together with --alpha).
    #[arg(long, requires = "alpha")]
    length: Option<f64>,
}

impl LossArgs {
    fn resolve(&self) -> vopq::Result<LossModel> {
        match (self.gamma, self.alpha, self.length) {
            (Some(g), _, _) => LossModel::from_gamma(g),
            (None, Some(a), Some(l)) => LossModel::from_fiber(a, l),
            _ => Ok(LossModel::lossless()),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Which data set to emit.
    #[arg(long, value_enum)]
    surface: Surface,
    /// Grid resolution: points per axis for surfaces, points per curve.
    #[arg(long)]
    grid: Option<usize>,
    /// Fixed squared vacuum weight of the first state (curve sweeps).
    #[arg(long, default_value_t = 0.95)]
    cos2_theta0: f64,
    /// Fiber attenuation in dB/km (loss-limits sweep).
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Lower end of the open cos^2(theta1) sweep range.
    #[arg(long, default_value_t = 0.5)]
    cos2_min: f64,
    /// Upper end of the open cos^2(theta1) sweep range.
    #[arg(long, default_value_t = 1.0)]
    cos2_max: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    #[arg(long, value_enum, default_value_t = EncodingArg::Vopq)]
    encoding: EncodingArg,
    /// B92 detection strategy.
    #[arg(long, value_enum, default_value_t = DetectionArg::Pvm)]
    detection: DetectionArg,
    /// First signal-state angle in radians (B92).
    #[arg(long, required_if_eq("protocol", "b92"))]
    theta0: Option<f64>,
    /// Second signal-state angle in radians (B92).
    #[arg(long, required_if_eq("protocol", "b92"))]
    theta1: Option<f64>,
    /// First signal-state phase in radians (B92).
    #[arg(long, default_value_t = 0.0)]
    phi0: f64,
    /// Second signal-state phase in radians (B92).
    #[arg(long, default_value_t = 0.0)]
    phi1: f64,
    #[command(flatten)]
    loss: LossArgs,
    /// Add an intercept-resend eavesdropper (B92 only).
    #[arg(long)]
    eve: bool,
    /// Number of signals.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Significance level of the eavesdropper test (with --eve).
    #[arg(long, default_value_t = 0.01)]
    significance: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EveArgs {
    /// Symmetric-pair angle: states cos(theta)|0> +/- sin(theta)|1>.
    #[arg(long, conflicts_with_all = ["theta0", "theta1"])]
    theta: Option<f64>,
    /// First signal-state angle in radians.
    #[arg(long, requires = "theta1")]
    theta0: Option<f64>,
    /// Second signal-state angle in radians.
    #[arg(long, requires = "theta0")]
    theta1: Option<f64>,
    #[arg(long, value_enum, default_value_t = DetectionArg::Povm)]
    detection: DetectionArg,
    #[arg(long, value_enum, default_value_t = EncodingArg::Vopq)]
    encoding: EncodingArg,
    #[command(flatten)]
    loss: LossArgs,
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    significance: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    /// Flag combinations clap cannot express statically; exits 2.
    Usage(String),
    /// Domain or I/O failures; exits 3.
    Runtime(String),
}

impl From<vopq::Error> for CliError {
    fn from(e: vopq::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(args) => run_sweep(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Eve(args) => run_eve(args),
    };
    match outcome {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            std::process::exit(3);
        }
    }
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    let default_resolution = match args.surface {
        Surface::KmaxPvm | Surface::KmaxPovm => 201,
        Surface::LossLimits | Surface::Gamma0 => 200,
    };
    let settings = SweepSettings {
        surface: args.surface,
        resolution: args.grid.unwrap_or(default_resolution),
        cos2_theta0: args.cos2_theta0,
        alpha_db_per_km: args.alpha,
        range: (args.cos2_min, args.cos2_max),
    };
    let rendered = sweep::render(&settings, args.format == FormatArg::Json)?;
    emit(args.out.as_deref(), &rendered)
}

fn build_b92_kind(
    theta0: f64,
    theta1: f64,
    phi0: f64,
    phi1: f64,
    detection: DetectionArg,
) -> Result<ProtocolKind, CliError> {
    let psi0 = PureState::new(theta0, phi0)?;
    let psi1 = PureState::new(theta1, phi1)?;
    Ok(ProtocolKind::B92 {
        psi0,
        psi1,
        detection: match detection {
            DetectionArg::Pvm => DetectionStrategy::Pvm,
            DetectionArg::Povm => DetectionStrategy::Povm,
        },
    })
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let protocol = match args.protocol {
        ProtocolArg::Bb84 => ProtocolKind::Bb84,
        // clap enforces the presence of both angles for b92.
        ProtocolArg::B92 => build_b92_kind(
            args.theta0.expect("required_if_eq"),
            args.theta1.expect("required_if_eq"),
            args.phi0,
            args.phi1,
            args.detection,
        )?,
    };
    let config = ProtocolConfig {
        protocol,
        encoding: match args.encoding {
            EncodingArg::Pol => Encoding::PolarizationLike,
            EncodingArg::Vopq => Encoding::Vopq,
        },
        loss: args.loss.resolve()?,
        eve: if args.eve {
            EveMode::InterceptResend
        } else {
            EveMode::Absent
        },
        n_signals: args.n,
        seed: args.seed,
    };
    let transcript = run(&config)?;
    let verdict = if args.eve {
        Some(VerdictInfo {
            verdict: detect_eavesdropper(&transcript, config.loss.gamma(), args.significance)?,
            p_value: non_arrival_p_value(&transcript, config.loss.gamma())?,
            significance: args.significance,
        })
    } else {
        None
    };
    let report = RunReport::build(&config, &transcript, verdict)?;
    let rendered = match args.format {
        FormatArg::Json => report.to_json(),
        FormatArg::Csv => report.to_csv(),
    };
    emit(args.out.as_deref(), &rendered)
}

fn run_eve(args: EveArgs) -> Result<(), CliError> {
    let (theta0, theta1) = match (args.theta, args.theta0, args.theta1) {
        (Some(theta), _, _) => (theta, -theta),
        (None, Some(t0), Some(t1)) => (t0, t1),
        _ => {
            return Err(CliError::Usage(
                "provide --theta or both --theta0 and --theta1".into(),
            ))
        }
    };
    let protocol = build_b92_kind(theta0, theta1, 0.0, 0.0, args.detection)?;
    let config = ProtocolConfig {
        protocol,
        encoding: match args.encoding {
            EncodingArg::Pol => Encoding::PolarizationLike,
            EncodingArg::Vopq => Encoding::Vopq,
        },
        loss: args.loss.resolve()?,
        eve: EveMode::InterceptResend,
        n_signals: args.n,
        seed: args.seed,
    };
    let transcript = run(&config)?;
    let verdict = VerdictInfo {
        verdict: detect_eavesdropper(&transcript, config.loss.gamma(), args.significance)?,
        p_value: non_arrival_p_value(&transcript, config.loss.gamma())?,
        significance: args.significance,
    };
    let report = RunReport::build(&config, &transcript, Some(verdict))?;
    let rendered = match args.format {
        FormatArg::Json => report.to_json(),
        FormatArg::Csv => report.to_csv(),
    };
    emit(args.out.as_deref(), &rendered)
}

fn emit(path: Option<&std::path::Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Runtime(format!("cannot write to stdout: {e}")))
        }
    }
}
