use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Build, verify and simulate Naimark extensions of Weyl–Heisenberg covariant POVMs.
#[derive(Debug, Parser)]
#[command(name = "naimark", version)]
struct Cli {
    /// Tolerance for numerical checks.
    #[arg(long, global = true, env = "NAIMARK_TOL", default_value_t = 1e-10)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the d²×d² unitary for a fiducial and write it with its M.
    Build(BuildArgs),
    /// Check a unitary (and optionally its M) for block structure and unitarity.
    Verify(VerifyArgs),
    /// Outcome distribution of a state measured through the extension.
    Simulate(SimulateArgs),
    /// Qubit circuit for one of the building blocks.
    Circuit(CircuitArgs),
    /// List built-in fiducials and M matrices.
    Catalog,
}

/// Where the fiducial comes from. At most one may be given.
#[derive(Debug, Args)]
#[group(multiple = false)]
struct FiducialSource {
    /// Built-in fiducial label (see `naimark catalog`).
    #[arg(long)]
    catalog: Option<String>,
    /// Inline ket: `{"re": [...], "im": [...]}`, `[re, ...]` or `[[re, im], ...]`.
    #[arg(long)]
    ket: Option<String>,
    /// File holding a ket in any of the `--ket` formats.
    #[arg(long)]
    ket_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Block,
    Bell,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    source: FiducialSource,
    #[arg(long, value_enum, default_value_t = Construction::Block)]
    construction: Construction,
    /// Write U here instead of embedding it in the report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write M here instead of embedding it in the report.
    #[arg(long)]
    m_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Matrix file holding U.
    #[arg(long)]
    u: PathBuf,
    /// Matrix file holding the M that U was built from.
    #[arg(long)]
    m: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: FiducialSource,
    /// Use this M directly instead of deriving one from the fiducial.
    #[arg(long, conflicts_with_all = ["catalog", "ket", "ket_file"])]
    m: Option<PathBuf>,
    /// Input state, same formats as `--ket`.
    #[arg(long, conflicts_with_all = ["state_file", "basis"])]
    state: Option<String>,
    #[arg(long, conflicts_with = "basis")]
    state_file: Option<PathBuf>,
    /// Computational basis state |k⟩ as input; the default is |0⟩.
    #[arg(long)]
    basis: Option<usize>,
    /// Ancilla basis state the input is embedded with.
    #[arg(long, default_value_t = 0)]
    embedding: usize,
    #[arg(long, value_enum, default_value_t = Construction::Block)]
    construction: Construction,
    /// Number of sampled shots; 0 reports the exact distribution only.
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Compare against the direct Born-rule probabilities.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Cz,
    Cx,
    Fourier,
    Bell,
    Naimark,
}

#[derive(Debug, Args)]
struct CircuitArgs {
    /// Qubits per register; the qudit dimension is 2^n.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    target: Target,
    /// Matrix file for M (naimark target).
    #[arg(long, group = "m_source")]
    m: Option<PathBuf>,
    /// Catalog M label (naimark target).
    #[arg(long, group = "m_source")]
    m_catalog: Option<String>,
    /// Circuit file whose expansion is M (naimark target).
    #[arg(long, group = "m_source")]
    m_circuit: Option<PathBuf>,
    /// Also emit the expanded matrix and check it against the closed form.
    #[arg(long)]
    expand: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(args) => commands::build(args, cli.tol),
        Command::Verify(args) => commands::verify(args, cli.tol),
        Command::Simulate(args) => commands::simulate(args, cli.tol),
        Command::Circuit(args) => commands::circuit(args, cli.tol),
        Command::Catalog => commands::catalog(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
