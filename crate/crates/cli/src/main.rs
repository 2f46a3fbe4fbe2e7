use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effvol::Error;

mod commands;
mod parse;

/// Effective-volume experiments on the Floquet Ising and Clifford OTOC circuits.
#[derive(Parser, Debug)]
#[command(name = "effvol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by every command. Each command documents its own defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// `heavy_hex_127`, `chain:N`, `grid:RxC`, or a device JSON file.
    #[arg(long, global = true)]
    device: Option<String>,
    /// Floquet steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// `start:stop:count` or a comma list; angles accept `pi`, e.g. `3pi/8`.
    #[arg(long, global = true)]
    theta_grid: Option<String>,
    /// Subset sizes, e.g. `20,25,28` or `7:25`.
    #[arg(long, global = true)]
    qubits: Option<String>,
    /// Pauli string such as `Z62`, or `stabilizer:Z58[@steps]`.
    #[arg(long, global = true)]
    observable: Option<String>,
    /// Error rate per two-qubit gate.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Monte-Carlo samples or trajectories.
    #[arg(long, global = true)]
    shots: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Memory budget such as `8G` or `512MiB`.
    #[arg(long, global = true)]
    mem_budget: Option<String>,
    /// `f64` or `f32` amplitudes.
    #[arg(long, global = true)]
    precision: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// <Z> after 20 Floquet steps against theta for several subset sizes.
    Fig4b,
    /// Stabilizer-observable expectation after 5 steps against theta.
    Fig4a,
    /// <Z> against subset size for a theta grid.
    Convergence,
    /// Open and closed contraction costs against the state-vector cost.
    Cost(commands::CostArgs),
    /// Ensemble-averaged reduced purity of random Clifford OTOC circuits.
    Purity(commands::PurityArgs),
    /// Magnetization decay series with exponential fits.
    Decay(commands::DecayArgs),
    /// Largest feasible depth for chaotic dynamics.
    Tdelta(commands::TDeltaArgs),
    /// Rescales a noisy expectation by its effective fidelity.
    Mitigate(commands::MitigateArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Parse { .. } | Error::NonClifford { .. } => 2,
        Error::Resource { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match cli.command {
        Command::Fig4b => commands::fig4b(c),
        Command::Fig4a => commands::fig4a(c),
        Command::Convergence => commands::convergence(c),
        Command::Cost(a) => commands::cost(c, &a),
        Command::Purity(a) => commands::purity(c, &a),
        Command::Decay(a) => commands::decay(c, &a),
        Command::Tdelta(a) => commands::tdelta(c, &a),
        Command::Mitigate(a) => commands::mitigate(c, &a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
