use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "qms-thermo", version, about = "Detailed-balance quantum Markov semigroups and equilibrium densities")]
pub struct Cli {
    /// Emit JSON (17 significant digits) instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of random samples for randomized checks.
    #[arg(long, global = true, default_value_t = 20)]
    pub samples: usize,

    /// Evolution time.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,

    /// Evolve densities (Schrödinger picture) instead of observables.
    #[arg(long, global = true)]
    pub dual: bool,

    /// Override the tolerance used by `verify` and `replay`.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy of a density matrix, by spectrum and through the heat generator.
    Entropy { rho: PathBuf },
    /// Equilibrium density and pressure for a Hermitian Hamiltonian.
    Equilibrium { hamiltonian: PathBuf },
    /// Detailed-balance generator for a faithful density.
    Generator { sigma: PathBuf },
    /// Evolve a matrix under a generator for time `--t`.
    Evolve { generator: PathBuf, state: PathBuf },
    /// Classical rate matrix of the generator built from a faithful density.
    Classical { sigma: PathBuf },
    /// Check detailed balance, stationarity and the classical chain.
    Verify { sigma: PathBuf },
    /// Recompute the built-in worked examples against their published values.
    Replay,
}
