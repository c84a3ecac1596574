use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "carleman", version, about = "Numerical checks of Carleman estimates, damped-plate decay and HUM control")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON suite configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice (default 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads, 0 for all cores; falls back to CARLEMAN_WORKERS.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Uniform panels per axis of the Carleman sweep grids.
    #[arg(long, global = true)]
    pub panels: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Master identity of the decomposition and the P₁/P₂ symmetry defects.
    VerifyDecomposition {
        #[arg(long)]
        points: Option<usize>,
    },
    /// Residuals of the exact-identity catalog on random fields.
    VerifyIdentities {
        /// Comma-separated identity ids (default: the whole catalog).
        #[arg(long, value_delimiter = ',')]
        ids: Option<Vec<String>>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Finite-difference oracle and the lemma constant suites.
    VerifyPointwise {
        #[arg(long)]
        fields: Option<usize>,
    },
    /// λ-sweep of the integrated Carleman inequality.
    CarlemanSweep {
        #[arg(long, value_enum, default_value = "beta-neg")]
        regime: Regime,
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
        #[arg(long)]
        fields: Option<usize>,
    },
    /// Energy conservation and log-decay statistic of the damped plate.
    PlateDecay {
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Resolvent norm scan along the imaginary axis.
    PlateResolvent {
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        gamma_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Penalized HUM null control.
    HumControl {
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Every stage, shortest first.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    BetaNeg,
    BetaZero,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyDecomposition { .. } => "verify-decomposition",
            Command::VerifyIdentities { .. } => "verify-identities",
            Command::VerifyPointwise { .. } => "verify-pointwise",
            Command::CarlemanSweep { .. } => "carleman-sweep",
            Command::PlateDecay { .. } => "plate-decay",
            Command::PlateResolvent { .. } => "plate-resolvent",
            Command::HumControl { .. } => "hum-control",
            Command::All => "all",
        }
    }
}
