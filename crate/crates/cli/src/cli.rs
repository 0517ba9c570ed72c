use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "stochcell",
    version,
    about = "Coverage probability and mean rate of Poisson cellular downlinks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Coverage,
    Rate,
    Reuse,
    Compare,
    MinDelta,
    Sites,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage probability over a threshold sweep (analytic; add --trials to simulate too)
    Coverage(Flags),
    /// Mean rate E[ln(1 + SINR/G)] per reuse factor
    Rate(Flags),
    /// Coverage with random frequency reuse over --delta bands
    Reuse(Flags),
    /// Analytic curve next to a Monte-Carlo estimate
    Compare(Flags),
    /// Smallest reuse factor reaching coverage 1 - epsilon without noise
    MinDelta(Flags),
    /// Write a generated deployment as x,y[,band] CSV
    Sites(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Coverage(f) => (CommandKind::Coverage, f),
            Command::Rate(f) => (CommandKind::Rate, f),
            Command::Reuse(f) => (CommandKind::Reuse, f),
            Command::Compare(f) => (CommandKind::Compare, f),
            Command::MinDelta(f) => (CommandKind::MinDelta, f),
            Command::Sites(f) => (CommandKind::Sites, f),
        }
    }
}

/// Flags shared by all subcommands; each reads the ones it needs. Unset
/// flags fall back to the --config file, then to built-in defaults.
#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Base-station density per km²
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Path-loss exponent (> 2)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Rate of the exponential desired-link fading
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// SNR 1/(mu sigma²) in dB, or "inf" for no noise
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<String>,
    /// exp | lognormal:XI,KAPPA | lognormal:auto,KAPPA | table:PATH
    #[arg(long)]
    pub fading: Option<String>,
    /// Threshold sweep START:STOP:STEP in dB, or a single value
    #[arg(long = "t-db", allow_hyphen_values = true)]
    pub t_db: Option<String>,
    /// Reuse factor; `rate` also takes a list such as 1,2,3,4
    #[arg(long)]
    pub delta: Option<String>,
    /// SINR gap G in dB (>= 0)
    #[arg(long = "gap-db", allow_hyphen_values = true)]
    pub gap_db: Option<f64>,
    /// Monte-Carlo trials, e.g. 1e5; 0 disables simulation
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// random | greedy | preassigned
    #[arg(long)]
    pub allocation: Option<String>,
    /// Imported deployment, one `x,y[,band]` site per line
    #[arg(long)]
    pub deployment: Option<PathBuf>,
    /// Simulated layout: ppp | grid:TIERS | lattice:TIERS,JITTER
    #[arg(long)]
    pub source: Option<String>,
    /// PPP window: auto or a radius in km
    #[arg(long)]
    pub window: Option<String>,
    /// Analytic method: auto | all | thm1_general | thm2_exponential |
    /// alpha4_closed | no_noise_closed | small_noise | reuse_exponential
    #[arg(long)]
    pub method: Option<String>,
    /// Target outage for min-delta
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Worker threads for simulation (results do not depend on it)
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON file with any of the settings above; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the resolved settings as JSON and exit
    #[arg(long)]
    pub show_config: bool,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}
