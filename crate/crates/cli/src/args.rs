//! Command-line flags and the JSON config file that mirrors them.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "bcstab", version, about = "Stability regions of the two-user broadcast channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace the analytic region boundary
    Region(Opts),
    /// Classify one rate pair against the analytic region
    Check(Opts),
    /// Simulate the queues at one rate pair
    Simulate(Opts),
    /// Grid of analytic memberships, optionally checked by simulation
    Sweep(Opts),
    /// Empirical boundary by bisection along rays, next to the analytic one
    CompareBoundary(Opts),
    /// Closed-form success probabilities against Monte Carlo estimates
    McVerify(Opts),
}

impl Command {
    pub fn parts(self) -> (CommandKind, Opts) {
        match self {
            Command::Region(o) => (CommandKind::Region, o),
            Command::Check(o) => (CommandKind::Check, o),
            Command::Simulate(o) => (CommandKind::Simulate, o),
            Command::Sweep(o) => (CommandKind::Sweep, o),
            Command::CompareBoundary(o) => (CommandKind::CompareBoundary, o),
            Command::McVerify(o) => (CommandKind::McVerify, o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Region,
    Check,
    Simulate,
    Sweep,
    CompareBoundary,
    McVerify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Generic,
    Ian,
    Sc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerArg {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominantArg {
    None,
    Queue1,
    Queue2,
}

/// Every option is optional so that flags, the config file and defaults
/// can be layered in that order.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Opts {
    /// JSON file whose keys are flag names with underscores
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    pub power: Option<PowerArg>,
    /// Decoding threshold of receiver 1 in dB
    #[arg(long, allow_negative_numbers = true)]
    pub gamma1_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma2_db: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    /// Path-loss exponent
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Total power; any two of p-total, p1, p2 fix the third
    #[arg(long)]
    pub p_total: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Success profile "p1_solo,p2_solo,p1_both,p2_both" for the generic scheme
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Simulated slots per run
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sweep resolution per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// Boundary samples (region) or rays (compare-boundary)
    #[arg(long)]
    pub points: Option<usize>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also simulate every sweep point
    #[arg(long)]
    #[serde(deserialize_with = "flag")]
    pub simulate: bool,
    /// Monte Carlo draws for mc-verify
    #[arg(long)]
    pub draws: Option<u64>,
    /// Run a dominant system with dummy packets on one queue
    #[arg(long, value_enum)]
    pub dominant: Option<DominantArg>,
}

fn flag<'de, D: serde::Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    Ok(Option::<bool>::deserialize(d)?.unwrap_or(false))
}

impl Opts {
    /// Flags win over the config file named by `--config`, if any.
    pub fn with_config_file(self) -> Result<Opts, CliError> {
        match &self.config {
            Some(path) => Ok(self.clone().over(load_config(path)?)),
            None => Ok(self),
        }
    }

    fn over(self, base: Opts) -> Opts {
        Opts {
            config: self.config,
            scheme: self.scheme.or(base.scheme),
            power: self.power.or(base.power),
            gamma1_db: self.gamma1_db.or(base.gamma1_db),
            gamma2_db: self.gamma2_db.or(base.gamma2_db),
            d1: self.d1.or(base.d1),
            d2: self.d2.or(base.d2),
            alpha: self.alpha.or(base.alpha),
            p_total: self.p_total.or(base.p_total),
            p1: self.p1.or(base.p1),
            p2: self.p2.or(base.p2),
            profile: self.profile.or(base.profile),
            lambda1: self.lambda1.or(base.lambda1),
            lambda2: self.lambda2.or(base.lambda2),
            horizon: self.horizon.or(base.horizon),
            seed: self.seed.or(base.seed),
            grid: self.grid.or(base.grid),
            points: self.points.or(base.points),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            simulate: self.simulate || base.simulate,
            draws: self.draws.or(base.draws),
            dominant: self.dominant.or(base.dominant),
        }
    }
}

fn load_config(path: &Path) -> Result<Opts, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
}
