//! Layered options resolved into a complete, serializable run record.

use std::path::PathBuf;

use bcstab::sim::DEFAULT_HORIZON;
use bcstab::{Decoding, DominantMode, PowerScheme, RatePoint, SimConfig, SuccessProfile, SystemParams};
use serde::{Deserialize, Serialize};

use crate::args::{CommandKind, DominantArg, Format, Opts, PowerArg, SchemeArg};
use crate::CliError;

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_P_TOTAL: f64 = 2.0;
pub const DEFAULT_GRID: usize = 50;
pub const DEFAULT_TRACE_POINTS: usize = 200;
pub const DEFAULT_RAYS: usize = 8;
pub const DEFAULT_DRAWS: u64 = 1_000_000;
pub const MIN_DRAWS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Everything a command needs; written into every output so a run can be
/// repeated from its own artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub command: CommandKind,
    pub params: SystemParams,
    /// Rate pair for `check` and `simulate`.
    pub point: Option<RatePoint>,
    /// Simulation settings; for `sweep` and `compare-boundary` the arrival
    /// rates are overwritten per run.
    pub sim: Option<SimConfig>,
    pub output: OutputSpec,
    pub grid: usize,
    pub points: usize,
    pub simulate: bool,
    pub draws: u64,
    pub seed: u64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl RunSpec {
    pub fn resolve(command: CommandKind, opts: &Opts) -> Result<RunSpec, CliError> {
        let params = resolve_params(opts)?;
        let seed = opts.seed.unwrap_or(DEFAULT_SEED);

        let point = match (opts.lambda1, opts.lambda2) {
            (Some(l1), Some(l2)) => Some(RatePoint::new(l1, l2)),
            (None, None) => None,
            _ => return Err(CliError::Usage("give both --lambda1 and --lambda2".into())),
        };
        let needs_point = matches!(command, CommandKind::Check | CommandKind::Simulate);
        if needs_point && point.is_none() {
            return Err(CliError::Usage("this command needs --lambda1 and --lambda2".into()));
        }

        let grid = opts.grid.unwrap_or(DEFAULT_GRID);
        if grid < 2 {
            return Err(CliError::Usage(format!("--grid must be at least 2, got {grid}")));
        }
        let points = opts.points.unwrap_or(match command {
            CommandKind::CompareBoundary => DEFAULT_RAYS,
            _ => DEFAULT_TRACE_POINTS,
        });
        let min_points = if command == CommandKind::CompareBoundary { 1 } else { 2 };
        if points < min_points {
            return Err(CliError::Usage(format!("--points must be at least {min_points}, got {points}")));
        }
        let draws = opts.draws.unwrap_or(DEFAULT_DRAWS);
        if command == CommandKind::McVerify && draws < MIN_DRAWS {
            return Err(CliError::Usage(format!("--draws must be at least {MIN_DRAWS}, got {draws}")));
        }

        let uses_sim = match command {
            CommandKind::Simulate | CommandKind::CompareBoundary => true,
            CommandKind::Sweep => opts.simulate,
            _ => false,
        };
        let sim = if uses_sim {
            let horizon = opts.horizon.unwrap_or(DEFAULT_HORIZON);
            let mode = match opts.dominant.unwrap_or(DominantArg::None) {
                DominantArg::None => DominantMode::None,
                DominantArg::Queue1 => DominantMode::Queue1Dummy,
                DominantArg::Queue2 => DominantMode::Queue2Dummy,
            };
            let cfg = SimConfig::new(params, point.unwrap_or(RatePoint::new(0.0, 0.0)), seed)
                .with_horizon(horizon)
                .with_mode(mode);
            cfg.validate()?;
            Some(cfg)
        } else {
            None
        };

        let format = opts.format.unwrap_or_else(|| match &opts.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        });

        Ok(RunSpec {
            command,
            params,
            point,
            sim,
            output: OutputSpec {
                path: opts.out.clone(),
                format,
            },
            grid,
            points,
            simulate: opts.simulate,
            draws,
            seed,
        })
    }

    /// The profile the region is built from.
    pub fn profile(&self) -> Result<SuccessProfile, CliError> {
        Ok(bcstab::channel::build_profile(&self.params)?)
    }
}

fn resolve_params(opts: &Opts) -> Result<SystemParams, CliError> {
    let scheme = opts.scheme.unwrap_or(if opts.profile.is_some() {
        SchemeArg::Generic
    } else {
        SchemeArg::Ian
    });
    let power = opts.power.unwrap_or(PowerArg::Fixed);

    if scheme == SchemeArg::Generic {
        let text = opts
            .profile
            .as_deref()
            .ok_or_else(|| CliError::Usage("--scheme generic needs --profile".into()))?;
        if power == PowerArg::Adaptive {
            return Err(CliError::Usage(
                "adaptive power needs a physical scheme (ian or sc)".into(),
            ));
        }
        let profile = parse_profile(text)?;
        let params = SystemParams::generic(profile);
        params.validate()?;
        return Ok(params);
    }
    if opts.profile.is_some() {
        return Err(CliError::Usage("--profile only applies to --scheme generic".into()));
    }

    let (p_total, p1, p2) = split_power(opts.p_total, opts.p1, opts.p2);
    let mut params = SystemParams::new(
        opts.gamma1_db.map_or(DEFAULT_GAMMA, db_to_linear),
        opts.gamma2_db.map_or(DEFAULT_GAMMA, db_to_linear),
        opts.d1.unwrap_or(1.0),
        opts.d2.unwrap_or(1.0),
        opts.alpha.unwrap_or(2.0),
        p1,
        p2,
    )
    .with_decoding(match scheme {
        SchemeArg::Sc => Decoding::SuccessiveDecoding,
        _ => Decoding::InterferenceAsNoise,
    })
    .with_power_scheme(match power {
        PowerArg::Fixed => PowerScheme::Fixed,
        PowerArg::Adaptive => PowerScheme::QueueAdaptive,
    });
    params.p_total = p_total;
    for w in params.validate()? {
        eprintln!("warning: {w}");
    }
    Ok(params)
}

/// Any two of the total and the two shares determine the third; a lone
/// total is split evenly and a lone share is taken from the default total.
pub fn split_power(total: Option<f64>, p1: Option<f64>, p2: Option<f64>) -> (f64, f64, f64) {
    match (total, p1, p2) {
        (Some(t), Some(a), Some(b)) => (t, a, b),
        (Some(t), Some(a), None) => (t, a, t - a),
        (Some(t), None, Some(b)) => (t, t - b, b),
        (None, Some(a), Some(b)) => (a + b, a, b),
        (Some(t), None, None) => (t, t / 2.0, t / 2.0),
        (None, Some(a), None) => (DEFAULT_P_TOTAL, a, DEFAULT_P_TOTAL - a),
        (None, None, Some(b)) => (DEFAULT_P_TOTAL, DEFAULT_P_TOTAL - b, b),
        (None, None, None) => (DEFAULT_P_TOTAL, DEFAULT_P_TOTAL / 2.0, DEFAULT_P_TOTAL / 2.0),
    }
}

pub fn parse_profile(text: &str) -> Result<SuccessProfile, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--profile {text:?}: {e}")))?;
    let arr: [f64; 4] = values.try_into().map_err(|v: Vec<f64>| {
        CliError::Usage(format!("--profile needs 4 comma-separated values, got {}", v.len()))
    })?;
    Ok(SuccessProfile::new(arr[0], arr[1], arr[2], arr[3])?)
}
