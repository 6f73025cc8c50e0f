use bcstab::batch::{map_slice, run_batch};
use bcstab::channel::{build_profile, mc_estimate_profile, PROFILE_ORDER_TOL};
use bcstab::region::{region_adaptive, region_fixed_sc_decoupled, region_general};
use bcstab::sim::{estimate_boundary_with, run, BoundarySearch};
use bcstab::{
    Decoding, Membership, PowerScheme, RatePoint, SimConfig, StabilityRegion, SuccessProfile,
    SystemParams, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::args::CommandKind;
use crate::output::{opt_cell, sig9, Report, Row};
use crate::spec::RunSpec;
use crate::CliError;

/// Half-width of the band around the boundary, in units of the boundary
/// scale, where sweep disagreements are not counted.
pub const BAND_HALF_WIDTH: f64 = 0.05;
/// Bisection steps per ray in `compare-boundary`.
pub const BISECTION_STEPS: u32 = 10;
/// mc-verify fails above this |z|.
pub const Z_LIMIT: f64 = 4.0;

pub fn dispatch(spec: RunSpec) -> Result<(), CliError> {
    match spec.command {
        CommandKind::Region => cmd_region(spec)?.emit(),
        CommandKind::Check => cmd_check(spec)?.emit(),
        CommandKind::Simulate => cmd_simulate(spec)?.emit(),
        CommandKind::Sweep => {
            let (report, summary) = cmd_sweep(spec)?;
            report.emit()?;
            eprintln!("{summary}");
            Ok(())
        }
        CommandKind::CompareBoundary => cmd_compare_boundary(spec)?.emit(),
        CommandKind::McVerify => {
            let report = cmd_mc_verify(spec)?;
            report.emit()?;
            check_z_scores(&report.doc.rows)
        }
    }
}

/// Which region construction applies to `params`.
pub fn region_for(params: &SystemParams) -> Result<(StabilityRegion, &'static str), CliError> {
    if params.power_scheme == PowerScheme::QueueAdaptive {
        return Ok((region_adaptive(params)?, "adaptive"));
    }
    let profile = build_profile(params)?;
    if params.decoding == Decoding::SuccessiveDecoding
        && (profile.p1_both - profile.p1_solo).abs() <= PROFILE_ORDER_TOL
    {
        return Ok((region_fixed_sc_decoupled(&profile)?, "decoupled"));
    }
    Ok((region_general(&profile)?, "general"))
}

fn scheme_name(params: &SystemParams) -> String {
    let decoding = match params.decoding {
        Decoding::Generic(_) => "generic",
        Decoding::InterferenceAsNoise => "ian",
        Decoding::SuccessiveDecoding => "sc",
    };
    let power = match params.power_scheme {
        PowerScheme::Fixed => "fixed",
        PowerScheme::QueueAdaptive => "adaptive",
    };
    format!("{decoding}/{power}")
}

/// `|point|` over the boundary distance along the same ray; 0 at the
/// origin, `None` when the region has no extent along the ray.
pub fn boundary_ratio(region: &StabilityRegion, point: RatePoint) -> Option<f64> {
    let norm = point.lambda1.hypot(point.lambda2);
    if norm == 0.0 {
        return Some(0.0);
    }
    let dir = RatePoint::new(point.lambda1 / norm, point.lambda2 / norm);
    let scale = region.boundary_scale(dir);
    (scale > 0.0).then(|| norm / scale)
}

fn region_meta(region: &StabilityRegion, kind: &str, params: &SystemParams) -> Vec<(String, String)> {
    let c = region.corner();
    vec![
        ("scheme".into(), scheme_name(params)),
        ("region".into(), kind.into()),
        ("corner".into(), format!("{},{}", sig9(c.lambda1), sig9(c.lambda2))),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Row for BoundaryRow {
    fn header() -> &'static [&'static str] {
        &["lambda1", "lambda2"]
    }
    fn cells(&self) -> Vec<String> {
        vec![sig9(self.lambda1), sig9(self.lambda2)]
    }
}

pub fn cmd_region(spec: RunSpec) -> Result<Report<BoundaryRow>, CliError> {
    let (region, kind) = region_for(&spec.params)?;
    let rows = region
        .trace_boundary(spec.points)?
        .into_iter()
        .map(|p| BoundaryRow {
            lambda1: p.lambda1,
            lambda2: p.lambda2,
        })
        .collect();
    let meta = region_meta(&region, kind, &spec.params);
    let mut report = Report::new(spec, region.profile, rows);
    report.meta = meta;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub membership: Membership,
    pub boundary_ratio: Option<f64>,
}

impl Row for CheckRow {
    fn header() -> &'static [&'static str] {
        &["lambda1", "lambda2", "membership", "boundary_ratio"]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            sig9(self.lambda1),
            sig9(self.lambda2),
            self.membership.to_string(),
            opt_cell(self.boundary_ratio),
        ]
    }
}

fn required_point(spec: &RunSpec) -> Result<RatePoint, CliError> {
    spec.point
        .ok_or_else(|| CliError::Usage("this command needs --lambda1 and --lambda2".into()))
}

pub fn cmd_check(spec: RunSpec) -> Result<Report<CheckRow>, CliError> {
    let point = required_point(&spec)?;
    let (region, kind) = region_for(&spec.params)?;
    let row = CheckRow {
        lambda1: point.lambda1,
        lambda2: point.lambda2,
        membership: region.membership(point)?,
        boundary_ratio: boundary_ratio(&region, point),
    };
    let meta = region_meta(&region, kind, &spec.params);
    let mut report = Report::new(spec, region.profile, vec![row]);
    report.meta = meta;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    pub queue: u8,
    pub lambda: f64,
    pub mean_queue: f64,
    pub final_queue: u64,
    pub departure_rate: f64,
    pub success_fraction: f64,
    pub empty_fraction: f64,
    pub drift_slope: f64,
    pub verdict: Verdict,
}

impl Row for SimulateRow {
    fn header() -> &'static [&'static str] {
        &[
            "queue",
            "lambda",
            "mean_queue",
            "final_queue",
            "departure_rate",
            "success_fraction",
            "empty_fraction",
            "drift_slope",
            "verdict",
        ]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.queue.to_string(),
            sig9(self.lambda),
            sig9(self.mean_queue),
            self.final_queue.to_string(),
            sig9(self.departure_rate),
            sig9(self.success_fraction),
            sig9(self.empty_fraction),
            sig9(self.drift_slope),
            self.verdict.to_string(),
        ]
    }
}

fn sim_config(spec: &RunSpec) -> Result<SimConfig, CliError> {
    spec.sim
        .ok_or_else(|| CliError::Usage("no simulation settings for this command".into()))
}

pub fn cmd_simulate(spec: RunSpec) -> Result<Report<SimulateRow>, CliError> {
    let cfg = sim_config(&spec)?;
    let res = run(&cfg)?;
    let (region, kind) = region_for(&spec.params)?;
    let point = cfg.arrivals;
    let rows = (0..2)
        .map(|k| SimulateRow {
            queue: k as u8 + 1,
            lambda: [point.lambda1, point.lambda2][k],
            mean_queue: res.mean_queue[k],
            final_queue: res.final_queue[k],
            departure_rate: res.departure_rate[k],
            success_fraction: res.success_fraction[k],
            empty_fraction: res.empty_fraction[k],
            drift_slope: res.drift_slope[k],
            verdict: res.verdict[k],
        })
        .collect();
    let mut meta = region_meta(&region, kind, &spec.params);
    meta.push(("membership".into(), region.membership(point)?.to_string()));
    meta.push(("system_verdict".into(), res.system_verdict().to_string()));
    let mut report = Report::new(spec, region.profile, rows);
    report.meta = meta;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub membership: Membership,
    pub boundary_ratio: Option<f64>,
    /// Within the excluded band around the boundary.
    pub in_band: bool,
    pub verdict: Option<Verdict>,
    /// Whether the simulator agrees with the analytic membership;
    /// undefined on the boundary itself.
    pub agrees: Option<bool>,
}

impl Row for SweepRow {
    fn header() -> &'static [&'static str] {
        &[
            "lambda1",
            "lambda2",
            "membership",
            "boundary_ratio",
            "in_band",
            "verdict",
            "agrees",
        ]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            sig9(self.lambda1),
            sig9(self.lambda2),
            self.membership.to_string(),
            opt_cell(self.boundary_ratio),
            self.in_band.to_string(),
            self.verdict.map_or_else(|| "n/a".into(), |v| v.to_string()),
            self.agrees.map_or_else(|| "n/a".into(), |v| v.to_string()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: usize,
    pub simulated: usize,
    pub excluded: usize,
    pub disagreements: usize,
}

impl std::fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "summary: {} points, {} simulated, {} disagreements outside the boundary band ({} excluded)",
            self.points, self.simulated, self.disagreements, self.excluded
        )
    }
}

/// Side of the square sweep grid: a quarter beyond the furthest axis
/// intercept, capped at one packet per slot.
pub fn sweep_extent(region: &StabilityRegion) -> f64 {
    let reach = region.lambda1_max().max(region.sup_lambda2(0.0).unwrap_or(0.0));
    if reach > 0.0 {
        (1.25 * reach).min(1.0)
    } else {
        1.0
    }
}

fn agrees(membership: Membership, verdict: Verdict) -> Option<bool> {
    match membership {
        Membership::Inside => Some(verdict == Verdict::Stable),
        Membership::Outside => Some(verdict == Verdict::Unstable),
        Membership::Boundary => None,
    }
}

pub fn cmd_sweep(spec: RunSpec) -> Result<(Report<SweepRow>, SweepSummary), CliError> {
    let (region, kind) = region_for(&spec.params)?;
    let extent = sweep_extent(&region);
    let n = spec.grid;
    let step = extent / (n - 1) as f64;
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let point = RatePoint::new(i as f64 * step, j as f64 * step);
            let ratio = boundary_ratio(&region, point);
            rows.push(SweepRow {
                lambda1: point.lambda1,
                lambda2: point.lambda2,
                membership: region.membership(point)?,
                boundary_ratio: ratio,
                in_band: ratio.is_some_and(|r| (r - 1.0).abs() < BAND_HALF_WIDTH),
                verdict: None,
                agrees: None,
            });
        }
    }

    if spec.simulate {
        let base = sim_config(&spec)?;
        let configs: Vec<SimConfig> = rows
            .iter()
            .enumerate()
            .map(|(k, r)| SimConfig {
                arrivals: RatePoint::new(r.lambda1, r.lambda2),
                seed: base.seed.wrapping_add(k as u64),
                ..base
            })
            .collect();
        for (row, res) in rows.iter_mut().zip(run_batch(&configs)) {
            let verdict = res?.system_verdict();
            row.verdict = Some(verdict);
            row.agrees = agrees(row.membership, verdict);
        }
    }

    let counted = |r: &&SweepRow| !r.in_band && r.agrees.is_some();
    let summary = SweepSummary {
        points: rows.len(),
        simulated: rows.iter().filter(|r| r.verdict.is_some()).count(),
        excluded: rows.iter().filter(|r| r.verdict.is_some() && !counted(r)).count(),
        disagreements: rows.iter().filter(counted).filter(|r| r.agrees == Some(false)).count(),
    };
    let mut meta = region_meta(&region, kind, &spec.params);
    meta.push(("extent".into(), sig9(extent)));
    let mut report = Report::new(spec, region.profile, rows);
    report.meta = meta;
    report.summary.push(summary.to_string());
    Ok((report, summary))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub angle_deg: f64,
    pub analytic_lambda1: f64,
    pub analytic_lambda2: f64,
    pub empirical_lambda1: Option<f64>,
    pub empirical_lambda2: Option<f64>,
    /// Larger of the two coordinate differences.
    pub abs_error: Option<f64>,
}

impl Row for CompareRow {
    fn header() -> &'static [&'static str] {
        &[
            "angle_deg",
            "analytic_lambda1",
            "analytic_lambda2",
            "empirical_lambda1",
            "empirical_lambda2",
            "abs_error",
        ]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            sig9(self.angle_deg),
            sig9(self.analytic_lambda1),
            sig9(self.analytic_lambda2),
            opt_cell(self.empirical_lambda1),
            opt_cell(self.empirical_lambda2),
            opt_cell(self.abs_error),
        ]
    }
}

/// `n` ray angles evenly spread over 10..=80 degrees; one ray sits at 45.
pub fn ray_angles(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![45.0];
    }
    (0..n).map(|k| 10.0 + 70.0 * k as f64 / (n - 1) as f64).collect()
}

pub fn cmd_compare_boundary(spec: RunSpec) -> Result<Report<CompareRow>, CliError> {
    let base = sim_config(&spec)?;
    let (region, kind) = region_for(&spec.params)?;
    let params = spec.params;
    let angles = ray_angles(spec.points);
    let estimates = map_slice(&angles, |&angle| {
        let search = BoundarySearch {
            horizon: base.horizon,
            seed: base.seed,
            ..BoundarySearch::new(angle, BISECTION_STEPS)
        };
        estimate_boundary_with(&params, &search)
    });
    let mut failures = Vec::new();
    let mut rows = Vec::with_capacity(angles.len());
    for (&angle, est) in angles.iter().zip(estimates) {
        let analytic = region.boundary_point(angle);
        let empirical = match est {
            Ok(e) => Some(e.point),
            Err(bcstab::Error::EstimationFailed(msg)) => {
                failures.push(format!("ray {}: {msg}", sig9(angle)));
                None
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(CompareRow {
            angle_deg: angle,
            analytic_lambda1: analytic.lambda1,
            analytic_lambda2: analytic.lambda2,
            empirical_lambda1: empirical.map(|p| p.lambda1),
            empirical_lambda2: empirical.map(|p| p.lambda2),
            abs_error: empirical.map(|p| {
                (p.lambda1 - analytic.lambda1)
                    .abs()
                    .max((p.lambda2 - analytic.lambda2).abs())
            }),
        });
    }
    let mut meta = region_meta(&region, kind, &spec.params);
    meta.push(("bisection_steps".into(), BISECTION_STEPS.to_string()));
    let mut report = Report::new(spec, region.profile, rows);
    report.meta = meta;
    report.summary = failures;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub entry: String,
    pub closed_form: f64,
    pub mc_estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub z_score: Option<f64>,
}

impl Row for McRow {
    fn header() -> &'static [&'static str] {
        &["entry", "closed_form", "mc_estimate", "std_error", "z_score"]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.entry.clone(),
            sig9(self.closed_form),
            opt_cell(self.mc_estimate),
            opt_cell(self.std_error),
            opt_cell(self.z_score),
        ]
    }
}

/// Verification error if any |z| exceeds [`Z_LIMIT`]; rows without an
/// estimate are skipped.
pub fn check_z_scores(rows: &[McRow]) -> Result<(), CliError> {
    let worst = rows
        .iter()
        .filter_map(|r| r.z_score)
        .fold(0.0, |m: f64, z| m.max(z.abs()));
    if worst > Z_LIMIT {
        return Err(CliError::Verification(format!(
            "max |z| = {} exceeds {Z_LIMIT}",
            sig9(worst)
        )));
    }
    Ok(())
}

pub fn cmd_mc_verify(spec: RunSpec) -> Result<Report<McRow>, CliError> {
    let exact = build_profile(&spec.params)?;
    let names = SuccessProfile::ENTRY_NAMES;
    let rows: Vec<McRow> = if let Decoding::Generic(_) = spec.params.decoding {
        // no physical model to sample from
        names
            .iter()
            .zip(exact.to_array())
            .map(|(n, v)| McRow {
                entry: n.to_string(),
                closed_form: v,
                mc_estimate: None,
                std_error: None,
                z_score: None,
            })
            .collect()
    } else {
        let est = mc_estimate_profile(&spec.params, spec.draws, spec.seed)?;
        let z = est.z_scores(&exact);
        let mc = est.estimate.to_array();
        (0..4)
            .map(|k| McRow {
                entry: names[k].to_string(),
                closed_form: exact.to_array()[k],
                mc_estimate: Some(mc[k]),
                std_error: Some(est.std_error[k]),
                z_score: Some(z[k]),
            })
            .collect()
    };
    let mut report = Report::new(spec, exact, rows);
    report.meta.push(("z_limit".into(), sig9(Z_LIMIT)));
    Ok(report)
}
