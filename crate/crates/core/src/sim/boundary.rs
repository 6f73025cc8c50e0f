//! Empirical boundary along a ray, by bisection on simulator verdicts.

use serde::{Deserialize, Serialize};

use super::{run, SimConfig, Verdict, DEFAULT_HORIZON};
use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::region::{ray_direction, RatePoint};

pub const MIN_BISECTION_STEPS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySearch {
    /// Ray angle from the `lambda1` axis, degrees in `[0, 90]`.
    pub angle_deg: f64,
    pub steps: u32,
    pub horizon: u64,
    pub seed: u64,
    /// Initial stable guess as a fraction of the largest feasible scale.
    pub lo_frac: f64,
    /// Initial unstable guess as a fraction of the largest feasible scale.
    pub hi_frac: f64,
}

impl BoundarySearch {
    pub fn new(angle_deg: f64, steps: u32) -> Self {
        BoundarySearch {
            angle_deg,
            steps,
            horizon: DEFAULT_HORIZON,
            seed: 0x5eed,
            lo_frac: 0.1,
            hi_frac: 0.75,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    pub point: RatePoint,
    pub scale: f64,
    /// Final `(stable, not stable)` scale bracket.
    pub bracket: (f64, f64),
    pub probes: u32,
}

/// Midpoint of the final bisection bracket along the ray at `angle_deg`.
pub fn estimate_boundary(params: &SystemParams, angle_deg: f64, steps: u32) -> Result<RatePoint> {
    estimate_boundary_with(params, &BoundarySearch::new(angle_deg, steps)).map(|e| e.point)
}

/// Bisect the ray scale between a stable and an unstable probe. Every probe
/// reuses the same seed, and probes that are not clearly stable count as
/// unstable.
pub fn estimate_boundary_with(params: &SystemParams, search: &BoundarySearch) -> Result<BoundaryEstimate> {
    if !(0.0..=90.0).contains(&search.angle_deg) {
        return Err(Error::param(format!(
            "ray angle must lie in [0, 90] degrees, got {}",
            search.angle_deg
        )));
    }
    if search.steps < MIN_BISECTION_STEPS {
        return Err(Error::param(format!(
            "need at least {MIN_BISECTION_STEPS} bisection steps, got {}",
            search.steps
        )));
    }
    if !(0.0 < search.lo_frac && search.lo_frac < search.hi_frac && search.hi_frac <= 1.0) {
        return Err(Error::param("bracket fractions must satisfy 0 < lo < hi <= 1"));
    }
    let dir = ray_direction(search.angle_deg);
    // Bernoulli arrivals cap each rate at one packet per slot
    let s_max = 1.0 / dir.lambda1.max(dir.lambda2);
    let mut probes = 0u32;
    let mut probe = |s: f64| -> Result<Verdict> {
        probes += 1;
        let cfg = SimConfig::new(*params, dir.scaled(s), search.seed).with_horizon(search.horizon);
        Ok(run(&cfg)?.system_verdict())
    };

    let mut lo = search.lo_frac * s_max;
    let mut hi = search.hi_frac * s_max;
    let mut lo_ok = probe(lo)? == Verdict::Stable;
    let mut hi_ok = probe(hi)? == Verdict::Unstable;
    if !(lo_ok && hi_ok) {
        if !lo_ok {
            lo /= 4.0;
            lo_ok = probe(lo)? == Verdict::Stable;
        }
        if !hi_ok {
            hi = s_max;
            hi_ok = probe(hi)? == Verdict::Unstable;
        }
        if !(lo_ok && hi_ok) {
            return Err(Error::EstimationFailed(format!(
                "no stable/unstable bracket along {} degrees (stable at {lo}: {lo_ok}, unstable at {hi}: {hi_ok})",
                search.angle_deg
            )));
        }
    }
    for _ in 0..search.steps {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? == Verdict::Stable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let scale = 0.5 * (lo + hi);
    Ok(BoundaryEstimate {
        point: dir.scaled(scale),
        scale,
        bracket: (lo, hi),
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SuccessProfile;

    #[test]
    fn rejects_bad_arguments() {
        let p = SystemParams::generic(SuccessProfile::new(0.5, 0.5, 0.5, 0.5).unwrap());
        assert!(estimate_boundary(&p, 45.0, 4).is_err());
        assert!(estimate_boundary(&p, 120.0, 10).is_err());
    }

    #[test]
    fn certain_delivery_has_no_bracket() {
        // every rate up to one packet per slot is stable
        let p = SystemParams::generic(SuccessProfile::new(1.0, 1.0, 1.0, 1.0).unwrap());
        let mut s = BoundarySearch::new(45.0, 8);
        s.horizon = 20_000;
        assert!(matches!(
            estimate_boundary_with(&p, &s),
            Err(Error::EstimationFailed(_))
        ));
    }

    #[test]
    fn rectangle_diagonal() {
        let p = SystemParams::generic(SuccessProfile::new(0.5, 0.5, 0.5, 0.5).unwrap());
        let b = estimate_boundary(&p, 45.0, 10).unwrap();
        assert!((b.lambda1 - 0.5).abs() < 0.02 && (b.lambda2 - 0.5).abs() < 0.02, "{b:?}");
    }
}
