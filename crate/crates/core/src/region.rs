//! Stability region of the coupled queues.
//!
//! Each queue's service rate depends on whether the other queue is empty,
//! so the region is built from two dominant systems in which one queue
//! always transmits (dummy packets when empty). Dominant system 1 (queue 1
//! always on) gives
//!
//! ```text
//! R1: l1 / p1s + (p1s - p1b) / (p1s p2b) * l2 < 1,   l2 < p2b
//! ```
//!
//! and dominant system 2 the mirror image
//!
//! ```text
//! R2: l2 / p2s + (p2s - p2b) / (p2s p1b) * l1 < 1,   l1 < p1b
//! ```
//!
//! The stability region is `R1 ∪ R2`. Both boundary lines pass through the
//! corner `(p1b, p2b)` where both queues are saturated.

use serde::{Deserialize, Serialize};

use crate::channel::{self, PowerScheme, SuccessProfile, SystemParams, User, PROFILE_ORDER_TOL};
use crate::error::{Error, Result};

/// Absolute tolerance on constraint residuals for boundary classification.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Arrival rates in packets per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl RatePoint {
    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        RatePoint { lambda1, lambda2 }
    }

    pub fn get(&self, user: User) -> f64 {
        match user {
            User::One => self.lambda1,
            User::Two => self.lambda2,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        RatePoint::new(self.lambda1 * s, self.lambda2 * s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be a nonnegative rate, got {v}")));
            }
        }
        Ok(())
    }
}

/// Unit direction in the rate plane for an angle in degrees measured from
/// the `lambda1` axis. The axes are exact.
pub fn ray_direction(angle_deg: f64) -> RatePoint {
    if angle_deg == 0.0 {
        RatePoint::new(1.0, 0.0)
    } else if angle_deg == 90.0 {
        RatePoint::new(0.0, 1.0)
    } else {
        let t = angle_deg.to_radians();
        RatePoint::new(t.cos(), t.sin())
    }
}

/// `{a1 l1 + a2 l2 < 1} ∩ {l_cap < cap_value}`.
///
/// Coefficients may be `+inf`, meaning the corresponding rate must be zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubRegion {
    pub a1: f64,
    pub a2: f64,
    pub cap_axis: User,
    pub cap_value: f64,
}

// a * l with the convention inf * 0 = 0.
fn term(a: f64, l: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else {
        a * l
    }
}

fn recip(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

// (solo - both) / (solo * other_both), zero when there is no coupling.
fn coupling(solo: f64, both: f64, other_both: f64) -> f64 {
    let gap = solo - both;
    if gap <= 0.0 {
        0.0
    } else {
        let denom = solo * other_both;
        if denom == 0.0 {
            f64::INFINITY
        } else {
            gap / denom
        }
    }
}

impl SubRegion {
    /// `a1 l1 + a2 l2` at `p`.
    pub fn line_value(&self, p: RatePoint) -> f64 {
        term(self.a1, p.lambda1) + term(self.a2, p.lambda2)
    }

    /// Largest constraint residual; negative means strictly inside.
    pub fn max_residual(&self, p: RatePoint) -> f64 {
        let line = self.line_value(p) - 1.0;
        let cap = p.get(self.cap_axis) - self.cap_value;
        line.max(cap)
    }

    pub fn classify(&self, p: RatePoint) -> Membership {
        let r = self.max_residual(p);
        if r < -BOUNDARY_TOL {
            Membership::Inside
        } else if r <= BOUNDARY_TOL {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }

    /// Largest `lambda1` reachable in this part.
    fn lambda1_extent(&self) -> f64 {
        let line = recip(self.a1);
        match self.cap_axis {
            User::One => line.min(self.cap_value),
            User::Two => line,
        }
    }

    /// Supremum of `lambda2` over the part at fixed `lambda1`.
    fn sup_lambda2(&self, lambda1: f64) -> Option<f64> {
        const SLACK: f64 = 1e-12;
        let budget = 1.0 - term(self.a1, lambda1);
        if budget < -SLACK {
            return None;
        }
        let budget = budget.max(0.0);
        let from_line = if self.a2 == 0.0 {
            f64::INFINITY
        } else {
            budget / self.a2
        };
        match self.cap_axis {
            User::One if lambda1 > self.cap_value + SLACK => None,
            User::One => Some(from_line),
            User::Two => Some(from_line.min(self.cap_value)),
        }
    }

    /// Largest scale `s` with `s * dir` in the closure of the part.
    fn ray_scale(&self, dir: RatePoint) -> f64 {
        let along = self.line_value(dir);
        let line = if along > 0.0 { 1.0 / along } else { f64::INFINITY };
        let d = dir.get(self.cap_axis);
        let cap = if d > 0.0 { self.cap_value / d } else { f64::INFINITY };
        line.min(cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Membership::Inside => "inside",
            Membership::Boundary => "boundary",
            Membership::Outside => "outside",
        })
    }
}

/// Union of one or two [`SubRegion`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRegion {
    pub parts: Vec<SubRegion>,
    pub profile: SuccessProfile,
    /// Kinks of the outer boundary, included verbatim when tracing.
    pub breakpoints: Vec<RatePoint>,
}

/// `R1 ∪ R2` for an arbitrary valid profile.
pub fn region_general(profile: &SuccessProfile) -> Result<StabilityRegion> {
    profile.validate()?;
    let p = profile;
    let r1 = SubRegion {
        a1: recip(p.p1_solo),
        a2: coupling(p.p1_solo, p.p1_both, p.p2_both),
        cap_axis: User::Two,
        cap_value: p.p2_both,
    };
    let r2 = SubRegion {
        a1: coupling(p.p2_solo, p.p2_both, p.p1_both),
        a2: recip(p.p2_solo),
        cap_axis: User::One,
        cap_value: p.p1_both,
    };
    Ok(StabilityRegion {
        parts: vec![r1, r2],
        profile: *p,
        breakpoints: vec![RatePoint::new(p.p1_both, p.p2_both)],
    })
}

/// Single-part region for fixed power with successive decoding when
/// receiver 1's success does not depend on queue 2
/// (`p1_both == p1_solo`): queue 1 is autonomous and queue 2 sees
///
/// ```text
/// l2 / p2s + (p2s - p2b) / (p1s p2s) * l1 < 1,   l1 < p1s
/// ```
pub fn region_fixed_sc_decoupled(profile: &SuccessProfile) -> Result<StabilityRegion> {
    profile.validate()?;
    let p = profile;
    if (p.p1_both - p.p1_solo).abs() > PROFILE_ORDER_TOL {
        return Err(Error::SchemeMismatch(format!(
            "decoupled region needs p1_both == p1_solo (got {} vs {}); use region_general",
            p.p1_both, p.p1_solo
        )));
    }
    let part = SubRegion {
        a1: coupling(p.p2_solo, p.p2_both, p.p1_solo),
        a2: recip(p.p2_solo),
        cap_axis: User::One,
        cap_value: p.p1_solo,
    };
    Ok(StabilityRegion {
        parts: vec![part],
        profile: *p,
        breakpoints: vec![RatePoint::new(p.p1_solo, p.p2_both)],
    })
}

/// Region for queue-adaptive power: the general region of the adaptive
/// profile.
pub fn region_adaptive(params: &SystemParams) -> Result<StabilityRegion> {
    if params.power_scheme != PowerScheme::QueueAdaptive {
        return Err(Error::SchemeMismatch(
            "region_adaptive requires the queue-adaptive power scheme".into(),
        ));
    }
    region_general(&channel::build_profile(params)?)
}

impl StabilityRegion {
    pub fn membership(&self, point: RatePoint) -> Result<Membership> {
        point.validate()?;
        let mut best = Membership::Outside;
        for part in &self.parts {
            match part.classify(point) {
                Membership::Inside => return Ok(Membership::Inside),
                Membership::Boundary => best = Membership::Boundary,
                Membership::Outside => {}
            }
        }
        Ok(best)
    }

    /// Saturation corner `(p1_both, p2_both)`.
    pub fn corner(&self) -> RatePoint {
        RatePoint::new(self.profile.p1_both, self.profile.p2_both)
    }

    pub fn lambda1_max(&self) -> f64 {
        self.parts
            .iter()
            .map(SubRegion::lambda1_extent)
            .fold(0.0, f64::max)
    }

    /// Largest `lambda2` in the closure of the region at `lambda1`.
    pub fn sup_lambda2(&self, lambda1: f64) -> Option<f64> {
        self.parts
            .iter()
            .filter_map(|p| p.sup_lambda2(lambda1))
            .reduce(f64::max)
    }

    /// Distance from the origin to the boundary along `dir` (a unit
    /// vector in the nonnegative quadrant).
    pub fn boundary_scale(&self, dir: RatePoint) -> f64 {
        self.parts
            .iter()
            .map(|p| p.ray_scale(dir))
            .fold(0.0, f64::max)
    }

    /// Boundary point on the ray at `angle_deg` from the `lambda1` axis.
    pub fn boundary_point(&self, angle_deg: f64) -> RatePoint {
        let dir = ray_direction(angle_deg);
        dir.scaled(self.boundary_scale(dir))
    }

    /// Upper-right boundary sampled at `n_points` evenly spaced `lambda1`
    /// values in `[0, lambda1_max]`, with the breakpoints spliced in and a
    /// closing point on the `lambda1` axis.
    pub fn trace_boundary(&self, n_points: usize) -> Result<Vec<RatePoint>> {
        if n_points < 2 {
            return Err(Error::param(format!("need at least 2 boundary points, got {n_points}")));
        }
        let max1 = self.lambda1_max();
        let mut pts: Vec<RatePoint> = (0..n_points)
            .map(|k| {
                let l1 = if k + 1 == n_points {
                    max1
                } else {
                    max1 * k as f64 / (n_points - 1) as f64
                };
                // the axis intercept comes back as rounding noise
                let l2 = self.sup_lambda2(l1).unwrap_or(0.0);
                RatePoint::new(l1, if l2 < 1e-12 { 0.0 } else { l2 })
            })
            .collect();
        for bp in &self.breakpoints {
            if !(0.0..=max1).contains(&bp.lambda1) {
                continue;
            }
            if let Some(existing) = pts.iter_mut().find(|q| {
                q.lambda1 == bp.lambda1 && (q.lambda2 - bp.lambda2).abs() <= 1e-12
            }) {
                *existing = *bp;
                continue;
            }
            // after every sample left of it, and after samples at the same
            // lambda1 that sit higher
            let at = pts
                .iter()
                .position(|q| q.lambda1 > bp.lambda1 || (q.lambda1 == bp.lambda1 && q.lambda2 < bp.lambda2))
                .unwrap_or(pts.len());
            pts.insert(at, *bp);
        }
        if pts.last().is_some_and(|q| q.lambda2 > 0.0) {
            pts.push(RatePoint::new(max1, 0.0));
        }
        Ok(pts)
    }
}

/// Which queue transmits dummy packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominantSystem {
    /// Queue 1 never empties.
    First,
    /// Queue 2 never empties.
    Second,
}

/// Service rates in a dominant system. `empty_prob` is the probability that
/// the non-saturated queue is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantRates {
    pub mu1: f64,
    pub mu2: f64,
    pub empty_prob: f64,
}

/// Service rates in dominant system `which`, given the arrival rate of the
/// queue that is *not* saturated (`lambda2` for [`DominantSystem::First`]).
///
/// The non-saturated queue always sees the both-active probability, so by
/// Little's law it is empty with probability `1 - lambda / p_both`; the
/// saturated queue is served at the solo rate in exactly those slots.
pub fn dominant_service_rates(
    profile: &SuccessProfile,
    which: DominantSystem,
    lambda_other: f64,
) -> Result<DominantRates> {
    profile.validate()?;
    if !(lambda_other >= 0.0 && lambda_other.is_finite()) {
        return Err(Error::param(format!("arrival rate must be nonnegative, got {lambda_other}")));
    }
    let (saturated, other) = match which {
        DominantSystem::First => (User::One, User::Two),
        DominantSystem::Second => (User::Two, User::One),
    };
    let other_rate = profile.both(other);
    if lambda_other >= other_rate {
        return Err(Error::InfeasibleRate(format!(
            "queue {} arrival rate {lambda_other} is not below its service rate {other_rate}",
            other.index() + 1
        )));
    }
    let solo = profile.solo(saturated);
    let mu_saturated = solo - (solo - profile.both(saturated)) / other_rate * lambda_other;
    let empty_prob = 1.0 - lambda_other / other_rate;
    let (mu1, mu2) = match which {
        DominantSystem::First => (mu_saturated, other_rate),
        DominantSystem::Second => (other_rate, mu_saturated),
    };
    Ok(DominantRates {
        mu1,
        mu2,
        empty_prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn general_example() -> SuccessProfile {
        SuccessProfile::new(0.9, 0.8, 0.3, 0.5).unwrap()
    }

    fn rectangle(a: f64, b: f64) -> StabilityRegion {
        region_general(&SuccessProfile::new(a, b, a, b).unwrap()).unwrap()
    }

    #[test]
    fn general_example_coefficients() {
        let r = region_general(&general_example()).unwrap();
        let r1 = r.parts[0];
        assert!((r1.a1 - 1.0 / 0.9).abs() < 1e-15);
        assert!((r1.a2 - 0.6 / 0.45).abs() < 1e-15);
        assert_eq!(r1.cap_value, 0.5);
        // 0.3 / 0.9 + (0.6 / 0.45) * 0.2 = 0.6
        let p = RatePoint::new(0.3, 0.2);
        assert!((r1.line_value(p) - 0.6).abs() < 1e-12);
        assert_eq!(r.membership(p).unwrap(), Membership::Inside);
    }

    #[test]
    fn uncoupled_profile_gives_rectangle() {
        let r = rectangle(0.7, 0.4);
        for part in &r.parts {
            assert!(part.a1 == 0.0 || part.a2 == 0.0);
        }
        assert_eq!(r.membership(RatePoint::new(0.69, 0.39)).unwrap(), Membership::Inside);
        assert_eq!(r.membership(RatePoint::new(0.71, 0.1)).unwrap(), Membership::Outside);
        assert_eq!(r.membership(RatePoint::new(0.1, 0.41)).unwrap(), Membership::Outside);
    }

    #[test]
    fn membership_examples() {
        let rect = rectangle(0.5, 0.5);
        assert_eq!(rect.membership(RatePoint::new(0.2, 0.2)).unwrap(), Membership::Inside);
        let r = region_general(&general_example()).unwrap();
        assert_eq!(r.membership(r.corner()).unwrap(), Membership::Boundary);
        assert!(matches!(
            r.membership(RatePoint::new(-0.1, 0.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn decoupled_example() {
        let prof = SuccessProfile::new(0.3679, 0.6065, 0.3679, 0.3679).unwrap();
        let r = region_fixed_sc_decoupled(&prof).unwrap();
        assert_eq!(r.parts.len(), 1);
        let part = r.parts[0];
        assert_eq!(part.cap_axis, User::One);
        assert_eq!(part.cap_value, 0.3679);
        assert!((part.a2 - 1.0 / 0.6065).abs() < 1e-15);
        assert!((part.a1 - 0.2386 / (0.3679 * 0.6065)).abs() < 1e-12);
        // lambda1 = 0 edge: cap is p2_solo
        assert!((r.sup_lambda2(0.0).unwrap() - 0.6065).abs() < 1e-15);

        let rect = region_fixed_sc_decoupled(&SuccessProfile::new(0.4, 0.6, 0.4, 0.6).unwrap()).unwrap();
        assert_eq!(rect.parts[0].a1, 0.0);
    }

    #[test]
    fn decoupled_rejects_coupled_profile() {
        assert!(matches!(
            region_fixed_sc_decoupled(&general_example()),
            Err(Error::SchemeMismatch(_))
        ));
    }

    #[test]
    fn trace_rectangle() {
        let pts = rectangle(0.5, 0.5).trace_boundary(3).unwrap();
        let want = [(0.0, 0.5), (0.25, 0.5), (0.5, 0.5), (0.5, 0.0)];
        assert_eq!(pts.len(), want.len());
        for (p, (a, b)) in pts.iter().zip(want) {
            assert!((p.lambda1 - a).abs() < 1e-15 && (p.lambda2 - b).abs() < 1e-15, "{pts:?}");
        }
    }

    #[test]
    fn trace_general_hits_corner_and_intercepts() {
        let prof = general_example();
        let r = region_general(&prof).unwrap();
        let pts = r.trace_boundary(11).unwrap();
        assert!(pts.contains(&RatePoint::new(0.3, 0.5)));
        assert_eq!(pts[0].lambda1, 0.0);
        assert!((pts[0].lambda2 - prof.p2_solo).abs() < 1e-12);
        let last = pts.last().unwrap();
        assert!((last.lambda1 - prof.p1_solo).abs() < 1e-12);
        assert_eq!(last.lambda2, 0.0);
    }

    #[test]
    fn trace_rejects_single_point() {
        assert!(rectangle(0.5, 0.5).trace_boundary(1).is_err());
    }

    #[test]
    fn degenerate_profiles() {
        // p2_both = 0: R1 shrinks to a segment of the lambda1 axis
        let prof = SuccessProfile::new(0.6, 0.7, 0.2, 0.0).unwrap();
        let r = region_general(&prof).unwrap();
        assert_eq!(r.membership(RatePoint::new(0.1, 0.0)).unwrap(), Membership::Inside);
        assert_eq!(r.membership(RatePoint::new(0.3, 0.0)).unwrap(), Membership::Boundary);
        assert_eq!(r.membership(RatePoint::new(0.3, 0.01)).unwrap(), Membership::Outside);
        let pts = r.trace_boundary(5).unwrap();
        assert!(pts.iter().all(|p| p.lambda2.is_finite()));

        let empty = region_general(&SuccessProfile::new(0.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(empty.membership(RatePoint::new(0.0, 0.0)).unwrap(), Membership::Boundary);
        assert_eq!(empty.membership(RatePoint::new(0.1, 0.0)).unwrap(), Membership::Outside);
        assert_eq!(empty.trace_boundary(3).unwrap(), vec![RatePoint::new(0.0, 0.0); 3]);
    }

    #[test]
    fn dominant_rates_examples() {
        let prof = general_example();
        let r = dominant_service_rates(&prof, DominantSystem::First, 0.25).unwrap();
        assert!((r.empty_prob - 0.5).abs() < 1e-15);
        assert!((r.mu1 - 0.6).abs() < 1e-15);
        assert_eq!(r.mu2, 0.5);
        let idle = dominant_service_rates(&prof, DominantSystem::First, 0.0).unwrap();
        assert_eq!(idle.mu1, prof.p1_solo);
        let near = dominant_service_rates(&prof, DominantSystem::First, 0.5 - 1e-12).unwrap();
        assert!((near.mu1 - prof.p1_both).abs() < 1e-9);
        assert!(matches!(
            dominant_service_rates(&prof, DominantSystem::First, 0.5),
            Err(Error::InfeasibleRate(_))
        ));
        let second = dominant_service_rates(&prof, DominantSystem::Second, 0.15).unwrap();
        assert_eq!(second.mu1, 0.3);
        assert!((second.empty_prob - 0.5).abs() < 1e-15);
        assert!((second.mu2 - (0.8 - 0.3 / 0.3 * 0.15)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_region_example() {
        let params = SystemParams::symmetric(0.5, 1.0, 2.0, 0.5, 1.5)
            .with_decoding(crate::Decoding::SuccessiveDecoding)
            .with_power_scheme(PowerScheme::QueueAdaptive);
        let r = region_adaptive(&params).unwrap();
        let c = r.corner();
        assert!((c.lambda1 - 0.36787944117144233).abs() < 1e-12);
        assert!((c.lambda2 - 0.6703200460356393).abs() < 1e-12);
        assert!(region_adaptive(&params.with_power_scheme(PowerScheme::Fixed)).is_err());
    }

    #[test]
    fn adaptive_with_all_power_on_queue1() {
        let params = SystemParams::symmetric(0.5, 1.0, 2.0, 2.0, 0.0)
            .with_decoding(crate::Decoding::SuccessiveDecoding)
            .with_power_scheme(PowerScheme::QueueAdaptive);
        let r = region_adaptive(&params).unwrap();
        assert_eq!(r.profile.p2_both, 0.0);
        assert_eq!(r.profile.p1_both, 0.0);
        // no simultaneous service: only the two axes survive
        assert_eq!(r.membership(RatePoint::new(0.5, 0.0)).unwrap(), Membership::Boundary);
        assert_eq!(r.membership(RatePoint::new(0.1, 0.1)).unwrap(), Membership::Outside);

        let fixed = region_general(
            &channel::build_profile(&params.with_power_scheme(PowerScheme::Fixed)).unwrap(),
        )
        .unwrap();
        assert_eq!(fixed.profile.p2_solo, 0.0);
        assert!((fixed.lambda1_max() - fixed.profile.p1_solo).abs() < 1e-15);
        assert_eq!(fixed.sup_lambda2(0.0), Some(0.0));
    }

    fn valid_profile() -> impl Strategy<Value = SuccessProfile> {
        (0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0).prop_map(|(s1, s2, f1, f2)| {
            SuccessProfile::new(s1, s2, s1 * f1, s2 * f2).unwrap()
        })
    }

    proptest! {
        #[test]
        fn corner_on_both_lines(prof in valid_profile()) {
            let r = region_general(&prof).unwrap();
            for part in &r.parts {
                prop_assert!((part.line_value(r.corner()) - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn axis_intercepts(prof in valid_profile()) {
            let r = region_general(&prof).unwrap();
            prop_assert!((r.lambda1_max() - prof.p1_solo).abs() < 1e-12);
            prop_assert!((r.sup_lambda2(0.0).unwrap() - prof.p2_solo).abs() < 1e-12);
            prop_assert!((r.boundary_point(0.0).lambda1 - prof.p1_solo).abs() < 1e-12);
            prop_assert!((r.boundary_point(90.0).lambda2 - prof.p2_solo).abs() < 1e-12);
        }

        #[test]
        fn traced_boundary_is_monotone(prof in valid_profile(), n in 2usize..60) {
            let pts = region_general(&prof).unwrap().trace_boundary(n).unwrap();
            for w in pts.windows(2) {
                prop_assert!(w[1].lambda1 >= w[0].lambda1);
                prop_assert!(w[1].lambda2 <= w[0].lambda2 + 1e-12, "{:?}", pts);
            }
        }

        #[test]
        fn boundary_points_classify_as_boundary(prof in valid_profile(), angle in 1.0f64..89.0) {
            let r = region_general(&prof).unwrap();
            let b = r.boundary_point(angle);
            prop_assert_eq!(r.membership(b).unwrap(), Membership::Boundary);
            prop_assert_eq!(r.membership(b.scaled(0.99)).unwrap(), Membership::Inside);
            prop_assert_eq!(r.membership(b.scaled(1.01)).unwrap(), Membership::Outside);
        }

        #[test]
        fn dominant_rates_meet_region_boundary(prof in valid_profile(), frac in 0.0f64..0.999) {
            // lambda1 = mu1(lambda2) lies on R1's line
            let l2 = frac * prof.p2_both;
            let rates = dominant_service_rates(&prof, DominantSystem::First, l2).unwrap();
            let r = region_general(&prof).unwrap();
            prop_assert!((r.parts[0].line_value(RatePoint::new(rates.mu1, l2)) - 1.0).abs() < 1e-9);
        }
    }
}
