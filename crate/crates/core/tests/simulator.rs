use bcstab::channel::{build_profile, mc_estimate_profile};
use bcstab::region::{dominant_service_rates, region_general, DominantSystem};
use bcstab::sim::{estimate_boundary, run};
use bcstab::{
    Decoding, DominantMode, PowerScheme, RatePoint, SimConfig, Simulator, SuccessProfile,
    SystemParams, TxSet, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn general_example() -> SuccessProfile {
    SuccessProfile::new(0.9, 0.8, 0.3, 0.5).unwrap()
}

fn adaptive_sc() -> SystemParams {
    SystemParams::symmetric(0.5, 1.0, 2.0, 0.5, 1.5)
        .with_decoding(Decoding::SuccessiveDecoding)
        .with_power_scheme(PowerScheme::QueueAdaptive)
}

#[test]
fn second_dominant_system_matches_little() {
    let prof = general_example();
    let want = dominant_service_rates(&prof, DominantSystem::Second, 0.15).unwrap();
    let cfg = SimConfig::new(SystemParams::generic(prof), RatePoint::new(0.15, 0.2), 77)
        .with_mode(DominantMode::Queue2Dummy);
    let res = run(&cfg).unwrap();
    assert!((res.empty_fraction[0] - want.empty_prob).abs() / want.empty_prob < 0.02, "{res:?}");
    assert!((res.success_fraction[1] - want.mu2).abs() / want.mu2 < 0.02, "{res:?}");
}

#[test]
fn saturated_queue_is_served_at_dominant_rate() {
    // lambda1 above mu1: queue 1 never empties after warmup, so its
    // departure rate is the dominant-system service rate itself
    let prof = general_example();
    let want = dominant_service_rates(&prof, DominantSystem::First, 0.25).unwrap();
    let cfg = SimConfig::new(SystemParams::generic(prof), RatePoint::new(0.7, 0.25), 3)
        .with_mode(DominantMode::Queue1Dummy);
    let res = run(&cfg).unwrap();
    assert_eq!(res.verdict[0], Verdict::Unstable);
    assert!((res.departure_rate[0] - want.mu1).abs() / want.mu1 < 0.02, "{res:?}");
}

#[test]
fn superposed_success_frequency_matches_profile() {
    for params in [
        SystemParams::symmetric(0.5, 1.0, 2.0, 1.0, 1.0),
        adaptive_sc(),
        SystemParams::new(0.3, 0.6, 0.8, 1.2, 3.0, 0.7, 1.6).with_decoding(Decoding::SuccessiveDecoding),
    ] {
        let prof = build_profile(&params).unwrap();
        // overloaded: both queues stay backlogged
        let cfg = SimConfig::new(params, RatePoint::new(0.95, 0.95), 11);
        let mut sim = Simulator::new(cfg).unwrap();
        let (mut both_slots, mut ok) = (0u64, [0u64; 2]);
        for _ in 0..cfg.horizon {
            let ev = sim.step();
            if ev.tx == TxSet::Both {
                both_slots += 1;
                ok[0] += u64::from(ev.decoded[0]);
                ok[1] += u64::from(ev.decoded[1]);
            }
        }
        let n = both_slots as f64;
        for (k, p) in [prof.p1_both, prof.p2_both].into_iter().enumerate() {
            let sigma = (p * (1.0 - p) / n).sqrt();
            let freq = ok[k] as f64 / n;
            assert!((freq - p).abs() <= 3.0 * sigma + 1e-12, "user {k}: {freq} vs {p}");
        }
    }
}

#[test]
fn divergence_rate_beyond_corner() {
    // both queues saturate, so each drifts at lambda_i - p_i_both
    let params = adaptive_sc();
    let prof = build_profile(&params).unwrap();
    let point = RatePoint::new(prof.p1_both, prof.p2_both).scaled(1.1);
    let res = run(&SimConfig::new(params, point, 9)).unwrap();
    assert_eq!(res.system_verdict(), Verdict::Unstable);
    let predicted = [point.lambda1 - prof.p1_both, point.lambda2 - prof.p2_both];
    for k in 0..2 {
        assert!((res.drift_slope[k] - predicted[k]).abs() < 0.02, "{res:?} vs {predicted:?}");
    }
}

#[test]
fn divergence_rate_on_coupled_edge() {
    // past R1's line with lambda2 < p2_both: queue 2 stays stable, queue 1
    // drifts at lambda1 - mu1(lambda2)
    let prof = general_example();
    let params = SystemParams::generic(prof);
    let point = RatePoint::new(0.8, 0.2);
    let mu1 = dominant_service_rates(&prof, DominantSystem::First, 0.2).unwrap().mu1;
    let res = run(&SimConfig::new(params, point, 21)).unwrap();
    assert_eq!(res.verdict, [Verdict::Unstable, Verdict::Stable]);
    assert!((res.drift_slope[0] - (0.8 - mu1)).abs() < 0.02, "{res:?}");
}

#[test]
fn boundary_estimates_on_axis_and_through_corner() {
    let prof = general_example();
    let params = SystemParams::generic(prof);
    let axis = estimate_boundary(&params, 0.0, 10).unwrap();
    assert!((axis.lambda1 - prof.p1_solo).abs() < 0.02 && axis.lambda2 == 0.0, "{axis:?}");

    let corner_angle = prof.p2_both.atan2(prof.p1_both).to_degrees();
    let c = estimate_boundary(&params, corner_angle, 12).unwrap();
    assert!(
        (c.lambda1 - prof.p1_both).abs() < 0.03 && (c.lambda2 - prof.p2_both).abs() < 0.03,
        "{c:?}"
    );
}

#[test]
fn monte_carlo_converges_on_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut err_small, mut err_large) = (0.0, 0.0);
    for k in 0..24u64 {
        let total = rng.random_range(0.5..4.0);
        let p1 = total * rng.random_range(0.05..0.95);
        let mut params = SystemParams::new(
            rng.random_range(0.1..1.5),
            rng.random_range(0.1..1.5),
            rng.random_range(0.5..1.5),
            rng.random_range(0.5..1.5),
            rng.random_range(2.0..4.0),
            p1,
            total - p1,
        );
        params.p_total = total;
        if k % 2 == 1 {
            params.decoding = Decoding::SuccessiveDecoding;
        }
        if k % 4 >= 2 {
            params.power_scheme = PowerScheme::QueueAdaptive;
        }
        let exact = build_profile(&params).unwrap();
        let small = mc_estimate_profile(&params, 10_000, k).unwrap();
        let large = mc_estimate_profile(&params, 1_000_000, k).unwrap();
        for (i, (s, l)) in small.estimate.to_array().iter().zip(large.estimate.to_array()).enumerate() {
            err_small += (s - exact.to_array()[i]).abs();
            err_large += (l - exact.to_array()[i]).abs();
        }
        assert!(large.z_scores(&exact).iter().all(|z| z.abs() < 4.0), "{params:?}");
    }
    assert!(err_large < err_small, "{err_large} vs {err_small}");
}

#[test]
fn pathwise_dominance_with_physical_scheme() {
    let params = adaptive_sc();
    let base = SimConfig::new(params, RatePoint::new(0.35, 0.45), 5).with_horizon(100_000);
    for mode in [DominantMode::Queue1Dummy, DominantMode::Queue2Dummy] {
        let mut a = Simulator::new(base).unwrap();
        let mut b = Simulator::new(base.with_mode(mode)).unwrap();
        for _ in 0..base.horizon {
            a.step();
            b.step();
            let (qa, qb) = (a.queues(), b.queues());
            assert!(qb[0] >= qa[0] && qb[1] >= qa[1], "slot {}: {qa:?} vs {qb:?}", a.slot());
        }
    }
}

#[test]
fn region_interior_points_are_stable() {
    let prof = general_example();
    let region = region_general(&prof).unwrap();
    let params = SystemParams::generic(prof);
    for angle in [15.0, 45.0, 75.0] {
        let b = region.boundary_point(angle);
        let inside = run(&SimConfig::new(params, b.scaled(0.9), 1)).unwrap();
        let outside = run(&SimConfig::new(params, b.scaled(1.1), 1)).unwrap();
        assert_eq!(inside.system_verdict(), Verdict::Stable, "{angle}");
        assert_eq!(outside.system_verdict(), Verdict::Unstable, "{angle}");
    }
}
