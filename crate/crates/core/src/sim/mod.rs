//! Slot-level simulator of the two queues sharing one broadcast
//! transmitter.
//!
//! Each slot, in order:
//!
//! 1. Bernoulli arrivals are drawn for both queues.
//! 2. The transmission set is every non-empty queue, plus the dummy queue of
//!    a dominant system.
//! 3. Fading gains `|h_1|^2, |h_2|^2 ~ Exp(1)` are drawn.
//! 4. Decoding is evaluated for the active scheme (solo or superposed).
//! 5. Decoded real packets leave; failed ones stay for retransmission.
//! 6. The slot's arrivals join their queues, so they cannot leave before
//!    the next slot.
//!
//! All four random numbers are drawn every slot regardless of state, so two
//! runs with the same seed see identical arrivals and fading even when
//! their queues differ (common random numbers).

mod boundary;
mod classify;

pub use boundary::{estimate_boundary, estimate_boundary_with, BoundaryEstimate, BoundarySearch};
pub use classify::{
    classify_trajectory, TrajectoryStats, Verdict, MIN_CLASSIFY_HORIZON, SLOPE_THRESHOLD,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{FadingDraw, SystemParams, TxSet, User};
use crate::error::{Error, Result};
use crate::region::RatePoint;
use crate::rng::{stream_rng, SimRng};

pub const DEFAULT_HORIZON: u64 = 200_000;

/// Which queue, if any, sends dummy packets while empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DominantMode {
    #[default]
    None,
    Queue1Dummy,
    Queue2Dummy,
}

impl DominantMode {
    fn dummy(self, user: User) -> bool {
        matches!(
            (self, user),
            (DominantMode::Queue1Dummy, User::One) | (DominantMode::Queue2Dummy, User::Two)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Per-slot Bernoulli arrival probabilities.
    pub arrivals: RatePoint,
    pub horizon: u64,
    /// Leading slots excluded from the statistics (not from conservation).
    pub warmup: u64,
    pub seed: u64,
    pub dominant_mode: DominantMode,
    pub params: SystemParams,
}

impl SimConfig {
    /// Default horizon with a tenth of it as warmup, no dummy packets.
    pub fn new(params: SystemParams, arrivals: RatePoint, seed: u64) -> Self {
        SimConfig {
            arrivals,
            horizon: DEFAULT_HORIZON,
            warmup: DEFAULT_HORIZON / 10,
            seed,
            dominant_mode: DominantMode::None,
            params,
        }
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self.warmup = horizon / 10;
        self
    }

    pub fn with_mode(mut self, mode: DominantMode) -> Self {
        self.dominant_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.arrivals.validate()?;
        for user in User::BOTH {
            if self.arrivals.get(user) > 1.0 {
                return Err(Error::param(format!(
                    "lambda{} = {} exceeds one packet per slot",
                    user.index() + 1,
                    self.arrivals.get(user)
                )));
            }
        }
        if self.warmup >= self.horizon {
            return Err(Error::param(format!(
                "warmup ({}) must be shorter than the horizon ({})",
                self.warmup, self.horizon
            )));
        }
        Ok(())
    }
}

/// Random inputs of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDraws {
    pub arrival_u: [f64; 2],
    pub fading: FadingDraw,
}

impl SlotDraws {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let arrival_u = [rng.random::<f64>(), rng.random::<f64>()];
        SlotDraws {
            arrival_u,
            fading: FadingDraw::sample(rng),
        }
    }
}

/// What happened in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotEvent {
    pub tx: TxSet,
    /// Queue was in the transmission set only because of a dummy packet.
    pub dummy: [bool; 2],
    pub arrivals: [bool; 2],
    /// Receiver decoded whatever was sent to it, dummy or real.
    pub decoded: [bool; 2],
    /// A real packet left the queue.
    pub departures: [bool; 2],
}

/// One slot of the queue dynamics; a pure function of its inputs.
pub fn step(
    params: &SystemParams,
    mode: DominantMode,
    arrivals: RatePoint,
    queues: [u64; 2],
    draws: &SlotDraws,
) -> ([u64; 2], SlotEvent) {
    let arrived = [
        draws.arrival_u[0] < arrivals.lambda1,
        draws.arrival_u[1] < arrivals.lambda2,
    ];
    let mut active = [false; 2];
    let mut dummy = [false; 2];
    for user in User::BOTH {
        let k = user.index();
        if queues[k] > 0 {
            active[k] = true;
        } else if mode.dummy(user) {
            active[k] = true;
            dummy[k] = true;
        }
    }
    let tx = match active {
        [true, true] => TxSet::Both,
        [true, false] => TxSet::Only(User::One),
        [false, true] => TxSet::Only(User::Two),
        [false, false] => TxSet::Silent,
    };
    let decoded = params.decode(tx, draws.fading);
    let mut next = queues;
    let mut departures = [false; 2];
    for k in 0..2 {
        if decoded[k] && !dummy[k] && queues[k] > 0 {
            next[k] -= 1;
            departures[k] = true;
        }
        next[k] += u64::from(arrived[k]);
    }
    (
        next,
        SlotEvent {
            tx,
            dummy,
            arrivals: arrived,
            decoded,
            departures,
        },
    )
}

/// Stateful driver around [`step`] with its own seeded generator.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: SimConfig,
    rng: SimRng,
    queues: [u64; 2],
    slot: u64,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        Ok(Simulator {
            config,
            rng: stream_rng(config.seed, 0),
            queues: [0, 0],
            slot: 0,
        })
    }

    pub fn queues(&self) -> [u64; 2] {
        self.queues
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn step(&mut self) -> SlotEvent {
        let draws = SlotDraws::sample(&mut self.rng);
        let (next, event) = step(
            &self.config.params,
            self.config.dominant_mode,
            self.config.arrivals,
            self.queues,
            &draws,
        );
        self.queues = next;
        self.slot += 1;
        event
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Time-average queue length over measured slots.
    pub mean_queue: [f64; 2],
    /// Queue lengths after the last slot.
    pub final_queue: [u64; 2],
    /// Decoded fraction of slots in which the queue transmitted (dummy
    /// transmissions included).
    pub success_fraction: [f64; 2],
    /// Real departures per measured slot.
    pub departure_rate: [f64; 2],
    /// Fraction of measured slots starting with the queue empty.
    pub empty_fraction: [f64; 2],
    /// Least-squares drift of the queue length, packets per slot.
    pub drift_slope: [f64; 2],
    pub verdict: [Verdict; 2],
    /// Whole-horizon totals, starting from empty queues.
    pub arrivals_total: [u64; 2],
    pub departures_total: [u64; 2],
    pub slots_measured: u64,
}

impl SimResult {
    pub fn system_verdict(&self) -> Verdict {
        Verdict::combine(&self.verdict)
    }
}

/// Run a full simulation from empty queues.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    let mut sim = Simulator::new(*config)?;
    let measured = config.horizon - config.warmup;
    let mut stats = [TrajectoryStats::new(measured), TrajectoryStats::new(measured)];
    let mut attempts = [0u64; 2];
    let mut decoded = [0u64; 2];
    let mut measured_departures = [0u64; 2];
    let mut arrivals_total = [0u64; 2];
    let mut departures_total = [0u64; 2];

    for t in 0..config.horizon {
        let start = sim.queues();
        let ev = sim.step();
        let in_window = t >= config.warmup;
        for k in 0..2 {
            arrivals_total[k] += u64::from(ev.arrivals[k]);
            departures_total[k] += u64::from(ev.departures[k]);
            if in_window {
                stats[k].push(start[k]);
                let sent = match ev.tx {
                    TxSet::Both => true,
                    TxSet::Only(u) => u.index() == k,
                    TxSet::Silent => false,
                };
                attempts[k] += u64::from(sent);
                decoded[k] += u64::from(sent && ev.decoded[k]);
                measured_departures[k] += u64::from(ev.departures[k]);
            }
        }
    }

    let m = measured as f64;
    let verdict = if config.horizon < MIN_CLASSIFY_HORIZON {
        [Verdict::Inconclusive; 2]
    } else {
        [stats[0].classify(), stats[1].classify()]
    };
    Ok(SimResult {
        mean_queue: [stats[0].mean(), stats[1].mean()],
        final_queue: sim.queues(),
        success_fraction: std::array::from_fn(|k| {
            if attempts[k] == 0 {
                0.0
            } else {
                decoded[k] as f64 / attempts[k] as f64
            }
        }),
        departure_rate: measured_departures.map(|d| d as f64 / m),
        empty_fraction: [stats[0].empty_fraction(), stats[1].empty_fraction()],
        drift_slope: [stats[0].slope(), stats[1].slope()],
        verdict,
        arrivals_total,
        departures_total,
        slots_measured: measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Decoding, PowerScheme, SuccessProfile};

    fn generic_example() -> SystemParams {
        SystemParams::generic(SuccessProfile::new(0.9, 0.8, 0.3, 0.5).unwrap())
    }

    fn draws(u: [f64; 2], g1: f64, g2: f64) -> SlotDraws {
        SlotDraws {
            arrival_u: u,
            fading: FadingDraw { g1, g2 },
        }
    }

    #[test]
    fn idle_system_stays_silent() {
        let p = generic_example();
        let (q, ev) = step(&p, DominantMode::None, RatePoint::new(0.0, 0.0), [0, 0], &draws([0.5, 0.5], 1.0, 1.0));
        assert_eq!(q, [0, 0]);
        assert_eq!(ev.tx, TxSet::Silent);
        assert_eq!(ev.decoded, [false, false]);
    }

    #[test]
    fn lone_packet_departs_on_success() {
        let p = SystemParams::symmetric(0.5, 1.0, 2.0, 1.0, 1.0);
        // g = 5 clears the SNR threshold with P1 = 1
        let (q, ev) = step(&p, DominantMode::None, RatePoint::new(0.0, 0.0), [1, 0], &draws([0.9, 0.9], 5.0, 0.0));
        assert_eq!(q, [0, 0]);
        assert_eq!(ev.tx, TxSet::Only(User::One));
        assert_eq!(ev.departures, [true, false]);
        // deep fade: retransmit next slot
        let (q, ev) = step(&p, DominantMode::None, RatePoint::new(0.0, 0.0), [1, 0], &draws([0.9, 0.9], 0.01, 0.0));
        assert_eq!(q, [1, 0]);
        assert_eq!(ev.departures, [false, false]);
    }

    #[test]
    fn arrivals_join_after_transmission() {
        let p = generic_example();
        let (q, ev) = step(&p, DominantMode::None, RatePoint::new(1.0, 0.0), [0, 0], &draws([0.0, 0.0], 50.0, 50.0));
        assert_eq!(ev.tx, TxSet::Silent);
        assert_eq!(q, [1, 0]);
    }

    #[test]
    fn dummy_packet_interferes_but_never_departs() {
        let p = generic_example();
        let (q, ev) = step(&p, DominantMode::Queue1Dummy, RatePoint::new(0.0, 0.0), [0, 1], &draws([0.9, 0.9], 50.0, 50.0));
        assert_eq!(ev.tx, TxSet::Both);
        assert_eq!(ev.dummy, [true, false]);
        assert!(ev.decoded[0]);
        assert_eq!(ev.departures, [false, true]);
        assert_eq!(q, [0, 0]);
    }

    #[test]
    fn adaptive_power_uses_full_budget_when_alone() {
        let p = SystemParams::symmetric(0.5, 1.0, 2.0, 0.5, 1.5)
            .with_decoding(Decoding::SuccessiveDecoding)
            .with_power_scheme(PowerScheme::QueueAdaptive);
        // g = 0.3: 0.3 * 2 >= 0.5 but 0.3 * 0.5 < 0.5
        let d = draws([0.9, 0.9], 0.3, 0.0);
        let (_, ev) = step(&p, DominantMode::None, RatePoint::new(0.0, 0.0), [1, 0], &d);
        assert!(ev.decoded[0]);
        let fixed = p.with_power_scheme(PowerScheme::Fixed);
        let (_, ev) = step(&fixed, DominantMode::None, RatePoint::new(0.0, 0.0), [1, 0], &d);
        assert!(!ev.decoded[0]);
    }

    #[test]
    fn zero_load_is_stable_and_empty() {
        let res = run(&SimConfig::new(generic_example(), RatePoint::new(0.0, 0.0), 1)).unwrap();
        assert_eq!(res.verdict, [Verdict::Stable; 2]);
        assert_eq!(res.mean_queue, [0.0, 0.0]);
        assert_eq!(res.empty_fraction, [1.0, 1.0]);
    }

    #[test]
    fn run_is_deterministic_and_conserves_packets() {
        let cfg = SimConfig::new(generic_example(), RatePoint::new(0.35, 0.3), 17).with_horizon(30_000);
        let a = run(&cfg).unwrap();
        assert_eq!(a, run(&cfg).unwrap());
        for k in 0..2 {
            assert_eq!(a.arrivals_total[k], a.departures_total[k] + a.final_queue[k]);
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = SimConfig::new(generic_example(), RatePoint::new(1.2, 0.0), 1);
        assert!(run(&cfg).is_err());
        cfg.arrivals = RatePoint::new(0.1, 0.1);
        cfg.warmup = cfg.horizon;
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn short_runs_are_not_classified() {
        let cfg = SimConfig::new(generic_example(), RatePoint::new(0.0, 0.0), 1).with_horizon(5_000);
        assert_eq!(run(&cfg).unwrap().verdict, [Verdict::Inconclusive; 2]);
    }

    #[test]
    fn dominant_queue_two_empty_fraction() {
        // first dominant system: P(Q2 = 0) = 1 - 0.25 / 0.5
        let cfg = SimConfig::new(generic_example(), RatePoint::new(0.4, 0.25), 2024)
            .with_mode(DominantMode::Queue1Dummy);
        let res = run(&cfg).unwrap();
        assert!((res.empty_fraction[1] - 0.5).abs() / 0.5 < 0.02, "{res:?}");
        assert!((res.departure_rate[1] - 0.25).abs() / 0.25 < 0.02, "{res:?}");
    }
}
