//! Turning a finite queue trajectory into a stability verdict.
//!
//! Stability is an asymptotic property, so the classifier looks for the two
//! finite-horizon signatures of it: a queue that is not drifting upward
//! and still empties late in the run is `Stable`; a queue with a clear
//! upward drift that ends above where it started is `Unstable`. Anything
//! else is `Inconclusive`.

use serde::{Deserialize, Serialize};

/// Drift (packets/slot) separating growth from noise at the default
/// horizon of 2e5 slots.
pub const SLOPE_THRESHOLD: f64 = 1e-3;

/// Runs shorter than this are never classified.
pub const MIN_CLASSIFY_HORIZON: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl Verdict {
    /// Unstable if any queue is, stable only if every queue is.
    pub fn combine(verdicts: &[Verdict]) -> Verdict {
        if verdicts.contains(&Verdict::Unstable) {
            Verdict::Unstable
        } else if verdicts.iter().all(|v| *v == Verdict::Stable) {
            Verdict::Stable
        } else {
            Verdict::Inconclusive
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Streaming summary of a queue-length trajectory of known length.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    // planned length, fixes the time centering
    planned: u64,
    seen: u64,
    sum: f64,
    // sum of (t - t_mean) * q
    sum_centered: f64,
    empty: u64,
    decile_sum: f64,
    decile_len: u64,
    zero_in_final_half: bool,
    last: u64,
}

impl TrajectoryStats {
    pub fn new(len: u64) -> Self {
        TrajectoryStats {
            planned: len,
            seen: 0,
            sum: 0.0,
            sum_centered: 0.0,
            empty: 0,
            decile_sum: 0.0,
            decile_len: (len / 10).max(1),
            zero_in_final_half: false,
            last: 0,
        }
    }

    pub fn from_slice(trajectory: &[u64]) -> Self {
        let mut stats = TrajectoryStats::new(trajectory.len() as u64);
        for &q in trajectory {
            stats.push(q);
        }
        stats
    }

    pub fn push(&mut self, q: u64) {
        let t = self.seen;
        let qf = q as f64;
        self.sum += qf;
        self.sum_centered += (t as f64 - (self.planned as f64 - 1.0) / 2.0) * qf;
        if q == 0 {
            self.empty += 1;
            if t >= self.planned / 2 {
                self.zero_in_final_half = true;
            }
        }
        if t < self.decile_len {
            self.decile_sum += qf;
        }
        self.last = q;
        self.seen += 1;
    }

    pub fn len(&self) -> u64 {
        self.seen
    }

    pub fn is_empty(&self) -> bool {
        self.seen == 0
    }

    pub fn mean(&self) -> f64 {
        if self.seen == 0 {
            0.0
        } else {
            self.sum / self.seen as f64
        }
    }

    pub fn empty_fraction(&self) -> f64 {
        if self.seen == 0 {
            0.0
        } else {
            self.empty as f64 / self.seen as f64
        }
    }

    /// Least-squares slope of `q` against slot index.
    pub fn slope(&self) -> f64 {
        debug_assert_eq!(self.seen, self.planned, "trajectory length mismatch");
        let n = self.planned as f64;
        if self.planned < 2 {
            return 0.0;
        }
        let sxx = n * (n * n - 1.0) / 12.0;
        self.sum_centered / sxx
    }

    pub fn first_decile_mean(&self) -> f64 {
        self.decile_sum / self.decile_len.min(self.seen.max(1)) as f64
    }

    pub fn last(&self) -> u64 {
        self.last
    }

    pub fn classify(&self) -> Verdict {
        let slope = self.slope();
        if slope > SLOPE_THRESHOLD && self.last as f64 > self.first_decile_mean() {
            Verdict::Unstable
        } else if slope < SLOPE_THRESHOLD && self.zero_in_final_half {
            Verdict::Stable
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Verdict for a recorded trajectory.
pub fn classify_trajectory(trajectory: &[u64]) -> Verdict {
    TrajectoryStats::from_slice(trajectory).classify()
}
