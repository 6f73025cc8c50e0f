//! Physical layer: thresholds, distances, power split, and the resulting
//! per-slot decoding probabilities.
//!
//! Fading is Rayleigh block fading, so each receiver's channel power gain
//! `|h_i|^2` is an independent `Exp(1)` draw per slot. A receiver decodes
//! its packet when its SNR (single message on air) or SINR / successive
//! decoding condition (superposed message) meets its threshold. The closed
//! forms below integrate those conditions against the exponential law;
//! [`SystemParams::decode`] evaluates the same conditions on a concrete
//! draw, which is what the simulator and [`mc_estimate_profile`] use.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::batch;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Relative tolerance on `p1 + p2 == p_total`.
pub const POWER_SPLIT_RTOL: f64 = 1e-12;

/// Slack allowed on `p_both <= p_solo`.
pub const PROFILE_ORDER_TOL: f64 = 1e-12;

/// Receiver (and queue) index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }
}

/// The four decoding probabilities that fully determine the stability
/// region. `*_solo` is the probability receiver `i` decodes when only queue
/// `i` is non-empty; `*_both` when both queues are non-empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessProfile {
    pub p1_solo: f64,
    pub p2_solo: f64,
    pub p1_both: f64,
    pub p2_both: f64,
}

impl SuccessProfile {
    pub const ENTRY_NAMES: [&'static str; 4] = ["p1_solo", "p2_solo", "p1_both", "p2_both"];

    pub fn new(p1_solo: f64, p2_solo: f64, p1_both: f64, p2_both: f64) -> Result<Self> {
        let profile = SuccessProfile {
            p1_solo,
            p2_solo,
            p1_both,
            p2_both,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in Self::ENTRY_NAMES.iter().zip(self.to_array()) {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidProfile(format!("{name} = {v} is not in [0, 1]")));
            }
        }
        for user in User::BOTH {
            if self.both(user) > self.solo(user) + PROFILE_ORDER_TOL {
                return Err(Error::InvalidProfile(format!(
                    "user {}: probability with both queues active ({}) exceeds the solo probability ({})",
                    user.index() + 1,
                    self.both(user),
                    self.solo(user)
                )));
            }
        }
        Ok(())
    }

    pub fn solo(&self, user: User) -> f64 {
        match user {
            User::One => self.p1_solo,
            User::Two => self.p2_solo,
        }
    }

    pub fn both(&self, user: User) -> f64 {
        match user {
            User::One => self.p1_both,
            User::Two => self.p2_both,
        }
    }

    /// Entries in the order of [`Self::ENTRY_NAMES`].
    pub fn to_array(&self) -> [f64; 4] {
        [self.p1_solo, self.p2_solo, self.p1_both, self.p2_both]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        SuccessProfile {
            p1_solo: v[0],
            p2_solo: v[1],
            p1_both: v[2],
            p2_both: v[3],
        }
    }

    /// True when every entry of `self` is at least the matching entry of `other`.
    pub fn dominates(&self, other: &SuccessProfile) -> bool {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .all(|(a, b)| *a >= b)
    }
}

/// How receivers handle a superposed (two-message) packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Decoding {
    /// No physical model: the supplied probabilities are used verbatim.
    Generic(SuccessProfile),
    /// Each receiver decodes its own layer, treating the other as noise.
    InterferenceAsNoise,
    /// Receiver 1 decodes receiver 2's layer first, cancels it, then
    /// decodes its own; receiver 2 treats receiver 1's layer as noise.
    SuccessiveDecoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerScheme {
    /// Queue `i` is always sent with power `p_i`.
    Fixed,
    /// A lone non-empty queue gets the whole budget `p_total`.
    QueueAdaptive,
}

/// Non-fatal validation findings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Warning {
    /// Successive decoding assumes receiver 1 is the stronger one.
    SuccessiveDecoderFarther { d1: f64, d2: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::SuccessiveDecoderFarther { d1, d2 } => write!(
                f,
                "successive decoding at receiver 1 but d1 = {d1} > d2 = {d2}; receiver 1 is expected to be the stronger one"
            ),
        }
    }
}

/// Which queues hold a packet at the start of a slot (dummy packets count).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxSet {
    Silent,
    Only(User),
    Both,
}

/// Channel power gains `|h_1|^2`, `|h_2|^2` for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingDraw {
    pub g1: f64,
    pub g2: f64,
}

impl FadingDraw {
    /// Independent `Exp(1)` gains.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        FadingDraw {
            g1: rng.sample(Exp1),
            g2: rng.sample(Exp1),
        }
    }

    pub fn gain(&self, user: User) -> f64 {
        match user {
            User::One => self.g1,
            User::Two => self.g2,
        }
    }
}

/// Physical and protocol constants. Thresholds are linear scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub d1: f64,
    pub d2: f64,
    pub alpha: f64,
    pub p_total: f64,
    pub p1: f64,
    pub p2: f64,
    pub decoding: Decoding,
    pub power_scheme: PowerScheme,
}

impl SystemParams {
    /// Fixed-power interference-as-noise system; `p_total = p1 + p2`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(gamma1: f64, gamma2: f64, d1: f64, d2: f64, alpha: f64, p1: f64, p2: f64) -> Self {
        SystemParams {
            gamma1,
            gamma2,
            d1,
            d2,
            alpha,
            p_total: p1 + p2,
            p1,
            p2,
            decoding: Decoding::InterferenceAsNoise,
            power_scheme: PowerScheme::Fixed,
        }
    }

    /// Same threshold and distance for both receivers.
    pub fn symmetric(gamma: f64, d: f64, alpha: f64, p1: f64, p2: f64) -> Self {
        Self::new(gamma, gamma, d, d, alpha, p1, p2)
    }

    /// Generic system: only the profile matters; the physical fields keep
    /// harmless defaults.
    pub fn generic(profile: SuccessProfile) -> Self {
        Self::symmetric(1.0, 1.0, 2.0, 1.0, 1.0).with_decoding(Decoding::Generic(profile))
    }

    pub fn with_decoding(mut self, decoding: Decoding) -> Self {
        self.decoding = decoding;
        self
    }

    pub fn with_power_scheme(mut self, scheme: PowerScheme) -> Self {
        self.power_scheme = scheme;
        self
    }

    pub fn gamma(&self, user: User) -> f64 {
        match user {
            User::One => self.gamma1,
            User::Two => self.gamma2,
        }
    }

    pub fn distance(&self, user: User) -> f64 {
        match user {
            User::One => self.d1,
            User::Two => self.d2,
        }
    }

    /// Power assigned to queue `user` in a superposed packet.
    pub fn power(&self, user: User) -> f64 {
        match user {
            User::One => self.p1,
            User::Two => self.p2,
        }
    }

    /// Power used when `user`'s queue is the only non-empty one.
    pub fn solo_power(&self, user: User) -> f64 {
        match self.power_scheme {
            PowerScheme::Fixed => self.power(user),
            PowerScheme::QueueAdaptive => self.p_total,
        }
    }

    /// `d^alpha` for `user`.
    pub fn path_loss(&self, user: User) -> f64 {
        self.distance(user).powf(self.alpha)
    }

    /// Full validation, including strictly positive thresholds.
    pub fn validate(&self) -> Result<Vec<Warning>> {
        self.check_physical()?;
        for (name, v) in [("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if v <= 0.0 {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        if let Decoding::Generic(profile) = &self.decoding {
            profile.validate()?;
        }
        let mut warnings = Vec::new();
        if self.decoding == Decoding::SuccessiveDecoding && self.d1 > self.d2 {
            warnings.push(Warning::SuccessiveDecoderFarther {
                d1: self.d1,
                d2: self.d2,
            });
        }
        Ok(warnings)
    }

    // Enough structure for the closed forms to be meaningful; thresholds
    // may be zero here.
    fn check_physical(&self) -> Result<()> {
        let finite = [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("d1", self.d1),
            ("d2", self.d2),
            ("alpha", self.alpha),
            ("p_total", self.p_total),
            ("p1", self.p1),
            ("p2", self.p2),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [("gamma1", self.gamma1), ("gamma2", self.gamma2), ("p1", self.p1), ("p2", self.p2)] {
            if v < 0.0 {
                return Err(Error::param(format!("{name} must be nonnegative, got {v}")));
            }
        }
        for (name, v) in [("d1", self.d1), ("d2", self.d2), ("alpha", self.alpha), ("p_total", self.p_total)] {
            if v <= 0.0 {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        if ((self.p1 + self.p2) - self.p_total).abs() > POWER_SPLIT_RTOL * self.p_total {
            return Err(Error::param(format!(
                "p1 + p2 = {} does not match p_total = {}",
                self.p1 + self.p2,
                self.p_total
            )));
        }
        Ok(())
    }

    /// Single-message SNR condition: `g * power / d^alpha >= gamma`.
    pub fn snr_event(&self, user: User, power: f64, gain: f64) -> bool {
        gain * power / self.path_loss(user) >= self.gamma(user)
    }

    /// Superposed packet, the other layer treated as noise:
    /// `P_i s / (1 + P_j s) >= gamma_i` with `s = g d^-alpha`.
    pub fn sinr_event(&self, user: User, gain: f64) -> bool {
        let s = gain / self.path_loss(user);
        let signal = self.power(user) * s;
        let interference = self.power(user.other()) * s;
        signal / (1.0 + interference) >= self.gamma(user)
    }

    /// Successive decoding at receiver 1: receiver 2's layer must be
    /// decodable under receiver 1's own layer, then receiver 1's layer
    /// alone must clear its threshold.
    pub fn successive_event(&self, gain: f64) -> bool {
        let s = gain / self.path_loss(User::One);
        let first = self.p2 * s / (1.0 + self.p1 * s) >= self.gamma2;
        let second = self.p1 * s >= self.gamma1;
        first && second
    }

    /// Which active queues are decoded in a slot with transmission set `tx`
    /// and fading `draw`.
    ///
    /// For a generic profile the gain is mapped to a uniform variate
    /// `u = exp(-g)` and the receiver decodes when `u <= p`, so generic runs
    /// consume the same random stream as the physical schemes.
    pub fn decode(&self, tx: TxSet, draw: FadingDraw) -> [bool; 2] {
        let mut ok = [false; 2];
        match tx {
            TxSet::Silent => {}
            TxSet::Only(user) => {
                let gain = draw.gain(user);
                ok[user.index()] = match &self.decoding {
                    Decoding::Generic(p) => (-gain).exp() <= p.solo(user),
                    _ => self.snr_event(user, self.solo_power(user), gain),
                };
            }
            TxSet::Both => match &self.decoding {
                Decoding::Generic(p) => {
                    ok[0] = (-draw.g1).exp() <= p.p1_both;
                    ok[1] = (-draw.g2).exp() <= p.p2_both;
                }
                Decoding::InterferenceAsNoise => {
                    ok[0] = self.sinr_event(User::One, draw.g1);
                    ok[1] = self.sinr_event(User::Two, draw.g2);
                }
                Decoding::SuccessiveDecoding => {
                    ok[0] = self.successive_event(draw.g1);
                    ok[1] = self.sinr_event(User::Two, draw.g2);
                }
            },
        }
        ok
    }
}

/// Probability receiver `user` decodes a lone packet sent with `power`:
/// `exp(-gamma d^alpha / power)`.
pub fn solo_success(params: &SystemParams, user: User, power: f64) -> Result<f64> {
    params.check_physical()?;
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::param(format!("transmit power must be positive, got {power}")));
    }
    Ok((-params.gamma(user) * params.path_loss(user) / power).exp())
}

/// Probability receiver `user` decodes its layer of a superposed packet
/// while treating the other layer as noise. Zero unless
/// `P_i > gamma_i P_j` (strictly).
pub fn ian_both_success(params: &SystemParams, user: User) -> Result<f64> {
    params.check_physical()?;
    let margin = params.power(user) - params.gamma(user) * params.power(user.other());
    if margin <= 0.0 {
        return Ok(0.0);
    }
    Ok((-params.gamma(user) * params.path_loss(user) / margin).exp())
}

/// Probability receiver 1 completes successive decoding of a superposed
/// packet.
///
/// With `lo = gamma2 P1` and `hi = P1 gamma2 (1 + gamma1) / gamma1`:
/// zero for `P2 <= lo`, `exp(-gamma2 d1^alpha / (P2 - gamma2 P1))` for
/// `lo < P2 <= hi` (cancelling layer 2 is the bottleneck), and
/// `exp(-gamma1 d1^alpha / P1)` for `P2 > hi` (own layer is the bottleneck).
pub fn sc_both_success_user1(params: &SystemParams) -> Result<f64> {
    params.check_physical()?;
    let (g1, g2) = (params.gamma1, params.gamma2);
    if g1 <= 0.0 {
        return Err(Error::param("gamma1 must be positive for successive decoding"));
    }
    let (p1, p2) = (params.p1, params.p2);
    let lo = g2 * p1;
    let hi = p1 * g2 * (1.0 + g1) / g1;
    let loss = params.path_loss(User::One);
    Ok(if p2 <= lo {
        0.0
    } else if p2 <= hi {
        (-g2 * loss / (p2 - lo)).exp()
    } else {
        (-g1 * loss / p1).exp()
    })
}

/// Lone-packet probability when the full budget `p_total` is used.
pub fn adaptive_solo_success(params: &SystemParams, user: User) -> Result<f64> {
    solo_success(params, user, params.p_total)
}

fn solo_or_zero(params: &SystemParams, user: User, power: f64) -> Result<f64> {
    if power == 0.0 {
        Ok(0.0)
    } else {
        solo_success(params, user, power)
    }
}

/// All four decoding probabilities for `params`.
pub fn build_profile(params: &SystemParams) -> Result<SuccessProfile> {
    params.validate()?;
    let both = match params.decoding {
        Decoding::Generic(profile) => return Ok(profile),
        Decoding::InterferenceAsNoise => [
            ian_both_success(params, User::One)?,
            ian_both_success(params, User::Two)?,
        ],
        Decoding::SuccessiveDecoding => [
            sc_both_success_user1(params)?,
            ian_both_success(params, User::Two)?,
        ],
    };
    let solo = [
        solo_or_zero(params, User::One, params.solo_power(User::One))?,
        solo_or_zero(params, User::Two, params.solo_power(User::Two))?,
    ];
    Ok(SuccessProfile {
        p1_solo: solo[0],
        p2_solo: solo[1],
        p1_both: both[0],
        p2_both: both[1],
    })
}

/// Monte Carlo estimate of a [`SuccessProfile`] with binomial standard
/// errors, entries ordered as in [`SuccessProfile::ENTRY_NAMES`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEstimate {
    pub estimate: SuccessProfile,
    pub std_error: [f64; 4],
    pub draws: u64,
}

impl ProfileEstimate {
    /// z-statistic of each entry against the hypothesised `exact` profile,
    /// using the binomial standard error `sqrt(p (1 - p) / draws)` of the
    /// exact value. A degenerate `p` (0 or 1) gives 0 on exact agreement
    /// and infinity otherwise.
    pub fn z_scores(&self, exact: &SuccessProfile) -> [f64; 4] {
        let est = self.estimate.to_array();
        let ex = exact.to_array();
        let n = self.draws as f64;
        std::array::from_fn(|k| {
            let diff = est[k] - ex[k];
            let sigma = (ex[k] * (1.0 - ex[k]) / n).sqrt();
            if sigma > 0.0 {
                diff / sigma
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            }
        })
    }
}

const MC_CHUNK: u64 = 1 << 18;

/// Estimate the profile by drawing `draws` fading realisations and
/// evaluating the decoding conditions on each. Chunk `k` of the draws uses
/// stream `k` of `seed`, so the result does not depend on threading.
pub fn mc_estimate_profile(params: &SystemParams, draws: u64, seed: u64) -> Result<ProfileEstimate> {
    mc_estimate_with(params, draws, seed, batch::map_range)
}

/// Single-threaded [`mc_estimate_profile`]; identical output.
pub fn mc_estimate_profile_sequential(
    params: &SystemParams,
    draws: u64,
    seed: u64,
) -> Result<ProfileEstimate> {
    mc_estimate_with(params, draws, seed, batch::map_range_sequential)
}

type ChunkMap = fn(u64, &(dyn Fn(u64) -> [u64; 4] + Sync)) -> Vec<[u64; 4]>;

fn mc_estimate_with(params: &SystemParams, draws: u64, seed: u64, map: ChunkMap) -> Result<ProfileEstimate> {
    params.validate()?;
    if let Decoding::Generic(_) = params.decoding {
        return Err(Error::SchemeMismatch(
            "a generic profile has no fading model to sample".into(),
        ));
    }
    if draws == 0 {
        return Err(Error::param("at least one draw is required"));
    }
    let chunks = draws.div_ceil(MC_CHUNK);
    let count_chunk = |k: u64| -> [u64; 4] {
        let n = MC_CHUNK.min(draws - k * MC_CHUNK);
        let mut rng = stream_rng(seed, k);
        let mut hits = [0u64; 4];
        for _ in 0..n {
            let draw = FadingDraw::sample(&mut rng);
            let s1 = params.decode(TxSet::Only(User::One), draw);
            let s2 = params.decode(TxSet::Only(User::Two), draw);
            let both = params.decode(TxSet::Both, draw);
            for (h, hit) in hits.iter_mut().zip([s1[0], s2[1], both[0], both[1]]) {
                *h += u64::from(hit);
            }
        }
        hits
    };
    let totals = map(chunks, &count_chunk)
        .into_iter()
        .fold([0u64; 4], |mut acc, h| {
            for (a, b) in acc.iter_mut().zip(h) {
                *a += b;
            }
            acc
        });
    let n = draws as f64;
    let p = totals.map(|h| h as f64 / n);
    Ok(ProfileEstimate {
        estimate: SuccessProfile::from_array(p),
        std_error: p.map(|q| (q * (1.0 - q) / n).sqrt()),
        draws,
    })
}
