//! Shot-noise interference, SIR, random access and the fading-averaged
//! success probability of a link given a fixed interferer pattern.
//!
//! With Rayleigh fading on every link and independent Bernoulli activity per
//! interferer, the success probability conditioned on the interferer
//! locations has the product form
//!
//! ```text
//! p_s = exp(-theta N0 / (P l(d))) * prod_x [1 - p + p / (1 + theta (P_x / P) l(|x - rx|) / l(d))]
//! ```
//!
//! where `l` is the clamped path-loss law. Several links observed in the
//! same slot see the same active set, so their joint success probability
//! multiplies the per-link factors inside the bracket instead of outside.

use rand::Rng;

use crate::channel::{path_loss, path_loss_sq, ChannelParams};
use crate::error::{domain, Error, Result};
use crate::point_process::{Point, PointPattern};

/// Random-access scheme run by the interferers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MacSpec {
    AlwaysOn,
    Aloha { p: f64 },
    Fhma { sub_bands: u32 },
}

impl MacSpec {
    pub fn aloha(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("aloha_p must lie in [0, 1], got {p}")));
        }
        Ok(MacSpec::Aloha { p })
    }

    pub fn fhma(sub_bands: u32) -> Result<Self> {
        if sub_bands == 0 {
            return Err(domain("fhma_n must be >= 1"));
        }
        Ok(MacSpec::Fhma { sub_bands })
    }

    /// Probability that a given interferer is active on the receiver's band
    /// in one slot.
    pub fn activity_probability(&self) -> f64 {
        match *self {
            MacSpec::AlwaysOn => 1.0,
            MacSpec::Aloha { p } => p,
            MacSpec::Fhma { sub_bands } => 1.0 / f64::from(sub_bands),
        }
    }
}

/// How interferer positions are reused within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionSharing {
    /// One pattern for every antenna, slot and receiver.
    Shared,
    /// A new pattern for every antenna, slot and receiver.
    Fresh,
}

/// How MAC activity marks are reused within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacSharing {
    /// One activity draw for the whole replication (static access pattern).
    Shared,
    /// Shared by every receiver in a slot, redrawn each slot.
    PerSlot,
    /// Independent per receiver and per slot.
    Fresh,
}

/// Which randomness is common to the antennas, slots and receivers of one
/// replication. Fading is always fresh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationMode {
    pub positions: PositionSharing,
    pub mac_marks: MacSharing,
}

impl CorrelationMode {
    pub const CORRELATED: CorrelationMode =
        CorrelationMode { positions: PositionSharing::Shared, mac_marks: MacSharing::PerSlot };
    pub const INDEPENDENT: CorrelationMode =
        CorrelationMode { positions: PositionSharing::Fresh, mac_marks: MacSharing::Fresh };

    pub fn is_correlated(&self) -> bool {
        self.positions == PositionSharing::Shared
    }

    pub fn label(&self) -> &'static str {
        if self.is_correlated() {
            "correlated"
        } else {
            "independent"
        }
    }
}

/// Interferer locations with the transmit power of each point's tier.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pattern: PointPattern,
    powers: Vec<f64>,
}

impl Deployment {
    /// Every point transmits with `power`.
    pub fn uniform(pattern: PointPattern, power: f64) -> Result<Self> {
        let powers = vec![power; pattern.len()];
        Deployment::new(pattern, powers)
    }

    pub fn new(pattern: PointPattern, powers: Vec<f64>) -> Result<Self> {
        if powers.len() != pattern.len() {
            return Err(Error::Usage(format!(
                "{} powers for {} points",
                powers.len(),
                pattern.len()
            )));
        }
        if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(domain(format!("tier power must be > 0, got {p}")));
        }
        Ok(Deployment { pattern, powers })
    }

    pub fn pattern(&self) -> &PointPattern {
        &self.pattern
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.pattern.points().iter().zip(self.powers.iter().copied())
    }
}

/// Draws one slot's activity mask.
pub fn mac_activity<R: Rng + ?Sized>(pattern: &PointPattern, mac: &MacSpec, rng: &mut R) -> Vec<bool> {
    match *mac {
        MacSpec::AlwaysOn => vec![true; pattern.len()],
        MacSpec::Aloha { p } => (0..pattern.len()).map(|_| rng.random::<f64>() < p).collect(),
        // The receiver listens on band 0.
        MacSpec::Fhma { sub_bands } => {
            (0..pattern.len()).map(|_| rng.random_range(0..sub_bands) == 0).collect()
        }
    }
}

/// Shot-noise sum over active interferers of `P_x * fading_x * l(|x - rx|)`.
pub fn aggregate_interference(
    receiver: &Point,
    deployment: &Deployment,
    mask: &[bool],
    fading: &[f64],
    params: &ChannelParams,
) -> Result<f64> {
    if mask.len() != deployment.len() || fading.len() != deployment.len() {
        return Err(Error::Usage("mask and fading must have one entry per interferer".into()));
    }
    let mut total = 0.0;
    for (((x, power), &on), &h) in deployment.iter().zip(mask).zip(fading) {
        if on {
            total += power * h * path_loss(x.dist(receiver), params)?;
        }
    }
    Ok(total)
}

/// Received power of the desired transmitter.
pub fn signal_power(receiver: &Point, tx: &Point, tx_fading: f64, params: &ChannelParams) -> Result<f64> {
    Ok(params.tx_power() * tx_fading * path_loss(tx.dist(receiver), params)?)
}

/// `signal / (interference + noise)`. An empty denominator with a positive
/// signal yields `+inf`; `0 / 0` is an error.
pub fn sinr_from_powers(signal: f64, interference: f64, noise: f64) -> Result<f64> {
    let denom = interference + noise;
    if denom > 0.0 {
        Ok(signal / denom)
    } else if signal > 0.0 {
        Ok(f64::INFINITY)
    } else {
        Err(Error::InvalidConfiguration("SIR is 0/0".into()))
    }
}

/// SIR at `receiver`, ignoring the channel's noise floor.
pub fn sir(
    receiver: &Point,
    tx: &Point,
    tx_fading: f64,
    interference: f64,
    params: &ChannelParams,
) -> Result<f64> {
    sinr_from_powers(signal_power(receiver, tx, tx_fading, params)?, interference, 0.0)
}

/// SINR at `receiver` with the channel's noise power.
pub fn sinr(
    receiver: &Point,
    tx: &Point,
    tx_fading: f64,
    interference: f64,
    params: &ChannelParams,
) -> Result<f64> {
    sinr_from_powers(signal_power(receiver, tx, tx_fading, params)?, interference, params.noise())
}

/// A receiver and the length of its desired link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub receiver: Point,
    pub distance: f64,
}

impl Link {
    pub fn new(receiver: Point, distance: f64) -> Self {
        Link { receiver, distance }
    }

    /// Link whose receiver sits at the origin.
    pub fn at_origin(distance: f64) -> Self {
        Link { receiver: Point::ORIGIN, distance }
    }
}

/// Per-link quantities reused across interferers.
struct LinkTerm {
    receiver: Point,
    signal_loss: f64,
}

fn link_terms(links: &[Link], theta: f64, params: &ChannelParams) -> Result<(Vec<LinkTerm>, f64)> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(domain(format!("theta must be > 0, got {theta}")));
    }
    let mut log_noise = 0.0;
    let mut terms = Vec::with_capacity(links.len());
    for link in links {
        if !(link.distance >= 0.0) {
            return Err(domain(format!("link distance must be >= 0, got {}", link.distance)));
        }
        let signal_loss = path_loss(link.distance, params)?;
        log_noise -= theta * params.noise() / (params.tx_power() * signal_loss);
        terms.push(LinkTerm { receiver: link.receiver, signal_loss });
    }
    Ok((terms, log_noise))
}

/// Ratio `theta * (P_x / P) * l(|x - rx|) / l(d)` of one interferer.
#[inline]
fn interference_ratio(
    term: &LinkTerm,
    x: &Point,
    power: f64,
    theta: f64,
    params: &ChannelParams,
) -> Result<f64> {
    let loss = path_loss_sq(x.dist2(&term.receiver), params)?;
    Ok(theta * (power / params.tx_power()) * loss / term.signal_loss)
}

/// Probability that every link in `links` succeeds in one slot, averaged
/// over independent Rayleigh fading and one shared activity draw, with the
/// interferer locations held fixed.
pub fn joint_success_same_slot(
    links: &[Link],
    theta: f64,
    deployment: &Deployment,
    mac: &MacSpec,
    params: &ChannelParams,
) -> Result<f64> {
    let (terms, log_noise) = link_terms(links, theta, params)?;
    let p = mac.activity_probability();
    let mut prob = log_noise.exp();
    if p == 0.0 {
        return Ok(prob);
    }
    for (x, power) in deployment.iter() {
        let mut all_survive = 1.0;
        for term in &terms {
            all_survive /= 1.0 + interference_ratio(term, x, power, theta, params)?;
        }
        prob *= 1.0 - p + p * all_survive;
    }
    Ok(prob)
}

/// Fading- and MAC-averaged success probability of one link, given the
/// interferer pattern.
pub fn link_success(
    link: &Link,
    theta: f64,
    deployment: &Deployment,
    mac: &MacSpec,
    params: &ChannelParams,
) -> Result<f64> {
    joint_success_same_slot(std::slice::from_ref(link), theta, deployment, mac, params)
}

/// [`link_success`] for a receiver at the origin with its transmitter at
/// distance `d`.
pub fn conditional_success_rayleigh(
    d: f64,
    theta: f64,
    deployment: &Deployment,
    mac: &MacSpec,
    params: &ChannelParams,
) -> Result<f64> {
    link_success(&Link::at_origin(d), theta, deployment, mac, params)
}

/// Mean number of slots to the first success when both the interferer
/// positions and the activity marks are frozen for all slots:
/// `E_mask[1 / P(success | mask)]`. Diverges as an active interferer
/// approaches the receiver.
pub fn static_access_mean_delay(
    link: &Link,
    theta: f64,
    deployment: &Deployment,
    mac: &MacSpec,
    params: &ChannelParams,
) -> Result<f64> {
    let (terms, log_noise) = link_terms(std::slice::from_ref(link), theta, params)?;
    let p = mac.activity_probability();
    let mut delay = (-log_noise).exp();
    for (x, power) in deployment.iter() {
        let ratio = interference_ratio(&terms[0], x, power, theta, params)?;
        delay *= 1.0 - p + p * (1.0 + ratio);
    }
    Ok(delay)
}
