//! Power-law path loss and Rayleigh fading.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{domain, Error, Result};

/// Propagation parameters shared by every link of a scenario. Powers are
/// linear, never dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    alpha: f64,
    r0: f64,
    noise: f64,
    tx_power: f64,
}

impl ChannelParams {
    pub fn new(alpha: f64, r0: f64, noise: f64, tx_power: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(domain(format!("alpha must exceed 2, got {alpha}")));
        }
        if !(r0.is_finite() && r0 >= 0.0) {
            return Err(domain(format!("r0 must be >= 0, got {r0}")));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(domain(format!("noise must be >= 0, got {noise}")));
        }
        if !(tx_power.is_finite() && tx_power > 0.0) {
            return Err(domain(format!("tx_power must be > 0, got {tx_power}")));
        }
        Ok(ChannelParams { alpha, r0, noise, tx_power })
    }

    /// Interference-limited defaults: `r0 = 0`, `N0 = 0`, unit power.
    pub fn interference_limited(alpha: f64) -> Result<Self> {
        ChannelParams::new(alpha, 0.0, 0.0, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn noise(&self) -> f64 {
        self.noise
    }
    /// Power of the desired transmitter(s).
    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        ChannelParams::new(alpha, self.r0, self.noise, self.tx_power)
    }
    pub fn with_r0(self, r0: f64) -> Result<Self> {
        ChannelParams::new(self.alpha, r0, self.noise, self.tx_power)
    }
    pub fn with_noise(self, noise: f64) -> Result<Self> {
        ChannelParams::new(self.alpha, self.r0, noise, self.tx_power)
    }
    pub fn with_tx_power(self, tx_power: f64) -> Result<Self> {
        ChannelParams::new(self.alpha, self.r0, self.noise, tx_power)
    }
}

/// `max(distance, r0)^(-alpha)`.
pub fn path_loss(distance: f64, params: &ChannelParams) -> Result<f64> {
    if !(distance >= 0.0) {
        return Err(domain(format!("distance must be >= 0, got {distance}")));
    }
    let r = distance.max(params.r0);
    if r == 0.0 {
        return Err(Error::SingularGeometry("zero distance with no near-field cutoff".into()));
    }
    Ok(r.powf(-params.alpha))
}

/// Path loss from a squared distance: `max(d^2, r0^2)^(-alpha / 2)`.
pub fn path_loss_sq(distance2: f64, params: &ChannelParams) -> Result<f64> {
    if !(distance2 >= 0.0) {
        return Err(domain(format!("squared distance must be >= 0, got {distance2}")));
    }
    let r2 = distance2.max(params.r0 * params.r0);
    if r2 == 0.0 {
        return Err(Error::SingularGeometry("zero distance with no near-field cutoff".into()));
    }
    Ok(r2.powf(-0.5 * params.alpha))
}

/// Unit-mean exponential power gain of a Rayleigh-faded link.
pub fn draw_rayleigh_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}
