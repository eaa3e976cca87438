//! Case-study experiments: coverage, SIMO joint occurrence, mean local
//! delay and two-slot decode-and-forward relaying.
//!
//! Receivers whose SIR is evaluated are treated as points of the
//! deployment: a hard-core tier keeps its points at least `r_min` away from
//! them (see [`ProcessSpec::sample_with_anchors`]). Replication `i` of
//! experiment `name` always draws from stream `(seed, name, i)`, so sweeps
//! over a parameter reuse the same random numbers at every sweep value.

use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::error::{domain, Error, Result};
use crate::harness::rng::{SimRng, StreamFamily};
use crate::interference::{
    joint_success_same_slot, link_success, static_access_mean_delay, CorrelationMode, Deployment, Link,
    MacSharing, MacSpec,
};
use crate::point_process::{superpose, Point, PointPattern, ProcessSpec, Window};
use crate::stats::Summary;

pub const COVERAGE: &str = "coverage";
pub const SIMO: &str = "simo";
pub const DELAY: &str = "delay";
pub const RELAY: &str = "relay";

pub const DEFAULT_DELAY_CAP: f64 = 1e6;

/// One tier of the deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tier {
    pub process: ProcessSpec,
    pub power: f64,
}

impl Tier {
    pub fn new(process: ProcessSpec, power: f64) -> Self {
        Tier { process, power }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub tiers: Vec<Tier>,
    pub window: Window,
    pub channel: ChannelParams,
    pub mac: MacSpec,
    /// SIR threshold, linear.
    pub theta: f64,
    pub link_distance: f64,
    pub reps: u64,
    pub seed: u64,
    /// Per-replication ceiling on the conditional mean local delay.
    pub delay_cap: f64,
}

impl ScenarioSpec {
    /// Interference-limited single-tier scenario on `[-half, half]^2` with
    /// unit powers, always-on interferers, `theta = 1` and `d = 1`.
    pub fn single_tier(process: ProcessSpec, alpha: f64, window_half: f64, reps: u64, seed: u64) -> Result<Self> {
        Ok(ScenarioSpec {
            tiers: vec![Tier::new(process, 1.0)],
            window: Window::centered_square(window_half)?,
            channel: ChannelParams::interference_limited(alpha)?,
            mac: MacSpec::AlwaysOn,
            theta: 1.0,
            link_distance: 1.0,
            reps,
            seed,
            delay_cap: DEFAULT_DELAY_CAP,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(domain("scenario needs at least one tier"));
        }
        for tier in &self.tiers {
            tier.process.validate()?;
            if !(tier.power.is_finite() && tier.power > 0.0) {
                return Err(domain(format!("tier power must be > 0, got {}", tier.power)));
            }
        }
        if self.reps == 0 {
            return Err(domain("reps must be >= 1"));
        }
        if !(self.link_distance.is_finite() && self.link_distance > 0.0) {
            return Err(domain(format!("d must be > 0, got {}", self.link_distance)));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(domain(format!("theta must be > 0, got {}", self.theta)));
        }
        if !self.window.contains(&Point::ORIGIN) {
            return Err(domain("window must contain the origin"));
        }
        if !(self.delay_cap >= 1.0) {
            return Err(domain(format!("delay_cap must be >= 1, got {}", self.delay_cap)));
        }
        Ok(())
    }
}

/// One experiment output row.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub experiment: String,
    pub mode: String,
    pub params: Vec<(String, f64)>,
    pub estimate: f64,
    pub std_error: f64,
    pub reps: u64,
    pub seed: u64,
    /// Fraction of replications whose delay hit the cap; zero elsewhere.
    pub capped_fraction: f64,
}

impl EstimateRecord {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// Samples every tier independently and superposes them, tagging each
/// point with its tier's power.
pub fn compose_tiers(scenario: &ScenarioSpec, rng: &mut SimRng) -> Result<Deployment> {
    compose_tiers_around(scenario, &[], rng)
}

/// [`compose_tiers`] with `anchors` treated as points of every tier.
pub fn compose_tiers_around(scenario: &ScenarioSpec, anchors: &[Point], rng: &mut SimRng) -> Result<Deployment> {
    let mut patterns: Vec<PointPattern> = Vec::with_capacity(scenario.tiers.len());
    let mut powers = Vec::new();
    for tier in &scenario.tiers {
        let pattern = tier.process.sample_with_anchors(&scenario.window, anchors, rng)?;
        powers.extend(std::iter::repeat_n(tier.power, pattern.len()));
        patterns.push(pattern);
    }
    Deployment::new(superpose(&patterns)?, powers)
}

/// Runs `per_rep` on every replication stream and returns the outputs in
/// replication order.
fn replicate<T, F>(scenario: &ScenarioSpec, label: &str, per_rep: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SimRng) -> Result<T> + Sync,
{
    scenario.validate()?;
    let family = StreamFamily::new(scenario.seed, label);
    (0..scenario.reps)
        .into_par_iter()
        .map(|i| per_rep(&mut family.stream(i)))
        .collect()
}

fn record(
    scenario: &ScenarioSpec,
    experiment: &str,
    mode: &str,
    mut params: Vec<(&str, f64)>,
    estimate: f64,
    std_error: f64,
) -> EstimateRecord {
    params.splice(
        0..0,
        [
            ("alpha", scenario.channel.alpha()),
            ("theta", scenario.theta),
            ("d", scenario.link_distance),
        ],
    );
    EstimateRecord {
        experiment: experiment.to_string(),
        mode: mode.to_string(),
        params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        estimate,
        std_error,
        reps: scenario.reps,
        seed: scenario.seed,
        capped_fraction: 0.0,
    }
}

/// `E[p_s(Phi)]` for a receiver at the origin.
pub fn coverage_probability(scenario: &ScenarioSpec) -> Result<EstimateRecord> {
    let link = Link::at_origin(scenario.link_distance);
    let values = replicate(scenario, COVERAGE, |rng| {
        let dep = compose_tiers_around(scenario, &[link.receiver], rng)?;
        link_success(&link, scenario.theta, &dep, &scenario.mac, &scenario.channel)
    })?;
    let s = Summary::of(values);
    Ok(record(scenario, COVERAGE, "na", vec![], s.mean, s.std_error))
}

/// Probability that all `antennas` co-located receive antennas decode.
///
/// Correlated positions: one pattern per replication, independent fading
/// per antenna. Independent positions: the estimate is `coverage^M`, with
/// the delta-method standard error.
pub fn simo_joint_occurrence(scenario: &ScenarioSpec, antennas: u32, mode: CorrelationMode) -> Result<EstimateRecord> {
    if antennas == 0 {
        return Err(domain("antennas must be >= 1"));
    }
    let link = Link::at_origin(scenario.link_distance);
    let m = antennas as usize;
    let values = replicate(scenario, SIMO, |rng| {
        let dep = compose_tiers_around(scenario, &[link.receiver], rng)?;
        let single = link_success(&link, scenario.theta, &dep, &scenario.mac, &scenario.channel)?;
        let joint = match mode.mac_marks {
            MacSharing::Fresh => single.powi(antennas as i32),
            MacSharing::Shared | MacSharing::PerSlot => {
                joint_success_same_slot(&vec![link; m], scenario.theta, &dep, &scenario.mac, &scenario.channel)?
            }
        };
        Ok((single, joint))
    })?;
    let params = vec![("antennas", f64::from(antennas))];
    let (estimate, se) = if mode.is_correlated() {
        let s = Summary::of(values.iter().map(|v| v.1));
        (s.mean, s.std_error)
    } else {
        let s = Summary::of(values.iter().map(|v| v.0));
        let mf = f64::from(antennas);
        (s.mean.powi(antennas as i32), mf * s.mean.powi(antennas as i32 - 1) * s.std_error)
    };
    Ok(record(scenario, SIMO, mode.label(), params, estimate, se))
}

/// Mean local delay under ALOHA with each transmit probability in `p_grid`.
pub fn mean_local_delay(scenario: &ScenarioSpec, p_grid: &[f64], mode: CorrelationMode) -> Result<Vec<EstimateRecord>> {
    p_grid
        .iter()
        .map(|&p| {
            if !(p > 0.0) {
                return Err(Error::InfiniteDelay(format!("ALOHA probability {p} never transmits")));
            }
            let mac = MacSpec::aloha(p)?;
            let s = ScenarioSpec { mac, ..scenario.clone() };
            local_delay(&s, mode)
        })
        .collect()
}

/// Mean local delay with the scenario's own MAC.
///
/// Correlated positions: the interferer pattern is static across slots, so
/// the delay given the pattern is geometric with mean `1 / p_s(Phi)` (or
/// `E_mask[1 / P(success | mask)]` if the access pattern is frozen too);
/// its spatial average is estimated with a per-replication cap. Independent
/// positions: the decorrelated value `1 / E[p_s]`.
pub fn local_delay(scenario: &ScenarioSpec, mode: CorrelationMode) -> Result<EstimateRecord> {
    if let MacSpec::Aloha { p } = scenario.mac {
        if p == 0.0 {
            return Err(Error::InfiniteDelay("ALOHA probability 0 never transmits".into()));
        }
    }
    let link = Link::at_origin(scenario.link_distance);
    let values = replicate(scenario, DELAY, |rng| {
        let dep = compose_tiers_around(scenario, &[link.receiver], rng)?;
        let ps = link_success(&link, scenario.theta, &dep, &scenario.mac, &scenario.channel)?;
        let delay = match mode.mac_marks {
            MacSharing::Shared => {
                static_access_mean_delay(&link, scenario.theta, &dep, &scenario.mac, &scenario.channel)?
            }
            MacSharing::PerSlot | MacSharing::Fresh => 1.0 / ps,
        };
        Ok((ps, delay))
    })?;
    let cap = scenario.delay_cap;
    let mut params = vec![("aloha_p", scenario.mac.activity_probability())];
    if let MacSpec::Fhma { sub_bands } = scenario.mac {
        params.push(("fhma_n", f64::from(sub_bands)));
    }
    let (estimate, se, capped) = if mode.is_correlated() {
        let capped = values.iter().filter(|v| !(v.1 < cap)).count();
        let s = Summary::of(values.iter().map(|v| v.1.min(cap)));
        (s.mean, s.std_error, capped as f64 / values.len() as f64)
    } else {
        let s = Summary::of(values.iter().map(|v| v.0));
        let delay = 1.0 / s.mean;
        if !(delay < cap) {
            (cap, 0.0, 1.0)
        } else {
            (delay, s.std_error / (s.mean * s.mean), 0.0)
        }
    };
    let mut rec = record(scenario, DELAY, mode.label(), params, estimate, se);
    rec.capped_fraction = capped;
    Ok(rec)
}

pub const SOURCE: Point = Point::new(-1.0, 0.0);
pub const DESTINATION: Point = Point::new(1.0, 0.0);

/// End-to-end outage of two-slot decode-and-forward relaying with
/// selection combining, for a relay at `(R, 0)` between the source at
/// `(-1, 0)` and the destination at `(1, 0)`.
///
/// Slot 1: the source transmits to the relay and the destination. Slot 2:
/// the relay forwards if it decoded. The destination succeeds if either
/// copy clears the threshold.
pub fn relay_outage(scenario: &ScenarioSpec, relay_positions: &[f64], mode: CorrelationMode) -> Result<Vec<EstimateRecord>> {
    relay_positions.iter().map(|&r| relay_outage_at(scenario, r, mode)).collect()
}

fn relay_outage_at(scenario: &ScenarioSpec, r: f64, mode: CorrelationMode) -> Result<EstimateRecord> {
    if !(r > -1.0 && r < 1.0) {
        return Err(domain(format!("relay position must lie strictly inside (-1, 1), got {r}")));
    }
    let relay = Point::new(r, 0.0);
    let direct = Link::new(DESTINATION, SOURCE.dist(&DESTINATION));
    let first_hop = Link::new(relay, SOURCE.dist(&relay));
    let second_hop = Link::new(DESTINATION, relay.dist(&DESTINATION));
    let anchors = [relay, DESTINATION];
    let (theta, mac, ch) = (scenario.theta, scenario.mac, scenario.channel);

    let values = replicate(scenario, RELAY, |rng| {
        let outcome = if mode.is_correlated() {
            let dep = compose_tiers_around(scenario, &anchors, rng)?;
            let pa = link_success(&direct, theta, &dep, &mac, &ch)?;
            let pb = link_success(&first_hop, theta, &dep, &mac, &ch)?;
            let pc = link_success(&second_hop, theta, &dep, &mac, &ch)?;
            // success = P(A) + P(B and C) - P(A and B and C)
            let success = match mode.mac_marks {
                MacSharing::Fresh => pa + pb * pc - pa * pb * pc,
                MacSharing::PerSlot => {
                    let pab = joint_success_same_slot(&[direct, first_hop], theta, &dep, &mac, &ch)?;
                    pa + pb * pc - pab * pc
                }
                MacSharing::Shared => {
                    let pbc = joint_success_same_slot(&[first_hop, second_hop], theta, &dep, &mac, &ch)?;
                    let pabc = joint_success_same_slot(&[direct, first_hop, second_hop], theta, &dep, &mac, &ch)?;
                    pa + pbc - pabc
                }
            };
            (1.0 - success, 1.0 - pa)
        } else {
            let dep_a = compose_tiers_around(scenario, &anchors, rng)?;
            let dep_b = compose_tiers_around(scenario, &anchors, rng)?;
            let dep_c = compose_tiers_around(scenario, &anchors, rng)?;
            let pa = link_success(&direct, theta, &dep_a, &mac, &ch)?;
            let pb = link_success(&first_hop, theta, &dep_b, &mac, &ch)?;
            let pc = link_success(&second_hop, theta, &dep_c, &mac, &ch)?;
            (1.0 - (pa + pb * pc - pa * pb * pc), 1.0 - pa)
        };
        Ok(outcome)
    })?;
    let s = Summary::of(values.iter().map(|v| v.0));
    let direct_outage = Summary::of(values.iter().map(|v| v.1));
    let params = vec![("relay_position", r), ("direct_outage", direct_outage.mean)];
    Ok(record(scenario, RELAY, mode.label(), params, s.mean, s.std_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::rng::replication_stream;
    use crate::point_process::matern_parent_for_intensity;

    fn ppp(lambda: f64, reps: u64) -> ScenarioSpec {
        ScenarioSpec::single_tier(ProcessSpec::HomogeneousPpp { lambda }, 4.0, 20.0, reps, 42).unwrap()
    }

    #[test]
    fn empty_network_is_always_covered() {
        let s = ppp(0.0, 200);
        let c = coverage_probability(&s).unwrap();
        assert_eq!((c.estimate, c.std_error), (1.0, 0.0));
        for mode in [CorrelationMode::CORRELATED, CorrelationMode::INDEPENDENT] {
            assert_eq!(simo_joint_occurrence(&s, 4, mode).unwrap().estimate, 1.0);
            for r in mean_local_delay(&s, &[0.3, 1.0], mode).unwrap() {
                assert_eq!(r.estimate, 1.0);
            }
            for r in relay_outage(&s, &[-0.5, 0.0, 0.5], mode).unwrap() {
                assert_eq!(r.estimate, 0.0);
            }
        }
    }

    #[test]
    fn single_antenna_equals_coverage() {
        let s = ppp(0.1, 2000);
        let c = coverage_probability(&s).unwrap();
        // Different stream labels, so compare through the SIMO path itself.
        let corr = simo_joint_occurrence(&s, 1, CorrelationMode::CORRELATED).unwrap();
        let ind = simo_joint_occurrence(&s, 1, CorrelationMode::INDEPENDENT).unwrap();
        assert_eq!(corr.estimate, ind.estimate);
        assert!((corr.estimate - c.estimate).abs() < 4.0 * (corr.std_error + c.std_error));
    }

    #[test]
    fn coverage_decreases_with_threshold() {
        let mut s = ppp(0.1, 2000);
        let mut last = 1.0;
        for theta in [1.0, 10.0, 100.0] {
            s.theta = theta;
            let c = coverage_probability(&s).unwrap().estimate;
            assert!(c < last);
            last = c;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn zero_aloha_is_infinite_delay() {
        let s = ppp(0.1, 10);
        assert!(matches!(
            mean_local_delay(&s, &[0.0], CorrelationMode::CORRELATED),
            Err(Error::InfiniteDelay(_))
        ));
    }

    #[test]
    fn relay_rejects_endpoints() {
        let s = ppp(0.1, 10);
        for r in [-1.0, 1.0, 1.5] {
            assert!(matches!(relay_outage(&s, &[r], CorrelationMode::CORRELATED), Err(Error::ParameterDomain(_))));
        }
    }

    #[test]
    fn scenario_validation() {
        let mut s = ppp(0.1, 10);
        s.reps = 0;
        assert!(coverage_probability(&s).is_err());
        let mut s = ppp(0.1, 10);
        s.tiers.clear();
        assert!(coverage_probability(&s).is_err());
        let mut s = ppp(0.1, 10);
        s.window = Window::new(1.0, 2.0, 1.0, 2.0).unwrap();
        assert!(coverage_probability(&s).is_err());
        let mut s = ppp(0.1, 10);
        s.link_distance = 0.0;
        assert!(coverage_probability(&s).is_err());
    }

    #[test]
    fn one_tier_composition_equals_tier_sampler() {
        let s = ppp(0.1, 1);
        let dep = compose_tiers(&s, &mut replication_stream(1, "t", 0)).unwrap();
        let direct = s.tiers[0].process.sample(&s.window, &mut replication_stream(1, "t", 0)).unwrap();
        assert_eq!(dep.pattern(), &direct);
    }

    #[test]
    fn mixed_tiers_keep_their_invariants() {
        let window = Window::centered_square(15.0).unwrap();
        let hc = ProcessSpec::MaternHardCore { lambda_parent: 0.5, r_min: 1.2 };
        let ring = ProcessSpec::InhomogeneousPpp {
            family: crate::point_process::IntensityFamily::GaussianRing { lambda0: 1.0, ring_radius: 6.0, width: 0.5 },
        };
        let thomas = ProcessSpec::ThomasCluster { lambda_parent: 0.02, mean_daughters: 5.0, sigma: 0.5 };
        let mut s = ppp(0.1, 1);
        s.window = window;
        s.tiers = vec![Tier::new(hc, 10.0), Tier::new(ring, 2.0), Tier::new(thomas, 1.0)];
        for i in 0..50 {
            let dep = compose_tiers(&s, &mut replication_stream(9, "mix", i)).unwrap();
            let hc_points: Vec<Point> = dep
                .pattern()
                .points()
                .iter()
                .zip(dep.powers())
                .filter(|(_, &p)| p == 10.0)
                .map(|(x, _)| *x)
                .collect();
            let hc_pattern = PointPattern::new(hc_points, window).unwrap();
            if let Some(d) = hc_pattern.min_pairwise_distance() {
                assert!(d >= 1.2);
            }
        }
    }

    #[test]
    fn matched_hardcore_exists_for_default_tier() {
        let lp = matern_parent_for_intensity(0.1, 1.0).unwrap();
        assert!(lp > 0.1 && lp < 0.2);
    }
}
