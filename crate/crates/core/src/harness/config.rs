//! Line-oriented `key = value` run configuration.
//!
//! `#` starts a comment, blank lines are ignored and list values are
//! comma separated. The key vocabulary is closed: any other key is an
//! error carrying its line number.

use std::fmt;
use std::path::PathBuf;

use crate::channel::ChannelParams;
use crate::error::Result as SimResult;
use crate::experiments::{ScenarioSpec, Tier};
use crate::interference::{CorrelationMode, MacSpec};
use crate::point_process::{matern_parent_for_intensity, IntensityFamily, Point, ProcessSpec, Window};

pub const KEYS: &[&str] = &[
    "experiment",
    "mode",
    "model",
    "lambda",
    "lambda_parent",
    "r_min",
    "mu",
    "cluster_radius",
    "sigma",
    "intensity_family",
    "ring_radius",
    "ring_width",
    "alpha",
    "r0",
    "noise",
    "theta",
    "d",
    "aloha_p",
    "fhma_n",
    "antennas",
    "relay_grid",
    "window_half",
    "reps",
    "seed",
    "sweep",
    "sweep_values",
    "out",
    "threads",
    "delay_cap",
];

pub const DEFAULT_RELAY_GRID: [f64; 7] = [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Coverage,
    Simo,
    Delay,
    Relay,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Coverage => "coverage",
            Experiment::Simo => "simo",
            Experiment::Delay => "delay",
            Experiment::Relay => "relay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSelector {
    Correlated,
    Independent,
    Both,
}

impl ModeSelector {
    pub fn modes(&self) -> Vec<CorrelationMode> {
        match self {
            ModeSelector::Correlated => vec![CorrelationMode::CORRELATED],
            ModeSelector::Independent => vec![CorrelationMode::INDEPENDENT],
            ModeSelector::Both => vec![CorrelationMode::CORRELATED, CorrelationMode::INDEPENDENT],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Ppp,
    Inhomogeneous,
    MaternHardcore,
    MaternCluster,
    Thomas,
}

impl Model {
    fn name(&self) -> &'static str {
        match self {
            Model::Ppp => "ppp",
            Model::Inhomogeneous => "inhomogeneous",
            Model::MaternHardcore => "matern_hardcore",
            Model::MaternCluster => "matern_cluster",
            Model::Thomas => "thomas",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Constant,
    GaussianRing,
    GaussianBump,
}

/// Numeric parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    LambdaParent,
    RMin,
    Mu,
    ClusterRadius,
    Sigma,
    RingRadius,
    RingWidth,
    Alpha,
    R0,
    Noise,
    Theta,
    D,
    AlohaP,
    FhmaN,
    Antennas,
    WindowHalf,
    DelayCap,
    RelayPosition,
}

impl SweepParam {
    pub fn parse(name: &str) -> Option<SweepParam> {
        Some(match name {
            "lambda" => SweepParam::Lambda,
            "lambda_parent" => SweepParam::LambdaParent,
            "r_min" => SweepParam::RMin,
            "mu" => SweepParam::Mu,
            "cluster_radius" => SweepParam::ClusterRadius,
            "sigma" => SweepParam::Sigma,
            "ring_radius" => SweepParam::RingRadius,
            "ring_width" => SweepParam::RingWidth,
            "alpha" => SweepParam::Alpha,
            "r0" => SweepParam::R0,
            "noise" => SweepParam::Noise,
            "theta" => SweepParam::Theta,
            "d" => SweepParam::D,
            "aloha_p" => SweepParam::AlohaP,
            "fhma_n" => SweepParam::FhmaN,
            "antennas" => SweepParam::Antennas,
            "window_half" => SweepParam::WindowHalf,
            "delay_cap" => SweepParam::DelayCap,
            "relay_position" => SweepParam::RelayPosition,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::LambdaParent => "lambda_parent",
            SweepParam::RMin => "r_min",
            SweepParam::Mu => "mu",
            SweepParam::ClusterRadius => "cluster_radius",
            SweepParam::Sigma => "sigma",
            SweepParam::RingRadius => "ring_radius",
            SweepParam::RingWidth => "ring_width",
            SweepParam::Alpha => "alpha",
            SweepParam::R0 => "r0",
            SweepParam::Noise => "noise",
            SweepParam::Theta => "theta",
            SweepParam::D => "d",
            SweepParam::AlohaP => "aloha_p",
            SweepParam::FhmaN => "fhma_n",
            SweepParam::Antennas => "antennas",
            SweepParam::WindowHalf => "window_half",
            SweepParam::DelayCap => "delay_cap",
            SweepParam::RelayPosition => "relay_position",
        }
    }

    fn applies_to(&self, experiment: Experiment, model: Model) -> bool {
        use SweepParam::*;
        match self {
            Antennas => experiment == Experiment::Simo,
            RelayPosition => experiment == Experiment::Relay,
            D => experiment != Experiment::Relay,
            DelayCap => experiment == Experiment::Delay,
            Lambda => matches!(model, Model::Ppp | Model::Inhomogeneous | Model::MaternHardcore),
            LambdaParent => matches!(model, Model::MaternHardcore | Model::MaternCluster | Model::Thomas),
            RMin => model == Model::MaternHardcore,
            Mu => matches!(model, Model::MaternCluster | Model::Thomas),
            ClusterRadius => model == Model::MaternCluster,
            Sigma => model == Model::Thomas,
            RingRadius | RingWidth => model == Model::Inhomogeneous,
            Alpha | R0 | Noise | Theta | AlohaP | FhmaN | WindowHalf => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub mode: ModeSelector,
    pub model: Model,
    pub lambda: Option<f64>,
    pub lambda_parent: Option<f64>,
    pub r_min: Option<f64>,
    pub mu: Option<f64>,
    pub cluster_radius: Option<f64>,
    pub sigma: Option<f64>,
    pub intensity_family: FamilyKind,
    pub ring_radius: Option<f64>,
    pub ring_width: Option<f64>,
    pub alpha: f64,
    pub r0: f64,
    pub noise: f64,
    pub theta: f64,
    pub d: f64,
    pub aloha_p: Option<f64>,
    pub fhma_n: Option<u32>,
    pub antennas: u32,
    pub relay_grid: Vec<f64>,
    pub window_half: f64,
    pub reps: u64,
    pub seed: u64,
    pub sweep: Option<Sweep>,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub delay_cap: f64,
}

impl RunConfig {
    /// Process of the configured tier. With the hard-core model, `lambda`
    /// is the target retained intensity and the parent intensity is
    /// obtained by inverting the type-II retention formula.
    pub fn process(&self) -> SimResult<ProcessSpec> {
        let get = |v: Option<f64>| v.unwrap_or(0.0);
        Ok(match self.model {
            Model::Ppp => ProcessSpec::HomogeneousPpp { lambda: get(self.lambda) },
            Model::Inhomogeneous => {
                let lambda0 = get(self.lambda);
                let family = match self.intensity_family {
                    FamilyKind::Constant => IntensityFamily::Constant { lambda0 },
                    FamilyKind::GaussianRing => IntensityFamily::GaussianRing {
                        lambda0,
                        ring_radius: get(self.ring_radius),
                        width: get(self.ring_width),
                    },
                    FamilyKind::GaussianBump => {
                        IntensityFamily::GaussianBump { lambda0, center: Point::ORIGIN, width: get(self.ring_width) }
                    }
                };
                ProcessSpec::InhomogeneousPpp { family }
            }
            Model::MaternHardcore => {
                let r_min = get(self.r_min);
                let lambda_parent = match (self.lambda_parent, self.lambda) {
                    (Some(lp), _) => lp,
                    (None, Some(target)) => matern_parent_for_intensity(target, r_min)?,
                    (None, None) => 0.0,
                };
                ProcessSpec::MaternHardCore { lambda_parent, r_min }
            }
            Model::MaternCluster => ProcessSpec::MaternCluster {
                lambda_parent: get(self.lambda_parent),
                mean_daughters: get(self.mu),
                cluster_radius: get(self.cluster_radius),
            },
            Model::Thomas => ProcessSpec::ThomasCluster {
                lambda_parent: get(self.lambda_parent),
                mean_daughters: get(self.mu),
                sigma: get(self.sigma),
            },
        })
    }

    pub fn mac(&self) -> SimResult<MacSpec> {
        match (self.aloha_p, self.fhma_n) {
            (Some(p), _) => MacSpec::aloha(p),
            (None, Some(n)) => MacSpec::fhma(n),
            (None, None) => Ok(MacSpec::AlwaysOn),
        }
    }

    pub fn scenario(&self) -> SimResult<ScenarioSpec> {
        let scenario = ScenarioSpec {
            tiers: vec![Tier::new(self.process()?, 1.0)],
            window: Window::centered_square(self.window_half)?,
            channel: ChannelParams::new(self.alpha, self.r0, self.noise, 1.0)?,
            mac: self.mac()?,
            theta: self.theta,
            link_distance: self.d,
            reps: self.reps,
            seed: self.seed,
            delay_cap: self.delay_cap,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Copy of the config with one sweep parameter replaced.
    /// `relay_position` is handled by the driver and is left untouched.
    pub fn with_param(&self, param: SweepParam, value: f64) -> std::result::Result<RunConfig, ConfigError> {
        let mut c = self.clone();
        let v = typed_value(param.name(), value)?;
        match param {
            SweepParam::Lambda => c.lambda = Some(v.real()),
            SweepParam::LambdaParent => c.lambda_parent = Some(v.real()),
            SweepParam::RMin => c.r_min = Some(v.real()),
            SweepParam::Mu => c.mu = Some(v.real()),
            SweepParam::ClusterRadius => c.cluster_radius = Some(v.real()),
            SweepParam::Sigma => c.sigma = Some(v.real()),
            SweepParam::RingRadius => c.ring_radius = Some(v.real()),
            SweepParam::RingWidth => c.ring_width = Some(v.real()),
            SweepParam::Alpha => c.alpha = v.real(),
            SweepParam::R0 => c.r0 = v.real(),
            SweepParam::Noise => c.noise = v.real(),
            SweepParam::Theta => c.theta = v.real(),
            SweepParam::D => c.d = v.real(),
            SweepParam::AlohaP => {
                c.aloha_p = Some(v.real());
                c.fhma_n = None;
            }
            SweepParam::FhmaN => {
                c.fhma_n = Some(v.int() as u32);
                c.aloha_p = None;
            }
            SweepParam::Antennas => c.antennas = v.int() as u32,
            SweepParam::WindowHalf => c.window_half = v.real(),
            SweepParam::DelayCap => c.delay_cap = v.real(),
            SweepParam::RelayPosition => {}
        }
        Ok(c)
    }
}

enum Typed {
    Real(f64),
    Int(u64),
}

impl Typed {
    fn real(&self) -> f64 {
        match *self {
            Typed::Real(v) => v,
            Typed::Int(v) => v as f64,
        }
    }

    fn int(&self) -> u64 {
        match *self {
            Typed::Int(v) => v,
            Typed::Real(v) => v as u64,
        }
    }
}

/// Applies the per-key domain rule to a numeric value, as used both when
/// parsing and when a sweep substitutes a value.
fn typed_value(key: &str, v: f64) -> std::result::Result<Typed, ConfigError> {
    let fail = |msg: String| Err(ConfigError::global(msg));
    if !v.is_finite() {
        return fail(format!("{key} must be finite"));
    }
    match key {
        "alpha" if v <= 2.0 => fail("alpha must exceed 2".into()),
        "theta" | "d" | "window_half" | "ring_width" if v <= 0.0 => fail(format!("{key} must be > 0")),
        "aloha_p" if !(0.0..=1.0).contains(&v) => fail("aloha_p must lie in [0, 1]".into()),
        "delay_cap" if v < 1.0 => fail("delay_cap must be >= 1".into()),
        "relay_position" if !(v > -1.0 && v < 1.0) => fail("relay positions must lie strictly inside (-1, 1)".into()),
        "fhma_n" | "antennas" => {
            if v < 1.0 || v.fract() != 0.0 || v > f64::from(u32::MAX) {
                fail(format!("{key} must be a positive integer"))
            } else {
                Ok(Typed::Int(v as u64))
            }
        }
        "relay_position" => Ok(Typed::Real(v)),
        _ if v < 0.0 => fail(format!("{key} must be >= 0")),
        _ => Ok(Typed::Real(v)),
    }
}

fn parse_real(key: &str, raw: &str, line: usize) -> std::result::Result<f64, ConfigError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| ConfigError::at(line, format!("{key} expects a number, got `{raw}`")))?;
    typed_value(key, v).map(|t| t.real()).map_err(|e| ConfigError::at(line, e.message))
}

fn parse_int<T: std::str::FromStr>(key: &str, raw: &str, line: usize) -> std::result::Result<T, ConfigError> {
    raw.parse()
        .map_err(|_| ConfigError::at(line, format!("{key} expects a non-negative integer, got `{raw}`")))
}

fn parse_list(key: &str, raw: &str, line: usize) -> std::result::Result<Vec<f64>, ConfigError> {
    raw.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError::at(line, format!("{key} expects comma-separated numbers, got `{item}`")))
        })
        .collect()
}

/// Parses a configuration document.
pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let mut seen: Vec<(&str, usize)> = Vec::new();
    let mut experiment = None;
    let mut mode = ModeSelector::Correlated;
    let mut model = Model::Ppp;
    let mut intensity_family = FamilyKind::Constant;
    let mut reals: Vec<(&str, f64)> = Vec::new();
    let mut aloha_p = None;
    let mut fhma_n = None;
    let mut antennas = 2u32;
    let mut relay_grid = DEFAULT_RELAY_GRID.to_vec();
    let mut reps = None;
    let mut seed = None;
    let mut sweep_param: Option<(SweepParam, usize)> = None;
    let mut sweep_values: Option<(Vec<f64>, usize)> = None;
    let mut out = None;
    let mut threads = 0usize;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::at(line, format!("unknown key `{key}`")));
        };
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("{key} has no value")));
        }
        if let Some((_, first)) = seen.iter().find(|(k, _)| *k == key) {
            return Err(ConfigError::at(line, format!("duplicate key `{key}` (first set on line {first})")));
        }
        seen.push((key, line));

        match key {
            "experiment" => {
                experiment = Some(match value {
                    "coverage" => Experiment::Coverage,
                    "simo" => Experiment::Simo,
                    "delay" => Experiment::Delay,
                    "relay" => Experiment::Relay,
                    _ => {
                        return Err(ConfigError::at(
                            line,
                            format!("experiment must be one of coverage, simo, delay, relay; got `{value}`"),
                        ))
                    }
                })
            }
            "mode" => {
                mode = match value {
                    "correlated" => ModeSelector::Correlated,
                    "independent" => ModeSelector::Independent,
                    "both" => ModeSelector::Both,
                    _ => {
                        return Err(ConfigError::at(
                            line,
                            format!("mode must be correlated, independent or both; got `{value}`"),
                        ))
                    }
                }
            }
            "model" => {
                model = match value {
                    "ppp" => Model::Ppp,
                    "inhomogeneous" => Model::Inhomogeneous,
                    "matern_hardcore" => Model::MaternHardcore,
                    "matern_cluster" => Model::MaternCluster,
                    "thomas" => Model::Thomas,
                    _ => {
                        return Err(ConfigError::at(
                            line,
                            format!(
                                "model must be ppp, inhomogeneous, matern_hardcore, matern_cluster or thomas; got `{value}`"
                            ),
                        ))
                    }
                }
            }
            "intensity_family" => {
                intensity_family = match value {
                    "constant" => FamilyKind::Constant,
                    "gaussian_ring" => FamilyKind::GaussianRing,
                    "gaussian_bump" => FamilyKind::GaussianBump,
                    _ => {
                        return Err(ConfigError::at(
                            line,
                            format!("intensity_family must be constant, gaussian_ring or gaussian_bump; got `{value}`"),
                        ))
                    }
                }
            }
            "aloha_p" => {
                if fhma_n.is_some() {
                    return Err(ConfigError::at(line, "aloha_p and fhma_n are mutually exclusive"));
                }
                aloha_p = Some(parse_real(key, value, line)?);
            }
            "fhma_n" => {
                if aloha_p.is_some() {
                    return Err(ConfigError::at(line, "aloha_p and fhma_n are mutually exclusive"));
                }
                let n: u32 = parse_int(key, value, line)?;
                if n == 0 {
                    return Err(ConfigError::at(line, "fhma_n must be a positive integer"));
                }
                fhma_n = Some(n);
            }
            "antennas" => {
                antennas = parse_int(key, value, line)?;
                if antennas == 0 {
                    return Err(ConfigError::at(line, "antennas must be a positive integer"));
                }
            }
            "relay_grid" => {
                relay_grid = parse_list(key, value, line)?;
                for &r in &relay_grid {
                    typed_value("relay_position", r).map_err(|e| ConfigError::at(line, e.message))?;
                }
            }
            "reps" => {
                let n: u64 = parse_int(key, value, line)?;
                if n == 0 {
                    return Err(ConfigError::at(line, "reps must be >= 1"));
                }
                reps = Some(n);
            }
            "seed" => seed = Some(parse_int::<u64>(key, value, line)?),
            "threads" => threads = parse_int(key, value, line)?,
            "out" => out = Some(PathBuf::from(value)),
            "sweep" => {
                let param = SweepParam::parse(value)
                    .ok_or_else(|| ConfigError::at(line, format!("`{value}` is not a sweepable parameter")))?;
                sweep_param = Some((param, line));
            }
            "sweep_values" => {
                let values = parse_list(key, value, line)?;
                sweep_values = Some((values, line));
            }
            _ => reals.push((key, parse_real(key, value, line)?)),
        }
    }

    let real = |name: &str| reals.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
    let line_of = |name: &str| seen.iter().find(|(k, _)| *k == name).map(|(_, l)| *l);
    let missing = |name: &str| ConfigError::global(format!("missing required key `{name}`"));

    let experiment = experiment.ok_or_else(|| missing("experiment"))?;
    let alpha = real("alpha").ok_or_else(|| missing("alpha"))?;
    let reps = reps.ok_or_else(|| missing("reps"))?;
    let seed = seed.ok_or_else(|| missing("seed"))?;

    let required: &[&str] = match (model, intensity_family) {
        (Model::Ppp, _) => &["lambda"],
        (Model::Inhomogeneous, FamilyKind::Constant) => &["lambda"],
        (Model::Inhomogeneous, FamilyKind::GaussianRing) => &["lambda", "ring_radius", "ring_width"],
        (Model::Inhomogeneous, FamilyKind::GaussianBump) => &["lambda", "ring_width"],
        (Model::MaternHardcore, _) => &["r_min"],
        (Model::MaternCluster, _) => &["lambda_parent", "mu", "cluster_radius"],
        (Model::Thomas, _) => &["lambda_parent", "mu", "sigma"],
    };
    for name in required {
        if real(name).is_none() {
            return Err(missing(name));
        }
    }
    if model == Model::MaternHardcore {
        match (real("lambda"), real("lambda_parent")) {
            (None, None) => return Err(missing("lambda_parent")),
            (Some(_), Some(_)) => {
                return Err(ConfigError::at(
                    line_of("lambda_parent").unwrap_or(0),
                    "give either lambda (retained intensity) or lambda_parent for matern_hardcore, not both",
                ))
            }
            _ => {}
        }
    }

    let sweep = match (sweep_param, sweep_values) {
        (None, None) => None,
        (Some((_, line)), None) => return Err(ConfigError::at(line, "sweep needs sweep_values")),
        (None, Some((_, line))) => return Err(ConfigError::at(line, "sweep_values needs sweep")),
        (Some((param, line)), Some((values, vline))) => {
            if !param.applies_to(experiment, model) {
                return Err(ConfigError::at(
                    line,
                    format!(
                        "sweep parameter `{}` does not apply to experiment {} with model {}",
                        param.name(),
                        experiment.name(),
                        model.name()
                    ),
                ));
            }
            if values.is_empty() {
                return Err(ConfigError::at(vline, "sweep_values must not be empty"));
            }
            for &v in &values {
                typed_value(param.name(), v).map_err(|e| ConfigError::at(vline, e.message))?;
            }
            Some(Sweep { param, values })
        }
    };
    if experiment == Experiment::Relay {
        if let Some(s) = &sweep {
            if s.param != SweepParam::RelayPosition {
                return Err(ConfigError::at(
                    line_of("sweep").unwrap_or(0),
                    "the relay experiment sweeps relay_position only",
                ));
            }
        }
    }

    let config = RunConfig {
        experiment,
        mode,
        model,
        lambda: real("lambda"),
        lambda_parent: real("lambda_parent"),
        r_min: real("r_min"),
        mu: real("mu"),
        cluster_radius: real("cluster_radius"),
        sigma: real("sigma"),
        intensity_family,
        ring_radius: real("ring_radius"),
        ring_width: real("ring_width"),
        alpha,
        r0: real("r0").unwrap_or(0.0),
        noise: real("noise").unwrap_or(0.0),
        theta: real("theta").unwrap_or(1.0),
        d: real("d").unwrap_or(1.0),
        aloha_p,
        fhma_n,
        antennas,
        relay_grid,
        window_half: real("window_half").unwrap_or(20.0),
        reps,
        seed,
        sweep,
        out,
        threads,
        delay_cap: real("delay_cap").unwrap_or(crate::experiments::DEFAULT_DELAY_CAP),
    };
    // Cross-field rules (e.g. an unreachable hard-core intensity).
    config.scenario().map_err(|e| ConfigError::global(e.to_string()))?;
    Ok(config)
}
