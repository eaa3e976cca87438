//! Configuration, deterministic streams, the sweep driver and CSV output.

pub mod config;
pub mod rng;

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::error::Error as SimError;
use crate::experiments::{self, EstimateRecord};
pub use config::{parse_config, ConfigError, Experiment, ModeSelector, RunConfig, SweepParam};

pub const CSV_HEADER: &str = "experiment,mode,sweep_param,sweep_value,estimate,std_error,reps,capped_fraction,seed";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("runtime error: {0}")]
    Runtime(#[from] SimError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl HarnessError {
    /// Process exit code: 1 for configuration problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Runtime(_) | HarnessError::Io(_) => 2,
        }
    }
}

/// Formats like C's `%.9g`: nine significant digits, trailing zeros
/// removed, exponent form outside `[1e-4, 1e9)`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct Row {
    mode: &'static str,
    sweep_value: Option<f64>,
    record: EstimateRecord,
}

/// Runs the configured experiment over its sweep and returns the CSV
/// document. Output bytes depend only on the configuration.
pub fn run(config: &RunConfig) -> Result<String, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;
    let rows = pool.install(|| collect_rows(config))?;

    let sweep_param = match (&config.sweep, config.experiment) {
        (Some(s), _) => s.param.name(),
        (None, Experiment::Relay) => SweepParam::RelayPosition.name(),
        (None, _) => "none",
    };
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.record;
        let value = row.sweep_value.map(format_sig9).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.experiment,
            row.mode,
            sweep_param,
            value,
            format_sig9(r.estimate),
            format_sig9(r.std_error),
            r.reps,
            format_sig9(r.capped_fraction),
            r.seed
        )
        .expect("writing to a String");
    }
    Ok(out)
}

fn collect_rows(config: &RunConfig) -> Result<Vec<Row>, HarnessError> {
    let modes = config.mode.modes();
    let mut rows = Vec::new();

    if config.experiment == Experiment::Relay {
        let positions = match &config.sweep {
            Some(s) => s.values.clone(),
            None => config.relay_grid.clone(),
        };
        let scenario = config.scenario()?;
        for &r in &positions {
            for mode in &modes {
                let record = experiments::relay_outage(&scenario, &[r], *mode)?.remove(0);
                rows.push(Row { mode: mode.label(), sweep_value: Some(r), record });
            }
        }
        return Ok(rows);
    }

    let points: Vec<(Option<f64>, RunConfig)> = match &config.sweep {
        None => vec![(None, config.clone())],
        Some(s) => s
            .values
            .iter()
            .map(|&v| Ok((Some(v), config.with_param(s.param, v)?)))
            .collect::<Result<_, ConfigError>>()?,
    };
    for (value, cfg) in points {
        let scenario = cfg.scenario()?;
        for mode in &modes {
            let record = match cfg.experiment {
                Experiment::Coverage => experiments::coverage_probability(&scenario)?,
                Experiment::Simo => experiments::simo_joint_occurrence(&scenario, cfg.antennas, *mode)?,
                Experiment::Delay => experiments::local_delay(&scenario, *mode)?,
                Experiment::Relay => unreachable!("handled above"),
            };
            rows.push(Row { mode: mode.label(), sweep_value: value, record });
        }
    }
    Ok(rows)
}

/// Writes `contents` to `path` through a temporary sibling and a rename,
/// so a failed run never leaves a partial file behind.
pub fn write_atomically(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(0.610_521_234_56), "0.610521235");
        assert_eq!(format_sig9(123_456_789.0), "123456789");
        assert_eq!(format_sig9(1_234_567_890.0), "1.23456789e+09");
        assert_eq!(format_sig9(0.000_1), "0.0001");
        assert_eq!(format_sig9(0.000_012_5), "1.25e-05");
        assert_eq!(format_sig9(-2.5), "-2.5");
        assert_eq!(format_sig9(999_999_999.7), "1e+09");
        assert_eq!(format_sig9(1e6), "1000000");
        assert_eq!(format_sig9(0.3), "0.3");
    }

    #[test]
    fn exit_codes() {
        let c: HarnessError = ConfigError { line: Some(1), message: "x".into() }.into();
        assert_eq!(c.exit_code(), 1);
        let r: HarnessError = SimError::SingularGeometry("x".into()).into();
        assert_eq!(r.exit_code(), 2);
    }
}
