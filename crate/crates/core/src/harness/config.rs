use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use crate::board::Boundary;
use crate::player::{Policy, Schedule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid sweep config: {0}")]
    Invalid(String),
}

/// A density sweep. Parsed from `key = value` lines; `#` starts a comment.
///
/// | key | value |
/// |---|---|
/// | `preset` | `desk` (default) or `full`; resets every other key |
/// | `n` | comma list of grid sizes |
/// | `rho` | comma list, or inclusive range `start:stop:step` |
/// | `games` | games per point |
/// | `policies` | comma list of `sat`, `kset:K` |
/// | `seed` | master seed |
/// | `boundary` | `torus` or `open` |
/// | `schedule` | `sequential` or `batch` |
/// | `cores` | extract GMUS cores for the SAT policy (`true`/`false`) |
/// | `time_budget` | seconds per game, `0` for none |
/// | `timing` | record wall-clock times (`false` writes 0 for byte-stable output) |
/// | `output` | output directory |
/// | `plots` | write SVG plots next to the CSVs |
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub densities: Vec<f64>,
    pub games: usize,
    pub policies: Vec<Policy>,
    pub seed: u64,
    pub boundary: Boundary,
    pub schedule: Schedule,
    pub extract_cores: bool,
    pub time_budget: Option<Duration>,
    pub timing: bool,
    pub output: Option<PathBuf>,
    pub plots: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig::desk()
    }
}

impl SweepConfig {
    /// N in {20, 40}, 50 games per point, densities 0.025 to 0.45.
    pub fn desk() -> Self {
        SweepConfig {
            sizes: vec![20, 40],
            densities: density_range(0.025, 0.45, 0.025),
            games: 50,
            policies: vec![Policy::SatInference],
            seed: 1,
            boundary: Boundary::Torus,
            schedule: Schedule::Sequential,
            extract_cores: true,
            time_budget: Some(Duration::from_secs(60)),
            timing: true,
            output: None,
            plots: true,
        }
    }

    /// N in {20, 40, 80} with 300 games per point.
    pub fn full() -> Self {
        SweepConfig { sizes: vec![20, 40, 80], games: 300, ..SweepConfig::desk() }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SweepConfig::desk();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Syntax { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| err(format!("invalid {what} {value:?}"));
            match key {
                "preset" => {
                    cfg = match value {
                        "desk" => SweepConfig::desk(),
                        "full" => SweepConfig::full(),
                        _ => return Err(bad("preset")),
                    }
                }
                "n" => cfg.sizes = parse_list(value).ok_or_else(|| bad("grid size list"))?,
                "rho" => cfg.densities = parse_densities(value).ok_or_else(|| bad("density list"))?,
                "games" => cfg.games = value.parse().map_err(|_| bad("game count"))?,
                "policies" => {
                    cfg.policies = value.split(',').map(|p| p.parse()).collect::<Result<_, _>>().map_err(|_| bad("policy list"))?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "boundary" => cfg.boundary = value.parse().map_err(|_| bad("boundary"))?,
                "schedule" => cfg.schedule = value.parse().map_err(|_| bad("schedule"))?,
                "cores" => cfg.extract_cores = parse_bool(value).ok_or_else(|| bad("flag"))?,
                "time_budget" => {
                    let secs: f64 = value.parse().map_err(|_| bad("time budget"))?;
                    if !(secs >= 0.0 && secs.is_finite()) {
                        return Err(bad("time budget"));
                    }
                    cfg.time_budget = (secs > 0.0).then(|| Duration::from_secs_f64(secs));
                }
                "timing" => cfg.timing = parse_bool(value).ok_or_else(|| bad("flag"))?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                "plots" => cfg.plots = parse_bool(value).ok_or_else(|| bad("flag"))?,
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return invalid("grid sizes must be a non-empty list of positive integers");
        }
        if self.densities.is_empty() || self.densities.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return invalid("densities must be a non-empty list inside (0, 1)");
        }
        if self.games == 0 {
            return invalid("games per point must be at least 1");
        }
        if self.policies.is_empty() {
            return invalid("at least one policy is required");
        }
        Ok(())
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// Densities from a comma list or an inclusive `start:stop:step` range.
pub fn parse_densities(s: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [one] => parse_list(one),
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) = (start.parse().ok()?, stop.parse().ok()?, step.parse().ok()?);
            (step > 0.0 && stop >= start).then(|| density_range(start, stop, step))
        }
        _ => None,
    }
}

/// `start, start + step, ...` up to `stop` inclusive, rounded to 1e-9 so that
/// printed values stay short.
pub fn density_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect()
}
