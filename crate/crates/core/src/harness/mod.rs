//! Density sweeps over many games, their aggregation and artifacts.
//!
//! Every game's board seed is a pure function of the master seed and the
//! game's `(n, density index, game index)` coordinates, so results do not
//! depend on worker count, and all policies at a point play the same boards.

mod config;
mod plot;

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::player::{run_game, GameRecord, Outcome, PlayConfig, PlayerError, Policy};
use crate::rng::derive_seed;
use crate::sat::SolverConfig;
use crate::stats::{mean_se, paired_t_test, PairedTest};

pub use config::{density_range, parse_densities, ConfigError, SweepConfig};
pub use plot::{axis_range, percolation_series, render_plots, render_svg, sweep_series, PlotError, PlotKind, Series};

/// Environment variable holding the worker thread count.
pub const WORKERS_ENV: &str = "SWEEPER_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("game n={n} rho={rho} seed={seed} policy={policy}: {source}")]
    Game { n: usize, rho: f64, seed: u64, policy: String, source: PlayerError },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Invalid(String),
}

/// One row of `games.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRow {
    pub n: usize,
    pub rho: f64,
    pub policy: String,
    pub seed: u64,
    pub alpha: f64,
    pub max_core: Option<usize>,
    pub turns: usize,
    pub outcome: String,
    pub wall_ms: u64,
}

impl GameRow {
    pub fn from_record(r: &GameRecord, policy: Policy, timing: bool) -> Self {
        GameRow {
            n: r.n,
            rho: r.rho,
            policy: policy.to_string(),
            seed: r.seed,
            alpha: r.alpha,
            max_core: r.max_core,
            turns: r.turns,
            outcome: r.outcome.to_string(),
            wall_ms: if timing { r.wall_time.as_millis() as u64 } else { 0 },
        }
    }
}

/// One row of `summary.csv`: statistics for one `(n, rho, policy)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub rho: f64,
    pub policy: String,
    /// Games played; boards that could not be generated are excluded.
    pub games: usize,
    pub alpha_mean: f64,
    pub alpha_se: f64,
    pub maxcore_mean: Option<f64>,
    pub maxcore_se: Option<f64>,
    /// Fraction of played games that ended with no inference left.
    pub stuck_fraction: f64,
    pub mean_wall_time: f64,
    pub timed_out: usize,
    pub exhausted: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Rows in canonical order: size, density, policy, game.
    pub games: Vec<GameRow>,
    pub records: Vec<SweepRecord>,
    /// Points loaded from completion markers instead of being replayed.
    pub resumed_points: usize,
}

/// Board seed of one game.
pub fn game_seed(master: u64, n: usize, rho_index: usize, game: usize) -> u64 {
    derive_seed(master, &[n as u64, rho_index as u64, game as u64])
}

/// `(1 - P)^T`: the chance of never meeting an unsolvable position in `T`
/// turns when each turn has one with probability `P`. A scaling form only.
pub fn model_alpha(p: f64, t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    assert!(t >= 0.0, "turn count {t} is negative");
    (1.0 - p).powf(t)
}

fn play_config(config: &SweepConfig) -> PlayConfig {
    PlayConfig {
        solver: SolverConfig::default(),
        extract_cores: config.extract_cores,
        time_budget: config.time_budget,
        schedule: config.schedule,
    }
}

fn point_file(dir: &Path, n: usize, rho_index: usize, policy: Policy) -> PathBuf {
    let name = policy.to_string().replace(':', "-");
    dir.join("points").join(format!("n{n}_rho{rho_index:03}_{name}.csv"))
}

/// Runs `f` on a pool sized by [`WORKERS_ENV`], or on the global pool.
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R, HarnessError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let threads: usize = v.trim().parse().map_err(|_| HarnessError::Pool(format!("{WORKERS_ENV}={v:?}")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| HarnessError::Pool(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn play_point(config: &SweepConfig, n: usize, rho_index: usize, policy: Policy) -> Result<Vec<GameRow>, HarnessError> {
    let rho = config.densities[rho_index];
    let play = play_config(config);
    (0..config.games)
        .into_par_iter()
        .map(|g| {
            let seed = game_seed(config.seed, n, rho_index, g);
            let r = run_game(n, rho, seed, config.boundary, policy, &play).map_err(|source| HarnessError::Game {
                n,
                rho,
                seed,
                policy: policy.to_string(),
                source,
            })?;
            Ok(GameRow::from_record(&r, policy, config.timing))
        })
        .collect()
}

/// Plays every game of the sweep and aggregates it.
///
/// With an output directory, each finished point is written to
/// `points/` first (atomically, via rename), and a rerun loads finished
/// points instead of replaying them. `games.csv`, `summary.csv` and the plots
/// are written at the end.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, HarnessError> {
    config.validate()?;
    if let Some(dir) = &config.output {
        fs::create_dir_all(dir.join("points"))?;
    }
    let mut games = Vec::new();
    let mut resumed_points = 0;
    for &n in &config.sizes {
        for rho_index in 0..config.densities.len() {
            for &policy in &config.policies {
                let marker = config.output.as_ref().map(|d| point_file(d, n, rho_index, policy));
                if let Some(rows) = marker.as_ref().filter(|m| m.exists()).map(|m| read_games_csv(m)).transpose()? {
                    if rows.len() == config.games {
                        games.extend(rows);
                        resumed_points += 1;
                        continue;
                    }
                }
                let rows = with_workers(|| play_point(config, n, rho_index, policy))??;
                if let Some(m) = &marker {
                    let tmp = m.with_extension("tmp");
                    write_games_csv(&rows, &tmp)?;
                    fs::rename(&tmp, m)?;
                }
                games.extend(rows);
            }
        }
    }
    let records = aggregate(&games);
    if let Some(dir) = &config.output {
        write_games_csv(&games, &dir.join("games.csv"))?;
        write_summary_csv(&records, &dir.join("summary.csv"))?;
        if config.plots {
            render_plots(&records, PlotKind::Alpha, &dir.join("alpha.svg"))?;
            if records.iter().any(|r| r.maxcore_mean.is_some()) {
                render_plots(&records, PlotKind::Core, &dir.join("core.svg"))?;
            }
        }
    }
    Ok(SweepResult { games, records, resumed_points })
}

/// Per-point statistics, in order of first appearance.
pub fn aggregate(rows: &[GameRow]) -> Vec<SweepRecord> {
    let mut order: Vec<(usize, u64, &str)> = Vec::new();
    let mut groups: HashMap<(usize, u64, &str), Vec<&GameRow>> = HashMap::new();
    for r in rows {
        let key = (r.n, r.rho.to_bits(), r.policy.as_str());
        groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&key).unwrap().push(r);
    }
    let exhausted = Outcome::GenerationExhausted.to_string();
    order
        .into_iter()
        .map(|key| {
            let all = &groups[&key];
            let played: Vec<&GameRow> = all.iter().copied().filter(|r| r.outcome != exhausted).collect();
            let alphas: Vec<f64> = played.iter().map(|r| r.alpha).collect();
            let (alpha_mean, alpha_se) = mean_se(&alphas);
            let cores: Option<Vec<f64>> = played.iter().map(|r| r.max_core.map(|c| c as f64)).collect();
            let core_stats = cores.filter(|c| !c.is_empty()).map(|c| mean_se(&c));
            let count = |o: Outcome| played.iter().filter(|r| r.outcome == o.as_str()).count();
            let walls: Vec<f64> = played.iter().map(|r| r.wall_ms as f64).collect();
            let games = played.len();
            SweepRecord {
                n: key.0,
                rho: f64::from_bits(key.1),
                policy: key.2.to_string(),
                games,
                alpha_mean,
                alpha_se,
                maxcore_mean: core_stats.map(|s| s.0),
                maxcore_se: core_stats.map(|s| s.1),
                stuck_fraction: if games == 0 { 0.0 } else { count(Outcome::Stuck) as f64 / games as f64 },
                mean_wall_time: if games == 0 { 0.0 } else { mean_se(&walls).0 },
                timed_out: count(Outcome::TimedOut),
                exhausted: all.len() - games,
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_games_csv(rows: &[GameRow], path: &Path) -> Result<(), HarnessError> {
    write_csv(rows, path)
}

pub fn write_summary_csv(records: &[SweepRecord], path: &Path) -> Result<(), HarnessError> {
    write_csv(records, path)
}

pub fn read_games_csv(path: &Path) -> Result<Vec<GameRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Paired difference `baseline - policy` in alpha at one `(n, rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedComparison {
    pub n: usize,
    pub rho: f64,
    pub baseline: String,
    pub policy: String,
    pub baseline_mean: f64,
    pub policy_mean: f64,
    pub test: PairedTest,
}

/// Compares every other policy against `baseline` on shared board seeds.
pub fn paired_comparisons(rows: &[GameRow], baseline: Policy) -> Vec<PairedComparison> {
    let base = baseline.to_string();
    let exhausted = Outcome::GenerationExhausted.to_string();
    let mut by_point: Vec<((usize, u64), Vec<&GameRow>)> = Vec::new();
    for r in rows.iter().filter(|r| r.outcome != exhausted) {
        let key = (r.n, r.rho.to_bits());
        match by_point.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => by_point.push((key, vec![r])),
        }
    }
    let mut out = Vec::new();
    for ((n, rho), point) in by_point {
        let baseline_alpha: HashMap<u64, f64> =
            point.iter().filter(|r| r.policy == base).map(|r| (r.seed, r.alpha)).collect();
        let mut policies: Vec<&str> = Vec::new();
        for r in &point {
            if r.policy != base && !policies.contains(&r.policy.as_str()) {
                policies.push(&r.policy);
            }
        }
        for p in policies {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for r in point.iter().filter(|r| r.policy == p) {
                if let Some(&x) = baseline_alpha.get(&r.seed) {
                    a.push(x);
                    b.push(r.alpha);
                }
            }
            if a.is_empty() {
                continue;
            }
            out.push(PairedComparison {
                n,
                rho: f64::from_bits(rho),
                baseline: base.clone(),
                policy: p.to_string(),
                baseline_mean: mean_se(&a).0,
                policy_mean: mean_se(&b).0,
                test: paired_t_test(&a, &b),
            });
        }
    }
    out
}

/// Sweeps the SAT player against k-set search and pairs them per seed.
pub fn kset_compare(config: &SweepConfig) -> Result<(SweepResult, Vec<PairedComparison>), HarnessError> {
    if !config.policies.contains(&Policy::SatInference) || !config.policies.iter().any(|p| matches!(p, Policy::KSet(_))) {
        return Err(HarnessError::Invalid("k-set comparison needs the sat policy and at least one kset:K".into()));
    }
    let result = run_sweep(config)?;
    let pairs = paired_comparisons(&result.games, Policy::SatInference);
    Ok((result, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(games: usize) -> SweepConfig {
        SweepConfig {
            sizes: vec![10],
            densities: vec![0.1, 0.3],
            games,
            policies: vec![Policy::SatInference, Policy::KSet(1)],
            timing: false,
            plots: false,
            ..SweepConfig::desk()
        }
    }

    #[test]
    fn model_alpha_values() {
        assert_eq!(model_alpha(0.0, 5.0), 1.0);
        assert_eq!(model_alpha(1.0, 3.0), 0.0);
        assert!((model_alpha(0.1, 10.0) - 0.3486784401).abs() < 1e-10);
    }

    #[test]
    fn seeds_are_shared_across_policies() {
        let r = run_sweep(&small(4)).unwrap();
        assert_eq!(r.games.len(), 2 * 2 * 4);
        for chunk in r.games.chunks(8) {
            let sat: Vec<u64> = chunk[..4].iter().map(|g| g.seed).collect();
            let kset: Vec<u64> = chunk[4..].iter().map(|g| g.seed).collect();
            assert_eq!(sat, kset);
        }
        assert_eq!(r.records.len(), 4);
        assert!(r.records.iter().all(|rec| (rec.policy == "sat") == rec.maxcore_mean.is_some()));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = small(5);
        let a = run_sweep(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_sweep(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resume_reuses_finished_points() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SweepConfig { output: Some(dir.path().to_path_buf()), ..small(3) };
        let first = run_sweep(&cfg).unwrap();
        assert_eq!(first.resumed_points, 0);
        let bytes = fs::read(dir.path().join("games.csv")).unwrap();
        // Drop one point; the rest must be reloaded.
        fs::remove_file(point_file(dir.path(), 10, 1, Policy::KSet(1))).unwrap();
        let second = run_sweep(&cfg).unwrap();
        assert_eq!(second.resumed_points, 3);
        assert_eq!(second.games, first.games);
        assert_eq!(fs::read(dir.path().join("games.csv")).unwrap(), bytes);
    }

    #[test]
    fn aggregation_excludes_exhausted_boards() {
        let row = |alpha: f64, outcome: Outcome| GameRow {
            n: 4,
            rho: 0.5,
            policy: "sat".into(),
            seed: 0,
            alpha,
            max_core: Some(2),
            turns: 1,
            outcome: outcome.to_string(),
            wall_ms: 0,
        };
        let rows = vec![row(1.0, Outcome::AllMinesFlagged), row(0.0, Outcome::Stuck), row(0.0, Outcome::GenerationExhausted)];
        let recs = aggregate(&rows);
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!((r.games, r.exhausted), (2, 1));
        assert_eq!(r.alpha_mean, 0.5);
        assert_eq!(r.alpha_se, 0.5);
        assert_eq!(r.stuck_fraction, 0.5);
        assert_eq!(r.maxcore_mean, Some(2.0));
    }

    #[test]
    fn paired_comparison_lines_up_seeds() {
        let r = run_sweep(&small(6)).unwrap();
        let pairs = paired_comparisons(&r.games, Policy::SatInference);
        assert_eq!(pairs.len(), 2);
        for p in pairs {
            assert_eq!(p.test.pairs, 6);
            // The SAT player never does worse than any sound policy.
            assert!(p.test.mean_diff >= 0.0);
        }
    }
}
