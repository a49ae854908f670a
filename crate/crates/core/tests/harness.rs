use std::collections::BTreeMap;
use std::fs;

use sweeper_core::board::Boundary;
use sweeper_core::harness::{kset_compare, run_sweep, SweepConfig};
use sweeper_core::player::{Policy, Schedule};

fn config(dir: &std::path::Path) -> SweepConfig {
    SweepConfig {
        sizes: vec![12],
        densities: vec![0.1, 0.2, 0.3],
        games: 8,
        policies: vec![Policy::SatInference, Policy::KSet(2)],
        seed: 9,
        boundary: Boundary::Torus,
        schedule: Schedule::Batch,
        timing: false,
        output: Some(dir.to_path_buf()),
        ..SweepConfig::desk()
    }
}

#[derive(Default)]
struct Acc {
    count: usize,
    alpha: f64,
    core: f64,
    cores: usize,
}

/// Recomputes per-point means from `games.csv` in one pass, reading raw
/// string fields, and compares with `summary.csv`.
#[test]
fn summary_matches_one_pass_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    run_sweep(&config(dir.path())).unwrap();
    let mut acc: BTreeMap<(String, String, String), Acc> = BTreeMap::new();
    let mut games = csv::Reader::from_path(dir.path().join("games.csv")).unwrap();
    let headers = games.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["n", "rho", "policy", "seed", "alpha", "max_core", "turns", "outcome", "wall_ms"]
    );
    for row in games.records() {
        let row = row.unwrap();
        if &row[7] == "generation_exhausted" {
            continue;
        }
        let a = acc.entry((row[0].to_string(), row[1].to_string(), row[2].to_string())).or_default();
        a.count += 1;
        a.alpha += row[4].parse::<f64>().unwrap();
        if !row[5].is_empty() {
            a.cores += 1;
            a.core += row[5].parse::<f64>().unwrap();
        }
        assert_eq!(&row[8], "0");
    }
    let mut summary = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    let h = summary.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|x| x == name).unwrap();
    let mut seen = 0;
    for row in summary.records() {
        let row = row.unwrap();
        let a = &acc[&(row[col("n")].to_string(), row[col("rho")].to_string(), row[col("policy")].to_string())];
        assert_eq!(row[col("games")].parse::<usize>().unwrap(), a.count);
        let mean: f64 = row[col("alpha_mean")].parse().unwrap();
        assert!((mean - a.alpha / a.count as f64).abs() <= 1e-12);
        let core = &row[col("maxcore_mean")];
        if a.cores == 0 {
            assert!(core.is_empty());
        } else {
            assert!((core.parse::<f64>().unwrap() - a.core / a.cores as f64).abs() <= 1e-12);
        }
        seen += 1;
    }
    assert_eq!(seen, acc.len());
    assert_eq!(seen, 6);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = |d| SweepConfig { games: 1, ..config(d) };
    run_sweep(&cfg(a.path())).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
    pool.install(|| run_sweep(&cfg(b.path()))).unwrap();
    for file in ["games.csv", "summary.csv", "alpha.svg", "core.svg"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
}

#[test]
fn kset_compare_pairs_shared_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let (result, pairs) = kset_compare(&SweepConfig { output: None, ..config(dir.path()) }).unwrap();
    assert_eq!(pairs.len(), 3);
    for p in &pairs {
        assert_eq!(p.test.pairs, 8);
        assert!(p.baseline_mean >= p.policy_mean);
    }
    let seeds = |policy: &str, rho: f64| -> Vec<u64> {
        result.games.iter().filter(|g| g.policy == policy && g.rho == rho).map(|g| g.seed).collect()
    };
    assert_eq!(seeds("sat", 0.2), seeds("kset:2", 0.2));
    assert!(kset_compare(&SweepConfig { policies: vec![Policy::SatInference], ..config(dir.path()) }).is_err());
}
