//! Cluster statistics for site occupancy: the sites a Minesweeper board makes
//! informative (mines and nonzero labels) against independent percolation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::board::{generate_board, Board, BoardError, Boundary};
use crate::rng::{derive_seed, seeded_rng};
use crate::stats::mean_se;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    n: usize,
    occupied: Vec<bool>,
    boundary: Boundary,
}

impl OccupancyGrid {
    pub fn new(n: usize, boundary: Boundary, occupied: Vec<bool>) -> Self {
        assert_eq!(occupied.len(), n * n, "grid must have n*n sites");
        OccupancyGrid { n, occupied, boundary }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_occupied(&self, row: usize, col: usize) -> bool {
        self.occupied[row * self.n + col]
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn num_occupied(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn occupied_fraction(&self) -> f64 {
        if self.occupied.is_empty() {
            return 0.0;
        }
        self.num_occupied() as f64 / self.occupied.len() as f64
    }
}

/// A site is occupied when it holds a mine or a nonzero label.
pub fn minesweeper_occupancy(board: &Board) -> OccupancyGrid {
    let occupied = board.mine_mask().iter().zip(board.labels()).map(|(&m, &l)| m || l > 0).collect();
    OccupancyGrid::new(board.n(), board.boundary(), occupied)
}

/// Every site occupied independently with probability `p`.
pub fn independent_occupancy(n: usize, p: f64, seed: u64, boundary: Boundary) -> OccupancyGrid {
    assert!((0.0..=1.0).contains(&p), "occupation probability {p} outside [0, 1]");
    let mut rng = seeded_rng(seed);
    let occupied = (0..n * n).map(|_| rng.random_bool(p)).collect();
    OccupancyGrid::new(n, boundary, occupied)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    #[default]
    Nearest4,
    Moore8,
}

impl FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nearest4" | "4" => Ok(Connectivity::Nearest4),
            "moore8" | "8" => Ok(Connectivity::Moore8),
            other => Err(format!("unknown connectivity {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    /// Every cluster size, descending, spanning clusters included.
    pub sizes: Vec<usize>,
    /// Sizes of the clusters that span the grid, descending.
    pub spanning: Vec<usize>,
    /// Second-moment average over the non-spanning clusters, if any remain.
    pub s_avg: Option<f64>,
    pub spanning_excluded: bool,
}

impl ClusterStats {
    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }
}

/// Union-find whose nodes carry their displacement from the root, so that a
/// cluster closing a loop around the torus is detected as wrapping.
struct Clusters {
    parent: Vec<usize>,
    size: Vec<usize>,
    offset: Vec<(i32, i32)>,
    wraps: Vec<bool>,
    // Bits 0..4: touches top, bottom, left, right edge.
    edges: Vec<u8>,
}

impl Clusters {
    fn new(len: usize) -> Self {
        Clusters {
            parent: (0..len).collect(),
            size: vec![1; len],
            offset: vec![(0, 0); len],
            wraps: vec![false; len],
            edges: vec![0; len],
        }
    }

    fn find(&mut self, x: usize) -> (usize, (i32, i32)) {
        let mut path = Vec::new();
        let mut r = x;
        while self.parent[r] != r {
            path.push(r);
            r = self.parent[r];
        }
        // Walk back from just below the root, accumulating offsets.
        for &node in path.iter().rev() {
            let p = self.parent[node];
            if p != r {
                let (a, b) = (self.offset[node], self.offset[p]);
                self.offset[node] = (a.0 + b.0, a.1 + b.1);
                self.parent[node] = r;
            }
        }
        (r, if x == r { (0, 0) } else { self.offset[x] })
    }

    /// Joins `a` and `b`, where `b` sits at displacement `d` from `a`.
    fn union(&mut self, a: usize, b: usize, d: (i32, i32)) {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if (pb.0 - pa.0, pb.1 - pa.1) != d {
                self.wraps[ra] = true;
            }
            return;
        }
        // Position of rb relative to ra.
        let rel = (pa.0 + d.0 - pb.0, pa.1 + d.1 - pb.1);
        let (big, small, off) = if self.size[ra] >= self.size[rb] { (ra, rb, rel) } else { (rb, ra, (-rel.0, -rel.1)) };
        self.parent[small] = big;
        self.offset[small] = off;
        self.size[big] += self.size[small];
        self.wraps[big] |= self.wraps[small];
        self.edges[big] |= self.edges[small];
    }
}

/// Connected components of occupied sites under `connectivity` and the
/// grid's boundary. A cluster spans when it touches two opposite edges of an
/// open grid or wraps around a torus.
pub fn cluster_sizes(grid: &OccupancyGrid, connectivity: Connectivity) -> ClusterStats {
    let n = grid.n;
    let mut uf = Clusters::new(n * n);
    let forward: &[(i32, i32)] = match connectivity {
        Connectivity::Nearest4 => &[(0, 1), (1, 0)],
        Connectivity::Moore8 => &[(0, 1), (1, 0), (1, 1), (1, -1)],
    };
    if grid.boundary == Boundary::Open {
        for r in 0..n {
            for c in 0..n {
                uf.edges[r * n + c] =
                    (r == 0) as u8 | ((r == n - 1) as u8) << 1 | ((c == 0) as u8) << 2 | ((c == n - 1) as u8) << 3;
            }
        }
    }
    for r in 0..n {
        for c in 0..n {
            let i = r * n + c;
            if !grid.occupied[i] {
                continue;
            }
            for &(dr, dc) in forward {
                let (mut rr, mut cc) = (r as i64 + dr as i64, c as i64 + dc as i64);
                match grid.boundary {
                    Boundary::Open => {
                        if rr < 0 || cc < 0 || rr >= n as i64 || cc >= n as i64 {
                            continue;
                        }
                    }
                    Boundary::Torus => {
                        rr = rr.rem_euclid(n as i64);
                        cc = cc.rem_euclid(n as i64);
                    }
                }
                let j = rr as usize * n + cc as usize;
                if grid.occupied[j] {
                    uf.union(i, j, (dr, dc));
                }
            }
        }
    }
    let mut sizes = Vec::new();
    let mut spanning = Vec::new();
    for i in 0..n * n {
        if grid.occupied[i] && uf.parent[i] == i {
            sizes.push(uf.size[i]);
            let e = uf.edges[i];
            if uf.wraps[i] || e & 0b0011 == 0b0011 || e & 0b1100 == 0b1100 {
                spanning.push(uf.size[i]);
            }
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    spanning.sort_unstable_by(|a, b| b.cmp(a));
    let mut stats = ClusterStats { sizes, spanning, s_avg: None, spanning_excluded: false };
    stats.spanning_excluded = !stats.spanning.is_empty();
    stats.s_avg = avg_cluster_size(&stats).ok();
    stats
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PercolationError {
    #[error("no clusters to average")]
    NoClusters,
}

/// Estimators for the average cluster size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizeEstimator {
    /// `Σ s² / Σ s` over non-spanning clusters.
    #[default]
    SecondMoment,
    /// `Σ s² / Σ s` over every cluster.
    SecondMomentAll,
    /// Plain mean size over non-spanning clusters.
    Mean,
}

impl FromStr for SizeEstimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "second_moment" => Ok(SizeEstimator::SecondMoment),
            "second_moment_all" => Ok(SizeEstimator::SecondMomentAll),
            "mean" => Ok(SizeEstimator::Mean),
            other => Err(format!("unknown estimator {other:?}")),
        }
    }
}

pub fn avg_cluster_size(stats: &ClusterStats) -> Result<f64, PercolationError> {
    avg_cluster_size_with(stats, SizeEstimator::SecondMoment)
}

pub fn avg_cluster_size_with(stats: &ClusterStats, estimator: SizeEstimator) -> Result<f64, PercolationError> {
    // Spanning sizes are a sub-multiset of all sizes; remove one copy each.
    let mut kept: Vec<usize> = stats.sizes.clone();
    if estimator != SizeEstimator::SecondMomentAll {
        for s in &stats.spanning {
            if let Some(pos) = kept.iter().position(|k| k == s) {
                kept.remove(pos);
            }
        }
    }
    if kept.is_empty() {
        return Err(PercolationError::NoClusters);
    }
    let first: f64 = kept.iter().map(|&s| s as f64).sum();
    Ok(match estimator {
        SizeEstimator::Mean => first / kept.len() as f64,
        _ => kept.iter().map(|&s| (s * s) as f64).sum::<f64>() / first,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OccupancyMode {
    Minesweeper,
    Independent,
}

impl OccupancyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OccupancyMode::Minesweeper => "minesweeper",
            OccupancyMode::Independent => "independent",
        }
    }
}

impl fmt::Display for OccupancyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OccupancyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "minesweeper" => Ok(OccupancyMode::Minesweeper),
            "independent" => Ok(OccupancyMode::Independent),
            other => Err(format!("unknown occupancy mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationConfig {
    pub mode: OccupancyMode,
    /// Mine densities (Minesweeper mode) or occupation probabilities.
    pub params: Vec<f64>,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub connectivity: Connectivity,
    pub boundary: Boundary,
    pub estimator: SizeEstimator,
}

impl PercolationConfig {
    pub fn new(mode: OccupancyMode, params: Vec<f64>, n: usize, samples: usize, seed: u64) -> Self {
        PercolationConfig {
            mode,
            params,
            n,
            samples,
            seed,
            connectivity: Connectivity::Nearest4,
            boundary: Boundary::Open,
            estimator: SizeEstimator::SecondMoment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationRecord {
    pub mode: &'static str,
    pub param: f64,
    pub n: usize,
    pub s_avg_mean: f64,
    pub s_avg_se: f64,
    pub samples: usize,
}

/// Seed of one sample, independent of how samples are scheduled.
pub fn sample_seed(master: u64, mode: OccupancyMode, param_index: usize, sample: usize) -> u64 {
    derive_seed(master, &[mode as u64, param_index as u64, sample as u64])
}

/// Occupancy grid of one sample.
pub fn sample_grid(config: &PercolationConfig, param_index: usize, sample: usize) -> Result<OccupancyGrid, BoardError> {
    let seed = sample_seed(config.seed, config.mode, param_index, sample);
    let param = config.params[param_index];
    Ok(match config.mode {
        OccupancyMode::Independent => independent_occupancy(config.n, param, seed, config.boundary),
        OccupancyMode::Minesweeper => {
            minesweeper_occupancy(&generate_board(config.n, param, seed, config.boundary, false)?)
        }
    })
}

/// Mean and standard error of `s_avg` per parameter, in parameter order.
///
/// A sample whose clusters all span (or that has none) contributes 0.
pub fn percolation_sweep(config: &PercolationConfig) -> Result<Vec<PercolationRecord>, BoardError> {
    let mut out = Vec::with_capacity(config.params.len());
    for (pi, &param) in config.params.iter().enumerate() {
        let values: Vec<f64> = (0..config.samples)
            .into_par_iter()
            .map(|s| {
                let grid = sample_grid(config, pi, s)?;
                let stats = cluster_sizes(&grid, config.connectivity);
                Ok(avg_cluster_size_with(&stats, config.estimator).unwrap_or(0.0))
            })
            .collect::<Result<_, BoardError>>()?;
        let (mean, se) = mean_se(&values);
        out.push(PercolationRecord {
            mode: config.mode.as_str(),
            param,
            n: config.n,
            s_avg_mean: mean,
            s_avg_se: se,
            samples: config.samples,
        });
    }
    Ok(out)
}
