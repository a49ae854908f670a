//! Ground-truth boards, the player-facing game state and their text formats.

mod game;
mod lattice;
mod text;

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::rng::seeded_rng;

pub use game::{Frontiers, GameState, Instance, MoveError, RevealOutcome, Status};
pub use lattice::{neighbors, Boundary, Lattice, Site};
pub use text::{parse_board, parse_instance, serialize_board, serialize_instance, ParseError};

/// Boards rejected while looking for a zero-labeled empty site before giving up.
pub const ZERO_START_RETRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoardError {
    #[error("mine density {0} outside [0, 1]")]
    InvalidDensity(f64),
    #[error("a {n}x{n} board with {mines} mines has no empty site")]
    NoEmptySite { n: usize, mines: usize },
    #[error("no board with a zero-labeled site found in {0} attempts")]
    GenerationExhausted(usize),
}

/// Number of mines on an `n × n` board at density `rho`: `⌊n²ρ⌋`.
///
/// A relative tolerance of 1e-9 absorbs binary rounding, so `0.29 * 100`
/// yields 29 rather than 28.
pub fn mine_count(n: usize, rho: f64) -> usize {
    let exact = (n * n) as f64 * rho;
    (exact + exact.abs() * 1e-9 + 1e-12).floor() as usize
}

/// A ground-truth mine layout with its labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    lattice: Arc<Lattice>,
    mines: Vec<bool>,
    labels: Vec<u8>,
    start: Option<Site>,
}

impl Board {
    /// Builds a board from explicit mine positions and computes every label.
    pub fn from_mines(n: usize, boundary: Boundary, mines: impl IntoIterator<Item = Site>) -> Self {
        let lattice = Arc::new(Lattice::new(n, boundary));
        let mut mask = vec![false; n * n];
        for s in mines {
            assert!(lattice.contains(s), "mine {s} outside {n}x{n} board");
            mask[lattice.index(s)] = true;
        }
        Self::from_mask(lattice, mask)
    }

    fn from_mask(lattice: Arc<Lattice>, mines: Vec<bool>) -> Self {
        let labels = (0..lattice.len())
            .map(|i| lattice.adj(i).filter(|&j| mines[j]).count() as u8)
            .collect();
        Board { lattice, mines, labels, start: None }
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn boundary(&self) -> Boundary {
        self.lattice.boundary()
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn is_mine(&self, site: Site) -> bool {
        self.mines[self.lattice.index(site)]
    }

    pub(crate) fn is_mine_idx(&self, idx: usize) -> bool {
        self.mines[idx]
    }

    pub fn label(&self, site: Site) -> u8 {
        self.labels[self.lattice.index(site)]
    }

    pub(crate) fn label_idx(&self, idx: usize) -> u8 {
        self.labels[idx]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Mined sites in row-major order.
    pub fn mines(&self) -> impl Iterator<Item = Site> + '_ {
        let n = self.n();
        self.mines.iter().enumerate().filter(|(_, &m)| m).map(move |(i, _)| Site::from_index(i, n))
    }

    pub fn mine_mask(&self) -> &[bool] {
        &self.mines
    }

    pub fn num_mines(&self) -> usize {
        self.mines.iter().filter(|&&m| m).count()
    }

    /// The zero-labeled starting site disclosed to the player, if one was drawn.
    pub fn start(&self) -> Option<Site> {
        self.start
    }

    pub fn with_start(mut self, start: Option<Site>) -> Self {
        if let Some(s) = start {
            assert!(!self.is_mine(s) && self.label(s) == 0, "start {s} must be an empty zero site");
        }
        self.start = start;
        self
    }

    /// Empty sites with label zero, row-major.
    pub fn zero_sites(&self) -> impl Iterator<Item = Site> + '_ {
        let n = self.n();
        (0..self.lattice.len())
            .filter(|&i| !self.mines[i] && self.labels[i] == 0)
            .map(move |i| Site::from_index(i, n))
    }
}

/// Draws a uniformly random board with exactly `⌊n²ρ⌋` mines.
///
/// With `require_zero`, boards without an empty zero-labeled site are rejected
/// (up to [`ZERO_START_RETRIES`] draws) and a start site is chosen uniformly
/// among the zero sites of the accepted board. All randomness flows from one
/// ChaCha8 stream seeded with `seed`.
pub fn generate_board(n: usize, rho: f64, seed: u64, boundary: Boundary, require_zero: bool) -> Result<Board, BoardError> {
    if !(0.0..=1.0).contains(&rho) || rho.is_nan() {
        return Err(BoardError::InvalidDensity(rho));
    }
    let mines = mine_count(n, rho);
    if mines >= n * n {
        return Err(BoardError::NoEmptySite { n, mines });
    }
    let lattice = Arc::new(Lattice::new(n, boundary));
    let mut rng = seeded_rng(seed);
    let mut order: Vec<usize> = (0..n * n).collect();
    let attempts = if require_zero { ZERO_START_RETRIES } else { 1 };
    for _ in 0..attempts {
        let (picked, _) = order.partial_shuffle(&mut rng, mines);
        let mut mask = vec![false; n * n];
        for &i in picked.iter() {
            mask[i] = true;
        }
        let board = Board::from_mask(Arc::clone(&lattice), mask);
        if !require_zero {
            return Ok(board);
        }
        let zeros: Vec<Site> = board.zero_sites().collect();
        if !zeros.is_empty() {
            let start = zeros[rng.random_range(0..zeros.len())];
            return Ok(board.with_start(Some(start)));
        }
    }
    Err(BoardError::GenerationExhausted(ZERO_START_RETRIES))
}
