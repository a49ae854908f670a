use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use super::{Board, Boundary, Lattice, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Covered,
    Revealed,
    Flagged,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal move at {site}: {reason}")]
    IllegalMove { site: Site, reason: &'static str },
    #[error("site {0} is not revealed")]
    IllegalQuery(Site),
    #[error("site {0} is outside the board")]
    OutOfBounds(Site),
    #[error("the game is over")]
    GameOver,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RevealOutcome {
    /// Every site uncovered by this move, flood fill included, row-major.
    SafeRevealed(Vec<Site>),
    Boom,
}

/// Inner and outer frontier of an instance, both row-major.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Frontiers {
    /// Revealed sites with at least one covered, unflagged neighbor.
    pub inner: Vec<Site>,
    /// Covered, unflagged sites with at least one revealed neighbor.
    pub outer: Vec<Site>,
}

impl Frontiers {
    pub fn is_empty(&self) -> bool {
        self.inner.is_empty() && self.outer.is_empty()
    }
}

/// What the player sees: per-site status plus the labels of revealed sites.
///
/// An instance need not come from a real board; hand-written fixtures may be
/// inconsistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    lattice: Arc<Lattice>,
    status: Vec<Status>,
    labels: Vec<u8>,
}

impl Instance {
    /// A fully covered instance.
    pub fn covered(lattice: Arc<Lattice>) -> Self {
        let len = lattice.len();
        Instance { lattice, status: vec![Status::Covered; len], labels: vec![0; len] }
    }

    pub(crate) fn from_parts(lattice: Arc<Lattice>, status: Vec<Status>, labels: Vec<u8>) -> Self {
        debug_assert_eq!(status.len(), lattice.len());
        debug_assert_eq!(labels.len(), lattice.len());
        Instance { lattice, status, labels }
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

    pub fn status(&self, site: Site) -> Status {
        self.status[self.lattice.index(site)]
    }

    #[inline]
    pub(crate) fn status_idx(&self, idx: usize) -> Status {
        self.status[idx]
    }

    /// The label of a revealed site.
    pub fn label(&self, site: Site) -> Option<u8> {
        let idx = self.lattice.index(site);
        (self.status[idx] == Status::Revealed).then_some(self.labels[idx])
    }

    /// Label minus the number of flagged neighbors.
    pub fn effective_label(&self, site: Site) -> Result<i32, MoveError> {
        if !self.lattice.contains(site) {
            return Err(MoveError::OutOfBounds(site));
        }
        let idx = self.lattice.index(site);
        if self.status[idx] != Status::Revealed {
            return Err(MoveError::IllegalQuery(site));
        }
        Ok(self.effective_label_idx(idx))
    }

    pub(crate) fn effective_label_idx(&self, idx: usize) -> i32 {
        let flags = self.lattice.adj(idx).filter(|&j| self.status[j] == Status::Flagged).count();
        self.labels[idx] as i32 - flags as i32
    }

    /// Covered, unflagged neighbors of a flat index, row-major.
    pub(crate) fn open_neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.lattice.adj(idx).filter(|&j| self.status[j] == Status::Covered)
    }

    pub fn frontiers(&self) -> Frontiers {
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for idx in 0..self.lattice.len() {
            match self.status[idx] {
                Status::Revealed => {
                    if self.open_neighbors(idx).next().is_some() {
                        inner.push(self.lattice.site(idx));
                    }
                }
                Status::Covered => {
                    if self.lattice.adj(idx).any(|j| self.status[j] == Status::Revealed) {
                        outer.push(self.lattice.site(idx));
                    }
                }
                Status::Flagged => {}
            }
        }
        Frontiers { inner, outer }
    }

    pub fn count(&self, status: Status) -> usize {
        self.status.iter().filter(|&&s| s == status).count()
    }

    pub(crate) fn set(&mut self, idx: usize, status: Status, label: u8) {
        self.status[idx] = status;
        self.labels[idx] = label;
    }
}

/// A game in progress on a ground-truth board.
#[derive(Debug, Clone)]
pub struct GameState<'a> {
    board: &'a Board,
    instance: Instance,
    turns: usize,
    lost: bool,
}

impl<'a> GameState<'a> {
    pub fn new(board: &'a Board) -> Self {
        GameState { board, instance: Instance::covered(Arc::clone(board.lattice())), turns: 0, lost: false }
    }

    /// Resumes a game from an instance overlay, checking it against the board.
    pub fn from_instance(board: &'a Board, instance: Instance) -> Result<Self, MoveError> {
        if instance.lattice() != board.lattice() {
            return Err(MoveError::IllegalMove { site: Site::new(0, 0), reason: "overlay does not match board geometry" });
        }
        for idx in 0..board.lattice().len() {
            if instance.status_idx(idx) == Status::Revealed
                && (board.is_mine_idx(idx) || instance.labels[idx] != board.label_idx(idx))
            {
                return Err(MoveError::IllegalMove {
                    site: board.lattice().site(idx),
                    reason: "overlay label disagrees with board",
                });
            }
        }
        Ok(GameState { board, instance, turns: 0, lost: false })
    }

    pub fn board(&self) -> &'a Board {
        self.board
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn status(&self, site: Site) -> Status {
        self.instance.status(site)
    }

    pub fn is_lost(&self) -> bool {
        self.lost
    }

    pub fn turns(&self) -> usize {
        self.turns
    }

    pub fn next_turn(&mut self) {
        self.turns += 1;
    }

    fn check(&self, site: Site) -> Result<usize, MoveError> {
        if self.lost {
            return Err(MoveError::GameOver);
        }
        let lat = self.board.lattice();
        if !lat.contains(site) {
            return Err(MoveError::OutOfBounds(site));
        }
        Ok(lat.index(site))
    }

    /// Uncovers `site`, flood-filling through zero labels.
    pub fn reveal(&mut self, site: Site) -> Result<RevealOutcome, MoveError> {
        let idx = self.check(site)?;
        match self.instance.status_idx(idx) {
            Status::Revealed => return Err(MoveError::IllegalMove { site, reason: "already revealed" }),
            Status::Flagged => return Err(MoveError::IllegalMove { site, reason: "site is flagged" }),
            Status::Covered => {}
        }
        if self.board.is_mine_idx(idx) {
            self.lost = true;
            return Ok(RevealOutcome::Boom);
        }
        let lattice = Arc::clone(self.board.lattice());
        let mut revealed = Vec::new();
        let mut queue = VecDeque::from([idx]);
        self.instance.set(idx, Status::Revealed, self.board.label_idx(idx));
        while let Some(i) = queue.pop_front() {
            revealed.push(i);
            if self.board.label_idx(i) != 0 {
                continue;
            }
            for j in lattice.adj(i) {
                if self.instance.status_idx(j) == Status::Covered {
                    debug_assert!(!self.board.is_mine_idx(j));
                    self.instance.set(j, Status::Revealed, self.board.label_idx(j));
                    queue.push_back(j);
                }
            }
        }
        revealed.sort_unstable();
        Ok(RevealOutcome::SafeRevealed(revealed.into_iter().map(|i| lattice.site(i)).collect()))
    }

    pub fn flag(&mut self, site: Site) -> Result<(), MoveError> {
        let idx = self.check(site)?;
        match self.instance.status_idx(idx) {
            Status::Revealed => Err(MoveError::IllegalMove { site, reason: "cannot flag a revealed site" }),
            Status::Flagged => Err(MoveError::IllegalMove { site, reason: "already flagged" }),
            Status::Covered => {
                self.instance.set(idx, Status::Flagged, 0);
                Ok(())
            }
        }
    }

    pub fn effective_label(&self, site: Site) -> Result<i32, MoveError> {
        self.instance.effective_label(site)
    }

    pub fn frontiers(&self) -> Frontiers {
        self.instance.frontiers()
    }

    /// Flagged sites that really hold a mine.
    pub fn flagged_mines(&self) -> usize {
        (0..self.board.lattice().len())
            .filter(|&i| self.instance.status_idx(i) == Status::Flagged && self.board.is_mine_idx(i))
            .count()
    }

    pub fn all_mines_flagged(&self) -> bool {
        (0..self.board.lattice().len())
            .all(|i| !self.board.is_mine_idx(i) || self.instance.status_idx(i) == Status::Flagged)
    }

    pub fn covered_unflagged(&self) -> usize {
        self.instance.count(Status::Covered)
    }
}

impl AsRef<Instance> for GameState<'_> {
    fn as_ref(&self) -> &Instance {
        &self.instance
    }
}

impl AsRef<Instance> for Instance {
    fn as_ref(&self) -> &Instance {
        self
    }
}
