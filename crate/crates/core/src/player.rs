//! A Minesweeper player that never guesses: it uncovers a zero site, then
//! repeatedly applies every inference it can prove until the mines are all
//! flagged or nothing more follows.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::board::{Board, BoardError, Boundary, GameState, Instance, MoveError, RevealOutcome, Site, Status};
use crate::cnf::{build_formula, EncodeError, Var};
use crate::gmus::{extract_gmus_with, GmusError, GmusResult};
use crate::kset::{build_constraints, kset_infer};
use crate::sat::{SolveError, SolveResult, Solver, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Safe,
    Mine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inference {
    pub site: Site,
    pub verdict: Verdict,
    pub core: Option<GmusResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Policy {
    SatInference,
    KSet(usize),
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::SatInference => f.write_str("sat"),
            Policy::KSet(k) => write!(f, "kset:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown policy {0:?}, expected sat or kset:K with K >= 1")]
pub struct PolicyParseError(String);

impl FromStr for Policy {
    type Err = PolicyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "sat" {
            return Ok(Policy::SatInference);
        }
        s.strip_prefix("kset:")
            .and_then(|k| k.parse().ok())
            .filter(|&k| k >= 1)
            .map(Policy::KSet)
            .ok_or_else(|| PolicyParseError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    AllMinesFlagged,
    Stuck,
    /// The per-game time budget ran out before inference was exhausted.
    TimedOut,
    GenerationExhausted,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::AllMinesFlagged => "all_mines_flagged",
            Outcome::Stuck => "stuck",
            Outcome::TimedOut => "timed_out",
            Outcome::GenerationExhausted => "generation_exhausted",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Outcome::AllMinesFlagged, Outcome::Stuck, Outcome::TimedOut, Outcome::GenerationExhausted]
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| format!("unknown outcome {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub n: usize,
    pub rho: f64,
    pub seed: u64,
    /// Fraction of mines flagged; 1 on a board without mines.
    pub alpha: f64,
    /// Largest GMUS size over the game's inferences; `None` unless cores were extracted.
    pub max_core: Option<usize>,
    pub turns: usize,
    pub outcome: Outcome,
    pub wall_time: Duration,
}

impl GameRecord {
    /// Record for a board that could not be generated with a zero start.
    pub fn exhausted(n: usize, rho: f64, seed: u64) -> Self {
        GameRecord {
            n,
            rho,
            seed,
            alpha: 0.0,
            max_core: None,
            turns: 0,
            outcome: Outcome::GenerationExhausted,
            wall_time: Duration::ZERO,
        }
    }
}

/// How many verdicts a turn applies before the frontier is rebuilt.
///
/// Both schedules reach the same final position: every verdict stays valid
/// when more information arrives, so the set of sites eventually inferred is
/// the same. They differ in turn counts and in core sizes, since a batch pass
/// proves far-away sites through long chains that sequential play shortcuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Apply the first verdict of the row-major scan, then rebuild.
    #[default]
    Sequential,
    /// Apply every verdict of one pass, then rebuild.
    Batch,
}

impl Schedule {
    pub fn as_str(self) -> &'static str {
        match self {
            Schedule::Sequential => "sequential",
            Schedule::Batch => "batch",
        }
    }
}

impl FromStr for Schedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sequential" => Ok(Schedule::Sequential),
            "batch" => Ok(Schedule::Batch),
            other => Err(format!("unknown schedule {other:?}, expected sequential or batch")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayConfig {
    pub solver: SolverConfig,
    /// Extract a GMUS for every SAT inference.
    pub extract_cores: bool,
    pub time_budget: Option<Duration>,
    pub schedule: Schedule,
}

impl Default for PlayConfig {
    fn default() -> Self {
        PlayConfig { solver: SolverConfig::default(), extract_cores: true, time_budget: Some(Duration::from_secs(60)), schedule: Schedule::Sequential }
    }
}

/// One line of `--trace` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TurnTrace {
    pub turn: usize,
    pub inferences: usize,
    pub safe: usize,
    pub mines: usize,
    /// Largest core among this turn's inferences.
    pub core_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlayerError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolveError),
    #[error(transparent)]
    Gmus(#[from] GmusError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error("instance is inconsistent")]
    Inconsistent,
    #[error("inference at {0} contradicts the board")]
    Unsound(Site),
}

/// All SAT-provable verdicts on the outer frontier, row-major.
///
/// A variable needs no query for a value that some earlier model already
/// realized, so only the other polarity is tested; every model found along
/// the way is recorded. This yields exactly the verdicts of testing both
/// polarities for every variable.
pub fn infer_step(instance: impl AsRef<Instance>, config: &PlayConfig) -> Result<Vec<Inference>, PlayerError> {
    infer(instance.as_ref(), config, usize::MAX)
}

/// The first SAT verdict of the row-major scan, if any.
pub fn infer_first(instance: impl AsRef<Instance>, config: &PlayConfig) -> Result<Option<Inference>, PlayerError> {
    Ok(infer(instance.as_ref(), config, 1)?.pop())
}

fn infer(instance: &Instance, config: &PlayConfig, limit: usize) -> Result<Vec<Inference>, PlayerError> {
    let ff = build_formula(instance)?;
    let nv = ff.outer.len();
    if nv == 0 {
        return Ok(Vec::new());
    }
    let mut solver = Solver::new(&ff.cnf, config.solver);
    let all = solver.groups().to_vec();
    let mut seen = [vec![false; nv], vec![false; nv]];
    let record = |values: &[bool], seen: &mut [Vec<bool>; 2]| {
        for (j, &b) in values.iter().enumerate() {
            seen[b as usize][j] = true;
        }
    };
    match solver.solve(&all, &[])? {
        SolveResult::Sat(m) => record(m.values(), &mut seen),
        SolveResult::Unsat => return Err(PlayerError::Inconsistent),
    }
    let mut found = Vec::new();
    for j in 0..nv {
        if found.len() >= limit {
            break;
        }
        let v = Var(j as u32);
        for (mine, verdict) in [(true, Verdict::Safe), (false, Verdict::Mine)] {
            if seen[mine as usize][j] {
                continue;
            }
            // Safe iff assuming a mine is refuted, and vice versa.
            match solver.solve(&all, &[if mine { v.pos() } else { v.neg() }])? {
                SolveResult::Sat(m) => record(m.values(), &mut seen),
                SolveResult::Unsat => {
                    found.push((v, verdict));
                    break;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(found.len());
    for (v, verdict) in found {
        let core = if config.extract_cores {
            let pivot = if verdict == Verdict::Safe { v.pos() } else { v.neg() };
            Some(extract_gmus_with(&mut solver, pivot)?)
        } else {
            None
        };
        out.push(Inference { site: ff.site_of(v), verdict, core });
    }
    Ok(out)
}

/// Verdicts from k-set search, row-major.
pub fn kset_step(instance: impl AsRef<Instance>, k: usize) -> Vec<Inference> {
    let cs = build_constraints(instance.as_ref());
    let mut out: Vec<Inference> = kset_infer(&cs, k)
        .into_iter()
        .map(|f| Inference {
            site: cs.outer()[f.col],
            verdict: if f.value { Verdict::Mine } else { Verdict::Safe },
            core: None,
        })
        .collect();
    out.sort_by_key(|i| i.site);
    out
}

/// Whether some mine placement realizes every revealed label.
pub fn consistency_check(instance: impl AsRef<Instance>) -> bool {
    let Ok(ff) = build_formula(instance.as_ref()) else { return false };
    let mut solver = Solver::new(&ff.cnf, SolverConfig { conflict_budget: None, ..SolverConfig::default() });
    matches!(solver.solve_all(&[]), Ok(SolveResult::Sat(_)))
}

pub fn play_game(board: &Board, policy: Policy, config: &PlayConfig) -> Result<GameRecord, PlayerError> {
    play_game_traced(board, policy, config, |_| {})
}

/// Plays one game, calling `on_turn` after every inference pass.
///
/// The first turn uncovers the board's start site (or the first zero site).
/// Each later turn applies one verdict or one pass of verdicts, depending on
/// the configured [`Schedule`]. The
/// returned record carries the board's own density and a zero seed; callers
/// that know the configured values overwrite them.
pub fn play_game_traced(
    board: &Board,
    policy: Policy,
    config: &PlayConfig,
    mut on_turn: impl FnMut(&TurnTrace),
) -> Result<GameRecord, PlayerError> {
    let clock = Instant::now();
    let n = board.n();
    let mut record = GameRecord {
        n,
        rho: board.num_mines() as f64 / (n * n) as f64,
        seed: 0,
        alpha: 0.0,
        max_core: (policy == Policy::SatInference && config.extract_cores).then_some(0),
        turns: 0,
        outcome: Outcome::Stuck,
        wall_time: Duration::ZERO,
    };
    let Some(start) = board.start().or_else(|| board.zero_sites().next()) else {
        record.outcome = Outcome::GenerationExhausted;
        record.wall_time = clock.elapsed();
        return Ok(record);
    };
    let mut game = GameState::new(board);
    if game.reveal(start)? == RevealOutcome::Boom {
        return Err(PlayerError::Unsound(start));
    }
    game.next_turn();
    on_turn(&TurnTrace { turn: 1, inferences: 0, safe: 0, mines: 0, core_size: None });
    record.outcome = loop {
        if game.all_mines_flagged() {
            break Outcome::AllMinesFlagged;
        }
        if config.time_budget.is_some_and(|b| clock.elapsed() >= b) {
            break Outcome::TimedOut;
        }
        let inferences = match (policy, config.schedule) {
            (Policy::SatInference, Schedule::Batch) => infer_step(&game, config)?,
            (Policy::SatInference, Schedule::Sequential) => infer_first(&game, config)?.into_iter().collect(),
            (Policy::KSet(k), Schedule::Batch) => kset_step(&game, k),
            (Policy::KSet(k), Schedule::Sequential) => kset_step(&game, k).into_iter().take(1).collect(),
        };
        if inferences.is_empty() {
            break Outcome::Stuck;
        }
        let before = game.covered_unflagged();
        apply(&mut game, &inferences)?;
        debug_assert!(game.covered_unflagged() < before);
        game.next_turn();
        let core_size = inferences.iter().filter_map(|i| i.core.as_ref().map(|c| c.size)).max();
        if let (Some(m), Some(c)) = (record.max_core.as_mut(), core_size) {
            *m = (*m).max(c);
        }
        let safe = inferences.iter().filter(|i| i.verdict == Verdict::Safe).count();
        on_turn(&TurnTrace {
            turn: game.turns(),
            inferences: inferences.len(),
            safe,
            mines: inferences.len() - safe,
            core_size,
        });
    };
    let mines = board.num_mines();
    record.alpha = if mines == 0 { 1.0 } else { game.flagged_mines() as f64 / mines as f64 };
    record.turns = game.turns();
    record.wall_time = clock.elapsed();
    Ok(record)
}

/// Applies a batch of verdicts, checking each against the ground truth.
fn apply(game: &mut GameState<'_>, inferences: &[Inference]) -> Result<(), PlayerError> {
    let board = game.board();
    for inf in inferences {
        if board.is_mine(inf.site) != (inf.verdict == Verdict::Mine) {
            return Err(PlayerError::Unsound(inf.site));
        }
        match (inf.verdict, game.status(inf.site)) {
            (Verdict::Mine, _) => game.flag(inf.site)?,
            // An earlier reveal in the batch may have flood-filled this site.
            (Verdict::Safe, Status::Revealed) => {}
            (Verdict::Safe, _) => {
                game.reveal(inf.site)?;
            }
        }
    }
    Ok(())
}

/// Generates the board for `(n, rho, seed)` and plays it.
pub fn run_game(
    n: usize,
    rho: f64,
    seed: u64,
    boundary: Boundary,
    policy: Policy,
    config: &PlayConfig,
) -> Result<GameRecord, PlayerError> {
    let board = match crate::board::generate_board(n, rho, seed, boundary, true) {
        Ok(b) => b,
        Err(BoardError::GenerationExhausted(_)) => return Ok(GameRecord::exhausted(n, rho, seed)),
        Err(e) => return Err(e.into()),
    };
    let mut record = play_game(&board, policy, config)?;
    record.rho = rho;
    record.seed = seed;
    Ok(record)
}
