//! Test-side oracles. Nothing here calls the library's frontier, encoding or
//! solver code; these are the references those are checked against.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use sweeper_core::board::{generate_board, Board, Boundary, GameState, Instance, RevealOutcome, Site, Status};
use sweeper_core::cnf::{Clause, GroupId, GroupedCnf, Lit, Var};
use sweeper_core::player::Verdict;
use sweeper_core::rng::seeded_rng;

/// Moore neighborhood, written out independently of the library.
pub fn moore(n: usize, boundary: Boundary, s: Site) -> Vec<Site> {
    let mut out = Vec::new();
    for dr in -1i64..=1 {
        for dc in -1i64..=1 {
            if dr == 0 && dc == 0 {
                continue;
            }
            let (r, c) = (s.row as i64 + dr, s.col as i64 + dc);
            match boundary {
                Boundary::Torus => {
                    let t = Site::new(r.rem_euclid(n as i64) as usize, c.rem_euclid(n as i64) as usize);
                    if t != s && !out.contains(&t) {
                        out.push(t);
                    }
                }
                Boundary::Open => {
                    if r >= 0 && c >= 0 && (r as usize) < n && (c as usize) < n {
                        out.push(Site::new(r as usize, c as usize));
                    }
                }
            }
        }
    }
    out
}

pub struct Constraints {
    pub outer: Vec<Site>,
    /// `(neighbor mask over outer, required mine count)` per inner site.
    pub rows: Vec<(u64, i64)>,
}

/// Inner constraints over the outer frontier, from raw statuses and labels.
pub fn constraints(inst: &Instance) -> Constraints {
    let n = inst.n();
    let b = inst.boundary();
    let sites: Vec<Site> = (0..n).flat_map(|r| (0..n).map(move |c| Site::new(r, c))).collect();
    let covered = |s: Site| inst.status(s) == Status::Covered;
    let outer: Vec<Site> = sites
        .iter()
        .copied()
        .filter(|&s| covered(s) && moore(n, b, s).iter().any(|&t| inst.status(t) == Status::Revealed))
        .collect();
    assert!(outer.len() <= 64);
    let mut rows = Vec::new();
    for &s in &sites {
        let Some(label) = inst.label(s) else { continue };
        let nb = moore(n, b, s);
        let mask = nb
            .iter()
            .filter(|&&t| covered(t))
            .fold(0u64, |m, t| m | 1 << outer.iter().position(|o| o == t).expect("covered neighbor is outer"));
        if mask == 0 {
            continue;
        }
        let flags = nb.iter().filter(|&&t| inst.status(t) == Status::Flagged).count() as i64;
        rows.push((mask, label as i64 - flags));
    }
    Constraints { outer, rows }
}

/// Every forced `(site, verdict)` by enumerating all outer assignments, or
/// `None` when no assignment satisfies the constraints.
pub fn brute_force_verdicts(inst: &Instance) -> Option<BTreeSet<(Site, Verdict)>> {
    let cs = constraints(inst);
    let m = cs.outer.len();
    assert!(m <= 24, "outer frontier too large to enumerate");
    let (mut ever_one, mut ever_zero, mut any) = (0u64, 0u64, false);
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    for x in 0..=full {
        if cs.rows.iter().all(|&(mask, e)| (x & mask).count_ones() as i64 == e) {
            any = true;
            ever_one |= x;
            ever_zero |= !x & full;
        }
    }
    any.then(|| {
        (0..m)
            .filter_map(|j| match (ever_one >> j & 1, ever_zero >> j & 1) {
                (1, 0) => Some((cs.outer[j], Verdict::Mine)),
                (0, 1) => Some((cs.outer[j], Verdict::Safe)),
                _ => None,
            })
            .collect()
    })
}

/// A state reachable by play: the start reveal followed by a few random safe
/// reveals and correct flags. `None` if the board cannot be generated or the
/// game is already over.
pub fn random_state(seed: u64) -> Option<(Board, Instance)> {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(4..=8);
    let rho = rng.random_range(0.08..0.35);
    let boundary = if rng.random_bool(0.5) { Boundary::Torus } else { Boundary::Open };
    let board = generate_board(n, rho, seed, boundary, true).ok()?;
    let instance = {
        let mut g = GameState::new(&board);
        g.reveal(board.start()?).ok()?;
        for _ in 0..rng.random_range(0..5) {
            let covered: Vec<Site> = (0..n)
                .flat_map(|r| (0..n).map(move |c| Site::new(r, c)))
                .filter(|&s| g.status(s) == Status::Covered)
                .collect();
            if covered.is_empty() {
                break;
            }
            let s = covered[rng.random_range(0..covered.len())];
            if board.is_mine(s) {
                if rng.random_bool(0.5) {
                    g.flag(s).unwrap();
                }
            } else {
                assert!(matches!(g.reveal(s), Ok(RevealOutcome::SafeRevealed(_))));
            }
        }
        g.instance().clone()
    };
    Some((board, instance))
}

/// Reachable states whose outer frontier has between 1 and `max_outer` sites.
pub fn reachable_states(count: usize, max_outer: usize, master: u64) -> Vec<(Board, Instance)> {
    let mut out = Vec::new();
    let mut seed = master;
    while out.len() < count {
        seed = seed.wrapping_add(1);
        if let Some((b, i)) = random_state(seed) {
            let m = constraints(&i).outer.len();
            if (1..=max_outer).contains(&m) {
                out.push((b, i));
            }
        }
    }
    out
}

/// A random grouped formula: a few hard clauses plus up to five groups over
/// `vars` variables, clause widths 1 to 4.
pub fn random_formula(rng: &mut impl Rng, vars: u32) -> GroupedCnf {
    let mut f = GroupedCnf::new(vars);
    let clause = |rng: &mut dyn rand::RngCore| {
        let width = rng.random_range(1..=4.min(vars as usize));
        let mut lits: Vec<Lit> = Vec::new();
        while lits.len() < width {
            let v = Var(rng.random_range(0..vars));
            if lits.iter().all(|l| l.var() != v) {
                lits.push(Lit::new(v, rng.random_bool(0.5)));
            }
        }
        Clause::new(lits).unwrap()
    };
    for _ in 0..rng.random_range(0..=vars as usize) {
        f.add_hard(clause(rng)).unwrap();
    }
    let groups = rng.random_range(0..=5u32);
    for g in 0..groups {
        let cs = (0..rng.random_range(1..=(vars as usize * 2))).map(|_| clause(rng)).collect();
        f.add_group(GroupId(g), cs).unwrap();
    }
    f
}

/// Hard clauses and the clauses of `active` groups, as DIMACS integers.
pub fn active_clauses(f: &GroupedCnf, active: &[GroupId]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = f.hard().iter().map(|c| c.lits().iter().map(|l| l.to_dimacs()).collect()).collect();
    for g in f.groups().iter().filter(|g| active.contains(&g.id)) {
        out.extend(g.clauses.iter().map(|c| c.lits().iter().map(|l| l.to_dimacs()).collect::<Vec<_>>()));
    }
    out
}

/// Truth-table satisfiability of `clauses` under the assumption literals.
pub fn truth_table_sat(vars: u32, clauses: &[Vec<i64>], assumptions: &[i64]) -> bool {
    let holds = |x: u64, l: i64| (x >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0);
    (0..1u64 << vars).any(|x| assumptions.iter().all(|&a| holds(x, a)) && clauses.iter().all(|c| c.iter().any(|&l| holds(x, l))))
}
