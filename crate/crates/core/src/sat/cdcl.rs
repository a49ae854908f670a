//! Conflict-driven clause learning over two watched literals.
//!
//! Assumptions occupy the first decision levels, one per level. When an
//! assumption is found false, the implication graph is walked back to the set
//! of assumptions responsible (the final conflict).

use crate::cnf::{Lit, Var};

type CRef = u32;
const NO_REASON: CRef = u32::MAX;

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Sat,
    Unsat,
    Budget,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub solves: u64,
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnt_clauses: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct Cdcl {
    num_vars: usize,
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<Watcher>>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<CRef>,
    phase: Vec<bool>,
    fixed_phase: Vec<bool>,
    seen: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    order: Vec<Var>,
    order_pos: Vec<usize>,
    cursor: usize,
    ok: bool,
    num_learnts: usize,
    max_learnts: f64,
    occurrences: Vec<u32>,
    pub(crate) failed: Vec<Lit>,
    pub(crate) stats: SolverStats,
}

/// Luby sequence value for index `i` (0-based): 1 1 2 1 1 2 4 ...
fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

impl Cdcl {
    pub fn new(num_vars: usize) -> Self {
        Cdcl {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            phase: vec![false; num_vars],
            fixed_phase: vec![false; num_vars],
            seen: vec![false; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            order: Vec::new(),
            order_pos: vec![0; num_vars],
            cursor: 0,
            ok: true,
            num_learnts: 0,
            max_learnts: 0.0,
            occurrences: vec![0; num_vars],
            failed: Vec::new(),
            stats: SolverStats::default(),
        }
    }

    /// Variables decided with fixed polarity `false` ahead of all others.
    pub fn set_priority_false(&mut self, vars: &[Var]) {
        for v in vars {
            self.fixed_phase[v.index()] = true;
        }
    }

    /// Freezes the branching order: priority variables first, then by
    /// descending occurrence count with ties to the lowest index.
    pub fn finalize_order(&mut self) {
        let mut order: Vec<Var> = (0..self.num_vars as u32).map(Var).collect();
        order.sort_by_key(|v| (!self.fixed_phase[v.index()], std::cmp::Reverse(self.occurrences[v.index()]), v.0));
        for (i, v) in order.iter().enumerate() {
            self.order_pos[v.index()] = i;
        }
        self.order = order;
        self.cursor = 0;
        self.max_learnts = (self.clauses.len() as f64 / 2.0).max(2000.0);
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var().index()];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds an original clause at level 0. Literals must be distinct and non-complementary.
    pub fn add_clause(&mut self, lits: Vec<Lit>) {
        debug_assert!(self.decision_level() == 0);
        for l in &lits {
            self.occurrences[l.var().index()] += 1;
        }
        if !self.ok {
            return;
        }
        match lits.len() {
            0 => self.ok = false,
            1 => match self.lit_value(lits[0]) {
                TRUE => {}
                FALSE => self.ok = false,
                _ => self.enqueue(lits[0], NO_REASON),
            },
            _ => {
                self.attach(ClauseData { lits, learnt: false, lbd: 0 });
            }
        }
    }

    fn attach(&mut self, c: ClauseData) -> CRef {
        let cref = self.clauses.len() as CRef;
        self.watches[c.lits[0].code()].push(Watcher { cref, blocker: c.lits[1] });
        self.watches[c.lits[1].code()].push(Watcher { cref, blocker: c.lits[0] });
        if c.learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(c);
        cref
    }

    #[inline]
    fn enqueue(&mut self, l: Lit, reason: CRef) {
        let v = l.var().index();
        debug_assert_eq!(self.value[v], UNDEF);
        self.value[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let lits = &mut self.clauses[cref as usize].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let first_value = {
                    let v = self.value[first.var().index()];
                    if first.is_positive() {
                        v
                    } else {
                        -v
                    }
                };
                if first != w.blocker && first_value == TRUE {
                    ws[j] = Watcher { cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    let l = lits[k];
                    let v = self.value[l.var().index()];
                    let lv = if l.is_positive() { v } else { -v };
                    if lv != FALSE {
                        lits.swap(1, k);
                        self.watches[l.code()].push(Watcher { cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref, blocker: first };
                j += 1;
                if first_value == FALSE {
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn backtrack(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for idx in (lim..self.trail.len()).rev() {
            let v = self.trail[idx].var();
            self.phase[v.index()] = self.value[v.index()] == TRUE;
            self.value[v.index()] = UNDEF;
            self.reason[v.index()] = NO_REASON;
            self.cursor = self.cursor.min(self.order_pos[v.index()]);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, usize) {
        let mut learnt: Vec<Lit> = vec![Lit::from_code(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            let start = usize::from(p.is_some());
            let len = self.clauses[confl as usize].lits.len();
            for k in start..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var().index()];
            debug_assert_ne!(confl, NO_REASON);
        }
        learnt[0] = !p.unwrap();

        // Drop literals whose reason is already covered by the clause.
        let mut keep = vec![true; learnt.len()];
        for (k, &l) in learnt.iter().enumerate().skip(1) {
            let r = self.reason[l.var().index()];
            if r == NO_REASON {
                continue;
            }
            let redundant = self.clauses[r as usize].lits[1..].iter().all(|q| {
                let v = q.var().index();
                self.seen[v] || self.level[v] == 0
            });
            if redundant {
                keep[k] = false;
            }
        }
        for &l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        let mut out: Vec<Lit> = learnt.iter().zip(&keep).filter(|(_, &k)| k).map(|(&l, _)| l).collect();

        let bt = if out.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..out.len() {
                if self.level[out[k].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = k;
                }
            }
            out.swap(1, max_i);
            self.level[out[1].var().index()] as usize
        };
        (out, bt)
    }

    /// Collects the assumptions that imply `!p`, where `p` is a falsified assumption.
    fn analyze_final(&mut self, p: Lit) {
        self.failed.clear();
        self.failed.push(p);
        if self.decision_level() == 0 {
            return;
        }
        let v0 = p.var().index();
        self.seen[v0] = true;
        for idx in (self.trail_lim[0]..self.trail.len()).rev() {
            let lit = self.trail[idx];
            let v = lit.var().index();
            if !self.seen[v] {
                continue;
            }
            let r = self.reason[v];
            if r == NO_REASON {
                self.failed.push(lit);
            } else {
                for k in 1..self.clauses[r as usize].lits.len() {
                    let q = self.clauses[r as usize].lits[k].var().index();
                    if self.level[q] > 0 {
                        self.seen[q] = true;
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[v0] = false;
    }

    fn lbd(&self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var().index()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while self.cursor < self.order.len() {
            let v = self.order[self.cursor];
            if self.value[v.index()] == UNDEF {
                let positive = !self.fixed_phase[v.index()] && self.phase[v.index()];
                return Some(Lit::new(v, positive));
            }
            self.cursor += 1;
        }
        None
    }

    /// Removes the worse half of learnt clauses. Only called at level 0, where
    /// no reason pointer is consulted, so all reasons are cleared and the
    /// clause store is compacted.
    fn reduce_learnts(&mut self) {
        debug_assert_eq!(self.decision_level(), 0);
        let mut learnt_idx: Vec<usize> = (0..self.clauses.len()).filter(|&i| self.clauses[i].learnt).collect();
        learnt_idx.sort_by_key(|&i| (self.clauses[i].lbd, self.clauses[i].lits.len()));
        let drop_from = learnt_idx.len() / 2;
        let mut remove = vec![false; self.clauses.len()];
        for &i in &learnt_idx[drop_from..] {
            if self.clauses[i].lbd > 2 {
                remove[i] = true;
            }
        }
        let old = std::mem::take(&mut self.clauses);
        for r in self.reason.iter_mut() {
            *r = NO_REASON;
        }
        for w in self.watches.iter_mut() {
            w.clear();
        }
        self.num_learnts = 0;
        for (i, c) in old.into_iter().enumerate() {
            if !remove[i] {
                self.attach(c);
            }
        }
        self.max_learnts *= 1.1;
    }

    pub fn solve(&mut self, assumptions: &[Lit], budget: Option<u64>) -> Outcome {
        self.stats.solves += 1;
        self.failed.clear();
        self.backtrack(0);
        if !self.ok {
            return Outcome::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return Outcome::Unsat;
        }
        let mut conflicts_here = 0u64;
        let mut restart_index = 0u64;
        loop {
            let limit = 100 * luby(restart_index);
            restart_index += 1;
            match self.search(assumptions, limit, budget, &mut conflicts_here) {
                Some(outcome) => {
                    if outcome != Outcome::Sat {
                        self.backtrack(0);
                    }
                    return outcome;
                }
                None => {
                    self.stats.restarts += 1;
                    self.backtrack(0);
                    if self.num_learnts as f64 > self.max_learnts {
                        self.reduce_learnts();
                    }
                }
            }
        }
    }

    /// `None` asks for a restart.
    fn search(&mut self, assumptions: &[Lit], limit: u64, budget: Option<u64>, conflicts_here: &mut u64) -> Option<Outcome> {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                *conflicts_here += 1;
                local += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(Outcome::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let cref = self.attach(ClauseData { lits: learnt, learnt: true, lbd });
                    self.stats.learnt_clauses += 1;
                    self.enqueue(first, cref);
                }
                if budget.is_some_and(|b| *conflicts_here > b) {
                    return Some(Outcome::Budget);
                }
            } else {
                if local >= limit {
                    return None;
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let a = assumptions[self.decision_level()];
                    match self.lit_value(a) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            self.analyze_final(a);
                            return Some(Outcome::Unsat);
                        }
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(a) => a,
                    None => match self.pick_branch() {
                        Some(l) => {
                            self.stats.decisions += 1;
                            l
                        }
                        None => return Some(Outcome::Sat),
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }

    /// Current value of `v` after a `Sat` outcome.
    pub fn model_value(&self, v: Var) -> bool {
        self.value[v.index()] == TRUE
    }
}
