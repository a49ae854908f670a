//! Plain DPLL: unit propagation by clause scanning and chronological
//! backtracking. No learning; kept as a differential reference for the CDCL engine.

use crate::cnf::{Lit, Var};

pub(crate) struct Dpll<'a> {
    clauses: &'a [Vec<Lit>],
    value: Vec<Option<bool>>,
    order: Vec<Var>,
    budget: Option<u64>,
    pub backtracks: u64,
}

pub(crate) enum DpllOutcome {
    Sat(Vec<bool>),
    Unsat,
    Budget,
}

impl<'a> Dpll<'a> {
    pub fn new(num_vars: usize, clauses: &'a [Vec<Lit>], budget: Option<u64>) -> Self {
        let mut occ = vec![0u32; num_vars];
        for c in clauses {
            for l in c {
                occ[l.var().index()] += 1;
            }
        }
        let mut order: Vec<Var> = (0..num_vars as u32).map(Var).collect();
        order.sort_by_key(|v| (std::cmp::Reverse(occ[v.index()]), v.0));
        Dpll { clauses, value: vec![None; num_vars], order, budget, backtracks: 0 }
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var().index()].map(|v| v == l.is_positive())
    }

    /// Propagates to fixpoint; records assigned variables on `trail`. `false` on conflict.
    fn propagate(&mut self, trail: &mut Vec<Var>) -> bool {
        loop {
            let mut changed = false;
            for c in self.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in c {
                    match self.lit_value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        let l = unassigned.unwrap();
                        self.value[l.var().index()] = Some(l.is_positive());
                        trail.push(l.var());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn undo(&mut self, trail: &mut Vec<Var>, to: usize) {
        for v in trail.drain(to..) {
            self.value[v.index()] = None;
        }
    }

    fn search(&mut self, trail: &mut Vec<Var>) -> Option<bool> {
        if !self.propagate(trail) {
            return Some(false);
        }
        let Some(&v) = self.order.iter().find(|v| self.value[v.index()].is_none()) else {
            return Some(true);
        };
        for polarity in [false, true] {
            let mark = trail.len();
            self.value[v.index()] = Some(polarity);
            trail.push(v);
            match self.search(trail)? {
                true => return Some(true),
                false => {
                    self.undo(trail, mark);
                    self.backtracks += 1;
                    if self.budget.is_some_and(|b| self.backtracks > b) {
                        return None;
                    }
                }
            }
        }
        Some(false)
    }

    pub fn solve(mut self, assumptions: &[Lit]) -> DpllOutcome {
        let mut trail = Vec::new();
        for &a in assumptions {
            match self.lit_value(a) {
                Some(false) => return DpllOutcome::Unsat,
                Some(true) => {}
                None => {
                    self.value[a.var().index()] = Some(a.is_positive());
                    trail.push(a.var());
                }
            }
        }
        match self.search(&mut trail) {
            Some(true) => DpllOutcome::Sat(self.value.iter().map(|v| v.unwrap_or(false)).collect()),
            Some(false) => DpllOutcome::Unsat,
            None => DpllOutcome::Budget,
        }
    }
}
