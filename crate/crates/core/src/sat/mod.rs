//! Complete SAT decision procedure over [`GroupedCnf`] with assumption
//! literals and per-group activation.
//!
//! Each group `g` gets a selector variable `s_g`; its clauses are added as
//! `C ∨ ¬s_g`. A solve call activates a group by assuming `s_g`, so groups can
//! be toggled across calls without rebuilding the clause database, and learnt
//! clauses stay valid for every later call.

mod cdcl;
mod dpll;

use thiserror::Error;

use crate::cnf::{GroupId, GroupedCnf, Lit, Var};

pub use cdcl::SolverStats;

/// Conflicts allowed per solve call unless configured otherwise.
pub const DEFAULT_CONFLICT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    Cdcl,
    /// Plain DPLL without learning, for differential testing.
    Dpll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Conflicts (CDCL) or backtracks (DPLL) per call; `None` is unbounded.
    pub conflict_budget: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { algorithm: Algorithm::Cdcl, conflict_budget: Some(DEFAULT_CONFLICT_BUDGET) }
    }
}

/// A total assignment of the formula's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn value(&self, v: Var) -> bool {
        self.0[v.index()]
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.value(l.var()) == l.is_positive()
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn flip(&mut self, v: Var) {
        self.0[v.index()] = !self.0[v.index()];
    }

    /// DIMACS model line, `v 1 -2 ... 0`.
    pub fn to_dimacs_line(&self) -> String {
        let mut out = String::from("v");
        for (i, &b) in self.0.iter().enumerate() {
            let d = i as i64 + 1;
            out.push_str(&format!(" {}", if b { d } else { -d }));
        }
        out.push_str(" 0");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("conflict budget of {0} exceeded")]
    ResourceLimit(u64),
    #[error("unknown group {0}")]
    UnknownGroup(GroupId),
    #[error("assumption {0} references a variable outside the formula")]
    InvalidAssumption(Lit),
}

enum Engine {
    Cdcl(Box<cdcl::Cdcl>),
    Dpll { hard: Vec<Vec<Lit>>, groups: Vec<Vec<Vec<Lit>>> },
}

/// A stateful, incremental solver for one formula.
pub struct Solver {
    config: SolverConfig,
    num_vars: u32,
    group_ids: Vec<GroupId>,
    /// Groups each variable occurs in, ascending.
    var_groups: Vec<Vec<GroupId>>,
    engine: Engine,
    core_groups: Vec<GroupId>,
    core_assumptions: Vec<Lit>,
    dpll_stats: SolverStats,
}

impl Solver {
    pub fn new(formula: &GroupedCnf, config: SolverConfig) -> Self {
        let num_vars = formula.num_vars();
        let group_ids: Vec<GroupId> = formula.group_ids().collect();
        let mut var_groups: Vec<Vec<GroupId>> = vec![Vec::new(); num_vars as usize];
        for g in formula.groups() {
            for l in g.clauses.iter().flat_map(|c| c.lits()) {
                let list = &mut var_groups[l.var().index()];
                if list.last() != Some(&g.id) {
                    list.push(g.id);
                }
            }
        }
        for list in &mut var_groups {
            list.sort_unstable();
            list.dedup();
        }
        let engine = match config.algorithm {
            Algorithm::Cdcl => {
                let total = num_vars as usize + group_ids.len();
                let mut core = cdcl::Cdcl::new(total);
                for c in formula.hard() {
                    core.add_clause(c.lits().to_vec());
                }
                let selectors: Vec<Var> = (0..group_ids.len()).map(|k| Var(num_vars + k as u32)).collect();
                for (k, g) in formula.groups().iter().enumerate() {
                    for c in &g.clauses {
                        let mut lits = c.lits().to_vec();
                        lits.push(selectors[k].neg());
                        core.add_clause(lits);
                    }
                }
                core.set_priority_false(&selectors);
                core.finalize_order();
                Engine::Cdcl(Box::new(core))
            }
            Algorithm::Dpll => Engine::Dpll {
                hard: formula.hard().iter().map(|c| c.lits().to_vec()).collect(),
                groups: formula.groups().iter().map(|g| g.clauses.iter().map(|c| c.lits().to_vec()).collect()).collect(),
            },
        };
        Solver {
            config,
            num_vars,
            group_ids,
            var_groups,
            engine,
            core_groups: Vec::new(),
            core_assumptions: Vec::new(),
            dpll_stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn groups(&self) -> &[GroupId] {
        &self.group_ids
    }

    /// Groups with a clause mentioning `v`.
    pub fn groups_with_var(&self, v: Var) -> &[GroupId] {
        self.var_groups.get(v.index()).map_or(&[], Vec::as_slice)
    }

    fn group_index(&self, g: GroupId) -> Result<usize, SolveError> {
        self.group_ids.binary_search(&g).map_err(|_| SolveError::UnknownGroup(g))
    }

    /// Decides `(⋀_{g ∈ active} F_g) ∧ hard ∧ ⋀ assumptions`.
    ///
    /// After `Unsat`, [`Solver::core_groups`] and [`Solver::core_assumptions`]
    /// hold the active groups and assumptions involved in the final conflict
    /// (all active groups for the DPLL engine).
    pub fn solve(&mut self, active: &[GroupId], assumptions: &[Lit]) -> Result<SolveResult, SolveError> {
        for &a in assumptions {
            if a.var().0 >= self.num_vars {
                return Err(SolveError::InvalidAssumption(a));
            }
        }
        let mut indices = Vec::with_capacity(active.len());
        for &g in active {
            indices.push(self.group_index(g)?);
        }
        indices.sort_unstable();
        indices.dedup();
        self.core_groups.clear();
        self.core_assumptions.clear();
        let budget = self.config.conflict_budget;
        let num_vars = self.num_vars;
        match &mut self.engine {
            Engine::Cdcl(core) => {
                let mut all: Vec<Lit> = assumptions.to_vec();
                all.extend(indices.iter().map(|&k| Var(num_vars + k as u32).pos()));
                match core.solve(&all, budget) {
                    cdcl::Outcome::Sat => {
                        let values = (0..num_vars).map(|v| core.model_value(Var(v))).collect();
                        Ok(SolveResult::Sat(Assignment(values)))
                    }
                    cdcl::Outcome::Unsat => {
                        for &l in &core.failed {
                            if l.var().0 >= num_vars {
                                self.core_groups.push(self.group_ids[(l.var().0 - num_vars) as usize]);
                            } else {
                                self.core_assumptions.push(l);
                            }
                        }
                        self.core_groups.sort_unstable();
                        self.core_groups.dedup();
                        self.core_assumptions.sort_unstable();
                        self.core_assumptions.dedup();
                        Ok(SolveResult::Unsat)
                    }
                    cdcl::Outcome::Budget => Err(SolveError::ResourceLimit(budget.unwrap_or(0))),
                }
            }
            Engine::Dpll { hard, groups } => {
                let mut clauses: Vec<Vec<Lit>> = hard.clone();
                for &k in &indices {
                    clauses.extend(groups[k].iter().cloned());
                }
                let engine = dpll::Dpll::new(num_vars as usize, &clauses, budget);
                self.dpll_stats.solves += 1;
                match engine.solve(assumptions) {
                    dpll::DpllOutcome::Sat(values) => Ok(SolveResult::Sat(Assignment(values))),
                    dpll::DpllOutcome::Unsat => {
                        self.core_groups = indices.iter().map(|&k| self.group_ids[k]).collect();
                        self.core_assumptions = assumptions.to_vec();
                        self.core_assumptions.sort_unstable();
                        self.core_assumptions.dedup();
                        Ok(SolveResult::Unsat)
                    }
                    dpll::DpllOutcome::Budget => Err(SolveError::ResourceLimit(budget.unwrap_or(0))),
                }
            }
        }
    }

    /// Solves with every group active.
    pub fn solve_all(&mut self, assumptions: &[Lit]) -> Result<SolveResult, SolveError> {
        let all = self.group_ids.clone();
        self.solve(&all, assumptions)
    }

    pub fn core_groups(&self) -> &[GroupId] {
        &self.core_groups
    }

    pub fn core_assumptions(&self) -> &[Lit] {
        &self.core_assumptions
    }

    pub fn stats(&self) -> SolverStats {
        match &self.engine {
            Engine::Cdcl(core) => core.stats,
            Engine::Dpll { .. } => self.dpll_stats,
        }
    }
}

/// One-shot solve with the default configuration.
pub fn solve(formula: &GroupedCnf, active: &[GroupId], assumptions: &[Lit]) -> Result<SolveResult, SolveError> {
    Solver::new(formula, SolverConfig::default()).solve(active, assumptions)
}

/// True iff every hard clause and every clause of an active group has a true literal.
pub fn verify_model(formula: &GroupedCnf, active: &[GroupId], assignment: &Assignment) -> bool {
    if assignment.values().len() < formula.num_vars() as usize {
        return false;
    }
    let values = assignment.values();
    formula.hard().iter().all(|c| c.is_satisfied_by(values))
        && formula
            .groups()
            .iter()
            .filter(|g| active.contains(&g.id))
            .all(|g| g.clauses.iter().all(|c| c.is_satisfied_by(values)))
}
