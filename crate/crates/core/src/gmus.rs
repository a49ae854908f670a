//! Grouped minimal unsatisfiable cores.
//!
//! The core size `C = |S|` of the query that proved an inference is the
//! hardness measure: `C = 1` means a single label settled the site.

use thiserror::Error;

use crate::cnf::{GroupId, GroupedCnf, Lit};
use crate::sat::{SolveError, SolveResult, Solver, SolverConfig};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GmusResult {
    /// Groups of the core, ascending.
    pub core: Vec<GroupId>,
    #[serde(serialize_with = "ser_lit")]
    pub pivot: Lit,
    pub size: usize,
}

fn ser_lit<S: serde::Serializer>(l: &Lit, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_i64(l.to_dimacs())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GmusError {
    #[error("formula with pivot {0} is satisfiable")]
    NotUnsat(Lit),
    #[error(transparent)]
    Solver(#[from] SolveError),
}

/// Deletion-based extraction on a fresh solver.
pub fn extract_gmus(formula: &GroupedCnf, pivot: Lit) -> Result<GmusResult, GmusError> {
    let mut solver = Solver::new(formula, SolverConfig::default());
    extract_gmus_with(&mut solver, pivot)
}

/// Deletion-based extraction reusing an existing solver for the formula.
///
/// A group that contradicts the pivot on its own is returned directly; such
/// a group must mention the pivot's variable, so only those are tried. This
/// keeps size-1 cores size 1 even when the first conflict involves others.
/// Otherwise groups are tried for deletion in ascending id order. After every
/// unsatisfiable call the working set shrinks to the solver's reported core,
/// which only drops groups that are already redundant, so minimality holds:
/// a group kept because its removal was satisfiable stays necessary for every
/// subset of the set it was tested against.
pub fn extract_gmus_with(solver: &mut Solver, pivot: Lit) -> Result<GmusResult, GmusError> {
    let all = solver.groups().to_vec();
    if solver.solve(&all, &[pivot])? != SolveResult::Unsat {
        return Err(GmusError::NotUnsat(pivot));
    }
    let mut current = solver.core_groups().to_vec();
    if current.len() > 1 {
        if solver.solve(&[], &[pivot])?.is_unsat() {
            return Ok(GmusResult { size: 0, core: Vec::new(), pivot });
        }
        for g in solver.groups_with_var(pivot.var()).to_vec() {
            if solver.solve(&[g], &[pivot])?.is_unsat() {
                return Ok(GmusResult { size: 1, core: vec![g], pivot });
            }
        }
    }
    let mut trial = Vec::with_capacity(current.len());
    for g in current.clone() {
        if current.binary_search(&g).is_err() {
            continue;
        }
        trial.clear();
        trial.extend(current.iter().copied().filter(|&h| h != g));
        if solver.solve(&trial, &[pivot])?.is_unsat() {
            current = solver.core_groups().to_vec();
        }
    }
    Ok(GmusResult { size: current.len(), core: current, pivot })
}

/// Largest core size, 0 for none.
pub fn max_core_size<'a>(results: impl IntoIterator<Item = &'a GmusResult>) -> usize {
    results.into_iter().map(|r| r.size).max().unwrap_or(0)
}

/// Re-checks both core invariants with direct solve calls.
pub fn verify_gmus(formula: &GroupedCnf, result: &GmusResult) -> Result<bool, SolveError> {
    let mut solver = Solver::new(formula, SolverConfig { conflict_budget: None, ..SolverConfig::default() });
    if !solver.solve(&result.core, &[result.pivot])?.is_unsat() {
        return Ok(false);
    }
    for &g in &result.core {
        let rest: Vec<GroupId> = result.core.iter().copied().filter(|&h| h != g).collect();
        if solver.solve(&rest, &[result.pivot])?.is_unsat() {
            return Ok(false);
        }
    }
    Ok(result.size == result.core.len())
}
