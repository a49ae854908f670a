//! Group-tagged CNF formulas, the frontier encoding and DIMACS/GCNF interchange.

mod dimacs;
mod encoding;

use std::fmt;
use std::ops::Not;

use thiserror::Error;

pub use dimacs::{export_dimacs, export_gcnf, parse_cnf, parse_dimacs, parse_gcnf, CnfParseError};
pub use encoding::{build_formula, EncodeError, encode_exact_count, exact_count_clause_count, FrontierFormula};

/// A Boolean variable, 0-based. Its DIMACS number is `index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A signed variable, packed as `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var.0 << 1 | (!positive) as u32)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    /// `None` for 0.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > (u32::MAX >> 1) as u64 {
            return None;
        }
        Some(Lit::new(Var(value.unsigned_abs() as u32 - 1), value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("empty clause")]
    Empty,
    #[error("literal {0} appears twice")]
    Duplicate(Lit),
    #[error("clause contains both {0} and its negation")]
    Tautology(Lit),
}

/// A non-empty disjunction without repeated or complementary literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: Vec<Lit>) -> Result<Self, ClauseError> {
        if lits.is_empty() {
            return Err(ClauseError::Empty);
        }
        let mut sorted = lits.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(ClauseError::Duplicate(w[0]));
            }
            if w[0].var() == w[1].var() {
                return Err(ClauseError::Tautology(w[0]));
            }
        }
        Ok(Clause(lits))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.0.iter().any(|l| values[l.var().index()] == l.is_positive())
    }
}

/// Identifies a constraint group (one inner-frontier site for frontier formulas).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct GroupId(pub u32);

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub id: GroupId,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable {0} exceeds the declared {1} variables")]
    VarOutOfRange(i64, u32),
    #[error("group {0} added twice")]
    DuplicateGroup(GroupId),
}

/// A CNF formula whose clauses are partitioned into groups, plus optional
/// hard clauses that belong to no group and are always active.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupedCnf {
    num_vars: u32,
    hard: Vec<Clause>,
    groups: Vec<Group>,
}

impl GroupedCnf {
    pub fn new(num_vars: u32) -> Self {
        GroupedCnf { num_vars, hard: Vec::new(), groups: Vec::new() }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    fn check(&self, clauses: &[Clause]) -> Result<(), FormulaError> {
        for c in clauses {
            for l in c.lits() {
                if l.var().0 >= self.num_vars {
                    return Err(FormulaError::VarOutOfRange(l.to_dimacs(), self.num_vars));
                }
            }
        }
        Ok(())
    }

    /// Adds a group; groups are kept sorted by id.
    pub fn add_group(&mut self, id: GroupId, clauses: Vec<Clause>) -> Result<(), FormulaError> {
        self.check(&clauses)?;
        match self.groups.binary_search_by_key(&id, |g| g.id) {
            Ok(_) => Err(FormulaError::DuplicateGroup(id)),
            Err(pos) => {
                self.groups.insert(pos, Group { id, clauses });
                Ok(())
            }
        }
    }

    pub fn add_hard(&mut self, clause: Clause) -> Result<(), FormulaError> {
        self.check(std::slice::from_ref(&clause))?;
        self.hard.push(clause);
        Ok(())
    }

    pub(crate) fn push_group_clause(&mut self, id: GroupId, clause: Clause) -> Result<(), FormulaError> {
        self.check(std::slice::from_ref(&clause))?;
        match self.groups.binary_search_by_key(&id, |g| g.id) {
            Ok(pos) => self.groups[pos].clauses.push(clause),
            Err(pos) => self.groups.insert(pos, Group { id, clauses: vec![clause] }),
        }
        Ok(())
    }

    pub fn hard(&self) -> &[Clause] {
        &self.hard
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group(&self, id: GroupId) -> Option<&Group> {
        self.groups.binary_search_by_key(&id, |g| g.id).ok().map(|i| &self.groups[i])
    }

    pub fn group_ids(&self) -> impl Iterator<Item = GroupId> + '_ {
        self.groups.iter().map(|g| g.id)
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.hard.len() + self.groups.iter().map(|g| g.clauses.len()).sum::<usize>()
    }

    /// Hard clauses followed by group clauses in group order.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> + '_ {
        self.hard.iter().chain(self.groups.iter().flat_map(|g| g.clauses.iter()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_packing() {
        let l = Lit::from_dimacs(-3).unwrap();
        assert_eq!(l.var(), Var(2));
        assert!(!l.is_positive());
        assert_eq!((!l).to_dimacs(), 3);
        assert_eq!(Lit::from_dimacs(0), None);
    }

    #[test]
    fn clause_invariants() {
        let a = Var(0);
        let b = Var(1);
        assert_eq!(Clause::new(vec![]), Err(ClauseError::Empty));
        assert_eq!(Clause::new(vec![a.pos(), a.pos()]), Err(ClauseError::Duplicate(a.pos())));
        assert!(matches!(Clause::new(vec![a.pos(), b.neg(), a.neg()]), Err(ClauseError::Tautology(_))));
        assert!(Clause::new(vec![a.pos(), b.neg()]).is_ok());
    }

    #[test]
    fn groups_stay_sorted_and_checked() {
        let mut f = GroupedCnf::new(2);
        let c = |d: &[i64]| Clause::new(d.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()).unwrap();
        f.add_group(GroupId(5), vec![c(&[1])]).unwrap();
        f.add_group(GroupId(2), vec![c(&[-2])]).unwrap();
        assert_eq!(f.group_ids().collect::<Vec<_>>(), vec![GroupId(2), GroupId(5)]);
        assert_eq!(f.add_group(GroupId(2), vec![]), Err(FormulaError::DuplicateGroup(GroupId(2))));
        assert_eq!(f.add_group(GroupId(9), vec![c(&[3])]), Err(FormulaError::VarOutOfRange(3, 2)));
        assert_eq!(f.num_clauses(), 2);
    }
}
