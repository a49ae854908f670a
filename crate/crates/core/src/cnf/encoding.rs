use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use super::{Clause, GroupId, GroupedCnf, Var};
use crate::board::{Instance, Site};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("effective label {label} is infeasible with {open} open neighbors{}", .site.map(|s| format!(" at {s}")).unwrap_or_default())]
    InfeasibleLabel { site: Option<Site>, label: i32, open: usize },
}

/// Binomial encoding of "exactly `count` of `vars` are true".
///
/// At-least: one all-positive clause per `(m - count + 1)`-subset. At-most: one
/// all-negative clause per `(count + 1)`-subset. No auxiliary variables, so
/// every clause stays attributable to the constraint that produced it.
pub fn encode_exact_count(count: i32, vars: &[Var]) -> Result<Vec<Clause>, EncodeError> {
    let m = vars.len();
    if count < 0 || count as usize > m {
        return Err(EncodeError::InfeasibleLabel { site: None, label: count, open: m });
    }
    let e = count as usize;
    let mut out = Vec::with_capacity(exact_count_clause_count(e, m));
    if e > 0 {
        for subset in vars.iter().combinations(m - e + 1) {
            out.push(Clause(subset.into_iter().map(|v| v.pos()).collect()));
        }
    }
    if e < m {
        for subset in vars.iter().combinations(e + 1) {
            out.push(Clause(subset.into_iter().map(|v| v.neg()).collect()));
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(m, e+1) + C(m, m-e+1)`, the size of [`encode_exact_count`]'s output.
pub fn exact_count_clause_count(e: usize, m: usize) -> usize {
    binomial(m, e + 1) + binomial(m, m + 1 - e)
}

/// The frontier formula of an instance together with its variable and group maps.
///
/// Variable `j` is the `j`-th outer-frontier site and group `i` the `i`-th
/// inner-frontier site, both in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierFormula {
    pub cnf: GroupedCnf,
    pub outer: Vec<Site>,
    pub inner: Vec<Site>,
}

impl FrontierFormula {
    pub fn var_of(&self, site: Site) -> Option<Var> {
        self.outer.binary_search(&site).ok().map(|i| Var(i as u32))
    }

    pub fn site_of(&self, var: Var) -> Site {
        self.outer[var.index()]
    }

    pub fn group_site(&self, group: GroupId) -> Site {
        self.inner[group.0 as usize]
    }
}

/// One group per inner-frontier site holding the exact-count constraint of its
/// effective label over its covered, unflagged neighbors. Flags enter only
/// through effective labels, and the global mine count is not encoded.
pub fn build_formula(instance: &Instance) -> Result<FrontierFormula, EncodeError> {
    let frontiers = instance.frontiers();
    let lattice = instance.lattice();
    let var_index: HashMap<usize, Var> =
        frontiers.outer.iter().enumerate().map(|(j, &s)| (lattice.index(s), Var(j as u32))).collect();
    let mut cnf = GroupedCnf::new(frontiers.outer.len() as u32);
    for (i, &site) in frontiers.inner.iter().enumerate() {
        let idx = lattice.index(site);
        let vars: Vec<Var> = instance.open_neighbors(idx).map(|j| var_index[&j]).collect();
        let label = instance.effective_label_idx(idx);
        let clauses = encode_exact_count(label, &vars).map_err(|_| EncodeError::InfeasibleLabel {
            site: Some(site),
            label,
            open: vars.len(),
        })?;
        cnf.add_group(GroupId(i as u32), clauses).expect("frontier variables are in range");
    }
    Ok(FrontierFormula { cnf, outer: frontiers.outer, inner: frontiers.inner })
}
