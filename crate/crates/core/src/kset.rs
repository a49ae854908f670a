//! k-set search: polynomial-time inference from signed sums of up to `k`
//! frontier constraints `Σ_j a_ij x_j = e_i`.
//!
//! A combination with signs `±1` gives `Σ_j c_j x_j = r`. If `r` equals the
//! largest attainable left-hand side, every variable with `c_j > 0` is a mine
//! and every one with `c_j < 0` is safe; the smallest value mirrors this.

use std::collections::HashMap;

use itertools::Itertools;

use crate::board::{Instance, Site};

/// The 0/1 incidence between inner rows and outer columns, stored by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    rows: Vec<Vec<usize>>,
    labels: Vec<i32>,
    num_cols: usize,
    inner: Vec<Site>,
    outer: Vec<Site>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ForcedAssignment {
    pub col: usize,
    /// `true` for a mine.
    pub value: bool,
}

/// Work counters for one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KSetStats {
    /// Row subsets visited.
    pub subsets: u64,
    /// Signed combinations evaluated.
    pub combinations: u64,
}

impl ConstraintSystem {
    /// Builds a system from dense 0/1 rows; site maps are left empty.
    pub fn from_dense(a: &[Vec<u8>], labels: &[i32]) -> Self {
        assert_eq!(a.len(), labels.len(), "one label per row");
        let num_cols = a.first().map_or(0, Vec::len);
        let rows = a
            .iter()
            .map(|r| {
                assert_eq!(r.len(), num_cols, "ragged matrix");
                r.iter().positions(|&v| v != 0).collect()
            })
            .collect();
        ConstraintSystem { rows, labels: labels.to_vec(), num_cols, inner: Vec::new(), outer: Vec::new() }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    /// Columns with `a_ij = 1`, ascending.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn a(&self, i: usize, j: usize) -> u8 {
        self.rows[i].binary_search(&j).is_ok() as u8
    }

    pub fn label(&self, i: usize) -> i32 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    pub fn dense(&self) -> Vec<Vec<u8>> {
        (0..self.num_rows()).map(|i| (0..self.num_cols).map(|j| self.a(i, j)).collect()).collect()
    }

    pub fn inner(&self) -> &[Site] {
        &self.inner
    }

    pub fn outer(&self) -> &[Site] {
        &self.outer
    }

    /// Row adjacency: two rows are adjacent when they share a column.
    fn overlap_graph(&self) -> Vec<Vec<usize>> {
        let mut by_col = vec![Vec::new(); self.num_cols];
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                by_col[j].push(i);
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.num_rows()];
        for rows in &by_col {
            for (&a, &b) in rows.iter().tuple_combinations() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

/// One row per inner-frontier site over the outer-frontier columns, both
/// row-major, with effective labels on the right-hand side.
pub fn build_constraints(instance: &Instance) -> ConstraintSystem {
    let frontiers = instance.frontiers();
    let lattice = instance.lattice();
    let col_of: HashMap<usize, usize> =
        frontiers.outer.iter().enumerate().map(|(j, &s)| (lattice.index(s), j)).collect();
    let mut rows = Vec::with_capacity(frontiers.inner.len());
    let mut labels = Vec::with_capacity(frontiers.inner.len());
    for &s in &frontiers.inner {
        let idx = lattice.index(s);
        let mut cols: Vec<usize> = instance.open_neighbors(idx).map(|j| col_of[&j]).collect();
        cols.sort_unstable();
        rows.push(cols);
        labels.push(instance.effective_label_idx(idx));
    }
    ConstraintSystem { rows, labels, num_cols: frontiers.outer.len(), inner: frontiers.inner, outer: frontiers.outer }
}

/// Dense scratch accumulator for signed row sums.
struct Combiner {
    coef: Vec<i32>,
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl Combiner {
    fn new(num_cols: usize) -> Self {
        Combiner { coef: vec![0; num_cols], seen: vec![false; num_cols], touched: Vec::new() }
    }

    /// `negative(l)` selects the sign `-1` for `rows[l]`.
    fn infer(&mut self, cs: &ConstraintSystem, rows: &[usize], negative: impl Fn(usize) -> bool, out: &mut Vec<ForcedAssignment>) {
        let mut r = 0;
        for (l, &i) in rows.iter().enumerate() {
            let s = if negative(l) { -1 } else { 1 };
            r += s * cs.labels[i];
            for &j in &cs.rows[i] {
                if !self.seen[j] {
                    self.seen[j] = true;
                    self.touched.push(j);
                }
                self.coef[j] += s;
            }
        }
        let (mut lo, mut hi) = (0, 0);
        for &j in &self.touched {
            let c = self.coef[j];
            if c < 0 {
                lo += c;
            } else {
                hi += c;
            }
        }
        if lo != hi && (r == hi || r == lo) {
            let at_max = r == hi;
            for &j in &self.touched {
                let c = self.coef[j];
                if c != 0 {
                    out.push(ForcedAssignment { col: j, value: (c > 0) == at_max });
                }
            }
        }
        for j in self.touched.drain(..) {
            self.coef[j] = 0;
            self.seen[j] = false;
        }
    }
}

/// Forced values from one signed combination; `signs[l]` is `b_l`, with
/// `true` meaning coefficient `-1`.
pub fn combine_and_infer(cs: &ConstraintSystem, rows: &[usize], signs: &[bool]) -> Vec<ForcedAssignment> {
    assert_eq!(rows.len(), signs.len(), "one sign per row");
    let mut out = Vec::new();
    Combiner::new(cs.num_cols).infer(cs, rows, |l| signs[l], &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

pub fn kset_infer(cs: &ConstraintSystem, k: usize) -> Vec<ForcedAssignment> {
    kset_infer_with_stats(cs, k).0
}

/// All forced values found by combinations of up to `k` distinct rows.
///
/// Only row sets that are connected in the overlap graph are visited. A
/// disconnected set splits into parts on disjoint columns whose bounds add up,
/// so on a consistent system it is tight only if every part is tight, and the
/// parts alone already yield the same assignments. The first sign is fixed to
/// `+1` because negating a whole combination swaps the two tight cases.
pub fn kset_infer_with_stats(cs: &ConstraintSystem, k: usize) -> (Vec<ForcedAssignment>, KSetStats) {
    assert!(k >= 1, "k must be at least 1");
    let adj = cs.overlap_graph();
    let mut stats = KSetStats::default();
    let mut out = Vec::new();
    let mut comb = Combiner::new(cs.num_cols);
    connected_subsets(&adj, k, |rows| {
        stats.subsets += 1;
        for mask in 0u64..1 << (rows.len() - 1) {
            stats.combinations += 1;
            comb.infer(cs, rows, |l| l > 0 && mask >> (l - 1) & 1 == 1, &mut out);
        }
    });
    out.sort_unstable();
    out.dedup();
    (out, stats)
}

/// Reference search over every row set of size at most `k`, connected or not.
pub fn kset_infer_exhaustive(cs: &ConstraintSystem, k: usize) -> Vec<ForcedAssignment> {
    assert!(k >= 1, "k must be at least 1");
    let mut out = Vec::new();
    let mut comb = Combiner::new(cs.num_cols);
    for size in 1..=k.min(cs.num_rows()) {
        for rows in (0..cs.num_rows()).combinations(size) {
            for mask in 0u64..1 << (size - 1) {
                comb.infer(cs, &rows, |l| l > 0 && mask >> (l - 1) & 1 == 1, &mut out);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Calls `emit` once for every connected vertex set of size `1..=k` (ESU).
pub(crate) fn connected_subsets(adj: &[Vec<usize>], k: usize, mut emit: impl FnMut(&[usize])) {
    struct Esu<'a, F> {
        adj: &'a [Vec<usize>],
        k: usize,
        // Number of subset members equal or adjacent to each vertex.
        closed: Vec<u32>,
        sub: Vec<usize>,
        emit: F,
    }

    impl<F: FnMut(&[usize])> Esu<'_, F> {
        fn mark(&mut self, w: usize, delta: i32) {
            let apply = |c: &mut u32| *c = (*c as i32 + delta) as u32;
            apply(&mut self.closed[w]);
            for &u in &self.adj[w] {
                apply(&mut self.closed[u]);
            }
        }

        fn extend(&mut self, mut ext: Vec<usize>, root: usize) {
            (self.emit)(&self.sub);
            if self.sub.len() == self.k {
                return;
            }
            while let Some(w) = ext.pop() {
                let mut next = ext.clone();
                next.extend(self.adj[w].iter().copied().filter(|&u| u > root && self.closed[u] == 0));
                self.sub.push(w);
                self.mark(w, 1);
                self.extend(next, root);
                self.mark(w, -1);
                self.sub.pop();
            }
        }
    }

    let mut esu = Esu { adj, k, closed: vec![0; adj.len()], sub: Vec::with_capacity(k), emit: &mut emit };
    for (v, nbrs) in adj.iter().enumerate() {
        esu.sub.push(v);
        esu.mark(v, 1);
        let ext = nbrs.iter().copied().filter(|&u| u > v).collect();
        esu.extend(ext, v);
        esu.mark(v, -1);
        esu.sub.pop();
    }
}
