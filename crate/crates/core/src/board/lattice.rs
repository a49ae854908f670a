use std::fmt;

use serde::{Deserialize, Serialize};

/// A lattice coordinate. Valid for a board of side `n` when both fields are `< n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site {
    pub row: usize,
    pub col: usize,
}

impl Site {
    pub const fn new(row: usize, col: usize) -> Self {
        Site { row, col }
    }

    #[inline]
    pub fn index(self, n: usize) -> usize {
        self.row * n + self.col
    }

    #[inline]
    pub fn from_index(index: usize, n: usize) -> Self {
        Site { row: index / n, col: index % n }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Boundary {
    /// Periodic: neighbors wrap modulo `n`.
    #[default]
    Torus,
    /// Neighborhoods are clipped at the edges.
    Open,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Torus => "torus",
            Boundary::Open => "open",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "torus" => Ok(Boundary::Torus),
            "open" => Ok(Boundary::Open),
            other => Err(format!("unknown boundary `{other}` (expected torus|open)")),
        }
    }
}

/// Moore neighborhood of `site`, sorted row-major.
///
/// On a torus the offsets wrap modulo `n`; coincident images (only possible for
/// `n < 3`) are merged and the site itself is never its own neighbor.
pub fn neighbors(site: Site, n: usize, boundary: Boundary) -> Vec<Site> {
    debug_assert!(site.row < n && site.col < n);
    let mut out = Vec::with_capacity(8);
    for dr in [-1isize, 0, 1] {
        for dc in [-1isize, 0, 1] {
            if dr == 0 && dc == 0 {
                continue;
            }
            let r = site.row as isize + dr;
            let c = site.col as isize + dc;
            let s = match boundary {
                Boundary::Torus => Site::new(r.rem_euclid(n as isize) as usize, c.rem_euclid(n as isize) as usize),
                Boundary::Open => {
                    if r < 0 || c < 0 || r >= n as isize || c >= n as isize {
                        continue;
                    }
                    Site::new(r as usize, c as usize)
                }
            };
            if s != site {
                out.push(s);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Precomputed neighbor table for an `n × n` lattice, addressed by flat site index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    n: usize,
    boundary: Boundary,
    offsets: Vec<u32>,
    adjacency: Vec<u32>,
}

impl Lattice {
    pub fn new(n: usize, boundary: Boundary) -> Self {
        let mut offsets = Vec::with_capacity(n * n + 1);
        let mut adjacency = Vec::with_capacity(n * n * 8);
        offsets.push(0);
        for idx in 0..n * n {
            for s in neighbors(Site::from_index(idx, n), n, boundary) {
                adjacency.push(s.index(n) as u32);
            }
            offsets.push(adjacency.len() as u32);
        }
        Lattice { n, boundary, offsets, adjacency }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Neighbor indices of flat index `idx`, in row-major order.
    #[inline]
    pub fn adj(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let lo = self.offsets[idx] as usize;
        let hi = self.offsets[idx + 1] as usize;
        self.adjacency[lo..hi].iter().map(|&v| v as usize)
    }

    #[inline]
    pub fn site(&self, idx: usize) -> Site {
        Site::from_index(idx, self.n)
    }

    #[inline]
    pub fn index(&self, site: Site) -> usize {
        site.index(self.n)
    }

    pub fn contains(&self, site: Site) -> bool {
        site.row < self.n && site.col < self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_corner_wraps() {
        let ns = neighbors(Site::new(0, 0), 5, Boundary::Torus);
        assert_eq!(ns.len(), 8);
        for s in [Site::new(4, 4), Site::new(4, 0), Site::new(0, 4)] {
            assert!(ns.contains(&s), "missing {s}");
        }
    }

    #[test]
    fn open_corner_clips() {
        let ns = neighbors(Site::new(0, 0), 5, Boundary::Open);
        assert_eq!(ns, vec![Site::new(0, 1), Site::new(1, 0), Site::new(1, 1)]);
    }

    #[test]
    fn open_interior_is_full_ring() {
        let ns = neighbors(Site::new(2, 2), 5, Boundary::Open);
        let expected: Vec<Site> = (1..=3)
            .flat_map(|r| (1..=3).map(move |c| Site::new(r, c)))
            .filter(|&s| s != Site::new(2, 2))
            .collect();
        assert_eq!(ns, expected);
    }

    #[test]
    fn degree_counts() {
        let n = 6;
        for idx in 0..n * n {
            let s = Site::from_index(idx, n);
            assert_eq!(neighbors(s, n, Boundary::Torus).len(), 8);
            let edge_r = s.row == 0 || s.row == n - 1;
            let edge_c = s.col == 0 || s.col == n - 1;
            let expected = match (edge_r, edge_c) {
                (true, true) => 3,
                (true, false) | (false, true) => 5,
                (false, false) => 8,
            };
            assert_eq!(neighbors(s, n, Boundary::Open).len(), expected);
        }
    }

    #[test]
    fn neighbor_relation_is_symmetric() {
        for boundary in [Boundary::Torus, Boundary::Open] {
            for n in 1..=7 {
                let lat = Lattice::new(n, boundary);
                for a in 0..lat.len() {
                    for b in lat.adj(a) {
                        assert!(lat.adj(b).any(|x| x == a), "n={n} {boundary}: {a}->{b} not symmetric");
                    }
                }
            }
        }
    }

    #[test]
    fn tiny_torus_merges_images() {
        assert_eq!(neighbors(Site::new(0, 0), 1, Boundary::Torus), vec![]);
        assert_eq!(neighbors(Site::new(0, 0), 2, Boundary::Torus).len(), 3);
    }
}
