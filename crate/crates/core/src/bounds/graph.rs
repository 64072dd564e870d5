use crate::error::{Error, Result};

/// Default cap on the number of vertices handed to independent-set enumeration.
pub const INDEPENDENT_SET_BUDGET: usize = 30;

/// Dependency graph on bad-events. Adjacency is symmetric and every vertex
/// carries a self-loop, so `N(B)` is the inclusive neighbourhood.
#[derive(Debug, Clone, PartialEq)]
pub struct DepGraph {
    probs: Vec<f64>,
    words: usize,
    adj: Vec<u64>,
}

impl DepGraph {
    pub fn new(probs: Vec<f64>, edges: &[(usize, usize)]) -> Result<Self> {
        let m = probs.len();
        let mut g = Self::empty(probs)?;
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range")));
            }
            g.link(a, b);
        }
        Ok(g)
    }

    /// Build the graph of a symmetric relation over `m` events.
    pub fn from_relation(probs: Vec<f64>, related: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let m = probs.len();
        let mut g = Self::empty(probs)?;
        for a in 0..m {
            for b in a + 1..m {
                if related(a, b) {
                    g.link(a, b);
                }
            }
        }
        Ok(g)
    }

    fn empty(probs: Vec<f64>) -> Result<Self> {
        if let Some(i) = probs.iter().position(|p| !(0.0..1.0).contains(p)) {
            return Err(Error::InvalidGraph(format!(
                "event {i} has probability {} outside [0, 1)",
                probs[i]
            )));
        }
        let m = probs.len();
        let words = m.div_ceil(64).max(1);
        let mut g = DepGraph {
            probs,
            words,
            adj: vec![0; words * m],
        };
        for i in 0..m {
            g.link(i, i);
        }
        Ok(g)
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adj[a * self.words + b / 64] |= 1 << (b % 64);
        self.adj[b * self.words + a / 64] |= 1 << (a % 64);
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `a ∈ N(b)`; always true for `a == b`.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    /// Inclusive neighbourhood of `v`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.adjacent(v, u)).collect()
    }

    /// Inclusive neighbourhood as a bitmask (graphs with at most 64 vertices).
    pub(crate) fn neighbor_mask(&self, v: usize) -> u64 {
        debug_assert!(self.len() <= 64);
        self.adj[v * self.words]
    }

    /// No two distinct members are adjacent. Repeated members count as
    /// adjacent through the self-loop.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &a)| set[k + 1..].iter().all(|&b| !self.adjacent(a, b)))
    }

    /// Induced subgraph on `keep`; vertex `k` of the result is `keep[k]`.
    pub fn induced(&self, keep: &[usize]) -> DepGraph {
        let probs = keep.iter().map(|&i| self.probs[i]).collect();
        DepGraph::from_relation(probs, |a, b| self.adjacent(keep[a], keep[b]))
            .expect("probabilities already validated")
    }

    /// Enumerate the independent subsets (including `∅`) of `filter`.
    pub fn independent_sets<'g>(
        &'g self,
        filter: &[usize],
        size_cap: Option<usize>,
    ) -> Result<IndependentSets<'g>> {
        let mut cand = filter.to_vec();
        cand.sort_unstable();
        cand.dedup();
        if size_cap.is_none() && cand.len() > INDEPENDENT_SET_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "independent-set enumeration",
                size: cand.len(),
                budget: INDEPENDENT_SET_BUDGET,
            });
        }
        Ok(IndependentSets {
            g: self,
            cand,
            cap: size_cap.unwrap_or(usize::MAX),
            stack: Vec::new(),
            current: Vec::new(),
            started: false,
        })
    }
}

/// Branch-and-prune enumeration of independent sets in lexicographic order.
pub struct IndependentSets<'g> {
    g: &'g DepGraph,
    cand: Vec<usize>,
    cap: usize,
    stack: Vec<usize>,
    current: Vec<usize>,
    started: bool,
}

impl IndependentSets<'_> {
    fn compatible(&self, v: usize) -> bool {
        self.current.iter().all(|&u| !self.g.adjacent(u, v))
    }

    fn push_from(&mut self, start: usize) -> bool {
        if self.current.len() >= self.cap {
            return false;
        }
        for p in start..self.cand.len() {
            if self.compatible(self.cand[p]) {
                self.stack.push(p);
                self.current.push(self.cand[p]);
                return true;
            }
        }
        false
    }
}

impl Iterator for IndependentSets<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            return Some(Vec::new());
        }
        let start = self.stack.last().map_or(0, |p| p + 1);
        if self.push_from(start) {
            return Some(self.current.clone());
        }
        while let Some(q) = self.stack.pop() {
            self.current.pop();
            if self.push_from(q + 1) {
                return Some(self.current.clone());
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(g: &DepGraph) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..g.len()).collect();
        g.independent_sets(&all, None).unwrap().collect()
    }

    #[test]
    fn triangle() {
        let g = DepGraph::new(vec![0.1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(sets(&g), vec![vec![], vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn edgeless_pair() {
        let g = DepGraph::new(vec![0.1; 2], &[]).unwrap();
        assert_eq!(sets(&g).len(), 4);
    }

    #[test]
    fn path() {
        let g = DepGraph::new(vec![0.1; 3], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            sets(&g),
            vec![vec![], vec![0], vec![0, 2], vec![1], vec![2]]
        );
    }

    #[test]
    fn budget_and_cap() {
        let g = DepGraph::new(vec![0.1; 40], &[]).unwrap();
        let all: Vec<usize> = (0..40).collect();
        assert!(matches!(
            g.independent_sets(&all, None),
            Err(Error::BudgetExceeded { .. })
        ));
        let capped: Vec<_> = g.independent_sets(&all, Some(1)).unwrap().collect();
        assert_eq!(capped.len(), 41);
    }

    #[test]
    fn rejects_probability_one() {
        assert!(DepGraph::new(vec![1.0], &[]).is_err());
    }

    #[test]
    fn induced_keeps_relation() {
        let g = DepGraph::new(vec![0.1, 0.2, 0.3], &[(0, 2)]).unwrap();
        let h = g.induced(&[2, 0]);
        assert!(h.adjacent(0, 1));
        assert_eq!(h.prob(0), 0.3);
    }
}
