//! Independent transversals of block-partitioned graphs and the probability
//! that an MT transversal meets a given vertex set.

use std::f64::consts::E;

use lllforge_core::bounds::ClusterWeights;
use lllforge_core::mt::{default_max_steps, MtInstance, ResamplingTable};
use lllforge_core::{Assignment, RngStream, ScopedEvent, SelectionRule, VarSpace};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

/// Default number of MT restarts in [`find_avoiding_transversal`].
pub const DEFAULT_RESTARTS: usize = 64;

/// A graph whose vertices `0..k b` are partitioned into `k` blocks of size
/// `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGraph {
    blocks: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    block_of: Vec<usize>,
    pos_in_block: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BlockGraphFile {
    blocks: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    avoid: Vec<usize>,
}

impl BlockGraph {
    pub fn new(blocks: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let b = blocks.first().map_or(0, Vec::len);
        if b == 0 {
            return Err(AppError::InvalidInstance(
                "need at least one nonempty block".into(),
            ));
        }
        let total = blocks.len() * b;
        let mut block_of = vec![usize::MAX; total];
        let mut pos_in_block = vec![0; total];
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != b {
                return Err(AppError::InvalidInstance(format!(
                    "block {i} has {} vertices, expected {b}",
                    block.len()
                )));
            }
            for (p, &v) in block.iter().enumerate() {
                if v >= total || block_of[v] != usize::MAX {
                    return Err(AppError::InvalidInstance(format!(
                        "vertex {v} is out of range or in two blocks"
                    )));
                }
                block_of[v] = i;
                pos_in_block[v] = p;
            }
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= total || v >= total {
                return Err(AppError::InvalidInstance(format!(
                    "edge ({u}, {v}) out of range"
                )));
            }
            if u == v {
                return Err(AppError::InvalidInstance(format!("self-loop at {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(BlockGraph {
            blocks,
            edges: norm,
            block_of,
            pos_in_block,
        })
    }

    /// Parse `{"blocks": [[..]..], "edges": [[u, v]..], "avoid": [..]}`.
    pub fn from_json(text: &str) -> Result<(Self, Vec<usize>)> {
        let file: BlockGraphFile = serde_json::from_str(text)?;
        let g = Self::new(file.blocks, file.edges)?;
        if let Some(&v) = file.avoid.iter().find(|&&v| v >= g.num_vertices()) {
            return Err(AppError::InvalidInstance(format!(
                "avoid vertex {v} out of range"
            )));
        }
        Ok((g, file.avoid))
    }

    pub fn to_json(&self, avoid: &[usize]) -> String {
        serde_json::to_string(&BlockGraphFile {
            blocks: self.blocks.clone(),
            edges: self.edges.clone(),
            avoid: avoid.to_vec(),
        })
        .expect("plain data serializes")
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn b(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn num_vertices(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0; self.num_vertices()];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Random graph with maximum degree at most `delta` and only
    /// cross-block edges: every vertex gets `delta` stubs, stubs are paired
    /// at random, and pairs that would repeat an edge or stay inside a block
    /// are discarded.
    pub fn random(k: usize, b: usize, delta: usize, seed: u64) -> Result<Self> {
        let blocks: Vec<Vec<usize>> = (0..k).map(|i| (i * b..(i + 1) * b).collect()).collect();
        let mut rng = RngStream::derive(seed, "block-graph", 0);
        let mut stubs: Vec<usize> = (0..k * b)
            .flat_map(|v| std::iter::repeat_n(v, delta))
            .collect();
        for i in (1..stubs.len()).rev() {
            let j = rng.below(i + 1);
            stubs.swap(i, j);
        }
        let edges: Vec<(usize, usize)> = stubs
            .chunks_exact(2)
            .filter(|c| c[0] / b != c[1] / b)
            .map(|c| (c[0], c[1]))
            .collect();
        Self::new(blocks, edges)
    }
}

/// One chosen vertex per block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transversal {
    pub vertices: Vec<usize>,
}

impl Transversal {
    pub fn from_assignment(g: &BlockGraph, a: &Assignment) -> Self {
        Transversal {
            vertices: a
                .values
                .iter()
                .enumerate()
                .map(|(i, &p)| g.blocks[i][p])
                .collect(),
        }
    }

    pub fn is_independent(&self, g: &BlockGraph) -> bool {
        let mut chosen = vec![false; g.num_vertices()];
        for (i, &v) in self.vertices.iter().enumerate() {
            if g.block_of(v) != i {
                return false;
            }
            chosen[v] = true;
        }
        self.vertices.len() == g.k() && g.edges.iter().all(|&(u, v)| !(chosen[u] && chosen[v]))
    }

    pub fn meets(&self, set: &[usize]) -> bool {
        self.vertices.iter().any(|v| set.contains(v))
    }
}

/// The MT instance of a block graph: a uniform variable per block and a
/// bad-event per cross-block edge.
#[derive(Debug, Clone)]
pub struct TransversalInstance {
    pub mt: MtInstance,
    /// Bad-event `e` comes from edge `edge_of[e]`.
    pub edge_of: Vec<usize>,
    pub dropped_intra_block: usize,
}

pub fn to_lll_instance(g: &BlockGraph) -> Result<TransversalInstance> {
    let space = VarSpace::uniform(&vec![g.b(); g.k()])?;
    let mut bad = Vec::new();
    let mut edge_of = Vec::new();
    let mut dropped = 0;
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        let (bu, bv) = (g.block_of[u], g.block_of[v]);
        if bu == bv {
            dropped += 1;
            continue;
        }
        bad.push(ScopedEvent::conjunction(vec![
            (bu, g.pos_in_block[u]),
            (bv, g.pos_in_block[v]),
        ])?);
        edge_of.push(e);
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} edges inside a block");
    }
    Ok(TransversalInstance {
        mt: MtInstance::new(space, bad)?,
        edge_of,
        dropped_intra_block: dropped,
    })
}

fn check_block_size(b: usize, delta: usize) -> Result<()> {
    if b < 4 * delta {
        return Err(AppError::SubcriticalBlockSize { b, delta });
    }
    Ok(())
}

/// `α = (b − √(b(b − 4Δ)) − 2Δ) / (2bΔ²)`.
pub fn alpha_cluster(b: usize, delta: usize) -> Result<f64> {
    check_block_size(b, delta)?;
    if delta == 0 {
        return Ok(0.0);
    }
    let (bf, d) = (b as f64, delta as f64);
    Ok((bf - (bf * (bf - 4.0 * d)).sqrt() - 2.0 * d) / (2.0 * bf * d * d))
}

fn root_term(b: usize, delta: usize) -> f64 {
    (1.0 - 4.0 * delta as f64 / b as f64).max(0.0).sqrt()
}

/// `Ψ(E) ≤ 2b / (b + (b − ℓ)√(1 − 4Δ/b) + ℓ)` for `E ≡ T ∩ L ≠ ∅` with
/// `L` inside one block.
pub fn psi_bound(b: usize, delta: usize, l: usize) -> Result<f64> {
    check_block_size(b, delta)?;
    let (bf, lf) = (b as f64, l as f64);
    Ok(2.0 * bf / (bf + (bf - lf) * root_term(b, delta) + lf))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AvoidanceBranch {
    /// `b ≥ 4.5Δ`.
    Large,
    /// `4Δ ≤ b < 4.5Δ`: the larger of two closed forms.
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvoidanceBound {
    pub value: f64,
    pub branch: AvoidanceBranch,
    /// `2ℓ / ((b + ℓ) + (b − ℓ)√(1 − 4Δ/b))`.
    pub rational_form: f64,
    /// `2(1 − e^{−ℓ/b}) / (1 + √(1 − 4Δ/b))`, only in the intermediate range.
    pub exponential_form: Option<f64>,
}

/// Upper bound on `P_MT(L ∩ T ≠ ∅)` for `|L| = ℓ < b`.
pub fn avoidance_bound(b: usize, delta: usize, l: usize) -> Result<AvoidanceBound> {
    check_block_size(b, delta)?;
    if l >= b {
        return Err(AppError::OutOfRange(format!(
            "|L| = {l} must be below b = {b}"
        )));
    }
    let (bf, lf) = (b as f64, l as f64);
    let s = root_term(b, delta);
    let rational_form = 2.0 * lf / ((bf + lf) + (bf - lf) * s);
    if 2 * b >= 9 * delta {
        Ok(AvoidanceBound {
            value: rational_form,
            branch: AvoidanceBranch::Large,
            rational_form,
            exponential_form: None,
        })
    } else {
        let exp_form = 2.0 * (1.0 - (-lf / bf).exp()) / (1.0 + s);
        Ok(AvoidanceBound {
            value: rational_form.max(exp_form),
            branch: AvoidanceBranch::Intermediate,
            rational_form,
            exponential_form: Some(exp_form),
        })
    }
}

/// Run MT on a fresh table derived from `(seed, label, index)`.
pub fn sample_transversal(
    g: &BlockGraph,
    inst: &TransversalInstance,
    mut stream: RngStream,
    max_steps: usize,
) -> (Transversal, bool, usize) {
    let mut table = ResamplingTable::new(inst.mt.space(), stream.next_u64());
    let r = inst
        .mt
        .run(&mut table, SelectionRule::LowestIndex, max_steps);
    let t = Transversal::from_assignment(g, &r.final_assignment);
    if r.terminated {
        assert!(
            t.is_independent(g),
            "terminated MT output is not an independent transversal"
        );
    }
    (t, r.terminated, r.steps)
}

/// `1000 Σ μ̃` with `μ̃ = α(b, Δ)`, or 1000 when the block size is
/// subcritical.
pub fn default_steps(g: &BlockGraph, inst: &TransversalInstance) -> usize {
    let alpha = alpha_cluster(g.b(), g.max_degree()).unwrap_or(1.0);
    let w = ClusterWeights::uniform(inst.mt.bad().len(), alpha).expect("finite weight");
    default_max_steps(&w).max(1000)
}

/// Restart MT until its output avoids `avoid`. Returns the transversal and
/// the number of runs used.
pub fn find_avoiding_transversal(
    g: &BlockGraph,
    avoid: &[usize],
    seed: u64,
    max_restarts: usize,
) -> Result<(Transversal, usize)> {
    let b = g.b();
    if avoid.len() >= b {
        return Err(AppError::OutOfRange(format!(
            "|L| = {} must be below b = {b}",
            avoid.len()
        )));
    }
    let delta = g.max_degree();
    if (b as f64) < E * E / (E - 1.0) * delta as f64 {
        log::warn!("b = {b} is below e^2/(e-1) * {delta}; trying anyway");
    }
    let inst = to_lll_instance(g)?;
    let steps = default_steps(g, &inst);
    for r in 0..max_restarts {
        let (t, terminated, _) = sample_transversal(
            g,
            &inst,
            RngStream::derive(seed, "restart", r as u64),
            steps,
        );
        if terminated && !t.meets(avoid) {
            return Ok((t, r + 1));
        }
    }
    Err(AppError::RestartsExhausted(max_restarts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_examples() {
        assert!((alpha_cluster(4, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((alpha_cluster(8, 2).unwrap() - 0.0625).abs() < 1e-15);
        assert!(matches!(
            alpha_cluster(7, 2),
            Err(AppError::SubcriticalBlockSize { .. })
        ));
    }

    #[test]
    fn avoidance_examples() {
        let a = avoidance_bound(10, 2, 5).unwrap();
        assert_eq!(a.branch, AvoidanceBranch::Large);
        assert!((a.value - 10.0 / (15.0 + 5.0 * 0.2f64.sqrt())).abs() < 1e-15);
        assert!((a.value - 0.5802).abs() < 1e-4);
        let b = avoidance_bound(21, 5, 10).unwrap();
        assert_eq!(b.branch, AvoidanceBranch::Intermediate);
        assert!((b.rational_form - 0.5988).abs() < 1e-4);
        assert!((b.exponential_form.unwrap() - 0.6219).abs() < 1e-4);
        assert_eq!(b.value, b.exponential_form.unwrap());
        assert_eq!(avoidance_bound(10, 2, 0).unwrap().value, 0.0);
        assert!(matches!(
            avoidance_bound(10, 2, 10),
            Err(AppError::OutOfRange(_))
        ));
    }

    #[test]
    fn psi_bound_relation() {
        // ℓ/b · Ψ bound equals the rational form.
        let psi = psi_bound(10, 2, 5).unwrap();
        let a = avoidance_bound(10, 2, 5).unwrap();
        assert!((psi * 0.5 - a.rational_form).abs() < 1e-15);
    }

    #[test]
    fn instance_probabilities() {
        let g = BlockGraph::new(vec![vec![0, 1], vec![2, 3]], vec![(1, 2), (0, 1)]).unwrap();
        let inst = to_lll_instance(&g).unwrap();
        assert_eq!(inst.dropped_intra_block, 1);
        assert_eq!(inst.mt.probabilities().unwrap(), vec![0.25]);
        for s in 0..50 {
            let (t, terminated, _) =
                sample_transversal(&g, &inst, RngStream::derive(s, "t", 0), 1000);
            assert!(terminated);
            assert!(!(t.vertices.contains(&1) && t.vertices.contains(&2)));
        }
    }

    #[test]
    fn edgeless_graph_has_no_events() {
        let g = BlockGraph::new(vec![vec![0, 1, 2]], vec![]).unwrap();
        assert!(to_lll_instance(&g).unwrap().mt.bad().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let g = BlockGraph::random(3, 4, 1, 2).unwrap();
        let (h, avoid) = BlockGraph::from_json(&g.to_json(&[0, 5])).unwrap();
        assert_eq!(g, h);
        assert_eq!(avoid, vec![0, 5]);
        assert!(BlockGraph::from_json("{\"blocks\": [[0, 1], [2]], \"edges\": []}").is_err());
    }

    #[test]
    fn random_graph_degree() {
        let g = BlockGraph::random(8, 10, 2, 4).unwrap();
        assert!(g.max_degree() <= 2);
        assert!(g
            .edges()
            .iter()
            .all(|&(u, v)| g.block_of(u) != g.block_of(v)));
    }

    #[test]
    fn avoider_respects_set() {
        let g = BlockGraph::random(8, 10, 2, 9).unwrap();
        let avoid: Vec<usize> = (0..5).collect();
        let (t, runs) = find_avoiding_transversal(&g, &avoid, 1, DEFAULT_RESTARTS).unwrap();
        assert!(runs >= 1);
        assert!(t.is_independent(&g));
        assert!(!t.meets(&avoid));
        let block: Vec<usize> = (0..10).collect();
        assert!(find_avoiding_transversal(&g, &block, 1, 4).is_err());
    }
}
