//! Shearer's `Q` and the measure `μ(I) = Q(I) / Q(∅)`.
//!
//! `Q(I)` is the signed sum over independent supersets of `I`. Factoring out
//! `I` gives `Q(I) = Π_{B∈I} p_B · q(V ∖ N(I))` where `q(S)` is the
//! independence polynomial of `G[S]` evaluated at `-p`; `q` obeys
//! `q(S) = q(S − v) − p_v q(S ∖ N(v))`, which is what we evaluate.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, ToPrimitive, Zero};

use super::graph::DepGraph;
use crate::error::{Error, Result};

/// Largest graph accepted by [`shearer_measure`].
pub const SHEARER_BUDGET: usize = 25;
/// Graphs up to this size are evaluated in exact rational arithmetic when
/// every probability is a small-denominator rational.
const EXACT_BUDGET: usize = 16;
const MAX_DENOMINATOR: i64 = 1 << 20;
const INDEPENDENT_SET_CAP: usize = 1 << 22;

/// Anything that assigns a weight to an independent set of a fixed graph.
pub trait SetWeight {
    fn set_weight(&self, set: &[usize]) -> f64;
}

/// Shearer measure of a dependency graph.
#[derive(Debug, Clone)]
pub struct Measure {
    pub q_empty: f64,
    /// μ for every independent set, keyed by bitmask.
    pub mu_cache: HashMap<u64, f64>,
    pub satisfied: bool,
    /// First independent set (in enumeration order) with `Q(I) ≤ 0`.
    pub violation: Option<Vec<usize>>,
    pub exact: bool,
}

impl Measure {
    fn mask(set: &[usize]) -> u64 {
        set.iter().fold(0, |m, &i| m | 1 << i)
    }

    /// `μ(I)`; zero for non-independent sets.
    pub fn mu(&self, set: &[usize]) -> f64 {
        let mask = Self::mask(set);
        if mask.count_ones() as usize != set.len() {
            return 0.0;
        }
        self.mu_cache.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn mu_single(&self, b: usize) -> f64 {
        self.mu(&[b])
    }

    pub fn require_satisfied(&self) -> Result<&Self> {
        match &self.violation {
            None => Ok(self),
            Some(set) => Err(Error::ShearerViolated { set: set.clone() }),
        }
    }
}

impl SetWeight for Measure {
    fn set_weight(&self, set: &[usize]) -> f64 {
        self.mu(set)
    }
}

fn indep_poly<T: Num + Clone>(nbr: &[u64], probs: &[T], s: u64, memo: &mut HashMap<u64, T>) -> T {
    if s == 0 {
        return T::one();
    }
    if let Some(v) = memo.get(&s) {
        return v.clone();
    }
    let v = s.trailing_zeros() as usize;
    let without = indep_poly(nbr, probs, s & !(1 << v), memo);
    let rest = indep_poly(nbr, probs, s & !nbr[v], memo);
    let value = without - probs[v].clone() * rest;
    memo.insert(s, value.clone());
    value
}

fn small_rational(p: f64) -> Option<BigRational> {
    let r = Ratio::<i64>::approximate_float(p)?;
    if *r.denom() > MAX_DENOMINATOR || r.to_f64()? != p {
        return None;
    }
    Some(BigRational::new(
        BigInt::from(*r.numer()),
        BigInt::from(*r.denom()),
    ))
}

/// Compute `Q(I)` for every independent `I` and the resulting measure.
///
/// The returned measure has `satisfied == false` (and `violation` set) when
/// some `Q(I) ≤ 0`.
pub fn shearer_measure(g: &DepGraph) -> Result<Measure> {
    let m = g.len();
    if m > SHEARER_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "Shearer measure",
            size: m,
            budget: SHEARER_BUDGET,
        });
    }
    let nbr: Vec<u64> = (0..m).map(|v| g.neighbor_mask(v)).collect();
    let full: u64 = if m == 0 { 0 } else { (1u64 << m) - 1 };
    let all: Vec<usize> = (0..m).collect();
    let sets: Vec<Vec<usize>> = g
        .independent_sets(&all, Some(m))?
        .take(INDEPENDENT_SET_CAP + 1)
        .collect();
    if sets.len() > INDEPENDENT_SET_CAP {
        return Err(Error::BudgetExceeded {
            what: "independent sets in Shearer measure",
            size: sets.len(),
            budget: INDEPENDENT_SET_CAP,
        });
    }
    let outside = |set: &[usize]| set.iter().fold(full, |s, &b| s & !nbr[b]);

    // q(V ∖ N(I)) for every independent I, either exactly or in floating point.
    let rationals: Option<Vec<BigRational>> = if m <= EXACT_BUDGET {
        g.probs().iter().map(|&p| small_rational(p)).collect()
    } else {
        None
    };
    let exact = rationals.is_some();
    // (Q(I) sign, Q(I) / Q(∅) as f64 when Q(∅) > 0)
    let mut q_values: Vec<(bool, f64)> = Vec::with_capacity(sets.len());
    let q_empty: f64;
    if let Some(probs) = rationals {
        let mut memo = HashMap::new();
        let qe = indep_poly(&nbr, &probs, full, &mut memo);
        q_empty = qe.to_f64().unwrap_or(f64::NAN);
        for set in &sets {
            let w: BigRational = set.iter().map(|&b| probs[b].clone()).product();
            let q = w * indep_poly(&nbr, &probs, outside(set), &mut memo);
            let positive = q > BigRational::zero();
            let ratio = if qe > BigRational::zero() {
                (q / qe.clone()).to_f64().unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            q_values.push((positive, ratio));
        }
    } else {
        let probs = g.probs().to_vec();
        let mut memo = HashMap::new();
        q_empty = indep_poly(&nbr, &probs, full, &mut memo);
        for set in &sets {
            let w: f64 = set.iter().map(|&b| probs[b]).product();
            let q = w * indep_poly(&nbr, &probs, outside(set), &mut memo);
            q_values.push((q > 0.0, q / q_empty));
        }
    }

    let violation = sets
        .iter()
        .zip(&q_values)
        .find(|(_, (positive, _))| !positive)
        .map(|(s, _)| s.clone());
    let satisfied = violation.is_none();
    let mu_cache = if satisfied {
        sets.iter()
            .zip(&q_values)
            .map(|(s, (_, mu))| (Measure::mask(s), *mu))
            .collect()
    } else {
        HashMap::new()
    };
    Ok(Measure {
        q_empty,
        mu_cache,
        satisfied,
        violation,
        exact,
    })
}

/// Total weight of stable-set sequences `⟨J, S_2, …, S_ℓ⟩` with `ℓ ≤ depth`.
///
/// Each later set is a nonempty independent subset of the union of the
/// neighbourhoods of its predecessor. The result is nondecreasing in `depth`
/// and never exceeds `μ(J)` when Shearer's criterion holds.
pub fn stable_seq_weight(j: &[usize], g: &DepGraph, depth: usize) -> Result<f64> {
    const DEPTH_BUDGET: usize = 10;
    if depth > DEPTH_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "stable-set sequence depth",
            size: depth,
            budget: DEPTH_BUDGET,
        });
    }
    if g.len() > SHEARER_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "stable-set sequence graph",
            size: g.len(),
            budget: SHEARER_BUDGET,
        });
    }
    if depth == 0 || !g.is_independent(j) {
        return Ok(0.0);
    }
    let nbr: Vec<u64> = (0..g.len()).map(|v| g.neighbor_mask(v)).collect();
    let mut memo = HashMap::new();
    let mask = j.iter().fold(0u64, |m, &b| m | 1 << b);
    Ok(seq_weight(g, &nbr, mask, depth, &mut memo))
}

fn seq_weight(
    g: &DepGraph,
    nbr: &[u64],
    set: u64,
    depth: usize,
    memo: &mut HashMap<(u64, usize), f64>,
) -> f64 {
    if let Some(&v) = memo.get(&(set, depth)) {
        return v;
    }
    let members: Vec<usize> = (0..g.len()).filter(|b| set >> b & 1 == 1).collect();
    let w: f64 = members.iter().map(|&b| g.prob(b)).product();
    let mut tail = 0.0;
    if depth > 1 && set != 0 {
        let reach = members.iter().fold(0u64, |m, &b| m | nbr[b]);
        let cand: Vec<usize> = (0..g.len()).filter(|b| reach >> b & 1 == 1).collect();
        let subsets: Vec<Vec<usize>> = g
            .independent_sets(&cand, Some(cand.len()))
            .expect("size cap supplied")
            .skip(1)
            .collect();
        for s in subsets {
            let next = s.iter().fold(0u64, |m, &b| m | 1 << b);
            tail += seq_weight(g, nbr, next, depth - 1, memo);
        }
    }
    let value = w * (1.0 + tail);
    memo.insert((set, depth), value);
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_event() {
        let g = DepGraph::new(vec![0.2], &[]).unwrap();
        let m = shearer_measure(&g).unwrap();
        assert!(m.satisfied && m.exact);
        assert!((m.q_empty - 0.8).abs() < 1e-15);
        assert!((m.mu_single(0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn adjacent_pair() {
        let g = DepGraph::new(vec![0.2, 0.2], &[(0, 1)]).unwrap();
        let m = shearer_measure(&g).unwrap();
        assert!((m.q_empty - 0.6).abs() < 1e-15);
        assert!((m.mu_single(0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.mu(&[0, 1]), 0.0);
    }

    #[test]
    fn independent_pair() {
        let p = 0.3;
        let g = DepGraph::new(vec![p, p], &[]).unwrap();
        let m = shearer_measure(&g).unwrap();
        assert!((m.mu_single(0) - p / (1.0 - p)).abs() < 1e-15);
        assert!((m.mu(&[0, 1]) - (p / (1.0 - p)).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn violated_criterion_reports_set() {
        let g = DepGraph::new(vec![0.6, 0.6], &[(0, 1)]).unwrap();
        let m = shearer_measure(&g).unwrap();
        assert!(!m.satisfied);
        assert!(matches!(
            m.require_satisfied(),
            Err(Error::ShearerViolated { .. })
        ));
    }

    #[test]
    fn float_path_matches_exact_path() {
        // An irrational-looking probability forces the floating path.
        let p = std::f64::consts::PI / 20.0;
        let g = DepGraph::new(vec![p, 0.1, 0.1], &[(0, 1), (1, 2)]).unwrap();
        let m = shearer_measure(&g).unwrap();
        assert!(!m.exact);
        let h = DepGraph::new(vec![0.15, 0.1, 0.1], &[(0, 1), (1, 2)]).unwrap();
        assert!(shearer_measure(&h).unwrap().exact);
        // q(∅) by hand: 1 − Σp + p0 p2
        let q = 1.0 - (p + 0.2) + p * 0.1;
        assert!((m.q_empty - q).abs() < 1e-14);
    }

    #[test]
    fn stable_sequences_geometric() {
        let g = DepGraph::new(vec![0.5], &[]).unwrap();
        let w = stable_seq_weight(&[0], &g, 3).unwrap();
        assert!((w - 0.875).abs() < 1e-15);
        assert!((stable_seq_weight(&[0], &g, 1).unwrap() - 0.5).abs() < 1e-15);
        let h = DepGraph::new(vec![0.1, 0.1], &[(0, 1)]).unwrap();
        assert_eq!(stable_seq_weight(&[0, 1], &h, 4).unwrap(), 0.0);
    }

    #[test]
    fn stable_sequences_approach_mu() {
        let g = DepGraph::new(vec![0.1, 0.15, 0.2, 0.1], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let m = shearer_measure(&g).unwrap();
        let mut prev = 0.0;
        for d in 1..=10 {
            let w = stable_seq_weight(&[1], &g, d).unwrap();
            assert!(w >= prev - 1e-15);
            assert!(w <= m.mu_single(1) + 1e-12);
            prev = w;
        }
        assert!(m.mu_single(1) - prev < 1e-4);
    }
}
