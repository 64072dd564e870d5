//! MT-distribution bounds in the variable-assignment setting.

use std::f64::consts::E;

use super::cluster::ClusterWeights;
use super::graph::DepGraph;
use super::shearer::{shearer_measure, Measure, SetWeight};
use crate::error::{Error, Result};
use crate::events::{
    event_probability, joint_probability, restrict_var_disjunction, ScopedEvent, VarSpace,
};

/// Where μ values come from.
#[derive(Debug, Clone, Copy)]
pub enum MuSource<'a> {
    /// Exact Shearer measure of the restricted family.
    Exact,
    /// Cluster-expansion weights, indexed by bad-event; yields upper bounds.
    Cluster(&'a ClusterWeights),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiTheta {
    pub psi: f64,
    pub theta: f64,
}

/// `Ψ = Σ_{J ⊆ neighbors, J independent} weight(J)` and `θ = p_e Ψ`.
pub fn psi_theta(
    g: &DepGraph,
    neighbors: &[usize],
    p_e: f64,
    weights: &impl SetWeight,
) -> Result<PsiTheta> {
    let psi: f64 = g
        .independent_sets(neighbors, None)?
        .map(|s| weights.set_weight(&s))
        .sum();
    Ok(PsiTheta {
        psi,
        theta: p_e * psi,
    })
}

pub(crate) enum FamilyWeights {
    Exact(Measure),
    Cluster(ClusterWeights),
}

impl SetWeight for FamilyWeights {
    fn set_weight(&self, set: &[usize]) -> f64 {
        match self {
            FamilyWeights::Exact(m) => m.set_weight(set),
            FamilyWeights::Cluster(w) => w.set_weight(set),
        }
    }
}

/// A restricted family of bad-events with its graph and μ values.
pub(crate) struct Family {
    pub(crate) keep: Vec<usize>,
    pub(crate) graph: DepGraph,
    pub(crate) weights: FamilyWeights,
}

impl Family {
    pub(crate) fn build(full: &DepGraph, keep: Vec<usize>, source: MuSource<'_>) -> Result<Self> {
        let graph = full.induced(&keep);
        let weights = match source {
            MuSource::Exact => {
                let m = shearer_measure(&graph)?;
                m.require_satisfied().map_err(|e| match e {
                    Error::ShearerViolated { set } => Error::ShearerViolated {
                        set: set.iter().map(|&k| keep[k]).collect(),
                    },
                    other => other,
                })?;
                FamilyWeights::Exact(m)
            }
            MuSource::Cluster(w) => {
                if w.len() != full.len() {
                    return Err(Error::InvalidGraph(format!(
                        "{} cluster weights for {} bad-events",
                        w.len(),
                        full.len()
                    )));
                }
                FamilyWeights::Cluster(w.restrict(&keep))
            }
        };
        Ok(Family {
            keep,
            graph,
            weights,
        })
    }

    /// Local indices of family members satisfying `pred(original index)`.
    pub(crate) fn local(&self, mut pred: impl FnMut(usize) -> bool) -> Vec<usize> {
        (0..self.keep.len())
            .filter(|&k| pred(self.keep[k]))
            .collect()
    }

    pub(crate) fn psi(&self, neighbors: &[usize], p_e: f64) -> Result<PsiTheta> {
        psi_theta(&self.graph, neighbors, p_e, &self.weights)
    }

    pub(crate) fn mu(&self, set: &[usize]) -> f64 {
        self.weights.set_weight(set)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctionBound {
    /// `Σ_j P(A_j ∧ ¬A_1 … ∧ ¬A_{j−1}) Ψ(A_j)` for the order used.
    pub ordered: f64,
    /// `P(∨𝓐) max_j Ψ(A_j)`.
    pub corollary: f64,
    pub order: Vec<usize>,
    pub psi: Vec<f64>,
    pub p_union: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingletonBound {
    pub ordered: f64,
    /// `P(A) (1 + P(∨𝓑′) max Ψ(B))`.
    pub corollary: f64,
    /// `P(A) (1 + e P(∨𝓑′))`, valid under the symmetric criterion.
    pub symmetric: f64,
    pub p_event: f64,
    /// Original indices of `𝓑′` in the order used.
    pub touching: Vec<usize>,
}

/// Bound calculators over a fixed space and list of bad-events.
pub struct VarBounds<'a> {
    space: &'a VarSpace,
    bad: &'a [ScopedEvent],
    graph: DepGraph,
}

impl<'a> VarBounds<'a> {
    pub fn new(space: &'a VarSpace, bad: &'a [ScopedEvent]) -> Result<Self> {
        let probs = bad
            .iter()
            .map(|b| event_probability(space, b))
            .collect::<Result<Vec<_>>>()?;
        let graph = DepGraph::from_relation(probs, |a, b| bad[a].related(&bad[b]))?;
        Ok(VarBounds { space, bad, graph })
    }

    pub fn graph(&self) -> &DepGraph {
        &self.graph
    }

    fn family(&self, conds: &[ScopedEvent], source: MuSource<'_>) -> Result<Family> {
        let keep = restrict_var_disjunction(self.space, self.bad, conds)?;
        Family::build(&self.graph, keep, source)
    }

    /// Ψ and θ of `e` over `𝓑[e]`.
    pub fn psi_theta(&self, e: &ScopedEvent, source: MuSource<'_>) -> Result<PsiTheta> {
        let fam = self.family(std::slice::from_ref(e), source)?;
        let nbrs = fam.local(|b| self.bad[b].related(e));
        fam.psi(&nbrs, event_probability(self.space, e)?)
    }

    /// Ψ and θ of `e` over an explicit restriction (original indices).
    pub fn psi_theta_in(
        &self,
        e: &ScopedEvent,
        restriction: &[usize],
        source: MuSource<'_>,
    ) -> Result<PsiTheta> {
        let fam = Family::build(&self.graph, restriction.to_vec(), source)?;
        let nbrs = fam.local(|b| self.bad[b].related(e));
        fam.psi(&nbrs, event_probability(self.space, e)?)
    }

    /// Disjunction bound with the events taken in `order` (input order when
    /// `None`).
    pub fn disjunction_bound(
        &self,
        events: &[ScopedEvent],
        order: Option<&[usize]>,
        source: MuSource<'_>,
    ) -> Result<DisjunctionBound> {
        let fam = self.family(events, source)?;
        let psi = events
            .iter()
            .map(|a| {
                let nbrs = fam.local(|b| self.bad[b].related(a));
                fam.psi(&nbrs, 1.0).map(|pt| pt.psi)
            })
            .collect::<Result<Vec<_>>>()?;
        self.combine(events, &psi, order)
    }

    fn combine(
        &self,
        events: &[ScopedEvent],
        psi: &[f64],
        order: Option<&[usize]>,
    ) -> Result<DisjunctionBound> {
        let order: Vec<usize> = order.map_or_else(|| (0..events.len()).collect(), |o| o.to_vec());
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..events.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidEvent(
                "order is not a permutation of the events".into(),
            ));
        }
        let mut ordered = 0.0;
        for (j, &idx) in order.iter().enumerate() {
            let refs: Vec<&ScopedEvent> = order[..=j].iter().map(|&k| &events[k]).collect();
            let p = joint_probability(self.space, &refs, |t| t[j] && t[..j].iter().all(|v| !v))?;
            ordered += p * psi[idx];
        }
        let refs: Vec<&ScopedEvent> = events.iter().collect();
        let p_union = joint_probability(self.space, &refs, |t| t.iter().any(|&v| v))?;
        let max_psi = psi.iter().copied().fold(0.0, f64::max);
        Ok(DisjunctionBound {
            ordered,
            corollary: p_union * max_psi,
            order,
            psi: psi.to_vec(),
            p_union,
        })
    }

    /// Try every order (at most 8 events) and keep the smallest bound.
    pub fn best_order_disjunction_bound(
        &self,
        events: &[ScopedEvent],
        source: MuSource<'_>,
    ) -> Result<DisjunctionBound> {
        const ORDER_BUDGET: usize = 8;
        if events.len() > ORDER_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "disjunction order search",
                size: events.len(),
                budget: ORDER_BUDGET,
            });
        }
        let base = self.disjunction_bound(events, None, source)?;
        let mut best = base.clone();
        let mut order: Vec<usize> = (0..events.len()).collect();
        while next_permutation(&mut order) {
            let b = self.combine(events, &base.psi, Some(&order))?;
            if b.ordered < best.ordered {
                best = b;
            }
        }
        Ok(best)
    }

    /// Singleton bound for `A ≡ X(i) ∈ D`, with `𝓑′` in input order.
    pub fn singleton_bound(&self, a: &ScopedEvent, source: MuSource<'_>) -> Result<SingletonBound> {
        if !a.is_singleton() {
            return Err(Error::NotSingleton {
                scope: a.scope().to_vec(),
            });
        }
        let var = a.scope()[0];
        let fam = self.family(std::slice::from_ref(a), source)?;
        let touching_local = fam.local(|b| self.bad[b].involves(var));
        let touching: Vec<usize> = touching_local.iter().map(|&k| fam.keep[k]).collect();
        let p_event = event_probability(self.space, a)?;

        let mut sum = 0.0;
        let mut max_psi: f64 = 0.0;
        for (j, &k) in touching_local.iter().enumerate() {
            let nbrs = fam.graph.neighbors(k);
            let psi = fam.psi(&nbrs, 1.0)?.psi;
            max_psi = max_psi.max(psi);
            let refs: Vec<&ScopedEvent> = touching[..=j].iter().map(|&b| &self.bad[b]).collect();
            let p = joint_probability(self.space, &refs, |t| t[j] && t[..j].iter().all(|v| !v))?;
            sum += p * psi;
        }
        let refs: Vec<&ScopedEvent> = touching.iter().map(|&b| &self.bad[b]).collect();
        let p_union = if refs.is_empty() {
            0.0
        } else {
            joint_probability(self.space, &refs, |t| t.iter().any(|&v| v))?
        };
        Ok(SingletonBound {
            ordered: p_event * (1.0 + sum),
            corollary: p_event * (1.0 + p_union * max_psi),
            symmetric: p_event * (1.0 + E * p_union),
            p_event,
            touching,
        })
    }
}

/// Lexicographic next permutation; false once the last one has been seen.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
