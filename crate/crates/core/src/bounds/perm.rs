//! Orderable sets, Ψ′/θ′ and the permutation-setting n.i.b. and disjunction
//! bounds.

use std::collections::HashMap;

use super::graph::DepGraph;
use super::variable::{Family, MuSource, PsiTheta};
use crate::error::{Error, Result};
use crate::events::{perm_event_probability, restrict_perm_disjunction, AtomicPermEvent};

/// Largest set handed to the ordering search.
pub const ORDERABLE_BUDGET: usize = 12;
/// Largest disjunction evaluated by inclusion–exclusion.
pub const INCLUSION_EXCLUSION_BUDGET: usize = 20;

/// Whether `y` can be ordered `B_1, …, B_ℓ` with `z_i ∈ A`, `z_i ∼ B_i` and
/// `z_i ≁ B_1, …, B_{i−1}`.
pub fn is_orderable(y: &[&AtomicPermEvent], a: &AtomicPermEvent) -> Result<bool> {
    if y.len() > ORDERABLE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "orderable-set search",
            size: y.len(),
            budget: ORDERABLE_BUDGET,
        });
    }
    // hits[k]: which pairs of A touch y[k]
    let hits: Vec<u64> = y
        .iter()
        .map(|b| {
            a.pairs()
                .iter()
                .enumerate()
                .filter(|(_, &z)| b.touches(z))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    if a.len() > 64 {
        return Err(Error::BudgetExceeded {
            what: "orderable-set search (pairs of A)",
            size: a.len(),
            budget: 64,
        });
    }
    let full = if y.is_empty() {
        0
    } else {
        (1u32 << y.len()) - 1
    };
    let mut memo = HashMap::new();
    Ok(orderable_mask(full, &hits, &mut memo))
}

/// `mask` is orderable iff some member can go last: it owns a pair of `A`
/// touching none of the others, and the rest is orderable.
fn orderable_mask(mask: u32, hits: &[u64], memo: &mut HashMap<u32, bool>) -> bool {
    if mask == 0 {
        return true;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let mut result = false;
    let mut rest_bits = mask;
    while rest_bits != 0 {
        let k = rest_bits.trailing_zeros() as usize;
        rest_bits &= rest_bits - 1;
        let others = mask & !(1 << k);
        let covered = (0..hits.len())
            .filter(|&j| others >> j & 1 == 1)
            .fold(0u64, |m, j| m | hits[j]);
        if hits[k] & !covered != 0 && orderable_mask(others, hits, memo) {
            result = true;
            break;
        }
    }
    memo.insert(mask, result);
    result
}

/// `P_Ω(∨ events)` over uniform permutations, by inclusion–exclusion.
pub fn perm_union_probability(n: usize, events: &[AtomicPermEvent]) -> Result<f64> {
    let m = events.len();
    if m > INCLUSION_EXCLUSION_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "inclusion-exclusion",
            size: m,
            budget: INCLUSION_EXCLUSION_BUDGET,
        });
    }
    let mut total = 0.0;
    // Depth-first over subsets, carrying the running intersection.
    fn walk(
        n: usize,
        events: &[AtomicPermEvent],
        start: usize,
        acc: &AtomicPermEvent,
        size: usize,
        total: &mut f64,
    ) {
        for i in start..events.len() {
            if let Some(joint) = acc.union(&events[i]) {
                if joint.len() <= n {
                    let sign = if size.is_multiple_of(2) { 1.0 } else { -1.0 };
                    *total += sign * perm_event_probability(n, &joint);
                    walk(n, events, i + 1, &joint, size + 1, total);
                }
            }
        }
    }
    let empty = AtomicPermEvent::new(vec![])?;
    walk(n, events, 0, &empty, 0, &mut total);
    Ok(total.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermDisjunctionBound {
    /// `P_Ω(∨𝓐) + Σ_A (θ′(A) − P_Ω(A))`.
    pub bound: f64,
    pub p_union: f64,
    pub theta_prime: Vec<f64>,
}

/// Bound calculators for atomic events over `S_n`.
pub struct PermBounds<'a> {
    n: usize,
    bad: &'a [AtomicPermEvent],
    graph: DepGraph,
}

impl<'a> PermBounds<'a> {
    pub fn new(n: usize, bad: &'a [AtomicPermEvent]) -> Result<Self> {
        if let Some(b) = bad
            .iter()
            .find(|b| b.max_coordinate().is_some_and(|c| c >= n))
        {
            return Err(Error::InvalidEvent(format!(
                "{:?} exceeds n = {n}",
                b.pairs()
            )));
        }
        let probs = bad.iter().map(|b| perm_event_probability(n, b)).collect();
        let graph = DepGraph::from_relation(probs, |a, b| bad[a].related(&bad[b]))?;
        Ok(PermBounds { n, bad, graph })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &DepGraph {
        &self.graph
    }

    /// `𝓑[∨ conds]` as original indices.
    pub fn restriction(&self, conds: &[AtomicPermEvent]) -> Vec<usize> {
        restrict_perm_disjunction(self.n, self.bad, conds)
    }

    /// Independent orderable sets to `a` drawn from `restriction`, as
    /// original indices; `∅` first.
    pub fn orderable_sets(
        &self,
        a: &AtomicPermEvent,
        restriction: &[usize],
    ) -> Result<Vec<Vec<usize>>> {
        let nbrs: Vec<usize> = restriction
            .iter()
            .copied()
            .filter(|&b| self.bad[b].related(a))
            .collect();
        let mut out = Vec::new();
        // An orderable set uses a distinct pair of A per member.
        for set in self.graph.independent_sets(&nbrs, Some(a.len()))? {
            let refs: Vec<&AtomicPermEvent> = set.iter().map(|&b| &self.bad[b]).collect();
            if is_orderable(&refs, a)? {
                out.push(set);
            }
        }
        Ok(out)
    }

    fn family(&self, restriction: &[usize], source: MuSource<'_>) -> Result<Family> {
        Family::build(&self.graph, restriction.to_vec(), source)
    }

    /// Plain Ψ and θ of `a` over `𝓑[a]`.
    pub fn psi_theta(&self, a: &AtomicPermEvent, source: MuSource<'_>) -> Result<PsiTheta> {
        let keep = self.restriction(std::slice::from_ref(a));
        let fam = self.family(&keep, source)?;
        let nbrs = fam.local(|b| self.bad[b].related(a));
        fam.psi(&nbrs, perm_event_probability(self.n, a))
    }

    /// Ψ′ and θ′ of `a` over `𝓑[a]`.
    pub fn psi_theta_prime(&self, a: &AtomicPermEvent, source: MuSource<'_>) -> Result<PsiTheta> {
        let keep = self.restriction(std::slice::from_ref(a));
        self.psi_theta_prime_in(a, &keep, source)
    }

    /// Ψ′ and θ′ of `a` with μ taken from the family `restriction`.
    pub fn psi_theta_prime_in(
        &self,
        a: &AtomicPermEvent,
        restriction: &[usize],
        source: MuSource<'_>,
    ) -> Result<PsiTheta> {
        let fam = self.family(restriction, source)?;
        let local_of: HashMap<usize, usize> =
            fam.keep.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        let mut psi = 0.0;
        for set in self.orderable_sets(a, restriction)? {
            let local: Vec<usize> = set.iter().map(|b| local_of[b]).collect();
            psi += fam.mu(&local);
        }
        Ok(PsiTheta {
            psi,
            theta: perm_event_probability(self.n, a) * psi,
        })
    }

    /// Bound on `a` occurring non-initially and before any of `c`:
    /// `P_Ω(A)(Ψ′_{𝓑[C]}(A) − 1)`.
    pub fn nib_bound(
        &self,
        a: &AtomicPermEvent,
        c: &[AtomicPermEvent],
        source: MuSource<'_>,
    ) -> Result<f64> {
        let keep = self.restriction(c);
        let pt = self.psi_theta_prime_in(a, &keep, source)?;
        Ok(pt.theta - perm_event_probability(self.n, a))
    }

    /// `P_Ω(∨𝓐) + Σ_{A∈𝓐} (θ′_{𝓑[∨𝓐]}(A) − P_Ω(A))`.
    pub fn disjunction_bound(
        &self,
        events: &[AtomicPermEvent],
        source: MuSource<'_>,
    ) -> Result<PermDisjunctionBound> {
        let keep = self.restriction(events);
        let p_union = perm_union_probability(self.n, events)?;
        let mut bound = p_union;
        let mut theta_prime = Vec::with_capacity(events.len());
        for a in events {
            let pt = self.psi_theta_prime_in(a, &keep, source)?;
            bound += pt.theta - perm_event_probability(self.n, a);
            theta_prime.push(pt.theta);
        }
        Ok(PermDisjunctionBound {
            bound,
            p_union,
            theta_prime,
        })
    }
}
