use std::f64::consts::E;

use super::graph::DepGraph;
use super::shearer::SetWeight;
use crate::error::{Error, Result};

/// Relative slack allowed when comparing the two sides of the criterion.
pub const CLUSTER_TOL: f64 = 1e-12;

/// Cluster-expansion weights `μ̃(B) ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterWeights {
    mu_tilde: Vec<f64>,
}

impl ClusterWeights {
    pub fn new(mu_tilde: Vec<f64>) -> Result<Self> {
        if mu_tilde.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidGraph(
                "cluster weights must be finite and nonnegative".into(),
            ));
        }
        Ok(ClusterWeights { mu_tilde })
    }

    pub fn uniform(m: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; m])
    }

    /// Weights from asymmetric-LLL values `x(B)`: `μ̃ = x / (1 − x)`.
    pub fn from_asymmetric(x: &[f64]) -> Result<Self> {
        if x.iter().any(|v| !(0.0..1.0).contains(v)) {
            return Err(Error::InvalidGraph(
                "asymmetric weights must lie in [0, 1)".into(),
            ));
        }
        Self::new(x.iter().map(|v| v / (1.0 - v)).collect())
    }

    pub fn get(&self, b: usize) -> f64 {
        self.mu_tilde[b]
    }

    pub fn values(&self) -> &[f64] {
        &self.mu_tilde
    }

    pub fn len(&self) -> usize {
        self.mu_tilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu_tilde.is_empty()
    }

    /// Weights re-indexed onto a sub-family.
    pub fn restrict(&self, keep: &[usize]) -> ClusterWeights {
        ClusterWeights {
            mu_tilde: keep.iter().map(|&i| self.mu_tilde[i]).collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.mu_tilde.iter().sum()
    }
}

impl SetWeight for ClusterWeights {
    fn set_weight(&self, set: &[usize]) -> f64 {
        set.iter().map(|&b| self.mu_tilde[b]).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventVerdict {
    pub mu_tilde: f64,
    /// `P(B) Σ_{I ⊆ N(B) independent} Π μ̃`.
    pub required: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterVerdict {
    pub per_event: Vec<EventVerdict>,
    pub satisfied: bool,
}

/// `Σ_{I ⊆ N(v), I independent} Π_{B∈I} μ̃(B)`.
pub fn neighborhood_polynomial(g: &DepGraph, v: usize, w: &impl SetWeight) -> Result<f64> {
    let nbrs = g.neighbors(v);
    Ok(g.independent_sets(&nbrs, None)?
        .map(|s| w.set_weight(&s))
        .sum())
}

/// Check `μ̃(B) ≥ P(B) Σ_{I ⊆ N(B) independent} Π μ̃` for every event.
pub fn check_cluster_expansion(g: &DepGraph, w: &ClusterWeights) -> Result<ClusterVerdict> {
    if w.len() != g.len() {
        return Err(Error::InvalidGraph(format!(
            "{} weights for {} events",
            w.len(),
            g.len()
        )));
    }
    let mut per_event = Vec::with_capacity(g.len());
    for b in 0..g.len() {
        let p = g.prob(b);
        let required = if p == 0.0 {
            0.0
        } else {
            p * neighborhood_polynomial(g, b, w)?
        };
        let mu_tilde = w.get(b);
        per_event.push(EventVerdict {
            mu_tilde,
            required,
            holds: mu_tilde >= required * (1.0 - CLUSTER_TOL) - f64::MIN_POSITIVE,
        });
    }
    let satisfied = per_event.iter().all(|v| v.holds);
    Ok(ClusterVerdict {
        per_event,
        satisfied,
    })
}

/// The symmetric criterion `e p d ≤ 1` (`d` counts `B` itself).
pub fn symmetric_criterion(p: f64, d: usize) -> bool {
    E * p * d as f64 <= 1.0
}

/// The weights associated with the symmetric criterion, `μ̃ = e p`.
pub fn symmetric_weights(m: usize, p: f64) -> ClusterWeights {
    ClusterWeights {
        mu_tilde: vec![E * p; m],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_with_equality() {
        // α = 0.1 (1 + 3α) ⇒ α = 1/7
        let g = DepGraph::new(vec![0.1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let w = ClusterWeights::uniform(3, 1.0 / 7.0).unwrap();
        let v = check_cluster_expansion(&g, &w).unwrap();
        assert!(v.satisfied);
        for e in &v.per_event {
            assert!((e.required - 1.0 / 7.0).abs() < 1e-15);
        }
        let low = ClusterWeights::uniform(3, 0.14).unwrap();
        assert!(!check_cluster_expansion(&g, &low).unwrap().satisfied);
    }

    #[test]
    fn zero_probability_always_fine() {
        let g = DepGraph::new(vec![0.0, 0.0], &[(0, 1)]).unwrap();
        let w = ClusterWeights::uniform(2, 0.0).unwrap();
        assert!(check_cluster_expansion(&g, &w).unwrap().satisfied);
    }

    #[test]
    fn asymmetric_mapping() {
        let w = ClusterWeights::from_asymmetric(&[0.5, 0.2]).unwrap();
        assert!((w.get(0) - 1.0).abs() < 1e-15);
        assert!((w.get(1) - 0.25).abs() < 1e-15);
        assert!(ClusterWeights::new(vec![-1.0]).is_err());
    }

    #[test]
    fn symmetric_helpers() {
        assert!(symmetric_criterion(1.0 / 64.0, 18));
        assert!(!symmetric_criterion(1.0 / 64.0, 24));
        assert!((symmetric_weights(2, 0.1).get(1) - E * 0.1).abs() < 1e-15);
    }
}
