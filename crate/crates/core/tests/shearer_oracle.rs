use lllforge_core::bounds::{
    check_cluster_expansion, neighborhood_polynomial, shearer_measure, stable_seq_weight,
    ClusterWeights, DepGraph,
};
use proptest::prelude::*;

/// `Q(I) = Σ_{J ⊇ I, J independent} (−1)^{|J∖I|} Π_{B∈J} p_B`, summed over
/// every subset of the vertex set.
fn brute_q(g: &DepGraph, i: &[usize]) -> f64 {
    let m = g.len();
    let base: u32 = i.iter().fold(0, |acc, &v| acc | 1 << v);
    let mut total = 0.0;
    for j in 0u32..(1 << m) {
        if j & base != base {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|&v| j >> v & 1 == 1).collect();
        if !g.is_independent(&members) {
            continue;
        }
        let extra = (j & !base).count_ones();
        let prod: f64 = members.iter().map(|&v| g.prob(v)).product();
        total += if extra.is_multiple_of(2) { prod } else { -prod };
    }
    total
}

fn graph_strategy(max_m: usize, max_p: f64) -> impl Strategy<Value = DepGraph> {
    (1..=max_m).prop_flat_map(move |m| {
        let pairs = m * (m - 1) / 2;
        (
            prop::collection::vec(0.0..max_p, m),
            prop::collection::vec(prop::bool::weighted(0.4), pairs),
        )
            .prop_map(move |(probs, bits)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for a in 0..m {
                    for b in a + 1..m {
                        if bits[k] {
                            edges.push((a, b));
                        }
                        k += 1;
                    }
                }
                DepGraph::new(probs, &edges).unwrap()
            })
    })
}

/// Iterate `μ̃ ← P(B) Σ_{I ⊆ N(B)} Π μ̃` from `μ̃ = P`.
fn fixed_point(g: &DepGraph) -> Option<ClusterWeights> {
    let mut w = ClusterWeights::new(g.probs().to_vec()).unwrap();
    for _ in 0..200 {
        let next: Vec<f64> = (0..g.len())
            .map(|b| g.prob(b) * neighborhood_polynomial(g, b, &w).unwrap())
            .collect();
        if next.iter().any(|v| !v.is_finite() || *v > 1e6) {
            return None;
        }
        w = ClusterWeights::new(next).unwrap();
    }
    // A little slack makes the criterion hold strictly.
    ClusterWeights::new(w.values().iter().map(|v| v * (1.0 + 1e-6)).collect()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn measure_matches_signed_sum(g in graph_strategy(10, 0.3)) {
        let m = shearer_measure(&g).unwrap();
        let q0 = brute_q(&g, &[]);
        let all: Vec<usize> = (0..g.len()).collect();
        let mut oracle_ok = q0 > 0.0;
        let sets: Vec<Vec<usize>> = g.independent_sets(&all, None).unwrap().collect();
        for s in &sets {
            if brute_q(&g, s) <= 0.0 {
                oracle_ok = false;
            }
        }
        prop_assert_eq!(m.satisfied, oracle_ok);
        if oracle_ok {
            for s in &sets {
                let expect = brute_q(&g, s) / q0;
                prop_assert!((m.mu(s) - expect).abs() <= 1e-10 * expect.abs().max(1.0),
                    "set {:?}: {} vs {}", s, m.mu(s), expect);
            }
        }
    }

    #[test]
    fn cluster_weights_dominate_mu(g in graph_strategy(8, 0.15)) {
        if let Some(w) = fixed_point(&g) {
            let verdict = check_cluster_expansion(&g, &w).unwrap();
            if verdict.satisfied {
                let m = shearer_measure(&g).unwrap();
                prop_assert!(m.satisfied);
                for b in 0..g.len() {
                    prop_assert!(m.mu_single(b) <= w.get(b) * (1.0 + 1e-9) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn stable_sequences_increase_toward_mu(g in graph_strategy(6, 0.12)) {
        let m = shearer_measure(&g).unwrap();
        prop_assume!(m.satisfied);
        let all: Vec<usize> = (0..g.len()).collect();
        for j in g.independent_sets(&all, None).unwrap().skip(1) {
            let mut prev = 0.0;
            for d in 1..=6 {
                let w = stable_seq_weight(&j, &g, d).unwrap();
                prop_assert!(w + 1e-15 >= prev);
                prop_assert!(w <= m.mu(&j) * (1.0 + 1e-9) + 1e-15);
                prev = w;
            }
        }
    }
}

#[test]
fn non_independent_sets_have_no_sequences() {
    let g = DepGraph::new(vec![0.1, 0.1], &[(0, 1)]).unwrap();
    assert_eq!(stable_seq_weight(&[0, 1], &g, 4).unwrap(), 0.0);
    let m = shearer_measure(&g).unwrap();
    assert_eq!(m.mu(&[0, 1]), 0.0);
}

#[test]
fn depth_one_is_product() {
    let g = DepGraph::new(vec![0.1, 0.2, 0.3], &[(0, 1)]).unwrap();
    let w = stable_seq_weight(&[0, 2], &g, 1).unwrap();
    assert!((w - 0.03).abs() < 1e-15);
}
