use lllforge_core::bounds::{is_orderable, shearer_measure, ClusterWeights, MuSource, PermBounds};
use lllforge_core::events::pairs_related;
use lllforge_core::swap::{build_witness_tree, resample_perm_event};
use lllforge_core::{AtomicPermEvent, Permutation, RngStream};
use proptest::prelude::*;

/// Try every ordering of `y` and every choice of `z_i`.
fn brute_orderable(y: &[&AtomicPermEvent], a: &AtomicPermEvent) -> bool {
    fn go(
        rest: &mut Vec<usize>,
        placed: &mut Vec<usize>,
        y: &[&AtomicPermEvent],
        a: &AtomicPermEvent,
    ) -> bool {
        if rest.is_empty() {
            return true;
        }
        for k in 0..rest.len() {
            let b = rest[k];
            let ok = a.pairs().iter().any(|&z| {
                y[b].pairs().iter().any(|&p| pairs_related(p, z))
                    && placed
                        .iter()
                        .all(|&c| !y[c].pairs().iter().any(|&p| pairs_related(p, z)))
            });
            if ok {
                rest.remove(k);
                placed.push(b);
                let found = go(rest, placed, y, a);
                placed.pop();
                rest.insert(k, b);
                if found {
                    return true;
                }
            }
        }
        false
    }
    let mut rest: Vec<usize> = (0..y.len()).collect();
    go(&mut rest, &mut Vec::new(), y, a)
}

fn atomic(n: usize, max_len: usize) -> impl Strategy<Value = AtomicPermEvent> {
    prop::collection::vec((0..n, 0..n), 1..=max_len)
        .prop_filter_map("valid atomic event", |pairs| {
            AtomicPermEvent::new(pairs).ok()
        })
}

fn instance() -> impl Strategy<Value = (usize, Vec<AtomicPermEvent>, AtomicPermEvent)> {
    (4usize..=7).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(atomic(n, 2), 0..=6),
            atomic(n, 3),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn orderable_search_matches_brute_force(
        a in atomic(6, 3),
        y in prop::collection::vec(atomic(6, 2), 0..=4),
    ) {
        let refs: Vec<&AtomicPermEvent> = y.iter().collect();
        prop_assert_eq!(is_orderable(&refs, &a).unwrap(), brute_orderable(&refs, &a));
    }

    #[test]
    fn psi_prime_never_exceeds_psi((n, bad, a) in instance(), mu in 0.0f64..0.5) {
        let pb = PermBounds::new(n, &bad).unwrap();
        let w = ClusterWeights::uniform(bad.len(), mu).unwrap();
        let prime = pb.psi_theta_prime(&a, MuSource::Cluster(&w)).unwrap();
        let plain = pb.psi_theta(&a, MuSource::Cluster(&w)).unwrap();
        prop_assert!(prime.psi <= plain.psi + 1e-12);
        prop_assert!(prime.psi >= 1.0);
        if shearer_measure(pb.graph()).unwrap().satisfied {
            if let (Ok(p), Ok(q)) = (
                pb.psi_theta_prime(&a, MuSource::Exact),
                pb.psi_theta(&a, MuSource::Exact),
            ) {
                prop_assert!(p.psi <= q.psi + 1e-12);
                prop_assert!(p.theta + 1e-15 >= lllforge_core::events::perm_event_probability(n, &a));
            }
        }
    }

    #[test]
    fn root_children_are_independent_and_orderable(
        (n, bad, a) in instance(),
        raw_log in prop::collection::vec(0usize..64, 0..30),
    ) {
        prop_assume!(!bad.is_empty());
        let log: Vec<usize> = raw_log.iter().map(|k| k % bad.len()).collect();
        let _ = n;
        let t = build_witness_tree(&log, &a, &bad);
        let kids = t.root_children();
        for (i, &x) in kids.iter().enumerate() {
            for &y in &kids[i + 1..] {
                prop_assert!(!bad[x].related(&bad[y]));
            }
        }
        let refs: Vec<&AtomicPermEvent> = kids.iter().map(|&k| &bad[k]).collect();
        prop_assert!(is_orderable(&refs, &a).unwrap());
        for v in t.nodes.iter().skip(1) {
            let p = v.parent.unwrap();
            prop_assert_eq!(t.nodes[p].depth + 1, v.depth);
            if p != 0 {
                let lp = t.nodes[p].label.unwrap();
                prop_assert!(bad[lp].related(&bad[v.label.unwrap()]));
            }
        }
    }

    #[test]
    fn resampling_keeps_a_bijection(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = RngStream::derive(seed, "perm", 0);
        let mut pi = Permutation::random(n, &mut rng);
        let r = (n / 2).max(1);
        let pairs: Vec<(usize, usize)> = (0..r).map(|x| (x, pi.get(x))).collect();
        let b = AtomicPermEvent::new(pairs).unwrap();
        resample_perm_event(&mut pi, &b, &mut rng, true).unwrap();
        prop_assert!(pi.is_consistent());
    }
}

#[test]
fn two_element_resample_is_uniform() {
    let b = AtomicPermEvent::new(vec![(0, 0)]).unwrap();
    let trials = 20_000;
    let mut zero = 0;
    for s in 0..trials {
        let mut pi = Permutation::identity(2);
        let mut rng = RngStream::derive(s, "two", 0);
        resample_perm_event(&mut pi, &b, &mut rng, true).unwrap();
        if pi.get(0) == 0 {
            zero += 1;
        }
    }
    let f = zero as f64 / trials as f64;
    // 4 standard errors of a fair coin.
    assert!((f - 0.5).abs() < 4.0 * (0.25 / trials as f64).sqrt(), "{f}");
}

#[test]
fn weight_ignores_child_order() {
    use lllforge_core::swap::TreeStructure;
    let a = AtomicPermEvent::new(vec![(0, 0), (1, 1)]).unwrap();
    let bad = vec![
        AtomicPermEvent::new(vec![(0, 2)]).unwrap(),
        AtomicPermEvent::new(vec![(1, 3)]).unwrap(),
    ];
    let mut s = TreeStructure::singleton(a.clone());
    s.attach(0, 0);
    s.attach(0, 1);
    let mut t = TreeStructure::singleton(a);
    t.attach(0, 1);
    t.attach(0, 0);
    assert_eq!(s.canonical(), t.canonical());
    assert_eq!(s.weight(5, &bad), t.weight(5, &bad));
}
