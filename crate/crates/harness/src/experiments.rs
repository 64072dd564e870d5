//! Experiments shared by the CLI and the test suites. Each returns the
//! checked claims plus a serializable summary.

use std::collections::BTreeMap;

use lllforge_apps::ksat::{
    cnf_to_instance, epsilon_bound, implicate_formula, implicate_lower_bound, min_implicate_size,
    random_cnf, Cnf, Deviation, ImplicateSize, SampleMatrix,
};
use lllforge_apps::latin::{
    f_value, g_value, per_cell_bound, random_cells, stein_bound, stein_trial, weight_bound,
    ColorMatrix, LatinSampler, PartialLatinSampler,
};
use lllforge_apps::transversal::{
    avoidance_bound, default_steps, sample_transversal, to_lll_instance, AvoidanceBound, BlockGraph,
};
use lllforge_core::bounds::{symmetric_weights, ClusterWeights, MuSource, PermBounds, VarBounds};
use lllforge_core::mt::{compatible, default_max_steps, MtInstance, ResamplingTable, WitnessDag};
use lllforge_core::swap::{build_witness_tree, SwapInstance};
use lllforge_core::{AtomicPermEvent, RngStream, ScopedEvent, SelectionRule, VarSpace};
use rand::RngCore;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::estimate::{CutoffPolicy, Estimate, Level, Moments, Runner, Trial};
use crate::verdict::Check;

/// Per-experiment configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub runner: Runner,
    pub level: Level,
    pub policy: CutoffPolicy,
    pub max_steps: Option<usize>,
}

impl Settings {
    pub fn new(trials: u64, seed: u64) -> Self {
        Settings {
            runner: Runner::new(trials, seed, 0),
            level: Level::P99,
            policy: CutoffPolicy::CountAsEvent,
            max_steps: None,
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.runner.trials = trials;
        self
    }

    pub fn seed(&self) -> u64 {
        self.runner.seed
    }

    fn counts(&self, hits: u64, counted: u64, cutoffs: u64) -> Estimate {
        Estimate::from_counts(hits, counted, cutoffs, self.level, self.seed())
    }

    /// Fold a trial outcome into `(hits, counted, cutoffs)`.
    fn tally(&self, acc: &mut (u64, u64, u64), t: Trial) {
        if !t.terminated {
            acc.2 += 1;
            if self.policy == CutoffPolicy::Exclude {
                return;
            }
        }
        acc.1 += 1;
        if t.event || !t.terminated {
            acc.0 += 1;
        }
    }
}

fn add3(a: &mut (u64, u64, u64), b: (u64, u64, u64)) {
    a.0 += b.0;
    a.1 += b.1;
    a.2 += b.2;
}

// ---------------------------------------------------------------- k-SAT

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceSummary {
    pub n: usize,
    pub clauses: usize,
    pub k: usize,
    pub l: usize,
    pub criterion: bool,
    pub epsilon: Option<f64>,
    pub samples: u64,
    pub cutoffs: u64,
    pub unsatisfied: u64,
    pub deviations: Vec<Deviation>,
}

/// MT samples of a formula and their `j`-wise deviation from uniform.
pub fn ksat_independence(
    cnf: &Cnf,
    js: &[usize],
    s: &Settings,
) -> Result<(IndependenceSummary, Vec<Check>)> {
    let inst = cnf_to_instance(cnf)?;
    let n = cnf.n();
    let m = cnf.clauses().len();
    let max_steps = s.max_steps.unwrap_or_else(|| {
        default_max_steps(&symmetric_weights(m, 2f64.powi(-(inst.k as i32)))).max(1000)
    });
    let words = n.div_ceil(64);
    let (bits, cutoffs, unsatisfied) = s.runner.fold(
        || (Vec::<u64>::new(), 0u64, 0u64),
        |acc, _, mut rng| {
            let mut table = ResamplingTable::new(inst.mt.space(), rng.next_u64());
            let r = inst
                .mt
                .run(&mut table, SelectionRule::LowestIndex, max_steps);
            if !r.terminated {
                acc.1 += 1;
                return;
            }
            if !cnf.satisfied_by(&r.final_assignment.values) {
                acc.2 += 1;
            }
            let base = acc.0.len();
            acc.0.resize(base + words, 0);
            for (v, &x) in r.final_assignment.values.iter().enumerate() {
                if x != 0 {
                    acc.0[base + v / 64] |= 1 << (v % 64);
                }
            }
        },
        |a, b| {
            a.0.extend(b.0);
            a.1 += b.1;
            a.2 += b.2;
        },
    );
    let mut samples = SampleMatrix::new(n);
    let mut row = vec![0usize; n];
    for chunk in bits.chunks_exact(words.max(1)) {
        for (v, x) in row.iter_mut().enumerate() {
            *x = (chunk[v / 64] >> (v % 64) & 1) as usize;
        }
        samples.push(&row);
    }
    let epsilon = epsilon_bound(inst.k, inst.l).ok();
    let mut checks = vec![Check::zero_failures(
        "every output satisfies the formula",
        unsatisfied
            + if s.policy == CutoffPolicy::CountAsEvent {
                cutoffs
            } else {
                0
            },
    )];
    let mut deviations = Vec::new();
    if !samples.is_empty() {
        for &j in js {
            let d = jwise_deviation_checked(&samples, j, s.seed())?;
            if let Some(eps) = epsilon {
                checks.push(Check::at_most(
                    format!("{j}-wise deviation"),
                    d.max_deviation,
                    4.0 * d.se,
                    eps,
                ));
            }
            deviations.push(d);
        }
    }
    if epsilon.is_none() {
        log::warn!(
            "L = {} exceeds 2^k/(ek) for k = {}; no deviation bound applies",
            inst.l,
            inst.k
        );
    }
    Ok((
        IndependenceSummary {
            n,
            clauses: m,
            k: inst.k,
            l: inst.l,
            criterion: inst.criterion,
            epsilon,
            samples: samples.len() as u64,
            cutoffs,
            unsatisfied,
            deviations,
        },
        checks,
    ))
}

fn jwise_deviation_checked(samples: &SampleMatrix, j: usize, seed: u64) -> Result<Deviation> {
    Ok(lllforge_apps::ksat::jwise_deviation(samples, j, seed)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicateSummary {
    pub k: usize,
    pub l: usize,
    pub j: usize,
    pub found: ImplicateSize,
}

/// The tight construction: a formula with maximum occurrence `L` and a
/// smallest non-trivial implicate of size `k − ⌊log₂L⌋`.
pub fn implicate_construction(k: usize, l: usize) -> Result<(ImplicateSummary, Check)> {
    if l == 0 || k == 0 {
        return Err(HarnessError::InvalidArgument("need k, L >= 1".into()));
    }
    let j = k
        .checked_sub(l.ilog2() as usize)
        .filter(|&j| j >= 1)
        .ok_or_else(|| {
            HarnessError::InvalidArgument(format!("log2 L exceeds k - 1 for k = {k}, L = {l}"))
        })?;
    let (cnf, _) = implicate_formula(k, j)?;
    let found = min_implicate_size(&cnf)?;
    let ok = found == ImplicateSize::Size(j);
    Ok((
        ImplicateSummary { k, l, j, found },
        Check::zero_failures(
            format!("k={k} L={l}: smallest implicate has size {j}"),
            u64::from(!ok),
        ),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomImplicates {
    pub lower_bound: i64,
    pub sizes: Vec<ImplicateSize>,
}

/// Smallest implicates of `count` random formulas against `k − ⌊log₂(eL)⌋`.
pub fn random_implicates(
    n: usize,
    k: usize,
    l: usize,
    count: usize,
    seed: u64,
) -> Result<(RandomImplicates, Check)> {
    let lower_bound = implicate_lower_bound(k, l);
    let mut sizes = Vec::with_capacity(count);
    let mut failures = 0;
    for i in 0..count {
        let cnf = random_cnf(
            n,
            k,
            l,
            RngStream::derive(seed, "formula", i as u64).next_u64(),
        )?;
        let size = min_implicate_size(&cnf)?;
        match size {
            ImplicateSize::Size(s) if (s as i64) < lower_bound => failures += 1,
            ImplicateSize::Unsatisfiable => failures += 1,
            _ => {}
        }
        sizes.push(size);
    }
    Ok((
        RandomImplicates { lower_bound, sizes },
        Check::zero_failures(
            format!("random k={k} L={l}: implicates of size >= {lower_bound}"),
            failures,
        ),
    ))
}

// ---------------------------------------------------------- transversals

#[derive(Debug, Clone, Serialize)]
pub struct AvoidanceSummary {
    pub k: usize,
    pub b: usize,
    pub delta: usize,
    pub l: usize,
    pub blocks_touched: usize,
    pub bound: AvoidanceBound,
    pub invalid: u64,
    pub estimate: Estimate,
}

/// `P(T ∩ L ≠ ∅)` for MT transversals against the avoidance bound.
pub fn transversal_avoidance(
    g: &BlockGraph,
    avoid: &[usize],
    s: &Settings,
) -> Result<(AvoidanceSummary, Vec<Check>)> {
    let delta = g.max_degree();
    let bound = avoidance_bound(g.b(), delta, avoid.len())?;
    let inst = to_lll_instance(g)?;
    let max_steps = s.max_steps.unwrap_or_else(|| default_steps(g, &inst));
    let (tally, invalid) = s.runner.fold(
        || ((0u64, 0u64, 0u64), 0u64),
        |acc, _, rng| {
            let (t, terminated, _) = sample_transversal(g, &inst, rng, max_steps);
            if terminated && !t.is_independent(g) {
                acc.1 += 1;
            }
            s.tally(
                &mut acc.0,
                Trial {
                    event: t.meets(avoid),
                    terminated,
                },
            );
        },
        |a, b| {
            add3(&mut a.0, b.0);
            a.1 += b.1;
        },
    );
    let est = s.counts(tally.0, tally.1, tally.2);
    let mut blocks: Vec<usize> = avoid.iter().map(|&v| g.block_of(v)).collect();
    blocks.sort_unstable();
    blocks.dedup();
    let l = avoid.len();
    let checks = vec![
        Check::probability(format!("P(T meets L), |L| = {l}"), est.clone(), bound.value),
        Check::zero_failures("outputs are independent transversals", invalid),
    ];
    Ok((
        AvoidanceSummary {
            k: g.k(),
            b: g.b(),
            delta,
            l,
            blocks_touched: blocks.len(),
            bound,
            invalid,
            estimate: est,
        },
        checks,
    ))
}

// ------------------------------------------------------------ Latin

#[derive(Debug, Clone, Serialize)]
pub struct WeightedSummary {
    pub n: usize,
    pub delta: usize,
    pub per_cell_bound: f64,
    pub worst_cell: (usize, usize),
    pub worst_cell_estimate: Estimate,
    pub mean_weight: f64,
    pub weight_se: f64,
    pub weight_bound: f64,
    pub cutoffs: u64,
}

/// Cell frequencies and weights of Swapping Algorithm transversals.
pub fn weighted_latin(m: &ColorMatrix, s: &Settings) -> Result<(WeightedSummary, Vec<Check>)> {
    let n = m.n();
    let mut sampler = LatinSampler::new(m.clone())?;
    if let Some(steps) = s.max_steps {
        sampler = sampler.with_max_steps(steps);
    }
    let (cells, weights, cutoffs, counted) = s.runner.fold(
        || (vec![0u64; n * n], Moments::default(), 0u64, 0u64),
        |acc, _, mut rng| {
            let out = sampler.sample(rng.next_u64());
            acc.1.push(out.weight);
            if !out.terminated {
                acc.2 += 1;
                if s.policy == CutoffPolicy::Exclude {
                    return;
                }
                acc.3 += 1;
                acc.0.iter_mut().for_each(|c| *c += 1);
                return;
            }
            acc.3 += 1;
            for (x, &y) in out.permutation.iter().enumerate() {
                acc.0[x * n + y] += 1;
            }
        },
        |a, b| {
            a.0.iter_mut().zip(b.0).for_each(|(x, y)| *x += y);
            a.1.merge(b.1);
            a.2 += b.2;
            a.3 += b.3;
        },
    );
    let (worst, &hits) = cells
        .iter()
        .enumerate()
        .max_by_key(|&(i, c)| (*c, std::cmp::Reverse(i)))
        .expect("nonempty grid");
    let est = s.counts(hits, counted, cutoffs);
    let bound = per_cell_bound(n);
    let wb = weight_bound(m);
    let checks = vec![
        Check::probability("largest cell frequency", est.clone(), bound),
        Check::at_most("mean weight", weights.mean(), 3.0 * weights.se(), wb),
    ];
    Ok((
        WeightedSummary {
            n,
            delta: m.delta(),
            per_cell_bound: bound,
            worst_cell: (worst / n, worst % n),
            worst_cell_estimate: est,
            mean_weight: weights.mean(),
            weight_se: weights.se(),
            weight_bound: wb,
            cutoffs,
        },
        checks,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct PartialSummary {
    pub n: usize,
    pub delta: usize,
    pub beta: f64,
    pub q: f64,
    pub r: f64,
    pub gamma: f64,
    pub f: f64,
    pub slack: f64,
    pub runs: u64,
    pub mean_size: f64,
    pub size_se: f64,
    pub min_size: usize,
    pub inequality_failures: u64,
    pub cutoffs: u64,
}

/// Marked Swapping Algorithm runs: the per-color deletion inequality on
/// every run and the mean size against `(f(β, q) − slack) n`. `q` defaults
/// to the maximizer of `f`.
pub fn partial_latin_runs(
    m: &ColorMatrix,
    beta: f64,
    q: Option<f64>,
    slack: f64,
    s: &Settings,
) -> Result<(PartialSummary, Vec<Check>)> {
    let q = match q {
        Some(q) => q,
        None => g_value(beta)?.q,
    };
    let mut sampler = PartialLatinSampler::new(m.clone(), beta, q)?;
    if let Some(steps) = s.max_steps {
        sampler = sampler.with_max_steps(steps);
    }
    let f = f_value(beta, q)?;
    let (sizes, failures, cutoffs, min_size) = s.runner.fold(
        || (Moments::default(), 0u64, 0u64, usize::MAX),
        |acc, _, mut rng| {
            let r = sampler.run(rng.next_u64());
            acc.0.push(r.size as f64);
            acc.1 += u64::from(!r.inequality_holds);
            acc.2 += u64::from(!r.terminated);
            acc.3 = acc.3.min(r.size);
        },
        |a, b| {
            a.0.merge(b.0);
            a.1 += b.1;
            a.2 += b.2;
            a.3 = a.3.min(b.3);
        },
    );
    let n = m.n();
    let checks = vec![
        Check::zero_failures("per-color deletion inequality", failures),
        Check::at_least("mean size", sizes.mean(), 0.0, (f - slack) * n as f64),
    ];
    Ok((
        PartialSummary {
            n,
            delta: m.delta(),
            beta,
            q,
            r: sampler.r,
            gamma: sampler.gamma,
            f,
            slack,
            runs: sizes.n,
            mean_size: sizes.mean(),
            size_se: sizes.se(),
            min_size,
            inequality_failures: failures,
            cutoffs,
        },
        checks,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct SteinSummary {
    pub n: usize,
    pub y_size: usize,
    pub p: f64,
    pub bound: f64,
    pub estimate: Estimate,
}

/// Probability that a uniform permutation avoids a `p`-thinned cell set.
pub fn stein(n: usize, y_size: usize, p: f64, s: &Settings) -> Result<(SteinSummary, Check)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HarnessError::InvalidArgument(format!(
            "p = {p} is not a probability"
        )));
    }
    let y = random_cells(n, y_size, s.seed())?;
    let est = s.runner.estimate(s.level, s.policy, |_, mut rng| {
        Trial::done(stein_trial(n, &y, p, &mut rng))
    });
    let bound = stein_bound(n, y_size, p);
    Ok((
        SteinSummary {
            n,
            y_size,
            p,
            bound,
            estimate: est.clone(),
        },
        Check::probability(format!("avoidance |Y|={y_size} p={p}"), est, bound),
    ))
}

// ------------------------------------------------------ permutations

#[derive(Debug, Clone, Serialize)]
pub struct TreeRecord {
    pub tree: String,
    pub nodes: usize,
    pub count: u64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaSummary {
    pub p_event: f64,
    pub theta: f64,
    pub theta_prime: f64,
    pub estimate: Estimate,
    pub catalog: Vec<TreeRecord>,
}

/// `P_MT(A) ≤ θ′(A)` and, for the `catalog` most frequent witness trees,
/// appearance frequency against the tree weight.
pub fn theta_prime_check(
    n: usize,
    bad: &[AtomicPermEvent],
    a: &AtomicPermEvent,
    catalog: usize,
    s: &Settings,
) -> Result<(ThetaSummary, Vec<Check>)> {
    let pb = PermBounds::new(n, bad)?;
    let prime = pb.psi_theta_prime(a, MuSource::Exact)?;
    let plain = pb.psi_theta(a, MuSource::Exact)?;
    let inst = SwapInstance::new(n, bad.to_vec())?;
    let max_steps = s.max_steps.unwrap_or(10_000);
    let (tally, trees) = s.runner.fold(
        || {
            (
                (0u64, 0u64, 0u64),
                BTreeMap::<String, (usize, u64, f64)>::new(),
            )
        },
        |acc, _, mut rng| {
            let r = inst.run(rng.next_u64(), SelectionRule::LowestIndex, max_steps);
            let holds = a.holds(&r.final_permutation);
            s.tally(
                &mut acc.0,
                Trial {
                    event: holds,
                    terminated: r.terminated,
                },
            );
            if holds && r.terminated {
                let t = build_witness_tree(&r.log, a, bad);
                let key = t.canonical();
                let entry = acc
                    .1
                    .entry(key)
                    .or_insert_with(|| (t.len(), 0, t.weight(n, bad)));
                entry.1 += 1;
            }
        },
        |a, b| {
            add3(&mut a.0, b.0);
            for (k, v) in b.1 {
                a.1.entry(k).or_insert((v.0, 0, v.2)).1 += v.1;
            }
        },
    );
    let est = s.counts(tally.0, tally.1, tally.2);
    let mut records: Vec<TreeRecord> = trees
        .into_iter()
        .map(|(tree, (nodes, count, weight))| TreeRecord {
            tree,
            nodes,
            count,
            weight,
        })
        .collect();
    records.sort_by(|x, y| y.count.cmp(&x.count).then_with(|| x.tree.cmp(&y.tree)));
    records.truncate(catalog);
    let mut checks = vec![Check::probability(
        "P_MT(A) against theta'",
        est.clone(),
        prime.theta,
    )];
    for r in &records {
        let e = s.counts(r.count, s.runner.trials, 0);
        checks.push(Check::probability(format!("tree {}", r.tree), e, r.weight));
    }
    checks.push(Check::at_most(
        "Psi' <= Psi",
        prime.psi,
        0.0,
        plain.psi + 1e-12,
    ));
    Ok((
        ThetaSummary {
            p_event: lllforge_core::events::perm_event_probability(n, a),
            theta: plain.theta,
            theta_prime: prime.theta,
            estimate: est,
            catalog: records,
        },
        checks,
    ))
}

/// Random atomic event on `0..n` with `len` pairs.
pub fn random_atomic(n: usize, len: usize, rng: &mut RngStream) -> AtomicPermEvent {
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::with_capacity(len);
    for i in 0..len.min(n) {
        let r = i + rng.below(n - i);
        rows.swap(i, r);
        let c = i + rng.below(n - i);
        cols.swap(i, c);
        pairs.push((rows[i], cols[i]));
    }
    AtomicPermEvent::new(pairs).expect("distinct rows and columns")
}

/// `Ψ′(A) ≤ Ψ(A)` on `count` random instances with exact measures where
/// the Shearer criterion holds and uniform cluster weights otherwise.
pub fn psi_prime_sweep(count: usize, seed: u64) -> Result<Check> {
    let mut failures = 0;
    for i in 0..count {
        let mut rng = RngStream::derive(seed, "psi-sweep", i as u64);
        let n = 4 + rng.below(4);
        let m = 1 + rng.below(6);
        let bad: Vec<AtomicPermEvent> = (0..m)
            .map(|_| random_atomic(n, 1 + rng.below(2), &mut rng))
            .collect();
        let a = random_atomic(n, 1 + rng.below(3), &mut rng);
        let pb = PermBounds::new(n, &bad)?;
        let w = ClusterWeights::uniform(m, 0.05 + 0.4 * rng.unit())?;
        let mut pairs = vec![(
            pb.psi_theta_prime(&a, MuSource::Cluster(&w))?,
            pb.psi_theta(&a, MuSource::Cluster(&w))?,
        )];
        if let (Ok(p), Ok(q)) = (
            pb.psi_theta_prime(&a, MuSource::Exact),
            pb.psi_theta(&a, MuSource::Exact),
        ) {
            pairs.push((p, q));
        }
        if pairs.iter().any(|(p, q)| p.psi > q.psi + 1e-12) {
            failures += 1;
        }
    }
    Ok(Check::zero_failures(
        format!("Psi' <= Psi on {count} instances"),
        failures,
    ))
}

// ---------------------------------------------------- variable setting

/// Fixed small witness DAGs over three uniform ternary variables.
pub fn fixed_witness_dags() -> (VarSpace, Vec<WitnessDag>) {
    let space = VarSpace::uniform(&[3, 3, 3]).expect("valid space");
    let ev =
        |pairs: &[(usize, usize)]| ScopedEvent::conjunction(pairs.to_vec()).expect("valid event");
    let mut out = Vec::new();

    let mut t = WitnessDag::empty();
    t.push(ev(&[(0, 0)]), vec![]);
    out.push(t);

    let mut t = WitnessDag::empty();
    t.push(ev(&[(0, 1)]), vec![]);
    t.push(ev(&[(0, 2), (1, 0)]), vec![0]);
    out.push(t);

    let mut t = WitnessDag::empty();
    t.push(ev(&[(0, 0)]), vec![]);
    t.push(ev(&[(2, 1)]), vec![]);
    t.push(ev(&[(0, 1), (2, 2)]), vec![0, 1]);
    out.push(t);

    let mut t = WitnessDag::empty();
    t.push(ev(&[(1, 1)]), vec![]);
    t.push(ev(&[(1, 1)]), vec![0]);
    t.push(ev(&[(1, 2)]), vec![1]);
    out.push(t);

    let mut t = WitnessDag::empty();
    t.push(ev(&[(0, 0), (1, 1)]), vec![]);
    t.push(ev(&[(1, 2)]), vec![0]);
    t.push(ev(&[(1, 0), (2, 2)]), vec![1]);
    out.push(t);

    (space, out)
}

/// Compatibility frequency of a witness DAG over fresh tables, two-sided
/// within 4 standard errors of its weight.
pub fn dag_frequency(
    space: &VarSpace,
    tau: &WitnessDag,
    s: &Settings,
) -> Result<(Estimate, f64, Vec<Check>)> {
    let w = tau.weight(space)?;
    let est = s.runner.estimate(s.level, s.policy, |_, mut rng| {
        Trial::done(compatible(
            tau,
            &mut ResamplingTable::new(space, rng.next_u64()),
        ))
    });
    let se = (w * (1.0 - w) / s.runner.trials as f64).sqrt();
    let label = format!("dag of {} nodes", tau.len());
    let checks = vec![
        Check::at_most(format!("{label}: frequency <= w"), est.p_hat, 4.0 * se, w),
        Check::at_least(format!("{label}: frequency >= w"), est.p_hat, 4.0 * se, w),
    ];
    Ok((est, w, checks))
}

/// A small variable instance used by the verify suite: eight uniform bits
/// and five 3-clauses.
pub fn small_var_instance() -> MtInstance {
    let space = VarSpace::uniform_bits(8).expect("valid space");
    let clauses: [[(usize, usize); 3]; 5] = [
        [(0, 0), (1, 0), (2, 1)],
        [(2, 0), (3, 1), (4, 0)],
        [(4, 1), (5, 0), (6, 0)],
        [(6, 1), (7, 1), (0, 1)],
        [(1, 1), (3, 0), (5, 1)],
    ];
    let bad = clauses
        .iter()
        .map(|c| ScopedEvent::conjunction(c.to_vec()).expect("valid clause"))
        .collect();
    MtInstance::new(space, bad).expect("valid instance")
}

/// Singleton and disjunction bounds against MT frequencies.
pub fn variable_bounds(inst: &MtInstance, s: &Settings) -> Result<Vec<Check>> {
    let vb = VarBounds::new(inst.space(), inst.bad())?;
    let single = ScopedEvent::singleton(0, [1]);
    let sb = vb.singleton_bound(&single, MuSource::Exact)?;
    let events = vec![
        ScopedEvent::conjunction(vec![(1, 1), (2, 0)])?,
        ScopedEvent::conjunction(vec![(5, 0)])?,
    ];
    let db = vb.best_order_disjunction_bound(&events, MuSource::Exact)?;
    let max_steps = s.max_steps.unwrap_or(10_000);
    let run = |rng: &mut RngStream| {
        let mut t = ResamplingTable::new(inst.space(), rng.next_u64());
        inst.run(&mut t, SelectionRule::LowestIndex, max_steps)
    };
    let e1 = s.runner.estimate(s.level, s.policy, |_, mut rng| {
        let r = run(&mut rng);
        Trial {
            event: single.holds(&r.final_assignment),
            terminated: r.terminated,
        }
    });
    let e2 = s.runner.estimate(s.level, s.policy, |_, mut rng| {
        let r = run(&mut rng);
        Trial {
            event: events.iter().any(|e| e.holds(&r.final_assignment)),
            terminated: r.terminated,
        }
    });
    Ok(vec![
        Check::probability("singleton X0 = 1", e1, sb.ordered),
        Check::probability("disjunction of two events", e2, db.ordered),
    ])
}

/// Tiny permutation instance: `n = 5`, three bad events and a target.
pub fn tiny_perm_instance() -> (usize, Vec<AtomicPermEvent>, AtomicPermEvent) {
    let ev = |p: &[(usize, usize)]| AtomicPermEvent::new(p.to_vec()).expect("valid event");
    (
        5,
        vec![
            ev(&[(0, 0), (1, 1)]),
            ev(&[(1, 2), (2, 0)]),
            ev(&[(3, 3), (4, 1)]),
        ],
        ev(&[(0, 1), (2, 2)]),
    )
}
