//! The Moser-Tardos algorithm in the variable-assignment setting, driven by a
//! resampling table, and witness DAG diagnostics.

use crate::bounds::ClusterWeights;
use crate::error::{Error, Result};
use crate::events::{event_probability, Assignment, ScopedEvent, VarSpace};
use crate::rng::RngStream;
use crate::trueset::{SelectionRule, TrueSet};

/// Values `R(i, 1), R(i, 2), …` for every variable, materialized lazily.
///
/// Entry `(i, j)` is the `j`-th draw of the stream `(seed, "table", i)`, so it
/// depends only on the seed and its coordinates.
#[derive(Debug, Clone)]
pub struct ResamplingTable {
    space: VarSpace,
    seed: u64,
    streams: Vec<Option<RngStream>>,
    rows: Vec<Vec<usize>>,
}

impl ResamplingTable {
    pub fn new(space: &VarSpace, seed: u64) -> Self {
        ResamplingTable {
            space: space.clone(),
            seed,
            streams: vec![None; space.n()],
            rows: vec![Vec::new(); space.n()],
        }
    }

    /// A table whose first entries are given explicitly; `rows[i]` lists
    /// `R(i, 1), R(i, 2), …`. Later entries come from the seeded streams.
    pub fn from_rows(space: &VarSpace, seed: u64, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != space.n() {
            return Err(Error::InvalidSpace(format!(
                "{} table rows for {} variables",
                rows.len(),
                space.n()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if let Some(&v) = row.iter().find(|&&v| space.prob(i, v) == 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "table value {v} for variable {i} has probability zero"
                )));
            }
        }
        let mut t = Self::new(space, seed);
        t.rows = rows;
        Ok(t)
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    /// `R(i, j)` with `j ≥ 1`.
    pub fn get(&mut self, i: usize, j: usize) -> usize {
        assert!(j >= 1, "table positions start at 1");
        while self.rows[i].len() < j {
            let seed = self.seed;
            let stream =
                self.streams[i].get_or_insert_with(|| RngStream::derive(seed, "table", i as u64));
            let v = self.space.draw(i, stream);
            self.rows[i].push(v);
        }
        self.rows[i][j - 1]
    }

    /// Number of materialized entries for variable `i`.
    pub fn materialized(&self, i: usize) -> usize {
        self.rows[i].len()
    }
}

/// Outcome of one MT run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_assignment: Assignment,
    /// Indices of the resampled bad-events, in order.
    pub log: Vec<usize>,
    pub terminated: bool,
    /// Whether the stop hook ended the run.
    pub stopped: bool,
    pub steps: usize,
}

/// State passed to a run's observer after the initial sample and after every
/// resampling.
#[derive(Debug)]
pub struct MtView<'a> {
    pub step: usize,
    pub values: &'a [usize],
    pub log: &'a [usize],
}

/// `max(1, ⌈1000 Σ μ̃(B)⌉)`.
pub fn default_max_steps(weights: &ClusterWeights) -> usize {
    (1000.0 * weights.total()).ceil().max(1.0) as usize
}

/// A bad-event family over a product space.
#[derive(Debug, Clone)]
pub struct MtInstance {
    space: VarSpace,
    bad: Vec<ScopedEvent>,
    by_var: Vec<Vec<usize>>,
}

impl MtInstance {
    pub fn new(space: VarSpace, bad: Vec<ScopedEvent>) -> Result<Self> {
        let mut by_var = vec![Vec::new(); space.n()];
        for (k, b) in bad.iter().enumerate() {
            for &i in b.scope() {
                if i >= space.n() {
                    return Err(Error::InvalidEvent(format!(
                        "bad-event {k} uses variable {i} outside a space of {}",
                        space.n()
                    )));
                }
                by_var[i].push(k);
            }
        }
        Ok(MtInstance { space, bad, by_var })
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn bad(&self) -> &[ScopedEvent] {
        &self.bad
    }

    /// Bad-events involving variable `i`.
    pub fn events_of(&self, i: usize) -> &[usize] {
        &self.by_var[i]
    }

    pub fn probabilities(&self) -> Result<Vec<f64>> {
        self.bad
            .iter()
            .map(|b| event_probability(&self.space, b))
            .collect()
    }

    pub fn run(
        &self,
        table: &mut ResamplingTable,
        rule: SelectionRule,
        max_steps: usize,
    ) -> RunResult {
        self.run_until(table, rule, max_steps, |_| false)
    }

    /// Run, calling `stop` after the initial sample and after each
    /// resampling; the run ends early when it returns true.
    pub fn run_until(
        &self,
        table: &mut ResamplingTable,
        mut rule: SelectionRule,
        max_steps: usize,
        mut stop: impl FnMut(&MtView<'_>) -> bool,
    ) -> RunResult {
        let n = self.space.n();
        let mut cursor = vec![1usize; n];
        let mut values: Vec<usize> = (0..n).map(|i| table.get(i, 1)).collect();
        let mut truth = TrueSet::new(self.bad.len());
        for (k, b) in self.bad.iter().enumerate() {
            truth.set(k, b.eval_with(|i| values[i]));
        }
        let mut log = Vec::new();
        let mut stopped = stop(&MtView {
            step: 0,
            values: &values,
            log: &log,
        });
        let mut touched = Vec::new();
        while !stopped && log.len() < max_steps {
            let Some(b) = truth.select(&mut rule) else {
                break;
            };
            log.push(b);
            touched.clear();
            for &i in self.bad[b].scope() {
                cursor[i] += 1;
                values[i] = table.get(i, cursor[i]);
                touched.extend_from_slice(&self.by_var[i]);
            }
            touched.sort_unstable();
            touched.dedup();
            for &k in &touched {
                truth.set(k, self.bad[k].eval_with(|i| values[i]));
            }
            stopped = stop(&MtView {
                step: log.len(),
                values: &values,
                log: &log,
            });
        }
        let terminated = truth.is_empty();
        if terminated {
            assert!(
                self.bad.iter().all(|b| !b.eval_with(|i| values[i])),
                "terminated with a true bad-event"
            );
        } else if !stopped {
            log::debug!("MT cutoff after {} resamplings", log.len());
        }
        RunResult {
            final_assignment: Assignment { values },
            steps: log.len(),
            log,
            terminated,
            stopped,
        }
    }
}

/// A witness DAG. Nodes are stored in topological order: every edge goes
/// from a lower to a higher node index.
#[derive(Debug, Clone)]
pub struct WitnessDag {
    labels: Vec<ScopedEvent>,
    preds: Vec<Vec<usize>>,
}

impl WitnessDag {
    pub fn empty() -> Self {
        WitnessDag {
            labels: Vec::new(),
            preds: Vec::new(),
        }
    }

    /// Append a node with edges from `preds` (all existing nodes).
    pub fn push(&mut self, label: ScopedEvent, preds: Vec<usize>) -> usize {
        let v = self.labels.len();
        assert!(preds.iter().all(|&u| u < v), "edges must point forward");
        self.labels.push(label);
        self.preds.push(preds);
        v
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &ScopedEvent {
        &self.labels[v]
    }

    pub fn preds(&self, v: usize) -> &[usize] {
        &self.preds[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.preds
            .iter()
            .enumerate()
            .flat_map(|(v, ps)| ps.iter().map(move |&u| (u, v)))
            .collect()
    }

    /// Ancestor sets (each including the node itself) as bitsets.
    fn ancestors(&self) -> Vec<Vec<u64>> {
        let words = self.len().div_ceil(64).max(1);
        let mut anc: Vec<Vec<u64>> = Vec::with_capacity(self.len());
        for v in 0..self.len() {
            let mut set = vec![0u64; words];
            set[v / 64] |= 1 << (v % 64);
            for &u in &self.preds[v] {
                for (s, a) in set.iter_mut().zip(&anc[u]) {
                    *s |= a;
                }
            }
            anc.push(set);
        }
        anc
    }

    /// `w(τ)`: product of the label probabilities.
    pub fn weight(&self, space: &VarSpace) -> Result<f64> {
        self.labels
            .iter()
            .map(|l| event_probability(space, l))
            .product()
    }
}

/// The full witness DAG of a log: node `j` for `B_j`, with an edge `i → j`
/// whenever `i < j` and `B_i ∼ B_j`.
pub fn full_witness_dag(log: &[usize], bad: &[ScopedEvent]) -> WitnessDag {
    let mut g = WitnessDag::empty();
    for (j, &b) in log.iter().enumerate() {
        let preds = (0..j).filter(|&i| bad[log[i]].related(&bad[b])).collect();
        g.push(bad[b].clone(), preds);
    }
    g
}

/// `G * e`: nodes with a path to some node labelled by an event related to
/// `e`, plus a final root labelled `e` fed by those related nodes.
pub fn project_dag(g: &WitnessDag, e: &ScopedEvent) -> WitnessDag {
    let n = g.len();
    let direct: Vec<bool> = g.labels.iter().map(|l| l.related(e)).collect();
    let mut relevant = direct.clone();
    for v in (0..n).rev() {
        if relevant[v] {
            for &u in &g.preds[v] {
                relevant[u] = true;
            }
        }
    }
    let mut new_index = vec![usize::MAX; n];
    let mut out = WitnessDag::empty();
    for v in 0..n {
        if relevant[v] {
            let preds = g.preds[v].iter().map(|&u| new_index[u]).collect();
            new_index[v] = out.push(g.labels[v].clone(), preds);
        }
    }
    let root_preds = (0..n)
        .filter(|&v| direct[v])
        .map(|v| new_index[v])
        .collect();
    out.push(e.clone(), root_preds);
    out
}

/// `ρ(τ, v, i)`: nodes with a path to `v` (including `v`) that involve `i`.
pub fn rho(tau: &WitnessDag, v: usize, i: usize) -> usize {
    let anc = tau.ancestors();
    count_involving(tau, &anc[v], i)
}

fn count_involving(tau: &WitnessDag, anc: &[u64], i: usize) -> usize {
    (0..tau.len())
        .filter(|&w| anc[w / 64] >> (w % 64) & 1 == 1 && tau.labels[w].involves(i))
        .count()
}

/// Whether every label `L(v)` holds on `X_{τ,v}(i) = R(i, ρ(τ, v, i))`.
pub fn compatible(tau: &WitnessDag, table: &mut ResamplingTable) -> bool {
    let anc = tau.ancestors();
    (0..tau.len()).all(|v| {
        let label = &tau.labels[v];
        label.eval_with(|i| {
            let r = count_involving(tau, &anc[v], i);
            table.get(i, r.max(1))
        })
    })
}
