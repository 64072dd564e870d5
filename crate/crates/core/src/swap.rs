//! The Swapping Algorithm for atomic events over uniform permutations, and
//! witness trees with orderable root children.

use std::collections::VecDeque;

use crate::bounds::is_orderable;
use crate::error::{Error, Result};
use crate::events::{perm_event_probability, AtomicPermEvent, Permutation};
use crate::rng::RngStream;
use crate::trueset::{SelectionRule, TrueSet};

/// Resample the entries of `pi` used by `b`: for `i = 1..r`, draw `x′_i`
/// uniformly from `[n] ∖ {x_1, …, x_{i−1}}` and swap entries `x_i` and
/// `x′_i`. Returns the positions whose image may have changed.
pub fn resample_perm_event(
    pi: &mut Permutation,
    b: &AtomicPermEvent,
    rng: &mut RngStream,
    strict: bool,
) -> Result<Vec<usize>> {
    if strict && !b.holds(pi) {
        return Err(Error::EventNotTrue(b.pairs().to_vec()));
    }
    let n = pi.n();
    let mut excluded: Vec<usize> = Vec::with_capacity(b.len());
    let mut moved = Vec::with_capacity(2 * b.len());
    for &(x, _) in b.pairs() {
        let mut target = rng.below(n - excluded.len());
        for &e in &excluded {
            if e <= target {
                target += 1;
            }
        }
        pi.swap(x, target);
        moved.push(x);
        moved.push(target);
        let at = excluded.partition_point(|&e| e < x);
        excluded.insert(at, x);
    }
    debug_assert!(pi.is_consistent());
    moved.sort_unstable();
    moved.dedup();
    Ok(moved)
}

/// Outcome of a Swapping Algorithm run.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapRunResult {
    pub initial: Permutation,
    pub initial_marks: Option<Vec<bool>>,
    pub final_permutation: Permutation,
    pub final_marks: Option<Vec<bool>>,
    pub log: Vec<usize>,
    /// The last configurations seen, oldest first, up to the requested cap.
    pub snapshots: Vec<(Permutation, Option<Vec<bool>>)>,
    pub terminated: bool,
    pub stopped: bool,
    pub steps: usize,
}

/// State passed to a run's observer.
#[derive(Debug)]
pub struct SwapView<'a> {
    pub step: usize,
    pub pi: &'a Permutation,
    pub marks: Option<&'a [bool]>,
    pub log: &'a [usize],
}

/// Options for [`SwapInstance::run_observed`].
#[derive(Debug, Clone, Default)]
pub struct SwapOptions {
    pub rule: SelectionRule,
    pub max_steps: usize,
    /// Ring-buffer capacity for configuration snapshots.
    pub snapshots: usize,
    /// Check that each resampled event is true before swapping.
    pub strict: bool,
}

/// A family of atomic bad-events over `S_n`, optionally with a Bernoulli(r)
/// mark on every cell. With marks, a bad-event is true when its pairs hold
/// and at least one of its cells is marked.
#[derive(Debug, Clone)]
pub struct SwapInstance {
    n: usize,
    bad: Vec<AtomicPermEvent>,
    by_cell: Vec<Vec<usize>>,
    mark_rate: Option<f64>,
}

impl SwapInstance {
    pub fn new(n: usize, bad: Vec<AtomicPermEvent>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPermutation("n must be positive".into()));
        }
        let mut by_cell = vec![Vec::new(); n * n];
        for (k, b) in bad.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidEvent(format!("bad-event {k} has no pairs")));
            }
            for &(x, y) in b.pairs() {
                if x >= n || y >= n {
                    return Err(Error::InvalidEvent(format!(
                        "bad-event {k} uses cell ({x}, {y}) outside n = {n}"
                    )));
                }
                by_cell[x * n + y].push(k);
            }
        }
        Ok(SwapInstance {
            n,
            bad,
            by_cell,
            mark_rate: None,
        })
    }

    /// Attach Bernoulli(`r`) marks to every cell.
    pub fn with_marks(mut self, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidEvent(format!("mark rate {r} outside [0, 1]")));
        }
        self.mark_rate = Some(r);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bad(&self) -> &[AtomicPermEvent] {
        &self.bad
    }

    pub fn mark_rate(&self) -> Option<f64> {
        self.mark_rate
    }

    /// Bad-events containing the cell `(x, y)`.
    pub fn events_at(&self, x: usize, y: usize) -> &[usize] {
        &self.by_cell[x * self.n + y]
    }

    /// Truth of bad-event `k` on a configuration.
    pub fn holds(&self, k: usize, pi: &Permutation, marks: Option<&[bool]>) -> bool {
        let b = &self.bad[k];
        b.holds(pi) && marks.is_none_or(|m| b.pairs().iter().any(|&(x, y)| m[x * self.n + y]))
    }

    pub fn run(&self, seed: u64, rule: SelectionRule, max_steps: usize) -> SwapRunResult {
        self.run_observed(
            seed,
            SwapOptions {
                rule,
                max_steps,
                ..SwapOptions::default()
            },
            |_| false,
        )
    }

    /// Run from the seed's uniform initial configuration, calling `observer`
    /// after the initial sample and after each resampling; the run ends early
    /// when it returns true.
    pub fn run_observed(
        &self,
        seed: u64,
        mut opts: SwapOptions,
        mut observer: impl FnMut(&SwapView<'_>) -> bool,
    ) -> SwapRunResult {
        let n = self.n;
        let mut perm_rng = RngStream::derive(seed, "permutation", 0);
        let mut swap_rng = RngStream::derive(seed, "swap", 0);
        let mut mark_rng = RngStream::derive(seed, "marks", 0);
        let mut pi = Permutation::random(n, &mut perm_rng);
        let mut marks: Option<Vec<bool>> = self
            .mark_rate
            .map(|r| (0..n * n).map(|_| mark_rng.bernoulli(r)).collect());
        let initial = pi.clone();
        let initial_marks = marks.clone();

        let mut truth = TrueSet::new(self.bad.len());
        for k in 0..self.bad.len() {
            truth.set(k, self.holds(k, &pi, marks.as_deref()));
        }
        let mut snapshots = VecDeque::new();
        let mut record = |pi: &Permutation, marks: &Option<Vec<bool>>| {
            if opts.snapshots > 0 {
                if snapshots.len() == opts.snapshots {
                    snapshots.pop_front();
                }
                snapshots.push_back((pi.clone(), marks.clone()));
            }
        };
        record(&pi, &marks);

        let mut log = Vec::new();
        let mut stopped = observer(&SwapView {
            step: 0,
            pi: &pi,
            marks: marks.as_deref(),
            log: &log,
        });
        let mut cells = Vec::new();
        let mut touched = Vec::new();
        while !stopped && log.len() < opts.max_steps {
            let Some(k) = truth.select(&mut opts.rule) else {
                break;
            };
            let b = &self.bad[k];
            log.push(k);
            let before = pi.clone();
            let moved = resample_perm_event(&mut pi, b, &mut swap_rng, opts.strict)
                .expect("selected events are true");
            cells.clear();
            for &x in &moved {
                cells.push((x, before.get(x)));
                cells.push((x, pi.get(x)));
            }
            if let (Some(m), Some(r)) = (marks.as_mut(), self.mark_rate) {
                for &(x, y) in b.pairs() {
                    m[x * n + y] = mark_rng.bernoulli(r);
                    cells.push((x, y));
                }
            }
            touched.clear();
            for &(x, y) in &cells {
                touched.extend_from_slice(&self.by_cell[x * n + y]);
            }
            touched.sort_unstable();
            touched.dedup();
            for &j in &touched {
                truth.set(j, self.holds(j, &pi, marks.as_deref()));
            }
            record(&pi, &marks);
            stopped = observer(&SwapView {
                step: log.len(),
                pi: &pi,
                marks: marks.as_deref(),
                log: &log,
            });
        }
        let terminated = truth.is_empty();
        if terminated {
            assert!(
                (0..self.bad.len()).all(|k| !self.holds(k, &pi, marks.as_deref())),
                "terminated with a true bad-event"
            );
        }
        SwapRunResult {
            initial,
            initial_marks,
            final_permutation: pi,
            final_marks: marks,
            steps: log.len(),
            log,
            snapshots: snapshots.into(),
            terminated,
            stopped,
        }
    }
}

/// A node of a [`TreeStructure`]. The root has no label or parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Option<usize>,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
}

/// A rooted tree: root labelled by an atomic event `A`, other nodes by
/// bad-event indices. Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStructure {
    pub root: AtomicPermEvent,
    pub nodes: Vec<TreeNode>,
}

impl TreeStructure {
    pub fn singleton(root: AtomicPermEvent) -> Self {
        TreeStructure {
            root,
            nodes: vec![TreeNode {
                label: None,
                parent: None,
                depth: 0,
                children: Vec::new(),
            }],
        }
    }

    /// Add a child labelled `label` under `parent`; returns its id.
    pub fn attach(&mut self, parent: usize, label: usize) -> usize {
        let id = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        self.nodes.push(TreeNode {
            label: Some(label),
            parent: Some(parent),
            depth,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root_children(&self) -> Vec<usize> {
        self.nodes[0]
            .children
            .iter()
            .map(|&c| self.nodes[c].label.expect("non-root"))
            .collect()
    }

    /// Order-independent text form; equal strings mean equal
    /// tree-structures.
    pub fn canonical(&self) -> String {
        fn walk(t: &TreeStructure, v: usize) -> String {
            let mut kids: Vec<String> = t.nodes[v].children.iter().map(|&c| walk(t, c)).collect();
            kids.sort();
            let head = match t.nodes[v].label {
                Some(l) => l.to_string(),
                None => format!("{:?}", t.root.pairs()),
            };
            if kids.is_empty() {
                head
            } else {
                format!("{head}({})", kids.join(","))
            }
        }
        walk(self, 0)
    }

    /// `w(τ)`: product of `P_Ω` over every node label, root included.
    pub fn weight(&self, n: usize, bad: &[AtomicPermEvent]) -> f64 {
        let labels: f64 = self
            .nodes
            .iter()
            .filter_map(|v| v.label)
            .map(|l| perm_event_probability(n, &bad[l]))
            .product();
        perm_event_probability(n, &self.root) * labels
    }
}

/// Witness tree for `a` from a resampling log, scanning backwards.
///
/// `B_t` goes under the deepest non-root node whose label is related to it
/// (ties broken by lowest label, then earliest node). Failing that, it
/// becomes a root child when the root's child labels plus `B_t` form an
/// independent set orderable to `a`. Otherwise it is skipped.
pub fn build_witness_tree(
    log: &[usize],
    a: &AtomicPermEvent,
    bad: &[AtomicPermEvent],
) -> TreeStructure {
    let mut tree = TreeStructure::singleton(a.clone());
    for &b in log.iter().rev() {
        let event = &bad[b];
        let mut best: Option<usize> = None;
        for v in 1..tree.nodes.len() {
            let label = tree.nodes[v].label.expect("non-root");
            if !bad[label].related(event) {
                continue;
            }
            let better = match best {
                None => true,
                Some(u) => {
                    let (du, lu) = (tree.nodes[u].depth, tree.nodes[u].label);
                    let (dv, lv) = (tree.nodes[v].depth, tree.nodes[v].label);
                    dv > du || (dv == du && lv < lu)
                }
            };
            if better {
                best = Some(v);
            }
        }
        if let Some(v) = best {
            tree.attach(v, b);
            continue;
        }
        let kids = tree.root_children();
        let independent = kids.iter().all(|&k| k != b && !bad[k].related(event));
        if independent {
            let mut refs: Vec<&AtomicPermEvent> = kids.iter().map(|&k| &bad[k]).collect();
            refs.push(event);
            if is_orderable(&refs, a).unwrap_or(false) {
                tree.attach(0, b);
            }
        }
    }
    tree
}
