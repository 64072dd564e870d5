//! Probability spaces, events and the `~` relation.
//!
//! Two settings are supported:
//!
//! * the variable-assignment setting: a product space of finite-domain
//!   variables ([`VarSpace`]) with events that are boolean functions of a
//!   declared scope of variables ([`ScopedEvent`]);
//! * the permutation setting: a uniformly random permutation of `[n]` with
//!   atomic events given by sets of `(x, y)` pairs ([`AtomicPermEvent`]).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Maximum scope size accepted by exact enumeration.
pub const SCOPE_BUDGET: usize = 24;
/// Maximum number of positive-probability assignments enumerated for one query.
pub const ASSIGNMENT_BUDGET: u128 = 1 << 26;

const PROB_TOL: f64 = 1e-12;

/// A finite product probability space.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSpace {
    probs: Vec<Vec<f64>>,
    cdf: Vec<Vec<f64>>,
}

impl VarSpace {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidSpace(
                "space needs at least one variable".into(),
            ));
        }
        for (i, p) in probs.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidSpace(format!(
                    "variable {i} has an empty domain"
                )));
            }
            if p.iter().any(|&v| !(0.0..=1.0).contains(&v) || v.is_nan()) {
                return Err(Error::InvalidSpace(format!(
                    "variable {i} has a probability outside [0, 1]"
                )));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidSpace(format!(
                    "variable {i} probabilities sum to {total}"
                )));
            }
        }
        let cdf = probs
            .iter()
            .map(|p| {
                let mut acc = 0.0;
                p.iter()
                    .map(|v| {
                        acc += v;
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(VarSpace { probs, cdf })
    }

    /// Independent uniform variables with the given domain sizes.
    pub fn uniform(domains: &[usize]) -> Result<Self> {
        Self::new(domains.iter().map(|&d| vec![1.0 / d as f64; d]).collect())
    }

    /// `n` fair coins.
    pub fn uniform_bits(n: usize) -> Result<Self> {
        Self::uniform(&vec![2; n])
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn domain(&self, i: usize) -> usize {
        self.probs[i].len()
    }

    pub fn prob(&self, i: usize, value: usize) -> f64 {
        self.probs[i].get(value).copied().unwrap_or(0.0)
    }

    pub fn probs(&self, i: usize) -> &[f64] {
        &self.probs[i]
    }

    /// Values of variable `i` with positive probability.
    pub fn support(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.probs[i]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(j, _)| j)
    }

    /// Draw a value for variable `i` by inverse CDF.
    pub fn draw(&self, i: usize, rng: &mut RngStream) -> usize {
        let u = rng.unit();
        let cdf = &self.cdf[i];
        let j = cdf.partition_point(|&c| c <= u);
        // Guard against a final cumulative value of 1 - ulp.
        let mut j = j.min(cdf.len() - 1);
        while self.probs[i][j] == 0.0 && j > 0 {
            j -= 1;
        }
        j
    }

    pub fn sample(&self, rng: &mut RngStream) -> Assignment {
        Assignment {
            values: (0..self.n()).map(|i| self.draw(i, rng)).collect(),
        }
    }

    /// Enumerate every positive-probability assignment of `scope`, calling
    /// `visit(values, weight)` with values aligned to `scope`.
    pub fn enumerate_scope(
        &self,
        scope: &[usize],
        mut visit: impl FnMut(&[usize], f64),
    ) -> Result<()> {
        let supports: Vec<Vec<usize>> = scope.iter().map(|&i| self.support(i).collect()).collect();
        let count: u128 = supports.iter().map(|s| s.len() as u128).product();
        if scope.len() > SCOPE_BUDGET || count > ASSIGNMENT_BUDGET {
            return Err(Error::ScopeTooLarge {
                size: scope.len(),
                assignments: count,
            });
        }
        if count == 0 {
            return Ok(());
        }
        let mut digits = vec![0usize; scope.len()];
        let mut values: Vec<usize> = supports.iter().map(|s| s[0]).collect();
        loop {
            let weight: f64 = scope
                .iter()
                .zip(&values)
                .map(|(&i, &v)| self.probs[i][v])
                .product();
            visit(&values, weight);
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return Ok(());
                }
                digits[pos] += 1;
                if digits[pos] < supports[pos].len() {
                    values[pos] = supports[pos][digits[pos]];
                    break;
                }
                digits[pos] = 0;
                values[pos] = supports[pos][0];
                pos += 1;
            }
        }
    }
}

/// A point of a [`VarSpace`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub values: Vec<usize>,
}

impl Assignment {
    pub fn new(space: &VarSpace, values: Vec<usize>) -> Result<Self> {
        if values.len() != space.n() {
            return Err(Error::InvalidSpace(format!(
                "assignment has {} values for {} variables",
                values.len(),
                space.n()
            )));
        }
        if let Some(i) = (0..values.len()).find(|&i| values[i] >= space.domain(i)) {
            return Err(Error::InvalidSpace(format!(
                "value {} of variable {i} is outside its domain",
                values[i]
            )));
        }
        Ok(Assignment { values })
    }

    pub fn get(&self, i: usize) -> usize {
        self.values[i]
    }
}

pub type Predicate = dyn Fn(&[usize]) -> bool + Send + Sync;

#[derive(Clone)]
pub enum EventKind {
    /// `X(i) = j` for every listed pair; pairs sorted by variable.
    Conjunction(Vec<(usize, usize)>),
    /// Boolean function of the scoped values, passed in scope order.
    Predicate(Arc<Predicate>),
}

/// An event of the variable-assignment setting.
#[derive(Clone)]
pub struct ScopedEvent {
    scope: Vec<usize>,
    kind: EventKind,
}

impl fmt::Debug for ScopedEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            EventKind::Conjunction(pairs) => write!(f, "Conj{pairs:?}"),
            EventKind::Predicate(_) => write!(f, "Pred{:?}", self.scope),
        }
    }
}

impl ScopedEvent {
    /// Atomic conjunction `X(i_1) = j_1 ∧ …`.
    pub fn conjunction(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidEvent(
                "conjunction assigns a variable twice".into(),
            ));
        }
        Ok(ScopedEvent {
            scope: pairs.iter().map(|p| p.0).collect(),
            kind: EventKind::Conjunction(pairs),
        })
    }

    /// Arbitrary predicate of the variables in `scope`. The predicate sees
    /// values in ascending variable order.
    pub fn predicate(
        scope: impl IntoIterator<Item = usize>,
        f: impl Fn(&[usize]) -> bool + Send + Sync + 'static,
    ) -> Self {
        let mut scope: Vec<usize> = scope.into_iter().collect();
        scope.sort_unstable();
        scope.dedup();
        ScopedEvent {
            scope,
            kind: EventKind::Predicate(Arc::new(f)),
        }
    }

    /// Singleton event `X(i) ∈ values`.
    pub fn singleton(var: usize, values: impl IntoIterator<Item = usize>) -> Self {
        let mut set: Vec<usize> = values.into_iter().collect();
        set.sort_unstable();
        set.dedup();
        Self::predicate([var], move |v| set.binary_search(&v[0]).is_ok())
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn kind(&self) -> &EventKind {
        &self.kind
    }

    pub fn is_singleton(&self) -> bool {
        self.scope.len() == 1
    }

    pub fn involves(&self, var: usize) -> bool {
        self.scope.binary_search(&var).is_ok()
    }

    /// Evaluate with values supplied per variable.
    pub fn eval_with(&self, mut value_of: impl FnMut(usize) -> usize) -> bool {
        match &self.kind {
            EventKind::Conjunction(pairs) => pairs.iter().all(|&(i, j)| value_of(i) == j),
            EventKind::Predicate(f) => {
                let vals: Vec<usize> = self.scope.iter().map(|&i| value_of(i)).collect();
                f(&vals)
            }
        }
    }

    /// Evaluate on values aligned with `self.scope()`.
    pub fn eval_scoped(&self, values: &[usize]) -> bool {
        match &self.kind {
            EventKind::Conjunction(pairs) => pairs.iter().zip(values).all(|(p, &v)| p.1 == v),
            EventKind::Predicate(f) => f(values),
        }
    }

    pub fn holds(&self, x: &Assignment) -> bool {
        self.eval_with(|i| x.values[i])
    }

    /// `var(E) ∩ var(E') ≠ ∅`.
    pub fn related(&self, other: &ScopedEvent) -> bool {
        let (mut a, mut b) = (self.scope.iter().peekable(), other.scope.iter().peekable());
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Equal => return true,
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
            }
        }
        false
    }
}

/// Sorted union of the scopes of `events`.
pub fn union_scope<'a>(events: impl IntoIterator<Item = &'a ScopedEvent>) -> Vec<usize> {
    let mut scope: Vec<usize> = events
        .into_iter()
        .flat_map(|e| e.scope.iter().copied())
        .collect();
    scope.sort_unstable();
    scope.dedup();
    scope
}

/// Probability of `Σ weight` over the joint scope of `events` restricted to
/// assignments where `accept(truth of each event)` holds.
pub fn joint_probability(
    space: &VarSpace,
    events: &[&ScopedEvent],
    mut accept: impl FnMut(&[bool]) -> bool,
) -> Result<f64> {
    let scope = union_scope(events.iter().copied());
    let positions: Vec<Vec<usize>> = events
        .iter()
        .map(|e| {
            e.scope
                .iter()
                .map(|v| scope.binary_search(v).expect("scope is a union"))
                .collect()
        })
        .collect();
    let mut total = 0.0;
    let mut truth = vec![false; events.len()];
    let mut buf = Vec::new();
    space.enumerate_scope(&scope, |values, w| {
        for (k, e) in events.iter().enumerate() {
            buf.clear();
            buf.extend(positions[k].iter().map(|&p| values[p]));
            truth[k] = e.eval_scoped(&buf);
        }
        if accept(&truth) {
            total += w;
        }
    })?;
    Ok(total)
}

/// Whether some positive-probability assignment of the joint scope satisfies
/// `accept`.
pub fn joint_possible(
    space: &VarSpace,
    events: &[&ScopedEvent],
    mut accept: impl FnMut(&[bool]) -> bool,
) -> Result<bool> {
    let mut found = false;
    joint_probability(space, events, |t| {
        if !found && accept(t) {
            found = true;
        }
        false
    })?;
    Ok(found)
}

/// `P_Ω(e)`.
pub fn event_probability(space: &VarSpace, e: &ScopedEvent) -> Result<f64> {
    match &e.kind {
        EventKind::Conjunction(pairs) => Ok(pairs.iter().map(|&(i, j)| space.prob(i, j)).product()),
        EventKind::Predicate(_) => joint_probability(space, &[e], |t| t[0]),
    }
}

/// A bijection `[n] → [n]` with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            forward: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (x, &y) in forward.iter().enumerate() {
            if y >= n || inverse[y] != usize::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "{forward:?} is not a bijection"
                )));
            }
            inverse[y] = x;
        }
        Ok(Permutation { forward, inverse })
    }

    /// Uniform permutation by Fisher-Yates.
    pub fn random(n: usize, rng: &mut RngStream) -> Self {
        let mut forward: Vec<usize> = (0..n).collect();
        forward.shuffle(rng);
        let mut inverse = vec![0; n];
        for (x, &y) in forward.iter().enumerate() {
            inverse[y] = x;
        }
        Permutation { forward, inverse }
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    pub fn get(&self, x: usize) -> usize {
        self.forward[x]
    }

    pub fn preimage(&self, y: usize) -> usize {
        self.inverse[y]
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// Swap the images of positions `a` and `b`.
    pub fn swap(&mut self, a: usize, b: usize) {
        self.forward.swap(a, b);
        self.inverse[self.forward[a]] = a;
        self.inverse[self.forward[b]] = b;
    }

    pub fn is_consistent(&self) -> bool {
        self.forward.len() == self.inverse.len()
            && self
                .forward
                .iter()
                .enumerate()
                .all(|(x, &y)| y < self.inverse.len() && self.inverse[y] == x)
    }
}

/// Atomic event `π(x_1) = y_1 ∧ … ∧ π(x_r) = y_r` stored as sorted pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicPermEvent {
    pairs: Vec<(usize, usize)>,
}

impl AtomicPermEvent {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        let mut ys: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        ys.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) || ys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidEvent(format!(
                "pairs {pairs:?} repeat a coordinate (probability zero)"
            )));
        }
        Ok(AtomicPermEvent { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn holds(&self, pi: &Permutation) -> bool {
        self.pairs.iter().all(|&(x, y)| pi.get(x) == y)
    }

    pub fn touches(&self, z: (usize, usize)) -> bool {
        self.pairs.iter().any(|&p| pairs_related(p, z))
    }

    pub fn related(&self, other: &AtomicPermEvent) -> bool {
        self.pairs.iter().any(|&p| other.touches(p))
    }

    pub fn max_coordinate(&self) -> Option<usize> {
        self.pairs.iter().map(|&(x, y)| x.max(y)).max()
    }

    /// Whether `self ∪ other` is again a valid atomic event.
    pub fn consistent_with(&self, other: &AtomicPermEvent) -> bool {
        self.pairs
            .iter()
            .all(|&(x, y)| other.pairs.iter().all(|&(x2, y2)| (x == x2) == (y == y2)))
    }

    pub fn union(&self, other: &AtomicPermEvent) -> Option<AtomicPermEvent> {
        if !self.consistent_with(other) {
            return None;
        }
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        AtomicPermEvent::new(pairs).ok()
    }

    /// Whether every permutation satisfying `self` also satisfies `other`,
    /// i.e. `P(other | self) = 1` over `S_n`.
    pub fn implies(&self, other: &AtomicPermEvent, n: usize) -> bool {
        if !self.consistent_with(other) {
            return false;
        }
        let mut forced = self.pairs.clone();
        if forced.len() + 1 == n {
            // The last row is forced onto the last column.
            let x = (0..n).find(|x| !forced.iter().any(|p| p.0 == *x));
            let y = (0..n).find(|y| !forced.iter().any(|p| p.1 == *y));
            if let (Some(x), Some(y)) = (x, y) {
                forced.push((x, y));
            }
        }
        other.pairs.iter().all(|p| forced.contains(p))
    }
}

/// `(x, y) ~ (x', y')` iff `x = x'` or `y = y'`.
pub fn pairs_related(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 == b.0 || a.1 == b.1
}

/// `(n - r)! / n!` for an atomic event with `r` pairs.
pub fn perm_event_probability(n: usize, a: &AtomicPermEvent) -> f64 {
    let r = a.len();
    if r > n {
        return 0.0;
    }
    (0..r).map(|i| 1.0 / (n - i) as f64).product()
}

/// Exact `(n - r)! / n!`.
pub fn perm_event_probability_exact(n: usize, a: &AtomicPermEvent) -> BigRational {
    let r = a.len();
    if r > n {
        return BigRational::from_integer(BigInt::from(0));
    }
    let falling: BigInt = (0..r).map(|i| BigInt::from(n - i)).product();
    BigRational::new(BigInt::one(), falling)
}

/// Which setting a family of events lives in.
#[derive(Debug, Clone, Copy)]
pub enum Setting<'a> {
    Variables(&'a VarSpace),
    Permutation { n: usize },
}

/// An event from either setting.
#[derive(Debug, Clone)]
pub enum Event {
    Var(ScopedEvent),
    Perm(AtomicPermEvent),
}

/// The `~` relation. Errors when the two events come from different settings.
pub fn related(a: &Event, b: &Event) -> Result<bool> {
    match (a, b) {
        (Event::Var(x), Event::Var(y)) => Ok(x.related(y)),
        (Event::Perm(x), Event::Perm(y)) => Ok(x.related(y)),
        _ => Err(Error::SettingMismatch),
    }
}

/// `P_Ω(e | b) < 1` in the variable setting: some positive-probability
/// assignment makes `b` true and `e` false.
pub fn var_conditional_below_one(
    space: &VarSpace,
    e: &ScopedEvent,
    b: &ScopedEvent,
) -> Result<bool> {
    joint_possible(space, &[e, b], |t| !t[0] && t[1])
}

/// `𝓑[e]`: indices of the bad-events `B` with `P_Ω(e | B) < 1`, in input order.
pub fn restrict_bad_events(
    setting: Setting<'_>,
    events: &[Event],
    e: &Event,
) -> Result<Vec<usize>> {
    let mut keep = Vec::new();
    for (idx, b) in events.iter().enumerate() {
        let include = match (setting, b, e) {
            (Setting::Variables(space), Event::Var(b), Event::Var(e)) => {
                var_conditional_below_one(space, e, b)?
            }
            (Setting::Permutation { n }, Event::Perm(b), Event::Perm(e)) => !b.implies(e, n),
            _ => return Err(Error::SettingMismatch),
        };
        if include {
            keep.push(idx);
        }
    }
    Ok(keep)
}

/// Variable-setting `𝓑[∨ conds]`: keeps `B` when some positive-probability
/// assignment makes `B` true and every member of `conds` false.
pub fn restrict_var_disjunction(
    space: &VarSpace,
    events: &[ScopedEvent],
    conds: &[ScopedEvent],
) -> Result<Vec<usize>> {
    let mut keep = Vec::new();
    for (idx, b) in events.iter().enumerate() {
        let mut refs: Vec<&ScopedEvent> = conds.iter().collect();
        refs.push(b);
        let m = conds.len();
        if joint_possible(space, &refs, |t| t[m] && t[..m].iter().all(|v| !v))? {
            keep.push(idx);
        }
    }
    Ok(keep)
}

/// Permutation-setting `𝓑[∨ conds]`. A bad-event is dropped when it forces
/// some member of `conds`; this never drops an event that belongs to the
/// exact family.
pub fn restrict_perm_disjunction(
    n: usize,
    events: &[AtomicPermEvent],
    conds: &[AtomicPermEvent],
) -> Vec<usize> {
    events
        .iter()
        .enumerate()
        .filter(|(_, b)| !conds.iter().any(|a| b.implies(a, n)))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize) -> VarSpace {
        VarSpace::uniform_bits(n).unwrap()
    }

    #[test]
    fn space_rejects_bad_probabilities() {
        assert!(VarSpace::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(VarSpace::new(vec![vec![]]).is_err());
        assert!(VarSpace::new(vec![]).is_err());
        assert!(VarSpace::new(vec![vec![-0.1, 1.1]]).is_err());
    }

    #[test]
    fn conjunction_probability() {
        let e = ScopedEvent::conjunction(vec![(0, 1), (1, 1)]).unwrap();
        assert_eq!(event_probability(&bits(2), &e).unwrap(), 0.25);
        let empty = ScopedEvent::conjunction(vec![]).unwrap();
        assert_eq!(event_probability(&bits(2), &empty).unwrap(), 1.0);
    }

    #[test]
    fn odd_parity_is_half() {
        let e = ScopedEvent::predicate([0, 1, 2], |v| v.iter().sum::<usize>() % 2 == 1);
        assert!((event_probability(&bits(3), &e).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conjunction_rejects_repeated_variable() {
        assert!(ScopedEvent::conjunction(vec![(0, 1), (0, 0)]).is_err());
    }

    #[test]
    fn scope_budget_enforced() {
        let space = bits(30);
        let e = ScopedEvent::predicate(0..25, |_| true);
        assert!(matches!(
            event_probability(&space, &e),
            Err(Error::ScopeTooLarge { .. })
        ));
    }

    #[test]
    fn perm_probabilities() {
        let a = AtomicPermEvent::new(vec![(0, 0)]).unwrap();
        assert!((perm_event_probability(5, &a) - 0.2).abs() < 1e-15);
        let b = AtomicPermEvent::new(vec![(0, 1), (1, 0)]).unwrap();
        assert!((perm_event_probability(4, &b) - 1.0 / 12.0).abs() < 1e-15);
        let e = AtomicPermEvent::new(vec![]).unwrap();
        assert_eq!(perm_event_probability(3, &e), 1.0);
    }

    #[test]
    fn perm_event_rejects_collisions() {
        assert!(AtomicPermEvent::new(vec![(0, 1), (0, 2)]).is_err());
        assert!(AtomicPermEvent::new(vec![(0, 1), (2, 1)]).is_err());
    }

    #[test]
    fn relation_examples() {
        let a = ScopedEvent::predicate([1, 2], |_| true);
        let b = ScopedEvent::predicate([2, 3], |_| true);
        assert!(a.related(&b));
        let p = |v: Vec<(usize, usize)>| AtomicPermEvent::new(v).unwrap();
        assert!(p(vec![(1, 2)]).related(&p(vec![(3, 2)])));
        assert!(!p(vec![(1, 2)]).related(&p(vec![(3, 4)])));
        assert_eq!(
            related(&Event::Var(a), &Event::Perm(p(vec![(0, 0)]))),
            Err(Error::SettingMismatch)
        );
    }

    #[test]
    fn restriction_examples() {
        let space = bits(2);
        let b = ScopedEvent::conjunction(vec![(0, 1)]).unwrap();
        let e = ScopedEvent::conjunction(vec![(0, 1)]).unwrap();
        let kept =
            restrict_bad_events(Setting::Variables(&space), &[Event::Var(b)], &Event::Var(e))
                .unwrap();
        assert!(kept.is_empty());

        let p = |v: Vec<(usize, usize)>| Event::Perm(AtomicPermEvent::new(v).unwrap());
        let setting = Setting::Permutation { n: 6 };
        let kept =
            restrict_bad_events(setting, &[p(vec![(1, 2), (3, 4)])], &p(vec![(1, 2)])).unwrap();
        assert!(kept.is_empty());
        let kept = restrict_bad_events(setting, &[p(vec![(1, 3)])], &p(vec![(1, 2)])).unwrap();
        assert_eq!(kept, vec![0]);
    }

    #[test]
    fn last_pair_is_forced() {
        let b = AtomicPermEvent::new(vec![(0, 0)]).unwrap();
        let a = AtomicPermEvent::new(vec![(1, 1)]).unwrap();
        assert!(b.implies(&a, 2));
        assert!(!b.implies(&a, 3));
    }

    #[test]
    fn degenerate_samples() {
        let mut rng = RngStream::derive(1, "t", 0);
        let space = VarSpace::new(vec![vec![0.0, 1.0]]).unwrap();
        for _ in 0..100 {
            assert_eq!(space.sample(&mut rng).values, vec![1]);
            assert_eq!(Permutation::random(1, &mut rng).forward(), &[0]);
        }
    }

    #[test]
    fn permutation_swap_keeps_inverse() {
        let mut rng = RngStream::derive(3, "t", 0);
        let mut pi = Permutation::random(9, &mut rng);
        for _ in 0..50 {
            let (a, b) = (rng.below(9), rng.below(9));
            pi.swap(a, b);
            assert!(pi.is_consistent());
        }
    }
}
