use std::collections::{BTreeSet, VecDeque};

use crate::rng::RngStream;

/// How the next true bad-event is chosen for resampling.
#[derive(Debug, Clone, Default)]
pub enum SelectionRule {
    /// Lowest event index.
    #[default]
    LowestIndex,
    /// The event that has been continuously true for the longest time.
    Fifo,
    /// Uniform over the currently true events, using its own stream.
    Random(RngStream),
}

/// The set of currently true bad-events.
#[derive(Debug, Clone)]
pub(crate) struct TrueSet {
    ordered: BTreeSet<usize>,
    members: Vec<usize>,
    pos: Vec<usize>,
    generation: Vec<u32>,
    queue: VecDeque<(usize, u32)>,
}

const ABSENT: usize = usize::MAX;

impl TrueSet {
    pub(crate) fn new(m: usize) -> Self {
        TrueSet {
            ordered: BTreeSet::new(),
            members: Vec::new(),
            pos: vec![ABSENT; m],
            generation: vec![0; m],
            queue: VecDeque::new(),
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub(crate) fn contains(&self, e: usize) -> bool {
        self.pos[e] != ABSENT
    }

    pub(crate) fn set(&mut self, e: usize, truth: bool) {
        if truth {
            self.insert(e)
        } else {
            self.remove(e)
        }
    }

    fn insert(&mut self, e: usize) {
        if self.contains(e) {
            return;
        }
        self.pos[e] = self.members.len();
        self.members.push(e);
        self.ordered.insert(e);
        self.generation[e] = self.generation[e].wrapping_add(1);
        self.queue.push_back((e, self.generation[e]));
    }

    fn remove(&mut self, e: usize) {
        let p = self.pos[e];
        if p == ABSENT {
            return;
        }
        let last = self.members.pop().expect("nonempty");
        if last != e {
            self.members[p] = last;
            self.pos[last] = p;
        }
        self.pos[e] = ABSENT;
        self.ordered.remove(&e);
    }

    pub(crate) fn select(&mut self, rule: &mut SelectionRule) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        match rule {
            SelectionRule::LowestIndex => self.ordered.first().copied(),
            SelectionRule::Random(rng) => Some(self.members[rng.below(self.members.len())]),
            SelectionRule::Fifo => {
                while let Some(&(e, g)) = self.queue.front() {
                    if self.contains(e) && self.generation[e] == g {
                        return Some(e);
                    }
                    self.queue.pop_front();
                }
                unreachable!("a true event always has a live queue entry")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_pick_members() {
        let mut s = TrueSet::new(10);
        s.set(7, true);
        s.set(3, true);
        s.set(5, true);
        assert_eq!(s.select(&mut SelectionRule::LowestIndex), Some(3));
        assert_eq!(s.select(&mut SelectionRule::Fifo), Some(7));
        s.set(7, false);
        s.set(7, true);
        assert_eq!(s.select(&mut SelectionRule::Fifo), Some(3));
        let mut r = SelectionRule::Random(RngStream::derive(0, "rule", 0));
        for _ in 0..20 {
            let e = s.select(&mut r).unwrap();
            assert!([3, 5, 7].contains(&e));
        }
        for e in [3, 5, 7] {
            s.set(e, false);
        }
        assert!(s.is_empty());
        assert_eq!(s.select(&mut SelectionRule::Fifo), None);
    }
}
