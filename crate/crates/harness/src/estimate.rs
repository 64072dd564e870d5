//! Seeded Monte Carlo estimation with Wilson score intervals.

use std::fmt;
use std::str::FromStr;

use lllforge_core::RngStream;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::HarnessError;

pub const Z95: f64 = 1.959963984540054;
pub const Z99: f64 = 2.5758293035489004;

/// Trials per work unit. Work units are merged in index order, so results
/// do not depend on the number of threads.
const CHUNK: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Level {
    P95,
    #[default]
    P99,
}

impl Level {
    pub fn z(self) -> f64 {
        match self {
            Level::P95 => Z95,
            Level::P99 => Z99,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Level::P95 => 0.95,
            Level::P99 => 0.99,
        }
    }
}

impl FromStr for Level {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0.95" | "95" => Ok(Level::P95),
            "0.99" | "99" => Ok(Level::P99),
            other => Err(HarnessError::InvalidArgument(format!(
                "confidence level must be 0.95 or 0.99, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

/// Wilson score interval for `successes / trials`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    (lo, hi)
}

/// What a non-terminated run counts as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffPolicy {
    /// Conservative for upper-bound checks.
    #[default]
    CountAsEvent,
    Exclude,
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trial {
    pub event: bool,
    pub terminated: bool,
}

impl Trial {
    pub fn done(event: bool) -> Self {
        Trial {
            event,
            terminated: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    /// Non-terminated runs, reported whatever the policy.
    pub cutoffs: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: Level,
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64, cutoffs: u64, level: Level, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson(successes, trials, level.z());
        Estimate {
            successes,
            trials,
            cutoffs,
            p_hat: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            ci_low,
            ci_high,
            level,
            seed,
        }
    }
}

/// Running sum and sum of squares.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, o: Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Trial scheduler: trial `i` gets the stream `(seed, "trial", i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Runner {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

impl Runner {
    pub fn new(trials: u64, seed: u64, jobs: usize) -> Self {
        Runner { trials, seed, jobs }
    }

    pub fn stream(&self, i: u64) -> RngStream {
        RngStream::derive(self.seed, "trial", i)
    }

    /// Fold every trial into per-chunk accumulators in parallel, then merge
    /// them in chunk order.
    pub fn fold<A, I, F, M>(&self, init: I, step: F, mut merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, u64, RngStream) + Sync,
        M: FnMut(&mut A, A),
    {
        let chunks = self.trials.div_ceil(CHUNK);
        let work = || -> Vec<A> {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = init();
                    for i in c * CHUNK..((c + 1) * CHUNK).min(self.trials) {
                        step(&mut acc, i, self.stream(i));
                    }
                    acc
                })
                .collect()
        };
        let parts = if self.jobs == 0 {
            work()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.jobs)
                .build()
                .expect("thread pool")
                .install(work)
        };
        let mut out = init();
        for p in parts {
            merge(&mut out, p);
        }
        out
    }

    /// Estimate `P(event)`.
    pub fn estimate<F>(&self, level: Level, policy: CutoffPolicy, trial: F) -> Estimate
    where
        F: Fn(u64, RngStream) -> Trial + Sync,
    {
        let (hits, cutoffs, counted) = self.fold(
            || (0u64, 0u64, 0u64),
            |acc, i, rng| {
                let t = trial(i, rng);
                if !t.terminated {
                    acc.1 += 1;
                    if policy == CutoffPolicy::Exclude {
                        return;
                    }
                }
                acc.2 += 1;
                if t.event || !t.terminated {
                    acc.0 += 1;
                }
            },
            |a, b| {
                a.0 += b.0;
                a.1 += b.1;
                a.2 += b.2;
            },
        );
        Estimate::from_counts(hits, counted, cutoffs, level, self.seed)
    }

    /// Mean and standard error of a per-trial statistic.
    pub fn moments<F>(&self, stat: F) -> Moments
    where
        F: Fn(u64, RngStream) -> f64 + Sync,
    {
        self.fold(
            Moments::default,
            |m, i, rng| m.push(stat(i, rng)),
            |a, b| a.merge(b),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_zero_successes() {
        let (lo, hi) = wilson(0, 1000, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.00383).abs() < 5e-6, "{hi}");
    }

    #[test]
    fn always_true_event() {
        let r = Runner::new(500, 1, 2);
        let e = r.estimate(Level::P95, CutoffPolicy::CountAsEvent, |_, _| {
            Trial::done(true)
        });
        assert_eq!(e.p_hat, 1.0);
        assert!(e.ci_low < 1.0);
        assert_eq!(e.ci_high, 1.0);
    }

    #[test]
    fn jobs_do_not_change_results() {
        let f = |_, mut rng: RngStream| Trial::done(rng.bernoulli(0.3));
        let a = Runner::new(5000, 9, 1).estimate(Level::P99, CutoffPolicy::CountAsEvent, f);
        let b = Runner::new(5000, 9, 8).estimate(Level::P99, CutoffPolicy::CountAsEvent, f);
        assert_eq!(a, b);
        let g = |_, mut rng: RngStream| rng.unit();
        assert_eq!(
            Runner::new(3000, 2, 1).moments(g),
            Runner::new(3000, 2, 5).moments(g)
        );
    }

    #[test]
    fn cutoff_policies() {
        let f = |i: u64, _| Trial {
            event: false,
            terminated: i.is_multiple_of(2),
        };
        let r = Runner::new(100, 0, 1);
        let a = r.estimate(Level::P95, CutoffPolicy::CountAsEvent, f);
        assert_eq!((a.successes, a.trials, a.cutoffs), (50, 100, 50));
        let b = r.estimate(Level::P95, CutoffPolicy::Exclude, f);
        assert_eq!((b.successes, b.trials, b.cutoffs), (0, 50, 50));
    }

    #[test]
    fn level_parsing() {
        assert_eq!("0.95".parse::<Level>().unwrap(), Level::P95);
        assert_eq!("99".parse::<Level>().unwrap(), Level::P99);
        assert!("0.9".parse::<Level>().is_err());
    }
}
