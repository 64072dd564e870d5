//! Bound-consistency verdicts.

use serde::Serialize;

use crate::estimate::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violation,
}

/// A probability claim `P ≤ bound` is violated iff the lower confidence
/// limit exceeds the bound.
pub fn verdict(est: &Estimate, bound: f64) -> Verdict {
    if est.ci_low > bound {
        Verdict::Violation
    } else {
        Verdict::Consistent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `statistic ≤ bound`: violated iff `low > bound`.
    AtMost,
    /// `statistic ≥ bound`: violated iff `high < bound`.
    AtLeast,
}

/// One checked claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub direction: Direction,
    pub value: f64,
    /// Confidence limits of `value` (equal to it for exact checks).
    pub low: f64,
    pub high: f64,
    pub bound: f64,
    /// Distance from the violating side; negative on violation.
    pub margin: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Estimate>,
}

impl Check {
    fn build(
        name: impl Into<String>,
        direction: Direction,
        value: f64,
        low: f64,
        high: f64,
        bound: f64,
    ) -> Self {
        let margin = match direction {
            Direction::AtMost => bound - low,
            Direction::AtLeast => high - bound,
        };
        Check {
            name: name.into(),
            direction,
            value,
            low,
            high,
            bound,
            margin,
            verdict: if margin < 0.0 || margin.is_nan() {
                Verdict::Violation
            } else {
                Verdict::Consistent
            },
            estimate: None,
        }
    }

    /// `P ≤ bound` judged by the estimate's lower limit.
    pub fn probability(name: impl Into<String>, est: Estimate, bound: f64) -> Self {
        let mut c = Self::build(
            name,
            Direction::AtMost,
            est.p_hat,
            est.ci_low,
            est.ci_high,
            bound,
        );
        debug_assert_eq!(c.verdict, verdict(&est, bound));
        c.estimate = Some(est);
        c
    }

    /// `value ≤ bound` allowing `slack` (e.g. a multiple of the standard error).
    pub fn at_most(name: impl Into<String>, value: f64, slack: f64, bound: f64) -> Self {
        Self::build(
            name,
            Direction::AtMost,
            value,
            value - slack,
            value + slack,
            bound,
        )
    }

    /// `value ≥ bound` allowing `slack`.
    pub fn at_least(name: impl Into<String>, value: f64, slack: f64, bound: f64) -> Self {
        Self::build(
            name,
            Direction::AtLeast,
            value,
            value - slack,
            value + slack,
            bound,
        )
    }

    /// A count of failures that must be zero.
    pub fn zero_failures(name: impl Into<String>, failures: u64) -> Self {
        Self::at_most(name, failures as f64, 0.0, 0.0)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Consistent
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::Level;

    fn est(p_hat: f64, ci_low: f64) -> Estimate {
        Estimate {
            ci_low,
            p_hat,
            ci_high: 1.0,
            ..Estimate::from_counts(1, 2, 0, Level::P99, 0)
        }
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(verdict(&est(0.5, 0.48), 0.58), Verdict::Consistent);
        assert_eq!(verdict(&est(0.7, 0.62), 0.58), Verdict::Violation);
        assert_eq!(verdict(&est(1.0, 0.99), 1.0), Verdict::Consistent);
        let c = Check::probability("x", est(0.7, 0.62), 0.58);
        assert!(!c.passed());
        assert!((c.margin + 0.04).abs() < 1e-12);
    }

    #[test]
    fn directional_checks() {
        assert!(Check::at_least("size", 90.0, 0.0, 89.8).passed());
        assert!(!Check::at_least("size", 89.0, 0.5, 89.8).passed());
        assert!(Check::at_most("dev", 0.2, 0.1, 0.13).passed());
        assert!(Check::zero_failures("ineq", 0).passed());
        assert!(!Check::zero_failures("ineq", 1).passed());
    }
}
