//! Monte Carlo estimation, bound-consistency verdicts, reports and the
//! `lllforge` command line.

pub mod cli;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod report;
pub mod suite;
pub mod verdict;

pub use error::{HarnessError, Result};
pub use estimate::{wilson, CutoffPolicy, Estimate, Level, Moments, Runner, Trial};
pub use report::{Format, Report};
pub use verdict::{verdict, Check, Direction, Verdict};
