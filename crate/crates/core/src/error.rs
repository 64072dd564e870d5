use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability space: {0}")]
    InvalidSpace(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error(
        "scope of {size} variables ({assignments} assignments) exceeds the enumeration budget"
    )]
    ScopeTooLarge { size: usize, assignments: u128 },
    #[error("events come from different settings (variable vs permutation)")]
    SettingMismatch,
    #[error("{what}: size {size} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        budget: usize,
    },
    #[error("Shearer's criterion fails at independent set {set:?}")]
    ShearerViolated { set: Vec<usize> },
    #[error("event with scope {scope:?} is not a singleton event")]
    NotSingleton { scope: Vec<usize> },
    #[error("event {0:?} is not true on the current permutation")]
    EventNotTrue(Vec<(usize, usize)>),
    #[error("invalid dependency graph: {0}")]
    InvalidGraph(String),
}
