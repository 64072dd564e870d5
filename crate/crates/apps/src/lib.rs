//! Application drivers: bounded-occurrence k-SAT, independent transversals
//! avoiding a vertex set, and (partial) Latin transversals.

pub mod error;
pub mod ksat;
pub mod latin;
pub mod transversal;

pub use error::{AppError, Result};
