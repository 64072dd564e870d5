//! Shearer measure, LLL criteria and MT-distribution bounds.

pub mod cluster;
pub mod graph;
pub mod perm;
pub mod shearer;
pub mod variable;

pub use cluster::{
    check_cluster_expansion, neighborhood_polynomial, symmetric_criterion, symmetric_weights,
    ClusterVerdict, ClusterWeights, EventVerdict, CLUSTER_TOL,
};
pub use graph::{DepGraph, IndependentSets};
pub use perm::{is_orderable, perm_union_probability, PermBounds, PermDisjunctionBound};
pub use shearer::{shearer_measure, stable_seq_weight, Measure, SetWeight};
pub use variable::{psi_theta, DisjunctionBound, MuSource, PsiTheta, SingletonBound, VarBounds};
