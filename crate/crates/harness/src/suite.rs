//! Bound-consistency suites behind `verify`.

use lllforge_apps::ksat::random_cnf;
use lllforge_apps::latin::ColorMatrix;
use lllforge_apps::transversal::BlockGraph;

use crate::cli::Suite;
use crate::error::Result;
use crate::experiments::{self as ex, Settings};
use crate::verdict::Check;

/// Variable and permutation setting checks on small instances.
pub fn core(s: &Settings) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (space, dags) = ex::fixed_witness_dags();
    for d in &dags {
        checks.extend(ex::dag_frequency(&space, d, s)?.2);
    }
    checks.extend(ex::variable_bounds(&ex::small_var_instance(), s)?);
    let (n, bad, a) = ex::tiny_perm_instance();
    checks.extend(ex::theta_prime_check(n, &bad, &a, 10, s)?.1);
    checks.push(ex::psi_prime_sweep(200, s.seed())?);
    Ok(checks)
}

/// Application checks at moderate sizes.
pub fn apps(s: &Settings) -> Result<Vec<Check>> {
    let seed = s.seed();
    let mut checks = Vec::new();
    let cnf = random_cnf(60, 6, 3, seed)?;
    checks.extend(ex::ksat_independence(&cnf, &[1, 2, 3], s)?.1);
    for (k, l) in [(3, 1), (3, 2), (4, 2), (5, 4)] {
        checks.push(ex::implicate_construction(k, l)?.1);
    }
    checks.push(ex::random_implicates(12, 4, 2, 5, seed)?.1);
    let g = BlockGraph::random(8, 10, 2, seed)?;
    for l in [1, 3, 5] {
        let within: Vec<usize> = g.blocks()[0][..l].to_vec();
        let spread: Vec<usize> = (0..l).map(|i| g.blocks()[i][i]).collect();
        checks.extend(ex::transversal_avoidance(&g, &within, s)?.1);
        checks.extend(ex::transversal_avoidance(&g, &spread, s)?.1);
    }
    let m = ColorMatrix::random_with_multiplicity(32, 3, seed)?;
    checks.extend(ex::weighted_latin(&m, s)?.1);
    let m = ColorMatrix::random_with_multiplicity(64, 9, seed)?;
    let runs = s.with_trials((s.runner.trials / 100).clamp(10, 1000));
    checks.extend(ex::partial_latin_runs(&m, 0.15, None, 0.05, &runs)?.1);
    for y in [25, 100] {
        for p in [0.2, 0.5] {
            checks.push(ex::stein(50, y, p, s)?.1);
        }
    }
    Ok(checks)
}

pub fn run(suite: Suite, s: &Settings) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Core | Suite::All) {
        checks.extend(core(s)?);
    }
    if matches!(suite, Suite::Apps | Suite::All) {
        checks.extend(apps(s)?);
    }
    Ok(checks)
}
