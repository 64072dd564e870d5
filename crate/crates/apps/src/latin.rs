//! Latin transversals: weighted transversals through the Swapping Algorithm
//! and the marked-cell construction of large partial Latin transversals.

use std::collections::HashMap;

use lllforge_core::swap::{SwapInstance, SwapOptions};
use lllforge_core::{AtomicPermEvent, Permutation, RngStream, SelectionRule};
use serde::Serialize;

use crate::error::{AppError, Result};

/// `27/256`: the largest color density for which full transversals exist
/// through the cluster-expansion criterion.
pub const CRITICAL_DENSITY: f64 = 27.0 / 256.0;

/// An `n × n` array of colors with optional cell weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorMatrix {
    n: usize,
    colors: Vec<usize>,
    weights: Option<Vec<f64>>,
    counts: Vec<usize>,
}

impl ColorMatrix {
    /// Colors are relabelled densely in order of first appearance.
    pub fn new(n: usize, colors: Vec<usize>) -> Result<Self> {
        if n == 0 || colors.len() != n * n {
            return Err(AppError::InvalidInstance(format!(
                "{} colors for an {n} x {n} matrix",
                colors.len()
            )));
        }
        let mut ids = HashMap::new();
        let colors: Vec<usize> = colors
            .into_iter()
            .map(|c| {
                let next = ids.len();
                *ids.entry(c).or_insert(next)
            })
            .collect();
        let mut counts = vec![0; ids.len()];
        for &c in &colors {
            counts[c] += 1;
        }
        Ok(ColorMatrix {
            n,
            colors,
            weights: None,
            counts,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n * self.n
            || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite())
        {
            return Err(AppError::InvalidInstance(
                "weights must be n x n finite nonnegative values".into(),
            ));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// One row of integers per line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<usize>> = parse_csv(text)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AppError::InvalidInstance(
                "color matrix is not square".into(),
            ));
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    pub fn weights_from_csv(self, text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = parse_csv(text)?;
        self.with_weights(rows.into_iter().flatten().collect())
    }

    /// Random matrix in which every color occurs `delta` times except
    /// possibly one color that takes the remainder.
    pub fn random_with_multiplicity(n: usize, delta: usize, seed: u64) -> Result<Self> {
        if delta == 0 {
            return Err(AppError::InvalidInstance(
                "multiplicity must be positive".into(),
            ));
        }
        let mut rng = RngStream::derive(seed, "colors", 0);
        let mut cells: Vec<usize> = (0..n * n).collect();
        for i in (1..cells.len()).rev() {
            let j = rng.below(i + 1);
            cells.swap(i, j);
        }
        let mut colors = vec![0; n * n];
        for (idx, &cell) in cells.iter().enumerate() {
            colors[cell] = idx / delta;
        }
        Self::new(n, colors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn color(&self, x: usize, y: usize) -> usize {
        self.colors[x * self.n + y]
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[x * self.n + y])
    }

    /// `w(A)`.
    pub fn total_weight(&self) -> f64 {
        self.weights
            .as_ref()
            .map_or((self.n * self.n) as f64, |w| w.iter().sum())
    }

    pub fn num_colors(&self) -> usize {
        self.counts.len()
    }

    /// `u_k` for every color.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `Δ = max_k u_k`.
    pub fn delta(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Cells of each color in row-major order.
    pub fn cells_by_color(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.num_colors()];
        for x in 0..self.n {
            for y in 0..self.n {
                out[self.color(x, y)].push((x, y));
            }
        }
        out
    }
}

fn parse_csv<T: std::str::FromStr>(text: &str) -> Result<Vec<Vec<T>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<T>().map_err(|_| AppError::Parse {
                    line: line + 1,
                    message: format!("bad value {f:?}"),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// One bad-event `π(x_1) = y_1 ∧ π(x_2) = y_2` per unordered pair of
/// same-colored cells in distinct rows and columns.
pub fn latin_instance(m: &ColorMatrix) -> Vec<AtomicPermEvent> {
    let mut out = Vec::new();
    for cells in m.cells_by_color() {
        for (i, &(x1, y1)) in cells.iter().enumerate() {
            for &(x2, y2) in &cells[i + 1..] {
                if x1 != x2 && y1 != y2 {
                    out.push(
                        AtomicPermEvent::new(vec![(x1, y1), (x2, y2)])
                            .expect("distinct rows and columns"),
                    );
                }
            }
        }
    }
    out
}

/// `α = 256 / (81 n²)`.
pub fn alpha_weighted(n: usize) -> f64 {
    256.0 / (81.0 * (n * n) as f64)
}

/// `5 / (3n)`: bound on `P_MT(π(x) = y)` for every cell.
pub fn per_cell_bound(n: usize) -> f64 {
    5.0 / (3.0 * n as f64)
}

/// `(5/3) w(A) / n`.
pub fn weight_bound(m: &ColorMatrix) -> f64 {
    5.0 / 3.0 * m.total_weight() / m.n() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedOutcome {
    pub permutation: Vec<usize>,
    pub weight: f64,
    pub steps: usize,
    pub terminated: bool,
}

/// Repeated Swapping Algorithm runs on one color matrix.
#[derive(Debug, Clone)]
pub struct LatinSampler {
    matrix: ColorMatrix,
    swap: SwapInstance,
    max_steps: usize,
}

impl LatinSampler {
    /// Requires `Δ ≤ 27n/256`.
    pub fn new(m: ColorMatrix) -> Result<Self> {
        let limit = CRITICAL_DENSITY * m.n() as f64;
        if m.delta() as f64 > limit {
            return Err(AppError::SupercriticalColors {
                delta: m.delta(),
                limit,
            });
        }
        let bad = latin_instance(&m);
        let max_steps =
            ((1000.0 * bad.len() as f64 * alpha_weighted(m.n())).ceil() as usize).max(1000);
        let swap = SwapInstance::new(m.n(), bad)?;
        Ok(LatinSampler {
            matrix: m,
            swap,
            max_steps,
        })
    }

    pub fn matrix(&self) -> &ColorMatrix {
        &self.matrix
    }

    pub fn instance(&self) -> &SwapInstance {
        &self.swap
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn sample(&self, seed: u64) -> WeightedOutcome {
        let r = self
            .swap
            .run(seed, SelectionRule::LowestIndex, self.max_steps);
        let pi = r.final_permutation;
        let n = self.matrix.n();
        if r.terminated {
            let mut seen = vec![false; self.matrix.num_colors()];
            for x in 0..n {
                let c = self.matrix.color(x, pi.get(x));
                assert!(!seen[c], "terminated with a repeated color");
                seen[c] = true;
            }
        }
        WeightedOutcome {
            weight: (0..n).map(|x| self.matrix.weight(x, pi.get(x))).sum(),
            permutation: pi.forward().to_vec(),
            steps: r.steps,
            terminated: r.terminated,
        }
    }
}

/// Swapping Algorithm transversal and its weight.
pub fn weighted_transversal(m: &ColorMatrix, seed: u64) -> Result<WeightedOutcome> {
    Ok(LatinSampler::new(m.clone())?.sample(seed))
}

/// `q_max = 1 − √(1 − (27/256)/β)`.
pub fn q_max(beta: f64) -> Result<f64> {
    if !(beta > CRITICAL_DENSITY) {
        return Err(AppError::OutOfRange(format!(
            "beta = {beta} must exceed 27/256"
        )));
    }
    Ok(1.0 - (1.0 - CRITICAL_DENSITY / beta).sqrt())
}

/// Smallest positive root of `γ − (2q − q²)(1 + βγ)⁴`.
///
/// The left side is concave in `γ` and negative at 0, so the smallest root
/// lies below the maximizer `γ* = ((4cβ)^{−1/3} − 1)/β` and is found by
/// bisection on `[0, γ*]`.
pub fn gamma_root(beta: f64, q: f64) -> Result<f64> {
    let c = 2.0 * q - q * q;
    if !(0.0..=1.0).contains(&q) || !(beta > 0.0) {
        return Err(AppError::NoRoot { beta, q });
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    let h = |g: f64| g - c * (1.0 + beta * g).powi(4);
    let peak = ((1.0 / (4.0 * c * beta)).cbrt() - 1.0) / beta;
    // Allow a hair of rounding at the tangent point q = q_max.
    if !(peak > 0.0) || h(peak) < -1e-12 {
        return Err(AppError::NoRoot { beta, q });
    }
    let (mut lo, mut hi) = (0.0, peak);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(if h(hi).abs() <= h(lo).abs() { hi } else { lo })
}

/// `f(β, q) = q − (e^{−(1−q)β} − 1)/β − 2(1−q)²β²γ(1 + βγ)`.
pub fn f_value(beta: f64, q: f64) -> Result<f64> {
    let gamma = gamma_root(beta, q)?;
    Ok(f_with_gamma(beta, q, gamma))
}

fn f_with_gamma(beta: f64, q: f64, gamma: f64) -> f64 {
    q - ((-(1.0 - q) * beta).exp() - 1.0) / beta
        - 2.0 * (1.0 - q).powi(2) * beta * beta * gamma * (1.0 + beta * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GValue {
    pub g: f64,
    pub q: f64,
    pub gamma: f64,
}

/// `g(β) = max_{q ∈ [0, q_max]} f(β, q)`: 256-point grid, then
/// golden-section search around the best grid point.
pub fn g_value(beta: f64) -> Result<GValue> {
    let qm = q_max(beta)?;
    let eval = |q: f64| f_value(beta, q).unwrap_or(f64::NEG_INFINITY);
    const GRID: usize = 256;
    let grid: Vec<f64> = (0..=GRID).map(|i| qm * i as f64 / GRID as f64).collect();
    let (best, _) = grid.iter().enumerate().map(|(i, &q)| (i, eval(q))).fold(
        (0, f64::NEG_INFINITY),
        |acc, x| if x.1 > acc.1 { x } else { acc },
    );
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(GRID)];
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while b - a > 1e-10 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d);
        }
    }
    let mut q = 0.5 * (a + b);
    // Keep the grid point if refinement did not improve on it.
    if eval(grid[best]) > eval(q) {
        q = grid[best];
    }
    let gamma = gamma_root(beta, q)?;
    Ok(GValue {
        g: f_with_gamma(beta, q, gamma),
        q,
        gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub beta: f64,
    /// `g(β)`.
    pub theorem: f64,
    /// `(1 − e^{−β})/β`, no resampling.
    pub random: f64,
    /// `1/2 + ∛(27/(2048β))`, partial resampling.
    pub partial_resampling: f64,
}

pub fn reproduce_table(betas: &[f64]) -> Result<Vec<TableRow>> {
    betas
        .iter()
        .map(|&beta| {
            Ok(TableRow {
                beta,
                theorem: g_value(beta)?.g,
                random: (1.0 - (-beta).exp()) / beta,
                partial_resampling: 0.5 + (27.0 / (2048.0 * beta)).cbrt(),
            })
        })
        .collect()
}

/// `r = 1 − √((n(q − 1)² + 2q − 1)/(n − 1))`.
pub fn mark_probability(n: usize, q: f64) -> f64 {
    let nf = n as f64;
    let inner = (nf * (q - 1.0).powi(2) + 2.0 * q - 1.0) / (nf - 1.0);
    (1.0 - inner.max(0.0).sqrt()).clamp(0.0, 1.0)
}

/// Per-color accounting of one partial Latin transversal run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorAccount {
    pub color: usize,
    /// Cells removed.
    pub removed: usize,
    /// `|Q_k|`.
    pub q_size: usize,
    /// Pairs of final color-k cells that are not both in `Q_k`.
    pub pair_term: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialLatinResult {
    /// Kept cells `(x, y)`: distinct rows, columns and colors.
    pub kept: Vec<(usize, usize)>,
    pub size: usize,
    /// Colors that appear in the initial `Q_k` or the final permutation.
    pub accounts: Vec<ColorAccount>,
    pub inequality_holds: bool,
    pub steps: usize,
    pub terminated: bool,
}

/// Repeated runs of the marked Swapping Algorithm.
#[derive(Debug, Clone)]
pub struct PartialLatinSampler {
    matrix: ColorMatrix,
    swap: SwapInstance,
    pub beta: f64,
    pub q: f64,
    pub r: f64,
    pub gamma: f64,
    pub alpha: f64,
    max_steps: usize,
}

impl PartialLatinSampler {
    pub fn new(m: ColorMatrix, beta: f64, q: f64) -> Result<Self> {
        let n = m.n();
        let limit = beta * n as f64;
        if m.delta() as f64 > limit {
            return Err(AppError::SupercriticalColors {
                delta: m.delta(),
                limit,
            });
        }
        let qm = q_max(beta)?;
        if !(0.0..=qm).contains(&q) {
            return Err(AppError::OutOfRange(format!("q = {q} outside [0, {qm}]")));
        }
        if n < 2 {
            return Err(AppError::InvalidInstance("need n >= 2".into()));
        }
        let gamma = gamma_root(beta, q)?;
        let alpha = gamma / (n * n) as f64;
        let r = mark_probability(n, q);
        let nf = n as f64;
        let required = (2.0 * r - r * r) / (nf * (nf - 1.0))
            * (1.0 + nf * (m.delta() as f64 - 1.0) * alpha).powi(4);
        if alpha < required * (1.0 - 1e-12) {
            return Err(AppError::SupercriticalColors {
                delta: m.delta(),
                limit,
            });
        }
        let bad = latin_instance(&m);
        let max_steps = ((1000.0 * bad.len() as f64 * alpha).ceil() as usize).max(1000);
        let swap = SwapInstance::new(n, bad)?.with_marks(r)?;
        Ok(PartialLatinSampler {
            matrix: m,
            swap,
            beta,
            q,
            r,
            gamma,
            alpha,
            max_steps,
        })
    }

    pub fn matrix(&self) -> &ColorMatrix {
        &self.matrix
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn run(&self, seed: u64) -> PartialLatinResult {
        let res = self.swap.run_observed(
            seed,
            SwapOptions {
                rule: SelectionRule::LowestIndex,
                max_steps: self.max_steps,
                ..SwapOptions::default()
            },
            |_| false,
        );
        let marks0 = res.initial_marks.as_deref().expect("marks enabled");
        partial_from(
            &self.matrix,
            &res.initial,
            marks0,
            &res.final_permutation,
            res.steps,
            res.terminated,
        )
    }
}

/// Delete repeated colors from the final permutation (keeping the smallest
/// row) and check the `L_k` inequality against the initial configuration.
pub fn partial_from(
    m: &ColorMatrix,
    initial: &Permutation,
    initial_marks: &[bool],
    fin: &Permutation,
    steps: usize,
    terminated: bool,
) -> PartialLatinResult {
    let n = m.n();
    let k = m.num_colors();
    let mut q_sets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for x in 0..n {
        let y = initial.get(x);
        if !initial_marks[x * n + y] {
            q_sets[m.color(x, y)].push((x, y));
        }
    }
    let mut final_cells: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for x in 0..n {
        let y = fin.get(x);
        final_cells[m.color(x, y)].push((x, y));
    }
    let mut kept = Vec::new();
    let mut accounts = Vec::new();
    for c in 0..k {
        let cells = &final_cells[c];
        let q = &q_sets[c];
        if cells.is_empty() && q.is_empty() {
            continue;
        }
        if let Some(&first) = cells.first() {
            kept.push(first);
        }
        let removed = cells.len().saturating_sub(1);
        let mut pair_term = 0;
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                if !(q.contains(a) && q.contains(b)) {
                    pair_term += 1;
                }
            }
        }
        let rhs = q.len() as i64 - 1 + i64::from(q.is_empty()) + pair_term as i64;
        accounts.push(ColorAccount {
            color: c,
            removed,
            q_size: q.len(),
            pair_term,
            holds: removed as i64 <= rhs,
        });
    }
    kept.sort_unstable();
    let inequality_holds = accounts.iter().all(|a| a.holds);
    PartialLatinResult {
        size: kept.len(),
        kept,
        accounts,
        inequality_holds,
        steps,
        terminated,
    }
}

/// Partial Latin transversal from one marked run.
pub fn partial_latin(m: &ColorMatrix, beta: f64, q: f64, seed: u64) -> Result<PartialLatinResult> {
    Ok(PartialLatinSampler::new(m.clone(), beta, q)?.run(seed))
}

/// `exp(−p|Y|/n)`.
pub fn stein_bound(n: usize, y_size: usize, p: f64) -> f64 {
    (-p * y_size as f64 / n as f64).exp()
}

/// `|Y|` distinct random cells of the `n × n` grid.
pub fn random_cells(n: usize, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if count > n * n {
        return Err(AppError::OutOfRange(format!(
            "{count} cells in an {n} x {n} grid"
        )));
    }
    let mut rng = RngStream::derive(seed, "cells", 0);
    let mut cells: Vec<usize> = (0..n * n).collect();
    for i in 0..count {
        let j = i + rng.below(n * n - i);
        cells.swap(i, j);
    }
    Ok(cells[..count].iter().map(|&c| (c / n, c % n)).collect())
}

/// One trial: keep each cell of `y` with probability `p`, draw a uniform
/// permutation, and report whether it avoids every kept cell.
pub fn stein_trial(n: usize, y: &[(usize, usize)], p: f64, rng: &mut RngStream) -> bool {
    let z: Vec<(usize, usize)> = y.iter().copied().filter(|_| rng.bernoulli(p)).collect();
    let pi = Permutation::random(n, rng);
    z.iter().all(|&(x, c)| pi.get(x) != c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_examples() {
        let distinct = ColorMatrix::new(2, vec![0, 1, 2, 3]).unwrap();
        assert!(latin_instance(&distinct).is_empty());
        let diag = ColorMatrix::new(3, vec![7, 1, 2, 3, 7, 4, 5, 6, 8]).unwrap();
        let bad = latin_instance(&diag);
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].pairs(), &[(0, 0), (1, 1)]);
        let row = ColorMatrix::new(6, {
            let mut c: Vec<usize> = (0..36).collect();
            c[5] = 0;
            c
        })
        .unwrap();
        assert!(latin_instance(&row).is_empty());
    }

    #[test]
    fn weighted_constants() {
        assert!((27.0 * 32.0 / 256.0 - 3.375f64).abs() < 1e-15);
        assert!((alpha_weighted(32) - 256.0 / (81.0 * 1024.0)).abs() < 1e-18);
        assert!((per_cell_bound(32) - 0.052_083).abs() < 1e-6);
    }

    #[test]
    fn uniform_weight_is_n() {
        let m = ColorMatrix::random_with_multiplicity(32, 3, 1).unwrap();
        assert_eq!(m.delta(), 3);
        let out = weighted_transversal(&m, 5).unwrap();
        assert!(out.terminated);
        assert_eq!(out.weight, 32.0);
    }

    #[test]
    fn supercritical_rejected() {
        let m = ColorMatrix::random_with_multiplicity(32, 4, 1).unwrap();
        assert!(matches!(
            weighted_transversal(&m, 0),
            Err(AppError::SupercriticalColors { .. })
        ));
    }

    #[test]
    fn q_zero_values() {
        assert_eq!(gamma_root(0.25, 0.0).unwrap(), 0.0);
        let f = f_value(0.25, 0.0).unwrap();
        assert!((f - (1.0 - (-0.25f64).exp()) / 0.25).abs() < 1e-15);
        assert!((f - 0.885).abs() < 5e-4);
    }

    #[test]
    fn gamma_residual() {
        let g = gamma_root(0.15, 0.3).unwrap();
        let res = g - 0.51 * (1.0 + 0.15 * g).powi(4);
        assert!(res.abs() <= 1e-12);
        assert!((g - 0.81).abs() < 0.01, "{g}");
    }

    #[test]
    fn g_at_015() {
        let g = g_value(0.15).unwrap();
        assert!((g.g - 0.948).abs() < 5e-4, "{g:?}");
        assert!(g.q > 0.0 && g.q < q_max(0.15).unwrap());
    }

    #[test]
    fn q_max_domain() {
        assert!(q_max(0.1).is_err());
        assert!(q_max(0.11).unwrap() > 0.0);
    }

    #[test]
    fn q_zero_run_does_nothing() {
        let m = ColorMatrix::random_with_multiplicity(20, 3, 2).unwrap();
        let s = PartialLatinSampler::new(m, 0.15, 0.0).unwrap();
        assert_eq!(s.r, 0.0);
        let res = s.run(3);
        assert_eq!(res.steps, 0);
        assert!(res.inequality_holds);
    }

    #[test]
    fn kept_cells_are_partial_transversal() {
        let m = ColorMatrix::random_with_multiplicity(30, 4, 2).unwrap();
        let res = partial_latin(&m, 0.15, 0.3, 1).unwrap();
        let mut rows = std::collections::HashSet::new();
        let mut cols = std::collections::HashSet::new();
        let mut colors = std::collections::HashSet::new();
        for &(x, y) in &res.kept {
            assert!(rows.insert(x) && cols.insert(y) && colors.insert(m.color(x, y)));
        }
        let removed: usize = res.accounts.iter().map(|a| a.removed).sum();
        assert_eq!(res.size, 30 - removed);
        assert!(res.inequality_holds);
    }

    #[test]
    fn csv_input() {
        let m = ColorMatrix::from_csv("1,2\n2,1\n").unwrap();
        assert_eq!(m.delta(), 2);
        let m = m.weights_from_csv("0.5, 1\n1, 2\n").unwrap();
        assert_eq!(m.total_weight(), 4.5);
        assert!(ColorMatrix::from_csv("1,2\n3\n").is_err());
        assert!(ColorMatrix::from_csv("1,x\n2,1\n").is_err());
    }

    #[test]
    fn stein_helpers() {
        assert!((stein_bound(50, 25, 0.2) - (-0.1f64).exp()).abs() < 1e-15);
        let cells = random_cells(5, 25, 0).unwrap();
        let mut sorted = cells.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 25);
        let mut rng = RngStream::derive(0, "s", 0);
        assert!(stein_trial(5, &cells, 0.0, &mut rng));
    }
}
