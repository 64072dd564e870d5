//! Bounded-occurrence k-SAT: DIMACS input, the LLL instance, j-wise
//! independence of MT outputs and small implicate computations.

use std::collections::HashMap;
use std::f64::consts::E;
use std::fmt::Write as _;

use lllforge_core::mt::MtInstance;
use lllforge_core::{Assignment, RngStream, ScopedEvent, VarSpace};
use serde::Serialize;

use crate::error::{AppError, Result};

/// Largest formula handed to [`min_implicate_size`].
pub const IMPLICATE_BUDGET: usize = 20;
/// Exhaustive tuple enumeration up to this many (tuple, pattern) cells.
pub const TUPLE_ENUMERATION_LIMIT: f64 = 1e6;
/// Random tuples checked when enumeration is too large.
pub const TUPLE_SAMPLE: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Literal { var, positive }
    }

    /// Satisfied by the bit `value`.
    pub fn holds(&self, value: usize) -> bool {
        (value != 0) == self.positive
    }
}

/// A CNF formula over `n` boolean variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    n: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (c, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(AppError::InvalidInstance(format!("clause {c} is empty")));
            }
            let mut vars: Vec<usize> = clause.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            if let Some(&v) = vars.iter().find(|&&v| v >= n) {
                return Err(AppError::InvalidInstance(format!(
                    "clause {c} uses variable {} but n = {n}",
                    v + 1
                )));
            }
            if let Some(w) = vars.windows(2).find(|w| w[0] == w[1]) {
                return Err(AppError::DuplicateLiteral {
                    line: c + 1,
                    var: w[0] + 1,
                });
            }
        }
        Ok(Cnf { n, clauses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Minimum clause size (0 for an empty formula).
    pub fn k_min(&self) -> usize {
        self.clauses.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Maximum number of clauses any variable occurs in.
    pub fn max_occurrence(&self) -> usize {
        let mut occ = vec![0; self.n];
        for clause in &self.clauses {
            for l in clause {
                occ[l.var] += 1;
            }
        }
        occ.into_iter().max().unwrap_or(0)
    }

    pub fn satisfied_by(&self, values: &[usize]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds(values[l.var])))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for clause in &self.clauses {
            for l in clause {
                let v = l.var as i64 + 1;
                let _ = write!(out, "{} ", if l.positive { v } else { -v });
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parse DIMACS CNF. Comment lines start with `c`; a line starting with `%`
/// ends the input.
pub fn load_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "second problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(parse_err(line_no, "expected \"p cnf <vars> <clauses>\""));
            }
            let n = parts[2]
                .parse()
                .map_err(|_| parse_err(line_no, "bad variable count"))?;
            let m = parts[3]
                .parse()
                .map_err(|_| parse_err(line_no, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(line_no, "clause before the problem line"))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, &format!("bad literal {tok:?}")))?;
            if current.is_empty() {
                current_line = line_no;
            }
            if lit == 0 {
                if current.is_empty() {
                    return Err(parse_err(line_no, "empty clause"));
                }
                clauses.push((current_line, std::mem::take(&mut current)));
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > n {
                return Err(parse_err(line_no, &format!("variable {var} exceeds {n}")));
            }
            if current.iter().any(|l| l.var == var - 1) {
                return Err(AppError::DuplicateLiteral { line: line_no, var });
            }
            current.push(Literal::new(var - 1, lit > 0));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if !current.is_empty() {
        clauses.push((current_line, current));
    }
    if clauses.len() != m {
        log::warn!("header declares {m} clauses, found {}", clauses.len());
    }
    Cnf::new(n, clauses.into_iter().map(|(_, c)| c).collect())
}

fn parse_err(line: usize, message: &str) -> AppError {
    AppError::Parse {
        line,
        message: message.to_string(),
    }
}

/// `L ≤ 2^k / (e k)`.
pub fn symmetric_criterion(k: usize, l: usize) -> bool {
    k > 0 && l as f64 <= 2f64.powi(k as i32) / (E * k as f64)
}

/// `ε = e L 2^{−k}`; requires the symmetric criterion.
pub fn epsilon_bound(k: usize, l: usize) -> Result<f64> {
    if l == 0 {
        return Ok(0.0);
    }
    if !symmetric_criterion(k, l) {
        return Err(AppError::CriterionViolated { k, l });
    }
    Ok(E * l as f64 * 2f64.powi(-(k as i32)))
}

/// The LLL instance of a formula.
#[derive(Debug, Clone)]
pub struct KsatInstance {
    pub mt: MtInstance,
    pub k: usize,
    pub l: usize,
    /// `L ≤ 2^k/(ek)` with `k` the minimum clause size.
    pub criterion: bool,
}

/// Uniform bits and one bad-event per clause: every literal false.
pub fn cnf_to_instance(cnf: &Cnf) -> Result<KsatInstance> {
    let space = VarSpace::uniform_bits(cnf.n().max(1))?;
    let bad = cnf
        .clauses()
        .iter()
        .map(|c| {
            ScopedEvent::conjunction(
                c.iter()
                    .map(|l| (l.var, if l.positive { 0 } else { 1 }))
                    .collect(),
            )
        })
        .collect::<lllforge_core::Result<Vec<_>>>()?;
    let (k, l) = (cnf.k_min(), cnf.max_occurrence());
    Ok(KsatInstance {
        mt: MtInstance::new(space, bad)?,
        k,
        l,
        criterion: symmetric_criterion(k, l),
    })
}

/// Random formula where every variable occurs in exactly `l` clauses of
/// size `k`, with random signs. Needs `k` to divide `n l`.
pub fn random_cnf(n: usize, k: usize, l: usize, seed: u64) -> Result<Cnf> {
    if k == 0 || k > n || !(n * l).is_multiple_of(k) {
        return Err(AppError::InvalidInstance(format!(
            "cannot place {n} variables x {l} occurrences into clauses of size {k}"
        )));
    }
    let mut rng = RngStream::derive(seed, "cnf", 0);
    let mut slots: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, l)).collect();
    for _ in 0..100_000 {
        // Fisher-Yates
        for i in (1..slots.len()).rev() {
            let j = rng.below(i + 1);
            slots.swap(i, j);
        }
        let ok = slots.chunks(k).all(|c| {
            let mut s = c.to_vec();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        });
        if ok {
            let clauses = slots
                .chunks(k)
                .map(|c| {
                    c.iter()
                        .map(|&v| Literal::new(v, rng.bernoulli(0.5)))
                        .collect()
                })
                .collect();
            return Cnf::new(n, clauses);
        }
    }
    Err(AppError::InvalidInstance(
        "configuration model kept producing repeated variables".into(),
    ))
}

/// MT outputs stored column-wise as bits.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    n: usize,
    count: usize,
    columns: Vec<Vec<u64>>,
}

impl SampleMatrix {
    pub fn new(n: usize) -> Self {
        SampleMatrix {
            n,
            count: 0,
            columns: vec![Vec::new(); n],
        }
    }

    pub fn push(&mut self, values: &[usize]) {
        assert_eq!(values.len(), self.n, "sample width");
        let (word, bit) = (self.count / 64, self.count % 64);
        for (col, &v) in self.columns.iter_mut().zip(values) {
            if bit == 0 {
                col.push(0);
            }
            if v != 0 {
                col[word] |= 1 << bit;
            }
        }
        self.count += 1;
    }

    pub fn push_assignment(&mut self, a: &Assignment) {
        self.push(&a.values);
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Samples where every variable of `vars` is 1.
    fn ones(&self, vars: &[usize]) -> u64 {
        if vars.is_empty() {
            return self.count as u64;
        }
        let words = self.columns[0].len();
        (0..words)
            .map(|w| {
                vars.iter()
                    .fold(u64::MAX, |acc, &v| acc & self.columns[v][w])
                    .count_ones() as u64
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub j: usize,
    /// `max |frequency − 2^{−j}|` over the tuples and patterns checked.
    pub max_deviation: f64,
    /// Standard error of a single cell frequency under `p = 2^{−j}`.
    pub se: f64,
    pub worst_tuple: Vec<usize>,
    pub worst_pattern: Vec<u8>,
    pub tuples_checked: usize,
    pub exhaustive: bool,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Largest deviation of a j-wise marginal from uniform. Every tuple is
/// checked when `C(n, j) 2^j ≤ 10^6`; otherwise a seeded sample of tuples.
pub fn jwise_deviation(samples: &SampleMatrix, j: usize, seed: u64) -> Result<Deviation> {
    let n = samples.n();
    if j == 0 || j > n || j > 20 {
        return Err(AppError::OutOfRange(format!("j = {j} with n = {n}")));
    }
    if samples.is_empty() {
        return Err(AppError::OutOfRange("no samples".into()));
    }
    let total = samples.len() as f64;
    let target = 2f64.powi(-(j as i32));
    let exhaustive = binomial(n, j) * 2f64.powi(j as i32) <= TUPLE_ENUMERATION_LIMIT;
    let tuples: Vec<Vec<usize>> = if exhaustive {
        combinations(n, j)
    } else {
        let mut rng = RngStream::derive(seed, "tuples", j as u64);
        (0..TUPLE_SAMPLE)
            .map(|_| {
                let mut t: Vec<usize> = Vec::with_capacity(j);
                while t.len() < j {
                    let v = rng.below(n);
                    if !t.contains(&v) {
                        t.push(v);
                    }
                }
                t.sort_unstable();
                t
            })
            .collect()
    };
    let mut cache: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut best = Deviation {
        j,
        max_deviation: -1.0,
        se: (target * (1.0 - target) / total).sqrt(),
        worst_tuple: Vec::new(),
        worst_pattern: Vec::new(),
        tuples_checked: tuples.len(),
        exhaustive,
    };
    let full = (1usize << j) - 1;
    let mut ones = vec![0u64; 1 << j];
    let mut sub = Vec::with_capacity(j);
    for t in &tuples {
        for mask in 0..=full {
            sub.clear();
            sub.extend((0..j).filter(|&b| mask >> b & 1 == 1).map(|b| t[b]));
            ones[mask] = if mask == full {
                samples.ones(&sub)
            } else {
                *cache
                    .entry(sub.clone())
                    .or_insert_with(|| samples.ones(&sub))
            };
        }
        for y in 0..=full {
            // Inclusion–exclusion over the zero positions.
            let zeros = full & !y;
            let mut count: i64 = 0;
            let mut s = zeros;
            loop {
                let term = ones[y | s] as i64;
                count += if s.count_ones().is_multiple_of(2) {
                    term
                } else {
                    -term
                };
                if s == 0 {
                    break;
                }
                s = (s - 1) & zeros;
            }
            let dev = (count as f64 / total - target).abs();
            if dev > best.max_deviation {
                best.max_deviation = dev;
                best.worst_tuple = t.clone();
                best.worst_pattern = (0..j).map(|b| (y >> b & 1) as u8).collect();
            }
        }
    }
    Ok(best)
}

fn combinations(n: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..j).collect();
    loop {
        out.push(cur.clone());
        let mut i = j;
        while i > 0 && cur[i - 1] == n - j + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for t in i..j {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

/// `Φ = ∧_y (C ∨ X(1) = y_1 ∨ … ∨ X(k−j) = y_{k−j})` with `C` the
/// all-positive clause on variables `0..j`; the auxiliary variables are
/// `j..k`. Returns the formula and `C`.
pub fn implicate_formula(k: usize, j: usize) -> Result<(Cnf, Vec<Literal>)> {
    if j == 0 || j > k {
        return Err(AppError::OutOfRange(format!(
            "need 1 <= j <= k, got j = {j}, k = {k}"
        )));
    }
    let c: Vec<Literal> = (0..j).map(|v| Literal::new(v, true)).collect();
    let aux = k - j;
    let clauses = (0..1usize << aux)
        .map(|y| {
            let mut clause = c.clone();
            clause.extend((0..aux).map(|i| Literal::new(j + i, y >> i & 1 == 1)));
            clause
        })
        .collect();
    Ok((Cnf::new(k, clauses)?, c))
}

/// Smallest non-trivial implicate of a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImplicateSize {
    /// The formula has no models; the empty clause is entailed.
    Unsatisfiable,
    Size(usize),
    /// Every assignment is a model.
    None,
}

/// Exhaustive search: the smallest `s` such that some non-tautological
/// clause on `s` variables is entailed.
pub fn min_implicate_size(cnf: &Cnf) -> Result<ImplicateSize> {
    let n = cnf.n();
    if n > IMPLICATE_BUDGET {
        return Err(AppError::Core(lllforge_core::Error::BudgetExceeded {
            what: "implicate search",
            size: n,
            budget: IMPLICATE_BUDGET,
        }));
    }
    let mut values = vec![0usize; n];
    let models: Vec<u32> = (0u32..1 << n)
        .filter(|&x| {
            for (i, v) in values.iter_mut().enumerate() {
                *v = (x >> i & 1) as usize;
            }
            cnf.satisfied_by(&values)
        })
        .collect();
    if models.is_empty() {
        return Ok(ImplicateSize::Unsatisfiable);
    }
    // A clause on S is entailed iff its falsifying pattern on S is not the
    // projection of any model.
    let mut seen = Vec::new();
    for s in 1..=n {
        for vars in combinations(n, s) {
            seen.clear();
            seen.resize(1 << s, false);
            let mut distinct = 0;
            for &x in &models {
                let p = vars
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (b, &v)| acc | ((x >> v & 1) as usize) << b);
                if !seen[p] {
                    seen[p] = true;
                    distinct += 1;
                    if distinct == 1 << s {
                        break;
                    }
                }
            }
            if distinct < 1 << s {
                return Ok(ImplicateSize::Size(s));
            }
        }
    }
    Ok(ImplicateSize::None)
}

/// `k − ⌊log₂(e L)⌋`.
pub fn implicate_lower_bound(k: usize, l: usize) -> i64 {
    k as i64 - (E * l as f64).log2().floor() as i64
}
