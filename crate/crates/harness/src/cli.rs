//! Command-line interface.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lllforge_apps::ksat::{
    cnf_to_instance, epsilon_bound, implicate_lower_bound, load_dimacs, random_cnf, Cnf,
};
use lllforge_apps::latin::{
    g_value, gamma_root, mark_probability, q_max, reproduce_table, ColorMatrix, TableRow,
};
use lllforge_apps::transversal::{
    alpha_cluster, avoidance_bound, find_avoiding_transversal, psi_bound, BlockGraph,
    DEFAULT_RESTARTS,
};
use lllforge_core::bounds::{
    check_cluster_expansion, shearer_measure, ClusterWeights, DepGraph, MuSource, PermBounds,
};
use lllforge_core::mt::{default_max_steps, ResamplingTable};
use lllforge_core::{AtomicPermEvent, SelectionRule};
use serde::Deserialize;
use serde_json::json;

use crate::error::{read_file, HarnessError, Result};
use crate::estimate::{CutoffPolicy, Level, Runner};
use crate::experiments::{self as ex, Settings};
use crate::report::{Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "lllforge",
    version,
    about = "Local lemma samplers, bounds and Monte Carlo checks"
)]
pub struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "LLLFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo trials per estimate.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Confidence level: 0.95 or 0.99.
    #[arg(long, global = true, default_value = "0.99")]
    pub level: Level,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Resampling budget per run.
    #[arg(long, global = true)]
    pub max_steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Drop non-terminated runs instead of counting them as the event.
    #[arg(long, global = true)]
    pub exclude_cutoffs: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// k-SAT sampling, independence and implicates.
    Ksat {
        #[command(subcommand)]
        cmd: KsatCmd,
    },
    /// Independent transversals.
    Transversal {
        #[command(subcommand)]
        cmd: TransversalCmd,
    },
    /// Latin transversals.
    Latin {
        #[command(subcommand)]
        cmd: LatinCmd,
    },
    /// Closed-form and exact bounds, no sampling.
    Bounds {
        #[command(subcommand)]
        cmd: BoundsCmd,
    },
    /// Run a bound-consistency suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Core,
    Apps,
    All,
}

#[derive(Debug, Args)]
pub struct CnfSource {
    /// DIMACS CNF file.
    #[arg(long, conflicts_with = "random_n")]
    pub dimacs: Option<PathBuf>,
    /// Random regular formula with this many variables.
    #[arg(long, requires_all = ["k", "l"])]
    pub random_n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
}

impl CnfSource {
    fn load(&self, seed: u64) -> Result<Cnf> {
        match (&self.dimacs, self.random_n) {
            (Some(p), _) => Ok(load_dimacs(&read_file(p)?)?),
            (None, Some(n)) => Ok(random_cnf(
                n,
                self.k.unwrap_or(0),
                self.l.unwrap_or(0),
                seed,
            )?),
            (None, None) => Err(HarnessError::InvalidArgument(
                "give --dimacs or --random-n/--k/--l".into(),
            )),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum KsatCmd {
    /// j-wise independence of MT outputs.
    Independence {
        #[command(flatten)]
        src: CnfSource,
        /// Tuple sizes, comma separated.
        #[arg(long = "j", value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        j: Vec<usize>,
    },
    /// One satisfying assignment.
    Solve {
        #[command(flatten)]
        src: CnfSource,
    },
    /// Smallest-implicate checks.
    Implicate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        /// Also check this many random formulas.
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// Variables in the random formulas.
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
}

#[derive(Debug, Args)]
pub struct GraphSource {
    /// JSON file `{"blocks": [[..]], "edges": [[u, v]], "avoid": [..]}`.
    #[arg(long, conflicts_with = "blocks")]
    pub graph: Option<PathBuf>,
    /// Random graph: number of blocks.
    #[arg(long, requires_all = ["b", "delta"])]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub delta: Option<usize>,
    /// Vertices to avoid, comma separated; overrides the file.
    #[arg(long, value_delimiter = ',')]
    pub avoid: Option<Vec<usize>>,
}

impl GraphSource {
    fn load(&self, seed: u64) -> Result<(BlockGraph, Vec<usize>)> {
        let (g, file_avoid) = match (&self.graph, self.blocks) {
            (Some(p), _) => BlockGraph::from_json(&read_file(p)?)?,
            (None, Some(k)) => (
                BlockGraph::random(k, self.b.unwrap_or(0), self.delta.unwrap_or(0), seed)?,
                Vec::new(),
            ),
            (None, None) => {
                return Err(HarnessError::InvalidArgument(
                    "give --graph or --blocks/--b/--delta".into(),
                ))
            }
        };
        let avoid = self.avoid.clone().unwrap_or(file_avoid);
        if let Some(&v) = avoid.iter().find(|&&v| v >= g.num_vertices()) {
            return Err(HarnessError::InvalidArgument(format!(
                "avoid vertex {v} out of range"
            )));
        }
        Ok((g, avoid))
    }
}

#[derive(Debug, Subcommand)]
pub enum TransversalCmd {
    /// Estimate P(T meets L) against the avoidance bound.
    Avoid {
        #[command(flatten)]
        src: GraphSource,
    },
    /// An independent transversal disjoint from L.
    Find {
        #[command(flatten)]
        src: GraphSource,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
    },
}

#[derive(Debug, Args)]
pub struct MatrixSource {
    /// CSV color matrix, one row per line.
    #[arg(long, conflicts_with = "n")]
    pub colors: Option<PathBuf>,
    /// CSV cell weights.
    #[arg(long, requires = "colors")]
    pub weights: Option<PathBuf>,
    /// Random matrix size.
    #[arg(long, requires = "delta")]
    pub n: Option<usize>,
    /// Random matrix color multiplicity.
    #[arg(long)]
    pub delta: Option<usize>,
}

impl MatrixSource {
    fn load(&self, seed: u64) -> Result<ColorMatrix> {
        match (&self.colors, self.n) {
            (Some(p), _) => {
                let m = ColorMatrix::from_csv(&read_file(p)?)?;
                match &self.weights {
                    Some(w) => Ok(m.weights_from_csv(&read_file(w)?)?),
                    None => Ok(m),
                }
            }
            (None, Some(n)) => Ok(ColorMatrix::random_with_multiplicity(
                n,
                self.delta.unwrap_or(0),
                seed,
            )?),
            (None, None) => Err(HarnessError::InvalidArgument(
                "give --colors or --n/--delta".into(),
            )),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum LatinCmd {
    /// g(beta) against the two earlier estimates.
    Table {
        /// `start:stop:step` or a single value.
        #[arg(long, default_value = "0.11:0.25:0.01")]
        beta: String,
    },
    /// Cell frequencies and weight of full transversals.
    Weighted {
        #[command(flatten)]
        src: MatrixSource,
    },
    /// Partial transversals from the marked algorithm.
    Partial {
        #[command(flatten)]
        src: MatrixSource,
        #[arg(long)]
        beta: f64,
        /// Defaults to the maximizer of f.
        #[arg(long)]
        q: Option<f64>,
        /// Allowance for lower-order terms, as a fraction of n.
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
    },
    /// Avoidance of a thinned random cell set.
    Stein {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        y_size: usize,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundsCmd {
    /// epsilon, criterion and implicate bound.
    Ksat {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// alpha, Psi and avoidance bounds.
    Transversal {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        l: usize,
    },
    /// q_max, g, gamma and the mark rate.
    Latin {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Shearer measure and cluster check of a dependency graph JSON
    /// `{"probs": [..], "edges": [[a, b]], "weights": [..]}`.
    Shearer {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Permutation bounds from JSON `{"n": 5, "bad": [[[x, y]]], "target": [[x, y]]}`.
    Perm {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Deserialize)]
struct GraphFile {
    probs: Vec<f64>,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
struct PermFile {
    n: usize,
    bad: Vec<Vec<(usize, usize)>>,
    target: Vec<(usize, usize)>,
    #[serde(default)]
    conditions: Vec<Vec<(usize, usize)>>,
}

/// Parse `start:stop:step` or a single number.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || HarnessError::InvalidArgument(format!("bad range {text:?}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [x] => Ok(vec![*x]),
        [a, b, step] if *step > 0.0 && b >= a => {
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count)
                .map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(bad()),
    }
}

fn atomic(pairs: &[(usize, usize)]) -> Result<AtomicPermEvent> {
    Ok(AtomicPermEvent::new(pairs.to_vec())?)
}

impl Cli {
    fn settings(&self) -> Settings {
        Settings {
            runner: Runner::new(self.trials, self.seed, self.jobs),
            level: self.level,
            policy: if self.exclude_cutoffs {
                CutoffPolicy::Exclude
            } else {
                CutoffPolicy::CountAsEvent
            },
            max_steps: self.max_steps,
        }
    }

    fn report(&self, command: &str) -> Report {
        Report::new(command, self.seed, self.trials, self.level)
    }

    /// Run the command and build its report.
    pub fn execute(&self) -> Result<Report> {
        let s = self.settings();
        let seed = self.seed;
        match &self.command {
            Command::Ksat { cmd } => match cmd {
                KsatCmd::Independence { src, j } => {
                    let cnf = src.load(seed)?;
                    let (sum, checks) = ex::ksat_independence(&cnf, j, &s)?;
                    let mut r = self.report("ksat independence").with_data(&sum)?;
                    r.checks = checks;
                    Ok(r)
                }
                KsatCmd::Solve { src } => {
                    let cnf = src.load(seed)?;
                    let inst = cnf_to_instance(&cnf)?;
                    let steps = self.max_steps.unwrap_or_else(|| {
                        let w = ClusterWeights::uniform(cnf.clauses().len(), 1.0).expect("finite");
                        default_max_steps(&w).max(100_000)
                    });
                    let mut table = ResamplingTable::new(inst.mt.space(), seed);
                    let run = inst.mt.run(&mut table, SelectionRule::LowestIndex, steps);
                    let mut r = self.report("ksat solve").with_data(json!({
                        "terminated": run.terminated,
                        "resamplings": run.steps,
                        "assignment": run.final_assignment.values,
                    }))?;
                    r.checks.push(crate::verdict::Check::zero_failures(
                        "found a satisfying assignment",
                        u64::from(
                            !(run.terminated && cnf.satisfied_by(&run.final_assignment.values)),
                        ),
                    ));
                    Ok(r)
                }
                KsatCmd::Implicate { k, l, random, n } => {
                    let (sum, check) = ex::implicate_construction(*k, *l)?;
                    let mut r = self.report("ksat implicate");
                    r.checks.push(check);
                    let mut data = json!({ "construction": sum });
                    if *random > 0 {
                        let (rs, check) = ex::random_implicates(*n, *k, *l, *random, seed)?;
                        r.checks.push(check);
                        data["random"] = serde_json::to_value(rs)?;
                    }
                    r.with_data(data)
                }
            },
            Command::Transversal { cmd } => match cmd {
                TransversalCmd::Avoid { src } => {
                    let (g, avoid) = src.load(seed)?;
                    let (sum, checks) = ex::transversal_avoidance(&g, &avoid, &s)?;
                    let mut r = self.report("transversal avoid").with_data(&sum)?;
                    r.checks = checks;
                    Ok(r)
                }
                TransversalCmd::Find { src, restarts } => {
                    let (g, avoid) = src.load(seed)?;
                    let (t, runs) = find_avoiding_transversal(&g, &avoid, seed, *restarts)?;
                    self.report("transversal find")
                        .with_data(json!({ "transversal": t.vertices, "runs": runs }))
                }
            },
            Command::Latin { cmd } => match cmd {
                LatinCmd::Table { beta } => {
                    let rows: Vec<TableRow> = reproduce_table(&parse_range(beta)?)?;
                    self.report("latin table")
                        .with_data(&rows)?
                        .with_table(&rows)
                }
                LatinCmd::Weighted { src } => {
                    let m = src.load(seed)?;
                    let (sum, checks) = ex::weighted_latin(&m, &s)?;
                    let mut r = self.report("latin weighted").with_data(&sum)?;
                    r.checks = checks;
                    Ok(r)
                }
                LatinCmd::Partial {
                    src,
                    beta,
                    q,
                    slack,
                } => {
                    let m = src.load(seed)?;
                    let (sum, checks) = ex::partial_latin_runs(&m, *beta, *q, *slack, &s)?;
                    let mut r = self.report("latin partial").with_data(&sum)?;
                    r.checks = checks;
                    Ok(r)
                }
                LatinCmd::Stein { n, y_size, p } => {
                    let (sum, check) = ex::stein(*n, *y_size, *p, &s)?;
                    let mut r = self.report("latin stein").with_data(&sum)?;
                    r.checks.push(check);
                    Ok(r)
                }
            },
            Command::Bounds { cmd } => self.bounds(cmd),
            Command::Verify { suite } => crate::suite::run(*suite, &s).map(|checks| {
                let mut r = self.report("verify");
                r.data = json!({ "suite": format!("{suite:?}").to_lowercase() });
                r.checks = checks;
                r
            }),
        }
    }

    fn bounds(&self, cmd: &BoundsCmd) -> Result<Report> {
        match cmd {
            BoundsCmd::Ksat { k, l } => self.report("bounds ksat").with_data(json!({
                "criterion": lllforge_apps::ksat::symmetric_criterion(*k, *l),
                "epsilon": epsilon_bound(*k, *l).ok(),
                "implicate_lower_bound": implicate_lower_bound(*k, *l),
            })),
            BoundsCmd::Transversal { b, delta, l } => {
                self.report("bounds transversal").with_data(json!({
                    "alpha": alpha_cluster(*b, *delta)?,
                    "psi": psi_bound(*b, *delta, *l)?,
                    "avoidance": avoidance_bound(*b, *delta, *l)?,
                }))
            }
            BoundsCmd::Latin { beta, q, n } => {
                let g = g_value(*beta)?;
                let q = q.unwrap_or(g.q);
                let mut data = json!({
                    "q_max": q_max(*beta)?,
                    "g": g,
                    "q": q,
                    "gamma": gamma_root(*beta, q)?,
                    "f": lllforge_apps::latin::f_value(*beta, q)?,
                });
                if let Some(n) = n {
                    data["r"] = json!(mark_probability(*n, q));
                }
                self.report("bounds latin").with_data(data)
            }
            BoundsCmd::Shearer { graph } => {
                let f: GraphFile = serde_json::from_str(&read_file(graph)?)?;
                let g = DepGraph::new(f.probs.clone(), &f.edges)?;
                let m = shearer_measure(&g)?;
                let mu: Vec<f64> = (0..g.len()).map(|b| m.mu_single(b)).collect();
                let mut data = json!({
                    "satisfied": m.satisfied,
                    "exact": m.exact,
                    "q_empty": m.q_empty,
                    "violation": m.violation,
                    "mu": if m.satisfied { Some(mu) } else { None },
                });
                if let Some(w) = f.weights {
                    let v = check_cluster_expansion(&g, &ClusterWeights::new(w)?)?;
                    data["cluster_expansion"] = json!({
                        "satisfied": v.satisfied,
                        "required": v.per_event.iter().map(|e| e.required).collect::<Vec<_>>(),
                    });
                }
                self.report("bounds shearer").with_data(data)
            }
            BoundsCmd::Perm { file } => {
                let f: PermFile = serde_json::from_str(&read_file(file)?)?;
                let bad = f
                    .bad
                    .iter()
                    .map(|p| atomic(p))
                    .collect::<Result<Vec<_>>>()?;
                let a = atomic(&f.target)?;
                let pb = PermBounds::new(f.n, &bad)?;
                let prime = pb.psi_theta_prime(&a, MuSource::Exact)?;
                let plain = pb.psi_theta(&a, MuSource::Exact)?;
                let mut data = json!({
                    "psi": plain.psi,
                    "theta": plain.theta,
                    "psi_prime": prime.psi,
                    "theta_prime": prime.theta,
                });
                if !f.conditions.is_empty() {
                    let c = f
                        .conditions
                        .iter()
                        .map(|p| atomic(p))
                        .collect::<Result<Vec<_>>>()?;
                    data["nib"] = json!(pb.nib_bound(&a, &c, MuSource::Exact)?);
                }
                self.report("bounds perm").with_data(data)
            }
        }
    }
}

/// Parse, run and report. Returns the process exit code: 0 when every check
/// passes, 1 on a violation, 2 on bad input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli
        .execute()
        .and_then(|r| r.write(cli.format, cli.out.as_deref()).map(|_| r))
    {
        Ok(r) => {
            for c in r.checks.iter().filter(|c| !c.passed()) {
                eprintln!(
                    "violation: {} (value {}, bound {})",
                    c.name, c.value, c.bound
                );
            }
            i32::from(r.violations() > 0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r = parse_range("0.11:0.25:0.01").unwrap();
        assert_eq!(r.len(), 15);
        assert_eq!(r[0], 0.11);
        assert_eq!(r[14], 0.25);
        assert_eq!(parse_range("0.2").unwrap(), vec![0.2]);
        assert!(parse_range("0.3:0.1:0.01").is_err());
        assert!(parse_range("a").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
