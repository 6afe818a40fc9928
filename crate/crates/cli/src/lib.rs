//! Commands behind the `coexist` binary: `run`, `report` and `validate`.

mod plot;
mod report;

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use coexist::engine::{Policy, Scene};
use coexist::experiment::{run_cell, CellSpec};
use coexist::results::{persist_results, Manifest, ResultSet, RunGrid};
use coexist::scenario::{load_scenario, LoadedScenario};
use rayon::prelude::*;

pub use report::{cmd_report, DirectionReport, QuantileRow, Report, ReportSpec, CDF_POINTS, QUANTILE_PS};

/// Environment variable holding the worker-pool size for `run`.
pub const WORKERS_ENV: &str = "COEXIST_WORKERS";

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad scenario, flags or input data: exit 2.
    Input(anyhow::Error),
    /// Filesystem trouble: exit 3.
    Io(anyhow::Error),
    /// An internal invariant broke: exit 4.
    Invariant(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Io(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn from_core(e: coexist::Error) -> Failure {
        match e {
            coexist::Error::Invariant(_) => Failure::Invariant(anyhow!(e)),
            other => Failure::Input(anyhow!(other)),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) | Failure::Io(e) | Failure::Invariant(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for Failure {}

pub type CmdResult<T> = Result<T, Failure>;

/// Which utilizations get sum-rate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum RateSelection {
    All,
    /// Only the largest utilization of the grid.
    Max,
    None,
    List(Vec<f64>),
}

impl std::str::FromStr for RateSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(RateSelection::All),
            "max" => Ok(RateSelection::Max),
            "none" => Ok(RateSelection::None),
            list => parse_f64_list(list).map(RateSelection::List),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scenario: PathBuf,
    pub policies: Vec<Policy>,
    pub seeds: Vec<u64>,
    /// Overrides the scenario's utilization grid.
    pub utilizations: Option<Vec<f64>>,
    pub rates: RateSelection,
    pub out: PathBuf,
    pub workers: usize,
}

/// `1..20` (inclusive), `3`, or `1,4,9`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let bad = |_| format!("invalid seed list \"{s}\" (use 1..20, 7, or 1,4,9)");
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(bad)?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(bad)?;
        if b < a {
            return Err(format!("empty seed range \"{s}\""));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(bad)).collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err("at least one seed is required".into());
    }
    Ok(seeds)
}

pub fn parse_policies(s: &str) -> Result<Vec<Policy>, String> {
    let mut out = Vec::new();
    for p in s.split(',') {
        let p: Policy = p.trim().parse()?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err("at least one policy is required".into());
    }
    Ok(out)
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("\"{x}\" is not a number")))
        .collect()
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn load(path: &Path) -> CmdResult<LoadedScenario> {
    load_scenario(path).map_err(|e| match e {
        coexist::scenario::ScenarioError::Io { .. } => Failure::Io(anyhow!(e)),
        other => Failure::Input(anyhow!(other)),
    })
}

/// Runs the `(seed × utilization)` grid for the requested policies and
/// writes the result set into `spec.out`.
pub fn cmd_run(spec: &RunSpec) -> CmdResult<Manifest> {
    if spec.policies.is_empty() || spec.seeds.is_empty() {
        return Err(Failure::Input(anyhow!("need at least one policy and one seed")));
    }
    let loaded = load(&spec.scenario)?;
    let mut scenario = loaded.scenario.clone();
    if let Some(u) = &spec.utilizations {
        scenario.utilization = u.clone();
        scenario.validate().map_err(|e| Failure::Input(anyhow!(e).context("--utilization")))?;
    }
    let utilizations = scenario.utilization.clone();
    let max = utilizations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rate_utilizations: Vec<f64> = match &spec.rates {
        RateSelection::All => utilizations.clone(),
        RateSelection::Max => vec![max],
        RateSelection::None => Vec::new(),
        RateSelection::List(list) => {
            if let Some(u) = list.iter().find(|u| !utilizations.contains(u)) {
                return Err(Failure::Input(anyhow!("--rate-utilization {u} is not in the utilization grid")));
            }
            utilizations.iter().copied().filter(|u| list.contains(u)).collect()
        }
    };
    let scene = Scene::new(scenario.clone()).map_err(|e| Failure::Input(anyhow!(e).context("building the scene")))?;

    let cells: Vec<CellSpec> = spec
        .seeds
        .iter()
        .flat_map(|&seed| {
            let policies = spec.policies.clone();
            let rate_utilizations = &rate_utilizations;
            utilizations.iter().map(move |&u| CellSpec {
                seed,
                utilization: u,
                policies: policies.clone(),
                rates: rate_utilizations.contains(&u),
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| Failure::Invariant(anyhow!(e).context("starting the worker pool")))?;
    let results = pool
        .install(|| cells.par_iter().map(|c| run_cell(&scene, c)).collect::<Result<Vec<_>, _>>())
        .map_err(Failure::from_core)?;

    let rs = ResultSet {
        scenario,
        scenario_hash: loaded.hash,
        defaults: loaded.defaults,
        grid: RunGrid {
            policies: spec.policies.clone(),
            seeds: spec.seeds.clone(),
            utilizations,
            rate_utilizations,
        },
        cells: results,
    };
    persist_results(&rs, &spec.out)
        .with_context(|| format!("writing results to {}", spec.out.display()))
        .map_err(Failure::Io)
}

/// Loads and validates a scenario; returns the human-readable listing of
/// what was loaded, every filled default and every warning.
pub fn cmd_validate(path: &Path) -> CmdResult<String> {
    let loaded = load(path)?;
    let mut out = format!("{}: ok (sha256 {})\n", path.display(), loaded.hash);
    out.push_str(&loaded.scenario.describe());
    for d in &loaded.defaults {
        out.push_str(&format!("default: {d}\n"));
    }
    for w in &loaded.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    Ok(out)
}
