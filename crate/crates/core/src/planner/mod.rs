//! Optimal (T*) and bounded-suboptimal lazy (T*ε) search.
//!
//! Both planners run the same Open/Focal engine in [`search`]. T* evaluates
//! every transition class up front and searches with ε = 0. T*ε evaluates a
//! class only when a node reached through it is about to be expanded, and
//! optionally bootstraps the cache along a minimum-speed Dubins grid path.

pub mod lattice;
mod search;

pub use search::{duplicate_action, DuplicateAction, PopRecord, SearchTrace};

use std::sync::Arc;
use std::time::Duration;
use web_time::Instant;

use serde::Serialize;

use crate::bounds::{BoundKind, Heuristic};
use crate::error::{Error, Result};
use crate::gridworld::{Configuration, Scenario, Transition};
use crate::maneuver::Maneuver;
use crate::oracle::{all_classes, OracleMemo, TransitionCache, TransitionOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[serde(rename = "tstar")]
    TStar,
    #[serde(rename = "tstar-eps")]
    TStarEps,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::TStar => "tstar",
            Algorithm::TStarEps => "tstar-eps",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tstar" => Ok(Algorithm::TStar),
            "tstar-eps" => Ok(Algorithm::TStarEps),
            _ => Err(Error::InvalidParams(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlannerOptions {
    /// Bound used for `ĉ` and `h`; `None` picks the default for the wind.
    pub bound: Option<BoundKind>,
    /// Evaluate transitions along the Dubins grid path before searching
    /// (T*ε only).
    pub s1: bool,
    /// Evaluate every transition class before searching. Always on for T*.
    pub precompute: bool,
    /// Shared results from earlier queries with the same settings.
    pub memo: Option<Arc<OracleMemo>>,
    /// Record every pop, for inspection in tests.
    pub trace: bool,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        Self { bound: None, s1: true, precompute: false, memo: None, trace: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanStatus {
    Solved,
    NoSolution,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathStep {
    pub transition: Transition,
    /// World-frame maneuver flown from the source cell center.
    pub maneuver: Maneuver,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PlanStats {
    /// All oracle calls of the query, preprocessing and S1 included.
    pub oracle_calls: usize,
    pub precompute_oracle_calls: usize,
    pub s1_oracle_calls: usize,
    /// Nodes whose successors were generated.
    pub expansions: usize,
    /// Pops that evaluated an incoming transition instead of expanding.
    pub evaluations: usize,
    /// Expansions of a configuration that had been expanded before.
    pub reexpansions: usize,
    pub generated: usize,
    /// Preprocessing time (oracle time of the precompute step).
    pub wall_time_precompute: f64,
    /// Oracle compute time charged to this query.
    pub wall_time_oracle: f64,
    /// Everything else: S1 grid search, queue work, collision checks.
    pub wall_time_search: f64,
    /// Oracle plus search time.
    pub wall_time_total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanResult {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub bound: BoundKind,
    pub status: PlanStatus,
    pub start: Configuration,
    pub path: Vec<PathStep>,
    /// Sum of maneuver times; infinite without a solution.
    pub cost: f64,
    pub stats: PlanStats,
    #[serde(skip)]
    pub trace: Option<SearchTrace>,
}

impl PlanResult {
    pub fn is_solved(&self) -> bool {
        self.status == PlanStatus::Solved
    }

    /// Configurations visited, start first.
    pub fn configurations(&self) -> Vec<Configuration> {
        std::iter::once(self.start).chain(self.path.iter().map(|s| s.transition.to)).collect()
    }
}

/// T*: evaluate all classes, then A* with re-opening.
pub fn plan_tstar(scenario: &Scenario) -> Result<PlanResult> {
    plan_tstar_with(scenario, &PlannerOptions::default())
}

pub fn plan_tstar_with(scenario: &Scenario, options: &PlannerOptions) -> Result<PlanResult> {
    let options = PlannerOptions { s1: false, precompute: true, ..options.clone() };
    run(scenario, Algorithm::TStar, 0.0, &options)
}

/// T*ε with the default options.
pub fn plan_tstar_eps(scenario: &Scenario, epsilon: f64) -> Result<PlanResult> {
    plan_tstar_eps_with(scenario, epsilon, &PlannerOptions::default())
}

pub fn plan_tstar_eps_with(scenario: &Scenario, epsilon: f64, options: &PlannerOptions) -> Result<PlanResult> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParams(format!("epsilon {epsilon} must be finite and non-negative")));
    }
    run(scenario, Algorithm::TStarEps, epsilon, options)
}

/// Evaluates every class; returns the number of oracle calls it took.
pub fn precompute_all(cache: &mut TransitionCache) -> Result<usize> {
    let before = cache.oracle_calls();
    for key in all_classes(cache.oracle().wind()) {
        cache.evaluate(key)?;
    }
    Ok(cache.oracle_calls() - before)
}

fn run(scenario: &Scenario, algorithm: Algorithm, epsilon: f64, options: &PlannerOptions) -> Result<PlanResult> {
    scenario.validate()?;
    let started = Instant::now();
    let mut oracle = TransitionOracle::new(scenario.params, scenario.wind, scenario.map.cell_size)?;
    if let Some(memo) = &options.memo {
        oracle = oracle.with_memo(memo.clone());
    }
    let mut cache = TransitionCache::new(oracle);
    let bound = options.bound.unwrap_or_else(|| BoundKind::default_for(&scenario.wind));
    let mut stats = PlanStats::default();
    let mut oracle_wall = Duration::ZERO;

    if options.precompute {
        let t = Instant::now();
        stats.precompute_oracle_calls = precompute_all(&mut cache)?;
        oracle_wall += t.elapsed();
        stats.wall_time_precompute = cache.oracle_time().as_secs_f64();
    }
    if options.s1 && algorithm == Algorithm::TStarEps {
        if let Some((_, path)) = lattice::dubins_grid_path(&scenario.map, &scenario.start, &scenario.goal, &scenario.params) {
            let before = cache.oracle_calls();
            let t = Instant::now();
            for tr in &path {
                let key = cache.oracle().canonicalize(tr).key;
                cache.evaluate(key)?;
            }
            oracle_wall += t.elapsed();
            stats.s1_oracle_calls = cache.oracle_calls() - before;
        }
    }

    let heuristic = Heuristic::new(&scenario.map, scenario.goal, bound, scenario.params, scenario.wind)?;
    let outcome = search::Search::new(scenario, &mut cache, &heuristic, epsilon, options.trace).run()?;
    oracle_wall += outcome.oracle_wall;

    stats.oracle_calls = cache.oracle_calls();
    stats.expansions = outcome.expansions;
    stats.evaluations = outcome.evaluations;
    stats.reexpansions = outcome.reexpansions;
    stats.generated = outcome.generated;
    let measured = started.elapsed();
    stats.wall_time_search = measured.saturating_sub(oracle_wall).as_secs_f64();
    stats.wall_time_oracle = cache.oracle_time().as_secs_f64();
    stats.wall_time_total = stats.wall_time_search + stats.wall_time_oracle;

    let (status, cost) = match &outcome.path {
        Some(p) => (PlanStatus::Solved, p.iter().map(|s| s.maneuver.total_time).sum()),
        None => (PlanStatus::NoSolution, f64::INFINITY),
    };
    Ok(PlanResult {
        algorithm,
        epsilon,
        bound,
        status,
        start: scenario.start,
        path: outcome.path.unwrap_or_default(),
        cost,
        stats,
        trace: outcome.trace,
    })
}
