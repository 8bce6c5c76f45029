//! Batch runs: every scenario under every flight-condition draw, solved by
//! T* for reference and by T*ε for each ε.
//!
//! Runs that share flight conditions and cell size share one oracle memo, so
//! each class is optimized once per batch. Call counts and charged oracle
//! times are per query and do not depend on that sharing, nor on the worker
//! count.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use tstar_core::oracle::OracleMemo;
use tstar_core::planner::{plan_tstar_eps_with, plan_tstar_with, PlanResult, PlannerOptions};
use tstar_core::{BoundKind, Error, Result, Scenario, VehicleParams, WindVector};

/// Flight conditions applied to every scenario of one draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conditions {
    pub v_min: f64,
    pub wind: WindVector,
}

/// `n` draws with `|w|` and `v_min` uniform in their ranges and the wind
/// direction uniform on `[0, 2π)`. A draw whose wind would reach `v_min` is
/// redrawn.
pub fn draw_conditions(seed: u64, n: usize, wind_range: (f64, f64), vmin_range: (f64, f64)) -> Result<Vec<Conditions>> {
    let ok = |r: (f64, f64)| r.0 <= r.1 && r.0 >= 0.0 && r.0.is_finite() && r.1.is_finite();
    if !ok(wind_range) || !ok(vmin_range) || vmin_range.0 <= 0.0 || vmin_range.1 > 1.0 {
        return Err(Error::InvalidParams(format!("bad draw ranges: wind {wind_range:?}, v_min {vmin_range:?}")));
    }
    if wind_range.0 >= vmin_range.1 {
        return Err(Error::InvalidParams("every wind in range is at least v_min".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |r: (f64, f64)| if r.0 == r.1 { r.0 } else { rng.gen_range(r.0..r.1) };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mag = uniform(wind_range);
        let v_min = uniform(vmin_range);
        let dir = uniform((0.0, std::f64::consts::TAU));
        if mag < v_min {
            out.push(Conditions { v_min, wind: WindVector::from_polar(mag, dir) });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub epsilons: Vec<f64>,
    pub bound: Option<BoundKind>,
    /// Run T*ε with the S1 bootstrap, without it, or both.
    pub s1_modes: Vec<bool>,
    /// Condition draws; empty keeps each scenario's own conditions.
    pub draws: Vec<Conditions>,
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { epsilons: vec![0.0, 0.1, 0.3, 0.5, 1.0, 2.0, 3.0], bound: None, s1_modes: vec![true], draws: Vec::new(), jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub scenario_id: String,
    pub draw: usize,
    pub v_min: f64,
    pub wind_x: f64,
    pub wind_y: f64,
    pub algorithm: String,
    pub epsilon: f64,
    pub bound_kind: String,
    pub s1: bool,
    /// `solved`, `no-solution` or `error: ...`.
    pub status: String,
    pub cost: f64,
    pub optimal_cost: f64,
    pub cost_ratio: f64,
    pub oracle_calls: usize,
    pub precompute_oracle_calls: usize,
    pub s1_oracle_calls: usize,
    pub expansions: usize,
    pub reexpansions: usize,
    pub wall_time_total: f64,
    pub wall_time_oracle: f64,
    pub wall_time_search: f64,
    pub wall_time_precompute: f64,
    /// T* time over this run's time, T* preprocessing included.
    pub speedup_with_precompute: f64,
    /// Same with the preprocessing removed from the T* time.
    pub speedup_without_precompute: f64,
}

pub const COLUMNS: [&str; 25] = [
    "row",
    "scenario_id",
    "draw",
    "v_min",
    "wind_x",
    "wind_y",
    "algorithm",
    "epsilon",
    "bound_kind",
    "s1",
    "status",
    "cost",
    "optimal_cost",
    "cost_ratio",
    "oracle_calls",
    "precompute_oracle_calls",
    "s1_oracle_calls",
    "expansions",
    "reexpansions",
    "wall_time_total",
    "wall_time_oracle",
    "wall_time_search",
    "wall_time_precompute",
    "speedup_with_precompute",
    "speedup_without_precompute",
];

/// Columns that depend on the machine and the run, not on the inputs.
pub fn is_timing_column(name: &str) -> bool {
    name.starts_with("wall_time") || name.starts_with("speedup")
}

impl BenchRecord {
    pub fn is_solved(&self) -> bool {
        self.status == "solved"
    }
}

/// Mean and two-sigma band of one (algorithm, ε, S1) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub algorithm: String,
    pub epsilon: f64,
    pub bound_kind: String,
    pub s1: bool,
    pub runs: usize,
    pub solved: usize,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

/// Numeric columns aggregated per group, in [`COLUMNS`] order.
const AGGREGATED: [&str; 14] = [
    "cost",
    "optimal_cost",
    "cost_ratio",
    "oracle_calls",
    "precompute_oracle_calls",
    "s1_oracle_calls",
    "expansions",
    "reexpansions",
    "wall_time_total",
    "wall_time_oracle",
    "wall_time_search",
    "wall_time_precompute",
    "speedup_with_precompute",
    "speedup_without_precompute",
];

fn numeric(r: &BenchRecord, col: &str) -> f64 {
    match col {
        "cost" => r.cost,
        "optimal_cost" => r.optimal_cost,
        "cost_ratio" => r.cost_ratio,
        "oracle_calls" => r.oracle_calls as f64,
        "precompute_oracle_calls" => r.precompute_oracle_calls as f64,
        "s1_oracle_calls" => r.s1_oracle_calls as f64,
        "expansions" => r.expansions as f64,
        "reexpansions" => r.reexpansions as f64,
        "wall_time_total" => r.wall_time_total,
        "wall_time_oracle" => r.wall_time_oracle,
        "wall_time_search" => r.wall_time_search,
        "wall_time_precompute" => r.wall_time_precompute,
        "speedup_with_precompute" => r.speedup_with_precompute,
        "speedup_without_precompute" => r.speedup_without_precompute,
        _ => unreachable!("not aggregated: {col}"),
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    /// Groups in order of first appearance. Only solved runs enter the
    /// statistics.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut order: Vec<(String, u64, String, bool)> = Vec::new();
        let mut groups: HashMap<(String, u64, String, bool), Vec<&BenchRecord>> = HashMap::new();
        for r in &self.records {
            let key = (r.algorithm.clone(), r.epsilon.to_bits(), r.bound_kind.clone(), r.s1);
            groups
                .entry(key.clone())
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(r);
        }
        order
            .into_iter()
            .map(|key| {
                let rs = &groups[&key];
                let solved: Vec<&&BenchRecord> = rs.iter().filter(|r| r.is_solved()).collect();
                let (mean, sd) = AGGREGATED
                    .iter()
                    .map(|c| {
                        let xs: Vec<f64> = solved.iter().map(|r| numeric(r, c)).filter(|x| x.is_finite()).collect();
                        mean_sd(&xs)
                    })
                    .unzip();
                Aggregate {
                    algorithm: key.0,
                    epsilon: f64::from_bits(key.1),
                    bound_kind: key.2,
                    s1: key.3,
                    runs: rs.len(),
                    solved: solved.len(),
                    mean,
                    sd,
                }
            })
            .collect()
    }

    /// Mean of a numeric column over the solved runs of one group.
    pub fn mean(&self, algorithm: &str, epsilon: f64, s1: bool, column: &str) -> Option<f64> {
        self.aggregates()
            .into_iter()
            .find(|a| a.algorithm == algorithm && a.epsilon == epsilon && (a.s1 == s1 || algorithm == "tstar"))
            .and_then(|a| AGGREGATED.iter().position(|c| *c == column).map(|i| a.mean[i]))
    }

    /// Runs plus `mean`, `mean-2sd` and `mean+2sd` rows per group.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(COLUMNS).map_err(csv_err)?;
        for r in &self.records {
            w.write_record(record_row("run", r)).map_err(csv_err)?;
        }
        for a in self.aggregates() {
            for (label, k) in [("mean", 0.0), ("mean-2sd", -2.0), ("mean+2sd", 2.0)] {
                let values: Vec<f64> = a.mean.iter().zip(&a.sd).map(|(m, s)| m + k * s).collect();
                w.write_record(aggregate_row(label, &a, &values)).map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        // Rust float formatting is locale independent and round-trips
        format!("{x}")
    }
}

fn record_row(label: &str, r: &BenchRecord) -> Vec<String> {
    vec![
        label.into(),
        r.scenario_id.clone(),
        r.draw.to_string(),
        num(r.v_min),
        num(r.wind_x),
        num(r.wind_y),
        r.algorithm.clone(),
        num(r.epsilon),
        r.bound_kind.clone(),
        r.s1.to_string(),
        r.status.clone(),
        num(r.cost),
        num(r.optimal_cost),
        num(r.cost_ratio),
        r.oracle_calls.to_string(),
        r.precompute_oracle_calls.to_string(),
        r.s1_oracle_calls.to_string(),
        r.expansions.to_string(),
        r.reexpansions.to_string(),
        num(r.wall_time_total),
        num(r.wall_time_oracle),
        num(r.wall_time_search),
        num(r.wall_time_precompute),
        num(r.speedup_with_precompute),
        num(r.speedup_without_precompute),
    ]
}

fn aggregate_row(label: &str, a: &Aggregate, values: &[f64]) -> Vec<String> {
    let mut row = vec![
        label.to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        a.algorithm.clone(),
        num(a.epsilon),
        a.bound_kind.clone(),
        a.s1.to_string(),
        format!("{}/{} solved", a.solved, a.runs),
    ];
    row.extend(values.iter().map(|&v| num(v)));
    row
}

type MemoKey = [u64; 6];

fn memo_key(s: &Scenario) -> MemoKey {
    [
        s.params.v_min.to_bits(),
        s.params.v_max.to_bits(),
        s.params.k.to_bits(),
        s.wind.wx.to_bits(),
        s.wind.wy.to_bits(),
        s.map.cell_size.to_bits(),
    ]
}

struct Memos(Mutex<HashMap<MemoKey, Arc<OracleMemo>>>);

impl Memos {
    fn for_scenario(&self, s: &Scenario) -> Result<Arc<OracleMemo>> {
        let mut m = self.0.lock().expect("memo table");
        if let Some(memo) = m.get(&memo_key(s)) {
            return Ok(memo.clone());
        }
        let oracle = tstar_core::oracle::TransitionOracle::new(s.params, s.wind, s.map.cell_size)?;
        let memo = Arc::new(OracleMemo::new(*oracle.settings()));
        m.insert(memo_key(s), memo.clone());
        Ok(memo)
    }
}

fn record(id: &str, draw: usize, s: &Scenario, r: &PlanResult, s1: bool, reference: Option<&PlanResult>) -> BenchRecord {
    let (optimal_cost, t_full, t_pre) = match reference {
        Some(opt) => (opt.cost, opt.stats.wall_time_total, opt.stats.wall_time_precompute),
        None => (r.cost, r.stats.wall_time_total, r.stats.wall_time_precompute),
    };
    let total = r.stats.wall_time_total;
    let solved = r.is_solved() && optimal_cost.is_finite();
    BenchRecord {
        scenario_id: id.to_string(),
        draw,
        v_min: s.params.v_min,
        wind_x: s.wind.wx,
        wind_y: s.wind.wy,
        algorithm: r.algorithm.name().to_string(),
        epsilon: r.epsilon,
        bound_kind: r.bound.name().to_string(),
        s1,
        status: if r.is_solved() { "solved" } else { "no-solution" }.to_string(),
        cost: r.cost,
        optimal_cost,
        cost_ratio: if solved { r.cost / optimal_cost } else { f64::NAN },
        oracle_calls: r.stats.oracle_calls,
        precompute_oracle_calls: r.stats.precompute_oracle_calls,
        s1_oracle_calls: r.stats.s1_oracle_calls,
        expansions: r.stats.expansions,
        reexpansions: r.stats.reexpansions,
        wall_time_total: total,
        wall_time_oracle: r.stats.wall_time_oracle,
        wall_time_search: r.stats.wall_time_search,
        wall_time_precompute: r.stats.wall_time_precompute,
        speedup_with_precompute: t_full / total,
        speedup_without_precompute: (t_full - t_pre) / total,
    }
}

fn error_record(id: &str, draw: usize, s: &Scenario, algorithm: &str, epsilon: f64, s1: bool, e: &Error) -> BenchRecord {
    BenchRecord {
        scenario_id: id.to_string(),
        draw,
        v_min: s.params.v_min,
        wind_x: s.wind.wx,
        wind_y: s.wind.wy,
        algorithm: algorithm.to_string(),
        epsilon,
        bound_kind: String::new(),
        s1,
        status: format!("error: {e}"),
        cost: f64::NAN,
        optimal_cost: f64::NAN,
        cost_ratio: f64::NAN,
        oracle_calls: 0,
        precompute_oracle_calls: 0,
        s1_oracle_calls: 0,
        expansions: 0,
        reexpansions: 0,
        wall_time_total: f64::NAN,
        wall_time_oracle: f64::NAN,
        wall_time_search: f64::NAN,
        wall_time_precompute: f64::NAN,
        speedup_with_precompute: f64::NAN,
        speedup_without_precompute: f64::NAN,
    }
}

fn run_one(id: &str, draw: usize, s: &Scenario, cfg: &BenchConfig, memos: &Memos) -> Vec<BenchRecord> {
    let mut out = Vec::new();
    let memo = match memos.for_scenario(s) {
        Ok(m) => m,
        Err(e) => return vec![error_record(id, draw, s, "tstar", 0.0, false, &e)],
    };
    let base = PlannerOptions { bound: cfg.bound, memo: Some(memo), ..Default::default() };
    let reference = match plan_tstar_with(s, &base) {
        Ok(r) => {
            out.push(record(id, draw, s, &r, false, None));
            Some(r)
        }
        Err(e) => {
            out.push(error_record(id, draw, s, "tstar", 0.0, false, &e));
            None
        }
    };
    for &s1 in &cfg.s1_modes {
        for &eps in &cfg.epsilons {
            let opts = PlannerOptions { s1, ..base.clone() };
            match plan_tstar_eps_with(s, eps, &opts) {
                Ok(r) => out.push(record(id, draw, s, &r, s1, reference.as_ref())),
                Err(e) => out.push(error_record(id, draw, s, "tstar-eps", eps, s1, &e)),
            }
        }
    }
    out
}

/// Runs the whole batch; per-run failures become `error` rows.
pub fn run_bench(scenarios: &[(String, Scenario)], cfg: &BenchConfig) -> Result<BenchReport> {
    for &eps in &cfg.epsilons {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParams(format!("epsilon {eps} must be finite and non-negative")));
        }
    }
    let mut units: Vec<(usize, &str, Scenario)> = Vec::new();
    if cfg.draws.is_empty() {
        units.extend(scenarios.iter().map(|(id, s)| (0, id.as_str(), s.clone())));
    } else {
        for (d, c) in cfg.draws.iter().enumerate() {
            for (id, s) in scenarios {
                let params = VehicleParams::new(c.v_min, s.params.v_max, s.params.k)?;
                units.push((d, id.as_str(), s.with_conditions(params, c.wind)?));
            }
        }
    }
    let memos = Memos(Mutex::new(HashMap::new()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.max(1)).build().map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let per_unit: Vec<Vec<BenchRecord>> = pool.install(|| units.par_iter().map(|(d, id, s)| run_one(id, *d, s, cfg, &memos)).collect());
    Ok(BenchReport { records: per_unit.into_iter().flatten().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_in_range() {
        let a = draw_conditions(3, 10, (0.14, 0.41), (0.4, 0.9)).unwrap();
        assert_eq!(a, draw_conditions(3, 10, (0.14, 0.41), (0.4, 0.9)).unwrap());
        for c in &a {
            let m = c.wind.magnitude();
            assert!((0.14 - 1e-12..0.41).contains(&m) && m < c.v_min);
            assert!((0.4..0.9).contains(&c.v_min));
        }
        assert_ne!(a, draw_conditions(4, 10, (0.14, 0.41), (0.4, 0.9)).unwrap());
    }

    #[test]
    fn rejects_hopeless_ranges() {
        assert!(draw_conditions(0, 1, (0.5, 0.6), (0.3, 0.4)).is_err());
        assert!(draw_conditions(0, 1, (0.2, 0.1), (0.4, 0.9)).is_err());
    }

    #[test]
    fn band_statistics() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        assert!(mean_sd(&[]).0.is_nan());
    }

    #[test]
    fn empty_batch_has_header_only() {
        let r = run_bench(&[], &BenchConfig::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), COLUMNS.join(",") + "\n");
    }
}
