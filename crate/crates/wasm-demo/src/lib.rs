//! Browser bindings. Each exported function is one button on the demo page;
//! the page itself lives in `www/`.

use tstar_core::bounds::lower_bound;
use tstar_core::gridworld::{generate_scenario, Configuration, Transition};
use tstar_core::oracle::TransitionOracle;
use tstar_core::planner::{plan_tstar, plan_tstar_eps};
use tstar_core::render::{render_maneuver_svg, render_svg};
use tstar_core::{BoundKind, VehicleParams, WindVector};
use wasm_bindgen::prelude::*;

fn js_err(e: tstar_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct PlanOutput {
    svg: String,
    solved: bool,
    cost: f64,
    optimal_cost: f64,
    oracle_calls: usize,
    optimal_oracle_calls: usize,
    expansions: usize,
}

#[wasm_bindgen]
impl PlanOutput {
    #[wasm_bindgen(getter)]
    pub fn svg(&self) -> String {
        self.svg.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn solved(&self) -> bool {
        self.solved
    }
    #[wasm_bindgen(getter)]
    pub fn cost(&self) -> f64 {
        self.cost
    }
    #[wasm_bindgen(getter)]
    pub fn optimal_cost(&self) -> f64 {
        self.optimal_cost
    }
    #[wasm_bindgen(getter)]
    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls
    }
    #[wasm_bindgen(getter)]
    pub fn optimal_oracle_calls(&self) -> usize {
        self.optimal_oracle_calls
    }
    #[wasm_bindgen(getter)]
    pub fn expansions(&self) -> usize {
        self.expansions
    }
}

/// Random scenario solved by T*ε, with T* alongside for comparison.
#[wasm_bindgen]
pub fn plan_random(
    seed: u64,
    size: usize,
    p_block: f64,
    epsilon: f64,
    v_min: f64,
    wind_x: f64,
    wind_y: f64,
) -> Result<PlanOutput, JsError> {
    let s = generate_scenario(seed, size, size, p_block).map_err(js_err)?;
    let params = VehicleParams::with_v_min(v_min).map_err(js_err)?;
    let s = s.with_conditions(params, WindVector::new(wind_x, wind_y)).map_err(js_err)?;
    let lazy = plan_tstar_eps(&s, epsilon).map_err(js_err)?;
    let opt = plan_tstar(&s).map_err(js_err)?;
    Ok(PlanOutput {
        svg: render_svg(&s, Some(&lazy)),
        solved: lazy.is_solved(),
        cost: lazy.cost,
        optimal_cost: opt.cost,
        oracle_calls: lazy.stats.oracle_calls,
        optimal_oracle_calls: opt.stats.oracle_calls,
        expansions: lazy.stats.expansions,
    })
}

#[wasm_bindgen]
pub struct ManeuverOutput {
    svg: String,
    cost: f64,
    family: String,
    min_speed_time: f64,
    max_speed_time: f64,
    lower_bound: f64,
}

#[wasm_bindgen]
impl ManeuverOutput {
    #[wasm_bindgen(getter)]
    pub fn svg(&self) -> String {
        self.svg.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn cost(&self) -> f64 {
        self.cost
    }
    #[wasm_bindgen(getter)]
    pub fn family(&self) -> String {
        self.family.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn min_speed_time(&self) -> f64 {
        self.min_speed_time
    }
    /// NaN when no max-speed Dubins path exists.
    #[wasm_bindgen(getter)]
    pub fn max_speed_time(&self) -> f64 {
        self.max_speed_time
    }
    #[wasm_bindgen(getter)]
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }
}

/// The optimized maneuver of one transition from the cell at the origin to
/// neighbor `(dx, dy)`.
#[wasm_bindgen]
pub fn transition_maneuver(
    dx: i32,
    dy: i32,
    h_from: u8,
    h_to: u8,
    v_min: f64,
    wind_x: f64,
    wind_y: f64,
) -> Result<ManeuverOutput, JsError> {
    if dx.abs() > 1 || dy.abs() > 1 || (dx, dy) == (0, 0) || h_from > 7 || h_to > 7 {
        return Err(JsError::new("need a neighbor offset in -1..=1 and headings 0..=7"));
    }
    let params = VehicleParams::with_v_min(v_min).map_err(js_err)?;
    let wind = WindVector::new(wind_x, wind_y);
    let oracle = TransitionOracle::new(params, wind, 1.0).map_err(js_err)?;
    // draw on a 3x3 grid, starting in the middle cell
    let t = Transition::new(Configuration::new(1, 1, h_from), Configuration::new(1 + dx, 1 + dy, h_to));
    let eval = oracle.evaluate_class(oracle.canonicalize(&t).key).map_err(js_err)?;
    let m = oracle.realize(&t, &eval, tstar_core::dubins::Pose::new(1.5, 1.5, 0.0));
    let (lo, hi) = oracle.baseline_times(&t);
    let (a, b) = oracle.local_poses(&t);
    let lb = lower_bound(&a, &b, BoundKind::default_for(&wind), &params, &wind).map_err(js_err)?;
    Ok(ManeuverOutput {
        svg: render_maneuver_svg(&m, &params, 3, 1.0),
        cost: eval.cost,
        family: format!("{:?}", eval.family),
        min_speed_time: lo.unwrap_or(f64::NAN),
        max_speed_time: hi.unwrap_or(f64::NAN),
        lower_bound: lb,
    })
}

/// Values per row of [`bound_quality`].
pub const QUALITY_ROW: usize = 10;

/// LB/c over a sample of transitions for wind magnitudes from zero to
/// `max_fraction·v_min` in `steps` steps. Each row is `|w|` followed by
/// `[mean, p20, p80]` for euclid, lb1 and lb2, flattened into ten values.
#[wasm_bindgen]
pub fn bound_quality(v_min: f64, direction: f64, max_fraction: f64, steps: usize, stride: usize) -> Result<Vec<f64>, JsError> {
    if !(0.0..1.0).contains(&max_fraction) || steps < 2 || stride == 0 {
        return Err(JsError::new("need 0 <= max_fraction < 1, steps >= 2 and stride >= 1"));
    }
    let params = VehicleParams::with_v_min(v_min).map_err(js_err)?;
    let sample: Vec<Transition> = Transition::all_local().into_iter().step_by(stride).collect();
    let mut out = Vec::with_capacity(steps * QUALITY_ROW);
    for i in 0..steps {
        let mag = max_fraction * v_min * i as f64 / (steps - 1) as f64;
        let wind = WindVector::from_polar(mag, direction);
        let oracle = TransitionOracle::new(params, wind, 1.0).map_err(js_err)?;
        let mut ratios: [Vec<f64>; 3] = Default::default();
        for t in &sample {
            let (c, _) = oracle.true_cost(t).map_err(js_err)?;
            let (a, b) = oracle.local_poses(t);
            for (k, kind) in [BoundKind::Euclidean, BoundKind::WindLb1, BoundKind::WindLb2].into_iter().enumerate() {
                ratios[k].push(lower_bound(&a, &b, kind, &params, &wind).map_err(js_err)? / c);
            }
        }
        out.push(mag);
        for r in &mut ratios {
            r.sort_by(f64::total_cmp);
            out.push(r.iter().sum::<f64>() / r.len() as f64);
            out.push(percentile(r, 0.2));
            out.push(percentile(r, 0.8));
        }
    }
    Ok(out)
}

/// Linear interpolation between closest ranks of a sorted, non-empty slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
