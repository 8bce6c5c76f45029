//! Candidate maneuver families and their time evaluation.
//!
//! Four families are searched, in this order:
//!
//! 1. single-speed Dubins at `v_min` (radius `ρ_min`),
//! 2. single-speed Dubins at `v_max` (radius `ρ_max`),
//! 3. mixed Dubins: arcs at `v_min` / `ρ_min`, straights at `v_max`,
//! 4. variable-radius CSC: each arc radius free in `[ρ_min, ρ_max]`, flown at
//!    the speed that makes it the tightest admissible turn, straight at
//!    `v_max`; radii refined by Nelder–Mead from fixed starts.
//!
//! With wind, geometry is built in the air frame toward a virtual goal that
//! moves against the wind, and the total time is the fixed point
//! `τ(goal − w·T) = T`, found by a bracketing scan plus safeguarded secant
//! steps.

use crate::dubins::{dubins_of_type, mod2pi, DubinsType, Pose, Steer};
use crate::maneuver::{Maneuver, Segment};
use crate::vehicle::{VehicleParams, WindVector};

use super::nelder_mead::NelderMead;

/// Starting points for the radius refinement, in normalized `[0, 1]²`.
pub const REFINE_STARTS: [[f64; 2]; 5] = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0], [0.5, 0.5]];
pub const REFINE_STEP: f64 = 0.2;
pub const REFINE_ITERATIONS: usize = 200;
pub const REFINE_TOLERANCE: f64 = 1e-9;
/// Simplex size at convergence, in normalized radius units.
pub const REFINE_X_TOLERANCE: f64 = 1e-6;

pub const ROOT_TOLERANCE: f64 = 1e-10;
pub const ROOT_MAX_ITERATIONS: usize = 200;
/// Accepted residual `|τ(T) − T|` of a wind fixed point.
const ROOT_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    MinSpeedDubins,
    MaxSpeedDubins,
    MixedDubins,
    VariableRadius,
}

/// One member of a family: a word with fixed radii and straight speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub family: Family,
    pub word: DubinsType,
    pub r_first: f64,
    pub r_last: f64,
    pub straight_speed: f64,
}

/// Arc angles and straight length of a CSC word whose two circles may have
/// different radii. Returns `(first angle, straight length, last angle)`.
pub fn csc_geometry(start: &Pose, goal: &Pose, first: Steer, r_first: f64, last: Steer, r_last: f64) -> Option<(f64, f64, f64)> {
    let (s1, s2) = (first.sign(), last.sign());
    let (sin0, cos0) = start.theta.sin_cos();
    let (sin1, cos1) = goal.theta.sin_cos();
    let c1 = (start.x - s1 * r_first * sin0, start.y + s1 * r_first * cos0);
    let c2 = (goal.x - s2 * r_last * sin1, goal.y + s2 * r_last * cos1);
    let (vx, vy) = (c2.0 - c1.0, c2.1 - c1.1);
    let k = s2 * r_last - s1 * r_first;
    let tangent_sq = vx * vx + vy * vy - k * k;
    if tangent_sq < 0.0 {
        return None;
    }
    let straight = tangent_sq.sqrt();
    let phi = vy.atan2(vx) - k.atan2(straight);
    Some((mod2pi(s1 * (phi - start.theta)), straight, mod2pi(s2 * (goal.theta - phi))))
}

/// The model in which candidates are timed.
#[derive(Debug, Clone, Copy)]
pub struct CandidateSolver {
    pub params: VehicleParams,
    pub wind: WindVector,
}

impl CandidateSolver {
    pub fn new(params: VehicleParams, wind: WindVector) -> Self {
        Self { params, wind }
    }

    fn arc_speed(&self, radius: f64) -> f64 {
        self.params.speed_for_radius(radius)
    }

    /// Air-frame segments of `cand` from `start` to `goal`.
    pub fn segments(&self, cand: &Candidate, start: &Pose, goal: &Pose) -> Option<Vec<Segment>> {
        let [a, b, c] = cand.word.steers();
        if cand.family == Family::VariableRadius && cand.word.is_csc() {
            let (t1, len, t3) = csc_geometry(start, goal, a, cand.r_first, c, cand.r_last)?;
            return Some(vec![
                Segment::arc(a, cand.r_first, t1, self.arc_speed(cand.r_first)),
                Segment::straight(len, cand.straight_speed),
                Segment::arc(c, cand.r_last, t3, self.arc_speed(cand.r_last)),
            ]);
        }
        let r = cand.r_first;
        let path = dubins_of_type(start, goal, r, cand.word)?;
        let v_arc = self.arc_speed(r);
        let [m1, m2, m3] = path.segment_params;
        let mid = if b == Steer::Straight { Segment::straight(m2, cand.straight_speed) } else { Segment::arc(b, r, m2, v_arc) };
        Some(vec![Segment::arc(a, r, m1, v_arc), mid, Segment::arc(c, r, m3, v_arc)])
    }

    fn still_air_time(&self, cand: &Candidate, start: &Pose, goal: &Pose) -> Option<f64> {
        self.segments(cand, start, goal).map(|segs| segs.iter().map(Segment::time).sum())
    }

    fn virtual_goal(&self, goal: &Pose, t: f64) -> Pose {
        Pose { x: goal.x - self.wind.wx * t, y: goal.y - self.wind.wy * t, theta: goal.theta }
    }

    /// Total time of `cand` under the current wind, or `None` if the word
    /// cannot connect the poses.
    pub fn time(&self, cand: &Candidate, start: &Pose, goal: &Pose) -> Option<f64> {
        if self.wind.is_calm() {
            return self.still_air_time(cand, start, goal);
        }
        let residual = |t: f64| self.still_air_time(cand, start, &self.virtual_goal(goal, t)).map(|tau| tau - t);
        smallest_fixed_point(residual)
    }

    /// Realized maneuver of `cand`, including wind drift.
    pub fn maneuver(&self, cand: &Candidate, start: &Pose, goal: &Pose) -> Option<Maneuver> {
        let t = self.time(cand, start, goal)?;
        let target = if self.wind.is_calm() { *goal } else { self.virtual_goal(goal, t) };
        let segs = self.segments(cand, start, &target)?;
        Some(Maneuver::new(*start, segs, self.wind))
    }

    pub fn single_speed(&self, family: Family, word: DubinsType) -> Candidate {
        let p = &self.params;
        let (r, v_straight) = match family {
            Family::MinSpeedDubins => (p.rho_min(), p.v_min),
            Family::MaxSpeedDubins => (p.rho_max(), p.v_max),
            Family::MixedDubins | Family::VariableRadius => (p.rho_min(), p.v_max),
        };
        Candidate { family, word, r_first: r, r_last: r, straight_speed: v_straight }
    }

    /// Fastest word of a single-speed family.
    pub fn best_single_speed(&self, family: Family, start: &Pose, goal: &Pose) -> Option<(Candidate, f64)> {
        let mut best: Option<(Candidate, f64)> = None;
        for word in DubinsType::ALL {
            let cand = self.single_speed(family, word);
            if let Some(t) = self.time(&cand, start, goal) {
                if best.is_none_or(|(_, b)| t < b) {
                    best = Some((cand, t));
                }
            }
        }
        best
    }

    /// Radius refinement of one CSC word.
    pub fn refine_variable_radius(&self, word: DubinsType, start: &Pose, goal: &Pose) -> Option<(Candidate, f64)> {
        let p = &self.params;
        let (lo, hi) = (p.rho_min(), p.rho_max());
        if hi <= lo {
            return None;
        }
        let radius = |u: f64| lo + (hi - lo) * u.clamp(0.0, 1.0);
        let make = |u: [f64; 2]| Candidate {
            family: Family::VariableRadius,
            word,
            r_first: radius(u[0]),
            r_last: radius(u[1]),
            straight_speed: p.v_max,
        };
        let objective = |u: [f64; 2]| self.time(&make(u), start, goal).unwrap_or(f64::INFINITY);
        let nm = NelderMead { max_iterations: REFINE_ITERATIONS, tolerance: REFINE_TOLERANCE, x_tolerance: REFINE_X_TOLERANCE };
        let mut best: Option<(Candidate, f64)> = None;
        for s in REFINE_STARTS {
            let step = s.map(|x| if x < 0.5 { REFINE_STEP } else { -REFINE_STEP });
            let m = nm.minimize(objective, s, step);
            if m.value.is_finite() && best.is_none_or(|(_, b)| m.value < b) {
                best = Some((make(m.point), m.value));
            }
        }
        best
    }

    /// Fastest candidate over all families.
    pub fn solve(&self, start: &Pose, goal: &Pose) -> Option<(Candidate, Maneuver)> {
        let mut best: Option<(Candidate, f64)> = None;
        let mut consider = |c: Option<(Candidate, f64)>| {
            if let Some((cand, t)) = c {
                if best.is_none_or(|(_, b)| t < b) {
                    best = Some((cand, t));
                }
            }
        };
        consider(self.best_single_speed(Family::MinSpeedDubins, start, goal));
        consider(self.best_single_speed(Family::MaxSpeedDubins, start, goal));
        consider(self.best_single_speed(Family::MixedDubins, start, goal));
        for word in DubinsType::CSC {
            consider(self.refine_variable_radius(word, start, goal));
        }
        let (cand, _) = best?;
        let m = self.maneuver(&cand, start, goal)?;
        Some((cand, m))
    }
}

/// Smallest `T ≥ 0` with `residual(T) = 0`, where `residual(0) ≥ 0` and the
/// residual eventually turns negative. Sign changes caused by jumps (arc
/// angles wrapping past a full turn) are rejected and scanning continues.
///
/// The scan steps at most `τ0/4` blindly and `τ0/2` when following the
/// secant (both growing past `2·τ0`); it aims
/// just beyond the secant estimate of the root so the bracket handed to the
/// refinement is usually tight.
pub fn smallest_fixed_point<F>(mut residual: F) -> Option<f64>
where
    F: FnMut(f64) -> Option<f64>,
{
    let f0 = residual(0.0)?;
    if f0 <= 0.0 {
        return Some(0.0);
    }
    let scale = f0.max(1e-6);
    let mut lo = (0.0, f0);
    // slope of the residual, a fixed point iteration in still air has -1
    let mut slope = -1.0;
    let mut max_step = 0.25 * scale;
    // start of the current stretch of non-positive samples without a
    // bracket; the residual rarely climbs back after a long one
    let mut below_since = f64::NAN;
    for _ in 0..ROOT_MAX_ITERATIONS {
        if lo.0 > 2.0 * scale {
            max_step *= 1.25;
        }
        let step = if lo.1 > 0.0 && slope < 0.0 {
            let to_root = lo.1 / -slope;
            (1.02 * to_root + 1e-3 * scale).clamp(0.01 * scale, 2.0 * max_step)
        } else {
            max_step
        };
        let t = lo.0 + step;
        if t > 1e3 * scale {
            break;
        }
        let Some(ft) = residual(t) else {
            lo = (t, f64::NAN);
            slope = -1.0;
            continue;
        };
        if ft <= 0.0 && !(lo.1 > 0.0) {
            if below_since.is_nan() {
                below_since = t;
            } else if t - below_since > 3.0 * scale {
                break;
            }
        } else {
            below_since = f64::NAN;
        }
        if ft > 0.0 || !(lo.1 > 0.0) {
            let s = (ft - lo.1) / (t - lo.0);
            slope = if s.is_finite() && s < -1e-3 { s } else { -1.0 };
            lo = (t, ft);
            continue;
        }
        if let Some(root) = refine_root(&mut residual, lo, (t, ft)) {
            return Some(root);
        }
        lo = (t, ft);
        slope = -1.0;
    }
    None
}

/// Secant steps kept inside the bracket `f(a) > 0 ≥ f(b)` (bisecting when a
/// step would leave it), with pure bisection after a few dozen steps.
fn refine_root<F>(residual: &mut F, a: (f64, f64), b: (f64, f64)) -> Option<f64>
where
    F: FnMut(f64) -> Option<f64>,
{
    let accept = |c: f64, fc: f64| (fc.abs() <= ROOT_RESIDUAL * c.max(1.0)).then_some(c);
    if b.1 == 0.0 {
        return Some(b.0);
    }
    let (mut lo, mut hi) = (a.0, b.0);
    let (mut x0, mut x1) = (a, b);
    for iter in 0..ROOT_MAX_ITERATIONS {
        let mut c = x1.0 - x1.1 * (x1.0 - x0.0) / (x1.1 - x0.1);
        if !(c > lo && c < hi) || iter >= 30 {
            c = 0.5 * (lo + hi);
        }
        let fc = residual(c)?;
        if fc.abs() < 1e-13 || (c - x1.0).abs() < 0.1 * ROOT_TOLERANCE {
            return accept(c, fc);
        }
        if fc > 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        if hi - lo < ROOT_TOLERANCE {
            return accept(c, fc);
        }
        x0 = x1;
        x1 = (c, fc);
    }
    let c = 0.5 * (lo + hi);
    let fc = residual(c)?;
    accept(c, fc)
}
