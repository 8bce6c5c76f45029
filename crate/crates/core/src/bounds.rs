//! Cheap admissible estimates of transition cost (`ĉ`) and of cost-to-go (`h`).
//!
//! Every kind is a valid lower bound on the flight time between two poses
//! under the wind model of the oracle. In still air the kinds reduce to the
//! textbook forms: Euclidean distance over `v_max`, and the length of the
//! minimum-speed Dubins path over `v_max`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dubins::{dubins_length, Pose};
use crate::error::{Error, Result};
use crate::gridworld::{Configuration, GridMap, Transition};
use crate::planner::lattice;
use crate::vehicle::{VehicleParams, WindVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Straight-line distance over the fastest possible ground speed.
    #[serde(rename = "euclid")]
    Euclidean,
    /// Minimum-radius Dubins length over the fastest possible ground speed.
    #[serde(rename = "dubins")]
    DubinsMin,
    /// Lattice shortest path of per-transition Dubins bounds, to the goal.
    #[serde(rename = "dubins-obstacle")]
    DubinsMinObstacleAware,
    #[serde(rename = "wind-lb1")]
    WindLb1,
    #[serde(rename = "wind-lb2")]
    WindLb2,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] =
        [BoundKind::Euclidean, BoundKind::DubinsMin, BoundKind::DubinsMinObstacleAware, BoundKind::WindLb1, BoundKind::WindLb2];

    /// `dubins` in still air, `wind-lb2` otherwise.
    pub fn default_for(wind: &WindVector) -> Self {
        if wind.is_calm() {
            BoundKind::DubinsMin
        } else {
            BoundKind::WindLb2
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Euclidean => "euclid",
            BoundKind::DubinsMin => "dubins",
            BoundKind::DubinsMinObstacleAware => "dubins-obstacle",
            BoundKind::WindLb1 => "wind-lb1",
            BoundKind::WindLb2 => "wind-lb2",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::InvalidParams(format!("unknown bound kind {s:?}")))
    }
}

/// Ground speed along unit direction `d` when flying at `v_max` in wind `w`
/// (cosine rule on the wind triangle).
pub fn ground_speed(d: (f64, f64), wind: &WindVector, v_max: f64) -> f64 {
    let dw = d.0 * wind.wx + d.1 * wind.wy;
    let w2 = wind.wx * wind.wx + wind.wy * wind.wy;
    dw + (dw * dw + v_max * v_max - w2).sqrt()
}

/// Turning radius used by the wind bounds, `(1 − |w|/v_min)·ρ_min`.
pub fn rho_lb(params: &VehicleParams, wind: &WindVector) -> f64 {
    (1.0 - wind.magnitude() / params.v_min) * params.rho_min()
}

/// Lower bound on the time to fly from `s1` to `s2`.
///
/// The obstacle-aware kind only differs from [`BoundKind::DubinsMin`] as a
/// cost-to-go (see [`Heuristic`]); between two poses it is the same value.
pub fn lower_bound(s1: &Pose, s2: &Pose, kind: BoundKind, params: &VehicleParams, wind: &WindVector) -> Result<f64> {
    wind.check_against(params)?;
    let dist = s1.distance(s2);
    if dist == 0.0 && s1.heading_error(s2) == 0.0 {
        return Ok(0.0);
    }
    let fastest = params.v_max + wind.magnitude();
    let radius = rho_lb(params, wind);
    Ok(match kind {
        BoundKind::Euclidean => dist / fastest,
        BoundKind::DubinsMin | BoundKind::DubinsMinObstacleAware | BoundKind::WindLb1 => dubins_length(s1, s2, radius) / fastest,
        BoundKind::WindLb2 => {
            let len = dubins_length(s1, s2, radius);
            if dist == 0.0 || wind.is_calm() {
                len / fastest
            } else {
                let d = ((s2.x - s1.x) / dist, (s2.y - s1.y) / dist);
                len / ground_speed(d, wind, params.v_max)
            }
        }
    })
}

/// Per-query bound evaluator: `ĉ` for transitions and `h` toward one goal.
#[derive(Debug, Clone)]
pub struct Heuristic {
    kind: BoundKind,
    params: VehicleParams,
    wind: WindVector,
    cell_size: f64,
    goal: Configuration,
    goal_pose: Pose,
    /// Transition bounds of the 512 local transitions, by local index.
    local: Vec<f64>,
    /// Obstacle-aware cost-to-go per configuration index.
    table: Option<Vec<f64>>,
    width: usize,
}

impl Heuristic {
    pub fn new(map: &GridMap, goal: Configuration, kind: BoundKind, params: VehicleParams, wind: WindVector) -> Result<Self> {
        wind.check_against(&params)?;
        let cell_size = map.cell_size;
        let mut local = vec![0.0; 512];
        for t in Transition::all_local() {
            let (a, b) = local_poses(&t, cell_size);
            local[local_index(&t)] = lower_bound(&a, &b, kind, &params, &wind)?;
        }
        let mut h = Self { kind, params, wind, cell_size, goal, goal_pose: map.pose_of(&goal), local, table: None, width: map.width };
        if kind == BoundKind::DubinsMinObstacleAware {
            let table = lattice::reverse_distances(map, &goal, |t| Some(h.transition_bound(t)));
            h.table = Some(table);
        }
        Ok(h)
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn goal(&self) -> Configuration {
        self.goal
    }

    /// `ĉ(t)`.
    pub fn transition_bound(&self, t: &Transition) -> f64 {
        self.local[local_index(t)]
    }

    /// `h(c)`; infinite when the goal cannot be reached through free cells.
    pub fn to_goal(&self, c: &Configuration) -> f64 {
        if *c == self.goal {
            return 0.0;
        }
        if let Some(table) = &self.table {
            let idx = (c.cy as usize * self.width + c.cx as usize) * 8 + c.h as usize;
            return table[idx];
        }
        let pose = Pose::new(
            (f64::from(c.cx) + 0.5) * self.cell_size,
            (f64::from(c.cy) + 0.5) * self.cell_size,
            crate::gridworld::heading_angle(c.h),
        );
        lower_bound(&pose, &self.goal_pose, self.kind, &self.params, &self.wind).expect("wind checked at construction")
    }
}

fn local_poses(t: &Transition, cell_size: f64) -> (Pose, Pose) {
    let (dx, dy) = t.delta();
    (
        Pose::new(0.0, 0.0, crate::gridworld::heading_angle(t.from.h)),
        Pose::new(f64::from(dx) * cell_size, f64::from(dy) * cell_size, crate::gridworld::heading_angle(t.to.h)),
    )
}

/// Index of a transition among the 512 translation classes.
pub fn local_index(t: &Transition) -> usize {
    usize::from(t.direction()) * 64 + usize::from(t.from.h) * 8 + usize::from(t.to.h)
}

/// Heuristic to the goal as a free function of configurations.
pub fn heuristic_to_goal(
    map: &GridMap,
    s: &Configuration,
    goal: &Configuration,
    params: VehicleParams,
    wind: WindVector,
    kind: BoundKind,
) -> Result<f64> {
    Ok(Heuristic::new(map, *goal, kind, params, wind)?.to_goal(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn params() -> VehicleParams {
        VehicleParams::new(0.5, 1.0, 1.0).unwrap()
    }

    #[test]
    fn identical_poses_cost_nothing() {
        let p = Pose::new(1.0, 2.0, 0.3);
        for kind in BoundKind::ALL {
            assert_eq!(lower_bound(&p, &p, kind, &params(), &WindVector::new(0.1, 0.2)).unwrap(), 0.0);
        }
    }

    #[test]
    fn wind_bounds_reduce_to_dubins_in_still_air() {
        let a = Pose::new(0.0, 0.0, 0.4);
        let b = Pose::new(2.0, -1.0, 2.0);
        let d = lower_bound(&a, &b, BoundKind::DubinsMin, &params(), &WindVector::CALM).unwrap();
        assert_eq!(lower_bound(&a, &b, BoundKind::WindLb1, &params(), &WindVector::CALM).unwrap(), d);
        assert_eq!(lower_bound(&a, &b, BoundKind::WindLb2, &params(), &WindVector::CALM).unwrap(), d);
        assert_eq!(d, dubins_length(&a, &b, 0.25));
    }

    #[test]
    fn downwind_straight() {
        let w = WindVector::new(0.3, 0.0);
        let a = Pose::new(0.0, 0.0, 0.0);
        let b = Pose::new(5.0, 0.0, 0.0);
        assert_abs_diff_eq!(rho_lb(&params(), &w), 0.4 * 0.25, epsilon = 1e-15);
        let lb1 = lower_bound(&a, &b, BoundKind::WindLb1, &params(), &w).unwrap();
        let lb2 = lower_bound(&a, &b, BoundKind::WindLb2, &params(), &w).unwrap();
        assert_abs_diff_eq!(lb1, 5.0 / 1.3, epsilon = 1e-12);
        assert_abs_diff_eq!(lb2, 5.0 / 1.3, epsilon = 1e-12);
    }

    #[test]
    fn ground_speed_examples() {
        assert_eq!(ground_speed((1.0, 0.0), &WindVector::CALM, 1.0), 1.0);
        assert_abs_diff_eq!(ground_speed((1.0, 0.0), &WindVector::new(0.3, 0.0), 1.0), 1.3, epsilon = 1e-12);
        assert_abs_diff_eq!(ground_speed((-1.0, 0.0), &WindVector::new(0.3, 0.0), 1.0), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn strong_wind_rejected() {
        let a = Pose::new(0.0, 0.0, 0.0);
        assert!(lower_bound(&a, &a, BoundKind::WindLb2, &params(), &WindVector::new(0.6, 0.0)).is_err());
    }

    #[test]
    fn straight_ahead_heuristic() {
        let map = GridMap::empty(4, 3);
        let goal = Configuration::new(2, 1, 0);
        let h = heuristic_to_goal(&map, &Configuration::new(1, 1, 0), &goal, params(), WindVector::CALM, BoundKind::DubinsMin).unwrap();
        assert_abs_diff_eq!(h, 1.0, epsilon = 1e-12);
        assert_eq!(heuristic_to_goal(&map, &goal, &goal, params(), WindVector::CALM, BoundKind::DubinsMin).unwrap(), 0.0);
    }

    #[test]
    fn obstacle_table_dominates_dubins() {
        let mut map = GridMap::empty(7, 7);
        for cy in 0..6 {
            map.set_blocked(3, cy, true);
        }
        let goal = Configuration::new(5, 1, 2);
        let d = Heuristic::new(&map, goal, BoundKind::DubinsMin, params(), WindVector::CALM).unwrap();
        let o = Heuristic::new(&map, goal, BoundKind::DubinsMinObstacleAware, params(), WindVector::CALM).unwrap();
        let mut strictly = 0;
        for c in map.configurations().filter(|c| map.is_free(c.cx, c.cy)) {
            assert!(o.to_goal(&c) >= d.to_goal(&c) - 1e-9, "{c}");
            if o.to_goal(&c) > d.to_goal(&c) + 1.0 {
                strictly += 1;
            }
        }
        assert!(strictly > 0, "the wall should lengthen some detours");
    }

    #[test]
    fn parse_names() {
        for k in BoundKind::ALL {
            assert_eq!(k.name().parse::<BoundKind>().unwrap(), k);
        }
        assert!("manhattan".parse::<BoundKind>().is_err());
    }

    proptest! {
        #[test]
        fn ordering_between_kinds(
            x in -3.0..3.0f64, y in -3.0..3.0f64, th0 in 0.0..TAU, th1 in 0.0..TAU,
            wmag in 0.0..0.45f64, wdir in 0.0..TAU,
        ) {
            let w = WindVector::from_polar(wmag, wdir);
            let a = Pose::new(0.0, 0.0, th0);
            let b = Pose::new(x, y, th1);
            let p = params();
            let e = lower_bound(&a, &b, BoundKind::Euclidean, &p, &w).unwrap();
            let d = lower_bound(&a, &b, BoundKind::DubinsMin, &p, &w).unwrap();
            let l1 = lower_bound(&a, &b, BoundKind::WindLb1, &p, &w).unwrap();
            let l2 = lower_bound(&a, &b, BoundKind::WindLb2, &p, &w).unwrap();
            prop_assert!(e <= d + 1e-12);
            prop_assert!(l1 <= l2 + 1e-12);
        }

        #[test]
        fn ground_speed_within_band(dir in 0.0..TAU, wmag in 0.0..0.9f64, wdir in 0.0..TAU) {
            let w = WindVector::from_polar(wmag, wdir);
            let g = ground_speed((dir.cos(), dir.sin()), &w, 1.0);
            prop_assert!(g >= 1.0 - wmag - 1e-12 && g <= 1.0 + wmag + 1e-12);
        }
    }
}
