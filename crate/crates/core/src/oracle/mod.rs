//! Expensive true transition cost, its symmetry classes and caching.
//!
//! [`TransitionOracle`] computes the (locally) minimum-time maneuver for a
//! lattice transition. Results are evaluated once per [`CanonicalKey`] on the
//! class representative and mapped back to the concrete transition.

mod cache;
mod candidates;
mod canonical;
mod nelder_mead;

pub use cache::{CacheDump, DumpEntry, OracleMemo, TransitionCache};
pub use candidates::{csc_geometry, smallest_fixed_point, Candidate, CandidateSolver, Family};
pub use canonical::{all_classes, canonicalize, Canonical, CanonicalKey};
pub use nelder_mead::{Minimum, NelderMead};

use std::sync::Arc;
use std::time::Duration;
use web_time::Instant;

use serde::{Deserialize, Serialize};

use crate::dubins::Pose;
use crate::error::{Error, Result};
use crate::gridworld::{heading_angle, Transition};
use crate::maneuver::Maneuver;
use crate::vehicle::{VehicleParams, WindVector};

/// Evaluated cost of one transition class, in the representative's frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEvaluation {
    pub cost: f64,
    pub family: Family,
    pub maneuver: Maneuver,
    /// Wall time spent computing it.
    #[serde(with = "duration_secs")]
    pub compute_time: Duration,
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?.max(0.0)))
    }
}

/// Parameters every cached cost depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub params: VehicleParams,
    pub wind: WindVector,
    pub cell_size: f64,
}

/// The true-cost function `c(·)` for one planning session.
#[derive(Debug, Clone)]
pub struct TransitionOracle {
    settings: OracleSettings,
    solver: CandidateSolver,
    memo: Option<Arc<OracleMemo>>,
}

impl TransitionOracle {
    pub fn new(params: VehicleParams, wind: WindVector, cell_size: f64) -> Result<Self> {
        params.validate()?;
        wind.check_against(&params)?;
        if !(cell_size > 0.0) {
            return Err(Error::InvalidParams(format!("cell size {cell_size} must be positive")));
        }
        Ok(Self { settings: OracleSettings { params, wind, cell_size }, solver: CandidateSolver::new(params, wind), memo: None })
    }

    /// Shares computed classes with other oracles built on the same memo.
    /// Cache accounting of each query is unaffected.
    pub fn with_memo(mut self, memo: Arc<OracleMemo>) -> Self {
        assert_eq!(memo.settings(), &self.settings, "memo built for other settings");
        self.memo = Some(memo);
        self
    }

    pub fn settings(&self) -> &OracleSettings {
        &self.settings
    }

    pub fn params(&self) -> &VehicleParams {
        &self.settings.params
    }

    pub fn wind(&self) -> &WindVector {
        &self.settings.wind
    }

    pub fn cell_size(&self) -> f64 {
        self.settings.cell_size
    }

    pub fn solver(&self) -> &CandidateSolver {
        &self.solver
    }

    pub fn canonicalize(&self, t: &Transition) -> Canonical {
        canonicalize(t, &self.settings.wind)
    }

    /// Start and goal poses of a transition relative to its source cell center.
    pub fn local_poses(&self, t: &Transition) -> (Pose, Pose) {
        let (dx, dy) = t.delta();
        let cs = self.settings.cell_size;
        (Pose::new(0.0, 0.0, heading_angle(t.from.h)), Pose::new(f64::from(dx) * cs, f64::from(dy) * cs, heading_angle(t.to.h)))
    }

    /// Solves the transition directly, without symmetry reduction.
    pub fn solve_direct(&self, t: &Transition) -> Result<(f64, Family, Maneuver)> {
        let (start, goal) = self.local_poses(t);
        let (cand, m) = self.solver.solve(&start, &goal).ok_or_else(|| Error::OracleFailed(t.to_string()))?;
        Ok((m.total_time, cand.family, m))
    }

    /// Evaluates a class on its representative (or fetches it from the memo).
    pub fn evaluate_class(&self, key: CanonicalKey) -> Result<Arc<ClassEvaluation>> {
        if let Some(memo) = &self.memo {
            if let Some(hit) = memo.get(key) {
                return Ok(hit);
            }
        }
        let started = Instant::now();
        let (cost, family, maneuver) = self.solve_direct(&key.representative())?;
        let eval = Arc::new(ClassEvaluation { cost, family, maneuver, compute_time: started.elapsed() });
        Ok(match &self.memo {
            Some(memo) => memo.publish(key, eval),
            None => eval,
        })
    }

    /// Cost and world-frame maneuver of a transition, given its class result.
    pub fn realize(&self, t: &Transition, eval: &ClassEvaluation, start: Pose) -> Maneuver {
        let canon = self.canonicalize(t);
        let start = Pose::new(start.x, start.y, heading_angle(t.from.h));
        eval.maneuver.retarget(start, canon.mirrored, self.settings.wind)
    }

    /// `c(t)`: cost and maneuver starting at the transition's local origin.
    pub fn true_cost(&self, t: &Transition) -> Result<(f64, Maneuver)> {
        let canon = self.canonicalize(t);
        let eval = self.evaluate_class(canon.key)?;
        let m = self.realize(t, &eval, Pose::new(0.0, 0.0, 0.0));
        Ok((eval.cost, m))
    }

    /// Times of the best single-speed Dubins maneuvers at `v_min` and `v_max`
    /// under the same wind model.
    pub fn baseline_times(&self, t: &Transition) -> (Option<f64>, Option<f64>) {
        let (start, goal) = self.local_poses(t);
        (
            self.solver.best_single_speed(Family::MinSpeedDubins, &start, &goal).map(|(_, time)| time),
            self.solver.best_single_speed(Family::MaxSpeedDubins, &start, &goal).map(|(_, time)| time),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::Configuration;
    use approx::assert_abs_diff_eq;

    fn tr(a: (i32, i32, u8), b: (i32, i32, u8)) -> Transition {
        Transition::new(Configuration::new(a.0, a.1, a.2), Configuration::new(b.0, b.1, b.2))
    }

    fn oracle(wind: WindVector) -> TransitionOracle {
        TransitionOracle::new(VehicleParams::new(0.5, 1.0, 1.0).unwrap(), wind, 1.0).unwrap()
    }

    #[test]
    fn straight_ahead_costs_one_cell_at_max_speed() {
        let (cost, m) = oracle(WindVector::CALM).true_cost(&tr((0, 0, 0), (1, 0, 0))).unwrap();
        assert_abs_diff_eq!(cost, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.total_time, cost);
    }

    #[test]
    fn tailwind_straight() {
        let (cost, _) = oracle(WindVector::new(0.4, 0.0)).true_cost(&tr((0, 0, 0), (1, 0, 0))).unwrap();
        assert_abs_diff_eq!(cost, 1.0 / 1.4, epsilon = 1e-9);
    }

    #[test]
    fn rejects_strong_wind() {
        assert!(TransitionOracle::new(VehicleParams::default(), WindVector::new(0.5, 0.0), 1.0).is_err());
    }

    #[test]
    fn realized_maneuver_ends_at_target() {
        for wind in [WindVector::CALM, WindVector::new(0.2, -0.15)] {
            let o = oracle(wind);
            for t in Transition::all_local().iter().step_by(7) {
                let (_, m) = o.true_cost(t).unwrap();
                let (_, goal) = o.local_poses(t);
                let end = m.ground_endpoint();
                assert!(end.position_error(&goal) < 1e-6, "{t}: {:?} vs {:?}", end, goal);
                assert!(end.heading_error(&goal) < 1e-6);
            }
        }
    }
}
