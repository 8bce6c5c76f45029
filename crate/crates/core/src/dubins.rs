//! Single-speed Dubins shortest paths between planar poses.
//!
//! Closed-form construction of the six classic words (LSL, RSR, LSR, RSL,
//! RLR, LRL). Arc segments are stored as unsigned angles in radians with the
//! turn direction carried by the word; the straight segment is stored as a
//! length in world units.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Values this close to a full turn are snapped to zero after reduction.
const WRAP_SNAP: f64 = 1e-12;

/// Reduces an angle into `[0, 2π)`.
pub fn mod2pi(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r >= TAU - WRAP_SNAP {
        0.0
    } else {
        r
    }
}

/// Signed smallest difference `a - b` in `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = mod2pi(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Continuous planar placement with heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading in radians, kept in `[0, 2π)`.
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta: mod2pi(theta) }
    }

    pub fn distance(&self, other: &Pose) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    /// Position error plus wrapped heading error against `other`.
    pub fn position_error(&self, other: &Pose) -> f64 {
        self.distance(other)
    }

    pub fn heading_error(&self, other: &Pose) -> f64 {
        angle_diff(self.theta, other.theta).abs()
    }

    /// Rigid motion: rotate about the origin by `angle`, then translate.
    pub fn transformed(&self, angle: f64, tx: f64, ty: f64) -> Pose {
        let (s, c) = angle.sin_cos();
        Pose::new(c * self.x - s * self.y + tx, s * self.x + c * self.y + ty, self.theta + angle)
    }
}

/// Steering primitive of one path segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Steer {
    Left,
    Straight,
    Right,
}

impl Steer {
    pub fn mirrored(self) -> Steer {
        match self {
            Steer::Left => Steer::Right,
            Steer::Right => Steer::Left,
            Steer::Straight => Steer::Straight,
        }
    }

    /// +1 for counter-clockwise, -1 for clockwise, 0 for straight.
    pub fn sign(self) -> f64 {
        match self {
            Steer::Left => 1.0,
            Steer::Straight => 0.0,
            Steer::Right => -1.0,
        }
    }
}

/// Moves `pose` along one segment. `measure` is an angle for arcs and a
/// length for straights.
pub fn advance(pose: &Pose, steer: Steer, radius: f64, measure: f64) -> Pose {
    let (s0, c0) = pose.theta.sin_cos();
    match steer {
        Steer::Straight => Pose::new(pose.x + measure * c0, pose.y + measure * s0, pose.theta),
        Steer::Left => {
            let th = pose.theta + measure;
            let (s1, c1) = th.sin_cos();
            Pose::new(pose.x + radius * (s1 - s0), pose.y - radius * (c1 - c0), th)
        }
        Steer::Right => {
            let th = pose.theta - measure;
            let (s1, c1) = th.sin_cos();
            Pose::new(pose.x - radius * (s1 - s0), pose.y + radius * (c1 - c0), th)
        }
    }
}

/// Path length of one segment.
pub fn segment_length(steer: Steer, radius: f64, measure: f64) -> f64 {
    match steer {
        Steer::Straight => measure,
        _ => measure * radius,
    }
}

/// The six Dubins words, declared in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DubinsType {
    LSL,
    RSR,
    LSR,
    RSL,
    RLR,
    LRL,
}

impl DubinsType {
    pub const ALL: [DubinsType; 6] = [DubinsType::LSL, DubinsType::RSR, DubinsType::LSR, DubinsType::RSL, DubinsType::RLR, DubinsType::LRL];

    pub const CSC: [DubinsType; 4] = [DubinsType::LSL, DubinsType::RSR, DubinsType::LSR, DubinsType::RSL];

    pub fn steers(self) -> [Steer; 3] {
        use Steer::*;
        match self {
            DubinsType::LSL => [Left, Straight, Left],
            DubinsType::RSR => [Right, Straight, Right],
            DubinsType::LSR => [Left, Straight, Right],
            DubinsType::RSL => [Right, Straight, Left],
            DubinsType::RLR => [Right, Left, Right],
            DubinsType::LRL => [Left, Right, Left],
        }
    }

    pub fn is_csc(self) -> bool {
        !matches!(self, DubinsType::RLR | DubinsType::LRL)
    }

    pub fn mirrored(self) -> DubinsType {
        match self {
            DubinsType::LSL => DubinsType::RSR,
            DubinsType::RSR => DubinsType::LSL,
            DubinsType::LSR => DubinsType::RSL,
            DubinsType::RSL => DubinsType::LSR,
            DubinsType::RLR => DubinsType::LRL,
            DubinsType::LRL => DubinsType::RLR,
        }
    }
}

/// A Dubins path: word, segment measures and radius, anchored at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DubinsPath {
    pub path_type: DubinsType,
    /// Arc angles (radians) for C segments, length for the S segment.
    pub segment_params: [f64; 3],
    pub radius: f64,
    pub start: Pose,
}

impl DubinsPath {
    pub fn length(&self) -> f64 {
        path_length(self)
    }

    pub fn segments(&self) -> impl Iterator<Item = (Steer, f64)> + '_ {
        self.path_type.steers().into_iter().zip(self.segment_params)
    }

    pub fn endpoint(&self) -> Pose {
        self.segments().fold(self.start, |p, (steer, m)| advance(&p, steer, self.radius, m))
    }

    /// Pose at arc length `s` from the start, clamped to the path.
    pub fn pose_at(&self, s: f64) -> Pose {
        let mut remaining = s.max(0.0);
        let mut pose = self.start;
        for (steer, m) in self.segments() {
            let len = segment_length(steer, self.radius, m);
            if remaining <= len {
                let part = match steer {
                    Steer::Straight => remaining,
                    _ => remaining / self.radius,
                };
                return advance(&pose, steer, self.radius, part);
            }
            remaining -= len;
            pose = advance(&pose, steer, self.radius, m);
        }
        pose
    }
}

/// Total length: arcs contribute angle × radius, the straight its length.
pub fn path_length(p: &DubinsPath) -> f64 {
    p.segments().map(|(steer, m)| segment_length(steer, p.radius, m)).sum()
}

/// Poses spaced at most `ds` apart along the path, both endpoints included.
pub fn sample_path(p: &DubinsPath, ds: f64) -> Vec<Pose> {
    assert!(ds > 0.0, "sampling step must be positive");
    let len = p.length();
    if len <= 0.0 {
        return vec![p.start];
    }
    let n = (len / ds).ceil().max(1.0) as usize;
    (0..=n).map(|k| p.pose_at(len * k as f64 / n as f64)).collect()
}

/// Normalized problem data shared by all six closed forms.
struct Normalized {
    alpha: f64,
    beta: f64,
    d: f64,
}

fn normalize(q0: &Pose, q1: &Pose, rho: f64) -> Normalized {
    let dx = q1.x - q0.x;
    let dy = q1.y - q0.y;
    let d = dx.hypot(dy) / rho;
    let th = if d > 0.0 { mod2pi(dy.atan2(dx)) } else { 0.0 };
    Normalized { alpha: mod2pi(q0.theta - th), beta: mod2pi(q1.theta - th), d }
}

/// Normalized `(t, p, q)` of one word, with `p` in units of `rho` for the
/// straight segment. `None` when the word cannot connect the poses.
fn word_params(word: DubinsType, n: &Normalized) -> Option<[f64; 3]> {
    let (alpha, beta, d) = (n.alpha, n.beta, n.d);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let c_ab = (alpha - beta).cos();
    match word {
        DubinsType::LSL => {
            let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
            if p_sq < -1e-12 {
                return None;
            }
            let tmp = (cb - ca).atan2(d + sa - sb);
            Some([mod2pi(tmp - alpha), p_sq.max(0.0).sqrt(), mod2pi(beta - tmp)])
        }
        DubinsType::RSR => {
            let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
            if p_sq < -1e-12 {
                return None;
            }
            let tmp = (ca - cb).atan2(d - sa + sb);
            Some([mod2pi(alpha - tmp), p_sq.max(0.0).sqrt(), mod2pi(tmp - beta)])
        }
        DubinsType::LSR => {
            let p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
            if p_sq < 0.0 {
                return None;
            }
            let p = p_sq.sqrt();
            let tmp = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
            Some([mod2pi(tmp - alpha), p, mod2pi(tmp - beta)])
        }
        DubinsType::RSL => {
            let p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
            if p_sq < 0.0 {
                return None;
            }
            let p = p_sq.sqrt();
            let tmp = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
            Some([mod2pi(alpha - tmp), p, mod2pi(beta - tmp)])
        }
        DubinsType::RLR => {
            let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
            if tmp.abs() > 1.0 + 1e-12 {
                return None;
            }
            let phi = (ca - cb).atan2(d - sa + sb);
            let p = mod2pi(TAU - tmp.clamp(-1.0, 1.0).acos());
            let t = mod2pi(alpha - phi + mod2pi(p / 2.0));
            Some([t, p, mod2pi(alpha - beta - t + p)])
        }
        DubinsType::LRL => {
            let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
            if tmp.abs() > 1.0 + 1e-12 {
                return None;
            }
            let phi = (ca - cb).atan2(d + sa - sb);
            let p = mod2pi(TAU - tmp.clamp(-1.0, 1.0).acos());
            let t = mod2pi(-alpha - phi + p / 2.0);
            Some([t, p, mod2pi(beta - alpha - t + p)])
        }
    }
}

/// Builds one specific word, or `None` when it is infeasible.
pub fn dubins_of_type(q0: &Pose, q1: &Pose, rho: f64, word: DubinsType) -> Option<DubinsPath> {
    assert!(rho > 0.0, "turning radius must be positive");
    let n = normalize(q0, q1, rho);
    let [t, p, q] = word_params(word, &n)?;
    let params = if word.is_csc() { [t, p * rho, q] } else { [t, p, q] };
    Some(DubinsPath { path_type: word, segment_params: params, radius: rho, start: *q0 })
}

/// All feasible words, in tie-break order.
pub fn dubins_candidates(q0: &Pose, q1: &Pose, rho: f64) -> Vec<DubinsPath> {
    DubinsType::ALL.iter().filter_map(|&w| dubins_of_type(q0, q1, rho, w)).collect()
}

/// Shortest Dubins path from `q0` to `q1` with minimum turning radius `rho`.
pub fn dubins_shortest(q0: &Pose, q1: &Pose, rho: f64) -> DubinsPath {
    let mut best: Option<(f64, DubinsPath)> = None;
    for path in dubins_candidates(q0, q1, rho) {
        let len = path.length();
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, path));
        }
    }
    // LSL and RSR are feasible for every pose pair
    best.expect("LSL is always feasible").1
}

/// Length of the shortest Dubins path.
pub fn dubins_length(q0: &Pose, q1: &Pose, rho: f64) -> f64 {
    dubins_shortest(q0, q1, rho).length()
}
