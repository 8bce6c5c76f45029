//! Continuous realization of a grid transition.
//!
//! A maneuver is a chain of arcs and straights flown at piecewise-constant
//! airspeed. Geometry is expressed in the air frame; the ground track adds
//! the wind drift `w · t`.

use serde::{Deserialize, Serialize};

use crate::dubins::{advance, segment_length, Pose, Steer};
use crate::vehicle::WindVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub steer: Steer,
    /// Turning radius for arcs, unused (zero) for straights.
    pub radius: f64,
    /// Angle in radians for arcs, length for straights.
    pub measure: f64,
    pub speed: f64,
}

impl Segment {
    pub fn arc(steer: Steer, radius: f64, angle: f64, speed: f64) -> Self {
        Self { steer, radius, measure: angle, speed }
    }

    pub fn straight(length: f64, speed: f64) -> Self {
        Self { steer: Steer::Straight, radius: 0.0, measure: length, speed }
    }

    pub fn length(&self) -> f64 {
        segment_length(self.steer, self.radius, self.measure)
    }

    pub fn time(&self) -> f64 {
        self.length() / self.speed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Maneuver {
    pub start: Pose,
    pub segments: Vec<Segment>,
    pub wind: WindVector,
    pub total_time: f64,
}

impl Maneuver {
    pub fn new(start: Pose, segments: Vec<Segment>, wind: WindVector) -> Self {
        let segments: Vec<Segment> = segments.into_iter().filter(|s| s.measure > 0.0).collect();
        let total_time = segments.iter().map(Segment::time).sum();
        Self { start, segments, wind, total_time }
    }

    /// Air-frame path length.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn air_endpoint(&self) -> Pose {
        self.segments.iter().fold(self.start, |p, s| advance(&p, s.steer, s.radius, s.measure))
    }

    /// End pose over ground: air endpoint drifted by the wind.
    pub fn ground_endpoint(&self) -> Pose {
        let a = self.air_endpoint();
        Pose::new(a.x + self.wind.wx * self.total_time, a.y + self.wind.wy * self.total_time, a.theta)
    }

    /// Same maneuver flown from another start pose, optionally mirrored
    /// (left and right turns swapped).
    pub fn retarget(&self, start: Pose, mirrored: bool, wind: WindVector) -> Maneuver {
        let segments = self.segments.iter().map(|s| Segment { steer: if mirrored { s.steer.mirrored() } else { s.steer }, ..*s }).collect();
        Maneuver { start, segments, wind, total_time: self.total_time }
    }

    /// Ground-track positions spaced at most `ds` apart, endpoints included.
    pub fn sample_ground(&self, ds: f64) -> Vec<(f64, f64)> {
        let mut out = vec![(self.start.x, self.start.y)];
        for seg in self.sample_ground_segments(ds) {
            out.extend_from_slice(&seg[1..]);
        }
        out
    }

    /// Ground-track samples of each segment separately; each list starts at
    /// the segment's first point.
    pub fn sample_ground_segments(&self, ds: f64) -> Vec<Vec<(f64, f64)>> {
        assert!(ds > 0.0, "sampling step must be positive");
        let w = self.wind;
        let wmag = w.magnitude();
        let mut out = Vec::with_capacity(self.segments.len());
        let mut pose = self.start;
        let mut t0 = 0.0;
        for seg in &self.segments {
            let dt = seg.time();
            // ground speed never exceeds airspeed plus wind
            let ground_len = (seg.speed + wmag) * dt;
            let n = (ground_len / ds).ceil().max(1.0) as usize;
            let mut pts = Vec::with_capacity(n + 1);
            pts.push((pose.x + w.wx * t0, pose.y + w.wy * t0));
            for k in 1..=n {
                let frac = k as f64 / n as f64;
                let p = advance(&pose, seg.steer, seg.radius, seg.measure * frac);
                let t = t0 + dt * frac;
                pts.push((p.x + w.wx * t, p.y + w.wy * t));
            }
            out.push(pts);
            pose = advance(&pose, seg.steer, seg.radius, seg.measure);
            t0 += dt;
        }
        out
    }

    /// Time spent at each distinct speed, for reporting.
    pub fn time_at_speed(&self, speed: f64) -> f64 {
        self.segments.iter().filter(|s| (s.speed - speed).abs() < 1e-12).map(Segment::time).sum()
    }
}
