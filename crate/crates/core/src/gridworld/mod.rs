//! Occupancy grid, configuration lattice and continuous collision checks.
//!
//! Every motion starts and ends at a cell center. A configuration is a cell
//! plus one of eight headings (multiples of π/4); a transition moves to one
//! of the eight neighboring cells with any of the eight headings.

mod scenario;

pub use scenario::{generate_scenario, Scenario, ScenarioGenerator, MAX_GENERATION_ATTEMPTS};

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dubins::{sample_path, DubinsPath, Pose};
use crate::maneuver::Maneuver;

/// Number of discrete headings and of lattice neighbors.
pub const HEADINGS: u8 = 8;

/// Neighbor offsets indexed by direction; direction `i` points at angle `i·π/4`.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

/// Index into [`NEIGHBOR_OFFSETS`] for a unit displacement.
pub fn direction_index(dx: i32, dy: i32) -> Option<u8> {
    NEIGHBOR_OFFSETS.iter().position(|&o| o == (dx, dy)).map(|i| i as u8)
}

pub fn heading_angle(h: u8) -> f64 {
    f64::from(h) * FRAC_PI_4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 3]", into = "[i32; 3]")]
pub struct Configuration {
    pub cx: i32,
    pub cy: i32,
    pub h: u8,
}

impl Configuration {
    pub fn new(cx: i32, cy: i32, h: u8) -> Self {
        debug_assert!(h < HEADINGS);
        Self { cx, cy, h }
    }

    pub fn same_cell(&self, other: &Configuration) -> bool {
        self.cx == other.cx && self.cy == other.cy
    }
}

impl From<[i32; 3]> for Configuration {
    fn from(v: [i32; 3]) -> Self {
        Self { cx: v[0], cy: v[1], h: v[2].rem_euclid(i32::from(HEADINGS)) as u8 }
    }
}

impl From<Configuration> for [i32; 3] {
    fn from(c: Configuration) -> Self {
        [c.cx, c.cy, i32::from(c.h)]
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},h={})", self.cx, self.cy, self.h)
    }
}

/// One lattice step between neighboring cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub from: Configuration,
    pub to: Configuration,
}

impl Transition {
    pub fn new(from: Configuration, to: Configuration) -> Self {
        debug_assert!(direction_index(to.cx - from.cx, to.cy - from.cy).is_some(), "transition endpoints must be neighbors");
        Self { from, to }
    }

    pub fn delta(&self) -> (i32, i32) {
        (self.to.cx - self.from.cx, self.to.cy - self.from.cy)
    }

    /// Direction index of the displacement.
    pub fn direction(&self) -> u8 {
        let (dx, dy) = self.delta();
        direction_index(dx, dy).expect("transition endpoints are neighbors")
    }

    /// Every transition leaving the origin cell: 8 directions × 8 × 8 headings.
    pub fn all_local() -> Vec<Transition> {
        let mut out = Vec::with_capacity(512);
        for hf in 0..HEADINGS {
            for &(dx, dy) in &NEIGHBOR_OFFSETS {
                for ht in 0..HEADINGS {
                    out.push(Transition::new(Configuration::new(0, 0, hf), Configuration::new(dx, dy, ht)));
                }
            }
        }
        out
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    blocked: Vec<bool>,
}

impl GridMap {
    pub fn empty(width: usize, height: usize) -> Self {
        Self::from_blocked(width, height, 1.0, vec![false; width * height])
    }

    /// `blocked` is row-major with row 0 at `cy = 0`.
    pub fn from_blocked(width: usize, height: usize, cell_size: f64, blocked: Vec<bool>) -> Self {
        assert!(width >= 1 && height >= 1, "map needs at least one cell");
        assert_eq!(blocked.len(), width * height, "blocked mask size mismatch");
        assert!(cell_size > 0.0, "cell size must be positive");
        Self { width, height, cell_size, blocked }
    }

    pub fn blocked_mask(&self) -> &[bool] {
        &self.blocked
    }

    pub fn in_bounds(&self, cx: i32, cy: i32) -> bool {
        cx >= 0 && cy >= 0 && (cx as usize) < self.width && (cy as usize) < self.height
    }

    pub fn is_blocked(&self, cx: i32, cy: i32) -> bool {
        !self.in_bounds(cx, cy) || self.blocked[cy as usize * self.width + cx as usize]
    }

    pub fn is_free(&self, cx: i32, cy: i32) -> bool {
        !self.is_blocked(cx, cy)
    }

    pub fn set_blocked(&mut self, cx: i32, cy: i32, blocked: bool) {
        assert!(self.in_bounds(cx, cy));
        self.blocked[cy as usize * self.width + cx as usize] = blocked;
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }

    /// Whether a world point lies in a free cell of the map.
    pub fn point_free(&self, x: f64, y: f64) -> bool {
        if !(x >= 0.0 && y >= 0.0) {
            return false;
        }
        let cx = (x / self.cell_size).floor();
        let cy = (y / self.cell_size).floor();
        if cx >= self.width as f64 || cy >= self.height as f64 {
            return false;
        }
        self.is_free(cx as i32, cy as i32)
    }

    /// World pose of a configuration (cell center).
    pub fn pose_of(&self, c: &Configuration) -> Pose {
        Pose::new((f64::from(c.cx) + 0.5) * self.cell_size, (f64::from(c.cy) + 0.5) * self.cell_size, heading_angle(c.h))
    }

    /// Default collision sampling step: a tenth of a cell edge.
    pub fn collision_step(&self) -> f64 {
        self.cell_size / 10.0
    }

    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.height as i32)
            .flat_map(move |cy| (0..self.width as i32).flat_map(move |cx| (0..HEADINGS).map(move |h| Configuration::new(cx, cy, h))))
    }

    pub fn config_index(&self, c: &Configuration) -> usize {
        (c.cy as usize * self.width + c.cx as usize) * HEADINGS as usize + c.h as usize
    }

    pub fn config_count(&self) -> usize {
        self.width * self.height * HEADINGS as usize
    }
}

/// Transitions out of `c` whose target cell is inside the map and free.
pub fn successors(c: &Configuration, map: &GridMap) -> Vec<Transition> {
    let mut out = Vec::with_capacity(64);
    for &(dx, dy) in &NEIGHBOR_OFFSETS {
        let (nx, ny) = (c.cx + dx, c.cy + dy);
        if map.is_blocked(nx, ny) {
            continue;
        }
        for h in 0..HEADINGS {
            out.push(Transition::new(*c, Configuration::new(nx, ny, h)));
        }
    }
    out
}

/// Sampled ground track of the maneuver stays inside free cells.
pub fn collision_free(m: &Maneuver, map: &GridMap) -> bool {
    collision_free_with_step(m, map, map.collision_step())
}

pub fn collision_free_with_step(m: &Maneuver, map: &GridMap, ds: f64) -> bool {
    m.sample_ground(ds).into_iter().all(|(x, y)| map.point_free(x, y))
}

/// Collision check for a still-air Dubins path.
pub fn dubins_collision_free(p: &DubinsPath, map: &GridMap) -> bool {
    sample_path(p, map.collision_step()).into_iter().all(|q| map.point_free(q.x, q.y))
}
