//! Random scenarios and their file format.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Configuration, GridMap, HEADINGS};
use crate::error::{Error, Result};
use crate::oracle::{TransitionCache, TransitionOracle};
use crate::planner::lattice;
use crate::vehicle::{VehicleParams, WindVector};

/// Start/goal draws before giving up on a seed.
pub const MAX_GENERATION_ATTEMPTS: usize = 1000;
/// A fresh map is drawn every this many failed start/goal draws.
const ATTEMPTS_PER_MAP: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub map: GridMap,
    pub start: Configuration,
    pub goal: Configuration,
    pub params: VehicleParams,
    pub wind: WindVector,
    pub seed: Option<u64>,
}

/// On-disk layout of a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioFile {
    width: usize,
    height: usize,
    cell_size: f64,
    /// Row-major, row `cy = 0` first, `1` for blocked.
    blocked: String,
    start: [i32; 3],
    goal: [i32; 3],
    v_min: f64,
    v_max: f64,
    #[serde(rename = "K")]
    k: f64,
    wind: [f64; 2],
    #[serde(default)]
    seed: Option<u64>,
}

impl Scenario {
    pub fn new(map: GridMap, start: Configuration, goal: Configuration, params: VehicleParams, wind: WindVector) -> Result<Self> {
        let s = Self { map, start, goal, params, wind, seed: None };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.wind.check_against(&self.params)?;
        for (name, c) in [("start", &self.start), ("goal", &self.goal)] {
            if !self.map.in_bounds(c.cx, c.cy) {
                return Err(Error::InvalidScenario(format!("{name} {c} outside the map")));
            }
            if self.map.is_blocked(c.cx, c.cy) {
                return Err(Error::InvalidScenario(format!("{name} {c} is blocked")));
            }
        }
        Ok(())
    }

    /// Same map and endpoints under other flight conditions.
    pub fn with_conditions(&self, params: VehicleParams, wind: WindVector) -> Result<Self> {
        let s = Self { params, wind, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ScenarioFile {
            width: self.map.width,
            height: self.map.height,
            cell_size: self.map.cell_size,
            blocked: self.map.blocked_mask().iter().map(|&b| if b { '1' } else { '0' }).collect(),
            start: self.start.into(),
            goal: self.goal.into(),
            v_min: self.params.v_min,
            v_max: self.params.v_max,
            k: self.params.k,
            wind: [self.wind.wx, self.wind.wy],
            seed: self.seed,
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ScenarioFile = serde_json::from_str(text)?;
        if f.width == 0 || f.height == 0 || !(f.cell_size > 0.0) {
            return Err(Error::InvalidScenario("empty map or bad cell size".into()));
        }
        if f.blocked.chars().count() != f.width * f.height {
            return Err(Error::InvalidScenario(format!(
                "blocked mask has {} cells, expected {}",
                f.blocked.chars().count(),
                f.width * f.height
            )));
        }
        let blocked = f
            .blocked
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidScenario(format!("bad blocked mask character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        for c in [f.start, f.goal] {
            if !(0..i32::from(HEADINGS)).contains(&c[2]) {
                return Err(Error::InvalidScenario(format!("heading index {} not in 0..8", c[2])));
            }
        }
        let s = Self {
            map: GridMap::from_blocked(f.width, f.height, f.cell_size, blocked),
            start: f.start.into(),
            goal: f.goal.into(),
            params: VehicleParams::new(f.v_min, f.v_max, f.k)?,
            wind: WindVector::new(f.wind[0], f.wind[1]),
            seed: f.seed,
        };
        s.validate()?;
        Ok(s)
    }
}

/// Seeded random scenarios: i.i.d. blocked cells and uniformly drawn
/// endpoints that the planner can connect.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioGenerator {
    pub width: usize,
    pub height: usize,
    pub p_block: f64,
    pub cell_size: f64,
    pub params: VehicleParams,
}

impl Default for ScenarioGenerator {
    fn default() -> Self {
        Self { width: 14, height: 14, p_block: 0.25, cell_size: 1.0, params: VehicleParams::default() }
    }
}

impl ScenarioGenerator {
    pub fn new(width: usize, height: usize, p_block: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p_block) {
            return Err(Error::InvalidParams(format!("p_block {p_block} not in [0, 1)")));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams("map needs at least one cell".into()));
        }
        Ok(Self { width, height, p_block, ..Self::default() })
    }

    pub fn generate(&self, seed: u64) -> Result<Scenario> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let oracle = TransitionOracle::new(self.params, WindVector::CALM, self.cell_size)?;
        let mut cache = TransitionCache::new(oracle);
        let mut map = GridMap::empty(self.width, self.height);

        for attempt in 0..MAX_GENERATION_ATTEMPTS {
            if attempt % ATTEMPTS_PER_MAP == 0 {
                let blocked = (0..self.width * self.height).map(|_| rng.gen_bool(self.p_block)).collect();
                map = GridMap::from_blocked(self.width, self.height, self.cell_size, blocked);
            }
            let free: Vec<(i32, i32)> = (0..self.height as i32)
                .flat_map(|cy| (0..self.width as i32).map(move |cx| (cx, cy)))
                .filter(|&(cx, cy)| map.is_free(cx, cy))
                .collect();
            if free.is_empty() {
                continue;
            }
            let draw = |rng: &mut ChaCha8Rng| {
                let (cx, cy) = free[rng.gen_range(0..free.len())];
                Configuration::new(cx, cy, rng.gen_range(0..HEADINGS))
            };
            let start = draw(&mut rng);
            let goal = draw(&mut rng);
            if start == goal {
                continue;
            }
            if lattice::reachable_by_maneuvers(&map, &start, &goal, &mut cache)? {
                return Ok(Scenario { map, start, goal, params: self.params, wind: WindVector::CALM, seed: Some(seed) });
            }
        }
        Err(Error::GenerationFailed { seed, attempts: MAX_GENERATION_ATTEMPTS })
    }
}

/// Scenario with default vehicle parameters and unit cells.
pub fn generate_scenario(seed: u64, width: usize, height: usize, p_block: f64) -> Result<Scenario> {
    ScenarioGenerator::new(width, height, p_block)?.generate(seed)
}
