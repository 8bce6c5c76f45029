//! SVG rendering of scenarios and planned paths.
//!
//! Path segments are colored by airspeed: red at `v_min`, green at `v_max`,
//! blended in between for intermediate speeds.

use std::fmt::Write;

use crate::gridworld::{heading_angle, Configuration, GridMap, Scenario};
use crate::maneuver::Maneuver;
use crate::planner::PlanResult;
use crate::vehicle::{VehicleParams, WindVector};

/// Pixels per world unit.
const SCALE: f64 = 40.0;
const MARGIN: f64 = 20.0;

struct Canvas<'a> {
    map: &'a GridMap,
    out: String,
}

impl<'a> Canvas<'a> {
    fn new(map: &'a GridMap) -> Self {
        let w = map.width as f64 * map.cell_size * SCALE + 2.0 * MARGIN;
        let h = map.height as f64 * map.cell_size * SCALE + 2.0 * MARGIN;
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#);
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        Self { map, out }
    }

    /// World to pixel coordinates, y pointing up in the world.
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let top = self.map.height as f64 * self.map.cell_size;
        (MARGIN + x * SCALE, MARGIN + (top - y) * SCALE)
    }

    fn grid(&mut self) {
        let cs = self.map.cell_size;
        for cy in 0..self.map.height as i32 {
            for cx in 0..self.map.width as i32 {
                let (x, y) = self.px(f64::from(cx) * cs, f64::from(cy + 1) * cs);
                let fill = if self.map.is_blocked(cx, cy) { "#444" } else { "#fafafa" };
                let _ = writeln!(
                    self.out,
                    r##"<rect x="{x:.2}" y="{y:.2}" width="{s:.2}" height="{s:.2}" fill="{fill}" stroke="#ccc" stroke-width="1"/>"##,
                    s = cs * SCALE
                );
            }
        }
    }

    fn arrow(&mut self, x: f64, y: f64, angle: f64, len: f64, color: &str) {
        let (x0, y0) = self.px(x, y);
        let (x1, y1) = self.px(x + len * angle.cos(), y + len * angle.sin());
        let head = 0.3 * len * SCALE;
        // screen angle is mirrored because y points down
        let a = -angle;
        let (l, r) = (a + 2.6, a - 2.6);
        let _ = writeln!(self.out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="{color}" stroke-width="2"/>"#);
        let _ = writeln!(
            self.out,
            r#"<polygon points="{x1:.2},{y1:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x1 + head * l.cos(),
            y1 + head * l.sin(),
            x1 + head * r.cos(),
            y1 + head * r.sin()
        );
    }

    fn config(&mut self, c: &Configuration, color: &str) {
        let p = self.map.pose_of(c);
        self.arrow(p.x, p.y, heading_angle(c.h), 0.35 * self.map.cell_size, color);
    }

    fn maneuver(&mut self, m: &Maneuver, params: &VehicleParams) {
        let ds = self.map.cell_size / 20.0;
        for (seg, pts) in m.segments.iter().zip(m.sample_ground_segments(ds)) {
            let color = speed_color(seg.speed, params);
            let mut d = String::new();
            for (i, &(x, y)) in pts.iter().enumerate() {
                let (sx, sy) = self.px(x, y);
                let _ = write!(d, "{}{sx:.2},{sy:.2} ", if i == 0 { "M" } else { "L" });
            }
            let _ =
                writeln!(self.out, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="3" stroke-linecap="round"/>"#, d.trim_end());
        }
    }

    fn wind(&mut self, wind: &WindVector) {
        if wind.is_calm() {
            return;
        }
        let (sx, sy) = (MARGIN / 2.0, MARGIN / 2.0);
        let len = 1.2 * SCALE;
        let mag = wind.magnitude();
        let (ex, ey) = (sx + len * wind.wx / mag, sy - len * wind.wy / mag);
        let _ = writeln!(
            self.out,
            r##"<g id="wind"><line x1="{sx:.2}" y1="{sy:.2}" x2="{ex:.2}" y2="{ey:.2}" stroke="#1565c0" stroke-width="2" marker-end="url(#wind-head)"/><text x="{:.2}" y="{:.2}" font-size="11" fill="#1565c0">wind {mag:.2}</text></g>"##,
            sx + 4.0,
            sy + 12.0
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn speed_color(speed: f64, params: &VehicleParams) -> String {
    let span = params.v_max - params.v_min;
    let u = if span > 0.0 { ((speed - params.v_min) / span).clamp(0.0, 1.0) } else { 1.0 };
    let (r, g) = ((220.0 * (1.0 - u)) as u8, (170.0 * u + 20.0 * (1.0 - u)) as u8);
    format!("#{r:02x}{g:02x}30")
}

/// Map, start and goal, and the planned path if there is one.
pub fn render_svg(scenario: &Scenario, plan: Option<&PlanResult>) -> String {
    let mut c = Canvas::new(&scenario.map);
    c.out.push_str(
        "<defs><marker id=\"wind-head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#1565c0\"/></marker></defs>\n",
    );
    c.grid();
    if let Some(plan) = plan {
        for step in &plan.path {
            c.maneuver(&step.maneuver, &scenario.params);
        }
        for cfg in plan.configurations() {
            c.config(&cfg, "#555");
        }
    }
    c.config(&scenario.start, "#1565c0");
    c.config(&scenario.goal, "#8e24aa");
    c.wind(&scenario.wind);
    c.finish()
}

/// A single maneuver on a small empty grid around it.
pub fn render_maneuver_svg(m: &Maneuver, params: &VehicleParams, cells: usize, cell_size: f64) -> String {
    let map = GridMap::from_blocked(cells, cells, cell_size, vec![false; cells * cells]);
    let mut c = Canvas::new(&map);
    c.out.push_str(
        "<defs><marker id=\"wind-head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#1565c0\"/></marker></defs>\n",
    );
    c.grid();
    c.maneuver(m, params);
    let end = m.ground_endpoint();
    c.arrow(m.start.x, m.start.y, m.start.theta, 0.35 * cell_size, "#1565c0");
    c.arrow(end.x, end.y, end.theta, 0.35 * cell_size, "#8e24aa");
    c.wind(&m.wind);
    c.finish()
}
