//! Plain graph searches over the configuration lattice.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use ordered_float::OrderedFloat;

use crate::dubins::dubins_shortest;
use crate::error::Result;
use crate::gridworld::{collision_free, dubins_collision_free, successors, Configuration, GridMap, Transition, NEIGHBOR_OFFSETS};
use crate::oracle::TransitionCache;
use crate::vehicle::VehicleParams;

/// Dijkstra from `start` to `goal` with edge weights from `weight`
/// (`None` drops the edge). Returns the cost and the transitions in order.
pub fn shortest_path<F>(map: &GridMap, start: &Configuration, goal: &Configuration, mut weight: F) -> Option<(f64, Vec<Transition>)>
where
    F: FnMut(&Transition) -> Option<f64>,
{
    let n = map.config_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<Transition>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[map.config_index(start)] = 0.0;
    heap.push(Reverse((OrderedFloat(0.0), *start)));

    while let Some(Reverse((OrderedFloat(d), c))) = heap.pop() {
        let ci = map.config_index(&c);
        if d > dist[ci] {
            continue;
        }
        if c == *goal {
            let mut path = Vec::new();
            let mut cur = c;
            while let Some(t) = parent[map.config_index(&cur)] {
                path.push(t);
                cur = t.from;
            }
            path.reverse();
            return Some((d, path));
        }
        for t in successors(&c, map) {
            let Some(w) = weight(&t) else { continue };
            let nd = d + w;
            let ni = map.config_index(&t.to);
            if nd < dist[ni] {
                dist[ni] = nd;
                parent[ni] = Some(t);
                heap.push(Reverse((OrderedFloat(nd), t.to)));
            }
        }
    }
    None
}

/// Cost-to-go to `goal` from every configuration, by Dijkstra on reversed
/// edges. Indexed by [`GridMap::config_index`]; unreachable entries are
/// infinite.
pub fn reverse_distances<F>(map: &GridMap, goal: &Configuration, mut weight: F) -> Vec<f64>
where
    F: FnMut(&Transition) -> Option<f64>,
{
    let mut dist = vec![f64::INFINITY; map.config_count()];
    if map.is_blocked(goal.cx, goal.cy) {
        return dist;
    }
    let mut heap = BinaryHeap::new();
    dist[map.config_index(goal)] = 0.0;
    heap.push(Reverse((OrderedFloat(0.0), *goal)));

    while let Some(Reverse((OrderedFloat(d), c))) = heap.pop() {
        if d > dist[map.config_index(&c)] {
            continue;
        }
        for &(dx, dy) in &NEIGHBOR_OFFSETS {
            let (px, py) = (c.cx - dx, c.cy - dy);
            if map.is_blocked(px, py) {
                continue;
            }
            for h in 0..8 {
                let t = Transition::new(Configuration::new(px, py, h), c);
                let Some(w) = weight(&t) else { continue };
                let nd = d + w;
                let pi = map.config_index(&t.from);
                if nd < dist[pi] {
                    dist[pi] = nd;
                    heap.push(Reverse((OrderedFloat(nd), t.from)));
                }
            }
        }
    }
    dist
}

/// Minimum-length lattice path whose transitions are collision-free
/// still-air Dubins paths at the minimum turning radius.
pub fn dubins_grid_path(
    map: &GridMap,
    start: &Configuration,
    goal: &Configuration,
    params: &VehicleParams,
) -> Option<(f64, Vec<Transition>)> {
    let rho = params.rho_min();
    shortest_path(map, start, goal, |t| {
        let p = dubins_shortest(&map.pose_of(&t.from), &map.pose_of(&t.to), rho);
        dubins_collision_free(&p, map).then(|| p.length())
    })
}

/// Whether `goal` can be reached over transitions whose oracle maneuvers are
/// collision-free.
pub fn reachable_by_maneuvers(map: &GridMap, start: &Configuration, goal: &Configuration, cache: &mut TransitionCache) -> Result<bool> {
    let mut seen = vec![false; map.config_count()];
    let mut queue = VecDeque::from([*start]);
    seen[map.config_index(start)] = true;
    while let Some(c) = queue.pop_front() {
        if c == *goal {
            return Ok(true);
        }
        for t in successors(&c, map) {
            let ti = map.config_index(&t.to);
            if seen[ti] {
                continue;
            }
            let key = cache.oracle().canonicalize(&t).key;
            let eval = cache.evaluate(key)?;
            let m = cache.oracle().realize(&t, &eval, map.pose_of(&t.from));
            if collision_free(&m, map) {
                seen[ti] = true;
                queue.push_back(t.to);
            }
        }
    }
    Ok(false)
}
