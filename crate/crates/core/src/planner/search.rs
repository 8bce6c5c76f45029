//! Open/Focal search with lazily evaluated transition costs.
//!
//! Open nodes live in two ordered sets: nodes whose incoming transition has
//! been evaluated (κ = 0) and nodes still scored with the lower bound `ĉ`
//! (κ = 1). Both are ordered by `(f, h, insertion)`. Focal is every open node
//! with `f ≤ (1+ε)·f_min`, ordered by `(κ, f)`; its front is therefore the
//! front of the evaluated set when that is inside the bound, and the front of
//! the pending set otherwise.
//!
//! Popping a pending node evaluates its class once. Every open node reached
//! through that class then switches to its true `g` and is collision-checked;
//! none of them is expanded in that round.
//!
//! Duplicates: only exact (`c`-based) g-values dominate. A configuration
//! keeps its best exact g; any new arrival not strictly better is dropped,
//! a better one replaces the open node and may re-open an expanded one.
//! Pending arrivals are kept alongside since their g may still grow.

use std::collections::{BTreeSet, HashMap};
use std::time::Duration;
use web_time::Instant;

use ordered_float::OrderedFloat;

use crate::bounds::Heuristic;
use crate::error::Result;
use crate::gridworld::{collision_free, successors, Configuration, Scenario, Transition};
use crate::oracle::{CanonicalKey, ClassEvaluation, TransitionCache};

use super::PathStep;

/// Slack under which two g-values count as equal.
const G_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuplicateAction {
    /// First exact arrival at the configuration.
    Keep,
    /// Strictly better than the best known exact g.
    Replace,
    Discard,
}

/// Duplicate rule against the best exact g known for the configuration.
pub fn duplicate_action(g_new: f64, best_known: Option<f64>) -> DuplicateAction {
    match best_known {
        None => DuplicateAction::Keep,
        Some(best) if g_new < best - G_TOLERANCE => DuplicateAction::Replace,
        Some(_) => DuplicateAction::Discard,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopRecord {
    pub f: f64,
    /// Smallest f over Open at pop time.
    pub f_min: f64,
    /// κ of the popped node's incoming transition at pop time.
    pub kappa: u8,
    /// Whether an evaluated node was inside the focal bound.
    pub evaluated_in_focal: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    pub pops: Vec<PopRecord>,
    /// `(f before, f after)` of every node switched from `ĉ` to `c`.
    pub reinsertions: Vec<(f64, f64)>,
}

type QueueKey = (OrderedFloat<f64>, OrderedFloat<f64>, u64);

#[derive(Debug, Clone)]
struct Node {
    config: Configuration,
    parent: Option<usize>,
    incoming: Option<(Transition, CanonicalKey)>,
    g: f64,
    h: f64,
    exact: bool,
    open: bool,
    seq: u64,
}

impl Node {
    fn queue_key(&self) -> QueueKey {
        (OrderedFloat(self.g + self.h), OrderedFloat(self.h), self.seq)
    }
}

pub(crate) struct Outcome {
    pub path: Option<Vec<PathStep>>,
    pub expansions: usize,
    pub evaluations: usize,
    pub reexpansions: usize,
    pub generated: usize,
    pub oracle_wall: Duration,
    pub trace: Option<SearchTrace>,
}

pub(crate) struct Search<'a> {
    scenario: &'a Scenario,
    cache: &'a mut TransitionCache,
    heuristic: &'a Heuristic,
    epsilon: f64,
    nodes: Vec<Node>,
    evaluated: BTreeSet<(QueueKey, usize)>,
    pending: BTreeSet<(QueueKey, usize)>,
    pending_by_class: HashMap<CanonicalKey, Vec<usize>>,
    best_exact: Vec<f64>,
    open_exact: Vec<Option<usize>>,
    expanded: Vec<bool>,
    collision: HashMap<Transition, bool>,
    seq: u64,
    oracle_wall: Duration,
    expansions: usize,
    evaluations: usize,
    reexpansions: usize,
    generated: usize,
    trace: Option<SearchTrace>,
}

impl<'a> Search<'a> {
    pub fn new(scenario: &'a Scenario, cache: &'a mut TransitionCache, heuristic: &'a Heuristic, epsilon: f64, trace: bool) -> Self {
        let n = scenario.map.config_count();
        Self {
            scenario,
            cache,
            heuristic,
            epsilon,
            nodes: Vec::new(),
            evaluated: BTreeSet::new(),
            pending: BTreeSet::new(),
            pending_by_class: HashMap::new(),
            best_exact: vec![f64::INFINITY; n],
            open_exact: vec![None; n],
            expanded: vec![false; n],
            collision: HashMap::new(),
            seq: 0,
            oracle_wall: Duration::ZERO,
            expansions: 0,
            evaluations: 0,
            reexpansions: 0,
            generated: 0,
            trace: trace.then(SearchTrace::default),
        }
    }

    pub fn run(mut self) -> Result<Outcome> {
        let start = self.scenario.start;
        let h = self.heuristic.to_goal(&start);
        if h.is_finite() {
            let id = self.push_node(start, None, None, 0.0, h, true);
            self.insert_exact(id);
        }

        let mut goal_node = None;
        loop {
            let fe = self.evaluated.first().map(|(k, id)| (k.0 .0, *id));
            let fp = self.pending.first().map(|(k, id)| (k.0 .0, *id));
            let f_min = match (fe, fp) {
                (None, None) => break,
                (Some((a, _)), Some((b, _))) => a.min(b),
                (Some((a, _)), None) => a,
                (None, Some((b, _))) => b,
            };
            let bound = (1.0 + self.epsilon) * f_min;
            let evaluated_in_focal = matches!(fe, Some((f, _)) if f <= bound);

            if evaluated_in_focal {
                let (f, id) = fe.expect("checked");
                self.record_pop(f, f_min, 0, true);
                let key = self.nodes[id].queue_key();
                self.evaluated.remove(&(key, id));
                self.nodes[id].open = false;
                let ci = self.config_index(id);
                if self.open_exact[ci] == Some(id) {
                    self.open_exact[ci] = None;
                }
                if self.nodes[id].config == self.scenario.goal {
                    goal_node = Some(id);
                    break;
                }
                self.expand(id)?;
            } else {
                let (f, id) = fp.expect("Open is not empty");
                self.record_pop(f, f_min, 1, false);
                let ci = self.config_index(id);
                if self.nodes[id].g >= self.best_exact[ci] - G_TOLERANCE {
                    // already beaten by an exact path, no need to evaluate
                    let key = self.nodes[id].queue_key();
                    self.pending.remove(&(key, id));
                    self.nodes[id].open = false;
                    continue;
                }
                let class = self.nodes[id].incoming.expect("start is exact").1;
                self.evaluate(class)?;
            }
        }

        let path = goal_node.map(|id| self.reconstruct(id)).transpose()?;
        Ok(Outcome {
            path,
            expansions: self.expansions,
            evaluations: self.evaluations,
            reexpansions: self.reexpansions,
            generated: self.generated,
            oracle_wall: self.oracle_wall,
            trace: self.trace,
        })
    }

    fn record_pop(&mut self, f: f64, f_min: f64, kappa: u8, evaluated_in_focal: bool) {
        if let Some(trace) = &mut self.trace {
            trace.pops.push(PopRecord { f, f_min, kappa, evaluated_in_focal });
        }
    }

    fn config_index(&self, id: usize) -> usize {
        self.scenario.map.config_index(&self.nodes[id].config)
    }

    fn push_node(
        &mut self,
        config: Configuration,
        parent: Option<usize>,
        incoming: Option<(Transition, CanonicalKey)>,
        g: f64,
        h: f64,
        exact: bool,
    ) -> usize {
        self.seq += 1;
        self.nodes.push(Node { config, parent, incoming, g, h, exact, open: false, seq: self.seq });
        self.nodes.len() - 1
    }

    /// Puts an exact node on Open if it beats the best exact g of its
    /// configuration.
    fn insert_exact(&mut self, id: usize) -> bool {
        let ci = self.config_index(id);
        let best = self.best_exact[ci];
        let action = duplicate_action(self.nodes[id].g, best.is_finite().then_some(best));
        if action == DuplicateAction::Discard {
            return false;
        }
        self.best_exact[ci] = self.nodes[id].g;
        if let Some(old) = self.open_exact[ci].take() {
            let key = self.nodes[old].queue_key();
            self.evaluated.remove(&(key, old));
            self.nodes[old].open = false;
        }
        self.nodes[id].exact = true;
        self.nodes[id].open = true;
        self.evaluated.insert((self.nodes[id].queue_key(), id));
        self.open_exact[ci] = Some(id);
        true
    }

    fn evaluation(&mut self, class: CanonicalKey) -> Result<std::sync::Arc<ClassEvaluation>> {
        if let Some(e) = self.cache.get(class) {
            return Ok(e.clone());
        }
        let t = Instant::now();
        let e = self.cache.evaluate(class)?;
        self.oracle_wall += t.elapsed();
        Ok(e)
    }

    fn is_collision_free(&mut self, t: &Transition, eval: &ClassEvaluation) -> bool {
        if let Some(&ok) = self.collision.get(t) {
            return ok;
        }
        let map = &self.scenario.map;
        let m = self.cache.oracle().realize(t, eval, map.pose_of(&t.from));
        let ok = collision_free(&m, map);
        self.collision.insert(*t, ok);
        ok
    }

    /// Evaluates `class` and moves every open node reached through it from
    /// its `ĉ`-based g to its exact g.
    fn evaluate(&mut self, class: CanonicalKey) -> Result<()> {
        let eval = self.evaluation(class)?;
        self.evaluations += 1;
        let waiting = self.pending_by_class.remove(&class).unwrap_or_default();
        for id in waiting {
            if !self.nodes[id].open || self.nodes[id].exact {
                continue;
            }
            let key = self.nodes[id].queue_key();
            self.pending.remove(&(key, id));
            self.nodes[id].open = false;
            let (t, _) = self.nodes[id].incoming.expect("pending nodes have a parent");
            let parent = self.nodes[id].parent.expect("pending nodes have a parent");
            let f_before = self.nodes[id].g + self.nodes[id].h;
            let g = self.nodes[parent].g + eval.cost;
            self.nodes[id].g = g;
            if let Some(trace) = &mut self.trace {
                trace.reinsertions.push((f_before, g + self.nodes[id].h));
            }
            if !self.is_collision_free(&t, &eval) {
                continue;
            }
            self.insert_exact(id);
        }
        Ok(())
    }

    fn expand(&mut self, id: usize) -> Result<()> {
        self.expansions += 1;
        let ci = self.config_index(id);
        if self.expanded[ci] {
            self.reexpansions += 1;
        }
        self.expanded[ci] = true;
        let (config, g) = (self.nodes[id].config, self.nodes[id].g);
        for t in successors(&config, &self.scenario.map) {
            let class = self.cache.oracle().canonicalize(&t).key;
            let h = self.heuristic.to_goal(&t.to);
            if !h.is_finite() {
                continue;
            }
            let ni = self.scenario.map.config_index(&t.to);
            if let Some(eval) = self.cache.get(class).cloned() {
                let g_new = g + eval.cost;
                if g_new >= self.best_exact[ni] - G_TOLERANCE || !self.is_collision_free(&t, &eval) {
                    continue;
                }
                let child = self.push_node(t.to, Some(id), Some((t, class)), g_new, h, true);
                self.generated += 1;
                self.insert_exact(child);
            } else {
                let g_lb = g + self.heuristic.transition_bound(&t);
                if g_lb >= self.best_exact[ni] - G_TOLERANCE {
                    continue;
                }
                let child = self.push_node(t.to, Some(id), Some((t, class)), g_lb, h, false);
                self.generated += 1;
                self.nodes[child].open = true;
                self.pending.insert((self.nodes[child].queue_key(), child));
                self.pending_by_class.entry(class).or_default().push(child);
            }
        }
        Ok(())
    }

    fn reconstruct(&mut self, goal: usize) -> Result<Vec<PathStep>> {
        let mut chain = Vec::new();
        let mut cur = goal;
        while let Some(parent) = self.nodes[cur].parent {
            chain.push(self.nodes[cur].incoming.expect("non-start nodes have an incoming transition"));
            cur = parent;
        }
        chain.reverse();
        let map = &self.scenario.map;
        let mut steps = Vec::with_capacity(chain.len());
        for (t, class) in chain {
            let eval = self.cache.get(class).expect("path transitions are evaluated").clone();
            let maneuver = self.cache.oracle().realize(&t, &eval, map.pose_of(&t.from));
            steps.push(PathStep { transition: t, maneuver });
        }
        Ok(steps)
    }
}
