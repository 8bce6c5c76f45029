//! Per-query transition cache and the shared memo below it.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::dubins::Pose;
use crate::error::{Error, Result};
use crate::gridworld::heading_angle;
use crate::maneuver::{Maneuver, Segment};

use super::{CanonicalKey, ClassEvaluation, Family, OracleSettings, TransitionOracle};

/// Class results shared between queries with identical settings.
///
/// The first result published for a key wins, so every query sees the same
/// maneuver for a class regardless of evaluation order.
#[derive(Debug)]
pub struct OracleMemo {
    settings: OracleSettings,
    entries: RwLock<HashMap<CanonicalKey, Arc<ClassEvaluation>>>,
}

impl OracleMemo {
    pub fn new(settings: OracleSettings) -> Self {
        Self { settings, entries: RwLock::new(HashMap::new()) }
    }

    pub fn settings(&self) -> &OracleSettings {
        &self.settings
    }

    pub fn get(&self, key: CanonicalKey) -> Option<Arc<ClassEvaluation>> {
        self.entries.read().expect("memo lock").get(&key).cloned()
    }

    pub fn publish(&self, key: CanonicalKey, eval: Arc<ClassEvaluation>) -> Arc<ClassEvaluation> {
        self.entries.write().expect("memo lock").entry(key).or_insert(eval).clone()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dump(&self) -> CacheDump {
        let entries = self.entries.read().expect("memo lock");
        CacheDump::new(self.settings, entries.iter().map(|(k, v)| (*k, v.as_ref())))
    }

    pub fn from_dump(dump: CacheDump) -> Result<Self> {
        let memo = Self::new(dump.settings);
        {
            let mut entries = memo.entries.write().expect("memo lock");
            for (key, e) in dump.entries {
                entries.insert(key, Arc::new(e.into_evaluation(key, &dump.settings)?));
            }
        }
        Ok(memo)
    }
}

/// Serialized form of a cache: one entry per evaluated class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheDump {
    pub settings: OracleSettings,
    pub entries: BTreeMap<CanonicalKey, DumpEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpEntry {
    pub cost: f64,
    pub family: Family,
    pub segments: Vec<Segment>,
    /// Seconds.
    pub compute_time: f64,
}

impl CacheDump {
    fn new<'a>(settings: OracleSettings, it: impl Iterator<Item = (CanonicalKey, &'a ClassEvaluation)>) -> Self {
        let entries = it
            .map(|(k, e)| {
                (
                    k,
                    DumpEntry {
                        cost: e.cost,
                        family: e.family,
                        segments: e.maneuver.segments.clone(),
                        compute_time: e.compute_time.as_secs_f64(),
                    },
                )
            })
            .collect();
        Self { settings, entries }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl DumpEntry {
    fn into_evaluation(self, key: CanonicalKey, settings: &OracleSettings) -> Result<ClassEvaluation> {
        if !(self.cost.is_finite() && self.cost >= 0.0) || !self.compute_time.is_finite() {
            return Err(Error::Format(format!("bad cache entry for class {key}")));
        }
        let rep = key.representative();
        let start = Pose::new(0.0, 0.0, heading_angle(rep.from.h));
        Ok(ClassEvaluation {
            cost: self.cost,
            family: self.family,
            maneuver: Maneuver { start, segments: self.segments, wind: settings.wind, total_time: self.cost },
            compute_time: Duration::from_secs_f64(self.compute_time.max(0.0)),
        })
    }
}

/// Cache of class results for one planning query.
///
/// Counts oracle calls: a call is charged the first time a class is needed
/// in this query, whether or not a shared memo already holds the result. The
/// oracle time charged is the time the result originally took to compute.
#[derive(Debug, Clone)]
pub struct TransitionCache {
    oracle: TransitionOracle,
    entries: HashMap<CanonicalKey, Arc<ClassEvaluation>>,
    oracle_calls: usize,
    oracle_time: Duration,
}

impl TransitionCache {
    pub fn new(oracle: TransitionOracle) -> Self {
        Self { oracle, entries: HashMap::new(), oracle_calls: 0, oracle_time: Duration::ZERO }
    }

    pub fn oracle(&self) -> &TransitionOracle {
        &self.oracle
    }

    /// Whether the class has been evaluated in this query (κ = 0).
    pub fn is_evaluated(&self, key: CanonicalKey) -> bool {
        self.entries.contains_key(&key)
    }

    pub fn get(&self, key: CanonicalKey) -> Option<&Arc<ClassEvaluation>> {
        self.entries.get(&key)
    }

    /// Result for `key`, invoking the oracle if this query has not yet.
    pub fn evaluate(&mut self, key: CanonicalKey) -> Result<Arc<ClassEvaluation>> {
        if let Some(hit) = self.entries.get(&key) {
            return Ok(hit.clone());
        }
        let eval = self.oracle.evaluate_class(key)?;
        self.oracle_calls += 1;
        self.oracle_time += eval.compute_time;
        self.entries.insert(key, eval.clone());
        Ok(eval)
    }

    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls
    }

    pub fn oracle_time(&self) -> Duration {
        self.oracle_time
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dump(&self) -> CacheDump {
        CacheDump::new(*self.oracle.settings(), self.entries.iter().map(|(k, v)| (*k, v.as_ref())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::{Configuration, Transition};
    use crate::vehicle::{VehicleParams, WindVector};

    fn oracle() -> TransitionOracle {
        TransitionOracle::new(VehicleParams::default(), WindVector::CALM, 1.0).unwrap()
    }

    #[test]
    fn counts_each_class_once() {
        let o = oracle();
        let mut cache = TransitionCache::new(o.clone());
        let a = Transition::new(Configuration::new(0, 0, 0), Configuration::new(1, 0, 0));
        let b = Transition::new(Configuration::new(3, 3, 2), Configuration::new(3, 4, 2));
        let ka = o.canonicalize(&a).key;
        assert!(!cache.is_evaluated(ka));
        cache.evaluate(ka).unwrap();
        cache.evaluate(o.canonicalize(&b).key).unwrap();
        assert!(cache.is_evaluated(ka));
        assert_eq!(cache.oracle_calls(), 1);
    }

    #[test]
    fn memo_hits_still_count_per_query() {
        let settings = *oracle().settings();
        let memo = Arc::new(OracleMemo::new(settings));
        let key = crate::oracle::all_classes(&WindVector::CALM)[5];
        for _ in 0..2 {
            let mut cache = TransitionCache::new(oracle().with_memo(memo.clone()));
            cache.evaluate(key).unwrap();
            assert_eq!(cache.oracle_calls(), 1);
        }
        assert_eq!(memo.len(), 1);
    }

    #[test]
    fn dump_round_trip() {
        let mut cache = TransitionCache::new(oracle());
        for key in crate::oracle::all_classes(&WindVector::CALM).into_iter().take(6) {
            cache.evaluate(key).unwrap();
        }
        let dump = cache.dump();
        let json = dump.to_json().unwrap();
        let back = CacheDump::from_json(&json).unwrap();
        assert_eq!(back, dump);
        let memo = OracleMemo::from_dump(back).unwrap();
        assert_eq!(memo.len(), 6);
        for (key, e) in &dump.entries {
            let got = memo.get(*key).unwrap();
            assert_eq!(got.cost, e.cost);
            assert_eq!(got.maneuver.segments, e.segments);
        }
    }
}
