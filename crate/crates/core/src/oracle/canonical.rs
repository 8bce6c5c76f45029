//! Symmetry classes of lattice transitions.
//!
//! In still air the transition cost is invariant under the eight symmetries
//! of the square grid: quarter-turn rotations applied jointly to the
//! displacement and both headings, optionally composed with a mirror. Under
//! wind only translations remain, so every (displacement, headings) triple is
//! its own class.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gridworld::{Configuration, Transition, HEADINGS, NEIGHBOR_OFFSETS};
use crate::vehicle::WindVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey {
    /// `direction · 64 + from_heading · 8 + to_heading` of the class
    /// representative.
    pub class_id: u16,
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class_id)
    }
}

impl CanonicalKey {
    /// The class representative, leaving the origin cell.
    pub fn representative(&self) -> Transition {
        let (dir, hf, ht) = decode(self.class_id);
        let (dx, dy) = NEIGHBOR_OFFSETS[dir as usize];
        Transition::new(Configuration::new(0, 0, hf), Configuration::new(dx, dy, ht))
    }
}

/// How a transition maps onto its class representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Canonical {
    pub key: CanonicalKey,
    /// The representative is the mirror image of the transition.
    pub mirrored: bool,
}

fn encode(dir: u8, hf: u8, ht: u8) -> u16 {
    u16::from(dir) * 64 + u16::from(hf) * 8 + u16::from(ht)
}

fn decode(code: u16) -> (u8, u8, u8) {
    ((code / 64) as u8, ((code / 8) % 8) as u8, (code % 8) as u8)
}

/// Mirror across the x axis, then rotate by `quarter_turns · π/2`. Works on
/// direction indices and heading indices alike.
fn apply(index: u8, quarter_turns: u8, mirror: bool) -> u8 {
    let m = if mirror { (HEADINGS - index) % HEADINGS } else { index };
    (m + 2 * quarter_turns) % HEADINGS
}

pub fn canonicalize(t: &Transition, wind: &WindVector) -> Canonical {
    let (dir, hf, ht) = (t.direction(), t.from.h, t.to.h);
    if !wind.is_calm() {
        return Canonical { key: CanonicalKey { class_id: encode(dir, hf, ht) }, mirrored: false };
    }
    let mut best = (u16::MAX, false);
    for mirror in [false, true] {
        for q in 0..4 {
            let code = encode(apply(dir, q, mirror), apply(hf, q, mirror), apply(ht, q, mirror));
            if code < best.0 {
                best = (code, mirror);
            }
        }
    }
    Canonical { key: CanonicalKey { class_id: best.0 }, mirrored: best.1 }
}

/// Distinct classes over the 512 local transitions, in ascending key order.
pub fn all_classes(wind: &WindVector) -> Vec<CanonicalKey> {
    let mut keys: Vec<CanonicalKey> = Transition::all_local().iter().map(|t| canonicalize(t, wind).key).collect();
    keys.sort();
    keys.dedup();
    keys
}
