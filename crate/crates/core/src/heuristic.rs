//! Switch for the floating-point search heuristics.
//!
//! Floats only ever order candidates. When poisoned, every float estimate is
//! replaced by deterministic junk so tests can confirm that verdicts and
//! certificates do not depend on them.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicBool, Ordering};

static POISONED: AtomicBool = AtomicBool::new(false);

pub fn set_poisoned(on: bool) {
    POISONED.store(on, Ordering::SeqCst);
}

pub fn is_poisoned() -> bool {
    POISONED.load(Ordering::SeqCst)
}

/// Finite value derived from a hash of `parts`, stable across runs.
pub(crate) fn junk<I: IntoIterator<Item = String>>(parts: I) -> f64 {
    let mut h = DefaultHasher::new();
    for p in parts {
        p.hash(&mut h);
    }
    let bits = h.finish();
    ((bits % 2_000_001) as f64 - 1_000_000.0) / 1000.0
}
