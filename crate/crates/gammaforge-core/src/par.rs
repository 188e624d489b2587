//! Data-parallel map with a sequential fallback.
//!
//! Independent levels, subgroups and decomposition cases can be checked
//! concurrently; every function routed through here must be pure, and the
//! output order is the input order, so results do not depend on scheduling.
//!
//! The `parallel` feature compiles the rayon path. At runtime
//! `GAMMAFORGE_THREADS=1` (or [`force_sequential`]) selects the sequential
//! path even when the feature is on, which is what the criterion bench uses
//! to compare the two.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQ: AtomicBool = AtomicBool::new(false);

/// Force the sequential path at runtime (used by benches and tests).
pub fn force_sequential(yes: bool) {
    FORCE_SEQ.store(yes, Ordering::SeqCst);
}

fn sequential() -> bool {
    if FORCE_SEQ.load(Ordering::SeqCst) {
        return true;
    }
    matches!(std::env::var("GAMMAFORGE_THREADS").as_deref(), Ok("1"))
}

/// Map `f` over `items`, in parallel when available, preserving order.
pub fn maybe_par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if !sequential() {
            return items.into_par_iter().map(f).collect();
        }
    }
    items.into_iter().map(f).collect()
}

/// Like [`maybe_par_map`] over an index range.
pub fn maybe_par_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    maybe_par_map((0..n).collect(), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let out = maybe_par_map((0..1000).collect::<Vec<_>>(), |i| i * 2);
        assert_eq!(out, (0..1000).map(|i| i * 2).collect::<Vec<_>>());
    }

    #[test]
    fn sequential_override_matches() {
        let items: Vec<usize> = (0..100).collect();
        let par = maybe_par_map(items.clone(), |i| i + 1);
        force_sequential(true);
        let seq = maybe_par_map(items, |i| i + 1);
        force_sequential(false);
        assert_eq!(par, seq);
    }
}
