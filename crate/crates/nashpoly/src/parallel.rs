//! Thread-pool drivers. Paths and supports are independent, so both fan
//! out over scoped threads; results are always returned in input order,
//! which keeps output independent of the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nashpoly_core::homotopy::retrack_collisions;
use nashpoly_core::nash::{merge_outcomes, prepare_library, PathTracker, Sequential, SupportOutcome};
use nashpoly_core::{
    enumerate_supports, solve_support, track_path, Game, HomotopyConfig, NashReport, PathResult, PolySystem,
    Result, SolveMethod, SolveOptions, StartLibrary,
};
use num_complex::Complex64;

/// Applies `f` to every item on up to `workers` threads, in input order.
pub fn map_ordered<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().expect("result slots")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots")
        .into_iter()
        .map(|r| r.expect("every item processed"))
        .collect()
}

/// Tracks the paths of one batch on a fixed number of threads.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub workers: usize,
}

impl PathTracker for Threaded {
    fn track(
        &self,
        start: &PolySystem<Complex64>,
        target: &PolySystem<Complex64>,
        roots: &[Vec<Complex64>],
        config: &HomotopyConfig,
    ) -> Vec<Result<PathResult>> {
        let mut results = map_ordered(roots, self.workers, |r| track_path(start, target, r, config));
        retrack_collisions(start, target, roots, &mut results, config);
        results
    }
}

/// Like [`nashpoly_core::find_all_nash`], with supports solved
/// concurrently on `workers` threads.
pub fn find_all_nash_parallel(
    game: &Game,
    options: &SolveOptions,
    library: Option<&StartLibrary>,
    workers: usize,
) -> Result<NashReport> {
    let owned;
    let library = match (library, options.method) {
        (None, SolveMethod::StartLibrary) => {
            owned = prepare_library(game.format(), options)?;
            Some(&owned)
        }
        (lib, _) => lib,
    };
    let supports: Vec<_> = enumerate_supports(game.format(), &options.supports).collect();
    let outcomes: Vec<Result<SupportOutcome>> =
        map_ordered(&supports, workers, |s| solve_support(game, s, library, &Sequential, options));
    merge_outcomes(game, outcomes.into_iter().collect::<Result<Vec<_>>>()?, options)
}
