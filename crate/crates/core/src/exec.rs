//! Worker-count-independent parallel map.

use rayon::prelude::*;

/// Evaluates `f(0..count)` and returns the results in index order. The
/// output does not depend on `workers`; `None` uses the global pool.
pub fn map_indexed<T, F>(count: u64, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    match workers {
        Some(1) => (0..count).map(&f).collect(),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}
