//! Cell-parallel evaluation for grid sweeps.
//!
//! With the `parallel` feature (on by default) and `jobs > 1`, cells run on a
//! dedicated rayon pool of `jobs` threads. Otherwise they run in order on the
//! calling thread. Either way the output vector follows input order, so the
//! worker count never changes results.

/// Applies `f` to every cell, preserving input order in the output.
pub fn map_cells<T, R, F>(cells: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 && cells.len() > 1 {
        use rayon::prelude::*;
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => return pool.install(|| cells.par_iter().map(&f).collect()),
            Err(_) => return cells.iter().map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    cells.iter().map(f).collect()
}

/// Lexicographic `(k, i)` cells of `0..=kmax x 0..=imax`.
pub fn ki_cells(kmax: usize, imax: usize) -> Vec<(usize, usize)> {
    (0..=kmax)
        .flat_map(|k| (0..=imax).map(move |i| (k, i)))
        .collect()
}

/// Whether this build can actually run cells concurrently.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
