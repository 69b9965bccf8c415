//! Parallel/sequential dispatch for the data-parallel loops.
//!
//! Every hot loop in the crate (per-index section norms, per-grid-point
//! densities, per-m sweeps, centering integrals) maps an index range through
//! [`map_range`]. With the `parallel` feature enabled, [`Execution::Parallel`]
//! runs on the rayon pool; without it, both modes run sequentially. Results
//! are collected in index order either way, so outputs are identical.

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `f` over `0..len`, preserving order.
pub fn map_range<R, F>(mode: Execution, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}

/// Like [`map_range`] for fallible closures; the first error in index order wins.
pub fn try_map_range<R, E, F>(mode: Execution, len: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_range(mode, len, f).into_iter().collect()
}
