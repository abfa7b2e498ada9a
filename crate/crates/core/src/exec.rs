//! Data-parallel helpers. With the `parallel` feature (on by default) work is
//! spread over the rayon pool; without it every mode runs sequentially.
//! Outputs always come back in index order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

impl ExecMode {
    /// The mode that will actually run, given how the crate was built.
    pub fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            ExecMode::Sequential
        }
    }
}

/// `f(0), f(1), …, f(n-1)`, keeping the `Some` results in index order.
pub fn filter_map_range<R, F>(mode: ExecMode, n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    match mode.effective() {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().filter_map(f).collect()
        }
        _ => (0..n).filter_map(f).collect(),
    }
}

/// `f(0), …, f(n-1)` in index order.
pub fn map_range<R, F>(mode: ExecMode, n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    filter_map_range(mode, n, |i| Some(f(i)))
}
