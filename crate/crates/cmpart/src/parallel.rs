//! Thin switch between rayon-powered and sequential execution.
//!
//! With the `parallel` feature (default) the `par_map` helpers fan work out
//! over the global rayon pool; without it they run the same closures on the
//! current thread. The criterion bench suite compares both paths through
//! [`ExecMode`], which forces the sequential path even in a parallel build.

/// Execution mode for the data-parallel inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, mode: ExecMode, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match mode {
        ExecMode::Parallel => items.into_par_iter().map(f).collect(),
        ExecMode::Sequential => items.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, _mode: ExecMode, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Map over indices `0..n`, parallel when enabled.
pub fn par_map_indices<U, F>(n: usize, mode: ExecMode, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    par_map((0..n).collect(), mode, f)
}
