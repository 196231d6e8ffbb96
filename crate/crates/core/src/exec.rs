//! Sequential / data-parallel execution switch.
//!
//! Hot loops (segment-pair scans, rotation searches, batch validation) are
//! written once against these helpers. With the `parallel` feature they fan
//! out over rayon; without it every strategy runs sequentially. Both paths
//! must produce identical results.

/// How a batch loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Parallel when the `parallel` feature is on and the batch is large enough.
    #[default]
    Auto,
    Sequential,
    /// Parallel whenever the `parallel` feature is on, regardless of size.
    Parallel,
}

/// Batches smaller than this stay sequential under [`Execution::Auto`].
pub const AUTO_PARALLEL_THRESHOLD: usize = 64;

impl Execution {
    pub fn is_parallel(self, len: usize) -> bool {
        if !cfg!(feature = "parallel") {
            return false;
        }
        match self {
            Execution::Auto => len >= AUTO_PARALLEL_THRESHOLD,
            Execution::Sequential => false,
            Execution::Parallel => true,
        }
    }
}

/// Maps `f` over `0..len`, preserving order.
pub fn map_indices<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel(len) {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// True if `pred` holds for any index in `0..len`.
pub fn any_index<F>(exec: Execution, len: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel(len) {
        use rayon::prelude::*;
        return (0..len).into_par_iter().any(pred);
    }
    let _ = exec;
    (0..len).any(pred)
}

/// Index minimizing `key` over `0..len`; ties resolve to the smallest index.
/// Returns `None` for an empty range.
pub fn argmin_index<F>(exec: Execution, len: usize, key: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let better = |a: (usize, f64), b: (usize, f64)| match a.1.total_cmp(&b.1) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if a.0 <= b.0 {
                a
            } else {
                b
            }
        }
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel(len) {
        use rayon::prelude::*;
        return (0..len)
            .into_par_iter()
            .map(|i| (i, key(i)))
            .reduce_with(better);
    }
    let _ = exec;
    (0..len).map(|i| (i, key(i))).reduce(better)
}
