//! Execution helpers: rayon data-parallel maps with a sequential fallback.
//!
//! With the `parallel` feature (default), [`map_items`] fans work out over a
//! rayon pool sized by the caller; `jobs == Some(1)` or a disabled feature
//! runs the always-available sequential path. Output order matches input
//! order on both paths, so results are identical either way.

/// Sequential map, always available. Benchmarks call this directly to
/// compare against the rayon path.
pub fn map_items_seq<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_items<T: Sync, R: Send>(
    items: &[T],
    jobs: Option<usize>,
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    use rayon::prelude::*;
    match jobs {
        Some(1) => map_items_seq(items, f),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool");
            pool.install(|| items.par_iter().map(f).collect())
        }
        None => items.par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_items<T: Sync, R: Send>(
    items: &[T],
    _jobs: Option<usize>,
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    map_items_seq(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_and_preserve_order() {
        let items: Vec<u64> = (0..500).collect();
        let seq = map_items_seq(&items, |x| x * x);
        let par = map_items(&items, Some(4), |x| x * x);
        let one = map_items(&items, Some(1), |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq, one);
    }
}
