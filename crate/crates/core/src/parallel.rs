//! Static block scheduling of indexed work items over scoped threads.
//!
//! Item `i` always receives the same inputs (its own RNG stream), and results
//! come back in index order, so output does not depend on the worker count.

/// Evaluates `f(0..n)` on up to `workers` threads, each owning one contiguous
/// block of indices.
pub fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        return (0..n).map(&f).collect();
    }
    let block = n.div_ceil(workers);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = (w * block).min(n);
                let hi = ((w + 1) * block).min(n);
                scope.spawn(move || (lo..hi).map(f).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
