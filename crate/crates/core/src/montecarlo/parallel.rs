use rayon::prelude::*;

/// Evaluates `work(0), work(1), …` in parallel batches and feeds the results
/// to `absorb` strictly in index order until it returns `true`.
///
/// Chunks past the stopping point may be computed but are never absorbed, so
/// the absorbed prefix is identical for every `workers` value. `first_batch`
/// sizes the first round (e.g. the chunk count needed to reach a minimum
/// sample size); later rounds use a few chunks per worker.
pub fn run_chunked<A, W, S>(workers: usize, first_batch: usize, work: W, mut absorb: S)
where
    A: Send,
    W: Fn(u64) -> A + Sync,
    S: FnMut(A) -> bool,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    let threads = pool.current_num_threads().max(1);
    let mut next = 0u64;
    let mut batch = first_batch.max(1);
    loop {
        let results: Vec<A> = pool.install(|| (next..next + batch as u64).into_par_iter().map(&work).collect());
        next += batch as u64;
        for r in results {
            if absorb(r) {
                return;
            }
        }
        batch = 4 * threads;
    }
}
