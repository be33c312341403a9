/// `f(0..count)` collected in index order, on `workers` threads when the
/// `parallel` feature is enabled (`None` uses the global pool). Results do
/// not depend on the worker count as long as `f` depends only on its index.
pub fn map_indexed<T, F>(count: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
        match workers {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
                Ok(pool) => pool.install(run),
                Err(_) => (0..count).map(&f).collect(),
            },
            None => run(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        (0..count).map(f).collect()
    }
}
