//! Data-parallel mapping with a sequential fallback. With the `parallel`
//! feature the work is spread over the rayon pool; without it the same
//! calls run on the current thread.

/// True when the crate was built with the `parallel` feature.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Order-preserving map on the current thread.
pub fn seq_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Order-preserving map, parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    seq_map(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| x * x + 1;
        assert_eq!(par_map(&xs, f), seq_map(&xs, f));
    }
}
