//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature (default) the hot loops run on rayon's pool;
//! `Exec::Sequential` or a build without the feature runs them inline. Both
//! paths produce identical results: every reduction used here is associative
//! and commutative, and argmax ties are broken by index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub(crate) fn map_reduce<T, M, R>(self, n: usize, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        M: Fn(usize) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..n)
                .into_par_iter()
                .map(&map)
                .reduce(|| identity.clone(), &reduce);
        }
        (0..n).map(map).fold(identity, reduce)
    }

    /// `map` over `0..n`, results in index order. Callers that sum floats
    /// fold the returned vector sequentially so both paths round identically.
    pub(crate) fn map_collect<T, M>(self, n: usize, map: M) -> Vec<T>
    where
        T: Send,
        M: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..n).into_par_iter().map(&map).collect();
        }
        (0..n).map(map).collect()
    }

    pub(crate) fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            data.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }

    /// Applies `f` to matching chunks of two equal-length slices.
    pub(crate) fn for_each_pair_chunk_mut<T, F>(self, a: &mut [T], b: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(&mut [T], &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            a.par_chunks_mut(chunk)
                .zip(b.par_chunks_mut(chunk))
                .for_each(|(x, y)| f(x, y));
            return;
        }
        a.chunks_mut(chunk).zip(b.chunks_mut(chunk)).for_each(|(x, y)| f(x, y));
    }
}

/// Splits `0..total` into blocks of at most `block` consecutive indices.
pub(crate) fn block_range(total: u64, block: u64, index: usize) -> std::ops::Range<u64> {
    let start = index as u64 * block;
    start..(start + block).min(total)
}

pub(crate) fn block_count(total: u64, block: u64) -> usize {
    total.div_ceil(block) as usize
}

/// Caps rayon's global pool. Has no effect without the `parallel` feature,
/// and only the first call in a process can succeed.
pub fn set_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}
