//! Data-parallel helpers. With the `parallel` feature (default) work is
//! spread with rayon; without it, or under [`Parallelism::Sequential`],
//! the same code paths run on the calling thread. Results never depend on
//! which path ran.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    Sequential,
    /// Rayon's global pool.
    #[default]
    Auto,
    /// A dedicated pool with exactly this many workers.
    Threads(usize),
}

impl Parallelism {
    pub fn from_threads(threads: Option<usize>) -> Parallelism {
        match threads {
            None => Parallelism::Auto,
            Some(0) | Some(1) => Parallelism::Sequential,
            Some(n) => Parallelism::Threads(n),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Parallelism::Sequential
    }

    /// Runs `f` inside the pool this setting asks for.
    pub fn install<R: Send>(self, f: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if let Parallelism::Threads(n) = self {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                return pool.install(f);
            }
        }
        f()
    }
}

/// Order-preserving map over a slice.
pub fn map_slice<T, R, F>(par: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..len`.
pub fn map_range<R, F>(par: Parallelism, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && len > 1 {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..len).map(f).collect()
}
