//! Independent trials driven from one master seed.
//!
//! Trial `i` draws from a ChaCha20 stream selected by `i`, so results do not
//! depend on scheduling and the parallel and sequential runners agree
//! element for element.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// The generator used by trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_trials_sequential<T, F>(seed: u64, count: usize, f: F) -> Vec<T>
where
    F: Fn(usize, &mut ChaCha20Rng) -> T,
{
    (0..count)
        .map(|i| f(i, &mut trial_rng(seed, i as u64)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn run_trials_parallel<T, F>(seed: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha20Rng) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, i as u64)))
        .collect()
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn run_trials<T, F>(seed: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha20Rng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        run_trials_parallel(seed, count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_sequential(seed, count, f)
    }
}

/// Order-preserving map over a slice.
pub fn par_map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
