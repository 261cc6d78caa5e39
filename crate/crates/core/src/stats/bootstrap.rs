use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapCi<T> {
    pub mean: T,
    pub lower: T,
    pub upper: T,
}

/// Linear-interpolation percentile of sorted data (`q` in [0, 1]).
pub fn percentile<T: Scalar>(sorted: &[T], q: T) -> T {
    assert!(!sorted.is_empty());
    let h = q * T::of_usize(sorted.len() - 1);
    let lo = h.floor();
    let i = lo.to_usize().unwrap_or(0).min(sorted.len() - 1);
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (h - lo) * (sorted[j] - sorted[i])
}

fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::of_usize(values.len())
}

/// Percentile bootstrap interval for the mean.
///
/// Resample `i` draws from its own ChaCha stream (`seed`, stream `i`), so the
/// result does not depend on how resamples are scheduled across threads.
pub fn bootstrap_mean_ci<T: Scalar>(
    values: &[T],
    n_resamples: usize,
    confidence: T,
    seed: u64,
) -> Result<BootstrapCi<T>> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "bootstrap needs at least one value".into(),
        ));
    }
    if n_resamples == 0 {
        return Err(Error::InvalidInput(
            "bootstrap needs at least one resample".into(),
        ));
    }
    if !(confidence > T::zero() && confidence < T::one()) {
        return Err(Error::InvalidInput("confidence must lie in (0, 1)".into()));
    }
    let n = values.len();
    let mut means: Vec<T> = (0..n_resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let total: T = (0..n).map(|_| values[rng.gen_range(0..n)]).sum();
            total / T::of_usize(n)
        })
        .collect();
    means.sort_by(|a, b| a.partial_cmp(b).expect("finite means"));
    let tail = (T::one() - confidence) / T::of(2.0);
    Ok(BootstrapCi {
        mean: mean(values),
        lower: percentile(&means, tail),
        upper: percentile(&means, T::one() - tail),
    })
}
