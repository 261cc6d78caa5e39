//! Seeded k-means with k-means++ initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::scalar::Scalar;

/// Points stored row-major, `dim` coordinates each.
#[derive(Debug, Clone)]
pub struct Points<'a, T> {
    pub data: &'a [T],
    pub dim: usize,
}

impl<T: Scalar> Points<'_, T> {
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult<T> {
    pub labels: Vec<usize>,
    pub centroids: Vec<T>,
    pub inertia: T,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct KMeansOptions {
    pub k: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

/// Best of `restarts` Lloyd runs by inertia; ties keep the earliest restart.
/// Restart `r` uses ChaCha stream `r` of `seed`.
pub fn kmeans<T: Scalar>(points: &Points<'_, T>, opts: &KMeansOptions) -> KMeansResult<T> {
    let n = points.len();
    assert!(opts.k >= 1 && opts.k <= n, "k must lie in 1..=n");
    let mut best: Option<KMeansResult<T>> = None;
    for r in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(r as u64);
        let run = lloyd(points, opts.k, opts.max_iterations, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}

fn plus_plus<T: Scalar>(points: &Points<'_, T>, k: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let n = points.len();
    let dim = points.dim;
    let mut centroids = Vec::with_capacity(k * dim);
    let mut chosen = vec![false; n];
    let first = rng.gen_range(0..n);
    chosen[first] = true;
    centroids.extend_from_slice(points.get(first));
    let mut d2: Vec<T> = (0..n)
        .map(|i| sq_dist(points.get(i), points.get(first)))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().map(|d| d.as_f64()).sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, d) in d2.iter().enumerate() {
                let d = d.as_f64();
                if d > 0.0 {
                    pick = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("positive mass")
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen[pick] = true;
        let c = points.get(pick).to_vec();
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.get(i), &c));
        }
        centroids.extend_from_slice(&c);
    }
    centroids
}

fn nearest<T: Scalar>(p: &[T], centroids: &[T], dim: usize, current: usize) -> (usize, T) {
    let mut best = current;
    let mut best_d = if current < centroids.len() / dim.max(1) {
        sq_dist(p, &centroids[current * dim..(current + 1) * dim])
    } else {
        T::infinity()
    };
    for (c, centroid) in centroids.chunks(dim).enumerate() {
        let d = sq_dist(p, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    (best, best_d)
}

fn lloyd<T: Scalar>(
    points: &Points<'_, T>,
    k: usize,
    max_iterations: usize,
    rng: &mut ChaCha8Rng,
) -> KMeansResult<T> {
    let n = points.len();
    let dim = points.dim;
    let mut centroids = plus_plus(points, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut dists = vec![T::zero(); n];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let assigned: Vec<(usize, T)> = (0..n)
            .into_par_iter()
            .map(|i| nearest(points.get(i), &centroids, dim, labels[i]))
            .collect();
        let mut changed = false;
        for (i, (l, d)) in assigned.into_iter().enumerate() {
            changed |= labels[i] != l;
            labels[i] = l;
            dists[i] = d;
        }
        changed |= fix_empty(k, &mut labels, &mut dists);
        let mut sums = vec![T::zero(); k * dim];
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, &x) in sums[l * dim..(l + 1) * dim].iter_mut().zip(points.get(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            let m = T::of_usize(counts[c]);
            for j in 0..dim {
                centroids[c * dim + j] = sums[c * dim + j] / m;
            }
        }
        if !changed || iterations >= max_iterations {
            break;
        }
    }
    let inertia = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(points.get(i), &centroids[l * dim..(l + 1) * dim]))
        .sum();
    KMeansResult {
        labels,
        centroids,
        inertia,
        iterations,
    }
}

/// Gives every empty cluster the point farthest from its centroid, taken
/// from a cluster that has more than one member.
fn fix_empty<T: Scalar>(k: usize, labels: &mut [usize], dists: &mut [T]) -> bool {
    let mut moved = false;
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut far: Option<usize> = None;
        for i in 0..labels.len() {
            if counts[labels[i]] > 1 && far.is_none_or(|f| dists[i] > dists[f]) {
                far = Some(i);
            }
        }
        let i = far.expect("k <= n leaves a donor cluster");
        counts[labels[i]] -= 1;
        counts[c] += 1;
        labels[i] = c;
        dists[i] = T::zero();
        moved = true;
    }
    moved
}
