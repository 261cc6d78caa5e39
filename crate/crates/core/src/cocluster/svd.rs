//! Truncated SVD of a sparse matrix by block subspace iteration.
//!
//! Iterates on the Gram operator of the smaller side (`A Aᵀ` when there are
//! no more rows than columns, `Aᵀ A` otherwise), with a Rayleigh–Ritz step
//! each round. Optionally a known singular pair is projected out first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    pub n_rows: usize,
    pub n_cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; n_rows + 1];
        for &(r, c, _) in triplets {
            assert!(r < n_rows && c < n_cols, "entry ({r}, {c}) out of bounds");
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; triplets.len()];
        let mut values = vec![T::zero(); triplets.len()];
        for &(r, c, v) in triplets {
            indices[next[r]] = c;
            values[next[r]] = v;
            next[r] += 1;
        }
        CsrMatrix {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut triplets = Vec::with_capacity(self.values.len());
        for r in 0..self.n_rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                triplets.push((self.indices[k], r, self.values[k]));
            }
        }
        CsrMatrix::from_triplets(self.n_cols, self.n_rows, &triplets)
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.n_cols);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n_rows)
            .map(|r| {
                self.values[self.indptr[r]..self.indptr[r + 1]]
                    .iter()
                    .copied()
                    .sum()
            })
            .collect()
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Modified Gram–Schmidt, two passes, against `fixed` and then each other.
/// Vectors that collapse are replaced by fresh random directions.
fn orthonormalize<T: Scalar>(block: &mut [Vec<T>], fixed: &[Vec<T>], rng: &mut ChaCha8Rng) {
    let dim = block.first().map_or(0, Vec::len);
    for j in 0..block.len() {
        for attempt in 0..4 {
            let before = norm(&block[j]);
            for _ in 0..2 {
                for f in fixed {
                    let c = dot(f, &block[j]);
                    axpy(-c, f, &mut block[j]);
                }
                let (done, rest) = block.split_at_mut(j);
                for q in done.iter() {
                    let c = dot(q, &rest[0]);
                    axpy(-c, q, &mut rest[0]);
                }
            }
            let after = norm(&block[j]);
            if after > T::of(1e-10) * before.max(T::min_positive_value()) && after > T::zero() {
                block[j].iter_mut().for_each(|x| *x /= after);
                break;
            }
            assert!(
                attempt < 3 && dim > fixed.len() + j,
                "cannot extend orthonormal basis"
            );
            block[j] = random_vector(dim, rng);
        }
    }
}

fn random_vector<T: Scalar>(dim: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    (0..dim).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect()
}

/// Eigen-decomposition of a small symmetric matrix (row-major `n × n`) by
/// cyclic Jacobi rotations. Returns eigenvalues in descending order and the
/// matching eigenvectors as columns of a row-major matrix.
pub fn symmetric_eigen<T: Scalar>(matrix: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let diag: T = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum();
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + new] = v[k * n + old];
        }
    }
    (values, vectors)
}

#[derive(Debug, Clone, Copy)]
pub struct SvdOptions {
    /// Extra subspace vectors beyond those requested.
    pub oversample: usize,
    pub max_iterations: usize,
    /// Relative residual tolerance on the Gram eigenpairs.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            oversample: 10,
            max_iterations: 2000,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

/// Leading singular triplets, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd<T> {
    pub values: Vec<T>,
    /// Left singular vectors (length `n_rows` each).
    pub u: Vec<Vec<T>>,
    /// Right singular vectors (length `n_cols` each).
    pub v: Vec<Vec<T>>,
    pub iterations: usize,
}

/// Computes the `k` largest singular triplets of `a`. If `deflate` holds a
/// unit singular pair `(u, v)` of `a`, that pair is excluded from the result.
pub fn truncated_svd<T: Scalar>(
    a: &CsrMatrix<T>,
    k: usize,
    deflate: Option<(&[T], &[T])>,
    opts: &SvdOptions,
) -> Result<TruncatedSvd<T>> {
    let at = a.transpose();
    // Work on the side with fewer coordinates.
    let (fwd, back, swapped) = if a.n_rows <= a.n_cols {
        (a, &at, false)
    } else {
        (&at, a, true)
    };
    let dim = fwd.n_rows;
    let fixed: Vec<Vec<T>> = deflate
        .map(|(u, v)| vec![if swapped { v.to_vec() } else { u.to_vec() }])
        .unwrap_or_default();
    let available = dim.saturating_sub(fixed.len());
    if k == 0 || k > available {
        return Err(Error::InvalidInput(format!(
            "cannot compute {k} singular vectors of a {}x{} matrix",
            a.n_rows, a.n_cols
        )));
    }
    let p = (k + opts.oversample).min(available);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<Vec<T>> = (0..p).map(|_| random_vector(dim, &mut rng)).collect();
    orthonormalize(&mut q, &fixed, &mut rng);

    let mut scratch = vec![T::zero(); fwd.n_cols];
    let gram = |x: &[T], out: &mut [T], scratch: &mut [T]| {
        back.mul_vec(x, scratch);
        fwd.mul_vec(scratch, out);
    };
    let tol = T::of(opts.tolerance).max(T::epsilon() * T::of(100.0));
    let mut z: Vec<Vec<T>> = vec![vec![T::zero(); dim]; p];
    let mut worst = T::infinity();
    for iteration in 1..=opts.max_iterations {
        for (qj, zj) in q.iter().zip(z.iter_mut()) {
            gram(qj, zj, &mut scratch);
        }
        for zj in z.iter_mut() {
            for f in &fixed {
                let c = dot(f, zj);
                axpy(-c, f, zj);
            }
        }
        let mut h = vec![T::zero(); p * p];
        for i in 0..p {
            for j in i..p {
                let hij = (dot(&q[i], &z[j]) + dot(&q[j], &z[i])) / T::of(2.0);
                h[i * p + j] = hij;
                h[j * p + i] = hij;
            }
        }
        let (evals, evecs) = symmetric_eigen(&h, p);
        // Ritz vectors and their images.
        let combine = |basis: &[Vec<T>], col: usize| -> Vec<T> {
            let mut out = vec![T::zero(); dim];
            for (r, b) in basis.iter().enumerate() {
                axpy(evecs[r * p + col], b, &mut out);
            }
            out
        };
        let ritz: Vec<Vec<T>> = (0..p).map(|c| combine(&q, c)).collect();
        let images: Vec<Vec<T>> = (0..p).map(|c| combine(&z, c)).collect();
        let scale = evals[0].abs().max(T::min_positive_value());
        worst = T::zero();
        for j in 0..k {
            let mut r = images[j].clone();
            axpy(-evals[j], &ritz[j], &mut r);
            worst = worst.max(norm(&r) / scale);
        }
        if worst <= tol {
            return Ok(finish(ritz, &evals, k, back, swapped, iteration));
        }
        q = images;
        orthonormalize(&mut q, &fixed, &mut rng);
    }
    Err(Error::SvdNotConverged {
        iterations: opts.max_iterations,
        residual: worst.as_f64(),
        tolerance: tol.as_f64(),
    })
}

fn finish<T: Scalar>(
    ritz: Vec<Vec<T>>,
    evals: &[T],
    k: usize,
    back: &CsrMatrix<T>,
    swapped: bool,
    iterations: usize,
) -> TruncatedSvd<T> {
    let mut values = Vec::with_capacity(k);
    let mut near = Vec::with_capacity(k);
    let mut far = Vec::with_capacity(k);
    for (j, mut x) in ritz.into_iter().take(k).enumerate() {
        let sigma = evals[j].max(T::zero()).sqrt();
        let nx = norm(&x);
        x.iter_mut().for_each(|e| *e /= nx);
        let mut y = vec![T::zero(); back.n_rows];
        back.mul_vec(&x, &mut y);
        let ny = norm(&y);
        if ny > T::zero() {
            y.iter_mut().for_each(|e| *e /= ny);
        }
        // Fix the sign so the largest-magnitude entry of the near side is positive.
        let pivot = x
            .iter()
            .copied()
            .fold(T::zero(), |m, e| if e.abs() > m.abs() { e } else { m });
        if pivot < T::zero() {
            x.iter_mut().for_each(|e| *e = -*e);
            y.iter_mut().for_each(|e| *e = -*e);
        }
        values.push(sigma);
        near.push(x);
        far.push(y);
    }
    let (u, v) = if swapped { (far, near) } else { (near, far) };
    TruncatedSvd {
        values,
        u,
        v,
        iterations,
    }
}
