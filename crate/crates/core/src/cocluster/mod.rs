//! Spectral co-clustering of the identifier × user matrix.
//!
//! The matrix is scaled to `An = D1^-1/2 M D2^-1/2`. Its leading singular
//! pair is known in closed form (`sqrt(d1)`, `sqrt(d2)`, value 1), so it is
//! projected out and the next singular vectors give a joint embedding of rows
//! and columns that is clustered with k-means.

pub mod kmeans;
pub mod svd;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{BipartiteMatrix, IdentifierIndex};
use crate::scalar::Scalar;
use kmeans::{KMeansOptions, Points};
use svd::{CsrMatrix, SvdOptions};

pub use svd::{truncated_svd, TruncatedSvd};

#[derive(Debug, Clone, Serialize)]
pub struct CoClusterConfig {
    pub k: usize,
    /// Defaults to `ceil(log2 k)`, at least 1.
    pub n_singular_vectors: Option<usize>,
    pub kmeans_restarts: usize,
    /// Lloyd iterations per restart.
    pub max_iterations: usize,
    pub seed: u64,
    pub svd_max_iterations: usize,
    pub svd_tolerance: f64,
}

impl CoClusterConfig {
    pub fn new(k: usize) -> Self {
        CoClusterConfig {
            k,
            n_singular_vectors: None,
            kmeans_restarts: 10,
            max_iterations: 300,
            seed: 0,
            svd_max_iterations: 2000,
            svd_tolerance: 1e-10,
        }
    }

    pub fn singular_vectors(&self) -> usize {
        self.n_singular_vectors
            .unwrap_or_else(|| default_singular_vectors(self.k))
    }
}

impl Default for CoClusterConfig {
    fn default() -> Self {
        CoClusterConfig::new(100)
    }
}

pub fn default_singular_vectors(k: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < k {
        bits += 1;
    }
    bits.max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoClusterResult<T> {
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<usize>,
    pub objective: T,
}

impl<T> CoClusterResult<T> {
    pub fn n_clusters(&self) -> usize {
        self.row_labels
            .iter()
            .chain(&self.col_labels)
            .max()
            .map_or(0, |&m| m + 1)
    }
}

/// `An` together with the square roots of the row and column sums.
pub struct NormalizedMatrix<T> {
    pub matrix: CsrMatrix<T>,
    pub sqrt_row_sums: Vec<T>,
    pub sqrt_col_sums: Vec<T>,
}

pub fn normalize<T: Scalar>(m: &BipartiteMatrix) -> Result<NormalizedMatrix<T>> {
    if m.n_rows() == 0 || m.n_cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let rs = m.row_sums();
    let cs = m.col_sums();
    if let Some(i) = rs.iter().position(|&s| s == 0) {
        return Err(Error::ZeroLine {
            axis: "row",
            index: i,
        });
    }
    if let Some(i) = cs.iter().position(|&s| s == 0) {
        return Err(Error::ZeroLine {
            axis: "column",
            index: i,
        });
    }
    let sr: Vec<T> = rs.iter().map(|&s| T::of(s as f64).sqrt()).collect();
    let sc: Vec<T> = cs.iter().map(|&s| T::of(s as f64).sqrt()).collect();
    let mut triplets = Vec::with_capacity(m.nnz());
    for (r, &sr_r) in sr.iter().enumerate() {
        for (c, v) in m.row(r) {
            triplets.push((r, c, T::of(v as f64) / (sr_r * sc[c])));
        }
    }
    Ok(NormalizedMatrix {
        matrix: CsrMatrix::from_triplets(m.n_rows(), m.n_cols(), &triplets),
        sqrt_row_sums: sr,
        sqrt_col_sums: sc,
    })
}

fn unit<T: Scalar>(v: &[T]) -> Vec<T> {
    let n = svd::norm(v);
    v.iter().map(|&x| x / n).collect()
}

/// Largest singular value of `An`, computed without deflation.
pub fn leading_singular_value<T: Scalar>(m: &BipartiteMatrix, seed: u64) -> Result<T> {
    let norm = normalize::<T>(m)?;
    let opts = SvdOptions {
        oversample: 4,
        seed,
        ..SvdOptions::default()
    };
    Ok(truncated_svd(&norm.matrix, 1, None, &opts)?.values[0])
}

pub fn spectral_cocluster<T: Scalar>(
    m: &BipartiteMatrix,
    cfg: &CoClusterConfig,
) -> Result<CoClusterResult<T>> {
    let norm = normalize::<T>(m)?;
    let (rows, cols) = (m.n_rows(), m.n_cols());
    if cfg.k == 0 || cfg.k > rows.min(cols) {
        return Err(Error::InvalidInput(format!(
            "k = {} must lie in 1..={} for a {rows}x{cols} matrix",
            cfg.k,
            rows.min(cols)
        )));
    }
    if cfg.n_singular_vectors == Some(0) {
        return Err(Error::InvalidInput(
            "n_singular_vectors must be at least 1".into(),
        ));
    }
    if cfg.k == 1 {
        return Ok(CoClusterResult {
            row_labels: vec![0; rows],
            col_labels: vec![0; cols],
            objective: T::zero(),
        });
    }
    let n_sv = cfg.singular_vectors().min(rows.min(cols) - 1);
    let u0 = unit(&norm.sqrt_row_sums);
    let v0 = unit(&norm.sqrt_col_sums);
    let opts = SvdOptions {
        oversample: 10,
        max_iterations: cfg.svd_max_iterations,
        tolerance: cfg.svd_tolerance,
        seed: cfg.seed,
    };
    let svd = truncated_svd(&norm.matrix, n_sv, Some((&u0, &v0)), &opts)?;
    log::debug!(
        "co-clustering: {n_sv} singular vectors after {} iterations, values {:?}",
        svd.iterations,
        svd.values
    );

    let mut data = Vec::with_capacity((rows + cols) * n_sv);
    for r in 0..rows {
        data.extend(svd.u.iter().map(|u| u[r] / norm.sqrt_row_sums[r]));
    }
    for c in 0..cols {
        data.extend(svd.v.iter().map(|v| v[c] / norm.sqrt_col_sums[c]));
    }
    let km = kmeans::kmeans(
        &Points {
            data: &data,
            dim: n_sv,
        },
        &KMeansOptions {
            k: cfg.k,
            restarts: cfg.kmeans_restarts,
            max_iterations: cfg.max_iterations,
            seed: cfg.seed,
        },
    );
    let (row_labels, col_labels) = relabel(&km.labels[..rows], &km.labels[rows..], cfg.k);
    Ok(CoClusterResult {
        row_labels,
        col_labels,
        objective: km.inertia,
    })
}

/// Renumbers clusters by descending row count, then descending column count,
/// then first appearance. Unused ids are dropped.
pub fn relabel(rows: &[usize], cols: &[usize], k: usize) -> (Vec<usize>, Vec<usize>) {
    let mut row_n = vec![0usize; k];
    let mut col_n = vec![0usize; k];
    let mut first = vec![usize::MAX; k];
    for (i, &l) in rows.iter().chain(cols).enumerate() {
        first[l] = first[l].min(i);
    }
    rows.iter().for_each(|&l| row_n[l] += 1);
    cols.iter().for_each(|&l| col_n[l] += 1);
    let mut order: Vec<usize> = (0..k).filter(|&c| first[c] != usize::MAX).collect();
    order.sort_by_key(|&c| {
        (
            std::cmp::Reverse(row_n[c]),
            std::cmp::Reverse(col_n[c]),
            first[c],
        )
    });
    let mut map = vec![usize::MAX; k];
    for (new, &old) in order.iter().enumerate() {
        map[old] = new;
    }
    (
        rows.iter().map(|&l| map[l]).collect(),
        cols.iter().map(|&l| map[l]).collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSummary {
    pub cluster: usize,
    pub n_identifiers: usize,
    pub n_users: usize,
    /// `(phrase, bio_count)` by descending bio count.
    pub top: Vec<(String, u64)>,
}

pub fn cluster_summary<T>(
    index: &IdentifierIndex,
    m: &BipartiteMatrix,
    result: &CoClusterResult<T>,
    top: usize,
) -> Vec<ClusterSummary> {
    let k = result.n_clusters();
    let mut out: Vec<ClusterSummary> = (0..k)
        .map(|cluster| ClusterSummary {
            cluster,
            n_identifiers: 0,
            n_users: 0,
            top: Vec::new(),
        })
        .collect();
    for (r, &l) in result.row_labels.iter().enumerate() {
        out[l].n_identifiers += 1;
        out[l]
            .top
            .push((m.rows[r].clone(), index.bio_count(&m.rows[r])));
    }
    for &l in &result.col_labels {
        out[l].n_users += 1;
    }
    for s in &mut out {
        s.top
            .sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        s.top.truncate(top);
    }
    out
}

/// Writes `label<TAB>cluster` lines under the given header.
pub fn write_assignments<W: Write>(
    w: &mut W,
    header: [&str; 2],
    labels: &[String],
    clusters: &[usize],
) -> std::io::Result<()> {
    crate::tsv::write_row(w, &header)?;
    for (label, c) in labels.iter().zip(clusters) {
        crate::tsv::write_row(w, &[label.as_str(), &c.to_string()])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(n_rows: usize, n_cols: usize, pairs: &[(usize, usize)]) -> BipartiteMatrix {
        BipartiteMatrix::from_pairs(
            (0..n_rows).map(|i| format!("i{i}")).collect(),
            (0..n_cols).map(|j| format!("u{j}")).collect(),
            pairs,
        )
    }

    fn same_partition(a: &[usize], b: &[usize]) -> bool {
        let mut fwd = std::collections::HashMap::new();
        let mut back = std::collections::HashMap::new();
        a.iter()
            .zip(b)
            .all(|(x, y)| *fwd.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x)
    }

    fn planted(blocks: usize, rows: usize, cols: usize, noise: f64, seed: u64) -> BipartiteMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for r in 0..blocks * rows {
            for c in 0..blocks * cols {
                let inside = r / rows == c / cols;
                let p = if inside { 0.6 } else { noise };
                if rng.gen::<f64>() < p {
                    pairs.push((r, c));
                }
            }
        }
        matrix(blocks * rows, blocks * cols, &pairs)
    }

    fn normalized_cut(m: &BipartiteMatrix, rows: &[usize], cols: &[usize], k: usize) -> f64 {
        let mut cut = vec![0.0; k];
        let mut vol = vec![0.0; k];
        for r in 0..m.n_rows() {
            for (c, v) in m.row(r) {
                let v = v as f64;
                vol[rows[r]] += v;
                vol[cols[c]] += v;
                if rows[r] != cols[c] {
                    cut[rows[r]] += v;
                    cut[cols[c]] += v;
                }
            }
        }
        (0..k)
            .filter(|&c| vol[c] > 0.0)
            .map(|c| cut[c] / vol[c])
            .sum()
    }

    #[test]
    fn default_vector_count() {
        assert_eq!(default_singular_vectors(1), 1);
        assert_eq!(default_singular_vectors(2), 1);
        assert_eq!(default_singular_vectors(3), 2);
        assert_eq!(default_singular_vectors(100), 7);
        assert_eq!(CoClusterConfig::new(128).singular_vectors(), 7);
    }

    #[test]
    fn disconnected_bicliques() {
        let m = matrix(
            4,
            4,
            &[
                (0, 0),
                (0, 1),
                (1, 0),
                (1, 1),
                (2, 2),
                (2, 3),
                (3, 2),
                (3, 3),
            ],
        );
        let r: CoClusterResult<f64> = spectral_cocluster(&m, &CoClusterConfig::new(2)).unwrap();
        assert_eq!(r.row_labels[0], r.row_labels[1]);
        assert_eq!(r.row_labels[2], r.row_labels[3]);
        assert_ne!(r.row_labels[0], r.row_labels[2]);
        assert_eq!(r.col_labels[0], r.row_labels[0]);
        assert_eq!(r.col_labels[3], r.row_labels[3]);
    }

    #[test]
    fn single_cluster() {
        let m = planted(2, 5, 5, 0.1, 1);
        let r: CoClusterResult<f64> = spectral_cocluster(&m, &CoClusterConfig::new(1)).unwrap();
        assert!(r.row_labels.iter().chain(&r.col_labels).all(|&l| l == 0));
    }

    #[test]
    fn zero_row_rejected() {
        let m = matrix(3, 2, &[(0, 0), (1, 1)]);
        let err = spectral_cocluster::<f64>(&m, &CoClusterConfig::new(2)).unwrap_err();
        assert!(matches!(
            err,
            Error::ZeroLine {
                axis: "row",
                index: 2
            }
        ));
    }

    #[test]
    fn k_larger_than_matrix_rejected() {
        let m = matrix(2, 2, &[(0, 0), (1, 1)]);
        assert!(spectral_cocluster::<f64>(&m, &CoClusterConfig::new(3)).is_err());
    }

    #[test]
    fn leading_singular_value_is_one() {
        for seed in 0..3 {
            let m = planted(3, 8, 15, 0.05, seed);
            let s: f64 = leading_singular_value(&m, seed).unwrap();
            assert!((s - 1.0).abs() < 1e-8, "{s}");
        }
    }

    #[test]
    fn planted_blocks_recovered_and_minimize_cut() {
        let m = planted(3, 10, 20, 0.05, 11);
        let mut cfg = CoClusterConfig::new(3);
        cfg.seed = 5;
        let r: CoClusterResult<f64> = spectral_cocluster(&m, &cfg).unwrap();
        let truth_rows: Vec<usize> = (0..30).map(|i| i / 10).collect();
        let truth_cols: Vec<usize> = (0..60).map(|j| j / 20).collect();
        assert!(same_partition(&r.row_labels, &truth_rows));

        let planted_cut = normalized_cut(&m, &truth_rows, &truth_cols, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let mut rows = truth_rows.clone();
            let mut cols = truth_cols.clone();
            for _ in 0..rng.gen_range(1..6) {
                let i = rng.gen_range(0..rows.len());
                rows[i] = rng.gen_range(0..3);
                let j = rng.gen_range(0..cols.len());
                cols[j] = rng.gen_range(0..3);
            }
            assert!(normalized_cut(&m, &rows, &cols, 3) >= planted_cut - 1e-12);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let m = planted(4, 6, 10, 0.08, 3);
        let mut cfg = CoClusterConfig::new(4);
        cfg.seed = 17;
        let a: CoClusterResult<f64> = spectral_cocluster(&m, &cfg).unwrap();
        let b: CoClusterResult<f64> = spectral_cocluster(&m, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn row_permutation_equivariance() {
        let m = planted(3, 10, 20, 0.03, 8);
        let perm: Vec<usize> = (0..30).map(|i| (i * 7) % 30).collect();
        let mut pairs = Vec::new();
        for (new, &old) in perm.iter().enumerate() {
            for (c, _) in m.row(old) {
                pairs.push((new, c));
            }
        }
        let p = matrix(30, 60, &pairs);
        let cfg = CoClusterConfig::new(3);
        let a: CoClusterResult<f64> = spectral_cocluster(&m, &cfg).unwrap();
        let b: CoClusterResult<f64> = spectral_cocluster(&p, &cfg).unwrap();
        let permuted: Vec<usize> = perm.iter().map(|&old| a.row_labels[old]).collect();
        assert!(same_partition(&permuted, &b.row_labels));
        assert!(same_partition(&a.col_labels, &b.col_labels));
    }

    #[test]
    fn block_diagonal_exact() {
        let mut pairs = Vec::new();
        let sizes = [(3, 4), (5, 2), (2, 6), (4, 4)];
        let (mut r0, mut c0) = (0, 0);
        let mut truth = Vec::new();
        for (b, &(nr, nc)) in sizes.iter().enumerate() {
            for r in 0..nr {
                truth.push(b);
                for c in 0..nc {
                    pairs.push((r0 + r, c0 + c));
                }
            }
            r0 += nr;
            c0 += nc;
        }
        let m = matrix(r0, c0, &pairs);
        let r: CoClusterResult<f64> = spectral_cocluster(&m, &CoClusterConfig::new(4)).unwrap();
        assert!(same_partition(&r.row_labels, &truth));
        assert_eq!(r.n_clusters(), 4);
    }

    #[test]
    fn works_in_single_precision() {
        let m = planted(3, 10, 20, 0.02, 4);
        let mut cfg = CoClusterConfig::new(3);
        cfg.svd_tolerance = 1e-5;
        let r: CoClusterResult<f32> = spectral_cocluster(&m, &cfg).unwrap();
        let truth: Vec<usize> = (0..30).map(|i| i / 10).collect();
        assert!(same_partition(&r.row_labels, &truth));
    }

    #[test]
    fn relabel_orders_by_row_count() {
        let (rows, cols) = relabel(&[2, 2, 0, 1, 1, 1], &[0, 0, 2], 3);
        assert_eq!(rows, vec![1, 1, 2, 0, 0, 0]);
        assert_eq!(cols, vec![2, 2, 1]);
    }
}
