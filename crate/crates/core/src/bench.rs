//! Synthetic data and clustering quality metrics.
//!
//! Random streams: every generator draws from `ChaCha8Rng` seeded with the
//! user seed, with a fixed stream id per purpose ([`STREAM_CENTERS`],
//! [`STREAM_MEMBERS`], [`STREAM_OUTLIERS`], [`STREAM_CLIQUE_NOISE`]), so
//! output is identical across platforms and independent of call order.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::cdsc::{default_alpha, fast_cdsc_traced, solve_cdsc, CdscConfig, ConstrainedProgram};
use crate::error::{Error, Result};
use crate::scod::{gaussian_affinity, median_off_diagonal, scod, ScodConfig, ScodResult, Sigma};
use crate::types::{AffinityMatrix, IndexSet};

pub const STREAM_CENTERS: u64 = 1;
pub const STREAM_MEMBERS: u64 = 2;
pub const STREAM_OUTLIERS: u64 = 3;
pub const STREAM_CLIQUE_NOISE: u64 = 4;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Parameters of [`gen_synthetic`]: `k` clusters of `m` points in `d`
/// dimensions with noise `sigma`, plus `l` uniform outliers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenParams {
    pub k: usize,
    pub m: usize,
    pub d: usize,
    pub sigma: f64,
    pub l: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { k: 10, m: 100, d: 32, sigma: 0.2, l: 100, seed: 0 }
    }
}

/// Points with ground truth. Label `None` marks an outlier.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// `n x d`, one point per row.
    pub points: DMatrix<f64>,
    pub labels: Vec<Option<usize>>,
    pub params: GenParams,
}

impl LabeledDataset {
    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn outliers(&self) -> IndexSet {
        IndexSet::new(self.labels.iter().enumerate().filter(|(_, l)| l.is_none()).map(|(i, _)| i))
    }
}

/// Cluster centers uniform in `[0,1]^d`, members at center plus
/// `Normal(0, sigma)` per coordinate (not clipped), outliers uniform in
/// `[0,1]^d`. Points are ordered cluster by cluster, outliers last.
pub fn gen_synthetic(params: GenParams) -> Result<LabeledDataset> {
    let GenParams { k, m, d, sigma, l, seed } = params;
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::invalid("sigma", e.to_string()))?;
    let n = k * m + l;
    let mut points = DMatrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    let mut centers_rng = rng(seed, STREAM_CENTERS);
    let mut members_rng = rng(seed, STREAM_MEMBERS);
    let mut row = 0;
    for c in 0..k {
        let center: Vec<f64> = (0..d).map(|_| centers_rng.random::<f64>()).collect();
        for _ in 0..m {
            for (t, &mu) in center.iter().enumerate() {
                points[(row, t)] = mu + noise.sample(&mut members_rng);
            }
            labels.push(Some(c));
            row += 1;
        }
    }
    let mut outlier_rng = rng(seed, STREAM_OUTLIERS);
    for _ in 0..l {
        for t in 0..d {
            points[(row, t)] = outlier_rng.random::<f64>();
        }
        labels.push(None);
        row += 1;
    }
    Ok(LabeledDataset { points, labels, params })
}

/// Squared Euclidean distances between the rows of `points`.
pub fn squared_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (points.row(i) - points.row(j)).norm_squared();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Gaussian kernel `exp(-|p_i - p_j|^2 / (2 sigma^2))` with `sigma` the
/// median Euclidean distance between points.
pub fn point_affinity(points: &DMatrix<f64>) -> Result<AffinityMatrix> {
    let d2 = squared_distances(points);
    let sigma = median_off_diagonal(&d2.map(f64::sqrt)).ok_or(Error::DegenerateSigma)?;
    gaussian_affinity(&d2, Sigma::Value(sigma))
}

/// `|O ∩ O*| / |O ∪ O*|`, and 1 when both sets are empty.
pub fn jaccard(pred: &IndexSet, truth: &IndexSet) -> f64 {
    let union = pred.union(truth).len();
    if union == 0 {
        1.0
    } else {
        pred.intersection(truth).len() as f64 / union as f64
    }
}

fn contingency<P: Ord + Clone, T: Ord + Clone>(pred: &[P], truth: &[T]) -> Result<BTreeMap<(P, T), usize>> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), found: pred.len() });
    }
    let mut table = BTreeMap::new();
    for (p, t) in pred.iter().zip(truth) {
        *table.entry((p.clone(), t.clone())).or_insert(0) += 1;
    }
    Ok(table)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts.filter(|&c| c > 0).map(|c| c as f64 / n).map(|p| -p * p.ln()).sum()
}

fn marginals<K: Ord + Clone>(keys: impl Iterator<Item = (K, usize)>) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for (k, c) in keys {
        *m.entry(k).or_insert(0) += c;
    }
    m
}

/// Homogeneity, completeness and V-measure (their harmonic mean) of a
/// predicted labeling against the truth. Any ordered label type works;
/// with `Option` labels, `None` is one class like any other.
pub fn homogeneity_completeness_v<P: Ord + Clone, T: Ord + Clone>(pred: &[P], truth: &[T]) -> Result<(f64, f64, f64)> {
    let table = contingency(pred, truth)?;
    let n = pred.len() as f64;
    if pred.is_empty() {
        return Ok((1.0, 1.0, 1.0));
    }
    let by_pred = marginals(table.iter().map(|((p, _), &c)| (p.clone(), c)));
    let by_truth = marginals(table.iter().map(|((_, t), &c)| (t.clone(), c)));
    let h_truth = entropy(by_truth.values().copied(), n);
    let h_pred = entropy(by_pred.values().copied(), n);
    let joint = entropy(table.values().copied(), n);
    // H(T|P) = H(T,P) - H(P) and H(P|T) = H(T,P) - H(T).
    let homogeneity = if h_truth == 0.0 { 1.0 } else { 1.0 - (joint - h_pred) / h_truth };
    let completeness = if h_pred == 0.0 { 1.0 } else { 1.0 - (joint - h_truth) / h_pred };
    let v = if homogeneity + completeness == 0.0 { 0.0 } else { 2.0 * homogeneity * completeness / (homogeneity + completeness) };
    Ok((homogeneity.clamp(0.0, 1.0), completeness.clamp(0.0, 1.0), v.clamp(0.0, 1.0)))
}

/// V-measure; see [`homogeneity_completeness_v`].
pub fn v_measure<P: Ord + Clone, T: Ord + Clone>(pred: &[P], truth: &[T]) -> Result<f64> {
    homogeneity_completeness_v(pred, truth).map(|(_, _, v)| v)
}

/// Sum over predicted clusters of their majority-class count, over `n`.
/// An empty labeling has purity 1.
pub fn purity<P: Ord + Clone, T: Ord + Clone>(pred: &[P], truth: &[T]) -> Result<f64> {
    let table = contingency(pred, truth)?;
    if pred.is_empty() {
        return Ok(1.0);
    }
    let mut best: BTreeMap<P, usize> = BTreeMap::new();
    for ((p, _), &c) in &table {
        let e = best.entry(p.clone()).or_insert(0);
        *e = (*e).max(c);
    }
    Ok(best.values().sum::<usize>() as f64 / pred.len() as f64)
}

/// Scores of one clustering-with-outliers run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScodScores {
    pub jaccard: f64,
    pub v_measure: f64,
    pub purity: f64,
    pub clusters: usize,
    pub outliers: usize,
}

/// Scores a partition into clusters and outliers (label `None`).
pub fn score_labels(pred: &[Option<usize>], truth: &[Option<usize>]) -> Result<ScodScores> {
    let outliers = |l: &[Option<usize>]| IndexSet::new(l.iter().enumerate().filter(|(_, x)| x.is_none()).map(|(i, _)| i));
    let pred_out = outliers(pred);
    let clusters = pred.iter().flatten().collect::<std::collections::BTreeSet<_>>().len();
    Ok(ScodScores {
        jaccard: jaccard(&pred_out, &outliers(truth)),
        v_measure: v_measure(pred, truth)?,
        purity: purity(pred, truth)?,
        clusters,
        outliers: pred_out.len(),
    })
}

/// Generates a dataset, runs [`scod`] on its point affinity and scores it.
pub fn run_scod_synthetic(params: GenParams, cfg: &ScodConfig) -> Result<(ScodScores, ScodResult)> {
    let data = gen_synthetic(params)?;
    let a = point_affinity(&data.points)?;
    let result = scod(&a, cfg)?;
    let scores = score_labels(&result.labels(data.n()), &data.labels)?;
    Ok((scores, result))
}

/// One row of the SCOD sweep.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScodRun {
    pub params: GenParams,
    pub scores: ScodScores,
    pub seconds: f64,
}

/// Runs `runs` seeds (`base_seed`, `base_seed + 1`, ...) of `params`,
/// concurrently on the current rayon pool. Output order follows the seeds.
pub fn scod_sweep(params: GenParams, runs: usize, base_seed: u64, cfg: &ScodConfig) -> Result<Vec<ScodRun>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let p = GenParams { seed: base_seed + r, ..params };
            let start = Instant::now();
            let (scores, _) = run_scod_synthetic(p, cfg)?;
            Ok(ScodRun { params: p, scores, seconds: start.elapsed().as_secs_f64() })
        })
        .collect()
}

/// Median of a nonempty slice (mean of the middle pair for even length).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// Per-metric medians of a sweep: `(jaccard, v_measure, purity)`.
pub fn sweep_medians(runs: &[ScodRun]) -> Option<(f64, f64, f64)> {
    let col = |f: fn(&ScodScores) -> f64| median(&runs.iter().map(|r| f(&r.scores)).collect::<Vec<_>>());
    Some((col(|s| s.jaccard)?, col(|s| s.v_measure)?, col(|s| s.purity)?))
}

/// `count` disjoint cliques of `size` vertices with unit weights. With
/// `noise > 0`, each cross-clique pair gets an edge of weight `noise` with
/// probability `noise_prob`.
pub fn clique_grid(count: usize, size: usize, noise: f64, noise_prob: f64, seed: u64) -> Result<AffinityMatrix> {
    let n = count * size;
    let mut m = DMatrix::zeros(n, n);
    let mut r = rng(seed, STREAM_CLIQUE_NOISE);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = if i / size == j / size {
                1.0
            } else if noise > 0.0 && r.random_bool(noise_prob.clamp(0.0, 1.0)) {
                noise
            } else {
                0.0
            };
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
    }
    AffinityMatrix::new(m)
}

/// Timing of one single-vertex query.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpeedRow {
    pub query: usize,
    pub full_seconds: f64,
    pub fast_seconds: f64,
    pub ratio: f64,
    pub max_subgraph: usize,
    pub same_support: bool,
}

/// Repetitions per timed solve; the fastest is reported.
pub const TIMING_REPEATS: usize = 3;

fn best_of<T>(mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..TIMING_REPEATS {
        let start = Instant::now();
        let value = f()?;
        best = best.min(start.elapsed().as_secs_f64());
        out = Some(value);
    }
    Ok((out.expect("TIMING_REPEATS > 0"), best))
}

/// Times the full constrained solver against the localized one for each
/// query vertex `{q}`. Both solve the same program: `alpha` is computed
/// once per query outside the timed region and passed to both.
/// Each time is the fastest of [`TIMING_REPEATS`] runs.
pub fn fastcdsc_speed(a: &AffinityMatrix, queries: &[usize], cfg: &CdscConfig) -> Result<Vec<SpeedRow>> {
    queries
        .iter()
        .map(|&query| {
            let q = IndexSet::new([query]);
            q.check_bound(a.n())?;
            let alpha = cfg.fixed_alpha.unwrap_or_else(|| default_alpha(a, &q, cfg.alpha_mode, cfg.alpha_margin));
            let fixed = CdscConfig { fixed_alpha: Some(alpha), ..*cfg };

            let (full, full_seconds) = best_of(|| {
                let prog = ConstrainedProgram::new(a, q.clone(), alpha)?;
                solve_cdsc(&prog, cfg.solver, &cfg.solver_config)
            })?;
            let (fast, fast_seconds) = best_of(|| fast_cdsc_traced(a, &q, &fixed))?;

            Ok(SpeedRow {
                query,
                full_seconds,
                fast_seconds,
                ratio: full_seconds / fast_seconds.max(1e-12),
                max_subgraph: fast.subgraph_sizes.iter().copied().max().unwrap_or(0),
                same_support: fast.cluster.support == full.support,
            })
        })
        .collect()
}

/// `count` distinct query vertices drawn uniformly from `0..n`, sorted.
pub fn sample_queries(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut r = rng(seed, STREAM_CLIQUE_NOISE + 1);
    let mut picked = rand::seq::index::sample(&mut r, n, count.min(n)).into_vec();
    picked.sort_unstable();
    picked
}
