//! Simultaneous clustering and outlier detection.
//!
//! Dominant sets are peeled off one at a time. A support is kept as a cluster
//! only when its cohesiveness beats the global cohesiveness (the value of
//! `x'Ax` at the barycenter) both in the input affinity and in a robust
//! affinity that reweights each vertex by the strength of its nearest
//! neighbors. Everything else is reported as outliers.

use nalgebra::DMatrix;

use crate::dynamics::{solve_local_max, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::types::{quadratic_form, AffinityMatrix, Cluster, IndexSet, SimplexVector};

/// Default share of the vertices used as neighbors by [`learn_robust_affinity`].
pub const DEFAULT_NEIGHBOR_FRACTION: f64 = 0.10;

/// `S(i,j) = w(i) w(j) A(i,j)`, where `w(i)` is the mean of the
/// `N = max(1, round(fraction * n))` largest off-diagonal entries of row `i`
/// (at most `n - 1`).
pub fn learn_robust_affinity(a: &AffinityMatrix, neighbor_fraction: f64) -> Result<AffinityMatrix> {
    if !(neighbor_fraction > 0.0 && neighbor_fraction <= 1.0) {
        return Err(Error::invalid("neighbor_fraction", "must lie in (0, 1]"));
    }
    let n = a.n();
    let m = a.as_matrix();
    let count = ((neighbor_fraction * n as f64).round() as usize).max(1).min(n.saturating_sub(1));
    let w: Vec<f64> = (0..n)
        .map(|i| {
            if count == 0 {
                return 0.0;
            }
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| m[(i, j)]).collect();
            row.sort_unstable_by(|x, y| y.total_cmp(x));
            row[..count].iter().sum::<f64>() / count as f64
        })
        .collect();
    let s = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { w[i] * w[j] * m[(i, j)] });
    Ok(AffinityMatrix::from_valid(s))
}

/// `x'Ax` at the barycenter, i.e. the mean of all entries of `A`.
pub fn global_cohesiveness(a: &AffinityMatrix) -> Result<f64> {
    if a.n() == 0 {
        return Err(Error::ZeroSize);
    }
    let n = a.n() as f64;
    Ok(a.as_matrix().sum() / (n * n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScodConfig {
    pub neighbor_fraction: f64,
    pub solver: Solver,
    pub solver_config: SolverConfig,
    /// Extraction `r` starts from the perturbed barycenter with seed `seed + r`.
    pub seed: u64,
}

impl Default for ScodConfig {
    fn default() -> Self {
        ScodConfig {
            neighbor_fraction: DEFAULT_NEIGHBOR_FRACTION,
            solver: Solver::InImDyn,
            solver_config: SolverConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScodResult {
    /// Accepted clusters in extraction order, in the original indexing.
    /// `cohesiveness` is measured in the input affinity.
    pub clusters: Vec<Cluster>,
    /// Cohesiveness of each cluster in the learned affinity.
    pub learned_cohesiveness: Vec<f64>,
    pub outlier_sets: Vec<IndexSet>,
    pub global_cohesiveness: f64,
}

impl ScodResult {
    /// Cluster id per vertex, `None` for outliers.
    pub fn labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut labels = vec![None; n];
        for (c, cluster) in self.clusters.iter().enumerate() {
            for &i in cluster.support.iter() {
                labels[i] = Some(c);
            }
        }
        labels
    }

    /// All outlier vertices.
    pub fn outliers(&self) -> IndexSet {
        self.outlier_sets.iter().flat_map(|s| s.iter().copied()).collect()
    }
}

/// Peels off dominant sets until no vertex is left, gating each support on
/// both cohesiveness values exceeding the global cohesiveness of `a`.
///
/// The learned affinity and the global cohesiveness are computed once on the
/// full input. A lone remaining vertex, or a remainder without edges, is
/// reported as one final outlier set.
pub fn scod(a: &AffinityMatrix, cfg: &ScodConfig) -> Result<ScodResult> {
    cfg.solver_config.validate()?;
    let n = a.n();
    let mut result = ScodResult { clusters: Vec::new(), learned_cohesiveness: Vec::new(), outlier_sets: Vec::new(), global_cohesiveness: 0.0 };
    if n == 0 {
        return Ok(result);
    }
    let s = learn_robust_affinity(a, cfg.neighbor_fraction)?;
    let gc = global_cohesiveness(a)?;
    result.global_cohesiveness = gc;
    let mut remaining = IndexSet::full(n);
    let mut round = 0u64;
    while !remaining.is_empty() {
        let sub_a = a.submatrix(remaining.as_slice());
        if remaining.len() == 1 || sub_a.is_all_zero() {
            result.outlier_sets.push(remaining.clone());
            break;
        }
        let x0 = SimplexVector::perturbed_barycenter(remaining.len(), cfg.seed.wrapping_add(round))?;
        round += 1;
        let res = solve_local_max(cfg.solver, sub_a.as_matrix(), &x0, &cfg.solver_config)?;
        let local_support = res.x.support_relative(cfg.solver_config.zero_tol);
        let xc = res.x.restricted_to(&local_support)?;
        let a_coh = quadratic_form(sub_a.as_matrix(), xc.as_slice())?;
        let sub_s = s.submatrix(remaining.as_slice());
        let s_coh = quadratic_form(sub_s.as_matrix(), xc.as_slice())?;
        let support = local_support.map_through(remaining.as_slice());
        if a_coh > gc && s_coh > gc {
            let characteristic = SimplexVector::scatter(&xc, remaining.as_slice(), n)?;
            result.clusters.push(Cluster { support: support.clone(), characteristic, cohesiveness: a_coh });
            result.learned_cohesiveness.push(s_coh);
        } else {
            result.outlier_sets.push(support.clone());
        }
        remaining = remaining.difference(&support);
    }
    Ok(result)
}

/// Bandwidth of [`gaussian_affinity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    /// Median of the off-diagonal entries of the distance matrix.
    Median,
    Value(f64),
}

/// Median of the strictly upper-triangular entries; the mean of the two
/// middle values for an even count.
pub fn median_off_diagonal(d: &DMatrix<f64>) -> Option<f64> {
    let n = d.nrows();
    let mut v: Vec<f64> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| d[(i, j)]).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_unstable_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// `a_ij = exp(-D_ij / (2 sigma^2))` off the diagonal, zero on it.
pub fn gaussian_affinity(d: &DMatrix<f64>, sigma: Sigma) -> Result<AffinityMatrix> {
    let d = AffinityMatrix::new(d.clone())?;
    let sigma = match sigma {
        Sigma::Value(s) => s,
        Sigma::Median => median_off_diagonal(d.as_matrix()).unwrap_or(0.0),
    };
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::DegenerateSigma);
    }
    let scale = 2.0 * sigma * sigma;
    let n = d.n();
    let m = d.as_matrix();
    Ok(AffinityMatrix::from_valid(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { (-m[(i, j)] / scale).exp() })))
}
