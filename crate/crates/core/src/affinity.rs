//! Building affinity matrices from descriptors, kernels, priors and
//! ensembles of clusterings.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::dsets::{peel_off_enumerate, ExtractConfig, PeelOff, PeelStop};
use crate::error::{Error, Result};
use crate::scod::median_off_diagonal;
use crate::types::{AffinityMatrix, IndexSet, SimplexVector};

/// Default bandwidth of [`similarity`] for global-feature edge weights.
pub const DEFAULT_GAMMA: f64 = 128.0;

/// Sample covariance of a set of feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceDescriptor {
    c: DMatrix<f64>,
}

impl CovarianceDescriptor {
    /// Wraps a symmetric positive semi-definite matrix.
    pub fn new(c: DMatrix<f64>) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::NonSquare { rows: c.nrows(), cols: c.ncols() });
        }
        if c.nrows() == 0 {
            return Err(Error::ZeroSize);
        }
        let scale = c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..c.nrows() {
            for j in 0..i {
                let diff = (c[(i, j)] - c[(j, i)]).abs();
                if diff > 1e-12 * scale {
                    return Err(Error::AsymmetryExceedsTolerance { row: i, col: j, diff });
                }
            }
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        let min_eig = c.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 * scale {
            return Err(Error::invalid("covariance", format!("not positive semi-definite (eigenvalue {min_eig})")));
        }
        Ok(CovarianceDescriptor { c })
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.c
    }
}

/// Covariance of the rows of `f` (`M` samples by `d` features) with the
/// `1/(M-1)` normalizer.
pub fn covariance_descriptor(f: &DMatrix<f64>) -> Result<CovarianceDescriptor> {
    let m = f.nrows();
    if m < 2 {
        return Err(Error::TooFewSamples { found: m });
    }
    let mean = f.row_mean();
    let mut centered = f.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    let c = centered.transpose() * &centered / (m as f64 - 1.0);
    let c = (&c + c.transpose()) * 0.5;
    Ok(CovarianceDescriptor { c })
}

fn generalized_log_eigen(c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> Option<f64> {
    Cholesky::new(c1.clone())?;
    let l = Cholesky::new(c2.clone())?.l();
    let l_inv = l.clone().try_inverse()?;
    let m = &l_inv * c1 * l_inv.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let mut total = 0.0;
    for lambda in m.symmetric_eigenvalues().iter() {
        if !(*lambda > 0.0) {
            return None;
        }
        total += lambda.ln().powi(2);
    }
    Some(total.sqrt())
}

fn regularized(c: &DMatrix<f64>) -> DMatrix<f64> {
    let d = c.nrows();
    let eps = 1e-6 * c.trace() / d as f64;
    c + DMatrix::identity(d, d) * eps
}

/// `sqrt(sum_k ln^2 lambda_k)` over the generalized eigenvalues of the pair.
///
/// When either matrix is not positive definite, both are regularized with
/// `eps I`, `eps = 1e-6 trace / d`, before the eigensolve. Positive definite
/// inputs are used as given, which keeps the distance exactly invariant under
/// congruence.
pub fn covariance_distance(c1: &CovarianceDescriptor, c2: &CovarianceDescriptor) -> Result<f64> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch { expected: c1.dim(), found: c2.dim() });
    }
    if let Some(d) = generalized_log_eigen(&c1.c, &c2.c) {
        return Ok(d);
    }
    generalized_log_eigen(&regularized(&c1.c), &regularized(&c2.c)).ok_or(Error::SingularAfterRegularization)
}

/// Relative weights of appearance and location in [`joint_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointWeights {
    pub kappa: f64,
    pub iota: f64,
}

impl JointWeights {
    /// Equal weighting.
    pub const UNIT: JointWeights = JointWeights { kappa: 1.0, iota: 1.0 };
    /// Weights used for the ETH sequences.
    pub const ETH: JointWeights = JointWeights { kappa: 1.0, iota: 1.25 };
}

impl Default for JointWeights {
    fn default() -> Self {
        JointWeights::UNIT
    }
}

/// `sqrt(kappa desc^2 + iota loc^2)`.
pub fn joint_distance(desc_dist: f64, loc_dist: f64, w: JointWeights) -> f64 {
    (w.kappa * desc_dist * desc_dist + w.iota * loc_dist * loc_dist).sqrt()
}

/// `exp(-d / (2 gamma^2))`.
pub fn similarity(dist: f64, gamma: f64) -> f64 {
    (-dist / (2.0 * gamma * gamma)).exp()
}

/// `A_ij = 1 - sqrt((K_ii + K_jj - 2 K_ij) / 2)`, clamped to `[0, 1]`, with a
/// zero diagonal. `K` must be symmetric with a unit diagonal.
pub fn kernel_trick_affinity(k: &DMatrix<f64>) -> Result<AffinityMatrix> {
    if !k.is_square() {
        return Err(Error::NonSquare { rows: k.nrows(), cols: k.ncols() });
    }
    let n = k.nrows();
    for i in 0..n {
        if (k[(i, i)] - 1.0).abs() > 1e-9 {
            return Err(Error::NonNormalizedKernel { index: i, value: k[(i, i)] });
        }
        for j in 0..i {
            let diff = (k[(i, j)] - k[(j, i)]).abs();
            if diff > 1e-12 {
                return Err(Error::AsymmetryExceedsTolerance { row: i, col: j, diff });
            }
        }
    }
    let a = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 0.0;
        }
        let r = ((k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)]) / 2.0).max(0.0);
        (1.0 - r.sqrt()).clamp(0.0, 1.0)
    });
    let a = (&a + a.transpose()) * 0.5;
    Ok(AffinityMatrix::from_valid(a))
}

/// `exp(-gamma |x_i - x_j|_1)` over the rows of `points`. `gamma` defaults to
/// the inverse of the median pairwise L1 distance.
pub fn laplacian_kernel(points: &DMatrix<f64>, gamma: Option<f64>) -> Result<DMatrix<f64>> {
    let n = points.nrows();
    let d = DMatrix::from_fn(n, n, |i, j| (points.row(i) - points.row(j)).abs().sum());
    let gamma = match gamma {
        Some(g) => g,
        None => 1.0 / median_off_diagonal(&d).unwrap_or(0.0),
    };
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::DegenerateSigma);
    }
    Ok(d.map(|v| (-gamma * v).exp()))
}

/// Nonnegative per-node payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeScoreVector {
    b: DVector<f64>,
}

impl NodeScoreVector {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        for (i, &v) in b.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: 0 });
            }
            if v < 0.0 {
                return Err(Error::NegativeWeight { row: i, col: 0, value: v });
            }
        }
        Ok(NodeScoreVector { b: DVector::from_vec(b) })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.b.as_slice()
    }
}

/// `B = A + e b' + b e'`, so that `x'Bx = x'Ax + 2 b'x` on the simplex.
pub fn homogenize(a: &AffinityMatrix, b: &NodeScoreVector) -> Result<DMatrix<f64>> {
    if a.n() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: b.len() });
    }
    let m = a.as_matrix();
    Ok(DMatrix::from_fn(a.n(), a.n(), |i, j| m[(i, j)] + b.b[i] + b.b[j]))
}

fn mean_distances(ti: &[CovarianceDescriptor], tj: &[CovarianceDescriptor]) -> Result<Vec<f64>> {
    if ti.is_empty() || tj.is_empty() {
        return Err(Error::EmptyTracklet);
    }
    ti.iter()
        .map(|ci| {
            let mut sum = 0.0;
            for cj in tj {
                sum += covariance_distance(ci, cj)?;
            }
            Ok(sum / tj.len() as f64)
        })
        .collect()
}

/// `exp(-mean_i mean_j dist(C_i, C_j))`.
pub fn tracklet_affinity_mean(ti: &[CovarianceDescriptor], tj: &[CovarianceDescriptor]) -> Result<f64> {
    let rows = mean_distances(ti, tj)?;
    Ok((-rows.iter().sum::<f64>() / rows.len() as f64).exp())
}

/// `exp(-min_i mean_j dist(C_i, C_j))`.
pub fn tracklet_affinity_min(ti: &[CovarianceDescriptor], tj: &[CovarianceDescriptor]) -> Result<f64> {
    let rows = mean_distances(ti, tj)?;
    Ok((-rows.iter().copied().fold(f64::INFINITY, f64::min)).exp())
}

/// Index of the largest component of a characteristic vector, lowest index
/// on ties.
pub fn representative_index(x: &SimplexVector) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in x.as_slice().iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// `exp(-dist(C_I*, C_J*))` between the representatives of the two
/// tracklets, each picked by the peak of its characteristic vector.
pub fn tracklet_affinity_representative(
    ti: &[CovarianceDescriptor],
    xi: &SimplexVector,
    tj: &[CovarianceDescriptor],
    xj: &SimplexVector,
) -> Result<f64> {
    if ti.is_empty() || tj.is_empty() {
        return Err(Error::EmptyTracklet);
    }
    if xi.len() != ti.len() {
        return Err(Error::LengthMismatch { expected: ti.len(), found: xi.len() });
    }
    if xj.len() != tj.len() {
        return Err(Error::LengthMismatch { expected: tj.len(), found: xj.len() });
    }
    let (Some(i), Some(j)) = (representative_index(xi), representative_index(xj)) else {
        return Err(Error::EmptyTracklet);
    };
    Ok((-covariance_distance(&ti[i], &tj[j])?).exp())
}

/// `exp(-dist)` between every pair of elements of one tracklet, the input
/// for its characteristic vector.
pub fn tracklet_internal_affinity(t: &[CovarianceDescriptor]) -> Result<AffinityMatrix> {
    if t.is_empty() {
        return Err(Error::EmptyTracklet);
    }
    let n = t.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (-covariance_distance(&t[i], &t[j])?).exp();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(AffinityMatrix::from_valid(m))
}

/// Splits a sequence into a first half of `ceil(L/2)` and a second half of
/// `floor(L/2)` elements.
pub fn split_halves<T>(t: &[T]) -> (&[T], &[T]) {
    t.split_at(t.len().div_ceil(2))
}

/// Pins pairs that share a prior cluster to 1 and forbidden pairs to 0.
pub fn update_with_priors(a: &AffinityMatrix, priors: &[IndexSet], forbidden: &[(usize, usize)]) -> Result<AffinityMatrix> {
    let n = a.n();
    let mut owner = vec![false; n];
    for p in priors {
        p.check_bound(n)?;
        for &v in p.iter() {
            if owner[v] {
                return Err(Error::OverlappingPriors { vertex: v });
            }
            owner[v] = true;
        }
    }
    let mut m = a.as_matrix().clone();
    for p in priors {
        for &i in p.iter() {
            for &j in p.iter() {
                if i != j {
                    m[(i, j)] = 1.0;
                }
            }
        }
    }
    for &(i, j) in forbidden {
        for v in [i, j] {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, len: n });
            }
        }
        if i != j {
            m[(i, j)] = 0.0;
            m[(j, i)] = 0.0;
        }
    }
    Ok(AffinityMatrix::from_valid(m))
}

/// Pairwise co-clustering frequencies of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct CoassociationMatrix {
    matrix: AffinityMatrix,
    ensemble_size: usize,
}

impl CoassociationMatrix {
    pub fn ensemble_size(&self) -> usize {
        self.ensemble_size
    }

    pub fn as_affinity(&self) -> &AffinityMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }
}

/// `phi(i,j)` = share of the clusterings that put `i` and `j` together.
/// Negative labels mark unassigned items, which never co-cluster.
pub fn coassociation(clusterings: &[Vec<i64>]) -> Result<CoassociationMatrix> {
    let first = clusterings.first().ok_or(Error::EmptyList)?;
    let n = first.len();
    let mut counts = vec![0u32; n * n];
    for c in clusterings {
        if c.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: c.len() });
        }
        for i in 0..n {
            if c[i] < 0 {
                continue;
            }
            for j in (i + 1)..n {
                if c[i] == c[j] {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    let m = clusterings.len() as f64;
    let mat = DMatrix::from_fn(n, n, |i, j| {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if lo == hi {
            0.0
        } else {
            counts[lo * n + hi] as f64 / m
        }
    });
    Ok(CoassociationMatrix { matrix: AffinityMatrix::from_valid(mat), ensemble_size: clusterings.len() })
}

/// Consensus partition: peel-off enumeration on the co-association matrix.
pub fn consensus(coassoc: &CoassociationMatrix, stop: PeelStop, cfg: &ExtractConfig) -> Result<PeelOff> {
    peel_off_enumerate(&coassoc.matrix, stop, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{barycenter, quadratic_value};

    fn cov(values: &[f64], d: usize) -> CovarianceDescriptor {
        CovarianceDescriptor::new(DMatrix::from_row_slice(d, d, values)).unwrap()
    }

    #[test]
    fn covariance_examples() {
        let f = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        assert_eq!(covariance_descriptor(&f).unwrap().as_matrix(), &DMatrix::zeros(2, 2));
        let f = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 2.0, 0.0]);
        assert_eq!(covariance_descriptor(&f).unwrap().as_matrix(), &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]));
        let f = DMatrix::from_fn(20, 9, |i, j| ((i * 7 + j * 3) % 11) as f64);
        assert_eq!(covariance_descriptor(&f).unwrap().dim(), 9);
        assert_eq!(covariance_descriptor(&DMatrix::zeros(1, 3)), Err(Error::TooFewSamples { found: 1 }));
    }

    #[test]
    fn covariance_distance_examples() {
        let c = cov(&[2.0, 0.5, 0.5, 1.0], 2);
        assert!(covariance_distance(&c, &c).unwrap().abs() < 1e-12);
        for d in 1..6 {
            let i = CovarianceDescriptor::new(DMatrix::identity(d, d)).unwrap();
            let four = CovarianceDescriptor::new(DMatrix::identity(d, d) * 4.0).unwrap();
            let expected = (d as f64).sqrt() * 4f64.ln();
            assert!((covariance_distance(&i, &four).unwrap() - expected).abs() < 1e-10);
        }
        let z = CovarianceDescriptor::new(DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(covariance_distance(&z, &c), Err(Error::SingularAfterRegularization));
        // Rank-deficient but nonzero: regularized.
        let r = cov(&[1.0, 0.0, 0.0, 0.0], 2);
        assert!(covariance_distance(&r, &c).unwrap().is_finite());
    }

    #[test]
    fn joint_and_similarity() {
        assert_eq!(joint_distance(3.0, 4.0, JointWeights::UNIT), 5.0);
        assert_eq!(similarity(0.0, DEFAULT_GAMMA), 1.0);
        assert_eq!(JointWeights::ETH.iota, 1.25);
    }

    #[test]
    fn kernel_trick_examples() {
        let k = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.5, 0.0, 0.5, 1.0]);
        let a = kernel_trick_affinity(&k).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert!((a.get(1, 2) - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        let bad = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.1, 1.0]);
        assert!(matches!(kernel_trick_affinity(&bad), Err(Error::NonNormalizedKernel { index: 0, .. })));
    }

    #[test]
    fn laplacian_kernel_is_normalized() {
        let p = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 3.0]);
        let k = laplacian_kernel(&p, None).unwrap();
        assert_eq!(k[(1, 1)], 1.0);
        // Median L1 distance is 3.
        assert!((k[(0, 1)] - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!(kernel_trick_affinity(&k).is_ok());
    }

    #[test]
    fn homogenize_examples() {
        let k3 = AffinityMatrix::from_edges(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let zero_b = NodeScoreVector::new(vec![0.0; 3]).unwrap();
        assert_eq!(&homogenize(&k3, &zero_b).unwrap(), k3.as_matrix());

        let b = NodeScoreVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let h = homogenize(&AffinityMatrix::zeros(3), &b).unwrap();
        let x = barycenter(3).unwrap();
        let v = crate::types::quadratic_form(&h, x.as_slice()).unwrap();
        assert!((v - 4.0).abs() < 1e-12);

        let b = NodeScoreVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        let h = homogenize(&k3, &b).unwrap();
        assert_eq!((h[(0, 0)], h[(0, 1)], h[(1, 2)]), (2.0, 2.0, 1.0));
        assert!(NodeScoreVector::new(vec![-1.0]).is_err());
        assert!(quadratic_value(&k3, &x).is_ok());
    }

    #[test]
    fn tracklet_examples() {
        let c = cov(&[1.0, 0.0, 0.0, 1.0], 2);
        let single = [c.clone()];
        assert_eq!(tracklet_affinity_mean(&single, &single).unwrap(), 1.0);
        assert_eq!(tracklet_affinity_min(&single, &single).unwrap(), 1.0);
        let one = SimplexVector::unit(1, 0).unwrap();
        assert_eq!(tracklet_affinity_representative(&single, &one, &single, &one).unwrap(), 1.0);

        // dist(I, e^{sqrt 2} I) = sqrt(2 * 2) = 2 in two dimensions.
        let far = CovarianceDescriptor::new(DMatrix::identity(2, 2) * 2f64.sqrt().exp()).unwrap();
        assert!((covariance_distance(&c, &far).unwrap() - 2.0).abs() < 1e-12);
        let ti = [c.clone(), c.clone()];
        let tj = [c.clone(), far.clone()];
        assert!((tracklet_affinity_mean(&ti, &tj).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((tracklet_affinity_min(&ti, &tj).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(tracklet_affinity_mean(&[], &tj), Err(Error::EmptyTracklet));

        let x = SimplexVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(representative_index(&x), Some(2));
        let t3 = [far.clone(), far.clone(), c.clone()];
        let v = tracklet_affinity_representative(&t3, &x, &single, &one).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn split_halves_rounds_up_first() {
        let v = [1, 2, 3, 4, 5];
        assert_eq!(split_halves(&v), (&v[..3], &v[3..]));
    }

    #[test]
    fn prior_examples() {
        let a = AffinityMatrix::from_edges(3, &[(0, 1, 0.2), (0, 2, 0.3), (1, 2, 0.4)]).unwrap();
        assert_eq!(update_with_priors(&a, &[], &[]).unwrap(), a);
        let u = update_with_priors(&a, &[IndexSet::new([0, 1])], &[(0, 2)]).unwrap();
        assert_eq!((u.get(0, 1), u.get(1, 0), u.get(0, 2), u.get(2, 0), u.get(1, 2)), (1.0, 1.0, 0.0, 0.0, 0.4));
        assert_eq!(
            update_with_priors(&a, &[IndexSet::new([0, 1]), IndexSet::new([1, 2])], &[]),
            Err(Error::OverlappingPriors { vertex: 1 })
        );
    }

    #[test]
    fn coassociation_examples() {
        let c = coassociation(&[vec![0, 0, 1], vec![0, 1, 1], vec![0, 0, 0]]).unwrap();
        assert_eq!(c.get(0, 1), 2.0 / 3.0);
        assert_eq!(c.get(1, 2), 2.0 / 3.0);
        assert_eq!(c.get(0, 2), 1.0 / 3.0);
        assert_eq!(c.get(2, 0), 1.0 / 3.0);
        assert_eq!(c.get(1, 1), 0.0);

        let same = vec![vec![3, 3, 5, 5]; 3];
        let c = coassociation(&same).unwrap();
        assert_eq!((c.get(0, 1), c.get(0, 2), c.get(2, 3)), (1.0, 0.0, 1.0));
        assert_eq!(coassociation(&[vec![0, 1], vec![0]]), Err(Error::LengthMismatch { expected: 2, found: 1 }));

        let p = consensus(&c, PeelStop::default(), &ExtractConfig::default()).unwrap();
        assert_eq!(p.clusters.len(), 2);
    }
}
