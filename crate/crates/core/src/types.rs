//! Foundational types shared by every solver: the affinity matrix, points of
//! the standard simplex, sorted vertex sets and extracted clusters.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Relative size of the deterministic perturbation applied to "near
/// barycenter" starting points.
pub const BARYCENTER_PERTURBATION: f64 = 1e-4;

/// Default support threshold, relative to the largest component.
pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

const SIMPLEX_SUM_TOL: f64 = 1e-6;

/// How [`build_affinity`] treats a raw matrix that violates the invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BuildMode {
    /// Reject any asymmetry, negative weight or nonzero diagonal entry.
    #[default]
    Strict,
    /// Average with the transpose, zero the diagonal and clamp negatives.
    Symmetrize,
}

/// Symmetric, nonnegative edge-weight matrix with a zero diagonal.
///
/// A zero entry means "no edge".
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    values: DMatrix<f64>,
}

impl AffinityMatrix {
    /// Validates `raw` in strict mode.
    pub fn new(raw: DMatrix<f64>) -> Result<Self> {
        build_affinity(raw, BuildMode::Strict).map(|(a, _)| a)
    }

    pub fn zeros(n: usize) -> Self {
        AffinityMatrix { values: DMatrix::zeros(n, n) }
    }

    /// Builds a matrix from row slices (strict mode).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare { rows: n, cols: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Self::new(m)
    }

    /// Builds a matrix from an undirected edge list. Duplicate edges (in
    /// either orientation) and self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut m = DMatrix::zeros(n, n);
        let mut seen = std::collections::HashSet::new();
        for &(i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, len: n });
                }
            }
            if i == j {
                return Err(Error::NonZeroDiagonal { index: i, value: w });
            }
            if !w.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { row: i, col: j, value: w });
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::invalid("edge list", format!("duplicate edge ({i}, {j})")));
            }
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
        Ok(AffinityMatrix { values: m })
    }

    /// Wraps a matrix the caller guarantees to be valid.
    pub(crate) fn from_valid(values: DMatrix<f64>) -> Self {
        debug_assert!(values.is_square());
        AffinityMatrix { values }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.values
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> AffinityMatrix {
        AffinityMatrix { values: principal_submatrix(&self.values, indices) }
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        // Symmetric, so the contiguous column is the row.
        self.values.column(i).sum()
    }
}

pub(crate) fn principal_submatrix(m: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    let k = indices.len();
    DMatrix::from_fn(k, k, |r, c| m[(indices[r], indices[c])])
}

/// Validates (strict) or repairs (symmetrize) a raw square matrix. Returns the
/// matrix and the largest absolute correction applied (always 0 in strict mode).
pub fn build_affinity(raw: DMatrix<f64>, mode: BuildMode) -> Result<(AffinityMatrix, f64)> {
    let (rows, cols) = raw.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    let n = rows;
    for j in 0..n {
        for i in 0..n {
            if !raw[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    match mode {
        BuildMode::Strict => {
            let scale = raw.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let tol = 1e-12 * scale;
            for i in 0..n {
                if raw[(i, i)] != 0.0 {
                    return Err(Error::NonZeroDiagonal { index: i, value: raw[(i, i)] });
                }
                for j in 0..n {
                    let v = raw[(i, j)];
                    if v < 0.0 {
                        return Err(Error::NegativeWeight { row: i, col: j, value: v });
                    }
                    let diff = (v - raw[(j, i)]).abs();
                    if diff > tol {
                        return Err(Error::AsymmetryExceedsTolerance { row: i, col: j, diff });
                    }
                }
            }
            Ok((AffinityMatrix { values: raw }, 0.0))
        }
        BuildMode::Symmetrize => {
            let mut out = DMatrix::zeros(n, n);
            let mut correction = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    let v = if i == j { 0.0 } else { ((raw[(i, j)] + raw[(j, i)]) / 2.0).max(0.0) };
                    correction = correction.max((v - raw[(i, j)]).abs());
                    out[(i, j)] = v;
                }
            }
            Ok((AffinityMatrix { values: out }, correction))
        }
    }
}

/// A point of the standard simplex: nonnegative components summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector {
    x: DVector<f64>,
}

impl SimplexVector {
    /// Accepts a vector whose components are nonnegative and sum to one up to
    /// `1e-6`, then renormalizes it exactly.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ZeroSize);
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::NotOnSimplex(format!("component {v}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::NotOnSimplex(format!("components sum to {sum}")));
        }
        Ok(Self::normalized(DVector::from_vec(values)))
    }

    /// Scales a nonnegative, not-all-zero weight vector onto the simplex.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ZeroSize);
        }
        if let Some(v) = weights.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::NotOnSimplex(format!("weight {v}")));
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::NotOnSimplex("all weights are zero".into()));
        }
        Ok(Self::normalized(DVector::from_vec(weights)))
    }

    /// Clamps tiny negative round-off and renormalizes.
    pub(crate) fn normalized(mut x: DVector<f64>) -> Self {
        for v in x.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum = x.sum();
        debug_assert!(sum > 0.0);
        x /= sum;
        SimplexVector { x }
    }

    /// Vertex `i` of the simplex (pure strategy).
    pub fn unit(n: usize, i: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSize);
        }
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let mut x = DVector::zeros(n);
        x[i] = 1.0;
        Ok(SimplexVector { x })
    }

    /// Barycenter plus a seeded relative perturbation of size
    /// [`BARYCENTER_PERTURBATION`], renormalized.
    pub fn perturbed_barycenter(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSize);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0xba5e);
        let w: Vec<f64> = (0..n).map(|_| 1.0 + BARYCENTER_PERTURBATION * rng.random::<f64>()).collect();
        Ok(Self::normalized(DVector::from_vec(w)))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.x.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.x.data.into()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.x[i]
    }

    pub fn max_component(&self) -> f64 {
        self.x.max()
    }

    /// Indices whose mass exceeds `zero_tol` (absolute).
    pub fn support(&self, zero_tol: f64) -> IndexSet {
        IndexSet::from_sorted_unchecked(
            self.x.iter().enumerate().filter(|(_, &v)| v > zero_tol).map(|(i, _)| i).collect(),
        )
    }

    /// Indices whose mass exceeds `rel_tol` times the largest component.
    pub fn support_relative(&self, rel_tol: f64) -> IndexSet {
        self.support(rel_tol * self.max_component())
    }

    /// Zeroes every component outside `keep` and renormalizes.
    pub fn restricted_to(&self, keep: &IndexSet) -> Result<Self> {
        let mut w = vec![0.0; self.len()];
        for &i in keep.iter() {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange { index: i, len: self.len() });
            }
            w[i] = self.x[i];
        }
        Self::from_weights(w)
    }

    /// Scatters a vector defined on `indices` into a length-`n` vector.
    pub fn scatter(local: &SimplexVector, indices: &[usize], n: usize) -> Result<Self> {
        if local.len() != indices.len() {
            return Err(Error::DimensionMismatch { expected: indices.len(), found: local.len() });
        }
        let mut x = DVector::zeros(n);
        for (k, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            x[i] = local.x[k];
        }
        Ok(SimplexVector { x })
    }

    /// Components at `indices`, renormalized.
    pub fn gather(&self, indices: &[usize]) -> Result<Self> {
        Self::from_weights(indices.iter().map(|&i| self.x[i]).collect())
    }
}

/// Every component equal to `1/n`.
pub fn barycenter(n: usize) -> Result<SimplexVector> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    Ok(SimplexVector { x: DVector::from_element(n, 1.0 / n as f64) })
}

/// Indices of `x` with mass strictly above `zero_tol`.
pub fn support(x: &SimplexVector, zero_tol: f64) -> IndexSet {
    x.support(zero_tol)
}

/// `x'Ax` evaluated as the plain double sum.
pub fn quadratic_value(a: &AffinityMatrix, x: &SimplexVector) -> Result<f64> {
    quadratic_form(a.as_matrix(), x.as_slice())
}

pub(crate) fn quadratic_form(b: &DMatrix<f64>, x: &[f64]) -> Result<f64> {
    let n = b.nrows();
    if x.len() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let mut total = 0.0;
    for j in 0..n {
        if x[j] == 0.0 {
            continue;
        }
        let col = b.column(j);
        let mut s = 0.0;
        for i in 0..n {
            s += x[i] * col[i];
        }
        total += s * x[j];
    }
    Ok(total)
}

/// Sorted set of distinct vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct IndexSet {
    members: Vec<usize>,
}

impl IndexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        IndexSet { members }
    }

    pub(crate) fn from_sorted_unchecked(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        IndexSet { members }
    }

    pub fn empty() -> Self {
        IndexSet::default()
    }

    /// `{0, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        IndexSet { members: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.members.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members.clone()
    }

    /// Checks every member is below `n`.
    pub fn check_bound(&self, n: usize) -> Result<()> {
        match self.members.last() {
            Some(&m) if m >= n => Err(Error::IndexOutOfRange { index: m, len: n }),
            _ => Ok(()),
        }
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet::new(self.members.iter().chain(other.members.iter()).copied())
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet::from_sorted_unchecked(self.members.iter().copied().filter(|&i| other.contains(i)).collect())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet::from_sorted_unchecked(self.members.iter().copied().filter(|&i| !other.contains(i)).collect())
    }

    /// `{0..n} \ self`.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet::from_sorted_unchecked((0..n).filter(|&i| !self.contains(i)).collect())
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Maps local positions (indices into `labels`) back to labels.
    pub fn map_through(&self, labels: &[usize]) -> IndexSet {
        IndexSet::new(self.members.iter().map(|&i| labels[i]))
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        IndexSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// An extracted cluster: its support, characteristic vector and cohesiveness
/// (the value of `x'Ax` at the characteristic vector).
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub support: IndexSet,
    pub characteristic: SimplexVector,
    pub cohesiveness: f64,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> AffinityMatrix {
        AffinityMatrix::from_rows(&[vec![0.0, 20.0, 21.0], vec![20.0, 0.0, 22.0], vec![21.0, 22.0, 0.0]]).unwrap()
    }

    #[test]
    fn zero_matrix_is_valid() {
        let a = AffinityMatrix::new(DMatrix::zeros(3, 3)).unwrap();
        assert!(a.is_all_zero());
    }

    #[test]
    fn triangle_accepted() {
        assert_eq!(triangle().get(2, 1), 22.0);
    }

    #[test]
    fn strict_rejects_asymmetry() {
        let mut raw = DMatrix::zeros(3, 3);
        raw[(0, 1)] = 1.0;
        assert!(matches!(
            build_affinity(raw, BuildMode::Strict),
            Err(Error::AsymmetryExceedsTolerance { .. })
        ));
    }

    #[test]
    fn strict_rejects_negative_and_non_square() {
        let mut raw = DMatrix::zeros(2, 2);
        raw[(0, 1)] = -1.0;
        raw[(1, 0)] = -1.0;
        assert!(matches!(build_affinity(raw, BuildMode::Strict), Err(Error::NegativeWeight { .. })));
        assert!(matches!(
            build_affinity(DMatrix::zeros(2, 3), BuildMode::Strict),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn symmetrize_reports_correction() {
        let raw = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 0.0]);
        let (a, corr) = build_affinity(raw, BuildMode::Symmetrize).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(1, 0), 1.0);
        assert_eq!(a.get(0, 0), 0.0);
        assert_eq!(corr, 1.0);
    }

    #[test]
    fn edge_list_rejects_duplicates() {
        assert!(AffinityMatrix::from_edges(3, &[(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        let a = AffinityMatrix::from_edges(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(a.get(2, 1), 2.0);
    }

    #[test]
    fn barycenter_values() {
        assert_eq!(barycenter(3).unwrap().as_slice(), &[1.0 / 3.0; 3]);
        assert_eq!(barycenter(1).unwrap().as_slice(), &[1.0]);
        assert_eq!(barycenter(4).unwrap().as_slice(), &[0.25; 4]);
        assert_eq!(barycenter(0), Err(Error::ZeroSize));
    }

    #[test]
    fn support_examples() {
        let x = SimplexVector::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(support(&x, 1e-8), IndexSet::new([0, 1]));
        assert_eq!(support(&barycenter(3).unwrap(), 1e-8), IndexSet::full(3));
        let x = SimplexVector::new(vec![1e-10, 1.0 - 1e-10]).unwrap();
        assert_eq!(support(&x, 1e-8), IndexSet::new([1]));
    }

    #[test]
    fn quadratic_value_examples() {
        let k3 = AffinityMatrix::from_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap();
        let b = barycenter(3).unwrap();
        assert!((quadratic_value(&k3, &b).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(quadratic_value(&k3, &SimplexVector::unit(3, 1).unwrap()).unwrap(), 0.0);
        assert!((quadratic_value(&triangle(), &b).unwrap() - 14.0).abs() < 1e-12);
        assert!(matches!(
            quadratic_value(&k3, &barycenter(2).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn perturbed_barycenter_is_deterministic() {
        let a = SimplexVector::perturbed_barycenter(10, 7).unwrap();
        let b = SimplexVector::perturbed_barycenter(10, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(a.as_slice().iter().all(|&v| (v - 0.1).abs() < 1e-5));
    }

    fn arb_affinity(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(-1.0f64..2.0, n * n).prop_map(move |v| DMatrix::from_vec(n, n, v))
        })
    }

    proptest! {
        #[test]
        fn quadratic_value_bounds(raw in arb_affinity(8), w in proptest::collection::vec(0.01f64..1.0, 8)) {
            let (a, _) = build_affinity(raw, BuildMode::Symmetrize).unwrap();
            let x = SimplexVector::from_weights(w[..a.n()].to_vec()).unwrap();
            let q = quadratic_value(&a, &x).unwrap();
            prop_assert!(q >= 0.0);
            prop_assert!(q <= a.max_entry() + 1e-12);
        }

        #[test]
        fn symmetrize_is_idempotent(raw in arb_affinity(8)) {
            let (once, _) = build_affinity(raw, BuildMode::Symmetrize).unwrap();
            let (twice, corr) = build_affinity(once.as_matrix().clone(), BuildMode::Symmetrize).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(corr, 0.0);
            prop_assert!(AffinityMatrix::new(twice.into_matrix()).is_ok());
        }

        #[test]
        fn barycenter_support_is_full(n in 1usize..50) {
            let tol = 0.5 / n as f64;
            prop_assert_eq!(support(&barycenter(n).unwrap(), tol), IndexSet::full(n));
        }
    }
}
