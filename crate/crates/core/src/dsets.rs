//! Combinatorial dominant sets: the weight recursion, the dominance test,
//! characteristic vectors, extraction through the dynamics and peel-off
//! enumeration.
//!
//! The recursion is exponential in `|S|`. It serves verification and tests;
//! extraction always goes through [`crate::dynamics`].

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::dynamics::{payoffs, solve_local_max, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::types::{quadratic_form, AffinityMatrix, Cluster, IndexSet, SimplexVector};

/// Largest set accepted by [`node_weight`] and friends.
pub const MAX_RECURSION_SIZE: usize = 20;
/// Largest graph accepted by [`brute_force_dominant_sets`].
pub const MAX_BRUTE_FORCE_SIZE: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct DominantSetReport {
    pub set: IndexSet,
    /// `w_S(i)` for each member, in the order of `set`.
    pub internal_weights: Vec<f64>,
    /// `(i, w_{S+i}(i))` for every outsider `i`.
    pub external_violations: Vec<(usize, f64)>,
    pub is_dominant: bool,
}

fn check_set(a: &AffinityMatrix, s: &IndexSet) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    s.check_bound(a.n())
}

fn check_index(a: &AffinityMatrix, i: usize) -> Result<()> {
    if i >= a.n() {
        return Err(Error::IndexOutOfRange { index: i, len: a.n() });
    }
    Ok(())
}

fn check_size(s: &IndexSet) -> Result<()> {
    if s.len() > MAX_RECURSION_SIZE {
        return Err(Error::TooLarge { size: s.len(), limit: MAX_RECURSION_SIZE });
    }
    Ok(())
}

/// Average weighted degree of `i` with respect to `s`.
pub fn weighted_degree(a: &AffinityMatrix, s: &IndexSet, i: usize) -> Result<f64> {
    check_set(a, s)?;
    check_index(a, i)?;
    Ok(awdeg(a.as_matrix(), s.as_slice(), i))
}

fn awdeg(m: &DMatrix<f64>, s: &[usize], i: usize) -> f64 {
    s.iter().map(|&j| m[(i, j)]).sum::<f64>() / s.len() as f64
}

/// `phi_S(i, j) = a_ij - AWDeg_S(i)`.
pub fn phi(a: &AffinityMatrix, s: &IndexSet, i: usize, j: usize) -> Result<f64> {
    check_index(a, j)?;
    Ok(a.get(i, j) - weighted_degree(a, s, i)?)
}

/// `w_S(i)` for every member of `verts`, computed level by level over all
/// subsets. Only two levels are alive at a time.
fn subset_weights(m: &DMatrix<f64>, verts: &[usize]) -> Vec<f64> {
    let k = verts.len();
    let mut level: HashMap<u32, Vec<f64>> = (0..k).map(|p| (1u32 << p, vec![1.0])).collect();
    for size in 2..=k {
        let mut next: HashMap<u32, Vec<f64>> = HashMap::new();
        for (&mask, w) in &level {
            let members: Vec<usize> = (0..k).filter(|&p| mask & (1 << p) != 0).collect();
            let sub: Vec<usize> = members.iter().map(|&p| verts[p]).collect();
            let degs: Vec<f64> = sub.iter().map(|&v| awdeg(m, &sub, v)).collect();
            for p in (0..k).filter(|&p| mask & (1 << p) == 0) {
                let vi = verts[p];
                let value: f64 = sub.iter().zip(&degs).zip(w).map(|((&vj, &d), &wj)| (m[(vj, vi)] - d) * wj).sum();
                let full = mask | (1 << p);
                let pos = (full & ((1u32 << p) - 1)).count_ones() as usize;
                next.entry(full).or_insert_with(|| vec![0.0; size])[pos] = value;
            }
        }
        level = next;
    }
    level.remove(&((1u32 << k) - 1)).unwrap_or_default()
}

/// `w_{S+i}(i) = sum_{j in S} phi_S(j, i) w_S(j)` for an outsider `i`.
fn outsider_weight(m: &DMatrix<f64>, s: &[usize], w: &[f64], i: usize) -> f64 {
    s.iter().zip(w).map(|(&j, &wj)| (m[(j, i)] - awdeg(m, s, j)) * wj).sum()
}

/// The recursive weight `w_S(i)` of a member `i` of `s`.
pub fn node_weight(a: &AffinityMatrix, s: &IndexSet, i: usize) -> Result<f64> {
    check_set(a, s)?;
    let pos = s.as_slice().binary_search(&i).map_err(|_| Error::NotMember { index: i })?;
    check_size(s)?;
    Ok(subset_weights(a.as_matrix(), s.as_slice())[pos])
}

/// `W(S)`, the sum of the member weights.
pub fn total_weight(a: &AffinityMatrix, s: &IndexSet) -> Result<f64> {
    check_set(a, s)?;
    check_size(s)?;
    Ok(subset_weights(a.as_matrix(), s.as_slice()).iter().sum())
}

/// Evaluates both dominance conditions with exact sign tests.
pub fn is_dominant_set(a: &AffinityMatrix, s: &IndexSet) -> Result<DominantSetReport> {
    check_set(a, s)?;
    check_size(s)?;
    let m = a.as_matrix();
    let internal_weights = subset_weights(m, s.as_slice());
    let external_violations: Vec<(usize, f64)> = s
        .complement(a.n())
        .iter()
        .map(|&i| (i, outsider_weight(m, s.as_slice(), &internal_weights, i)))
        .collect();
    let is_dominant = internal_weights.iter().all(|&w| w > 0.0) && external_violations.iter().all(|&(_, w)| w < 0.0);
    Ok(DominantSetReport { set: s.clone(), internal_weights, external_violations, is_dominant })
}

/// `x_i = w_S(i) / W(S)` on `s`, zero elsewhere. The result is checked
/// against the first-order conditions of a maximizer of `x'Ax`.
pub fn characteristic_vector(a: &AffinityMatrix, s: &IndexSet) -> Result<SimplexVector> {
    let report = is_dominant_set(a, s)?;
    if !report.is_dominant {
        return Err(Error::NotDominant);
    }
    let total: f64 = report.internal_weights.iter().sum();
    let mut x = vec![0.0; a.n()];
    for (&i, &w) in s.iter().zip(&report.internal_weights) {
        x[i] = w / total;
    }
    let x = SimplexVector::from_weights(x)?;
    let ax = payoffs(a.as_matrix(), x.as_slice());
    let f = quadratic_form(a.as_matrix(), x.as_slice())?;
    let tol = 1e-9 * a.max_entry().max(1.0);
    for i in 0..a.n() {
        let ok = if s.contains(i) { (ax[i] - f).abs() <= tol } else { ax[i] < f + tol };
        if !ok {
            return Err(Error::NotDominant);
        }
    }
    Ok(x)
}

/// Extraction settings: the solver, its stopping rule and the seed of the
/// perturbed-barycenter start.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtractConfig {
    pub solver: Solver,
    pub solver_config: SolverConfig,
    pub seed: u64,
}

/// Runs the configured dynamics from a perturbed barycenter and returns the
/// support of the fixed point with its characteristic vector.
pub fn extract_dominant_set(a: &AffinityMatrix, cfg: &ExtractConfig) -> Result<Cluster> {
    if a.n() == 0 {
        return Err(Error::ZeroSize);
    }
    if a.is_all_zero() {
        return Err(Error::AllZeroMatrix);
    }
    let x0 = SimplexVector::perturbed_barycenter(a.n(), cfg.seed)?;
    let res = solve_local_max(cfg.solver, a.as_matrix(), &x0, &cfg.solver_config)?;
    cluster_from(a.as_matrix(), &res.x, cfg.solver_config.zero_tol)
}

/// Builds a cluster from a fixed point, zeroing components below the
/// relative support threshold.
pub(crate) fn cluster_from(m: &DMatrix<f64>, x: &SimplexVector, zero_tol: f64) -> Result<Cluster> {
    let support = x.support_relative(zero_tol);
    let characteristic = x.restricted_to(&support)?;
    let cohesiveness = quadratic_form(m, characteristic.as_slice())?.max(0.0);
    Ok(Cluster { support, characteristic, cohesiveness })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelOff {
    /// Clusters in extraction order, with supports and characteristic
    /// vectors in the original indexing.
    pub clusters: Vec<Cluster>,
    /// Vertices left unassigned.
    pub residual: IndexSet,
}

impl PeelOff {
    /// Cluster id per vertex, `None` for residual vertices.
    pub fn labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut labels = vec![None; n];
        for (c, cluster) in self.clusters.iter().enumerate() {
            for &i in cluster.support.iter() {
                labels[i] = Some(c);
            }
        }
        labels
    }
}

/// Stop rule for [`peel_off_enumerate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeelStop {
    pub min_cluster_size: usize,
    pub max_clusters: Option<usize>,
}

impl Default for PeelStop {
    fn default() -> Self {
        PeelStop { min_cluster_size: 2, max_clusters: None }
    }
}

/// Repeatedly extracts a dominant set and removes it from the graph.
///
/// Stops once fewer than `min_cluster_size` vertices remain, the cluster cap
/// is reached, or the remaining graph has no edges. Round `r` uses seed
/// `cfg.seed + r`.
pub fn peel_off_enumerate(a: &AffinityMatrix, stop: PeelStop, cfg: &ExtractConfig) -> Result<PeelOff> {
    let n = a.n();
    let mut remaining = IndexSet::full(n);
    let mut clusters = Vec::new();
    let mut round = 0u64;
    loop {
        if remaining.len() < stop.min_cluster_size.max(1) || stop.max_clusters.is_some_and(|c| clusters.len() >= c) {
            break;
        }
        let sub = a.submatrix(remaining.as_slice());
        if sub.is_all_zero() {
            break;
        }
        let local_cfg = ExtractConfig { seed: cfg.seed.wrapping_add(round), ..*cfg };
        let local = extract_dominant_set(&sub, &local_cfg)?;
        round += 1;
        let support = local.support.map_through(remaining.as_slice());
        let characteristic = SimplexVector::scatter(&local.characteristic, remaining.as_slice(), n)?;
        remaining = remaining.difference(&support);
        clusters.push(Cluster { support, characteristic, cohesiveness: local.cohesiveness });
    }
    Ok(PeelOff { clusters, residual: remaining })
}

/// Every dominant set of `a`, found by testing all nonempty subsets.
/// Sets are returned in increasing bitmask order.
pub fn brute_force_dominant_sets(a: &AffinityMatrix) -> Result<Vec<IndexSet>> {
    let n = a.n();
    if n > MAX_BRUTE_FORCE_SIZE {
        return Err(Error::TooLarge { size: n, limit: MAX_BRUTE_FORCE_SIZE });
    }
    let table = WeightTable::build(a.as_matrix());
    let full = (1usize << n) - 1;
    let mut out = Vec::new();
    for mask in 1..=full {
        let internal = (0..n).filter(|&i| mask & (1 << i) != 0).all(|i| table.weight(mask, i) > 0.0);
        if !internal {
            continue;
        }
        let external = (0..n).filter(|&i| mask & (1 << i) == 0).all(|i| table.weight(mask | (1 << i), i) < 0.0);
        if external {
            out.push(IndexSet::from_sorted_unchecked((0..n).filter(|&i| mask & (1 << i) != 0).collect()));
        }
    }
    Ok(out)
}

/// `w_T(i)` for every subset `T` of a small vertex set, stored densely with
/// one slot per member.
struct WeightTable {
    offsets: Vec<usize>,
    weights: Vec<f64>,
}

impl WeightTable {
    fn build(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let count = 1usize << n;
        let mut offsets = Vec::with_capacity(count + 1);
        let mut acc = 0;
        for mask in 0..count {
            offsets.push(acc);
            acc += mask.count_ones() as usize;
        }
        offsets.push(acc);
        let mut degs = vec![0.0; acc];
        for mask in 1..count {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            for (p, &j) in members.iter().enumerate() {
                degs[offsets[mask] + p] = awdeg(m, &members, j);
            }
        }
        let mut weights = vec![0.0; acc];
        // T \ {i} < T numerically, so increasing mask order respects the recursion.
        for mask in 1..count {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if members.len() == 1 {
                weights[offsets[mask]] = 1.0;
                continue;
            }
            for (p, &i) in members.iter().enumerate() {
                let sub = mask ^ (1 << i);
                let mut value = 0.0;
                let mut q = 0;
                for &j in &members {
                    if j == i {
                        continue;
                    }
                    let idx = offsets[sub] + q;
                    value += (m[(j, i)] - degs[idx]) * weights[idx];
                    q += 1;
                }
                weights[offsets[mask] + p] = value;
            }
        }
        WeightTable { offsets, weights }
    }

    fn weight(&self, mask: usize, i: usize) -> f64 {
        let pos = (mask & ((1usize << i) - 1)).count_ones() as usize;
        self.weights[self.offsets[mask] + pos]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::barycenter;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k3() -> AffinityMatrix {
        AffinityMatrix::from_edges(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn triangle() -> AffinityMatrix {
        AffinityMatrix::from_edges(3, &[(0, 1, 20.0), (0, 2, 21.0), (1, 2, 22.0)]).unwrap()
    }

    fn two_edges() -> AffinityMatrix {
        AffinityMatrix::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap()
    }

    /// The triangle plus a fourth node strongly tied to it and a fifth node
    /// weakly tied to all four.
    fn five_node() -> AffinityMatrix {
        AffinityMatrix::from_edges(
            5,
            &[
                (0, 1, 20.0),
                (0, 2, 21.0),
                (1, 2, 22.0),
                (0, 3, 30.0),
                (1, 3, 35.0),
                (2, 3, 41.0),
                (0, 4, 1.0),
                (1, 4, 1.0),
                (2, 4, 1.0),
                (3, 4, 1.0),
            ],
        )
        .unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.iter().copied())
    }

    /// Direct transcription of the recursive definition, no memoization.
    fn naive_weight(m: &DMatrix<f64>, s: &[usize], i: usize) -> f64 {
        if s.len() == 1 {
            return 1.0;
        }
        let rest: Vec<usize> = s.iter().copied().filter(|&j| j != i).collect();
        rest.iter()
            .map(|&j| {
                let deg = rest.iter().map(|&k| m[(j, k)]).sum::<f64>() / rest.len() as f64;
                (m[(j, i)] - deg) * naive_weight(m, &rest, j)
            })
            .sum()
    }

    fn random_affinity(rng: &mut ChaCha8Rng, n: usize) -> AffinityMatrix {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j, rng.random::<f64>()));
            }
        }
        AffinityMatrix::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn weighted_degree_examples() {
        assert!((weighted_degree(&triangle(), &set(&[0, 1, 2]), 0).unwrap() - 41.0 / 3.0).abs() < 1e-12);
        assert_eq!(weighted_degree(&triangle(), &set(&[2]), 2).unwrap(), 0.0);
        assert_eq!(weighted_degree(&k3(), &set(&[1, 2]), 0).unwrap(), 1.0);
        assert_eq!(weighted_degree(&k3(), &IndexSet::empty(), 0), Err(Error::EmptySet));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&triangle(), &set(&[1]), 1, 0).unwrap(), 20.0);
        assert_eq!(phi(&k3(), &set(&[0, 1]), 0, 2).unwrap(), 0.5);
        assert_eq!(phi(&triangle(), &set(&[2]), 2, 0).unwrap(), 21.0);
    }

    #[test]
    fn node_weight_examples() {
        let a = triangle();
        assert_eq!(node_weight(&a, &set(&[0, 1]), 0).unwrap(), 20.0);
        assert_eq!(node_weight(&a, &set(&[0, 1, 2]), 2).unwrap(), 460.0);
        assert!(node_weight(&five_node(), &set(&[0, 1, 2, 3]), 3).unwrap() > 0.0);
        assert_eq!(node_weight(&a, &set(&[0, 1]), 2), Err(Error::NotMember { index: 2 }));
    }

    #[test]
    fn total_weight_examples() {
        assert_eq!(total_weight(&triangle(), &set(&[1])).unwrap(), 1.0);
        assert_eq!(total_weight(&triangle(), &set(&[0, 1])).unwrap(), 40.0);
        assert_eq!(total_weight(&k3(), &set(&[0, 1, 2])).unwrap(), 3.0);
    }

    #[test]
    fn dominance_examples() {
        let a = five_node();
        let r = is_dominant_set(&a, &set(&[0, 1, 2, 3])).unwrap();
        assert!(r.is_dominant);
        assert_eq!(r.external_violations.len(), 1);
        assert!(r.external_violations[0].1 < 0.0);
        let r = is_dominant_set(&a, &set(&[0, 1, 2, 3, 4])).unwrap();
        assert!(!r.is_dominant);
        assert!(r.internal_weights[4] < 0.0);
        assert!(!is_dominant_set(&k3(), &set(&[0, 1])).unwrap().is_dominant);
    }

    #[test]
    fn characteristic_vector_examples() {
        assert_eq!(characteristic_vector(&k3(), &set(&[0, 1, 2])).unwrap(), barycenter(3).unwrap());
        let x = characteristic_vector(&triangle(), &set(&[0, 1, 2])).unwrap();
        let w = [
            node_weight(&triangle(), &set(&[0, 1, 2]), 0).unwrap(),
            node_weight(&triangle(), &set(&[0, 1, 2]), 1).unwrap(),
            460.0,
        ];
        let total: f64 = w.iter().sum();
        for (xi, wi) in x.as_slice().iter().zip(w) {
            assert!((xi - wi / total).abs() < 1e-15);
        }
        let x = characteristic_vector(&two_edges(), &set(&[0, 1])).unwrap();
        assert_eq!(x.as_slice(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(characteristic_vector(&k3(), &set(&[0, 1])), Err(Error::NotDominant));
    }

    #[test]
    fn extract_examples() {
        let cfg = ExtractConfig::default();
        let c = extract_dominant_set(&k3(), &cfg).unwrap();
        assert_eq!(c.support, set(&[0, 1, 2]));
        assert!((c.cohesiveness - 2.0 / 3.0).abs() < 1e-6);
        let c = extract_dominant_set(&two_edges(), &cfg).unwrap();
        assert!(c.support == set(&[0, 1]) || c.support == set(&[2, 3]));
        assert!((c.cohesiveness - 0.5).abs() < 1e-6);
        let c = extract_dominant_set(&five_node(), &cfg).unwrap();
        assert_eq!(c.support, set(&[0, 1, 2, 3]));
        assert_eq!(extract_dominant_set(&AffinityMatrix::zeros(3), &cfg), Err(Error::AllZeroMatrix));
    }

    #[test]
    fn peel_off_examples() {
        let cfg = ExtractConfig::default();
        let p = peel_off_enumerate(&two_edges(), PeelStop::default(), &cfg).unwrap();
        let mut supports: Vec<IndexSet> = p.clusters.iter().map(|c| c.support.clone()).collect();
        supports.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
        assert_eq!(supports, vec![set(&[0, 1]), set(&[2, 3])]);
        assert!(p.residual.is_empty());

        let p = peel_off_enumerate(&k3(), PeelStop::default(), &cfg).unwrap();
        assert_eq!(p.clusters.len(), 1);

        let mut edges = Vec::new();
        for base in [0, 3] {
            edges.extend([(base, base + 1, 1.0), (base, base + 2, 1.0), (base + 1, base + 2, 1.0)]);
        }
        let a = AffinityMatrix::from_edges(6, &edges).unwrap();
        let p = peel_off_enumerate(&a, PeelStop::default(), &cfg).unwrap();
        assert_eq!(p.clusters.len(), 2);
        assert!(p.clusters.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_dominant_sets(&k3()).unwrap(), vec![set(&[0, 1, 2])]);
        assert_eq!(brute_force_dominant_sets(&two_edges()).unwrap(), vec![set(&[0, 1]), set(&[2, 3])]);
        assert_eq!(brute_force_dominant_sets(&triangle()).unwrap(), vec![set(&[0, 1, 2])]);
        assert!(matches!(brute_force_dominant_sets(&AffinityMatrix::zeros(16)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn memoized_weights_match_naive_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let n = rng.random_range(1..8);
            let a = random_affinity(&mut rng, n);
            let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
            if s.is_empty() {
                continue;
            }
            let fast = subset_weights(a.as_matrix(), &s);
            let table = WeightTable::build(a.as_matrix());
            let mask: usize = s.iter().map(|&i| 1 << i).sum();
            for (p, &i) in s.iter().enumerate() {
                let slow = naive_weight(a.as_matrix(), &s, i);
                let scale = slow.abs().max(1e-12);
                assert!((fast[p] - slow).abs() <= 1e-9 * scale);
                assert!((table.weight(mask, i) - slow).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn total_weight_is_sum_of_node_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_affinity(&mut rng, 6);
        let s = set(&[0, 2, 3, 5]);
        let sum: f64 = s.iter().map(|&i| node_weight(&a, &s, i).unwrap()).sum();
        assert_eq!(total_weight(&a, &s).unwrap(), sum);
    }

    #[test]
    fn oracle_sets_are_local_maximizers() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let n = rng.random_range(3..8);
            let a = random_affinity(&mut rng, n);
            for s in brute_force_dominant_sets(&a).unwrap() {
                let x = characteristic_vector(&a, &s).unwrap();
                let f = crate::types::quadratic_value(&a, &x).unwrap();
                if s.len() < 2 {
                    continue;
                }
                for (p, &i) in s.iter().enumerate() {
                    let j = s.as_slice()[(p + 1) % s.len()];
                    let mut y = x.as_slice().to_vec();
                    let h = 1e-3f64.min(y[j]);
                    y[i] += h;
                    y[j] -= h;
                    let y = SimplexVector::new(y).unwrap();
                    assert!(crate::types::quadratic_value(&a, &y).unwrap() <= f + 1e-12);
                }
            }
        }
    }

    #[test]
    fn solver_supports_are_dominant_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let cfg = ExtractConfig::default();
        for seed in 0..30 {
            let n = rng.random_range(2..11);
            let a = random_affinity(&mut rng, n);
            let oracle = brute_force_dominant_sets(&a).unwrap();
            let c = extract_dominant_set(&a, &ExtractConfig { seed, ..cfg }).unwrap();
            assert!(oracle.contains(&c.support), "seed {seed}: {:?} not in {:?}", c.support, oracle);
        }
    }

    #[test]
    fn peel_off_partitions_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let a = random_affinity(&mut rng, 12);
            let p = peel_off_enumerate(&a, PeelStop::default(), &ExtractConfig::default()).unwrap();
            let mut seen = p.residual.to_vec();
            for c in &p.clusters {
                seen.extend(c.support.iter());
            }
            seen.sort_unstable();
            assert_eq!(seen, (0..12).collect::<Vec<_>>());
        }
    }
}
