//! Association-layer algorithms.
//!
//! * Ranked-neighbor handling: [`dynamic_nn_select`] keeps a variable-length
//!   prefix of a neighbor list, [`prune_query`] discards queries whose first
//!   and last neighbors are equally far.
//! * Grouped association: [`track_association`] runs a constrained
//!   enumeration per group (camera) over a shared affinity, and
//!   [`refine_constraint1`] / [`refine_constraint2`] remove inconsistent
//!   memberships afterwards.
//! * [`feature_weights`] fuses several score curves by inverse area.

use rayon::prelude::*;

use crate::cdsc::{enumerate_constrained, CdscConfig, ConstrainedCluster};
use crate::error::{Error, Result};
use crate::types::{AffinityMatrix, IndexSet, SimplexVector};

/// Default ratio threshold of [`dynamic_nn_select`].
pub const DEFAULT_THETA: f64 = 0.7;
/// Default ratio threshold of [`prune_query`].
pub const DEFAULT_BETA: f64 = 0.7;

/// Neighbors of one query, sorted by non-decreasing distance.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedNeighborList {
    query_id: usize,
    neighbors: Vec<(usize, f64)>,
}

impl RankedNeighborList {
    /// Distances must be finite, nonnegative and non-decreasing.
    pub fn new(query_id: usize, neighbors: Vec<(usize, f64)>) -> Result<Self> {
        if neighbors.is_empty() {
            return Err(Error::EmptyList);
        }
        for (k, &(_, d)) in neighbors.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::invalid("distance", format!("neighbor {k} has distance {d}")));
            }
            if k > 0 && d < neighbors[k - 1].1 {
                return Err(Error::invalid("distance", format!("neighbor {k} breaks ascending order")));
            }
        }
        Ok(RankedNeighborList { query_id, neighbors })
    }

    /// Builds a list from unsorted `(id, distance)` pairs. Equal distances
    /// keep their input order.
    pub fn from_unsorted(query_id: usize, mut neighbors: Vec<(usize, f64)>) -> Result<Self> {
        if neighbors.iter().any(|(_, d)| d.is_nan()) {
            return Err(Error::invalid("distance", "NaN distance"));
        }
        neighbors.sort_by(|a, b| a.1.total_cmp(&b.1));
        Self::new(query_id, neighbors)
    }

    pub fn query_id(&self) -> usize {
        self.query_id
    }

    pub fn neighbors(&self) -> &[(usize, f64)] {
        &self.neighbors
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn distance(&self, rank: usize) -> f64 {
        self.neighbors[rank].1
    }
}

// 0/0 only arises for duplicated zero distances, which are identical.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// Keeps the first neighbor, then the next one while consecutive distances
/// have ratio above `theta`. The final list entry is only a comparison
/// partner and is never selected.
pub fn dynamic_nn_select(nns: &RankedNeighborList, theta: f64) -> Result<IndexSet> {
    Ok(IndexSet::new(dynamic_nn_prefix(nns, theta)?.iter().map(|&(id, _)| id)))
}

/// Same selection as [`dynamic_nn_select`], returned as the ranked prefix.
pub fn dynamic_nn_prefix(nns: &RankedNeighborList, theta: f64) -> Result<&[(usize, f64)]> {
    if nns.is_empty() {
        return Err(Error::EmptyList);
    }
    if !theta.is_finite() {
        return Err(Error::invalid("theta", "must be finite"));
    }
    let mut m = 1;
    while m < nns.len() - 1 {
        if ratio(nns.distance(m - 1), nns.distance(m)) > theta {
            m += 1;
        } else {
            break;
        }
    }
    Ok(&nns.neighbors[..m])
}

/// Decision of [`prune_query`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneDecision {
    Keep,
    Drop,
}

/// Drops a query whose nearest neighbor is about as far as its farthest one
/// (`d_first / d_last > beta`).
pub fn prune_query(nns: &RankedNeighborList, beta: f64) -> Result<PruneDecision> {
    if nns.len() < 2 {
        return Err(Error::TooFewNeighbors { found: nns.len() });
    }
    let r = ratio(nns.distance(0), nns.distance(nns.len() - 1));
    Ok(if r > beta { PruneDecision::Drop } else { PruneDecision::Keep })
}

/// An affinity over all entities together with a partition into groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedAffinity {
    a: AffinityMatrix,
    groups: Vec<IndexSet>,
    group_of: Vec<usize>,
}

impl GroupedAffinity {
    /// `groups` must be nonempty, pairwise disjoint and cover `0..n`.
    pub fn new(a: AffinityMatrix, groups: Vec<IndexSet>) -> Result<Self> {
        let n = a.n();
        if groups.is_empty() {
            return Err(Error::invalid("groups", "at least one group is required"));
        }
        let mut group_of = vec![usize::MAX; n];
        for (g, members) in groups.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::EmptyGroup { group: g });
            }
            members.check_bound(n)?;
            for &i in members.iter() {
                if group_of[i] != usize::MAX {
                    return Err(Error::invalid("groups", format!("entity {i} is in groups {} and {g}", group_of[i])));
                }
                group_of[i] = g;
            }
        }
        if let Some(i) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::invalid("groups", format!("entity {i} has no group")));
        }
        Ok(GroupedAffinity { a, groups, group_of })
    }

    /// Groups from a per-entity label vector; labels must be `0..I` with
    /// every label used.
    pub fn from_labels(a: AffinityMatrix, labels: &[usize]) -> Result<Self> {
        if labels.len() != a.n() {
            return Err(Error::LengthMismatch { expected: a.n(), found: labels.len() });
        }
        let count = labels.iter().max().map_or(0, |&m| m + 1);
        let mut members = vec![Vec::new(); count];
        for (i, &g) in labels.iter().enumerate() {
            members[g].push(i);
        }
        Self::new(a, members.into_iter().map(IndexSet::new).collect())
    }

    pub fn affinity(&self) -> &AffinityMatrix {
        &self.a
    }

    pub fn groups(&self) -> &[IndexSet] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    /// The `(gi, gj)` block of the affinity.
    pub fn block(&self, gi: usize, gj: usize) -> nalgebra::DMatrix<f64> {
        let (ri, rj) = (&self.groups[gi], &self.groups[gj]);
        nalgebra::DMatrix::from_fn(ri.len(), rj.len(), |r, c| self.a.get(ri.as_slice()[r], rj.as_slice()[c]))
    }

    /// Zeroes every cross-group block that is not allowed. `allowed` is an
    /// `I x I` relation; it is symmetrized and closed transitively first, and
    /// diagonal blocks are always kept.
    pub fn gated(&self, allowed: &[Vec<bool>]) -> Result<GroupedAffinity> {
        let closure = transitive_closure(allowed, self.group_count())?;
        let n = self.a.n();
        let raw = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if closure[self.group_of[i]][self.group_of[j]] {
                self.a.get(i, j)
            } else {
                0.0
            }
        });
        Ok(GroupedAffinity { a: AffinityMatrix::from_valid(raw), groups: self.groups.clone(), group_of: self.group_of.clone() })
    }
}

/// Reflexive, symmetric, transitive closure of a square boolean relation.
pub fn transitive_closure(allowed: &[Vec<bool>], size: usize) -> Result<Vec<Vec<bool>>> {
    if allowed.len() != size {
        return Err(Error::DimensionMismatch { expected: size, found: allowed.len() });
    }
    let mut r = vec![vec![false; size]; size];
    for (i, row) in allowed.iter().enumerate() {
        if row.len() != size {
            return Err(Error::DimensionMismatch { expected: size, found: row.len() });
        }
        r[i][i] = true;
        for (j, &ok) in row.iter().enumerate() {
            if ok {
                r[i][j] = true;
                r[j][i] = true;
            }
        }
    }
    for k in 0..size {
        for i in 0..size {
            if r[i][k] {
                for j in 0..size {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    Ok(r)
}

/// One associated set: the support of a constrained solution found with the
/// members of `group` as constraint set.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociatedSet {
    pub group: usize,
    pub support: IndexSet,
    /// Membership scores over all entities; zero off the support.
    pub memberships: SimplexVector,
}

impl AssociatedSet {
    fn from_cluster(group: usize, c: ConstrainedCluster) -> Self {
        AssociatedSet { group, support: c.support, memberships: c.memberships }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn without(&self, removed: &[usize]) -> Option<AssociatedSet> {
        let support = self.support.difference(&IndexSet::new(removed.iter().copied()));
        if support.is_empty() {
            return None;
        }
        let memberships = self.memberships.restricted_to(&support).ok()?;
        Some(AssociatedSet { group: self.group, support, memberships })
    }
}

/// All sets found by [`track_association`]. A set's id is its position in
/// [`AssociationResult::sets`]; sets are ordered by group, then by discovery.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationResult {
    n: usize,
    group_count: usize,
    sets: Vec<AssociatedSet>,
}

impl AssociationResult {
    /// Every set's group must be below `group_count` and its support inside
    /// `0..n`.
    pub fn new(n: usize, group_count: usize, sets: Vec<AssociatedSet>) -> Result<Self> {
        for s in &sets {
            if s.group >= group_count {
                return Err(Error::IndexOutOfRange { index: s.group, len: group_count });
            }
            s.support.check_bound(n)?;
            if s.memberships.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.memberships.len() });
            }
        }
        Ok(AssociationResult { n, group_count, sets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    pub fn sets(&self) -> &[AssociatedSet] {
        &self.sets
    }

    /// Ids of the sets found with group `p` as constraint set.
    pub fn group_sets(&self, p: usize) -> Vec<usize> {
        (0..self.sets.len()).filter(|&k| self.sets[k].group == p).collect()
    }

    /// Ids of the sets containing entity `i`.
    pub fn sets_containing(&self, i: usize) -> Vec<usize> {
        (0..self.sets.len()).filter(|&k| self.sets[k].support.contains(i)).collect()
    }

    /// Membership score of entity `i` in set `k`.
    pub fn membership(&self, k: usize, i: usize) -> f64 {
        self.sets[k].memberships.get(i)
    }

    /// Drops `(set, entity)` pairs, renormalizing memberships. Sets left
    /// empty are removed.
    fn remove_pairs(self, removals: &[(usize, usize)]) -> AssociationResult {
        let mut per_set = vec![Vec::new(); self.sets.len()];
        for &(k, i) in removals {
            per_set[k].push(i);
        }
        let sets = self
            .sets
            .iter()
            .zip(per_set)
            .filter_map(|(s, rm)| if rm.is_empty() { Some(s.clone()) } else { s.without(&rm) })
            .collect();
        AssociationResult { n: self.n, group_count: self.group_count, sets }
    }
}

/// Runs a constrained enumeration per group: the constraint set starts at
/// the group's members and shrinks within the group until all are covered.
/// Groups are processed concurrently; the result does not depend on the
/// thread count.
pub fn track_association(ga: &GroupedAffinity, cfg: &CdscConfig) -> Result<AssociationResult> {
    let a = ga.affinity();
    let per_group: Vec<Result<Vec<ConstrainedCluster>>> =
        ga.groups().par_iter().map(|q| enumerate_constrained(a, q, cfg)).collect();
    let mut sets = Vec::new();
    for (p, clusters) in per_group.into_iter().enumerate() {
        sets.extend(clusters?.into_iter().map(|c| AssociatedSet::from_cluster(p, c)));
    }
    AssociationResult::new(a.n(), ga.group_count(), sets)
}

/// Enforces that no entity sits in two sets of the same group. A duplicated
/// entity stays in the set maximizing `|set| * membership`; ties go to the
/// lowest set id. Decisions use the input result, so processing order does
/// not matter.
pub fn refine_constraint1(result: AssociationResult) -> AssociationResult {
    let mut removals = Vec::new();
    for p in 0..result.group_count {
        let ids = result.group_sets(p);
        for i in 0..result.n {
            let holders: Vec<usize> = ids.iter().copied().filter(|&k| result.sets[k].support.contains(i)).collect();
            if holders.len() < 2 {
                continue;
            }
            let score = |k: usize| result.sets[k].len() as f64 * result.membership(k, i);
            let mut winner = holders[0];
            for &k in &holders[1..] {
                if score(k) > score(winner) {
                    winner = k;
                }
            }
            removals.extend(holders.into_iter().filter(|&k| k != winner).map(|k| (k, i)));
        }
    }
    result.remove_pairs(&removals)
}

/// Enforces that no entity sits in more than `group_count` sets. For a
/// violating entity, its home set is the lowest-id set from its own group
/// that contains it. The entity stays in the home set and in the
/// `group_count - 1` other sets sharing the most members with the home set
/// (the entity itself not counted); sets sharing nothing are dropped, and
/// ties go to the lowest set id. Entities without a home set keep their
/// `group_count` lowest-id sets.
pub fn refine_constraint2(result: AssociationResult, group_count: usize, group_of: &[usize]) -> Result<AssociationResult> {
    if group_of.len() != result.n {
        return Err(Error::LengthMismatch { expected: result.n, found: group_of.len() });
    }
    let mut removals = Vec::new();
    for (i, &home_group) in group_of.iter().enumerate() {
        let holders = result.sets_containing(i);
        if holders.len() <= group_count {
            continue;
        }
        let keep: Vec<usize> = match holders.iter().copied().find(|&k| result.sets[k].group == home_group) {
            Some(home) => {
                let home_support = &result.sets[home].support;
                let mut ranked: Vec<(usize, usize)> = holders
                    .iter()
                    .copied()
                    .filter(|&k| k != home)
                    .map(|k| {
                        let shared = result.sets[k].support.intersection(home_support);
                        (k, shared.len() - 1)
                    })
                    .filter(|&(_, shared)| shared > 0)
                    .collect();
                ranked.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
                std::iter::once(home).chain(ranked.into_iter().take(group_count.saturating_sub(1)).map(|(k, _)| k)).collect()
            }
            None => holders.iter().copied().take(group_count).collect(),
        };
        removals.extend(holders.into_iter().filter(|k| !keep.contains(k)).map(|k| (k, i)));
    }
    Ok(result.remove_pairs(&removals))
}

/// Constraint-1 refinement followed by Constraint-2 refinement, once each.
pub fn refine(result: AssociationResult, ga: &GroupedAffinity) -> Result<AssociationResult> {
    let group_of: Vec<usize> = (0..ga.affinity().n()).map(|i| ga.group_of(i)).collect();
    refine_constraint2(refine_constraint1(result), ga.group_count(), &group_of)
}

/// Trapezoidal area under a curve sampled at evenly spaced points of
/// `[0, 1]`.
pub fn curve_area(curve: &[f64]) -> Result<f64> {
    if curve.len() < 2 {
        return Err(Error::invalid("score curve", format!("needs at least 2 samples, found {}", curve.len())));
    }
    let h = 1.0 / (curve.len() - 1) as f64;
    Ok(curve.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum())
}

/// Weights proportional to the inverse areas of normalized score curves,
/// summing to 1. If some curves have zero area, those share all the weight
/// equally and the others get 0.
pub fn feature_weights(score_curves: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = score_curves.first().ok_or(Error::EmptyList)?;
    let mut areas = Vec::with_capacity(score_curves.len());
    for curve in score_curves {
        if curve.len() != first.len() {
            return Err(Error::LengthMismatch { expected: first.len(), found: curve.len() });
        }
        if let Some(v) = curve.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid("score curve", format!("value {v} outside [0, 1]")));
        }
        areas.push(curve_area(curve)?);
    }
    Ok(weights_from_areas(&areas))
}

/// The inverse-area rule of [`feature_weights`] applied to given areas.
pub fn weights_from_areas(areas: &[f64]) -> Vec<f64> {
    let zeros = areas.iter().filter(|&&a| a == 0.0).count();
    if zeros > 0 {
        return areas.iter().map(|&a| if a == 0.0 { 1.0 / zeros as f64 } else { 0.0 }).collect();
    }
    let total: f64 = areas.iter().map(|a| 1.0 / a).sum();
    areas.iter().map(|a| (1.0 / a) / total).collect()
}
