//! Constrained dominant sets.
//!
//! Given a constraint set `Q`, the program maximizes `x'(A - alpha I_Q)x`
//! over the simplex, where `I_Q` is the diagonal indicator of `V \ Q`. Once
//! `alpha` exceeds the largest eigenvalue of `A` restricted to `V \ Q`, every
//! local maximizer has support meeting `Q`.
//!
//! [`fast_cdsc`] reaches the same maximizers while only ever solving on a
//! small subgraph grown from `Q` by dominant distributions.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{payoffs, solve_local_max, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::types::{principal_submatrix, quadratic_form, AffinityMatrix, IndexSet, SimplexVector};

/// Mass spread over `V \ Q` by the start of [`solve_cdsc`].
pub const OFF_FACE_MASS: f64 = 1e-4;
/// Default safety factor applied to the bound on `alpha`.
pub const DEFAULT_ALPHA_MARGIN: f64 = 1.01;

/// How the lower bound on `alpha` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaMode {
    /// Largest eigenvalue of `A_{V\Q}`.
    Eigen,
    /// Largest row sum of `A_{V\Q}`, an upper bound on the eigenvalue.
    #[default]
    MaxDegree,
}

impl std::str::FromStr for AlphaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen" => Ok(AlphaMode::Eigen),
            "max_degree" | "max-degree" => Ok(AlphaMode::MaxDegree),
            other => Err(Error::invalid("alpha_mode", format!("unknown mode `{other}`"))),
        }
    }
}

fn bound_of(m: &DMatrix<f64>, mode: AlphaMode) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    match mode {
        AlphaMode::MaxDegree => m.column_iter().map(|c| c.sum()).fold(0.0, f64::max),
        AlphaMode::Eigen => m.clone().symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0),
    }
}

/// Lower bound on `alpha` for constraint set `q`; 0 when `q` covers `V`.
pub fn alpha_lower_bound(a: &AffinityMatrix, q: &IndexSet, mode: AlphaMode) -> f64 {
    let outside = q.complement(a.n());
    bound_of(&principal_submatrix(a.as_matrix(), outside.as_slice()), mode)
}

/// `margin * bound`, with a small positive floor when the bound vanishes.
fn alpha_from_bound(bound: f64, margin: f64, scale: f64) -> f64 {
    let alpha = margin * bound;
    if alpha > 0.0 {
        alpha
    } else {
        1e-3 * if scale > 0.0 { scale } else { 1.0 }
    }
}

/// `alpha = margin * alpha_lower_bound`, floored at `1e-3 * max entry`.
pub fn default_alpha(a: &AffinityMatrix, q: &IndexSet, mode: AlphaMode, margin: f64) -> f64 {
    alpha_from_bound(alpha_lower_bound(a, q, mode), margin, a.max_entry())
}

/// Which graph the `alpha` of [`fast_cdsc`] is bounded on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaScope {
    /// One `alpha` from `A_{V\Q}`, shared by every working subgraph. The
    /// localized solves then optimize the same program as [`solve_cdsc`].
    #[default]
    Global,
    /// A fresh `alpha` from `A_{H\Q}` for each working subgraph `H`.
    Subgraph,
}

/// The penalized program over a borrowed affinity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedProgram<'a> {
    a: &'a AffinityMatrix,
    q: IndexSet,
    alpha: f64,
}

impl<'a> ConstrainedProgram<'a> {
    pub fn new(a: &'a AffinityMatrix, q: IndexSet, alpha: f64) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::EmptySet);
        }
        q.check_bound(a.n())?;
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be positive and finite"));
        }
        Ok(ConstrainedProgram { a, q, alpha })
    }

    /// Like [`ConstrainedProgram::new`], additionally requiring `alpha` to
    /// exceed the bound computed with `mode`.
    pub fn new_checked(a: &'a AffinityMatrix, q: IndexSet, alpha: f64, mode: AlphaMode) -> Result<Self> {
        let prog = Self::new(a, q, alpha)?;
        let bound = alpha_lower_bound(a, &prog.q, mode);
        if alpha <= bound {
            return Err(Error::invalid("alpha", format!("{alpha} does not exceed the bound {bound}")));
        }
        Ok(prog)
    }

    /// Program with `alpha = margin * bound(mode)`.
    pub fn with_default_alpha(a: &'a AffinityMatrix, q: IndexSet, mode: AlphaMode, margin: f64) -> Result<Self> {
        q.check_bound(a.n())?;
        let alpha = default_alpha(a, &q, mode, margin);
        Self::new(a, q, alpha)
    }

    pub fn affinity(&self) -> &AffinityMatrix {
        self.a
    }

    pub fn constraint(&self) -> &IndexSet {
        &self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `A - alpha I_Q` as a dense matrix.
    pub fn payoff_matrix(&self) -> DMatrix<f64> {
        penalized(self.a.as_matrix(), &self.q, self.alpha)
    }

    /// `x'(A - alpha I_Q)x`.
    pub fn objective(&self, x: &SimplexVector) -> Result<f64> {
        let base = quadratic_form(self.a.as_matrix(), x.as_slice())?;
        Ok(base - self.alpha * self.penalized_mass(x.as_slice()))
    }

    /// `sum_{i in V\Q} x_i^2`.
    fn penalized_mass(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().filter(|(i, _)| !self.q.contains(*i)).map(|(_, v)| v * v).sum()
    }
}

fn penalized(m: &DMatrix<f64>, q: &IndexSet, alpha: f64) -> DMatrix<f64> {
    let mut b = m.clone();
    for i in 0..b.nrows() {
        if !q.contains(i) {
            b[(i, i)] -= alpha;
        }
    }
    b
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedCluster {
    pub support: IndexSet,
    /// Converged memberships, zero off the support.
    pub memberships: SimplexVector,
    /// `support ∩ Q`.
    pub satisfied_constraints: IndexSet,
    /// `x'(A - alpha I_Q)x` at the memberships.
    pub objective: f64,
    /// The penalty the cluster was solved with.
    pub alpha: f64,
}

/// Solver settings for the constrained program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdscConfig {
    pub solver: Solver,
    pub solver_config: SolverConfig,
    pub alpha_mode: AlphaMode,
    pub alpha_margin: f64,
    pub alpha_scope: AlphaScope,
    /// Overrides every computed `alpha`.
    pub fixed_alpha: Option<f64>,
}

impl Default for CdscConfig {
    fn default() -> Self {
        CdscConfig {
            solver: Solver::InImDyn,
            solver_config: SolverConfig::default(),
            alpha_mode: AlphaMode::MaxDegree,
            alpha_margin: DEFAULT_ALPHA_MARGIN,
            alpha_scope: AlphaScope::Global,
            fixed_alpha: None,
        }
    }
}

/// Barycenter of the face of `Q`, plus [`OFF_FACE_MASS`] spread over
/// `V \ Q` when `off_face` is set.
fn cdsc_start(n: usize, q: &IndexSet, off_face: bool) -> Result<SimplexVector> {
    let outside = n - q.len();
    let mut x = vec![0.0; n];
    for (i, v) in x.iter_mut().enumerate() {
        if q.contains(i) {
            *v = 1.0 / q.len() as f64;
        } else if off_face {
            *v = OFF_FACE_MASS / outside as f64;
        }
    }
    SimplexVector::from_weights(x)
}

fn finish(prog: &ConstrainedProgram<'_>, x: &SimplexVector, zero_tol: f64) -> Result<ConstrainedCluster> {
    let support = x.support_relative(zero_tol);
    let satisfied = support.intersection(&prog.q);
    if satisfied.is_empty() {
        return Err(Error::ConstraintUnsatisfied { alpha: prog.alpha });
    }
    let memberships = x.restricted_to(&support)?;
    let objective = prog.objective(&memberships)?;
    Ok(ConstrainedCluster { support, memberships, satisfied_constraints: satisfied, objective, alpha: prog.alpha })
}

/// Solves the penalized program on the whole graph, starting from the
/// barycenter of `Q`. The replicator cannot revive exact zeros, so for it
/// [`OFF_FACE_MASS`] is spread over the other vertices; InImDyn reads their
/// payoffs directly and starts on the face itself.
pub fn solve_cdsc(prog: &ConstrainedProgram<'_>, solver: Solver, cfg: &SolverConfig) -> Result<ConstrainedCluster> {
    let x0 = cdsc_start(prog.a.n(), &prog.q, solver == Solver::Replicator)?;
    let b = prog.payoff_matrix();
    let res = solve_local_max(solver, &b, &x0, cfg)?;
    finish(prog, &res.x, cfg.zero_tol)
}

/// Extracts constrained clusters with a shrinking constraint set: `Q` starts
/// at `V` and loses each extracted support until it is empty. The graph is
/// never modified, so supports may overlap. `alpha` is recomputed per round.
pub fn enumerate_all_constrained(a: &AffinityMatrix, cfg: &CdscConfig) -> Result<Vec<ConstrainedCluster>> {
    enumerate_constrained(a, &IndexSet::full(a.n()), cfg)
}

/// Repeatedly solves the constrained program, removing each solution's
/// support from the constraint set, until every vertex of `q` is covered.
/// Supports may include vertices outside `q`.
pub fn enumerate_constrained(a: &AffinityMatrix, q: &IndexSet, cfg: &CdscConfig) -> Result<Vec<ConstrainedCluster>> {
    q.check_bound(a.n())?;
    let mut q = q.clone();
    let mut out = Vec::new();
    while !q.is_empty() {
        let alpha = match cfg.fixed_alpha {
            Some(alpha) => alpha,
            None => default_alpha(a, &q, cfg.alpha_mode, cfg.alpha_margin),
        };
        let prog = ConstrainedProgram::new(a, q.clone(), alpha)?;
        let cluster = solve_cdsc(&prog, cfg.solver, &cfg.solver_config)?;
        q = q.difference(&cluster.support);
        out.push(cluster);
    }
    Ok(out)
}

/// Assigns every vertex to one cluster: the unique one containing it, or the
/// one maximizing `|support| * membership` when several do. Ties go to the
/// lowest cluster id.
pub fn resolve_overlaps(clusters: &[ConstrainedCluster], n: usize) -> Result<Vec<usize>> {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; n];
    for (c, cluster) in clusters.iter().enumerate() {
        let size = cluster.support.len() as f64;
        for &j in cluster.support.iter() {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, len: n });
            }
            let score = size * cluster.memberships.get(j);
            if best[j].is_none_or(|(_, s)| score > s) {
                best[j] = Some((c, score));
            }
        }
    }
    best.into_iter()
        .enumerate()
        .map(|(j, b)| b.map(|(c, _)| c).ok_or(Error::UnassignedVertex { index: j }))
        .collect()
}

/// First-order conditions of the penalized program at `x`: the penalized
/// payoff equals `x'(A - alpha I_Q)x` on the support and does not exceed it
/// elsewhere, both within `tol`.
pub fn kkt_check(prog: &ConstrainedProgram<'_>, x: &SimplexVector, tol: f64) -> bool {
    if x.len() != prog.a.n() {
        return false;
    }
    let xs = x.as_slice();
    let bx = penalized_payoffs(prog, xs);
    let half_lambda: f64 = xs.iter().zip(bx.iter()).map(|(a, b)| a * b).sum();
    xs.iter().zip(bx.iter()).all(|(&xi, &p)| if xi > 0.0 { (p - half_lambda).abs() <= tol } else { p <= half_lambda + tol })
}

fn penalized_payoffs(prog: &ConstrainedProgram<'_>, x: &[f64]) -> DVector<f64> {
    let mut bx = payoffs(prog.a.as_matrix(), x);
    for (i, p) in bx.iter_mut().enumerate() {
        if !prog.q.contains(i) {
            *p -= prog.alpha * x[i];
        }
    }
    bx
}

/// `(Ax)_i - (x'Ax - alpha sum_{j in V\Q} x_j^2)` for every `i` outside the
/// support of `x`; positive values mark pure dominant distributions.
fn violations(prog: &ConstrainedProgram<'_>, x: &[f64]) -> Vec<(usize, f64)> {
    let ax = payoffs(prog.a.as_matrix(), x);
    let f: f64 = x.iter().zip(ax.iter()).map(|(a, b)| a * b).sum();
    let rhs = f - prog.alpha * prog.penalized_mass(x);
    x.iter().enumerate().filter(|(_, &xi)| xi <= 0.0).map(|(i, _)| (i, ax[i] - rhs)).collect()
}

/// The outsider `i` maximizing the margin of `(Ax)_i > x'Ax - alpha x_Q'x_Q`
/// (penalized components only), or `None` if no outsider satisfies it.
/// Ties go to the lowest index.
pub fn find_dominant_distribution(prog: &ConstrainedProgram<'_>, x: &SimplexVector) -> Option<usize> {
    if x.len() != prog.a.n() {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in violations(prog, x.as_slice()) {
        if v > 0.0 && best.is_none_or(|(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Every outsider whose margin exceeds `margin`. A uniform mixture over them
/// is itself a dominant distribution.
pub fn dominant_support(prog: &ConstrainedProgram<'_>, x: &SimplexVector, margin: f64) -> IndexSet {
    if x.len() != prog.a.n() {
        return IndexSet::empty();
    }
    violations(prog, x.as_slice()).into_iter().filter(|&(_, v)| v > margin).map(|(i, _)| i).collect()
}

/// Result of [`fast_cdsc_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct FastCdscTrace {
    pub cluster: ConstrainedCluster,
    /// Size of the working subgraph at each outer iteration.
    pub subgraph_sizes: Vec<usize>,
}

/// Localized constrained solver. See [`fast_cdsc_traced`].
pub fn fast_cdsc(a: &AffinityMatrix, q: &IndexSet, cfg: &CdscConfig) -> Result<ConstrainedCluster> {
    fast_cdsc_traced(a, q, cfg).map(|t| t.cluster)
}

/// Starts at the barycenter of `Q` (exact zeros elsewhere). Each outer round
/// collects the outsiders that form a dominant distribution, solves the
/// penalized program on `H = support ∪ dominant outsiders ∪ Q` only, and
/// scatters the local maximizer back. Stops when no outsider dominates.
///
/// `alpha` follows `cfg.alpha_scope` unless `cfg.fixed_alpha` is set.
/// Violations smaller than `sqrt(tolerance)` are treated as solver noise,
/// matching the residual stopping rule.
pub fn fast_cdsc_traced(a: &AffinityMatrix, q: &IndexSet, cfg: &CdscConfig) -> Result<FastCdscTrace> {
    if q.is_empty() {
        return Err(Error::EmptySet);
    }
    q.check_bound(a.n())?;
    cfg.solver_config.validate()?;
    let n = a.n();
    let margin = cfg.solver_config.tolerance.sqrt();
    let mut x = cdsc_start(n, q, false)?;
    let mut alpha = cfg.fixed_alpha.unwrap_or_else(|| default_alpha(a, q, cfg.alpha_mode, cfg.alpha_margin));
    let mut sizes = Vec::new();
    let max_rounds = n + 1;
    for round in 0..max_rounds {
        let global = ConstrainedProgram::new(a, q.clone(), alpha)?;
        let support = x.support(0.0);
        let dominant = dominant_support(&global, &x, margin);
        if round > 0 && dominant.is_empty() {
            break;
        }
        let h = support.union(&dominant).union(q);
        sizes.push(h.len());
        let local_a = a.submatrix(h.as_slice());
        let local_q: IndexSet = h.iter().enumerate().filter(|(_, v)| q.contains(**v)).map(|(p, _)| p).collect();
        if cfg.fixed_alpha.is_none() && cfg.alpha_scope == AlphaScope::Subgraph {
            alpha = default_alpha(&local_a, &local_q, cfg.alpha_mode, cfg.alpha_margin);
        }
        let mut start = x.gather(h.as_slice())?.into_vec();
        if cfg.solver == Solver::Replicator && !dominant.is_empty() {
            // Replicator dynamics cannot revive exact zeros.
            let share = OFF_FACE_MASS / dominant.len() as f64;
            for (p, v) in h.iter().enumerate() {
                if dominant.contains(*v) {
                    start[p] += share;
                }
            }
        }
        let start = SimplexVector::from_weights(start)?;
        let b = penalized(local_a.as_matrix(), &local_q, alpha);
        let res = solve_local_max(cfg.solver, &b, &start, &cfg.solver_config)?;
        let local_support = res.x.support_relative(cfg.solver_config.zero_tol);
        let local = res.x.restricted_to(&local_support)?;
        x = SimplexVector::scatter(&local, h.as_slice(), n)?;
    }
    let prog = ConstrainedProgram::new(a, q.clone(), alpha)?;
    let cluster = finish(&prog, &x, cfg.solver_config.zero_tol)?;
    Ok(FastCdscTrace { cluster, subgraph_sizes: sizes })
}
