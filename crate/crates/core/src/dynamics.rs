//! Evolutionary game dynamics that climb `x'Bx` over the standard simplex.
//!
//! Two solvers are provided: the discrete replicator dynamics, whose steps
//! cost `O(n^2)`, and infection-immunization dynamics (InImDyn), which moves
//! along the segment towards a single infective strategy per step and keeps
//! the payoff vector `Bx` up to date in `O(n)`.
//!
//! Both accept a general square payoff matrix. The replicator additionally
//! needs nonnegative payoffs; [`solve`] shifts the matrix by a constant when
//! needed, which leaves the maximizers on the simplex unchanged.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::types::{quadratic_form, IndexSet, SimplexVector, DEFAULT_ZERO_TOL};

/// Stopping parameters shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Convergence threshold on the KKT residual (InImDyn) or on the step
    /// size / `epsilon(x)` (replicator).
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Support threshold relative to the largest component.
    pub zero_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tolerance: 1e-7, max_iterations: 10_000, zero_tol: DEFAULT_ZERO_TOL }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        if !(self.zero_tol >= 0.0) {
            return Err(Error::invalid("zero_tol", "must be nonnegative"));
        }
        Ok(())
    }
}

/// Which dynamics to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    Replicator,
    #[default]
    InImDyn,
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replicator" => Ok(Solver::Replicator),
            "inimdyn" => Ok(Solver::InImDyn),
            other => Err(Error::invalid("solver", format!("unknown solver `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    pub x: SimplexVector,
    /// `x'Bx` for the payoff matrix the caller passed in.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The quantity the stopping rule compared against the tolerance.
    pub residual: f64,
}

fn check_dims(b: &DMatrix<f64>, x: &SimplexVector) -> Result<()> {
    if !b.is_square() {
        return Err(Error::NonSquare { rows: b.nrows(), cols: b.ncols() });
    }
    if b.nrows() != x.len() {
        return Err(Error::DimensionMismatch { expected: b.nrows(), found: x.len() });
    }
    Ok(())
}

/// `Bx`, skipping zero components of `x`.
pub(crate) fn payoffs(b: &DMatrix<f64>, x: &[f64]) -> DVector<f64> {
    let mut out = DVector::zeros(b.nrows());
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            out.axpy(xj, &b.column(j), 1.0);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn epsilon_from(x: &[f64], bx: &[f64], f: f64) -> f64 {
    x.iter()
        .zip(bx)
        .map(|(&xi, &p)| {
            let m = xi.min(f - p);
            m * m
        })
        .sum()
}

/// One discrete replicator step: `x_i <- x_i (Bx)_i / x'Bx`.
pub fn replicator_step(b: &DMatrix<f64>, x: &SimplexVector) -> Result<SimplexVector> {
    check_dims(b, x)?;
    let bx = payoffs(b, x.as_slice());
    replicator_step_with(x, &bx)
}

fn replicator_step_with(x: &SimplexVector, bx: &DVector<f64>) -> Result<SimplexVector> {
    let f = dot(x.as_slice(), bx.as_slice());
    if !(f > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let next = DVector::from_iterator(x.len(), x.as_slice().iter().zip(bx.iter()).map(|(xi, p)| xi * p / f));
    Ok(SimplexVector::normalized(next))
}

/// Iterates the replicator dynamics until the infinity-norm step change or
/// `epsilon(x)` drops to `cfg.tolerance`, whichever happens first.
///
/// `b` must be nonnegative with `x0'Bx0 > 0`.
pub fn run_replicator(b: &DMatrix<f64>, x0: &SimplexVector, cfg: &SolverConfig) -> Result<FixedPointResult> {
    check_dims(b, x0)?;
    cfg.validate()?;
    let mut x = x0.clone();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        let bx = payoffs(b, x.as_slice());
        let next = replicator_step_with(&x, &bx)?;
        iterations += 1;
        let step = next.as_slice().iter().zip(x.as_slice()).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        x = next;
        let bx = payoffs(b, x.as_slice());
        let f = dot(x.as_slice(), bx.as_slice());
        let eps = epsilon_from(x.as_slice(), bx.as_slice(), f);
        residual = step.min(eps);
        if residual <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let objective = quadratic_form(b, x.as_slice())?;
    Ok(FixedPointResult { x, objective, iterations, converged, residual })
}

/// `sum_i min{x_i, x'Bx - (Bx)_i}^2`, which vanishes exactly at Nash
/// equilibria of the symmetric game with payoff `B`.
pub fn epsilon(b: &DMatrix<f64>, x: &SimplexVector) -> Result<f64> {
    check_dims(b, x)?;
    let bx = payoffs(b, x.as_slice());
    let f = dot(x.as_slice(), bx.as_slice());
    Ok(epsilon_from(x.as_slice(), bx.as_slice(), f))
}

fn kkt_residual_from(x: &[f64], bx: &[f64], f: f64) -> f64 {
    x.iter()
        .zip(bx)
        .map(|(&xi, &p)| {
            let r = if xi > 0.0 { f - p } else { (p - f).max(0.0) };
            r * r
        })
        .sum()
}

/// `sum_{i in supp} (x'Bx - (Bx)_i)^2 + sum_{i not in supp} max(0, (Bx)_i - x'Bx)^2`.
///
/// Like [`epsilon`] it vanishes exactly at equilibria, but a strategy whose
/// payoff trails the mean counts in full however small its mass. It bounds
/// [`epsilon`] from above and is the stopping quantity of [`inimdyn`].
pub fn kkt_residual(b: &DMatrix<f64>, x: &SimplexVector) -> Result<f64> {
    check_dims(b, x)?;
    let bx = payoffs(b, x.as_slice());
    let f = dot(x.as_slice(), bx.as_slice());
    Ok(kkt_residual_from(x.as_slice(), bx.as_slice(), f))
}

/// The pure strategy with the largest positive advantage `(Bx)_i - x'Bx`,
/// or `None` when no pure strategy invades `x`. Ties go to the lowest index.
pub fn select_infective(b: &DMatrix<f64>, x: &SimplexVector) -> Option<usize> {
    if check_dims(b, x).is_err() {
        return None;
    }
    let bx = payoffs(b, x.as_slice());
    let f = dot(x.as_slice(), bx.as_slice());
    best_pure(&bx, f).map(|(i, _)| i)
}

fn best_pure(bx: &DVector<f64>, f: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in bx.iter().enumerate() {
        let g = p - f;
        if g > 0.0 && best.is_none_or(|(_, bg)| g > bg) {
            best = Some((i, g));
        }
    }
    best
}

/// Infective strategy chosen by InImDyn.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Strategy {
    /// The pure strategy `e_i`, which beats `x` when `(Bx)_i > x'Bx`.
    Pure(usize),
    /// The co-strategy of `e_i` (x with component `i` removed, renormalized),
    /// which beats `x` when `x_i > 0` and `(Bx)_i < x'Bx`.
    Co(usize),
}

fn select_strategy(x: &[f64], bx: &DVector<f64>, f: f64) -> Option<Strategy> {
    let mut best: Option<(Strategy, f64)> = None;
    for (i, &p) in bx.iter().enumerate() {
        let g = p - f;
        let candidate = if g > 0.0 {
            Some((Strategy::Pure(i), g))
        } else if g < 0.0 && x[i] > 0.0 && x[i] < 1.0 {
            Some((Strategy::Co(i), -g))
        } else {
            None
        };
        if let Some((s, score)) = candidate {
            if best.is_none_or(|(_, bs)| score > bs) {
                best = Some((s, score));
            }
        }
    }
    best.map(|(s, _)| s)
}

/// Mutable InImDyn state: the population and its cached payoff vector.
struct InImDynState<'a> {
    b: &'a DMatrix<f64>,
    x: Vec<f64>,
    bx: DVector<f64>,
}

impl<'a> InImDynState<'a> {
    fn new(b: &'a DMatrix<f64>, x0: &SimplexVector) -> Self {
        let x = x0.as_slice().to_vec();
        let bx = payoffs(b, &x);
        InImDynState { b, x, bx }
    }

    fn objective(&self) -> f64 {
        dot(&self.x, self.bx.as_slice())
    }

    fn residual(&self) -> f64 {
        kkt_residual_from(&self.x, self.bx.as_slice(), self.objective())
    }

    fn resync(&mut self) {
        self.bx = payoffs(self.b, &self.x);
    }

    /// Performs one infection step. Returns `false` at an equilibrium.
    fn step(&mut self) -> bool {
        let f = self.objective();
        let Some(strategy) = select_strategy(&self.x, &self.bx, f) else {
            return false;
        };
        // Direction d = y - x and its payoff image Bd.
        let (d, bd): (Vec<f64>, DVector<f64>) = match strategy {
            Strategy::Pure(i) => {
                let mut d: Vec<f64> = self.x.iter().map(|v| -v).collect();
                d[i] += 1.0;
                (d, self.b.column(i) - &self.bx)
            }
            Strategy::Co(i) => {
                let c = self.x[i] / (1.0 - self.x[i]);
                let mut d: Vec<f64> = self.x.iter().map(|v| c * v).collect();
                d[i] -= c;
                (d, (&self.bx - self.b.column(i)) * c)
            }
        };
        let gain = dot(&d, self.bx.as_slice());
        let curvature = dot(&d, bd.as_slice());
        let delta = if curvature < 0.0 { (gain / -curvature).min(1.0) } else { 1.0 };
        for (xi, di) in self.x.iter_mut().zip(&d) {
            *xi += delta * di;
            if *xi < 0.0 {
                *xi = 0.0;
            }
        }
        if let Strategy::Co(i) = strategy {
            if delta == 1.0 {
                self.x[i] = 0.0;
            }
        }
        self.bx.axpy(delta, &bd, 1.0);
        true
    }

    fn into_simplex(self) -> SimplexVector {
        SimplexVector::normalized(DVector::from_vec(self.x))
    }
}

const RESYNC_EVERY: usize = 1024;

/// One InImDyn step from `x`, or `None` if `x` is already an equilibrium.
pub fn inimdyn_step(b: &DMatrix<f64>, x: &SimplexVector) -> Result<Option<SimplexVector>> {
    check_dims(b, x)?;
    let mut state = InImDynState::new(b, x);
    if state.step() {
        Ok(Some(state.into_simplex()))
    } else {
        Ok(None)
    }
}

/// Infection-immunization dynamics: loops while [`kkt_residual`] exceeds the
/// tolerance, each time moving towards the most infective pure strategy or
/// co-strategy with the exact line-search step.
pub fn inimdyn(b: &DMatrix<f64>, x0: &SimplexVector, cfg: &SolverConfig) -> Result<FixedPointResult> {
    check_dims(b, x0)?;
    cfg.validate()?;
    let mut state = InImDynState::new(b, x0);
    let mut iterations = 0;
    let mut residual = state.residual();
    let mut converged = residual <= cfg.tolerance;
    while !converged && iterations < cfg.max_iterations {
        if !state.step() {
            state.resync();
            residual = state.residual();
            converged = true;
            break;
        }
        iterations += 1;
        if iterations % RESYNC_EVERY == 0 {
            state.resync();
        }
        residual = state.residual();
        converged = residual <= cfg.tolerance;
    }
    let x = state.into_simplex();
    let objective = quadratic_form(b, x.as_slice())?;
    Ok(FixedPointResult { x, objective, iterations, converged, residual })
}

/// Runs `solver` from `x0`. For the replicator, a payoff matrix with negative
/// entries is shifted by a constant first; the reported objective always
/// refers to `b` itself. A constant `b` makes every point a fixed point, so
/// the replicator returns `x0` unchanged.
pub fn solve(solver: Solver, b: &DMatrix<f64>, x0: &SimplexVector, cfg: &SolverConfig) -> Result<FixedPointResult> {
    match solver {
        Solver::InImDyn => inimdyn(b, x0, cfg),
        Solver::Replicator => {
            let min = b.iter().copied().fold(f64::INFINITY, f64::min);
            let max = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == min {
                check_dims(b, x0)?;
                cfg.validate()?;
                let objective = quadratic_form(b, x0.as_slice())?;
                return Ok(FixedPointResult { x: x0.clone(), objective, iterations: 0, converged: true, residual: 0.0 });
            }
            if min >= 0.0 {
                return run_replicator(b, x0, cfg);
            }
            let shifted = b.map(|v| v - min);
            let mut res = run_replicator(&shifted, x0, cfg)?;
            res.objective = quadratic_form(b, res.x.as_slice())?;
            Ok(res)
        }
    }
}

/// Largest support on which [`solve_local_max`] runs the curvature test.
pub const MAX_CURVATURE_CHECK: usize = 600;
const MAX_ESCAPES: usize = 16;

/// Cheap sufficient test: `B` restricted to the face of `support`, written
/// in the basis `e_i - e_last`, is below `shift` (Cholesky of `shift I - M`
/// succeeds). The basis is not orthonormal, so `shift` only guards noise.
fn tangent_negative_definite(b: &DMatrix<f64>, support: &[usize], shift: f64) -> bool {
    let k = support.len();
    let last = support[k - 1];
    let m = DMatrix::from_fn(k - 1, k - 1, |r, c| {
        let (i, j) = (support[r], support[c]);
        let v = b[(i, j)] - b[(i, last)] - b[(last, j)] + b[(last, last)];
        if r == c {
            shift - v
        } else {
            -v
        }
    });
    m.cholesky().is_some()
}

/// Direction of positive curvature of `x'Bx` within the face spanned by
/// `support`, if any. The returned vector sums to zero and is oriented so
/// that the first-order term is nonnegative.
fn ascent_direction(b: &DMatrix<f64>, x: &[f64], support: &[usize]) -> Option<DVector<f64>> {
    let k = support.len();
    if !(2..=MAX_CURVATURE_CHECK).contains(&k) {
        return None;
    }
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if tangent_negative_definite(b, support, 1e-9 * scale) {
        return None;
    }
    let sub = crate::types::principal_submatrix(b, support);
    let p = DMatrix::<f64>::identity(k, k) - DMatrix::from_element(k, k, 1.0 / k as f64);
    let t = &p * sub * &p;
    let t = (&t + t.transpose()) * 0.5;
    let eig = t.symmetric_eigen();
    let (idx, &lambda) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if lambda <= 1e-9 * scale {
        return None;
    }
    let mut v = &p * eig.eigenvectors.column(idx);
    let bx = payoffs(b, x);
    let slope: f64 = support.iter().zip(v.iter()).map(|(&i, vi)| vi * bx[i]).sum();
    if slope < 0.0 {
        v.neg_mut();
    }
    Some(v)
}

/// Mass injected on each invading strategy by [`repair_equilibrium`].
const INVADER_MASS: f64 = 1e-3;

/// `x` with every support member whose payoff falls short of `x'Bx` by more
/// than `gap` removed and every outside strategy whose payoff exceeds it by
/// more than `gap` seeded, if either kind exists.
fn repair_equilibrium(b: &DMatrix<f64>, x: &SimplexVector, support: &IndexSet, gap: f64) -> Option<SimplexVector> {
    let bx = payoffs(b, x.as_slice());
    let f: f64 = x.as_slice().iter().zip(bx.iter()).map(|(xi, bi)| xi * bi).sum();
    let mut y: Vec<f64> = (0..x.len()).map(|i| if support.contains(i) { x.as_slice()[i] } else { 0.0 }).collect();
    let mut changed = false;
    for i in 0..x.len() {
        if support.contains(i) && bx[i] < f - gap {
            y[i] = 0.0;
            changed = true;
        } else if !support.contains(i) && bx[i] > f + gap {
            y[i] = INVADER_MASS;
            changed = true;
        }
    }
    if !changed || y.iter().all(|&v| v == 0.0) {
        return None;
    }
    Some(SimplexVector::normalized(DVector::from_vec(y)))
}

/// Runs `solver` and, whenever it stops at an equilibrium that is not a
/// local maximizer on its face, steps off along a direction of positive
/// curvature and solves again.
///
/// Dynamics started near a saddle (the barycenter of a regular graph, for
/// instance) satisfy the `epsilon` stopping rule immediately; this restores
/// the guarantee that the returned support is a strict local maximizer.
/// Supports larger than [`MAX_CURVATURE_CHECK`] are not checked.
///
/// A stop that is not an equilibrium to within `sqrt(tolerance)` times the
/// largest entry of `B` (a support member still decaying, or an outside
/// strategy still invading) is repaired and the solver restarted.
pub fn solve_local_max(solver: Solver, b: &DMatrix<f64>, x0: &SimplexVector, cfg: &SolverConfig) -> Result<FixedPointResult> {
    let mut res = solve(solver, b, x0, cfg)?;
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = cfg.tolerance.sqrt() * scale;
    for _ in 0..MAX_ESCAPES {
        let support = res.x.support_relative(cfg.zero_tol);
        if let Some(y) = repair_equilibrium(b, &res.x, &support, gap) {
            let iterations = res.iterations;
            res = solve(solver, b, &y, cfg)?;
            res.iterations += iterations;
            continue;
        }
        let Some(v) = ascent_direction(b, res.x.as_slice(), support.as_slice()) else {
            break;
        };
        let x = res.x.as_slice();
        let limit = support
            .iter()
            .zip(v.iter())
            .filter(|(_, &vi)| vi < 0.0)
            .map(|(&i, &vi)| x[i] / -vi)
            .fold(f64::INFINITY, f64::min);
        if !limit.is_finite() || limit <= 0.0 {
            break;
        }
        let mut y = x.to_vec();
        for (&i, &vi) in support.iter().zip(v.iter()) {
            y[i] = (y[i] + 0.5 * limit * vi).max(0.0);
        }
        let y = SimplexVector::normalized(DVector::from_vec(y));
        let iterations = res.iterations;
        res = solve(solver, b, &y, cfg)?;
        res.iterations += iterations;
    }
    Ok(res)
}
