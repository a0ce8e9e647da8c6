//! Replicator dynamics and infection-immunization dynamics on the same
//! payoff matrix, with their convergence diagnostics.

use domset::dynamics::{epsilon, solve, solve_local_max, Solver, SolverConfig};
use domset::{barycenter, AffinityMatrix};

fn main() -> domset::Result<()> {
    let a = AffinityMatrix::from_edges(
        6,
        &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 0.2), (3, 4, 0.9), (4, 5, 0.9), (3, 5, 0.9)],
    )?;
    let b = a.as_matrix();
    let x0 = barycenter(a.n())?;
    let cfg = SolverConfig { tolerance: 1e-12, max_iterations: 100_000, ..SolverConfig::default() };
    for solver in [Solver::Replicator, Solver::InImDyn] {
        let r = solve(solver, b, &x0, &cfg)?;
        println!(
            "{solver:?}: support {:?} objective {:.6} iterations {} epsilon {:.2e}",
            r.x.support_relative(1e-6).to_vec(),
            r.objective,
            r.iterations,
            epsilon(b, &r.x)?
        );
    }
    // A regular graph's barycenter is an equilibrium but not a maximizer.
    let ring = AffinityMatrix::from_edges(6, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)])?;
    let r = solve_local_max(Solver::InImDyn, ring.as_matrix(), &barycenter(6)?, &cfg)?;
    println!("two-triangle local maximizer support {:?}", r.x.support_relative(1e-6).to_vec());
    Ok(())
}
