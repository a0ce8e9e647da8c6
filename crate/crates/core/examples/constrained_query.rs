//! Constrained dominant sets: the cluster containing a query vertex, solved
//! on the whole graph and with the localized solver.

use domset::bench::clique_grid;
use domset::cdsc::{default_alpha, fast_cdsc_traced, solve_cdsc, CdscConfig, ConstrainedProgram};
use domset::IndexSet;

fn main() -> domset::Result<()> {
    let a = clique_grid(20, 10, 0.0, 0.0, 0)?;
    let q = IndexSet::new([57]);
    let cfg = CdscConfig::default();
    let alpha = default_alpha(&a, &q, cfg.alpha_mode, cfg.alpha_margin);
    let prog = ConstrainedProgram::new(&a, q.clone(), alpha)?;

    let full = solve_cdsc(&prog, cfg.solver, &cfg.solver_config)?;
    println!("alpha {alpha:.3}");
    println!("full:  {:?}", full.support.to_vec());

    let fast = fast_cdsc_traced(&a, &q, &cfg)?;
    println!("fast:  {:?}", fast.cluster.support.to_vec());
    println!("working subgraph sizes {:?}", fast.subgraph_sizes);
    Ok(())
}
