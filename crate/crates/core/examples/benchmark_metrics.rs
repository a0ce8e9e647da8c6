//! Clustering quality metrics and the localized-solver timing comparison.

use domset::bench::{clique_grid, fastcdsc_speed, jaccard, purity, v_measure};
use domset::cdsc::CdscConfig;
use domset::IndexSet;

fn main() -> domset::Result<()> {
    println!("jaccard {:.4}", jaccard(&IndexSet::new([1, 2]), &IndexSet::new([2, 3])));
    let truth = ["a", "a", "a", "b", "b", "b"];
    let pred = [0, 0, 0, 0, 1, 1];
    println!("v-measure {:.4} purity {:.4}", v_measure(&pred, &truth)?, purity(&pred, &truth)?);

    let a = clique_grid(20, 100, 0.0, 0.0, 0)?;
    for row in fastcdsc_speed(&a, &[5, 777, 1999], &CdscConfig::default())? {
        println!(
            "query {}: full {:.2} ms, fast {:.2} ms, ratio {:.0}, max subgraph {}",
            row.query,
            row.full_seconds * 1e3,
            row.fast_seconds * 1e3,
            row.ratio,
            row.max_subgraph
        );
    }
    Ok(())
}
