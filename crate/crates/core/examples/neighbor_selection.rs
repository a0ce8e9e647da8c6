//! Variable-length neighbor selection, query pruning and score-curve
//! feature weighting.

use domset::assoc::{dynamic_nn_select, feature_weights, prune_query, RankedNeighborList, DEFAULT_BETA, DEFAULT_THETA};

fn main() -> domset::Result<()> {
    let queries = [
        RankedNeighborList::from_unsorted(0, vec![(11, 1.1), (10, 1.0), (12, 1.15), (13, 4.0), (14, 4.2)])?,
        RankedNeighborList::new(1, vec![(20, 0.3), (21, 2.0), (22, 2.5)])?,
        RankedNeighborList::new(2, vec![(30, 1.0), (31, 1.05), (32, 1.1)])?,
    ];
    for q in &queries {
        println!(
            "query {}: keep neighbors {:?}, {:?}",
            q.query_id(),
            dynamic_nn_select(q, DEFAULT_THETA)?.to_vec(),
            prune_query(q, DEFAULT_BETA)?
        );
    }
    let curves = vec![vec![0.0, 0.1, 0.2, 1.0], vec![0.0, 0.6, 0.9, 1.0]];
    println!("feature weights {:?}", feature_weights(&curves)?);
    Ok(())
}
