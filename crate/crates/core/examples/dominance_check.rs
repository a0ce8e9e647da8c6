//! The combinatorial view: weights of vertices relative to a set, the
//! dominance test, and the exhaustive list of dominant sets of a small graph.

use domset::dsets::{brute_force_dominant_sets, is_dominant_set, node_weight};
use domset::{AffinityMatrix, IndexSet};

fn main() -> domset::Result<()> {
    // A tight triangle {0, 1, 2}, a vertex 3 attached to it, and a vertex 4
    // weakly tied to everything.
    let a = AffinityMatrix::from_edges(
        5,
        &[(0, 1, 20.0), (0, 2, 21.0), (1, 2, 22.0), (0, 3, 30.0), (1, 3, 35.0), (2, 3, 41.0),
          (0, 4, 1.0), (1, 4, 1.0), (2, 4, 1.0), (3, 4, 1.0)],
    )?;
    let triangle = IndexSet::new([0, 1, 2]);
    let quad = IndexSet::new([0, 1, 2, 3]);
    println!("w(3) relative to {{0,1,2}}: {:.1}", node_weight(&a, &triangle.union(&IndexSet::new([3])), 3)?);
    println!("w(4) relative to {{0,1,2,3}}: {:.1}", node_weight(&a, &quad.union(&IndexSet::new([4])), 4)?);
    let report = is_dominant_set(&a, &quad)?;
    println!("{{0,1,2,3}} dominant: {}", report.is_dominant);
    for (v, w) in &report.external_violations {
        println!("  outsider {v}: weight {w:.1}");
    }
    for s in brute_force_dominant_sets(&a)? {
        println!("dominant set {:?}", s.to_vec());
    }
    Ok(())
}
