//! Associating entities across groups (cameras) with one constrained
//! enumeration per group, followed by the two refinement passes.

use domset::assoc::{refine, track_association, GroupedAffinity};
use domset::cdsc::CdscConfig;
use domset::AffinityMatrix;

fn main() -> domset::Result<()> {
    // Camera 0 sees entities 0..4, camera 1 sees 4..7, camera 2 sees 7..10.
    // One person appears as {1, 3} in camera 0, 5 in camera 1, 8 in camera 2.
    let mut edges = Vec::new();
    for clique in [&[1usize, 3, 5, 8][..], &[2, 4, 7]] {
        for (k, &i) in clique.iter().enumerate() {
            for &j in &clique[k + 1..] {
                edges.push((i, j, 0.9));
            }
        }
    }
    edges.extend([(6, 9, 0.8), (0, 6, 0.05), (0, 4, 0.05)]);
    let a = AffinityMatrix::from_edges(10, &edges)?;
    let ga = GroupedAffinity::from_labels(a, &[0, 0, 0, 0, 1, 1, 1, 2, 2, 2])?;

    let raw = track_association(&ga, &CdscConfig::default())?;
    let refined = refine(raw.clone(), &ga)?;
    for (name, res) in [("raw", &raw), ("refined", &refined)] {
        println!("{name}:");
        for s in res.sets() {
            println!("  group {} -> {:?}", s.group, s.support.to_vec());
        }
    }
    Ok(())
}
