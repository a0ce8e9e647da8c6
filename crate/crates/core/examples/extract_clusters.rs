//! Peel dominant sets off a small graph with two dense groups and a
//! loosely attached vertex.

use domset::dsets::{peel_off_enumerate, ExtractConfig, PeelStop};
use domset::AffinityMatrix;

fn main() -> domset::Result<()> {
    let a = AffinityMatrix::from_edges(
        7,
        &[(0, 1, 0.9), (0, 2, 0.8), (1, 2, 0.85), (3, 4, 0.7), (3, 5, 0.75), (4, 5, 0.8), (2, 6, 0.1), (5, 6, 0.1)],
    )?;
    let peel = peel_off_enumerate(&a, PeelStop::default(), &ExtractConfig::default())?;
    for (k, c) in peel.clusters.iter().enumerate() {
        println!("cluster {k}: {:?} cohesiveness {:.4}", c.support.to_vec(), c.cohesiveness);
        let weights: Vec<String> = c.support.iter().map(|&i| format!("{i}:{:.3}", c.characteristic.get(i))).collect();
        println!("  memberships {}", weights.join(" "));
    }
    println!("residual {:?}", peel.residual.to_vec());
    Ok(())
}
