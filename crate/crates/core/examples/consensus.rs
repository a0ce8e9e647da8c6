//! Consensus clustering from an ensemble of partitions via co-association.

use domset::affinity::{coassociation, consensus};
use domset::dsets::{ExtractConfig, PeelStop};

fn main() -> domset::Result<()> {
    let ensemble = vec![
        vec![0, 0, 0, 1, 1, 1, 2],
        vec![0, 0, 1, 1, 1, 1, 2],
        vec![3, 3, 3, 4, 4, 5, 5],
        vec![0, 0, 0, 1, 1, 1, -1],
    ];
    let co = coassociation(&ensemble)?;
    println!("co-association of items 0 and 2: {:.2}", co.get(0, 2));
    let stop = PeelStop { min_cluster_size: 1, max_clusters: None };
    let peel = consensus(&co, stop, &ExtractConfig::default())?;
    println!("labels {:?}", peel.labels(co.as_affinity().n()));
    Ok(())
}
