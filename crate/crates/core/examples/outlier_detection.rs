//! Clustering with outlier detection on generated blobs plus uniform noise.

use domset::bench::{gen_synthetic, point_affinity, score_labels, GenParams};
use domset::scod::{scod, ScodConfig};

fn main() -> domset::Result<()> {
    let params = GenParams { k: 4, m: 40, d: 8, sigma: 0.03, l: 20, seed: 7 };
    let data = gen_synthetic(params)?;
    let a = point_affinity(&data.points)?;
    let result = scod(&a, &ScodConfig::default())?;
    println!("global cohesiveness {:.4}", result.global_cohesiveness);
    for (c, cl) in result.clusters.iter().enumerate() {
        println!("cluster {c}: {} points, cohesiveness {:.4}", cl.support.len(), cl.cohesiveness);
    }
    println!("outliers: {}", result.outliers().len());
    let s = score_labels(&result.labels(data.n()), &data.labels)?;
    println!("jaccard {:.3} v-measure {:.3} purity {:.3}", s.jaccard, s.v_measure, s.purity);
    Ok(())
}
