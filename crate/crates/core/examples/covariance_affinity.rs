//! Region covariance descriptors, their Riemannian distance, and an
//! affinity over detections combining appearance and location.

use domset::affinity::{covariance_descriptor, covariance_distance, joint_distance, similarity, JointWeights, DEFAULT_GAMMA};
use nalgebra::DMatrix;

fn main() -> domset::Result<()> {
    // Three "detections", each a set of 50 pixel feature vectors.
    let features = |shift: f64, spread: f64| {
        DMatrix::from_fn(50, 3, |i, j| {
            let t = i as f64 / 49.0;
            shift + spread * ((t * (j + 1) as f64 * 3.1).sin() + 0.3 * t * j as f64)
        })
    };
    let descs = [covariance_descriptor(&features(0.0, 1.0))?, covariance_descriptor(&features(5.0, 1.05))?, covariance_descriptor(&features(0.0, 3.0))?];
    let positions: [(f64, f64); 3] = [(10.0, 20.0), (12.0, 21.0), (60.0, 5.0)];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let app = covariance_distance(&descs[i], &descs[j])?;
            let loc = (positions[i].0 - positions[j].0).hypot(positions[i].1 - positions[j].1);
            let d = joint_distance(app, loc, JointWeights::UNIT);
            println!("({i},{j}) appearance {app:.4} location {loc:.2} joint {d:.3} affinity {:.5}", similarity(d, DEFAULT_GAMMA));
        }
    }
    Ok(())
}
