#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use domset::{AffinityMatrix, SimplexVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Symmetric affinity with each edge present with probability `p` and a
/// uniform weight in `(0, 1)`.
pub fn random_affinity(rng: &mut ChaCha8Rng, n: usize, p: f64) -> AffinityMatrix {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                edges.push((i, j, rng.random_range(0.01..1.0)));
            }
        }
    }
    AffinityMatrix::from_edges(n, &edges).unwrap()
}

/// A point in the relative interior of the simplex.
pub fn random_interior(rng: &mut ChaCha8Rng, n: usize) -> SimplexVector {
    SimplexVector::from_weights((0..n).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap()
}

/// Triangle with a strongly attached fourth vertex and a weakly attached
/// fifth one.
pub fn five_node() -> AffinityMatrix {
    AffinityMatrix::from_edges(
        5,
        &[
            (0, 1, 20.0),
            (0, 2, 21.0),
            (1, 2, 22.0),
            (0, 3, 30.0),
            (1, 3, 35.0),
            (2, 3, 41.0),
            (0, 4, 1.0),
            (1, 4, 1.0),
            (2, 4, 1.0),
            (3, 4, 1.0),
        ],
    )
    .unwrap()
}

pub fn domset_bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_domset"));
    c.env_remove("DOMSET_CONFIG");
    c
}

pub fn run_domset(args: &[&str], dir: &Path) -> Output {
    domset_bin().args(args).current_dir(dir).output().expect("binary runs")
}
