//! Folding per-node scores into an affinity, and a normalized kernel turned
//! into an affinity.

use domset::affinity::{homogenize, kernel_trick_affinity, laplacian_kernel, NodeScoreVector};
use domset::{quadratic_value, AffinityMatrix, SimplexVector};
use nalgebra::DMatrix;

fn main() -> domset::Result<()> {
    let a = AffinityMatrix::from_edges(3, &[(0, 1, 0.5), (1, 2, 0.25)])?;
    let b = NodeScoreVector::new(vec![0.1, 0.0, 0.3])?;
    let hb = homogenize(&a, &b)?;
    let x = SimplexVector::new(vec![0.2, 0.5, 0.3])?;
    let lhs = (x.as_vector().transpose() * &hb * x.as_vector())[(0, 0)];
    let rhs = quadratic_value(&a, &x)? + 2.0 * x.as_slice().iter().zip(b.as_slice()).map(|(p, q)| p * q).sum::<f64>();
    println!("x'Bx = {lhs:.6}, x'Ax + 2b'x = {rhs:.6}");

    let points = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 0.1, 0.0, 3.0, 3.0, 3.1, 3.0]);
    let k = laplacian_kernel(&points, Some(1.0))?;
    let ka = kernel_trick_affinity(&k)?;
    println!("kernel affinity:\n{}", ka.as_matrix());
    Ok(())
}
