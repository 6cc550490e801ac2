use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::exact_moments::JacobiWeight;
use crate::orthopoly::JacobiRecurrence;

/// Gauss nodes and weights for `w_{m,n}` via the eigen-decomposition of the
/// symmetric Jacobi matrix. Weights sum to `int w` and the rule is exact for
/// polynomials of degree `<= 2 * num_nodes - 1`.
pub fn gauss_jacobi_init(w: JacobiWeight, num_nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if num_nodes == 0 {
        return Err(Error::invalid("gauss_jacobi_init needs num_nodes >= 1"));
    }
    let rec = JacobiRecurrence::new(w, num_nodes);
    let diag = rec.diagonal(num_nodes);
    let off = rec.off_diagonal(num_nodes);
    let mut jm = DMatrix::<f64>::zeros(num_nodes, num_nodes);
    for i in 0..num_nodes {
        jm[(i, i)] = diag[i];
    }
    for (i, &b) in off.iter().enumerate() {
        jm[(i, i + 1)] = b;
        jm[(i + 1, i)] = b;
    }
    let eigen = SymmetricEigen::try_new(jm, f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Internal(format!(
            "symmetric eigen-solver did not converge for {num_nodes} nodes, \
             weight exponents ({}, {})",
            w.alpha(),
            w.beta()
        ))
    })?;
    let mass = w.mass();
    let mut pairs: Vec<(f64, f64)> = eigen
        .eigenvalues
        .iter()
        .zip(eigen.eigenvectors.row(0).iter())
        .map(|(&x, &v)| (x.clamp(-1.0, 1.0), v * v * mass))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}
