//! Dense symmetric eigensolver, used for ν = 2 and as an independent check.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::operator::JacobiOperator;

/// Largest operator handed to the dense path.
pub const DENSE_LIMIT: usize = 4000;

/// All eigenpairs, eigenvalues ascending, eigenvectors as the matching columns.
pub fn dense_eigh(op: &JacobiOperator) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = op.len();
    if n > DENSE_LIMIT {
        return Err(Error::SizeLimit {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let eig = SymmetricEigen::new(op.to_dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub fn dense_eigenvalues(op: &JacobiOperator) -> Result<Vec<f64>> {
    let n = op.len();
    if n > DENSE_LIMIT {
        return Err(Error::SizeLimit {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let mut values: Vec<f64> = op.to_dense().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}
