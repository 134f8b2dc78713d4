use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::{HermitianMat, HERMITIAN_TOL};

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`.
///
/// `H ⪰ 0` iff the embedding is PSD; each eigenvalue of `H` appears twice.
pub fn embed_hermitian(h: &HermitianMat) -> Result<DMatrix<f64>> {
    embed_complex(h.as_matrix())
}

/// Same as [`embed_hermitian`] for an unchecked complex matrix.
pub fn embed_complex(h: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    if !h.is_square() {
        return invalid("embedding needs a square matrix");
    }
    let scale = 1.0 + h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            if (h[(i, j)] - h[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                return invalid(format!("matrix is not Hermitian at ({i}, {j})"));
            }
        }
    }
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    Ok(out)
}
