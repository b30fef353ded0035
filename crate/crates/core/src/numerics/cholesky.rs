use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Jitters tried in order by [`cholesky_escalating`].
pub const JITTER_LADDER: [f64; 5] = [0.0, 1e-12, 1e-11, 1e-10, 1e-8];

const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Lower-triangular `L` with `L Lᵀ = sigma + jitter·I`.
///
/// A pivot is accepted only when it exceeds `n·ε·max|diag|`, so exactly
/// singular matrices fail at `jitter = 0` instead of producing a factor
/// dominated by rounding noise.
pub fn cholesky_psd(sigma: &SquareMatrix, jitter: f64) -> Result<SquareMatrix> {
    let n = sigma.n();
    for i in 0..n {
        for j in 0..i {
            if (sigma.get(i, j) - sigma.get(j, i)).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let scale = (0..n).map(|i| sigma.get(i, i).abs()).fold(0.0, f64::max).max(1.0);
    let min_pivot = n as f64 * f64::EPSILON * scale;

    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let row_j = &l[j * n..j * n + j];
        let d = sigma.get(j, j) + jitter - row_j.iter().map(|v| v * v).sum::<f64>();
        // Also rejects NaN.
        if d.partial_cmp(&min_pivot) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::NotPsd(j));
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let dot: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            l[i * n + j] = (sigma.get(i, j) - dot) / ljj;
        }
    }
    SquareMatrix::new(n, l)
}

/// Tries each jitter of [`JITTER_LADDER`] in turn; returns the factor and the
/// jitter that succeeded, or `NotPsd` if even the largest one fails.
pub fn cholesky_escalating(sigma: &SquareMatrix) -> Result<(SquareMatrix, f64)> {
    let mut last = Error::NotPsd(0);
    for &jitter in &JITTER_LADDER {
        match cholesky_psd(sigma, jitter) {
            Ok(l) => return Ok((l, jitter)),
            Err(e @ Error::NotPsd(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
