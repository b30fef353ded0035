use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// A Householder pivot below this magnitude counts as a rank collapse.
pub const QR_PIVOT_TOLERANCE: f64 = 1e-10;

/// `input = q · r` with `q` orthogonal and `r` upper triangular with a
/// strictly positive diagonal.
#[derive(Clone, Debug)]
pub struct QrResult {
    pub q: SquareMatrix,
    pub r: SquareMatrix,
}

/// Householder QR with the sign convention `R_kk > 0`, which makes the
/// factorization of a full-rank matrix unique.
pub fn qr_positive_diag(u: &SquareMatrix) -> Result<QrResult> {
    let n = u.n();
    // Column-major working copy of R; reflectors kept for forming Q.
    let mut r: Vec<Vec<f64>> = (0..n).map(|j| u.column(j)).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);

    for k in 0..n {
        let x = &r[k][k..];
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < QR_PIVOT_TOLERANCE {
            return Err(Error::RankDeficient(k));
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = x.to_vec();
        v[0] -= alpha;
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            v.iter_mut().for_each(|t| *t /= vnorm);
            for col in r.iter_mut().skip(k) {
                reflect(&mut col[k..], &v);
            }
        }
        // Exact zeros below the diagonal.
        r[k][k] = alpha;
        r[k][k + 1..].iter_mut().for_each(|t| *t = 0.0);
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}, formed by applying reflectors to I in reverse.
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for (k, v) in reflectors.iter().enumerate().rev() {
        if v.iter().all(|t| *t == 0.0) {
            continue;
        }
        for col in q.iter_mut() {
            reflect(&mut col[k..], v);
        }
    }

    // Flip signs so the diagonal of R is positive: negate row k of R and
    // column k of Q together.
    for k in 0..n {
        if r[k][k] < 0.0 {
            for col in r.iter_mut() {
                col[k] = -col[k];
            }
            q[k].iter_mut().for_each(|t| *t = -*t);
        }
    }

    let q = SquareMatrix::from_fn(n, |i, j| q[j][i])?;
    let r = SquareMatrix::from_fn(n, |i, j| r[j][i])?;
    Ok(QrResult { q, r })
}

#[inline]
fn reflect(x: &mut [f64], v: &[f64]) {
    let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    let s = 2.0 * dot;
    x.iter_mut().zip(v).for_each(|(a, b)| *a -= s * b);
}
