//! Dense square matrices, row normalization, sign vectors and the symmetry
//! group (row permutations, row signs, column signs) under which β is
//! invariant.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows with a norm below this are treated as zero.
pub const ZERO_ROW_NORM: f64 = 1e-300;

/// Largest dimension accepted by the brute-force symmetry search.
pub const MAX_SYMMETRY_SEARCH_N: usize = 8;

/// Dense n×n real matrix stored row-major, with cached ℓ2 row norms.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<f64>,
    row_norms: Vec<f64>,
}

impl SquareMatrix {
    /// Builds a matrix from row-major entries. Fails on a wrong length or a
    /// non-finite entry.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: k / n, col: k % n });
        }
        let row_norms = entries.chunks_exact(n).map(l2_norm).collect();
        Ok(SquareMatrix { n, entries, row_norms })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            entries.extend_from_slice(r);
        }
        SquareMatrix::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        SquareMatrix {
            n,
            entries,
            row_norms: vec![1.0; n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        SquareMatrix::new(n, entries)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row_norms(&self) -> &[f64] {
        &self.row_norms
    }

    pub fn transpose(&self) -> SquareMatrix {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        SquareMatrix::new(n, entries).expect("transpose of a valid matrix")
    }

    /// Plain matrix product `self · other`.
    pub fn matmul(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(orow) {
                    *o += aik * b;
                }
            }
        }
        SquareMatrix::new(n, out)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `perm[i]` is the source row that lands in row i.
    pub fn permute_rows(&self, perm: &[usize]) -> SquareMatrix {
        assert_eq!(perm.len(), self.n);
        let mut entries = Vec::with_capacity(self.entries.len());
        for &src in perm {
            entries.extend_from_slice(self.row(src));
        }
        SquareMatrix::new(self.n, entries).expect("permutation preserves validity")
    }

    /// `perm[j]` is the source column that lands in column j.
    pub fn permute_cols(&self, perm: &[usize]) -> SquareMatrix {
        assert_eq!(perm.len(), self.n);
        SquareMatrix::from_fn(self.n, |i, j| self.get(i, perm[j])).expect("valid")
    }

    pub fn flip_row_sign(&self, i: usize) -> SquareMatrix {
        let mut m = self.clone();
        let n = self.n;
        m.entries[i * n..(i + 1) * n].iter_mut().for_each(|v| *v = -*v);
        m
    }

    pub fn flip_col_sign(&self, j: usize) -> SquareMatrix {
        let mut m = self.clone();
        let n = self.n;
        for i in 0..n {
            m.entries[i * n + j] = -m.entries[i * n + j];
        }
        m
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{})", self.n, self.n)?;
        for r in self.rows() {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    // Scaled to avoid overflow/underflow for extreme magnitudes.
    let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale) * (x / scale)).sum::<f64>().sqrt()
}

/// A square matrix whose rows all have unit ℓ2 norm; the object β is
/// evaluated on.
#[derive(Clone, PartialEq, Serialize)]
pub struct RowNormalizedMatrix {
    inner: SquareMatrix,
}

impl RowNormalizedMatrix {
    pub fn into_inner(self) -> SquareMatrix {
        self.inner
    }

    pub fn as_matrix(&self) -> &SquareMatrix {
        &self.inner
    }

    pub fn identity(n: usize) -> Self {
        RowNormalizedMatrix {
            inner: SquareMatrix::identity(n),
        }
    }

    /// Applies a row permutation, row sign flips and column sign flips in
    /// that order. Signs are `true` for a flip.
    pub fn transformed(&self, row_perm: &[usize], row_flips: &[bool], col_flips: &[bool]) -> Self {
        let n = self.n();
        let m = self.inner.permute_rows(row_perm);
        let m = SquareMatrix::from_fn(n, |i, j| {
            let mut v = m.get(i, j);
            if row_flips[i] {
                v = -v;
            }
            if col_flips[j] {
                v = -v;
            }
            v
        })
        .expect("valid");
        RowNormalizedMatrix { inner: m }
    }

    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        RowNormalizedMatrix {
            inner: self.inner.permute_cols(perm),
        }
    }
}

impl Deref for RowNormalizedMatrix {
    type Target = SquareMatrix;

    fn deref(&self) -> &SquareMatrix {
        &self.inner
    }
}

impl fmt::Debug for RowNormalizedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RowNormalized{:?}", self.inner)
    }
}

/// Divides every row by its ℓ2 norm.
pub fn normalize_rows(m: &SquareMatrix) -> Result<RowNormalizedMatrix> {
    let n = m.n();
    let mut entries = Vec::with_capacity(n * n);
    for (i, (row, &norm)) in m.rows().zip(m.row_norms()).enumerate() {
        if norm < ZERO_ROW_NORM {
            return Err(Error::ZeroRow(i));
        }
        entries.extend(row.iter().map(|v| v / norm));
    }
    Ok(RowNormalizedMatrix {
        inner: SquareMatrix::new(n, entries)?,
    })
}

/// A vertex of {−1, 1}^n packed into bits: bit j set means x_j = −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    bits: u64,
    n: usize,
}

impl SignVector {
    pub const MAX_N: usize = 64;

    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n == 0 || n > Self::MAX_N {
            return Err(Error::InvalidArgument(format!(
                "sign vector dimension {n} not in 1..=64"
            )));
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "bits {bits:#x} do not fit in {n} coordinates"
            )));
        }
        Ok(SignVector { bits, n })
    }

    /// The all-ones vertex.
    pub fn ones(n: usize) -> Result<Self> {
        SignVector::new(0, n)
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut bits = 0u64;
        for (j, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => bits |= 1 << j,
                _ => return Err(Error::InvalidArgument(format!("entry {j} is {s}, expected ±1"))),
            }
        }
        SignVector::new(bits, signs.len())
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sign(&self, j: usize) -> f64 {
        if self.bits >> j & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.sign(j)).collect()
    }

    pub fn negated(&self) -> SignVector {
        let mask = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        SignVector {
            bits: !self.bits & mask,
            n: self.n,
        }
    }
}

/// True iff some row permutation combined with row and column sign flips
/// maps `a` onto `b` entrywise within `tol`.
///
/// Exhausts the 2^n column-sign patterns; for each one, rows are matched up
/// to sign by a backtracking bipartite search.
pub fn equivalent_up_to_symmetry(a: &RowNormalizedMatrix, b: &RowNormalizedMatrix, tol: f64) -> Result<bool> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::DimensionMismatch(format!("{n} vs {}", b.n())));
    }
    if n > MAX_SYMMETRY_SEARCH_N {
        return Err(Error::TooLarge {
            what: "symmetry search",
            n,
            max: MAX_SYMMETRY_SEARCH_N,
        });
    }
    let close = |x: &[f64], y: &[f64], col_flips: u32, row_sign: f64| {
        x.iter().zip(y).enumerate().all(|(j, (&u, &v))| {
            let s = if col_flips >> j & 1 == 1 { -row_sign } else { row_sign };
            (s * u - v).abs() <= tol
        })
    };
    let mut compat = vec![false; n * n];
    for col_flips in 0u32..(1 << n) {
        for i in 0..n {
            for k in 0..n {
                compat[i * n + k] =
                    close(a.row(i), b.row(k), col_flips, 1.0) || close(a.row(i), b.row(k), col_flips, -1.0);
            }
        }
        let mut used = vec![false; n];
        if match_rows(&compat, n, 0, &mut used) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn match_rows(compat: &[bool], n: usize, i: usize, used: &mut [bool]) -> bool {
    if i == n {
        return true;
    }
    for k in 0..n {
        if !used[k] && compat[i * n + k] {
            used[k] = true;
            if match_rows(compat, n, i + 1, used) {
                return true;
            }
            used[k] = false;
        }
    }
    false
}

/// Cheap necessary condition for symmetry equivalence at any size: the
/// sorted multisets of absolute entries agree within `tol`.
pub fn fingerprint_equivalent(a: &SquareMatrix, b: &SquareMatrix, tol: f64) -> bool {
    if a.n() != b.n() {
        return false;
    }
    let sorted = |m: &SquareMatrix| {
        let mut v: Vec<f64> = m.entries().iter().map(|x| x.abs()).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    sorted(a)
        .iter()
        .zip(sorted(b).iter())
        .all(|(x, y)| (x - y).abs() <= tol)
}
