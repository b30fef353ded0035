//! Chunked Gray-code walk over the half cube {x ∈ {−1,1}^n : x_{n−1} = +1}.
//!
//! Vertex `t` of the walk is the reflected binary code `t ^ (t >> 1)` on the
//! low n−1 bits, so consecutive vertices differ in one coordinate and `y = Ax`
//! is updated by ±2·column instead of being recomputed. A full recomputation
//! every [`RECOMPUTE_PERIOD`] steps caps floating-point drift.

use crate::matrix::SquareMatrix;

pub const RECOMPUTE_PERIOD: u64 = 1 << 16;

/// Largest n accepted by exhaustive enumeration.
pub const MAX_EXACT_N: usize = 26;

const MAX_CHUNKS: u64 = 256;

/// Inner products within this distance of the maximum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Number of chunks for a half cube of dimension n: min(2^{n−1}, 256).
/// Depends on n only, never on the thread count.
pub fn exact_chunk_count(n: usize) -> u64 {
    (1u64 << (n - 1)).min(MAX_CHUNKS)
}

/// Column-major copy of a matrix, for the ±2·column updates.
pub(crate) struct Columns {
    n: usize,
    data: Vec<f64>,
}

impl Columns {
    pub(crate) fn new(a: &SquareMatrix) -> Self {
        Columns {
            n: a.n(),
            data: a.transpose().entries().to_vec(),
        }
    }

    #[inline]
    pub(crate) fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    /// `y = A x` for the vertex encoded by `bits` (bit j set ⇔ x_j = −1).
    pub(crate) fn image(&self, bits: u64, y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            let c = self.col(j);
            if bits >> j & 1 == 1 {
                y.iter_mut().zip(c).for_each(|(v, a)| *v -= a);
            } else {
                y.iter_mut().zip(c).for_each(|(v, a)| *v += a);
            }
        }
    }

    /// `y = A x` for x given as a ±1 vector.
    #[inline]
    pub(crate) fn image_f64(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            let c = self.col(j);
            y.iter_mut().zip(c).for_each(|(v, a)| *v += xj * a);
        }
    }
}

/// Visits every vertex of chunk `chunk` (of `chunks` equal chunks) of the half
/// cube, passing the vertex bits and the current image `Ax`.
pub(crate) fn walk_chunk(cols: &Columns, chunk: u64, chunks: u64, mut visit: impl FnMut(u64, &[f64])) {
    let n = cols.n;
    let half = 1u64 << (n - 1);
    debug_assert!(chunks.is_power_of_two() && chunks <= half);
    let len = half / chunks;
    let start = chunk * len;
    let end = start + len;

    let mut y = vec![0.0; n];
    let mut bits = start ^ (start >> 1);
    cols.image(bits, &mut y);
    visit(bits, &y);

    let mut t = start;
    while t + 1 < end {
        let j = (t + 1).trailing_zeros() as usize;
        bits ^= 1 << j;
        t += 1;
        if (t - start).is_multiple_of(RECOMPUTE_PERIOD) {
            cols.image(bits, &mut y);
        } else {
            let c = cols.col(j);
            if bits >> j & 1 == 1 {
                // x_j went from +1 to −1.
                y.iter_mut().zip(c).for_each(|(v, a)| *v -= 2.0 * a);
            } else {
                y.iter_mut().zip(c).for_each(|(v, a)| *v += 2.0 * a);
            }
        }
        visit(bits, &y);
    }
}

/// Largest |y_i| with the smallest index within [`TIE_TOLERANCE`] of it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsMax {
    pub value: f64,
    pub index: usize,
    /// Sign of `y[index]`, +1 for zero.
    pub sign: i8,
    pub tie: bool,
}

#[inline]
pub fn abs_max(y: &[f64]) -> AbsMax {
    let value = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = value - TIE_TOLERANCE;
    let mut index = usize::MAX;
    let mut tie = false;
    for (i, v) in y.iter().enumerate() {
        if v.abs() >= cutoff {
            if index == usize::MAX {
                index = i;
            } else {
                tie = true;
                break;
            }
        }
    }
    let sign = if y[index] < 0.0 { -1 } else { 1 };
    AbsMax {
        value,
        index,
        sign,
        tie,
    }
}
