//! Hypercube Voronoi partition induced by a matrix and its Fourier-side
//! diagnostics.
//!
//! For each vertex x the winning row i is the smallest index attaining
//! max_i |⟨a_i, x⟩|. The half-cell S_i collects the vertices where that row
//! wins with a nonnegative inner product; the full cell is S_i ∪ −S_i. With
//! B_i = 2 Σ_{x ∈ S_i} x the identity β = 2^{−n} Σ ⟨A_i, B_i⟩ holds exactly,
//! and Cauchy–Schwarz gives β ≤ 2 Σ √W1[1_{S_i}].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{f_level1, jensen_upper};
use crate::beta::beta_exact;
use crate::error::{Error, Result};
use crate::hypercube::{abs_max, exact_chunk_count, walk_chunk, Columns, MAX_EXACT_N};
use crate::matrix::{RowNormalizedMatrix, SignVector};

/// Maximum inner products below this are degenerate (the vertex is
/// orthogonal to every row).
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPartition {
    pub n: usize,
    /// |S_i|.
    pub sizes: Vec<u64>,
    /// Row-major n×n; row i is Σ_{x ∈ S_i} x.
    pub centroid_sums: Vec<i64>,
    /// Vertices (of the full cube) whose maximum is attained by two rows.
    pub ties: u64,
    /// Vertices (of the full cube) whose maximum is below 1e-12; both x and
    /// −x are then placed in the winning half-cell.
    pub degenerate: u64,
}

impl CellPartition {
    pub fn centroid_sum(&self, i: usize) -> &[i64] {
        &self.centroid_sums[i * self.n..(i + 1) * self.n]
    }

    /// A partition-shaped record for arbitrary vertex sets, one per cell.
    /// Useful for Fourier computations on hand-built sets.
    pub fn from_sets(n: usize, sets: &[Vec<SignVector>]) -> Result<Self> {
        let cells = sets.len();
        let mut sizes = vec![0u64; cells];
        let mut centroid_sums = vec![0i64; cells * n];
        for (i, set) in sets.iter().enumerate() {
            for x in set {
                if x.n() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "vertex of dimension {} in n = {n}",
                        x.n()
                    )));
                }
                sizes[i] += 1;
                for j in 0..n {
                    centroid_sums[i * n + j] += x.sign(j) as i64;
                }
            }
        }
        Ok(CellPartition {
            n,
            sizes,
            centroid_sums,
            ties: 0,
            degenerate: 0,
        })
    }

    fn empty(n: usize) -> Self {
        CellPartition {
            n,
            sizes: vec![0; n],
            centroid_sums: vec![0; n * n],
            ties: 0,
            degenerate: 0,
        }
    }

    fn merge(&mut self, o: &CellPartition) {
        self.sizes.iter_mut().zip(&o.sizes).for_each(|(a, b)| *a += b);
        self.centroid_sums
            .iter_mut()
            .zip(&o.centroid_sums)
            .for_each(|(a, b)| *a += b);
        self.ties += o.ties;
        self.degenerate += o.degenerate;
    }
}

/// Enumerates the cube (half of it, with −x inferred) and tallies the
/// half-cells, integer centroid sums, ties and degenerate vertices.
pub fn compute_cells(a: &RowNormalizedMatrix) -> Result<CellPartition> {
    let n = a.n();
    if n > MAX_EXACT_N {
        return Err(Error::TooLarge {
            what: "cell enumeration",
            n,
            max: MAX_EXACT_N,
        });
    }
    let cols = Columns::new(a);
    let chunks = exact_chunk_count(n);
    let parts: Vec<CellPartition> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut p = CellPartition::empty(n);
            walk_chunk(&cols, c, chunks, |bits, y| {
                let m = abs_max(y);
                let i = m.index;
                if m.tie {
                    p.ties += 2;
                }
                if m.value < DEGENERATE_TOLERANCE {
                    // x and −x both land in S_i; their sum is zero.
                    p.degenerate += 2;
                    p.sizes[i] += 2;
                    return;
                }
                p.sizes[i] += 1;
                // Add x if the sign is positive, otherwise −x.
                let s: i64 = if m.sign > 0 { 1 } else { -1 };
                let row = &mut p.centroid_sums[i * n..(i + 1) * n];
                for (j, c) in row.iter_mut().enumerate() {
                    *c += if bits >> j & 1 == 1 { -s } else { s };
                }
            });
            p
        })
        .collect();
    let mut total = CellPartition::empty(n);
    parts.iter().for_each(|p| total.merge(p));
    Ok(total)
}

/// W1[1_{S_i}] = Σ_j (Σ_{x∈S_i} x_j / 2^n)², one entry per cell.
pub fn level1_weights(p: &CellPartition) -> Vec<f64> {
    let scale = (p.n as f64).exp2();
    p.centroid_sums
        .chunks_exact(p.n)
        .map(|row| row.iter().map(|&c| (c as f64 / scale).powi(2)).sum())
        .collect()
}

/// The Level-1 inequality bound 2α² ln(1/α) for a set of measure α.
pub fn level1_bound(alpha: f64) -> f64 {
    if alpha <= 0.0 {
        0.0
    } else {
        2.0 * alpha * alpha * (1.0 / alpha).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub beta: f64,
    pub w1: Vec<f64>,
    /// |S_i| / 2^n; these sum to 1/2 without degenerate vertices.
    pub alphas: Vec<f64>,
    /// 2 Σ √W1.
    pub bound_cs: f64,
    /// 2 Σ f(α_i) with f(x) = x √(2 ln(1/x)).
    pub bound_level1: f64,
    /// √(2 ln 2n).
    pub bound_jensen: f64,
    /// cos ∠(A_i, B_i); zero for an empty cell.
    pub centroid_alignment: Vec<f64>,
    /// Σ (α_i − 1/(2n))².
    pub volume_deviation: f64,
    /// |β − 2^{−n} Σ ⟨A_i, B_i⟩|.
    pub identity_residual: f64,
}

impl AnalysisReport {
    /// Whether every α_i ≤ 1/2, the regime where the bound chain applies.
    pub fn bound_chain_applies(&self) -> bool {
        self.alphas.iter().all(|&a| a <= 0.5)
    }
}

/// Report plus the partition it was computed from.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub cells: CellPartition,
}

pub fn analyze(a: &RowNormalizedMatrix) -> Result<AnalysisReport> {
    Ok(analyze_full(a)?.report)
}

pub fn analyze_full(a: &RowNormalizedMatrix) -> Result<Analysis> {
    let n = a.n();
    let beta = beta_exact(a)?.value;
    let cells = compute_cells(a)?;
    let w1 = level1_weights(&cells);
    let scale = (n as f64).exp2();
    let alphas: Vec<f64> = cells.sizes.iter().map(|&s| s as f64 / scale).collect();

    let bound_cs = 2.0 * w1.iter().map(|w| w.sqrt()).sum::<f64>();
    let bound_level1 = 2.0 * alphas.iter().map(|&x| f_level1(x)).sum::<f64>();
    let bound_jensen = jensen_upper(n);

    let mut identity = 0.0;
    let mut centroid_alignment = Vec::with_capacity(n);
    for i in 0..n {
        let row = a.row(i);
        let c = cells.centroid_sum(i);
        let dot: f64 = row.iter().zip(c).map(|(u, &v)| u * v as f64).sum();
        let cnorm = c.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt();
        identity += 2.0 * dot;
        centroid_alignment.push(if cnorm > 0.0 {
            (dot / cnorm).clamp(-1.0, 1.0)
        } else {
            0.0
        });
    }
    let identity_residual = (beta - identity / scale).abs();

    let target = 1.0 / (2.0 * n as f64);
    let volume_deviation = alphas.iter().map(|a| (a - target).powi(2)).sum();

    Ok(Analysis {
        report: AnalysisReport {
            beta,
            w1,
            alphas,
            bound_cs,
            bound_level1,
            bound_jensen,
            centroid_alignment,
            volume_deviation,
            identity_residual,
        },
        cells,
    })
}

/// √W1 of a single codimension-k subcube of {−1,1}^n, k = ⌊log2 n⌋ + 1,
/// under the 2^n normalization: √k · 2^{−k}.
pub fn subcube_w1_reference(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let k = n.ilog2() as i32 + 1;
    Ok((k as f64).sqrt() * 2f64.powi(-k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{known_optimal, tree_matrix};

    fn all_vertices(n: usize) -> Vec<SignVector> {
        (0..1u64 << n).map(|b| SignVector::new(b, n).unwrap()).collect()
    }

    /// Direct Fourier sum: Σ_j (2^{−n} Σ_x 1_S(x) x_j)².
    fn brute_w1(n: usize, member: impl Fn(&SignVector) -> bool) -> f64 {
        let mut coeffs = vec![0.0; n];
        for x in all_vertices(n) {
            if member(&x) {
                for (j, c) in coeffs.iter_mut().enumerate() {
                    *c += x.sign(j);
                }
            }
        }
        coeffs.iter().map(|c| (c / (1u64 << n) as f64).powi(2)).sum()
    }

    #[test]
    fn known_optimal_three_partition() {
        let p = compute_cells(&known_optimal(3).unwrap()).unwrap();
        assert_eq!(p.sizes, vec![1, 1, 2]);
        assert_eq!(p.centroid_sum(0), &[1, 1, 1]);
        assert_eq!(p.centroid_sum(1), &[1, -1, 1]);
        assert_eq!(p.ties, 0);
        assert_eq!(p.degenerate, 0);
    }

    #[test]
    fn tree_four_partition_is_subcubes() {
        let p = compute_cells(&tree_matrix(4).unwrap().matrix).unwrap();
        assert_eq!(p.sizes, vec![2, 2, 2, 2]);
        assert_eq!(p.ties, 0);
        // Each S_i is the codim-3 subcube fixing the path coordinates.
        assert_eq!(p.centroid_sum(0), &[2, -2, -2, 0]);
        assert_eq!(p.centroid_sum(3), &[2, 2, 2, 0]);
    }

    #[test]
    fn identity_all_tied() {
        let p = compute_cells(&RowNormalizedMatrix::identity(2)).unwrap();
        assert_eq!(p.ties, 4);
        let p = compute_cells(&RowNormalizedMatrix::identity(4)).unwrap();
        assert_eq!(p.ties, 16);
        assert_eq!(p.sizes.iter().sum::<u64>(), 8);
    }

    #[test]
    fn level1_examples() {
        let n = 4;
        // Codim-3 subcube fixing x0 = x1 = x2 = +1.
        let cube: Vec<SignVector> = all_vertices(n)
            .into_iter()
            .filter(|x| (0..3).all(|j| x.sign(j) > 0.0))
            .collect();
        let p = CellPartition::from_sets(n, &[cube, vec![], all_vertices(n)]).unwrap();
        let w = level1_weights(&p);
        let oracle = brute_w1(n, |x| (0..3).all(|j| x.sign(j) > 0.0));
        assert_eq!(oracle, 3.0 / 64.0);
        assert!((w[0] - oracle).abs() < 1e-15);
        assert_eq!(w[1], 0.0);
        assert_eq!(w[2], 0.0);
    }

    #[test]
    fn subcube_reference_values() {
        let r4 = subcube_w1_reference(4).unwrap();
        assert!((r4 - 3f64.sqrt() / 8.0).abs() < 1e-15);
        let oracle = brute_w1(4, |x| (0..3).all(|j| x.sign(j) < 0.0)).sqrt();
        assert!((r4 - oracle).abs() < 1e-15);
        assert_eq!(subcube_w1_reference(1).unwrap(), 0.5);
        assert!((brute_w1(1, |x| x.sign(0) > 0.0).sqrt() - 0.5).abs() < 1e-15);
        assert!((2.0 * 8.0 * subcube_w1_reference(8).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn analyze_known_optimal_three() {
        let r = analyze(&known_optimal(3).unwrap()).unwrap();
        assert!((r.beta - (2f64.sqrt() + 3f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(r.identity_residual <= 1e-12);
        assert!(r.beta <= r.bound_cs + 1e-9);
        assert!(r.bound_cs <= r.bound_level1 + 1e-9);
        assert!(r.bound_level1 <= r.bound_jensen + 1e-9);
    }

    #[test]
    fn analyze_tree_four_cs_tight() {
        let r = analyze(&tree_matrix(4).unwrap().matrix).unwrap();
        assert!((r.beta - 3f64.sqrt()).abs() < 1e-12);
        assert!((r.bound_cs - r.beta).abs() < 1e-12);
        assert!(r.centroid_alignment.iter().all(|c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn analyze_identity_alphas() {
        let r = analyze(&RowNormalizedMatrix::identity(4)).unwrap();
        assert!((r.alphas.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        assert!(r.identity_residual <= 1e-12);
    }

    #[test]
    fn level1_bound_edges() {
        assert_eq!(level1_bound(0.0), 0.0);
        assert!((level1_bound(0.5) - 0.5 * 2f64.ln()).abs() < 1e-15);
    }
}
