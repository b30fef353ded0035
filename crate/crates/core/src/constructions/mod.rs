//! Matrix families: Hadamard-derived orthonormal matrices, normalized random
//! sign matrices, balanced-tree (subcube) matrices and the hard-coded small
//! optimal matrices.

pub mod hadamard;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use hadamard::{
    kronecker, paley_i, paley_ii, recipe_for_order, smallest_constructible_order, sylvester, HadamardMatrix, Recipe,
};

use crate::error::{Error, Result};
use crate::matrix::{normalize_rows, RowNormalizedMatrix, SquareMatrix};
use crate::numerics::{qr_positive_diag, RngStream, CONSTRUCTION_STREAM};

/// Orthonormal almost-Hadamard matrix together with the Hadamard matrix it
/// was cut from.
#[derive(Clone, Debug)]
pub struct AlmostHadamard {
    pub matrix: RowNormalizedMatrix,
    pub order: u64,
    pub recipe: Recipe,
    /// Set when `order − n ≥ 4`, outside the regime where truncated blocks
    /// are known to stay flat.
    pub flatness_warning: bool,
}

/// Q from the positive-diagonal QR factorization of the top-left `n × n`
/// block of `H / √m`, where `m ≥ n` is the smallest constructible order.
pub fn orthonormal_almost_hadamard(n: usize) -> Result<AlmostHadamard> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let (m, recipe) = smallest_constructible_order(n as u64)?;
    let h = HadamardMatrix::from_recipe(recipe.clone())?;
    let scale = 1.0 / (m as f64).sqrt();
    let block = h.block(n);
    let u = SquareMatrix::new(n, block.iter().map(|&v| v as f64 * scale).collect())?;
    let qr = qr_positive_diag(&u)?;
    Ok(AlmostHadamard {
        matrix: normalize_rows(&qr.q)?,
        order: m,
        recipe,
        flatness_warning: m - n as u64 >= 4,
    })
}

/// Entries `ξ_ij / √n` with independent fair signs drawn row-major from the
/// construction stream of `seed`.
pub fn random_sign(n: usize, seed: u64) -> Result<RowNormalizedMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut rng = RngStream::new(seed, CONSTRUCTION_STREAM);
    let s = 1.0 / (n as f64).sqrt();
    let m = SquareMatrix::from_fn(n, |_, _| s * rng.rademacher())?;
    normalize_rows(&m)
}

/// Rows read off the root-to-leaf paths of a highly balanced binary tree.
#[derive(Clone, Debug)]
pub struct TreeMatrix {
    pub matrix: RowNormalizedMatrix,
    /// Per row: the (coordinate, ±1 label) pairs of the path, root edge first.
    pub paths: Vec<Vec<(usize, i8)>>,
}

/// Complete binary tree with `n` leaves, filled left to right, plus an edge
/// into the root. Left edges are labelled −1, right edges and the root edge
/// +1. Leaf i (left to right) gives row i: its path labels on coordinates
/// `0..len`, zero elsewhere, normalized.
pub fn tree_matrix(n: usize) -> Result<TreeMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let depth = n.ilog2() as usize;
    // Nodes at `depth` that are split into two deeper leaves; they sit leftmost.
    let split = n - (1 << depth);
    let mut leaves: Vec<(usize, usize)> = Vec::with_capacity(n);
    leaves.extend((0..2 * split).map(|p| (depth + 1, p)));
    leaves.extend((split..1 << depth).map(|p| (depth, p)));

    let paths: Vec<Vec<(usize, i8)>> = leaves
        .iter()
        .map(|&(d, p)| {
            let mut path = vec![(0usize, 1i8)];
            for t in 0..d {
                let bit = (p >> (d - 1 - t)) & 1;
                path.push((t + 1, if bit == 1 { 1 } else { -1 }));
            }
            path
        })
        .collect();

    let mut entries = vec![0.0; n * n];
    for (i, path) in paths.iter().enumerate() {
        for &(j, label) in path {
            entries[i * n + j] = label as f64;
        }
    }
    let matrix = normalize_rows(&SquareMatrix::new(n, entries)?)?;
    Ok(TreeMatrix { matrix, paths })
}

pub const MAX_KNOWN_OPTIMAL: usize = 5;

/// The small matrices proven or conjectured optimal, for n = 1..5.
pub fn known_optimal(n: usize) -> Result<RowNormalizedMatrix> {
    let r2 = 2f64.sqrt();
    let r3 = 3f64.sqrt();
    let rows: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0]],
        2 => vec![vec![1.0 / r2, 1.0 / r2], vec![1.0 / r2, -1.0 / r2]],
        3 => vec![
            vec![1.0 / r3, 1.0 / r3, 1.0 / r3],
            vec![1.0 / r3, -1.0 / r3, 1.0 / r3],
            vec![-1.0 / r2, 0.0, 1.0 / r2],
        ],
        4 => {
            let s = 1.0 / r3;
            vec![
                vec![s, s, s, 0.0],
                vec![s, s, -s, 0.0],
                vec![s, -s, s, 0.0],
                vec![s, -s, -s, 0.0],
            ]
        }
        5 => {
            let c = 1.0 / (2.0 * r3);
            let raw = [
                [2.0, 2.0, 0.0, 0.0, 2.0],
                [-2.0, 2.0, 0.0, 2.0, 0.0],
                [-2.0, 0.0, 0.0, -2.0, 2.0],
                [0.0, -r3, r3, r3, r3],
                [0.0, r3, r3, -r3, -r3],
            ];
            raw.iter().map(|r| r.iter().map(|v| v * c).collect()).collect()
        }
        _ => return Err(Error::Unsupported(format!("known_optimal(n = {n}); supported n: 1..5"))),
    };
    normalize_rows(&SquareMatrix::from_rows(&rows)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionKind {
    Identity,
    RandomSign,
    /// Orthonormal almost-Hadamard.
    Oah,
    Tree,
    KnownOptimal,
    /// `H / √n` for a constructible Hadamard order `n`.
    Hadamard,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 6] = [
        ConstructionKind::Identity,
        ConstructionKind::RandomSign,
        ConstructionKind::Oah,
        ConstructionKind::Tree,
        ConstructionKind::KnownOptimal,
        ConstructionKind::Hadamard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionKind::Identity => "identity",
            ConstructionKind::RandomSign => "random-sign",
            ConstructionKind::Oah => "oah",
            ConstructionKind::Tree => "tree",
            ConstructionKind::KnownOptimal => "known-optimal",
            ConstructionKind::Hadamard => "hadamard",
        }
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let kind = match norm.as_str() {
            "identity" => ConstructionKind::Identity,
            "random-sign" => ConstructionKind::RandomSign,
            "oah" | "orthonormal-almost-hadamard" => ConstructionKind::Oah,
            "tree" => ConstructionKind::Tree,
            "known-optimal" => ConstructionKind::KnownOptimal,
            "hadamard" => ConstructionKind::Hadamard,
            _ => return Err(Error::InvalidArgument(format!("unknown construction kind {s:?}"))),
        };
        Ok(kind)
    }
}

/// What to build. `seed` only matters for `RandomSign`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub n: usize,
    pub seed: u64,
}

impl ConstructionSpec {
    pub fn new(kind: ConstructionKind, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if kind == ConstructionKind::KnownOptimal && n > MAX_KNOWN_OPTIMAL {
            return Err(Error::Unsupported(format!("known_optimal(n = {n}); supported n: 1..5")));
        }
        Ok(ConstructionSpec { kind, n, seed })
    }
}

/// A built matrix plus the Hadamard provenance for `Oah`/`Hadamard` kinds.
#[derive(Clone, Debug)]
pub struct Construction {
    pub spec: ConstructionSpec,
    pub matrix: RowNormalizedMatrix,
    pub hadamard_order: Option<u64>,
    pub recipe: Option<Recipe>,
    pub flatness_warning: bool,
}

pub fn build(spec: &ConstructionSpec) -> Result<Construction> {
    let n = spec.n;
    let plain = |matrix| Construction {
        spec: *spec,
        matrix,
        hadamard_order: None,
        recipe: None,
        flatness_warning: false,
    };
    Ok(match spec.kind {
        ConstructionKind::Identity => plain(RowNormalizedMatrix::identity(n)),
        ConstructionKind::RandomSign => plain(random_sign(n, spec.seed)?),
        ConstructionKind::Tree => plain(tree_matrix(n)?.matrix),
        ConstructionKind::KnownOptimal => plain(known_optimal(n)?),
        ConstructionKind::Oah => {
            let oah = orthonormal_almost_hadamard(n)?;
            Construction {
                spec: *spec,
                matrix: oah.matrix,
                hadamard_order: Some(oah.order),
                recipe: Some(oah.recipe),
                flatness_warning: oah.flatness_warning,
            }
        }
        ConstructionKind::Hadamard => {
            let recipe = recipe_for_order(n as u64)
                .ok_or_else(|| Error::Unsupported(format!("no constructible Hadamard matrix of order {n}")))?;
            let h = HadamardMatrix::from_recipe(recipe.clone())?;
            let m = SquareMatrix::new(n, h.to_dense().into_iter().map(f64::from).collect())?;
            Construction {
                spec: *spec,
                matrix: normalize_rows(&m)?,
                hadamard_order: Some(n as u64),
                recipe: Some(recipe),
                flatness_warning: false,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::equivalent_up_to_symmetry;

    fn from_rows(rows: &[Vec<f64>]) -> RowNormalizedMatrix {
        normalize_rows(&SquareMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn closed_form_oah3() -> RowNormalizedMatrix {
        let (a, b, c) = (1.0 / 3f64.sqrt(), 1.0 / 6f64.sqrt(), 1.0 / 2f64.sqrt());
        from_rows(&[vec![-a, b, -c], vec![-a, -2.0 * b, 0.0], vec![-a, b, c]])
    }

    fn closed_form_oah5() -> RowNormalizedMatrix {
        let s5 = 1.0 / 5f64.sqrt();
        let s30 = 1.0 / 30f64.sqrt();
        let s42 = 1.0 / 42f64.sqrt();
        let s14 = 1.0 / 14f64.sqrt();
        let s2 = 1.0 / 2f64.sqrt();
        from_rows(&[
            vec![-s5, 2.0 * s30, 2.0 * s42, -s14, -s2],
            vec![-s5, -3.0 * s30, 3.0 * s42, 2.0 * s14, 0.0],
            vec![-s5, 2.0 * s30, -4.0 * s42, 2.0 * s14, 0.0],
            vec![-s5, -3.0 * s30, -3.0 * s42, -2.0 * s14, 0.0],
            vec![-s5, 2.0 * s30, 2.0 * s42, -s14, s2],
        ])
    }

    #[test]
    fn oah_three_matches_closed_form() {
        let q = orthonormal_almost_hadamard(3).unwrap();
        assert_eq!(q.order, 4);
        assert!(!q.flatness_warning);
        assert!(equivalent_up_to_symmetry(&q.matrix, &closed_form_oah3(), 1e-12).unwrap());
    }

    #[test]
    fn oah_five_matches_closed_form() {
        let q = orthonormal_almost_hadamard(5).unwrap();
        assert_eq!(q.order, 8);
        assert!(equivalent_up_to_symmetry(&q.matrix, &closed_form_oah5(), 1e-12).unwrap());
    }

    #[test]
    fn oah_four_is_scaled_hadamard() {
        let q = orthonormal_almost_hadamard(4).unwrap();
        let h = sylvester(2).unwrap().to_dense();
        for (v, &s) in q.matrix.entries().iter().zip(&h) {
            assert!((v - s as f64 / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn oah_is_orthogonal() {
        for n in [1, 2, 3, 6, 7, 9, 12, 20, 33] {
            let q = orthonormal_almost_hadamard(n).unwrap().matrix;
            let qqt = q.matmul(&q.transpose()).unwrap();
            assert!(qqt.max_abs_diff(&SquareMatrix::identity(n)) <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn oah_warns_on_large_gap() {
        // 9 → 12 is a gap of 3, 5 → 8 also 3; 49 → 52+ is ≥ 4 only if 52 is
        // not constructible here.
        assert!(!orthonormal_almost_hadamard(9).unwrap().flatness_warning);
        let q = orthonormal_almost_hadamard(49).unwrap();
        assert_eq!(q.flatness_warning, q.order - 49 >= 4);
    }

    #[test]
    fn random_sign_entries_and_determinism() {
        let m = random_sign(8, 3).unwrap();
        let s = 1.0 / 8f64.sqrt();
        assert!(m.entries().iter().all(|v| (v.abs() - s).abs() < 1e-15));
        assert_eq!(m, random_sign(8, 3).unwrap());
        assert_ne!(m, random_sign(8, 4).unwrap());
        let one = random_sign(1, 0).unwrap();
        assert_eq!(one.entries()[0].abs(), 1.0);
    }

    #[test]
    fn random_sign_does_not_share_monte_carlo_stream() {
        // Monte Carlo chunk 0 of the same seed must not replay the rows.
        let n = 64;
        let m = random_sign(n, 42).unwrap();
        let mut mc = RngStream::new(42, 0);
        let mut x = vec![0.0; n];
        let s = (n as f64).sqrt();
        for i in 0..n {
            mc.fill_rademacher(&mut x);
            let same = m.row(i).iter().zip(&x).all(|(a, b)| (a * s - b).abs() < 1e-12);
            assert!(!same, "row {i} equals Monte Carlo draw {i}");
        }
    }

    #[test]
    fn random_sign_max_inner_product_n64() {
        let m = random_sign(64, 7).unwrap();
        let bound = (10.0 * 64f64.ln() / 64.0).sqrt();
        let mut worst = 0.0f64;
        for i in 0..64 {
            for j in 0..i {
                let ip: f64 = m.row(i).iter().zip(m.row(j)).map(|(a, b)| a * b).sum();
                worst = worst.max(ip.abs());
            }
        }
        assert!(worst <= bound, "max inner product {worst} > {bound}");
    }

    #[test]
    fn tree_four_closed_form() {
        let t = tree_matrix(4).unwrap();
        let expect = from_rows(&[
            vec![1.0, -1.0, -1.0, 0.0],
            vec![1.0, -1.0, 1.0, 0.0],
            vec![1.0, 1.0, -1.0, 0.0],
            vec![1.0, 1.0, 1.0, 0.0],
        ]);
        assert_eq!(t.matrix, expect);
    }

    #[test]
    fn tree_small_cases() {
        assert_eq!(tree_matrix(1).unwrap().matrix.entries(), &[1.0]);
        let r = 1.0 / 2f64.sqrt();
        let t2 = tree_matrix(2).unwrap().matrix;
        assert!((t2.get(0, 0) - r).abs() < 1e-15 && (t2.get(0, 1) + r).abs() < 1e-15);
        assert!((t2.get(1, 0) - r).abs() < 1e-15 && (t2.get(1, 1) - r).abs() < 1e-15);
    }

    #[test]
    fn tree_paths_balanced() {
        for n in 1..=40usize {
            let t = tree_matrix(n).unwrap();
            let d = n.ilog2() as usize;
            let lens: Vec<usize> = t.paths.iter().map(Vec::len).collect();
            let (lo, hi) = (*lens.iter().min().unwrap(), *lens.iter().max().unwrap());
            assert!(hi - lo <= 1);
            assert!(lens.iter().all(|&l| l == d + 1 || l == d + 2), "n = {n}: {lens:?}");
            for (i, path) in t.paths.iter().enumerate() {
                let norm = (path.len() as f64).sqrt();
                for j in 0..n {
                    let expect = path
                        .iter()
                        .find(|(c, _)| *c == j)
                        .map_or(0.0, |(_, l)| *l as f64 / norm);
                    assert!((t.matrix.get(i, j) - expect).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn known_optimal_fixtures() {
        assert_eq!(known_optimal(1).unwrap().entries(), &[1.0]);
        let k3 = known_optimal(3).unwrap();
        let (a, c) = (1.0 / 3f64.sqrt(), 1.0 / 2f64.sqrt());
        let expect = [a, a, a, a, -a, a, -c, 0.0, c];
        for (v, e) in k3.entries().iter().zip(expect) {
            assert!((v - e).abs() < 1e-15);
        }
        let k5 = known_optimal(5).unwrap();
        assert!((k5.get(0, 0) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((k5.get(3, 1) + 0.5).abs() < 1e-15);
        assert!(matches!(known_optimal(6), Err(Error::Unsupported(_))));
    }

    #[test]
    fn spec_guards() {
        assert!(ConstructionSpec::new(ConstructionKind::KnownOptimal, 7, 0).is_err());
        assert!(ConstructionSpec::new(ConstructionKind::Tree, 0, 0).is_err());
        let spec = ConstructionSpec::new(ConstructionKind::Hadamard, 12, 0).unwrap();
        let c = build(&spec).unwrap();
        assert_eq!(c.hadamard_order, Some(12));
        let spec = ConstructionSpec::new(ConstructionKind::Hadamard, 6, 0).unwrap();
        assert!(matches!(build(&spec), Err(Error::Unsupported(_))));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ConstructionKind::ALL {
            assert_eq!(k.name().parse::<ConstructionKind>().unwrap(), k);
        }
        assert_eq!(
            "orthonormal_almost_hadamard".parse::<ConstructionKind>().unwrap(),
            ConstructionKind::Oah
        );
    }
}
