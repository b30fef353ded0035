//! Numerical laboratory for β(A) = E_x ‖Ax‖_∞ over uniform sign vectors,
//! where A is an n×n real matrix with unit-norm rows.
//!
//! The crate evaluates β exactly (n ≤ 26) or by seeded Monte Carlo, builds
//! candidate matrices (orthonormal almost-Hadamard, tree, random sign,
//! small known optima), decomposes the cube into argmax cells with their
//! level-1 Fourier weights, and compares against the Gaussian maximum and
//! closed-form asymptotics.

pub mod asymptotics;
pub mod beta;
pub mod cells;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod gaussian;
pub mod hypercube;
pub mod io;
pub mod matrix;
pub mod numerics;
pub mod sweep;

pub use beta::{beta_exact, beta_monte_carlo, max_abs_image, BetaEstimate, ImageMax, Method};
pub use cells::{analyze, analyze_full, compute_cells, Analysis, AnalysisReport, CellPartition};
pub use constructions::{build, Construction, ConstructionKind, ConstructionSpec};
pub use error::{Error, Result};
pub use matrix::{normalize_rows, RowNormalizedMatrix, SignVector, SquareMatrix};
