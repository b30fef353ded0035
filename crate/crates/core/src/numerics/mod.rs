//! Dense linear algebra, seeded randomness and compensated summation shared
//! by the rest of the crate.

mod cholesky;
mod qr;
mod rng;
mod sum;

pub use cholesky::{cholesky_escalating, cholesky_psd, JITTER_LADDER};
pub use qr::{qr_positive_diag, QrResult, QR_PIVOT_TOLERANCE};
pub use rng::{RngStream, CONSTRUCTION_STREAM, TRIPLE_SAMPLING_STREAM};
pub use sum::{compensated_sum, NeumaierSum};
