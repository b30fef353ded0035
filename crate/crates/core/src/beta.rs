//! β(A) = 2^{−n} Σ_x ‖Ax‖_∞, exactly by enumeration and approximately by
//! seeded Monte Carlo.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{abs_max, exact_chunk_count, walk_chunk, Columns, MAX_EXACT_N};
use crate::matrix::{RowNormalizedMatrix, SignVector};
use crate::numerics::{NeumaierSum, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub value: f64,
    pub method: Method,
    pub samples: u64,
    /// Standard error of `value`; zero for exact results.
    pub stderr: f64,
    pub seed: Option<u64>,
}

impl BetaEstimate {
    /// √(s₁² + s₂²), the standard error of a difference of independent estimates.
    pub fn combined_stderr(&self, other: &BetaEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Exact β by Gray-code enumeration of the half cube (‖A(−x)‖_∞ = ‖Ax‖_∞).
///
/// The walk is split into `min(2^{n−1}, 256)` chunks summed with Neumaier
/// compensation and reduced in ascending chunk order, so the result does not
/// depend on the number of worker threads.
pub fn beta_exact(a: &RowNormalizedMatrix) -> Result<BetaEstimate> {
    let n = a.n();
    if n > MAX_EXACT_N {
        return Err(Error::TooLarge {
            what: "exact enumeration",
            n,
            max: MAX_EXACT_N,
        });
    }
    let cols = Columns::new(a);
    let chunks = exact_chunk_count(n);
    let partials: Vec<NeumaierSum> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = NeumaierSum::new();
            walk_chunk(&cols, c, chunks, |_, y| acc.add(abs_max(y).value));
            acc
        })
        .collect();
    let mut total = NeumaierSum::new();
    partials.iter().for_each(|p| total.merge(p));
    let half = (1u64 << (n - 1)) as f64;
    Ok(BetaEstimate {
        value: total.value() / half,
        method: Method::Exact,
        samples: 1u64 << n,
        stderr: 0.0,
        seed: None,
    })
}

/// Samples per Monte Carlo chunk; chunk `c` draws from stream `c` of the seed.
pub const MC_CHUNK: u64 = 1 << 12;

/// Streaming mean/variance (Welford), mergeable with Chan's formula.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&mut self, o: &Moments) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *o;
            return;
        }
        let total = self.count + o.count;
        let d = o.mean - self.mean;
        let w = o.count as f64 / total as f64;
        self.mean += d * w;
        self.m2 += o.m2 + d * d * self.count as f64 * w;
        self.count = total;
    }

    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

/// Runs `per_sample` over `samples` draws split into fixed chunks of
/// [`MC_CHUNK`], each with its own stream, and merges chunk moments in order.
pub(crate) fn chunked_monte_carlo<S, F>(samples: u64, seed: u64, init: impl Fn() -> S + Sync, per_sample: F) -> Moments
where
    F: Fn(&mut S, &mut RngStream) -> f64 + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, c);
            let mut state = init();
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(per_sample(&mut state, &mut rng));
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    parts.iter().for_each(|p| total.merge(p));
    total
}

/// Sample mean of ‖Ax‖_∞ over i.i.d. uniform sign vectors.
pub fn beta_monte_carlo(a: &RowNormalizedMatrix, samples: u64, seed: u64) -> Result<BetaEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least 2 samples".into()));
    }
    let n = a.n();
    let cols = Columns::new(a);
    let m = chunked_monte_carlo(
        samples,
        seed,
        || (vec![0.0; n], vec![0.0; n]),
        |(x, y), rng| {
            rng.fill_rademacher(x);
            cols.image_f64(x, y);
            y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        },
    );
    Ok(BetaEstimate {
        value: m.mean,
        method: Method::MonteCarlo,
        samples,
        stderr: m.stderr(),
        seed: Some(seed),
    })
}

/// Result of [`max_abs_image`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImageMax {
    pub value: f64,
    pub argmax_row: usize,
    pub sign: i8,
    pub tie: bool,
}

/// max_i |⟨a_i, x⟩| with the smallest attaining row, its sign, and whether a
/// second row attains the maximum within 1e-12.
pub fn max_abs_image(a: &RowNormalizedMatrix, x: &SignVector) -> Result<ImageMax> {
    if x.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "matrix n = {}, vector n = {}",
            a.n(),
            x.n()
        )));
    }
    let xs = x.to_f64();
    let y: Vec<f64> = a.rows().map(|r| r.iter().zip(&xs).map(|(u, v)| u * v).sum()).collect();
    let m = abs_max(&y);
    Ok(ImageMax {
        value: m.value,
        argmax_row: m.index,
        sign: m.sign,
        tie: m.tie,
    })
}
