//! Gaussian comparison: Σ = ÂÂᵀ, the non-degeneracy quantities the
//! high-dimensional CLT needs, Monte Carlo for E‖Z‖_∞ with Z ~ N(0, Σ), and
//! the Chatterjee comparison bound.

use serde::{Deserialize, Serialize};

use crate::beta::{chunked_monte_carlo, BetaEstimate, Method};
use crate::error::{Error, Result};
use crate::matrix::{RowNormalizedMatrix, SquareMatrix};
use crate::numerics::{cholesky_escalating, RngStream, TRIPLE_SAMPLING_STREAM};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// Above this dimension the triple minimum is estimated from sampled triples.
pub const EXACT_TRIPLES_MAX_N: usize = 64;

const UNIT_DIAGONAL_TOLERANCE: f64 = 1e-10;

/// Σ = A Aᵀ for a row-normalized A (unit diagonal).
pub fn covariance(a: &RowNormalizedMatrix) -> SquareMatrix {
    let n = a.n();
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = a.row(i).iter().zip(a.row(j)).map(|(x, y)| x * y).sum();
            s[i * n + j] = v;
            s[j * n + i] = v;
        }
    }
    SquareMatrix::new(n, s).expect("finite products of finite entries")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceDiagnostics {
    pub n: usize,
    /// max_{j≠k} |Σ_jk|.
    pub max_offdiag: f64,
    /// min over pairs of det Σ_{jk} = 1 − Σ_jk².
    pub min_det2: f64,
    /// min over triples of det Σ_{jkl} / det Σ_{jk}, taking every choice of
    /// the conditioning pair.
    pub min_ratio3: f64,
    /// 2 · max_offdiag: the largest increment-variance discrepancy between
    /// (Z, −Z) and (G, −G) with G ~ N(0, I).
    pub chatterjee_gamma: f64,
    /// √(γ ln 2n).
    pub chatterjee_bound: f64,
    /// True when `min_ratio3` comes from sampled triples.
    pub ratio3_sampled: bool,
    pub triples_evaluated: u64,
}

pub fn covariance_diagnostics(sigma: &SquareMatrix, triple_budget: u64, seed: u64) -> Result<CovarianceDiagnostics> {
    let n = sigma.n();
    for i in 0..n {
        if (sigma.get(i, i) - 1.0).abs() > UNIT_DIAGONAL_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "Σ[{i}][{i}] = {} is not 1",
                sigma.get(i, i)
            )));
        }
        for j in 0..i {
            if (sigma.get(i, j) - sigma.get(j, i)).abs() > UNIT_DIAGONAL_TOLERANCE {
                return Err(Error::NotSymmetric);
            }
        }
    }

    let mut max_offdiag = 0.0f64;
    let mut min_det2 = 1.0f64;
    for i in 0..n {
        for j in 0..i {
            let r = sigma.get(i, j);
            max_offdiag = max_offdiag.max(r.abs());
            min_det2 = min_det2.min(1.0 - r * r);
        }
    }

    let mut min_ratio3 = 1.0f64;
    let mut triples = 0u64;
    let sampled = n > EXACT_TRIPLES_MAX_N;
    if n >= 3 {
        if sampled {
            let mut rng = RngStream::new(seed, TRIPLE_SAMPLING_STREAM);
            for _ in 0..triple_budget {
                let j = rng.below(n as u64) as usize;
                let k = loop {
                    let k = rng.below(n as u64) as usize;
                    if k != j {
                        break k;
                    }
                };
                let l = loop {
                    let l = rng.below(n as u64) as usize;
                    if l != j && l != k {
                        break l;
                    }
                };
                min_ratio3 = min_ratio3.min(triple_ratio(sigma, j, k, l));
                triples += 1;
            }
        } else {
            for j in 0..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        min_ratio3 = min_ratio3.min(triple_ratio(sigma, j, k, l));
                        triples += 1;
                    }
                }
            }
        }
    }

    let chatterjee_gamma = 2.0 * max_offdiag;
    Ok(CovarianceDiagnostics {
        n,
        max_offdiag,
        min_det2,
        min_ratio3,
        chatterjee_gamma,
        chatterjee_bound: (chatterjee_gamma * (2.0 * n as f64).ln()).sqrt(),
        ratio3_sampled: sampled,
        triples_evaluated: triples,
    })
}

/// min over the three conditioning pairs of det Σ_{jkl} / det Σ_{pair}.
fn triple_ratio(s: &SquareMatrix, j: usize, k: usize, l: usize) -> f64 {
    let (a, b, c) = (s.get(j, k), s.get(j, l), s.get(k, l));
    let det3 = 1.0 + 2.0 * a * b * c - a * a - b * b - c * c;
    [a, b, c]
        .iter()
        .map(|r| {
            let det2 = 1.0 - r * r;
            if det2 > 0.0 {
                det3 / det2
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Draws Z ~ N(0, Σ) as L g with L the Cholesky factor of Σ (jittered if
/// needed) and g standard normal. The identity skips the factorization.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    n: usize,
    factor: Option<SquareMatrix>,
    jitter: f64,
}

impl GaussianSampler {
    pub fn new(sigma: &SquareMatrix) -> Result<Self> {
        let n = sigma.n();
        if *sigma == SquareMatrix::identity(n) {
            return Ok(GaussianSampler {
                n,
                factor: None,
                jitter: 0.0,
            });
        }
        let (l, jitter) = cholesky_escalating(sigma)?;
        Ok(GaussianSampler {
            n,
            factor: Some(l),
            jitter,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Diagonal jitter the factorization needed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Writes one draw into `out`, using `scratch` (length n) for g.
    pub fn sample(&self, rng: &mut RngStream, scratch: &mut [f64], out: &mut [f64]) {
        match &self.factor {
            None => out.iter_mut().for_each(|v| *v = rng.standard_normal()),
            Some(l) => {
                scratch.iter_mut().for_each(|v| *v = rng.standard_normal());
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &l.row(i)[..=i];
                    *o = row.iter().zip(&scratch[..=i]).map(|(a, b)| a * b).sum();
                }
            }
        }
    }
}

/// Monte Carlo estimate of E‖Z‖_∞ for Z ~ N(0, Σ).
pub fn gaussian_max_mc(sigma: &SquareMatrix, samples: u64, seed: u64) -> Result<BetaEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least 2 samples".into()));
    }
    let sampler = GaussianSampler::new(sigma)?;
    let n = sampler.n();
    let m = chunked_monte_carlo(
        samples,
        seed,
        || (vec![0.0; n], vec![0.0; n]),
        |(g, z), rng| {
            sampler.sample(rng, g, z);
            z.iter().fold(0.0f64, |m, v| m.max(v.abs()))
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

/// Extreme-value expansion of E max_i |Z_i| for n i.i.d. standard normals:
/// √(2 ln 2n) − (ln ln 2n + ln 4π) / (2 √(2 ln 2n)) + γ / √(2 ln 2n).
pub fn gaussian_max_expansion(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "gaussian max expansion needs n ≥ 2, got {n}"
        )));
    }
    let l = (2.0 * n as f64).ln();
    let s = (2.0 * l).sqrt();
    Ok(s - (l.ln() + (4.0 * std::f64::consts::PI).ln()) / (2.0 * s) + EULER_GAMMA / s)
}
