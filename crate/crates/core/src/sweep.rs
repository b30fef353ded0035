//! β sweeps over constructions and dimensions, written as CSV with the
//! asymptotic reference columns inline.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{beta_expansion, csv_err, jensen_upper};
use crate::beta::{beta_exact, beta_monte_carlo, Method};
use crate::constructions::{build, ConstructionKind, ConstructionSpec};
use crate::error::{Error, Result};
use crate::hypercube::MAX_EXACT_N;

pub const SWEEP_HEADER: [&str; 9] = [
    "construction",
    "n",
    "method",
    "beta",
    "stderr",
    "samples",
    "seed",
    "beta_expansion",
    "jensen_upper",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub construction: String,
    pub n: usize,
    pub method: String,
    pub beta: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    /// Empty for n < 3, where the expansion is undefined.
    pub beta_expansion: Option<f64>,
    pub jensen_upper: f64,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub kinds: Vec<ConstructionKind>,
    pub ns: Vec<usize>,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
}

impl SweepConfig {
    /// Checks every (kind, n) guard before any work is done.
    pub fn validate(&self) -> Result<()> {
        for &kind in &self.kinds {
            for &n in &self.ns {
                ConstructionSpec::new(kind, n, self.seed)?;
                if self.method == Method::Exact && n > MAX_EXACT_N {
                    return Err(Error::TooLarge {
                        what: "exact enumeration",
                        n,
                        max: MAX_EXACT_N,
                    });
                }
            }
        }
        if self.method == Method::MonteCarlo && self.samples < 2 {
            return Err(Error::InvalidArgument("Monte Carlo needs at least 2 samples".into()));
        }
        Ok(())
    }
}

/// One row per (kind, n), kinds outermost. The random-sign matrix and the
/// Monte Carlo stream both use `seed`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.kinds.len() * cfg.ns.len());
    for &kind in &cfg.kinds {
        for &n in &cfg.ns {
            let c = build(&ConstructionSpec::new(kind, n, cfg.seed)?)?;
            let est = match cfg.method {
                Method::Exact => beta_exact(&c.matrix)?,
                Method::MonteCarlo => beta_monte_carlo(&c.matrix, cfg.samples, cfg.seed)?,
            };
            rows.push(SweepRow {
                construction: kind.name().to_string(),
                n,
                method: est.method.name().to_string(),
                beta: est.value,
                stderr: est.stderr,
                samples: est.samples,
                seed: cfg.seed,
                beta_expansion: beta_expansion(n).ok(),
                jensen_upper: jensen_upper(n),
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv(rows: &[SweepRow], w: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for r in rows {
        wtr.serialize(r).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_sweep_csv(r: impl std::io::Read) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().map(|row| row.map_err(csv_err)).collect()
}
