//! Closed-form reference curves. Natural logarithms throughout, except the
//! subcube rate which is stated in base 2.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::gaussian_max_expansion;

/// f(x) = x √(2 ln(1/x)) on [0, 1], with f(0) = 0. NaN outside [0, 1].
pub fn f_level1(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    x * (2.0 * (1.0 / x).ln()).sqrt()
}

/// √(2 ln 2n), the universal upper bound on β.
pub fn jensen_upper(n: usize) -> f64 {
    (2.0 * (2.0 * n as f64).ln()).sqrt()
}

/// √(log2 n + 1), β of the subcube (tree) construction for n a power of two.
pub fn subcube_rate(n: usize) -> f64 {
    ((n as f64).log2() + 1.0).sqrt()
}

/// √(2 ln 2n) − ln ln(2n) / (2 √(2 ln 2n)), for n ≥ 3. The
/// O((log n)^{−1/2}) remainder is omitted.
pub fn beta_expansion(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("beta expansion needs n ≥ 3, got {n}")));
    }
    let l = (2.0 * n as f64).ln();
    let s = (2.0 * l).sqrt();
    Ok(s - l.ln() / (2.0 * s))
}

/// (1 − ln ln(2n) / (4 ln 2n)) √(2 ln 2n).
pub fn abstract_lower(n: usize) -> f64 {
    let l = (2.0 * n as f64).ln();
    (1.0 - l.ln() / (4.0 * l)) * (2.0 * l).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCurvePoint {
    pub n: usize,
    pub beta_expansion: f64,
    pub jensen_upper: f64,
    pub subcube_rate: f64,
    pub gaussian_max: f64,
    pub abstract_lower: f64,
}

impl AsymptoticCurvePoint {
    pub fn at(n: usize) -> Result<Self> {
        Ok(AsymptoticCurvePoint {
            n,
            beta_expansion: beta_expansion(n)?,
            jensen_upper: jensen_upper(n),
            subcube_rate: subcube_rate(n),
            gaussian_max: gaussian_max_expansion(n)?,
            abstract_lower: abstract_lower(n),
        })
    }
}

pub fn curve_sweep(ns: &[usize]) -> Result<Vec<AsymptoticCurvePoint>> {
    ns.iter().map(|&n| AsymptoticCurvePoint::at(n)).collect()
}

/// CSV with header `n,beta_expansion,jensen_upper,subcube_rate,gaussian_max,abstract_lower`.
pub fn write_curve_csv(points: &[AsymptoticCurvePoint], w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if points.is_empty() {
        wtr.write_record([
            "n",
            "beta_expansion",
            "jensen_upper",
            "subcube_rate",
            "gaussian_max",
            "abstract_lower",
        ])
        .map_err(csv_err)?;
    }
    for p in points {
        wtr.serialize(p).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_edges() {
        assert_eq!(f_level1(1.0), 0.0);
        assert_eq!(f_level1(0.0), 0.0);
        assert!(f_level1(1.5).is_nan());
        let n = 8.0;
        assert!((f_level1(1.0 / (2.0 * n)) * 2.0 * n - (2.0 * 16f64.ln()).sqrt()).abs() < 1e-14);
        assert!((jensen_upper(8) - 2.3548).abs() < 1e-4);
    }

    #[test]
    fn f_is_concave_on_grid() {
        let grid: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
        for &a in &grid {
            for &b in &grid {
                let mid = f_level1((a + b) / 2.0);
                assert!(mid >= (f_level1(a) + f_level1(b)) / 2.0 - 1e-15, "a = {a}, b = {b}");
            }
        }
    }

    #[test]
    fn expansion_values() {
        let l = 6f64.ln();
        let s = (2.0 * l).sqrt();
        assert!((beta_expansion(3).unwrap() - (s - l.ln() / (2.0 * s))).abs() < 1e-15);
        assert!(beta_expansion(2).is_err());
        for n in [3, 10, 1000, 1 << 20] {
            let gap = jensen_upper(n) - beta_expansion(n).unwrap();
            let l = (2.0 * n as f64).ln();
            assert!((gap - l.ln() / (2.0 * (2.0 * l).sqrt())).abs() < 1e-12);
        }
        let d = (beta_expansion(1_000_000).unwrap() - gaussian_max_expansion(1_000_000).unwrap()).abs();
        assert!(d <= 0.15, "{d}");
    }

    #[test]
    fn curve_points() {
        assert!(curve_sweep(&[]).unwrap().is_empty());
        let p = curve_sweep(&[8]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].jensen_upper, (2.0 * 16f64.ln()).sqrt());
        for n in 8..=4096 {
            let p = AsymptoticCurvePoint::at(n).unwrap();
            assert!(
                p.subcube_rate < p.beta_expansion && p.beta_expansion < p.jensen_upper,
                "n = {n}"
            );
        }
    }

    #[test]
    fn abstract_lower_below_expansion() {
        // The two coincide algebraically; allow rounding.
        let mut n = 3usize;
        while n <= 1 << 20 {
            assert!(abstract_lower(n) <= beta_expansion(n).unwrap() + 1e-12, "n = {n}");
            n += 1 + n / 64;
        }
    }

    #[test]
    fn subcube_over_jensen_limit() {
        let n = 1 << 20;
        let ratio = subcube_rate(n) / jensen_upper(n);
        assert!((ratio - 1.0 / (2.0 * 2f64.ln()).sqrt()).abs() < 0.01);
    }

    #[test]
    fn csv_header_and_rows() {
        let mut buf = Vec::new();
        write_curve_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,beta_expansion,jensen_upper,subcube_rate,gaussian_max,abstract_lower\n"
        );
        let mut buf = Vec::new();
        write_curve_csv(&curve_sweep(&[8, 16]).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().starts_with("8,"));
    }
}
