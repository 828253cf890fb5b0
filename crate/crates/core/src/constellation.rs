//! Unit-energy symbol alphabets and the moments the AF statistics depend on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstellationKind {
    Qpsk,
    Qam16,
    Qam64,
}

impl std::str::FromStr for ConstellationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(ConstellationKind::Qpsk),
            "16qam" | "qam16" => Ok(ConstellationKind::Qam16),
            "64qam" | "qam64" => Ok(ConstellationKind::Qam64),
            other => Err(Error::InvalidConstellation(format!(
                "unknown constellation '{other}'"
            ))),
        }
    }
}

/// A proper (circularly symmetric), zero-mean, unit-energy alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    points: Vec<Complex64>,
    kurtosis: f64,
}

impl Constellation {
    pub fn make(kind: ConstellationKind) -> Constellation {
        let points = match kind {
            ConstellationKind::Qpsk => square_qam(2),
            ConstellationKind::Qam16 => square_qam(4),
            ConstellationKind::Qam64 => square_qam(8),
        };
        Constellation::from_points(points).expect("built-in alphabets satisfy the moment checks")
    }

    /// Validates the moment assumptions the closed-form AF statistics rely on:
    /// zero mean, zero pseudo-correlation, and unit average energy.
    pub fn from_points(points: Vec<Complex64>) -> Result<Constellation> {
        if points.is_empty() {
            return Err(Error::InvalidConstellation("empty alphabet".into()));
        }
        let n = points.len() as f64;
        let mean: Complex64 = points.iter().sum::<Complex64>() / n;
        if mean.norm() > 1e-12 {
            return Err(Error::InvalidConstellation(format!(
                "alphabet mean {mean} is not zero"
            )));
        }
        let power: f64 = points.iter().map(|s| s.norm_sqr()).sum::<f64>() / n;
        if (power - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConstellation(format!(
                "average energy {power} is not 1"
            )));
        }
        let pseudo: Complex64 = points.iter().map(|s| s * s).sum::<Complex64>() / n;
        if pseudo.norm() > 1e-12 {
            return Err(Error::InvalidConstellation(format!(
                "pseudo-correlation {pseudo} is not zero (alphabet is improper)"
            )));
        }
        let kurtosis = points.iter().map(|s| s.norm_sqr().powi(2)).sum::<f64>() / n;
        Ok(Constellation { points, kurtosis })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Fourth absolute moment E|s|^4 of the unit-energy alphabet.
    pub fn kurtosis(&self) -> f64 {
        self.kurtosis
    }
}

/// Square QAM with `m` amplitude levels per rail, normalized to unit energy.
fn square_qam(m: usize) -> Vec<Complex64> {
    let levels: Vec<f64> = (0..m).map(|i| (2 * i) as f64 - (m as f64 - 1.0)).collect();
    let scale = {
        let p: f64 = levels.iter().map(|a| a * a).sum::<f64>() / m as f64;
        (2.0 * p).sqrt()
    };
    let mut pts = Vec::with_capacity(m * m);
    for &re in &levels {
        for &im in &levels {
            pts.push(Complex64::new(re / scale, im / scale));
        }
    }
    pts
}
