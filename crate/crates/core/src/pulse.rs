//! Discrete pulses and the discrete ambiguity-function primitive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::FrameConfig;
use crate::error::{Error, Result};

/// Imaginary residue above which a pulse is no longer considered real.
pub const REAL_RESIDUE_TOL: f64 = 1e-8;

/// A sampled pulse-shaping filter. Stored complex; designed and baseline
/// pulses are real and `imag_residue` flags anything that is not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    samples: Vec<Complex64>,
    energy: f64,
}

impl Pulse {
    pub fn new(samples: Vec<Complex64>) -> Result<Pulse> {
        if samples.is_empty() {
            return Err(Error::InvalidPulse("empty sample vector".into()));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::InvalidPulse("non-finite sample".into()));
        }
        let energy = samples.iter().map(|s| s.norm_sqr()).sum();
        Ok(Pulse { samples, energy })
    }

    pub fn from_real(samples: Vec<f64>) -> Result<Pulse> {
        Pulse::new(samples.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    /// Unit impulse at the window center: the ideal zero-ISI pulse on this grid.
    pub fn unit_impulse(len: usize) -> Pulse {
        let mut s = vec![Complex64::new(0.0, 0.0); len];
        s[len / 2] = Complex64::new(1.0, 0.0);
        Pulse { samples: s, energy: 1.0 }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Total energy, sum of |g_k|^2.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Largest imaginary magnitude relative to the largest sample magnitude.
    pub fn imag_residue(&self) -> f64 {
        let peak = self
            .samples
            .iter()
            .map(|s| s.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.samples.iter().map(|s| s.im.abs()).fold(0.0f64, f64::max) / peak
    }

    pub fn is_effectively_real(&self) -> bool {
        self.imag_residue() <= REAL_RESIDUE_TOL
    }

    /// Real part of the samples; errors when the imaginary residue is above
    /// `REAL_RESIDUE_TOL`.
    pub fn real_samples(&self) -> Result<Vec<f64>> {
        if !self.is_effectively_real() {
            return Err(Error::InvalidPulse(format!(
                "imaginary residue {} exceeds {}",
                self.imag_residue(),
                REAL_RESIDUE_TOL
            )));
        }
        Ok(self.samples.iter().map(|s| s.re).collect())
    }

    /// Rescale so that the energy equals `target`.
    pub fn with_energy(mut self, target: f64) -> Pulse {
        let scale = (target / self.energy).sqrt();
        for s in &mut self.samples {
            *s *= scale;
        }
        self.energy = target;
        self
    }
}

/// Discrete ambiguity function of a pulse,
/// `psi(u, v) = sum_k conj(g_k) g_{k-u} exp(j 2 pi v k / K)`,
/// with the time shift zero-padded (out-of-range samples are zero) and the
/// Doppler grid `v / (K T_s)` where K is `config.doppler_bins()`.
pub fn discrete_af(pulse: &Pulse, u: i64, v: usize, config: &FrameConfig) -> Result<Complex64> {
    let lg = config.pulse_len;
    if pulse.len() != lg {
        return Err(Error::InvalidPulse(format!(
            "pulse length {} does not match config pulse length {}",
            pulse.len(),
            lg
        )));
    }
    if u.unsigned_abs() as usize >= lg {
        return Err(Error::InvalidDelayBin { bin: u, limit: lg });
    }
    let k = config.doppler_bins();
    if v >= k {
        return Err(Error::InvalidDopplerBin { bin: v, limit: k });
    }
    Ok(af_term(pulse.samples(), u, v, k))
}

/// Same sum as `discrete_af` but with any out-of-range shift evaluating to
/// zero instead of an error. Used by the statistics sums, where delays
/// `u + n N_T` routinely leave the pulse support.
pub(crate) fn af_term(g: &[Complex64], u: i64, v: usize, k: usize) -> Complex64 {
    let n = g.len() as i64;
    if u.abs() >= n {
        return Complex64::new(0.0, 0.0);
    }
    let (lo, hi) = if u >= 0 { (u, n) } else { (0, n + u) };
    let w = 2.0 * std::f64::consts::PI * v as f64 / k as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    if v == 0 {
        for i in lo..hi {
            acc += g[i as usize].conj() * g[(i - u) as usize];
        }
    } else {
        for i in lo..hi {
            let ph = Complex64::from_polar(1.0, w * i as f64);
            acc += g[i as usize].conj() * g[(i - u) as usize] * ph;
        }
    }
    acc
}

/// Zero-Doppler slice of the ambiguity function (the linear autocorrelation),
/// for real-valued work vectors. Shift sign does not matter for real input.
pub(crate) fn acf_term_real(g: &[f64], u: i64) -> f64 {
    let d = u.unsigned_abs() as usize;
    if d >= g.len() {
        return 0.0;
    }
    let n = g.len() - d;
    let mut acc = 0.0;
    for i in 0..n {
        acc += g[i + d] * g[i];
    }
    acc
}
