//! Closed-form statistics of the frame-signal ambiguity function under
//! random i.i.d. symbols: expectation, variance, and expected squared AF.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::FrameConfig;
use crate::constellation::Constellation;
use crate::design::DesignWeights;
use crate::error::{Error, Result};
use crate::pulse::{af_term, discrete_af, Pulse};

/// Weight on the self term: L(mu4 - 1) at n = 0, L - |n| otherwise.
pub(crate) fn variance_weight(n: i64, symbols: usize, kurtosis: f64) -> f64 {
    if n == 0 {
        symbols as f64 * (kurtosis - 1.0)
    } else {
        (symbols as i64 - n.abs()) as f64
    }
}

/// |sum_{m=0}^{L-1} exp(j 2 pi m v N_T / K)|^2, the coherent Doppler gain.
pub(crate) fn doppler_gain_sq(v: usize, config: &FrameConfig) -> f64 {
    let l = config.symbols;
    let k = config.doppler_bins();
    let nt = config.samples_per_symbol;
    if (v * nt) % k == 0 {
        return (l * l) as f64;
    }
    let half = std::f64::consts::PI * (v * nt) as f64 / k as f64;
    let s = (l as f64 * half).sin() / half.sin();
    s * s
}

fn doppler_sum(v: usize, config: &FrameConfig) -> Complex64 {
    let l = config.symbols;
    let k = config.doppler_bins();
    let nt = config.samples_per_symbol;
    if (v * nt) % k == 0 {
        return Complex64::new(l as f64, 0.0);
    }
    let half = std::f64::consts::PI * (v * nt) as f64 / k as f64;
    let mag = (l as f64 * half).sin() / half.sin();
    mag * Complex64::from_polar(1.0, (l as f64 - 1.0) * half)
}

/// Squared-AF weight alpha_n(v).
pub(crate) fn saf_weight(n: i64, v: usize, config: &FrameConfig, kurtosis: f64) -> f64 {
    if n == 0 {
        config.symbols as f64 * (kurtosis - 1.0) + doppler_gain_sq(v, config)
    } else {
        (config.symbols as i64 - n.abs()) as f64
    }
}

/// alpha_0(0) = L (mu4 - 1) + L^2; every reported SAF/SACF value is divided
/// by this number.
pub fn saf_normalizer(config: &FrameConfig, constellation: &Constellation) -> f64 {
    let l = config.symbols as f64;
    l * (constellation.kurtosis() - 1.0) + l * l
}

/// Symbol-shift range whose delays still intersect the pulse support.
fn shift_range(u: i64, config: &FrameConfig) -> std::ops::RangeInclusive<i64> {
    let lg = config.pulse_len as i64;
    let nt = config.samples_per_symbol as i64;
    let l = config.symbols as i64;
    let lo = (-(lg - 1) - u).div_euclid(nt).max(-(l - 1));
    let hi = ((lg - 1) - u).div_euclid(nt).min(l - 1);
    lo..=hi
}

/// E{chi(u, v)} = psi(u, v) * sum_n exp(j 2 pi n v N_T / K).
pub fn expected_af(pulse: &Pulse, u: i64, v: usize, config: &FrameConfig) -> Result<Complex64> {
    let psi = discrete_af(pulse, u, v, config)?;
    Ok(psi * doppler_sum(v, config))
}

/// Var{chi(u, v)} = sum_{|n|<L} alpha~_n |psi(u + n N_T, v)|^2.
pub fn af_variance(
    pulse: &Pulse,
    u: i64,
    v: usize,
    config: &FrameConfig,
    constellation: &Constellation,
) -> Result<f64> {
    check_bins(pulse, u, v, config)?;
    let nt = config.samples_per_symbol as i64;
    let k = config.doppler_bins();
    let mut acc = 0.0;
    for n in shift_range(u, config) {
        let w = variance_weight(n, config.symbols, constellation.kurtosis());
        if w == 0.0 {
            continue;
        }
        acc += w * af_term(pulse.samples(), u + n * nt, v, k).norm_sqr();
    }
    Ok(acc)
}

/// E{|chi(u, v)|^2} = sum_{|n|<L} alpha_n(v) |psi(u + n N_T, v)|^2.
pub fn expected_saf(
    pulse: &Pulse,
    u: i64,
    v: usize,
    config: &FrameConfig,
    constellation: &Constellation,
) -> Result<f64> {
    check_bins(pulse, u, v, config)?;
    let nt = config.samples_per_symbol as i64;
    let k = config.doppler_bins();
    let mut acc = 0.0;
    for n in shift_range(u, config) {
        let w = saf_weight(n, v, config, constellation.kurtosis());
        if w == 0.0 {
            continue;
        }
        acc += w * af_term(pulse.samples(), u + n * nt, v, k).norm_sqr();
    }
    Ok(acc)
}

fn check_bins(pulse: &Pulse, u: i64, v: usize, config: &FrameConfig) -> Result<()> {
    if pulse.len() != config.pulse_len {
        return Err(Error::InvalidPulse(format!(
            "pulse length {} does not match config pulse length {}",
            pulse.len(),
            config.pulse_len
        )));
    }
    if u.unsigned_abs() as usize >= config.pulse_len {
        return Err(Error::InvalidDelayBin {
            bin: u,
            limit: config.pulse_len,
        });
    }
    if v >= config.doppler_bins() {
        return Err(Error::InvalidDopplerBin {
            bin: v,
            limit: config.doppler_bins(),
        });
    }
    Ok(())
}

/// Large-frame limit of the normalized expected squared ACF: |psi(u, 0)|^2.
pub fn asymptotic_sacf(pulse: &Pulse, u: i64) -> f64 {
    af_term(pulse.samples(), u, 0, pulse.len().max(1)).norm_sqr()
}

/// AF moments tabulated on a delay x Doppler grid (row-major over delays,
/// then dopplers).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AfMoments {
    pub delays: Vec<i64>,
    pub dopplers: Vec<usize>,
    pub mean: Vec<Complex64>,
    pub variance: Vec<f64>,
    pub expected_saf: Vec<f64>,
    /// alpha_0(0), the normalization constant.
    pub normalizer: f64,
    /// Exact E{|chi(0,0)|^2}; `normalizer` approximates it when ISI is small.
    pub saf_origin: f64,
}

impl AfMoments {
    pub fn index(&self, u: i64, v: usize) -> Option<usize> {
        let iu = self.delays.iter().position(|&d| d == u)?;
        let iv = self.dopplers.iter().position(|&d| d == v)?;
        Some(iu * self.dopplers.len() + iv)
    }
}

pub fn af_moments(
    pulse: &Pulse,
    config: &FrameConfig,
    constellation: &Constellation,
    delays: &[i64],
    dopplers: &[usize],
) -> Result<AfMoments> {
    let mut mean = Vec::with_capacity(delays.len() * dopplers.len());
    let mut variance = Vec::with_capacity(mean.capacity());
    let mut saf = Vec::with_capacity(mean.capacity());
    for &u in delays {
        for &v in dopplers {
            mean.push(expected_af(pulse, u, v, config)?);
            variance.push(af_variance(pulse, u, v, config, constellation)?);
            saf.push(expected_saf(pulse, u, v, config, constellation)?);
        }
    }
    Ok(AfMoments {
        delays: delays.to_vec(),
        dopplers: dopplers.to_vec(),
        mean,
        variance,
        expected_saf: saf,
        normalizer: saf_normalizer(config, constellation),
        saf_origin: expected_saf(pulse, 0, 0, config, constellation)?,
    })
}

/// Mean square matched-filter output at the origin for a scattering profile:
/// sigma_T scales the exact E{|chi(0,0)|^2} and each clutter bin contributes
/// its weight times E{|chi(u,v)|^2}. Weights are per delay-Doppler bin (unit
/// cell area on the bin grid).
pub fn wssus_output_power(moments: &AfMoments, scattering: &DesignWeights) -> Result<f64> {
    let mut acc = scattering.sigma_target() * moments.saf_origin;
    for &(u, v, w) in scattering.entries() {
        let idx = moments.index(u, v).ok_or_else(|| {
            Error::GridMismatch(format!("bin ({u}, {v}) absent from the moments grid"))
        })?;
        acc += w * moments.expected_saf[idx];
    }
    Ok(acc)
}
