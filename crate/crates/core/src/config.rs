//! Frame and sampling geometry shared by every other module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretization of one communication frame: `symbols` data symbols, each
/// spanning `samples_per_symbol` samples at `sample_rate`, shaped by a pulse
/// of `pulse_len` samples with roll-off `beta`.
///
/// The Doppler DFT size equals `pulse_len`, so delay and Doppler live on one
/// consistent grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Number of data symbols per frame (L).
    pub symbols: usize,
    /// Samples per symbol duration (N_T); the symbol period is `N_T / f_s`.
    pub samples_per_symbol: usize,
    /// Pulse length in samples (L_g); must be a multiple of `samples_per_symbol`.
    pub pulse_len: usize,
    /// Roll-off factor in [0, 1].
    pub beta: f64,
    /// Sampling rate in Hz (f_s).
    pub sample_rate: f64,
}

impl FrameConfig {
    pub fn new(
        symbols: usize,
        samples_per_symbol: usize,
        pulse_len: usize,
        beta: f64,
        sample_rate: f64,
    ) -> Result<Self> {
        let cfg = FrameConfig {
            symbols,
            samples_per_symbol,
            pulse_len,
            beta,
            sample_rate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidConfig(format!(
                "beta = {} outside [0, 1]",
                self.beta
            )));
        }
        if self.symbols < 1 {
            return Err(Error::InvalidConfig("symbol count must be >= 1".into()));
        }
        if self.samples_per_symbol < 2 {
            return Err(Error::InvalidConfig(
                "samples per symbol must be >= 2".into(),
            ));
        }
        if self.pulse_len == 0 || self.pulse_len % self.samples_per_symbol != 0 {
            return Err(Error::InvalidConfig(format!(
                "pulse length {} must be a positive multiple of {}",
                self.pulse_len, self.samples_per_symbol
            )));
        }
        if !(self.sample_rate > 0.0) {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        let nb = self.half_band_bins() as f64;
        let lo = self.pulse_len as f64 / (2.0 * self.samples_per_symbol as f64);
        let hi = (self.pulse_len / self.samples_per_symbol) as f64;
        if nb < lo || nb > hi {
            return Err(Error::InvalidConfig(format!(
                "half-band bin count {} outside [{}, {}]",
                nb, lo, hi
            )));
        }
        Ok(())
    }

    /// Sample period T_s in seconds.
    pub fn sample_period(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Symbol period T in seconds.
    pub fn symbol_period(&self) -> f64 {
        self.samples_per_symbol as f64 / self.sample_rate
    }

    /// Doppler DFT size K (one consistent grid: K = pulse_len).
    pub fn doppler_bins(&self) -> usize {
        self.pulse_len
    }

    /// Number of frequency bins per symbol-rate interval, L_g / N_T.
    pub fn fold_period(&self) -> usize {
        self.pulse_len / self.samples_per_symbol
    }

    /// Half-band bin count N_B = round((1+beta) L_g / (2 N_T)).
    pub fn half_band_bins(&self) -> usize {
        ((1.0 + self.beta) * self.pulse_len as f64 / (2.0 * self.samples_per_symbol as f64)).round()
            as usize
    }

    /// Roll-off implied by the integer `half_band_bins`; the discrete grid
    /// realizes this value rather than the nominal `beta`.
    pub fn beta_eff(&self) -> f64 {
        2.0 * self.half_band_bins() as f64 * self.samples_per_symbol as f64 / self.pulse_len as f64
            - 1.0
    }

    /// Length of a synthesized frame in samples: L*N_T + L_g - 1.
    pub fn frame_len(&self) -> usize {
        self.symbols * self.samples_per_symbol + self.pulse_len - 1
    }

    /// One-way range extent of a delay bin in meters.
    pub fn range_bin_m(&self) -> f64 {
        crate::design::SPEED_OF_LIGHT * self.sample_period() / 2.0
    }
}
