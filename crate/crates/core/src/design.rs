//! Discretized design problems: regions of interest with clutter weights,
//! the linear Nyquist system on the half-spectrum, the quadratic form of the
//! zero-Doppler WISL, and the general constrained objective.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::FrameConfig;
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::esd::Esd;
use crate::fft;
use crate::pulse::{af_term, Pulse};
use crate::stats::{saf_normalizer, saf_weight};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Region of interest with per-bin clutter weights and a target power term.
/// Entries are `(delay bin, Doppler bin, weight)`; weights are per bin on the
/// delay-Doppler grid (unit cell area).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignWeights {
    entries: Vec<(i64, usize, f64)>,
    sigma_target: f64,
}

impl DesignWeights {
    pub fn from_entries(entries: Vec<(i64, usize, f64)>, sigma_target: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyRegion("no weight entries".into()));
        }
        if entries.iter().any(|&(_, _, w)| !(w >= 0.0)) || !(sigma_target >= 0.0) {
            return Err(Error::InvalidConfig("weights must be nonnegative".into()));
        }
        Ok(DesignWeights {
            entries,
            sigma_target,
        })
    }

    pub fn entries(&self) -> &[(i64, usize, f64)] {
        &self.entries
    }

    pub fn sigma_target(&self) -> f64 {
        self.sigma_target
    }

    pub fn is_zero_doppler(&self) -> bool {
        self.entries.iter().all(|&(_, v, _)| v == 0)
    }

    /// Delay bins must sit strictly inside (0, L_g/2) for the ACF-only path.
    pub fn check_acf_range(&self, config: &FrameConfig) -> Result<()> {
        let half = (config.pulse_len / 2) as i64;
        for &(u, _, _) in &self.entries {
            if u <= 0 || u >= half {
                return Err(Error::InvalidConfig(format!(
                    "delay bin {u} outside (0, {half}) for the ACF case"
                )));
            }
        }
        Ok(())
    }
}

/// Two-way monostatic range-to-delay mapping, `u = round(2 r / (c T_s))`.
pub fn range_to_delay_bins(r_min_m: f64, r_max_m: f64, sample_rate: f64) -> Result<(usize, usize)> {
    if !(r_min_m >= 0.0) || !(r_max_m > r_min_m) {
        return Err(Error::InvalidConfig(format!(
            "invalid range interval [{r_min_m}, {r_max_m}]"
        )));
    }
    let to_bin = |r: f64| (2.0 * r / SPEED_OF_LIGHT * sample_rate).round();
    let lo = to_bin(r_min_m);
    let hi = to_bin(r_max_m);
    if hi < lo {
        return Err(Error::EmptyRegion(format!(
            "range interval [{r_min_m}, {r_max_m}] m collapsed after rounding"
        )));
    }
    Ok((lo as usize, hi as usize))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightProfile {
    Uniform,
    /// sigma_c(tau) = exp(gamma * tau) with tau in seconds; decay needs
    /// gamma < 0.
    Exponential { gamma: f64 },
}

/// Build weights over a delay-bin interval crossed with a Doppler-bin
/// interval. The exponential profile is range-spread only: the weight
/// depends on the delay alone.
pub fn make_weights(
    delay_bins: (usize, usize),
    doppler_bins: (usize, usize),
    profile: WeightProfile,
    config: &FrameConfig,
    sigma_target: f64,
) -> Result<DesignWeights> {
    let ts = config.sample_period();
    let mut entries = Vec::new();
    for u in delay_bins.0..=delay_bins.1 {
        for v in doppler_bins.0..=doppler_bins.1 {
            let w = match profile {
                WeightProfile::Uniform => 1.0,
                WeightProfile::Exponential { gamma } => (gamma * u as f64 * ts).exp(),
            };
            entries.push((u as i64, v, w));
        }
    }
    DesignWeights::from_entries(entries, sigma_target)
}

/// Row structure of the discrete Nyquist (constant folded spectrum) system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NyquistSystem {
    /// Row-major constraint matrix over omega bins 0..=N_B.
    pub rows: Vec<Vec<(usize, f64)>>,
    /// Right-hand side is N_T for every row.
    pub rhs: f64,
    /// Bins whose mirror partner fell outside the half-spectrum and were
    /// pinned directly.
    pub clamped: Vec<usize>,
    /// True when the rounded mirror index of the roll-off formula disagrees
    /// with the exact fold period L_g/N_T.
    pub mirror_mismatch: bool,
}

impl NyquistSystem {
    pub fn matrix(&self, nb: usize) -> (DMatrix<f64>, DVector<f64>) {
        let mut a = DMatrix::zeros(self.rows.len(), nb + 1);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                a[(i, j)] = c;
            }
        }
        (a, DVector::from_element(self.rows.len(), self.rhs))
    }

    pub fn residual(&self, omega: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                (row.iter().map(|&(j, c)| c * omega[j]).sum::<f64>() - self.rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Discrete zero-ISI constraints on the half-spectrum: bins up to
/// `round((1-beta)/(1+beta) * N_B)` pinned to N_T, and mirror pairs about the
/// fold period summing to N_T. A self-paired midpoint bin gets coefficient 2
/// (forcing N_T/2); a partner beyond N_B pins the bin directly.
pub fn build_nyquist_system(config: &FrameConfig) -> Result<NyquistSystem> {
    config.validate()?;
    let nb = config.half_band_bins();
    let fold = config.fold_period();
    let n_flat = (((1.0 - config.beta) / (1.0 + config.beta)) * nb as f64)
        .round()
        .min(nb as f64) as usize;
    let formula_mirror = (2.0 * nb as f64 / (1.0 + config.beta)).round() as usize;

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut clamped = Vec::new();
    for n in 0..=n_flat {
        rows.push(vec![(n, 1.0)]);
    }
    for n in (n_flat + 1)..=nb {
        let p = fold as i64 - n as i64;
        if p == n as i64 {
            rows.push(vec![(n, 2.0)]);
        } else if p < 0 || p as usize > nb {
            clamped.push(n);
            rows.push(vec![(n, 1.0)]);
        } else {
            let p = p as usize;
            if p > n_flat && p < n {
                continue; // already emitted as (p, n)
            }
            let (lo, hi) = (n.min(p), n.max(p));
            rows.push(vec![(lo, 1.0), (hi, 1.0)]);
        }
    }
    Ok(NyquistSystem {
        rows,
        rhs: config.samples_per_symbol as f64,
        clamped,
        mirror_mismatch: formula_mirror != fold,
    })
}

/// Quadratic program for the zero-Doppler WISL on the half-spectrum:
/// minimize `omega' Q omega` subject to `A omega = N_T 1`, `omega >= 0`.
#[derive(Debug, Clone)]
pub struct QpProblem {
    pub q: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub config: FrameConfig,
    /// alpha_0(0) of the constellation the weights were built with.
    pub normalizer: f64,
}

impl QpProblem {
    pub fn objective(&self, omega: &[f64]) -> f64 {
        let w = DVector::from_row_slice(omega);
        (w.transpose() * &self.q * &w)[(0, 0)]
    }

    pub fn constraint_residual(&self, omega: &[f64]) -> f64 {
        let w = DVector::from_row_slice(omega);
        (&self.a * w - &self.rhs).abs().max()
    }
}

/// Linear map from the half-spectrum to the circular ACF at lag `d`:
/// `psi_d = c_d' omega`.
pub(crate) fn acf_row(d: i64, config: &FrameConfig) -> Vec<f64> {
    let lg = config.pulse_len as f64;
    let nb = config.half_band_bins();
    let mut c = vec![0.0; nb + 1];
    c[0] = 1.0 / lg;
    for (n, e) in c.iter_mut().enumerate().skip(1) {
        *e = 2.0 * (2.0 * std::f64::consts::PI * n as f64 * d as f64 / lg).cos() / lg;
    }
    c
}

/// Assemble Q for the zero-Doppler WISL. Lags at or beyond L_g/2 are dropped
/// (the selection matrix is zero there), which also truncates the symbol
/// shift sum to |n| <= ceil(L_g / (2 N_T)).
pub fn build_qp(
    config: &FrameConfig,
    weights: &DesignWeights,
    constellation: &Constellation,
) -> Result<QpProblem> {
    if !weights.is_zero_doppler() {
        return Err(Error::DopplerSpreadWeights);
    }
    weights.check_acf_range(config)?;
    let nb = config.half_band_bins();
    let nt = config.samples_per_symbol as i64;
    let half = (config.pulse_len / 2) as i64;
    let n_max = (config.pulse_len as f64 / (2.0 * config.samples_per_symbol as f64)).ceil() as i64;
    let l = config.symbols as i64;
    let mut q = DMatrix::zeros(nb + 1, nb + 1);
    for &(u, _, w) in weights.entries() {
        if w == 0.0 {
            continue;
        }
        for n in -n_max.min(l - 1)..=n_max.min(l - 1) {
            let d = u + n * nt;
            if d.abs() >= half {
                continue;
            }
            let alpha = saf_weight(n, 0, config, constellation.kurtosis());
            let c = acf_row(d.abs(), config);
            let scale = alpha * w;
            for i in 0..=nb {
                if c[i] == 0.0 {
                    continue;
                }
                for j in 0..=nb {
                    q[(i, j)] += scale * c[i] * c[j];
                }
            }
        }
    }
    let sys = build_nyquist_system(config)?;
    let (a, rhs) = sys.matrix(nb);
    Ok(QpProblem {
        q,
        a,
        rhs,
        config: *config,
        normalizer: saf_normalizer(config, constellation),
    })
}

/// The general (delay-Doppler) design problem: WISL objective with an ISI
/// penalty, out-of-band-energy budget, and fixed pulse energy.
#[derive(Debug, Clone)]
pub struct GeneralProblem {
    pub weights: DesignWeights,
    /// Out-of-band energy budget as a fraction of the pulse energy.
    pub eps_oobe: f64,
    /// Hard ISI budget used by `eval_constraints` reporting.
    pub eps_isi: f64,
    /// ISI penalty factor in the objective.
    pub rho: f64,
    pub energy: f64,
    pub config: FrameConfig,
}

impl GeneralProblem {
    pub fn new(
        weights: DesignWeights,
        eps_oobe: f64,
        eps_isi: f64,
        rho: f64,
        energy: f64,
        config: FrameConfig,
    ) -> Result<Self> {
        if !(eps_oobe > 0.0) {
            return Err(Error::InvalidConfig("OOBE budget must be positive".into()));
        }
        if !(rho > 0.0) {
            return Err(Error::InvalidConfig("ISI penalty must be positive".into()));
        }
        if !(energy > 0.0) {
            return Err(Error::InvalidConfig("energy must be positive".into()));
        }
        config.validate()?;
        Ok(GeneralProblem {
            weights,
            eps_oobe,
            eps_isi,
            rho,
            energy,
            config,
        })
    }

    /// Out-of-band energy of a real work vector: the masked spectrum energy
    /// `sum_{out-of-band} |U_k|^2 / L_g`.
    pub fn oobe_value(&self, g: &[f64]) -> f64 {
        let lg = self.config.pulse_len;
        let nb = self.config.half_band_bins();
        let spec = fft::forward_real(g);
        let mut acc = 0.0;
        for (k, s) in spec.iter().enumerate() {
            if k > nb && k < lg - nb {
                acc += s.norm_sqr();
            }
        }
        acc / lg as f64
    }

    /// Gradient of `oobe_value`: 2 W g with W the masked projection.
    pub fn oobe_grad(&self, g: &[f64]) -> Vec<f64> {
        let lg = self.config.pulse_len;
        let nb = self.config.half_band_bins();
        let mut spec = fft::forward_real(g);
        for (k, s) in spec.iter_mut().enumerate() {
            if !(k > nb && k < lg - nb) {
                *s = Complex64::new(0.0, 0.0);
            }
        }
        fft::inverse(&mut spec);
        spec.iter().map(|c| 2.0 * c.re).collect()
    }

    /// Dense out-of-band projection matrix (for inspection and PSD checks);
    /// solver paths apply it through the FFT instead.
    pub fn oobe_matrix(&self) -> DMatrix<f64> {
        let lg = self.config.pulse_len;
        let mut m = DMatrix::zeros(lg, lg);
        for j in 0..lg {
            let mut e = vec![0.0; lg];
            e[j] = 1.0;
            let col = self.oobe_grad(&e);
            for i in 0..lg {
                m[(i, j)] = col[i] / 2.0;
            }
        }
        m
    }
}

/// Exact discretized WISL of a pulse: the weighted sum of alpha_n(v)
/// |psi(u + n N_T, v)|^2 over the region of interest.
pub fn eval_general_wisl(
    pulse: &Pulse,
    config: &FrameConfig,
    weights: &DesignWeights,
    constellation: &Constellation,
) -> Result<f64> {
    if pulse.len() != config.pulse_len {
        return Err(Error::InvalidPulse(format!(
            "pulse length {} does not match config pulse length {}",
            pulse.len(),
            config.pulse_len
        )));
    }
    let nt = config.samples_per_symbol as i64;
    let k = config.doppler_bins();
    let lg = config.pulse_len as i64;
    let l = config.symbols as i64;
    let mut acc = 0.0;
    for &(u, v, w) in weights.entries() {
        if w == 0.0 {
            continue;
        }
        let lo = ((-(lg - 1) - u).div_euclid(nt)).max(-(l - 1));
        let hi = (((lg - 1) - u).div_euclid(nt)).min(l - 1);
        for n in lo..=hi {
            let alpha = saf_weight(n, v, config, constellation.kurtosis());
            acc += w * alpha * af_term(pulse.samples(), u + n * nt, v, k).norm_sqr();
        }
    }
    Ok(acc)
}

/// Per-constraint evaluation of a pulse against a general problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// `(symbol lag n, |psi(n N_T, 0)|^2)` for every lag inside the pulse.
    pub isi: Vec<(usize, f64)>,
    pub isi_worst: f64,
    pub isi_ok: bool,
    pub oobe: f64,
    pub oobe_ok: bool,
    pub energy: f64,
    pub energy_ok: bool,
}

pub fn eval_constraints(pulse: &Pulse, problem: &GeneralProblem) -> Result<ConstraintReport> {
    let cfg = &problem.config;
    if pulse.len() != cfg.pulse_len {
        return Err(Error::InvalidPulse(format!(
            "pulse length {} does not match config pulse length {}",
            pulse.len(),
            cfg.pulse_len
        )));
    }
    let k = cfg.doppler_bins();
    let nt = cfg.samples_per_symbol;
    let mut isi = Vec::new();
    let mut worst = 0.0f64;
    for n in 1..cfg.fold_period() {
        let p = af_term(pulse.samples(), (n * nt) as i64, 0, k).norm_sqr();
        worst = worst.max(p);
        isi.push((n, p));
    }
    let g = pulse.real_samples().unwrap_or_else(|_| {
        // complex pulses: measure OOBE on the full spectrum
        Vec::new()
    });
    let oobe = if g.is_empty() {
        let lg = cfg.pulse_len;
        let nb = cfg.half_band_bins();
        let mut buf: Vec<Complex64> = pulse.samples().to_vec();
        fft::forward(&mut buf);
        buf.iter()
            .enumerate()
            .filter(|(k, _)| *k > nb && *k < lg - nb)
            .map(|(_, s)| s.norm_sqr())
            .sum::<f64>()
            / lg as f64
    } else {
        problem.oobe_value(&g)
    };
    let energy = pulse.energy();
    Ok(ConstraintReport {
        isi_worst: worst,
        isi_ok: worst <= problem.eps_isi,
        isi,
        oobe,
        oobe_ok: oobe <= problem.eps_oobe,
        energy,
        energy_ok: (energy - problem.energy).abs() <= 1e-8 * problem.energy.max(1.0),
    })
}

/// Default ISI budget: the discrete finite-length RRC's own worst squared
/// ISI value at the same configuration.
pub fn default_isi_budget(config: &FrameConfig) -> Result<f64> {
    let rrc = crate::esd::esd_to_pulse(&crate::esd::make_rrc_esd(config)?)?;
    let k = config.doppler_bins();
    let nt = config.samples_per_symbol;
    let mut worst = 0.0f64;
    for n in 1..config.fold_period() {
        worst = worst.max(af_term(rrc.samples(), (n * nt) as i64, 0, k).norm_sqr());
    }
    Ok(worst)
}
