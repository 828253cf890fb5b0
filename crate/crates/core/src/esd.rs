//! Half-spectrum energy spectral densities, the band-limited design variable
//! for the convex (zero-Doppler) case, and conversions to pulses and ACFs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::FrameConfig;
use crate::error::{Error, Result};
use crate::fft;
use crate::pulse::Pulse;

/// Nonnegative half-spectrum ESD over bins `0..=N_B`. The full spectrum is
/// recovered by mirroring bins `1..=N_B` onto the top of the DFT grid, which
/// keeps the synthesized pulse real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Esd {
    omega: Vec<f64>,
    config: FrameConfig,
}

impl Esd {
    pub fn new(omega: Vec<f64>, config: FrameConfig) -> Result<Esd> {
        config.validate()?;
        let nb = config.half_band_bins();
        if omega.len() != nb + 1 {
            return Err(Error::InvalidEsd(format!(
                "expected {} bins, got {}",
                nb + 1,
                omega.len()
            )));
        }
        let mut omega = omega;
        for w in &mut omega {
            if !w.is_finite() || *w < -1e-8 {
                return Err(Error::InvalidEsd(format!("negative or non-finite bin {w}")));
            }
            // tolerate solver-level negative round-off
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        Ok(Esd { omega, config })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn config(&self) -> &FrameConfig {
        &self.config
    }

    /// Full-length spectrum: `[omega, zeros, flip(omega[1..])]`.
    pub fn full_spectrum(&self) -> Vec<f64> {
        let lg = self.config.pulse_len;
        let nb = self.omega.len() - 1;
        let mut full = vec![0.0; lg];
        full[..=nb].copy_from_slice(&self.omega);
        for n in 1..=nb {
            full[lg - n] = self.omega[n];
        }
        full
    }

    /// Pulse energy implied by the spectrum, `sum(full)/L_g`.
    pub fn total_energy(&self) -> f64 {
        self.full_spectrum().iter().sum::<f64>() / self.config.pulse_len as f64
    }
}

/// Root-raised-cosine ESD sampled on the discrete frequency grid at the
/// effective roll-off `config.beta_eff()`, flat region scaled to N_T. Bins on
/// the flat/transition boundary and on the band edge then land exactly on
/// N_T and 0, which makes the vector satisfy the discrete Nyquist system.
pub fn make_rrc_esd(config: &FrameConfig) -> Result<Esd> {
    config.validate()?;
    let nt = config.samples_per_symbol as f64;
    let nb = config.half_band_bins();
    let be = config.beta_eff();
    let mut omega = Vec::with_capacity(nb + 1);
    for n in 0..=nb {
        // frequency of bin n in units of the symbol rate 1/T
        let x = n as f64 * nt / config.pulse_len as f64;
        let w = if be == 0.0 {
            if x <= 0.5 {
                nt
            } else {
                0.0
            }
        } else if x <= (1.0 - be) / 2.0 {
            nt
        } else if x <= (1.0 + be) / 2.0 {
            nt / 2.0 * (1.0 + (std::f64::consts::PI / be * (x - (1.0 - be) / 2.0)).cos())
        } else {
            0.0
        };
        omega.push(w.max(0.0));
    }
    Esd::new(omega, *config)
}

/// Circular autocorrelation of the pulse implied by the ESD: the inverse DFT
/// of the mirrored full spectrum. Real and circularly symmetric,
/// `acf[k] == acf[L_g - k]`, with `acf[0]` equal to the total energy.
pub fn esd_to_acf(esd: &Esd) -> Vec<f64> {
    let full = esd.full_spectrum();
    let mut buf: Vec<Complex64> = full.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::inverse(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

/// Zero-phase synthesis: inverse DFT of the square root of the full spectrum,
/// circularly rotated so the peak sits at `L_g/2`, normalized to unit energy.
pub fn esd_to_pulse(esd: &Esd) -> Result<Pulse> {
    let lg = esd.config.pulse_len;
    let full = esd.full_spectrum();
    let mut buf: Vec<Complex64> = full
        .iter()
        .map(|&x| Complex64::new(x.max(0.0).sqrt(), 0.0))
        .collect();
    fft::inverse(&mut buf);
    let residue = buf.iter().map(|c| c.im.abs()).fold(0.0f64, f64::max);
    if residue > 1e-10 {
        return Err(Error::InvalidEsd(format!(
            "synthesis produced imaginary residue {residue}"
        )));
    }
    let mut g = vec![0.0; lg];
    let half = lg / 2;
    for (n, out) in g.iter_mut().enumerate() {
        *out = buf[(n + lg - half) % lg].re;
    }
    Ok(Pulse::from_real(g)?.with_energy(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::acf_term_real;

    fn sec6(beta: f64) -> FrameConfig {
        FrameConfig::new(256, 16, 256, beta, 320e6).unwrap()
    }

    #[test]
    fn rrc_esd_flat_and_midpoint_values() {
        let cfg = sec6(0.3);
        let esd = make_rrc_esd(&cfg).unwrap();
        assert_eq!(esd.omega().len(), 11);
        assert_eq!(esd.omega()[0], 16.0);
        // bin at f = 1/(2T): half-amplitude symmetry point of the raised cosine
        let mid = cfg.fold_period() / 2;
        assert!((esd.omega()[mid] - 8.0).abs() < 1e-10);
        // bins above N_B simply do not exist in the half-spectrum; the mirror
        // map leaves the corresponding full-spectrum region at zero
        let full = esd.full_spectrum();
        for k in 11..=245 {
            assert_eq!(full[k], 0.0);
        }
    }

    #[test]
    fn rrc_esd_unit_energy_on_nyquist_configs() {
        for beta in [0.1, 0.3, 0.6, 0.9, 1.0] {
            let esd = make_rrc_esd(&sec6(beta)).unwrap();
            assert!((esd.total_energy() - 1.0).abs() < 1e-12, "beta={beta}");
        }
    }

    #[test]
    fn acf_zero_lag_is_energy_and_symmetric() {
        let cfg = sec6(0.3);
        let esd = make_rrc_esd(&cfg).unwrap();
        let acf = esd_to_acf(&esd);
        assert!((acf[0] - 1.0).abs() < 1e-12);
        for k in 1..256 {
            assert!((acf[k] - acf[256 - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rrc_acf_vanishes_at_symbol_lags() {
        let cfg = sec6(0.3);
        let acf = esd_to_acf(&make_rrc_esd(&cfg).unwrap());
        for n in 1..=7 {
            assert!(acf[n * 16].abs() < 1e-9, "lag {n}T: {}", acf[n * 16]);
        }
    }

    #[test]
    fn flat_esd_acf_matches_dirichlet_kernel() {
        // beta=0 brick spectrum: the ACF is a Dirichlet kernel, and at large
        // L_g the quarter-period sample approaches 2/pi of the peak.
        let cfg = FrameConfig::new(16, 16, 4096, 0.0, 320e6).unwrap();
        let esd = make_rrc_esd(&cfg).unwrap();
        let acf = esd_to_acf(&esd);
        let nb = cfg.half_band_bins();
        let m = 2 * nb + 1;
        let lg = 4096.0;
        for k in 1..2048usize {
            let th = std::f64::consts::PI * k as f64 / lg;
            let dirichlet = (m as f64 * th).sin() / th.sin();
            let expect = 16.0 * dirichlet / lg;
            assert!((acf[k] - expect).abs() < 1e-12, "k={k}");
        }
        let ratio = acf[8] / acf[0];
        assert!((ratio - 2.0 / std::f64::consts::PI).abs() < 0.01);
    }

    #[test]
    fn flat_esd_pulse_is_discrete_sinc_with_symbol_spaced_zeros() {
        // Odd fold period: the brick tiles the fold exactly and the
        // synthesized pulse has exact zero crossings at symbol offsets.
        let cfg = FrameConfig::new(16, 8, 136, 0.0, 320e6).unwrap();
        let esd = make_rrc_esd(&cfg).unwrap();
        let g = esd_to_pulse(&esd).unwrap();
        let s = g.real_samples().unwrap();
        let c = 68;
        for n in 1..8 {
            assert!(s[c + n * 8].abs() < 1e-10, "offset {n}");
            assert!(s[c - n * 8].abs() < 1e-10, "offset -{n}");
        }
        assert!(s[c] > 0.3);
    }

    #[test]
    fn pulse_circular_autocorrelation_recovers_acf() {
        // Wiener-Khinchin round trip for an arbitrary valid ESD.
        let cfg = sec6(0.6);
        let mut om: Vec<f64> = (0..=cfg.half_band_bins())
            .map(|n| 3.0 + (n as f64 * 0.7).sin().abs() * 5.0)
            .collect();
        om[4] = 0.0;
        let esd = Esd::new(om, cfg).unwrap();
        let acf = esd_to_acf(&esd);
        let g = esd_to_pulse(&esd).unwrap();
        let s = g.real_samples().unwrap();
        let lg = 256usize;
        let scale = esd.total_energy(); // pulse was renormalized to 1
        for lag in 0..lg {
            let mut circ = 0.0;
            for k in 0..lg {
                circ += s[k] * s[(k + lg - lag) % lg];
            }
            assert!(
                (circ * scale - acf[lag]).abs() < 1e-10,
                "lag {lag}: {} vs {}",
                circ * scale,
                acf[lag]
            );
        }
    }

    #[test]
    fn acf_esd_roundtrip_is_exact() {
        let cfg = sec6(0.3);
        let esd = make_rrc_esd(&cfg).unwrap();
        let acf = esd_to_acf(&esd);
        let spec = fft::forward_real(&acf);
        for n in 0..=cfg.half_band_bins() {
            assert!((spec[n].re - esd.omega()[n]).abs() < 1e-12);
            assert!(spec[n].im.abs() < 1e-12);
        }
    }

    /// Textbook unit-energy RRC impulse response.
    fn rrc_time(t: f64, sym_t: f64, be: f64) -> f64 {
        let x = t / sym_t;
        if be == 0.0 {
            if t.abs() < 1e-18 {
                return 1.0 / sym_t.sqrt();
            }
            return (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x) / sym_t.sqrt();
        }
        if t.abs() < 1e-18 {
            return (1.0 + be * (4.0 / std::f64::consts::PI - 1.0)) / sym_t.sqrt();
        }
        if (x.abs() - 1.0 / (4.0 * be)).abs() < 1e-9 {
            let a = std::f64::consts::PI / (4.0 * be);
            return be / (2.0 * sym_t).sqrt()
                * ((1.0 + 2.0 / std::f64::consts::PI) * a.sin()
                    + (1.0 - 2.0 / std::f64::consts::PI) * a.cos());
        }
        let num = (std::f64::consts::PI * x * (1.0 - be)).sin()
            + 4.0 * be * x * (std::f64::consts::PI * x * (1.0 + be)).cos();
        let den = std::f64::consts::PI * x * (1.0 - (4.0 * be * x).powi(2));
        num / den / sym_t.sqrt()
    }

    #[test]
    fn synthesized_pulse_matches_periodized_rrc_formula() {
        // The band-limited synthesis equals the periodized continuous RRC.
        // The 1/t^2 tail makes plain truncation converge like 1/M, so the
        // oracle extrapolates two truncation levels (2*S_2M - S_M).
        let cfg = sec6(0.3);
        let lg = 256usize;
        let ts = cfg.sample_period();
        let sym_t = cfg.symbol_period();
        let be = cfg.beta_eff();
        let g = esd_to_pulse(&make_rrc_esd(&cfg).unwrap()).unwrap();
        let s = g.real_samples().unwrap();

        let partial = |m_max: i64| -> Vec<f64> {
            (0..lg)
                .map(|n| {
                    let t0 = (n as i64 - 128) as f64 * ts;
                    let mut acc = 0.0;
                    for m in -m_max..=m_max {
                        acc += rrc_time(t0 - m as f64 * lg as f64 * ts, sym_t, be);
                    }
                    acc * ts.sqrt()
                })
                .collect()
        };
        let s1 = partial(2000);
        let s2 = partial(4000);
        let mut oracle: Vec<f64> = s1
            .iter()
            .zip(s2.iter())
            .map(|(a, b)| 2.0 * b - a)
            .collect();
        let norm = oracle.iter().map(|x| x * x).sum::<f64>().sqrt();
        for o in &mut oracle {
            *o /= norm;
        }
        let max_err = s
            .iter()
            .zip(oracle.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-8, "max error {max_err}");
    }

    #[test]
    fn linear_and_circular_acf_agree_inside_half_window() {
        // Zero-padded time shifts versus the circular ESD route: the pulse
        // decay keeps them close on |u| < L_g/2 (tail wrap sets the floor).
        let cfg = sec6(0.3);
        let esd = make_rrc_esd(&cfg).unwrap();
        let acf = esd_to_acf(&esd);
        let g = esd_to_pulse(&esd).unwrap();
        let s = g.real_samples().unwrap();
        for u in 0..128i64 {
            let lin = acf_term_real(&s, u);
            assert!(
                (lin - acf[u as usize]).abs() < 2e-4,
                "lag {u}: {} vs {}",
                lin,
                acf[u as usize]
            );
        }
    }

    #[test]
    fn rejects_wrong_length_and_negative_bins() {
        let cfg = sec6(0.3);
        assert!(Esd::new(vec![1.0; 10], cfg).is_err());
        let mut om = vec![1.0; 11];
        om[3] = -0.5;
        assert!(Esd::new(om, cfg).is_err());
    }
}
