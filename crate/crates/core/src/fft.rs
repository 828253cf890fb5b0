//! Thin wrappers around rustfft with the normalization conventions used
//! throughout: forward DFT is unnormalized, inverse carries 1/N.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub fn forward(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(data.len()).process(data);
}

pub fn inverse(data: &mut [Complex64]) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(data);
    let scale = 1.0 / n as f64;
    for x in data.iter_mut() {
        *x *= scale;
    }
}

pub fn forward_real(data: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward(&mut buf);
    buf
}

/// Next power of two >= n, for zero-padded linear correlation.
pub fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p <<= 1;
    }
    p
}
