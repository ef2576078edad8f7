//! Thin wrappers over rustfft with a per-thread plan cache.
//!
//! Conventions: `fft_forward` applies the unnormalized DFT with kernel
//! `e^{-2πi jk/M}`, so the Fourier coefficient of mode `n` of samples of a
//! trigonometric polynomial is `X[n mod M] / M`.  `fft_inverse` applies the
//! unnormalized adjoint, which synthesizes samples from coefficients placed
//! in wrapped bins.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward DFT (unnormalized, `e^{-2πi jk/M}`).
pub fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

/// In-place inverse DFT (unnormalized, `e^{+2πi jk/M}`).
pub fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
}

/// Wrapped bin index for signed mode `n` in a length-`m` transform.
pub fn bin(n: i64, m: usize) -> usize {
    n.rem_euclid(m as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_is_length_scaling() {
        let orig: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(k as f64, (k * k) as f64 * 0.1))
            .collect();
        let mut buf = orig.clone();
        fft_forward(&mut buf);
        fft_inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b * 8.0).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_extracts_single_mode() {
        // samples of e^{3it} on 16 points: X[3] = 16, all other bins 0
        let m = 16;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|k| Complex64::cis(3.0 * 2.0 * std::f64::consts::PI * k as f64 / m as f64))
            .collect();
        fft_forward(&mut buf);
        for (k, v) in buf.iter().enumerate() {
            let expect = if k == 3 { m as f64 } else { 0.0 };
            assert!((v - expect).norm() < 1e-12, "bin {k}");
        }
    }

    #[test]
    fn bin_wraps_negative_modes() {
        assert_eq!(bin(-1, 16), 15);
        assert_eq!(bin(-16, 16), 0);
        assert_eq!(bin(5, 16), 5);
    }
}
