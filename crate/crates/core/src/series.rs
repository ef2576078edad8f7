//! Truncated Taylor series `Σ_{k<len} a_k z^k` on the closed unit disk, with
//! the handful of exact operations the conformal-map pipeline needs:
//! termwise calculus, the `e^{-F}` recurrence, and FFT evaluation on circles.

use crate::error::{Error, Result};
use crate::fft::{bin, fft_inverse};
use crate::grid::{PolarField, PolarGrid};
use ndarray::Array2;
use num_complex::Complex64;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

/// Decay diagnostics for a truncated series; `tail` is the coefficient mass
/// in the last decile, the cheapest honest proxy for the truncation error.
#[derive(Debug, Clone, Copy)]
pub struct TailReport {
    pub tail: f64,
    pub under_resolved: bool,
    pub suggested_len: usize,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![Complex64::ZERO; len])
    }

    /// The identity map `z`, padded to `len` coefficients.
    pub fn identity(len: usize) -> Self {
        let mut s = Self::zeros(len.max(2));
        s.coeffs[1] = Complex64::ONE;
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, v: Complex64) {
        if k >= self.coeffs.len() {
            self.coeffs.resize(k + 1, Complex64::ZERO);
        }
        self.coeffs[k] = v;
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| factor * c).collect())
    }

    /// Horner evaluation at a point of the closed disk.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Termwise derivative (length shrinks by one, floor of one term).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zeros(1);
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i + 1) as f64)
                .collect(),
        )
    }

    /// Termwise antiderivative vanishing at the origin: `f_k = g_{k-1}/k`.
    pub fn integrate(&self) -> Self {
        let mut out = vec![Complex64::ZERO; self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i + 1] = c / (i + 1) as f64;
        }
        Self::new(out)
    }

    /// `e^{-F}` to the same truncation, via the differential recurrence
    /// `k g_k = -Σ_{j=1}^{k} j F_j g_{k-j}`, seeded with `g_0 = e^{-F_0}`.
    /// Exact at every retained order, unlike exponentiating samples.
    pub fn exp_neg(&self) -> Self {
        let n = self.coeffs.len();
        let mut g = vec![Complex64::ZERO; n];
        g[0] = (-self.coeffs[0]).exp();
        for k in 1..n {
            let mut acc = Complex64::ZERO;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * g[k - j];
            }
            g[k] = -acc / k as f64;
        }
        Self::new(g)
    }

    /// Product truncated to the length of `self`.
    pub fn mul_truncated(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex64::ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Sum of |a_k| over the last decile of retained coefficients, with a
    /// geometric extrapolation of how long the series would need to be for
    /// that mass to drop below `tol`.
    pub fn tail_report(&self, tol: f64) -> TailReport {
        let n = self.coeffs.len();
        let start = n - (n / 10).max(1);
        let tail: f64 = self.coeffs[start..].iter().map(|c| c.norm()).sum();
        let under_resolved = tail > tol;
        let suggested_len = if !under_resolved {
            n
        } else {
            // estimate the decay rate from the mid/tail mass ratio
            let mid_start = n / 2;
            let mid: f64 = self.coeffs[mid_start..(mid_start + (n / 10).max(1)).min(n)]
                .iter()
                .map(|c| c.norm())
                .sum();
            let rate = if mid > 0.0 && tail > 0.0 && tail < mid {
                (tail / mid).powf(1.0 / (start - mid_start).max(1) as f64)
            } else {
                0.99
            };
            let factor = if rate < 1.0 && tail > tol {
                ((tol / tail).ln() / rate.ln()).ceil().max(1.0)
            } else {
                4.0 * n as f64
            };
            (n as f64 + factor).min(1e7) as usize
        };
        TailReport { tail, under_resolved, suggested_len }
    }

    /// Error if the coefficient tail carries more than `tol` mass.
    pub fn require_resolved(&self, tol: f64) -> Result<()> {
        let report = self.tail_report(tol);
        if report.under_resolved {
            return Err(Error::UnderResolved {
                tail: report.tail,
                tol,
                suggested: report.suggested_len,
            });
        }
        Ok(())
    }

    /// Values at the `m` points `ρ e^{2πik/m}`, by folding the scaled
    /// coefficients into FFT bins; exact up to the fold, which for `ρ < 1`
    /// is damped by `ρ^{k}` on the wrapped-in coefficients.
    pub fn eval_circle(&self, rho: f64, m: usize) -> Vec<Complex64> {
        let mut buf = vec![Complex64::ZERO; m];
        let mut p = 1.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            buf[bin(k as i64, m)] += c * p;
            p *= rho;
        }
        fft_inverse(&mut buf);
        buf
    }

    /// Samples on every circle of a polar grid.
    pub fn eval_grid(&self, grid: &Arc<PolarGrid>) -> PolarField {
        let m = grid.angles();
        let mut values = Array2::from_elem((grid.nr(), m), Complex64::ZERO);
        for (j, &r) in grid.radii().iter().enumerate() {
            let row = self.eval_circle(r, m);
            for (k, v) in row.into_iter().enumerate() {
                values[(j, k)] = v;
            }
        }
        PolarField::from_values(grid, values, false).expect("shape matches by construction")
    }

    /// Largest coefficient magnitude at indices violating `k ≡ 1 (mod 4)`;
    /// zero for maps with exact four-fold symmetry.
    pub fn equivariance_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 4 != 1)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}
