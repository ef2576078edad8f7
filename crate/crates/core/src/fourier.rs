//! Trigonometric polynomials on the unit circle, stored as two-sided
//! Fourier coefficient vectors `c_n`, `|n| <= n_max`.
//!
//! The circle carries normalized arclength, so `c_n = ∫ h(t) e^{-int} dm(t)`
//! and `mean == c_0`.  Real-valued polynomials satisfy `c_{-n} = conj(c_n)`;
//! the flag `is_real` records that the data is supposed to be real so that
//! downstream code can resymmetrize away roundoff drift.

use crate::error::{Error, Result};
use crate::fft::{bin, fft_forward, fft_inverse};
use num_complex::Complex64;
use std::f64::consts::PI;

/// A trigonometric polynomial `h(t) = Σ_{|n| <= n_max} c_n e^{int}`.
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    n_max: usize,
    /// Coefficients indexed by `i <-> mode i - n_max`, length `2 n_max + 1`.
    coeffs: Vec<Complex64>,
    is_real: bool,
}

/// Sup norm together with a discrete Hölder seminorm, both measured on a
/// uniform sample grid.
#[derive(Debug, Clone, Copy)]
pub struct HolderEstimate {
    pub sup: f64,
    pub seminorm: f64,
    pub alpha: f64,
}

impl HolderEstimate {
    /// The full Hölder norm `‖h‖_∞ + [h]_α`.
    pub fn total(&self) -> f64 {
        self.sup + self.seminorm
    }
}

impl TrigPolynomial {
    pub fn zero(n_max: usize, is_real: bool) -> Self {
        Self { n_max, coeffs: vec![Complex64::ZERO; 2 * n_max + 1], is_real }
    }

    /// Build from a list of `(n, c_n)` with `n >= 0`; when `is_real` the
    /// conjugate coefficients at `-n` are filled in automatically.
    pub fn from_modes(n_max: usize, modes: &[(i64, Complex64)], is_real: bool) -> Result<Self> {
        let mut p = Self::zero(n_max, is_real);
        for &(n, c) in modes {
            if n < 0 {
                return Err(Error::InvalidInput(format!(
                    "from_modes takes nonnegative modes, got {n}"
                )));
            }
            p.set_coeff(n, c)?;
            if is_real && n != 0 {
                p.set_coeff(-n, c.conj())?;
            }
        }
        if is_real && p.coeff(0).im.abs() > 0.0 {
            return Err(Error::InvalidInput("real polynomial needs a real mean".into()));
        }
        Ok(p)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    /// Coefficient of mode `n` (zero outside the stored band).
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            Complex64::ZERO
        } else {
            self.coeffs[(n + self.n_max as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, n: i64, c: Complex64) -> Result<()> {
        if n.unsigned_abs() as usize > self.n_max {
            return Err(Error::InvalidInput(format!(
                "mode {n} exceeds the coefficient band |n| <= {}",
                self.n_max
            )));
        }
        self.coeffs[(n + self.n_max as i64) as usize] = c;
        Ok(())
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    /// Iterate over `(n, c_n)` for the stored band.
    pub fn iter_modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n_max = self.n_max as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - n_max, c))
    }

    /// Values on the uniform grid `t_k = 2πk/m`.  Exact synthesis requires
    /// `m >= 2 n_max + 1`, otherwise modes would alias.
    pub fn sample(&self, m: usize) -> Result<Vec<Complex64>> {
        if m < 2 * self.n_max + 1 {
            return Err(Error::Resolution(format!(
                "{m} angles alias a band of width {}; need m >= {}",
                self.n_max,
                2 * self.n_max + 1
            )));
        }
        let mut buf = vec![Complex64::ZERO; m];
        for (n, c) in self.iter_modes() {
            buf[bin(n, m)] += c;
        }
        fft_inverse(&mut buf);
        Ok(buf)
    }

    /// Real parts of `sample`; intended for polynomials flagged real.
    pub fn sample_real(&self, m: usize) -> Result<Vec<f64>> {
        Ok(self.sample(m)?.into_iter().map(|v| v.re).collect())
    }

    /// Recover coefficients from uniform samples.  Requires `m >= 2 n_max + 1`
    /// and samples that actually come from a polynomial of the stated band;
    /// higher frequencies would fold in silently.
    pub fn from_samples(values: &[Complex64], n_max: usize, is_real: bool) -> Result<Self> {
        let m = values.len();
        if m < 2 * n_max + 1 {
            return Err(Error::Resolution(format!(
                "{m} samples cannot resolve a band of width {n_max}; need m >= {}",
                2 * n_max + 1
            )));
        }
        let mut buf = values.to_vec();
        fft_forward(&mut buf);
        let scale = 1.0 / m as f64;
        let mut p = Self::zero(n_max, is_real);
        for n in -(n_max as i64)..=n_max as i64 {
            p.set_coeff(n, buf[bin(n, m)] * scale)?;
        }
        if is_real {
            p.resymmetrize();
        }
        Ok(p)
    }

    pub fn from_real_samples(values: &[f64], n_max: usize) -> Result<Self> {
        let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_samples(&complex, n_max, true)
    }

    /// Largest violation of the reality symmetry `c_{-n} = conj(c_n)`.
    pub fn reality_defect(&self) -> f64 {
        let mut worst: f64 = self.coeff(0).im.abs();
        for n in 1..=self.n_max as i64 {
            worst = worst.max((self.coeff(n) - self.coeff(-n).conj()).norm());
        }
        worst
    }

    /// Average out the conjugate symmetry, forcing an exactly real polynomial.
    pub fn resymmetrize(&mut self) {
        let c0 = self.coeff(0);
        self.set_coeff(0, Complex64::new(c0.re, 0.0)).unwrap();
        for n in 1..=self.n_max as i64 {
            let avg = 0.5 * (self.coeff(n) + self.coeff(-n).conj());
            self.set_coeff(n, avg).unwrap();
            self.set_coeff(-n, avg.conj()).unwrap();
        }
        self.is_real = true;
    }

    /// Project onto the closed span of `{e^{int} : n != 0, 4 | n}`: the mean
    /// and every mode of frequency not divisible by four are dropped.  The
    /// input must be (numerically) real.
    pub fn project_x4(&self) -> Result<Self> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
        let defect = self.reality_defect();
        if defect > 1e-8 * scale {
            return Err(Error::InvalidInput(format!(
                "projection expects real data; conjugate symmetry off by {defect:.3e}"
            )));
        }
        let mut out = self.clone();
        out.resymmetrize();
        for n in -(self.n_max as i64)..=self.n_max as i64 {
            if n == 0 || n % 4 != 0 {
                out.set_coeff(n, Complex64::ZERO)?;
            }
        }
        Ok(out)
    }

    /// True when supported on nonzero multiples of four, up to `tol`.
    pub fn is_x4(&self, tol: f64) -> bool {
        self.iter_modes().all(|(n, c)| (n != 0 && n % 4 == 0) || c.norm() <= tol)
    }

    pub fn add_scaled(&self, other: &Self, factor: Complex64) -> Self {
        let n_max = self.n_max.max(other.n_max);
        let is_real =
            self.is_real && other.is_real && factor.im == 0.0;
        let mut out = Self::zero(n_max, is_real);
        for n in -(n_max as i64)..=n_max as i64 {
            out.set_coeff(n, self.coeff(n) + factor * other.coeff(n)).unwrap();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, Complex64::ONE)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, -Complex64::ONE)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn coeff_sup(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// ℓ² norm of the coefficients (= L² norm of the polynomial).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sup norm measured on `m` uniform samples.
    pub fn sup_norm(&self, m: usize) -> f64 {
        let m = m.max(2 * self.n_max + 1);
        self.sample(m)
            .expect("m clamped to the admissible range")
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Discrete Hölder data at exponent `alpha` on `m` uniform samples,
    /// using the chordal distance `|e^{is} - e^{it}|`.
    pub fn holder_estimate(&self, alpha: f64, m: usize) -> Result<HolderEstimate> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "Hölder exponent must lie in (0, 1], got {alpha}"
            )));
        }
        let m = m.max(2 * self.n_max + 1);
        let values = self.sample(m)?;
        let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // chord between samples j and k depends only on j - k
        let half = m / 2;
        let chord_pow: Vec<f64> = (1..=half)
            .map(|d| (2.0 * (PI * d as f64 / m as f64).sin()).powf(alpha))
            .collect();
        let mut seminorm = 0.0f64;
        for j in 0..m {
            for d in 1..=half {
                let k = (j + d) % m;
                let q = (values[j] - values[k]).norm() / chord_pow[d - 1];
                seminorm = seminorm.max(q);
            }
        }
        Ok(HolderEstimate { sup, seminorm, alpha })
    }
}
