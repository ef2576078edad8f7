//! Boundary measures driving the deformation: finite Riesz products on the
//! sparse frequency set `q_k = 4·3^k`, and explicit trigonometric densities.
//!
//! A measure is carried by its Fourier coefficients `μ̂(n)`, stored as a
//! [`TrigPolynomial`].  For a Riesz product of depth `K` the band
//! `|n| <= 2(3^{K+1}-1)` holds *all* nonzero coefficients, so nothing is
//! truncated as long as the cutoff is wide enough; the constructor refuses
//! cutoffs that would clip the product.

use crate::error::{Error, Result};
use crate::fourier::TrigPolynomial;
use crate::series::PowerSeries;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureKind {
    /// `Π_{k=0}^{depth} (1 + cos(4·3^k t)) dm`, a probability measure that is
    /// singular continuous in the infinite-depth limit.
    RieszProduct { depth: u32 },
    /// A measure given directly by finitely many Fourier coefficients.
    Explicit,
}

#[derive(Debug, Clone)]
pub struct MeasureSpec {
    kind: MeasureKind,
    coeffs: TrigPolynomial,
}

/// Largest frequency of the depth-`K` Riesz product: `Σ_k 4·3^k = 2(3^{K+1}-1)`.
pub fn riesz_band(depth: u32) -> usize {
    2 * (3usize.pow(depth + 1) - 1)
}

/// The truncation-free Riesz product of the given depth on a coefficient band
/// of half-width `n_max`.
pub fn riesz_product(depth: u32, n_max: usize) -> Result<MeasureSpec> {
    MeasureSpec::riesz_product(depth, n_max)
}

/// Taylor coefficients of the Herglotz integral of a real measure:
/// `F_0 = μ̂(0)`, `F_k = 2 μ̂(k)` for `k >= 1`, so that `Re F = P[μ]` in 𝔻.
pub fn herglotz_coeffs(coeffs: &TrigPolynomial, len: usize) -> PowerSeries {
    let mut f = PowerSeries::zeros(len.max(1));
    f.set_coeff(0, Complex64::new(coeffs.coeff(0).re, 0.0));
    for k in 1..len {
        f.set_coeff(k, 2.0 * coeffs.coeff(k as i64));
    }
    f
}

impl MeasureSpec {
    pub fn riesz_product(depth: u32, n_max: usize) -> Result<Self> {
        let band = riesz_band(depth);
        if n_max < band {
            return Err(Error::Resolution(format!(
                "depth-{depth} product reaches frequency {band}; cutoff {n_max} would clip it"
            )));
        }
        // multiply out the factors coefficient-wise; frequencies are sparse
        // enough (ratio 3) that no two products collide
        let mut c = vec![Complex64::ZERO; 2 * n_max + 1];
        c[n_max] = Complex64::ONE;
        for k in 0..=depth {
            let q = 4 * 3usize.pow(k);
            let prev = c.clone();
            for (i, &v) in prev.iter().enumerate() {
                if v == Complex64::ZERO {
                    continue;
                }
                c[i - q] += 0.5 * v;
                c[i + q] += 0.5 * v;
            }
        }
        let mut coeffs = TrigPolynomial::zero(n_max, true);
        for (i, &v) in c.iter().enumerate() {
            coeffs.set_coeff(i as i64 - n_max as i64, v)?;
        }
        Ok(Self { kind: MeasureKind::RieszProduct { depth }, coeffs })
    }

    /// Wrap explicitly given coefficients.  They must describe a real measure
    /// supported on frequencies divisible by four (the symmetry the whole
    /// deformation scheme lives on) with positive mass.
    pub fn explicit(coeffs: TrigPolynomial) -> Result<Self> {
        if coeffs.reality_defect() > 1e-12 {
            return Err(Error::InvalidInput(
                "measure coefficients must satisfy c(-n) = conj(c(n))".into(),
            ));
        }
        for (n, c) in coeffs.iter_modes() {
            if n % 4 != 0 && c.norm() > 0.0 {
                return Err(Error::InvalidInput(format!(
                    "measure has mass at frequency {n}; only multiples of 4 are admissible"
                )));
            }
        }
        if coeffs.coeff(0).re <= 0.0 {
            return Err(Error::InvalidInput("measure must have positive mass".into()));
        }
        let mut coeffs = coeffs;
        coeffs.resymmetrize();
        Ok(Self { kind: MeasureKind::Explicit, coeffs })
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Fourier coefficients `μ̂(n)`; doubles as the trigonometric density in
    /// the absolutely continuous reading of the same data.
    pub fn coeffs(&self) -> &TrigPolynomial {
        &self.coeffs
    }

    pub fn fourier(&self, n: i64) -> Complex64 {
        self.coeffs.coeff(n)
    }

    /// Total mass `μ(𝕋) = μ̂(0)`.
    pub fn mass(&self) -> f64 {
        self.coeffs.coeff(0).re
    }

    pub fn herglotz(&self, len: usize) -> PowerSeries {
        herglotz_coeffs(&self.coeffs, len)
    }

    /// Minimum of the coefficient data read as a density, on `m` samples.
    pub fn min_density(&self, m: usize) -> f64 {
        self.coeffs
            .sample_real(m.max(2 * self.coeffs.n_max() + 1))
            .expect("sample count clamped above the band")
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_product_is_one_plus_cos_4t() {
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        assert!((mu.fourier(0).re - 1.0).abs() < 1e-15);
        assert!((mu.fourier(4).re - 0.5).abs() < 1e-15);
        assert!((mu.fourier(-4).re - 0.5).abs() < 1e-15);
        for n in [1i64, 2, 3, 5, 6, 7, 8] {
            assert_eq!(mu.fourier(n), Complex64::ZERO, "mode {n}");
            assert_eq!(mu.fourier(-n), Complex64::ZERO);
        }
        assert_eq!(mu.mass(), 1.0);
    }

    #[test]
    fn depth_one_product_coefficients() {
        // (1 + cos 4t)(1 + cos 12t): frequencies 0,4,8,12,16 with
        // weights 1, 1/2, 1/4, 1/2, 1/4
        let mu = MeasureSpec::riesz_product(1, 16).unwrap();
        let expect = [(0, 1.0), (4, 0.5), (8, 0.25), (12, 0.5), (16, 0.25)];
        for (n, v) in expect {
            assert!((mu.fourier(n).re - v).abs() < 1e-15, "mode {n}");
            assert!((mu.fourier(-n).re - v).abs() < 1e-15);
        }
        for n in [1i64, 2, 3, 5, 6, 7, 9, 10, 11, 13, 14, 15] {
            assert_eq!(mu.fourier(n), Complex64::ZERO, "mode {n}");
        }
    }

    #[test]
    fn band_formula_and_clipping_refusal() {
        assert_eq!(riesz_band(0), 4);
        assert_eq!(riesz_band(1), 16);
        assert_eq!(riesz_band(2), 52);
        assert_eq!(riesz_band(3), 160);
        assert!(matches!(
            MeasureSpec::riesz_product(2, 51),
            Err(Error::Resolution(_))
        ));
        assert!(MeasureSpec::riesz_product(2, 52).is_ok());
    }

    #[test]
    fn riesz_coefficients_are_dyadic_per_representation_weight() {
        // c_m = 2^{-w} when m = Σ ε_k q_k uses w nonzero digits
        let mu = MeasureSpec::riesz_product(2, 52).unwrap();
        assert!((mu.fourier(4 + 12 + 36).re - 0.125).abs() < 1e-15);
        assert!((mu.fourier(36 - 12 - 4).re - 0.125).abs() < 1e-15);
        assert!((mu.fourier(36).re - 0.5).abs() < 1e-15);
        assert!((mu.fourier(36 + 4).re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn density_reading_is_nonnegative() {
        // a product of factors 1 + cos(q t) >= 0
        for depth in 0..=2 {
            let mu = MeasureSpec::riesz_product(depth, riesz_band(depth)).unwrap();
            assert!(mu.min_density(1024) > -1e-12, "depth {depth}");
        }
    }

    #[test]
    fn herglotz_coefficients_double_positive_modes() {
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        let f = mu.herglotz(6);
        assert!((f.coeff(0).re - 1.0).abs() < 1e-15);
        assert!((f.coeff(4).re - 1.0).abs() < 1e-15);
        for k in [1usize, 2, 3, 5] {
            assert_eq!(f.coeff(k), Complex64::ZERO);
        }
    }

    #[test]
    fn explicit_measure_validation() {
        let good = TrigPolynomial::from_modes(
            8,
            &[(0, Complex64::ONE), (4, Complex64::new(0.3, 0.1))],
            true,
        )
        .unwrap();
        assert!(MeasureSpec::explicit(good).is_ok());

        let off_lattice = TrigPolynomial::from_modes(
            8,
            &[(0, Complex64::ONE), (6, Complex64::new(0.3, 0.0))],
            true,
        )
        .unwrap();
        assert!(matches!(MeasureSpec::explicit(off_lattice), Err(Error::InvalidInput(_))));

        let massless = TrigPolynomial::from_modes(8, &[(4, Complex64::new(0.3, 0.0))], true).unwrap();
        assert!(matches!(MeasureSpec::explicit(massless), Err(Error::InvalidInput(_))));
    }
}
