//! Sweep of area densities onto the circle: `(𝒯G)(ζ) = ∫_𝔻 P_z(ζ) G(z) da(z)`.
//!
//! Two independent routes are provided.  The production route works mode by
//! mode: writing `G(re^{iθ}) = Σ_n g_n(r) e^{inθ}`, the Poisson kernel is
//! diagonal on angular modes and
//!
//! ```text
//! (𝒯G)^(n) = ∫_0^1 g_n(r) r^{|n|} 2r dr ≈ Σ_j w_j r_j^{|n|} g_n(r_j).
//! ```
//!
//! The oracle route, `balayage_bruteforce`, evaluates the kernel integral by
//! raw quadrature.  Its one subtlety: Gauss–Legendre radii come within ~3e-4
//! of the circle, where the kernel has angular bandwidth in the tens of
//! thousands, so an honest trapezoid sum needs far more angles than the field
//! grid carries.  The rows are therefore resampled (an exact operation for
//! band-limited rows) onto an internally chosen fine grid before summation.

use crate::error::{Error, Result};
use crate::fft::{bin, fft_forward, fft_inverse};
use crate::fourier::TrigPolynomial;
use crate::grid::{gauss_legendre, PolarField, PolarGrid};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Harmonic extension of boundary data into the disk, sampled on the grid:
/// `P[h](re^{iθ}) = Σ_n ĥ(n) r^{|n|} e^{inθ}`.
pub fn poisson_extend(h: &TrigPolynomial, grid: &Arc<PolarGrid>) -> Result<PolarField> {
    let m = grid.angles();
    if h.n_max() > grid.mode_capacity() {
        return Err(Error::Resolution(format!(
            "band {} does not fit on {m} angles (capacity {})",
            h.n_max(),
            grid.mode_capacity()
        )));
    }
    let mut values = ndarray::Array2::from_elem((grid.nr(), m), Complex64::ZERO);
    let mut buf = vec![Complex64::ZERO; m];
    for (j, &r) in grid.radii().iter().enumerate() {
        buf.fill(Complex64::ZERO);
        let mut p = 1.0;
        for n in 0..=h.n_max() as i64 {
            buf[bin(n, m)] += h.coeff(n) * p;
            if n > 0 {
                buf[bin(-n, m)] += h.coeff(-n) * p;
            }
            p *= r;
        }
        fft_inverse(&mut buf);
        for (k, &v) in buf.iter().enumerate() {
            values[(j, k)] = v;
        }
    }
    PolarField::from_values(grid, values, h.is_real())
}

/// `𝒯G` through the exact mode-diagonal rule; spectrally accurate for fields
/// whose angular content fits on the grid.
pub fn balayage(field: &PolarField, n_max: usize) -> Result<TrigPolynomial> {
    let grid = field.grid();
    let m = grid.angles();
    if n_max > grid.mode_capacity() {
        return Err(Error::Resolution(format!(
            "requested band {n_max} exceeds the grid capacity {}",
            grid.mode_capacity()
        )));
    }
    let mut out = TrigPolynomial::zero(n_max, field.is_real());
    let mut buf = vec![Complex64::ZERO; m];
    let scale = 1.0 / m as f64;
    for (j, row) in field.values().outer_iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            buf[k] = v;
        }
        fft_forward(&mut buf);
        let (r, w) = (grid.radii()[j], grid.weights()[j]);
        let mut p = w; // w_j r_j^{|n|}
        for n in 0..=n_max as i64 {
            let c = out.coeff(n) + buf[bin(n, m)] * scale * p;
            out.set_coeff(n, c)?;
            if n > 0 {
                let c = out.coeff(-n) + buf[bin(-n, m)] * scale * p;
                out.set_coeff(-n, c)?;
            }
            p *= r;
        }
    }
    if field.is_real() {
        out.resymmetrize();
    }
    Ok(out)
}

/// `K = 𝒯 ∘ P`: sweep the harmonic extension of `h` back to the circle.
/// Diagonal on Fourier modes with eigenvalue `1/(|n|+1)`.
pub fn operator_k(h: &TrigPolynomial, grid: &Arc<PolarGrid>) -> Result<TrigPolynomial> {
    balayage(&poisson_extend(h, grid)?, h.n_max().min(grid.mode_capacity()))
}

/// Fine angle count needed so that trapezoid sums of `P_r(·) × (band ≤ n_band)`
/// alias below ~1e-12 at every grid radius.
fn fine_angles(radii: &[f64], n_band: usize) -> usize {
    let r_top = radii.iter().cloned().fold(0.0, f64::max);
    // aliased kernel mass beyond frequency d is ≲ 2 r^d / (1 - r)
    let d = if r_top <= 0.0 {
        1.0
    } else {
        (2.0 / (1e-12 * (1.0 - r_top))).ln() / -r_top.ln()
    };
    let mut m = 64usize;
    while (m as f64) < d + 2.0 * n_band as f64 {
        m *= 2;
    }
    m
}

/// Resample one band-limited row from `m` to `m_f >= m` angles (zero-padded
/// FFT interpolation; exact below the Nyquist mode, Nyquist split evenly).
fn resample_row(row: &[Complex64], m_f: usize) -> Vec<Complex64> {
    let m = row.len();
    let mut spec = row.to_vec();
    fft_forward(&mut spec);
    let scale = 1.0 / m as f64;
    let mut fine = vec![Complex64::ZERO; m_f];
    let half = m / 2;
    for n in -(half as i64)..=half as i64 {
        let src = spec[bin(n, m)] * scale;
        if m % 2 == 0 && n.unsigned_abs() as usize == half {
            fine[bin(n, m_f)] += 0.5 * src;
        } else if n.unsigned_abs() as usize <= (m - 1) / 2 {
            fine[bin(n, m_f)] = src;
        }
    }
    fft_inverse(&mut fine);
    fine
}

/// Brute-force `𝒯G` at `m_out` equispaced boundary angles, by direct Poisson
/// kernel quadrature on an internally refined angular grid.  `m_out` must be
/// a power of two.  Refuses workloads beyond ~1e9 kernel evaluations.
pub fn balayage_bruteforce(field: &PolarField, m_out: usize) -> Result<Vec<Complex64>> {
    let grid = field.grid();
    if !m_out.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "output angle count must be a power of two, got {m_out}"
        )));
    }
    let m_f = fine_angles(grid.radii(), grid.angles() / 2).max(grid.angles()).max(m_out);
    let cost = grid.nr() as u64 * m_f as u64 * m_out as u64;
    if cost > 1_000_000_000 {
        return Err(Error::WorkloadRefused(format!(
            "{} × {m_f} × {m_out} ≈ {cost:.1e} kernel evaluations; \
             reduce the output angles or use the spectral route",
            grid.nr()
        )));
    }
    let cos_table: Vec<f64> = (0..m_f).map(|k| (2.0 * PI * k as f64 / m_f as f64).cos()).collect();
    let stride = m_f / m_out;
    let mask = m_f - 1;
    let mut out = vec![Complex64::ZERO; m_out];
    let mut row_fine = Vec::new();
    for (j, row) in field.values().outer_iter().enumerate() {
        let row: Vec<Complex64> = row.iter().cloned().collect();
        row_fine.clear();
        row_fine.extend(resample_row(&row, m_f));
        let r = grid.radii()[j];
        let (num, den0, den1) = (1.0 - r * r, 1.0 + r * r, 2.0 * r);
        let w = grid.weights()[j] / m_f as f64;
        for (s, acc) in out.iter_mut().enumerate() {
            let off = s * stride;
            let mut sum = Complex64::ZERO;
            for (k, &g) in row_fine.iter().enumerate() {
                let kernel = num / (den0 - den1 * cos_table[(k.wrapping_sub(off)) & mask]);
                sum += kernel * g;
            }
            *acc += w * sum;
        }
    }
    Ok(out)
}

/// Both sides of the duality `∫_𝕋 (𝒯G) h dm = ∫_𝔻 G P[h] da` (a bilinear
/// pairing, no conjugation): the left side from the mode-diagonal balayage,
/// the right from grid quadrature of the harmonic extension.
pub fn fubini_check(h: &TrigPolynomial, field: &PolarField) -> Result<(Complex64, Complex64)> {
    let extension = poisson_extend(h, field.grid())?;
    let disk_side = extension.mul_pointwise(field)?.integral();
    let swept = balayage(field, h.n_max())?;
    let circle_side: Complex64 =
        h.iter_modes().map(|(n, c)| c * swept.coeff(-n)).sum();
    Ok((circle_side, disk_side))
}

/// One term of the harmonic moment identity `∫_𝔻 z^n P_z(ζ) da(z) = ζ^n/(n+1)`:
/// returns `(quadrature value, ζ^n/(n+1))`.  The quadrature side uses its own
/// Gauss–Legendre rule with `nr` radii and a kernel-resolving fine angle count,
/// fully independent of the spectral machinery.
pub fn poisson_moment(n: u32, zeta: Complex64, nr: usize) -> (Complex64, Complex64) {
    let values = poisson_moment_batch(&[n], zeta, nr);
    values[0]
}

/// Batched version of [`poisson_moment`]: all requested powers share one
/// sweep over the kernel quadrature.
pub fn poisson_moment_batch(ns: &[u32], zeta: Complex64, nr: usize) -> Vec<(Complex64, Complex64)> {
    let zeta = zeta / zeta.norm();
    let t0 = zeta.arg();
    let (x, gl_w) = gauss_legendre(nr);
    let radii: Vec<f64> = x.iter().map(|&x| 0.5 * (x + 1.0)).collect();
    let weights: Vec<f64> = gl_w.iter().zip(&radii).map(|(&w, &r)| w * r).collect();
    let n_top = ns.iter().cloned().max().unwrap_or(0) as usize;
    let m_f = fine_angles(&radii, n_top);
    let mut acc = vec![Complex64::ZERO; n_top + 1];
    for (j, &r) in radii.iter().enumerate() {
        let (num, den0, den1) = (1.0 - r * r, 1.0 + r * r, 2.0 * r);
        let w = weights[j] / m_f as f64;
        for k in 0..m_f {
            let t = 2.0 * PI * k as f64 / m_f as f64;
            let kernel = w * num / (den0 - den1 * (t - t0).cos());
            // accumulate kernel · z^n for every retained power at once
            let u = r * Complex64::cis(t);
            let mut z_pow = Complex64::new(kernel, 0.0);
            acc[0] += z_pow;
            for a in acc.iter_mut().skip(1) {
                z_pow *= u;
                *a += z_pow;
            }
        }
    }
    ns.iter()
        .map(|&n| {
            let analytic = zeta.powu(n) / (n as f64 + 1.0);
            (acc[n as usize], analytic)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<PolarGrid> {
        PolarGrid::new(24, 64)
    }

    #[test]
    fn poisson_extension_of_single_mode() {
        let h = TrigPolynomial::from_modes(4, &[(4, Complex64::new(0.5, 0.0))], true).unwrap();
        let g = grid();
        let field = poisson_extend(&h, &g).unwrap();
        for (j, &r) in g.radii().iter().enumerate() {
            for k in 0..g.angles() {
                let expect = r.powi(4) * (4.0 * g.angle(k)).cos();
                assert!((field.values()[(j, k)].re - expect).abs() < 1e-13);
                assert!(field.values()[(j, k)].im.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn balayage_of_unit_density_is_one() {
        let field = PolarField::constant(&grid(), 1.0);
        let swept = balayage(&field, 16).unwrap();
        assert!((swept.coeff(0).re - 1.0).abs() < 1e-14);
        for n in 1..=16 {
            assert!(swept.coeff(n).norm() < 1e-15, "mode {n}");
        }
    }

    #[test]
    fn balayage_of_polynomial_density_in_closed_form() {
        // G = r^4 e^{4iθ}: (𝒯G)^(4) = ∫ r^4 · r^4 2r dr = 1/5
        let field = PolarField::from_fn(&grid(), false, |r, t| {
            r.powi(4) * Complex64::cis(4.0 * t)
        });
        let swept = balayage(&field, 8).unwrap();
        assert!((swept.coeff(4) - 0.2).norm() < 1e-14);
        for n in -8..=8i64 {
            if n != 4 {
                assert!(swept.coeff(n).norm() < 1e-14, "mode {n}");
            }
        }
    }

    #[test]
    fn operator_k_eigenvalues() {
        let g = grid();
        for n in [0i64, 1, 4, 8, 16, 31] {
            let h = TrigPolynomial::from_modes(n.unsigned_abs() as usize, &[(n, Complex64::ONE)], false)
                .unwrap();
            let kh = operator_k(&h, &g).unwrap();
            let lambda = 1.0 / (n.abs() as f64 + 1.0);
            assert!((kh.coeff(n) - lambda).norm() < 1e-13, "mode {n}");
            for m in -(n + 2)..=(n + 2) {
                if m != n {
                    assert!(kh.coeff(m).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn fubini_pairing_closed_form() {
        // h = cos 4t, G = r^4 cos 4θ: both pairings equal 1/10
        let h = TrigPolynomial::from_modes(4, &[(4, Complex64::new(0.5, 0.0))], true).unwrap();
        let field = PolarField::from_fn(&grid(), true, |r, t| {
            Complex64::new(r.powi(4) * (4.0 * t).cos(), 0.0)
        });
        let (circle, disk) = fubini_check(&h, &field).unwrap();
        assert!((circle.re - 0.1).abs() < 1e-14, "circle side {circle}");
        assert!((disk.re - 0.1).abs() < 1e-14, "disk side {disk}");
        assert!((circle - disk).norm() < 1e-14);
    }

    #[test]
    fn bruteforce_matches_diagonal_route_on_smooth_data() {
        let g = grid();
        let field = PolarField::from_fn(&g, true, |r, t| {
            Complex64::new(1.0 + 0.5 * r.powi(4) * (4.0 * t).cos() + 0.25 * r * r * (2.0 * t).sin(), 0.0)
        });
        let swept = balayage(&field, g.mode_capacity()).unwrap();
        let m_out = 8;
        let brute = balayage_bruteforce(&field, m_out).unwrap();
        let reference = swept.sample(g.angles()).unwrap();
        let stride = g.angles() / m_out;
        for (s, &b) in brute.iter().enumerate() {
            assert!((b - reference[s * stride]).norm() < 1e-10, "angle {s}: {b} vs {}", reference[s * stride]);
        }
    }

    #[test]
    fn bruteforce_of_unit_density() {
        let field = PolarField::constant(&grid(), 1.0);
        for v in balayage_bruteforce(&field, 4).unwrap() {
            assert!((v.re - 1.0).abs() < 1e-10 && v.im.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn bruteforce_refuses_unreasonable_workloads() {
        let g = PolarGrid::new(256, 4096);
        let field = PolarField::constant(&g, 1.0);
        assert!(matches!(
            balayage_bruteforce(&field, 256),
            Err(Error::WorkloadRefused(_))
        ));
    }

    #[test]
    fn moment_identity_at_low_order() {
        let zeta = Complex64::cis(0.7);
        for n in [0u32, 1, 2, 5] {
            let (quad, analytic) = poisson_moment(n, zeta, 24);
            assert!((quad - analytic).norm() < 1e-10, "n={n}: {quad} vs {analytic}");
        }
    }

    #[test]
    fn resample_preserves_band_limited_rows() {
        let m = 16;
        let row: Vec<Complex64> = (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                Complex64::new((3.0 * t).cos() + 0.5, (5.0 * t).sin())
            })
            .collect();
        let fine = resample_row(&row, 64);
        for k in 0..64 {
            let t = 2.0 * PI * k as f64 / 64.0;
            let expect = Complex64::new((3.0 * t).cos() + 0.5, (5.0 * t).sin());
            assert!((fine[k] - expect).norm() < 1e-13);
        }
    }
}
