//! Synthesis of the conformal map `f = ∫ e^{−F}` from boundary data, and its
//! geometric interrogation: Jacobian cross-checks, the Nehari–Schwarzian
//! univalence gauge, boundary polyline simplicity, area/contour moments, and
//! the deformation moment curve.

use crate::balayage::poisson_extend;
use crate::error::{Error, Result};
use crate::fourier::TrigPolynomial;
use crate::grid::{PolarField, PolarGrid};
use crate::measure::{herglotz_coeffs, MeasureSpec};
use crate::series::PowerSeries;
use crate::solver::{BranchPoint, SolveMode};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Truncated Taylor exponential `e^{−F}` (free-function form of
/// [`PowerSeries::exp_neg`]).
pub fn exp_neg_series(f: &PowerSeries) -> PowerSeries {
    f.exp_neg()
}

/// Termwise antiderivative vanishing at 0 (free-function form of
/// [`PowerSeries::integrate`]).
pub fn integrate_series(g: &PowerSeries) -> PowerSeries {
    g.integrate()
}

/// A synthesized map together with the data that produced it.
#[derive(Debug, Clone)]
pub struct ConformalMapRecord {
    pub mode: SolveMode,
    pub a: f64,
    /// Solved boundary log-density part (the `X⁴` unknown).
    pub w: TrigPolynomial,
    pub measure: MeasureSpec,
    /// Branch constant `log C(a)`.
    pub log_c: f64,
    /// Herglotz series `F` of `ν = W dm + a dμ`.
    pub herglotz: PowerSeries,
    /// `f' = e^{−F}`.
    pub fprime: PowerSeries,
    /// `f = ∫_0^z f'`.
    pub f: PowerSeries,
}

impl ConformalMapRecord {
    /// The identity map of the unit disk (the `a = 0` anchor of any branch).
    pub fn unit_disk(mode: SolveMode, n_s: usize) -> Self {
        let measure = MeasureSpec::riesz_product(0, 8).expect("static band is wide enough");
        let w = TrigPolynomial::zero(8, true);
        let herglotz = PowerSeries::zeros(n_s + 1);
        let fprime = herglotz.exp_neg();
        let f = fprime.integrate();
        Self { mode, a: 0.0, w, measure, log_c: 0.0, herglotz, fprime, f }
    }

    /// Series truncation order `N_s`.
    pub fn n_s(&self) -> usize {
        self.herglotz.len() - 1
    }

    /// The boundary log-weight `L` in the record's mode convention.
    pub fn log_weight(&self) -> TrigPolynomial {
        match self.mode {
            SolveMode::Singular => self.w.clone(),
            SolveMode::Consistent => {
                self.w.add_scaled(self.measure.coeffs(), Complex64::new(self.a, 0.0))
            }
        }
    }

    /// Boundary density samples `σ = e^{−L}` at `m` uniform angles.
    pub fn sigma_samples(&self, m: usize) -> Vec<f64> {
        self.log_weight()
            .sample_real(m.max(2 * self.w.n_max().max(self.measure.coeffs().n_max()) + 1))
            .expect("sample count clamped above the band")
            .into_iter()
            .map(|v| (-v).exp())
            .collect()
    }

    /// Quadrature constant `c = C/2` carried by the record.
    pub fn c_small(&self) -> f64 {
        0.5 * self.log_c.exp()
    }
}

/// Build the map attached to an accepted branch point: Herglotz series of
/// `ν = W dm + a dμ`, exponential, antiderivative.  Errors if the series
/// truncation cannot hold the spectrum (tail monitor).
pub fn build_map(
    point: &BranchPoint,
    mode: SolveMode,
    measure: &MeasureSpec,
    n_s: usize,
    tail_tol: f64,
) -> Result<ConformalMapRecord> {
    let nu = point.w.add_scaled(measure.coeffs(), Complex64::new(point.a, 0.0));
    let herglotz = herglotz_coeffs(&nu, n_s + 1);
    let fprime = herglotz.exp_neg();
    fprime.require_resolved(tail_tol)?;
    let f = fprime.integrate();
    Ok(ConformalMapRecord {
        mode,
        a: point.a,
        w: point.w.clone(),
        measure: measure.clone(),
        log_c: point.log_c,
        herglotz,
        fprime,
        f,
    })
}

/// Max over the grid of `| |f'(z)|² − exp(−2(P[W]+aP[μ])) |`: the two
/// independent routes to the interior Jacobian density.
pub fn jacobian_crosscheck(rec: &ConformalMapRecord, grid: &Arc<PolarGrid>) -> Result<f64> {
    let series_side = rec.fprime.eval_grid(grid);
    let pw = poisson_extend(&rec.w, grid)?;
    let pmu = poisson_extend(rec.measure.coeffs(), grid)?;
    let exponent = pw.add_scaled(&pmu, rec.a)?;
    let mut worst = 0.0f64;
    for (s, e) in series_side.values().iter().zip(exponent.values().iter()) {
        let direct = (-2.0 * e.re).exp();
        worst = worst.max((s.norm_sqr() - direct).abs());
    }
    Ok(worst)
}

/// Sup over the grid of `(1−|z|²)² |S_f(z)|` where the Schwarzian of
/// `f' = e^{−F}` reduces to `S_f = −F″ − ½(F′)²` (from `f″/f′ = −F′`).
/// Values at most 2 certify univalence (Nehari gauge).
pub fn schwarzian_sup(rec: &ConformalMapRecord, grid: &Arc<PolarGrid>) -> f64 {
    let f1 = rec.herglotz.derivative();
    let f2 = f1.derivative();
    let d1 = f1.eval_grid(grid);
    let d2 = f2.eval_grid(grid);
    let mut worst = 0.0f64;
    for ((j, k), &v1) in d1.values().indexed_iter() {
        let r = grid.radii()[j];
        let s = -d2.values()[(j, k)] - 0.5 * v1 * v1;
        let gauge = (1.0 - r * r).powi(2) * s.norm();
        worst = worst.max(gauge);
    }
    worst
}

#[derive(Debug, Clone)]
pub struct UnivalenceReport {
    pub simple: bool,
    /// Sample-index pairs of crossing segments (capped at 16 entries).
    pub crossings: Vec<(usize, usize)>,
    /// Min of |f'| over the boundary samples (nonvanishing by construction;
    /// recorded as a conditioning diagnostic).
    pub min_fprime: f64,
}

/// Test the boundary polyline `f(e^{it_j})`, `j < m_b`, for self-intersection
/// among non-adjacent segments.
pub fn univalence_check(rec: &ConformalMapRecord, m_b: usize) -> Result<UnivalenceReport> {
    if m_b < 8 * rec.n_s() {
        return Err(Error::Resolution(format!(
            "{m_b} boundary samples under-resolve a series of order {}; need at least {}",
            rec.n_s(),
            8 * rec.n_s()
        )));
    }
    let pts = rec.f.eval_circle(1.0, m_b);
    let min_fprime = rec
        .fprime
        .eval_circle(1.0, m_b)
        .iter()
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min);
    let crossings = polyline_self_intersections(&pts, 16);
    Ok(UnivalenceReport { simple: crossings.is_empty(), crossings, min_fprime })
}

/// All pairs (up to `cap`) of non-adjacent segments of the closed polyline
/// through `pts` that properly intersect or overlap.
pub fn polyline_self_intersections(pts: &[Complex64], cap: usize) -> Vec<(usize, usize)> {
    let n = pts.len();
    let mut hits = Vec::new();
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let mut boxes = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = seg(i);
        boxes.push((a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im)));
    }
    'outer: for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue; // closing segment is adjacent to the first
            }
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segments_cross(a, b, c, d) {
                hits.push((i, j));
                if hits.len() >= cap {
                    break 'outer;
                }
            }
        }
    }
    hits
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // collinear overlap: project on the dominant axis
    let on = |p: Complex64, q: Complex64, r: Complex64| {
        r.re >= p.re.min(q.re) && r.re <= p.re.max(q.re) && r.im >= p.im.min(q.im) && r.im <= p.im.max(q.im)
    };
    (d1 == 0.0 && on(a, b, c))
        || (d2 == 0.0 && on(a, b, d))
        || (d3 == 0.0 && on(c, d, a))
        || (d4 == 0.0 && on(c, d, b))
}

#[derive(Debug, Clone)]
pub struct GeometryReport {
    /// Area from the coefficient identity `|Ω| = π Σ k |f_k|²`.
    pub area: f64,
    /// Arclength in the record's weight convention: `2π · mean(e^{−L})`.
    pub perimeter: f64,
    /// Arclength of the truncated series boundary: `2π · mean |f'(e^{it})|`.
    pub perimeter_truncated: f64,
    pub centroid: Complex64,
    pub radius_mean: f64,
    pub radius_std: f64,
    /// `radius_std / radius_mean`; zero exactly for centred disks.
    pub circularity_deficit: f64,
}

/// Geometric summary from series coefficients and boundary samples.
pub fn geometry(rec: &ConformalMapRecord) -> GeometryReport {
    let m_b = (4 * rec.n_s()).max(4096);
    let area: f64 = PI
        * rec
            .f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c.norm_sqr())
            .sum::<f64>();
    let sigma = rec.sigma_samples(m_b);
    let perimeter = 2.0 * PI * sigma.iter().sum::<f64>() / sigma.len() as f64;
    let fp_b = rec.fprime.eval_circle(1.0, m_b);
    let perimeter_truncated =
        2.0 * PI * fp_b.iter().map(|v| v.norm()).sum::<f64>() / m_b as f64;
    let centroid = moments_contour(rec, 1, m_b) / area;
    let f_b = rec.f.eval_circle(1.0, m_b);
    let radii: Vec<f64> = f_b.iter().map(|&v| (v - centroid).norm()).collect();
    let radius_mean = radii.iter().sum::<f64>() / m_b as f64;
    let radius_std = (radii.iter().map(|r| (r - radius_mean).powi(2)).sum::<f64>() / m_b as f64).sqrt();
    GeometryReport {
        area,
        perimeter,
        perimeter_truncated,
        centroid,
        radius_mean,
        radius_std,
        circularity_deficit: if radius_mean > 0.0 { radius_std / radius_mean } else { 0.0 },
    }
}

/// Area by grid quadrature of the Jacobian, `π ∫_𝔻 |f'|² da` — the
/// independent cross-check of the coefficient identity.
pub fn area_grid(rec: &ConformalMapRecord, grid: &Arc<PolarGrid>) -> f64 {
    let fp = rec.fprime.eval_grid(grid);
    PI * fp.map(true, |v| Complex64::new(v.norm_sqr(), 0.0)).integral().re
}

/// `∫_Ω z^n dA` for `n = 0..=n_top` by interior quadrature:
/// `π ∫_𝔻 f(z)^n |f'(z)|² da(z)`.
pub fn moments_area_batch(
    rec: &ConformalMapRecord,
    n_top: usize,
    grid: &Arc<PolarGrid>,
) -> Vec<Complex64> {
    let f_field = rec.f.eval_grid(grid);
    let fp = rec.fprime.eval_grid(grid);
    let jac = fp.map(true, |v| Complex64::new(v.norm_sqr(), 0.0));
    let mut power = jac.clone();
    let mut out = Vec::with_capacity(n_top + 1);
    out.push(PI * power.integral());
    for _ in 1..=n_top {
        power = power.mul_pointwise(&f_field).expect("same grid");
        out.push(PI * power.integral());
    }
    out
}

pub fn moments_area(rec: &ConformalMapRecord, n: usize, grid: &Arc<PolarGrid>) -> Complex64 {
    moments_area_batch(rec, n, grid).pop().expect("batch is nonempty")
}

/// `∫_Ω z^n dA` by the Green's-formula contour route,
/// `(1/2i) ∮ f^n conj(f) df`, trapezoid over `m_b` uniform angles.
pub fn moments_contour(rec: &ConformalMapRecord, n: usize, m_b: usize) -> Complex64 {
    let f_b = rec.f.eval_circle(1.0, m_b);
    let fp_b = rec.fprime.eval_circle(1.0, m_b);
    let mut acc = Complex64::ZERO;
    for j in 0..m_b {
        let tangent = Complex64::cis(2.0 * PI * j as f64 / m_b as f64);
        acc += f_b[j].powu(n as u32) * f_b[j].conj() * fp_b[j] * tangent;
    }
    // (1/2i)·(i e^{it} dt) = (1/2) e^{it} dt; trapezoid step 2π/m_b
    acc * PI / m_b as f64
}

#[derive(Debug, Clone)]
pub struct MomentCurve {
    pub n: u32,
    /// `(a, M_n(a))` pairs.
    pub values: Vec<(f64, Complex64)>,
    /// Central-difference estimate of `M_n'(0)` and the step used.
    pub derivative_fd: Complex64,
    pub fd_step: f64,
    /// `−2·μ̂(−n)/(n+1)`.
    pub derivative_analytic: Complex64,
}

/// The deformation moment curve `M_n(a) = ∫_𝔻 z^n e^{−2aP[μ]} da(z)` on a
/// parameter list, with its derivative at 0 by central differences against
/// the closed-form comparator.
pub fn moment_curve(
    measure: &MeasureSpec,
    n: u32,
    a_list: &[f64],
    grid: &Arc<PolarGrid>,
) -> Result<MomentCurve> {
    if n == 0 {
        return Err(Error::InvalidInput("moment order must be at least 1".into()));
    }
    let pmu = poisson_extend(measure.coeffs(), grid)?;
    let zn = PolarField::from_fn(grid, false, |r, t| {
        Complex64::from_polar(r.powi(n as i32), n as f64 * t)
    });
    let eval = |a: f64| -> Complex64 {
        let damped = pmu.map(true, |v| Complex64::new((-2.0 * a * v.re).exp(), 0.0));
        zn.mul_pointwise(&damped).expect("same grid").integral()
    };
    let values: Vec<(f64, Complex64)> = a_list.iter().map(|&a| (a, eval(a))).collect();
    let fd_step = a_list
        .iter()
        .cloned()
        .filter(|&a| a > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(1e-3);
    let derivative_fd = (eval(fd_step) - eval(-fd_step)) / (2.0 * fd_step);
    let derivative_analytic = -2.0 * measure.fourier(-(n as i64)) / (n as f64 + 1.0);
    Ok(MomentCurve { n, values, derivative_fd, fd_step, derivative_analytic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::BranchPoint;

    fn synthetic_point(w: TrigPolynomial, a: f64, log_c: f64) -> BranchPoint {
        BranchPoint {
            a,
            w,
            log_c,
            residual: 0.0,
            contraction_est: 0.0,
            holder_seminorm: 0.0,
            projection_drift: 0.0,
            iterations: 0,
        }
    }

    fn polyline_of(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
        PowerSeries::new(coeffs.to_vec()).eval_circle(1.0, m)
    }

    #[test]
    fn exp_neg_series_pointwise_oracle() {
        // F = z⁴: |e^{−F}| on |z| = 0.9 equals exp(−Re(0.9⁴ e^{4iθ}))
        let mut f = PowerSeries::zeros(64);
        f.set_coeff(4, Complex64::ONE);
        let g = exp_neg_series(&f);
        for k in 0..16 {
            let t = 2.0 * PI * k as f64 / 16.0;
            let z = 0.9 * Complex64::cis(t);
            let expect = (-(0.9f64.powi(4) * (4.0 * t).cos())).exp();
            assert!((g.eval(z).norm() - expect).abs() < 1e-12, "θ index {k}");
        }
    }

    #[test]
    fn build_map_at_zero_is_the_identity() {
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        let point = synthetic_point(TrigPolynomial::zero(8, true), 0.0, 0.0);
        let rec = build_map(&point, SolveMode::Singular, &mu, 32, 1e-10).unwrap();
        assert!((rec.f.coeff(1) - Complex64::ONE).norm() < 1e-15);
        for k in [0usize, 2, 3, 4, 5, 10] {
            assert!(rec.f.coeff(k).norm() < 1e-15, "f_{k}");
        }
    }

    #[test]
    fn build_map_consistent_collapse_is_a_scaled_disk() {
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        for &a in &[0.01, 0.05] {
            let mut w = TrigPolynomial::zero(8, true);
            w.set_coeff(4, Complex64::new(-a / 2.0, 0.0)).unwrap();
            w.set_coeff(-4, Complex64::new(-a / 2.0, 0.0)).unwrap();
            let point = synthetic_point(w, a, -a);
            let rec = build_map(&point, SolveMode::Consistent, &mu, 64, 1e-10).unwrap();
            let rho = (-a).exp();
            assert!((rec.f.coeff(1).re - rho).abs() < 1e-14, "a={a}");
            for k in [0usize, 2, 3, 4, 5, 9, 13] {
                assert!(rec.f.coeff(k).norm() < 1e-14, "a={a}, f_{k}");
            }
        }
    }

    #[test]
    fn build_map_first_off_disk_coefficient() {
        // F₄ = 2(Ŵ(4) + a·μ̂(4)) and the recurrence gives f₅ = −F₄ e^{−F₀}/5
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        let a = 1e-2;
        let w4 = 3.4e-3;
        let mut w = TrigPolynomial::zero(8, true);
        w.set_coeff(4, Complex64::new(w4, 0.0)).unwrap();
        w.set_coeff(-4, Complex64::new(w4, 0.0)).unwrap();
        let point = synthetic_point(w, a, 0.0);
        let rec = build_map(&point, SolveMode::Singular, &mu, 64, 1e-10).unwrap();
        let f4 = 2.0 * (w4 + a * 0.5);
        let expect = -f4 * (-a).exp() / 5.0; // F₀ = a·(mass of μ), so g₀ = e^{−a}
        assert!((rec.f.coeff(5).re - expect).abs() < 1e-15);
        assert!(rec.f.coeff(5).norm() > 1e-4, "first non-disk mode must be active");
    }

    #[test]
    fn equivariance_holds_structurally() {
        let mu = MeasureSpec::riesz_product(1, 16).unwrap();
        let mut w = TrigPolynomial::zero(16, true);
        w.set_coeff(4, Complex64::new(0.02, 0.01)).unwrap();
        w.set_coeff(-4, Complex64::new(0.02, -0.01)).unwrap();
        w.set_coeff(8, Complex64::new(-0.01, 0.0)).unwrap();
        w.set_coeff(-8, Complex64::new(-0.01, 0.0)).unwrap();
        let point = synthetic_point(w, 0.05, 0.0);
        let rec = build_map(&point, SolveMode::Singular, &mu, 128, 1e-8).unwrap();
        assert!(rec.f.equivariance_defect() <= 1e-13);
    }

    #[test]
    fn jacobian_crosscheck_zero_at_identity() {
        let rec = ConformalMapRecord::unit_disk(SolveMode::Singular, 16);
        let grid = PolarGrid::new(8, 32);
        assert_eq!(jacobian_crosscheck(&rec, &grid).unwrap(), 0.0);
    }

    #[test]
    fn schwarzian_vanishes_for_linear_maps() {
        let rec = ConformalMapRecord::unit_disk(SolveMode::Singular, 16);
        let grid = PolarGrid::new(8, 32);
        assert_eq!(schwarzian_sup(&rec, &grid), 0.0);

        // constant F (linear map e^{−c}z) also has zero Schwarzian
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        let mut w = TrigPolynomial::zero(8, true);
        w.set_coeff(4, Complex64::new(-0.05, 0.0)).unwrap();
        w.set_coeff(-4, Complex64::new(-0.05, 0.0)).unwrap();
        let point = synthetic_point(w, 0.1, -0.1);
        let rec = build_map(&point, SolveMode::Consistent, &mu, 32, 1e-10).unwrap();
        assert!(schwarzian_sup(&rec, &grid) < 1e-14);
    }

    #[test]
    fn polyline_simplicity_of_quadratic_maps() {
        let m = 512;
        let id = polyline_of(&[Complex64::ZERO, Complex64::ONE], m);
        assert!(polyline_self_intersections(&id, 4).is_empty());

        // |a₂| < 1/2: boundary curve stays simple
        let tame = polyline_of(
            &[Complex64::ZERO, Complex64::ONE, Complex64::new(0.45, 0.0)],
            m,
        );
        assert!(polyline_self_intersections(&tame, 4).is_empty());

        // |a₂| > 1/2: limaçon with an inner loop
        let loopy = polyline_of(
            &[Complex64::ZERO, Complex64::ONE, Complex64::new(0.9, 0.0)],
            m,
        );
        assert!(!polyline_self_intersections(&loopy, 4).is_empty());

        let wild = polyline_of(&[Complex64::ZERO, Complex64::ONE, Complex64::new(2.0, 0.0)], m);
        assert!(!polyline_self_intersections(&wild, 4).is_empty());
    }

    #[test]
    fn univalence_check_enforces_sampling_and_passes_the_disk() {
        let rec = ConformalMapRecord::unit_disk(SolveMode::Singular, 64);
        assert!(matches!(univalence_check(&rec, 256), Err(Error::Resolution(_))));
        let report = univalence_check(&rec, 512).unwrap();
        assert!(report.simple);
        assert!((report.min_fprime - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geometry_of_the_disk() {
        let rec = ConformalMapRecord::unit_disk(SolveMode::Singular, 64);
        let g = geometry(&rec);
        assert!((g.area - PI).abs() < 1e-12);
        assert!((g.perimeter - 2.0 * PI).abs() < 1e-12);
        assert!((g.perimeter_truncated - 2.0 * PI).abs() < 1e-12);
        assert!(g.centroid.norm() < 1e-14);
        assert!((g.radius_mean - 1.0).abs() < 1e-13);
        assert!(g.circularity_deficit < 1e-13);
    }

    #[test]
    fn geometry_of_the_scaled_disk() {
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        let a = 0.07;
        let mut w = TrigPolynomial::zero(8, true);
        w.set_coeff(4, Complex64::new(-a / 2.0, 0.0)).unwrap();
        w.set_coeff(-4, Complex64::new(-a / 2.0, 0.0)).unwrap();
        let point = synthetic_point(w, a, -a);
        let rec = build_map(&point, SolveMode::Consistent, &mu, 64, 1e-10).unwrap();
        let g = geometry(&rec);
        let rho = (-a).exp();
        assert!((g.area - PI * rho * rho).abs() < 1e-12);
        // consistent-mode σ = e^{−L} with L ≡ a on the collapsed branch
        assert!((g.perimeter - 2.0 * PI * rho).abs() < 1e-12);
        assert!(g.circularity_deficit < 1e-13);
    }

    #[test]
    fn moments_agree_between_routes_for_the_disk() {
        let rec = ConformalMapRecord::unit_disk(SolveMode::Singular, 32);
        let grid = PolarGrid::new(16, 64);
        let area_route = moments_area(&rec, 0, &grid);
        let contour_route = moments_contour(&rec, 0, 2048);
        assert!((area_route.re - PI).abs() < 1e-13);
        assert!((contour_route.re - PI).abs() < 1e-13);
        let m1_area = moments_area(&rec, 1, &grid);
        let m1_contour = moments_contour(&rec, 1, 2048);
        assert!(m1_area.norm() < 1e-14);
        assert!(m1_contour.norm() < 1e-14);
    }

    #[test]
    fn area_formula_matches_grid_quadrature() {
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        let mut w = TrigPolynomial::zero(8, true);
        w.set_coeff(4, Complex64::new(0.01, -0.004)).unwrap();
        w.set_coeff(-4, Complex64::new(0.01, 0.004)).unwrap();
        let point = synthetic_point(w, 0.02, 0.0);
        let rec = build_map(&point, SolveMode::Singular, &mu, 128, 1e-10).unwrap();
        let grid = PolarGrid::new(48, 256);
        let g = geometry(&rec);
        assert!((g.area - area_grid(&rec, &grid)).abs() < 1e-9);
    }

    #[test]
    fn moment_curve_identities() {
        let mu = MeasureSpec::riesz_product(0, 8).unwrap();
        let grid = PolarGrid::new(32, 128);
        let curve = moment_curve(&mu, 4, &[0.0, 1e-3, 1e-2], &grid).unwrap();
        assert!(curve.values[0].1.norm() < 1e-15, "M₄(0) = 0");
        assert!((curve.derivative_analytic.re + 0.2).abs() < 1e-15);
        assert!((curve.derivative_fd - curve.derivative_analytic).norm() < 1e-6);
        // first-order behavior: M₄(a) ≈ −a/5
        for &(a, v) in &curve.values[1..] {
            assert!((v.re + a / 5.0).abs() < 0.3 * a / 5.0, "a={a}: {v}");
            assert!(v.norm() >= a / 10.0);
        }

        let no_mass = moment_curve(&mu, 2, &[0.0, 1e-2], &grid).unwrap();
        assert!(no_mass.derivative_analytic.norm() < 1e-15);
        assert!(no_mass.derivative_fd.norm() < 1e-10);
        let off_lattice = moment_curve(&mu, 3, &[0.0, 1e-2], &grid).unwrap();
        for (_, v) in off_lattice.values {
            assert!(v.norm() < 1e-14);
        }
    }
}
