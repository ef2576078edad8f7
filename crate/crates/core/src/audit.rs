//! The rigidity pipeline as executable checks on a conformal map record:
//! quadrature residuals, the boundary function `b`, Cauchy orthogonality,
//! synthesis of the analytic function `F` and the overdetermined solution `u`,
//! the gradient bound, Weinberger's integral identities, and the weak
//! distributional residual of the Serrin measure equation.
//!
//! Audits are diagnostic: every quantity is computed and reported even for
//! deliberately broken inputs, and nothing here asserts.  Assertions about
//! these numbers live in the test suites.

use crate::conformal::{geometry, moments_area_batch, ConformalMapRecord, GeometryReport};
use crate::error::{Error, Result};
use crate::fft::{bin, fft_forward};
use crate::grid::{PolarField, PolarGrid};
use crate::series::PowerSeries;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::sync::Arc;

/// Resolution and tolerance knobs for one audit.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub nr: usize,
    pub m: usize,
    /// Boundary sample count; 0 selects a power of two from the series order.
    pub m_b: usize,
    /// Quadrature residuals are computed for `0 ≤ n ≤ n_top`.
    pub n_top: usize,
    /// Orthogonality residuals for `0 ≤ k ≤ k_top`.
    pub k_top: usize,
    /// Weak-residual test polynomials range over all monomials of total
    /// degree up to this.
    pub degree: u32,
    pub tol: f64,
    pub c_override: Option<f64>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            nr: 64,
            m: 512,
            m_b: 0,
            n_top: 32,
            k_top: 16,
            degree: 4,
            tol: 1e-8,
            c_override: None,
        }
    }
}

/// Power-of-two boundary sample count comfortably above the series band.
pub fn auto_boundary_samples(n_s: usize) -> usize {
    let mut m = 4096usize;
    while m < 4 * (n_s + 2) {
        m *= 2;
    }
    m
}

/// Samples of `b(z) = conj(z) − 2ic·conj(τ(z))` along the image boundary,
/// with `τ = ie^{it}φ′/|φ′|` the unit tangent.
pub fn boundary_b(rec: &ConformalMapRecord, c: f64, m_b: usize) -> Vec<Complex64> {
    let f_b = rec.f.eval_circle(1.0, m_b);
    let fp_b = rec.fprime.eval_circle(1.0, m_b);
    (0..m_b)
        .map(|j| {
            let e = Complex64::cis(2.0 * PI * j as f64 / m_b as f64);
            let tau = Complex64::I * e * fp_b[j] / fp_b[j].norm();
            f_b[j].conj() - Complex64::new(0.0, 2.0 * c) * tau.conj()
        })
        .collect()
}

/// Signed residuals `r_n = ∫_𝔻 φ^n|φ′|² da − 2c ∫_𝕋 φ^n σ dm`, `n ≤ n_top`
/// (both measures normalized; moduli are the reported `R_n`).
pub fn signed_quadrature_residuals(
    rec: &ConformalMapRecord,
    c: f64,
    n_top: usize,
    grid: &Arc<PolarGrid>,
    m_b: usize,
) -> Vec<Complex64> {
    let interior = moments_area_batch(rec, n_top, grid);
    let f_b = rec.f.eval_circle(1.0, m_b);
    let sigma = rec.sigma_samples(m_b);
    let big_c = 2.0 * c;
    let mut powers = vec![Complex64::ONE; m_b];
    let mut out = Vec::with_capacity(n_top + 1);
    for n in 0..=n_top {
        let boundary: Complex64 =
            powers.iter().zip(&sigma).map(|(p, &s)| p * s).sum::<Complex64>() / m_b as f64;
        out.push(interior[n] / PI - big_c * boundary);
        for (p, &f) in powers.iter_mut().zip(&f_b) {
            *p *= f;
        }
    }
    out
}

/// `R_n = |r_n|` for `n = 0..=n_top`.
pub fn quadrature_residuals(
    rec: &ConformalMapRecord,
    c: f64,
    n_top: usize,
    grid: &Arc<PolarGrid>,
    m_b: usize,
) -> Vec<f64> {
    signed_quadrature_residuals(rec, c, n_top, grid, m_b)
        .into_iter()
        .map(|v| v.norm())
        .collect()
}

/// Orthogonality integrals `O_k = ∫ φ^k b φ′ ie^{it} dm(t)`, `k ≤ k_top`,
/// by trapezoid quadrature over the boundary samples.
pub fn cauchy_orthogonality(
    rec: &ConformalMapRecord,
    c: f64,
    k_top: usize,
    m_b: usize,
) -> Vec<Complex64> {
    let f_b = rec.f.eval_circle(1.0, m_b);
    let fp_b = rec.fprime.eval_circle(1.0, m_b);
    let b = boundary_b(rec, c, m_b);
    let mut weight: Vec<Complex64> = (0..m_b)
        .map(|j| {
            let e = Complex64::cis(2.0 * PI * j as f64 / m_b as f64);
            b[j] * fp_b[j] * Complex64::I * e
        })
        .collect();
    let mut out = Vec::with_capacity(k_top + 1);
    for _ in 0..=k_top {
        out.push(weight.iter().sum::<Complex64>() / m_b as f64);
        for (w, &f) in weight.iter_mut().zip(&f_b) {
            *w *= f;
        }
    }
    out
}

/// Output of [`build_f`]: the composed series and its Hardy diagnostics.
#[derive(Debug, Clone)]
pub struct BuiltF {
    /// Taylor coefficients of `F∘φ`.
    pub series: PowerSeries,
    /// Nonnegative-frequency part of the weighted symbol `A = (b∘φ)·φ′`,
    /// which equals `(F∘φ)·φ′` when `F` exists.
    pub weighted: PowerSeries,
    /// ℓ² mass of the negative frequencies of `A` (the Hardy-membership gauge).
    pub f_defect: f64,
    /// Sup over boundary samples of `|F∘φ − b|`.
    pub reproduction_sup: f64,
}

/// Recover `F∘φ` by Fourier projection of the weighted boundary symbol
/// `A = (b∘φ)·φ′`: keep the nonnegative frequencies and divide by
/// `φ′` in exponential form (`1/φ′ = e^{+F_ν}`).  Never fails; the caller
/// decides what to do with a large defect.
pub fn build_f_lenient(rec: &ConformalMapRecord, c: f64, m_b: usize) -> BuiltF {
    let fp_b = rec.fprime.eval_circle(1.0, m_b);
    let b = boundary_b(rec, c, m_b);
    let mut samples: Vec<Complex64> = b.iter().zip(&fp_b).map(|(&bj, &fj)| bj * fj).collect();
    fft_forward(&mut samples);
    let half = m_b / 2;
    let mut defect_sq = 0.0;
    for n in 1..=half {
        defect_sq += (samples[bin(-(n as i64), m_b)] / m_b as f64).norm_sqr();
    }
    let mut weighted = PowerSeries::zeros(half);
    for k in 0..half {
        weighted.set_coeff(k, samples[k] / m_b as f64);
    }
    // 1/φ′ as a series: φ′ = e^{−F_ν}, so invert by exponentiating −(−F_ν)
    let inv_fprime = rec.herglotz.scale(Complex64::new(-1.0, 0.0)).exp_neg();
    let series = weighted.mul_truncated(&inv_fprime);
    let boundary = series.eval_circle(1.0, m_b);
    let reproduction_sup = boundary
        .iter()
        .zip(&b)
        .map(|(s, bj)| (s - bj).norm())
        .fold(0.0, f64::max);
    BuiltF { series, weighted, f_defect: defect_sq.sqrt(), reproduction_sup }
}

/// Strict form of [`build_f_lenient`]: errors when the negative-frequency
/// mass exceeds `tol`, i.e. when no Hardy-class `F` matches the boundary data.
pub fn build_f(rec: &ConformalMapRecord, c: f64, m_b: usize, tol: f64) -> Result<BuiltF> {
    let built = build_f_lenient(rec, c, m_b);
    if built.f_defect > tol {
        return Err(Error::HardyDefect { defect: built.f_defect, tol });
    }
    Ok(built)
}

/// The candidate overdetermined-problem solution `u∘φ` on the grid.
#[derive(Debug, Clone)]
pub struct SerrinSolution {
    pub u: PolarField,
    /// Additive constant fixing the boundary mean of `u` to zero.
    pub c0: f64,
    pub boundary_sup: f64,
    pub min_interior: f64,
    /// `u` at the conformal center (equals `c0` since `G(0) = φ(0) = 0`).
    pub center: f64,
    /// Taylor coefficients of `G∘φ` where `G′ = F`.
    pub g_series: PowerSeries,
}

/// Integrate `(F∘φ)φ′` to `G∘φ` and assemble
/// `u∘φ = Re(G∘φ)/2 − |φ|²/4 + C0` with boundary mean zero.
pub fn build_u(
    rec: &ConformalMapRecord,
    built: &BuiltF,
    grid: &Arc<PolarGrid>,
    m_b: usize,
) -> SerrinSolution {
    let g_series = built.weighted.integrate();
    let g_b = g_series.eval_circle(1.0, m_b);
    let f_b = rec.f.eval_circle(1.0, m_b);
    let raw = |g: Complex64, f: Complex64| 0.5 * g.re - 0.25 * f.norm_sqr();
    let boundary_mean =
        g_b.iter().zip(&f_b).map(|(&g, &f)| raw(g, f)).sum::<f64>() / m_b as f64;
    let c0 = -boundary_mean;
    let boundary_sup = g_b
        .iter()
        .zip(&f_b)
        .map(|(&g, &f)| (raw(g, f) + c0).abs())
        .fold(0.0, f64::max);
    let g_grid = g_series.eval_grid(grid);
    let f_grid = rec.f.eval_grid(grid);
    let mut u = g_grid.clone();
    for ((uv, &gv), &fv) in u
        .values_mut()
        .iter_mut()
        .zip(g_grid.values().iter())
        .zip(f_grid.values().iter())
    {
        *uv = Complex64::new(raw(gv, fv) + c0, 0.0);
    }
    let u = PolarField::from_values(grid, u.values().clone(), true).expect("shape preserved");
    let min_interior = u.min_re();
    SerrinSolution { u, c0, boundary_sup, min_interior, center: c0, g_series }
}

/// Interior gradient-bound excess `max(0, sup|W|/2 − c)` with
/// `W = F∘φ − conj(φ)`, and the boundary deviation of the inward normal
/// derivative `∂_ν u = Re(iτ·W)/2` from `c`.
pub fn gradient_and_normal_checks(
    rec: &ConformalMapRecord,
    built: &BuiltF,
    c: f64,
    grid: &Arc<PolarGrid>,
    m_b: usize,
) -> (f64, f64) {
    let f_grid = rec.f.eval_grid(grid);
    let cap_f = built.series.eval_grid(grid);
    let mut sup_w = 0.0f64;
    for (&fz, &cf) in f_grid.values().iter().zip(cap_f.values().iter()) {
        sup_w = sup_w.max((cf - fz.conj()).norm());
    }
    let excess = (0.5 * sup_w - c).max(0.0);

    let f_b = rec.f.eval_circle(1.0, m_b);
    let fp_b = rec.fprime.eval_circle(1.0, m_b);
    let cap_b = built.series.eval_circle(1.0, m_b);
    let mut dev = 0.0f64;
    for j in 0..m_b {
        let e = Complex64::cis(2.0 * PI * j as f64 / m_b as f64);
        let tau = Complex64::I * e * fp_b[j] / fp_b[j].norm();
        let w = cap_b[j] - f_b[j].conj();
        let normal = 0.5 * (Complex64::I * tau * w).re;
        dev = dev.max((normal - c).abs());
    }
    (excess, dev)
}

/// The four Weinberger integrals and their identity defects.
#[derive(Debug, Clone, Serialize)]
pub struct WeinbergerIntegrals {
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub area: f64,
    /// `|4I + M − cB|`
    pub id1_defect: f64,
    /// `|(M − 4I) − (cB − 4c²·area)|`
    pub id2_defect: f64,
    /// `|2I − c²·area|`
    pub volume_defect: f64,
}

/// `I = ∫_Ω u dA`, `M = ∫_Ω |z|² dA`, `B = ∮ |z|² σ dt`, area from the
/// coefficient identity; all Lebesgue, pulled back through the map.
pub fn weinberger_identities(
    rec: &ConformalMapRecord,
    sol: &SerrinSolution,
    c: f64,
    grid: &Arc<PolarGrid>,
    m_b: usize,
) -> WeinbergerIntegrals {
    let fp = rec.fprime.eval_grid(grid);
    let jac = fp.map(true, |v| Complex64::new(v.norm_sqr(), 0.0));
    let f_grid = rec.f.eval_grid(grid);
    let i = PI * sol.u.mul_pointwise(&jac).expect("same grid").integral().re;
    let m = PI
        * f_grid
            .map(true, |v| Complex64::new(v.norm_sqr(), 0.0))
            .mul_pointwise(&jac)
            .expect("same grid")
            .integral()
            .re;
    let f_b = rec.f.eval_circle(1.0, m_b);
    let sigma = rec.sigma_samples(m_b);
    let b = 2.0 * PI
        * f_b
            .iter()
            .zip(&sigma)
            .map(|(f, &s)| f.norm_sqr() * s)
            .sum::<f64>()
        / m_b as f64;
    let area = geometry(rec).area;
    WeinbergerIntegrals {
        i,
        m,
        b,
        area,
        id1_defect: (4.0 * i + m - c * b).abs(),
        id2_defect: ((m - 4.0 * i) - (c * b - 4.0 * c * c * area)).abs(),
        volume_defect: (2.0 * i - c * c * area).abs(),
    }
}

/// A real polynomial in `x, y`, stored as monomial terms `coeff·x^p·y^q`.
#[derive(Debug, Clone)]
pub struct RealPoly {
    pub terms: Vec<(u32, u32, f64)>,
    pub name: String,
}

impl RealPoly {
    pub fn monomial(p: u32, q: u32) -> Self {
        Self { terms: vec![(p, q, 1.0)], name: format!("x^{p} y^{q}") }
    }

    pub fn named(terms: Vec<(u32, u32, f64)>, name: &str) -> Self {
        Self { terms, name: name.to_string() }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(p, q, c)| c * x.powi(p as i32) * y.powi(q as i32))
            .sum()
    }

    /// Symbolic Laplacian from the coefficient list.
    pub fn laplacian(&self) -> Self {
        let mut terms = Vec::new();
        for &(p, q, c) in &self.terms {
            if p >= 2 {
                terms.push((p - 2, q, c * p as f64 * (p - 1) as f64));
            }
            if q >= 2 {
                terms.push((p, q - 2, c * q as f64 * (q - 1) as f64));
            }
        }
        Self { terms, name: format!("Δ({})", self.name) }
    }
}

/// Weak residual of the measure equation against one test polynomial:
/// `∫_Ω u Δq dA − (c ∮ q σ dt − ∫_Ω q dA)`.
pub fn weak_serrin_residual(
    rec: &ConformalMapRecord,
    sol: &SerrinSolution,
    c: f64,
    poly: &RealPoly,
    grid: &Arc<PolarGrid>,
    m_b: usize,
) -> f64 {
    let f_grid = rec.f.eval_grid(grid);
    let fp = rec.fprime.eval_grid(grid);
    let jac = fp.map(true, |v| Complex64::new(v.norm_sqr(), 0.0));
    let lap = poly.laplacian();
    let compose = |p: &RealPoly| f_grid.map(true, |v| Complex64::new(p.eval(v.re, v.im), 0.0));
    let bulk_u_lap = PI
        * sol
            .u
            .mul_pointwise(&compose(&lap))
            .expect("same grid")
            .mul_pointwise(&jac)
            .expect("same grid")
            .integral()
            .re;
    let bulk_q = PI * compose(poly).mul_pointwise(&jac).expect("same grid").integral().re;
    let f_b = rec.f.eval_circle(1.0, m_b);
    let sigma = rec.sigma_samples(m_b);
    let contour = 2.0 * PI
        * f_b
            .iter()
            .zip(&sigma)
            .map(|(f, &s)| poly.eval(f.re, f.im) * s)
            .sum::<f64>()
        / m_b as f64;
    bulk_u_lap - (c * contour - bulk_q)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakSerrinEntry {
    pub test_function: String,
    pub residual: f64,
}

/// Residuals for every monomial of total degree at most `degree`.
pub fn weak_serrin_table(
    rec: &ConformalMapRecord,
    sol: &SerrinSolution,
    c: f64,
    degree: u32,
    grid: &Arc<PolarGrid>,
    m_b: usize,
) -> Vec<WeakSerrinEntry> {
    let mut out = Vec::new();
    for total in 0..=degree {
        for p in (0..=total).rev() {
            let q = total - p;
            let poly = RealPoly::monomial(p, q);
            let residual = weak_serrin_residual(rec, sol, c, &poly, grid, m_b).abs();
            out.push(WeakSerrinEntry { test_function: poly.name, residual });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "DISK")]
    Disk,
    #[serde(rename = "NON_DISK")]
    NonDisk,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Disk => "DISK",
            Verdict::NonDisk => "NON_DISK",
        }
    }
}

/// Dichotomy call from boundary-radius statistics.
pub fn rigidity_verdict(geo: &GeometryReport) -> Verdict {
    if geo.circularity_deficit <= 1e-8 {
        Verdict::Disk
    } else {
        Verdict::NonDisk
    }
}

/// SHA-256 over the Taylor coefficients of `f` (map identity for reports).
pub fn map_hash(rec: &ConformalMapRecord) -> String {
    let mut hasher = Sha256::new();
    for c in rec.f.coeffs() {
        hasher.update(c.re.to_le_bytes());
        hasher.update(c.im.to_le_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionInfo {
    pub radial_nodes: usize,
    pub grid_angles: usize,
    pub boundary_samples: usize,
    pub series_order: usize,
}

/// Everything one audit produces.  Self-describing: resolution, map hash,
/// density convention, and the provenance of `c` ride along with the numbers.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub mode: String,
    pub a: f64,
    pub map_hash: String,
    pub resolution: ResolutionInfo,
    pub sigma_convention: String,
    pub c: f64,
    pub c_source: String,
    pub verdict: Verdict,
    pub circularity_deficit: f64,
    pub perimeter: f64,
    pub centroid: [f64; 2],
    pub quad_residuals: Vec<f64>,
    pub quad_residual_max: f64,
    pub orth_residuals: Vec<f64>,
    pub orth_residual_max: f64,
    pub f_defect: f64,
    pub f_reproduction_sup: f64,
    pub u_c0: f64,
    pub u_center: f64,
    pub u_boundary_sup: f64,
    pub u_min_interior: f64,
    pub grad_bound_excess: f64,
    pub normal_deriv_dev: f64,
    #[serde(flatten)]
    pub weinberger: WeinbergerIntegrals,
    pub weak_serrin_residuals: Vec<WeakSerrinEntry>,
    pub weak_serrin_max: f64,
}

/// Run the full pipeline on one map.  Diagnostic by design: broken inputs
/// yield large recorded defects rather than errors.
pub fn run_audit(rec: &ConformalMapRecord, cfg: &AuditConfig) -> AuditReport {
    let c = cfg.c_override.unwrap_or_else(|| rec.c_small());
    let c_source = if cfg.c_override.is_some() { "override" } else { "map" };
    let m_b = if cfg.m_b == 0 { auto_boundary_samples(rec.n_s()) } else { cfg.m_b };
    let grid = PolarGrid::new(cfg.nr, cfg.m);

    let geo = geometry(rec);
    let verdict = rigidity_verdict(&geo);
    let quad: Vec<f64> = quadrature_residuals(rec, c, cfg.n_top, &grid, m_b);
    let orth: Vec<f64> = cauchy_orthogonality(rec, c, cfg.k_top, m_b)
        .into_iter()
        .map(|v| v.norm())
        .collect();
    let built = build_f_lenient(rec, c, m_b);
    let sol = build_u(rec, &built, &grid, m_b);
    let (grad_bound_excess, normal_deriv_dev) =
        gradient_and_normal_checks(rec, &built, c, &grid, m_b);
    let weinberger = weinberger_identities(rec, &sol, c, &grid, m_b);
    let weak = weak_serrin_table(rec, &sol, c, cfg.degree, &grid, m_b);

    AuditReport {
        mode: rec.mode.as_str().to_string(),
        a: rec.a,
        map_hash: map_hash(rec),
        resolution: ResolutionInfo {
            radial_nodes: cfg.nr,
            grid_angles: cfg.m,
            boundary_samples: m_b,
            series_order: rec.n_s(),
        },
        sigma_convention: format!("sigma = exp(-L), {} mode", rec.mode.as_str()),
        c,
        c_source: c_source.to_string(),
        verdict,
        circularity_deficit: geo.circularity_deficit,
        perimeter: geo.perimeter,
        centroid: [geo.centroid.re, geo.centroid.im],
        quad_residual_max: quad.iter().cloned().fold(0.0, f64::max),
        quad_residuals: quad,
        orth_residual_max: orth.iter().cloned().fold(0.0, f64::max),
        orth_residuals: orth,
        f_defect: built.f_defect,
        f_reproduction_sup: built.reproduction_sup,
        u_c0: sol.c0,
        u_center: sol.center,
        u_boundary_sup: sol.boundary_sup,
        u_min_interior: sol.min_interior,
        grad_bound_excess,
        normal_deriv_dev,
        weinberger,
        weak_serrin_max: weak.iter().map(|e| e.residual).fold(0.0, f64::max),
        weak_serrin_residuals: weak,
    }
}
