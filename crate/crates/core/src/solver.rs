//! Damped fixed-point solver for the boundary log-density `W(a)`.
//!
//! The unknown lives in the discrete class `X⁴`: real trigonometric
//! polynomials with zero mean supported on frequencies `4ℤ∖{0}`.  Writing
//! `G_{W,a} = exp(−2(P[W] + a·P[μ]))` for the interior Jacobian density, the
//! branch equation is `𝒯(G_{W,a}) = C e^{−L}` with the mode-dependent
//! boundary log-weight `L`, folded into the root problem
//!
//! ```text
//! Ψ(W, a) = Proj_{X⁴}( log 𝒯(G_{W,a}) + L ) = 0,   log C = mean(log 𝒯(G) + L).
//! ```
//!
//! The production iteration is the frozen-inverse contraction
//! `Γₐ(W) = W − A⁻¹Ψ(W,a)` where `A = I − 2K` is the linearization at the
//! origin (diagonal: mode `n` scales by `(|n|−1)/(|n|+1)`); an optional
//! Newton mode solves the full directional linearization instead.  A branch
//! walks an increasing `a`-grid with warm starts and stops — with the reason
//! recorded, never silently — when contraction, positivity, or convergence
//! is lost.

use crate::balayage::{balayage, poisson_extend};
use crate::error::{Error, Result};
use crate::fourier::TrigPolynomial;
use crate::grid::{PolarField, PolarGrid};
use crate::measure::MeasureSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Boundary log-weight `L = W`: the measure contributes to the interior
    /// density but not to the boundary modulus (singular-factor convention).
    Singular,
    /// `L = W + a·(density of μ)`: the measure data is read as an absolutely
    /// continuous weight throughout.
    Consistent,
}

impl SolveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMode::Singular => "singular",
            SolveMode::Consistent => "consistent",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub mode: SolveMode,
    pub measure: MeasureSpec,
    /// Mode cutoff `N` of the discrete `X⁴` class.
    pub n_max: usize,
    /// Radial Gauss–Legendre nodes.
    pub nr: usize,
    /// Uniform angles; must satisfy `n_max <= (m-1)/2`.
    pub m: usize,
    /// Increasing parameter grid starting at 0.
    pub a_grid: Vec<f64>,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub use_newton: bool,
    /// Hölder exponent for the recorded seminorm diagnostic.
    pub alpha: f64,
    /// Seed for the randomized contraction probes.
    pub seed: u64,
}

impl SolverConfig {
    pub fn defaults(mode: SolveMode, measure: MeasureSpec) -> Self {
        Self {
            mode,
            measure,
            n_max: 255,
            nr: 64,
            m: 512,
            a_grid: vec![0.0],
            tol_residual: 1e-11,
            max_iter: 200,
            use_newton: false,
            alpha: 0.5,
            seed: 0,
        }
    }

    /// Geometric grid `a_j = a_max·2^{j−J}` with the `a = 0` anchor.
    pub fn geometric_a_grid(a_max: f64, points: usize) -> Vec<f64> {
        let mut grid = vec![0.0];
        for j in (0..points).rev() {
            grid.push(a_max * 0.5f64.powi(j as i32));
        }
        grid
    }

    pub fn linear_a_grid(a_max: f64, points: usize) -> Vec<f64> {
        (0..=points).map(|j| a_max * j as f64 / points.max(1) as f64).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max > (self.m - 1) / 2 {
            return Err(Error::Resolution(format!(
                "cutoff {} needs more than {} angles",
                self.n_max, self.m
            )));
        }
        if self.n_max < 4 {
            return Err(Error::InvalidInput("mode cutoff must be at least 4".into()));
        }
        if self.measure.coeffs().n_max() > self.n_max {
            return Err(Error::Resolution(format!(
                "measure band {} exceeds the cutoff {}",
                self.measure.coeffs().n_max(),
                self.n_max
            )));
        }
        if self.a_grid.is_empty() || self.a_grid[0] != 0.0 {
            return Err(Error::InvalidInput("a-grid must start at 0".into()));
        }
        if self.a_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("a-grid must be strictly increasing".into()));
        }
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidInput("Hölder exponent must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// One accepted point of a solution branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub a: f64,
    pub w: TrigPolynomial,
    pub log_c: f64,
    pub residual: f64,
    pub contraction_est: f64,
    pub holder_seminorm: f64,
    pub projection_drift: f64,
    pub iterations: usize,
}

impl BranchPoint {
    /// The multiplicative constant `C(a) = e^{log C}`.
    pub fn c_big(&self) -> f64 {
        self.log_c.exp()
    }

    /// The quadrature constant `c(a) = C(a)/2`.
    pub fn c_small(&self) -> f64 {
        0.5 * self.log_c.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    ContractionLost,
    PositivityLost,
    OverflowGuard,
    Diverged,
    MaxIterExceeded,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Completed => "completed",
            StopReason::ContractionLost => "contraction_lost",
            StopReason::PositivityLost => "positivity_lost",
            StopReason::OverflowGuard => "overflow_guard",
            StopReason::Diverged => "diverged",
            StopReason::MaxIterExceeded => "max_iter_exceeded",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub stop: StopReason,
    pub stop_detail: Option<String>,
}

/// Output of one Ψ evaluation.
#[derive(Debug, Clone)]
pub struct PsiOutput {
    pub psi: TrigPolynomial,
    pub log_c: f64,
    /// Sup of |Ψ| over the angle samples — the convergence residual.
    pub residual: f64,
    /// Mass discarded by the symmetry projection (roundoff monitor).
    pub projection_drift: f64,
    /// Minimum of the swept density before the logarithm.
    pub min_balayage: f64,
}

/// Result of iterating a single parameter value to convergence.
#[derive(Debug, Clone)]
pub struct PointSolve {
    pub w: TrigPolynomial,
    pub log_c: f64,
    pub residual: f64,
    pub iterations: usize,
    pub projection_drift: f64,
    /// Residual after each Ψ evaluation, first entry = starting residual.
    pub history: Vec<f64>,
}

/// The linearization `D_WΨ(W,a)` with its (W,a)-dependent state precomputed,
/// applied direction by direction.
pub struct DPsi<'s> {
    solver: &'s Solver,
    g: PolarField,
    tg_samples: Vec<f64>,
}

impl DPsi<'_> {
    /// `H ↦ Proj_{X⁴}( H − 2·𝒯(G·P[H]) / 𝒯(G) )`.
    pub fn apply(&self, h: &TrigPolynomial) -> Result<TrigPolynomial> {
        let solver = self.solver;
        require_x4(h)?;
        let ph = poisson_extend(h, &solver.grid)?;
        let weighted = ph.mul_pointwise(&self.g)?;
        let swept = balayage(&weighted, solver.cfg.n_max)?;
        let m = solver.cfg.m;
        let num = swept.sample(m)?;
        let quotient: Vec<Complex64> = num
            .iter()
            .zip(&self.tg_samples)
            .map(|(&n, &d)| n / d)
            .collect();
        let q = TrigPolynomial::from_samples(&quotient, solver.cfg.n_max, h.is_real())?;
        h.add_scaled(&q, Complex64::new(-2.0, 0.0)).project_x4()
    }
}

fn require_x4(h: &TrigPolynomial) -> Result<()> {
    let tol = 1e-12 * h.coeff_sup().max(1.0);
    if h.coeff(0).norm() > tol {
        return Err(Error::InvalidInput(format!(
            "nonzero mean {:.3e} is outside the symmetry class",
            h.coeff(0).norm()
        )));
    }
    if !h.is_x4(tol) {
        return Err(Error::InvalidInput(
            "coefficient outside 4ℤ∖{0} is outside the symmetry class".into(),
        ));
    }
    Ok(())
}

/// Diagonal inverse of `A = I − 2K` on `X⁴`: mode `n` scales by `(|n|+1)/(|n|−1)`.
pub fn apply_a_inv(h: &TrigPolynomial) -> Result<TrigPolynomial> {
    require_x4(h)?;
    let mut out = h.clone();
    for (n, c) in h.iter_modes() {
        if n != 0 && n % 4 == 0 {
            let abs = n.abs() as f64;
            out.set_coeff(n, c * (abs + 1.0) / (abs - 1.0))?;
        }
    }
    Ok(out)
}

pub struct Solver {
    cfg: SolverConfig,
    grid: Arc<PolarGrid>,
    /// `P[μ]` on the grid.
    mu_extension: PolarField,
    /// Sup of `P[μ]` over the grid, for the overflow guard.
    mu_sup: f64,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = PolarGrid::new(cfg.nr, cfg.m);
        let mu_extension = poisson_extend(cfg.measure.coeffs(), &grid)?;
        let mu_sup = mu_extension.max_abs();
        Ok(Self { cfg, grid, mu_extension, mu_sup })
    }

    pub fn cfg(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    /// The boundary log-weight `L` of the configured mode.
    pub fn log_density(&self, w: &TrigPolynomial, a: f64) -> TrigPolynomial {
        match self.cfg.mode {
            SolveMode::Singular => w.clone(),
            SolveMode::Consistent => {
                w.add_scaled(self.cfg.measure.coeffs(), Complex64::new(a, 0.0))
            }
        }
    }

    /// `G_{W,a} = exp(−2(P[W] + a·P[μ]))` on the grid, guarded against
    /// exponent overflow.
    pub fn jacobian_field(&self, w: &TrigPolynomial, a: f64) -> Result<PolarField> {
        let w_sup = w.sup_norm(self.cfg.m);
        let budget = 2.0 * (w_sup + a * self.mu_sup);
        if budget > 300.0 {
            return Err(Error::OverflowGuard(format!(
                "exponent bound {budget:.1} exceeds 300; far outside the small-data regime"
            )));
        }
        let pw = poisson_extend(w, &self.grid)?;
        let exponent = pw.add_scaled(&self.mu_extension, a)?;
        Ok(exponent.map(true, |v| Complex64::new((-2.0 * v.re).exp(), 0.0)))
    }

    pub fn psi(&self, w: &TrigPolynomial, a: f64) -> Result<PsiOutput> {
        let g = self.jacobian_field(w, a)?;
        self.psi_given(w, a, &g)
    }

    fn psi_given(&self, w: &TrigPolynomial, a: f64, g: &PolarField) -> Result<PsiOutput> {
        let m = self.cfg.m;
        let swept = balayage(g, self.cfg.n_max)?;
        let samples = swept.sample_real(m)?;
        let (mut min_val, mut min_idx) = (f64::INFINITY, 0);
        for (k, &v) in samples.iter().enumerate() {
            if v < min_val {
                (min_val, min_idx) = (v, k);
            }
        }
        if min_val <= 0.0 {
            return Err(Error::NonPositiveBalayage { value: min_val, index: min_idx });
        }
        let logs: Vec<f64> = samples.iter().map(|&v| v.ln()).collect();
        let log_poly = TrigPolynomial::from_real_samples(&logs, self.cfg.n_max)?;
        let raw = log_poly.add(&self.log_density(w, a));
        let log_c = raw.coeff(0).re;
        let psi = raw.project_x4()?;
        // everything outside X⁴ ∪ {mean} should be symmetry dust
        let mut drift = 0.0f64;
        for (n, c) in raw.iter_modes() {
            if n != 0 && n % 4 != 0 {
                drift = drift.max(c.norm());
            }
        }
        let residual = psi.sup_norm(m);
        Ok(PsiOutput {
            psi,
            log_c,
            residual,
            projection_drift: drift,
            min_balayage: min_val,
        })
    }

    /// One contraction step `Γₐ(W) = W − A⁻¹Ψ(W,a)`.
    pub fn gamma_step(&self, w: &TrigPolynomial, a: f64) -> Result<TrigPolynomial> {
        let out = self.psi(w, a)?;
        Ok(w.sub(&apply_a_inv(&out.psi)?))
    }

    /// The linearization at `(W, a)`, ready to apply to directions.
    pub fn dpsi(&self, w: &TrigPolynomial, a: f64) -> Result<DPsi<'_>> {
        let g = self.jacobian_field(w, a)?;
        let swept = balayage(&g, self.cfg.n_max)?;
        let tg_samples = swept.sample_real(self.cfg.m)?;
        if tg_samples.iter().any(|&v| v <= 0.0) {
            return Err(Error::NonPositiveBalayage {
                value: tg_samples.iter().cloned().fold(f64::INFINITY, f64::min),
                index: 0,
            });
        }
        Ok(DPsi { solver: self, g, tg_samples })
    }

    fn x4_modes(&self) -> Vec<i64> {
        (1..=(self.cfg.n_max / 4) as i64).map(|k| 4 * k).collect()
    }

    fn coords(&self, p: &TrigPolynomial) -> DVector<f64> {
        let modes = self.x4_modes();
        let mut v = DVector::zeros(2 * modes.len());
        for (i, &q) in modes.iter().enumerate() {
            let c = p.coeff(q);
            v[2 * i] = 2.0 * c.re;
            v[2 * i + 1] = -2.0 * c.im;
        }
        v
    }

    fn from_coords(&self, v: &DVector<f64>) -> TrigPolynomial {
        let modes = self.x4_modes();
        let mut p = TrigPolynomial::zero(self.cfg.n_max, true);
        for (i, &q) in modes.iter().enumerate() {
            let c = 0.5 * Complex64::new(v[2 * i], -v[2 * i + 1]);
            p.set_coeff(q, c).unwrap();
            p.set_coeff(-q, c.conj()).unwrap();
        }
        p
    }

    fn basis_direction(&self, index: usize) -> TrigPolynomial {
        let mut v = DVector::zeros(2 * self.x4_modes().len());
        v[index] = 1.0;
        self.from_coords(&v)
    }

    /// Full Newton step: solve `D_WΨ Δ = Ψ` on the truncated `X⁴` coordinates
    /// and subtract.  Falls back to the contraction step if the dense system
    /// is singular.
    fn newton_update(&self, w: &TrigPolynomial, a: f64, psi: &TrigPolynomial) -> Result<TrigPolynomial> {
        let lin = self.dpsi(w, a)?;
        let dim = 2 * self.x4_modes().len();
        let mut columns = Vec::with_capacity(dim);
        for i in 0..dim {
            let h = self.basis_direction(i);
            columns.push(self.coords(&lin.apply(&h)?));
        }
        let jac = DMatrix::from_columns(&columns);
        let rhs = self.coords(psi);
        match jac.lu().solve(&rhs) {
            Some(delta) => Ok(w.sub(&self.from_coords(&delta))),
            None => Ok(w.sub(&apply_a_inv(psi)?)),
        }
    }

    /// Iterate one parameter value from `w_start` until the sup residual
    /// drops below tolerance or the iteration budget runs out.
    pub fn solve_point(&self, a: f64, w_start: &TrigPolynomial) -> Result<PointSolve> {
        let mut w = w_start.clone();
        let mut history = Vec::new();
        let mut drift = 0.0f64;
        for iter in 0..=self.cfg.max_iter {
            let out = self.psi(&w, a)?;
            history.push(out.residual);
            drift = drift.max(out.projection_drift);
            if !out.residual.is_finite() || out.residual > 1e8 || w.coeff_sup() > 1e6 {
                return Err(Error::InvalidInput(format!(
                    "iteration diverged at a = {a}: residual {:.3e}",
                    out.residual
                )));
            }
            if out.residual <= self.cfg.tol_residual {
                return Ok(PointSolve {
                    w,
                    log_c: out.log_c,
                    residual: out.residual,
                    iterations: iter,
                    projection_drift: drift,
                    history,
                });
            }
            if iter == self.cfg.max_iter {
                break;
            }
            w = if self.cfg.use_newton {
                self.newton_update(&w, a, &out.psi)?
            } else {
                w.sub(&apply_a_inv(&out.psi)?)
            };
        }
        let last = *history.last().unwrap_or(&f64::NAN);
        Err(Error::InvalidInput(format!(
            "no convergence at a = {a} within {} iterations; residual {last:.3e}",
            self.cfg.max_iter
        )))
    }

    /// Sampled Lipschitz ratio of `Γₐ` at `w`: max over `probes` random unit
    /// directions `H` of `‖Γₐ(W+δH) − Γₐ(W)‖_∞ / δ`, `δ = 1e−6`.
    pub fn contraction_estimate(
        &self,
        w: &TrigPolynomial,
        a: f64,
        probes: usize,
        seed: u64,
    ) -> Result<f64> {
        let delta = 1e-6;
        let base = self.gamma_step(w, a)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let h = self.random_direction(&mut rng);
            let perturbed = w.add_scaled(&h, Complex64::new(delta, 0.0));
            let stepped = self.gamma_step(&perturbed, a)?;
            let ratio = stepped.sub(&base).sup_norm(self.cfg.m) / delta;
            worst = worst.max(ratio);
        }
        Ok(worst)
    }

    /// Random direction in `X⁴`, sup-normalized to 1.
    fn random_direction(&self, rng: &mut ChaCha8Rng) -> TrigPolynomial {
        let mut h = TrigPolynomial::zero(self.cfg.n_max, true);
        for q in self.x4_modes() {
            if q > 32 {
                break;
            }
            let c = 0.5 * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h.set_coeff(q, c).unwrap();
            h.set_coeff(-q, c.conj()).unwrap();
        }
        let sup = h.sup_norm(self.cfg.m);
        if sup > 0.0 {
            h.scale(1.0 / sup)
        } else {
            h
        }
    }

    /// Walk the `a`-grid with warm starts.  Numerical trouble ends the branch
    /// with a recorded reason; it is never an `Err`.
    pub fn solve_branch(&self) -> Result<Branch> {
        let mut points = Vec::new();
        let mut w = TrigPolynomial::zero(self.cfg.n_max, true);
        let mut stop = StopReason::Completed;
        let mut stop_detail = None;
        for (idx, &a) in self.cfg.a_grid.iter().enumerate() {
            let solve = match self.solve_point(a, &w) {
                Ok(s) => s,
                Err(e) => {
                    let (reason, detail) = classify_stop(&e, a);
                    stop = reason;
                    stop_detail = Some(detail);
                    break;
                }
            };
            let probe_seed = self.cfg.seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(idx as u64 + 1));
            let contraction_est = match self.contraction_estimate(&solve.w, a, 5, probe_seed) {
                Ok(r) => r,
                Err(e) => {
                    let (reason, detail) = classify_stop(&e, a);
                    stop = reason;
                    stop_detail = Some(detail);
                    break;
                }
            };
            let holder = solve
                .w
                .holder_estimate(self.cfg.alpha, self.cfg.m)
                .expect("alpha validated in config");
            w = solve.w.clone();
            points.push(BranchPoint {
                a,
                w: solve.w,
                log_c: solve.log_c,
                residual: solve.residual,
                contraction_est,
                holder_seminorm: holder.seminorm,
                projection_drift: solve.projection_drift,
                iterations: solve.iterations,
            });
            if contraction_est >= 1.0 {
                stop = StopReason::ContractionLost;
                stop_detail = Some(format!(
                    "measured contraction ratio {contraction_est:.3} at a = {a}"
                ));
                break;
            }
        }
        Ok(Branch { points, stop, stop_detail })
    }

    /// Re-verify the branch equation `𝒯(G) = C e^{−L}` for an accepted point
    /// on a grid refined by `factor` in both directions; returns the sup
    /// discrepancy over the refined angle samples.
    pub fn certificate_sup(&self, point: &BranchPoint, factor: usize) -> Result<f64> {
        let fine = self.grid.refined(factor.max(1));
        let pw = poisson_extend(&point.w, &fine)?;
        let pmu = poisson_extend(self.cfg.measure.coeffs(), &fine)?;
        let exponent = pw.add_scaled(&pmu, point.a)?;
        let g = exponent.map(true, |v| Complex64::new((-2.0 * v.re).exp(), 0.0));
        self.certificate_sup_for(&g, point, &fine)
    }

    /// Certificate against an externally supplied interior density on the
    /// refined grid (e.g. the squared modulus of a synthesized map
    /// derivative).
    pub fn certificate_sup_for(
        &self,
        g: &PolarField,
        point: &BranchPoint,
        fine: &Arc<PolarGrid>,
    ) -> Result<f64> {
        let m_fine = fine.angles();
        let swept = balayage(g, fine.mode_capacity().min(4 * self.cfg.n_max))?;
        let lhs = swept.sample_real(m_fine)?;
        let l = self.log_density(&point.w, point.a);
        let c_big = point.c_big();
        let rhs: Vec<f64> = l.sample_real(m_fine)?.iter().map(|&v| c_big * (-v).exp()).collect();
        Ok(lhs
            .iter()
            .zip(&rhs)
            .map(|(&x, &y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

fn classify_stop(e: &Error, a: f64) -> (StopReason, String) {
    let reason = match e {
        Error::NonPositiveBalayage { .. } => StopReason::PositivityLost,
        Error::OverflowGuard(_) => StopReason::OverflowGuard,
        Error::InvalidInput(msg) if msg.contains("diverged") => StopReason::Diverged,
        Error::InvalidInput(msg) if msg.contains("no convergence") => StopReason::MaxIterExceeded,
        _ => StopReason::Diverged,
    };
    (reason, format!("a = {a}: {e}"))
}
