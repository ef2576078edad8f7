//! The built-in verification battery: every spectral operator is checked
//! against an independent route (closed forms, brute-force quadrature, or a
//! dual formulation) at the resolution the caller intends to run at.
//!
//! A fault-injection hook perturbs the fast route of one check so that the
//! battery's failure path itself stays tested end to end.

use crate::balayage::{balayage, balayage_bruteforce, fubini_check, operator_k, poisson_extend, poisson_moment_batch};
use crate::conformal::{build_map, moments_area, moments_contour, ConformalMapRecord};
use crate::fourier::TrigPolynomial;
use crate::grid::PolarGrid;
use crate::measure::{herglotz_coeffs, MeasureSpec};
use crate::solver::{BranchPoint, SolveMode};
use crate::testkit::{random_real_poly, seeded_rng, FieldSpec};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Deliberate perturbations of a fast route, for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Nudge the mode-diagonal balayage result before comparing with the
    /// brute-force kernel quadrature.
    BalayageDiagonal,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed discrepancy.
    pub observed: f64,
    pub bound: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Names of the failing checks, if any.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

fn record(checks: &mut Vec<CheckResult>, name: &str, observed: f64, bound: f64, detail: String) {
    checks.push(CheckResult {
        name: name.to_string(),
        passed: observed.is_finite() && observed <= bound,
        observed,
        bound,
        detail,
    });
}

/// Run the battery at band `n_max` on an `nr × m` grid.  Robust down to
/// small resolutions (`n_max = 16`, `nr = 12`, `m = 64`).
pub fn run_selftest(
    n_max: usize,
    nr: usize,
    m: usize,
    seed: u64,
    fault: Option<Fault>,
) -> SelftestReport {
    let mut checks = Vec::new();
    let grid = PolarGrid::new(nr, m);
    let cap = grid.mode_capacity();
    let band = n_max.min(cap);
    let mut rng = seeded_rng(seed);

    // 1. eigenvalues of K = 𝒯 ∘ P: each boundary mode scales by 1/(|n|+1)
    {
        let mut worst = 0.0f64;
        let mut tested = 0;
        // the radial rule integrates r^{2n+1} exactly only for n < nr
        let top = band.min(nr - 1).min(cap) as i64;
        for n in [1i64, 2, 3, 4, 5, 8, top / 2, top] {
            if n < 1 || n > top {
                continue;
            }
            tested += 1;
            let e_n = TrigPolynomial::from_modes(band, &[(n, Complex64::ONE)], false)
                .expect("mode in band");
            match operator_k(&e_n, &grid) {
                Ok(ke) => {
                    let lambda = 1.0 / (n as f64 + 1.0);
                    for (nn, c) in ke.iter_modes() {
                        let expect = if nn == n {
                            Complex64::new(lambda, 0.0)
                        } else {
                            Complex64::ZERO
                        };
                        worst = worst.max((c - expect).norm());
                    }
                }
                Err(_) => {
                    worst = f64::INFINITY;
                    break;
                }
            }
        }
        record(
            &mut checks,
            "operator K eigenvalues",
            worst,
            1e-10,
            format!("{tested} boundary modes against 1/(|n|+1)"),
        );
    }

    // 2. Poisson moments: ∫ P_z(ζ) z̄ⁿ… reduces to ζ^n/(n+1) on the circle
    {
        let ns: Vec<u32> = (1..=16u32.min(band as u32)).collect();
        let mut worst = 0.0f64;
        for k in 0..4 {
            let zeta = Complex64::cis(2.0 * PI * (k as f64 + 0.3) / 4.0);
            for (num, exact) in poisson_moment_batch(&ns, zeta, nr.max(24)) {
                worst = worst.max((num - exact).norm());
            }
        }
        record(
            &mut checks,
            "poisson moment identity",
            worst,
            1e-9,
            format!("orders 1..={} at 4 boundary points", ns.len()),
        );
    }

    // 3. Fubini pairing: ∫_𝕋 h d(𝒯G) = ∫_𝔻 P[h] G da on random pairs
    {
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let h = random_real_poly(&mut rng, band.min(8), 0.7);
            let spec = FieldSpec::random(&mut rng, band.min(8), 5, true);
            let field = spec.materialize(&grid);
            match fubini_check(&h, &field) {
                Ok((circle, disk)) => worst = worst.max((circle - disk).norm()),
                Err(_) => worst = f64::INFINITY,
            }
        }
        record(&mut checks, "fubini pairing", worst, 1e-9, "5 random (h, G) pairs".into());
    }

    // 4. mode-diagonal balayage against the brute-force kernel quadrature
    {
        let m_out = 64usize.min(m.next_power_of_two());
        let spec = FieldSpec::random(&mut rng, band.min(8), 5, true);
        let field = spec.materialize(&grid);
        let observed = match (balayage(&field, band), balayage_bruteforce(&field, m_out)) {
            (Ok(diag), Ok(brute)) => {
                // sample on a multiple of m_out so both rules share angles
                let factor = (2 * band + 1).div_ceil(m_out);
                let mut samples = diag.sample(m_out * factor).expect("band fits");
                if fault == Some(Fault::BalayageDiagonal) {
                    for v in samples.iter_mut() {
                        *v += 1e-5;
                    }
                }
                (0..m_out)
                    .map(|j| (samples[j * factor] - brute[j]).norm())
                    .fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        };
        record(
            &mut checks,
            "balayage diagonal",
            observed,
            1e-8,
            format!("sup over {m_out} boundary samples vs direct kernel sums"),
        );
    }

    // 5. Herglotz series: Re F = P[h] throughout the disk
    {
        let h = random_real_poly(&mut rng, band.min(12), 0.5);
        let f = herglotz_coeffs(&h, h.n_max() + 1);
        let series_side = f.eval_grid(&grid);
        let observed = match poisson_extend(&h, &grid) {
            Ok(direct) => {
                let mut worst = 0.0f64;
                for (s, d) in series_side.values().iter().zip(direct.values().iter()) {
                    worst = worst.max((s.re - d.re).abs());
                }
                worst
            }
            Err(_) => f64::INFINITY,
        };
        record(&mut checks, "herglotz real part", observed, 1e-10, "random band-limited h".into());
    }

    // 6. Green's formula: contour moments equal area moments on a test map
    {
        let rec = tame_test_map();
        let mut worst = 0.0f64;
        for n in 0..=8usize {
            let area_route = moments_area(&rec, n, &grid);
            let contour_route = moments_contour(&rec, n, 2048);
            worst = worst.max((area_route - contour_route).norm());
        }
        record(
            &mut checks,
            "green moments",
            worst,
            1e-8,
            "orders 0..=8 on a non-circular univalent map".into(),
        );
    }

    SelftestReport { checks }
}

/// Small fourfold perturbation of the disk used by the Green's-formula check.
fn tame_test_map() -> ConformalMapRecord {
    let mu = MeasureSpec::riesz_product(0, 8).expect("static band");
    let mut w = TrigPolynomial::zero(8, true);
    w.set_coeff(4, Complex64::new(0.012, 0.004)).expect("in band");
    w.set_coeff(-4, Complex64::new(0.012, -0.004)).expect("in band");
    let point = BranchPoint {
        a: 0.02,
        w,
        log_c: 0.0,
        residual: 0.0,
        contraction_est: 0.0,
        holder_seminorm: 0.0,
        projection_drift: 0.0,
        iterations: 0,
    };
    build_map(&point, SolveMode::Singular, &mu, 96, 1e-9).expect("series long enough")
}
