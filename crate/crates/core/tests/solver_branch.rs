//! Branch-level behavior of the fixed-point solver: closed forms in the
//! damped (density-coupled) mode, first-order response in the singular
//! mode, Newton/Picard agreement, and the stop-reason taxonomy.

use num_complex::Complex64;
use qdom_core::solver::{SolveMode, Solver, SolverConfig, StopReason};
use qdom_core::testkit::{random_x4_poly, seeded_rng};
use qdom_core::{MeasureSpec, TrigPolynomial};

fn riesz0() -> MeasureSpec {
    MeasureSpec::riesz_product(0, 8).expect("measure")
}

fn small_cfg(mode: SolveMode, a_grid: Vec<f64>) -> SolverConfig {
    let mut cfg = SolverConfig::defaults(mode, riesz0());
    cfg.n_max = 64;
    cfg.nr = 48;
    cfg.m = 256;
    cfg.a_grid = a_grid;
    cfg
}

#[test]
fn origin_point_is_exactly_trivial() {
    let solver = Solver::new(small_cfg(SolveMode::Singular, vec![0.0])).expect("solver");
    let branch = solver.solve_branch().expect("branch");
    assert_eq!(branch.points.len(), 1);
    let p = &branch.points[0];
    assert_eq!(p.a, 0.0);
    assert_eq!(p.iterations, 0);
    assert!(p.w.coeff_sup() == 0.0, "W(0) must be exactly zero");
    assert!(p.log_c.abs() <= 1e-14);
    assert!((p.c_small() - 0.5).abs() <= 1e-14);
    assert!(matches!(branch.stop, StopReason::Completed));
}

#[test]
fn damped_mode_collapses_to_closed_form() {
    // With the density folded into the boundary weight the exact branch is
    // W(a) = −a·Π₀ρ_μ, log C = −a, and the map shrinks to e^{−a}·id.
    let cfg = small_cfg(SolveMode::Consistent, vec![0.0, 0.01, 0.02, 0.05]);
    let solver = Solver::new(cfg).expect("solver");
    let branch = solver.solve_branch().expect("branch");
    assert_eq!(branch.points.len(), 4);
    let mu_proj = riesz0().coeffs().project_x4().expect("projection");
    for p in &branch.points {
        let expected = mu_proj.scale(-p.a);
        let dev = p.w.sub(&expected).sup_norm(1024);
        assert!(dev <= 1e-9, "a={}: ‖W + a·Π₀ρ‖_∞ = {dev:.3e}", p.a);
        assert!((p.log_c + p.a).abs() <= 1e-9, "a={}: log C = {}", p.a, p.log_c);
        assert!(p.residual <= solver.cfg().tol_residual);
    }
}

#[test]
fn singular_mode_first_order_response_with_richardson() {
    let cfg = small_cfg(SolveMode::Singular, vec![0.0, 0.005, 0.01, 0.02]);
    let solver = Solver::new(cfg).expect("solver");
    let branch = solver.solve_branch().expect("branch");
    let ratio = |p: &qdom_core::solver::BranchPoint| p.w.coeff(4).re / p.a;
    let r1 = ratio(&branch.points[1]);
    let r2 = ratio(&branch.points[2]);
    let r3 = ratio(&branch.points[3]);
    for (r, a) in [(r1, 0.005), (r2, 0.01), (r3, 0.02)] {
        assert!(
            (r - 1.0 / 3.0).abs() <= 2.0 * a,
            "a={a}: Ŵ(4)/a = {r}, expected 1/3 ± {:.1e}",
            2.0 * a
        );
    }
    // The deviation is quadratic in a, so one Richardson step collapses it.
    let extrapolated = (4.0 * r2 - r3) / 3.0;
    assert!(
        (extrapolated - 1.0 / 3.0).abs() <= 1e-7,
        "Richardson value {extrapolated} should pin 1/3"
    );
}

#[test]
fn newton_and_picard_land_on_the_same_branch() {
    let mut picard = small_cfg(SolveMode::Singular, vec![0.0, 0.01, 0.02]);
    picard.use_newton = false;
    let mut newton = picard.clone();
    newton.use_newton = true;
    let bp = Solver::new(picard).expect("solver").solve_branch().expect("branch");
    let bn = Solver::new(newton).expect("solver").solve_branch().expect("branch");
    assert_eq!(bp.points.len(), bn.points.len());
    for (p, n) in bp.points.iter().zip(&bn.points) {
        let dev = p.w.sub(&n.w).coeff_sup();
        assert!(dev <= 1e-10, "a={}: Picard/Newton spread {dev:.3e}", p.a);
        assert!((p.log_c - n.log_c).abs() <= 1e-10);
    }
}

#[test]
fn linearization_matches_centered_finite_differences() {
    let cfg = small_cfg(SolveMode::Singular, vec![0.0, 0.01]);
    let solver = Solver::new(cfg).expect("solver");
    let branch = solver.solve_branch().expect("branch");
    let p = &branch.points[1];
    let dpsi = solver.dpsi(&p.w, p.a).expect("linearization");
    let mut rng = seeded_rng(5);
    for eps in [1e-4, 1e-5] {
        for _ in 0..3 {
            let h = random_x4_poly(&mut rng, 64, 1.0);
            let analytic = dpsi.apply(&h).expect("apply");
            let plus = solver.psi(&p.w.add_scaled(&h, Complex64::new(eps, 0.0)), p.a).expect("psi");
            let minus =
                solver.psi(&p.w.add_scaled(&h, Complex64::new(-eps, 0.0)), p.a).expect("psi");
            let fd = plus.psi.sub(&minus.psi).scale(1.0 / (2.0 * eps));
            let err = fd.sub(&analytic).coeff_sup();
            let scale = analytic.coeff_sup().max(1e-12);
            assert!(
                err / scale <= 1e-6,
                "eps={eps}: relative FD mismatch {:.3e}",
                err / scale
            );
        }
    }
}

#[test]
fn certificate_holds_at_doubled_radial_resolution() {
    let cfg = small_cfg(SolveMode::Singular, vec![0.0, 0.01, 0.02]);
    let solver = Solver::new(cfg).expect("solver");
    let branch = solver.solve_branch().expect("branch");
    for p in &branch.points {
        let sup = solver.certificate_sup(p, 2).expect("certificate");
        assert!(sup <= 1e-9, "a={}: certificate sup {sup:.3e}", p.a);
    }
}

#[test]
fn iteration_budget_exhaustion_is_reported_not_panicked() {
    let mut cfg = small_cfg(SolveMode::Singular, vec![0.0, 0.02]);
    cfg.max_iter = 1;
    let branch = Solver::new(cfg).expect("solver").solve_branch().expect("branch");
    assert_eq!(branch.points.len(), 1, "only the trivial origin point is accepted");
    assert!(matches!(branch.stop, StopReason::MaxIterExceeded));
    let detail = branch.stop_detail.as_deref().unwrap_or("");
    assert!(detail.contains("0.02"), "stop detail names the failing parameter: {detail}");
}

#[test]
fn contraction_estimate_is_small_near_origin() {
    // DΓ vanishes identically at a = 0, so the measured contraction factor
    // reflects finite-difference noise there and grows like O(a) after.
    let cfg = small_cfg(SolveMode::Singular, vec![0.0, 0.005, 0.02]);
    let branch = Solver::new(cfg).expect("solver").solve_branch().expect("branch");
    assert!(branch.points[0].contraction_est <= 1e-5);
    for p in &branch.points[1..] {
        assert!(
            p.contraction_est <= 1.0 * p.a,
            "a={}: contraction estimate {} too large",
            p.a,
            p.contraction_est
        );
        assert!(p.contraction_est < 1.0, "must certify a contraction");
    }
}

#[test]
fn a_grid_must_start_at_zero_and_increase() {
    let mut cfg = small_cfg(SolveMode::Singular, vec![0.01, 0.02]);
    assert!(Solver::new(cfg.clone()).is_err(), "grid without origin rejected");
    cfg.a_grid = vec![0.0, 0.02, 0.01];
    assert!(Solver::new(cfg).is_err(), "non-monotone grid rejected");
}

#[test]
fn band_must_fit_angular_grid() {
    let mut cfg = small_cfg(SolveMode::Singular, vec![0.0]);
    cfg.n_max = 128;
    cfg.m = 256; // capacity (256−1)/2 = 127 < 128
    assert!(Solver::new(cfg).is_err());
}

#[test]
fn solved_weight_stays_in_symmetry_class() {
    let cfg = small_cfg(SolveMode::Singular, vec![0.0, 0.02]);
    let branch = Solver::new(cfg).expect("solver").solve_branch().expect("branch");
    let w = &branch.points[1].w;
    assert!(w.is_x4(1e-12), "W must stay in the quarter-turn class");
    let mut mean = Complex64::ZERO;
    for (n, c) in w.iter_modes() {
        if n == 0 {
            mean = c;
        }
    }
    assert!(mean.norm() <= 1e-14, "W must be mean-free");
    assert!(branch.points[1].projection_drift <= 1e-12);
}

#[test]
fn explicit_measure_reproduces_riesz_branch() {
    // Feeding the depth-0 partial product as an explicit coefficient list
    // must give the same branch as the built-in generator.
    let riesz = riesz0();
    let mut modes = Vec::new();
    for (n, c) in riesz.coeffs().iter_modes() {
        if n >= 0 && c.norm() > 0.0 {
            modes.push((n, c));
        }
    }
    let explicit = TrigPolynomial::from_modes(8, &modes, true).expect("poly");
    let spec = MeasureSpec::explicit(explicit).expect("measure");
    let mut cfg_a = small_cfg(SolveMode::Singular, vec![0.0, 0.01]);
    let mut cfg_b = cfg_a.clone();
    cfg_a.measure = riesz;
    cfg_b.measure = spec;
    let ba = Solver::new(cfg_a).expect("solver").solve_branch().expect("branch");
    let bb = Solver::new(cfg_b).expect("solver").solve_branch().expect("branch");
    let dev = ba.points[1].w.sub(&bb.points[1].w).coeff_sup();
    assert!(dev <= 1e-13, "explicit/built-in spread {dev:.3e}");
}
