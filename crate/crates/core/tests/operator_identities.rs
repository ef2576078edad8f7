//! Integration checks for the sweep operator `𝒯`, the composite `K = 𝒯∘P`,
//! and the brute-force cross-validation path, exercised through the public
//! API the way downstream callers use it.

use num_complex::Complex64;
use qdom_core::balayage::{balayage, balayage_bruteforce, fubini_check, operator_k, poisson_moment_batch};
use qdom_core::testkit::{seeded_rng, random_real_poly, FieldSpec};
use qdom_core::{PolarGrid, TrigPolynomial};

#[test]
fn k_scales_every_mode_by_inverse_order_plus_one() {
    let grid = PolarGrid::new(64, 512);
    let band = 80usize;
    for n in [0i64, 1, 2, 3, 7, 16, 33, 64, -1, -5, -32, -64] {
        let mut e_n = TrigPolynomial::from_modes(band, &[], false).expect("empty");
        e_n.set_coeff(n, Complex64::ONE).expect("band");
        let ke = operator_k(&e_n, &grid).expect("operator");
        let lambda = 1.0 / (n.unsigned_abs() as f64 + 1.0);
        let mut worst = 0.0f64;
        for (m, c) in ke.iter_modes() {
            let expect = if m == n { Complex64::new(lambda, 0.0) } else { Complex64::ZERO };
            worst = worst.max((c - expect).norm());
        }
        assert!(worst <= 1e-10, "mode {n}: off-diagonal/diagonal error {worst:.3e}");
    }
}

#[test]
fn poisson_moments_match_closed_form_on_boundary_ring() {
    let orders: Vec<u32> = (0..=16).collect();
    for k in 0..8 {
        let zeta = Complex64::cis(2.0 * std::f64::consts::PI * k as f64 / 8.0);
        for (n, (numeric, analytic)) in
            orders.iter().zip(poisson_moment_batch(&orders, zeta, 48))
        {
            let err = (numeric - analytic).norm();
            assert!(err <= 1e-9, "n={n} k={k}: |num−ζⁿ/(n+1)| = {err:.3e}");
        }
    }
}

#[test]
fn fubini_pairing_agrees_for_random_data() {
    let grid = PolarGrid::new(48, 256);
    let mut rng = seeded_rng(11);
    for trial in 0..20 {
        let h = random_real_poly(&mut rng, 24, 1.0);
        let spec = FieldSpec::random(&mut rng, 16, 5, true);
        let field = spec.materialize(&grid);
        let (circle, disk) = fubini_check(&h, &field).expect("pairing");
        let err = (circle - disk).norm();
        assert!(err <= 1e-9, "trial {trial}: |⟨𝒯G,h⟩−⟨G,Ph⟩| = {err:.3e}");
    }
}

#[test]
fn diagonal_rule_matches_brute_force_double_quadrature() {
    let grid = PolarGrid::new(12, 128);
    let m_out = 64usize;
    let mut rng = seeded_rng(7);
    for trial in 0..20 {
        let spec = FieldSpec::random(&mut rng, 10, 4, true);
        let field = spec.materialize(&grid);
        let fast = balayage(&field, 10).expect("diagonal");
        let samples = fast.sample_real(m_out).expect("sample");
        let brute = balayage_bruteforce(&field, m_out).expect("brute");
        let mut worst = 0.0f64;
        for (s, b) in samples.iter().zip(&brute) {
            worst = worst.max((s - b.re).abs());
        }
        assert!(worst <= 1e-8, "trial {trial}: sup|fast−brute| = {worst:.3e}");
    }
}

#[test]
fn diagonal_rule_matches_analytic_monomial_sweep() {
    // Fields r^p e^{inθ} sweep to 2/(p+|n|+2) e^{inθ}; the testkit oracle
    // carries the closed form, so this pins the quadrature end to end.
    let grid = PolarGrid::new(48, 256);
    let mut rng = seeded_rng(23);
    for _ in 0..10 {
        let spec = FieldSpec::random(&mut rng, 20, 6, false);
        let field = spec.materialize(&grid);
        let swept = balayage(&field, 24).expect("diagonal");
        for (n, c) in swept.iter_modes() {
            let expect = spec.balayage_mode(n);
            assert!(
                (c - expect).norm() <= 1e-12,
                "mode {n}: {c} vs oracle {expect}"
            );
        }
    }
}

#[test]
fn sweep_of_unit_density_is_unit_boundary_weight() {
    let grid = PolarGrid::new(32, 128);
    let one = qdom_core::grid::PolarField::constant(&grid, 1.0);
    let swept = balayage(&one, 8).expect("diagonal");
    for (n, c) in swept.iter_modes() {
        let expect = if n == 0 { Complex64::ONE } else { Complex64::ZERO };
        assert!((c - expect).norm() <= 1e-14, "mode {n}: {c}");
    }
}

#[test]
fn holder_seminorm_of_sweep_is_grid_stable() {
    // The fitted constant in ‖𝒯G‖_{C^{1/2}} ≤ C‖G‖_∞ must not drift when
    // both quadrature grids are refined.
    let coarse = PolarGrid::new(48, 256);
    let fine = PolarGrid::new(96, 512);
    let mut rng = seeded_rng(31);
    for trial in 0..8 {
        let spec = FieldSpec::random(&mut rng, 20, 5, true);
        let sup = spec.sup_hint();
        let est = |grid: &std::sync::Arc<PolarGrid>, m: usize| -> f64 {
            let swept = balayage(&spec.materialize(grid), 24).expect("diagonal");
            swept.holder_estimate(0.5, m).expect("estimate").total() / sup
        };
        let c_coarse = est(&coarse, 1024);
        let c_fine = est(&fine, 2048);
        let drift = (c_fine - c_coarse).abs() / c_coarse;
        assert!(
            drift <= 0.2,
            "trial {trial}: constant moved {:.1}% ({c_coarse:.6} → {c_fine:.6})",
            100.0 * drift
        );
    }
}
