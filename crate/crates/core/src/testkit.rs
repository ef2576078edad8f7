//! Seeded generators for synthetic inputs: smooth disk fields with known
//! spectral structure, and random band-limited boundary polynomials.  Used by
//! the self-test battery and the test suites; deterministic given the seed.

use crate::fourier::TrigPolynomial;
use crate::grid::{PolarField, PolarGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One separable term `coeff · r^p · e^{inθ}` of a synthetic disk field.
#[derive(Debug, Clone, Copy)]
pub struct FieldTerm {
    pub n: i64,
    pub p: u32,
    pub coeff: Complex64,
}

/// A finite sum of separable terms — evaluable anywhere in the disk, so the
/// same field can be materialized on any grid at any resolution.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub terms: Vec<FieldTerm>,
    pub real: bool,
}

impl FieldSpec {
    /// Random field with modes in `|n| <= n_band` and radial powers keeping
    /// each term bounded; real-valued when `real` is set.
    pub fn random(rng: &mut ChaCha8Rng, n_band: usize, max_terms: usize, real: bool) -> Self {
        let count = rng.gen_range(1..=max_terms.max(1));
        let mut terms = Vec::new();
        for _ in 0..count {
            let n = rng.gen_range(-(n_band as i64)..=n_band as i64);
            // keep r^p smooth at the origin: p at least |n|, same parity
            let extra = 2 * rng.gen_range(0..4u32);
            let p = n.unsigned_abs() as u32 + extra;
            let coeff = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if real {
                if n == 0 {
                    terms.push(FieldTerm { n, p, coeff: Complex64::new(coeff.re, 0.0) });
                } else {
                    let half = 0.5 * coeff;
                    terms.push(FieldTerm { n, p, coeff: half });
                    terms.push(FieldTerm { n: -n, p, coeff: half.conj() });
                }
            } else {
                terms.push(FieldTerm { n, p, coeff });
            }
        }
        Self { terms, real }
    }

    pub fn eval(&self, r: f64, theta: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * r.powi(t.p as i32) * Complex64::cis(t.n as f64 * theta))
            .sum()
    }

    pub fn materialize(&self, grid: &Arc<PolarGrid>) -> PolarField {
        PolarField::from_fn(grid, self.real, |r, t| {
            let v = self.eval(r, t);
            if self.real {
                Complex64::new(v.re, 0.0)
            } else {
                v
            }
        })
    }

    /// Crude sup bound `Σ |coeff|` (each term has modulus ≤ |coeff| in 𝔻).
    pub fn sup_hint(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Exact Poisson balayage mode of this field:
    /// `(𝒯G)^(n) = Σ_terms [n = n_t] coeff · ∫_0^1 r^{p+|n|} 2r dr`.
    pub fn balayage_mode(&self, n: i64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.n == n)
            .map(|t| t.coeff * 2.0 / (t.p as f64 + n.unsigned_abs() as f64 + 2.0))
            .sum()
    }
}

/// Random real trigonometric polynomial with the given band.
pub fn random_real_poly(rng: &mut ChaCha8Rng, n_max: usize, scale: f64) -> TrigPolynomial {
    let mut modes = Vec::new();
    modes.push((0i64, Complex64::new(scale * rng.gen_range(-1.0..1.0), 0.0)));
    for n in 1..=n_max as i64 {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        modes.push((n, scale * c));
    }
    TrigPolynomial::from_modes(n_max, &modes, true).expect("modes stay in band")
}

/// Random real polynomial supported on nonzero multiples of four — the
/// solver's unknown space.
pub fn random_x4_poly(rng: &mut ChaCha8Rng, n_max: usize, scale: f64) -> TrigPolynomial {
    let mut modes = Vec::new();
    let mut n = 4i64;
    while n <= n_max as i64 {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        modes.push((n, scale * c));
        n += 4;
    }
    TrigPolynomial::from_modes(n_max, &modes, true).expect("modes stay in band")
}
