//! Independent oracles shared by the integration tests and the acceptance
//! runner.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cis(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

/// `⟨π(a1,b1)φ, π(a2,b2)φ⟩` for `φ(x) = e^{-πx²}` in closed form.
pub fn gaussian_tf_inner(l1: [f64; 2], l2: [f64; 2]) -> Complex64 {
    let d = l1[0] - l2[0];
    let beta = l1[1] - l2[1];
    let c = 0.5 * (l1[0] + l2[0]);
    cis(2.0 * PI * beta * c)
        * ((-0.5 * PI * d * d).exp() * (-0.5 * PI * beta * beta).exp() * 0.5f64.sqrt())
}

/// `dist(π(μ)φ, span{π(λ)φ : λ ∈ patch})` by least squares on the closed-form
/// Gram matrix.
pub fn gaussian_patch_distance(patch: &[[f64; 2]], mu: [f64; 2]) -> f64 {
    let n = patch.len();
    let gram = CMat::from_fn(n, n, |i, j| gaussian_tf_inner(patch[j], patch[i]));
    let rhs = DVector::from_fn(n, |i, _| gaussian_tf_inner(mu, patch[i]));
    let coef = gram
        .clone()
        .cholesky()
        .expect("Gram positive definite")
        .solve(&rhs);
    let captured: Complex64 = rhs.dotc(&coef);
    let total = 0.5f64.sqrt();
    (total - captured.re).max(0.0).sqrt()
}

/// Points `A(i, j)` for `|i| ≤ ni`, `|j| ≤ nj` around `center`.
pub fn lattice_patch(gen: [[f64; 2]; 2], center: [i64; 2], ni: i64, nj: i64) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for i in -ni..=ni {
        for j in -nj..=nj {
            let (a, b) = ((center[0] + i) as f64, (center[1] + j) as f64);
            out.push([gen[0][0] * a + gen[0][1] * b, gen[1][0] * a + gen[1][1] * b]);
        }
    }
    out
}

pub fn random_complex(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn random_matrix(r: &mut impl Rng, m: usize, n: usize) -> CMat {
    CMat::from_fn(m, n, |_, _| random_complex(r))
}

/// Random `m x n` matrix of rank at most `k`.
pub fn random_low_rank(r: &mut impl Rng, m: usize, n: usize, k: usize) -> CMat {
    random_matrix(r, m, k) * random_matrix(r, k, n)
}

/// Random unitary from the QR factorization of a random matrix.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> CMat {
    random_matrix(r, n, n).qr().q()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
