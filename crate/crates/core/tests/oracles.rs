//! Library results against independent computations: closed-form Gaussian
//! Gram matrices, direct quadrature and algebraic identities.

mod common;

use common::*;
use num_complex::Complex64;
use zaklat::distance::{dist_shift, dist_shift_framed, ShiftFrame};
use zaklat::gabor::{GaborSystem, GridSpec};
use zaklat::lattice::{Lattice, SeparableLattice};
use zaklat::quadrature::QuadratureSpec;
use zaklat::window::{inner, l2_norm, Window};
use zaklat::zak::{inverse_zak, zak, zak_field};

#[test]
fn closed_form_gram_matches_quadrature() {
    let g = Window::gaussian(1.0).unwrap();
    let spec = QuadratureSpec::default();
    for (l1, l2) in [
        ([0.3, -0.2], [1.1, 0.7]),
        ([0.0, 0.0], [0.0, 0.0]),
        ([-0.5, 2.0], [0.25, -1.0]),
    ] {
        let q = inner(&g.tf_shift(l1[0], l1[1]), &g.tf_shift(l2[0], l2[1]), &spec).unwrap();
        assert!((q - gaussian_tf_inner(l1, l2)).norm() < 1e-12);
    }
}

#[test]
fn distance_matches_gram_least_squares_separable() {
    let s = GaborSystem::new(
        Window::gaussian(1.0).unwrap(),
        SeparableLattice::new(4, 3).unwrap(),
        GridSpec::square(48),
    )
    .unwrap();
    let patch = lattice_patch([[1.0 / 3.0, 0.0], [0.0, 4.0]], [0, 0], 60, 3);
    for mu in [[1.0 / 6.0, 0.0], [0.1, 1.3], [0.05, 2.0], [0.2, 3.1]] {
        let z = dist_shift(&s, mu).unwrap().dist;
        let o = gaussian_patch_distance(&patch, mu);
        assert!(
            (z - o).abs() <= 1e-3 * o.max(1e-3),
            "{mu:?}: zak {z} oracle {o}"
        );
    }
}

#[test]
fn distance_matches_gram_least_squares_after_reduction() {
    let g = Window::gaussian(1.0).unwrap();
    let lat = Lattice::separable(2.0, 2.0 / 3.0).unwrap();
    let (s, red) = GaborSystem::from_lattice(&g, &lat, GridSpec::square(48)).unwrap();
    let frame = ShiftFrame::original(&red, &lat, &g);
    let patch = lattice_patch(lat.generator(), [0, 0], 4, 10);
    for mu in [[1.0, 0.0], [0.5, 0.2], [1.3, 0.5], [0.0, 1.0 / 3.0]] {
        let z = dist_shift_framed(&s, &frame, mu).unwrap().dist;
        let o = gaussian_patch_distance(&patch, mu);
        assert!(
            (z - o).abs() <= 2e-3 * o.max(1e-3),
            "{mu:?}: zak {z} oracle {o}"
        );
    }
}

#[test]
fn zak_against_direct_sum() {
    let g = Window::hermite(2);
    for &(x, w) in &[(0.1, 0.2), (0.77, 0.51), (-0.3, 1.9)] {
        let mut direct = Complex64::new(0.0, 0.0);
        for k in -40i64..=40 {
            direct += cis(2.0 * std::f64::consts::PI * k as f64 * w) * g.eval(x - k as f64);
        }
        assert!((zak(&g, x, w) - direct).norm() < 1e-13);
    }
}

#[test]
fn inverse_zak_of_gaussian() {
    let g = Window::gaussian(1.0).unwrap();
    let f = zak_field(&g, 64, 64);
    let s = inverse_zak(&f, 8);
    let err = (0..s.values.len())
        .map(|i| {
            let x = s.x0 + i as f64 * s.dx;
            (s.values[i] - g.eval(x)).norm()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn dual_window_norm_from_gram_inverse() {
    // ‖g̃‖² = P ∫_{R_P} (A*A)^{-1}_{00}
    let s = GaborSystem::new(
        Window::gaussian(1.0).unwrap(),
        SeparableLattice::new(3, 2).unwrap(),
        GridSpec::square(32),
    )
    .unwrap();
    let d = s.dual_window().unwrap();
    let grid = s.grid();
    let mut acc = 0.0;
    for a in &grid.mats {
        let gi = (a.adjoint() * a).try_inverse().unwrap();
        acc += gi[(0, 0)].re;
    }
    let expect = acc * grid.cell_area() * s.p() as f64;
    let got = l2_norm(&d, &QuadratureSpec::default()).unwrap().powi(2);
    assert!((got - expect).abs() < 1e-6 * expect, "{got} vs {expect}");
}
