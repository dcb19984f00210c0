//! Zak transform `Zg(x,ω) = Σ_k e^{2πikω} g(x-k)`, grid fields on the unit
//! square, its inversion, and the matrix field
//! `A_g(x,ω) = P^{-1/2} (Zg(x + k/P - ℓ/Q, ω))_{k,ℓ}`.
//!
//! Sums are truncated to the `k` for which `x - k` lies within the window's
//! support hint (plus one unit on each side). Windows with only algebraic
//! decay are summed the same way; the tail is then not negligible in general.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cis2pi, CMat};
use crate::par;
use crate::window::{Node, Samples, Smoothness, Window};

/// Truncation rule for a single Zak evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZakPointSpec {
    /// `Some(K)` sums exactly `k ∈ [-K, K]`; `None` picks the range from the
    /// support hint and uses the covariance shortcuts for shifted and
    /// synthesized windows.
    pub trunc_k: Option<usize>,
}

fn direct_range(g: &Node, x: f64, w: f64, k0: i64, k1: i64) -> Complex64 {
    let step = cis2pi(w);
    let mut e = cis2pi(k0 as f64 * w);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in k0..=k1 {
        acc += e * g.eval(x - k as f64);
        e *= step;
    }
    acc
}

fn zak_node(g: &Node, x: f64, w: f64) -> Complex64 {
    match g {
        Node::Zero => Complex64::new(0.0, 0.0),
        Node::Scale(c, n) => c * zak_node(n, x, w),
        Node::Sum(v) => v.iter().map(|n| zak_node(n, x, w)).sum(),
        // Z[π(a,b)g](x,ω) = e^{2πibx} Zg(x-a, ω-b)
        Node::TfShift { a, b, inner } => cis2pi(b * x) * zak_node(inner, x - a, w - b),
        Node::Synth(s) => {
            let q = s.q as f64;
            s.groups
                .iter()
                .map(|(m, terms)| zak_node(&s.base, x - *m as f64 / q, w) * s.modulation(terms, x))
                .sum()
        }
        _ => {
            let t = g.support();
            let k0 = (x - t).floor() as i64 - 1;
            let k1 = (x + t).ceil() as i64 + 1;
            direct_range(g, x, w, k0, k1)
        }
    }
}

/// `Zg(x,ω)` with automatic truncation.
pub fn zak(g: &Window, x: f64, w: f64) -> Complex64 {
    zak_node(g.node(), x, w)
}

pub fn zak_with(g: &Window, x: f64, w: f64, spec: ZakPointSpec) -> Complex64 {
    match spec.trunc_k {
        Some(k) => zak_direct(g, x, w, k),
        None => zak(g, x, w),
    }
}

/// Plain truncated sum over `k ∈ [-K, K]`.
pub fn zak_direct(g: &Window, x: f64, w: f64, k: usize) -> Complex64 {
    direct_range(g.node(), x, w, -(k as i64), k as i64)
}

/// `(∂₁Zg, ∂₂Zg)` from `∂₁Zg = Z(g′)` and `∂₂Zg = -2πi(Z(Xg) - x·Zg)`.
pub fn zak_partials(g: &Window, x: f64, w: f64) -> Result<(Complex64, Complex64)> {
    if g.smoothness() < Smoothness::H1 {
        return Err(Error::NotH1);
    }
    Ok(zak_partials_of(&g.derivative(), &g.apply_x(), g, x, w))
}

/// Same as [`zak_partials`] with `g′` and `Xg` supplied by the caller, for
/// repeated evaluation.
pub fn zak_partials_of(
    dg: &Window,
    xg: &Window,
    g: &Window,
    x: f64,
    w: f64,
) -> (Complex64, Complex64) {
    let d1 = zak(dg, x, w);
    let d2 = Complex64::new(0.0, -2.0 * std::f64::consts::PI) * (zak(xg, x, w) - zak(g, x, w) * x);
    (d1, d2)
}

/// Midpoint samples `Zg(x_j, ω_i)`, `x_j = (j+½)/mx`, `ω_i = (i+½)/mw`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakField {
    pub mx: usize,
    pub mw: usize,
    /// Row-major in `j` (the `x` index).
    pub values: Vec<Complex64>,
}

impl ZakField {
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.mx as f64
    }

    pub fn omega(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.mw as f64
    }

    pub fn get(&self, j: usize, i: usize) -> Complex64 {
        self.values[j * self.mw + i]
    }

    /// Grid mean of `|Zg|²`, an estimate of `‖g‖²` by unitarity of `Z`.
    pub fn parseval(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    pub fn min_modulus(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn zak_field(g: &Window, mx: usize, mw: usize) -> ZakField {
    zak_field_fn(|x, w| zak(g, x, w), mx, mw)
}

pub fn zak_field_fn<F>(f: F, mx: usize, mw: usize) -> ZakField
where
    F: Fn(f64, f64) -> Complex64 + Sync + Send,
{
    let values = par::map_range(mx * mw, |idx| {
        let (j, i) = (idx / mw, idx % mw);
        f((j as f64 + 0.5) / mx as f64, (i as f64 + 0.5) / mw as f64)
    });
    ZakField { mx, mw, values }
}

/// Recovers `g(x_j + m)` for `m ∈ [-n_range, n_range)` from the `m`-th
/// Fourier coefficient in `ω`: `g(x - k) = ∫₀¹ Zg(x,ω) e^{-2πikω} dω`.
pub fn inverse_zak(field: &ZakField, n_range: usize) -> Samples {
    let (mx, mw) = (field.mx, field.mw);
    let n = n_range as i64;
    let count = 2 * n_range * mx;
    let values = par::map_range(count, |idx| {
        let m = (idx / mx) as i64 - n;
        let j = idx % mx;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..mw {
            acc += field.get(j, i) * cis2pi(m as f64 * field.omega(i));
        }
        acc / mw as f64
    });
    Samples::new(-(n as f64) + 0.5 / mx as f64, 1.0 / mx as f64, values)
}

/// `ĝ(ω) ≈ Σ_j e^{-2πi x_j ω} Zg(x_j, ω) / m` (midpoint rule in `x`).
pub fn fourier_via_zak(g: &Window, w: f64, m: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let x = (j as f64 + 0.5) / m as f64;
        acc += cis2pi(-x * w) * zak(g, x, w);
    }
    acc / m as f64
}

/// `A_g(x,ω)`.
pub fn assemble_a(g: &Window, p: usize, q: usize, x: f64, w: f64) -> CMat {
    assemble_a_fn(|x, w| zak(g, x, w), p, q, x, w)
}

pub fn assemble_a_fn(
    z: impl Fn(f64, f64) -> Complex64,
    p: usize,
    q: usize,
    x: f64,
    w: f64,
) -> CMat {
    let s = (p as f64).sqrt().recip();
    DMatrix::from_fn(p, q, |k, l| {
        z(x + k as f64 / p as f64 - l as f64 / q as f64, w) * s
    })
}

/// `L_ω` with `A(x + 1/P, ω) = L_ω A(x, ω)`.
pub fn l_omega(p: usize, w: f64) -> CMat {
    let mut m = DMatrix::zeros(p, p);
    for k in 0..p - 1 {
        m[(k, k + 1)] = Complex64::new(1.0, 0.0);
    }
    m[(p - 1, 0)] = cis2pi(w);
    m
}

/// `M_ω` with `A(x - 1/Q, ω) = A(x, ω) M_ω`.
pub fn m_omega(q: usize, w: f64) -> CMat {
    let mut m = DMatrix::zeros(q, q);
    for l in 0..q - 1 {
        m[(l + 1, l)] = Complex64::new(1.0, 0.0);
    }
    m[(0, q - 1)] = cis2pi(-w);
    m
}

/// The field `z ↦ A_g(z)` for one window and separable lattice.
#[derive(Debug, Clone)]
pub struct MatrixField {
    window: Window,
    p: usize,
    q: usize,
}

impl MatrixField {
    pub fn new(window: Window, p: usize, q: usize) -> Self {
        Self { window, p, q }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn at(&self, x: f64, w: f64) -> CMat {
        assemble_a(&self.window, self.p, self.q, x, w)
    }

    /// Midpoint grid over `R_P = (0, 1/P) x (0, 1)`.
    pub fn grid(&self, mx: usize, mw: usize) -> MatrixGrid {
        let p = self.p;
        let points: Vec<(f64, f64)> = (0..mx * mw)
            .map(|idx| {
                let (j, i) = (idx / mw, idx % mw);
                (
                    (j as f64 + 0.5) / (mx * p) as f64,
                    (i as f64 + 0.5) / mw as f64,
                )
            })
            .collect();
        let mats = par::map_slice(&points, |&(x, w)| self.at(x, w));
        MatrixGrid {
            mx,
            mw,
            p,
            q: self.q,
            points,
            mats,
        }
    }
}

/// Samples of a `P x Q` matrix field on the midpoint grid of `R_P`.
#[derive(Debug, Clone)]
pub struct MatrixGrid {
    pub mx: usize,
    pub mw: usize,
    pub p: usize,
    pub q: usize,
    pub points: Vec<(f64, f64)>,
    pub mats: Vec<CMat>,
}

impl MatrixGrid {
    /// Area element of one cell of `R_P`.
    pub fn cell_area(&self) -> f64 {
        1.0 / (self.p * self.mx * self.mw) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gauss() -> Window {
        Window::gaussian(1.0).unwrap()
    }

    #[test]
    fn theta_value_at_origin() {
        let oracle: f64 = (-20i32..=20).map(|k| (-PI * (k * k) as f64).exp()).sum();
        assert!((oracle - 1.086_434_811_213_308).abs() < 1e-15);
        assert!((zak(&gauss(), 0.0, 0.0).re - oracle).abs() < 1e-14);
        assert!((zak_direct(&gauss(), 0.0, 0.0, 20).re - oracle).abs() < 1e-15);
    }

    #[test]
    fn quasi_periodicity() {
        let g = Window::hermite(2).tf_shift(0.3, 0.1);
        for &(x, w) in &[(0.1, 0.2), (0.77, 0.4), (-0.3, 0.9)] {
            let z = zak(&g, x, w);
            assert!((zak(&g, x + 1.0, w) - cis2pi(w) * z).norm() < 1e-10);
            assert!((zak(&g, x, w + 1.0) - z).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_window_field() {
        let f = zak_field(&Window::zero(), 4, 4);
        assert!(f.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn one_by_one_matrix() {
        let g = gauss();
        let a = assemble_a(&g, 1, 1, 0.3, 0.6);
        assert_eq!(a.shape(), (1, 1));
        assert!((a[(0, 0)] - zak(&g, 0.3, 0.6)).norm() < 1e-15);
    }

    #[test]
    fn partials_at_origin() {
        let g = gauss();
        let (_, d2) = zak_partials(&g, 0.0, 0.0).unwrap();
        assert!(d2.norm() < 1e-14);
        let xg = g.apply_x();
        for &w in &[0.1, 0.6] {
            let (_, d2) = zak_partials(&g, 0.0, w).unwrap();
            let expect = Complex64::new(0.0, -2.0 * PI) * zak(&xg, 0.0, w);
            assert!((d2 - expect).norm() < 1e-14);
        }
        assert_eq!(
            zak_partials(&Window::bspline(1).unwrap(), 0.0, 0.0).unwrap_err(),
            Error::NotH1
        );
    }
}
