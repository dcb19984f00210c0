//! Composite Gauss-Legendre quadrature with dyadic refinement.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Resolution and stopping rule for one-dimensional integrals.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
    /// Stop once successive estimates differ by less than this (relative).
    pub rel_tol: f64,
    /// Absolute floor for the stopping rule, for integrals that are ~0.
    pub abs_tol: f64,
    /// Panels per unit length on the first pass are `2^min_level`.
    pub min_level: u32,
    /// Give up after this many doublings.
    pub max_level: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 16,
            rel_tol: 1e-10,
            abs_tol: 1e-28,
            min_level: 0,
            max_level: 11,
        }
    }
}

/// Integration result with the last refinement change as error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static G16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    if n == 16 {
        return G16.get_or_init(|| legendre_nodes(16)).clone();
    }
    legendre_nodes(n)
}

/// Fixed composite rule: `panels` equal panels over `[a, b]`.
pub fn composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, nodes: usize) -> f64 {
    composite_c(&|x| Complex64::new(f(x), 0.0), a, b, panels, nodes)
        .0
        .re
}

/// Composite rule for `f` and `|f|` at once.
fn composite_c(
    f: &impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    panels: usize,
    nodes: usize,
) -> (Complex64, f64) {
    let (x, w) = gauss_legendre(nodes);
    let h = (b - a) / panels as f64;
    let (mut total, mut mass) = (Complex64::new(0.0, 0.0), 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let (mut s, mut m) = (Complex64::new(0.0, 0.0), 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            let v = f(mid + 0.5 * h * xi);
            s += v * *wi;
            m += wi * v.norm();
        }
        total += s * (0.5 * h);
        mass += 0.5 * h * m;
    }
    (total, mass)
}

/// Converged when the change is small relative to the value, or relative to
/// `∫|f|` for integrals that cancel to ~0.
fn settled(delta: f64, cur: f64, prev: f64, mass: f64, spec: &QuadratureSpec) -> bool {
    delta <= spec.rel_tol * cur.max(prev) || delta <= spec.rel_tol * mass || delta <= spec.abs_tol
}

fn refine(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    cells: usize,
    levels: std::ops::RangeInclusive<u32>,
    spec: &QuadratureSpec,
) -> Result<ComplexEstimate> {
    let mut level = *levels.start();
    let mut prev = composite_c(&f, a, b, cells << level, spec.nodes).0;
    let mut delta = f64::INFINITY;
    while level < *levels.end() {
        level += 1;
        let (cur, mass) = composite_c(&f, a, b, cells << level, spec.nodes);
        delta = (cur - prev).norm();
        if settled(delta, cur.norm(), prev.norm(), mass, spec) {
            return Ok(ComplexEstimate {
                value: cur,
                error: delta,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged {
        estimate: prev.re,
        delta,
    })
}

/// Complex integral with the last refinement change as error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub value: Complex64,
    pub error: f64,
}

fn real(e: Result<ComplexEstimate>) -> Result<Estimate> {
    e.map(|c| Estimate {
        value: c.value.re,
        error: c.error,
    })
}

fn symmetric_range(half_width: f64) -> (f64, f64, usize) {
    let a = (-half_width).floor();
    let b = half_width.ceil().max(a + 1.0);
    (a, b, (b - a).round() as usize)
}

/// Integrates `f` over `[-half_width, half_width]` on integer-aligned panels,
/// doubling the panel count until the estimate settles.
pub fn integrate_symmetric(
    f: impl Fn(f64) -> f64,
    half_width: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    real(integrate_symmetric_c(
        move |x| Complex64::new(f(x), 0.0),
        half_width,
        spec,
    ))
}

pub fn integrate_symmetric_c(
    f: impl Fn(f64) -> Complex64,
    half_width: f64,
    spec: &QuadratureSpec,
) -> Result<ComplexEstimate> {
    let (a, b, units) = symmetric_range(half_width);
    refine(f, a, b, units, spec.min_level..=spec.max_level, spec)
}

fn aligned_range(half_width: f64, x0: f64, dx: f64) -> (f64, f64, usize) {
    let i0 = ((-half_width - x0) / dx).floor();
    let i1 = ((half_width - x0) / dx).ceil().max(i0 + 1.0);
    (x0 + i0 * dx, x0 + i1 * dx, (i1 - i0).round() as usize)
}

/// Like [`integrate_symmetric`] but with panels aligned to the breakpoint
/// lattice `x0 + k·dx`, for piecewise-smooth integrands such as interpolated
/// samples.
pub fn integrate_aligned(
    f: impl Fn(f64) -> f64,
    half_width: f64,
    x0: f64,
    dx: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    real(integrate_aligned_c(
        move |x| Complex64::new(f(x), 0.0),
        half_width,
        x0,
        dx,
        spec,
    ))
}

pub fn integrate_aligned_c(
    f: impl Fn(f64) -> Complex64,
    half_width: f64,
    x0: f64,
    dx: f64,
    spec: &QuadratureSpec,
) -> Result<ComplexEstimate> {
    let (a, b, cells) = aligned_range(half_width, x0, dx);
    refine(f, a, b, cells, 0..=spec.max_level.min(6), spec)
}
