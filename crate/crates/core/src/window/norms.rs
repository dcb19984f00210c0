//! Quadrature norms and inner products of windows, and the constants built
//! from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{Smoothness, Window};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_aligned, integrate_aligned_c, integrate_symmetric, integrate_symmetric_c, Estimate,
    QuadratureSpec,
};

/// The norms that enter the distance bounds. `error` is the largest
/// refinement change among the underlying quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowNorms {
    /// `‖g‖`
    pub l2: f64,
    /// `‖g′‖`
    pub d1: f64,
    /// `‖Xg‖`
    pub x1: f64,
    /// `‖X²g‖`
    pub x2: f64,
    /// `‖ωĝ‖`
    pub w1: f64,
    /// `‖ω²ĝ‖`
    pub w2: f64,
    /// `‖Xg′‖`
    pub xd1: f64,
    pub error: f64,
}

fn merged_breakpoints(f: &Window, g: &Window) -> Option<(f64, f64)> {
    match (f.breakpoints(), g.breakpoints()) {
        (Some(a), Some(b)) => Some(if b.1 < a.1 { b } else { a }),
        (a, b) => a.or(b),
    }
}

fn integrate(
    f: impl Fn(f64) -> f64,
    half_width: f64,
    bp: Option<(f64, f64)>,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    match bp {
        Some((x0, dx)) => integrate_aligned(f, half_width, x0, dx, spec),
        None => integrate_symmetric(f, half_width, spec),
    }
}

/// `‖g‖²` with its quadrature error estimate.
pub fn l2_norm_sq(w: &Window, spec: &QuadratureSpec) -> Result<Estimate> {
    integrate(|x| w.eval(x).norm_sqr(), w.support(), w.breakpoints(), spec)
}

pub fn l2_norm(w: &Window, spec: &QuadratureSpec) -> Result<f64> {
    Ok(l2_norm_sq(w, spec)?.value.max(0.0).sqrt())
}

/// `⟨f, g⟩ = ∫ f ḡ`, linear in the first argument.
pub fn inner(f: &Window, g: &Window, spec: &QuadratureSpec) -> Result<Complex64> {
    let t = f.support().min(g.support());
    let bp = merged_breakpoints(f, g);
    let h = |x: f64| f.eval(x) * g.eval(x).conj();
    let e = match bp {
        Some((x0, dx)) => integrate_aligned_c(h, t, x0, dx, spec)?,
        None => integrate_symmetric_c(h, t, spec)?,
    };
    Ok(e.value)
}

/// Computes all [`WindowNorms`]. Frequency-side norms are integrated on the
/// Fourier transform when it decays rapidly, otherwise obtained from
/// `‖ωĝ‖ = ‖g′‖/2π` and `‖ω²ĝ‖ = ‖g″‖/4π²`.
pub fn norms(w: &Window, spec: &QuadratureSpec) -> Result<WindowNorms> {
    let mut err: f64 = 0.0;
    let mut nrm = |v: &Window| -> Result<f64> {
        let e = l2_norm_sq(v, spec)?;
        err = err.max(e.error);
        Ok(e.value.max(0.0).sqrt())
    };
    let d = w.derivative();
    let l2 = nrm(w)?;
    let d1 = nrm(&d)?;
    let x1 = nrm(&w.apply_x())?;
    let x2 = nrm(&w.apply_x2())?;
    let xd1 = nrm(&d.apply_x())?;
    let f = w.fourier_transform();
    let (w1, w2) = if f.rapidly_decaying() {
        (nrm(&f.apply_x())?, nrm(&f.apply_x2())?)
    } else {
        let d2 = if w.smoothness() >= Smoothness::H2 {
            nrm(&d.derivative())?
        } else {
            f64::INFINITY
        };
        (d1 / (2.0 * PI), d2 / (4.0 * PI * PI))
    };
    Ok(WindowNorms {
        l2,
        d1,
        x1,
        x2,
        w1,
        w2,
        xd1,
        error: err,
    })
}

/// `C_g = 3π² max{‖X²g‖, ‖ω²ĝ‖, ‖Xg′‖}`, the constant of the quadratic
/// remainder of `(a,b) ↦ π(a,b)g`.
pub fn cg_constant(w: &Window, spec: &QuadratureSpec) -> Result<f64> {
    if w.smoothness() < Smoothness::H2 {
        return Err(Error::NotH2);
    }
    let n = norms(w, spec)?;
    Ok(cg_from_norms(&n))
}

pub fn cg_from_norms(n: &WindowNorms) -> f64 {
    3.0 * PI * PI * n.x2.max(n.w2).max(n.xd1)
}

/// `‖π(a,b)g − g − (−a g′ + 2πib Xg)‖`.
pub fn tf_map_remainder(w: &Window, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    let r = w.tf_shift(a, b).sub(w).sub(&w.linearized_shift(a, b));
    l2_norm(&r, spec)
}

/// `|sinc(x) − e^{-iπx}|` with `sinc(x) = sin(πx)/(πx)`.
pub fn sinc_gap(x: f64) -> f64 {
    let s = if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    };
    (Complex64::new(s, 0.0) - Complex64::from_polar(1.0, -PI * x)).norm()
}
