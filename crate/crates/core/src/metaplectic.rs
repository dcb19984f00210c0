//! Unitary operators `U_B` with `U_B ρ(z) = ρ(Bz) U_B` for `B ∈ SL(2,R)`,
//! built from a generator factorization:
//! `Rotation90 ↦ ℱ`, `Dilation(α) ↦ D_α`, `Shear(β) ↦ C_β`.
//!
//! With these choices each generator intertwines `ρ` exactly, so products do
//! too. `U_B` itself is only determined up to a unimodular constant, and
//! comparisons between operators should go through [`align_phase`].

use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{factor_sl2, mat_apply, Mat2, Sl2Factor, Sl2Factorization};
use crate::quadrature::QuadratureSpec;
use crate::window::{inner, l2_norm, Window};

/// `D_α f(x) = |α|^{1/2} f(αx)`.
pub fn dilation(w: &Window, alpha: f64) -> Result<Window> {
    w.dilation(alpha)
}

/// `C_β f(x) = e^{πiβx²} f(x)`.
pub fn chirp(w: &Window, beta: f64) -> Result<Window> {
    w.chirp(beta)
}

pub fn fourier(w: &Window) -> Window {
    w.fourier_transform()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaplecticOp {
    /// `B = factors[0] · factors[1] · ...`; the operator applies the last
    /// factor first.
    pub factors: Vec<Sl2Factor>,
}

impl MetaplecticOp {
    pub fn identity() -> Self {
        Self {
            factors: Vec::new(),
        }
    }

    pub fn from_factorization(f: &Sl2Factorization) -> Self {
        Self {
            factors: f.factors.clone(),
        }
    }

    pub fn for_matrix(b: &Mat2) -> Result<Self> {
        Ok(Self::from_factorization(&factor_sl2(b)?))
    }

    pub fn apply(&self, w: &Window) -> Result<Window> {
        let mut out = w.clone();
        for f in self.factors.iter().rev() {
            out = match *f {
                Sl2Factor::Rotation90 => fourier(&out),
                Sl2Factor::Dilation(a) => dilation(&out, a)?,
                Sl2Factor::Shear(b) => chirp(&out, b)?,
            };
        }
        Ok(out)
    }

    pub fn matrix(&self) -> Mat2 {
        Sl2Factorization {
            b: [[1.0, 0.0], [0.0, 1.0]],
            factors: self.factors.clone(),
        }
        .product()
    }
}

/// Best unimodular `c` with `a ≈ c·b` and the relative defect `‖a − c b‖/‖a‖`.
pub fn align_phase(a: &Window, b: &Window, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
    let ip = inner(a, b, spec)?;
    let c = if ip.norm() > 0.0 {
        ip / ip.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let na = l2_norm(a, spec)?;
    // the difference is compared against ‖a‖, not resolved to its own scale
    let floor = QuadratureSpec {
        abs_tol: spec.abs_tol.max(1e-14 * na * na),
        ..*spec
    };
    let d = l2_norm(&a.sub(&b.scale(c)), &floor)?;
    Ok((c, if na > 0.0 { d / na } else { d }))
}

/// `min_c ‖U_B ρ(z) w − c ρ(Bz) U_B w‖ / ‖w‖` over unimodular `c`.
pub fn intertwining_defect(
    op: &MetaplecticOp,
    w: &Window,
    z: [f64; 2],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let bz = mat_apply(&op.matrix(), z);
    let lhs = op.apply(&w.rho_shift(z[0], z[1]))?;
    let rhs = op.apply(w)?.rho_shift(bz[0], bz[1]);
    let (_, d) = align_phase(&lhs, &rhs, spec)?;
    let nw = l2_norm(w, spec)?;
    let nl = l2_norm(&lhs, spec)?;
    Ok(d * nl / nw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn empty_op_is_identity() {
        let g = Window::hermite(1);
        let u = MetaplecticOp::identity().apply(&g).unwrap();
        assert_eq!(u.eval(0.4), g.eval(0.4));
    }

    #[test]
    fn single_dilation() {
        let op = MetaplecticOp::for_matrix(&[[1.0 / 6.0, 0.0], [0.0, 6.0]]).unwrap();
        let u = op.apply(&Window::gaussian(1.0).unwrap()).unwrap();
        for &x in &[0.0, 0.05, 0.2] {
            let expect = 6f64.sqrt() * (-36.0 * PI * x * x).exp();
            assert!((u.eval(x).re - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn intertwining_for_generators() {
        let g = Window::gaussian(1.0).unwrap();
        for b in [
            [[1.0 / 6.0, 0.0], [0.0, 6.0]],
            [[0.0, 1.0], [-1.0, 0.0]],
            [[1.0, 0.0], [0.5, 1.0]],
            [[2.0, 1.0], [1.0, 1.0]],
        ] {
            let op = MetaplecticOp::for_matrix(&b).unwrap();
            let d = intertwining_defect(&op, &g, [0.3, 0.7], &q()).unwrap();
            assert!(d < 1e-5, "{b:?}: {d}");
        }
    }

    #[test]
    fn norm_preserved() {
        let g = Window::hermite(2);
        let op = MetaplecticOp::for_matrix(&[[2.0, 1.0], [1.0, 1.0]]).unwrap();
        let u = op.apply(&g).unwrap();
        let n = l2_norm(&u, &q()).unwrap();
        assert!((n - 1.0).abs() < 1e-5);
    }
}
