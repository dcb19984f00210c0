//! Canonical dual and tight windows, frame operator and projection, all as
//! pointwise matrix operations in the Zak domain.

use nalgebra::DVector;
use num_complex::Complex64;

use super::GaborSystem;
use crate::error::Result;
use crate::linalg::{pseudo_inverse, svd, CMat, ZERO};
use crate::par;
use crate::window::Window;

/// `U_r V_r*` from the SVD `A = UΣV*`, restricted to `σ > rank_tol·σ_max`:
/// equals `A(A*A)^{-1/2}` for full column rank.
pub(crate) fn polar_factor(a: &CMat, rank_tol: f64) -> CMat {
    let d = svd(a);
    let cut = rank_tol * d.s.first().copied().unwrap_or(0.0);
    let mut out = CMat::zeros(a.nrows(), a.ncols());
    for (k, &s) in d.s.iter().enumerate() {
        if s > cut && s > 0.0 {
            out += d.u.column(k) * d.v.column(k).adjoint();
        }
    }
    out
}

impl GaborSystem {
    /// `Ã = (A†)*`, which is `A(A*A)^{-1}` for a Riesz system.
    pub fn dual_matrix(&self, a: &CMat) -> CMat {
        pseudo_inverse(a, self.spec.rank_tol).adjoint()
    }

    /// First column of `√P · M(z)` at every grid point.
    fn first_column_field(&self, f: impl Fn(&CMat) -> CMat + Sync) -> Vec<DVector<Complex64>> {
        let s = (self.p() as f64).sqrt();
        par::map_slice(&self.grid().mats, |a| f(a).column(0).map(|c| c * s))
    }

    /// Zak-domain samples `VZg̃` of the canonical dual window.
    pub fn dual_vectors(&self) -> Result<Vec<DVector<Complex64>>> {
        self.require_riesz()?;
        Ok(self.first_column_field(|a| self.dual_matrix(a)))
    }

    /// Canonical dual window, recovered as a sampled window.
    pub fn dual_window(&self) -> Result<Window> {
        let u = self.dual_vectors()?;
        self.window_from_vectors(&u)
    }

    /// Zak-domain samples of `S^{-1/2} g`.
    pub fn tight_vectors(&self) -> Result<Vec<DVector<Complex64>>> {
        self.require_riesz()?;
        let tol = self.spec.rank_tol;
        Ok(self.first_column_field(|a| polar_factor(a, tol)))
    }

    /// Window generating an orthonormal system with the same Gabor space.
    pub fn tight_window(&self) -> Result<Window> {
        let u = self.tight_vectors()?;
        self.window_from_vectors(&u)
    }

    /// `VZ(Sf) = AA* VZf` on the grid.
    pub fn frame_operator_vectors(&self, f: &Window) -> Result<Vec<DVector<Complex64>>> {
        self.require_bessel()?;
        let v = self.zak_vectors(f);
        Ok(self
            .grid()
            .mats
            .iter()
            .zip(&v)
            .map(|(a, x)| a * (a.adjoint() * x))
            .collect())
    }

    pub fn apply_frame_operator(&self, f: &Window) -> Result<Window> {
        let u = self.frame_operator_vectors(f)?;
        self.window_from_vectors(&u)
    }

    /// `P_{ran A} VZf` on the grid.
    pub fn projection_vectors(&self, f: &Window) -> Result<Vec<DVector<Complex64>>> {
        self.require_bessel()?;
        self.require_riesz()?;
        let v = self.zak_vectors(f);
        Ok(self.project_vectors(&v))
    }

    /// Applies the cached pointwise projectors to a vector field.
    pub fn project_vectors(&self, v: &[DVector<Complex64>]) -> Vec<DVector<Complex64>> {
        self.projectors()
            .iter()
            .zip(v)
            .map(|(p, x)| p * x)
            .collect()
    }

    pub fn apply_projection(&self, f: &Window) -> Result<Window> {
        let u = self.projection_vectors(f)?;
        self.window_from_vectors(&u)
    }

    /// `‖(I − P)f‖` evaluated in the Zak domain.
    pub fn projection_residual(&self, f: &Window) -> Result<f64> {
        self.require_riesz()?;
        let v = self.zak_vectors(f);
        let r: Vec<DVector<Complex64>> = self
            .projectors()
            .iter()
            .zip(&v)
            .map(|(p, x)| x - p * x)
            .collect();
        Ok(self.field_norm_sq(&r).sqrt())
    }

    /// `max_z ‖M(z) − I‖` entrywise for `M = A*A`.
    pub fn gram_identity_defect(&self) -> f64 {
        let q = self.q();
        self.grid()
            .mats
            .iter()
            .map(|a| {
                let g = a.adjoint() * a;
                let mut d = 0.0f64;
                for i in 0..q {
                    for j in 0..q {
                        let e = if i == j {
                            Complex64::new(1.0, 0.0)
                        } else {
                            ZERO
                        };
                        d = d.max((g[(i, j)] - e).norm());
                    }
                }
                d
            })
            .fold(0.0, f64::max)
    }
}
