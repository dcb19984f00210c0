//! Nontrivial kernel elements of the synthesis operator for `P < Q`.
//!
//! `N(z) = I − A(z)†A(z)` is the projector onto `ker A(z)`. It is periodic on
//! `R_P` and smooth wherever the rank of `A` is constant, so a fixed column
//! `h = N e_j` gives a continuous kernel field without any phase tracking.
//! The coefficients are its Fourier coefficients in the basis
//! `√P e^{2πi(nPx − sω)}` of `L²(R_P)`, indexed as `c_{sQ+ℓ, n}`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::{Coefficients, GaborSystem};
use crate::error::{Error, Result};
use crate::linalg::{cis2pi, pseudo_inverse, CMat};
use crate::par;
use crate::quadrature::QuadratureSpec;
use crate::window::l2_norm;

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    /// Column of the kernel projector used.
    pub column: usize,
    pub coeff_cut: usize,
    #[serde(skip)]
    pub coeffs: Coefficients,
    /// `‖c‖_{ℓ²}` of the truncated coefficients.
    pub coeff_norm: f64,
    /// `‖Σ c π(λ) g‖ / ‖c‖`.
    pub residual: f64,
    /// `max_z ‖A(z) h(z)‖ / ‖h(z)‖` over the grid.
    pub null_residual: f64,
    pub sigma0_min: f64,
}

impl GaborSystem {
    /// `h(z) = N(z) e_j` at every grid point.
    pub fn kernel_field(&self, column: usize) -> Vec<DVector<Complex64>> {
        let tol = self.spec.rank_tol;
        let q = self.q();
        par::map_slice(&self.grid().mats, |a| {
            let n: CMat = CMat::identity(q, q) - pseudo_inverse(a, tol) * a;
            n.column(column).into_owned()
        })
    }

    pub fn find_nontrivial_kernel(&self, coeff_cut: usize) -> Result<KernelReport> {
        let d = self.diagnostics();
        let (p, q) = (self.p(), self.q());
        if d.classification.riesz_sequence || q <= p {
            return Err(Error::NoKernel {
                sigma0_min: d.sigma0_min,
            });
        }
        let fields: Vec<Vec<DVector<Complex64>>> = (0..q).map(|j| self.kernel_field(j)).collect();
        let column = (0..q)
            .max_by(|&i, &j| {
                self.field_norm_sq(&fields[i])
                    .total_cmp(&self.field_norm_sq(&fields[j]))
            })
            .unwrap_or(0);
        let h = &fields[column];
        let null_residual = self
            .grid()
            .mats
            .iter()
            .zip(h)
            .map(|(a, v)| {
                let nv = v.norm();
                if nv > 0.0 {
                    (a * v).norm() / nv
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);

        let cut = coeff_cut as i64;
        let pts = &self.grid().points;
        let area = self.grid().cell_area();
        let sp = (p as f64).sqrt();
        let idx: Vec<(i64, i64)> = (-cut..=cut)
            .flat_map(|s| (-cut..=cut).map(move |n| (s, n)))
            .collect();
        let vals = par::map_slice(&idx, |&(s, n)| {
            let mut acc = vec![Complex64::new(0.0, 0.0); q];
            for (z, v) in pts.iter().zip(h) {
                let e = cis2pi(-(n as f64 * p as f64 * z.0 - s as f64 * z.1));
                for (l, a) in acc.iter_mut().enumerate() {
                    *a += v[l] * e;
                }
            }
            acc.into_iter().map(|a| a * sp * area).collect::<Vec<_>>()
        });
        let mut coeffs = Coefficients::new();
        let mut norm_sq = 0.0;
        for (&(s, n), cs) in idx.iter().zip(&vals) {
            for (l, &c) in cs.iter().enumerate() {
                if c.norm() > 1e-15 {
                    coeffs.insert((s * q as i64 + l as i64, n), c);
                    norm_sq += c.norm_sqr();
                }
            }
        }
        let coeff_norm = norm_sq.sqrt();
        if coeff_norm == 0.0 {
            return Err(Error::NoKernel {
                sigma0_min: d.sigma0_min,
            });
        }
        let f = self.synthesize(&coeffs);
        let residual = l2_norm(&f, &QuadratureSpec::default())? / coeff_norm;
        Ok(KernelReport {
            column,
            coeff_cut,
            coeffs,
            coeff_norm,
            residual,
            null_residual,
            sigma0_min: d.sigma0_min,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::GridSpec;
    use super::*;
    use crate::lattice::SeparableLattice;
    use crate::window::Window;

    #[test]
    fn kernel_for_redundant_gaussian() {
        let s = GaborSystem::new(
            Window::gaussian(1.0).unwrap(),
            SeparableLattice::new(2, 3).unwrap(),
            GridSpec::square(32),
        )
        .unwrap();
        let k = s.find_nontrivial_kernel(8).unwrap();
        assert!(k.null_residual < 1e-8, "{}", k.null_residual);
        assert!(k.residual < 5e-2, "{}", k.residual);
        assert!(k.coeff_norm > 0.1);
    }

    #[test]
    fn riesz_system_has_no_kernel() {
        let s = GaborSystem::new(
            Window::gaussian(1.0).unwrap(),
            SeparableLattice::new(4, 3).unwrap(),
            GridSpec::square(16),
        )
        .unwrap();
        assert!(matches!(
            s.find_nontrivial_kernel(4),
            Err(Error::NoKernel { .. })
        ));
    }
}
