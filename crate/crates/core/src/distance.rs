//! Distance of time-frequency shifts `π(μ)g` to the Gabor space, the explicit
//! constants around it, and off-band energy loss.
//!
//! Everything is computed in the Zak domain. For `v = VZ(π(μ)g)` the distance
//! is `‖(I − P_{ran A}) v‖` in `L²(R_P; ℂ^P)`, with
//! `v_k(x,ω) = e^{2πiη(x + k/P)} Zg(x + k/P − u, ω − η)` evaluated directly
//! from the window closure. The equivalent form
//! `‖g‖² − ∫ ‖H_μ e₀‖²` is computed alongside and their gap reported.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gabor::{Coefficients, GaborSystem};
use crate::lattice::{mat_apply, Lattice, Mat2, Reduction, IDENTITY};
use crate::linalg::{cis2pi, gram_inverse_times_adjoint, singular_values, CMat};
use crate::par;
use crate::quadrature::QuadratureSpec;
use crate::window::{cg_constant, l2_norm, tf_map_remainder, Smoothness, Window};
use crate::zak::zak;

/// Refinement tolerance for `dist²`, relative to `‖g‖²`.
pub const CONVERGENCE_TOL: f64 = 1e-4;

/// Slack for ray checks of the local orthonormal lower bound.
pub const ORTHO_SLACK: f64 = 0.02;

/// Gram defect above which a system is not treated as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceReport {
    pub mu: [f64; 2],
    pub dist: f64,
    pub lattice_dist: f64,
    /// `dist / lattice_dist`; `None` when `lattice_dist < 1e-12`.
    pub ratio: Option<f64>,
    /// Gap between the residual and the `H_μ` forms of `dist²`, plus any
    /// clamped negative part, plus the half-resolution refinement change.
    pub quad_error: f64,
}

/// The coordinates in which shifts are given: `μ` is mapped to `Bμ` before
/// it reaches the separable system, and lattice distances are measured on
/// `lattice`.
#[derive(Debug, Clone)]
pub struct ShiftFrame {
    pub b: Mat2,
    pub lattice: Lattice,
    /// Window used for the norm constants (the unreduced window).
    pub window: Window,
}

impl ShiftFrame {
    /// Shifts given directly in the separable coordinates of `sys`.
    pub fn separable(sys: &GaborSystem) -> Self {
        Self {
            b: IDENTITY,
            lattice: sys.lattice().lattice(),
            window: sys.window().clone(),
        }
    }

    /// Shifts given in the coordinates of the unreduced lattice.
    pub fn original(red: &Reduction, lattice: &Lattice, window: &Window) -> Self {
        Self {
            b: red.b,
            lattice: *lattice,
            window: window.clone(),
        }
    }

    pub fn to_separable(&self, mu: [f64; 2]) -> [f64; 2] {
        mat_apply(&self.b, mu)
    }

    /// Closed `res x res` grid over the fundamental cell `A[0,1]²`.
    pub fn cell_points(&self, res: usize) -> Vec<[f64; 2]> {
        let a = self.lattice.generator();
        let res = res.max(2);
        let step = 1.0 / (res - 1) as f64;
        let mut out = Vec::with_capacity(res * res);
        for i in 0..res {
            for j in 0..res {
                out.push(mat_apply(&a, [i as f64 * step, j as f64 * step]));
            }
        }
        out
    }
}

/// `√P A(z)(A(z)*A(z))^{-1}A(z)* e^{2πiηD_P} A(z − μ)`.
pub fn h_mu(sys: &GaborSystem, mu: [f64; 2], z: [f64; 2]) -> Result<CMat> {
    sys.require_riesz()?;
    let a = sys.field().at(z[0], z[1]);
    let x = gram_inverse_times_adjoint(&a, 1e12).ok_or_else(|| {
        let s = singular_values(&a);
        let cond = match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => (hi / lo).powi(2),
            _ => f64::INFINITY,
        };
        Error::SingularGram { cond }
    })?;
    let p = sys.p();
    let mut shifted = sys.field().at(z[0] - mu[0], z[1] - mu[1]);
    for k in 0..p {
        let ph = cis2pi(mu[1] * k as f64 / p as f64);
        for l in 0..shifted.ncols() {
            shifted[(k, l)] *= ph;
        }
    }
    Ok(&a * (x * shifted) * Complex64::new((p as f64).sqrt(), 0.0))
}

/// `VZ(π(u,η)f)` at the grid points of `sys`.
pub fn shifted_vectors(sys: &GaborSystem, f: &Window, mu: [f64; 2]) -> Vec<DVector<Complex64>> {
    let p = sys.p();
    let (u, eta) = (mu[0], mu[1]);
    par::map_slice(&sys.grid().points, |&(x, w)| {
        DVector::from_fn(p, |k, _| {
            let xk = x + k as f64 / p as f64;
            cis2pi(eta * xk) * zak(f, xk - u, w - eta)
        })
    })
}

/// `(∫‖(I−P)v‖², ∫‖Pv‖²)`.
fn split_energy(sys: &GaborSystem, v: &[DVector<Complex64>]) -> (f64, f64) {
    let (mut res, mut inr) = (0.0, 0.0);
    for (pm, x) in sys.projectors().iter().zip(v) {
        let px = pm * x;
        inr += px.norm_squared();
        res += (x - px).norm_squared();
    }
    let area = sys.grid().cell_area();
    (res * area, inr * area)
}

/// `(dist², |residual form − H_μ form|)` on the grid of `sys`.
fn dist_sq_on(sys: &GaborSystem, mu: [f64; 2]) -> (f64, f64) {
    let v = shifted_vectors(sys, sys.window(), mu);
    let (res, inr) = split_energy(sys, &v);
    let g2 = sys.field_norm_sq(sys.window_vectors());
    let h_form = g2 - inr;
    let clamp = if h_form < 0.0 { -h_form } else { 0.0 };
    (res, (res - h_form.max(0.0)).abs() + clamp)
}

/// `dist(π(μ)g, 𝒢(g, Λ))` for `μ` in separable coordinates.
pub fn dist_shift(sys: &GaborSystem, mu: [f64; 2]) -> Result<DistanceReport> {
    dist_shift_framed(sys, &ShiftFrame::separable(sys), mu)
}

pub fn dist_shift_framed(
    sys: &GaborSystem,
    frame: &ShiftFrame,
    mu: [f64; 2],
) -> Result<DistanceReport> {
    sys.require_riesz()?;
    let nu = frame.to_separable(mu);
    let (d2, gap) = dist_sq_on(sys, nu);
    let coarse = sys.coarse()?;
    coarse.require_riesz()?;
    let (d2c, _) = dist_sq_on(coarse, nu);
    let g2 = sys.field_norm_sq(sys.window_vectors());
    let delta = (d2 - d2c).abs();
    if delta > CONVERGENCE_TOL * g2 {
        return Err(Error::QuadratureNotConverged {
            estimate: d2,
            delta,
        });
    }
    let dist = d2.max(0.0).sqrt();
    let lattice_dist = frame.lattice.distance(mu);
    let ratio = (lattice_dist >= 1e-12).then(|| dist / lattice_dist);
    Ok(DistanceReport {
        mu,
        dist,
        lattice_dist,
        ratio,
        quad_error: gap + delta,
    })
}

/// [`dist_shift_framed`] over a list of shifts, in input order.
pub fn dist_scan(
    sys: &GaborSystem,
    frame: &ShiftFrame,
    points: &[[f64; 2]],
) -> Result<Vec<DistanceReport>> {
    sys.require_riesz()?;
    sys.coarse()?.require_riesz()?;
    par::map_slice(points, |&mu| dist_shift_framed(sys, frame, mu))
        .into_iter()
        .collect()
}

fn require_h1(w: &Window) -> Result<()> {
    if w.smoothness() >= Smoothness::H1 {
        Ok(())
    } else {
        Err(Error::NotH1)
    }
}

/// `√(‖g′‖² + 4π²‖Xg‖²)`.
pub fn beta_upper_bound(w: &Window) -> Result<f64> {
    require_h1(w)?;
    let spec = QuadratureSpec::default();
    let d = l2_norm(&w.derivative(), &spec)?;
    let x = l2_norm(&w.apply_x(), &spec)?;
    Ok((d * d + 4.0 * PI * PI * x * x).sqrt())
}

/// `π / √(‖g′‖² + 4π²‖Xg‖²)`.
pub fn ortho_lower_bound(w: &Window) -> Result<f64> {
    Ok(PI / beta_upper_bound(w)?)
}

/// `π / (2 C_g β)` for `H²` windows; the adaptive radius otherwise.
pub fn ortho_epsilon(w: &Window) -> Result<f64> {
    if w.smoothness() >= Smoothness::H2 {
        let cg = cg_constant(w, &QuadratureSpec::default())?;
        Ok(PI / (2.0 * cg * beta_upper_bound(w)?))
    } else {
        ortho_epsilon_adaptive(w)
    }
}

/// Largest radius `r` (bisected in `log r`) such that on 16 directions
/// `‖π(a,b)g − g − (−ag′ + 2πibXg)‖ ≤ (π/2)/β · ‖(a,b)‖` holds at every
/// sampled radius up to `r`.
pub fn ortho_epsilon_adaptive(w: &Window) -> Result<f64> {
    let beta = beta_upper_bound(w)?;
    let target = 0.5 * PI / beta;
    let spec = QuadratureSpec::default();
    let ok = |r: f64| -> Result<bool> {
        for i in 0..16 {
            let t = 2.0 * PI * i as f64 / 16.0;
            let (a, b) = (r * t.cos(), r * t.sin());
            if tf_map_remainder(w, a, b, &spec)? > target * r {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let (mut lo, mut hi) = (1e-6f64, 1.0f64);
    if !ok(lo)? {
        return Ok(0.0);
    }
    if ok(hi)? {
        return Ok(hi);
    }
    for _ in 0..30 {
        let mid = (lo * hi).sqrt();
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-4 {
            break;
        }
    }
    Ok(lo)
}

/// `(I − P)VZg′` and `(I − P)VZ(Xg)`, from which every directional
/// derivative distance follows.
#[derive(Debug, Clone)]
pub struct DerivativeResiduals {
    pub d: Vec<DVector<Complex64>>,
    pub x: Vec<DVector<Complex64>>,
    /// `‖r_d‖²`, `‖r_x‖²`, `⟨r_d, r_x⟩`.
    gram: (f64, f64, Complex64),
}

impl DerivativeResiduals {
    pub fn new(sys: &GaborSystem) -> Result<Self> {
        sys.require_riesz()?;
        require_h1(sys.window())?;
        let g = sys.window();
        let residual = |f: &Window| -> Vec<DVector<Complex64>> {
            let v = sys.zak_vectors(f);
            let pv = sys.project_vectors(&v);
            v.iter().zip(&pv).map(|(a, b)| a - b).collect()
        };
        let d = residual(&g.derivative());
        let x = residual(&g.apply_x());
        let gram = (
            sys.field_norm_sq(&d),
            sys.field_norm_sq(&x),
            sys.field_inner(&d, &x),
        );
        Ok(Self { d, x, gram })
    }

    /// `‖(I − P)(−a g′ + 2πib Xg)‖`.
    pub fn distance(&self, a: f64, b: f64) -> f64 {
        let (dd, xx, dx) = self.gram;
        // ⟨−a r_d, 2πib r_x⟩ = −a·(−2πib)⟨r_d, r_x⟩
        let cross = (Complex64::new(0.0, 2.0 * PI * a * b) * dx).re;
        (a * a * dd + 4.0 * PI * PI * b * b * xx + 2.0 * cross)
            .max(0.0)
            .sqrt()
    }
}

/// `‖(I − P)(−a g′ + 2πib Xg)‖`.
pub fn derivative_distance(sys: &GaborSystem, a: f64, b: f64) -> Result<f64> {
    Ok(DerivativeResiduals::new(sys)?.distance(a, b))
}

fn require_orthonormal(sys: &GaborSystem) -> Result<()> {
    let defect = sys.gram_identity_defect();
    if defect < ORTHONORMAL_TOL {
        Ok(())
    } else {
        Err(Error::NotOrthonormal { defect })
    }
}

/// `Im⟨(I − P)g′, 2πiXg⟩`, which equals `π` for orthonormal systems.
pub fn im_inner_product_check(sys: &GaborSystem) -> Result<f64> {
    require_orthonormal(sys)?;
    let r = DerivativeResiduals::new(sys)?;
    let xg = sys.zak_vectors(&sys.window().apply_x());
    let ip = sys.field_inner(&r.d, &xg) * Complex64::new(0.0, -2.0 * PI);
    Ok(ip.im)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthoLocalReport {
    pub epsilon: f64,
    /// `(π/2)/β`.
    pub constant: f64,
    pub samples: usize,
    pub violations: usize,
    /// `min dist / (constant · r)` over the samples.
    pub min_ratio: f64,
    pub passed: bool,
}

/// Samples `μ = λ + r e_θ` for `λ ∈ {0, (1/Q, 0), (0, P)}`, eight angles and
/// `r ∈ {ε, ε/2, ε/4}`, and checks `dist ≥ (π/2)/β · r` with slack.
pub fn ortho_local_check(sys: &GaborSystem) -> Result<OrthoLocalReport> {
    require_orthonormal(sys)?;
    let g = sys.window();
    let beta = beta_upper_bound(g)?;
    let epsilon = ortho_epsilon(g)?;
    let constant = 0.5 * PI / beta;
    let sep = sys.lattice();
    let mut mus = Vec::new();
    let mut radii = Vec::new();
    for lam in [[0.0, 0.0], sep.point(1, 0), sep.point(0, 1)] {
        for i in 0..8 {
            let t = 2.0 * PI * i as f64 / 8.0;
            for r in [epsilon, 0.5 * epsilon, 0.25 * epsilon] {
                mus.push([lam[0] + r * t.cos(), lam[1] + r * t.sin()]);
                radii.push(r);
            }
        }
    }
    let frame = ShiftFrame::separable(sys);
    let reports = dist_scan(sys, &frame, &mus)?;
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for (rep, r) in reports.iter().zip(&radii) {
        let ratio = rep.dist / (constant * r);
        min_ratio = min_ratio.min(ratio);
        if ratio < 1.0 - ORTHO_SLACK {
            violations += 1;
        }
    }
    Ok(OrthoLocalReport {
        epsilon,
        constant,
        samples: mus.len(),
        violations,
        min_ratio,
        passed: violations == 0,
    })
}

/// Both lower bounds for `‖af + bh‖² / (a² + b²)` over real `(a, b)`:
/// `(‖f‖²‖h‖² − (Re⟨f,h⟩)²)/(‖f‖² + ‖h‖²)` and `(Im⟨f,h⟩)²/(‖f‖² + ‖h‖²)`.
pub fn two_vector_lower_bound(f: &[Complex64], h: &[Complex64]) -> Result<(f64, f64)> {
    let ff: f64 = f.iter().map(|z| z.norm_sqr()).sum();
    let hh: f64 = h.iter().map(|z| z.norm_sqr()).sum();
    if ff + hh == 0.0 {
        return Err(Error::BothZero);
    }
    let ip: Complex64 = f.iter().zip(h).map(|(a, b)| a * b.conj()).sum();
    let s = ff + hh;
    Ok(((ff * hh - ip.re * ip.re) / s, ip.im * ip.im / s))
}

/// `‖(I − P)π(μ)f‖ / ‖f‖` for `f = Σ c π(λ)g`.
pub fn energy_loss(sys: &GaborSystem, coeffs: &Coefficients, mu: [f64; 2]) -> Result<f64> {
    sys.require_riesz()?;
    let f = sys.synthesize(coeffs);
    energy_loss_of(sys, &f, mu)
}

/// [`energy_loss`] for an arbitrary signal.
pub fn energy_loss_of(sys: &GaborSystem, f: &Window, mu: [f64; 2]) -> Result<f64> {
    sys.require_riesz()?;
    let nf = sys.field_norm_sq(&sys.zak_vectors(f)).sqrt();
    if nf < 1e-300 {
        return Err(Error::ZeroSignal);
    }
    let v = shifted_vectors(sys, f, mu);
    let (res, _) = split_energy(sys, &v);
    Ok((res.max(0.0).sqrt() / nf).min(1.0))
}

/// If `π(μ₁)g` and `π(μ₂)g` are within `tol` of the Gabor space, so is
/// `π(μ₁ + μ₂)g` within `3·tol`. Vacuously true when the premise fails.
pub fn invariance_semigroup_check(
    sys: &GaborSystem,
    mu1: [f64; 2],
    mu2: [f64; 2],
    tol: f64,
) -> Result<bool> {
    let d1 = dist_shift(sys, mu1)?.dist;
    let d2 = dist_shift(sys, mu2)?.dist;
    if d1 >= tol || d2 >= tol {
        return Ok(true);
    }
    Ok(dist_shift(sys, [mu1[0] + mu2[0], mu1[1] + mu2[1]])?.dist < 3.0 * tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaySlope {
    pub direction: [f64; 2],
    pub t: f64,
    /// `dist(π(t e)g, 𝒢) / t`.
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSpec {
    pub cell_res: usize,
    pub exclusion: f64,
    pub points: usize,
    pub excluded: usize,
    pub grid: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub beta_formula: f64,
    /// Present when the system is orthonormal.
    pub ortho_bound: Option<f64>,
    pub epsilon: Option<f64>,
    /// Smallest ray slope at the smallest `t`.
    pub alpha_near: f64,
    pub ray_slopes: Vec<RaySlope>,
    pub scan_spec: ScanSpec,
    pub max_quad_error: f64,
}

pub const RAY_T: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Empirical `α`, `β` over one fundamental cell with the exact upper
/// constant and, for orthonormal systems, the lower constant and radius.
pub fn estimate_alpha_beta(
    sys: &GaborSystem,
    frame: &ShiftFrame,
    cell_res: usize,
    exclusion: f64,
) -> Result<BoundsReport> {
    let reports = dist_scan(sys, frame, &frame.cell_points(cell_res))?;
    bounds_from_scan(sys, frame, &reports, cell_res, exclusion)
}

/// [`estimate_alpha_beta`] on an already computed cell scan.
pub fn bounds_from_scan(
    sys: &GaborSystem,
    frame: &ShiftFrame,
    reports: &[DistanceReport],
    cell_res: usize,
    exclusion: f64,
) -> Result<BoundsReport> {
    let (mut alpha, mut beta) = (f64::INFINITY, 0.0f64);
    let mut excluded = 0;
    let mut max_quad_error = 0.0f64;
    for r in reports {
        max_quad_error = max_quad_error.max(r.quad_error);
        match r.ratio {
            Some(q) if r.lattice_dist >= exclusion => {
                alpha = alpha.min(q);
                beta = beta.max(q);
            }
            _ => excluded += 1,
        }
    }
    let dirs = [
        [1.0, 0.0],
        [0.0, 1.0],
        [
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
        ],
    ];
    let rays: Vec<([f64; 2], f64)> = dirs
        .iter()
        .flat_map(|&e| RAY_T.iter().map(move |&t| (e, t)))
        .collect();
    let ray_slopes = par::map_slice(&rays, |&(e, t)| {
        dist_shift_framed(sys, frame, [t * e[0], t * e[1]]).map(|r| RaySlope {
            direction: e,
            t,
            slope: r.dist / t,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let tmin = RAY_T[RAY_T.len() - 1];
    let alpha_near = ray_slopes
        .iter()
        .filter(|r| r.t == tmin)
        .map(|r| r.slope)
        .fold(f64::INFINITY, f64::min);
    let beta_formula = beta_upper_bound(&frame.window)?;
    let ortho = sys.gram_identity_defect() < ORTHONORMAL_TOL;
    let (ortho_bound, epsilon) = if ortho {
        (
            Some(ortho_lower_bound(&frame.window)?),
            Some(ortho_epsilon(&frame.window)?),
        )
    } else {
        (None, None)
    };
    Ok(BoundsReport {
        alpha_hat: if alpha.is_finite() { alpha } else { 0.0 },
        beta_hat: beta,
        beta_formula,
        ortho_bound,
        epsilon,
        alpha_near,
        ray_slopes,
        scan_spec: ScanSpec {
            cell_res,
            exclusion,
            points: reports.len(),
            excluded,
            grid: (sys.spec().mx, sys.spec().mw),
        },
        max_quad_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gabor::GridSpec;
    use crate::lattice::SeparableLattice;

    fn sys43(m: usize) -> GaborSystem {
        GaborSystem::new(
            Window::gaussian(1.0).unwrap(),
            SeparableLattice::new(4, 3).unwrap(),
            GridSpec::square(m),
        )
        .unwrap()
    }

    #[test]
    fn zero_and_lattice_shifts() {
        let s = sys43(32);
        assert!(dist_shift(&s, [0.0, 0.0]).unwrap().dist < 1e-6);
        for mu in [[1.0 / 3.0, 0.0], [0.0, 4.0], [-2.0 / 3.0, 8.0]] {
            let r = dist_shift(&s, mu).unwrap();
            assert!(r.dist < 1e-6, "{mu:?}: {}", r.dist);
            assert!(r.ratio.is_none());
        }
    }

    #[test]
    fn half_step_is_bounded_by_beta() {
        let s = sys43(32);
        let r = dist_shift(&s, [1.0 / 6.0, 0.0]).unwrap();
        let beta = beta_upper_bound(s.window()).unwrap();
        // time shifts at step 1/3 nearly span the shifted Gaussian
        assert!(r.dist > 1e-4 && r.dist < 1e-3, "{}", r.dist);
        assert!(r.dist <= beta / 6.0);
        assert!((r.lattice_dist - 1.0 / 6.0).abs() < 1e-12);
        assert!(r.quad_error < 1e-8, "{}", r.quad_error);
    }

    #[test]
    fn h_mu_at_zero_is_scaled_field() {
        let s = sys43(8);
        let h = h_mu(&s, [0.0, 0.0], [0.03, 0.4]).unwrap();
        let a = s.field().at(0.03, 0.4) * Complex64::new(2.0, 0.0);
        assert!(crate::linalg::max_abs_diff(&h, &a) < 1e-10);
        assert_eq!(h.ncols(), 3);
    }

    #[test]
    fn lattice_periodicity_of_distance() {
        let s = sys43(32);
        let d0 = dist_shift(&s, [0.1, 0.5]).unwrap().dist;
        let d1 = dist_shift(&s, [0.1 + 1.0 / 3.0, 0.5 - 4.0]).unwrap().dist;
        assert!((d0 - d1).abs() < 1e-3 * d0.max(1e-3));
    }

    #[test]
    fn gaussian_beta_and_ortho_constants() {
        let g = Window::gaussian(1.0).unwrap();
        let b = beta_upper_bound(&g).unwrap();
        assert!((b - (PI * 2f64.sqrt()).sqrt()).abs() < 1e-8);
        let n = Window::gaussian_scaled(1.0, 2f64.powf(0.25)).unwrap();
        assert!((beta_upper_bound(&n).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-8);
        assert!((ortho_lower_bound(&n).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-8);
        let e = ortho_epsilon(&g).unwrap();
        assert!((e - 0.0346).abs() < 5e-4, "{e}");
    }

    #[test]
    fn derivative_distance_properties() {
        let s = sys43(32);
        let r = DerivativeResiduals::new(&s).unwrap();
        assert_eq!(r.distance(0.0, 0.0), 0.0);
        let d = r.distance(1.0, 0.0);
        assert!(d > 1e-3);
        assert!((r.distance(2.0, -1.0) - 2.0 * r.distance(1.0, -0.5)).abs() < 1e-6);
        // ray slope approaches the derivative distance
        let t = 1e-3;
        let slope = dist_shift(&s, [t, 0.0]).unwrap().dist / t;
        assert!((slope - d).abs() < 0.05 * d, "{slope} vs {d}");
    }

    #[test]
    fn energy_loss_matches_distance() {
        let s = sys43(32);
        let mut c = Coefficients::new();
        c.insert((0, 0), Complex64::new(1.0, 0.0));
        let mu = [0.12, 0.9];
        let e = energy_loss(&s, &c, mu).unwrap();
        let d = dist_shift(&s, mu).unwrap().dist;
        let g = s.field_norm_sq(s.window_vectors()).sqrt();
        assert!((e * g - d).abs() < 2e-4);
        assert!(energy_loss(&s, &c, [0.0, 0.0]).unwrap() < 1e-4);
        assert!(matches!(
            energy_loss(&s, &Coefficients::new(), mu),
            Err(Error::ZeroSignal)
        ));
    }

    #[test]
    fn two_vector_examples() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let (b1, _) = two_vector_lower_bound(&[one, zero], &[zero, one]).unwrap();
        assert!((b1 - 0.5).abs() < 1e-15);
        let f = [one, zero];
        let h = [Complex64::new(0.0, 1.0), zero];
        let (_, b2) = two_vector_lower_bound(&f, &h).unwrap();
        assert!((b2 - 0.5).abs() < 1e-15);
        assert!(matches!(
            two_vector_lower_bound(&[zero], &[zero]),
            Err(Error::BothZero)
        ));
    }

    #[test]
    fn frame_only_system_is_rejected() {
        let s = GaborSystem::new(
            Window::gaussian(1.0).unwrap(),
            SeparableLattice::new(2, 3).unwrap(),
            GridSpec::square(16),
        )
        .unwrap();
        assert!(matches!(
            dist_shift(&s, [0.1, 0.1]),
            Err(Error::NotRiesz { .. })
        ));
    }

    #[test]
    fn non_orthonormal_rejected() {
        let s = sys43(16);
        assert!(matches!(
            im_inner_product_check(&s),
            Err(Error::NotOrthonormal { .. })
        ));
        assert!(matches!(
            ortho_local_check(&s),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn semigroup_on_lattice() {
        let s = sys43(16);
        assert!(invariance_semigroup_check(&s, [1.0 / 3.0, 0.0], [0.0, 4.0], 1e-3).unwrap());
        assert!(invariance_semigroup_check(&s, [1.0 / 3.0, 0.0], [0.15, 0.3], 1e-3).unwrap());
    }
}
