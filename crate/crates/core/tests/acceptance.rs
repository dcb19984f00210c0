//! Acceptance runner: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p zaklat --test acceptance` (add `--release` for
//! timings representative of an optimized build).

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use rand::Rng;
use zaklat::distance::{
    beta_upper_bound, dist_scan, dist_shift_framed, energy_loss, estimate_alpha_beta,
    im_inner_product_check, ortho_local_check, ortho_lower_bound, two_vector_lower_bound,
    DerivativeResiduals, ShiftFrame,
};
use zaklat::gabor::{pinv, sigma0, sigma1, Coefficients, GaborSystem, GridSpec};
use zaklat::lattice::{factor_sl2, Lattice, Mat2, SeparableLattice};
use zaklat::linalg::{cis2pi, singular_values};
use zaklat::metaplectic::{intertwining_defect, MetaplecticOp};
use zaklat::quadrature::QuadratureSpec;
use zaklat::window::{cg_constant, l2_norm, sinc_gap, tf_map_remainder, Window};
use zaklat::zak::{assemble_a, inverse_zak, l_omega, m_omega, zak, zak_field, zak_partials};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn gaussian() -> Window {
    Window::gaussian(1.0).unwrap()
}

fn sys_from(lattice: &Lattice, m: usize) -> Result<GaborSystem, String> {
    GaborSystem::from_lattice(&gaussian(), lattice, GridSpec::square(m))
        .map(|(s, _)| s)
        .map_err(|e| e.to_string())
}

fn sys43(m: usize) -> GaborSystem {
    GaborSystem::new(
        gaussian(),
        SeparableLattice::new(4, 3).unwrap(),
        GridSpec::square(m),
    )
    .unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_classification() -> Outcome {
    let a = sys_from(&Lattice::separable(2.0, 2.0 / 3.0).map_err(err)?, 128)?;
    let b = sys_from(&Lattice::separable(1.0, 2.0 / 3.0).map_err(err)?, 128)?;
    let (ca, cb) = (
        a.diagnostics().classification,
        b.diagnostics().classification,
    );
    let ok = (a.p(), a.q()) == (4, 3)
        && ca.riesz_sequence
        && !ca.frame_for_l2
        && (b.p(), b.q()) == (2, 3)
        && cb.frame_for_l2
        && !cb.riesz_sequence;
    Ok((
        ok,
        format!(
            "2Zx(2/3)Z -> ({},{}) riesz={} frame_L2={}; Zx(2/3)Z -> ({},{}) riesz={} frame_L2={}",
            a.p(),
            a.q(),
            ca.riesz_sequence,
            ca.frame_for_l2,
            b.p(),
            b.q(),
            cb.riesz_sequence,
            cb.frame_for_l2
        ),
    ))
}

fn c2_lattice_vanishing() -> Outcome {
    let s = sys43(64);
    let mut pts = Vec::new();
    for m in -2i64..=2 {
        for n in -2i64..=2 {
            pts.push(s.lattice().point(m, n));
        }
    }
    let reps = dist_scan(&s, &ShiftFrame::separable(&s), &pts).map_err(err)?;
    let worst = reps.iter().map(|r| r.dist).fold(0.0, f64::max);
    Ok((
        worst < 1e-3,
        format!("max dist over 25 points of (1/3)Zx4Z = {worst:.3e} (< 1e-3)"),
    ))
}

fn c3_upper_bound() -> Outcome {
    let s = sys43(64);
    let frame = ShiftFrame::separable(&s);
    let reps = dist_scan(&s, &frame, &frame.cell_points(17)).map_err(err)?;
    let beta = beta_upper_bound(s.window()).map_err(err)?;
    let oracle = (PI * 2f64.sqrt()).sqrt();
    let worst = reps.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    let ok = (beta - oracle).abs() < 1e-8 && worst <= beta * 1.01;
    Ok((
        ok,
        format!("beta = {beta:.6} (closed form {oracle:.6}); max ratio over 17x17 = {worst:.6}"),
    ))
}

fn c4_alpha() -> Outcome {
    let s = sys43(64);
    let frame = ShiftFrame::separable(&s);
    let a17 = estimate_alpha_beta(&s, &frame, 17, 0.02).map_err(err)?;
    let a33 = estimate_alpha_beta(&s, &frame, 33, 0.02).map_err(err)?;
    let change = (a17.alpha_hat - a33.alpha_hat).abs() / a17.alpha_hat;
    let ok = a17.alpha_hat > 0.0 && a33.alpha_hat > 0.0 && change < 0.1;
    Ok((
        ok,
        format!(
            "alpha_hat(17) = {:.6e}, alpha_hat(33) = {:.6e}, relative change {:.2e}",
            a17.alpha_hat, a33.alpha_hat, change
        ),
    ))
}

fn c5_remainder() -> Outcome {
    let g = gaussian();
    let spec = QuadratureSpec::default();
    let cg = cg_constant(&g, &spec).map_err(err)?;
    // ‖X²g‖² = 3√π / (4(2π)^{5/2}) and ‖Xg′‖ = 2π‖X²g‖ for e^{-πx²}
    let x2 = (3.0 * PI.sqrt() / (4.0 * (2.0 * PI).powf(2.5))).sqrt();
    let oracle = 3.0 * PI * PI * (2.0 * PI * x2);
    let mut r = rng(0);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b): (f64, f64) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let rem = tf_map_remainder(&g, a, b, &spec).map_err(err)?;
        let bound = cg * (a * a + b * b);
        worst = worst.max(rem / bound);
        if rem > bound {
            violations += 1;
        }
    }
    let ok = violations == 0 && (cg - oracle).abs() < 1e-6 && (cg - 21.6).abs() < 0.1;
    Ok((ok, format!("C_g = {cg:.4} (closed form {oracle:.4}); {violations} violations; max remainder/bound = {worst:.3}")))
}

fn c6_orthonormal() -> Outcome {
    let (s, _) = GaborSystem::from_lattice(
        &gaussian(),
        &Lattice::separable(2.0, 1.0).map_err(err)?,
        GridSpec::square(64),
    )
    .map_err(err)?;
    let t = s.tight_window().map_err(err)?;
    let st = s.with_window(t.clone()).map_err(err)?;
    let defect = st
        .grid()
        .mats
        .iter()
        .map(|a| {
            let sv = singular_values(a);
            sv.iter().map(|v| (v * v - 1.0).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let im = im_inner_product_check(&st).map_err(err)?;
    let lb = ortho_lower_bound(&t).map_err(err)?;
    let dr = DerivativeResiduals::new(&st).map_err(err)?;
    let mut r = rng(6);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..50 {
        let th: f64 = r.random_range(0.0..2.0 * PI);
        let len: f64 = r.random_range(0.1..2.0);
        let (a, b) = (len * th.cos(), len * th.sin());
        min_ratio = min_ratio.min(dr.distance(a, b) / (lb * len));
    }
    let local = ortho_local_check(&st).map_err(err)?;
    let ok = defect < 1e-4 && (im - PI).abs() < 1e-2 && min_ratio >= 1.0 && local.passed;
    Ok((
        ok,
        format!(
            "(P,Q)=({},{}); max|A*A-I| = {defect:.2e}; Im = {im:.6}; min derivative ratio = {min_ratio:.4}; \
             eps = {:.4e}, {}/{} ray samples ok (min ratio {:.3})",
            s.p(),
            s.q(),
            local.epsilon,
            local.samples - local.violations,
            local.samples,
            local.min_ratio
        ),
    ))
}

fn unit(w: Window) -> Result<Window, String> {
    let n = l2_norm(&w, &QuadratureSpec::default()).map_err(err)?;
    Ok(w.scale_real(1.0 / n))
}

fn c7_unit_cap() -> Outcome {
    let g = gaussian();
    let mut windows = vec![
        Window::gaussian(0.5).map_err(err)?,
        Window::gaussian(2.0).map_err(err)?,
        Window::gaussian(0.1).map_err(err)?,
        g.tf_shift(0.7, -1.2),
        g.chirp(0.8).map_err(err)?,
        g.add(&g.tf_shift(1.5, 0.0)),
        Window::two_sided_exponential(1.0).map_err(err)?,
        Window::two_sided_exponential(3.0).map_err(err)?,
        Window::bspline(2).map_err(err)?,
        Window::bspline(4).map_err(err)?,
        Window::bspline(6).map_err(err)?,
        Window::hermite(4).dilation(1.7).map_err(err)?,
    ];
    for n in 0..8 {
        windows.push(Window::hermite(n));
    }
    let cap = (PI / 2.0).sqrt();
    let mut worst = f64::NEG_INFINITY;
    for w in windows {
        let v = ortho_lower_bound(&unit(w)?).map_err(err)?;
        worst = worst.max(v - cap);
    }
    let normalized = Window::gaussian_scaled(1.0, 2f64.powf(0.25)).map_err(err)?;
    let eq = ortho_lower_bound(&normalized).map_err(err)?;
    let ok = worst <= 1e-9 && (eq - cap).abs() < 1e-4;
    Ok((ok, format!("20 windows: max(value - sqrt(pi/2)) = {worst:.3e}; normalized Gaussian {eq:.8} vs {cap:.8}")))
}

fn c8_kernel() -> Outcome {
    let g = gaussian();
    let (s, _) = GaborSystem::from_lattice(
        &g,
        &Lattice::separable(1.0, 2.0 / 3.0).map_err(err)?,
        GridSpec::square(64),
    )
    .map_err(err)?;
    let k = s.find_nontrivial_kernel(8).map_err(err)?;
    // split the kernel relation along even/odd time indices:
    // Σ c_{2m+1,n} π(2m+1, 2n/3)φ = π(1,0) Σ e^{4πin/3} c_{2m+1,n} π(2m, 2n/3)φ
    let mut d = Coefficients::new();
    for (&(kk, n), &c) in &k.coeffs {
        if kk.rem_euclid(2) == 1 {
            d.insert(
                ((kk - 1).div_euclid(2), n),
                -c * cis2pi(2.0 * n as f64 / 3.0),
            );
        }
    }
    let (s2, red2) = GaborSystem::from_lattice(
        &g,
        &Lattice::separable(2.0, 2.0 / 3.0).map_err(err)?,
        GridSpec::square(64),
    )
    .map_err(err)?;
    let f = s2.synthesize(&d);
    let nf = s2.field_norm_sq(&s2.zak_vectors(&f)).sqrt();
    let mu = [red2.b[0][0], 0.0];
    let loss = energy_loss(&s2, &d, mu).map_err(err)?;
    let ok = nf > 0.1 * k.coeff_norm && loss < 5e-2;
    Ok((
        ok,
        format!(
            "kernel residual {:.2e}; ||f|| / ||c|| = {:.4}; energy_loss(f, (1,0)) = {loss:.3e}",
            k.residual,
            nf / k.coeff_norm
        ),
    ))
}

fn c9_algebra() -> Outcome {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    let rel = |a: &CMat, b: &CMat| max_abs(&(a - b)) / (1.0 + max_abs(a).max(max_abs(b)));
    for case in 0..1000 {
        let (m, n) = (1 + case % 6, 1 + (case / 6) % 6);
        let k = 1 + (case / 36) % m.min(n);
        let a = random_low_rank(&mut r, m, n, k);
        let ap = pinv(&a, 1e-10);
        let pa = &ap * &a;
        let aa = &a * &ap;
        worst = worst
            .max(rel(&(&pa * &pa), &pa))
            .max(rel(&pa, &pa.adjoint()))
            .max(rel(&(&aa * &aa), &aa))
            .max(rel(&aa, &aa.adjoint()))
            .max(rel(&ap.adjoint(), &pinv(&a.adjoint(), 1e-10)))
            .max(rel(&(pinv(&(a.adjoint() * &a), 1e-10) * a.adjoint()), &ap))
            .max(rel(&(a.adjoint() * pinv(&(&a * a.adjoint()), 1e-10)), &ap));
        let u = random_unitary(&mut r, n);
        let sq = random_matrix(&mut r, n, n);
        worst = worst.max(rel(
            &pinv(&(u.adjoint() * &sq * &u), 1e-10),
            &(u.adjoint() * pinv(&sq, 1e-10) * &u),
        ));
        let s1 = sigma1(&a, 1e-10);
        worst = worst.max((s1 - sigma1(&a.adjoint(), 1e-10)).abs() / (1.0 + s1));
        let s0 = sigma0(&sq);
        worst = worst.max((sigma0(&(sq.adjoint() * &sq)) - s0 * s0).abs() / (1.0 + s0 * s0));
    }
    let mut tv_viol = 0;
    for _ in 0..100_000 {
        let f: Vec<Complex64> = (0..8).map(|_| random_complex(&mut r)).collect();
        let h: Vec<Complex64> = (0..8).map(|_| random_complex(&mut r)).collect();
        let (b1, b2) = two_vector_lower_bound(&f, &h).map_err(err)?;
        let (a, b): (f64, f64) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let lhs: f64 = f
            .iter()
            .zip(&h)
            .map(|(x, y)| (x * a + y * b).norm_sqr())
            .sum();
        if lhs < b1 * (a * a + b * b) - 1e-12 || b2 > b1 + 1e-12 {
            tv_viol += 1;
        }
    }
    let mut sinc_viol = 0;
    for _ in 0..1_000_000 {
        let x: f64 = r.random_range(-1000.0..1000.0);
        if sinc_gap(x) > 2.0f64.min(PI * x.abs()) + 1e-12 {
            sinc_viol += 1;
        }
    }
    let ok = worst < 1e-10 && tv_viol == 0 && sinc_viol == 0;
    Ok((
        ok,
        format!("pinv identities max rel defect {worst:.2e} (1000 matrices); two-vector violations {tv_viol}/1e5; sinc violations {sinc_viol}/1e6"),
    ))
}

fn c10_zak() -> Outcome {
    let mut r = rng(10);
    let g = gaussian();
    let h = Window::hermite(1).tf_shift(0.3, 0.2);
    let mut covariance = 0.0f64;
    let mut fourier = 0.0f64;
    let mut shifts = 0.0f64;
    let mut fd = 0.0f64;
    for _ in 0..20 {
        let (x, w): (f64, f64) = (r.random_range(0.0..1.0), r.random_range(0.0..1.0));
        let (m, n) = (r.random_range(-3i64..=3), r.random_range(-3i64..=3));
        let (u, eta): (f64, f64) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let z = zak(&h, x, w);
        // (a) quasi-periodicity
        covariance =
            covariance.max((zak(&h, x + m as f64, w + n as f64) - cis2pi(m as f64 * w) * z).norm());
        // (b) covariance
        let lhs = zak(&h.tf_shift(u, eta), x, w);
        covariance = covariance.max((lhs - cis2pi(eta * x) * zak(&h, x - u, w - eta)).norm());
        // (c) integer shifts
        let lhs = zak(&h.tf_shift(m as f64, n as f64), x, w);
        covariance = covariance.max((lhs - cis2pi(n as f64 * x - m as f64 * w) * z).norm());
        // (d) Fourier transform
        let lhs = zak(&h.fourier_transform(), x, w);
        fourier = fourier.max((lhs - cis2pi(x * w) * zak(&h, -w, x)).norm());
        // shift relations of the matrix field
        for (p, q) in [(4usize, 3usize), (2, 3), (3, 1)] {
            let a = assemble_a(&g, p, q, x, w);
            let ap = assemble_a(&g, p, q, x + 1.0 / p as f64, w);
            let aq = assemble_a(&g, p, q, x - 1.0 / q as f64, w);
            shifts = shifts
                .max(max_abs(&(ap - l_omega(p, w) * &a)))
                .max(max_abs(&(aq - &a * m_omega(q, w))));
        }
        // partial derivatives against central differences
        let (dx, dw) = zak_partials(&g, x, w).map_err(err)?;
        let step = 1e-4;
        let fdx = (zak(&g, x + step, w) - zak(&g, x - step, w)) / (2.0 * step);
        let fdw = (zak(&g, x, w + step) - zak(&g, x, w - step)) / (2.0 * step);
        let scale = dx.norm().max(dw.norm());
        fd = fd
            .max((fdx - dx).norm() / scale)
            .max((fdw - dw).norm() / scale);
    }
    let field = zak_field(&g, 128, 128);
    let parseval = (field.parseval() - 0.5f64.sqrt()).abs();
    let samples = inverse_zak(&field, 8);
    let round = (0..samples.values.len())
        .map(|i| (samples.values[i] - g.eval(samples.x0 + i as f64 * samples.dx)).norm())
        .fold(0.0, f64::max);
    let ok = covariance < 1e-8
        && fourier < 1e-5
        && shifts < 1e-8
        && fd < 1e-4
        && parseval < 1e-4
        && round < 1e-5;
    Ok((
        ok,
        format!(
            "(a)-(c) {covariance:.1e}; (d) {fourier:.1e}; shifts {shifts:.1e}; partials vs FD {fd:.1e}; \
             Parseval defect {parseval:.1e}; round trip {round:.1e}"
        ),
    ))
}

fn c11_symplectic() -> Outcome {
    let g = gaussian();
    let lat = Lattice::separable(2.0, 2.0 / 3.0).map_err(err)?;
    let red = lat.reduce_to_separable().map_err(err)?;
    let target: Mat2 = [[1.0 / 6.0, 0.0], [0.0, 6.0]];
    let b_err = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (red.b[i][j] - target[i][j]).abs())
        .fold(0.0, f64::max);
    let pq = (red.sep.p(), red.sep.q());
    let mut fact_err = 0.0f64;
    let mut defect = 0.0f64;
    let spec = QuadratureSpec::default();
    for b in [
        red.b,
        [[0.0, 1.0], [-1.0, 0.0]],
        [[1.0, 0.0], [0.5, 1.0]],
        [[2.0, 1.0], [1.0, 1.0]],
    ] {
        let f = factor_sl2(&b).map_err(err)?;
        let p = f.product();
        for i in 0..2 {
            for j in 0..2 {
                fact_err = fact_err.max((p[i][j] - b[i][j]).abs());
            }
        }
        let op = MetaplecticOp::for_matrix(&b).map_err(err)?;
        for w in [g.clone(), Window::hermite(1)] {
            defect = defect.max(intertwining_defect(&op, &w, [0.3, 0.7], &spec).map_err(err)?);
        }
    }
    // the same lattice reached through an extra symplectic map C: (U_C g, CΛ)
    let grid = GridSpec::square(48);
    let (s, red) = GaborSystem::from_lattice(&g, &lat, grid).map_err(err)?;
    let frame = ShiftFrame::original(&red, &lat, &g);
    let mut class_ok = true;
    let mut bound_gap = 0.0f64;
    let mut dist_gap = 0.0f64;
    let d = s.diagnostics();
    let mus = [[1.0, 0.0], [0.5, 0.2], [1.3, 0.5]];
    let patch = lattice_patch(lat.generator(), [0, 0], 4, 10);
    for mu in mus {
        let z = dist_shift_framed(&s, &frame, mu).map_err(err)?.dist;
        let o = gaussian_patch_distance(&patch, mu);
        dist_gap = dist_gap.max((z - o).abs() / o);
    }
    for c in [[[1.0, 0.0], [0.5, 1.0]], [[0.0, 1.0], [-1.0, 0.0]]] {
        let uc = MetaplecticOp::for_matrix(&c)
            .map_err(err)?
            .apply(&g)
            .map_err(err)?;
        let clat = lat.transformed(&c).map_err(err)?;
        let (s2, red2) = GaborSystem::from_lattice(&uc, &clat, grid).map_err(err)?;
        let d2 = s2.diagnostics();
        class_ok &= d2.classification == d.classification && (s2.p(), s2.q()) == (s.p(), s.q());
        bound_gap = bound_gap
            .max((d2.bounds.0 - d.bounds.0).abs() / d.bounds.0)
            .max((d2.bounds.1 - d.bounds.1).abs() / d.bounds.1);
        let frame2 = ShiftFrame::original(&red2, &clat, &uc);
        for mu in mus {
            let cmu = [
                c[0][0] * mu[0] + c[0][1] * mu[1],
                c[1][0] * mu[0] + c[1][1] * mu[1],
            ];
            let a = dist_shift_framed(&s, &frame, mu).map_err(err)?.dist;
            let b = dist_shift_framed(&s2, &frame2, cmu).map_err(err)?.dist;
            dist_gap = dist_gap.max((a - b).abs() / a);
        }
    }
    let ok = b_err < 1e-12
        && pq == (4, 3)
        && fact_err < 1e-12
        && defect < 1e-5
        && class_ok
        && bound_gap < 0.02
        && dist_gap < 0.02;
    Ok((
        ok,
        format!(
            "B err {b_err:.1e}, (P,Q)=({},{}); factorization err {fact_err:.1e}; intertwining defect {defect:.1e}; \
             classification equal={class_ok}, bound gap {bound_gap:.1e}, distance gap {dist_gap:.1e}",
            pq.0, pq.1
        ),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "classification matrix",
            budget: Duration::from_secs(10),
            run: c1_classification,
        },
        Criterion {
            id: 2,
            name: "lattice-point vanishing",
            budget: Duration::from_secs(30),
            run: c2_lattice_vanishing,
        },
        Criterion {
            id: 3,
            name: "upper bound",
            budget: Duration::from_secs(120),
            run: c3_upper_bound,
        },
        Criterion {
            id: 4,
            name: "lower-bound positivity and stability",
            budget: Duration::from_secs(300),
            run: c4_alpha,
        },
        Criterion {
            id: 5,
            name: "quadratic remainder",
            budget: Duration::from_secs(60),
            run: c5_remainder,
        },
        Criterion {
            id: 6,
            name: "orthonormal constants",
            budget: Duration::from_secs(300),
            run: c6_orthonormal,
        },
        Criterion {
            id: 7,
            name: "unit-norm bound cap",
            budget: Duration::from_secs(60),
            run: c7_unit_cap,
        },
        Criterion {
            id: 8,
            name: "kernel counterexample",
            budget: Duration::from_secs(300),
            run: c8_kernel,
        },
        Criterion {
            id: 9,
            name: "algebraic suites",
            budget: Duration::from_secs(30),
            run: c9_algebra,
        },
        Criterion {
            id: 10,
            name: "Zak identity suite",
            budget: Duration::from_secs(60),
            run: c10_zak,
        },
        Criterion {
            id: 11,
            name: "symplectic/metaplectic suite",
            budget: Duration::from_secs(300),
            run: c11_symplectic,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let t = Instant::now();
        let out = (c.run)();
        let el = t.elapsed();
        let (pass, msg) = match out {
            Ok((p, m)) => (p && el <= c.budget, m),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {}: {} ({:.1} s, budget {} s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            msg,
            el.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failed,
        failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
