//! Built-in invariant suite. Output depends only on the level and the seed.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zaklat::distance::{
    beta_upper_bound, dist_scan, dist_shift, derivative_distance, energy_loss_of, estimate_alpha_beta,
    im_inner_product_check, ortho_local_check, ortho_lower_bound, two_vector_lower_bound, ShiftFrame,
};
use zaklat::gabor::{pinv, sigma0, sigma1, GaborSystem, GridSpec};
use zaklat::lattice::{factor_sl2, mat_det, mat_inv, mat_mul, Mat2};
use zaklat::linalg::{cis2pi, max_abs_diff};
use zaklat::metaplectic::{intertwining_defect, MetaplecticOp};
use zaklat::quadrature::QuadratureSpec;
use zaklat::window::{cg_constant, l2_norm, sinc_gap, tf_map_remainder};
use zaklat::zak::{assemble_a, inverse_zak, l_omega, m_omega, zak, zak_field};
use zaklat::{Lattice, SeparableLattice, Window};

use crate::commands::kernel_demo;
use crate::error::CliError;

type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> Check {
    check(name, false, format!("error: {e}"))
}

fn gaussian() -> Window {
    Window::gaussian(1.0).expect("alpha > 0")
}

fn rc(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

fn rmat(r: &mut ChaCha8Rng, m: usize, n: usize) -> CMat {
    CMat::from_fn(m, n, |_, _| rc(r))
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    let scale = a.iter().chain(b.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    max_abs_diff(a, b) / (1.0 + scale)
}

fn pinv_suite(r: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut worst = 0.0f64;
    for case in 0..cases {
        let (m, n) = (1 + case % 6, 1 + (case / 6) % 6);
        let k = 1 + (case / 36) % m.min(n);
        let a = rmat(r, m, k) * rmat(r, k, n);
        let ap = pinv(&a, 1e-10);
        let (pa, aa) = (&ap * &a, &a * &ap);
        worst = worst
            .max(rel(&(&a * &ap * &a), &a))
            .max(rel(&(&ap * &a * &ap), &ap))
            .max(rel(&pa, &pa.adjoint()))
            .max(rel(&aa, &aa.adjoint()))
            .max(rel(&(pinv(&(a.adjoint() * &a), 1e-10) * a.adjoint()), &ap))
            .max(rel(&(a.adjoint() * pinv(&(&a * a.adjoint()), 1e-10)), &ap));
        let u = rmat(r, n, n).qr().q();
        let sq = rmat(r, n, n);
        worst = worst.max(rel(&pinv(&(u.adjoint() * &sq * &u), 1e-10), &(u.adjoint() * pinv(&sq, 1e-10) * &u)));
        let s1 = sigma1(&a, 1e-10);
        worst = worst.max((s1 - sigma1(&a.adjoint(), 1e-10)).abs() / (1.0 + s1));
        let s0 = sigma0(&sq);
        worst = worst.max((sigma0(&(sq.adjoint() * &sq)) - s0 * s0).abs() / (1.0 + s0 * s0));
    }
    check("pseudo-inverse identities", worst < 1e-10, format!("{cases} matrices, max defect {worst:.2e}"))
}

fn two_vector_suite(r: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut bad = 0;
    for _ in 0..cases {
        let f: Vec<Complex64> = (0..8).map(|_| rc(r)).collect();
        let h: Vec<Complex64> = (0..8).map(|_| rc(r)).collect();
        let Ok((b1, b2)) = two_vector_lower_bound(&f, &h) else {
            bad += 1;
            continue;
        };
        let (a, b): (f64, f64) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let lhs: f64 = f.iter().zip(&h).map(|(x, y)| (x * a + y * b).norm_sqr()).sum();
        if lhs < b1 * (a * a + b * b) - 1e-12 || b2 > b1 + 1e-12 {
            bad += 1;
        }
    }
    check("two-vector lower bound", bad == 0, format!("{bad} violations in {cases} tuples"))
}

fn sinc_suite(r: &mut ChaCha8Rng, cases: usize) -> Check {
    let bad = (0..cases)
        .filter(|_| {
            let x: f64 = r.random_range(-1000.0..1000.0);
            sinc_gap(x) > 2.0f64.min(PI * x.abs()) + 1e-12
        })
        .count();
    check("sinc inequality", bad == 0, format!("{bad} violations in {cases} points"))
}

fn sl2(r: &mut ChaCha8Rng) -> Mat2 {
    let a = r.random_range(0.1..10.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
    let (b, c) = (r.random_range(-10.0..10.0), r.random_range(-10.0..10.0));
    [[a, b], [c, (1.0 + b * c) / a]]
}

fn factorization_suite(r: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let m = sl2(r);
        let scale = 1.0 + m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).powi(2);
        match factor_sl2(&m) {
            Ok(f) => {
                let p = f.product();
                for i in 0..2 {
                    for j in 0..2 {
                        worst = worst.max((p[i][j] - m[i][j]).abs() / scale);
                    }
                }
            }
            Err(e) => return failed("SL(2) factorization", e),
        }
    }
    check("SL(2) factorization", worst < 1e-12, format!("{cases} matrices, max scaled error {worst:.2e}"))
}

fn reduction_suite(r: &mut ChaCha8Rng, cases: usize) -> Check {
    let mut bad = 0;
    for _ in 0..cases {
        let (p, q) = loop {
            let (p, q) = (r.random_range(1u32..7), r.random_range(1u32..7));
            if gcd(p, q) == 1 {
                break (p, q);
            }
        };
        let c = sl2(r);
        let gen = mat_mul(&mat_inv(&c), &[[1.0 / q as f64, 0.0], [0.0, p as f64]]);
        let ok = Lattice::new(gen)
            .and_then(|l| {
                let red = l.reduce_to_separable()?;
                let image = l.transformed(&red.b)?;
                Ok((red.sep.p(), red.sep.q()) == (p, q)
                    && (mat_det(&red.b) - 1.0).abs() < 1e-9
                    && image.same_point_set(&red.sep.lattice()))
            })
            .unwrap_or(false);
        if !ok {
            bad += 1;
        }
    }
    check("reduction to separable form", bad == 0, format!("{bad} failures in {cases} lattices"))
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn zak_suite(r: &mut ChaCha8Rng, cases: usize) -> Check {
    let h = Window::hermite(1).tf_shift(0.3, 0.2);
    let g = gaussian();
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let (x, w): (f64, f64) = (r.random_range(0.0..1.0), r.random_range(0.0..1.0));
        let (m, n) = (r.random_range(-3i64..=3), r.random_range(-3i64..=3));
        let (u, eta): (f64, f64) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let z = zak(&h, x, w);
        worst = worst.max((zak(&h, x + m as f64, w + n as f64) - cis2pi(m as f64 * w) * z).norm());
        worst = worst.max((zak(&h.tf_shift(u, eta), x, w) - cis2pi(eta * x) * zak(&h, x - u, w - eta)).norm());
        worst = worst.max((zak(&h.fourier_transform(), x, w) - cis2pi(x * w) * zak(&h, -w, x)).norm());
        for (p, q) in [(4usize, 3usize), (2, 3)] {
            let a = assemble_a(&g, p, q, x, w);
            worst = worst.max(max_abs_diff(&assemble_a(&g, p, q, x + 1.0 / p as f64, w), &(l_omega(p, w) * &a)));
            worst = worst.max(max_abs_diff(&assemble_a(&g, p, q, x - 1.0 / q as f64, w), &(&a * m_omega(q, w))));
        }
    }
    check("Zak covariance and shift relations", worst < 1e-8, format!("{cases} points, max defect {worst:.2e}"))
}

fn parseval_suite(m: usize) -> Check {
    let g = gaussian();
    let field = zak_field(&g, m, m);
    let parseval = (field.parseval() - 0.5f64.sqrt()).abs();
    let s = inverse_zak(&field, 8);
    let round = (0..s.values.len())
        .map(|i| (s.values[i] - g.eval(s.x0 + i as f64 * s.dx)).norm())
        .fold(0.0, f64::max);
    check(
        "Zak Parseval and inversion",
        parseval < 1e-4 && round < 1e-5,
        format!("{m}x{m} grid, Parseval defect {parseval:.2e}, round trip {round:.2e}"),
    )
}

fn classification_suite(m: usize) -> Check {
    let class = |a: f64, b: f64| -> zaklat::Result<_> {
        let (s, _) = GaborSystem::from_lattice(&gaussian(), &Lattice::separable(a, b)?, GridSpec::square(m))?;
        Ok(((s.p(), s.q()), s.diagnostics().classification))
    };
    match (class(2.0, 2.0 / 3.0), class(1.0, 2.0 / 3.0)) {
        (Ok((pq1, c1)), Ok((pq2, c2))) => check(
            "classification matrix",
            pq1 == (4, 3) && c1.riesz_sequence && !c1.frame_for_l2 && pq2 == (2, 3) && c2.frame_for_l2 && !c2.riesz_sequence,
            format!(
                "2Zx(2/3)Z riesz={} frame={}; Zx(2/3)Z riesz={} frame={}",
                c1.riesz_sequence, c1.frame_for_l2, c2.riesz_sequence, c2.frame_for_l2
            ),
        ),
        (Err(e), _) | (_, Err(e)) => failed("classification matrix", e),
    }
}

fn sys43(m: usize) -> zaklat::Result<GaborSystem> {
    GaborSystem::new(gaussian(), SeparableLattice::new(4, 3)?, GridSpec::square(m))
}

fn distance_suite(m: usize, res: usize) -> Check {
    let run = || -> zaklat::Result<Check> {
        let s = sys43(m)?;
        let frame = ShiftFrame::separable(&s);
        let pts: Vec<[f64; 2]> = (-2..=2).flat_map(|i| (-2..=2).map(move |j| (i, j))).map(|(i, j)| s.lattice().point(i, j)).collect();
        let on = dist_scan(&s, &frame, &pts)?.iter().map(|r| r.dist).fold(0.0, f64::max);
        let beta = beta_upper_bound(s.window())?;
        let scan = dist_scan(&s, &frame, &frame.cell_points(res))?;
        let worst = scan.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
        let g_norm = 0.5f64.powf(0.25);
        let mu = [0.1, 1.3];
        let d = dist_shift(&s, mu)?.dist;
        let e = energy_loss_of(&s, s.window(), mu)? * g_norm;
        Ok(check(
            "distance: lattice points, upper bound, projection",
            on < 1e-3 && worst <= 1.01 * beta && (d - e).abs() < 2e-4,
            format!("max dist on lattice {on:.2e}; max ratio {worst:.4} vs beta {beta:.4}; |dist - loss*|g|| {:.2e}", (d - e).abs()),
        ))
    };
    run().unwrap_or_else(|e| failed("distance: lattice points, upper bound, projection", e))
}

fn remainder_suite(r: &mut ChaCha8Rng, cases: usize) -> Check {
    let g = gaussian();
    let spec = QuadratureSpec::default();
    let run = |r: &mut ChaCha8Rng| -> zaklat::Result<Check> {
        let cg = cg_constant(&g, &spec)?;
        let mut bad = 0;
        for _ in 0..cases {
            let (a, b): (f64, f64) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            if tf_map_remainder(&g, a, b, &spec)? > cg * (a * a + b * b) {
                bad += 1;
            }
        }
        Ok(check("quadratic remainder", bad == 0, format!("C_g = {cg:.4}, {bad} violations in {cases} shifts")))
    };
    run(r).unwrap_or_else(|e| failed("quadratic remainder", e))
}

fn cap_suite() -> Check {
    let spec = QuadratureSpec::default();
    let run = || -> zaklat::Result<Check> {
        let cap = (PI / 2.0).sqrt();
        let mut worst = f64::NEG_INFINITY;
        for w in [
            Window::gaussian(0.5)?,
            Window::gaussian(3.0)?,
            Window::hermite(1),
            Window::hermite(3),
            Window::two_sided_exponential(2.0)?,
            Window::bspline(4)?,
        ] {
            let n = l2_norm(&w, &spec)?;
            worst = worst.max(ortho_lower_bound(&w.scale_real(1.0 / n))? - cap);
        }
        let eq = ortho_lower_bound(&Window::gaussian_scaled(1.0, 2f64.powf(0.25))?)?;
        Ok(check(
            "unit-norm cap of the orthonormal constant",
            worst <= 1e-9 && (eq - cap).abs() < 1e-4,
            format!("max excess {worst:.2e}, normalized Gaussian {eq:.8}"),
        ))
    };
    run().unwrap_or_else(|e| failed("unit-norm cap of the orthonormal constant", e))
}

fn tight_system(m: usize) -> zaklat::Result<GaborSystem> {
    let (s, _) = GaborSystem::from_lattice(&gaussian(), &Lattice::separable(2.0, 1.0)?, GridSpec::square(m))?;
    s.with_window(s.tight_window()?)
}

fn orthonormal_suite(r: &mut ChaCha8Rng, m: usize, full: bool) -> Check {
    let run = |r: &mut ChaCha8Rng| -> zaklat::Result<Check> {
        let st = tight_system(m)?;
        let defect = st.gram_identity_defect();
        let im = im_inner_product_check(&st)?;
        let lb = ortho_lower_bound(st.window())?;
        let mut min_ratio = f64::INFINITY;
        for _ in 0..if full { 50 } else { 10 } {
            let th: f64 = r.random_range(0.0..2.0 * PI);
            min_ratio = min_ratio.min(derivative_distance(&st, th.cos(), th.sin())? / lb);
        }
        let mut passed = defect < 1e-4 && (im - PI).abs() < 1e-2 && min_ratio >= 1.0;
        let mut detail = format!("Gram defect {defect:.2e}, Im = {im:.6}, min derivative ratio {min_ratio:.4}");
        if full {
            let local = ortho_local_check(&st)?;
            passed &= local.passed;
            detail += &format!(", ray checks {}/{} within eps = {:.4e}", local.samples - local.violations, local.samples, local.epsilon);
        }
        Ok(check("orthonormal constants", passed, detail))
    };
    run(r).unwrap_or_else(|e| failed("orthonormal constants", e))
}

fn metaplectic_suite() -> Check {
    let spec = QuadratureSpec::default();
    let run = || -> zaklat::Result<Check> {
        let lat = Lattice::separable(2.0, 2.0 / 3.0)?;
        let red = lat.reduce_to_separable()?;
        let target = [[1.0 / 6.0, 0.0], [0.0, 6.0]];
        let b_err = (0..4).map(|k| (red.b[k / 2][k % 2] - target[k / 2][k % 2]).abs()).fold(0.0, f64::max);
        let mut defect = 0.0f64;
        for b in [red.b, [[0.0, 1.0], [-1.0, 0.0]], [[1.0, 0.0], [0.5, 1.0]], [[2.0, 1.0], [1.0, 1.0]]] {
            let op = MetaplecticOp::for_matrix(&b)?;
            defect = defect.max(intertwining_defect(&op, &gaussian(), [0.3, 0.7], &spec)?);
        }
        let pq = (red.sep.p(), red.sep.q());
        Ok(check(
            "metaplectic reduction",
            b_err < 1e-12 && pq == (4, 3) && defect < 1e-5,
            format!("B error {b_err:.2e}, (P,Q) = ({}, {}), intertwining defect {defect:.2e}", pq.0, pq.1),
        ))
    };
    run().unwrap_or_else(|e| failed("metaplectic reduction", e))
}

fn alpha_suite() -> Check {
    let run = || -> zaklat::Result<Check> {
        let s = sys43(64)?;
        let frame = ShiftFrame::separable(&s);
        let a17 = estimate_alpha_beta(&s, &frame, 17, 0.02)?.alpha_hat;
        let a33 = estimate_alpha_beta(&s, &frame, 33, 0.02)?.alpha_hat;
        let change = (a17 - a33).abs() / a17;
        Ok(check(
            "lower bound stability",
            a17 > 0.0 && change < 0.1,
            format!("alpha_hat {a17:.6e} (17) vs {a33:.6e} (33), change {change:.2e}"),
        ))
    };
    run().unwrap_or_else(|e| failed("lower bound stability", e))
}

fn kernel_suite() -> Check {
    match kernel_demo(&gaussian(), 1.0, 2.0 / 3.0, GridSpec::square(64), 8) {
        Ok(d) => check(
            "kernel counterexample",
            d.f_norm > 0.1 * d.coeff_norm && d.energy_loss < 5e-2,
            format!("|f|/|c| = {:.4}, energy loss {:.3e}", d.f_norm / d.coeff_norm, d.energy_loss),
        ),
        Err(CliError::Domain(e)) => failed("kernel counterexample", e),
        Err(e) => failed("kernel counterexample", e),
    }
}

pub fn run(level: Level, seed: u64) -> Vec<Check> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let full = level == Level::Full;
    let scale = if full { 10 } else { 1 };
    let mut out = vec![
        pinv_suite(&mut r, 100 * scale),
        two_vector_suite(&mut r, 10_000 * scale),
        sinc_suite(&mut r, 100_000 * scale),
        factorization_suite(&mut r, 100 * scale),
        reduction_suite(&mut r, 20 * scale),
        zak_suite(&mut r, 20 * scale),
        parseval_suite(if full { 128 } else { 64 }),
        classification_suite(if full { 128 } else { 48 }),
        distance_suite(if full { 64 } else { 32 }, if full { 17 } else { 9 }),
        remainder_suite(&mut r, 100),
        cap_suite(),
        orthonormal_suite(&mut r, if full { 64 } else { 32 }, full),
        metaplectic_suite(),
    ];
    if full {
        out.push(alpha_suite());
        out.push(kernel_suite());
    }
    out
}
