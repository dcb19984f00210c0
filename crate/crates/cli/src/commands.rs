//! Subcommand implementations.

use std::io::Write;

use serde::Serialize;
use zaklat::distance::{
    bounds_from_scan, dist_scan, energy_loss_of, estimate_alpha_beta, BoundsReport, DistanceReport, ShiftFrame,
};
use zaklat::gabor::{Coefficients, Extremum, GaborSystem, GridSpec, KernelReport};
use zaklat::lattice::{mat_inv, Mat2, Reduction};
use zaklat::metaplectic::MetaplecticOp;
use zaklat::window::l2_norm;
use zaklat::zak::zak_field;
use zaklat::{Error as LibError, Lattice, Window};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{csv_writer, num, open, opt_num, write_json};

/// The configured window and lattice, reduced to separable form.
pub struct Setup {
    pub window: Window,
    pub lattice: Lattice,
    pub sys: GaborSystem,
    pub red: Reduction,
    pub frame: ShiftFrame,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let window = cfg.build_window()?;
        let lattice = cfg.build_lattice()?;
        let (sys, red) = GaborSystem::from_lattice(&window, &lattice, cfg.grid_spec())?;
        let frame = ShiftFrame::original(&red, &lattice, &window);
        Ok(Self {
            window,
            lattice,
            sys,
            red,
            frame,
        })
    }

    /// Distance computations need a proper subspace.
    pub fn require_riesz(&self) -> Result<(), CliError> {
        let c = self.sys.diagnostics().classification;
        if c.frame_for_l2 && !c.riesz_sequence {
            return Err(CliError::Precondition("Gabor space is all of L²".into()));
        }
        self.sys.require_riesz()?;
        Ok(())
    }

    pub fn shifts(&self, cfg: &RunConfig) -> Vec<[f64; 2]> {
        cfg.shifts().unwrap_or_else(|| self.frame.cell_points(cfg.grid.cell_res))
    }
}

#[derive(Serialize)]
struct Minimizer {
    sigma0: Extremum,
    sigma1: Extremum,
    sigma0_adj: Extremum,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ClassifyReport {
    P: usize,
    Q: usize,
    B: Mat2,
    unimodular: [[i64; 2]; 2],
    grid: (usize, usize),
    sigma0_min: f64,
    sigma1_min: f64,
    sigma0_adj_min: f64,
    sigma_max: f64,
    classification: zaklat::gabor::Classification,
    bounds: (f64, f64),
    minimizer: Minimizer,
}

pub fn classify(cfg: &RunConfig) -> Result<(), CliError> {
    let s = Setup::new(cfg)?;
    let d = s.sys.diagnostics();
    let report = ClassifyReport {
        P: d.p,
        Q: d.q,
        B: s.red.b,
        unimodular: s.red.unimodular,
        grid: d.grid,
        sigma0_min: d.sigma0_min,
        sigma1_min: d.sigma1_min,
        sigma0_adj_min: d.sigma0_adj_min,
        sigma_max: d.sigma_max,
        classification: d.classification,
        bounds: d.bounds,
        minimizer: Minimizer {
            sigma0: d.sigma0,
            sigma1: d.sigma1,
            sigma0_adj: d.sigma0_adj,
        },
    };
    write_json(open(cfg.output.path.as_deref())?, &report)
}

pub const DIST_HEADER: [&str; 6] = ["u", "eta", "dist", "lattice_dist", "ratio", "quad_error"];

#[derive(Serialize)]
struct ScanOutput<'a> {
    rows: &'a [DistanceReport],
    bounds: &'a BoundsReport,
}

pub fn dist_scan_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let s = Setup::new(cfg)?;
    s.require_riesz()?;
    let rows = dist_scan(&s.sys, &s.frame, &s.shifts(cfg))?;
    let bounds = bounds_from_scan(&s.sys, &s.frame, &rows, cfg.grid.cell_res, cfg.scan.exclusion)?;
    let out = open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Json => write_json(out, &ScanOutput { rows: &rows, bounds: &bounds }),
        Format::Csv => {
            let mut w = csv_writer(out, &DIST_HEADER)?;
            for r in &rows {
                w.write_record([
                    num(r.mu[0]),
                    num(r.mu[1]),
                    num(r.dist),
                    num(r.lattice_dist),
                    opt_num(r.ratio),
                    num(r.quad_error),
                ])?;
            }
            w.flush()?;
            let b: Box<dyn Write> = match &cfg.output.bounds_path {
                Some(p) => open(Some(p))?,
                None => Box::new(std::io::stderr()),
            };
            write_json(b, &bounds)
        }
    }
}

pub fn bounds(cfg: &RunConfig) -> Result<(), CliError> {
    let s = Setup::new(cfg)?;
    s.require_riesz()?;
    let report = estimate_alpha_beta(&s.sys, &s.frame, cfg.grid.cell_res, cfg.scan.exclusion)?;
    write_json(open(cfg.output.path.as_deref())?, &report)
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct DualSummary {
    P: usize,
    Q: usize,
    tight: bool,
    norm: f64,
    /// `max |A*A − I|` of the system generated by the tight window.
    gram_defect: Option<f64>,
    half_width: f64,
    dx: f64,
    samples: usize,
}

/// Canonical dual (or tight) window, mapped back to the coordinates of the
/// configured lattice.
pub fn dual(cfg: &RunConfig) -> Result<(), CliError> {
    let s = Setup::new(cfg)?;
    s.require_riesz()?;
    let reduced = if cfg.dual.tight {
        s.sys.tight_window()?
    } else {
        s.sys.dual_window()?
    };
    let back = MetaplecticOp::for_matrix(&mat_inv(&s.red.b))?.apply(&reduced)?;
    // emit the symmetric range outside which the samples are negligible
    let dx = cfg.dual.dx;
    let n_max = (back.support().min(s.sys.spec().mw as f64) / dx).floor() as i64;
    let vals: Vec<_> = (-n_max..=n_max).map(|i| back.eval(i as f64 * dx)).collect();
    let peak = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let n = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 1e-13 * peak)
        .map(|(i, _)| (i as i64 - n_max).abs())
        .max()
        .unwrap_or(0);
    let half = n as f64 * dx;
    let out = open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Csv => {
            let mut w = csv_writer(out, &["x", "re", "im"])?;
            for i in -n..=n {
                let v = vals[(i + n_max) as usize];
                w.write_record([num(i as f64 * dx), num(v.re), num(v.im)])?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let gram_defect = if cfg.dual.tight {
                Some(s.sys.with_window(reduced)?.gram_identity_defect())
            } else {
                None
            };
            let summary = DualSummary {
                P: s.sys.p(),
                Q: s.sys.q(),
                tight: cfg.dual.tight,
                norm: l2_norm(&back, &cfg.quadrature())?,
                gram_defect,
                half_width: half,
                dx,
                samples: (2 * n + 1) as usize,
            };
            write_json(out, &summary)
        }
    }
}

#[derive(Serialize)]
struct ZakSummary {
    grid: (usize, usize),
    min_modulus: f64,
    max_modulus: f64,
    /// Grid mean of `|Zg|²`.
    parseval: f64,
    norm_sq: f64,
    parseval_defect: f64,
}

pub fn zak(cfg: &RunConfig) -> Result<(), CliError> {
    let g = cfg.build_window()?;
    let m = cfg.grid.zak_res;
    let field = zak_field(&g, m, m);
    let out = open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Csv => {
            let mut w = csv_writer(out, &["x", "omega", "re", "im"])?;
            for j in 0..m {
                for i in 0..m {
                    let v = field.get(j, i);
                    w.write_record([num(field.x(j)), num(field.omega(i)), num(v.re), num(v.im)])?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let norm_sq = l2_norm(&g, &cfg.quadrature())?.powi(2);
            let parseval = field.parseval();
            write_json(
                out,
                &ZakSummary {
                    grid: (m, m),
                    min_modulus: field.min_modulus(),
                    max_modulus: field.max_modulus(),
                    parseval,
                    norm_sq,
                    parseval_defect: (parseval - norm_sq).abs(),
                },
            )
        }
    }
}

#[derive(Serialize)]
struct OfdmRow {
    u: f64,
    eta: f64,
    energy_loss: f64,
    reconstructible: bool,
}

/// Off-band energy loss of a channel shift, for the window itself or for a
/// configured coefficient sequence.
pub fn ofdm(cfg: &RunConfig) -> Result<(), CliError> {
    let s = Setup::new(cfg)?;
    s.require_riesz()?;
    let f = match cfg.ofdm_coefficients() {
        Some(c) => s.sys.synthesize(&c),
        None => s.sys.window().clone(),
    };
    let c = cfg.ofdm.threshold;
    let rows = s
        .shifts(cfg)
        .into_iter()
        .map(|mu| {
            let loss = energy_loss_of(&s.sys, &f, s.frame.to_separable(mu))?;
            Ok(OfdmRow {
                u: mu[0],
                eta: mu[1],
                energy_loss: loss,
                reconstructible: loss <= c,
            })
        })
        .collect::<Result<Vec<_>, LibError>>()?;
    let out = open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let mut w = csv_writer(out, &["u", "eta", "energy_loss", "reconstructible"])?;
            for r in &rows {
                w.write_record([num(r.u), num(r.eta), num(r.energy_loss), r.reconstructible.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct KernelDemo {
    /// `aZ x bZ` carrying the kernel.
    pub kernel_lattice: (f64, f64),
    /// `2aZ x bZ`, the subspace that turns out to be invariant under `π(a,0)`.
    pub half_lattice: (f64, f64),
    pub kernel: KernelReport,
    pub coeff_norm: f64,
    pub f_norm: f64,
    pub shift: [f64; 2],
    pub energy_loss: f64,
    /// Coefficients of `h` on `2aZ x bZ` in reduced coordinates.
    pub coefficients: Vec<(i64, i64, f64, f64)>,
}

/// Splits a kernel element `Σ c_{k,n} π(ka, nb)g = 0` by the parity of `k`.
/// The odd part is `π(a,0)h` with `h ∈ 𝒢(g, 2aZ x bZ)` and equals minus the
/// even part, which lies in that space too; so `π(a,0)h` stays in it.
/// Returns the energy loss of `h` under the shift `(a, 0)`.
pub fn kernel_demo(window: &Window, a: f64, b: f64, grid: GridSpec, coeff_cut: usize) -> Result<KernelDemo, CliError> {
    let lat1 = Lattice::separable(a, b)?;
    let (s1, r1) = GaborSystem::from_lattice(window, &lat1, grid)?;
    require_diagonal(&r1)?;
    let kernel = s1.find_nontrivial_kernel(coeff_cut)?;
    let lat2 = Lattice::separable(2.0 * a, b)?;
    let (s2, r2) = GaborSystem::from_lattice(window, &lat2, grid)?;
    require_diagonal(&r2)?;
    s2.require_riesz()?;
    // π((2m+1)a, nb) = e^{2πi a n b} π(a,0) π(2ma, nb)
    let mut d = Coefficients::new();
    for (&(k, n), &c) in &kernel.coeffs {
        if k.rem_euclid(2) == 1 {
            let ph = zaklat::gabor::phase(a * n as f64 * b);
            d.insert(((k - 1).div_euclid(2), n), -c * ph);
        }
    }
    let f = s2.synthesize(&d);
    let f_norm = s2.field_norm_sq(&s2.zak_vectors(&f)).sqrt();
    let shift = [a, 0.0];
    let loss = energy_loss_of(&s2, &f, ShiftFrame::original(&r2, &lat2, window).to_separable(shift))?;
    Ok(KernelDemo {
        kernel_lattice: (a, b),
        half_lattice: (2.0 * a, b),
        coeff_norm: kernel.coeff_norm,
        kernel,
        f_norm,
        shift,
        energy_loss: loss,
        coefficients: coefficient_rows(&d),
    })
}

fn require_diagonal(r: &Reduction) -> Result<(), CliError> {
    if r.b[0][1] != 0.0 || r.b[1][0] != 0.0 || r.unimodular != [[1, 0], [0, 1]] {
        return Err(CliError::Domain(LibError::InvalidParameter(
            "kernel demo needs a reduction that keeps time and frequency indices".into(),
        )));
    }
    Ok(())
}

pub fn demo_kernel(cfg: &RunConfig) -> Result<(), CliError> {
    let crate::config::LatticeSpec::Separable { a, b } = cfg.lattice else {
        return Err(CliError::Config("demo-kernel needs a separable lattice".into()));
    };
    let g = cfg.build_window()?;
    let demo = kernel_demo(&g, a.0, b.0, cfg.grid_spec(), cfg.kernel.coeff_cut)?;
    write_json(open(cfg.output.path.as_deref())?, &demo)
}

/// `[m, n, re, im]` rows, the format of `ofdm.coeffs`.
pub fn coefficient_rows(c: &Coefficients) -> Vec<(i64, i64, f64, f64)> {
    c.iter().map(|(&(m, n), v)| (m, n, v.re, v.im)).collect()
}
