//! Browser bindings: Zak-transform modulus, the smallest singular value of
//! the matrix field, and a distance scan over one lattice cell. Each returns
//! a row-major [`Heatmap`] plus a JSON summary.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use zaklat::distance::{bounds_from_scan, dist_scan, ShiftFrame};
use zaklat::gabor::{sigma0, GaborSystem, GridSpec};
use zaklat::zak::zak_field;
use zaklat::{Lattice, Window};

#[wasm_bindgen]
pub struct Heatmap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    summary: String,
}

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Row `r` (bottom to top in the plotted axis) is `values[r*width..]`.
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> String {
        self.summary.clone()
    }
}

impl Heatmap {
    fn new(width: usize, height: usize, values: Vec<f64>, summary: &impl Serialize) -> Self {
        Self {
            width,
            height,
            values,
            summary: serde_json::to_string(summary).unwrap_or_default(),
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// `kind` is one of `gaussian` (param = α), `hermite` (param = n),
/// `exponential` (param = decay) or `bspline` (param = order).
pub fn window(kind: &str, param: f64) -> Result<Window, zaklat::Error> {
    match kind {
        "gaussian" => Window::gaussian(param),
        "hermite" => Ok(Window::hermite(param.max(0.0).round() as usize)),
        "exponential" => Window::two_sided_exponential(param),
        "bspline" => Window::bspline(param.max(1.0).round() as u32),
        _ => Err(zaklat::Error::InvalidParameter(format!("unknown window kind {kind:?}"))),
    }
}

fn check_res(res: usize) -> Result<(), String> {
    if !(2..=256).contains(&res) {
        return Err("resolution must be between 2 and 256".into());
    }
    Ok(())
}

#[derive(Serialize)]
struct ZakSummary {
    min: f64,
    max: f64,
    parseval: f64,
}

/// `|Zg(x, ω)|` on the midpoint grid of the unit square; rows are `ω`.
#[wasm_bindgen]
pub fn zak_modulus(kind: &str, param: f64, res: usize) -> Result<Heatmap, JsError> {
    js(zak_modulus_map(kind, param, res))
}

pub fn zak_modulus_map(kind: &str, param: f64, res: usize) -> Result<Heatmap, String> {
    check_res(res)?;
    let g = window(kind, param).map_err(err)?;
    let f = zak_field(&g, res, res);
    let values = (0..res).flat_map(|i| (0..res).map(move |j| (i, j))).map(|(i, j)| f.get(j, i).norm()).collect();
    let s = ZakSummary {
        min: f.min_modulus(),
        max: f.max_modulus(),
        parseval: f.parseval(),
    };
    Ok(Heatmap::new(res, res, values, &s))
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct SigmaSummary {
    P: usize,
    Q: usize,
    min: f64,
    max: f64,
    riesz_sequence: bool,
    frame_for_L2: bool,
    bounds: (f64, f64),
}

fn system(kind: &str, param: f64, a: f64, b: f64, res: usize) -> Result<(GaborSystem, Lattice, Window), String> {
    let g = window(kind, param).map_err(err)?;
    let lat = Lattice::separable(a, b).map_err(err)?;
    let (sys, _) = GaborSystem::from_lattice(&g, &lat, GridSpec::square(res)).map_err(err)?;
    Ok((sys, lat, g))
}

/// Smallest singular value of `A_g(x, ω)` over `R_P` for `aZ x bZ`; rows are
/// `ω`, columns `x ∈ (0, 1/P)`.
#[wasm_bindgen]
pub fn sigma0_field(kind: &str, param: f64, a: f64, b: f64, res: usize) -> Result<Heatmap, JsError> {
    js(sigma0_map(kind, param, a, b, res))
}

pub fn sigma0_map(kind: &str, param: f64, a: f64, b: f64, res: usize) -> Result<Heatmap, String> {
    check_res(res)?;
    let (sys, _, _) = system(kind, param, a, b, res)?;
    let grid = sys.grid();
    let values: Vec<f64> = (0..res)
        .flat_map(|i| (0..res).map(move |j| j * res + i))
        .map(|k| sigma0(&grid.mats[k]))
        .collect();
    let d = sys.diagnostics();
    let s = SigmaSummary {
        P: d.p,
        Q: d.q,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(0.0, f64::max),
        riesz_sequence: d.classification.riesz_sequence,
        frame_for_L2: d.classification.frame_for_l2,
        bounds: d.bounds,
    };
    Ok(Heatmap::new(res, res, values, &s))
}

#[derive(Serialize)]
struct ScanSummary {
    max_dist: f64,
    alpha_hat: f64,
    beta_hat: f64,
    beta_formula: f64,
}

/// `dist(π(μ)g, 𝒢(g, aZ x bZ))` on a closed `cell_res²` grid over the cell
/// `[0,a] x [0,b]`; rows are the frequency coordinate.
#[wasm_bindgen]
pub fn distance_scan(kind: &str, param: f64, a: f64, b: f64, cell_res: usize, zak_res: usize) -> Result<Heatmap, JsError> {
    js(distance_map(kind, param, a, b, cell_res, zak_res))
}

pub fn distance_map(kind: &str, param: f64, a: f64, b: f64, cell_res: usize, zak_res: usize) -> Result<Heatmap, String> {
    check_res(cell_res)?;
    check_res(zak_res)?;
    let g = window(kind, param).map_err(err)?;
    let lat = Lattice::separable(a, b).map_err(err)?;
    let (sys, red) = GaborSystem::from_lattice(&g, &lat, GridSpec::square(zak_res)).map_err(err)?;
    sys.require_riesz().map_err(|e| {
        if sys.diagnostics().classification.frame_for_l2 {
            "Gabor space is all of L²: every distance is zero".to_string()
        } else {
            err(e)
        }
    })?;
    let frame = ShiftFrame::original(&red, &lat, &g);
    let pts = frame.cell_points(cell_res);
    let reports = dist_scan(&sys, &frame, &pts).map_err(err)?;
    let bounds = bounds_from_scan(&sys, &frame, &reports, cell_res, 0.02).map_err(err)?;
    // cell_points runs over the time index first
    let values = (0..cell_res)
        .flat_map(|j| (0..cell_res).map(move |i| i * cell_res + j))
        .map(|k| reports[k].dist)
        .collect::<Vec<_>>();
    let s = ScanSummary {
        max_dist: values.iter().copied().fold(0.0, f64::max),
        alpha_hat: bounds.alpha_hat,
        beta_hat: bounds.beta_hat,
        beta_formula: bounds.beta_formula,
    };
    Ok(Heatmap::new(cell_res, cell_res, values, &s))
}
