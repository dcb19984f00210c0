//! Run configuration: one JSON document, with `--a.b=value` overrides applied
//! on top before deserialization.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use zaklat::gabor::{Coefficients, GridSpec};
use zaklat::quadrature::QuadratureSpec;
use zaklat::window::Samples;
use zaklat::{Lattice, Smoothness, Window};

use crate::error::CliError;

/// A real number given either as a JSON number or as a string `"p/q"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NumRepr", into = "f64")]
pub struct Num(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum NumRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<NumRepr> for Num {
    type Error = String;

    fn try_from(r: NumRepr) -> Result<Self, String> {
        match r {
            NumRepr::Number(v) => Ok(Num(v)),
            NumRepr::Text(s) => parse_fraction(&s).map(Num).ok_or_else(|| format!("not a number: {s:?}")),
        }
    }
}

impl From<Num> for f64 {
    fn from(n: Num) -> f64 {
        n.0
    }
}

fn parse_fraction(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    Gaussian {
        alpha: Num,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        amplitude: Option<Num>,
    },
    Hermite {
        n: usize,
    },
    TwoSidedExponential {
        decay: Num,
    },
    Bspline {
        order: u32,
    },
    /// Two-column CSV `x, re[, im]` on a uniform grid of step `dx`.
    Sampled {
        file: PathBuf,
        dx: Num,
        #[serde(default = "default_sampled_smoothness")]
        smoothness: Smoothness,
    },
}

fn default_sampled_smoothness() -> Smoothness {
    Smoothness::L2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LatticeSpec {
    Matrix([[Num; 2]; 2]),
    Separable { a: Num, b: Num },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Scan points per side of the fundamental cell.
    pub cell_res: usize,
    /// Zak-domain grid points per side of `R_P`.
    pub zak_res: usize,
    pub quad_tol: f64,
    pub riesz_tol: f64,
    pub rank_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            cell_res: 17,
            zak_res: 64,
            quad_tol: 1e-10,
            riesz_tol: 1e-6,
            rank_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub direction: [Num; 2],
    pub t: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Explicit shifts; when absent the fundamental cell is scanned.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<[Num; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray: Option<RaySpec>,
    pub exclusion: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            mu: None,
            ray: None,
            exclusion: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    /// Defaults to stdout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Where `dist-scan` writes its bounds report; defaults to stderr.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds_path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            path: None,
            bounds_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OfdmConfig {
    /// Reconstructible when the energy loss is at most this.
    pub threshold: f64,
    /// `[m, n, re, im]` rows for `Σ c π(m/Q, nP) g` in reduced coordinates;
    /// the window itself when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<(i64, i64, f64, f64)>>,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            threshold: 0.05,
            coeffs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DualConfig {
    /// Tight window `S^{-1/2}g` instead of the canonical dual.
    pub tight: bool,
    /// Sample spacing of the emitted CSV.
    pub dx: f64,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self {
            tight: false,
            dx: 1.0 / 64.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    /// Coefficients are kept for `|m|, |n| ≤ coeff_cut`.
    pub coeff_cut: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { coeff_cut: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub window: WindowSpec,
    pub lattice: LatticeSpec,
    pub grid: GridConfig,
    pub scan: ScanConfig,
    pub output: OutputConfig,
    pub ofdm: OfdmConfig,
    pub dual: DualConfig,
    pub kernel: KernelConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            window: WindowSpec::Gaussian {
                alpha: Num(1.0),
                amplitude: None,
            },
            lattice: LatticeSpec::Separable {
                a: Num(1.0 / 3.0),
                b: Num(4.0),
            },
            grid: GridConfig::default(),
            scan: ScanConfig::default(),
            output: OutputConfig::default(),
            ofdm: OfdmConfig::default(),
            dual: DualConfig::default(),
            kernel: KernelConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads `path` (if any), applies `overrides` (`key.path=value`) and
    /// validates.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut doc = serde_json::to_value(RunConfig::default()).expect("default config serializes");
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let file: Value =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            merge(&mut doc, file, 0);
        }
        for (key, value) in overrides {
            set_path(&mut doc, key, parse_value(value))?;
        }
        let cfg: RunConfig = serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if g.cell_res < 2 || g.zak_res < 2 {
            return Err(CliError::Config("resolutions must be at least 2".into()));
        }
        if !(g.quad_tol > 0.0) {
            return Err(CliError::Config("grid.quad_tol must be positive".into()));
        }
        if !(self.scan.exclusion >= 0.0) {
            return Err(CliError::Config("scan.exclusion must be nonnegative".into()));
        }
        if !(self.dual.dx > 0.0) {
            return Err(CliError::Config("dual.dx must be positive".into()));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            riesz_tol: self.grid.riesz_tol,
            rank_tol: self.grid.rank_tol,
            ..GridSpec::square(self.grid.zak_res)
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.grid.quad_tol,
            ..QuadratureSpec::default()
        }
    }

    pub fn build_window(&self) -> Result<Window, CliError> {
        let w = match &self.window {
            WindowSpec::Gaussian { alpha, amplitude } => match amplitude {
                Some(a) => Window::gaussian_scaled(alpha.0, a.0)?,
                None => Window::gaussian(alpha.0)?,
            },
            WindowSpec::Hermite { n } => Window::hermite(*n),
            WindowSpec::TwoSidedExponential { decay } => Window::two_sided_exponential(decay.0)?,
            WindowSpec::Bspline { order } => Window::bspline(*order)?,
            WindowSpec::Sampled { file, dx, smoothness } => Window::sampled(read_samples(file, dx.0)?, *smoothness)?,
        };
        Ok(w)
    }

    pub fn build_lattice(&self) -> Result<Lattice, CliError> {
        let l = match &self.lattice {
            LatticeSpec::Matrix(m) => Lattice::new([[m[0][0].0, m[0][1].0], [m[1][0].0, m[1][1].0]])?,
            LatticeSpec::Separable { a, b } => Lattice::separable(a.0, b.0)?,
        };
        Ok(l)
    }

    pub fn shifts(&self) -> Option<Vec<[f64; 2]>> {
        if let Some(mu) = &self.scan.mu {
            return Some(mu.iter().map(|m| [m[0].0, m[1].0]).collect());
        }
        self.scan.ray.as_ref().map(|r| {
            let e = [r.direction[0].0, r.direction[1].0];
            r.t.iter().map(|t| [t.0 * e[0], t.0 * e[1]]).collect()
        })
    }

    pub fn ofdm_coefficients(&self) -> Option<Coefficients> {
        self.ofdm.coeffs.as_ref().map(|rows| {
            rows.iter()
                .map(|&(m, n, re, im)| ((m, n), Complex64::new(re, im)))
                .collect()
        })
    }
}

/// Deep merge of `src` into `dst`. The tagged `window` and `lattice`
/// objects are replaced whole so a file can switch their kind.
fn merge(dst: &mut Value, src: Value, depth: usize) {
    match (dst, src) {
        (Value::Object(d), Value::Object(s)) => {
            for (k, v) in s {
                let whole = depth == 0 && (k == "window" || k == "lattice");
                match d.get_mut(&k) {
                    Some(slot) if !whole => merge(slot, v, depth + 1),
                    _ => {
                        d.insert(k, v);
                    }
                }
            }
        }
        (d, s) => *d = s,
    }
}

/// Override values are JSON when they parse as JSON, strings otherwise.
fn parse_value(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

fn set_path(doc: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("malformed override key {key:?}")));
    }
    for (i, part) in parts.iter().enumerate() {
        let obj = match cur {
            Value::Object(o) => o,
            _ => return Err(CliError::Config(format!("override {key:?}: {part:?} is not inside an object"))),
        };
        // switching the variant of a tagged section drops the old fields
        if i == 1 && parts[0] == "lattice" && !obj.contains_key(*part) {
            obj.clear();
        }
        if i == 1 && parts[0] == "window" && *part == "kind" {
            obj.clear();
        }
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

fn read_samples(path: &Path, dx: f64) -> Result<Samples, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    if !(dx > 0.0) {
        return Err(bad("dx must be positive".into()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let nums: Vec<f64> = match rec.iter().map(str::parse).collect() {
            Ok(v) => v,
            // a header row
            Err(_) if line == 0 => continue,
            Err(e) => return Err(bad(format!("row {}: {e}", line + 1))),
        };
        if !(2..=3).contains(&nums.len()) {
            return Err(bad(format!("row {}: expected 2 or 3 columns", line + 1)));
        }
        xs.push(nums[0]);
        values.push(Complex64::new(nums[1], nums.get(2).copied().unwrap_or(0.0)));
    }
    let Some(&x0) = xs.first() else {
        return Err(bad("no samples".into()));
    };
    for (i, x) in xs.iter().enumerate() {
        if (x - (x0 + i as f64 * dx)).abs() > 1e-6 * dx.max(1.0) {
            return Err(bad(format!("row {}: x = {x} is off the grid x0 + n*dx", i + 1)));
        }
    }
    Ok(Samples::new(x0, dx, values))
}
