//! Flat `key = value` run configuration.
//!
//! Lines starting with `#` and blank lines are ignored. Command-line
//! overrides use the same `key=value` syntax and win over the file. Every
//! key has a default; [`RunConfig::to_text`] writes the fully resolved
//! configuration, which parses back to the same run.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `domain.shape` | `rectangle` | `rectangle` or `corbino` |
//! | `domain.nx`, `domain.ny` | `32` | rectangle size in sites |
//! | `domain.holes` | (empty) | `x0,y0,w,h` site rectangles separated by `;` |
//! | `domain.n` | `32` | Corbino grid size |
//! | `domain.r_inner`, `domain.r_outer` | `5`, `14` | Corbino radii (length) |
//! | `domain.dx` | `1` | lattice spacing |
//! | `physics.sigma_h`, `physics.hbar`, `physics.e`, `physics.mu` | `1` | couplings |
//! | `integrator.dt` | `auto` | time step; `auto` is 0.05·μdx²/ħ |
//! | `integrator.steps` | `100` | number of steps |
//! | `integrator.record_every` | `1` | steps between diagnostics rows |
//! | `init.kind` | `gaussian` | `zero`, `gaussian`, `uniform`, `rim` or `file` |
//! | `init.center_x`, `init.center_y` | `auto` | packet center (length); `auto` is the grid center |
//! | `init.width` | `3` | packet width (length) |
//! | `init.kx`, `init.ky` | `0.1`, `0` | packet momentum (per length) |
//! | `init.rim_width` | `2` | rim support width in links |
//! | `init.rim_winding` | `20` | rim phase winding |
//! | `init.norm` | `1` | Σ|ψ|²dx² after scaling; `none` keeps raw amplitude; ignored for `zero` and `file` |
//! | `init.file` | (empty) | HSFIELD ψ file for `init.kind = file` |
//! | `init.consistent` | `true` | solve the Gauss constraint for the initial A |
//! | `flux.value` | `0` | flux threaded through `flux.hole` |
//! | `flux.hole` | `0` | hole index for the flux |
//! | `diag.rho_star`, `diag.b_star` | `1e-6` | breakdown thresholds |
//! | `diag.edge_k` | `3` | edge shell width in links |
//! | `quantize.sigma_min`, `quantize.sigma_max`, `quantize.sigma_step` | `0`, `5`, `0.25` | scan range |
//! | `quantize.tol` | `1e-9` | single-valuedness tolerance |
//! | `quantize.l` | `1` | angular quantum number |
//! | `output.dir` | `out` | output directory |
//! | `seed` | `0` | seed for randomized inputs |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::diagnostics::Thresholds;
use crate::domain::{Domain, RectHole};
use crate::error::{Error, Result};
use crate::params::Physics;

const DEFAULTS: &[(&str, &str)] = &[
    ("domain.shape", "rectangle"),
    ("domain.nx", "32"),
    ("domain.ny", "32"),
    ("domain.holes", ""),
    ("domain.n", "32"),
    ("domain.r_inner", "5.0"),
    ("domain.r_outer", "14.0"),
    ("domain.dx", "1.0"),
    ("physics.sigma_h", "1.0"),
    ("physics.hbar", "1.0"),
    ("physics.e", "1.0"),
    ("physics.mu", "1.0"),
    ("integrator.dt", "auto"),
    ("integrator.steps", "100"),
    ("integrator.record_every", "1"),
    ("init.kind", "gaussian"),
    ("init.center_x", "auto"),
    ("init.center_y", "auto"),
    ("init.width", "3.0"),
    ("init.kx", "0.1"),
    ("init.ky", "0.0"),
    ("init.rim_width", "2.0"),
    ("init.rim_winding", "20"),
    ("init.norm", "1.0"),
    ("init.file", ""),
    ("init.consistent", "true"),
    ("flux.value", "0.0"),
    ("flux.hole", "0"),
    ("diag.rho_star", "1e-6"),
    ("diag.b_star", "1e-6"),
    ("diag.edge_k", "3"),
    ("quantize.sigma_min", "0.0"),
    ("quantize.sigma_max", "5.0"),
    ("quantize.sigma_step", "0.25"),
    ("quantize.tol", "1e-9"),
    ("quantize.l", "1.0"),
    ("output.dir", "out"),
    ("seed", "0"),
];

#[derive(Clone, Debug, PartialEq)]
pub enum DomainShape {
    Rectangle { nx: usize, ny: usize, holes: Vec<RectHole> },
    Corbino { n: usize, r_inner: f64, r_outer: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub shape: DomainShape,
    pub dx: f64,
}

impl DomainSpec {
    pub fn build(&self) -> Result<Arc<Domain>> {
        let d = match &self.shape {
            DomainShape::Rectangle { nx, ny, holes } => Domain::build_rectangle(*nx, *ny, self.dx, holes)?,
            DomainShape::Corbino { n, r_inner, r_outer } => Domain::build_corbino(*n, self.dx, *r_inner, *r_outer)?,
        };
        Ok(Arc::new(d))
    }

    fn extent(&self) -> (usize, usize) {
        match &self.shape {
            DomainShape::Rectangle { nx, ny, .. } => (*nx, *ny),
            DomainShape::Corbino { n, .. } => (*n, *n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    Zero,
    Gaussian,
    Uniform,
    Rim,
    File,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitSpec {
    pub kind: InitKind,
    pub center: (f64, f64),
    pub width: f64,
    pub k: (f64, f64),
    pub rim_width: f64,
    pub rim_winding: i64,
    pub norm: Option<f64>,
    pub file: Option<PathBuf>,
    pub consistent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizeSpec {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_step: f64,
    pub tol: f64,
    pub l: f64,
}

/// Fully resolved configuration of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub physics: Physics,
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
    pub init: InitSpec,
    pub flux: f64,
    pub flux_hole: usize,
    pub thresholds: Thresholds,
    pub quantize: QuantizeSpec,
    pub output_dir: PathBuf,
    pub seed: u64,
}

/// Parses `key = value` lines into a map, rejecting malformed lines.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_assignment(line).map_err(|e| Error::Config(format!("line {}: {e}", no + 1)))?);
    }
    Ok(out)
}

/// Splits one `key=value` assignment.
pub fn parse_assignment(s: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key = value, got '{s}'"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty key in '{s}'"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

struct Reader<'a> {
    map: &'a BTreeMap<String, String>,
    errors: Vec<String>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> &str {
        self.map.get(key).map(String::as_str).unwrap_or("")
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, fallback: T) -> T {
        let raw = self.raw(key).to_string();
        match raw.parse() {
            Ok(v) => v,
            Err(_) => {
                self.errors.push(format!("{key}: cannot parse '{raw}'"));
                fallback
            }
        }
    }

    fn float(&mut self, key: &str) -> f64 {
        let v: f64 = self.parse(key, f64::NAN);
        if self.raw(key).parse::<f64>().is_ok() && !v.is_finite() {
            self.errors.push(format!("{key}: must be finite"));
        }
        v
    }

    fn positive(&mut self, key: &str) -> f64 {
        let v = self.float(key);
        if v.is_finite() && v <= 0.0 {
            self.errors.push(format!("{key}: must be positive, got {v}"));
        }
        v
    }

    fn auto_float(&mut self, key: &str) -> Option<f64> {
        if self.raw(key) == "auto" {
            None
        } else {
            Some(self.float(key))
        }
    }
}

fn parse_holes(s: &str) -> std::result::Result<Vec<RectHole>, String> {
    let mut holes = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Vec<usize> = part
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| format!("hole '{part}' is not four non-negative integers"))?;
        if nums.len() != 4 {
            return Err(format!("hole '{part}' needs x0,y0,w,h"));
        }
        holes.push(RectHole::new(nums[0], nums[1], nums[2], nums[3]));
    }
    Ok(holes)
}

impl RunConfig {
    /// Defaults overlaid by `file` (if any) and then by `overrides`.
    pub fn load(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs = Vec::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
            pairs = parse_pairs(&text)?;
        }
        pairs.extend(overrides.iter().cloned());
        Self::from_pairs(&pairs)
    }

    /// Builds a configuration from ordered assignments (later ones win).
    /// All problems are collected into one line-itemized report.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut map: BTreeMap<String, String> = DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let mut errors = Vec::new();
        for (k, v) in pairs {
            if map.contains_key(k) {
                map.insert(k.clone(), v.clone());
            } else {
                errors.push(format!("{k}: unknown key"));
            }
        }
        let mut r = Reader { map: &map, errors };

        let dx = r.positive("domain.dx");
        let shape = match r.raw("domain.shape") {
            "rectangle" => {
                let holes = match parse_holes(r.raw("domain.holes")) {
                    Ok(h) => h,
                    Err(e) => {
                        r.errors.push(format!("domain.holes: {e}"));
                        Vec::new()
                    }
                };
                DomainShape::Rectangle {
                    nx: r.parse("domain.nx", 0),
                    ny: r.parse("domain.ny", 0),
                    holes,
                }
            }
            "corbino" => DomainShape::Corbino {
                n: r.parse("domain.n", 0),
                r_inner: r.positive("domain.r_inner"),
                r_outer: r.positive("domain.r_outer"),
            },
            other => {
                r.errors.push(format!("domain.shape: expected rectangle or corbino, got '{other}'"));
                DomainShape::Rectangle {
                    nx: 0,
                    ny: 0,
                    holes: Vec::new(),
                }
            }
        };
        let domain = DomainSpec { shape, dx };

        let physics = Physics {
            sigma_h: r.float("physics.sigma_h"),
            hbar: r.positive("physics.hbar"),
            e: r.positive("physics.e"),
            mu: r.positive("physics.mu"),
        };
        let dt = match r.auto_float("integrator.dt") {
            Some(v) => {
                if v.is_finite() && v <= 0.0 {
                    r.errors.push(format!("integrator.dt: must be positive, got {v}"));
                }
                v
            }
            None => physics.default_dt(dx),
        };
        let steps = r.parse("integrator.steps", 0usize);
        let record_every = r.parse("integrator.record_every", 1usize);
        if record_every == 0 {
            r.errors.push("integrator.record_every: must be at least 1".into());
        }

        let kind = match r.raw("init.kind") {
            "zero" => InitKind::Zero,
            "gaussian" => InitKind::Gaussian,
            "uniform" => InitKind::Uniform,
            "rim" => InitKind::Rim,
            "file" => InitKind::File,
            other => {
                r.errors.push(format!("init.kind: expected zero, gaussian, uniform, rim or file, got '{other}'"));
                InitKind::Zero
            }
        };
        let (nx, ny) = domain.extent();
        let cx = r.auto_float("init.center_x").unwrap_or((nx as f64 - 1.0) * dx / 2.0);
        let cy = r.auto_float("init.center_y").unwrap_or((ny as f64 - 1.0) * dx / 2.0);
        let width = r.positive("init.width");
        let k = (r.float("init.kx"), r.float("init.ky"));
        let rim_width = r.positive("init.rim_width");
        let rim_winding = r.parse("init.rim_winding", 0i64);
        let norm = if r.raw("init.norm") == "none" {
            None
        } else {
            let v = r.float("init.norm");
            if v < 0.0 {
                r.errors.push(format!("init.norm: must be non-negative, got {v}"));
            }
            Some(v)
        };
        let file = Some(r.raw("init.file"))
            .filter(|s| !s.is_empty())
            .map(PathBuf::from);
        if kind == InitKind::File && file.is_none() {
            r.errors.push("init.file: required when init.kind = file".into());
        }
        let consistent = r.parse("init.consistent", true);

        let flux = r.float("flux.value");
        let flux_hole = r.parse("flux.hole", 0usize);
        let thresholds = Thresholds {
            rho_star: r.float("diag.rho_star"),
            b_star: r.float("diag.b_star"),
            edge_k: r.parse("diag.edge_k", 3u32),
        };
        if thresholds.edge_k == 0 {
            r.errors.push("diag.edge_k: must be at least 1".into());
        }
        let quantize = QuantizeSpec {
            sigma_min: r.float("quantize.sigma_min"),
            sigma_max: r.float("quantize.sigma_max"),
            sigma_step: r.positive("quantize.sigma_step"),
            tol: r.positive("quantize.tol"),
            l: r.float("quantize.l"),
        };
        let output_dir = PathBuf::from(r.raw("output.dir"));
        let seed = r.parse("seed", 0u64);

        if !r.errors.is_empty() {
            return Err(Error::Config(r.errors.join("\n")));
        }
        Ok(Self {
            domain,
            physics,
            dt,
            steps,
            record_every,
            init: InitSpec {
                kind,
                center: (cx, cy),
                width,
                k,
                rim_width,
                rim_winding,
                norm,
                file,
                consistent,
            },
            flux,
            flux_hole,
            thresholds,
            quantize,
            output_dir,
            seed,
        })
    }

    /// Checks needed before time stepping.
    pub fn validate_simulate(&self) -> Result<()> {
        self.physics
            .validate_dynamics()
            .map_err(|e| Error::Config(format!("physics: {e}")))
    }

    /// Resolved configuration as `key = value` lines.
    pub fn to_text(&self) -> String {
        let f = |v: f64| format!("{v:?}");
        let mut lines: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| lines.push((k.to_string(), v));
        match &self.domain.shape {
            DomainShape::Rectangle { nx, ny, holes } => {
                put("domain.shape", "rectangle".into());
                put("domain.nx", nx.to_string());
                put("domain.ny", ny.to_string());
                let hs: Vec<String> = holes
                    .iter()
                    .map(|h| format!("{},{},{},{}", h.x0, h.y0, h.width, h.height))
                    .collect();
                put("domain.holes", hs.join("; "));
            }
            DomainShape::Corbino { n, r_inner, r_outer } => {
                put("domain.shape", "corbino".into());
                put("domain.n", n.to_string());
                put("domain.r_inner", f(*r_inner));
                put("domain.r_outer", f(*r_outer));
            }
        }
        put("domain.dx", f(self.domain.dx));
        put("physics.sigma_h", f(self.physics.sigma_h));
        put("physics.hbar", f(self.physics.hbar));
        put("physics.e", f(self.physics.e));
        put("physics.mu", f(self.physics.mu));
        put("integrator.dt", f(self.dt));
        put("integrator.steps", self.steps.to_string());
        put("integrator.record_every", self.record_every.to_string());
        let kind = match self.init.kind {
            InitKind::Zero => "zero",
            InitKind::Gaussian => "gaussian",
            InitKind::Uniform => "uniform",
            InitKind::Rim => "rim",
            InitKind::File => "file",
        };
        put("init.kind", kind.into());
        put("init.center_x", f(self.init.center.0));
        put("init.center_y", f(self.init.center.1));
        put("init.width", f(self.init.width));
        put("init.kx", f(self.init.k.0));
        put("init.ky", f(self.init.k.1));
        put("init.rim_width", f(self.init.rim_width));
        put("init.rim_winding", self.init.rim_winding.to_string());
        put("init.norm", self.init.norm.map_or_else(|| "none".into(), f));
        put(
            "init.file",
            self.init.file.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        );
        put("init.consistent", self.init.consistent.to_string());
        put("flux.value", f(self.flux));
        put("flux.hole", self.flux_hole.to_string());
        put("diag.rho_star", f(self.thresholds.rho_star));
        put("diag.b_star", f(self.thresholds.b_star));
        put("diag.edge_k", self.thresholds.edge_k.to_string());
        put("quantize.sigma_min", f(self.quantize.sigma_min));
        put("quantize.sigma_max", f(self.quantize.sigma_max));
        put("quantize.sigma_step", f(self.quantize.sigma_step));
        put("quantize.tol", f(self.quantize.tol));
        put("quantize.l", f(self.quantize.l));
        put("output.dir", self.output_dir.display().to_string());
        put("seed", self.seed.to_string());
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
