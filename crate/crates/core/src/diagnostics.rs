//! Observables recorded along a run.
//!
//! The mean field strength is reported as `B = −⟨curl A⟩` over active
//! plaquettes, the sign for which consistent states give `n e / B = +σ_H`.
//! Missing values are `None` and are written as `NA`.

use crate::domain::Domain;
use crate::dynamics::SimState;
use crate::fields::{current_density, divergence, plaquette_average, plaquette_curl, transverse_map, LinkField, SiteField};
use crate::holonomy::generator_phases;
use crate::params::Physics;

/// |B̄| below this makes the global σ estimate undefined.
pub const B_FLOOR: f64 = 1e-12;
const SCALE_FLOOR: f64 = 1e-300;

/// Regime thresholds for the breakdown indicator and the edge shell width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Interior density scale ρ*.
    pub rho_star: f64,
    /// Curl scale B*.
    pub b_star: f64,
    /// Edge shell width in links.
    pub edge_k: u32,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            rho_star: 1e-6,
            b_star: 1e-6,
            edge_k: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: Option<f64>,
    pub norm: Option<f64>,
    pub gauss_rel: Option<f64>,
    pub continuity_rel: Option<f64>,
    pub n_global: Option<f64>,
    pub b_mean: f64,
    pub sigma_est: Option<f64>,
    pub edge_fraction: Option<f64>,
    pub pure_gauge_max: f64,
    pub holonomies: Vec<f64>,
    pub breakdown: Option<bool>,
}

/// Gauss residual `r = −σ curl A − e⟨|ψ|²⟩` per plaquette (zero on inactive
/// ones) and its relative L∞ size.
pub fn gauss_residual_fields(psi: &SiteField, a: &LinkField, d: &Domain, p: &Physics) -> (Vec<f64>, f64) {
    let curl = plaquette_curl(a, d);
    let rho = plaquette_average(&psi.density(), d);
    let r: Vec<f64> = curl
        .iter()
        .zip(&rho)
        .map(|(c, q)| -p.sigma_h * c - p.e * q)
        .collect();
    let max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = (p.e * max(&rho)).max(p.sigma_h.abs() * max(&curl)).max(SCALE_FLOOR);
    let rel = max(&r) / scale;
    (r, rel)
}

pub fn gauss_residual(s: &SimState) -> (Vec<f64>, f64) {
    gauss_residual_fields(&s.psi, &s.a, &s.domain, &s.physics)
}

/// Mean of `−curl A` over active plaquettes; zero when there are none.
pub fn mean_field(a: &LinkField, d: &Domain) -> f64 {
    let curl = plaquette_curl(a, d);
    let (mut sum, mut count) = (0.0, 0usize);
    for py in 0..d.ny() - 1 {
        for px in 0..d.nx() - 1 {
            if d.plaquette_active(px, py) {
                sum -= curl[d.plaquette(px, py)];
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Areal carrier density `Σ|ψ|² dx² / area`.
pub fn global_density(psi: &SiteField, d: &Domain) -> f64 {
    psi.norm_sqr() * d.dx() * d.dx() / d.area()
}

/// `n e / B̄`, or `None` when |B̄| is below [`B_FLOOR`].
pub fn global_sigma_fields(psi: &SiteField, a: &LinkField, d: &Domain, p: &Physics) -> Option<f64> {
    let b = mean_field(a, d);
    (b.abs() >= B_FLOOR).then(|| global_density(psi, d) * p.e / b)
}

pub fn global_sigma(s: &SimState) -> Option<f64> {
    global_sigma_fields(&s.psi, &s.a, &s.domain, &s.physics)
}

/// Continuity residual over the window `prev, mid, next`: L∞ over sites of
/// `(j0(next) − j0(prev))/(t_next − t_prev) + div j(mid)`, divided by the
/// lattice current scale `e·max|ψ_mid|²·ħ/(μ dx²)`. Zero when that scale
/// vanishes.
pub fn continuity_residual(prev: &SimState, mid: &SimState, next: &SimState) -> f64 {
    let (d, p) = (&*mid.domain, &mid.physics);
    let span = next.t - prev.t;
    let j = current_density(&mid.psi, &mid.a, d, p);
    let div = divergence(&j.j1, &j.j2, d);
    let peak = mid.psi.values.iter().fold(0.0f64, |m, v| m.max(v.norm_sqr()));
    let scale = p.e * peak * p.hbar / (p.mu * d.dx() * d.dx());
    if scale < SCALE_FLOOR {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for k in 0..d.n_sites() {
        if !d.active_mask()[k] {
            continue;
        }
        let dj0 = p.e * (next.psi.values[k].norm_sqr() - prev.psi.values[k].norm_sqr()) / span;
        worst = worst.max((dj0 + div[k]).abs());
    }
    worst / scale
}

/// Ohm-law consistency of the gauge update at `mid`: the Chern-Simons
/// velocity of `j(mid)` against the central difference
/// `(A(next) − A(prev))/(t_next − t_prev)`, relative L∞ over links.
/// `None` when the current vanishes.
pub fn ohm_residual(prev: &SimState, mid: &SimState, next: &SimState) -> Option<f64> {
    let (d, p) = (&*mid.domain, &mid.physics);
    let span = next.t - prev.t;
    let j = current_density(&mid.psi, &mid.a, d, p);
    let rate = transverse_map(&j.j1, &j.j2, p.sigma_h, d);
    let scale = rate.max_abs();
    if scale < SCALE_FLOOR {
        return None;
    }
    let fd = next.a.axpy(-1.0, &prev.a);
    let worst = rate
        .a1
        .iter()
        .zip(&fd.a1)
        .chain(rate.a2.iter().zip(&fd.a2))
        .fold(0.0f64, |m, (r, f)| m.max((r - f / span).abs()));
    Some(worst / scale)
}

/// `‖curl A‖∞` over active plaquettes.
pub fn pure_gauge_residual(a: &LinkField, d: &Domain) -> f64 {
    plaquette_curl(a, d).iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Share of the total |j| carried by links with an endpoint closer than `k`
/// links to the boundary. `None` when no current flows.
pub fn edge_fraction_fields(psi: &SiteField, a: &LinkField, d: &Domain, p: &Physics, k: u32) -> Option<f64> {
    let j = current_density(psi, a, d, p);
    let dist = d.boundary_distance();
    let (mut edge, mut total) = (0.0, 0.0);
    for iy in 0..d.ny() {
        for ix in 0..d.nx() {
            let dt = dist[d.site(ix, iy)];
            if ix + 1 < d.nx() {
                let v = j.j1[d.hlink(ix, iy)].abs();
                total += v;
                if dt.min(dist[d.site(ix + 1, iy)]) < k {
                    edge += v;
                }
            }
            if iy + 1 < d.ny() {
                let v = j.j2[d.vlink(ix, iy)].abs();
                total += v;
                if dt.min(dist[d.site(ix, iy + 1)]) < k {
                    edge += v;
                }
            }
        }
    }
    (total > 0.0).then(|| edge / total)
}

pub fn edge_fraction(s: &SimState, k: u32) -> Option<f64> {
    edge_fraction_fields(&s.psi, &s.a, &s.domain, &s.physics, k)
}

/// Mean |ψ|² over active sites at least `k` links from the boundary.
pub fn interior_density(psi: &SiteField, d: &Domain, k: u32) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for (i, &dist) in d.boundary_distance().iter().enumerate() {
        if d.active_mask()[i] && dist >= k && dist != u32::MAX {
            sum += psi.values[i].norm_sqr();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Departure from the pure-gauge edge regime: appreciable interior density
/// together with appreciable field strength.
pub fn breakdown_fields(psi: &SiteField, a: &LinkField, d: &Domain, th: &Thresholds) -> bool {
    interior_density(psi, d, th.edge_k) > th.rho_star && pure_gauge_residual(a, d) > th.b_star
}

pub fn breakdown_indicator(s: &SimState, th: &Thresholds) -> bool {
    breakdown_fields(&s.psi, &s.a, &s.domain, th)
}

/// All instantaneous diagnostics of a state. Without `psi` the matter
/// columns are missing; `continuity_rel` is supplied by the caller.
pub fn record_fields(
    t: Option<f64>,
    psi: Option<&SiteField>,
    a: &LinkField,
    d: &Domain,
    p: &Physics,
    th: &Thresholds,
    continuity_rel: Option<f64>,
) -> DiagnosticsRecord {
    let b_mean = mean_field(a, d);
    let holonomies = generator_phases(a, d, p).iter().map(|h| h.phase).collect();
    let pure_gauge_max = pure_gauge_residual(a, d);
    match psi {
        Some(psi) => DiagnosticsRecord {
            t,
            norm: Some(psi.norm_sqr() * d.dx() * d.dx()),
            gauss_rel: Some(gauss_residual_fields(psi, a, d, p).1),
            continuity_rel,
            n_global: Some(global_density(psi, d)),
            b_mean,
            sigma_est: global_sigma_fields(psi, a, d, p),
            edge_fraction: edge_fraction_fields(psi, a, d, p, th.edge_k),
            pure_gauge_max,
            holonomies,
            breakdown: Some(breakdown_fields(psi, a, d, th)),
        },
        None => DiagnosticsRecord {
            t,
            norm: None,
            gauss_rel: None,
            continuity_rel: None,
            n_global: None,
            b_mean,
            sigma_est: None,
            edge_fraction: None,
            pure_gauge_max,
            holonomies,
            breakdown: None,
        },
    }
}

pub fn record(s: &SimState, th: &Thresholds, continuity_rel: Option<f64>) -> DiagnosticsRecord {
    record_fields(Some(s.t), Some(&s.psi), &s.a, &s.domain, &s.physics, th, continuity_rel)
}

/// Shortest round-trip decimal, or `NA`.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:?}"))
}

/// Header of the diagnostics time series for a domain of genus `g`.
pub fn csv_header(g: usize) -> String {
    let mut cols: Vec<String> = [
        "t",
        "norm",
        "gauss_rel",
        "continuity_rel",
        "n_global",
        "B_mean",
        "sigma_est",
        "edge_fraction",
        "pure_gauge_max",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend((1..=g).map(|k| format!("holonomy_{k}")));
    cols.push("breakdown".into());
    cols.join(",")
}

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            fmt_opt(self.t),
            fmt_opt(self.norm),
            fmt_opt(self.gauss_rel),
            fmt_opt(self.continuity_rel),
            fmt_opt(self.n_global),
            fmt_opt(Some(self.b_mean)),
            fmt_opt(self.sigma_est),
            fmt_opt(self.edge_fraction),
            fmt_opt(Some(self.pure_gauge_max)),
        ];
        cols.extend(self.holonomies.iter().map(|h| fmt_opt(Some(*h))));
        cols.push(self.breakdown.map_or_else(|| "NA".to_string(), |b| u8::from(b).to_string()));
        cols.join(",")
    }
}
