//! Orchestration behind the command-line subcommands.
//!
//! `simulate` writes into the output directory:
//! - `diagnostics.csv`: one row per recorded step;
//! - `initial_{psi,a1,a2}.hsf` and `final_{psi,a1,a2}.hsf`: snapshots;
//! - `manifest.txt`: `#` comment lines (version, wall time) followed by
//!   the resolved configuration, loadable again with `--config`.
//!
//! `quantize` writes `spectrum.txt`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{InitKind, RunConfig};
use crate::diagnostics::{continuity_residual, csv_header, record, record_fields, DiagnosticsRecord};
use crate::dynamics::{initialize_consistent, SimState};
use crate::error::{Error, Result};
use crate::fields::LinkField;
use crate::holonomy::insert_flux;
use crate::initial::InitialPsi;
use crate::quantization::{candidate_grid, single_valuedness_scan, Spectrum};
use crate::snapshot::{read_links, read_psi, write_state};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const SPECTRUM_FILE: &str = "spectrum.txt";

/// Builds the initial state described by `cfg`.
pub fn initial_state(cfg: &RunConfig) -> Result<SimState> {
    cfg.validate_simulate()?;
    let d = cfg.domain.build()?;
    let spec = match cfg.init.kind {
        InitKind::Zero => InitialPsi::Zero,
        InitKind::Gaussian => InitialPsi::Gaussian {
            center: cfg.init.center,
            width: cfg.init.width,
            k: cfg.init.k,
        },
        InitKind::Uniform => InitialPsi::Uniform,
        InitKind::Rim => InitialPsi::Rim {
            width: cfg.init.rim_width,
            winding: cfg.init.rim_winding,
        },
        InitKind::File => {
            let path = cfg.init.file.as_ref().expect("validated at load");
            InitialPsi::Values(read_psi(path, &d)?)
        }
    };
    let psi = spec.build(&d, cfg.init.norm)?;
    let mut state = if cfg.init.consistent {
        initialize_consistent(d.clone(), psi, cfg.physics, cfg.dt)?
    } else {
        SimState::new(d.clone(), psi, LinkField::zeros(&d), cfg.physics, cfg.dt)?
    };
    if cfg.flux != 0.0 {
        state.a = insert_flux(&state.a, &d, cfg.flux_hole, cfg.flux)?;
    }
    Ok(state)
}

/// Result of an in-memory simulation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub initial: SimState,
    pub last: SimState,
    pub rows: Vec<DiagnosticsRecord>,
}

/// Runs `cfg.steps` steps, recording every `cfg.record_every`. The
/// continuity column of a row uses its neighbouring records and is missing
/// on the first and last rows.
pub fn simulate(cfg: &RunConfig) -> Result<Trajectory> {
    let initial = initial_state(cfg)?;
    let th = cfg.thresholds;
    let mut state = initial.clone();
    let mut rows = Vec::with_capacity(cfg.steps / cfg.record_every + 1);
    let mut prev: Option<SimState> = None;
    let mut cur = state.clone();
    for step in 1..=cfg.steps {
        state
            .advance()
            .map_err(|e| Error::AtStep { step, source: Box::new(e) })?;
        if step % cfg.record_every == 0 {
            let cont = prev.as_ref().map(|p| continuity_residual(p, &cur, &state));
            rows.push(record(&cur, &th, cont));
            prev = Some(std::mem::replace(&mut cur, state.clone()));
        }
    }
    rows.push(record(&cur, &th, None));
    Ok(Trajectory {
        initial,
        last: state,
        rows,
    })
}

/// Summary of a completed `simulate` invocation.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub rows: usize,
    pub wall_time_s: f64,
}

pub fn run_simulate(cfg: &RunConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out)?;
    let traj = simulate(cfg)?;
    let d = &traj.initial.domain;
    write_state(out, "initial", &traj.initial.psi, &traj.initial.a, d)?;
    write_state(out, "final", &traj.last.psi, &traj.last.a, d)?;
    let mut csv = csv_header(d.genus());
    csv.push('\n');
    for r in &traj.rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    std::fs::write(out.join(DIAGNOSTICS_FILE), csv)?;
    let wall = start.elapsed().as_secs_f64();
    let manifest = format!(
        "# hallsim {}\n# wall_time_s = {wall:.3}\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.to_text()
    );
    std::fs::write(out.join(MANIFEST_FILE), manifest)?;
    Ok(RunSummary {
        out_dir: out.clone(),
        rows: traj.rows.len(),
        wall_time_s: wall,
    })
}

/// Compact set notation; integral values are printed without a fraction.
pub fn format_set(values: &[f64]) -> String {
    let items: Vec<String> = values
        .iter()
        .map(|&v| {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                format!("{}", v as i64)
            } else {
                format!("{v:?}")
            }
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

/// Spectrum listing: one `sigma, mismatch, allowed` line per candidate,
/// then the non-negative allowed set and the full allowed set.
pub fn format_spectrum(s: &Spectrum) -> String {
    let mut out = String::from("sigma, mismatch, allowed\n");
    for e in &s.entries {
        out.push_str(&format!("{:?}, {:?}, {}\n", e.sigma, e.mismatch, e.allowed));
    }
    out.push_str(&format!("allowed_set = {}\n", format_set(&s.allowed_nonnegative())));
    out.push_str(&format!("allowed_set_all = {}\n", format_set(&s.allowed())));
    out
}

pub fn quantize(cfg: &RunConfig) -> Result<Spectrum> {
    let q = &cfg.quantize;
    cfg.physics.validate_scales()?;
    let candidates = candidate_grid(q.sigma_min, q.sigma_max, q.sigma_step)?;
    single_valuedness_scan(&candidates, q.l, cfg.physics.hbar, q.tol)
}

pub fn run_quantize(cfg: &RunConfig) -> Result<(Spectrum, String)> {
    let s = quantize(cfg)?;
    let text = format_spectrum(&s);
    std::fs::create_dir_all(&cfg.output_dir)?;
    std::fs::write(cfg.output_dir.join(SPECTRUM_FILE), &text)?;
    Ok((s, text))
}

/// Diagnostics of a saved state on the domain of `cfg`. Without a ψ file
/// the matter columns are missing. Time and continuity are always missing.
pub fn diagnose(cfg: &RunConfig, psi: Option<&Path>, a1: &Path, a2: &Path) -> Result<DiagnosticsRecord> {
    cfg.physics.validate_scales()?;
    let d = cfg.domain.build()?;
    let a = read_links(a1, a2, &d)?;
    let psi = psi.map(|p| read_psi(p, &d)).transpose()?;
    Ok(record_fields(None, psi.as_ref(), &a, &d, &cfg.physics, &cfg.thresholds, None))
}
