//! Wilson-loop phases of the gauge links around closed lattice loops.

use std::f64::consts::PI;

use crate::domain::{Axis, Domain, Loop};
use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::fields::LinkField;
use crate::params::Physics;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopPhase {
    pub loop_id: usize,
    /// Unwrapped line integral ∮A·dl.
    pub raw: f64,
    /// (e/ħ)∮A·dl wrapped into (−π, π].
    pub phase: f64,
}

/// Wraps an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Signed line integral of `a` along `lp`. Fails on inactive links.
pub fn line_integral(a: &LinkField, lp: &Loop, d: &Domain) -> Result<f64> {
    let mut sum = 0.0;
    for (l, sign) in lp.signed_links() {
        if !d.link_active(l) {
            return Err(Error::Loop(format!("loop crosses inactive link {l:?}")));
        }
        let v = match l.axis {
            Axis::X => a.a1[d.hlink(l.ix, l.iy)],
            Axis::Y => a.a2[d.vlink(l.ix, l.iy)],
        };
        sum += sign * v;
    }
    Ok(sum * d.dx())
}

pub fn wilson_loop(a: &LinkField, lp: &Loop, d: &Domain, p: &Physics, loop_id: usize) -> Result<LoopPhase> {
    let raw = line_integral(a, lp, d)?;
    Ok(LoopPhase {
        loop_id,
        raw,
        phase: wrap_phase(p.e * raw / p.hbar),
    })
}

/// Wilson phases around every generator loop of the domain.
pub fn generator_phases(a: &LinkField, d: &Domain, p: &Physics) -> Vec<LoopPhase> {
    d.generator_loops()
        .iter()
        .enumerate()
        // Generator loops are validated against the mask at construction.
        .map(|(k, lp)| wilson_loop(a, lp, d, p, k).expect("generator loop on active links"))
        .collect()
}

/// Threads flux `flux` through hole `hole`: every active horizontal link
/// crossing the vertical ray from the hole centroid to the upper frame is
/// shifted by `−flux/dx`. The curl is unchanged on active plaquettes and a
/// counter-clockwise loop around the hole gains `flux`.
pub fn insert_flux(a: &LinkField, d: &Domain, hole: usize, flux: f64) -> Result<LinkField> {
    let h = d
        .holes()
        .get(hole)
        .ok_or_else(|| Error::Parameter(format!("hole {hole} does not exist (genus {})", d.genus())))?;
    let (cx, cy) = h.centroid;
    let ix0 = cx.floor() as usize;
    if ix0 + 1 >= d.nx() {
        return Err(Error::Parameter("hole centroid on the right frame".into()));
    }
    let mut out = a.clone();
    for iy in 0..d.ny() {
        if (iy as f64) > cy && d.hlink_active(ix0, iy) {
            out.a1[d.hlink(ix0, iy)] -= flux / d.dx();
        }
    }
    Ok(out)
}

/// Largest phase excursion of `lp` relative to the first state in `series`.
pub fn holonomy_drift(series: &[SimState], lp: &Loop) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Parameter("holonomy drift needs at least two states".into()));
    }
    let s0 = &series[0];
    let p0 = wilson_loop(&s0.a, lp, &s0.domain, &s0.physics, 0)?.phase;
    let mut worst: f64 = 0.0;
    for s in &series[1..] {
        let p = wilson_loop(&s.a, lp, &s.domain, &s.physics, 0)?.phase;
        worst = worst.max(wrap_phase(p - p0).abs());
    }
    Ok(worst)
}
