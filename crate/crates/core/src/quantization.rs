//! Zero-mode quantization of the gauge field.
//!
//! The spatial mean (Ā₁, Ā₂) is written in polar form Ā₁ = R cos φ,
//! Ā₂ = R sin φ. Angular-momentum eigenfunctions `F(R)·exp(iσlφ/ħ)` are
//! single-valued only for integer `σl/ħ`, which fixes the admissible Hall
//! conductivities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::fields::LinkField;

/// Default quantum number `l`, from the normalization R² = 1.
pub const DEFAULT_L: f64 = 1.0;
/// Default single-valuedness tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest possible mismatch `|z − 1|` for `|z| = 1`.
const MAX_MISMATCH: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroMode {
    pub abar1: f64,
    pub abar2: f64,
    pub r: f64,
    /// Polar angle in (−π, π]; 0 when R = 0.
    pub phi: f64,
}

impl ZeroMode {
    pub fn from_means(abar1: f64, abar2: f64) -> Self {
        let mut phi = abar2.atan2(abar1);
        if phi == -PI {
            phi = PI;
        }
        Self {
            abar1,
            abar2,
            r: abar1.hypot(abar2),
            phi,
        }
    }

    /// Inverse polar map.
    pub fn cartesian(r: f64, phi: f64) -> (f64, f64) {
        (r * phi.cos(), r * phi.sin())
    }
}

/// Means of `a1` and `a2` over active links and their polar form.
pub fn zero_mode(a: &LinkField, d: &Domain) -> ZeroMode {
    let mean = |vals: &[f64], active: &dyn Fn(usize) -> bool| {
        let (mut s, mut n) = (0.0, 0usize);
        for (k, v) in vals.iter().enumerate() {
            if active(k) {
                s += v;
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            s / n as f64
        }
    };
    let nx = d.nx();
    let h = |k: usize| d.hlink_active(k % (nx - 1), k / (nx - 1));
    let v = |k: usize| d.vlink_active(k % nx, k / nx);
    ZeroMode::from_means(mean(&a.a1, &h), mean(&a.a2, &v))
}

/// Zero-mode wavefunction `Ψ(R, φ) = F(R)·exp(iσlφ/ħ)`.
#[derive(Clone, Copy, Debug)]
pub struct WavefunctionSpec<F> {
    pub sigma: f64,
    pub l: f64,
    pub hbar: f64,
    /// Radial profile F(R).
    pub profile: F,
}

pub fn wavefunction_value<F: Fn(f64) -> f64>(w: &WavefunctionSpec<F>, r: f64, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, w.sigma * w.l * phi / w.hbar) * (w.profile)(r)
}

/// Relative jump of Ψ after continuing φ once around the origin, at the
/// first radius in `radii` where F is nonzero; the bare phase mismatch
/// `|exp(2πiσl/ħ) − 1|` if F vanishes at all of them.
pub fn continuation_mismatch<F: Fn(f64) -> f64>(w: &WavefunctionSpec<F>, radii: &[f64]) -> f64 {
    for &r in radii {
        let base = wavefunction_value(w, r, 0.0);
        if base.norm() > 0.0 {
            return (wavefunction_value(w, r, 2.0 * PI) - base).norm() / base.norm();
        }
    }
    phase_mismatch(w.sigma, w.l, w.hbar)
}

/// `|exp(2πiσl/ħ) − 1|`.
pub fn phase_mismatch(sigma: f64, l: f64, hbar: f64) -> f64 {
    (Complex64::from_polar(1.0, 2.0 * PI * sigma * l / hbar) - 1.0).norm()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub sigma: f64,
    pub mismatch: f64,
    pub allowed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub tol: f64,
}

impl Spectrum {
    pub fn allowed(&self) -> Vec<f64> {
        self.entries.iter().filter(|e| e.allowed).map(|e| e.sigma).collect()
    }

    /// The non-negative part of the allowed set.
    pub fn allowed_nonnegative(&self) -> Vec<f64> {
        self.allowed().into_iter().filter(|&s| s >= 0.0).collect()
    }

    /// True when the tolerance admits every candidate regardless of phase.
    pub fn tolerance_dominates(&self) -> bool {
        self.tol >= MAX_MISMATCH
    }
}

/// Evenly spaced candidates `min, min + step, …` up to `max` (inclusive,
/// with a small slack for rounding).
pub fn candidate_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) {
        return Err(Error::Parameter("sigma range must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Parameter(format!("sigma step must be positive, got {step}")));
    }
    if max < min {
        return Err(Error::Parameter(format!("sigma max {max} is below sigma min {min}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

/// Single-valuedness scan with a radial profile: each candidate σ is
/// allowed when the continuation mismatch of its wavefunction is within `tol`.
pub fn single_valuedness_scan_with<F: Fn(f64) -> f64>(
    candidates: &[f64],
    l: f64,
    hbar: f64,
    tol: f64,
    profile: F,
) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::Parameter(format!("hbar must be positive, got {hbar}")));
    }
    let radii = [1.0, 0.5, 2.0, 0.25, 4.0];
    let entries = candidates
        .iter()
        .map(|&sigma| {
            let w = WavefunctionSpec {
                sigma,
                l,
                hbar,
                profile: &profile,
            };
            let mismatch = continuation_mismatch(&w, &radii);
            SpectrumEntry {
                sigma,
                mismatch,
                allowed: mismatch <= tol,
            }
        })
        .collect();
    Ok(Spectrum { entries, tol })
}

/// Scan with the flat profile F ≡ 1.
pub fn single_valuedness_scan(candidates: &[f64], l: f64, hbar: f64, tol: f64) -> Result<Spectrum> {
    single_valuedness_scan_with(candidates, l, hbar, tol, |_| 1.0)
}

/// Zero-mode commutator test. On a uniform A₁ grid, Â₁ acts by
/// multiplication and Â₂ = −i(4πħκ/σ)·d/dA₁ by central differences; the
/// result is the largest deviation of `[Â₁, Â₂]f` from `i(4πħκ/σ)f` over
/// interior grid points.
pub fn commutator_check(sigma: f64, kappa: f64, hbar: f64, grid: &[f64], f: impl Fn(f64) -> Complex64) -> Result<f64> {
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(Error::Parameter(format!("sigma must be finite and nonzero, got {sigma}")));
    }
    if grid.len() < 3 {
        return Err(Error::Parameter("commutator grid needs at least 3 points".into()));
    }
    let h = grid[1] - grid[0];
    if !(h > 0.0) || grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::Parameter("commutator grid must be uniform and increasing".into()));
    }
    let c = 4.0 * PI * hbar * kappa / sigma;
    let minus_ic = Complex64::new(0.0, -c);
    let fv: Vec<Complex64> = grid.iter().map(|&x| f(x)).collect();
    let xf: Vec<Complex64> = grid.iter().zip(&fv).map(|(&x, &v)| v * x).collect();
    let a2 = |g: &[Complex64], i: usize| minus_ic * (g[i + 1] - g[i - 1]) / (2.0 * h);
    let mut worst: f64 = 0.0;
    for i in 1..grid.len() - 1 {
        let comm = a2(&fv, i) * grid[i] - a2(&xf, i);
        let expect = Complex64::new(0.0, c) * fv[i];
        worst = worst.max((comm - expect).norm());
    }
    Ok(worst)
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * h).collect()
}
