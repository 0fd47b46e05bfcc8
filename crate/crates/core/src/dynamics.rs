//! Time evolution of the coupled matter and gauge fields in the A₀ = 0 gauge.
//!
//! One step from (ψⁿ, Aⁿ):
//! 1. predictor `A* = Aⁿ + (dt/2)·T j(ψⁿ, Aⁿ)`;
//! 2. Crank-Nicolson for ψ with A frozen at `A*`;
//! 3. corrector `Aⁿ⁺¹ = Aⁿ + dt·T j(ψ̄, A*)`, with ψ̄ the mean of old and new ψ.
//!
//! `T` is the Chern-Simons map `Ȧ₁ = −j₂/σ`, `Ȧ₂ = +j₁/σ`. Crank-Nicolson
//! satisfies `ρⁿ⁺¹ − ρⁿ = −dt·div j(ψ̄, A*)/e` exactly, and `curl T` equals
//! the plaquette-averaged divergence over σ, so the Gauss constraint is
//! carried from step to step up to solver tolerance.

use std::sync::Arc;

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::fields::{current_density, peierls, plaquette_average, transverse_map, CurrentField, LinkField, SiteField};
use crate::params::Physics;
use crate::solver::conjugate_gradient;

/// Relative tolerance required of every inner linear solve.
pub const SOLVER_TOL: f64 = 1e-12;
const SOLVER_MAX_ITER: usize = 2000;

/// Full simulation state.
#[derive(Clone, Debug)]
pub struct SimState {
    pub domain: Arc<Domain>,
    pub psi: SiteField,
    pub a: LinkField,
    pub t: f64,
    pub physics: Physics,
    pub dt: f64,
}

impl SimState {
    pub fn new(domain: Arc<Domain>, psi: SiteField, a: LinkField, physics: Physics, dt: f64) -> Result<Self> {
        physics.validate_dynamics()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
        }
        let psi = SiteField::from_values(&domain, psi.values)?;
        let a = LinkField::from_values(&domain, a.a1, a.a2)?;
        Ok(Self {
            domain,
            psi,
            a,
            t: 0.0,
            physics,
            dt,
        })
    }

    pub fn current(&self) -> CurrentField {
        current_density(&self.psi, &self.a, &self.domain, &self.physics)
    }

    /// Advances one full step of the coupled scheme.
    pub fn advance(&mut self) -> Result<()> {
        let (d, p, dt) = (&*self.domain, &self.physics, self.dt);
        let j = current_density(&self.psi, &self.a, d, p);
        let a_half = self.a.axpy(0.5 * dt, &transverse_map(&j.j1, &j.j2, p.sigma_h, d));
        let psi_new = crank_nicolson(&self.psi, &a_half, d, p, dt)?;
        let mid = midpoint(&self.psi, &psi_new);
        let j_mid = current_density(&mid, &a_half, d, p);
        self.a = self.a.axpy(dt, &transverse_map(&j_mid.j1, &j_mid.j2, p.sigma_h, d));
        self.psi = psi_new;
        self.t += dt;
        Ok(())
    }
}

/// Arithmetic mean of two site fields.
pub fn midpoint(u: &SiteField, v: &SiteField) -> SiteField {
    SiteField {
        values: u.values.iter().zip(&v.values).map(|(a, b)| (a + b) * 0.5).collect(),
    }
}

/// Precomputed Peierls factors of one gauge configuration.
struct Hopping<'a> {
    d: &'a Domain,
    k: f64,
    wx: Vec<Complex64>,
    wy: Vec<Complex64>,
}

impl<'a> Hopping<'a> {
    fn new(a: &LinkField, d: &'a Domain, p: &Physics) -> Self {
        let dx = d.dx();
        Self {
            d,
            k: p.hopping(dx),
            wx: a.a1.iter().map(|&v| peierls(p, dx, v)).collect(),
            wy: a.a2.iter().map(|&v| peierls(p, dx, v)).collect(),
        }
    }

    fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let d = self.d;
        let (nx, ny) = (d.nx(), d.ny());
        out.iter_mut().for_each(|v| *v = Complex64::default());
        for iy in 0..ny {
            for ix in 0..nx {
                let s = d.site(ix, iy);
                if ix + 1 < nx && d.hlink_active(ix, iy) {
                    let h = s + 1;
                    let w = self.wx[d.hlink(ix, iy)];
                    out[s] += psi[s] - w * psi[h];
                    out[h] += psi[h] - w.conj() * psi[s];
                }
                if iy + 1 < ny && d.vlink_active(ix, iy) {
                    let h = s + nx;
                    let w = self.wy[d.vlink(ix, iy)];
                    out[s] += psi[s] - w * psi[h];
                    out[h] += psi[h] - w.conj() * psi[s];
                }
            }
        }
        for v in out.iter_mut() {
            *v *= self.k;
        }
    }
}

/// Gauge-covariant lattice Hamiltonian with reflecting (zero-flux) boundaries:
/// `(Hψ)(x) = ħ²/(2μdx²) Σ_y [ψ(x) − W_{x→y} ψ(y)]` over active neighbors.
pub fn hamiltonian_apply(psi: &SiteField, a: &LinkField, d: &Domain, p: &Physics) -> SiteField {
    let mut out = vec![Complex64::default(); psi.values.len()];
    Hopping::new(a, d, p).apply(&psi.values, &mut out);
    SiteField { values: out }
}

/// One Crank-Nicolson step `(1 + iτH)ψ' = (1 − iτH)ψ`, τ = dt/2ħ, with `a`
/// frozen. A negative `dt` steps backwards.
pub fn crank_nicolson(psi: &SiteField, a: &LinkField, d: &Domain, p: &Physics, dt: f64) -> Result<SiteField> {
    let h = Hopping::new(a, d, p);
    let n = psi.values.len();
    let tau = dt / (2.0 * p.hbar);
    let i_tau = Complex64::new(0.0, tau);
    let mut hpsi = vec![Complex64::default(); n];
    h.apply(&psi.values, &mut hpsi);
    let b: Vec<Complex64> = psi.values.iter().zip(&hpsi).map(|(v, hv)| v - i_tau * hv).collect();
    // Normal equations: (1 − iτH)(1 + iτH) = 1 + τ²H².
    h.apply(&b, &mut hpsi);
    let rhs: Vec<Complex64> = b.iter().zip(&hpsi).map(|(v, hv)| v - i_tau * hv).collect();
    let mut tmp = vec![Complex64::default(); n];
    let tau2 = tau * tau;
    let op = |x: &[Complex64], y: &mut [Complex64]| {
        h.apply(x, &mut tmp);
        h.apply(&tmp, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi + *yi * tau2;
        }
    };
    let sol = conjugate_gradient(op, &rhs, &b, SOLVER_TOL, SOLVER_MAX_ITER)?;
    Ok(SiteField { values: sol.x })
}

/// Matter update of one step with the state's gauge field held fixed.
pub fn step_matter(s: &SimState) -> Result<SiteField> {
    crank_nicolson(&s.psi, &s.a, &s.domain, &s.physics, s.dt)
}

/// Gauge update `A + dt·Ȧ(j)` with `Ȧ₁ = −j₂/σ`, `Ȧ₂ = +j₁/σ`.
pub fn step_gauge(s: &SimState, j: &CurrentField) -> LinkField {
    s.a.axpy(s.dt, &transverse_map(&j.j1, &j.j2, s.physics.sigma_h, &s.domain))
}

/// Builds a state whose gauge field satisfies the Gauss constraint
/// `−σ curl A = e·⟨|ψ|²⟩` on every active plaquette, by solving for a
/// plaquette stream function χ with χ = 0 off the active plaquettes:
/// `a1 = (χ_above − χ_below)/dx`, `a2 = −(χ_right − χ_left)/dx`.
pub fn initialize_consistent(domain: Arc<Domain>, psi0: SiteField, physics: Physics, dt: f64) -> Result<SimState> {
    physics.validate_dynamics()?;
    let a = consistent_gauge(&domain, &psi0, &physics)?;
    SimState::new(domain, psi0, a, physics, dt)
}

/// Stream-function gauge field for the Gauss constraint of `psi`.
pub fn consistent_gauge(d: &Domain, psi: &SiteField, p: &Physics) -> Result<LinkField> {
    let (npx, npy) = (d.nx() - 1, d.ny() - 1);
    let dx = d.dx();
    let rho_p = plaquette_average(&psi.density(), d);
    // Plaquette Laplacian scaled by dx²; unknowns on active plaquettes only.
    let rhs: Vec<f64> = (0..npy)
        .flat_map(|py| (0..npx).map(move |px| (px, py)))
        .map(|(px, py)| {
            if d.plaquette_active(px, py) {
                -p.e * rho_p[d.plaquette(px, py)] / p.sigma_h * dx * dx
            } else {
                0.0
            }
        })
        .collect();
    let op = |x: &[f64], y: &mut [f64]| {
        for py in 0..npy {
            for px in 0..npx {
                let k = py * npx + px;
                if !d.plaquette_active(px, py) {
                    y[k] = 0.0;
                    continue;
                }
                let nb = |qx: isize, qy: isize| -> f64 {
                    if qx < 0 || qy < 0 || qx as usize >= npx || qy as usize >= npy {
                        return 0.0;
                    }
                    let (qx, qy) = (qx as usize, qy as usize);
                    if d.plaquette_active(qx, qy) {
                        x[qy * npx + qx]
                    } else {
                        0.0
                    }
                };
                let (sx, sy) = (px as isize, py as isize);
                y[k] = 4.0 * x[k] - nb(sx + 1, sy) - nb(sx - 1, sy) - nb(sx, sy + 1) - nb(sx, sy - 1);
            }
        }
    };
    let n = npx * npy;
    let chi = conjugate_gradient(op, &rhs, &vec![0.0; n], SOLVER_TOL, 20 * n + 100)?.x;
    let chi_at = |px: isize, py: isize| -> f64 {
        if px < 0 || py < 0 || px as usize >= npx || py as usize >= npy {
            0.0
        } else {
            chi[py as usize * npx + px as usize]
        }
    };
    Ok(LinkField::from_fn(
        d,
        |ix, iy| (chi_at(ix as isize, iy as isize) - chi_at(ix as isize, iy as isize - 1)) / dx,
        |ix, iy| (chi_at(ix as isize - 1, iy as isize) - chi_at(ix as isize, iy as isize)) / dx,
    ))
}
