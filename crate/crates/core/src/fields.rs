//! Field containers and lattice operators.
//!
//! ψ lives on sites, A and the spatial current on links, curls on
//! plaquettes. The antisymmetric symbol is fixed as ε₁₂ = +1 = −ε₂₁.
//!
//! Minimal coupling uses the Peierls link factor `W = exp(−i e dx a / ħ)`
//! for a hop from tail to head; under ψ → e^{ieλ/ħ}ψ and
//! a → a + (λ_head − λ_tail)/dx every covariant difference picks up the
//! tail phase only.

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::params::Physics;

/// Complex matter amplitude per site, zero on inactive sites.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteField {
    pub values: Vec<Complex64>,
}

/// Real gauge potential on links: `a1` on horizontal, `a2` on vertical links.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkField {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
}

/// Charge current on links plus charge density on sites.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentField {
    pub j1: Vec<f64>,
    pub j2: Vec<f64>,
    pub j0: Vec<f64>,
}

/// A site function λ generating `A → A + ∇λ`, `ψ → e^{ieλ/ħ}ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeTransform {
    lambda: Vec<f64>,
    boundary_constrained: bool,
}

impl SiteField {
    pub fn zeros(d: &Domain) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); d.n_sites()],
        }
    }

    /// Samples `f(ix, iy)` on active sites.
    pub fn from_fn(d: &Domain, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); d.n_sites()];
        for iy in 0..d.ny() {
            for ix in 0..d.nx() {
                if d.is_active(ix, iy) {
                    values[d.site(ix, iy)] = f(ix, iy);
                }
            }
        }
        Self { values }
    }

    /// Wraps raw values. Inactive sites must hold zero.
    pub fn from_values(d: &Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != d.n_sites() {
            return Err(Error::Shape(format!(
                "site field has {} values, domain has {} sites",
                values.len(),
                d.n_sites()
            )));
        }
        for (k, v) in values.iter().enumerate() {
            if !d.active_mask()[k] && *v != Complex64::new(0.0, 0.0) {
                return Err(Error::Shape(format!(
                    "site ({}, {}) is inactive but carries {v}",
                    k % d.nx(),
                    k / d.nx()
                )));
            }
        }
        Ok(Self { values })
    }

    /// Σ|ψ|² over sites (no area weight).
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }
}

impl LinkField {
    pub fn zeros(d: &Domain) -> Self {
        Self {
            a1: vec![0.0; d.n_hlinks()],
            a2: vec![0.0; d.n_vlinks()],
        }
    }

    /// Samples link values; `f1` and `f2` receive tail coordinates.
    pub fn from_fn(
        d: &Domain,
        mut f1: impl FnMut(usize, usize) -> f64,
        mut f2: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut a = Self::zeros(d);
        for iy in 0..d.ny() {
            for ix in 0..d.nx() {
                if ix + 1 < d.nx() && d.hlink_active(ix, iy) {
                    a.a1[d.hlink(ix, iy)] = f1(ix, iy);
                }
                if iy + 1 < d.ny() && d.vlink_active(ix, iy) {
                    a.a2[d.vlink(ix, iy)] = f2(ix, iy);
                }
            }
        }
        a
    }

    pub fn from_values(d: &Domain, a1: Vec<f64>, a2: Vec<f64>) -> Result<Self> {
        if a1.len() != d.n_hlinks() || a2.len() != d.n_vlinks() {
            return Err(Error::Shape(format!(
                "link field has ({}, {}) values, domain has ({}, {}) links",
                a1.len(),
                a2.len(),
                d.n_hlinks(),
                d.n_vlinks()
            )));
        }
        let a = Self { a1, a2 };
        if a != a.masked(d) {
            return Err(Error::Shape("inactive links carry nonzero values".into()));
        }
        Ok(a)
    }

    /// Copy with every inactive link set to zero.
    pub fn masked(&self, d: &Domain) -> Self {
        let mut out = self.clone();
        for iy in 0..d.ny() {
            for ix in 0..d.nx() {
                if ix + 1 < d.nx() && !d.hlink_active(ix, iy) {
                    out.a1[d.hlink(ix, iy)] = 0.0;
                }
                if iy + 1 < d.ny() && !d.vlink_active(ix, iy) {
                    out.a2[d.vlink(ix, iy)] = 0.0;
                }
            }
        }
        out
    }

    /// `self + s * other`. Entries with a zero increment are copied, so a
    /// stored `-0.0` stays bit-identical.
    pub fn axpy(&self, s: f64, other: &LinkField) -> LinkField {
        let f = |(a, b): (&f64, &f64)| {
            let inc = s * b;
            if inc == 0.0 {
                *a
            } else {
                a + inc
            }
        };
        LinkField {
            a1: self.a1.iter().zip(&other.a1).map(f).collect(),
            a2: self.a2.iter().zip(&other.a2).map(f).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a1.iter().chain(&self.a2).fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl GaugeTransform {
    /// Gauge function with λ = 0 required on every boundary site.
    pub fn boundary_vanishing(d: &Domain, lambda: Vec<f64>) -> Result<Self> {
        let g = Self::unconstrained(d, lambda)?;
        for &(ix, iy) in d.boundary_sites() {
            let v = g.lambda[d.site(ix, iy)];
            if v != 0.0 {
                return Err(Error::Parameter(format!(
                    "gauge function is {v} on boundary site ({ix}, {iy})"
                )));
            }
        }
        Ok(Self {
            boundary_constrained: true,
            ..g
        })
    }

    /// Gauge function without the boundary condition; inactive sites are zeroed.
    pub fn unconstrained(d: &Domain, mut lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != d.n_sites() {
            return Err(Error::Shape(format!(
                "gauge function has {} values, domain has {} sites",
                lambda.len(),
                d.n_sites()
            )));
        }
        for (k, v) in lambda.iter_mut().enumerate() {
            if !d.active_mask()[k] {
                *v = 0.0;
            }
        }
        Ok(Self {
            lambda,
            boundary_constrained: false,
        })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn is_boundary_constrained(&self) -> bool {
        self.boundary_constrained
    }
}

/// Peierls factor for a hop from tail to head across link value `a`.
#[inline]
pub fn peierls(p: &Physics, dx: f64, a: f64) -> Complex64 {
    Complex64::from_polar(1.0, -p.e * dx * a / p.hbar)
}

/// Discrete gradient of a site function: `(λ_head − λ_tail)/dx` on active links.
pub fn gradient(lambda: &[f64], d: &Domain) -> LinkField {
    let dx = d.dx();
    LinkField::from_fn(
        d,
        |ix, iy| (lambda[d.site(ix + 1, iy)] - lambda[d.site(ix, iy)]) / dx,
        |ix, iy| (lambda[d.site(ix, iy + 1)] - lambda[d.site(ix, iy)]) / dx,
    )
}

/// Plaquette curl ε^{mn}∂_m A_n, row-major over plaquettes; zero on
/// inactive plaquettes.
pub fn plaquette_curl(a: &LinkField, d: &Domain) -> Vec<f64> {
    let nx = d.nx();
    let mut c = vec![0.0; d.n_plaquettes()];
    for py in 0..d.ny() - 1 {
        for px in 0..nx - 1 {
            if d.plaquette_active(px, py) {
                c[d.plaquette(px, py)] = (a.a1[d.hlink(px, py)] + a.a2[d.vlink(px + 1, py)]
                    - a.a1[d.hlink(px, py + 1)]
                    - a.a2[d.vlink(px, py)])
                    / d.dx();
            }
        }
    }
    c
}

/// Four-corner mean of a site quantity on every active plaquette.
pub fn plaquette_average(site: &[f64], d: &Domain) -> Vec<f64> {
    let mut out = vec![0.0; d.n_plaquettes()];
    for py in 0..d.ny() - 1 {
        for px in 0..d.nx() - 1 {
            if d.plaquette_active(px, py) {
                out[d.plaquette(px, py)] = 0.25
                    * (site[d.site(px, py)]
                        + site[d.site(px + 1, py)]
                        + site[d.site(px, py + 1)]
                        + site[d.site(px + 1, py + 1)]);
            }
        }
    }
    out
}

/// Applies a gauge transformation to both fields.
pub fn apply_gauge(
    a: &LinkField,
    psi: &SiteField,
    g: &GaugeTransform,
    d: &Domain,
    p: &Physics,
) -> (LinkField, SiteField) {
    let a2 = a.axpy(1.0, &gradient(&g.lambda, d));
    let values = psi
        .values
        .iter()
        .zip(&g.lambda)
        .map(|(v, l)| v * Complex64::from_polar(1.0, p.e * l / p.hbar))
        .collect();
    (a2, SiteField { values })
}

/// Gauge-invariant charge current. On the link t → h,
/// `j = (eħ/(μ dx))·Im(ψ_t* W ψ_h)`, the exact Noether current of the
/// lattice Hamiltonian; `j0 = e|ψ|²`.
pub fn current_density(psi: &SiteField, a: &LinkField, d: &Domain, p: &Physics) -> CurrentField {
    let dx = d.dx();
    let c = p.e * p.hbar / (p.mu * dx);
    let v = &psi.values;
    let mut j1 = vec![0.0; d.n_hlinks()];
    let mut j2 = vec![0.0; d.n_vlinks()];
    for iy in 0..d.ny() {
        for ix in 0..d.nx() {
            let t = v[d.site(ix, iy)].conj();
            if ix + 1 < d.nx() && d.hlink_active(ix, iy) {
                let l = d.hlink(ix, iy);
                j1[l] = c * (t * peierls(p, dx, a.a1[l]) * v[d.site(ix + 1, iy)]).im;
            }
            if iy + 1 < d.ny() && d.vlink_active(ix, iy) {
                let l = d.vlink(ix, iy);
                j2[l] = c * (t * peierls(p, dx, a.a2[l]) * v[d.site(ix, iy + 1)]).im;
            }
        }
    }
    let j0 = v.iter().map(|z| p.e * z.norm_sqr()).collect();
    CurrentField { j1, j2, j0 }
}

/// Net outflow per site, `Σ_links ±j/dx` (the negative adjoint of `gradient`).
pub fn divergence(j1: &[f64], j2: &[f64], d: &Domain) -> Vec<f64> {
    let dx = d.dx();
    let mut div = vec![0.0; d.n_sites()];
    for iy in 0..d.ny() {
        for ix in 0..d.nx() {
            if ix + 1 < d.nx() {
                let f = j1[d.hlink(ix, iy)] / dx;
                div[d.site(ix, iy)] += f;
                div[d.site(ix + 1, iy)] -= f;
            }
            if iy + 1 < d.ny() {
                let f = j2[d.vlink(ix, iy)] / dx;
                div[d.site(ix, iy)] += f;
                div[d.site(ix, iy + 1)] -= f;
            }
        }
    }
    div
}

/// Maps a link current to the gauge-link velocity of the Chern-Simons
/// equation of motion, `Ȧ₁ = −j₂/σ`, `Ȧ₂ = +j₁/σ`, averaging the
/// transverse current over the four nearest links of the other family.
/// Missing or inactive links count as zero; the result is masked.
pub fn transverse_map(j1: &[f64], j2: &[f64], sigma: f64, d: &Domain) -> LinkField {
    let (nx, ny) = (d.nx(), d.ny());
    let get1 = |ix: isize, iy: isize| -> f64 {
        if ix < 0 || iy < 0 || ix as usize + 1 >= nx || iy as usize >= ny {
            0.0
        } else {
            j1[d.hlink(ix as usize, iy as usize)]
        }
    };
    let get2 = |ix: isize, iy: isize| -> f64 {
        if ix < 0 || iy < 0 || ix as usize >= nx || iy as usize + 1 >= ny {
            0.0
        } else {
            j2[d.vlink(ix as usize, iy as usize)]
        }
    };
    let s = 0.25 / sigma;
    LinkField::from_fn(
        d,
        // Horizontal link (x+½, y): vertical links at x, x+1 and y−½, y+½.
        |ix, iy| {
            let (x, y) = (ix as isize, iy as isize);
            -s * (get2(x, y) + get2(x + 1, y) + get2(x, y - 1) + get2(x + 1, y - 1))
        },
        // Vertical link (x, y+½): horizontal links at x−½, x+½ and y, y+1.
        |ix, iy| {
            let (x, y) = (ix as isize, iy as isize);
            s * (get1(x, y) + get1(x - 1, y) + get1(x, y + 1) + get1(x - 1, y + 1))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RectHole;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn holed() -> Domain {
        Domain::build_rectangle(12, 10, 0.7, &[RectHole::new(4, 3, 3, 2)]).unwrap()
    }

    #[test]
    fn curl_of_zero_is_zero() {
        let d = holed();
        assert!(plaquette_curl(&LinkField::zeros(&d), &d).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn landau_gauge_curl() {
        let d = Domain::build_rectangle(10, 8, 0.5, &[]).unwrap();
        let b0 = 0.3;
        let a = LinkField::from_fn(&d, |_, _| 0.0, |ix, _| b0 * ix as f64 * d.dx());
        for v in plaquette_curl(&a, &d) {
            assert!((v - b0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_gauge_is_global_phase() {
        let d = holed();
        let psi = SiteField::from_fn(&d, |ix, iy| c(ix as f64, iy as f64 * 0.5));
        let a = LinkField::from_fn(&d, |ix, _| ix as f64 * 0.1, |_, iy| iy as f64);
        let g = GaugeTransform::unconstrained(&d, vec![0.8; d.n_sites()]).unwrap();
        let (a2, psi2) = apply_gauge(&a, &psi, &g, &d, &Physics::default());
        assert_eq!(a2, a);
        let ph = Complex64::from_polar(1.0, 0.8);
        for (u, v) in psi.values.iter().zip(&psi2.values) {
            assert!((u * ph - v).norm() < 1e-15);
        }
    }

    #[test]
    fn boundary_constraint_enforced() {
        let d = holed();
        assert!(GaugeTransform::boundary_vanishing(&d, vec![1.0; d.n_sites()]).is_err());
        assert!(GaugeTransform::boundary_vanishing(&d, vec![0.0; 3]).is_err());
    }

    #[test]
    fn real_constant_psi_has_no_current() {
        let d = holed();
        let psi = SiteField::from_fn(&d, |_, _| c(0.7, 0.0));
        let j = current_density(&psi, &LinkField::zeros(&d), &d, &Physics::default());
        assert!(j.j1.iter().chain(&j.j2).all(|&v| v == 0.0));
        assert!(j.j0.iter().zip(d.active_mask()).all(|(&v, &m)| if m { (v - 0.49).abs() < 1e-15 } else { v == 0.0 }));
    }

    #[test]
    fn plane_wave_current() {
        // Open strip: interior links see the bulk value.
        let d = Domain::build_rectangle(32, 4, 0.25, &[]).unwrap();
        let p = Physics {
            e: 1.3,
            hbar: 0.9,
            mu: 1.7,
            ..Physics::default()
        };
        let k = 0.4;
        let psi = SiteField::from_fn(&d, |ix, _| Complex64::from_polar(1.0, k * ix as f64 * d.dx()));
        let j = current_density(&psi, &LinkField::zeros(&d), &d, &p);
        let exact = p.e * p.hbar * k / p.mu;
        let rel = (j.j1[d.hlink(10, 1)] - exact).abs() / exact;
        // sin(k dx)/(k dx) − 1 ≈ −(k dx)²/6.
        assert!(rel < (k * d.dx()).powi(2) / 6.0 * 1.01);
        assert!(rel > (k * d.dx()).powi(2) / 6.0 * 0.99);
    }

    #[test]
    fn constant_potential_current() {
        let d = Domain::build_rectangle(8, 8, 0.1, &[]).unwrap();
        let p = Physics::default();
        let a0 = 0.02;
        let psi = SiteField::from_fn(&d, |_, _| c(2.0, 0.0));
        let a = LinkField::from_fn(&d, |_, _| a0, |_, _| 0.0);
        let j = current_density(&psi, &a, &d, &p);
        let exact = -p.e * p.e / p.mu * a0 * 4.0;
        let got = j.j1[d.hlink(3, 3)];
        // sin(e dx a/ħ)/(dx) vs e a/ħ: relative error (e dx a/ħ)²/6.
        assert!((got - exact).abs() / exact.abs() < 1e-6);
    }

    #[test]
    fn divergence_is_adjoint_of_gradient() {
        let d = holed();
        let lambda: Vec<f64> = (0..d.n_sites()).map(|k| ((k * 37) % 11) as f64 * 0.1).collect();
        let g = gradient(&lambda, &d);
        let j1: Vec<f64> = (0..d.n_hlinks()).map(|k| ((k * 13) % 7) as f64 - 3.0).collect();
        let j2: Vec<f64> = (0..d.n_vlinks()).map(|k| ((k * 5) % 9) as f64 - 4.0).collect();
        let j = LinkField { a1: j1, a2: j2 }.masked(&d);
        let div = divergence(&j.a1, &j.a2, &d);
        let lhs: f64 = g.a1.iter().zip(&j.a1).chain(g.a2.iter().zip(&j.a2)).map(|(a, b)| a * b).sum();
        let rhs: f64 = -lambda.iter().zip(&div).map(|(a, b)| a * b).sum::<f64>();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn transverse_map_curl_is_averaged_divergence() {
        let d = holed();
        let sigma = 1.7;
        let j1: Vec<f64> = (0..d.n_hlinks()).map(|k| ((k * 13) % 7) as f64 - 3.0).collect();
        let j2: Vec<f64> = (0..d.n_vlinks()).map(|k| ((k * 5) % 9) as f64 - 4.0).collect();
        let j = LinkField { a1: j1, a2: j2 }.masked(&d);
        let t = transverse_map(&j.a1, &j.a2, sigma, &d);
        let curl = plaquette_curl(&t, &d);
        let div = divergence(&j.a1, &j.a2, &d);
        let avg = plaquette_average(&div, &d);
        for k in 0..curl.len() {
            assert!((curl[k] - avg[k] / sigma).abs() < 1e-12, "plaquette {k}");
        }
    }

    #[test]
    fn uniform_current_rotates() {
        let d = Domain::build_rectangle(8, 8, 1.0, &[]).unwrap();
        let j1 = vec![2.0; d.n_hlinks()];
        let j2 = vec![0.0; d.n_vlinks()];
        let t = transverse_map(&j1, &j2, 1.0, &d);
        assert!(t.a1.iter().all(|&v| v == 0.0));
        // Interior vertical links have all four neighbors present.
        assert_eq!(t.a2[d.vlink(3, 3)], 2.0);
    }

    fn domain_strategy() -> impl Strategy<Value = Domain> {
        (6usize..14, 6usize..14, 0.2f64..2.0, any::<bool>()).prop_map(|(nx, ny, dx, hole)| {
            let holes = if hole { vec![RectHole::new(2, 2, nx - 4, ny - 4)] } else { vec![] };
            Domain::build_rectangle(nx, ny, dx, &holes).unwrap()
        })
    }

    proptest! {
        #[test]
        fn curl_of_gradient_vanishes(d in domain_strategy(), seed in any::<u64>()) {
            let lambda: Vec<f64> = (0..d.n_sites())
                .map(|k| ((seed.wrapping_mul(k as u64 + 1) >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 10.0)
                .collect();
            let curl = plaquette_curl(&gradient(&lambda, &d), &d);
            let scale = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs())) / d.dx();
            for v in curl {
                prop_assert!(v.abs() <= 32.0 * f64::EPSILON * scale, "{v} vs scale {scale}");
            }
        }

        #[test]
        fn gauge_round_trip(d in domain_strategy(), lam in prop::collection::vec(-3.0f64..3.0, 196)) {
            let p = Physics { e: 1.4, hbar: 0.8, ..Physics::default() };
            let lambda: Vec<f64> = lam[..d.n_sites()].to_vec();
            let g = GaugeTransform::unconstrained(&d, lambda.clone()).unwrap();
            let ginv = GaugeTransform::unconstrained(&d, lambda.iter().map(|v| -v).collect()).unwrap();
            let psi = SiteField::from_fn(&d, |ix, iy| c(ix as f64 * 0.3, 1.0 - iy as f64 * 0.2));
            let a = LinkField::from_fn(&d, |ix, iy| (ix + iy) as f64 * 0.1, |ix, _| ix as f64 * -0.2);
            let (a1, psi1) = apply_gauge(&a, &psi, &g, &d, &p);
            let (a2, psi2) = apply_gauge(&a1, &psi1, &ginv, &d, &p);
            for (u, v) in a.a1.iter().chain(&a.a2).zip(a2.a1.iter().chain(&a2.a2)) {
                prop_assert!((u - v).abs() < 1e-12);
            }
            for (u, v) in psi.values.iter().zip(&psi2.values) {
                prop_assert!((u - v).norm() < 1e-12);
            }
        }

        #[test]
        fn current_is_gauge_invariant(d in domain_strategy(), lam in prop::collection::vec(-3.0f64..3.0, 196)) {
            let p = Physics { e: 0.7, hbar: 1.3, mu: 0.6, ..Physics::default() };
            let g = GaugeTransform::unconstrained(&d, lam[..d.n_sites()].to_vec()).unwrap();
            let psi = SiteField::from_fn(&d, |ix, iy| Complex64::from_polar(1.0 + 0.1 * iy as f64, 0.4 * ix as f64));
            let a = LinkField::from_fn(&d, |_, iy| iy as f64 * 0.05, |ix, _| ix as f64 * -0.07);
            let j = current_density(&psi, &a, &d, &p);
            let (a2, psi2) = apply_gauge(&a, &psi, &g, &d, &p);
            let j2 = current_density(&psi2, &a2, &d, &p);
            let scale = j.j1.iter().chain(&j.j2).fold(0.0f64, |m, v| m.max(v.abs()));
            for (u, v) in j.j1.iter().chain(&j.j2).zip(j2.j1.iter().chain(&j2.j2)) {
                prop_assert!((u - v).abs() <= 1e-12 * scale);
            }
            for (u, v) in j.j0.iter().zip(&j2.j0) {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }
}
