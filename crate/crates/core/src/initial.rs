//! Initial matter fields.
//!
//! Positions are measured in length units from site (0, 0), so site
//! `(ix, iy)` sits at `(ix·dx, iy·dx)`.

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::fields::SiteField;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialPsi {
    Zero,
    /// `exp(−|x − c|²/(4w²) + i k·x)`, so |ψ|² has standard deviation `w`.
    Gaussian {
        center: (f64, f64),
        width: f64,
        k: (f64, f64),
    },
    /// ψ ≡ 1 on all active sites.
    Uniform,
    /// `exp(i m θ)` about the grid center on sites closer than `width` links
    /// to the outer rim, zero elsewhere.
    Rim { width: f64, winding: i64 },
    Values(SiteField),
}

impl InitialPsi {
    /// Samples the field and rescales it so that Σ|ψ|²dx² = `norm` when given.
    /// `Zero` and `Values` are returned unscaled.
    pub fn build(&self, d: &Domain, norm: Option<f64>) -> Result<SiteField> {
        let dx = d.dx();
        let mut psi = match self {
            InitialPsi::Zero => SiteField::zeros(d),
            InitialPsi::Gaussian { center, width, k } => {
                if !(*width > 0.0) {
                    return Err(Error::Parameter(format!("gaussian width must be positive, got {width}")));
                }
                SiteField::from_fn(d, |ix, iy| {
                    let (x, y) = (ix as f64 * dx, iy as f64 * dx);
                    let r2 = (x - center.0).powi(2) + (y - center.1).powi(2);
                    Complex64::from_polar((-r2 / (4.0 * width * width)).exp(), k.0 * x + k.1 * y)
                })
            }
            InitialPsi::Uniform => SiteField::from_fn(d, |_, _| Complex64::new(1.0, 0.0)),
            InitialPsi::Rim { width, winding } => {
                if !(*width > 0.0) {
                    return Err(Error::Parameter(format!("rim width must be positive, got {width}")));
                }
                let dist = d.distance_from(d.outer_rim());
                let c = d.center();
                SiteField::from_fn(d, |ix, iy| {
                    let dd = dist[d.site(ix, iy)];
                    if dd != u32::MAX && (dd as f64) < *width {
                        let theta = (iy as f64 - c.1).atan2(ix as f64 - c.0);
                        Complex64::from_polar(1.0, *winding as f64 * theta)
                    } else {
                        Complex64::default()
                    }
                })
            }
            InitialPsi::Values(v) => SiteField::from_values(d, v.values.clone())?,
        };
        let norm = match self {
            InitialPsi::Zero | InitialPsi::Values(_) => None,
            _ => norm,
        };
        if let Some(target) = norm {
            if !(target >= 0.0 && target.is_finite()) {
                return Err(Error::Parameter(format!("norm must be non-negative, got {target}")));
            }
            let current = psi.norm_sqr() * dx * dx;
            if current > 0.0 {
                psi.scale((target / current).sqrt());
            } else if target > 0.0 {
                return Err(Error::Parameter("cannot normalize an identically zero field".into()));
            }
        }
        Ok(psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_normalized() {
        let d = Domain::build_rectangle(20, 20, 0.5, &[]).unwrap();
        let g = InitialPsi::Gaussian {
            center: (4.75, 4.75),
            width: 1.5,
            k: (0.2, 0.0),
        };
        let psi = g.build(&d, Some(2.0)).unwrap();
        assert!((psi.norm_sqr() * 0.25 - 2.0).abs() < 1e-12);
        let peak = psi.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(peak > 0.0);
    }

    #[test]
    fn rim_support() {
        let d = Domain::build_corbino(32, 1.0, 5.0, 15.0).unwrap();
        let psi = InitialPsi::Rim { width: 1.0, winding: 4 }.build(&d, None).unwrap();
        for (k, v) in psi.values.iter().enumerate() {
            let on_rim = d.outer_rim().contains(&(k % d.nx(), k / d.nx()));
            assert_eq!(v.norm() > 0.0, on_rim);
        }
    }

    #[test]
    fn zero_is_never_rescaled() {
        let d = Domain::build_rectangle(6, 6, 1.0, &[]).unwrap();
        assert_eq!(InitialPsi::Zero.build(&d, Some(1.0)).unwrap(), SiteField::zeros(&d));
        let far = InitialPsi::Gaussian {
            center: (1e3, 1e3),
            width: 1.0,
            k: (0.0, 0.0),
        };
        assert!(far.build(&d, Some(1.0)).is_err());
    }
}
