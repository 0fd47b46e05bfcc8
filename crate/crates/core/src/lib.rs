//! Lattice simulator for a 2D electron field coupled to a Chern-Simons gauge
//! potential on multiply-connected domains.
//!
//! The matter field obeys a Peierls-substituted Schrödinger equation, the
//! gauge links follow the Chern-Simons equation of motion in the A₀ = 0
//! gauge, and the Gauss constraint ties the plaquette curl to the density.

pub mod config;
pub mod diagnostics;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod holonomy;
pub mod initial;
pub mod params;
pub mod quantization;
pub mod run;
pub mod snapshot;
pub mod solver;

pub use domain::{Domain, Loop, RectHole};
pub use error::{Error, Result};
pub use fields::{CurrentField, GaugeTransform, LinkField, SiteField};
pub use params::Physics;
