//! Construction and numerical verification of generalized Ricci surfaces:
//! conformal metrics e^(-2f)|dz|^2 whose curvature satisfies
//! Δ log|K - c| = aK + b away from the zeros of K - c.

pub mod cli;
pub mod error;
pub mod geom;
pub mod jet;
pub mod ode;
pub mod sphere_construct;
pub mod toda;
pub mod tolerances;
pub mod torus_pde;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{Chart, ChartKind, ConformalMetric, RicciType, ScalarField};
