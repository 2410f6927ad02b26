//! Explicit families: closed-form spheres, rotational ODE spheres and
//! Delaunay-type tori.

mod delaunay;
pub mod rk;
mod rotational;
mod sphere2;
pub mod taylor;

pub use delaunay::{delaunay_torus_metric, potential as delaunay_potential, solve_delaunay, DelaunayProfile};
pub use rotational::{rotational_metric, solve_rotational, RotationalProfile};
pub use sphere2::{sphere2_metric, Sphere2Params};
