//! Default tolerances shared by the verifiers and the acceptance suite.

/// Overlap agreement of chart factors for closed-form metrics.
pub const OVERLAP_CLOSED_FORM: f64 = 1e-8;

/// Overlap agreement of chart factors for grid-sampled metrics.
pub const OVERLAP_GRID: f64 = 1e-4;

/// Curvature equation residual for closed-form factors.
pub const RESIDUAL_CLOSED_FORM: f64 = 1e-6;

/// Residual for ODE-backed factors (profiles integrated at 1e-10).
pub const RESIDUAL_ODE: f64 = 1e-5;

/// Residual for grid factors differentiated by 4th-order stencils.
pub const RESIDUAL_GRID: f64 = 1e-3;

/// Integral identity defects.
pub const IDENTITY: f64 = 1e-4;

/// Relative threshold flagging candidate zeros of K - c.
pub const ZERO_THRESHOLD: f64 = 1e-3;

/// Accepted distance of a fitted log-slope from an integer order.
pub const ORDER_ACCEPTANCE: f64 = 0.2;

/// Relative sup-norm below which K - c counts as identically zero.
pub const TRIVIAL_TYPE: f64 = 1e-9;

/// Adaptive Runge-Kutta local tolerance.
pub const ODE_TOL: f64 = 1e-10;

/// Prime-integral conservation along trajectories.
pub const PRIME_INTEGRAL: f64 = 1e-8;
