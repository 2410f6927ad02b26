//! The closed-form sphere family |dz|² / (|1+τz^(ℓ+1)|² + |z|^(2ℓ+2))^(2/(ℓ+1)).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ConformalMetric, PointFn};
use crate::jet::{CJet, MAX_DEG};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere2Params {
    pub ell: u32,
    pub tau: f64,
}

impl Sphere2Params {
    pub fn new(ell: u32, tau: f64) -> Result<Self> {
        let p = Sphere2Params { ell, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell < 1 || !(self.tau >= 0.0) {
            return Err(Error::Precondition(format!("need ℓ ≥ 1 and τ ≥ 0, got ℓ={} τ={}", self.ell, self.tau)));
        }
        Ok(())
    }
}

/// f = (1/(ℓ+1)) log(|1+τz^(ℓ+1)|² + |z|^(2ℓ+2)) on the z-chart and
/// f = (1/(ℓ+1)) log(|τ + w^(ℓ+1)|² + 1) on the w-chart (w = 1/z).
pub fn sphere2_metric(params: Sphere2Params, n: usize) -> Result<ConformalMetric> {
    params.validate()?;
    let Sphere2Params { ell, tau } = params;
    let p = ell + 1;
    let inv = 1.0 / p as f64;
    let fz: PointFn = Arc::new(move |x, y, d| {
        let z = CJet::z(x, y, d);
        let zp = z.powi(p);
        let s = zp.scale(tau).add_complex(1.0, 0.0).norm_sqr() + zp.norm_sqr();
        s.ln().scale(inv)
    });
    let fw: PointFn = Arc::new(move |x, y, d| {
        let w = CJet::z(x, y, d);
        let s = w.powi(p).add_complex(tau, 0.0).norm_sqr() + 1.0;
        s.ln().scale(inv)
    });
    ConformalMetric::sphere(1.0, n, fz, fw, MAX_DEG, &format!("closed-form sphere ℓ={ell} τ={tau}"))
}
