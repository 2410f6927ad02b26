//! Topological obstructions for compact generalized Ricci surfaces.

use serde::{Deserialize, Serialize};

use crate::geom::RicciType;

/// Zero data of √|K − c| supplied with an admissibility query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroData {
    /// Sum of the orders.
    Total(u32),
    /// Individual orders m_j.
    Partition(Vec<u32>),
}

impl ZeroData {
    pub fn total(&self) -> u32 {
        match self {
            ZeroData::Total(n) => *n,
            ZeroData::Partition(p) => p.iter().sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityQuery {
    pub ty: RicciType,
    pub genus: u32,
    #[serde(default)]
    pub data: Option<ZeroData>,
    /// Whether a metric with K ≢ c is requested.
    #[serde(default = "yes")]
    pub non_constant: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "clause", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible(String),
    Inadmissible(String),
    NoObstructionFound,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Admissibility::Inadmissible(_))
    }
}

fn is_int(x: f64) -> bool {
    x.is_finite() && (x - x.round()).abs() < 1e-12 * x.abs().max(1.0)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Checks the obstruction clauses for compact surfaces of the given genus.
pub fn admissibility(q: &AdmissibilityQuery) -> Admissibility {
    use Admissibility::*;
    let RicciType { a, b, c, .. } = q.ty;
    let g = q.genus;
    let chi = 2.0 - 2.0 * g as f64;
    let n = q.data.as_ref().map(|d| d.total());

    if !q.non_constant {
        // constant κ solves the equation iff κ = c or aκ + b = 0; Gauss–Bonnet fixes sgn κ = sgn χ
        let want = sign(chi);
        if a == 0.0 && b == 0.0 {
            return Admissible("a = b = 0: every constant curvature solves the equation".into());
        }
        let mut ks = vec![c];
        if a != 0.0 {
            ks.push(-b / a);
        }
        return match ks.iter().find(|&&k| sign(k) == want) {
            Some(k) => Admissible(format!("constant curvature κ = {k} with sign of χ = {chi}")),
            None => Inadmissible(format!(
                "constant curvature must be c = {c} or −b/a, neither has the sign of χ = {chi}"
            )),
        };
    }

    if a == 0.0 && b == 0.0 {
        return Inadmissible("a = b = 0 forces constant curvature".into());
    }
    if b == 0.0 {
        if let Some(n) = n {
            if (a * chi + 2.0 * n as f64).abs() > 1e-9 * (1.0 + n as f64) {
                return Inadmissible(format!("b = 0 requires aχ = −2N; got aχ = {} and N = {n}", a * chi));
            }
        }
    }

    match g {
        0 => {
            if b > 0.0 && a >= 0.0 {
                return Inadmissible("genus 0 with b > 0 and K ≢ c requires a < 0".into());
            }
            if b == 0.0 {
                if !(a < 0.0 && is_int(a)) {
                    return Inadmissible(format!("genus 0 with b = 0 requires a = −N ∈ −ℕ*, got a = {a}"));
                }
                if c == 0.0 {
                    if !is_int(a / 2.0) {
                        return Inadmissible(format!("genus 0 with b = c = 0 requires a ∈ −2ℕ, got a = {a}"));
                    }
                    if let Some(ZeroData::Partition(p)) = &q.data {
                        let bound = -a / 2.0;
                        if let Some(m) = p.iter().find(|&&m| m as f64 > bound) {
                            return Inadmissible(format!("zero of order {m} exceeds −a/2 = {bound}"));
                        }
                    }
                    return Admissible(format!("a ∈ −2ℕ* with orders at most −a/2 = {}", -a / 2.0));
                }
                return Admissible(format!("a = −N with N = {}", -a));
            }
            NoObstructionFound
        }
        1 => {
            if c == 0.0 {
                return Inadmissible("genus 1 with c = 0 forces a flat metric".into());
            }
            if b > 0.0 {
                return Inadmissible("genus 1 with c ≠ 0 requires b ≤ 0".into());
            }
            if b == 0.0 {
                if c > 0.0 && a <= 0.0 {
                    return Inadmissible("genus 1, c > 0, b = 0, non-flat requires a > 0".into());
                }
                if c < 0.0 && a >= 0.0 {
                    return Inadmissible("genus 1, c < 0, b = 0, non-flat requires a < 0".into());
                }
                if let Some(n) = n {
                    if n != 0 {
                        return Inadmissible(format!("genus 1 with b = 0 has K − c of strict sign, so N = 0, got {n}"));
                    }
                }
                return Admissible(if c > 0.0 {
                    "genus 1, c > 0, b = 0: a non-flat metric requires a > 0 and K < c".into()
                } else {
                    "genus 1, c < 0, b = 0: a non-flat metric requires a < 0 and K > c".into()
                });
            }
            NoObstructionFound
        }
        _ => {
            let gm1 = (g - 1) as f64;
            if b > 0.0 && a <= 0.0 {
                return Inadmissible(format!("genus {g} with b > 0 and K ≢ c requires a > 0"));
            }
            if b == 0.0 {
                let nn = a * gm1;
                if !(nn > 0.0 && is_int(nn)) {
                    return Inadmissible(format!("genus {g} with b = 0 requires a = N/(g−1) with N ∈ ℕ*, got a = {a}"));
                }
                return Admissible(format!("a = N/(g−1) with N = {}", nn.round()));
            }
            NoObstructionFound
        }
    }
}
