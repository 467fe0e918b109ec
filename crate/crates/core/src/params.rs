//! Parameter bundles for the three certification methods.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::basis::MAX_KAPPA;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// One-to-one samples, scenario sample bound.
    Rbc1Scenario,
    /// One-to-one samples, VC-dimension sample bound.
    Rbc1Vc,
    /// One-to-many samples, robust barrier.
    Rbc2,
    /// One-to-many samples, stochastic barrier with state-wise bound.
    Sbc3,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rbc1Scenario => "rbc1_scenario",
            Method::Rbc1Vc => "rbc1_vc",
            Method::Rbc2 => "rbc2",
            Method::Sbc3 => "sbc3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "rbc1" | "rbc1_scenario" | "rbc_i" => Some(Method::Rbc1Scenario),
            "rbc1_vc" => Some(Method::Rbc1Vc),
            "rbc2" | "rbc_ii" => Some(Method::Rbc2),
            "sbc3" | "sbc_iii" => Some(Method::Sbc3),
            _ => None,
        }
    }

    pub fn is_robust(self) -> bool {
        !matches!(self, Method::Sbc3)
    }

    pub fn is_one_to_many(self) -> bool {
        matches!(self, Method::Rbc2 | Method::Sbc3)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every knob of a certification run. Fields a method does not use are
/// carried along but not validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacParams {
    pub method: Method,
    /// Outer (state) violation level.
    pub alpha1: f64,
    /// Inner (disturbance) violation level, robust methods only.
    pub alpha2: f64,
    /// Confidence parameter of the one-to-one methods.
    pub delta: f64,
    /// Confidence parameter of the one-to-many methods.
    pub delta1: f64,
    /// Inner confidence of the Hoeffding step.
    pub delta2: f64,
    /// Markov split parameter.
    pub l: f64,
    /// Margin of the stochastic barrier program.
    pub tau: f64,
    /// Decay factor of the robust barrier condition.
    pub gamma: f64,
    /// Upper bound on each template coefficient.
    pub u_a: f64,
    /// Upper bound on the robust slack variable.
    pub xi_bar: f64,
    /// Value of the robust barrier outside the safe set (negative).
    pub c: f64,
    /// Per-coordinate template degree.
    pub kappa: u32,
    /// Number of anchor states in the stochastic objective.
    pub n_o: usize,
    pub vc_dim: Option<u64>,
}

impl PacParams {
    fn base(method: Method) -> Self {
        Self {
            method,
            alpha1: 0.05,
            alpha2: 0.05,
            delta: 1e-6,
            delta1: 1e-6,
            delta2: 0.999,
            l: 0.2,
            tau: 0.01,
            gamma: 0.01,
            u_a: 10.0,
            xi_bar: 10.0,
            c: -1.0,
            kappa: 1,
            n_o: 1000,
            vc_dim: None,
        }
    }

    /// One-to-one robust certification with the benchmark defaults.
    pub fn rbc1() -> Self {
        Self::base(Method::Rbc1Scenario)
    }

    pub fn rbc1_vc(vc_dim: Option<u64>) -> Self {
        Self {
            vc_dim,
            ..Self::base(Method::Rbc1Vc)
        }
    }

    pub fn rbc2() -> Self {
        Self {
            alpha1: 0.01,
            ..Self::base(Method::Rbc2)
        }
    }

    pub fn sbc3(kappa: u32, tau: f64, u_a: f64) -> Self {
        Self {
            alpha1: 0.01,
            kappa,
            tau,
            u_a,
            ..Self::base(Method::Sbc3)
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn unit(field: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::param(field, format!("must lie in (0, 1), got {v}")))
            }
        }

        unit("alpha1", self.alpha1)?;
        if self.kappa > MAX_KAPPA {
            return Err(Error::param(
                "kappa",
                format!("degree {} exceeds the supported maximum {MAX_KAPPA}", self.kappa),
            ));
        }

        if self.method.is_robust() {
            unit("alpha2", self.alpha2)?;
            unit("gamma", self.gamma)?;
            if !(self.c < 0.0 && self.c.is_finite()) {
                return Err(Error::param("c", format!("must be negative, got {}", self.c)));
            }
            if !(self.u_a > 0.0 && self.u_a.is_finite()) {
                return Err(Error::param("u_a", format!("must be positive, got {}", self.u_a)));
            }
            if !(self.xi_bar > -self.c && self.xi_bar.is_finite()) {
                return Err(Error::param(
                    "xi_bar",
                    format!("must exceed -c = {}, got {}", -self.c, self.xi_bar),
                ));
            }
        }

        match self.method {
            Method::Rbc1Scenario => unit("delta", self.delta)?,
            Method::Rbc1Vc => {
                unit("delta", self.delta)?;
                if self.vc_dim == Some(0) {
                    return Err(Error::param("vc_dim", "must be at least 1"));
                }
            }
            Method::Rbc2 | Method::Sbc3 => {
                unit("delta1", self.delta1)?;
                unit("delta2", self.delta2)?;
                unit("l", self.l)?;
                if !(self.alpha1 < self.l * self.delta2) {
                    return Err(Error::param(
                        "alpha1",
                        format!(
                            "the outer-fraction hypothesis requires alpha1 < l * delta2, got {} >= {} * {} = {}",
                            self.alpha1,
                            self.l,
                            self.delta2,
                            self.l * self.delta2
                        ),
                    ));
                }
            }
        }

        if self.method == Method::Sbc3 {
            unit("tau", self.tau)?;
            if !(self.u_a >= 1.0 && self.u_a.is_finite()) {
                return Err(Error::param("u_a", format!("must be at least 1, got {}", self.u_a)));
            }
            if self.n_o == 0 {
                return Err(Error::param("n_o", "need at least one anchor state"));
            }
        }
        Ok(())
    }
}
