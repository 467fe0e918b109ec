//! Product disturbance distributions with independent coordinates.

use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::RngStream;

/// Draws allowed per truncated-normal variate before giving up.
pub const TRUNCATION_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    TruncatedNormal { mean: f64, sd: f64, lo: f64, hi: f64 },
    Beta { a: f64, b: f64 },
}

#[derive(Debug, Clone)]
enum Sampler {
    Uniform { lo: f64, width: f64 },
    TruncatedNormal { normal: Normal<f64>, lo: f64, hi: f64 },
    Beta { ga: Gamma<f64>, gb: Gamma<f64> },
}

impl Sampler {
    fn new(m: &Marginal) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        match *m {
            Marginal::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return bad(format!("uniform needs lo < hi, got [{lo}, {hi}]"));
                }
                Ok(Sampler::Uniform { lo, width: hi - lo })
            }
            Marginal::TruncatedNormal { mean, sd, lo, hi } => {
                if !(sd > 0.0 && sd.is_finite()) {
                    return bad(format!("truncated normal needs sd > 0, got {sd}"));
                }
                if !(lo < hi) {
                    return bad(format!("truncated normal needs lo < hi, got [{lo}, {hi}]"));
                }
                let normal = Normal::new(mean, sd).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
                Ok(Sampler::TruncatedNormal { normal, lo, hi })
            }
            Marginal::Beta { a, b } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return bad(format!("beta needs positive shapes, got ({a}, {b})"));
                }
                let gamma = |k: f64| Gamma::new(k, 1.0).map_err(|e| Error::InvalidDistribution(e.to_string()));
                Ok(Sampler::Beta {
                    ga: gamma(a)?,
                    gb: gamma(b)?,
                })
            }
        }
    }

    fn draw(&self, rng: &mut RngStream) -> Result<f64> {
        match self {
            Sampler::Uniform { lo, width } => Ok(lo + width * rng.unit()),
            Sampler::TruncatedNormal { normal, lo, hi } => {
                for _ in 0..TRUNCATION_ATTEMPTS {
                    let v = normal.sample(rng);
                    if *lo <= v && v <= *hi {
                        return Ok(v);
                    }
                }
                Err(Error::RejectionCap {
                    what: "truncated normal",
                    attempts: TRUNCATION_ATTEMPTS,
                })
            }
            Sampler::Beta { ga, gb } => {
                let x = ga.sample(rng);
                let y = gb.sample(rng);
                Ok(x / (x + y))
            }
        }
    }
}

/// Distribution of the disturbance vector; coordinates are independent.
#[derive(Debug, Clone)]
pub struct DisturbanceDistribution {
    marginals: Vec<Marginal>,
    samplers: Vec<Sampler>,
}

impl DisturbanceDistribution {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidDistribution("no coordinates".into()));
        }
        let samplers = marginals.iter().map(Sampler::new).collect::<Result<_>>()?;
        Ok(Self { marginals, samplers })
    }

    pub fn uniform(n_d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Marginal::Uniform { lo, hi }; n_d])
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), out.len())?;
        for (v, s) in out.iter_mut().zip(&self.samplers) {
            *v = s.draw(rng)?;
        }
        Ok(())
    }
}
