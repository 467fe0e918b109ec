//! Closed-form sample sizes and the guarantees they buy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Method, PacParams};

fn open_unit(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("must lie in (0, 1), got {v}")))
    }
}

fn to_count(v: f64, what: &'static str) -> Result<u64> {
    let c = v.ceil();
    if !(c.is_finite() && c >= 1.0 && c < u64::MAX as f64) {
        return Err(Error::param(what, format!("sample size {v} is not representable")));
    }
    Ok(c as u64)
}

/// Scenario bound: `⌈(2/α)(ln(1/δ) + d)⌉` for a program with `d` decision
/// variables.
pub fn scenario_n(alpha: f64, delta: f64, decision_dim: u64) -> Result<u64> {
    open_unit("alpha", alpha)?;
    open_unit("delta", delta)?;
    if decision_dim == 0 {
        return Err(Error::param("decision_dim", "must be at least 1"));
    }
    to_count((2.0 / alpha) * ((1.0 / delta).ln() + decision_dim as f64), "N")
}

/// VC bound: `⌈(5/α)(ln(4/δ) + vc·ln(40/α))⌉`.
pub fn vc_n(alpha: f64, delta: f64, vc_dim: u64) -> Result<u64> {
    open_unit("alpha", alpha)?;
    open_unit("delta", delta)?;
    if vc_dim == 0 {
        return Err(Error::param("vc_dim", "must be at least 1"));
    }
    to_count(
        (5.0 / alpha) * ((4.0 / delta).ln() + vc_dim as f64 * (40.0 / alpha).ln()),
        "N",
    )
}

/// Disturbances per state for the robust one-to-many method:
/// `⌈ln(1/((1−l)δ2)) / (2α2²)⌉`.
pub fn hoeffding_m_rbc(alpha2: f64, delta2: f64, l: f64) -> Result<u64> {
    open_unit("alpha2", alpha2)?;
    open_unit("delta2", delta2)?;
    open_unit("l", l)?;
    let v = (1.0 / ((1.0 - l) * delta2)).ln() / (2.0 * alpha2 * alpha2);
    to_count(v.max(1.0), "M")
}

/// Disturbances per state for the stochastic method:
/// `⌈U_a² ln(1/((1−l)δ2)) / (2τ²)⌉`.
pub fn hoeffding_m_sbc(tau: f64, u_a: f64, delta2: f64, l: f64) -> Result<u64> {
    open_unit("tau", tau)?;
    if !(u_a >= 1.0 && u_a.is_finite()) {
        return Err(Error::param("u_a", format!("must be at least 1, got {u_a}")));
    }
    open_unit("delta2", delta2)?;
    open_unit("l", l)?;
    let v = u_a * u_a * (1.0 / ((1.0 - l) * delta2)).ln() / (2.0 * tau * tau);
    to_count(v.max(1.0), "M")
}

/// Certified fraction of states for the one-to-many methods: `1 − α1/(lδ2)`.
pub fn rbc2_outer_fraction(alpha1: f64, l: f64, delta2: f64) -> Result<f64> {
    open_unit("alpha1", alpha1)?;
    open_unit("l", l)?;
    open_unit("delta2", delta2)?;
    if alpha1 >= l * delta2 {
        return Err(Error::param(
            "alpha1",
            format!("the outer-fraction hypothesis requires alpha1 < l * delta2, got {alpha1} >= {}", l * delta2),
        ));
    }
    Ok(1.0 - alpha1 / (l * delta2))
}

/// What an accepted certificate asserts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Guarantee {
    /// Per-state probability of staying safe; `None` when it is the
    /// state-dependent bound `1 − h(a*, x) − λ*`.
    pub inner_prob: Option<f64>,
    /// Fraction of states (under the uniform law on the safe set) for which
    /// the inner statement holds.
    pub outer_frac: f64,
    /// Confidence over the draw of the sample set.
    pub confidence: f64,
}

impl Guarantee {
    pub fn sentence(&self) -> String {
        let inner = match self.inner_prob {
            Some(p) => format!("P_d[f(x,d) in X] >= {p}"),
            None => "P_d[f(x,d) in X] >= 1 - h(a*,x) - lambda*".to_string(),
        };
        format!(
            "with confidence {}: for at least a {} fraction of states x in X, {}",
            self.confidence, self.outer_frac, inner
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub method: Method,
    pub state_dim: usize,
    pub kappa: u32,
    /// Template terms `m = (κ+1)^n`.
    pub num_terms: u64,
    /// LP variables `m + 1`.
    pub decision_dim: u64,
    /// Sampled states `N`.
    pub n_states: u64,
    /// Disturbances per state `M` (1 for one-to-one sampling).
    pub per_state: u64,
    /// VC dimension used for the VC bound, if any.
    pub vc_dim: Option<u64>,
    pub guarantee: Guarantee,
}

impl SamplePlan {
    pub fn num_transitions(&self) -> u64 {
        self.n_states * self.per_state
    }
}

pub fn num_terms(kappa: u32, n: usize) -> Result<u64> {
    let per = kappa as u64 + 1;
    (0..n)
        .try_fold(1u64, |m, _| m.checked_mul(per))
        .ok_or_else(|| Error::param("kappa", format!("({per})^{n} overflows")))
}

/// Sample sizes and guarantee for `params` on an `n`-dimensional system.
pub fn plan(params: &PacParams, n: usize) -> Result<SamplePlan> {
    params.validate()?;
    if n == 0 {
        return Err(Error::param("n", "state dimension must be positive"));
    }
    let m = num_terms(params.kappa, n)?;
    let decision_dim = m + 1;
    let mut vc_dim = None;
    let (n_states, per_state, guarantee) = match params.method {
        Method::Rbc1Scenario => (
            scenario_n(params.alpha1 * params.alpha2, params.delta, decision_dim)?,
            1,
            Guarantee {
                inner_prob: Some(1.0 - params.alpha2),
                outer_frac: 1.0 - params.alpha1,
                confidence: 1.0 - params.delta,
            },
        ),
        Method::Rbc1Vc => {
            let vc = params.vc_dim.unwrap_or(decision_dim);
            vc_dim = Some(vc);
            (
                vc_n(params.alpha1 * params.alpha2, params.delta, vc)?,
                1,
                Guarantee {
                    inner_prob: Some(1.0 - params.alpha2),
                    outer_frac: 1.0 - params.alpha1,
                    confidence: 1.0 - params.delta,
                },
            )
        }
        Method::Rbc2 => (
            scenario_n(params.alpha1, params.delta1, decision_dim)?,
            hoeffding_m_rbc(params.alpha2, params.delta2, params.l)?,
            Guarantee {
                inner_prob: Some(1.0 - params.alpha2),
                outer_frac: rbc2_outer_fraction(params.alpha1, params.l, params.delta2)?,
                confidence: 1.0 - params.delta1,
            },
        ),
        Method::Sbc3 => (
            scenario_n(params.alpha1, params.delta1, decision_dim)?,
            hoeffding_m_sbc(params.tau, params.u_a, params.delta2, params.l)?,
            Guarantee {
                inner_prob: None,
                outer_frac: rbc2_outer_fraction(params.alpha1, params.l, params.delta2)?,
                confidence: 1.0 - params.delta1,
            },
        ),
    };
    Ok(SamplePlan {
        method: params.method,
        state_dim: n,
        kappa: params.kappa,
        num_terms: m,
        decision_dim,
        n_states,
        per_state,
        vc_dim,
        guarantee,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_examples() {
        assert_eq!(scenario_n(0.05 * 0.05, 1e-6, 5).unwrap(), 15053);
        assert_eq!(scenario_n(0.01, 1e-6, 5).unwrap(), 3764);
        assert_eq!(scenario_n(0.01, 1e-6, 129).unwrap(), 28564);
        assert!(scenario_n(1.0, 1e-6, 5).is_err());
        assert!(scenario_n(0.1, 1e-6, 0).is_err());
    }

    #[test]
    fn vc_examples() {
        // (5/α)(ln(4/δ) + vc ln(40/α)) evaluated independently
        let reference = |a: f64, d: f64, v: f64| ((5.0 / a) * ((4.0 / d).ln() + v * (40.0 / a).ln())).ceil() as u64;
        assert_eq!(vc_n(0.0025, 1e-6, 5).unwrap(), reference(0.0025, 1e-6, 5.0));
        assert_eq!(vc_n(0.5, 0.5, 1).unwrap(), 65);
    }

    #[test]
    fn vc_exceeds_scenario_on_a_grid() {
        for a in [0.5, 0.1, 0.01, 0.0025] {
            for d in [0.5, 1e-3, 1e-6, 1e-9] {
                for dim in [1, 5, 50, 129] {
                    assert!(vc_n(a, d, dim).unwrap() > scenario_n(a, d, dim).unwrap());
                }
            }
        }
    }

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_m_rbc(0.05, 0.999, 0.2).unwrap(), 45);
        assert_eq!(hoeffding_m_rbc(0.5, 0.999, 0.2).unwrap(), 1);
        assert_eq!(hoeffding_m_sbc(0.01, 1.1, 0.999, 0.2).unwrap(), 1357);
        assert_eq!(hoeffding_m_sbc(0.02, 1.5, 0.999, 0.2).unwrap(), 631);
        assert_eq!(hoeffding_m_sbc(0.02, 1.1, 0.999, 0.2).unwrap(), 340);
        assert!(hoeffding_m_sbc(0.02, 0.9, 0.999, 0.2).is_err());
    }

    #[test]
    fn outer_fraction_examples() {
        assert!((rbc2_outer_fraction(0.01, 0.2, 0.999).unwrap() - 0.94995).abs() < 1e-5);
        assert!((rbc2_outer_fraction(0.005, 0.1, 0.999).unwrap() - 0.94995).abs() < 1e-5);
        assert!(rbc2_outer_fraction(1e-12, 0.2, 0.999).unwrap() > 1.0 - 1e-10);
        assert!(rbc2_outer_fraction(0.3, 0.2, 0.999).is_err());
    }

    #[test]
    fn plan_examples() {
        let p = plan(&PacParams::rbc1(), 4).unwrap();
        assert_eq!((p.n_states, p.per_state, p.decision_dim), (24653, 1, 17));

        let p = plan(&PacParams::sbc3(10, 0.02, 1.5), 2).unwrap();
        assert_eq!((p.n_states, p.per_state, p.decision_dim), (27164, 631, 122));
        assert_eq!(p.guarantee.inner_prob, None);

        let p = plan(&PacParams::rbc2(), 6).unwrap();
        assert_eq!((p.n_states, p.per_state), (15764, 45));
        assert!((p.guarantee.outer_frac - 0.94995).abs() < 1e-5);
    }

    #[test]
    fn vc_plan_defaults_to_decision_dim() {
        let p = plan(&PacParams::rbc1_vc(None), 2).unwrap();
        assert_eq!(p.vc_dim, Some(5));
        assert_eq!(p.n_states, vc_n(0.0025, 1e-6, 5).unwrap());
    }

    #[test]
    fn planners_are_monotone() {
        let alphas = [0.5, 0.2, 0.1, 0.05, 0.01, 0.001];
        let deltas = [0.5, 0.1, 1e-3, 1e-6, 1e-9];
        for w in alphas.windows(2) {
            for d in deltas {
                assert!(scenario_n(w[1], d, 5).unwrap() >= scenario_n(w[0], d, 5).unwrap());
                assert!(vc_n(w[1], d, 5).unwrap() >= vc_n(w[0], d, 5).unwrap());
                assert!(hoeffding_m_rbc(w[1], 0.999, 0.2).unwrap() >= hoeffding_m_rbc(w[0], 0.999, 0.2).unwrap());
                assert!(hoeffding_m_sbc(w[1], 1.1, 0.999, 0.2).unwrap() >= hoeffding_m_sbc(w[0], 1.1, 0.999, 0.2).unwrap());
            }
        }
        for w in deltas.windows(2) {
            assert!(scenario_n(0.01, w[1], 5).unwrap() >= scenario_n(0.01, w[0], 5).unwrap());
        }
    }
}
