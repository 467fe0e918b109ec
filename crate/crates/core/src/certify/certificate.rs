//! Self-describing certificate documents.

use serde::{Deserialize, Serialize};

use crate::basis::{BarrierTemplate, BasisKind, MultiIndexBasis, ORDER_TAG};
use crate::error::{Error, Result};
use crate::lp::LpStatus;
use crate::params::{Method, PacParams};
use crate::planner::{plan, SamplePlan};
use crate::sets::{SafeSet, SafeSetSpec};

pub const SCHEMA: &str = "pacsafe-certificate/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisInfo {
    pub kind: BasisKind,
    pub kappa: u32,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    /// Multi-index enumeration order of the coefficient vector.
    pub order: String,
    /// Template value outside the safe set.
    pub outside_value: f64,
    pub coefficient_cap: f64,
}

impl BasisInfo {
    pub(crate) fn of(t: &BarrierTemplate) -> Self {
        let b = t.basis();
        Self {
            kind: b.kind(),
            kappa: b.kappa(),
            box_lo: b.lo().to_vec(),
            box_hi: b.hi().to_vec(),
            order: ORDER_TAG.to_string(),
            outside_value: t.outside_value(),
            coefficient_cap: t.u_a(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub status: LpStatus,
    pub objective: f64,
    pub iterations: usize,
    pub max_residual: f64,
    pub rows: usize,
    pub variables: usize,
    /// Threshold under which ξ* counts as zero.
    pub zero_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeRecord {
    pub statement: String,
    pub inner_prob: Option<f64>,
    pub outer_frac: f64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryCount {
    pub step_calls: u64,
    pub sample_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub method: Method,
    /// Builtin system name or plugin command line.
    pub system: String,
    /// `None` for safe sets given only as a sublevel function.
    pub safe_set: Option<SafeSetSpec>,
    pub params: PacParams,
    pub plan: SamplePlan,
    pub seed: u64,
    pub rng: String,
    pub basis: BasisInfo,
    pub solver: SolverInfo,
    pub coefficients: Vec<f64>,
    pub xi_star: Option<f64>,
    pub lambda_star: Option<f64>,
    pub j_star: Option<f64>,
    pub verdict: Verdict,
    /// Stochastic certificates only: the bound is non-positive on more than
    /// half of the anchor states.
    pub vacuous: Option<bool>,
    pub guarantee: GuaranteeRecord,
    pub queries: QueryCount,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cert: Self = serde_json::from_str(s)?;
        if cert.schema != SCHEMA {
            return Err(Error::Certificate(format!(
                "unsupported schema `{}`, expected `{SCHEMA}`",
                cert.schema
            )));
        }
        Ok(cert)
    }

    /// Re-derives the sample plan from the embedded parameters and checks
    /// the recorded numbers against it.
    pub fn check_integrity(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Certificate(msg));
        if self.params.method != self.method || self.plan.method != self.method {
            return fail("method tags disagree".into());
        }
        let expect = plan(&self.params, self.plan.state_dim)?;
        if expect != self.plan {
            return fail(format!(
                "recorded plan (N={}, M={}) does not match the plan re-derived from the parameters (N={}, M={})",
                self.plan.n_states, self.plan.per_state, expect.n_states, expect.per_state
            ));
        }
        if self.queries.step_calls != expect.num_transitions() {
            return fail(format!(
                "recorded {} simulator steps, plan requires {}",
                self.queries.step_calls,
                expect.num_transitions()
            ));
        }
        if self.coefficients.len() as u64 != expect.num_terms {
            return fail(format!(
                "{} coefficients for a template with {} terms",
                self.coefficients.len(),
                expect.num_terms
            ));
        }
        let cap = self.basis.coefficient_cap;
        if self
            .coefficients
            .iter()
            .any(|a| !(a.is_finite() && *a >= 0.0 && *a <= cap))
        {
            return fail(format!("coefficients leave the box [0, {cap}]"));
        }
        if self.basis.kappa != self.params.kappa || self.basis.box_lo.len() != self.plan.state_dim {
            return fail("basis description does not match the parameters".into());
        }
        match self.method {
            Method::Sbc3 => {
                if self.lambda_star.is_none() || self.j_star.is_none() {
                    return fail("stochastic certificate without lambda*/J*".into());
                }
            }
            _ => {
                let Some(xi) = self.xi_star else {
                    return fail("robust certificate without xi*".into());
                };
                let accepted = xi <= self.solver.zero_threshold;
                if accepted != (self.verdict == Verdict::Accepted) {
                    return fail("verdict does not follow from xi*".into());
                }
            }
        }
        Ok(())
    }

    /// Safe set described by the certificate.
    pub fn safe_set(&self) -> Result<SafeSet> {
        match &self.safe_set {
            Some(spec) => SafeSet::from_spec(spec),
            None => Err(Error::Certificate(
                "certificate has no serializable safe set; supply one explicitly".into(),
            )),
        }
    }

    /// Template the coefficients belong to.
    pub fn template(&self, set: &SafeSet) -> Result<BarrierTemplate> {
        if self.basis.order != ORDER_TAG {
            return Err(Error::Certificate(format!(
                "unknown coefficient order `{}`",
                self.basis.order
            )));
        }
        let basis = MultiIndexBasis::new(
            self.basis.kind,
            self.basis.kappa,
            self.basis.box_lo.clone(),
            self.basis.box_hi.clone(),
        )?;
        BarrierTemplate::new(basis, self.basis.outside_value, set.clone(), self.basis.coefficient_cap)
    }
}
