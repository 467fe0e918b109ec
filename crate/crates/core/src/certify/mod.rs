//! End-to-end certification: plan, sample, build, solve, decide.
//!
//! The pipelines see the system only through [`BlackBox`]: states come from
//! the safe set's own sampler, disturbances and successors from
//! `sample_d`/`step`.

mod certificate;

use std::time::{Duration, Instant};

use log::info;

pub use certificate::{BasisInfo, Certificate, GuaranteeRecord, QueryCount, SolverInfo, Verdict, SCHEMA};

use crate::basis::{dot, BarrierTemplate};
use crate::error::{Error, Result};
use crate::lp::{build_rbc_lp, build_sbc_lp, solve_with, LpModel, LpSolution, LpStatus, SolverError, SolverOptions};
use crate::params::{Method, PacParams};
use crate::planner::{plan, SamplePlan};
use crate::rng::ALGORITHM_ID;
use crate::sets::SafeSet;
use crate::systems::{draw_anchor_states, draw_group_samples, draw_pair_samples, BlackBox, CountingSystem};

/// Default threshold under which ξ* counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub workers: usize,
    pub zero_threshold: f64,
    pub solver: SolverOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            zero_threshold: ZERO_THRESHOLD,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Timings {
    pub sampling: Duration,
    pub build: Duration,
    pub solve: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.sampling + self.build + self.solve
    }
}

/// A certificate plus the run's wall-clock timings, which are kept out of
/// the certificate so that it stays reproducible byte for byte.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub certificate: Certificate,
    pub timings: Timings,
}

/// Runs the pipeline selected by `params.method`.
pub fn certify(sys: &dyn BlackBox, params: &PacParams, seed: u64, opts: &CertifyOptions) -> Result<Outcome> {
    match params.method {
        Method::Rbc1Scenario | Method::Rbc1Vc => certify_rbc1(sys, params, seed, opts),
        Method::Rbc2 => certify_rbc2(sys, params, seed, opts),
        Method::Sbc3 => certify_sbc3(sys, params, seed, opts),
    }
}

fn require(params: &PacParams, allowed: &[Method]) -> Result<()> {
    if allowed.contains(&params.method) {
        Ok(())
    } else {
        Err(Error::param(
            "method",
            format!("pipeline does not handle `{}`", params.method),
        ))
    }
}

fn to_usize(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::param("N", format!("{v} samples do not fit in memory")))
}

fn run_solver(model: &LpModel, opts: &CertifyOptions) -> Result<LpSolution> {
    let sol = solve_with(model, &opts.solver)?;
    match sol.status {
        LpStatus::Infeasible => Err(SolverError::Infeasible.into()),
        _ if sol.max_residual > 10.0 * opts.solver.feas_tol.max(1e-12) => Err(SolverError::Numerical(format!(
            "final residual {:.3e} exceeds tolerance",
            sol.max_residual
        ))
        .into()),
        _ => Ok(sol),
    }
}

fn solver_info(model: &LpModel, sol: &LpSolution, opts: &CertifyOptions) -> SolverInfo {
    SolverInfo {
        status: sol.status,
        objective: sol.objective,
        iterations: sol.iterations,
        max_residual: sol.max_residual,
        rows: model.num_rows(),
        variables: model.num_vars(),
        zero_threshold: opts.zero_threshold,
    }
}

struct RobustRun<'a> {
    sys: &'a dyn BlackBox,
    params: &'a PacParams,
    plan: SamplePlan,
    seed: u64,
    opts: &'a CertifyOptions,
}

impl RobustRun<'_> {
    fn run(self) -> Result<Outcome> {
        let counter = CountingSystem::new(self.sys);
        let set = self.sys.safe_set();
        let n_states = to_usize(self.plan.n_states)?;
        let per = to_usize(self.plan.per_state)?;
        let t0 = Instant::now();
        let samples = if self.params.method.is_one_to_many() {
            draw_group_samples(&counter, n_states, per, self.seed, self.opts.workers)?
        } else {
            draw_pair_samples(&counter, n_states, self.seed, self.opts.workers)?.into_groups()
        };
        let sampling = t0.elapsed();

        let t1 = Instant::now();
        let template = BarrierTemplate::rbc(set, self.params.kappa, self.params.c, self.params.u_a)?;
        let model = build_rbc_lp(&samples, &template, self.params.gamma, self.params.xi_bar, self.opts.workers)?;
        drop(samples);
        let build = t1.elapsed();
        info!(
            "robust program: {} rows x {} variables",
            model.num_rows(),
            model.num_vars()
        );

        let t2 = Instant::now();
        let sol = run_solver(&model, self.opts)?;
        let solve = t2.elapsed();
        let m = template.num_terms();
        let xi = sol.z[m];
        let verdict = if xi <= self.opts.zero_threshold {
            Verdict::Accepted
        } else {
            Verdict::Rejected
        };
        let g = &self.plan.guarantee;
        let statement = match verdict {
            Verdict::Accepted => g.sentence(),
            Verdict::Rejected => format!(
                "no guarantee: xi* = {xi:e} exceeds the zero threshold {:e}",
                self.opts.zero_threshold
            ),
        };
        let certificate = Certificate {
            schema: SCHEMA.to_string(),
            method: self.params.method,
            system: self.sys.name().to_string(),
            safe_set: set.to_spec(),
            params: self.params.clone(),
            plan: self.plan.clone(),
            seed: self.seed,
            rng: ALGORITHM_ID.to_string(),
            basis: BasisInfo::of(&template),
            solver: solver_info(&model, &sol, self.opts),
            coefficients: sol.z[..m].to_vec(),
            xi_star: Some(xi),
            lambda_star: None,
            j_star: None,
            verdict,
            vacuous: None,
            guarantee: GuaranteeRecord {
                statement,
                inner_prob: g.inner_prob,
                outer_frac: g.outer_frac,
                confidence: g.confidence,
            },
            queries: QueryCount {
                step_calls: counter.step_calls(),
                sample_calls: counter.sample_calls(),
            },
        };
        Ok(Outcome {
            certificate,
            timings: Timings { sampling, build, solve },
        })
    }
}

/// One-to-one robust certification (scenario or VC sample bound).
pub fn certify_rbc1(sys: &dyn BlackBox, params: &PacParams, seed: u64, opts: &CertifyOptions) -> Result<Outcome> {
    require(params, &[Method::Rbc1Scenario, Method::Rbc1Vc])?;
    let plan = plan(params, sys.state_dim())?;
    RobustRun {
        sys,
        params,
        plan,
        seed,
        opts,
    }
    .run()
}

/// One-to-many robust certification.
pub fn certify_rbc2(sys: &dyn BlackBox, params: &PacParams, seed: u64, opts: &CertifyOptions) -> Result<Outcome> {
    require(params, &[Method::Rbc2])?;
    let plan = plan(params, sys.state_dim())?;
    RobustRun {
        sys,
        params,
        plan,
        seed,
        opts,
    }
    .run()
}

/// One-to-many stochastic certification with a state-wise safety bound.
pub fn certify_sbc3(sys: &dyn BlackBox, params: &PacParams, seed: u64, opts: &CertifyOptions) -> Result<Outcome> {
    require(params, &[Method::Sbc3])?;
    let plan = plan(params, sys.state_dim())?;
    let counter = CountingSystem::new(sys);
    let set = sys.safe_set();
    let t0 = Instant::now();
    let samples = draw_group_samples(
        &counter,
        to_usize(plan.n_states)?,
        to_usize(plan.per_state)?,
        seed,
        opts.workers,
    )?;
    let anchors = draw_anchor_states(set, params.n_o, seed)?;
    let sampling = t0.elapsed();

    let t1 = Instant::now();
    let template = BarrierTemplate::sbc(set, params.kappa, params.u_a)?;
    let model = build_sbc_lp(&samples, &template, params.tau, &anchors, opts.workers)?;
    drop(samples);
    let build = t1.elapsed();
    info!(
        "stochastic program: {} rows x {} variables",
        model.num_rows(),
        model.num_vars()
    );

    let t2 = Instant::now();
    let sol = run_solver(&model, opts)?;
    let solve = t2.elapsed();
    let m = template.num_terms();
    let a = sol.z[..m].to_vec();
    let lambda = sol.z[m];
    let n = set.dim();
    let mut nonpositive = 0usize;
    for x in anchors.chunks_exact(n) {
        let h = dot(&template.features(x)?, &a);
        if 1.0 - lambda - h <= 0.0 {
            nonpositive += 1;
        }
    }
    let vacuous = 2 * nonpositive > params.n_o;
    let g = &plan.guarantee;
    let certificate = Certificate {
        schema: SCHEMA.to_string(),
        method: params.method,
        system: sys.name().to_string(),
        safe_set: set.to_spec(),
        params: params.clone(),
        plan: plan.clone(),
        seed,
        rng: ALGORITHM_ID.to_string(),
        basis: BasisInfo::of(&template),
        solver: solver_info(&model, &sol, opts),
        coefficients: a,
        xi_star: None,
        lambda_star: Some(lambda),
        j_star: Some(sol.objective),
        verdict: Verdict::Accepted,
        vacuous: Some(vacuous),
        guarantee: GuaranteeRecord {
            statement: g.sentence(),
            inner_prob: None,
            outer_frac: g.outer_frac,
            confidence: g.confidence,
        },
        queries: QueryCount {
            step_calls: counter.step_calls(),
            sample_calls: counter.sample_calls(),
        },
    };
    Ok(Outcome {
        certificate,
        timings: Timings { sampling, build, solve },
    })
}

/// The state-wise bound `1 − λ* − h(a*, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbcBound {
    pub raw: f64,
    /// `raw` clamped to `[0, 1]` for reporting.
    pub clamped: f64,
}

/// Evaluates the bound of a stochastic certificate without rebuilding the
/// template for every point.
#[derive(Debug, Clone)]
pub struct BoundEvaluator {
    template: BarrierTemplate,
    coefficients: Vec<f64>,
    lambda: f64,
}

impl BoundEvaluator {
    /// `set` overrides the safe set recorded in the certificate.
    pub fn new(cert: &Certificate, set: Option<SafeSet>) -> Result<Self> {
        if cert.method != Method::Sbc3 {
            return Err(Error::Certificate(format!(
                "state-wise bounds need a `sbc3` certificate, got `{}`",
                cert.method
            )));
        }
        let set = match set {
            Some(s) => s,
            None => cert.safe_set()?,
        };
        let template = cert.template(&set)?;
        crate::error::check_dim(template.num_terms(), cert.coefficients.len())?;
        let lambda = cert
            .lambda_star
            .ok_or_else(|| Error::Certificate("missing lambda*".into()))?;
        Ok(Self {
            template,
            coefficients: cert.coefficients.clone(),
            lambda,
        })
    }

    pub fn safe_set(&self) -> &SafeSet {
        self.template.safe_set()
    }

    pub fn bound(&self, x: &[f64]) -> Result<SbcBound> {
        if !self.template.safe_set().contains(x)? {
            return Err(Error::OutsideSafeSet);
        }
        let raw = 1.0 - self.lambda - self.template.inner(&self.coefficients, x)?;
        Ok(SbcBound {
            raw,
            clamped: raw.clamp(0.0, 1.0),
        })
    }
}

/// Bound of a stochastic certificate at one state of the safe set.
pub fn sbc_bound(cert: &Certificate, x: &[f64]) -> Result<SbcBound> {
    BoundEvaluator::new(cert, None)?.bound(x)
}
