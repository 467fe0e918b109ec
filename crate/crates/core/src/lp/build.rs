//! Scenario programs assembled from recorded samples.
//!
//! Variables are `z = (a_1, ..., a_m, s)` where `s` is the scalar slack
//! (ξ for the robust programs, λ for the stochastic one).

use crate::basis::{BarrierTemplate, BasisKind, MultiIndexBasis};
use crate::error::{Error, Result};
use crate::samples::GroupSampleSet;
use crate::sets::SafeSet;
use crate::systems::{par_chunks, SlotWriter};

use super::{DenseRows, LpModel, RowOrigin, RowSource};

fn names(m: usize, slack: &str) -> Vec<String> {
    (1..=m).map(|k| format!("a{k}")).chain([slack.to_string()]).collect()
}

/// Robust rows, generated on demand. Row `k` belongs to transition `k`
/// (state `k / M`, draw `k % M`):
///
/// * successor inside the safe set: `γ φ(x)·a − φ(x⁺)·a − ξ ≤ 0`
/// * successor outside: `γ φ(x)·a − ξ ≤ C`
pub struct RbcRows {
    basis: MultiIndexBasis,
    m: usize,
    n: usize,
    per_state: usize,
    c: f64,
    /// `γ φ(x_i)` for every sampled state.
    scaled_state_features: Vec<f64>,
    next_states: Vec<f64>,
    inside: Vec<bool>,
}

impl RbcRows {
    pub fn num_outside(&self) -> usize {
        self.inside.iter().filter(|v| !**v).count()
    }
}

impl RowSource for RbcRows {
    fn num_rows(&self) -> usize {
        self.inside.len()
    }

    fn num_vars(&self) -> usize {
        self.m + 1
    }

    fn row(&self, k: usize, out: &mut [f64]) -> f64 {
        let i = k / self.per_state;
        let sf = &self.scaled_state_features[i * self.m..(i + 1) * self.m];
        let (coef, slack) = out.split_at_mut(self.m);
        slack[0] = -1.0;
        if self.inside[k] {
            let y = &self.next_states[k * self.n..(k + 1) * self.n];
            self.basis
                .features_into(y, coef)
                .expect("dimensions fixed at build time");
            for (o, s) in coef.iter_mut().zip(sf) {
                *o = s - *o;
            }
            0.0
        } else {
            coef.copy_from_slice(sf);
            self.c
        }
    }

    fn origin(&self, k: usize) -> RowOrigin {
        RowOrigin {
            state: k / self.per_state,
            draw: Some(k % self.per_state),
        }
    }
}

fn state_features(basis: &MultiIndexBasis, samples: &GroupSampleSet, scale: f64, workers: usize) -> Result<Vec<f64>> {
    let m = basis.num_terms();
    let mut out = vec![0.0; samples.len() * m];
    let slots = SlotWriter::new(&mut out);
    par_chunks(samples.len(), workers, |range| {
        for i in range {
            // SAFETY: each state index is written by one worker.
            let f = unsafe { slots.slice(i * m, m) };
            basis.features_into(samples.state(i), f)?;
            for v in f.iter_mut() {
                *v *= scale;
            }
        }
        Ok(())
    })?;
    Ok(out)
}

fn check_samples(samples: &GroupSampleSet, set: &SafeSet) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    crate::error::check_dim(set.dim(), samples.state_dim())
}

/// Robust scenario program: one row per recorded transition, objective ξ.
/// Pair samples enter as groups of size one.
pub fn build_rbc_lp(
    samples: &GroupSampleSet,
    template: &BarrierTemplate,
    gamma: f64,
    xi_bar: f64,
    workers: usize,
) -> Result<LpModel> {
    let basis = template.basis();
    if basis.kind() != BasisKind::Handelman || template.outside_value() >= 0.0 {
        return Err(Error::InvalidBasis(
            "robust programs need a Handelman template with a negative outside value".into(),
        ));
    }
    let set = template.safe_set();
    check_samples(samples, set)?;
    let m = template.num_terms();
    let n = samples.state_dim();
    let scaled_state_features = state_features(basis, samples, gamma, workers)?;
    let mut next_states = Vec::with_capacity(samples.num_transitions() * n);
    let mut inside = Vec::with_capacity(samples.num_transitions());
    for i in 0..samples.len() {
        for j in 0..samples.per_state() {
            let y = samples.next_state(i, j);
            next_states.extend_from_slice(y);
            inside.push(set.is_member(y));
        }
    }
    let rows = RbcRows {
        basis: basis.clone(),
        m,
        n,
        per_state: samples.per_state(),
        c: template.outside_value(),
        scaled_state_features,
        next_states,
        inside,
    };
    let mut objective = vec![0.0; m + 1];
    objective[m] = 1.0;
    let mut upper = vec![template.u_a(); m + 1];
    upper[m] = xi_bar;
    Ok(LpModel {
        objective,
        lower: vec![0.0; m + 1],
        upper,
        rows: Box::new(rows),
        names: names(m, "xi"),
        epigraph: Some(m),
    })
}

/// Stochastic scenario program: one row per sampled state,
///
/// `(1/M) Σ_j h(a, x⁺_ij) − φ(x_i)·a − λ ≤ −τ`
///
/// with successors outside the safe set contributing the constant 1, moved
/// to the right-hand side. The objective is `λ + (1/N_o) Σ_k φ(x'_k)·a`
/// over the anchor states (flattened, `N_o × n`).
pub fn build_sbc_lp(
    samples: &GroupSampleSet,
    template: &BarrierTemplate,
    tau: f64,
    anchors: &[f64],
    workers: usize,
) -> Result<LpModel> {
    let basis = template.basis();
    if basis.kind() != BasisKind::Bernstein || template.outside_value() != 1.0 {
        return Err(Error::InvalidBasis(
            "stochastic programs need a Bernstein template with outside value 1".into(),
        ));
    }
    let set = template.safe_set();
    check_samples(samples, set)?;
    let n = samples.state_dim();
    let m = template.num_terms();
    let v = m + 1;
    let per = samples.per_state();
    let big_n = samples.len();

    let mut coeffs = vec![0.0; big_n * v];
    let mut rhs = vec![0.0; big_n];
    {
        let cs = SlotWriter::new(&mut coeffs);
        let rs = SlotWriter::new(&mut rhs);
        par_chunks(big_n, workers, |range| {
            let mut tmp = vec![0.0; m];
            let mut own = vec![0.0; m];
            for i in range {
                // SAFETY: each row index is written by one worker.
                let (row, b) = unsafe { (cs.slice(i * v, v), rs.slice(i, 1)) };
                let (acc, slack) = row.split_at_mut(m);
                acc.fill(0.0);
                let mut outside = 0usize;
                for j in 0..per {
                    let y = samples.next_state(i, j);
                    if set.is_member(y) {
                        basis.features_into(y, &mut tmp)?;
                        for (a, t) in acc.iter_mut().zip(&tmp) {
                            *a += t;
                        }
                    } else {
                        outside += 1;
                    }
                }
                basis.features_into(samples.state(i), &mut own)?;
                let inv = 1.0 / per as f64;
                for (a, o) in acc.iter_mut().zip(&own) {
                    *a = *a * inv - o;
                }
                slack[0] = -1.0;
                b[0] = -tau - outside as f64 * inv;
            }
            Ok(())
        })?;
    }
    let origins = (0..big_n).map(|i| RowOrigin { state: i, draw: None }).collect();
    let rows = DenseRows::from_parts(v, coeffs, rhs, origins);

    if anchors.is_empty() || anchors.len() % n != 0 {
        return Err(Error::param("n_o", "anchor states missing or ragged"));
    }
    let mut objective = vec![0.0; v];
    let mut f = vec![0.0; m];
    let count = anchors.len() / n;
    for x in anchors.chunks_exact(n) {
        if !set.is_member(x) {
            return Err(Error::OutsideSafeSet);
        }
        basis.features_into(x, &mut f)?;
        for (o, t) in objective.iter_mut().zip(&f) {
            *o += t;
        }
    }
    for o in objective.iter_mut().take(m) {
        *o /= count as f64;
    }
    objective[m] = 1.0;
    let mut upper = vec![template.u_a(); v];
    upper[m] = 1.0;
    Ok(LpModel {
        objective,
        lower: vec![0.0; v],
        upper,
        rows: Box::new(rows),
        names: names(m, "lambda"),
        epigraph: Some(m),
    })
}
