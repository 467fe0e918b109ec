//! Empirical cross-checks on a fresh random stream: Monte Carlo safety
//! estimates, trajectories, and bound grids for plotting.

use std::io::Write;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::certify::BoundEvaluator;
use crate::error::{check_dim, Error, Result};
use crate::rng::{RngStream, StreamPurpose};
use crate::systems::{par_chunks, BlackBox, SlotWriter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Fraction of successors inside the safe set.
    pub p: f64,
    /// `sqrt(p (1 − p) / n)`.
    pub se: f64,
    pub n: usize,
}

fn estimate(hits: usize, n: usize) -> McEstimate {
    let p = hits as f64 / n as f64;
    McEstimate {
        p,
        se: (p * (1.0 - p) / n as f64).sqrt(),
        n,
    }
}

/// Estimates `P_d[f(x, d) ∈ X]` from `n_mc` fresh disturbances.
pub fn mc_one_step(sys: &dyn BlackBox, x: &[f64], n_mc: usize, rng: &mut RngStream) -> Result<McEstimate> {
    if n_mc == 0 {
        return Err(Error::param("n_mc", "need at least one draw"));
    }
    check_dim(sys.state_dim(), x.len())?;
    let set = sys.safe_set();
    let mut d = vec![0.0; sys.disturbance_dim()];
    let mut y = vec![0.0; sys.state_dim()];
    let mut hits = 0usize;
    for _ in 0..n_mc {
        sys.sample_d(rng.next_u64(), &mut d)?;
        sys.step(x, &d, &mut y)?;
        if set.is_member(&y) {
            hits += 1;
        }
    }
    Ok(estimate(hits, n_mc))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub threshold: f64,
    pub n_states: usize,
    pub n_mc: usize,
    /// Fraction of states whose estimated safety probability reaches the
    /// threshold.
    pub fraction: f64,
    pub se: f64,
}

/// Per-state estimates at `n_states` uniform states of the safe set. State
/// `k` and its disturbances come from validation substream `k`.
pub fn mc_states(sys: &dyn BlackBox, n_states: usize, n_mc: usize, seed: u64, workers: usize) -> Result<(Vec<f64>, Vec<McEstimate>)> {
    if n_states == 0 {
        return Err(Error::param("n_states", "need at least one state"));
    }
    let n = sys.state_dim();
    let base = RngStream::for_purpose(seed, StreamPurpose::Validation);
    let mut states = vec![0.0; n_states * n];
    let mut est = vec![0.0; n_states * 3];
    {
        let xs = SlotWriter::new(&mut states);
        let es = SlotWriter::new(&mut est);
        par_chunks(n_states, workers, |range| {
            for k in range {
                // SAFETY: slot k is written by one worker.
                let (x, e) = unsafe { (xs.slice(k * n, n), es.slice(k * 3, 3)) };
                let mut rng = base.substream(k as u64);
                sys.safe_set().sample_into(&mut rng, x)?;
                let r = mc_one_step(sys, x, n_mc, &mut rng)?;
                e.copy_from_slice(&[r.p, r.se, r.n as f64]);
            }
            Ok(())
        })?;
    }
    let est = est
        .chunks_exact(3)
        .map(|e| McEstimate {
            p: e[0],
            se: e[1],
            n: e[2] as usize,
        })
        .collect();
    Ok((states, est))
}

/// Fraction of uniform states whose one-step safety estimate is at least
/// `threshold`.
pub fn mc_state_sweep(
    sys: &dyn BlackBox,
    n_states: usize,
    n_mc: usize,
    threshold: f64,
    seed: u64,
    workers: usize,
) -> Result<SweepReport> {
    let (_, est) = mc_states(sys, n_states, n_mc, seed, workers)?;
    let hits = est.iter().filter(|e| e.p >= threshold).count();
    let e = estimate(hits, n_states);
    Ok(SweepReport {
        threshold,
        n_states,
        n_mc,
        fraction: e.p,
        se: e.se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub n_states: usize,
    pub n_mc: usize,
    /// States where the bound is at most the estimate plus three standard
    /// errors.
    pub satisfied: usize,
    pub fraction: f64,
}

/// Compares a stochastic certificate's bound with Monte Carlo estimates at
/// fresh uniform states.
pub fn bound_dominance(
    sys: &dyn BlackBox,
    eval: &BoundEvaluator,
    n_states: usize,
    n_mc: usize,
    seed: u64,
    workers: usize,
) -> Result<DominanceReport> {
    let (states, est) = mc_states(sys, n_states, n_mc, seed, workers)?;
    let mut satisfied = 0;
    for (x, e) in states.chunks_exact(sys.state_dim()).zip(&est) {
        if eval.bound(x)?.clamped <= e.p + 3.0 * e.se {
            satisfied += 1;
        }
    }
    Ok(DominanceReport {
        n_states,
        n_mc,
        satisfied,
        fraction: satisfied as f64 / n_states as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `steps + 1` states starting at `x0`.
    pub states: Vec<Vec<f64>>,
    /// Safe-set membership of each state.
    pub safe: Vec<bool>,
}

impl Trajectory {
    pub fn left_safe_set(&self) -> bool {
        self.safe.iter().any(|s| !s)
    }
}

/// Independent trajectories from `x0`; run `r` draws from validation
/// substream `r`. Trajectories continue after leaving the safe set.
pub fn simulate(sys: &dyn BlackBox, x0: &[f64], steps: usize, runs: usize, seed: u64) -> Result<Vec<Trajectory>> {
    if !sys.safe_set().contains(x0)? {
        return Err(Error::OutsideSafeSet);
    }
    let base = RngStream::for_purpose(seed, StreamPurpose::Validation);
    let mut d = vec![0.0; sys.disturbance_dim()];
    (0..runs)
        .map(|r| {
            let mut rng = base.substream(r as u64);
            let mut states = vec![x0.to_vec()];
            let mut safe = vec![true];
            for _ in 0..steps {
                let x = states.last().unwrap();
                let mut y = vec![0.0; x.len()];
                sys.sample_d(rng.next_u64(), &mut d)?;
                sys.step(x, &d, &mut y)?;
                safe.push(sys.safe_set().is_member(&y));
                states.push(y);
            }
            Ok(Trajectory { states, safe })
        })
        .collect()
}

/// Fixed coordinates for a 2-D slice, parsed from `"j=v,..."` with 1-based
/// coordinate indices.
pub fn parse_slice(s: &str) -> Result<Vec<(usize, f64)>> {
    let bad = |m: String| Error::param("slice", m);
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|part| {
            let (j, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `j=v`, got `{part}`")))?;
            let j: usize = j
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad coordinate index `{j}`")))?;
            if j == 0 {
                return Err(bad("coordinate indices start at 1".into()));
            }
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("bad value `{v}`")))?;
            Ok((j, v))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub x1: f64,
    pub x2: f64,
    /// Clamped bound; `None` outside the safe set.
    pub bound: Option<f64>,
    pub in_safe_set: bool,
}

/// Bound values at the cell centres of a `resolution × resolution` grid over
/// the bounding box of two free coordinates. All other coordinates must be
/// fixed by `slice` (1-based indices).
pub fn contour_grid(eval: &BoundEvaluator, resolution: usize, slice: &[(usize, f64)]) -> Result<Vec<GridRecord>> {
    if resolution == 0 {
        return Err(Error::param("resolution", "must be at least 1"));
    }
    let set = eval.safe_set();
    let n = set.dim();
    let mut point = vec![f64::NAN; n];
    for &(j, v) in slice {
        if j > n {
            return Err(Error::param("slice", format!("coordinate {j} exceeds dimension {n}")));
        }
        if !point[j - 1].is_nan() {
            return Err(Error::param("slice", format!("coordinate {j} fixed twice")));
        }
        point[j - 1] = v;
    }
    let free: Vec<usize> = (0..n).filter(|&j| point[j].is_nan()).collect();
    if free.len() != 2 {
        return Err(Error::param(
            "slice",
            format!("need exactly two free coordinates, got {}", free.len()),
        ));
    }
    let (a, b) = (free[0], free[1]);
    let axis = |j: usize, k: usize| {
        let (lo, hi) = (set.bbox_lo()[j], set.bbox_hi()[j]);
        lo + (k as f64 + 0.5) * (hi - lo) / resolution as f64
    };
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for k in 0..resolution {
            point[a] = axis(a, i);
            point[b] = axis(b, k);
            let inside = set.is_member(&point);
            let bound = if inside {
                Some(eval.bound(&point)?.clamped)
            } else {
                None
            };
            out.push(GridRecord {
                x1: point[a],
                x2: point[b],
                bound,
                in_safe_set: inside,
            });
        }
    }
    Ok(out)
}

/// CSV with header `x1,x2,bound,in_safe_set`; the bound is empty outside the
/// safe set.
pub fn write_grid_csv<W: Write>(records: &[GridRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "x1,x2,bound,in_safe_set")?;
    for r in records {
        let bound = r.bound.map(|b| format!("{b}")).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.x1, r.x2, bound, r.in_safe_set)?;
    }
    Ok(())
}
