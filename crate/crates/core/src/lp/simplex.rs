//! Bounded-variable simplex in active-set form.
//!
//! Every constraint, bounds included, is written as `a·z ≤ b`. A basis is a
//! set of `n` constraints whose normals are linearly independent; its vertex
//! is `z = A_B⁻¹ b_B` and its multipliers are `μ = −A_B⁻ᵀ c`. The explicit
//! inverse is kept column-wise and updated by a rank-one formula after each
//! exchange, with a fresh factorization every few exchanges.
//!
//! Phase one is a dual simplex started from the bound basis that puts each
//! variable at the bound favoured by its cost, so it is dual feasible from
//! the start. Row pricing works on a pool of the most violated rows
//! (violation divided by the row norm), refilled by full passes over the
//! row source. Phase two applies the tie-break: the optimal value is pinned
//! and each variable in index order is minimized by primal simplex, then
//! fixed at its minimum. Harris ratio tests are used throughout; after a
//! long run without progress the selection rules switch to smallest-index
//! choices.

use super::{LpModel, LpSolution, LpStatus, SolverError};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Largest accepted constraint violation.
    pub feas_tol: f64,
    /// Largest accepted wrong-signed multiplier.
    pub opt_tol: f64,
    /// Smallest pivot magnitude.
    pub pivot_tol: f64,
    pub max_iterations: usize,
    /// Exchanges between fresh factorizations.
    pub refactor_every: usize,
    /// Rows kept in the pricing pool; 0 picks `4n + 16`.
    pub pool_size: usize,
    /// Exchanges without objective progress before switching to
    /// smallest-index rules.
    pub stall_limit: usize,
    /// Lexicographically minimize the variables among optimal points.
    pub tie_break: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iterations: 1_000_000,
            refactor_every: 50,
            pool_size: 0,
            stall_limit: 500,
            tie_break: true,
        }
    }
}

pub fn solve(model: &LpModel) -> Result<LpSolution, SolverError> {
    solve_with(model, &SolverOptions::default())
}

pub fn solve_with(model: &LpModel, opts: &SolverOptions) -> Result<LpSolution, SolverError> {
    model.validate()?;
    let mut s = Solver::new(model, opts);
    match s.dual_phase()? {
        Phase::Infeasible => {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                z: s.z.clone(),
                objective: f64::NAN,
                active_rows: vec![],
                max_residual: f64::INFINITY,
                iterations: s.iterations,
            })
        }
        Phase::Done => {}
    }
    if opts.tie_break {
        s.tie_break()?;
    }
    Ok(s.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Con {
    Lower(usize),
    Upper(usize),
    Pin,
    Row(usize),
}

impl Con {
    /// Order used by the smallest-index rules.
    fn id(self, n: usize) -> usize {
        match self {
            Con::Lower(j) => j,
            Con::Upper(j) => n + j,
            Con::Pin => 2 * n,
            Con::Row(r) => 2 * n + 1 + r,
        }
    }
}

enum Phase {
    Done,
    Infeasible,
}

struct Candidate {
    con: Con,
    a: Vec<f64>,
    b: f64,
}

struct Solver<'a> {
    model: &'a LpModel,
    opts: &'a SolverOptions,
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    pin: Option<(Vec<f64>, f64)>,
    basis: Vec<Con>,
    basis_a: Vec<Vec<f64>>,
    /// Right-hand sides of basic rows; bound and pin entries are read live.
    basis_b: Vec<f64>,
    /// Column `i` of `A_B⁻¹` at `binv[i*n..(i+1)*n]`.
    binv: Vec<f64>,
    z: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    pool: Vec<Candidate>,
    pool_size: usize,
    row_buf: Vec<f64>,
    bland: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt().max(1e-300)
}

impl<'a> Solver<'a> {
    fn new(model: &'a LpModel, opts: &'a SolverOptions) -> Self {
        let n = model.num_vars();
        let mut basis = Vec::with_capacity(n);
        let mut basis_a = Vec::with_capacity(n);
        let mut binv = vec![0.0; n * n];
        for j in 0..n {
            let mut a = vec![0.0; n];
            if model.objective[j] >= 0.0 {
                basis.push(Con::Lower(j));
                a[j] = -1.0;
                binv[j * n + j] = -1.0;
            } else {
                basis.push(Con::Upper(j));
                a[j] = 1.0;
                binv[j * n + j] = 1.0;
            }
            basis_a.push(a);
        }
        let pool_size = if opts.pool_size == 0 { 4 * n + 16 } else { opts.pool_size };
        let mut s = Self {
            model,
            opts,
            n,
            lower: model.lower.clone(),
            upper: model.upper.clone(),
            pin: None,
            basis,
            basis_a,
            basis_b: vec![0.0; n],
            binv,
            z: vec![0.0; n],
            since_refactor: 0,
            iterations: 0,
            pool: Vec::new(),
            pool_size,
            row_buf: vec![0.0; n],
            bland: false,
        };
        s.compute_z();
        s
    }

    fn col(&self, i: usize) -> &[f64] {
        &self.binv[i * self.n..(i + 1) * self.n]
    }

    fn rhs_of(&self, i: usize) -> f64 {
        match self.basis[i] {
            Con::Lower(j) => -self.lower[j],
            Con::Upper(j) => self.upper[j],
            Con::Pin => self.pin.as_ref().map(|p| p.1).unwrap_or(0.0),
            Con::Row(_) => self.basis_b[i],
        }
    }

    fn compute_z(&mut self) {
        let n = self.n;
        let mut z = vec![0.0; n];
        for i in 0..n {
            let b = self.rhs_of(i);
            if b != 0.0 {
                for (zk, ck) in z.iter_mut().zip(self.col(i)) {
                    *zk += b * ck;
                }
            }
        }
        self.z = z;
    }

    /// `μ_i = −c·col_i`.
    fn multipliers(&self, c: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| -dot(c, self.col(i))).collect()
    }

    /// `w = A_B⁻ᵀ a`, the coordinates of `a` in the basis normals.
    fn coords(&self, a: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(a, self.col(i))).collect()
    }

    fn bump(&mut self) -> Result<(), SolverError> {
        self.iterations += 1;
        if self.iterations > self.opts.max_iterations {
            return Err(SolverError::IterationLimit(self.opts.max_iterations));
        }
        Ok(())
    }

    /// Replaces basis entry `p` by `cand`; `w` are the coordinates of the
    /// entering normal.
    fn exchange(&mut self, p: usize, cand: Candidate, w: &[f64]) -> Result<(), SolverError> {
        let n = self.n;
        let wp = w[p];
        {
            let (before, rest) = self.binv.split_at_mut(p * n);
            let (colp, after) = rest.split_at_mut(n);
            for v in colp.iter_mut() {
                *v /= wp;
            }
            for (i, col) in before.chunks_exact_mut(n).enumerate() {
                let f = w[i];
                if f != 0.0 {
                    for (c, q) in col.iter_mut().zip(colp.iter()) {
                        *c -= f * q;
                    }
                }
            }
            for (i, col) in after.chunks_exact_mut(n).enumerate() {
                let f = w[p + 1 + i];
                if f != 0.0 {
                    for (c, q) in col.iter_mut().zip(colp.iter()) {
                        *c -= f * q;
                    }
                }
            }
        }
        self.basis[p] = cand.con;
        self.basis_a[p] = cand.a;
        self.basis_b[p] = cand.b;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor()?;
        }
        Ok(())
    }

    /// Recomputes `A_B⁻¹` by Gauss–Jordan elimination with partial pivoting.
    fn refactor(&mut self) -> Result<(), SolverError> {
        let n = self.n;
        let w = 2 * n;
        let mut m = vec![0.0; n * w];
        for i in 0..n {
            m[i * w..i * w + n].copy_from_slice(&self.basis_a[i]);
            m[i * w + n + i] = 1.0;
        }
        for c in 0..n {
            let (mut piv, mut best) = (c, m[c * w + c].abs());
            for r in c + 1..n {
                let v = m[r * w + c].abs();
                if v > best {
                    piv = r;
                    best = v;
                }
            }
            if best < 1e-13 {
                return Err(SolverError::Numerical("singular basis during refactorization".into()));
            }
            if piv != c {
                for k in 0..w {
                    m.swap(c * w + k, piv * w + k);
                }
            }
            let d = m[c * w + c];
            for k in 0..w {
                m[c * w + k] /= d;
            }
            for r in 0..n {
                if r != c {
                    let f = m[r * w + c];
                    if f != 0.0 {
                        for k in 0..w {
                            m[r * w + k] -= f * m[c * w + k];
                        }
                    }
                }
            }
        }
        // m[:, n..] = A_B⁻¹; column i of the inverse is m[k][n + i].
        for i in 0..n {
            for k in 0..n {
                self.binv[i * n + k] = m[k * w + n + i];
            }
        }
        self.since_refactor = 0;
        self.compute_z();
        Ok(())
    }

    fn bound_candidates(&self) -> impl Iterator<Item = Candidate> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |j| {
                let mut lo = vec![0.0; n];
                lo[j] = -1.0;
                let mut hi = vec![0.0; n];
                hi[j] = 1.0;
                [
                    Candidate {
                        con: Con::Lower(j),
                        a: lo,
                        b: -self.lower[j],
                    },
                    Candidate {
                        con: Con::Upper(j),
                        a: hi,
                        b: self.upper[j],
                    },
                ]
            })
            .chain(self.pin.iter().map(|(a, b)| Candidate {
                con: Con::Pin,
                a: a.clone(),
                b: *b,
            }))
    }

    fn in_basis(&self, con: Con) -> bool {
        self.basis.contains(&con)
    }

    /// Violation of the bound constraints, cheaply, without allocating.
    fn bound_violation(&self, con: Con) -> f64 {
        match con {
            Con::Lower(j) => self.lower[j] - self.z[j],
            Con::Upper(j) => self.z[j] - self.upper[j],
            _ => unreachable!(),
        }
    }

    /// Picks a violated non-basic constraint, or `None` at a feasible vertex.
    fn select_violated(&mut self) -> Option<Candidate> {
        let tol = self.opts.feas_tol;
        let n = self.n;
        if self.bland {
            return self.smallest_violated();
        }
        // bounds and pin
        let mut best: Option<(f64, Con)> = None;
        for j in 0..n {
            for con in [Con::Lower(j), Con::Upper(j)] {
                let v = self.bound_violation(con);
                if v > tol && best.is_none_or(|(s, _)| v > s) && !self.in_basis(con) {
                    best = Some((v, con));
                }
            }
        }
        if let Some((a, b)) = &self.pin {
            let v = dot(a, &self.z) - b;
            let s = v / norm(a);
            if v > tol && best.is_none_or(|(bs, _)| s > bs) && !self.in_basis(Con::Pin) {
                best = Some((s, Con::Pin));
            }
        }
        let mut pool_best: Option<(f64, usize)> = None;
        for (k, c) in self.pool.iter().enumerate() {
            let v = dot(&c.a, &self.z) - c.b;
            if v > tol {
                let s = v / norm(&c.a);
                if pool_best.is_none_or(|(bs, _)| s > bs) && !self.in_basis(c.con) {
                    pool_best = Some((s, k));
                }
            }
        }
        match (best, pool_best) {
            (Some((s, con)), pb) if pb.is_none_or(|(ps, _)| s >= ps) => {
                return self.bound_candidates().find(|c| c.con == con);
            }
            (_, Some((_, k))) => {
                let c = &self.pool[k];
                return Some(Candidate {
                    con: c.con,
                    a: c.a.clone(),
                    b: c.b,
                });
            }
            _ => {}
        }
        self.refill_pool()
    }

    /// Full pass over the rows; keeps the most violated ones in the pool.
    fn refill_pool(&mut self) -> Option<Candidate> {
        let tol = self.opts.feas_tol;
        let rows = &self.model.rows;
        let mut violated: Vec<(f64, usize)> = Vec::new();
        for r in 0..rows.num_rows() {
            let b = rows.row(r, &mut self.row_buf);
            let v = dot(&self.row_buf, &self.z) - b;
            if v > tol {
                violated.push((v / norm(&self.row_buf), r));
            }
        }
        let mut basic_rows: Vec<usize> = self
            .basis
            .iter()
            .filter_map(|c| match c {
                Con::Row(r) => Some(*r),
                _ => None,
            })
            .collect();
        basic_rows.sort_unstable();
        violated.retain(|(_, r)| basic_rows.binary_search(r).is_err());
        if violated.is_empty() {
            self.pool.clear();
            return None;
        }
        let order = |x: &(f64, usize), y: &(f64, usize)| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1));
        if violated.len() > self.pool_size {
            violated.select_nth_unstable_by(self.pool_size, order);
            violated.truncate(self.pool_size);
        }
        violated.sort_by(order);
        self.pool = violated
            .iter()
            .map(|&(_, r)| {
                let mut a = vec![0.0; self.n];
                let b = rows.row(r, &mut a);
                Candidate { con: Con::Row(r), a, b }
            })
            .collect();
        let c = &self.pool[0];
        Some(Candidate {
            con: c.con,
            a: c.a.clone(),
            b: c.b,
        })
    }

    /// Smallest-index violated constraint over everything, bounds first.
    fn smallest_violated(&mut self) -> Option<Candidate> {
        let tol = self.opts.feas_tol;
        let n = self.n;
        let mut best: Option<Con> = None;
        for j in 0..n {
            let con = Con::Lower(j);
            if self.bound_violation(con) > tol && !self.in_basis(con) {
                best = Some(con);
                break;
            }
        }
        if best.is_none() {
            for j in 0..n {
                let con = Con::Upper(j);
                if self.bound_violation(con) > tol && !self.in_basis(con) {
                    best = Some(con);
                    break;
                }
            }
        }
        if best.is_none() {
            if let Some((a, b)) = &self.pin {
                if dot(a, &self.z) - b > tol && !self.in_basis(Con::Pin) {
                    best = Some(Con::Pin);
                }
            }
        }
        if let Some(con) = best {
            return self.bound_candidates().find(|c| c.con == con);
        }
        let rows = &self.model.rows;
        for r in 0..rows.num_rows() {
            let b = rows.row(r, &mut self.row_buf);
            if dot(&self.row_buf, &self.z) - b > tol && !self.basis.contains(&Con::Row(r)) {
                return Some(Candidate {
                    con: Con::Row(r),
                    a: self.row_buf.clone(),
                    b,
                });
            }
        }
        None
    }

    /// Dual simplex from the current dual-feasible basis.
    fn dual_phase(&mut self) -> Result<Phase, SolverError> {
        let c = self.model.objective.clone();
        let mut last_obj = f64::NEG_INFINITY;
        let mut stall = 0usize;
        self.bland = false;
        loop {
            let cand = match self.select_violated() {
                Some(c) => c,
                None => {
                    if self.since_refactor > 0 {
                        self.refactor()?;
                        continue;
                    }
                    return Ok(Phase::Done);
                }
            };
            self.bump()?;
            let w = self.coords(&cand.a);
            let mu = self.multipliers(&c);
            let p = match self.dual_ratio(&w, &mu) {
                Some(p) => p,
                None => {
                    if self.since_refactor > 0 {
                        self.refactor()?;
                        continue;
                    }
                    return Ok(Phase::Infeasible);
                }
            };
            self.exchange(p, cand, &w)?;
            self.compute_z();
            let obj = dot(&c, &self.z);
            if obj > last_obj + 1e-12 * (1.0 + obj.abs()) {
                last_obj = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall > self.opts.stall_limit {
                    self.bland = true;
                }
            }
        }
    }

    /// Leaving position for the dual simplex: keeps `μ − t w ≥ 0`.
    fn dual_ratio(&self, w: &[f64], mu: &[f64]) -> Option<usize> {
        let tol = self.opts.pivot_tol;
        let mut tmax = f64::INFINITY;
        for i in 0..self.n {
            if w[i] > tol {
                tmax = tmax.min((mu[i].max(0.0) + self.opts.opt_tol) / w[i]);
            }
        }
        if !tmax.is_finite() {
            return None;
        }
        let mut pick: Option<usize> = None;
        for i in 0..self.n {
            if w[i] > tol && mu[i].max(0.0) / w[i] <= tmax {
                pick = match pick {
                    None => Some(i),
                    Some(q) if self.bland => {
                        let (ri, rq) = (mu[i].max(0.0) / w[i], mu[q].max(0.0) / w[q]);
                        if ri < rq || (ri == rq && self.basis[i].id(self.n) < self.basis[q].id(self.n)) {
                            Some(i)
                        } else {
                            Some(q)
                        }
                    }
                    Some(q) => {
                        if w[i] > w[q] {
                            Some(i)
                        } else {
                            Some(q)
                        }
                    }
                };
            }
        }
        pick
    }

    /// Pins the optimal value and minimizes each variable in turn.
    fn tie_break(&mut self) -> Result<(), SolverError> {
        let c = self.model.objective.clone();
        let j_star = dot(&c, &self.z);
        self.pin = Some((c, j_star + 1e-12 * (1.0 + j_star.abs())));
        for k in 0..self.n {
            if self.z[k] > self.lower[k] + self.opts.feas_tol {
                self.primal_minimize(k)?;
            }
            let v = self.z[k].clamp(self.lower[k], self.upper[k]);
            self.upper[k] = v;
            self.compute_z();
        }
        Ok(())
    }

    /// Primal simplex on objective `e_k` from the current feasible vertex.
    fn primal_minimize(&mut self, k: usize) -> Result<(), SolverError> {
        let n = self.n;
        let mut stall = 0usize;
        let mut last = f64::INFINITY;
        self.bland = false;
        loop {
            // μ_i = −col_i[k]
            let mut leave: Option<usize> = None;
            let mut best = -self.opts.opt_tol;
            for i in 0..n {
                let mu = -self.binv[i * n + k];
                if mu < -self.opts.opt_tol {
                    if self.bland {
                        if leave.is_none_or(|q| self.basis[i].id(n) < self.basis[q].id(n)) {
                            leave = Some(i);
                        }
                    } else if mu < best {
                        best = mu;
                        leave = Some(i);
                    }
                }
            }
            let Some(p) = leave else {
                return Ok(());
            };
            self.bump()?;
            let q: Vec<f64> = self.col(p).iter().map(|v| -v).collect();
            let Some(cand) = self.primal_ratio(&q) else {
                return Err(SolverError::Numerical(format!(
                    "no blocking constraint while minimizing variable {k}"
                )));
            };
            let w = self.coords(&cand.a);
            if w[p].abs() < self.opts.pivot_tol {
                return Err(SolverError::Numerical("vanishing pivot in primal step".into()));
            }
            self.exchange(p, cand, &w)?;
            self.compute_z();
            let v = self.z[k];
            if v < last - 1e-12 * (1.0 + v.abs()) {
                last = v;
                stall = 0;
            } else {
                stall += 1;
                if stall > self.opts.stall_limit {
                    self.bland = true;
                }
            }
        }
    }

    /// Blocking constraint along direction `q` (Harris two-pass).
    fn primal_ratio(&mut self, q: &[f64]) -> Option<Candidate> {
        let tol = self.opts.pivot_tol;
        let ftol = self.opts.feas_tol;
        let mut cands: Vec<(f64, f64, f64, Candidate)> = Vec::new();
        let consider = |cand: Candidate, z: &[f64], cands: &mut Vec<(f64, f64, f64, Candidate)>| {
            let aq = dot(&cand.a, q);
            if aq > tol {
                let slack = (cand.b - dot(&cand.a, z)).max(0.0);
                cands.push((slack / aq, (slack + ftol) / aq, aq, cand));
            }
        };
        let bounds: Vec<Candidate> = self.bound_candidates().filter(|c| !self.in_basis(c.con)).collect();
        for c in bounds {
            consider(c, &self.z, &mut cands);
        }
        let rows = &self.model.rows;
        // Rows are kept only while they can still block; the bound keeps
        // the candidate list short on tall programs.
        let mut tmax = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        for r in 0..rows.num_rows() {
            let b = rows.row(r, &mut self.row_buf);
            let aq = dot(&self.row_buf, q);
            if aq > tol {
                let slack = (b - dot(&self.row_buf, &self.z)).max(0.0);
                let ratio = slack / aq;
                if ratio <= tmax && !self.basis.contains(&Con::Row(r)) {
                    let relaxed = (slack + ftol) / aq;
                    tmax = tmax.min(relaxed);
                    cands.push((
                        ratio,
                        relaxed,
                        aq,
                        Candidate {
                            con: Con::Row(r),
                            a: self.row_buf.clone(),
                            b,
                        },
                    ));
                }
            }
        }
        let tmax = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let n = self.n;
        let bland = self.bland;
        let mut pick: Option<(f64, f64, f64, Candidate)> = None;
        for c in cands.into_iter().filter(|c| c.0 <= tmax) {
            pick = match pick {
                None => Some(c),
                Some(p) => {
                    let better = if bland {
                        c.0 < p.0 || (c.0 == p.0 && c.3.con.id(n) < p.3.con.id(n))
                    } else {
                        c.2 > p.2
                    };
                    Some(if better { c } else { p })
                }
            };
        }
        pick.map(|p| p.3)
    }

    fn finish(&mut self) -> LpSolution {
        let model = self.model;
        let n = self.n;
        let z: Vec<f64> = (0..n)
            .map(|j| self.z[j].clamp(model.lower[j], model.upper[j]))
            .collect();
        let max_residual = model.max_row_violation(&z).max(0.0);
        let mut active_rows: Vec<usize> = self
            .basis
            .iter()
            .filter_map(|c| match c {
                Con::Row(r) => Some(*r),
                _ => None,
            })
            .collect();
        active_rows.sort_unstable();
        let status = match model.epigraph {
            Some(e) if z[e] >= model.upper[e] - self.opts.feas_tol => LpStatus::BoundHit,
            _ => LpStatus::Optimal,
        };
        LpSolution {
            status,
            objective: model.objective_value(&z),
            z,
            active_rows,
            max_residual,
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{DenseRows, RowOrigin};

    fn model(c: &[f64], lo: &[f64], hi: &[f64], rows: &[(&[f64], f64)]) -> LpModel {
        let mut d = DenseRows::new(c.len());
        for (k, (a, b)) in rows.iter().enumerate() {
            d.push(a, *b, RowOrigin { state: k, draw: None });
        }
        LpModel::new(c.to_vec(), lo.to_vec(), hi.to_vec(), Box::new(d))
    }

    #[test]
    fn single_slack_goes_to_zero() {
        let m = model(&[1.0], &[0.0], &[10.0], &[(&[-1.0], 0.0)]);
        let s = solve(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.z, vec![0.0]);
    }

    #[test]
    fn tie_break_prefers_small_leading_variables() {
        // min x + y, x + y >= 1, x, y in [0, 1]
        let m = model(&[1.0, 1.0], &[0.0, 0.0], &[1.0, 1.0], &[(&[-1.0, -1.0], -1.0)]);
        let s = solve(&m).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!(s.z[0].abs() < 1e-12 && (s.z[1] - 1.0).abs() < 1e-12, "{:?}", s.z);
    }

    #[test]
    fn infeasible_program_reported() {
        // x >= 2 with x in [0, 1]
        let m = model(&[1.0], &[0.0], &[1.0], &[(&[-1.0], -2.0)]);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn negative_costs_start_at_upper_bounds() {
        // max x + 2y s.t. x + y <= 1.5
        let m = model(&[-1.0, -2.0], &[0.0, 0.0], &[1.0, 1.0], &[(&[1.0, 1.0], 1.5)]);
        let s = solve(&m).unwrap();
        assert!((s.objective + 2.5).abs() < 1e-10);
        assert!((s.z[0] - 0.5).abs() < 1e-10 && (s.z[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn epigraph_at_cap_is_flagged() {
        let mut m = model(&[0.0, 1.0], &[0.0, 0.0], &[1.0, 2.0], &[(&[0.0, -1.0], -2.0)]);
        m.epigraph = Some(1);
        assert_eq!(solve(&m).unwrap().status, LpStatus::BoundHit);
    }

    #[test]
    fn small_pool_still_converges() {
        let rows: Vec<(Vec<f64>, f64)> = (0..40)
            .map(|k| {
                let t = k as f64 / 40.0 * std::f64::consts::PI;
                (vec![-t.cos(), -t.sin()], -1.0)
            })
            .collect();
        let refs: Vec<(&[f64], f64)> = rows.iter().map(|(a, b)| (a.as_slice(), *b)).collect();
        let m = model(&[1.0, 1.0], &[-5.0, 0.0], &[5.0, 50.0], &refs);
        let opts = SolverOptions {
            pool_size: 1,
            refactor_every: 3,
            ..Default::default()
        };
        let a = solve_with(&m, &opts).unwrap();
        let b = solve(&m).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9, "{a:?} {b:?}");
        assert_eq!(a.status, LpStatus::Optimal);
        assert!(a.max_residual <= 1e-9 && b.max_residual <= 1e-9);
    }
}
