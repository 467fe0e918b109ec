//! Linear programs of the form `min c·z  s.t.  G z ≤ h,  lo ≤ z ≤ hi`.
//!
//! Rows are served by a [`RowSource`] so that very tall programs can be
//! generated on demand instead of stored densely.

mod build;
mod simplex;

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{build_rbc_lp, build_sbc_lp, RbcRows};
pub use simplex::{solve, solve_with, SolverOptions};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("program is infeasible")]
    Infeasible,
}

/// Which sample produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowOrigin {
    pub state: usize,
    /// Disturbance index within the state's group, when rows are per draw.
    pub draw: Option<usize>,
}

pub trait RowSource: Send + Sync {
    fn num_rows(&self) -> usize;
    fn num_vars(&self) -> usize;
    /// Writes the coefficients of row `k` into `out` and returns its
    /// right-hand side.
    fn row(&self, k: usize, out: &mut [f64]) -> f64;
    fn origin(&self, k: usize) -> RowOrigin;
}

/// Rows stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseRows {
    n: usize,
    coeffs: Vec<f64>,
    rhs: Vec<f64>,
    origins: Vec<RowOrigin>,
}

impl DenseRows {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            coeffs: Vec::new(),
            rhs: Vec::new(),
            origins: Vec::new(),
        }
    }

    pub(crate) fn from_parts(n: usize, coeffs: Vec<f64>, rhs: Vec<f64>, origins: Vec<RowOrigin>) -> Self {
        debug_assert_eq!(coeffs.len(), n * rhs.len());
        debug_assert_eq!(rhs.len(), origins.len());
        Self {
            n,
            coeffs,
            rhs,
            origins,
        }
    }

    pub fn push(&mut self, coeffs: &[f64], rhs: f64, origin: RowOrigin) {
        assert_eq!(coeffs.len(), self.n, "row length");
        self.coeffs.extend_from_slice(coeffs);
        self.rhs.push(rhs);
        self.origins.push(origin);
    }

    pub fn coeffs(&self, k: usize) -> &[f64] {
        &self.coeffs[k * self.n..(k + 1) * self.n]
    }

    pub fn rhs(&self, k: usize) -> f64 {
        self.rhs[k]
    }
}

impl RowSource for DenseRows {
    fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn row(&self, k: usize, out: &mut [f64]) -> f64 {
        out.copy_from_slice(self.coeffs(k));
        self.rhs[k]
    }

    fn origin(&self, k: usize) -> RowOrigin {
        self.origins[k]
    }
}

pub struct LpModel {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Box<dyn RowSource>,
    pub names: Vec<String>,
    /// Index of the scalar slack variable (ξ or λ), if the model has one.
    pub epigraph: Option<usize>,
}

impl std::fmt::Debug for LpModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LpModel")
            .field("vars", &self.num_vars())
            .field("rows", &self.num_rows())
            .field("epigraph", &self.epigraph)
            .finish()
    }
}

impl LpModel {
    /// Model over `rows` with default names `z1, z2, ...`.
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>, rows: Box<dyn RowSource>) -> Self {
        let names = (1..=objective.len()).map(|j| format!("z{j}")).collect();
        Self {
            objective,
            lower,
            upper,
            rows,
            names,
            epigraph: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.num_rows()
    }

    pub fn row(&self, k: usize) -> (Vec<f64>, f64) {
        let mut out = vec![0.0; self.num_vars()];
        let rhs = self.rows.row(k, &mut out);
        (out, rhs)
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        self.objective.iter().zip(z).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `z` (0 when feasible).
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, v) in z.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst.max(self.max_row_violation(z))
    }

    pub fn max_row_violation(&self, z: &[f64]) -> f64 {
        let mut buf = vec![0.0; self.num_vars()];
        let mut worst: f64 = 0.0;
        for k in 0..self.num_rows() {
            let rhs = self.rows.row(k, &mut buf);
            let lhs: f64 = buf.iter().zip(z).map(|(a, b)| a * b).sum();
            worst = worst.max(lhs - rhs);
        }
        worst
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(SolverError::Malformed("no variables".into()));
        }
        if self.lower.len() != n || self.upper.len() != n || self.rows.num_vars() != n || self.names.len() != n {
            return Err(SolverError::Malformed("inconsistent variable counts".into()));
        }
        for j in 0..n {
            let (l, u, c) = (self.lower[j], self.upper[j], self.objective[j]);
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(SolverError::Malformed(format!(
                    "variable {} needs finite bounds lo <= hi, got [{l}, {u}]",
                    self.names[j]
                )));
            }
            if !c.is_finite() {
                return Err(SolverError::Malformed(format!("objective entry {j} is not finite")));
            }
        }
        Ok(())
    }

    /// Writes the model in the plain-text dump format:
    ///
    /// ```text
    /// lp <vars> <rows>
    /// var <name> <lo> <hi> <objective>      (one line per variable)
    /// row <rhs> <c_1> ... <c_n>             (one line per row, meaning c·z <= rhs)
    /// ```
    ///
    /// Numbers use Rust's shortest round-trip formatting.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "lp {} {}", self.num_vars(), self.num_rows())?;
        for j in 0..self.num_vars() {
            writeln!(
                w,
                "var {} {:?} {:?} {:?}",
                self.names[j], self.lower[j], self.upper[j], self.objective[j]
            )?;
        }
        let mut buf = vec![0.0; self.num_vars()];
        let mut line = String::new();
        for k in 0..self.num_rows() {
            let rhs = self.rows.row(k, &mut buf);
            line.clear();
            let _ = write!(line, "row {rhs:?}");
            for v in &buf {
                let _ = write!(line, " {v:?}");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Parses the dump format written by [`LpModel::write_dump`].
    pub fn read_dump<R: BufRead>(r: R) -> Result<Self, SolverError> {
        let bad = |msg: String| SolverError::Malformed(msg);
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("bad number `{s}`: {e}")));
        let mut lines = r.lines();
        let mut next = || -> Result<String, SolverError> {
            lines
                .next()
                .ok_or_else(|| bad("unexpected end of dump".into()))?
                .map_err(|e| bad(e.to_string()))
        };
        let header = next()?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "lp" {
            return Err(bad(format!("bad header `{header}`")));
        }
        let n: usize = head[1].parse().map_err(|_| bad("bad variable count".into()))?;
        let m: usize = head[2].parse().map_err(|_| bad("bad row count".into()))?;
        let (mut names, mut lower, mut upper, mut objective) = (vec![], vec![], vec![], vec![]);
        for _ in 0..n {
            let line = next()?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 5 || t[0] != "var" {
                return Err(bad(format!("bad variable line `{line}`")));
            }
            names.push(t[1].to_string());
            lower.push(num(t[2])?);
            upper.push(num(t[3])?);
            objective.push(num(t[4])?);
        }
        let mut rows = DenseRows::new(n);
        let mut coeffs = vec![0.0; n];
        for k in 0..m {
            let line = next()?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != n + 2 || t[0] != "row" {
                return Err(bad(format!("bad row line {k}")));
            }
            for (c, s) in coeffs.iter_mut().zip(&t[2..]) {
                *c = num(s)?;
            }
            rows.push(&coeffs, num(t[1])?, RowOrigin { state: k, draw: None });
        }
        Ok(Self {
            objective,
            lower,
            upper,
            rows: Box::new(rows),
            names,
            epigraph: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    /// Optimal, but the scalar slack variable sits at its upper bound.
    BoundHit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub z: Vec<f64>,
    pub objective: f64,
    /// Rows in the final basis.
    pub active_rows: Vec<usize>,
    /// Largest row violation at `z`.
    pub max_residual: f64,
    pub iterations: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> LpModel {
        let mut rows = DenseRows::new(2);
        rows.push(&[-1.0, -1.0], -1.0, RowOrigin { state: 0, draw: None });
        LpModel::new(vec![1.0, 1.0], vec![0.0, 0.0], vec![1.0, 1.0], Box::new(rows))
    }

    #[test]
    fn dump_round_trip() {
        let m = tiny();
        let mut out = Vec::new();
        m.write_dump(&mut out).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.starts_with("lp 2 1\nvar z1 0.0 1.0 1.0\n"));
        let back = LpModel::read_dump(&out[..]).unwrap();
        assert_eq!(back.row(0), m.row(0));
        assert_eq!(back.objective, m.objective);
        assert!(LpModel::read_dump("lp 2 1\n".as_bytes()).is_err());
    }

    #[test]
    fn violations() {
        let m = tiny();
        assert_eq!(m.max_violation(&[0.0, 1.0]), 0.0);
        assert_eq!(m.max_violation(&[0.25, 0.25]), 0.5);
        assert_eq!(m.max_violation(&[2.0, 0.0]), 1.0);
    }

    #[test]
    fn validation_catches_bad_bounds() {
        let mut m = tiny();
        m.upper[1] = f64::INFINITY;
        assert!(m.validate().is_err());
    }
}
