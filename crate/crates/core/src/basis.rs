//! Product polynomial bases on a box and the gated barrier templates built
//! from them.
//!
//! Terms are indexed by multi-indices `(i_1, ..., i_n)` with each
//! `i_j ∈ {0..κ}`, enumerated lexicographically with `i_n` varying fastest:
//! term `k` has `k = Σ_j i_j (κ+1)^(n-1-j)`.
//!
//! * Handelman: `Π_j (x_j − lo_j)^{i_j} (hi_j − x_j)^{κ−i_j}`
//! * Bernstein: `Π_j C(κ, i_j) ψ_j^{i_j} (1 − ψ_j)^{κ−i_j}` with
//!   `ψ_j = (x_j − lo_j) / (hi_j − lo_j)` clamped to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::sets::SafeSet;

/// Largest per-coordinate degree with exact integer binomials.
pub const MAX_KAPPA: u32 = 60;

/// Largest number of template terms accepted.
pub const MAX_TERMS: usize = 1 << 20;

/// Tag written into certificates alongside coefficient vectors.
pub const ORDER_TAG: &str = "lex:i1..in:last-fastest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Handelman,
    Bernstein,
}

#[derive(Debug, Clone)]
pub struct MultiIndexBasis {
    kind: BasisKind,
    kappa: u32,
    lo: Vec<f64>,
    hi: Vec<f64>,
    binom: Vec<f64>,
    m: usize,
}

fn binomial_row(k: u32) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..k {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

impl MultiIndexBasis {
    pub fn new(kind: BasisKind, kappa: u32, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if kappa > MAX_KAPPA {
            return Err(Error::InvalidBasis(format!(
                "degree {kappa} exceeds the supported maximum {MAX_KAPPA}"
            )));
        }
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::InvalidBasis("zero-dimensional box".into()));
        }
        for (j, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidBasis(format!(
                    "degenerate box in coordinate {j}: [{l}, {h}]"
                )));
            }
        }
        let per = kappa as usize + 1;
        let mut m: usize = 1;
        for _ in 0..lo.len() {
            m = m
                .checked_mul(per)
                .filter(|&m| m <= MAX_TERMS)
                .ok_or_else(|| {
                    Error::InvalidBasis(format!(
                        "(κ+1)^n = {per}^{} exceeds {MAX_TERMS} terms",
                        lo.len()
                    ))
                })?;
        }
        let binom = binomial_row(kappa).into_iter().map(|c| c as f64).collect();
        Ok(Self {
            kind,
            kappa,
            lo,
            hi,
            binom,
            m,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn num_terms(&self) -> usize {
        self.m
    }

    /// Multi-index of term `k`.
    pub fn multi_index(&self, mut k: usize) -> Vec<u32> {
        let per = self.kappa as usize + 1;
        let mut idx = vec![0; self.dim()];
        for slot in idx.iter_mut().rev() {
            *slot = (k % per) as u32;
            k /= per;
        }
        idx
    }

    fn univariate(&self, j: usize, x: f64, out: &mut [f64]) {
        let k = self.kappa as usize;
        let (lo, hi) = (self.lo[j], self.hi[j]);
        let (p, q) = match self.kind {
            BasisKind::Handelman => (x - lo, hi - x),
            BasisKind::Bernstein => {
                let psi = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
                (psi, 1.0 - psi)
            }
        };
        // out[i] = p^i q^(k-i), built from a forward power table of p
        // and a backward sweep over q.
        let mut pw = 1.0;
        for v in out.iter_mut().take(k + 1) {
            *v = pw;
            pw *= p;
        }
        let mut qw = 1.0;
        for i in (0..=k).rev() {
            out[i] *= qw;
            qw *= q;
        }
        if self.kind == BasisKind::Bernstein {
            for (v, c) in out.iter_mut().zip(&self.binom) {
                *v *= c;
            }
        }
    }

    /// Writes all `m` term values at `x` into `out`.
    pub fn features_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.m, out.len())?;
        let per = self.kappa as usize + 1;
        let mut uni = vec![0.0; per];
        out[0] = 1.0;
        let mut len = 1;
        for (j, &xj) in x.iter().enumerate() {
            self.univariate(j, xj, &mut uni);
            // Expand in place from the back so unread entries survive.
            for idx in (0..len).rev() {
                let base = out[idx];
                for (i, u) in uni.iter().enumerate() {
                    out[idx * per + i] = base * u;
                }
            }
            len *= per;
        }
        Ok(())
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m];
        self.features_into(x, &mut out)?;
        Ok(out)
    }
}

/// Gated template: `features(x)·a` on the safe set, a constant outside.
#[derive(Debug, Clone)]
pub struct BarrierTemplate {
    basis: MultiIndexBasis,
    outside_value: f64,
    set: SafeSet,
    u_a: f64,
}

impl BarrierTemplate {
    pub fn new(basis: MultiIndexBasis, outside_value: f64, set: SafeSet, u_a: f64) -> Result<Self> {
        check_dim(set.dim(), basis.dim())?;
        if !(u_a > 0.0 && u_a.is_finite()) {
            return Err(Error::param("u_a", format!("must be positive, got {u_a}")));
        }
        Ok(Self {
            basis,
            outside_value,
            set,
            u_a,
        })
    }

    /// Handelman template over the set's bounding box with value `c` outside.
    pub fn rbc(set: &SafeSet, kappa: u32, c: f64, u_a: f64) -> Result<Self> {
        let basis = MultiIndexBasis::new(
            BasisKind::Handelman,
            kappa,
            set.bbox_lo().to_vec(),
            set.bbox_hi().to_vec(),
        )?;
        Self::new(basis, c, set.clone(), u_a)
    }

    /// Bernstein template over the set's bounding box with value 1 outside.
    pub fn sbc(set: &SafeSet, kappa: u32, u_a: f64) -> Result<Self> {
        let basis = MultiIndexBasis::new(
            BasisKind::Bernstein,
            kappa,
            set.bbox_lo().to_vec(),
            set.bbox_hi().to_vec(),
        )?;
        Self::new(basis, 1.0, set.clone(), u_a)
    }

    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis
    }

    pub fn outside_value(&self) -> f64 {
        self.outside_value
    }

    pub fn safe_set(&self) -> &SafeSet {
        &self.set
    }

    pub fn u_a(&self) -> f64 {
        self.u_a
    }

    pub fn num_terms(&self) -> usize {
        self.basis.num_terms()
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.basis.features(x)
    }

    /// Ungated polynomial part `features(x)·a`.
    pub fn inner(&self, a: &[f64], x: &[f64]) -> Result<f64> {
        check_dim(self.num_terms(), a.len())?;
        let f = self.basis.features(x)?;
        Ok(dot(&f, a))
    }

    /// Gated value: `inner(a, x)` if `x` is in the safe set, else the
    /// outside constant.
    pub fn eval(&self, a: &[f64], x: &[f64]) -> Result<f64> {
        check_dim(self.num_terms(), a.len())?;
        if self.set.contains(x)? {
            self.inner(a, x)
        } else {
            Ok(self.outside_value)
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
