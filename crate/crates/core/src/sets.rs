//! Compact safe sets with a bounding box and a uniform sampler.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::RngStream;

/// Attempts per point when sampling a non-box set by rejection from its box.
pub const REJECTION_ATTEMPTS: usize = 10_000;

pub type SublevelFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Shape {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius_squared: f64 },
    /// `{x : g(x) <= 0}`.
    Sublevel { g: SublevelFn },
}

/// Serializable description of a box or ball safe set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SafeSetSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius_squared: f64 },
}

#[derive(Clone)]
pub struct SafeSet {
    shape: Shape,
    bbox_lo: Vec<f64>,
    bbox_hi: Vec<f64>,
}

impl fmt::Debug for SafeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.shape {
            Shape::Box { .. } => "box",
            Shape::Ball { .. } => "ball",
            Shape::Sublevel { .. } => "sublevel",
        };
        f.debug_struct("SafeSet")
            .field("shape", &kind)
            .field("bbox_lo", &self.bbox_lo)
            .field("bbox_hi", &self.bbox_hi)
            .finish()
    }
}

fn check_bbox(lo: &[f64], hi: &[f64]) -> Result<()> {
    check_dim(lo.len(), hi.len())?;
    if lo.is_empty() {
        return Err(Error::InvalidSet("zero-dimensional set".into()));
    }
    for (j, (l, h)) in lo.iter().zip(hi).enumerate() {
        if !(l.is_finite() && h.is_finite() && l < h) {
            return Err(Error::InvalidSet(format!(
                "bounding box coordinate {j} must satisfy lo < hi, got [{l}, {h}]"
            )));
        }
    }
    Ok(())
}

impl SafeSet {
    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_bbox(&lo, &hi)?;
        Ok(Self {
            bbox_lo: lo.clone(),
            bbox_hi: hi.clone(),
            shape: Shape::Box { lo, hi },
        })
    }

    /// Hypercube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo; n], vec![hi; n])
    }

    pub fn ball(center: Vec<f64>, radius_squared: f64) -> Result<Self> {
        if !(radius_squared.is_finite() && radius_squared > 0.0) {
            return Err(Error::InvalidSet(format!(
                "ball radius squared must be positive, got {radius_squared}"
            )));
        }
        let r = radius_squared.sqrt();
        let bbox_lo: Vec<f64> = center.iter().map(|c| c - r).collect();
        let bbox_hi: Vec<f64> = center.iter().map(|c| c + r).collect();
        check_bbox(&bbox_lo, &bbox_hi)?;
        Ok(Self {
            shape: Shape::Ball {
                center,
                radius_squared,
            },
            bbox_lo,
            bbox_hi,
        })
    }

    /// `{x : g(x) <= 0}` inside the given bounding box. The box midpoint must
    /// be a member.
    pub fn sublevel(g: SublevelFn, bbox_lo: Vec<f64>, bbox_hi: Vec<f64>) -> Result<Self> {
        check_bbox(&bbox_lo, &bbox_hi)?;
        let mid: Vec<f64> = bbox_lo
            .iter()
            .zip(&bbox_hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect();
        if !(g(&mid) <= 0.0) {
            return Err(Error::InvalidSet(
                "bounding-box midpoint is not a member of the sublevel set".into(),
            ));
        }
        Ok(Self {
            shape: Shape::Sublevel { g },
            bbox_lo,
            bbox_hi,
        })
    }

    pub fn from_spec(spec: &SafeSetSpec) -> Result<Self> {
        match spec {
            SafeSetSpec::Box { lo, hi } => Self::boxed(lo.clone(), hi.clone()),
            SafeSetSpec::Ball {
                center,
                radius_squared,
            } => Self::ball(center.clone(), *radius_squared),
        }
    }

    /// `None` for sublevel sets, which carry an opaque function.
    pub fn to_spec(&self) -> Option<SafeSetSpec> {
        match &self.shape {
            Shape::Box { lo, hi } => Some(SafeSetSpec::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            }),
            Shape::Ball {
                center,
                radius_squared,
            } => Some(SafeSetSpec::Ball {
                center: center.clone(),
                radius_squared: *radius_squared,
            }),
            Shape::Sublevel { .. } => None,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.bbox_lo.len()
    }

    pub fn bbox_lo(&self) -> &[f64] {
        &self.bbox_lo
    }

    pub fn bbox_hi(&self) -> &[f64] {
        &self.bbox_hi
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.is_member(x))
    }

    /// Membership without the dimension check. Boundaries are inclusive.
    pub fn is_member(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        match &self.shape {
            Shape::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h),
            Shape::Ball {
                center,
                radius_squared,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(v, c)| (v - c) * (v - c)).sum();
                d2 <= *radius_squared
            }
            Shape::Sublevel { g } => g(x) <= 0.0,
        }
    }

    pub fn in_bbox(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.bbox_lo.iter().zip(&self.bbox_hi))
            .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    /// Uniform point of the set written into `out`.
    pub fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), out.len())?;
        let fill = |rng: &mut RngStream, out: &mut [f64]| {
            for (v, (l, h)) in out.iter_mut().zip(self.bbox_lo.iter().zip(&self.bbox_hi)) {
                *v = l + (h - l) * rng.unit();
            }
        };
        if let Shape::Box { .. } = self.shape {
            fill(rng, out);
            return Ok(());
        }
        for _ in 0..REJECTION_ATTEMPTS {
            fill(rng, out);
            if self.is_member(out) {
                return Ok(());
            }
        }
        Err(Error::RejectionCap {
            what: "safe-set state",
            attempts: REJECTION_ATTEMPTS,
        })
    }

    pub fn sample_uniform(&self, rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.dim()];
        self.sample_into(rng, &mut x)?;
        Ok(x)
    }
}
