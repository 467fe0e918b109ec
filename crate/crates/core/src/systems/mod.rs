//! Black-box systems and sample collection.
//!
//! The certifier sees a system only through [`BlackBox::step`] and
//! [`BlackBox::sample_d`] plus the user-specified safe set. Disturbance draws
//! are requested with a 64-bit seed hint taken from the run's disturbance
//! stream, so an in-process system and the same system served over the
//! plugin protocol produce identical sample sets.

pub mod benchmarks;
pub mod distribution;
pub mod plugin;

use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use rand::RngCore;

use crate::error::{check_dim, Error, Result};
use crate::rng::{RngStream, StreamPurpose};
use crate::samples::{GroupSampleSet, PairSampleSet};
use crate::sets::SafeSet;

pub use benchmarks::{builtin, Builtin, BUILTIN_NAMES};
pub use distribution::{DisturbanceDistribution, Marginal};

pub trait BlackBox: Send + Sync {
    fn name(&self) -> &str;
    fn state_dim(&self) -> usize;
    fn disturbance_dim(&self) -> usize;
    fn safe_set(&self) -> &SafeSet;
    /// One transition `next = f(x, d)`.
    fn step(&self, x: &[f64], d: &[f64], next: &mut [f64]) -> Result<()>;
    /// One disturbance draw determined by `seed_hint`.
    fn sample_d(&self, seed_hint: u64, d: &mut [f64]) -> Result<()>;
}

impl<T: BlackBox + ?Sized> BlackBox for &T {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn disturbance_dim(&self) -> usize {
        (**self).disturbance_dim()
    }
    fn safe_set(&self) -> &SafeSet {
        (**self).safe_set()
    }
    fn step(&self, x: &[f64], d: &[f64], next: &mut [f64]) -> Result<()> {
        (**self).step(x, d, next)
    }
    fn sample_d(&self, seed_hint: u64, d: &mut [f64]) -> Result<()> {
        (**self).sample_d(seed_hint, d)
    }
}

impl<T: BlackBox + ?Sized> BlackBox for Box<T> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn disturbance_dim(&self) -> usize {
        (**self).disturbance_dim()
    }
    fn safe_set(&self) -> &SafeSet {
        (**self).safe_set()
    }
    fn step(&self, x: &[f64], d: &[f64], next: &mut [f64]) -> Result<()> {
        (**self).step(x, d, next)
    }
    fn sample_d(&self, seed_hint: u64, d: &mut [f64]) -> Result<()> {
        (**self).sample_d(seed_hint, d)
    }
}

/// Draws a disturbance from `sys`, consuming one value of `rng`.
pub fn sample_disturbance(sys: &dyn BlackBox, rng: &mut RngStream) -> Result<Vec<f64>> {
    let mut d = vec![0.0; sys.disturbance_dim()];
    sys.sample_d(rng.next_u64(), &mut d)?;
    Ok(d)
}

/// Wraps a system and counts oracle calls.
pub struct CountingSystem<S> {
    inner: S,
    steps: AtomicU64,
    draws: AtomicU64,
}

impl<S: BlackBox> CountingSystem<S> {
    pub fn new(inner: S) -> Self {
        Self {
            inner,
            steps: AtomicU64::new(0),
            draws: AtomicU64::new(0),
        }
    }

    pub fn step_calls(&self) -> u64 {
        self.steps.load(Ordering::Relaxed)
    }

    pub fn sample_calls(&self) -> u64 {
        self.draws.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.steps.store(0, Ordering::Relaxed);
        self.draws.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: BlackBox> BlackBox for CountingSystem<S> {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }
    fn disturbance_dim(&self) -> usize {
        self.inner.disturbance_dim()
    }
    fn safe_set(&self) -> &SafeSet {
        self.inner.safe_set()
    }
    fn step(&self, x: &[f64], d: &[f64], next: &mut [f64]) -> Result<()> {
        self.steps.fetch_add(1, Ordering::Relaxed);
        self.inner.step(x, d, next)
    }
    fn sample_d(&self, seed_hint: u64, d: &mut [f64]) -> Result<()> {
        self.draws.fetch_add(1, Ordering::Relaxed);
        self.inner.sample_d(seed_hint, d)
    }
}

/// Splits `0..len` into at most `workers` contiguous chunks and runs `job`
/// on each in its own thread. Chunk `k` always covers the same indices for a
/// given worker count, and results are written into disjoint output slots.
pub(crate) fn par_chunks<F>(len: usize, workers: usize, job: F) -> Result<()>
where
    F: Fn(std::ops::Range<usize>) -> Result<()> + Sync,
{
    let workers = workers.max(1).min(len.max(1));
    if workers == 1 {
        return job(0..len);
    }
    let chunk = len.div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|k| {
                let start = (k * chunk).min(len);
                let end = ((k + 1) * chunk).min(len);
                let job = &job;
                s.spawn(move || job(start..end))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .collect::<Result<Vec<()>>>()
            .map(|_| ())
    })
}

/// Shared mutable buffer written at disjoint index ranges by the workers.
pub(crate) struct SlotWriter<'a> {
    ptr: *mut f64,
    len: usize,
    _marker: std::marker::PhantomData<&'a mut [f64]>,
}

unsafe impl Send for SlotWriter<'_> {}
unsafe impl Sync for SlotWriter<'_> {}

impl<'a> SlotWriter<'a> {
    pub(crate) fn new(buf: &'a mut [f64]) -> Self {
        Self {
            ptr: buf.as_mut_ptr(),
            len: buf.len(),
            _marker: std::marker::PhantomData,
        }
    }

    /// # Safety
    /// Concurrent callers must request non-overlapping ranges.
    #[allow(clippy::mut_from_ref)]
    pub(crate) unsafe fn slice(&self, start: usize, len: usize) -> &mut [f64] {
        assert!(start + len <= self.len);
        std::slice::from_raw_parts_mut(self.ptr.add(start), len)
    }
}

fn check_system(sys: &dyn BlackBox) -> Result<()> {
    check_dim(sys.state_dim(), sys.safe_set().dim())
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// `count` i.i.d. (state, disturbance) pairs with their successors.
/// Makes exactly `count` step calls.
pub fn draw_pair_samples(
    sys: &dyn BlackBox,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<PairSampleSet> {
    let groups = draw_groups(sys, count, 1, seed, workers)?;
    Ok(groups.into_pairs())
}

/// `count` states with `per_state` i.i.d. disturbances each.
/// Makes exactly `count * per_state` step calls.
pub fn draw_group_samples(
    sys: &dyn BlackBox,
    count: usize,
    per_state: usize,
    seed: u64,
    workers: usize,
) -> Result<GroupSampleSet> {
    draw_groups(sys, count, per_state, seed, workers)
}

fn draw_groups(
    sys: &dyn BlackBox,
    count: usize,
    per_state: usize,
    seed: u64,
    workers: usize,
) -> Result<GroupSampleSet> {
    if count == 0 || per_state == 0 {
        return Err(Error::EmptySamples);
    }
    check_system(sys)?;
    let n = sys.state_dim();
    let nd = sys.disturbance_dim();
    let set = sys.safe_set();
    let state_base = RngStream::for_purpose(seed, StreamPurpose::States);
    let dist_base = RngStream::for_purpose(seed, StreamPurpose::Disturbances);

    let mut states = vec![0.0; count * n];
    let mut disturbances = vec![0.0; count * per_state * nd];
    let mut next_states = vec![0.0; count * per_state * n];
    {
        let xs = SlotWriter::new(&mut states);
        let ds = SlotWriter::new(&mut disturbances);
        let ys = SlotWriter::new(&mut next_states);
        par_chunks(count, workers, |range| {
            for i in range {
                // SAFETY: index i is owned by exactly one worker.
                let (x, d, y) = unsafe {
                    (
                        xs.slice(i * n, n),
                        ds.slice(i * per_state * nd, per_state * nd),
                        ys.slice(i * per_state * n, per_state * n),
                    )
                };
                set.sample_into(&mut state_base.substream(i as u64), x)?;
                let mut drng = dist_base.substream(i as u64);
                for (dj, yj) in d.chunks_exact_mut(nd).zip(y.chunks_exact_mut(n)) {
                    sys.sample_d(drng.next_u64(), dj)?;
                    sys.step(x, dj, yj)?;
                    check_finite(yj, sys.name())?;
                }
            }
            Ok(())
        })?;
    }
    Ok(GroupSampleSet::from_parts(
        n,
        nd,
        per_state,
        seed,
        states,
        disturbances,
        next_states,
    ))
}

/// `count` anchor states drawn uniformly from `set` on the anchor stream.
pub fn draw_anchor_states(set: &SafeSet, count: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = RngStream::for_purpose(seed, StreamPurpose::Anchors);
    let n = set.dim();
    let mut out = vec![0.0; count * n];
    for x in out.chunks_exact_mut(n) {
        set.sample_into(&mut rng, x)?;
    }
    Ok(out)
}
