//! Checks shared by the integration suites and the acceptance runner.
//! Each returns `Err` with a short diagnosis on failure.

#![allow(dead_code)]

use pacsafe::basis::{BarrierTemplate, BasisKind, MultiIndexBasis};
use pacsafe::certify::{certify, CertifyOptions};
use pacsafe::lp::{build_rbc_lp, build_sbc_lp, solve, DenseRows, LpModel, LpStatus, RowOrigin};
use pacsafe::params::PacParams;
use pacsafe::planner::plan;
use pacsafe::presets::{SBC_COEFFICIENT_CAP, SBC_KAPPA, SBC_TAU};
use pacsafe::systems::{builtin, draw_anchor_states, draw_group_samples, BlackBox, CountingSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn opts() -> CertifyOptions {
    CertifyOptions {
        workers: 1,
        ..Default::default()
    }
}

/// Random box in `n` dimensions with widths in [0.5, 3].
fn random_box(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let lo: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let hi = lo.iter().map(|l| l + rng.random_range(0.5..3.0)).collect();
    (lo, hi)
}

pub fn bernstein_partition_of_unity(draws: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let n = rng.random_range(1..=3);
        let kappa = rng.random_range(1..=6);
        let (lo, hi) = random_box(&mut rng, n);
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..=*h)).collect();
        let b = MultiIndexBasis::new(BasisKind::Bernstein, kappa, lo, hi).map_err(|e| e.to_string())?;
        let s: f64 = b.features(&x).map_err(|e| e.to_string())?.iter().sum();
        worst = worst.max((s - 1.0).abs());
    }
    if worst <= 1e-12 {
        Ok(format!("{draws} draws, max |sum-1| = {worst:.1e}"))
    } else {
        Err(format!("max |sum-1| = {worst:.3e} > 1e-12"))
    }
}

pub fn handelman_nonnegative(draws: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    for _ in 0..draws {
        let n = rng.random_range(1..=3);
        let kappa = rng.random_range(1..=4);
        let (lo, hi) = random_box(&mut rng, n);
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..=*h)).collect();
        let b = MultiIndexBasis::new(BasisKind::Handelman, kappa, lo, hi).map_err(|e| e.to_string())?;
        let phi = b.features(&x).map_err(|e| e.to_string())?;
        let u_a = rng.random_range(0.0..10.0);
        let h: f64 = phi.iter().map(|p| p * rng.random_range(0.0..=u_a)).sum();
        min = min.min(h);
    }
    if min >= 0.0 {
        Ok(format!("{draws} draws, min h = {min:.3e}"))
    } else {
        Err(format!("h = {min:.3e} < 0"))
    }
}

/// Small LP `min c·z, G z ≤ h, lo ≤ z ≤ hi` with dense data kept for the
/// oracle.
pub struct SmallLp {
    pub c: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub h: Vec<f64>,
}

impl SmallLp {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(1..=4);
        let rows = rng.random_range(0..=12);
        let c = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lo: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..0.0)).collect();
        let hi = lo.iter().map(|l| l + rng.random_range(0.5..5.0)).collect();
        let g = (0..rows)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let h = (0..rows).map(|_| rng.random_range(-1.0..2.0)).collect();
        Self { c, lo, hi, g, h }
    }

    pub fn model(&self) -> LpModel {
        let mut rows = DenseRows::new(self.c.len());
        for (k, (g, h)) in self.g.iter().zip(&self.h).enumerate() {
            rows.push(g, *h, RowOrigin { state: k, draw: None });
        }
        LpModel::new(self.c.clone(), self.lo.clone(), self.hi.clone(), Box::new(rows))
    }

    /// All constraints as `(a, b)` with `a·z ≤ b`, bounds included.
    fn halfspaces(&self) -> Vec<(Vec<f64>, f64)> {
        let n = self.c.len();
        let mut out: Vec<(Vec<f64>, f64)> = self.g.iter().cloned().zip(self.h.iter().copied()).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            out.push((e.clone(), self.hi[j]));
            e[j] = -1.0;
            out.push((e, -self.lo[j]));
        }
        out
    }

    /// Lexicographically smallest optimal vertex by brute-force enumeration
    /// of every `n`-subset of constraints, or `None` when infeasible.
    pub fn vertex_oracle(&self) -> Option<(f64, Vec<f64>)> {
        let n = self.c.len();
        let hs = self.halfspaces();
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| hs[i].0.clone()).collect();
            let b: Vec<f64> = idx.iter().map(|&i| hs[i].1).collect();
            if let Some(z) = gauss_solve(a, b) {
                if hs.iter().all(|(a, b)| dot(a, &z) <= b + 1e-9) {
                    vertices.push(z);
                }
            }
            if !next_combination(&mut idx, hs.len()) {
                break;
            }
        }
        let best = vertices.iter().map(|z| dot(&self.c, z)).fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            return None;
        }
        let mut optimal: Vec<Vec<f64>> = vertices
            .into_iter()
            .filter(|z| dot(&self.c, z) <= best + 1e-9)
            .collect();
        optimal.sort_by(|p, q| {
            p.iter()
                .zip(q)
                .map(|(a, b)| if (a - b).abs() <= 1e-9 { std::cmp::Ordering::Equal } else { a.total_cmp(b) })
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Some((best, optimal.swap_remove(0)))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn next_combination(idx: &mut [usize], total: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < total - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` for (near-)singular
/// systems.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut z = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * z[k]).sum();
        z[r] = (b[r] - s) / a[r][r];
    }
    Some(z)
}

pub fn lp_matches_vertex_oracle(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut feasible = 0;
    let mut worst: f64 = 0.0;
    for t in 0..count {
        let lp = SmallLp::random(&mut rng);
        let oracle = lp.vertex_oracle();
        let sol = solve(&lp.model());
        match (oracle, sol) {
            (None, Ok(s)) if s.status == LpStatus::Infeasible => {}
            (None, Err(pacsafe::lp::SolverError::Infeasible)) => {}
            (Some((best, z)), Ok(s)) if s.status == LpStatus::Optimal => {
                feasible += 1;
                let dz = z.iter().zip(&s.z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let dobj = (best - s.objective).abs();
                worst = worst.max(dz).max(dobj);
                if dobj > 1e-7 || dz > 1e-7 {
                    return Err(format!(
                        "lp {t}: oracle {best} at {z:?}, solver {} at {:?}",
                        s.objective, s.z
                    ));
                }
            }
            (o, s) => return Err(format!("lp {t}: oracle {o:?}, solver {s:?}")),
        }
    }
    Ok(format!("{count} programs ({feasible} feasible), max deviation {worst:.1e}"))
}

/// The points `(a = 0, ξ = −C)` and `(a = U_a·1, λ = τ)` satisfy the robust
/// and stochastic programs built from real samples.
pub fn anchor_points_feasible(seed: u64) -> Check {
    let mut report = Vec::new();
    for name in ["vinc", "lotka"] {
        let sys = builtin(name).map_err(|e| e.to_string())?;
        let set = sys.safe_set().clone();

        let rp = PacParams::rbc1();
        let t = BarrierTemplate::rbc(&set, rp.kappa, rp.c, rp.u_a).map_err(|e| e.to_string())?;
        let s = draw_group_samples(&sys, 2000, 3, seed, 1).map_err(|e| e.to_string())?;
        let model = build_rbc_lp(&s, &t, rp.gamma, rp.xi_bar, 1).map_err(|e| e.to_string())?;
        let mut z = vec![0.0; model.num_vars()];
        z[t.num_terms()] = -rp.c;
        let v = model.max_violation(&z);
        if v > 1e-12 {
            return Err(format!("{name} robust program violated by {v:.3e}"));
        }

        let k = if name == "vinc" { 0 } else { 5 };
        let sp = PacParams::sbc3(SBC_KAPPA[k], SBC_TAU[k], SBC_COEFFICIENT_CAP[k]);
        let t = BarrierTemplate::sbc(&set, sp.kappa, sp.u_a).map_err(|e| e.to_string())?;
        let s = draw_group_samples(&sys, 500, 40, seed, 1).map_err(|e| e.to_string())?;
        let anchors = draw_anchor_states(&set, 100, seed).map_err(|e| e.to_string())?;
        let model = build_sbc_lp(&s, &t, sp.tau, &anchors, 1).map_err(|e| e.to_string())?;
        let mut z = vec![sp.u_a; model.num_vars()];
        z[t.num_terms()] = sp.tau;
        let v = model.max_violation(&z);
        if v > 1e-12 {
            return Err(format!("{name} stochastic program violated by {v:.3e}"));
        }
        report.push(name);
    }
    Ok(format!("robust and stochastic programs on {}", report.join(", ")))
}

/// Step and sampling calls equal `N` (one-to-one) or `N·M` (one-to-many).
pub fn query_budgets(seed: u64) -> Check {
    let cases = [
        ("vinc", PacParams::rbc1()),
        ("vinc", PacParams::rbc2()),
        ("vinc", PacParams::sbc3(SBC_KAPPA[0], SBC_TAU[0], SBC_COEFFICIENT_CAP[0])),
        ("lotka", PacParams::rbc2()),
    ];
    let mut lines = Vec::new();
    for (name, params) in cases {
        let sys = CountingSystem::new(builtin(name).map_err(|e| e.to_string())?);
        let expected = plan(&params, sys.state_dim()).map_err(|e| e.to_string())?.num_transitions();
        let out = certify(&sys, &params, seed, &opts()).map_err(|e| e.to_string())?;
        let (steps, draws) = (sys.step_calls(), sys.sample_calls());
        if steps != expected || draws != expected || out.certificate.queries.step_calls != expected {
            return Err(format!(
                "{name}/{}: expected {expected}, got {steps} steps and {draws} draws",
                params.method
            ));
        }
        lines.push(format!("{name}/{}={expected}", params.method));
    }
    Ok(lines.join(" "))
}

/// Same (system, params, seed) gives byte-identical certificates, whatever
/// the worker count.
pub fn deterministic_runs(seed: u64) -> Check {
    let cases = [
        ("vinc", PacParams::rbc1()),
        ("lotka", PacParams::rbc2()),
        ("arch", PacParams::sbc3(SBC_KAPPA[1], SBC_TAU[1], SBC_COEFFICIENT_CAP[1])),
        ("lotka", PacParams::sbc3(4, 0.02, 1.5)),
    ];
    for (name, params) in &cases {
        let sys = builtin(name).map_err(|e| e.to_string())?;
        let run = |workers| {
            let o = CertifyOptions { workers, ..Default::default() };
            certify(&sys, params, seed, &o)
                .and_then(|out| out.certificate.to_json())
                .map_err(|e| e.to_string())
        };
        let (a, b, c) = (run(1)?, run(1)?, run(3)?);
        if a != b || a != c {
            return Err(format!("{name}/{} differs between runs", params.method));
        }
    }
    Ok(format!("{} configurations byte-identical across reruns and worker counts", cases.len()))
}

/// Printed sample sizes per benchmark, Ex. 1 to Ex. 9.
pub const RBC1_N: [u64; 9] = [15053, 15053, 18253, 24653, 63053, 15053, 15053, 24653, 114253];
pub const RBC2_N: [u64; 9] = [3764, 3764, 4564, 6164, 15764, 3764, 3764, 6164, 28564];
pub const RBC2_M: u64 = 45;
pub const SBC_NM: [(u64, u64); 9] = [
    (3764, 1357),
    (3764, 1357),
    (4564, 1357),
    (6164, 1357),
    (15764, 1357),
    (27164, 631),
    (27164, 631),
    (19164, 340),
    (28564, 340),
];

/// Planner output for every preset against the printed sample sizes.
pub fn planner_table() -> Check {
    let start = std::time::Instant::now();
    for k in 0..9 {
        let sys = builtin(pacsafe::systems::BUILTIN_NAMES[k]).map_err(|e| e.to_string())?;
        let n = sys.state_dim();
        let got = |p: PacParams| plan(&p, n).map(|p| (p.n_states, p.per_state)).map_err(|e| e.to_string());
        let sbc = PacParams::sbc3(SBC_KAPPA[k], SBC_TAU[k], SBC_COEFFICIENT_CAP[k]);
        let cells = [
            ("rbc1", got(PacParams::rbc1())?, (RBC1_N[k], 1)),
            ("rbc2", got(PacParams::rbc2())?, (RBC2_N[k], RBC2_M)),
            ("sbc3", got(sbc)?, SBC_NM[k]),
        ];
        for (m, g, want) in cells {
            if g != want {
                return Err(format!("ex{}-{m}: planned {g:?}, printed {want:?}", k + 1));
            }
        }
    }
    let t = start.elapsed();
    if t.as_secs_f64() >= 1.0 {
        return Err(format!("planning took {t:?}"));
    }
    Ok(format!("27 cells exact in {t:?}"))
}
