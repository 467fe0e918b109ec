//! Built-in benchmark systems.
//!
//! | name       | n | disturbance                         | safe set            |
//! |------------|---|-------------------------------------|---------------------|
//! | `vinc`     | 2 | truncated normal(0, 0.1) on ±0.7    | x² + y² ≤ 0.64      |
//! | `arch`     | 2 | uniform [−0.5, 0.5]²                | [−3, 3]²            |
//! | `stable3`  | 3 | uniform [1,2] × [1,2] × [2,3]       | [−1, 1]³            |
//! | `lin4`     | 4 | Beta(10, 10)                        | ‖x‖² ≤ 1            |
//! | `poly6`    | 6 | uniform [0.5, 1.0]                  | ‖x‖² ≤ 1            |
//! | `lotka`    | 2 | uniform [−1, 1]                     | x² + y² ≤ 1         |
//! | `pendulum` | 2 | uniform [0.9, 1.1]                  | [−1, 1]²            |
//! | `sank4`    | 4 | uniform [−1, 1]                     | ‖x‖² ≤ 1            |
//! | `lorenz7`  | 7 | uniform [−1, 1]⁷                    | [−1, 1]⁷            |

use crate::error::{check_dim, Error, Result};
use crate::rng::RngStream;
use crate::sets::SafeSet;

use super::distribution::{DisturbanceDistribution, Marginal};
use super::BlackBox;

pub const BUILTIN_NAMES: [&str; 9] = [
    "vinc", "arch", "stable3", "lin4", "poly6", "lotka", "pendulum", "sank4", "lorenz7",
];

type StepFn = fn(&[f64], &[f64], &mut [f64]);

#[derive(Debug, Clone)]
pub struct Builtin {
    name: &'static str,
    n: usize,
    dist: DisturbanceDistribution,
    set: SafeSet,
    f: StepFn,
}

impl Builtin {
    /// Example number of the benchmark, 1 through 9.
    pub fn example_number(&self) -> usize {
        BUILTIN_NAMES.iter().position(|n| *n == self.name).unwrap() + 1
    }

    pub fn distribution(&self) -> &DisturbanceDistribution {
        &self.dist
    }

    /// Applies the dynamics without dimension checks.
    pub fn step_raw(&self, x: &[f64], d: &[f64], next: &mut [f64]) {
        (self.f)(x, d, next)
    }
}

impl BlackBox for Builtin {
    fn name(&self) -> &str {
        self.name
    }

    fn state_dim(&self) -> usize {
        self.n
    }

    fn disturbance_dim(&self) -> usize {
        self.dist.dim()
    }

    fn safe_set(&self) -> &SafeSet {
        &self.set
    }

    fn step(&self, x: &[f64], d: &[f64], next: &mut [f64]) -> Result<()> {
        check_dim(self.n, x.len())?;
        check_dim(self.dist.dim(), d.len())?;
        check_dim(self.n, next.len())?;
        (self.f)(x, d, next);
        Ok(())
    }

    fn sample_d(&self, seed_hint: u64, d: &mut [f64]) -> Result<()> {
        let mut rng = RngStream::from_hint(seed_hint);
        self.dist.sample_into(&mut rng, d)
    }
}

fn vinc(x: &[f64], d: &[f64], o: &mut [f64]) {
    let (p, q) = (x[0], x[1]);
    o[0] = p + 0.01 * (q - p * (d[0] + 0.5));
    o[1] = q + 0.01 * (-(1.0 - p * p) * p - q);
}

fn arch(x: &[f64], d: &[f64], o: &mut [f64]) {
    let (p, q) = (x[0], x[1]);
    o[0] = p + 0.01 * (p - p.powi(3) + q - p * q * q + d[0]);
    o[1] = q + 0.01 * (-p + q - p * p * q - q.powi(3) + d[1]);
}

fn stable3(x: &[f64], d: &[f64], o: &mut [f64]) {
    let (p, q, r) = (x[0], x[1], x[2]);
    o[0] = p + 0.01 * (-p + q - r - p * d[0]);
    o[1] = q + 0.01 * (-p * (r + 1.0) - q - q * d[1]);
    o[2] = r + 0.01 * (0.76524 * p - 4.7037 * r - r * d[2]);
}

fn lin4(x: &[f64], d: &[f64], o: &mut [f64]) {
    o[0] = x[0] + 0.01 * (-x[0] + d[0]);
    o[1] = x[1] + 0.01 * (x[0] - 2.0 * x[1]);
    o[2] = x[2] + 0.01 * (x[0] - 4.0 * x[2]);
    o[3] = x[3] + 0.01 * (x[0] - 3.0 * x[3]);
}

fn poly6(x: &[f64], d: &[f64], o: &mut [f64]) {
    const TS: f64 = 0.01;
    let [x1, x2, x3, x4, x5, x6] = [x[0], x[1], x[2], x[3], x[4], x[5]];
    o[0] = x1 + TS * (x2 * x4 - x1.powi(3));
    o[1] = x2 + TS * (-3.0 * x1 * x4 - x2.powi(3));
    o[2] = x3 + TS * (-x3 - 3.0 * x1 * x4.powi(3));
    o[3] = x4 + TS * (-x4 + x1 * x3);
    o[4] = x5 + TS * (-x5 + x6.powi(3));
    o[5] = x6 + TS * (-x5 - x6 + x3.powi(4) - x6 * d[0]);
}

fn lotka(x: &[f64], d: &[f64], o: &mut [f64]) {
    const R: f64 = 0.5;
    const A: f64 = 1.0;
    const C: f64 = 1.0;
    let s = -0.5 + d[0];
    let (p, q) = (x[0], x[1]);
    o[0] = R * p - A * q * p;
    o[1] = s * q + A * C * q * p;
}

fn pendulum(x: &[f64], d: &[f64], o: &mut [f64]) {
    let (p, q) = (x[0], x[1]);
    o[0] = p + 0.1 * q;
    o[1] = q + 0.1 * (-2.0 * q / d[0] + 0.81 * p.sin() * p.cos() - p.sin());
}

fn sank4(x: &[f64], d: &[f64], o: &mut [f64]) {
    const TS: f64 = 0.01;
    let [x1, x2, x3, x4] = [x[0], x[1], x[2], x[3]];
    o[0] = x1 + TS * (-x1 + x2.powi(3) - 3.0 * x3 * x4 + d[0]);
    o[1] = x2 + TS * (-x1 - x2.powi(3));
    o[2] = x3 + TS * (x1 * x4 - x3);
    o[3] = x4 + TS * (x1 * x3 - x4.powi(3));
}

/// Cyclic indexing: x_0 = x_7, x_{-1} = x_6, x_8 = x_1.
fn lorenz7(x: &[f64], d: &[f64], o: &mut [f64]) {
    const TS: f64 = 0.01;
    const K: usize = 7;
    for i in 0..K {
        let next = x[(i + 1) % K];
        let back2 = x[(i + K - 2) % K];
        let back1 = x[(i + K - 1) % K];
        o[i] = x[i] + TS * ((next - back2) * back1 - x[i] + d[i]);
    }
}

fn uniform(lo: f64, hi: f64) -> Marginal {
    Marginal::Uniform { lo, hi }
}

fn ball(n: usize) -> Result<SafeSet> {
    SafeSet::ball(vec![0.0; n], 1.0)
}

/// Looks up a benchmark by name.
pub fn builtin(name: &str) -> Result<Builtin> {
    let name = BUILTIN_NAMES
        .iter()
        .copied()
        .find(|n| n.eq_ignore_ascii_case(name.trim()))
        .ok_or_else(|| Error::UnknownSystem(name.to_string()))?;
    let (n, marginals, set, f): (usize, Vec<Marginal>, SafeSet, StepFn) = match name {
        "vinc" => (
            2,
            vec![Marginal::TruncatedNormal {
                mean: 0.0,
                sd: 0.1,
                lo: -0.7,
                hi: 0.7,
            }],
            SafeSet::ball(vec![0.0, 0.0], 0.64)?,
            vinc,
        ),
        "arch" => (2, vec![uniform(-0.5, 0.5); 2], SafeSet::cube(2, -3.0, 3.0)?, arch),
        "stable3" => (
            3,
            vec![uniform(1.0, 2.0), uniform(1.0, 2.0), uniform(2.0, 3.0)],
            SafeSet::cube(3, -1.0, 1.0)?,
            stable3,
        ),
        "lin4" => (4, vec![Marginal::Beta { a: 10.0, b: 10.0 }], ball(4)?, lin4),
        "poly6" => (6, vec![uniform(0.5, 1.0)], ball(6)?, poly6),
        "lotka" => (2, vec![uniform(-1.0, 1.0)], ball(2)?, lotka),
        "pendulum" => (2, vec![uniform(0.9, 1.1)], SafeSet::cube(2, -1.0, 1.0)?, pendulum),
        "sank4" => (4, vec![uniform(-1.0, 1.0)], ball(4)?, sank4),
        "lorenz7" => (7, vec![uniform(-1.0, 1.0); 7], SafeSet::cube(7, -1.0, 1.0)?, lorenz7),
        _ => unreachable!(),
    };
    Ok(Builtin {
        name,
        n,
        dist: DisturbanceDistribution::new(marginals)?,
        set,
        f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{SafeSetSpec, Shape};

    fn step(name: &str, x: &[f64], d: &[f64]) -> Vec<f64> {
        let sys = builtin(name).unwrap();
        let mut out = vec![0.0; sys.state_dim()];
        sys.step(x, d, &mut out).unwrap();
        out
    }

    #[test]
    fn vinc_origin_is_fixed() {
        assert_eq!(step("vinc", &[0.0, 0.0], &[0.0]), vec![0.0, 0.0]);
        assert_eq!(step("vinc", &[0.0, 0.0], &[0.6]), vec![0.0, 0.0]);
    }

    #[test]
    fn lotka_hand_evaluation() {
        // s = -0.5 at d = 0
        let next = step("lotka", &[-0.8, -0.5], &[0.0]);
        assert!((next[0] + 0.8).abs() < 1e-15);
        assert!((next[1] - 0.65).abs() < 1e-15);
        // the x-update does not depend on the disturbance
        for d in [-1.0, -0.3, 0.9] {
            assert!((step("lotka", &[-0.8, -0.5], &[d])[0] + 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn lorenz_uses_cyclic_neighbours() {
        let x = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];
        let d = [0.0; 7];
        let next = step("lorenz7", &x, &d);
        // i = 1: (x_2 - x_{-1}) x_0 - x_1 with x_{-1} = x_6, x_0 = x_7
        let expect = 0.1 + 0.01 * ((0.2 - 0.6) * 0.7 - 0.1);
        assert!((next[0] - expect).abs() < 1e-15);
        // i = 7: (x_8 - x_5) x_6 - x_7 with x_8 = x_1
        let expect = 0.7 + 0.01 * ((0.1 - 0.5) * 0.6 - 0.7);
        assert!((next[6] - expect).abs() < 1e-15);
    }

    #[test]
    fn registry_metadata() {
        let lotka = builtin("lotka").unwrap();
        assert_eq!(lotka.state_dim(), 2);
        assert_eq!(
            lotka.safe_set().to_spec(),
            Some(SafeSetSpec::Ball {
                center: vec![0.0, 0.0],
                radius_squared: 1.0
            })
        );
        assert_eq!(
            lotka.distribution().marginals(),
            &[Marginal::Uniform { lo: -1.0, hi: 1.0 }]
        );
        let lorenz = builtin("lorenz7").unwrap();
        assert_eq!((lorenz.state_dim(), lorenz.disturbance_dim()), (7, 7));
        match builtin("vinc").unwrap().safe_set().shape() {
            Shape::Ball { radius_squared, .. } => assert_eq!(*radius_squared, 0.64),
            _ => panic!("vinc safe set should be a ball"),
        }
        for (i, name) in BUILTIN_NAMES.iter().enumerate() {
            assert_eq!(builtin(name).unwrap().example_number(), i + 1);
        }
        assert!(matches!(builtin("duffing"), Err(Error::UnknownSystem(_))));
    }

    #[test]
    fn step_checks_dimensions() {
        let sys = builtin("arch").unwrap();
        let mut out = [0.0; 2];
        assert!(sys.step(&[0.0, 0.0], &[0.0], &mut out).is_err());
    }

    #[test]
    fn sample_d_is_a_function_of_the_hint() {
        let sys = builtin("vinc").unwrap();
        let (mut a, mut b) = ([0.0], [0.0]);
        sys.sample_d(42, &mut a).unwrap();
        sys.sample_d(42, &mut b).unwrap();
        assert_eq!(a, b);
        sys.sample_d(43, &mut b).unwrap();
        assert_ne!(a, b);
    }
}
