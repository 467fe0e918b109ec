//! PAC one-step safety certification for black-box stochastic systems.
//!
//! Given a simulator `x⁺ = f(x, d)` and a safe set `X`, the crate plans
//! sample sizes, draws state/disturbance samples, solves scenario linear
//! programs over polynomial barrier templates, and emits certificates:
//!
//! * robust, one disturbance per state ([`params::Method::Rbc1Scenario`],
//!   [`params::Method::Rbc1Vc`]),
//! * robust, many disturbances per state ([`params::Method::Rbc2`]),
//! * stochastic with a state-wise probability bound
//!   ([`params::Method::Sbc3`]).
//!
//! ```no_run
//! use pacsafe::{certify, params::PacParams, systems::builtin};
//!
//! let sys = builtin("vinc")?;
//! let out = certify::certify(&sys, &PacParams::rbc1(), 0, &Default::default())?;
//! println!("{}", out.certificate.to_json()?);
//! # Ok::<(), pacsafe::Error>(())
//! ```

pub mod basis;
pub mod certify;
pub mod error;
pub mod lp;
pub mod params;
pub mod planner;
pub mod presets;
pub mod rng;
pub mod samples;
pub mod sets;
pub mod systems;
pub mod validate;

pub use error::{Error, Result};
