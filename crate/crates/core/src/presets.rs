//! Named parameter sets for the nine benchmarks, `table1/ex<k>-<method>`
//! with `k` in 1..=9 and method one of `rbc1`, `rbc2`, `sbc3`.

use crate::error::{Error, Result};
use crate::params::PacParams;
use crate::systems::BUILTIN_NAMES;

/// Per-coordinate stochastic template degree of each benchmark.
pub const SBC_KAPPA: [u32; 9] = [1, 1, 1, 1, 1, 10, 10, 2, 1];
pub const SBC_TAU: [f64; 9] = [0.01, 0.01, 0.01, 0.01, 0.01, 0.02, 0.02, 0.02, 0.02];
pub const SBC_COEFFICIENT_CAP: [f64; 9] = [1.1, 1.1, 1.1, 1.1, 1.1, 1.5, 1.5, 1.1, 1.1];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub system: &'static str,
    pub params: PacParams,
}

pub fn preset_names() -> Vec<String> {
    (1..=9)
        .flat_map(|k| ["rbc1", "rbc2", "sbc3"].map(|m| format!("table1/ex{k}-{m}")))
        .collect()
}

pub fn preset(name: &str) -> Result<Preset> {
    let unknown = || {
        Error::param(
            "preset",
            format!("unknown preset `{name}`; expected table1/ex<1-9>-<rbc1|rbc2|sbc3>"),
        )
    };
    let rest = name.trim().strip_prefix("table1/ex").ok_or_else(unknown)?;
    let (k, method) = rest.split_once('-').ok_or_else(unknown)?;
    let k: usize = k.parse().map_err(|_| unknown())?;
    if !(1..=9).contains(&k) {
        return Err(unknown());
    }
    let i = k - 1;
    let params = match method {
        "rbc1" => PacParams::rbc1(),
        "rbc2" => PacParams::rbc2(),
        "sbc3" => PacParams::sbc3(SBC_KAPPA[i], SBC_TAU[i], SBC_COEFFICIENT_CAP[i]),
        _ => return Err(unknown()),
    };
    Ok(Preset {
        name: format!("table1/ex{k}-{method}"),
        system: BUILTIN_NAMES[i],
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Method;

    #[test]
    fn all_presets_resolve_and_validate() {
        let names = preset_names();
        assert_eq!(names.len(), 27);
        for n in names {
            let p = preset(&n).unwrap();
            p.params.validate().unwrap();
        }
    }

    #[test]
    fn lotka_stochastic_preset() {
        let p = preset("table1/ex6-sbc3").unwrap();
        assert_eq!(p.system, "lotka");
        assert_eq!(p.params.method, Method::Sbc3);
        assert_eq!((p.params.kappa, p.params.tau, p.params.u_a), (10, 0.02, 1.5));
    }

    #[test]
    fn bad_names() {
        for n in ["table1/ex0-rbc1", "table1/ex10-rbc1", "table1/ex1-foo", "ex1-rbc1"] {
            assert!(preset(n).is_err(), "{n}");
        }
    }
}
