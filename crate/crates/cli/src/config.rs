//! Run configuration from a TOML file, a named preset and command-line
//! flags, in increasing order of precedence.
//!
//! ```toml
//! [system]
//! name = "lotka"              # built-in benchmark, or
//! plugin = "python3 sim.py"   # external simulator command line
//! timeout_ms = 5000           # per plugin request
//!
//! [method]
//! preset = "table1/ex6-sbc3"  # optional starting point
//! name = "sbc3"               # rbc1 | rbc1_vc | rbc2 | sbc3
//! seed = 0
//! workers = 4
//!
//! [params]                    # any certification parameter, e.g.
//! alpha1 = 0.01
//! kappa = 10
//!
//! [output]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};
use std::time::Duration;

use pacsafe::params::{Method, PacParams};
use pacsafe::presets::{preset, SBC_COEFFICIENT_CAP, SBC_KAPPA, SBC_TAU};
use pacsafe::systems::plugin::{PluginSystem, DEFAULT_TIMEOUT};
use pacsafe::systems::{builtin, BlackBox, BUILTIN_NAMES};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub method: MethodSection,
    #[serde(default)]
    pub params: toml::Table,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub name: Option<String>,
    pub plugin: Option<String>,
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    pub preset: Option<String>,
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

/// Flags that override the configuration file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub plugin: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemChoice {
    Builtin(String),
    Plugin { command: String, timeout: Duration },
}

impl SystemChoice {
    pub fn open(&self) -> Result<Box<dyn BlackBox>> {
        Ok(match self {
            SystemChoice::Builtin(name) => Box::new(builtin(name)?),
            SystemChoice::Plugin { command, timeout } => Box::new(PluginSystem::spawn(command, *timeout, None)?),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SystemChoice,
    pub params: PacParams,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Plugin selected by flag or configuration, if any.
pub fn plugin_choice(file: &ConfigFile, flag: Option<&str>) -> Result<Option<SystemChoice>> {
    let timeout = file.system.timeout_ms.map_or(DEFAULT_TIMEOUT, Duration::from_millis);
    if timeout.is_zero() {
        return Err(CliError::config("system.timeout_ms must be positive"));
    }
    Ok(flag
        .or(file.system.plugin.as_deref())
        .map(|command| SystemChoice::Plugin {
            command: command.to_string(),
            timeout,
        }))
}

/// Default parameters of `method` for a system, using the per-benchmark
/// stochastic template settings when the system is a built-in.
fn method_defaults(method: Method, system: &SystemChoice) -> PacParams {
    match method {
        Method::Rbc1Scenario => PacParams::rbc1(),
        Method::Rbc1Vc => PacParams::rbc1_vc(None),
        Method::Rbc2 => PacParams::rbc2(),
        Method::Sbc3 => {
            let k = match system {
                SystemChoice::Builtin(name) => BUILTIN_NAMES.iter().position(|b| b.eq_ignore_ascii_case(name)),
                SystemChoice::Plugin { .. } => None,
            };
            match k {
                Some(k) => PacParams::sbc3(SBC_KAPPA[k], SBC_TAU[k], SBC_COEFFICIENT_CAP[k]),
                None => PacParams::sbc3(1, 0.01, 1.1),
            }
        }
    }
}

/// Applies `[params]` entries on top of `base`, rejecting unknown keys.
fn apply_params(base: PacParams, table: &toml::Table) -> Result<PacParams> {
    let mut value = serde_json::to_value(&base).map_err(|e| CliError::config(e.to_string()))?;
    let obj = value.as_object_mut().expect("parameters serialize to an object");
    for (key, v) in table {
        if key == "method" {
            return Err(CliError::config("params.method: set the method in [method] name"));
        }
        if !obj.contains_key(key) {
            let known: Vec<&str> = obj.keys().filter(|k| *k != "method").map(String::as_str).collect();
            return Err(CliError::config(format!(
                "params.{key}: unknown parameter (known: {})",
                known.join(", ")
            )));
        }
        let json = serde_json::to_value(v).map_err(|e| CliError::config(format!("params.{key}: {e}")))?;
        obj.insert(key.clone(), json);
    }
    serde_json::from_value(value).map_err(|e| CliError::config(format!("params: {e}")))
}

pub fn resolve(file: &ConfigFile, flags: &Overrides) -> Result<RunConfig> {
    let preset_name = flags.preset.as_deref().or(file.method.preset.as_deref());
    let preset = preset_name.map(preset).transpose()?;

    if file.system.name.is_some() && file.system.plugin.is_some() {
        return Err(CliError::config("system: give either `name` or `plugin`, not both"));
    }
    let system = match plugin_choice(file, flags.plugin.as_deref())? {
        Some(p) => p,
        None => match (&file.system.name, &preset) {
            (Some(name), _) => SystemChoice::Builtin(name.clone()),
            (None, Some(p)) => SystemChoice::Builtin(p.system.to_string()),
            (None, None) => {
                return Err(CliError::config(
                    "no system: set [system] name or plugin, --plugin, or --preset",
                ))
            }
        },
    };

    let method = file
        .method
        .name
        .as_deref()
        .map(|s| Method::parse(s).ok_or_else(|| CliError::config(format!("method.name: unknown method `{s}`"))))
        .transpose()?;
    let base = match (&preset, method) {
        (Some(p), None) => p.params.clone(),
        (Some(p), Some(m)) if m == p.params.method => p.params.clone(),
        (Some(p), Some(m)) => {
            return Err(CliError::config(format!(
                "method.name `{m}` contradicts preset `{}` ({})",
                p.name, p.params.method
            )))
        }
        (None, Some(m)) => method_defaults(m, &system),
        (None, None) => return Err(CliError::config("no method: set [method] name or a preset")),
    };
    let params = apply_params(base, &file.params)?;
    params.validate()?;

    let workers = flags.workers.or(file.method.workers).unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::config("workers must be at least 1"));
    }
    Ok(RunConfig {
        system,
        params,
        seed: flags.seed.or(file.method.seed).unwrap_or(0),
        workers,
        out_dir: flags
            .out
            .clone()
            .or_else(|| file.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> ConfigFile {
        toml::from_str(s).unwrap()
    }

    #[test]
    fn preset_only() {
        let flags = Overrides {
            preset: Some("table1/ex6-sbc3".into()),
            ..Default::default()
        };
        let rc = resolve(&ConfigFile::default(), &flags).unwrap();
        assert_eq!(rc.system, SystemChoice::Builtin("lotka".into()));
        assert_eq!(rc.params.kappa, 10);
        assert_eq!(rc.seed, 0);
    }

    #[test]
    fn file_with_overrides() {
        let file = parse(
            r#"
            [system]
            name = "vinc"
            [method]
            name = "rbc2"
            seed = 7
            [params]
            alpha2 = 0.1
            [output]
            dir = "certs"
            "#,
        );
        let rc = resolve(&file, &Overrides { seed: Some(9), ..Default::default() }).unwrap();
        assert_eq!(rc.params.method, Method::Rbc2);
        assert_eq!(rc.params.alpha2, 0.1);
        assert_eq!(rc.seed, 9);
        assert_eq!(rc.out_dir, PathBuf::from("certs"));
    }

    #[test]
    fn stochastic_defaults_follow_the_benchmark() {
        let file = parse("[system]\nname = \"sank4\"\n[method]\nname = \"sbc3\"\n");
        let rc = resolve(&file, &Overrides::default()).unwrap();
        assert_eq!((rc.params.kappa, rc.params.tau, rc.params.u_a), (2, 0.02, 1.1));
    }

    #[test]
    fn field_level_errors() {
        let unknown = parse("[system]\nname = \"vinc\"\n[method]\nname = \"rbc1\"\n[params]\nalpha = 0.1\n");
        let err = resolve(&unknown, &Overrides::default()).unwrap_err().to_string();
        assert!(err.contains("params.alpha"), "{err}");

        let typed = parse("[system]\nname = \"vinc\"\n[method]\nname = \"rbc1\"\n[params]\nkappa = \"two\"\n");
        assert!(resolve(&typed, &Overrides::default()).is_err());

        let bad = parse("[system]\nname = \"vinc\"\n[method]\nname = \"rbc2\"\n[params]\nalpha1 = 0.5\n");
        let err = resolve(&bad, &Overrides::default()).unwrap_err().to_string();
        assert!(err.contains("alpha1 < l * delta2"), "{err}");

        assert!(toml::from_str::<ConfigFile>("[sytem]\nname = \"vinc\"\n").is_err());
    }

    #[test]
    fn conflicting_choices() {
        let both = parse("[system]\nname = \"vinc\"\nplugin = \"x\"\n[method]\nname = \"rbc1\"\n");
        assert!(resolve(&both, &Overrides::default()).is_err());
        let clash = parse("[method]\npreset = \"table1/ex1-rbc1\"\nname = \"sbc3\"\n");
        assert!(resolve(&clash, &Overrides::default()).is_err());
        assert!(resolve(&ConfigFile::default(), &Overrides::default()).is_err());
    }
}
