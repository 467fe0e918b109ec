use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use pacsafe::certify::{certify, BoundEvaluator, Certificate, CertifyOptions, Verdict};
use pacsafe::planner::plan;
use pacsafe::systems::{builtin, plugin::serve, BlackBox};
use pacsafe::validate::{bound_dominance, contour_grid, mc_state_sweep, parse_slice, write_grid_csv};
use serde::Serialize;

use crate::config::{default_workers, plugin_choice, ConfigFile, RunConfig, SystemChoice};
use crate::error::{CliError, Result};

/// Outcome of a certification run, mapped to exit status 0 or 3.
pub enum CertifyStatus {
    Accepted,
    Rejected,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })?;
    info!("wrote {}", path.display());
    Ok(())
}

fn file_stem_part(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn plan_cmd(rc: &RunConfig) -> Result<()> {
    let sys = rc.system.open()?;
    let p = plan(&rc.params, sys.state_dim())?;
    println!("system    {} (n = {})", sys.name(), p.state_dim);
    println!("method    {}", p.method);
    println!("N         {}", p.n_states);
    if rc.params.method.is_one_to_many() {
        println!("M         {}", p.per_state);
    }
    println!("terms     {} (kappa = {})", p.num_terms, p.kappa);
    println!("variables {}", p.decision_dim);
    if let Some(vc) = p.vc_dim {
        println!("vc dim    {vc}");
    }
    println!("guarantee {}", p.guarantee.sentence());
    println!("{}", serde_json::to_string_pretty(&p).map_err(pacsafe::Error::from)?);
    Ok(())
}

pub fn certify_cmd(rc: &RunConfig) -> Result<CertifyStatus> {
    let sys = rc.system.open()?;
    let opts = CertifyOptions {
        workers: rc.workers,
        ..Default::default()
    };
    let start = Instant::now();
    let out = certify(&*sys, &rc.params, rc.seed, &opts)?;
    let wall = start.elapsed();
    let c = &out.certificate;
    let path = rc.out_dir.join(format!(
        "certificate-{}-{}-seed{}.json",
        file_stem_part(&c.system),
        c.method,
        c.seed
    ));
    write_file(&path, c.to_json()?.as_bytes())?;

    let size = if c.method.is_one_to_many() {
        format!("(N,M)=({},{})", c.plan.n_states, c.plan.per_state)
    } else {
        format!("N={}", c.plan.n_states)
    };
    let value = match (c.xi_star, c.lambda_star, c.j_star) {
        (Some(xi), _, _) => format!("xi*={xi:.3e}"),
        (None, Some(l), Some(j)) => format!("J*={j:.4} lambda*={l:.4}"),
        _ => String::new(),
    };
    let mark = match (c.verdict, c.vacuous) {
        (Verdict::Rejected, _) => "✗ rejected",
        (Verdict::Accepted, Some(true)) => "✓ accepted (vacuous bound)",
        (Verdict::Accepted, _) => "✓ accepted",
    };
    println!(
        "{} {} seed={} {size} {value} {mark} {:.1}s",
        c.method,
        c.system,
        c.seed,
        wall.as_secs_f64()
    );
    if c.verdict == Verdict::Accepted {
        println!("guarantee: {}", c.guarantee.statement);
    }
    println!("certificate: {}", path.display());
    Ok(match c.verdict {
        Verdict::Accepted => CertifyStatus::Accepted,
        Verdict::Rejected => CertifyStatus::Rejected,
    })
}

fn read_certificate(path: &Path) -> Result<Certificate> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Certificate::from_json(&text)?)
}

#[derive(Debug, Serialize)]
struct CheckRecord {
    name: &'static str,
    /// `None` when the certificate makes no claim the check could refute.
    pass: Option<bool>,
    detail: String,
}

#[derive(Debug, Serialize)]
struct ValidationReport {
    certificate: PathBuf,
    method: String,
    system: String,
    seed: u64,
    checks: Vec<CheckRecord>,
    sweep: Option<pacsafe::validate::SweepReport>,
    dominance: Option<pacsafe::validate::DominanceReport>,
    pass: bool,
}

pub struct ValidateArgs<'a> {
    pub certificate: &'a Path,
    pub config: Option<&'a Path>,
    pub plugin: Option<&'a str>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<&'a Path>,
    pub states: Option<usize>,
    pub mc: Option<usize>,
}

fn open_for(cert: &Certificate, file: &ConfigFile, plugin: Option<&str>) -> Result<Box<dyn BlackBox>> {
    let choice = match plugin_choice(file, plugin)? {
        Some(p) => p,
        None => {
            let name = file.system.name.clone().unwrap_or_else(|| cert.system.clone());
            if builtin(&name).is_err() {
                return Err(CliError::config(format!(
                    "`{name}` is not a built-in system; pass --plugin with its simulator"
                )));
            }
            SystemChoice::Builtin(name)
        }
    };
    choice.open()
}

pub fn validate_cmd(args: &ValidateArgs) -> Result<()> {
    let file = ConfigFile::load_opt(args.config)?;
    let cert = read_certificate(args.certificate)?;
    let workers = args.workers.or(file.method.workers).unwrap_or_else(default_workers);
    let out_dir = args
        .out
        .map(Path::to_path_buf)
        .or_else(|| file.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let stem = args
        .certificate
        .file_stem()
        .map_or_else(|| "certificate".into(), |s| s.to_string_lossy().into_owned());

    let mut report = ValidationReport {
        certificate: args.certificate.to_path_buf(),
        method: cert.method.to_string(),
        system: cert.system.clone(),
        seed: args.seed,
        checks: Vec::new(),
        sweep: None,
        dominance: None,
        pass: false,
    };
    let integrity = cert.check_integrity();
    report.checks.push(CheckRecord {
        name: "integrity",
        pass: Some(integrity.is_ok()),
        detail: match &integrity {
            Ok(()) => "plan, query counts and coefficients consistent with parameters".into(),
            Err(e) => e.to_string(),
        },
    });

    if integrity.is_ok() {
        let sys = open_for(&cert, &file, args.plugin)?;
        let matches = sys.state_dim() == cert.plan.state_dim
            && (cert.safe_set.is_none() || sys.safe_set().to_spec() == cert.safe_set);
        report.checks.push(CheckRecord {
            name: "system",
            pass: Some(matches),
            detail: format!(
                "system `{}` with n = {}, certificate n = {}",
                sys.name(),
                sys.state_dim(),
                cert.plan.state_dim
            ),
        });
        if matches {
            run_statistical_checks(&cert, &*sys, args, workers, &mut report)?;
        }
    }

    report.pass = report.checks.iter().all(|c| c.pass != Some(false));
    for c in &report.checks {
        let tag = match c.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        println!("{tag:<4} {:<10} {}", c.name, c.detail);
    }
    let path = out_dir.join(format!("{stem}.report.json"));
    let json = serde_json::to_string_pretty(&report).map_err(pacsafe::Error::from)?;
    write_file(&path, json.as_bytes())?;
    println!("report: {}", path.display());
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.pass == Some(false))
            .map(|c| c.name)
            .collect();
        Err(CliError::Validation(failed.join(", ")))
    }
}

fn run_statistical_checks(
    cert: &Certificate,
    sys: &dyn BlackBox,
    args: &ValidateArgs,
    workers: usize,
    report: &mut ValidationReport,
) -> Result<()> {
    let g = &cert.guarantee;
    if cert.method.is_robust() {
        let threshold = g.inner_prob.unwrap_or(1.0);
        let states = args.states.unwrap_or(10_000);
        let n_mc = args.mc.unwrap_or(1_000);
        let sweep = mc_state_sweep(sys, states, n_mc, threshold, args.seed, workers)?;
        let floor = g.outer_frac - 3.0 * sweep.se;
        let claim = cert.verdict == Verdict::Accepted;
        report.checks.push(CheckRecord {
            name: "mc_sweep",
            pass: claim.then_some(sweep.fraction >= floor),
            detail: format!(
                "{:.4} of {states} states have estimated safety >= {threshold} ({n_mc} draws each); certified {} - 3 se = {floor:.4}{}",
                sweep.fraction,
                g.outer_frac,
                if claim { "" } else { " (rejected certificate, nothing to refute)" }
            ),
        });
        report.sweep = Some(sweep);
    } else {
        let states = args.states.unwrap_or(1_000);
        let n_mc = args.mc.unwrap_or(10_000);
        let eval = BoundEvaluator::new(cert, Some(sys.safe_set().clone()))?;
        let dom = bound_dominance(sys, &eval, states, n_mc, args.seed, workers)?;
        report.checks.push(CheckRecord {
            name: "dominance",
            pass: Some(dom.fraction >= 0.95),
            detail: format!(
                "bound <= MC + 3 se at {}/{states} states ({:.4}, need 0.95; {n_mc} draws each)",
                dom.satisfied, dom.fraction
            ),
        });
        report.dominance = Some(dom);
    }
    Ok(())
}

pub fn grid_cmd(certificate: &Path, resolution: usize, slice: Option<&str>, out: Option<&Path>) -> Result<()> {
    let cert = read_certificate(certificate)?;
    if cert.method.is_robust() {
        return Err(CliError::config(format!(
            "grid needs a sbc3 certificate, `{}` is {}",
            certificate.display(),
            cert.method
        )));
    }
    let slice = slice.map(parse_slice).transpose()?.unwrap_or_default();
    let eval = BoundEvaluator::new(&cert, None)?;
    let records = contour_grid(&eval, resolution, &slice)?;
    let stem = certificate
        .file_stem()
        .map_or_else(|| "certificate".into(), |s| s.to_string_lossy().into_owned());
    let path = out.unwrap_or(Path::new(".")).join(format!("{stem}.grid.csv"));
    let mut buf = Vec::new();
    write_grid_csv(&records, &mut buf).map_err(|source| CliError::Write {
        path: path.clone(),
        source,
    })?;
    write_file(&path, &buf)?;
    let inside = records.iter().filter(|r| r.in_safe_set).count();
    println!("{} grid points ({inside} inside the safe set): {}", records.len(), path.display());
    Ok(())
}

pub fn serve_builtin_cmd(name: &str) -> Result<()> {
    let sys = builtin(name)?;
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    serve(&sys, stdin.lock(), &mut out).map_err(pacsafe::Error::from)?;
    out.flush().map_err(pacsafe::Error::from)?;
    Ok(())
}
