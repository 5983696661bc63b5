mod args;
mod record;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use args::{BoundsArgs, Cli, Command, EbetaArgs, HardcoreArgs, McArgs, Sampling, ScatterArgs, SpecArg, VerifyArgs};
use record::{num, write_columns, RunRecord};
use scatlen::gibbs::BoundsReport;
use scatlen::potential::parse;
use scatlen::verify::{run_suite, VerifyOptions};
use scatlen::{
    bounds_report, ebeta_hardcore, estimate_g, finiteness_check, scattering_length, scattering_length_at, solve_ebeta,
    Dimension, HardCoreParams, McConfig, MeshParams, RadialPotential,
};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid potential spec: {0}")]
    Spec(String),
    #[error("{0}")]
    Compute(#[from] scatlen::Error),
    #[error("{0}")]
    Io(String),
    #[error("verification failed")]
    Verification,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Spec(_) => 3,
            CliError::Compute(_) | CliError::Io(_) | CliError::Verification => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Outcome = Result<RunRecord, CliError>;

fn load(spec: &SpecArg) -> Result<(RadialPotential, Dimension), CliError> {
    let text = std::fs::read_to_string(&spec.spec)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", spec.spec.display())))?;
    parse(&text).map_err(|e| CliError::Spec(format!("{}: {e}", spec.spec.display())))
}

fn mc_config(s: &Sampling) -> McConfig {
    McConfig {
        n_paths: s.paths,
        n_steps: s.steps,
        seed: s.seed,
        sample_radius: s.sample_radius,
        chunk_size: s.chunk,
        bridge: s.bridge,
    }
}

fn scatter(a: &ScatterArgs) -> Outcome {
    let start = Instant::now();
    let (v, d) = load(&a.spec)?;
    let inputs = json!({ "spec": a.spec.spec, "dimension": d.value(), "R": a.radius, "tol": a.tol });
    let outputs = match a.radius {
        Some(r) => {
            let res = scattering_length_at(&v, d, r)?;
            if let Some(path) = &a.profile {
                let p = scatlen::solve_zero_energy(&v, d, r, MeshParams::with_points(a.mesh))?;
                write_columns(path, &["r", "w", "w_prime"], &[&p.grid, &p.w, &p.w_prime])?;
            }
            json!({ "a_R": num(res.a_r), "lambda_R": num(res.lambda_r), "R": num(res.r) })
        }
        None => {
            let lim = scattering_length(&v, d, a.tol)?;
            let fin = finiteness_check(&v, d);
            json!({
                "a": num(lim.a),
                "bracket": [num(lim.bracket.0), num(lim.bracket.1)],
                "error": num(lim.width() / 2.0),
                "R_used": num(lim.r_used),
                "converged": lim.converged,
                "finiteness": {
                    "verdict": fin.verdict,
                    "a_upper": fin.a_upper_3d.or(fin.a_upper_2d).map(num),
                    "best_b": fin.best_b.map(num),
                    "diverging_moment": fin.diverging_moment,
                },
            })
        }
    };
    Ok(RunRecord::new("scatter", inputs, outputs, start.elapsed().as_secs_f64()))
}

fn ebeta(a: &EbetaArgs) -> Outcome {
    let start = Instant::now();
    let (v, d) = load(&a.spec)?;
    let sol = solve_ebeta(&v, d, a.beta, MeshParams::with_points(a.mesh))?;
    if let Some(path) = &a.profile {
        write_columns(path, &["r", "phi"], &[&sol.grid, &sol.phi])?;
    }
    let inputs = json!({ "spec": a.spec.spec, "dimension": d.value(), "beta": a.beta.value(), "mesh": a.mesh });
    let outputs = json!({
        "e_beta": num(sol.e_beta),
        "error": num(sol.absolute_error()),
        "relative_error": num(sol.error_estimate),
        "R_max": num(sol.r_max),
        "nodes": sol.grid.len(),
        "certified": sol.certified,
    });
    Ok(RunRecord::new("ebeta", inputs, outputs, start.elapsed().as_secs_f64()))
}

fn bounds_table(r: &BoundsReport) -> String {
    let mut out = format!("{:<36} {:>20} {:>14} {:>20} {:>5}\n", "quantity", "value", "error", "check", "pass");
    let fmt = |x: f64| format!("{:.12}", record::round(x));
    let mut row = |q: &str, v: String, e: String, c: String, p: String| {
        out += &format!("{q:<36} {v:>20} {e:>14} {c:>20} {p:>5}\n");
    };
    row("scattering length a", fmt(r.a), "-".into(), "-".into(), "-".into());
    row("analytic bound", fmt(r.theorem1), "-".into(), "-".into(), "-".into());
    if let Some(t) = &r.trial {
        row("trial-state energy", fmt(t.value), "-".into(), "-".into(), "-".into());
        row("analytic trial bound", fmt(t.analytic_bound), "-".into(), "-".into(), "-".into());
    }
    if let Some(n) = r.numeric {
        row("numeric e(beta)", fmt(n), format!("{:.3e}", r.numeric_error.unwrap_or(0.0)), "-".into(), "-".into());
    }
    if let Some(mc) = &r.mc {
        row("Monte Carlo g(beta)", fmt(mc.mean), format!("{:.3e}", mc.stderr), "-".into(), "-".into());
    }
    for c in &r.checks {
        row(&c.name, fmt(c.lhs), format!("{:.3e}", c.tolerance), format!("<= {}", fmt(c.rhs)), c.pass.to_string());
    }
    out
}

fn bounds(a: &BoundsArgs) -> Result<(RunRecord, Option<String>), CliError> {
    let start = Instant::now();
    let (v, d) = load(&a.spec)?;
    let mut report = bounds_report(&v, d, a.beta, MeshParams::with_points(a.mesh))?;
    if a.mc {
        let est = estimate_g(&v, d, a.beta, &mc_config(&a.sampling))?;
        if let Some(n) = report.numeric {
            let slack = 3.0 * est.stderr + report.numeric_error.unwrap_or(0.0);
            report
                .checks
                .push(scatlen::Check::new("Monte Carlo g <= numeric e(beta)", est.mean, n, slack));
        }
        report.mc = Some(est);
    }
    let inputs = json!({ "spec": a.spec.spec, "dimension": d.value(), "beta": a.beta.value(), "mc": a.mc });
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "lhs": num(c.lhs), "rhs": num(c.rhs), "tolerance": num(c.tolerance), "pass": c.pass }))
        .collect();
    let outputs = json!({
        "a": num(report.a),
        "theorem1": num(report.theorem1),
        "trial": report.trial.map(|t| json!({
            "R": num(t.r), "a_R": num(t.a_r), "value": num(t.value), "analytic_bound": num(t.analytic_bound),
        })),
        "numeric": report.numeric.map(num),
        "numeric_error": report.numeric_error.map(num),
        "mc": report.mc.map(|m| json!({ "mean": num(m.mean), "stderr": num(m.stderr), "bias_bound": num(m.bias_bound) })),
        "checks": checks,
        "all_pass": report.all_pass(),
    });
    let table = a.table.then(|| bounds_table(&report));
    Ok((RunRecord::new("bounds", inputs, outputs, start.elapsed().as_secs_f64()), table))
}

fn mc(a: &McArgs) -> Outcome {
    let start = Instant::now();
    let (v, d) = load(&a.spec)?;
    let cfg = mc_config(&a.sampling);
    let est = estimate_g(&v, d, a.beta, &cfg)?;
    let inputs = json!({
        "spec": a.spec.spec, "dimension": d.value(), "beta": a.beta.value(),
        "paths": cfg.n_paths, "steps": cfg.n_steps, "seed": cfg.seed, "chunk": cfg.chunk_size,
        "sample_radius": num(est.sample_radius), "bridge": cfg.bridge,
    });
    let outputs = json!({
        "mean": num(est.mean),
        "stderr": num(est.stderr),
        "n_effective": est.n_effective,
        "bias_bound": num(est.bias_bound),
        "truncated_at": est.truncated_at.map(num),
    });
    Ok(RunRecord::new("mc", inputs, outputs, start.elapsed().as_secs_f64()))
}

fn verify(a: &VerifyArgs) -> Result<(RunRecord, bool), CliError> {
    let start = Instant::now();
    let opts = VerifyOptions {
        fault: a.inject_fault,
        mc: mc_config(&a.sampling),
    };
    let mut suites = Vec::new();
    let mut all = true;
    for &suite in &a.suite.0 {
        let report = run_suite(suite, &opts)?;
        all &= report.pass();
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!("FAIL {suite}: {} ({} > {} + {})", c.name, c.lhs, c.rhs, c.tolerance);
        }
        let checks: Vec<Value> = report
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "lhs": num(c.lhs), "rhs": num(c.rhs), "pass": c.pass }))
            .collect();
        suites.push(json!({ "suite": suite, "pass": report.pass(), "seconds": num(report.seconds), "checks": checks }));
    }
    let names: Vec<&str> = a.suite.0.iter().map(|s| s.name()).collect();
    let inputs = json!({ "suites": names, "paths": opts.mc.n_paths, "steps": opts.mc.n_steps, "seed": opts.mc.seed });
    let outputs = json!({ "pass": all, "suites": suites });
    Ok((RunRecord::new("verify", inputs, outputs, start.elapsed().as_secs_f64()), all))
}

fn hardcore(a: &HardcoreArgs) -> Outcome {
    let start = Instant::now();
    let p = HardCoreParams::new(a.a, a.beta, a.dim).map_err(|e| CliError::Usage(e.to_string()))?;
    let inputs = json!({ "a": a.a, "beta": a.beta.value(), "dimension": a.dim.value() });
    let outputs = json!({ "e_beta": num(ebeta_hardcore(&p)) });
    Ok(RunRecord::new("hardcore", inputs, outputs, start.elapsed().as_secs_f64()))
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Scatter(a) => emit(&scatter(a)?.to_json()),
        Command::Ebeta(a) => emit(&ebeta(a)?.to_json()),
        Command::Bounds(a) => {
            let (record, table) = bounds(a)?;
            emit(&table.unwrap_or_else(|| record.to_json()))
        }
        Command::Mc(a) => emit(&mc(a)?.to_json()),
        Command::Verify(a) => {
            let (record, pass) = verify(a)?;
            emit(&record.to_json())?;
            if pass {
                Ok(())
            } else {
                Err(CliError::Verification)
            }
        }
        Command::Hardcore(a) => emit(&hardcore(a)?.to_json()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
