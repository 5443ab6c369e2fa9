//! Batch front end: `solve`, `transform`, `verify`, `sweep`.
//!
//! Each command reads an instance config, works inside an output directory,
//! and writes CSV tables plus flat-text summaries. Exit codes: `0` success,
//! `1` config or I/O error, `2` solver failure, `3` alignment above
//! tolerance, `4` verification norms above their class tolerances.

use crate::config::InstanceConfig;
use crate::domain::{integrate, GridFunction};
use crate::error::{Error, Result};
use crate::io::{read_csv, write_csv, Summary};
use crate::oracle::solve_coupled;
use crate::rlaplace::solve_rlaplace;
use crate::transform::{
    check_gradient_alignment, forward_transform, inverse_transform, MFGSolution, PhiSolution,
};
use crate::util::fit_order;
use crate::verify::{
    alignment_report, class_tolerance, cross_validate, hjb_report, kolmogorov_report,
    rlaplace_weak_residual,
};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Coupled,
    Rlaplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn params_into_summary(cfg: &InstanceConfig, s: &mut Summary) {
    s.push_str("domain", cfg.domain_label());
    s.push_str("coupling", &cfg.coupling.kind);
    s.push_f64("nu", cfg.params.nu);
    s.push_f64("r", cfg.params.r);
    s.push_f64("r_conj", cfg.params.r_conj);
    s.push_f64("h0", cfg.params.h0);
    s.push_f64("mu", cfg.params.mu);
    s.push_usize("n", cfg.solver.n);
}

/// Sidecar summary path of a solution table: `X.csv -> X.summary.txt`.
fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.txt")
}

/// Solve one path of the instance and write `coupled.csv` / `rlaplace.csv`
/// plus the sidecar summary into `out`.
pub fn cmd_solve(cfg: &InstanceConfig, which: Which, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let f = cfg.coupling()?;
    match which {
        Which::Coupled => {
            let (sol, trace) = solve_coupled(cfg.domain, &cfg.params, &f, &cfg.solver)?;
            let x: Vec<f64> = sol.u.nodes().collect();
            let csv = out.join("coupled.csv");
            write_csv(&csv, &[("x", &x), ("u", &sol.u.values), ("m", &sol.m.values)])?;
            let mut s = Summary::new();
            s.push_str("kind", "coupled");
            params_into_summary(cfg, &mut s);
            s.push_f64("lambda", sol.lambda);
            s.push_f64("mass", integrate(&sol.m));
            s.push_f64("gauge", integrate(&sol.u));
            s.push_usize("iterations", trace.iterations);
            s.push_f64("final_residual", trace.final_weak_residual);
            s.push_bool("singular_drift", trace.singular_drift);
            s.push_bool("uniqueness_guaranteed", trace.uniqueness_guaranteed);
            s.write(&summary_path(&csv))?;
            println!(
                "solved coupled: lambda = {:.12e}, iterations = {}, residual = {:.3e}",
                sol.lambda, trace.iterations, trace.final_weak_residual
            );
        }
        Which::Rlaplace => {
            let (sol, trace) = solve_rlaplace(cfg.domain, &cfg.params, &f, &cfg.solver)?;
            let x: Vec<f64> = sol.phi.nodes().collect();
            let csv = out.join("rlaplace.csv");
            write_csv(&csv, &[("x", &x), ("phi", &sol.phi.values)])?;
            let mut s = Summary::new();
            s.push_str("kind", "rlaplace");
            params_into_summary(cfg, &mut s);
            s.push_f64("lambda", sol.lambda);
            s.push_f64("phi_mass", integrate(&sol.phi.map(|v| v.powf(cfg.params.r))));
            s.push_f64("min_phi", sol.phi.min());
            s.push_usize("iterations", trace.iterations);
            s.push_usize("eps_stages", trace.eps_stages.len());
            s.push_f64("final_weak_residual", trace.final_weak_residual);
            s.push_bool("singular_drift", trace.singular_drift);
            s.push_bool("uniqueness_guaranteed", trace.uniqueness_guaranteed);
            s.write(&summary_path(&csv))?;
            println!(
                "solved rlaplace: lambda = {:.12e}, iterations = {}, residual = {:.3e}",
                sol.lambda, trace.iterations, trace.final_weak_residual
            );
        }
    }
    Ok(())
}

fn load_triple(cfg: &InstanceConfig, csv: &Path) -> Result<MFGSolution> {
    let (header, cols) = read_csv(csv)?;
    if header != ["x", "u", "m"] {
        return Err(Error::Io(format!(
            "{}: header {header:?}, expected [x, u, m]",
            csv.display()
        )));
    }
    let summary = Summary::read(&summary_path(csv))?;
    let lambda = summary.get_f64("lambda")?;
    let u = GridFunction::new(cfg.domain, cols[1].clone())?;
    let m = GridFunction::new(cfg.domain, cols[2].clone())?;
    MFGSolution::new(u, m, lambda)
}

fn load_pair(cfg: &InstanceConfig, csv: &Path) -> Result<PhiSolution> {
    let (header, cols) = read_csv(csv)?;
    if header != ["x", "phi"] {
        return Err(Error::Io(format!(
            "{}: header {header:?}, expected [x, phi]",
            csv.display()
        )));
    }
    let summary = Summary::read(&summary_path(csv))?;
    let lambda = summary.get_f64("lambda")?;
    let phi = GridFunction::new(cfg.domain, cols[1].clone())?;
    PhiSolution::new(phi, lambda, cfg.params.r)
}

/// Apply the change of variables to a stored solution.
///
/// `forward` reads a `(x, u, m)` table (default `out/coupled.csv`, override
/// with `input`) and writes `forward.csv` plus the alignment report; it
/// fails (exit 3) when the alignment flux exceeds the configured tolerance.
/// `inverse` reads a `(x, phi)` table (default `out/rlaplace.csv`) and
/// writes the reconstructed triple `inverse.csv`, which `forward` accepts
/// back for round trips.
pub fn cmd_transform(
    cfg: &InstanceConfig,
    direction: Direction,
    out: &Path,
    input: Option<&Path>,
) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    match direction {
        Direction::Forward => {
            let default = out.join("coupled.csv");
            let sol = load_triple(cfg, input.unwrap_or(&default))?;
            let report = check_gradient_alignment(&sol, &cfg.params)?;
            let x_mid: Vec<f64> = (0..sol.u.n() - 1).map(|k| sol.u.midpoint(k)).collect();
            write_csv(
                &out.join("alignment_flux.csv"),
                &[("x_mid", &x_mid), ("flux", &report.flux)],
            )?;
            let csv = out.join("forward.csv");
            let mut s = Summary::new();
            s.push_str("kind", "transform-forward");
            s.push_f64("alignment_sup", report.sup_norm);
            s.push_f64("alignment_rel_sup", report.rel_sup_norm);
            s.push_f64("alignment_tol", cfg.alignment_tol);
            let ok = report.rel_sup_norm <= cfg.alignment_tol;
            s.push_bool("within_tolerance", ok);
            if ok {
                let phi = forward_transform(&sol, &cfg.params, cfg.alignment_tol)?;
                let x: Vec<f64> = phi.phi.nodes().collect();
                write_csv(&csv, &[("x", &x), ("phi", &phi.phi.values)])?;
                s.push_f64("lambda", phi.lambda);
            }
            s.write(&summary_path(&csv))?;
            if !ok {
                return Err(Error::AlignmentExceeded {
                    rel_sup_norm: report.rel_sup_norm,
                    tol: cfg.alignment_tol,
                    report: Box::new(report),
                });
            }
            println!(
                "forward transform: alignment rel sup = {:.3e}",
                report.rel_sup_norm
            );
        }
        Direction::Inverse => {
            let default = out.join("rlaplace.csv");
            let phi = load_pair(cfg, input.unwrap_or(&default))?;
            let sol = inverse_transform(&phi, &cfg.params)?;
            let x: Vec<f64> = sol.u.nodes().collect();
            let csv = out.join("inverse.csv");
            write_csv(&csv, &[("x", &x), ("u", &sol.u.values), ("m", &sol.m.values)])?;
            let mut s = Summary::new();
            s.push_str("kind", "transform-inverse");
            s.push_f64("lambda", sol.lambda);
            s.push_f64("mass", integrate(&sol.m));
            s.push_f64("u_range", sol.u.max() - sol.u.min());
            s.write(&summary_path(&csv))?;
            println!("inverse transform: mass = {:.12e}", integrate(&sol.m));
        }
    }
    Ok(())
}

/// Evaluate residual reports for every stored solution in `out` against the
/// class tolerances. Returns whether all passed.
pub fn cmd_verify(cfg: &InstanceConfig, out: &Path) -> Result<bool> {
    let f = cfg.coupling()?;
    let mut s = Summary::new();
    s.push_str("kind", "verify");
    let mut all_pass = true;
    let mut found = false;

    if out.join("coupled.csv").exists() {
        found = true;
        let sol = load_triple(cfg, &out.join("coupled.csv"))?;
        let tol = class_tolerance(&cfg.params, sol.u.h());
        for rep in [
            hjb_report(&sol, &cfg.params, &f, "coupled")?,
            kolmogorov_report(&sol, &cfg.params, "coupled")?,
            alignment_report(&sol, &cfg.params, "coupled")?,
        ] {
            let pass = rep.sup_norm <= tol;
            all_pass &= pass;
            let key = format!("coupled.{}", rep.kind.label());
            s.push_f64(&format!("{key}.sup"), rep.sup_norm);
            s.push_f64(&format!("{key}.l2"), rep.l2_norm);
            s.push_f64(&format!("{key}.tol"), tol);
            s.push_bool(&format!("{key}.pass"), pass);
        }
    }

    if out.join("rlaplace.csv").exists() {
        found = true;
        let phi = load_pair(cfg, &out.join("rlaplace.csv"))?;
        let tol = class_tolerance(&cfg.params, phi.phi.h());
        let rep = rlaplace_weak_residual(&phi, &cfg.params, &f, "rlaplace");
        let pass = rep.sup_norm <= tol;
        all_pass &= pass;
        s.push_f64("rlaplace.rlaplace-weak.sup", rep.sup_norm);
        s.push_f64("rlaplace.rlaplace-weak.l2", rep.l2_norm);
        s.push_f64("rlaplace.rlaplace-weak.tol", tol);
        s.push_bool("rlaplace.rlaplace-weak.pass", pass);
    }

    if !found {
        return Err(Error::Io(format!(
            "no solution files found in {}",
            out.display()
        )));
    }
    s.push_bool("all_pass", all_pass);
    s.write(&out.join("verify.summary.txt"))?;
    println!("verify: all_pass = {all_pass}");
    Ok(all_pass)
}

/// Cross-validate the instance over a list of grids and fit convergence
/// orders; writes `sweep.csv` and `sweep_summary.txt`.
pub fn cmd_sweep(cfg: &InstanceConfig, grids: &[usize], out: &Path) -> Result<()> {
    if grids.len() < 2 {
        return Err(Error::Config("sweep needs at least two grid sizes".into()));
    }
    std::fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let f = cfg.coupling()?;
    let mut ns = Vec::new();
    let mut hs = Vec::new();
    let mut err_m = Vec::new();
    let mut err_lambda = Vec::new();
    let mut err_du = Vec::new();
    println!("n,h,err_m,err_lambda,err_du");
    for &n in grids {
        let mut solver = cfg.solver.clone();
        solver.n = n;
        let cv = cross_validate(cfg.domain, &cfg.params, &f, &solver)?;
        ns.push(n as f64);
        hs.push(cv.grid_h);
        err_m.push(cv.sup_m_diff);
        err_lambda.push(cv.lambda_diff);
        err_du.push(cv.sup_du_diff);
        println!(
            "{n},{:.6e},{:.6e},{:.6e},{:.6e}",
            cv.grid_h, cv.sup_m_diff, cv.lambda_diff, cv.sup_du_diff
        );
    }
    write_csv(
        &out.join("sweep.csv"),
        &[
            ("n", &ns),
            ("h", &hs),
            ("err_m", &err_m),
            ("err_lambda", &err_lambda),
            ("err_du", &err_du),
        ],
    )?;

    let mut s = Summary::new();
    s.push_str("kind", "sweep");
    params_into_summary(cfg, &mut s);
    s.push_str(
        "grids",
        grids
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let exact_floor = 1e-12;
    for (name, errs) in [
        ("order_m", &err_m),
        ("order_lambda", &err_lambda),
        ("order_du", &err_du),
    ] {
        if errs.iter().all(|&e| e <= exact_floor) {
            s.push_str(name, "exact");
            println!("{name} = exact");
        } else if let Some(p) = fit_order(&hs, errs) {
            s.push_f64(name, p);
            println!("{name} = {p:.3}");
        } else {
            s.push_str(name, "undetermined");
            println!("{name} = undetermined");
        }
    }
    s.write(&out.join("sweep.summary.txt"))?;
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Io(_)
        | Error::Domain(_)
        | Error::ShapeMismatch(_)
        | Error::Precondition(_) => 1,
        Error::NonConvergence { .. }
        | Error::JacobianSingular(_)
        | Error::DampingFailure(_)
        | Error::Positivity(_) => 2,
        Error::AlignmentExceeded { .. } => 3,
    }
}

const USAGE: &str = "usage:
  mfg solve     --config PATH --which coupled|rlaplace [--out DIR]
  mfg transform --config PATH --direction forward|inverse [--out DIR] [--input SOLUTION.csv]
  mfg verify    --config PATH [--out DIR]
  mfg sweep     --config PATH --grids n1,n2,... [--out DIR]";

struct ParsedArgs {
    verb: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    which: Option<Which>,
    direction: Option<Direction>,
    grids: Option<Vec<usize>>,
    input: Option<PathBuf>,
}

fn parse_args(args: &[String]) -> Result<ParsedArgs> {
    if args.is_empty() {
        return Err(Error::Config("missing command".into()));
    }
    let mut parsed = ParsedArgs {
        verb: args[0].clone(),
        config: None,
        out: None,
        which: None,
        direction: None,
        grids: None,
        input: None,
    };
    let mut i = 1;
    while i < args.len() {
        let flag = args[i].as_str();
        let value = args
            .get(i + 1)
            .ok_or_else(|| Error::Config(format!("flag {flag} needs a value")))?;
        match flag {
            "--config" => parsed.config = Some(PathBuf::from(value)),
            "--out" => parsed.out = Some(PathBuf::from(value)),
            "--input" => parsed.input = Some(PathBuf::from(value)),
            "--which" => {
                parsed.which = Some(match value.as_str() {
                    "coupled" => Which::Coupled,
                    "rlaplace" => Which::Rlaplace,
                    other => {
                        return Err(Error::Config(format!(
                            "--which must be coupled or rlaplace, got '{other}'"
                        )))
                    }
                })
            }
            "--direction" => {
                parsed.direction = Some(match value.as_str() {
                    "forward" => Direction::Forward,
                    "inverse" => Direction::Inverse,
                    other => {
                        return Err(Error::Config(format!(
                            "--direction must be forward or inverse, got '{other}'"
                        )))
                    }
                })
            }
            "--grids" => {
                let grids: Result<Vec<usize>> = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Config(format!("bad grid size '{s}'")))
                    })
                    .collect();
                parsed.grids = Some(grids?);
            }
            other => return Err(Error::Config(format!("unknown flag '{other}'"))),
        }
        i += 2;
    }
    Ok(parsed)
}

/// Entry point for the thin binary: parse, dispatch, map errors to exit
/// codes, print diagnostics to stderr.
pub fn run(args: &[String]) -> i32 {
    let parsed = match parse_args(args) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}\n{USAGE}");
            return 1;
        }
    };
    let result = dispatch(&parsed);
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            exit_code(&e)
        }
    }
}

fn dispatch(parsed: &ParsedArgs) -> Result<i32> {
    let config_path = parsed
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let cfg = InstanceConfig::load(config_path)?;
    let out = parsed.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    match parsed.verb.as_str() {
        "solve" => {
            let which = parsed
                .which
                .ok_or_else(|| Error::Config("solve needs --which coupled|rlaplace".into()))?;
            cmd_solve(&cfg, which, &out)?;
            Ok(0)
        }
        "transform" => {
            let direction = parsed
                .direction
                .ok_or_else(|| Error::Config("transform needs --direction forward|inverse".into()))?;
            cmd_transform(&cfg, direction, &out, parsed.input.as_deref())?;
            Ok(0)
        }
        "verify" => {
            let ok = cmd_verify(&cfg, &out)?;
            Ok(if ok { 0 } else { 4 })
        }
        "sweep" => {
            let grids = parsed
                .grids
                .as_ref()
                .ok_or_else(|| Error::Config("sweep needs --grids n1,n2,...".into()))?;
            cmd_sweep(&cfg, grids, &out)?;
            Ok(0)
        }
        other => Err(Error::Config(format!(
            "unknown command '{other}'; expected solve | transform | verify | sweep"
        ))),
    }
}
