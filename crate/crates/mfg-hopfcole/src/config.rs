//! Instance configuration files.
//!
//! A config is flat TOML with `[domain]`, `[hamiltonian]`, `[coupling]`, and
//! optional `[solver]` / `[output]` sections. Exactly one of `r` / `r_conj`
//! and exactly one of `h0` / `l0` may be given; the other is derived.
//! Potentials are closed-form expressions over `x` (see [`crate::expr`]).

use crate::coupling::Coupling;
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::expr;
use crate::params::HamiltonianParams;
use crate::rlaplace::SolverConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    domain: DomainSection,
    hamiltonian: HamiltonianSection,
    coupling: CouplingSection,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSection {
    kind: String,
    a: Option<f64>,
    b: Option<f64>,
    radius: Option<f64>,
    dim: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianSection {
    nu: f64,
    r: Option<f64>,
    r_conj: Option<f64>,
    h0: Option<f64>,
    l0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub kind: String,
    pub coefficient: Option<f64>,
    pub gamma: Option<f64>,
    pub potential: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    n: Option<usize>,
    eps_schedule: Option<Vec<f64>>,
    step0: Option<f64>,
    max_iters: Option<usize>,
    grad_tol: Option<f64>,
    positivity_floor: Option<f64>,
    newton_tol: Option<f64>,
    newton_max_iters: Option<usize>,
    /// Relative alignment tolerance for the forward transform.
    alignment_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<String>,
}

/// A fully resolved instance: domain, parameters, coupling recipe, solver
/// knobs, output directory.
#[derive(Debug)]
pub struct InstanceConfig {
    pub domain: DomainSpec,
    pub params: HamiltonianParams,
    pub coupling: CouplingSection,
    pub solver: SolverConfig,
    pub alignment_tol: f64,
    pub out_dir: PathBuf,
}

impl InstanceConfig {
    /// Parse and validate a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Parse and validate config text.
    pub fn parse_str(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("parse failure: {e}")))?;

        let domain = match file.domain.kind.as_str() {
            "interval" => {
                let a = file
                    .domain
                    .a
                    .ok_or_else(|| Error::Config("interval domain needs 'a'".into()))?;
                let b = file
                    .domain
                    .b
                    .ok_or_else(|| Error::Config("interval domain needs 'b'".into()))?;
                DomainSpec::interval(a, b).map_err(|e| Error::Config(e.to_string()))?
            }
            "radial" => {
                let radius = file
                    .domain
                    .radius
                    .ok_or_else(|| Error::Config("radial domain needs 'radius'".into()))?;
                let dim = file
                    .domain
                    .dim
                    .ok_or_else(|| Error::Config("radial domain needs 'dim'".into()))?;
                DomainSpec::radial_ball(radius, dim).map_err(|e| Error::Config(e.to_string()))?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown domain kind '{other}' (interval | radial)"
                )))
            }
        };

        let h = &file.hamiltonian;
        let params = match (h.r, h.r_conj, h.h0, h.l0) {
            (Some(_), Some(_), _, _) => {
                return Err(Error::Config("give exactly one of r / r_conj".into()))
            }
            (None, None, _, _) => {
                return Err(Error::Config("give exactly one of r / r_conj".into()))
            }
            (_, _, Some(_), Some(_)) => {
                return Err(Error::Config("give exactly one of h0 / l0".into()))
            }
            (_, _, None, None) => {
                return Err(Error::Config("give exactly one of h0 / l0".into()))
            }
            (Some(r), None, Some(h0), None) => HamiltonianParams::new(h.nu, r, h0),
            (Some(r), None, None, Some(l0)) => HamiltonianParams::from_l0(h.nu, r, l0),
            (None, Some(rc), Some(h0), None) => HamiltonianParams::from_r_conj(h.nu, rc, h0),
            (None, Some(rc), None, Some(l0)) => {
                let r = crate::params::conjugate_exponent(rc)
                    .map_err(|e| Error::Config(e.to_string()))?;
                HamiltonianParams::from_l0(h.nu, r, l0)
            }
        }
        .map_err(|e| Error::Config(e.to_string()))?;

        // Reject unparseable or inconsistent couplings at load time.
        let coupling = build_coupling(&file.coupling)?;
        let probe = crate::domain::GridFunction::constant(domain, 33, 0.0)
            .map_err(|e| Error::Config(e.to_string()))?;
        coupling
            .validate(&probe)
            .map_err(|e| Error::Config(e.to_string()))?;

        let mut solver = SolverConfig::default();
        let s = &file.solver;
        if let Some(n) = s.n {
            solver.n = n;
        }
        if let Some(ref e) = s.eps_schedule {
            solver.eps_schedule = e.clone();
        }
        if let Some(v) = s.step0 {
            solver.step0 = v;
        }
        if let Some(v) = s.max_iters {
            solver.max_iters = v;
        }
        if let Some(v) = s.grad_tol {
            solver.grad_tol = v;
        }
        if let Some(v) = s.positivity_floor {
            solver.positivity_floor = v;
        }
        if let Some(v) = s.newton_tol {
            solver.newton_tol = v;
        }
        if let Some(v) = s.newton_max_iters {
            solver.newton_max_iters = v;
        }
        solver.validate().map_err(|e| Error::Config(e.to_string()))?;

        Ok(InstanceConfig {
            domain,
            params,
            coupling: file.coupling,
            solver,
            alignment_tol: file.solver.alignment_tol.unwrap_or(1e-4),
            out_dir: PathBuf::from(file.output.dir.as_deref().unwrap_or("out")),
        })
    }

    /// Instantiate the coupling described by the config.
    pub fn coupling(&self) -> Result<Coupling> {
        build_coupling(&self.coupling)
    }

    /// One-line domain label for summaries.
    pub fn domain_label(&self) -> String {
        match self.domain {
            DomainSpec::Interval { a, b } => format!("interval({a},{b})"),
            DomainSpec::RadialBall { radius, dim } => format!("radial(R={radius},d={dim})"),
        }
    }
}

fn build_coupling(section: &CouplingSection) -> Result<Coupling> {
    let c = section.coefficient.unwrap_or(1.0);
    match section.kind.as_str() {
        "zero" => Ok(Coupling::zero()),
        "linear" => Coupling::linear(c).map_err(|e| Error::Config(e.to_string())),
        "power" => {
            let gamma = section
                .gamma
                .ok_or_else(|| Error::Config("power coupling needs 'gamma'".into()))?;
            Coupling::power(c, gamma).map_err(|e| Error::Config(e.to_string()))
        }
        "linear-plus-potential" => {
            let src = section
                .potential
                .as_deref()
                .ok_or_else(|| Error::Config("linear-plus-potential needs 'potential'".into()))?;
            let e = expr::parse(src)?;
            let label = format!("linear-plus-potential c={c} V(x)={src}");
            Coupling::linear_plus_potential(c, move |x| e.eval(x), label)
                .map_err(|err| Error::Config(err.to_string()))
        }
        other => Err(Error::Config(format!(
            "unknown coupling kind '{other}' (zero | linear | power | linear-plus-potential)"
        ))),
    }
}
