//! Constrained energy descent for the decoupled quasilinear problem.
//!
//! The unknown `phi > 0` with `int phi^r = 1` is the constrained critical
//! point of
//!
//! ```text
//! E_eps(phi) = (mu/r) int (|Dphi|^2 + eps^2)^{r/2} + (1/r) int F(x, phi^r)
//! ```
//!
//! where `F` is the m-antiderivative of the coupling; the ergodic constant
//! appears as the multiplier of the normalization. The solver runs projected
//! gradient descent in a stiffness-preconditioned metric with backtracking
//! line search, renormalizing `phi <- phi / (int phi^r)^{1/r}` after every
//! step, and continues through a decreasing schedule of regularization
//! parameters `eps`. The regularization covers both the degenerate (`r > 2`)
//! and singular (`r < 2`) behavior of the r-Laplace flux at critical points;
//! the final `eps` sits below truncation error at desk-scale grids.

use crate::coupling::Coupling;
use crate::domain::{differentiate_midpoint, integrate, DomainSpec, GridFunction};
use crate::error::{Error, Result};
use crate::params::HamiltonianParams;
use crate::transform::PhiSolution;

/// Knobs for both solvers: descent parameters for the decoupled path,
/// Newton parameters for the coupled one.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Grid nodes.
    pub n: usize,
    /// Strictly decreasing positive regularization schedule.
    pub eps_schedule: Vec<f64>,
    /// Initial descent step.
    pub step0: f64,
    /// Iteration cap per eps stage.
    pub max_iters: usize,
    /// Projected-gradient sup-norm stopping threshold.
    pub grad_tol: f64,
    /// Minimum admissible phi during descent.
    pub positivity_floor: f64,
    /// Newton residual sup-norm target for the coupled solver.
    pub newton_tol: f64,
    /// Newton iteration cap.
    pub newton_max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 257,
            eps_schedule: vec![1e-2, 1e-4, 1e-6, 1e-8],
            step0: 0.1,
            max_iters: 50_000,
            grad_tol: 1e-10,
            positivity_floor: 1e-12,
            newton_tol: 1e-11,
            newton_max_iters: 100,
        }
    }
}

impl SolverConfig {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 17 {
            return Err(Error::Domain(format!(
                "solver grid needs at least 17 nodes, got {}",
                self.n
            )));
        }
        if self.eps_schedule.is_empty() {
            return Err(Error::Domain("eps schedule must be nonempty".into()));
        }
        let mut prev = f64::INFINITY;
        for &e in &self.eps_schedule {
            if !(e > 0.0) || e >= prev {
                return Err(Error::Domain(
                    "eps schedule must be strictly decreasing and positive".into(),
                ));
            }
            prev = e;
        }
        if !(self.step0 > 0.0) || !(self.grad_tol > 0.0) || !(self.positivity_floor > 0.0) {
            return Err(Error::Domain(
                "step0, grad_tol, positivity_floor must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Final (smallest) regularization parameter.
    pub fn final_eps(&self) -> f64 {
        *self.eps_schedule.last().unwrap()
    }
}

/// One regularization stage of a descent run.
#[derive(Debug, Clone)]
pub struct EpsStage {
    pub eps: f64,
    pub iterations: usize,
    /// Energy of every committed iterate, starting value included.
    pub energies: Vec<f64>,
    pub final_projected_grad: f64,
}

/// Convergence record of a solve; descent runs fill the stages, Newton runs
/// fill the residual norms.
#[derive(Debug, Clone, Default)]
pub struct SolveTrace {
    pub eps_stages: Vec<EpsStage>,
    pub lambda_history: Vec<f64>,
    pub residual_norms: Vec<f64>,
    /// Unregularized weak-residual sup-norm of the returned solution.
    pub final_weak_residual: f64,
    pub iterations: usize,
    /// False when the coupling is not flagged monotone; cross-validation is
    /// then not meaningful even though the solve still runs.
    pub uniqueness_guaranteed: bool,
    /// True when `1 < r' < 2`, where results are first-order accurate.
    pub singular_drift: bool,
}

/// Regularized constrained energy `E_eps(phi)`.
///
/// Gradient integrals use the midpoint rule against the midpoint volume
/// weight; the potential term uses nodal trapezoidal quadrature.
pub fn discrete_energy(
    phi: &GridFunction,
    params: &HamiltonianParams,
    f: &Coupling,
    eps: f64,
) -> f64 {
    let r = params.r;
    let h = phi.h();
    let d = differentiate_midpoint(phi);
    let mut e_grad = 0.0;
    for (k, dk) in d.iter().enumerate() {
        e_grad += h * phi.midpoint_weight(k) * (dk * dk + eps * eps).powf(r / 2.0);
    }
    let weights = phi.quad_weights();
    let mut e_pot = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        let x = phi.node(i);
        let m = phi.values[i].powf(r);
        e_pot += w * f.primitive(x, m);
    }
    params.mu / r * e_grad + e_pot / r
}

/// Assembled gradient of `E_eps`: the weak form of the quasilinear operator
/// without the multiplier term, tested against every nodal hat function.
pub fn energy_gradient(
    phi: &GridFunction,
    params: &HamiltonianParams,
    f: &Coupling,
    eps: f64,
) -> Vec<f64> {
    let r = params.r;
    let n = phi.n();
    let d = differentiate_midpoint(phi);
    let q: Vec<f64> = d
        .iter()
        .map(|&dk| (dk * dk + eps * eps).powf((r - 2.0) / 2.0) * dk)
        .collect();
    let weights = phi.quad_weights();
    let mut g = vec![0.0; n];
    for i in 0..n {
        let mut gi = 0.0;
        if i > 0 {
            gi += params.mu * phi.midpoint_weight(i - 1) * q[i - 1];
        }
        if i < n - 1 {
            gi -= params.mu * phi.midpoint_weight(i) * q[i];
        }
        let x = phi.node(i);
        let m = phi.values[i].powf(r);
        gi += weights[i] * f.eval(x, m) * phi.values[i].powf(r - 1.0);
        g[i] = gi;
    }
    g
}

/// Multiplier recovered from a normalized solution by testing the weak form
/// against `phi` itself: `lambda = mu int |Dphi|^r + int f(x, phi^r) phi^r`.
pub fn lambda_from_phi(
    phi: &GridFunction,
    params: &HamiltonianParams,
    f: &Coupling,
) -> Result<f64> {
    let r = params.r;
    let mass = integrate(&phi.map(|v| v.powf(r)));
    if (mass - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "lambda_from_phi needs int phi^r = 1 within 1e-8, got {mass}"
        )));
    }
    let h = phi.h();
    let d = differentiate_midpoint(phi);
    let mut grad_term = 0.0;
    for (k, dk) in d.iter().enumerate() {
        grad_term += h * phi.midpoint_weight(k) * dk.abs().powf(r);
    }
    let weights = phi.quad_weights();
    let mut pot_term = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        let x = phi.node(i);
        let m = phi.values[i].powf(r);
        pot_term += w * f.eval(x, m) * m;
    }
    Ok(params.mu * grad_term + pot_term)
}

/// Rescale to the constraint manifold `int phi^r = 1`.
pub fn normalize_phi(phi: &GridFunction, r: f64) -> GridFunction {
    let mass = integrate(&phi.map(|v| v.powf(r)));
    let c = mass.powf(-1.0 / r);
    phi.map(|v| c * v)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tridiagonal SPD preconditioner `P = diag(W) + mu K_a`, where `K_a` is the
/// stiffness of the eps-regularized linearized flux at the current iterate.
struct Preconditioner {
    lu: crate::banded::BandedLu,
}

impl Preconditioner {
    fn build(phi: &GridFunction, params: &HamiltonianParams, eps: f64) -> Result<Self> {
        let n = phi.n();
        let h = phi.h();
        let r = params.r;
        let d = differentiate_midpoint(phi);
        let a: Vec<f64> = d
            .iter()
            .map(|&dk| (dk * dk + eps * eps).powf((r - 2.0) / 2.0))
            .collect();
        let weights = phi.quad_weights();
        let mut mat = crate::banded::BandedMatrix::new(n, 1, 1);
        for i in 0..n {
            let mut diag = weights[i];
            if i > 0 {
                let c = params.mu * phi.midpoint_weight(i - 1) * a[i - 1] / h;
                diag += c;
                mat.set(i, i - 1, -c);
            }
            if i < n - 1 {
                let c = params.mu * phi.midpoint_weight(i) * a[i] / h;
                diag += c;
                mat.set(i, i + 1, -c);
            }
            mat.set(i, i, diag);
        }
        Ok(Self {
            lu: mat.factorize()?,
        })
    }

    fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        self.lu.solve(v)
    }
}

/// Exact tridiagonal Hessian of `E_eps` at `phi`.
fn energy_hessian(
    phi: &GridFunction,
    params: &HamiltonianParams,
    f: &Coupling,
    eps: f64,
) -> crate::banded::BandedMatrix {
    let n = phi.n();
    let h = phi.h();
    let r = params.r;
    let d = differentiate_midpoint(phi);
    // d q / d(dphi) with q the regularized flux.
    let c: Vec<f64> = d
        .iter()
        .map(|&dk| {
            let s = dk * dk + eps * eps;
            s.powf((r - 2.0) / 2.0) * (1.0 + (r - 2.0) * dk * dk / s)
        })
        .collect();
    let weights = phi.quad_weights();
    let mut mat = crate::banded::BandedMatrix::new(n, 1, 1);
    for i in 0..n {
        let x = phi.node(i);
        let p = phi.values[i];
        let m = p.powf(r);
        let fm = f.eval_dm(x, m);
        let fv = f.eval(x, m);
        let mut diag =
            weights[i] * (r * fm * p.powf(2.0 * r - 2.0) + (r - 1.0) * fv * p.powf(r - 2.0));
        if i > 0 {
            let cc = params.mu * phi.midpoint_weight(i - 1) * c[i - 1] / h;
            diag += cc;
            mat.add(i, i - 1, -cc);
        }
        if i < n - 1 {
            let cc = params.mu * phi.midpoint_weight(i) * c[i] / h;
            diag += cc;
            mat.add(i, i + 1, -cc);
        }
        mat.add(i, i, diag);
    }
    mat
}

/// Euclidean tangent projection of the gradient; its sup-norm is the
/// stopping quantity.
fn projected_gradient_sup(g: &[f64], v: &[f64]) -> f64 {
    let theta = dot(g, v) / dot(v, v);
    g.iter()
        .zip(v)
        .fold(0.0f64, |m, (gi, vi)| m.max((gi - theta * vi).abs()))
}

/// Floating-point floor for evaluating the assembled gradient at `phi`.
///
/// The difference quotient carries rounding `~ eps_mach |phi| / h`, which
/// the flux slope `dq/dd` amplifies; for `r < 2` near critical cells that
/// slope is `~ eps^{r-2}`, so the stationarity residual cannot be computed
/// below this level no matter how many iterations run.
fn gradient_eval_floor(phi: &GridFunction, params: &HamiltonianParams, eps: f64) -> f64 {
    let r = params.r;
    let h = phi.h();
    let d = differentiate_midpoint(phi);
    let mut worst = 0.0f64;
    for (k, &dk) in d.iter().enumerate() {
        let s = dk * dk + eps * eps;
        let slope = s.powf((r - 2.0) / 2.0) * (1.0 + (r - 2.0).abs() * dk * dk / s);
        worst = worst.max(phi.midpoint_weight(k) * slope);
    }
    4.0 * f64::EPSILON * params.mu * worst * phi.sup_norm() / h
}

/// Local damped Newton iteration on the stationarity system
/// `grad E - beta grad(int phi^r) = 0`, `int phi^r = 1`, used to polish the
/// descent iterate down to the projected-gradient target once energy
/// differences fall below floating-point resolution. Steps are damped on
/// the stationarity residual sup-norm, so the iteration cannot wander.
fn kkt_polish(
    phi: &mut GridFunction,
    params: &HamiltonianParams,
    f: &Coupling,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let r = params.r;
    let n = phi.n();
    let mut best = phi.clone();
    let mut best_grad = f64::INFINITY;

    let stationarity = |phi: &GridFunction, beta: f64| -> (Vec<f64>, Vec<f64>, f64, f64) {
        let g = energy_gradient(phi, params, f, eps);
        let v: Vec<f64> = phi
            .quad_weights()
            .iter()
            .zip(&phi.values)
            .map(|(w, p)| r * w * p.powf(r - 1.0))
            .collect();
        let mass = integrate(&phi.map(|p| p.powf(r)));
        let sup = g
            .iter()
            .zip(&v)
            .fold((mass - 1.0).abs(), |m, (gi, vi)| {
                m.max((gi - beta * vi).abs())
            });
        (g, v, mass, sup)
    };

    // Multiplier of the raw constraint gradient v = r W phi^{r-1}, chosen
    // to minimize the initial residual in the least-squares sense.
    let mut beta = {
        let g = energy_gradient(phi, params, f, eps);
        let v: Vec<f64> = phi
            .quad_weights()
            .iter()
            .zip(&phi.values)
            .map(|(w, p)| r * w * p.powf(r - 1.0))
            .collect();
        dot(&g, &v) / dot(&v, &v)
    };

    let mut no_progress = 0;
    for _ in 0..100 {
        let (g, v, mass, res_sup) = stationarity(phi, beta);
        let gp = projected_gradient_sup(&g, &v);
        if gp < best_grad {
            best_grad = gp;
            best = phi.clone();
            no_progress = 0;
        } else {
            no_progress += 1;
        }
        let target = cfg.grad_tol.max(gradient_eval_floor(phi, params, eps));
        if gp <= target || no_progress >= 8 {
            break;
        }

        // Bordered Newton step on (phi, beta).
        let weights = phi.quad_weights();
        let mut mat = energy_hessian(phi, params, f, eps);
        // d/dphi of -beta v.
        for i in 0..n {
            mat.add(
                i,
                i,
                -beta * r * (r - 1.0) * weights[i] * phi.values[i].powf(r - 2.0),
            );
        }
        let resid: Vec<f64> = g.iter().zip(&v).map(|(gi, vi)| -(gi - beta * vi)).collect();
        let c_col: Vec<f64> = v.iter().map(|vi| -vi).collect();
        let d_row = v.clone();
        let e = vec![vec![0.0]];
        let step = crate::banded::solve_bordered(
            mat,
            &[c_col],
            &[d_row],
            &e,
            &resid,
            &[-(mass - 1.0)],
        );
        let (dphi, dbeta) = match step {
            Ok(s) => s,
            Err(_) => break,
        };

        // Damp on positivity and on the stationarity residual.
        let mut s = 1.0;
        let mut placed = false;
        for _ in 0..30 {
            let trial = GridFunction {
                domain: phi.domain,
                values: phi
                    .values
                    .iter()
                    .zip(&dphi)
                    .map(|(p, d)| p + s * d)
                    .collect(),
            };
            if trial.min() > cfg.positivity_floor {
                let beta_trial = beta + s * dbeta[0];
                let (_, _, _, trial_sup) = stationarity(&trial, beta_trial);
                if trial_sup <= (1.0 - 1e-4 * s) * res_sup || trial_sup <= cfg.grad_tol {
                    *phi = trial;
                    beta = beta_trial;
                    placed = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if !placed {
            break;
        }
    }
    *phi = best;
    Ok(best_grad)
}

/// Solve the decoupled problem by projected energy descent with
/// eps-continuation. Returns the normalized positive solution with its
/// multiplier, plus the descent trace.
pub fn solve_rlaplace(
    domain: DomainSpec,
    params: &HamiltonianParams,
    f: &Coupling,
    cfg: &SolverConfig,
) -> Result<(PhiSolution, SolveTrace)> {
    cfg.validate()?;
    let r = params.r;
    let n = cfg.n;

    let mut phi = normalize_phi(&GridFunction::constant(domain, n, 1.0)?, r);
    let mut trace = SolveTrace {
        uniqueness_guaranteed: f.monotone_flag,
        singular_drift: params.r_conj < 2.0,
        ..SolveTrace::default()
    };

    let n_stages = cfg.eps_schedule.len();
    for (stage_idx, &eps) in cfg.eps_schedule.iter().enumerate() {
        let is_final = stage_idx + 1 == n_stages;
        // Continuation stages only need to hand the next stage a good
        // iterate; the configured target binds at the final eps. Either way
        // the target cannot sit below the gradient evaluation floor.
        let base_tol = if is_final {
            cfg.grad_tol
        } else {
            cfg.grad_tol.max(1e-6)
        };
        let mut stage = EpsStage {
            eps,
            iterations: 0,
            energies: vec![discrete_energy(&phi, params, f, eps)],
            final_projected_grad: f64::NAN,
        };
        let mut step = cfg.step0;
        let mut converged = false;
        let mut stalled = false;
        // Creep watch: when 200 iterations shrink the projected gradient by
        // less than half, descent has entered its asymptotic crawl and the
        // Newton polish takes over.
        let mut watch_grad = f64::INFINITY;
        let mut watch_iter = 0usize;

        for it in 0..cfg.max_iters {
            let g = energy_gradient(&phi, params, f, eps);
            let v: Vec<f64> = phi
                .quad_weights()
                .iter()
                .zip(&phi.values)
                .map(|(w, p)| r * w * p.powf(r - 1.0))
                .collect();
            let gproj_sup = projected_gradient_sup(&g, &v);
            stage.final_projected_grad = gproj_sup;
            let stage_tol = base_tol.max(gradient_eval_floor(&phi, params, eps));
            if gproj_sup <= stage_tol {
                converged = true;
                break;
            }
            if it >= watch_iter + 200 {
                if gproj_sup > 0.5 * watch_grad {
                    stalled = true;
                    break;
                }
                watch_grad = gproj_sup;
                watch_iter = it;
            } else if it == 0 {
                watch_grad = gproj_sup;
            }

            // Descent direction: P-preconditioned gradient, projected so the
            // step is tangent to the constraint manifold.
            let prec = Preconditioner::build(&phi, params, eps)?;
            let pg = prec.apply_inverse(&g);
            let pv = prec.apply_inverse(&v);
            let theta = dot(&v, &pg) / dot(&v, &pv);
            let dir: Vec<f64> = pg.iter().zip(&pv).map(|(a, b)| a - theta * b).collect();
            let slope = dot(&g, &dir);
            if !(slope > 0.0) || !slope.is_finite() {
                stalled = true;
                break;
            }

            let e0 = *stage.energies.last().unwrap();
            let mut s = step;
            let mut committed = false;
            let mut first_try = true;
            for _ in 0..60 {
                let trial = GridFunction {
                    domain,
                    values: phi
                        .values
                        .iter()
                        .zip(&dir)
                        .map(|(p, d)| p - s * d)
                        .collect(),
                };
                if trial.min() > cfg.positivity_floor {
                    let cand = normalize_phi(&trial, r);
                    if cand.min() > cfg.positivity_floor {
                        let e1 = discrete_energy(&cand, params, f, eps);
                        if e1 <= e0 - 1e-4 * s * slope {
                            phi = cand;
                            stage.energies.push(e1);
                            committed = true;
                            break;
                        }
                    }
                }
                s *= 0.5;
                first_try = false;
            }
            if !committed {
                // Energy differences have dropped below floating-point
                // resolution; hand over to the local Newton polish.
                stalled = true;
                break;
            }
            step = if first_try { (s * 1.5).min(4.0) } else { s };
            stage.iterations += 1;
            trace.iterations += 1;
        }

        if !converged && (stalled || is_final) {
            let gp = kkt_polish(&mut phi, params, f, eps, cfg)?;
            stage.final_projected_grad = gp;
            converged = gp <= base_tol.max(gradient_eval_floor(&phi, params, eps));
        }
        if !converged && is_final {
            let resid = stage.final_projected_grad;
            trace.eps_stages.push(stage);
            let iterations = trace.iterations;
            return Err(Error::NonConvergence {
                what: format!("energy descent (eps = {eps:.1e})"),
                residual: resid,
                iterations,
                trace: Some(Box::new(trace)),
            });
        }
        if let Ok(lambda) = lambda_from_phi(&phi, params, f) {
            trace.lambda_history.push(lambda);
        }
        trace.eps_stages.push(stage);
    }
    phi = normalize_phi(&phi, r);

    if !(phi.min() > cfg.positivity_floor) {
        return Err(Error::Positivity(format!(
            "descent lost positivity: min phi = {}",
            phi.min()
        )));
    }

    let lambda = lambda_from_phi(&phi, params, f)?;
    // Unregularized weak residual of the returned solution.
    let g0 = energy_gradient(&phi, params, f, 0.0);
    let wts = phi.quad_weights();
    let resid = g0
        .iter()
        .enumerate()
        .map(|(i, gi)| gi - lambda * wts[i] * phi.values[i].powf(r - 1.0))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    trace.final_weak_residual = resid;

    let sol = PhiSolution::new(phi, lambda, r)?;
    Ok((sol, trace))
}

/// Independent quadratic-case path: for `r = 2` the problem is a linear
/// eigenvalue problem once the coupling is frozen, so the ground state can
/// be found by inverse power iteration on `(mu K + W V) phi = lambda W phi`,
/// refreshing `V = f(x, phi^2)` in an outer loop.
pub fn quadratic_eigen_solve(
    domain: DomainSpec,
    params: &HamiltonianParams,
    f: &Coupling,
    n: usize,
) -> Result<(GridFunction, f64)> {
    if (params.r - 2.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "eigen path needs r = 2, got r = {}",
            params.r
        )));
    }
    let mut phi = normalize_phi(&GridFunction::constant(domain, n, 1.0)?, 2.0);
    let weights = phi.quad_weights();
    let h = phi.h();
    let mut lambda = 0.0;

    for _outer in 0..400 {
        let v_pot: Vec<f64> = (0..n)
            .map(|i| f.eval(phi.node(i), phi.values[i] * phi.values[i]))
            .collect();
        let sigma = v_pot.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;

        // A - sigma W, tridiagonal.
        let mut mat = crate::banded::BandedMatrix::new(n, 1, 1);
        for i in 0..n {
            let mut diag = weights[i] * (v_pot[i] - sigma);
            if i > 0 {
                let c = params.mu * phi.midpoint_weight(i - 1) / h;
                diag += c;
                mat.set(i, i - 1, -c);
            }
            if i < n - 1 {
                let c = params.mu * phi.midpoint_weight(i) / h;
                diag += c;
                mat.set(i, i + 1, -c);
            }
            mat.set(i, i, diag);
        }
        let lu = mat.factorize()?;

        // Inverse power iteration toward the ground state.
        let mut psi = phi.clone();
        let mut rho_prev = f64::INFINITY;
        for _ in 0..500 {
            let rhs: Vec<f64> = weights.iter().zip(&psi.values).map(|(w, p)| w * p).collect();
            let y = lu.solve(&rhs);
            let gf = GridFunction {
                domain,
                values: y,
            };
            psi = normalize_phi(&gf, 2.0);
            if psi.values.iter().sum::<f64>() < 0.0 {
                psi = psi.map(|v| -v);
            }
            // Rayleigh quotient in the assembled metric.
            let d = differentiate_midpoint(&psi);
            let mut num = 0.0;
            for (k, dk) in d.iter().enumerate() {
                num += h * psi.midpoint_weight(k) * dk * dk * params.mu;
            }
            for i in 0..n {
                num += weights[i] * v_pot[i] * psi.values[i] * psi.values[i];
            }
            let rho = num;
            if (rho - rho_prev).abs() <= 1e-14 * rho.abs().max(1.0) {
                rho_prev = rho;
                break;
            }
            rho_prev = rho;
        }
        lambda = rho_prev;

        let change = phi
            .values
            .iter()
            .zip(&psi.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        phi = psi;
        if change <= 1e-12 {
            break;
        }
    }

    if !(phi.min() > 0.0) {
        return Err(Error::Positivity(
            "eigen iteration returned a sign-changing state".into(),
        ));
    }
    Ok((phi, lambda))
}
