//! Direct Newton solver for the coupled stationary system.
//!
//! The discrete unknowns are the stacked vector `(u, m, lambda)` of length
//! `2n + 1`. The equations are the nodal Bellman residuals, the weak
//! Kolmogorov residuals against every nodal hat function (one interior row
//! replaced by the mass normalization, since the hat residuals sum to zero
//! identically), and the gauge `int u = 0` pinning the additive constant of
//! `u`. The Jacobian is banded apart from the ergodic-constant column and
//! the two constraint rows, which are handled by block elimination.
//!
//! This solver never sees the transformed problem, which makes it the
//! brute-force reference against which the decoupled path and the change of
//! variables are validated.

use crate::banded::{solve_bordered, BandedMatrix};
use crate::coupling::Coupling;
use crate::domain::{DomainSpec, GridFunction};
use crate::error::{Error, Result};
use crate::params::HamiltonianParams;
use crate::rlaplace::{SolveTrace, SolverConfig};
use crate::transform::MFGSolution;

/// Drift-smoothness classification of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianRegime {
    /// `r' >= 2`: the optimal drift is differentiable and the scheme is
    /// second-order.
    Smooth,
    /// `1 < r' < 2`: the drift is only Holder at critical points of `u`;
    /// the Newton linearization uses a regularized slope and results are
    /// first-order accurate.
    SingularDrift,
}

/// Classify the instance per the growth exponent of the Hamiltonian.
pub fn smooth_hamiltonian_guard(params: &HamiltonianParams) -> HamiltonianRegime {
    if params.r_conj >= 2.0 {
        HamiltonianRegime::Smooth
    } else {
        HamiltonianRegime::SingularDrift
    }
}

/// Three-point Laplacian stencil coefficients `(c_prev, c_self, c_next)` at
/// node `i`, with Neumann ghost reflection at the ends and the conservative
/// radial form `rho^{1-d} (rho^{d-1} u')'` on a ball.
fn laplacian_stencil(g: &GridFunction, i: usize) -> (f64, f64, f64) {
    let n = g.n();
    let h = g.h();
    let h2 = h * h;
    match g.domain {
        DomainSpec::Interval { .. } => {
            if i == 0 {
                (0.0, -2.0 / h2, 2.0 / h2)
            } else if i == n - 1 {
                (2.0 / h2, -2.0 / h2, 0.0)
            } else {
                (1.0 / h2, -2.0 / h2, 1.0 / h2)
            }
        }
        DomainSpec::RadialBall { dim, .. } => {
            let dm1 = dim as i32 - 1;
            if i == 0 {
                // By symmetry the operator at the origin is d * u''(0).
                let c = 2.0 * dim as f64 / h2;
                (0.0, -c, c)
            } else {
                let rho = g.node(i);
                let a_minus = (rho - 0.5 * h).powi(dm1) / (rho.powi(dm1) * h2);
                let a_plus = (rho + 0.5 * h).powi(dm1) / (rho.powi(dm1) * h2);
                if i == n - 1 {
                    // Ghost reflection u_n = u_{n-2}.
                    (a_plus + a_minus, -(a_plus + a_minus), 0.0)
                } else {
                    (a_minus, -(a_minus + a_plus), a_plus)
                }
            }
        }
    }
}

fn apply_laplacian(g: &GridFunction, i: usize) -> f64 {
    let (cp, cs, cn) = laplacian_stencil(g, i);
    let v = &g.values;
    let mut out = cs * v[i];
    if cp != 0.0 {
        out += cp * v[i - 1];
    }
    if cn != 0.0 {
        out += cn * v[i + 1];
    }
    out
}

/// Central nodal gradient with ghost reflection: zero at both boundary
/// nodes, `(u_{i+1} - u_{i-1}) / 2h` inside.
fn central_gradient(g: &GridFunction, i: usize) -> f64 {
    let n = g.n();
    if i == 0 || i == n - 1 {
        0.0
    } else {
        (g.values[i + 1] - g.values[i - 1]) / (2.0 * g.h())
    }
}

/// Pointwise Bellman residual `-nu Lap u + H(Du) + lambda - f(x, m)` at
/// every node.
pub fn hjb_residual(
    u: &GridFunction,
    m: &GridFunction,
    lambda: f64,
    params: &HamiltonianParams,
    f: &Coupling,
) -> Result<GridFunction> {
    u.check_same_grid(m)?;
    let n = u.n();
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let lap = apply_laplacian(u, i);
        let du = central_gradient(u, i);
        let x = u.node(i);
        vals.push(-params.nu * lap + params.hamiltonian(du) + lambda - f.eval(x, m.values[i]));
    }
    Ok(GridFunction {
        domain: u.domain,
        values: vals,
    })
}

/// Per-cell transport flux `F_k = nu Dm + h0 |Du|^{r'-2} Du m` at midpoints,
/// with `m` averaged onto midpoints.
fn transport_fluxes(u: &GridFunction, m: &GridFunction, params: &HamiltonianParams) -> Vec<f64> {
    let h = u.h();
    let n = u.n();
    let mut fl = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let du = (u.values[k + 1] - u.values[k]) / h;
        let dm = (m.values[k + 1] - m.values[k]) / h;
        let m_mid = 0.5 * (m.values[k] + m.values[k + 1]);
        fl.push(params.nu * dm + params.hamiltonian_gradient(du) * m_mid);
    }
    fl
}

/// Weak Kolmogorov residual against every nodal hat function (boundary hats
/// included, matching weak Neumann conditions). Entry `i` is
/// `w_{i-1/2} F_{i-1} - w_{i+1/2} F_i` with out-of-range fluxes zero, so the
/// full vector sums to zero identically.
pub fn kolmogorov_weak_residual(
    u: &GridFunction,
    m: &GridFunction,
    params: &HamiltonianParams,
) -> Result<Vec<f64>> {
    u.check_same_grid(m)?;
    let n = u.n();
    let fl = transport_fluxes(u, m, params);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut k = 0.0;
        if i > 0 {
            k += u.midpoint_weight(i - 1) * fl[i - 1];
        }
        if i < n - 1 {
            k -= u.midpoint_weight(i) * fl[i];
        }
        out.push(k);
    }
    Ok(out)
}

/// Stacked Newton unknowns: the vector (u, m, lambda) of length 2n + 1,
/// with the gauge `int u = 0` fixing the additive constant of u.
#[derive(Clone)]
struct CoupledSystemState {
    u: GridFunction,
    m: GridFunction,
    lambda: f64,
}

struct SystemLayout {
    n: usize,
    /// Index of the Kolmogorov row replaced by the normalization.
    i0: usize,
    /// Index of the grounded `u` column moved to the border.
    j0: usize,
}

impl SystemLayout {
    fn new(n: usize) -> Self {
        Self {
            n,
            i0: n / 2,
            j0: n / 2,
        }
    }

    fn core_size(&self) -> usize {
        2 * self.n - 1
    }

    fn row_hjb(&self, i: usize) -> usize {
        2 * i - usize::from(i > self.i0)
    }

    fn row_k(&self, i: usize) -> usize {
        debug_assert!(i != self.i0);
        2 * i + 1 - usize::from(i > self.i0)
    }

    /// Core column of `u_j`, or `None` when `j` is the grounded column.
    fn col_u(&self, j: usize) -> Option<usize> {
        if j == self.j0 {
            None
        } else {
            Some(2 * j - usize::from(j > self.j0))
        }
    }

    fn col_m(&self, j: usize) -> usize {
        // The removed u column sits at interleaved position 2 j0, so every
        // m column from j0 on shifts down by one.
        2 * j + 1 - usize::from(j >= self.j0)
    }
}

/// Residual in core-plus-border layout. Returns `(core, border)` where the
/// border entries are the normalization and gauge residuals.
fn assemble_residual(
    state: &CoupledSystemState,
    params: &HamiltonianParams,
    f: &Coupling,
    theta: f64,
    layout: &SystemLayout,
    weights: &[f64],
) -> (Vec<f64>, [f64; 2]) {
    let n = layout.n;
    let mut core = vec![0.0; layout.core_size()];
    let hjb = {
        // Inline scaled coupling: theta * f.
        let mut vals = Vec::with_capacity(n);
        for i in 0..n {
            let lap = apply_laplacian(&state.u, i);
            let du = central_gradient(&state.u, i);
            let x = state.u.node(i);
            vals.push(
                -params.nu * lap + params.hamiltonian(du) + state.lambda
                    - theta * f.eval(x, state.m.values[i]),
            );
        }
        vals
    };
    let kw = kolmogorov_weak_residual(&state.u, &state.m, params).expect("same grid");
    for i in 0..n {
        core[layout.row_hjb(i)] = hjb[i];
        if i != layout.i0 {
            core[layout.row_k(i)] = kw[i];
        }
    }
    let mass: f64 = weights
        .iter()
        .zip(&state.m.values)
        .map(|(w, v)| w * v)
        .sum();
    let gauge: f64 = weights
        .iter()
        .zip(&state.u.values)
        .map(|(w, v)| w * v)
        .sum();
    (core, [mass - 1.0, gauge])
}

fn residual_sup(core: &[f64], border: &[f64; 2]) -> f64 {
    core.iter()
        .chain(border.iter())
        .fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Floating-point floor for evaluating the stacked residual at `state`.
///
/// The Laplacian stencil amplifies representation rounding of `u` by the
/// sum of its coefficients (`~ 4/h^2` on an interval), and the transport
/// flux differences amplify `m` rounding by `1/h`; no iteration can drive
/// the computed residual below this level.
fn residual_eval_floor(state: &CoupledSystemState, params: &HamiltonianParams) -> f64 {
    let n = state.u.n();
    let h = state.u.h();
    let u_sup = state.u.sup_norm();
    let m_sup = state.m.sup_norm();
    let mut lap_coef = 0.0f64;
    let mut w_max = 0.0f64;
    let mut g_sup = 0.0f64;
    for i in 0..n {
        let (cp, cs, cn) = laplacian_stencil(&state.u, i);
        lap_coef = lap_coef.max(cp.abs() + cs.abs() + cn.abs());
        if i < n - 1 {
            w_max = w_max.max(state.u.midpoint_weight(i));
            let du = (state.u.values[i + 1] - state.u.values[i]) / h;
            g_sup = g_sup.max(params.hamiltonian_gradient(du).abs());
        }
    }
    let hjb_term = params.nu * lap_coef * u_sup + state.lambda.abs();
    let k_term = 2.0 * w_max * (2.0 * params.nu * m_sup / h + g_sup * m_sup);
    8.0 * f64::EPSILON * hjb_term.max(k_term).max(1.0)
}

/// Banded core plus border columns, border rows, and corner block.
type BorderedJacobian = (BandedMatrix, Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Assemble the bordered Newton matrix at the current state.
#[allow(clippy::too_many_arguments)]
fn assemble_jacobian(
    state: &CoupledSystemState,
    params: &HamiltonianParams,
    f: &Coupling,
    theta: f64,
    layout: &SystemLayout,
    weights: &[f64],
    eps_jac: f64,
) -> BorderedJacobian {
    let n = layout.n;
    let h = state.u.h();
    let nc = layout.core_size();
    let mut mat = BandedMatrix::new(nc, 4, 4);
    let mut c_u = vec![0.0; nc]; // border column: d/d u_{j0}
    let mut c_lambda = vec![0.0; nc]; // border column: d/d lambda

    // Bellman rows.
    for i in 0..n {
        let row = layout.row_hjb(i);
        let (cp, cs, cn) = laplacian_stencil(&state.u, i);
        let du = central_gradient(&state.u, i);
        let g_du = params.hamiltonian_gradient(du);
        // d/du_j of -nu Lap + H(Du_central).
        let put_u = |j: usize, v: f64, mat: &mut BandedMatrix, c_u: &mut Vec<f64>| {
            if v == 0.0 {
                return;
            }
            match layout.col_u(j) {
                Some(col) => mat.add(row, col, v),
                None => c_u[row] += v,
            }
        };
        if i > 0 {
            let mut v = -params.nu * cp;
            if i < n - 1 {
                v += g_du * (-1.0 / (2.0 * h));
            }
            put_u(i - 1, v, &mut mat, &mut c_u);
        }
        put_u(i, -params.nu * cs, &mut mat, &mut c_u);
        if i < n - 1 {
            let mut v = -params.nu * cn;
            if i > 0 {
                v += g_du * (1.0 / (2.0 * h));
            }
            put_u(i + 1, v, &mut mat, &mut c_u);
        }
        // d/dm_i = -theta f_m.
        let x = state.u.node(i);
        let fm = theta * f.eval_dm(x, state.m.values[i]);
        mat.add(row, layout.col_m(i), -fm);
        c_lambda[row] = 1.0;
    }

    // Kolmogorov rows: derivative of w_{i-1/2} F_{i-1} - w_{i+1/2} F_i.
    let du_mid: Vec<f64> = (0..n - 1)
        .map(|k| (state.u.values[k + 1] - state.u.values[k]) / h)
        .collect();
    for i in 0..n {
        if i == layout.i0 {
            continue;
        }
        let row = layout.row_k(i);
        let add_flux_derivs = |k: usize, sign: f64, mat: &mut BandedMatrix, c_u: &mut Vec<f64>| {
            let w = state.u.midpoint_weight(k) * sign;
            let g_du = params.hamiltonian_gradient(du_mid[k]);
            let gp = params.hamiltonian_hessian_regularized(du_mid[k], eps_jac);
            let m_mid = 0.5 * (state.m.values[k] + state.m.values[k + 1]);
            // d/dm.
            mat.add(row, layout.col_m(k), w * (-params.nu / h + 0.5 * g_du));
            mat.add(row, layout.col_m(k + 1), w * (params.nu / h + 0.5 * g_du));
            // d/du.
            let dv = w * gp * m_mid / h;
            match layout.col_u(k) {
                Some(col) => mat.add(row, col, -dv),
                None => c_u[row] += -dv,
            }
            match layout.col_u(k + 1) {
                Some(col) => mat.add(row, col, dv),
                None => c_u[row] += dv,
            }
        };
        if i > 0 {
            add_flux_derivs(i - 1, 1.0, &mut mat, &mut c_u);
        }
        if i < n - 1 {
            add_flux_derivs(i, -1.0, &mut mat, &mut c_u);
        }
    }

    // Border rows: normalization (over m) and gauge (over u).
    let mut d_norm = vec![0.0; nc];
    let mut d_gauge = vec![0.0; nc];
    for j in 0..n {
        d_norm[layout.col_m(j)] = weights[j];
        if let Some(col) = layout.col_u(j) {
            d_gauge[col] = weights[j];
        }
    }
    let e = vec![vec![0.0, 0.0], vec![weights[layout.j0], 0.0]];

    (mat, vec![c_u, c_lambda], vec![d_norm, d_gauge], e)
}

fn newton_solve(
    domain: DomainSpec,
    params: &HamiltonianParams,
    f: &Coupling,
    theta: f64,
    cfg: &SolverConfig,
    start: CoupledSystemState,
    trace: &mut SolveTrace,
) -> Result<CoupledSystemState> {
    let n = cfg.n;
    let layout = SystemLayout::new(n);
    let weights = start.u.quad_weights();
    let eps_jac = if smooth_hamiltonian_guard(params) == HamiltonianRegime::SingularDrift {
        cfg.final_eps()
    } else {
        0.0
    };

    let mut state = start;
    for _iter in 0..cfg.newton_max_iters {
        let (core_r, border_r) = assemble_residual(&state, params, f, theta, &layout, &weights);
        let rn = residual_sup(&core_r, &border_r);
        trace.residual_norms.push(rn);
        trace.lambda_history.push(state.lambda);
        trace.iterations += 1;
        let tol_eff = cfg.newton_tol.max(residual_eval_floor(&state, params));
        if rn <= tol_eff {
            trace.final_weak_residual = rn;
            return Ok(state);
        }

        let (mat, c_cols, d_rows, e) =
            assemble_jacobian(&state, params, f, theta, &layout, &weights, eps_jac);
        let b1: Vec<f64> = core_r.iter().map(|v| -v).collect();
        let b2 = [-border_r[0], -border_r[1]];
        let (dx, dz) = solve_bordered(mat, &c_cols, &d_rows, &e, &b1, &b2)?;

        // Scatter the step.
        let mut du = vec![0.0; n];
        let mut dm = vec![0.0; n];
        for j in 0..n {
            match layout.col_u(j) {
                Some(col) => du[j] = dx[col],
                None => du[j] = dz[0],
            }
            dm[j] = dx[layout.col_m(j)];
        }
        let dlambda = dz[1];

        // Damped update keeping m strictly positive.
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = CoupledSystemState {
                u: GridFunction {
                    domain,
                    values: state
                        .u
                        .values
                        .iter()
                        .zip(&du)
                        .map(|(a, b)| a + s * b)
                        .collect(),
                },
                m: GridFunction {
                    domain,
                    values: state
                        .m
                        .values
                        .iter()
                        .zip(&dm)
                        .map(|(a, b)| a + s * b)
                        .collect(),
                },
                lambda: state.lambda + s * dlambda,
            };
            if trial.m.min() > 0.0 {
                let (tc, tb) = assemble_residual(&trial, params, f, theta, &layout, &weights);
                let rn_new = residual_sup(&tc, &tb);
                if rn_new <= (1.0 - 1e-4 * s) * rn || rn_new <= tol_eff {
                    // The normalization row is linear, so any damped step
                    // preserves unit mass once the start has it.
                    debug_assert!(tb[0].abs() <= 1e-10, "mass drifted: {}", tb[0]);
                    state = trial;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if !accepted {
            return Err(Error::DampingFailure(format!(
                "no admissible Newton step at residual {rn:.3e} (positivity or descent failed)"
            )));
        }
    }

    let last = trace.residual_norms.last().copied().unwrap_or(f64::NAN);
    Err(Error::NonConvergence {
        what: "coupled Newton".into(),
        residual: last,
        iterations: trace.iterations,
        trace: Some(Box::new(trace.clone())),
    })
}

/// Solve the coupled system by damped Newton with analytic Jacobian.
///
/// The initial guess is the flat state (`u = 0`, `m` the normalized
/// constant, `lambda` the mean cost of that state), which is exact whenever
/// the coupling does not depend on `x`. If Newton fails from the cold start
/// the solver retries through a short continuation ladder in the coupling
/// strength, warm-starting each rung from the previous one.
pub fn solve_coupled(
    domain: DomainSpec,
    params: &HamiltonianParams,
    f: &Coupling,
    cfg: &SolverConfig,
) -> Result<(MFGSolution, SolveTrace)> {
    cfg.validate()?;
    let n = cfg.n;
    let template = GridFunction::constant(domain, n, 0.0)?;
    let weights = template.quad_weights();
    let vol: f64 = weights.iter().sum();

    let cold = |theta: f64| -> CoupledSystemState {
        let m0 = 1.0 / vol;
        let lambda0: f64 = weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * theta * f.eval(template.node(i), m0))
            .sum::<f64>()
            / vol;
        CoupledSystemState {
            u: GridFunction::constant(domain, n, 0.0).unwrap(),
            m: GridFunction::constant(domain, n, m0).unwrap(),
            lambda: lambda0,
        }
    };

    let mut trace = SolveTrace {
        uniqueness_guaranteed: f.monotone_flag,
        singular_drift: smooth_hamiltonian_guard(params) == HamiltonianRegime::SingularDrift,
        ..SolveTrace::default()
    };

    let direct = newton_solve(domain, params, f, 1.0, cfg, cold(1.0), &mut trace);
    let state = match direct {
        Ok(s) => s,
        Err(first_err) => {
            // Adaptive continuation in the coupling strength, warm-started
            // rung to rung: halve the step when a rung fails, grow it back
            // on success. theta = 0 is the cold state exactly.
            let mut trace2 = SolveTrace {
                uniqueness_guaranteed: trace.uniqueness_guaranteed,
                singular_drift: trace.singular_drift,
                ..SolveTrace::default()
            };
            let mut achieved = 0.0f64;
            let mut current = cold(0.0);
            let mut step = 0.25f64;
            let mut rungs = 0;
            while achieved < 1.0 {
                rungs += 1;
                if rungs > 40 {
                    return Err(first_err);
                }
                let theta = (achieved + step).min(1.0);
                match newton_solve(domain, params, f, theta, cfg, current.clone(), &mut trace2) {
                    Ok(s) => {
                        achieved = theta;
                        current = s;
                        step = (step * 2.0).min(0.25);
                    }
                    Err(_) => {
                        step *= 0.5;
                        if step < 1e-3 {
                            return Err(first_err);
                        }
                    }
                }
            }
            trace = trace2;
            current
        }
    };

    let sol = MFGSolution::new(state.u, state.m, state.lambda)?;
    Ok((sol, trace))
}
