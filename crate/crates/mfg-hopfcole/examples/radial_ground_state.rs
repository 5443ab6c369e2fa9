//! Radial geometry: a non-quadratic instance (r = 3, singular drift
//! r' = 1.5) on the unit disk with a radial potential, solved along both
//! paths and compared through the transformation. First-order rates are
//! the documented expectation in this regime.
//!
//! ```bash
//! cargo run --release --example radial_ground_state
//! ```

use mfg_hopfcole::oracle::smooth_hamiltonian_guard;
use mfg_hopfcole::verify::cross_validate;
use mfg_hopfcole::{Coupling, DomainSpec, HamiltonianParams, SolverConfig};

fn main() -> mfg_hopfcole::Result<()> {
    let domain = DomainSpec::radial_ball(1.0, 2)?;
    let params = HamiltonianParams::new(1.0, 3.0, 1.0)?;
    let f = Coupling::linear_plus_potential(
        1.0,
        |rho| 0.5 * (std::f64::consts::PI * rho).cos(),
        "m + 0.5 cos(pi rho)",
    )?;
    let cfg = SolverConfig::with_n(257);

    println!(
        "unit disk, r = 3 (r' = {}), regime {:?}, n = {}",
        params.r_conj,
        smooth_hamiltonian_guard(&params),
        cfg.n
    );
    let cv = cross_validate(domain, &params, &f, &cfg)?;
    let h = cv.grid_h;
    println!("lambda coupled / decoupled : {:.10} / {:.10}", cv.oracle.lambda, cv.decoupled.lambda);
    println!("sup |m - phi^3|            : {:.3e}   (10 h = {:.3e})", cv.sup_m_diff, 10.0 * h);
    println!("sup |Du - reconstructed|   : {:.3e}", cv.sup_du_diff);
    println!("density range              : [{:.6}, {:.6}]", cv.oracle.m.min(), cv.oracle.m.max());
    println!("\nresidual reports (sup norms):");
    for rep in &cv.reports {
        println!("  {:16} [{:base$}] {:.3e}", rep.kind.label(), rep.instance, rep.sup_norm, base = 24);
    }
    println!("\nnote: the origin node of the reconstructed solution carries an O(1)");
    println!("pointwise Bellman defect by construction (zero-weight origin quadrature);");
    println!("all weak functionals above converge.");
    Ok(())
}
