//! Power-Hamiltonian parameter algebra.
//!
//! The Lagrangian `L(a) = (l0/r)|a|^r` with `l0 > 0`, `r > 1` has Legendre
//! transform
//!
//! ```text
//! H(p) = (h0/r') |p|^{r'},   h0 = l0^{1-r'},   r' = r/(r-1)
//! ```
//!
//! and the decoupled quasilinear problem carries the diffusivity
//! `mu = nu (nu r / h0)^{r-1}`. This module holds those exponent and
//! coefficient relations; everything downstream reads them from
//! [`HamiltonianParams`].

use crate::error::{Error, Result};

/// Conjugate exponent `r' = r/(r-1)`, defined for `r > 1`.
///
/// The map is an involution: applying it twice returns `r`.
pub fn conjugate_exponent(r: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "conjugate exponent requires r > 1, got {r}"
        )));
    }
    Ok(r / (r - 1.0))
}

/// Diffusivity `mu = nu (nu r / h0)^{r-1}` of the r-Laplace problem.
pub fn mu_coefficient(nu: f64, r: f64, h0: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("nu must be positive, got {nu}")));
    }
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!("r must exceed 1, got {r}")));
    }
    if !(h0 > 0.0) || !h0.is_finite() {
        return Err(Error::Domain(format!("h0 must be positive, got {h0}")));
    }
    Ok(nu * (nu * r / h0).powf(r - 1.0))
}

/// Viscosity, exponent pair, and coefficients of one Hamiltonian instance.
///
/// Immutable after construction; the derived fields (`r_conj`, `mu`, and
/// `h0` when built from `l0`) are filled in by the constructors so the
/// algebraic relations hold to rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    /// Viscosity `nu > 0`.
    pub nu: f64,
    /// Lagrangian exponent `r > 1` (also the r-Laplace exponent).
    pub r: f64,
    /// Conjugate exponent `r' = r/(r-1)` (Hamiltonian growth).
    pub r_conj: f64,
    /// Hamiltonian coefficient `h0 > 0`.
    pub h0: f64,
    /// Lagrangian coefficient, when the instance was specified through it.
    pub l0: Option<f64>,
    /// Diffusivity `mu = nu (nu r / h0)^{r-1}`.
    pub mu: f64,
}

impl HamiltonianParams {
    /// Build from `(nu, r, h0)`, deriving `r_conj` and `mu`.
    pub fn new(nu: f64, r: f64, h0: f64) -> Result<Self> {
        let r_conj = conjugate_exponent(r)?;
        let mu = mu_coefficient(nu, r, h0)?;
        Ok(Self {
            nu,
            r,
            r_conj,
            h0,
            l0: None,
            mu,
        })
    }

    /// Build from `(nu, r, l0)`, deriving `h0 = l0^{1-r'}`.
    pub fn from_l0(nu: f64, r: f64, l0: f64) -> Result<Self> {
        if !(l0 > 0.0) || !l0.is_finite() {
            return Err(Error::Domain(format!("l0 must be positive, got {l0}")));
        }
        let r_conj = conjugate_exponent(r)?;
        let h0 = l0.powf(1.0 - r_conj);
        let mut p = Self::new(nu, r, h0)?;
        p.l0 = Some(l0);
        Ok(p)
    }

    /// Build from the Hamiltonian growth exponent `r'` instead of `r`.
    pub fn from_r_conj(nu: f64, r_conj: f64, h0: f64) -> Result<Self> {
        let r = conjugate_exponent(r_conj)?;
        Self::new(nu, r, h0)
    }

    /// `H(p) = (h0/r') |p|^{r'}`.
    pub fn hamiltonian(&self, p: f64) -> f64 {
        self.h0 / self.r_conj * p.abs().powf(self.r_conj)
    }

    /// `DH(p) = h0 |p|^{r'-2} p`, written `h0 sign(p) |p|^{r'-1}` so it is
    /// continuous at `p = 0` for every `r' > 1`.
    pub fn hamiltonian_gradient(&self, p: f64) -> f64 {
        self.h0 * signed_pow(p, self.r_conj - 1.0)
    }

    /// `D^2 H(p) = h0 (r'-1) (p^2 + eps^2)^{(r'-2)/2}`; `eps > 0` keeps the
    /// value finite at `p = 0` in the singular-drift regime `r' < 2`.
    pub fn hamiltonian_hessian_regularized(&self, p: f64, eps: f64) -> f64 {
        self.h0 * (self.r_conj - 1.0) * (p * p + eps * eps).powf((self.r_conj - 2.0) / 2.0)
    }

    /// r-Laplace flux `q(d) = |d|^{r-2} d = sign(d) |d|^{r-1}`.
    pub fn rlaplace_flux(&self, d: f64) -> f64 {
        signed_pow(d, self.r - 1.0)
    }

    /// Regularized flux `(d^2 + eps^2)^{(r-2)/2} d` used during continuation.
    pub fn rlaplace_flux_regularized(&self, d: f64, eps: f64) -> f64 {
        (d * d + eps * eps).powf((self.r - 2.0) / 2.0) * d
    }
}

/// `sign(x) |x|^s` with the continuous convention `0 -> 0` for `s > 0`.
pub fn signed_pow(x: f64, s: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn conjugate_of_two_is_two() {
        assert_eq!(conjugate_exponent(2.0).unwrap(), 2.0);
    }

    #[test]
    fn conjugate_arithmetic() {
        assert_relative_eq!(conjugate_exponent(3.0).unwrap(), 1.5, max_relative = 1e-15);
        assert_relative_eq!(conjugate_exponent(1.5).unwrap(), 3.0, max_relative = 1e-15);
    }

    #[test]
    fn conjugate_rejects_r_at_most_one() {
        assert!(conjugate_exponent(1.0).is_err());
        assert!(conjugate_exponent(0.7).is_err());
        assert!(conjugate_exponent(f64::NAN).is_err());
    }

    #[test]
    fn mu_quadratic_gives_two_nu_squared() {
        // r = 2, h0 = 1: mu = 2 nu^2.
        assert_relative_eq!(mu_coefficient(1.0, 2.0, 1.0).unwrap(), 2.0);
        assert_relative_eq!(mu_coefficient(0.5, 2.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn mu_unit_base() {
        // nu r / h0 = 1 so the power collapses.
        assert_relative_eq!(mu_coefficient(1.0, 3.0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn mu_rejects_nonpositive_inputs() {
        assert!(mu_coefficient(0.0, 2.0, 1.0).is_err());
        assert!(mu_coefficient(1.0, 2.0, -1.0).is_err());
    }

    #[test]
    fn l0_h0_relation() {
        let p = HamiltonianParams::from_l0(1.0, 2.0, 4.0).unwrap();
        // r' = 2: h0 = l0^{-1}.
        assert_relative_eq!(p.h0, 0.25, max_relative = 1e-14);
        let l0 = p.l0.unwrap();
        assert_relative_eq!(p.h0, l0.powf(1.0 - p.r_conj), max_relative = 1e-14);
    }

    #[test]
    fn from_r_conj_is_involutive() {
        let p = HamiltonianParams::from_r_conj(1.0, 1.5, 1.0).unwrap();
        assert_relative_eq!(p.r, 3.0, max_relative = 1e-14);
        assert_relative_eq!(p.r_conj, 1.5, max_relative = 1e-14);
    }

    #[test]
    fn hamiltonian_gradient_continuous_at_zero() {
        // r' = 1.5 makes |p|^{r'-2} blow up at 0; the combined form must not.
        let p = HamiltonianParams::new(1.0, 3.0, 1.0).unwrap();
        assert_eq!(p.hamiltonian_gradient(0.0), 0.0);
        assert!(p.hamiltonian_gradient(1e-30).is_finite());
        assert_relative_eq!(p.hamiltonian_gradient(4.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(p.hamiltonian_gradient(-4.0), -2.0, max_relative = 1e-14);
    }

    #[test]
    fn rlaplace_flux_signs() {
        let p = HamiltonianParams::new(1.0, 3.0, 1.0).unwrap();
        assert_relative_eq!(p.rlaplace_flux(2.0), 4.0);
        assert_relative_eq!(p.rlaplace_flux(-2.0), -4.0);
        assert_eq!(p.rlaplace_flux(0.0), 0.0);
    }

    proptest! {
        /// Exponent identities hold across the admissible range of r.
        #[test]
        fn exponent_identities(r in 1.05f64..10.0) {
            let p = HamiltonianParams::new(1.0, r, 1.0).unwrap();
            let rc = p.r_conj;
            prop_assert!((rc - r / (r - 1.0)).abs() <= 1e-14 * rc.abs());
            prop_assert!((1.0 / r + 1.0 / rc - 1.0).abs() <= 1e-14);
            prop_assert!(((rc - 1.0) * (r - 2.0) + rc - 2.0).abs() <= 1e-12);
            prop_assert!(rc > 1.0);
        }

        /// mu relation holds as stored.
        #[test]
        fn mu_relation(nu in 0.05f64..4.0, r in 1.05f64..6.0, h0 in 0.05f64..4.0) {
            let p = HamiltonianParams::new(nu, r, h0).unwrap();
            let expected = nu * (nu * r / h0).powf(r - 1.0);
            prop_assert!((p.mu - expected).abs() <= 1e-14 * expected.abs());
        }
    }
}
