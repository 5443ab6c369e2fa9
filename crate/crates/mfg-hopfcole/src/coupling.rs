//! Coupling cost `f(x, m)` between the two equations of the system.
//!
//! A coupling carries its pointwise value, an antiderivative in `m` (the
//! potential entering the energy formulation), and a monotonicity flag.
//! Monotone couplings are the uniqueness regime in which cross-validation
//! between the coupled and decoupled paths is meaningful.

use crate::domain::GridFunction;
use crate::error::{Error, Result};

type CostFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Coupling cost `f(x, m)` with its `m`-antiderivative.
pub struct Coupling {
    eval: CostFn,
    primitive: CostFn,
    /// Asserts `f` is nondecreasing in `m`.
    pub monotone_flag: bool,
    /// Human-readable description for summaries.
    pub label: String,
}

impl Coupling {
    /// Build from closures; `primitive` must satisfy `d/dm primitive = eval`.
    pub fn new(
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        primitive: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        monotone_flag: bool,
        label: impl Into<String>,
    ) -> Self {
        Self {
            eval: Box::new(eval),
            primitive: Box::new(primitive),
            monotone_flag,
            label: label.into(),
        }
    }

    /// `f(x, m)`.
    pub fn eval(&self, x: f64, m: f64) -> f64 {
        (self.eval)(x, m)
    }

    /// Antiderivative `F(x, m)` with `dF/dm = f`.
    pub fn primitive(&self, x: f64, m: f64) -> f64 {
        (self.primitive)(x, m)
    }

    /// Central-difference `df/dm`, used by the Newton linearization.
    pub fn eval_dm(&self, x: f64, m: f64) -> f64 {
        let d = 1e-7 * (1.0 + m.abs());
        // Keep the stencil on m >= 0 where f is defined.
        if m - d < 0.0 {
            (self.eval(x, m + d) - self.eval(x, m)) / d
        } else {
            (self.eval(x, m + d) - self.eval(x, m - d)) / (2.0 * d)
        }
    }

    /// `f == 0`.
    pub fn zero() -> Self {
        Self::new(|_, _| 0.0, |_, _| 0.0, true, "zero")
    }

    /// `f(x, m) = c m`, `c >= 0`.
    pub fn linear(c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "linear coupling needs coefficient >= 0, got {c}"
            )));
        }
        Ok(Self::new(
            move |_, m| c * m,
            move |_, m| 0.5 * c * m * m,
            true,
            format!("linear c={c}"),
        ))
    }

    /// `f(x, m) = c m^gamma`, `c >= 0`, `gamma > 0`.
    pub fn power(c: f64, gamma: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "power coupling needs coefficient >= 0, got {c}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "power coupling needs exponent > 0, got {gamma}"
            )));
        }
        Ok(Self::new(
            move |_, m| c * m.powf(gamma),
            move |_, m| c * m.powf(gamma + 1.0) / (gamma + 1.0),
            true,
            format!("power c={c} gamma={gamma}"),
        ))
    }

    /// `f(x, m) = c m + V(x)`.
    pub fn linear_plus_potential(
        c: f64,
        potential: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "linear-plus-potential coupling needs coefficient >= 0, got {c}"
            )));
        }
        let v = potential.clone();
        Ok(Self::new(
            move |x, m| c * m + potential(x),
            move |x, m| 0.5 * c * m * m + v(x) * m,
            true,
            label,
        ))
    }

    /// Finite-difference consistency between `primitive` and `eval`, sampled
    /// over the grid and a few density levels. Relative error above `1e-6`
    /// (at `delta = 1e-6`) is reported as a precondition failure.
    pub fn validate(&self, grid: &GridFunction) -> Result<()> {
        let delta = 1e-6;
        for i in (0..grid.n()).step_by((grid.n() / 8).max(1)) {
            let x = grid.node(i);
            for &m in &[0.25, 1.0, 3.0] {
                let fd = (self.primitive(x, m + delta) - self.primitive(x, m)) / delta;
                let f = self.eval(x, m + 0.5 * delta);
                let scale = f.abs().max(1e-9);
                if (fd - f).abs() > 1e-6 * scale.max(1.0) {
                    return Err(Error::Precondition(format!(
                        "coupling primitive inconsistent with eval at x={x}, m={m}: fd={fd}, f={f}"
                    )));
                }
                if self.monotone_flag {
                    let lo = self.eval(x, m);
                    let hi = self.eval(x, m + 0.5);
                    if hi < lo - 1e-12 {
                        return Err(Error::Precondition(format!(
                            "coupling flagged monotone but decreases at x={x}, m={m}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Coupling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Coupling")
            .field("label", &self.label)
            .field("monotone_flag", &self.monotone_flag)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use approx::assert_relative_eq;

    fn grid() -> GridFunction {
        let dom = DomainSpec::interval(0.0, 1.0).unwrap();
        GridFunction::constant(dom, 33, 0.0).unwrap()
    }

    #[test]
    fn builtins_validate() {
        Coupling::zero().validate(&grid()).unwrap();
        Coupling::linear(1.0).unwrap().validate(&grid()).unwrap();
        Coupling::power(2.0, 2.0).unwrap().validate(&grid()).unwrap();
        Coupling::linear_plus_potential(1.0, |x| (2.0 * std::f64::consts::PI * x).sin(), "lpp")
            .unwrap()
            .validate(&grid())
            .unwrap();
    }

    #[test]
    fn inconsistent_primitive_rejected() {
        let bad = Coupling::new(|_, m| m, |_, m| m, true, "bad");
        assert!(bad.validate(&grid()).is_err());
    }

    #[test]
    fn false_monotone_flag_rejected() {
        let bad = Coupling::new(|_, m| -m, |_, m| -0.5 * m * m, true, "bad");
        assert!(bad.validate(&grid()).is_err());
    }

    #[test]
    fn derivative_matches_analytic() {
        let f = Coupling::power(3.0, 2.0).unwrap();
        assert_relative_eq!(f.eval_dm(0.3, 1.5), 9.0, max_relative = 1e-6);
        // One-sided branch near m = 0.
        assert!(f.eval_dm(0.3, 0.0).abs() < 1e-5);
    }

    #[test]
    fn negative_coefficients_rejected() {
        assert!(Coupling::linear(-1.0).is_err());
        assert!(Coupling::power(1.0, 0.0).is_err());
    }
}
