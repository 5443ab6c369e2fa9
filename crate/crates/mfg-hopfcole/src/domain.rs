//! Domains, uniform grids, quadrature, and finite differences.
//!
//! Two geometries are supported: an interval `(a, b)` with Neumann lateral
//! conditions, and a radial ball of radius `R` in dimension `d` where all
//! fields depend on `rho = |x|` only. Radial integrals carry the full
//! angular factor, so `integrate` of a density is the true d-dimensional
//! integral and mass normalization means what it says.

use crate::error::{Error, Result};

/// Surface area of the unit sphere in `R^d`: `omega_1 = 2`, `omega_2 = 2 pi`,
/// `omega_d = 2 pi / (d-2) * omega_{d-2}`.
pub fn unit_sphere_area(d: usize) -> f64 {
    match d {
        0 => panic!("dimension must be at least 1"),
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (d as f64 - 2.0) * unit_sphere_area(d - 2),
    }
}

/// The spatial domain of an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    /// Interval `(a, b)`, `a < b`, with Neumann conditions at both ends.
    Interval { a: f64, b: f64 },
    /// Ball `{ |x| < radius }` in `R^dim`; fields are radial, the grid
    /// coordinate is `rho in [0, radius]`.
    RadialBall { radius: f64, dim: usize },
}

impl DomainSpec {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("interval needs a < b, got ({a}, {b})")));
        }
        Ok(DomainSpec::Interval { a, b })
    }

    pub fn radial_ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
        }
        if dim < 1 {
            return Err(Error::Domain("ball dimension must be at least 1".into()));
        }
        Ok(DomainSpec::RadialBall { radius, dim })
    }

    /// Left end of the grid coordinate (`a`, or `0` for a ball).
    pub fn coord_start(&self) -> f64 {
        match *self {
            DomainSpec::Interval { a, .. } => a,
            DomainSpec::RadialBall { .. } => 0.0,
        }
    }

    /// Right end of the grid coordinate (`b`, or `radius`).
    pub fn coord_end(&self) -> f64 {
        match *self {
            DomainSpec::Interval { b, .. } => b,
            DomainSpec::RadialBall { radius, .. } => radius,
        }
    }

    /// Volume weight `w(x)` against which all integrals are taken:
    /// `1` on an interval, `omega_d rho^{d-1}` on a ball.
    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            DomainSpec::Interval { .. } => 1.0,
            DomainSpec::RadialBall { dim, .. } => {
                unit_sphere_area(dim) * x.powi(dim as i32 - 1)
            }
        }
    }

    /// Exact measure of the domain (`b - a`, or `omega_d R^d / d`).
    pub fn volume(&self) -> f64 {
        match *self {
            DomainSpec::Interval { a, b } => b - a,
            DomainSpec::RadialBall { radius, dim } => {
                unit_sphere_area(dim) * radius.powi(dim as i32) / dim as f64
            }
        }
    }
}

/// Nodal values of a scalar field on the uniform grid of its domain.
///
/// Nodes are `x_i = start + i h`, `h = (end - start)/(n-1)`, endpoints
/// included; on a ball, node 0 sits at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub domain: DomainSpec,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: DomainSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::Domain(format!(
                "grid needs at least 3 nodes, got {}",
                values.len()
            )));
        }
        Ok(Self { domain, values })
    }

    /// Constant field.
    pub fn constant(domain: DomainSpec, n: usize, value: f64) -> Result<Self> {
        Self::new(domain, vec![value; n])
    }

    /// Sample `f` at the nodes.
    pub fn from_fn(domain: DomainSpec, n: usize, f: impl FnMut(f64) -> f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("grid needs at least 3 nodes, got {n}")));
        }
        let g = GridFunction {
            domain,
            values: vec![0.0; n],
        };
        let values = g.nodes().map(f).collect();
        Ok(GridFunction { domain, values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        (self.domain.coord_end() - self.domain.coord_start()) / (self.n() as f64 - 1.0)
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.domain.coord_start() + i as f64 * self.h()
    }

    /// Iterator over node coordinates.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n()).map(|i| self.node(i))
    }

    /// Coordinate of the midpoint of cell `k` (between nodes `k` and `k+1`).
    pub fn midpoint(&self, k: usize) -> f64 {
        self.domain.coord_start() + (k as f64 + 0.5) * self.h()
    }

    /// Trapezoidal node weights `c_i w(x_i)`; the sum is the discrete volume.
    /// On a ball with `d >= 2` the origin node carries zero weight because
    /// `w(0) = 0`.
    pub fn quad_weights(&self) -> Vec<f64> {
        let n = self.n();
        let h = self.h();
        (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 { 0.5 * h } else { h };
                c * self.domain.weight(self.node(i))
            })
            .collect()
    }

    /// Volume weight at the midpoint of cell `k`.
    pub fn midpoint_weight(&self, k: usize) -> f64 {
        self.domain.weight(self.midpoint(k))
    }

    /// Assert another function lives on the same grid.
    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.domain != other.domain || self.n() != other.n() {
            return Err(Error::ShapeMismatch(format!(
                "grids differ: {:?} ({} nodes) vs {:?} ({} nodes)",
                self.domain,
                self.n(),
                other.domain,
                other.n()
            )));
        }
        Ok(())
    }

    /// Pointwise map.
    pub fn map(&self, f: impl FnMut(f64) -> f64) -> GridFunction {
        GridFunction {
            domain: self.domain,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Weighted trapezoidal quadrature `sum_i c_i w(x_i) g_i`; exact for affine
/// integrands on an interval.
pub fn integrate(g: &GridFunction) -> f64 {
    g.quad_weights()
        .iter()
        .zip(&g.values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Derivative at the `n-1` cell midpoints, `(g_{k+1} - g_k)/h`; the natural
/// location for flux evaluation. Exact for quadratics at the midpoint.
pub fn differentiate_midpoint(g: &GridFunction) -> Vec<f64> {
    let h = g.h();
    g.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

/// Nodal derivative: central differences inside, one-sided second-order
/// stencils at the two endpoints.
pub fn differentiate_nodal(g: &GridFunction) -> GridFunction {
    let n = g.n();
    let h = g.h();
    let v = &g.values;
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    GridFunction {
        domain: g.domain,
        values: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn unit_interval(n: usize) -> DomainSpec {
        let _ = n;
        DomainSpec::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(unit_sphere_area(1), 2.0);
        assert_relative_eq!(unit_sphere_area(2), 2.0 * std::f64::consts::PI);
        assert_relative_eq!(unit_sphere_area(3), 4.0 * std::f64::consts::PI);
        assert_relative_eq!(
            unit_sphere_area(4),
            2.0 * std::f64::consts::PI * std::f64::consts::PI
        );
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(DomainSpec::interval(1.0, 1.0).is_err());
        assert!(DomainSpec::radial_ball(0.0, 2).is_err());
        assert!(DomainSpec::radial_ball(1.0, 0).is_err());
    }

    #[test]
    fn integrate_unit_constant() {
        let g = GridFunction::constant(unit_interval(11), 11, 1.0).unwrap();
        assert_relative_eq!(integrate(&g), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn integrate_affine_exact() {
        let g = GridFunction::from_fn(unit_interval(9), 9, |x| x).unwrap();
        assert_relative_eq!(integrate(&g), 0.5, max_relative = 1e-14);
        let g2 = GridFunction::from_fn(unit_interval(9), 9, |x| 3.0 * x - 1.0).unwrap();
        assert_relative_eq!(integrate(&g2), 0.5, max_relative = 1e-13);
    }

    #[test]
    fn integrate_ball_volume() {
        // Unit constant over the unit ball in 3d: volume 4 pi / 3 to O(h^2).
        let dom = DomainSpec::radial_ball(1.0, 3).unwrap();
        let n = 201;
        let g = GridFunction::constant(dom, n, 1.0).unwrap();
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        let h = g.h();
        assert_abs_diff_eq!(integrate(&g), exact, epsilon = 2.0 * h * h * exact);
        assert_relative_eq!(dom.volume(), exact, max_relative = 1e-15);
    }

    #[test]
    fn origin_node_weightless_for_d_ge_2() {
        let dom = DomainSpec::radial_ball(1.0, 2).unwrap();
        let g = GridFunction::constant(dom, 5, 1.0).unwrap();
        assert_eq!(g.quad_weights()[0], 0.0);
        // d = 1 keeps the endpoint weight (two half-lines).
        let dom1 = DomainSpec::radial_ball(1.0, 1).unwrap();
        let g1 = GridFunction::constant(dom1, 5, 1.0).unwrap();
        assert!(g1.quad_weights()[0] > 0.0);
        assert_relative_eq!(integrate(&g1), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = GridFunction::constant(unit_interval(17), 17, 3.25).unwrap();
        assert!(differentiate_midpoint(&g).iter().all(|&d| d == 0.0));
        assert!(differentiate_nodal(&g).values.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn midpoint_derivative_exact_for_quadratics() {
        let g = GridFunction::from_fn(unit_interval(33), 33, |x| x * x).unwrap();
        let d = differentiate_midpoint(&g);
        for (k, dk) in d.iter().enumerate() {
            assert_relative_eq!(*dk, 2.0 * g.midpoint(k), max_relative = 1e-12);
        }
    }

    #[test]
    fn nodal_derivative_second_order_for_sine() {
        // Richardson slope across three grids should be about 2.
        let err = |n: usize| {
            let g = GridFunction::from_fn(unit_interval(n), n, f64::sin).unwrap();
            let d = differentiate_nodal(&g);
            d.values
                .iter()
                .enumerate()
                .map(|(i, v)| (v - g.node(i).cos()).abs())
                .fold(0.0f64, f64::max)
        };
        let (e1, e2, e3) = (err(65), err(129), err(257));
        let s1 = (e1 / e2).ln() / 2.0f64.ln();
        let s2 = (e2 / e3).ln() / 2.0f64.ln();
        assert!(s1 > 1.9 && s1 < 2.1, "slope {s1}");
        assert!(s2 > 1.9 && s2 < 2.1, "slope {s2}");
    }

    proptest! {
        /// Fundamental theorem check: integrating the nodal derivative of a
        /// smooth sample recovers the endpoint difference to O(h^2).
        #[test]
        fn integral_of_derivative(a0 in -1.0f64..1.0, a1 in -1.0f64..1.0, a2 in -1.0f64..1.0) {
            let n = 129;
            let dom = unit_interval(n);
            let f = |x: f64| a0 * (2.0 * x).sin() + a1 * x * x + a2 * (x).exp();
            let g = GridFunction::from_fn(dom, n, f).unwrap();
            let d = differentiate_nodal(&g);
            let lhs = integrate(&d);
            let rhs = f(1.0) - f(0.0);
            let h = g.h();
            prop_assert!((lhs - rhs).abs() <= 20.0 * h * h);
        }

        /// Quadrature positivity.
        #[test]
        fn quadrature_positive(vals in proptest::collection::vec(0.0f64..10.0, 3..40)) {
            let dom = unit_interval(vals.len());
            let g = GridFunction::new(dom, vals).unwrap();
            prop_assert!(integrate(&g) >= 0.0);
        }
    }
}
