//! Capacitary potential of a prolate spheroid in Euclidean 3-space.
//!
//! In prolate spheroidal coordinates `(ξ, η, φ)` with focal distance `c`,
//! `z = c ξ η` and `ρ = c √((ξ²-1)(1-η²))`. The spheroid with semi-axes
//! `a ≥ b` is `ξ = ξ0 = a/c`, and its exterior potential is
//! `Q0(ξ) / Q0(ξ0)` with `Q0(ξ) = artanh(1/ξ)`. Every level set is a
//! confocal spheroid.

use core::f64::consts::PI;

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpheroidPotential {
    a: f64,
    b: f64,
    focal: f64,
    xi0: f64,
    q0: f64,
    capacity: f64,
}

/// Pointwise data on a level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelPoint {
    pub eta: f64,
    pub grad: f64,
    pub mean_curvature: f64,
}

pub fn spheroid_exterior(a: f64, b: f64) -> Result<SpheroidPotential> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(alloc::format!("spheroid semi-axis b = {b} must be positive")));
    }
    if !(a >= b && a.is_finite()) {
        return Err(Error::domain(alloc::format!("spheroid needs a ≥ b, got a = {a}, b = {b}")));
    }
    let focal = ((a - b) * (a + b)).sqrt();
    if focal == 0.0 {
        return Ok(SpheroidPotential { a, b, focal, xi0: a, q0: 1.0, capacity: a });
    }
    let xi0 = a / focal;
    let q0 = (focal / a).atanh();
    Ok(SpheroidPotential { a, b, focal, xi0, q0, capacity: focal / q0 })
}

impl SpheroidPotential {
    pub fn semi_axes(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn focal_distance(&self) -> f64 {
        self.focal
    }

    pub fn is_sphere(&self) -> bool {
        self.focal == 0.0
    }

    /// Boundary value of the level coordinate: `ξ0` for a spheroid, the
    /// radius `a` for a sphere.
    pub fn boundary_coordinate(&self) -> f64 {
        self.xi0
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Potential at level coordinate `ξ` (the radius, for a sphere).
    pub fn value(&self, xi: f64) -> f64 {
        if self.is_sphere() {
            self.a / xi
        } else {
            (1.0 / xi).atanh() / self.q0
        }
    }

    /// Level coordinate of `{u = t}`.
    pub fn level_coordinate(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::RootNotBracketed { level: t });
        }
        Ok(if self.is_sphere() { self.a / t } else { 1.0 / (t * self.q0).tanh() })
    }

    /// Semi-axes `(major, minor)` of the level surface `ξ`.
    pub fn level_axes(&self, xi: f64) -> (f64, f64) {
        if self.is_sphere() {
            (xi, xi)
        } else {
            (self.focal * xi, self.focal * (xi * xi - 1.0).sqrt())
        }
    }

    /// Data at the point `η ∈ [-1, 1]` of the level surface `ξ`.
    pub fn point(&self, xi: f64, eta: f64) -> LevelPoint {
        let (major, minor) = self.level_axes(xi);
        if self.is_sphere() {
            return LevelPoint { eta, grad: self.a / (xi * xi), mean_curvature: 2.0 / xi };
        }
        let c = self.focal;
        let grad = 1.0 / (self.q0 * c * (xi * xi - 1.0).sqrt() * (xi * xi - eta * eta).sqrt());
        // Principal curvatures of an ellipsoid of revolution, outward normal.
        let q = (1.0 - eta * eta) / (minor * minor) + eta * eta / (major * major);
        let parallel = 1.0 / (minor * minor * q.sqrt());
        let meridian = 1.0 / (major * major * minor * minor * q * q.sqrt());
        LevelPoint { eta, grad, mean_curvature: parallel + meridian }
    }

    /// `H - 2 |Du| / u` at the point `η` of the level surface `ξ`, in a
    /// form that does not cancel as the level sets become round.
    ///
    /// With `s = ξ² - 1`, `D = ξ² - η²` and `Q = artanh(1/ξ)` this is
    /// `(2 (ξ - 1/Q) - ξ (1 - η²) / D) / (c √s √D)`; both terms in the
    /// bracket are `O(1/ξ)` where `H` and `2 |Du| / u` are `O(ξ)`.
    pub fn mean_curvature_excess(&self, xi: f64, eta: f64) -> f64 {
        if self.is_sphere() {
            return 0.0;
        }
        let q = (1.0 / xi).atanh();
        let roundness = xi_artanh_minus_one(xi) / q;
        let s = (xi - 1.0) * (xi + 1.0);
        let d = (xi - eta) * (xi + eta);
        let bracket = 2.0 * roundness - xi * (1.0 - eta) * (1.0 + eta) / d;
        bracket / (self.focal * s.sqrt() * d.sqrt())
    }

    /// Area element per unit `η` (azimuth integrated out).
    fn area_density(&self, xi: f64, eta: f64) -> f64 {
        let c = self.focal;
        2.0 * PI * c * c * (xi * xi - eta * eta).sqrt() * (xi * xi - 1.0).sqrt()
    }

    /// `∫_{ξ} g(point) dσ` over the level surface `ξ`.
    pub fn surface_integral<G: Fn(LevelPoint) -> f64>(&self, xi: f64, g: G) -> Result<f64> {
        self.surface_integral_tol(xi, g, 0.0)
    }

    /// [`surface_integral`](Self::surface_integral) with an absolute
    /// tolerance, for integrands whose positive and negative parts cancel.
    pub fn surface_integral_tol<G: Fn(LevelPoint) -> f64>(&self, xi: f64, g: G, abs_tol: f64) -> Result<f64> {
        if self.is_sphere() {
            return Ok(4.0 * PI * xi * xi * g(self.point(xi, 0.0)));
        }
        let quad = QuadSpec::default().with_rel_tol(1e-13).with_abs_tol(abs_tol);
        // Symmetric in η.
        let half = integrate(|eta| g(self.point(xi, eta)) * self.area_density(xi, eta), 0.0, 1.0, &quad)?;
        Ok(2.0 * half)
    }

    pub fn area(&self, xi: f64) -> Result<f64> {
        self.surface_integral(xi, |_| 1.0)
    }
}

/// `ξ artanh(1/ξ) - 1 = Σ_{k≥1} ξ^(-2k) / (2k + 1)`, summed directly where
/// the closed form cancels.
fn xi_artanh_minus_one(xi: f64) -> f64 {
    let x = 1.0 / xi;
    if x > 0.5 {
        return xi * x.atanh() - 1.0;
    }
    let x2 = x * x;
    let mut power = x2;
    let mut sum = 0.0;
    let mut k = 1.0;
    loop {
        let term = power / (2.0 * k + 1.0);
        sum += term;
        if term <= 1e-17 * sum {
            return sum;
        }
        power *= x2;
        k += 1.0;
    }
}
