//! Exterior harmonic potentials of coordinate balls on model manifolds.
//!
//! For `Ω = {r < r0}` both potentials are radial and given by quadrature:
//! the capacitary potential is `u(r) = I(r) / I(r0)` with
//! `I(r) = ∫_r^∞ f^(1-n)`, and on parabolic models the potential
//! vanishing on `∂Ω` is `ψ(r) = ∫_{r0}^r f^(1-n)`.

mod asymptotics;
mod spheroid;

pub use asymptotics::{verify_asymptotics, AsymptoticsReport};
pub use spheroid::{spheroid_exterior, LevelPoint, SpheroidPotential};

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{ModelManifold, Parabolicity};
use crate::numerics::{central_diff, integrate, integrate_improper, newton_bracketed, QuadSpec};

/// Quadrature used for potentials. The absolute tolerance is zero because
/// the tail integral spans many orders of magnitude.
pub fn potential_quad() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-13).with_abs_tol(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// Capacitary potential `u`: 1 on `∂Ω`, decaying to 0.
    Nonparabolic,
    /// Potential `ψ`: 0 on `∂Ω`, growing without bound.
    Parabolic,
}

/// Radial exterior potential of the coordinate ball `{r < r0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSolution {
    kind: PotentialKind,
    manifold: ModelManifold,
    r0: f64,
    tail_at_r0: f64,
    capacity: Option<f64>,
    quad: QuadSpec,
}

/// Solves the exterior problem on `{r > r0}`, choosing the potential from
/// the parabolicity of the model.
pub fn solve_exterior(manifold: &ModelManifold, r0: f64) -> Result<PotentialSolution> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidParameter { name: "r0", value: r0, reason: "boundary radius must be positive" });
    }
    let kind = match manifold.classify_parabolicity(r0)? {
        Parabolicity::Nonparabolic => PotentialKind::Nonparabolic,
        Parabolicity::Parabolic => PotentialKind::Parabolic,
    };
    let mut sol = PotentialSolution {
        kind,
        manifold: *manifold,
        r0,
        tail_at_r0: f64::NAN,
        capacity: None,
        quad: potential_quad(),
    };
    if kind == PotentialKind::Nonparabolic {
        let tail = sol.tail_integral(r0)?;
        sol.tail_at_r0 = tail;
        sol.capacity = Some(manifold.cross_fraction() / ((manifold.dim() - 2.0) * tail));
    }
    Ok(sol)
}

impl PotentialSolution {
    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn quad(&self) -> &QuadSpec {
        &self.quad
    }

    /// `Cap(Ω) = (ω/|S^(n-1)|) / ((n-2) I(r0))`, normalized so a Euclidean
    /// ball of radius `R` has capacity `R^(n-2)`. `None` on parabolic models.
    pub fn capacity(&self) -> Option<f64> {
        self.capacity
    }

    pub fn require_nonparabolic(&self) -> Result<()> {
        match self.kind {
            PotentialKind::Nonparabolic => Ok(()),
            PotentialKind::Parabolic => Err(Error::NotApplicable { what: "requires a nonparabolic model" }),
        }
    }

    pub fn require_parabolic(&self) -> Result<()> {
        match self.kind {
            PotentialKind::Parabolic => Ok(()),
            PotentialKind::Nonparabolic => Err(Error::NotApplicable { what: "requires a parabolic model" }),
        }
    }

    fn warp_power(&self, r: f64) -> f64 {
        self.manifold.warp().f(r).powi(1 - self.manifold.n() as i32)
    }

    /// `I(r) = ∫_r^∞ f^(1-n)`.
    pub fn tail_integral(&self, r: f64) -> Result<f64> {
        let warp = *self.manifold.warp();
        let p = 1 - self.manifold.n() as i32;
        integrate_improper(|s| warp.f(s).powi(p), r, self.manifold.tail_decay_exponent(), &self.quad)
    }

    /// `u(r)` or `ψ(r)`.
    pub fn value(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        match self.kind {
            PotentialKind::Nonparabolic => Ok(self.tail_integral(r)? / self.tail_at_r0),
            PotentialKind::Parabolic => {
                let warp = *self.manifold.warp();
                let p = 1 - self.manifold.n() as i32;
                integrate(|s| warp.f(s).powi(p), self.r0, r, &self.quad)
            }
        }
    }

    /// Signed radial derivative `u'(r)` or `ψ'(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Nonparabolic => -self.warp_power(r) / self.tail_at_r0,
            PotentialKind::Parabolic => self.warp_power(r),
        }
    }

    /// Gradient magnitude `|Du|`, constant on coordinate spheres.
    pub fn grad_mag(&self, r: f64) -> f64 {
        self.derivative(r).abs()
    }

    /// Second radial derivative, from the radial Laplace equation
    /// `w'' = -(n-1)(f'/f) w'`.
    pub fn second_derivative(&self, r: f64) -> f64 {
        let warp = self.manifold.warp();
        -(self.manifold.dim() - 1.0) * warp.df(r) / warp.f(r) * self.derivative(r)
    }

    /// Total flux `∫_{r} |Dw| dσ`, independent of `r`.
    pub fn flux(&self) -> f64 {
        self.manifold.sphere_area(self.r0) * self.grad_mag(self.r0)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if self.manifold.warp().contains(r) {
            Ok(())
        } else {
            Err(Error::domain(alloc::format!("radius {r} outside the domain of {}", self.manifold)))
        }
    }

    /// Radius of the level set `{w = level}`. Levels beyond the boundary
    /// value (`u > 1`, `ψ < 0`) are allowed as long as the level set stays
    /// inside the warp domain.
    pub fn level_radius(&self, level: f64) -> Result<f64> {
        match self.kind {
            PotentialKind::Nonparabolic => self.nonparabolic_level_radius(level),
            PotentialKind::Parabolic => self.parabolic_level_radius(level),
        }
    }

    fn nonparabolic_level_radius(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::RootNotBracketed { level: t });
        }
        if t == 1.0 {
            return Ok(self.r0);
        }
        let target = (t * self.tail_at_r0).ln();
        let warp = *self.manifold.warp();
        let p = 1 - self.manifold.n() as i32;
        // g(x) = ln I(e^x) - ln(t I(r0)), decreasing in x.
        let residual = |x: f64| -> (f64, f64) {
            let r = x.exp();
            match self.tail_integral(r) {
                Ok(tail) => (tail.ln() - target, -r * warp.f(r).powi(p) / tail),
                Err(_) => (f64::NAN, f64::NAN),
            }
        };
        // Initial guess from the power law u ~ (r/r0)^(1-k).
        let k = self.manifold.tail_decay_exponent();
        let guess = self.r0.ln() - t.ln() / (k - 1.0);
        let (lo, hi) = self.bracket(&residual, guess, true)?;
        newton_bracketed(residual, lo, hi, 1e-15).map(f64::exp).map_err(|_| Error::RootNotBracketed { level: t })
    }

    fn parabolic_level_radius(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::RootNotBracketed { level: s });
        }
        if s == 0.0 {
            return Ok(self.r0);
        }
        let warp = *self.manifold.warp();
        let p = 1 - self.manifold.n() as i32;
        let residual = |x: f64| -> (f64, f64) {
            let r = x.exp();
            match self.value(r) {
                Ok(v) => (v - s, r * warp.f(r).powi(p)),
                Err(_) => (f64::NAN, f64::NAN),
            }
        };
        let guess = (self.r0 + s / self.warp_power(self.r0)).max(0.5 * self.r0).ln();
        let (lo, hi) = self.bracket(&residual, guess, false)?;
        newton_bracketed(residual, lo, hi, 1e-15).map(f64::exp).map_err(|_| Error::RootNotBracketed { level: s })
    }

    /// Bracket in `x = ln r` around `guess` for a monotone residual.
    fn bracket<G: Fn(f64) -> (f64, f64)>(&self, residual: &G, guess: f64, decreasing: bool) -> Result<(f64, f64)> {
        let x_min = {
            let start = self.manifold.warp().domain_start();
            if start > 0.0 {
                start.ln()
            } else {
                f64::NEG_INFINITY
            }
        };
        let clamp = |x: f64| x.max(x_min);
        let sign_at = |x: f64| {
            let v = residual(x).0;
            if decreasing {
                v
            } else {
                -v
            }
        };
        // sign_at > 0 means the root lies to the right.
        let mut lo = clamp(guess - 0.1);
        let mut hi = guess + 0.1;
        let mut step = 0.5;
        for _ in 0..200 {
            let s_lo = sign_at(lo);
            let s_hi = sign_at(hi);
            if !(s_lo.is_finite() && s_hi.is_finite()) {
                break;
            }
            if s_lo >= 0.0 && s_hi <= 0.0 {
                return Ok((lo, hi));
            }
            if s_hi > 0.0 {
                lo = hi;
                hi += step;
            } else {
                if lo <= x_min {
                    break;
                }
                hi = lo;
                lo = clamp(lo - step);
            }
            step *= 2.0;
        }
        Err(Error::RootNotBracketed { level: f64::NAN })
    }

    /// `H - ((n-1)/(n-2)) |D log u|` on the coordinate sphere `{r}`.
    ///
    /// Integrating `f' f^(1-n)` by parts turns the difference into
    /// `(n-1) K / (f I)` with `K(r) = ∫_r^∞ (f'(r) - f'(s)) f(s)^(1-n) ds`,
    /// which is nonnegative for concave `f` and free of cancellation. Needs
    /// `f → ∞`, which every nonparabolic profile satisfies.
    pub fn mean_curvature_excess(&self, r: f64) -> Result<f64> {
        self.require_nonparabolic()?;
        let warp = *self.manifold.warp();
        let n = self.manifold.dim();
        let p = self.manifold.n() as i32 - 1;
        let k = integrate_improper(
            |s| warp.slope_drop(r, s) / warp.f(s).powi(p),
            r,
            self.manifold.tail_decay_exponent(),
            &self.quad,
        )?;
        Ok((n - 1.0) / warp.f(r) * k / self.tail_integral(r)?)
    }

    /// Relative residual of the radial Laplace equation at `r`, with `w''`
    /// taken from finite differences of the closed-form gradient.
    pub fn harmonicity_residual(&self, r: f64) -> Result<f64> {
        let warp = *self.manifold.warp();
        let n = self.manifold.dim();
        let second = central_diff(|s| self.derivative(s), r, 1e-3 * r.max(1e-3))?.value;
        let first = self.derivative(r);
        let drift = (n - 1.0) * warp.df(r) / warp.f(r) * first;
        let scale = first.abs() * ((n - 1.0) * (warp.df(r) / warp.f(r)).abs() + 1.0 / r);
        Ok((second + drift).abs() / scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpProfile;

    fn model(n: usize, warp: WarpProfile) -> ModelManifold {
        ModelManifold::new(n, warp).unwrap()
    }

    #[test]
    fn euclidean_potential() {
        let sol = solve_exterior(&model(3, WarpProfile::Euclidean), 1.0).unwrap();
        assert_eq!(sol.kind(), PotentialKind::Nonparabolic);
        assert!((sol.capacity().unwrap() - 1.0).abs() < 1e-13);
        assert!((sol.value(2.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((sol.level_radius(0.25).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cone_potential() {
        let sol = solve_exterior(&model(3, WarpProfile::Cone { alpha: 0.5 }), 1.0).unwrap();
        assert!((sol.tail_integral(1.0).unwrap() - 4.0).abs() < 1e-13);
        assert!((sol.capacity().unwrap() - 0.25).abs() < 1e-14);
        assert!((sol.value(2.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tanh_parabolic_potential() {
        let sol = solve_exterior(&model(3, WarpProfile::Tanh), 1.0).unwrap();
        assert_eq!(sol.kind(), PotentialKind::Parabolic);
        assert!(sol.capacity().is_none());
        let v = sol.value(2.0).unwrap();
        assert!((v - 1.275_720_564_771_783).abs() < 1e-12, "{v}");
        let r = sol.level_radius(v).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        // Levels below the boundary value sit just inside r0.
        assert!(sol.level_radius(-1e-3).unwrap() < 1.0);
    }

    #[test]
    fn cylinder_potential_is_linear() {
        let sol = solve_exterior(&model(3, WarpProfile::CylinderEnd), 1.0).unwrap();
        assert_eq!(sol.kind(), PotentialKind::Parabolic);
        assert!((sol.value(3.5).unwrap() - 2.5).abs() < 1e-13);
        assert!((sol.level_radius(1.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_scaling_on_cones() {
        // With the normalization Cap(B_R in R^n) = R^(n-2), a cone of opening
        // α over the full sphere gives Cap = α^(n-1) r0^(n-2).
        for n in [3usize, 4, 5] {
            for (alpha, r0) in [(0.3, 1.0), (0.7, 2.5)] {
                let sol = solve_exterior(&model(n, WarpProfile::Cone { alpha }), r0).unwrap();
                let expected = f64::powi(alpha, n as i32 - 1) * f64::powi(r0, n as i32 - 2);
                let cap = sol.capacity().unwrap();
                assert!((cap - expected).abs() <= 1e-12 * expected, "n={n} {cap} {expected}");
            }
        }
    }

    #[test]
    fn level_radius_rejects_nonpositive_levels() {
        let sol = solve_exterior(&model(3, WarpProfile::Euclidean), 1.0).unwrap();
        assert!(matches!(sol.level_radius(0.0), Err(Error::RootNotBracketed { .. })));
        assert!(matches!(sol.level_radius(-0.5), Err(Error::RootNotBracketed { .. })));
    }

    #[test]
    fn power_level_radius_respects_domain() {
        let sol = solve_exterior(&model(3, WarpProfile::Power { gamma: 0.6 }), 1.0).unwrap();
        // u = (r/r0)^(1-q) exactly for a pure power warp.
        let r = sol.level_radius(0.5).unwrap();
        assert!((r - 0.5f64.powf(1.0 / (1.0 - 1.2))).abs() < 1e-9 * r);
        // Levels far above 1 would need radii below the domain start.
        assert!(sol.level_radius(10.0).is_err());
    }

    #[test]
    fn mean_curvature_excess_matches_direct_difference() {
        let sol = solve_exterior(&model(3, WarpProfile::SmoothedCone { alpha: 0.5 }), 1.0).unwrap();
        for r in [1.0, 3.0, 20.0] {
            let m = sol.manifold();
            let direct = m.sphere_mean_curvature(r) - 2.0 * sol.grad_mag(r) / sol.value(r).unwrap();
            let excess = sol.mean_curvature_excess(r).unwrap();
            assert!(excess > 0.0);
            assert!((excess - direct).abs() < 1e-10 * m.sphere_mean_curvature(r), "{excess} vs {direct}");
        }
        let cone = solve_exterior(&model(4, WarpProfile::Cone { alpha: 0.3 }), 1.0).unwrap();
        assert_eq!(cone.mean_curvature_excess(7.0).unwrap(), 0.0);
        let tanh = solve_exterior(&model(3, WarpProfile::Tanh), 1.0).unwrap();
        assert!(tanh.mean_curvature_excess(2.0).is_err());
    }

    #[test]
    fn invalid_r0() {
        assert!(solve_exterior(&model(3, WarpProfile::Euclidean), 0.0).is_err());
    }
}
