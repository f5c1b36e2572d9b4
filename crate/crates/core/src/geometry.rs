//! Rotationally symmetric model manifolds `dr² + f(r)² g_cross`.
//!
//! The cross-section is a round unit sphere, optionally a quotient of it,
//! which only enters through its total area `ω`.

use core::f64::consts::PI;
use core::fmt;

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadSpec};

/// Area of the unit sphere `S^(n-1)` bounding the unit ball of `R^n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^d| = 2π/(d-1) · |S^(d-2)|.
    let d = n.saturating_sub(1);
    let (mut area, mut k) = if d.is_multiple_of(2) { (2.0, 0) } else { (2.0 * PI, 1) };
    while k < d {
        k += 2;
        area *= 2.0 * PI / (k as f64 - 1.0);
    }
    area
}

/// Warp function `f` of a built-in model family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WarpProfile {
    /// `f = r`, flat space.
    Euclidean,
    /// `f = α r`, a metric cone with opening `α ∈ (0, 1]`.
    Cone { alpha: f64 },
    /// `f = α r + (1 - α)(1 - e^(-r))`, asymptotic to the cone of slope `α`.
    SmoothedCone { alpha: f64 },
    /// `f = tanh r`, bounded warp, parabolic.
    Tanh,
    /// `f ≡ 1`, a half cylinder over the cross-section.
    CylinderEnd,
    /// `f = r^γ` on `[γ^(1/(1-γ)), ∞)`, sub-Euclidean growth.
    Power { gamma: f64 },
}

impl WarpProfile {
    pub const FAMILIES: [&'static str; 6] =
        ["euclidean", "cone", "smoothed_cone", "tanh", "cylinder_end", "power"];

    pub fn family(&self) -> &'static str {
        match self {
            WarpProfile::Euclidean => "euclidean",
            WarpProfile::Cone { .. } => "cone",
            WarpProfile::SmoothedCone { .. } => "smoothed_cone",
            WarpProfile::Tanh => "tanh",
            WarpProfile::CylinderEnd => "cylinder_end",
            WarpProfile::Power { .. } => "power",
        }
    }

    /// The single shape parameter of the family, if any, with its name.
    pub fn parameter(&self) -> Option<(&'static str, f64)> {
        match *self {
            WarpProfile::Cone { alpha } | WarpProfile::SmoothedCone { alpha } => Some(("alpha", alpha)),
            WarpProfile::Power { gamma } => Some(("gamma", gamma)),
            _ => None,
        }
    }

    pub fn f(&self, r: f64) -> f64 {
        match *self {
            WarpProfile::Euclidean => r,
            WarpProfile::Cone { alpha } => alpha * r,
            WarpProfile::SmoothedCone { alpha } => alpha * r - (1.0 - alpha) * (-r).exp_m1(),
            WarpProfile::Tanh => r.tanh(),
            WarpProfile::CylinderEnd => 1.0,
            WarpProfile::Power { gamma } => r.powf(gamma),
        }
    }

    pub fn df(&self, r: f64) -> f64 {
        match *self {
            WarpProfile::Euclidean => 1.0,
            WarpProfile::Cone { alpha } => alpha,
            WarpProfile::SmoothedCone { alpha } => alpha + (1.0 - alpha) * (-r).exp(),
            WarpProfile::Tanh => {
                let s = 1.0 / r.cosh();
                s * s
            }
            WarpProfile::CylinderEnd => 0.0,
            WarpProfile::Power { gamma } => gamma * r.powf(gamma - 1.0),
        }
    }

    pub fn ddf(&self, r: f64) -> f64 {
        match *self {
            WarpProfile::Euclidean | WarpProfile::Cone { .. } | WarpProfile::CylinderEnd => 0.0,
            WarpProfile::SmoothedCone { alpha } => -(1.0 - alpha) * (-r).exp(),
            WarpProfile::Tanh => {
                let s = 1.0 / r.cosh();
                -2.0 * s * s * r.tanh()
            }
            WarpProfile::Power { gamma } => gamma * (gamma - 1.0) * r.powf(gamma - 2.0),
        }
    }

    /// `f'(r) - f'(s)` for `s ≥ r`, without cancellation when `s` is close
    /// to `r`.
    pub fn slope_drop(&self, r: f64, s: f64) -> f64 {
        match *self {
            WarpProfile::Euclidean | WarpProfile::Cone { .. } | WarpProfile::CylinderEnd => 0.0,
            WarpProfile::SmoothedCone { alpha } => -(1.0 - alpha) * (-r).exp() * (r - s).exp_m1(),
            WarpProfile::Tanh => self.df(r) - self.df(s),
            WarpProfile::Power { gamma } => -gamma * r.powf(gamma - 1.0) * ((gamma - 1.0) * (s / r).ln()).exp_m1(),
        }
    }

    /// `r f'(r) / f(r)`, evaluated without cancellation near the origin.
    pub fn log_slope(&self, r: f64) -> f64 {
        match *self {
            WarpProfile::Euclidean | WarpProfile::Cone { .. } => 1.0,
            WarpProfile::Tanh => {
                if r == 0.0 {
                    1.0
                } else {
                    2.0 * r / (2.0 * r).sinh()
                }
            }
            WarpProfile::CylinderEnd => 0.0,
            WarpProfile::Power { gamma } => gamma,
            WarpProfile::SmoothedCone { .. } => {
                if r == 0.0 {
                    1.0
                } else {
                    r * self.df(r) / self.f(r)
                }
            }
        }
    }

    /// `lim f'(r)` as `r → ∞`.
    pub fn asymptotic_slope(&self) -> f64 {
        match *self {
            WarpProfile::Euclidean => 1.0,
            WarpProfile::Cone { alpha } | WarpProfile::SmoothedCone { alpha } => alpha,
            WarpProfile::Tanh | WarpProfile::CylinderEnd | WarpProfile::Power { .. } => 0.0,
        }
    }

    /// Power `p` in `f(r) ~ r^p` at infinity.
    pub fn growth_exponent(&self) -> f64 {
        match *self {
            WarpProfile::Euclidean | WarpProfile::Cone { .. } | WarpProfile::SmoothedCone { .. } => 1.0,
            WarpProfile::Tanh | WarpProfile::CylinderEnd => 0.0,
            WarpProfile::Power { gamma } => gamma,
        }
    }

    /// Radius beyond which `|f(r)/r - a|` is below [`Self::tail_bound`].
    pub fn tail_radius(&self) -> f64 {
        match self {
            WarpProfile::Euclidean | WarpProfile::Cone { .. } => 1.0,
            _ => 10.0,
        }
    }

    pub fn tail_bound(&self) -> f64 {
        match *self {
            WarpProfile::Euclidean | WarpProfile::Cone { .. } => 0.0,
            WarpProfile::SmoothedCone { alpha } => (1.0 - alpha) / self.tail_radius(),
            WarpProfile::Tanh | WarpProfile::CylinderEnd => 1.0 / self.tail_radius(),
            WarpProfile::Power { gamma } => self.tail_radius().powf(gamma - 1.0),
        }
    }

    /// `f(0) = 0`: geodesic balls about the origin have finite volume.
    pub fn origin_closed(&self) -> bool {
        !matches!(self, WarpProfile::CylinderEnd | WarpProfile::Power { .. })
    }

    /// `f(0) = 0` and `f'(0) = 1`: the metric is smooth at the origin.
    pub fn smooth_origin(&self) -> bool {
        match *self {
            WarpProfile::Cone { alpha } => alpha == 1.0,
            other => other.origin_closed(),
        }
    }

    /// Left end of the radial domain.
    pub fn domain_start(&self) -> f64 {
        match *self {
            // Below this radius the tangential Ricci eigenvalue turns negative.
            WarpProfile::Power { gamma } => gamma.powf(1.0 / (1.0 - gamma)),
            _ => 0.0,
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        r.is_finite()
            && match self {
                WarpProfile::Power { .. } => r >= self.domain_start(),
                WarpProfile::CylinderEnd => r >= 0.0,
                _ => r > 0.0,
            }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match *self {
            WarpProfile::Cone { alpha } if !(alpha > 0.0 && alpha <= 1.0) => Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "cone opening must lie in (0, 1]",
            }),
            WarpProfile::SmoothedCone { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                Err(Error::InvalidParameter {
                    name: "alpha",
                    value: alpha,
                    reason: "smoothed cone slope must lie in (0, 1)",
                })
            }
            WarpProfile::Power { gamma } if !(gamma < 1.0 && gamma * (n as f64 - 1.0) > 1.0) => {
                Err(Error::InvalidParameter {
                    name: "gamma",
                    value: gamma,
                    reason: "power exponent must lie in (1/(n-1), 1)",
                })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for WarpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some((name, value)) => write!(f, "{}({}={})", self.family(), name, value),
            None => f.write_str(self.family()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parabolicity {
    Nonparabolic,
    Parabolic,
}

/// Ricci curvature in the radial and tangential directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciEigenvalues {
    pub radial: f64,
    pub tangential: f64,
}

/// Bishop–Gromov volume and area ratios of a geodesic ball about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallRatios {
    /// `n |B(r)| / (r^n |S^(n-1)|)`.
    pub volume_ratio: f64,
    /// `|∂B(r)| / (r^(n-1) |S^(n-1)|)`.
    pub area_ratio: f64,
    pub area: f64,
    pub volume: f64,
}

/// An `n`-dimensional warped product over a round (quotient) sphere of
/// total area `cross_area`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelManifold {
    n: usize,
    warp: WarpProfile,
    cross_area: f64,
}

/// Sampling density of the admissibility scan run at construction.
const CONSTRUCTION_SAMPLES_PER_DECADE: usize = 200;
pub const RICCI_TOLERANCE: f64 = 1e-12;

impl ModelManifold {
    /// Model over the full unit sphere.
    pub fn new(n: usize, warp: WarpProfile) -> Result<Self> {
        Self::with_cross_area(n, warp, unit_sphere_area(n))
    }

    /// Model over a quotient of the unit sphere of area `cross_area`,
    /// e.g. `|S^(n-1)| / |Γ|`.
    pub fn with_cross_area(n: usize, warp: WarpProfile, cross_area: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "dimension must be at least 3",
            });
        }
        let full = unit_sphere_area(n);
        if !(cross_area > 0.0 && cross_area <= full * (1.0 + 1e-15)) {
            return Err(Error::InvalidParameter {
                name: "cross_area",
                value: cross_area,
                reason: "cross-section area must lie in (0, |S^(n-1)|]",
            });
        }
        warp.validate(n)?;
        let model = ModelManifold { n, warp, cross_area };
        let min = model.min_ricci(CONSTRUCTION_SAMPLES_PER_DECADE);
        if min < -RICCI_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "warp",
                value: min,
                reason: "Ricci curvature is negative somewhere on the domain",
            });
        }
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn warp(&self) -> &WarpProfile {
        &self.warp
    }

    pub fn cross_area(&self) -> f64 {
        self.cross_area
    }

    /// `ω / |S^(n-1)|`, the inverse order of the quotient group.
    pub fn cross_fraction(&self) -> f64 {
        self.cross_area / unit_sphere_area(self.n)
    }

    pub(crate) fn dim(&self) -> f64 {
        self.n as f64
    }

    /// Area of the coordinate sphere `{r}`.
    pub fn sphere_area(&self, r: f64) -> f64 {
        self.cross_area * self.warp.f(r).powi(self.n as i32 - 1)
    }

    /// Mean curvature `(n-1) f'/f` of the coordinate sphere `{r}`,
    /// outward normal.
    pub fn sphere_mean_curvature(&self, r: f64) -> f64 {
        (self.dim() - 1.0) * self.warp.df(r) / self.warp.f(r)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if self.warp.contains(r) {
            Ok(())
        } else {
            Err(Error::domain(alloc::format!("radius {r} outside the domain of {}", self.warp)))
        }
    }

    /// Ricci eigenvalues at radius `r`.
    pub fn ricci_eigenvalues(&self, r: f64) -> Result<RicciEigenvalues> {
        self.check_radius(r)?;
        Ok(self.ricci_unchecked(r))
    }

    fn ricci_unchecked(&self, r: f64) -> RicciEigenvalues {
        let n = self.dim();
        let f = self.warp.f(r);
        let df = self.warp.df(r);
        let ddf = self.warp.ddf(r);
        RicciEigenvalues {
            radial: -(n - 1.0) * ddf / f,
            tangential: -ddf / f + (n - 2.0) * (1.0 - df * df) / (f * f),
        }
    }

    /// Minimum of both Ricci eigenvalues over a geometric grid spanning the
    /// domain out to `10^6 · max(1, R_tail)`.
    pub fn min_ricci(&self, samples_per_decade: usize) -> f64 {
        let start = self.warp.domain_start().max(1e-4);
        let end = 1e6 * self.warp.tail_radius().max(1.0);
        let decades = (end / start).log10();
        let count = (decades * samples_per_decade as f64).ceil() as usize + 1;
        (0..count)
            .map(|i| {
                let r = start * 10f64.powf(decades * i as f64 / (count - 1) as f64);
                let ric = self.ricci_unchecked(r.max(start));
                ric.radial.min(ric.tangential)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Volume of the geodesic ball `B(0, r)`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if !self.warp.origin_closed() {
            return Err(Error::domain(alloc::format!("{} has no origin; ball volume undefined", self.warp)));
        }
        self.check_radius(r)?;
        let p = self.n as i32 - 1;
        let warp = self.warp;
        let integral = integrate(|s| warp.f(s).powi(p), 0.0, r, &QuadSpec::default())?;
        Ok(self.cross_area * integral)
    }

    /// Bishop–Gromov ratios of `B(0, r)`.
    pub fn bishop_gromov(&self, r: f64) -> Result<BallRatios> {
        let volume = self.ball_volume(r)?;
        let area = self.sphere_area(r);
        let full = unit_sphere_area(self.n);
        Ok(BallRatios {
            volume_ratio: self.dim() * volume / (r.powi(self.n as i32) * full),
            area_ratio: self.area_ratio(r),
            area,
            volume,
        })
    }

    /// `|∂B(r)| / (r^(n-1) |S^(n-1)|)`; defined on every profile.
    pub fn area_ratio(&self, r: f64) -> f64 {
        self.cross_fraction() * (self.warp.f(r) / r).powi(self.n as i32 - 1)
    }

    /// Asymptotic volume ratio `a^(n-1) ω / |S^(n-1)|`.
    pub fn avr(&self) -> f64 {
        self.warp.asymptotic_slope().powi(self.n as i32 - 1) * self.cross_fraction()
    }

    /// Radius at which [`Self::avr`] is compared with the area ratio.
    pub fn avr_probe_radius(&self) -> f64 {
        1e4 * self.warp.tail_radius()
    }

    /// `|θ(R) - AVR|` at the probe radius.
    pub fn avr_crosscheck(&self) -> f64 {
        (self.area_ratio(self.avr_probe_radius()) - self.avr()).abs()
    }

    /// Declared decay exponent of `f^(1-n)`.
    pub fn tail_decay_exponent(&self) -> f64 {
        self.warp.growth_exponent() * (self.dim() - 1.0)
    }

    /// Parabolicity from the radial test `∫ f^(1-n) < ∞`, cross-checked
    /// against the volume-growth test `∫ r / |B(r)| dr < ∞` when balls about
    /// the origin exist. Both are decided from the local power-law exponent
    /// of the integrand far out.
    pub fn classify_parabolicity(&self, r0: f64) -> Result<Parabolicity> {
        self.check_radius(r0)?;
        let probe = 1e8 * self.warp.tail_radius().max(r0).max(1.0);
        let radial_exponent = (self.dim() - 1.0) * self.warp.log_slope(probe);
        let declared = self.tail_decay_exponent();
        if (radial_exponent - declared).abs() > 1e-3 * declared.max(1.0) {
            return Err(Error::domain(alloc::format!(
                "declared tail exponent {declared} of {} disagrees with measured {radial_exponent}",
                self.warp
            )));
        }
        let verdict = |exponent: f64| {
            if exponent > 1.0 {
                Parabolicity::Nonparabolic
            } else {
                Parabolicity::Parabolic
            }
        };
        let radial = verdict(radial_exponent);
        if self.warp.origin_closed() {
            let volume = self.ball_volume(probe)?;
            let growth = probe * self.sphere_area(probe) / volume;
            let volume_growth = verdict(growth - 1.0);
            if volume_growth != radial {
                return Err(Error::CriterionMismatch { radial, volume_growth });
            }
        }
        Ok(radial)
    }
}

impl fmt::Display for ModelManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.warp)?;
        let fraction = self.cross_fraction();
        if (fraction - 1.0).abs() > 1e-15 {
            write!(f, "/{}", 1.0 / fraction)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn sphere_areas() {
        assert!(close(unit_sphere_area(2), 2.0 * PI, 1e-15));
        assert!(close(unit_sphere_area(3), 4.0 * PI, 1e-15));
        assert!(close(unit_sphere_area(4), 2.0 * PI * PI, 1e-15));
        assert!(close(unit_sphere_area(5), 8.0 * PI * PI / 3.0, 1e-15));
    }

    #[test]
    fn ricci_examples() {
        let flat = ModelManifold::new(3, WarpProfile::Euclidean).unwrap();
        assert_eq!(flat.ricci_eigenvalues(3.0).unwrap(), RicciEigenvalues { radial: 0.0, tangential: 0.0 });

        let cone = ModelManifold::new(3, WarpProfile::Cone { alpha: 0.5 }).unwrap();
        let ric = cone.ricci_eigenvalues(2.0).unwrap();
        assert_eq!(ric.radial, 0.0);
        assert!(close(ric.tangential, 0.75, 1e-15));

        let tanh = ModelManifold::new(3, WarpProfile::Tanh).unwrap();
        let ric = tanh.ricci_eigenvalues(1.0).unwrap();
        assert!((ric.radial - 1.679_897_366_456_104).abs() < 1e-13);
        assert!((ric.tangential - 2.259_923_024_842_078).abs() < 1e-13);
    }

    #[test]
    fn ricci_outside_domain() {
        let power = ModelManifold::new(3, WarpProfile::Power { gamma: 0.6 }).unwrap();
        assert!(matches!(power.ricci_eigenvalues(0.1), Err(Error::Domain { .. })));
        let flat = ModelManifold::new(3, WarpProfile::Euclidean).unwrap();
        assert!(flat.ricci_eigenvalues(-1.0).is_err());
    }

    #[test]
    fn bishop_gromov_examples() {
        let flat = ModelManifold::new(3, WarpProfile::Euclidean).unwrap();
        let b = flat.bishop_gromov(2.0).unwrap();
        assert!(close(b.volume_ratio, 1.0, 1e-14) && close(b.area_ratio, 1.0, 1e-15));
        assert!(close(b.area, 16.0 * PI, 1e-14));
        assert!(close(b.volume, 32.0 * PI / 3.0, 1e-14));

        let cone = ModelManifold::new(3, WarpProfile::Cone { alpha: 0.5 }).unwrap();
        for r in [0.1, 1.0, 17.0] {
            let b = cone.bishop_gromov(r).unwrap();
            assert!(close(b.volume_ratio, 0.25, 1e-14) && close(b.area_ratio, 0.25, 1e-14));
        }

        let smooth = ModelManifold::new(3, WarpProfile::SmoothedCone { alpha: 0.5 }).unwrap();
        let near = smooth.bishop_gromov(1.0).unwrap().volume_ratio;
        let far = smooth.bishop_gromov(10.0).unwrap().volume_ratio;
        assert!(near > far && far > 0.25, "{near} {far}");
    }

    #[test]
    fn ball_volume_needs_origin() {
        let cyl = ModelManifold::new(3, WarpProfile::CylinderEnd).unwrap();
        assert!(matches!(cyl.bishop_gromov(1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn avr_examples() {
        assert_eq!(ModelManifold::new(3, WarpProfile::Euclidean).unwrap().avr(), 1.0);
        let cone = ModelManifold::new(3, WarpProfile::Cone { alpha: 0.5 }).unwrap();
        assert!(close(cone.avr(), 0.25, 1e-15));
        let quotient =
            ModelManifold::with_cross_area(4, WarpProfile::Cone { alpha: 1.0 }, unit_sphere_area(4) / 2.0)
                .unwrap();
        assert!(close(quotient.avr(), 0.5, 1e-15));
    }

    #[test]
    fn parabolicity_examples() {
        let verdict = |n, warp| ModelManifold::new(n, warp).unwrap().classify_parabolicity(1.0).unwrap();
        assert_eq!(verdict(3, WarpProfile::Euclidean), Parabolicity::Nonparabolic);
        assert_eq!(verdict(3, WarpProfile::Tanh), Parabolicity::Parabolic);
        assert_eq!(verdict(3, WarpProfile::Power { gamma: 0.6 }), Parabolicity::Nonparabolic);
        assert_eq!(verdict(3, WarpProfile::CylinderEnd), Parabolicity::Parabolic);
        assert_eq!(verdict(5, WarpProfile::SmoothedCone { alpha: 0.3 }), Parabolicity::Nonparabolic);
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(matches!(
            ModelManifold::new(2, WarpProfile::Euclidean),
            Err(Error::InvalidParameter { name: "n", .. })
        ));
        assert!(ModelManifold::new(3, WarpProfile::Cone { alpha: 1.5 }).is_err());
        assert!(ModelManifold::new(3, WarpProfile::Power { gamma: 0.4 }).is_err());
        assert!(ModelManifold::with_cross_area(3, WarpProfile::Euclidean, 20.0).is_err());
    }

    #[test]
    fn display_ids() {
        let m = ModelManifold::new(3, WarpProfile::Cone { alpha: 0.5 }).unwrap();
        assert_eq!(alloc::format!("{m}"), "cone(alpha=0.5)");
        let q = ModelManifold::with_cross_area(4, WarpProfile::Euclidean, unit_sphere_area(4) / 2.0).unwrap();
        assert_eq!(alloc::format!("{q}"), "euclidean/2");
    }
}
