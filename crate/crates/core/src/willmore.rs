//! Willmore energies, the Willmore-type inequality, Kasue bounds and the
//! isoperimetric constants determined by the asymptotic volume ratio.

use alloc::string::{String, ToString};

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, ModelManifold, WarpProfile};
use crate::monotone::{beta_threshold, dpsi_beta, du_surface, limit_t0, u_beta, LevelSource, LIMIT_LEVELS};
use crate::potential::{spheroid_exterior, PotentialKind, PotentialSolution, SpheroidPotential};
use crate::report::CheckReport;

/// A closed hypersurface on which the Willmore energy is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum SurfaceSpec {
    /// The coordinate sphere `{r}` of a warped model.
    CoordinateSphere { manifold: ModelManifold, r: f64 },
    /// The level `ξ` of the confocal family of a spheroid in Euclidean 3-space.
    Spheroid { body: SpheroidPotential, xi: f64 },
}

impl SurfaceSpec {
    pub fn coordinate_sphere(manifold: ModelManifold, r: f64) -> Result<Self> {
        if !(r > 0.0 && manifold.warp().contains(r)) {
            return Err(Error::domain(alloc::format!("radius {r} outside the domain of {}", manifold.warp())));
        }
        Ok(SurfaceSpec::CoordinateSphere { manifold, r })
    }

    /// The spheroid with semi-axes `a ≥ b` itself.
    pub fn spheroid(a: f64, b: f64) -> Result<Self> {
        let body = spheroid_exterior(a, b)?;
        Ok(SurfaceSpec::Spheroid { body, xi: body.boundary_coordinate() })
    }

    pub fn dimension(&self) -> usize {
        match self {
            SurfaceSpec::CoordinateSphere { manifold, .. } => manifold.n(),
            SurfaceSpec::Spheroid { .. } => 3,
        }
    }

    /// The ambient manifold.
    pub fn host(&self) -> ModelManifold {
        match self {
            SurfaceSpec::CoordinateSphere { manifold, .. } => *manifold,
            SurfaceSpec::Spheroid { .. } => ModelManifold::new(3, WarpProfile::Euclidean).expect("euclidean 3-space"),
        }
    }

    pub fn area(&self) -> Result<f64> {
        match *self {
            SurfaceSpec::CoordinateSphere { manifold, r } => Ok(manifold.sphere_area(r)),
            SurfaceSpec::Spheroid { body, xi } => body.area(xi),
        }
    }

    /// Largest mean curvature on the surface. On a prolate spheroid it is
    /// attained at the poles.
    pub fn max_mean_curvature(&self) -> f64 {
        match *self {
            SurfaceSpec::CoordinateSphere { manifold, r } => manifold.sphere_mean_curvature(r),
            SurfaceSpec::Spheroid { body, xi } => body.point(xi, 1.0).mean_curvature,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SurfaceSpec::CoordinateSphere { manifold, .. } => manifold.to_string(),
            SurfaceSpec::Spheroid { body, .. } => {
                let (a, b) = body.semi_axes();
                alloc::format!("spheroid(a={a},b={b})")
            }
        }
    }
}

/// `∫_S |H/(n-1)|^(n-1) dσ`.
pub fn willmore_energy(surface: &SurfaceSpec) -> Result<f64> {
    match *surface {
        SurfaceSpec::CoordinateSphere { manifold, r } => {
            Ok(manifold.cross_area() * manifold.warp().df(r).abs().powi(manifold.n() as i32 - 1))
        }
        SurfaceSpec::Spheroid { body, xi } => body.surface_integral(xi, |p| (0.5 * p.mean_curvature).powi(2)),
    }
}

/// `AVR · |S^(n-1)|`, the sharp lower bound of the Willmore energy.
pub fn willmore_threshold(manifold: &ModelManifold) -> f64 {
    manifold.avr() * unit_sphere_area(manifold.n())
}

/// `sup |f''|` on `[r, 10^6 r]`, zero exactly when the exterior of the
/// coordinate sphere `{r}` is a cone.
pub fn exterior_curvature(manifold: &ModelManifold, r: f64) -> f64 {
    let count = 241;
    (0..count)
        .map(|i| manifold.warp().ddf(r * 10f64.powf(6.0 * i as f64 / (count - 1) as f64)).abs())
        .fold(0.0, f64::max)
}

/// Willmore inequality `energy ≥ AVR · |S^(n-1)|` with equality detection.
///
/// The violation is the deficit relative to `max(threshold, energy)`.
/// Equality is flagged only when the threshold is positive and the margin
/// is within `tolerance`; a flagged equality on a surface whose exterior is
/// not conical is reported as a failure.
pub fn check_willmore(surface: &SurfaceSpec, tolerance: f64) -> Result<CheckReport> {
    let host = surface.host();
    let energy = willmore_energy(surface)?;
    let threshold = willmore_threshold(&host);
    let margin = energy - threshold;
    let scale = threshold.max(energy).max(f64::MIN_POSITIVE);
    let equality = threshold > 0.0 && margin.abs() <= tolerance * scale;
    let rigidity = match *surface {
        SurfaceSpec::CoordinateSphere { manifold, r } => exterior_curvature(&manifold, r),
        // A non-round spheroid is never an equality case.
        SurfaceSpec::Spheroid { body, .. } => {
            if body.is_sphere() {
                0.0
            } else {
                f64::INFINITY
            }
        }
    };
    let mut violation = (-margin).max(0.0) / scale;
    if equality && rigidity > tolerance {
        violation = f64::INFINITY;
    }
    let mut report = CheckReport::evaluate("willmore", "willmore_inequality", surface.label(), violation, tolerance, 1)
        .with_param("energy", energy)
        .with_param("threshold", threshold)
        .with_equality(equality);
    if let SurfaceSpec::CoordinateSphere { r, .. } = *surface {
        report = report.with_param("r", r);
    }
    Ok(report)
}

/// Kasue-type lower bound for the mean curvature of the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KasueBounds {
    pub beta: f64,
    pub bound: f64,
    pub sup_h: f64,
    /// `|∫ H |Dw|^β dσ - (the same integral recovered from the monotone
    /// quantity and its derivative)|` on the boundary.
    pub identity_residual: f64,
    /// `∫_{∂Ω} H |Dw|^β dσ`.
    pub weighted_mean: f64,
    /// `∫_{∂Ω} |Dw|^β dσ`.
    pub weight: f64,
    /// The bound with the `t → 0` limit of `U_β` and the derivative at the
    /// smallest sampled level in place of the boundary values. Reported
    /// only; not asserted.
    pub statement_level: Option<f64>,
}

impl KasueBounds {
    /// Checks `identity_residual ≤ tolerance · |bound · weight|` and
    /// `sup H ≥ bound` (with `bound > 0` when nonparabolic).
    pub fn checks(&self, model: &str, nonparabolic: bool, tolerance: f64) -> [CheckReport; 2] {
        let scale = (self.bound * self.weight).abs().max(f64::MIN_POSITIVE);
        let identity = self.identity_residual / scale;
        let mut excess = (self.bound - self.sup_h).max(0.0) / self.sup_h.abs().max(1.0);
        if nonparabolic && !(self.bound > 0.0) {
            excess = f64::INFINITY;
        }
        if !nonparabolic && self.bound < -tolerance * self.sup_h.abs().max(1.0) {
            excess = f64::INFINITY;
        }
        [
            CheckReport::evaluate("willmore", "kasue_identity", model, identity, tolerance, 1).with_param("beta", self.beta),
            CheckReport::evaluate("willmore", "kasue_bound", model, excess, tolerance, 1)
                .with_param("beta", self.beta)
                .with_param("bound", self.bound)
                .with_param("sup_h", self.sup_h),
        ]
    }
}

/// Kasue bounds from the boundary values of `U_β` (nonparabolic) or
/// `Ψ_β` (parabolic).
pub fn kasue_bounds(src: LevelSource<'_>, beta: f64) -> Result<KasueBounds> {
    let n = src.dimension();
    if !(beta >= beta_threshold(n)) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "Kasue bounds need beta at or above (n-2)/(n-1)",
        });
    }
    match src {
        LevelSource::Warped(sol) if sol.kind() == PotentialKind::Parabolic => parabolic_kasue(sol, beta),
        _ => nonparabolic_kasue(src, beta),
    }
}

fn nonparabolic_kasue(src: LevelSource<'_>, beta: f64) -> Result<KasueBounds> {
    let nf = src.dimension() as f64;
    let k = (nf - 1.0) / (nf - 2.0);
    let u1 = u_beta(src, beta, 1.0)?.value;
    let du1 = du_surface(src, beta, 1.0)?;
    let recovered = du1 / beta + k * u1;
    let (weighted_mean, weight, sup_h) = match src {
        LevelSource::Warped(sol) => {
            let m = sol.manifold();
            let r0 = sol.r0();
            let g = sol.grad_mag(r0).powf(beta) * m.sphere_area(r0);
            let h = m.sphere_mean_curvature(r0);
            (h * g, g, h)
        }
        LevelSource::Spheroid(sp) => {
            let xi = sp.boundary_coordinate();
            let weighted = sp.surface_integral(xi, |p| p.mean_curvature * p.grad.powf(beta))?;
            let weight = sp.surface_integral(xi, |p| p.grad.powf(beta))?;
            (weighted, weight, sp.point(xi, 1.0).mean_curvature)
        }
    };
    let limit = limit_t0(src, beta)?;
    let smallest = LIMIT_LEVELS[LIMIT_LEVELS.len() - 1];
    let d_small = du_surface(src, beta, smallest)?;
    Ok(KasueBounds {
        beta,
        bound: recovered / weight,
        sup_h,
        identity_residual: (weighted_mean - recovered).abs(),
        weighted_mean,
        weight,
        statement_level: Some((limit.extrapolated + d_small / beta) / weight),
    })
}

fn parabolic_kasue(sol: &PotentialSolution, beta: f64) -> Result<KasueBounds> {
    let m = sol.manifold();
    let r0 = sol.r0();
    let d0 = dpsi_beta(sol, beta, 0.0)?.surface;
    let weight = sol.grad_mag(r0).powf(beta) * m.sphere_area(r0);
    let sup_h = m.sphere_mean_curvature(r0);
    let weighted_mean = sup_h * weight;
    let recovered = -d0 / beta;
    Ok(KasueBounds {
        beta,
        bound: recovered / weight,
        sup_h,
        identity_residual: (weighted_mean - recovered).abs(),
        weighted_mean,
        weight,
        statement_level: None,
    })
}

/// Sharp constants fixed by the asymptotic volume ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// `36π · AVR`, the infimum of `|∂E|³ / |E|²`.
    pub iso_const: f64,
    /// `(36π · AVR)^(1/3)`.
    pub sobolev_const: f64,
    /// `AVR · |S^(n-1)|`, the infimum of the Willmore energy.
    pub ale_infimum: f64,
}

pub fn iso_constant(manifold: &ModelManifold) -> Result<f64> {
    if manifold.n() != 3 {
        return Err(Error::NotThreeDimensional { n: manifold.n() });
    }
    Ok(36.0 * core::f64::consts::PI * manifold.avr())
}

pub fn sobolev_constant(manifold: &ModelManifold) -> Result<f64> {
    Ok(iso_constant(manifold)?.cbrt())
}

pub fn ale_infimum(manifold: &ModelManifold) -> f64 {
    willmore_threshold(manifold)
}

/// All three constants; the isoperimetric ones exist only in dimension 3.
pub fn derived_constants(manifold: &ModelManifold) -> Result<DerivedConstants> {
    Ok(DerivedConstants {
        iso_const: iso_constant(manifold)?,
        sobolev_const: sobolev_constant(manifold)?,
        ale_infimum: ale_infimum(manifold),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::solve_exterior;
    use crate::Status;
    use core::f64::consts::PI;

    fn model(n: usize, warp: WarpProfile) -> ModelManifold {
        ModelManifold::new(n, warp).unwrap()
    }

    #[test]
    fn energies() {
        let flat = SurfaceSpec::coordinate_sphere(model(3, WarpProfile::Euclidean), 1.0).unwrap();
        assert!((willmore_energy(&flat).unwrap() - 4.0 * PI).abs() < 1e-14);
        let cone = SurfaceSpec::coordinate_sphere(model(3, WarpProfile::Cone { alpha: 0.5 }), 3.0).unwrap();
        assert!((willmore_energy(&cone).unwrap() - PI).abs() < 1e-14);
        let sp = SurfaceSpec::spheroid(2.0, 1.0).unwrap();
        assert!(willmore_energy(&sp).unwrap() > 4.0 * PI + 1e-3);
    }

    #[test]
    fn cone_is_an_equality_case() {
        let cone = SurfaceSpec::coordinate_sphere(model(3, WarpProfile::Cone { alpha: 0.5 }), 2.0).unwrap();
        let report = check_willmore(&cone, 1e-10).unwrap();
        assert_eq!(report.status, Status::Equality);
    }

    #[test]
    fn zero_threshold_is_never_equality() {
        let tanh = SurfaceSpec::coordinate_sphere(model(3, WarpProfile::Tanh), 2.0).unwrap();
        let report = check_willmore(&tanh, 1e-10).unwrap();
        assert_eq!(report.status, Status::Pass);
        assert_eq!(report.params["threshold"], 0.0);
        assert!(report.params["energy"] > 0.0);
        let cylinder = SurfaceSpec::coordinate_sphere(model(3, WarpProfile::CylinderEnd), 2.0).unwrap();
        assert_eq!(check_willmore(&cylinder, 1e-10).unwrap().status, Status::Pass);
    }

    #[test]
    fn smoothed_cone_margin_is_positive() {
        let m = model(3, WarpProfile::SmoothedCone { alpha: 0.5 });
        let report = check_willmore(&SurfaceSpec::coordinate_sphere(m, 1.0).unwrap(), 1e-10).unwrap();
        assert_eq!(report.status, Status::Pass);
        assert!(report.params["energy"] > report.params["threshold"]);
    }

    #[test]
    fn spheroid_energy_decreases_to_round_value() {
        let mut previous = f64::INFINITY;
        for ratio in [2.0, 1.5, 1.1, 1.01] {
            let e = willmore_energy(&SurfaceSpec::spheroid(ratio, 1.0).unwrap()).unwrap();
            assert!(e < previous && e > 4.0 * PI);
            previous = e;
        }
        assert!(previous - 4.0 * PI < 1e-3);
    }

    #[test]
    fn euclidean_kasue() {
        let sol = solve_exterior(&model(3, WarpProfile::Euclidean), 1.0).unwrap();
        let k = kasue_bounds((&sol).into(), 1.0).unwrap();
        assert!((k.weighted_mean - 8.0 * PI).abs() < 1e-12);
        assert!((k.bound - 2.0).abs() < 1e-10 && k.sup_h == 2.0);
        assert!(k.checks("euclidean", true, 1e-10).iter().all(|c| !c.failed()));
    }

    #[test]
    fn tanh_kasue_is_sharp() {
        let sol = solve_exterior(&model(3, WarpProfile::Tanh), 1.0).unwrap();
        let k = kasue_bounds((&sol).into(), 2.0).unwrap();
        // 2 sech²(1) / tanh(1)
        assert!((k.bound - 1.102_882_259_087_13).abs() < 1e-12, "{}", k.bound);
        assert!((k.bound - k.sup_h).abs() < 1e-12);
        assert!(k.statement_level.is_none());
    }

    #[test]
    fn cylinder_kasue_is_zero() {
        let sol = solve_exterior(&model(3, WarpProfile::CylinderEnd), 1.0).unwrap();
        for beta in [0.5, 1.0, 3.0] {
            let k = kasue_bounds((&sol).into(), beta).unwrap();
            assert_eq!(k.bound, 0.0);
            assert_eq!(k.sup_h, 0.0);
        }
    }

    #[test]
    fn spheroid_kasue_identity() {
        let sp = spheroid_exterior(2.0, 1.0).unwrap();
        let k = kasue_bounds((&sp).into(), 1.0).unwrap();
        assert!(k.identity_residual <= 1e-10 * (k.bound * k.weight).abs());
        assert!(k.sup_h > k.bound && k.bound > 0.0);
    }

    #[test]
    fn kasue_rejects_small_beta() {
        let sol = solve_exterior(&model(4, WarpProfile::Euclidean), 1.0).unwrap();
        assert!(kasue_bounds((&sol).into(), 0.5).is_err());
    }

    #[test]
    fn constants() {
        let flat = derived_constants(&model(3, WarpProfile::Euclidean)).unwrap();
        assert!((flat.iso_const - 113.097_335_529_232_55).abs() < 1e-10);
        assert!((flat.sobolev_const - 4.835_975_862_049_408).abs() < 1e-12);
        let cone = derived_constants(&model(3, WarpProfile::Cone { alpha: 0.5 })).unwrap();
        assert!((cone.iso_const - 9.0 * PI).abs() < 1e-12);
        let quotient = ModelManifold::with_cross_area(4, WarpProfile::Euclidean, unit_sphere_area(4) / 2.0).unwrap();
        assert!((ale_infimum(&quotient) - PI * PI).abs() < 1e-12);
        assert!(matches!(derived_constants(&quotient), Err(Error::NotThreeDimensional { n: 4 })));
    }
}
