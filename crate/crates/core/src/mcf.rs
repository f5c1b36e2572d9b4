//! Mean curvature flow of coordinate spheres in 3-dimensional models.
//!
//! A coordinate sphere `{r = ρ}` moves by `dρ/dt = -H = -2 f'(ρ)/f(ρ)`. The
//! flow is integrated in `σ = ρ²`, for which `dσ/dt = -4 ρ f'/f` stays
//! bounded (and tends to `-4`) at extinction. Along the flow the isoperimetric
//! difference `D = A^(3/2) - C V` is recorded.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, ModelManifold};
use crate::numerics::{integrate, ode_solve, OdeSpec, QuadSpec, Termination};
use crate::report::CheckReport;

/// The flow stops once `ρ ≤ EXTINCTION_FRACTION · ρ(0)`.
pub const EXTINCTION_FRACTION: f64 = 1e-6;

/// Samples on the uniform part of the recorded grid.
const UNIFORM_SAMPLES: usize = 400;
/// Ratio of consecutive distances to the extinction time on the geometric
/// part of the grid.
const GEOMETRIC_RATIO: f64 = 0.98;

/// Fewest samples [`huisken_derivative_check`] accepts.
pub const MIN_TRACE_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub model: String,
    pub rho0: f64,
    /// Isoperimetric constant used in `D`.
    pub c: f64,
    pub times: Vec<f64>,
    pub rho: Vec<f64>,
    pub area: Vec<f64>,
    pub volume: Vec<f64>,
    pub iso_diff: Vec<f64>,
    /// `None` if the flow stopped before reaching the extinction radius.
    pub extinction_time: Option<f64>,
}

impl FlowTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `A(0)^(3/2)`, the natural size of `D`.
    pub fn scale(&self) -> f64 {
        self.area.first().map_or(0.0, |a| a.powf(1.5))
    }

    /// Largest increase of `D` between consecutive samples, relative to
    /// `D(0)` (absolute when `D(0) = 0`). A `D(0)` below `1e-12 · scale`
    /// is roundoff and counts as zero.
    pub fn monotonicity_violation(&self) -> f64 {
        let d0 = self.iso_diff.first().copied().unwrap_or(0.0).abs();
        let norm = if d0 > 1e-12 * self.scale() { d0 } else { 1.0 };
        self.iso_diff.windows(2).map(|w| (w[1] - w[0]) / norm).fold(0.0, f64::max)
    }

    /// `max(0, -min D) / scale`.
    pub fn negativity(&self) -> f64 {
        let low = self.iso_diff.iter().copied().fold(0.0, f64::min);
        -low / self.scale()
    }

    /// `max |D| / scale`; zero on round Euclidean balls and cones.
    pub fn max_iso_diff(&self) -> f64 {
        self.iso_diff.iter().map(|d| d.abs()).fold(0.0, f64::max) / self.scale()
    }

    fn push(&mut self, manifold: &ModelManifold, t: f64, sigma: f64) -> Result<()> {
        let rho = sigma.max(0.0).sqrt();
        let area = manifold.sphere_area(rho);
        let volume = ball_volume(manifold, rho)?;
        self.times.push(t);
        self.rho.push(rho);
        self.area.push(area);
        self.volume.push(volume);
        self.iso_diff.push(area.powf(1.5) - self.c * volume);
        Ok(())
    }
}

/// A flow that stopped early, with everything recorded up to that point.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowFailure {
    pub error: Error,
    pub partial: Box<FlowTrace>,
}

impl From<FlowFailure> for Error {
    fn from(failure: FlowFailure) -> Self {
        failure.error
    }
}

fn require_closed_three(manifold: &ModelManifold) -> Result<()> {
    if manifold.n() != 3 {
        return Err(Error::NotThreeDimensional { n: manifold.n() });
    }
    if !manifold.warp().origin_closed() {
        return Err(Error::NotApplicable { what: "mean curvature flow needs a model closed at the origin" });
    }
    Ok(())
}

fn ball_volume(manifold: &ModelManifold, rho: f64) -> Result<f64> {
    let warp = *manifold.warp();
    let quad = QuadSpec::default().with_rel_tol(1e-13).with_abs_tol(0.0);
    Ok(manifold.cross_area() * integrate(|s| warp.f(s).powi(2), 0.0, rho, &quad)?)
}

/// `√(36π · AVR)`.
pub fn default_iso_constant(manifold: &ModelManifold) -> f64 {
    (36.0 * PI * manifold.avr()).sqrt()
}

fn flow_spec(sigma0: f64) -> OdeSpec {
    OdeSpec { rel_tol: 1e-12, abs_tol: 1e-14 * sigma0, ..OdeSpec::default() }
}

/// Flows the coordinate sphere `{r = ρ0}` to extinction.
///
/// A first pass locates the extinction time `T`. The second records the
/// trace on 400 uniform times in `[0, T/2]` followed by times whose distance
/// to `T` shrinks geometrically, so that finite differences stay accurate
/// where `D` steepens.
pub fn flow_sphere(manifold: &ModelManifold, rho0: f64, c_override: Option<f64>) -> core::result::Result<FlowTrace, FlowFailure> {
    let c = c_override.unwrap_or_else(|| default_iso_constant(manifold));
    let mut trace = FlowTrace {
        model: manifold.to_string(),
        rho0,
        c,
        times: Vec::new(),
        rho: Vec::new(),
        area: Vec::new(),
        volume: Vec::new(),
        iso_diff: Vec::new(),
        extinction_time: None,
    };
    let fail = |error: Error, partial: &FlowTrace| FlowFailure { error, partial: Box::new(partial.clone()) };
    if let Err(e) = require_closed_three(manifold) {
        return Err(fail(e, &trace));
    }
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(fail(Error::InvalidParameter { name: "rho0", value: rho0, reason: "must be positive" }, &trace));
    }
    let warp = *manifold.warp();
    let rhs = |_t: f64, y: &[f64; 1]| [-4.0 * warp.log_slope(y[0].max(0.0).sqrt())];
    let sigma0 = rho0 * rho0;
    let sigma_stop = (EXTINCTION_FRACTION * rho0).powi(2);
    let stop = |_t: f64, y: &[f64; 1]| y[0] - sigma_stop;

    let first = match ode_solve(rhs, [sigma0], 0.0, stop, &flow_spec(sigma0)) {
        Ok(tr) => tr,
        Err(failure) => {
            for (t, y) in failure.partial.times.iter().zip(&failure.partial.states) {
                if let Err(e) = trace.push(manifold, *t, y[0]) {
                    return Err(fail(e, &trace));
                }
            }
            return Err(fail(failure.error, &trace));
        }
    };
    if first.termination != Termination::Event {
        return Err(fail(Error::Divergence { reason: "flow did not reach extinction" }, &trace));
    }
    let horizon = first.last_time();

    let mut targets: Vec<f64> = (1..=UNIFORM_SAMPLES).map(|i| 0.5 * horizon * i as f64 / UNIFORM_SAMPLES as f64).collect();
    let mut gap = 0.5 * horizon * GEOMETRIC_RATIO;
    // Segments narrower than a few thousand ulps of T would underflow.
    while gap * (1.0 - GEOMETRIC_RATIO) > 1e4 * f64::EPSILON * horizon {
        targets.push(horizon - gap);
        gap *= GEOMETRIC_RATIO;
    }
    targets.push(f64::INFINITY);

    if let Err(e) = trace.push(manifold, 0.0, sigma0) {
        return Err(fail(e, &trace));
    }
    let (mut t, mut sigma) = (0.0, sigma0);
    for &target in &targets {
        let spec = OdeSpec { t_end: target, ..flow_spec(sigma0) };
        let segment = match ode_solve(rhs, [sigma], t, stop, &spec) {
            Ok(seg) => seg,
            Err(failure) => {
                let (ft, fy) = (failure.partial.last_time(), failure.partial.last_state()[0]);
                if ft > t {
                    let _ = trace.push(manifold, ft, fy);
                }
                return Err(fail(failure.error, &trace));
            }
        };
        t = segment.last_time();
        sigma = segment.last_state()[0];
        if let Err(e) = trace.push(manifold, t, sigma) {
            return Err(fail(e, &trace));
        }
        if segment.termination == Termination::Event {
            trace.extinction_time = Some(t);
            return Ok(trace);
        }
        if segment.termination == Termination::MaxSteps {
            return Err(fail(Error::Divergence { reason: "step budget exhausted before extinction" }, &trace));
        }
    }
    Err(fail(Error::Divergence { reason: "flow did not reach extinction" }, &trace))
}

/// Closed-form `dD/dt = -(3/2) A^(1/2) ∫H² dσ + C ∫H dσ` at radius `ρ`,
/// returned as its two terms.
fn huisken_terms(manifold: &ModelManifold, c: f64, rho: f64) -> (f64, f64) {
    let warp = manifold.warp();
    let fraction = manifold.cross_area() / unit_sphere_area(3);
    let (f, df) = (warp.f(rho), warp.df(rho));
    let area = manifold.sphere_area(rho);
    let h_squared = 16.0 * PI * fraction * df * df;
    let h_integral = 8.0 * PI * fraction * f * df;
    (-1.5 * area.sqrt() * h_squared, c * h_integral)
}

/// Compares nonuniform central differences of `D` along the trace with the
/// closed-form derivative. The violation is the largest mismatch divided by
/// the largest magnitude of either closed-form term on the trace.
pub fn huisken_derivative_check(trace: &FlowTrace, manifold: &ModelManifold, tolerance: f64) -> Result<CheckReport> {
    if trace.len() < MIN_TRACE_SAMPLES {
        return Err(Error::InsufficientSamples { got: trace.len(), need: MIN_TRACE_SAMPLES });
    }
    let mut mismatch = 0.0f64;
    let mut magnitude = 0.0f64;
    for i in 1..trace.len() - 1 {
        let (hl, hr) = (trace.times[i] - trace.times[i - 1], trace.times[i + 1] - trace.times[i]);
        let (dl, d, dr) = (trace.iso_diff[i - 1], trace.iso_diff[i], trace.iso_diff[i + 1]);
        let fd = (hl * hl * dr - hr * hr * dl - (hl * hl - hr * hr) * d) / (hl * hr * (hl + hr));
        let (shrink, isoperimetric) = huisken_terms(manifold, trace.c, trace.rho[i]);
        mismatch = mismatch.max((fd - (shrink + isoperimetric)).abs());
        magnitude = magnitude.max(shrink.abs()).max(isoperimetric.abs());
    }
    let violation = if magnitude > 0.0 { mismatch / magnitude } else { mismatch };
    Ok(CheckReport::evaluate("mcf", "huisken_derivative", trace.model.to_string(), violation, tolerance, trace.len() - 2)
        .with_param("rho0", trace.rho0))
}

/// `|∂B(ρ)|³ / (36π |B(ρ)|²)`.
pub fn iso_ratio(manifold: &ModelManifold, rho: f64) -> Result<f64> {
    require_closed_three(manifold)?;
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter { name: "rho", value: rho, reason: "must be positive" });
    }
    let area = manifold.sphere_area(rho);
    let volume = ball_volume(manifold, rho)?;
    Ok(area.powi(3) / (36.0 * PI * volume * volume))
}
