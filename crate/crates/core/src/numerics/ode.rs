//! Adaptive Dormand–Prince 5(4) integration with event location.

use alloc::vec::Vec;

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Upper bound on any accepted step.
    pub max_step: f64,
    /// Integration stops here if no event fires first.
    pub t_end: f64,
    pub initial_step: Option<f64>,
}

impl Default for OdeSpec {
    fn default() -> Self {
        OdeSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            max_step: f64::INFINITY,
            t_end: f64::INFINITY,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Event,
    EndTime,
    MaxSteps,
}

/// Accepted steps of an integration, starting with the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub termination: Termination,
}

impl<const N: usize> Trajectory<N> {
    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial state")
    }

    pub fn last_state(&self) -> &[f64; N] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// An integration that stopped early, with everything computed up to then.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeFailure<const N: usize> {
    pub error: Error,
    pub partial: Trajectory<N>,
}

impl<const N: usize> From<OdeFailure<N>> for Error {
    fn from(failure: OdeFailure<N>) -> Self {
        failure.error
    }
}

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Step<const N: usize> {
    y: [f64; N],
    error: [f64; N],
}

#[allow(clippy::needless_range_loop)]
fn dopri_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], h: f64) -> Step<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = rhs(t, y);
    for stage in 1..7 {
        let mut ys = *y;
        for (i, yi) in ys.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..stage {
                acc += A[stage][j] * k[j][i];
            }
            *yi += h * acc;
        }
        k[stage] = rhs(t + C[stage] * h, &ys);
    }
    let mut out = Step { y: *y, error: [0.0; N] };
    for i in 0..N {
        let mut high = 0.0;
        let mut low = 0.0;
        for s in 0..7 {
            high += B5[s] * k[s][i];
            low += B4[s] * k[s][i];
        }
        out.y[i] += h * high;
        out.error[i] = h * (high - low);
    }
    out
}

#[allow(clippy::needless_range_loop)]
fn error_norm<const N: usize>(spec: &OdeSpec, y0: &[f64; N], step: &Step<N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let scale = spec.abs_tol + spec.rel_tol * y0[i].abs().max(step.y[i].abs());
        let e = step.error[i] / scale;
        sum += e * e;
    }
    let norm = (sum / N.max(1) as f64).sqrt();
    if norm.is_finite() {
        norm
    } else {
        f64::INFINITY
    }
}

/// Integrates `y' = rhs(t, y)` from `(t0, y0)`.
///
/// Integration stops at the first sign change of `stop` from positive to
/// non-positive, at `spec.t_end`, or after `spec.max_steps` accepted steps.
/// An event is bracketed within the last step and refined by bisection on
/// the step length until the bracket is narrower than `spec.abs_tol`; the
/// recorded final state is the first one past the crossing.
pub fn ode_solve<const N: usize, F, G>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    stop: G,
    spec: &OdeSpec,
) -> Result<Trajectory<N>, OdeFailure<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(f64, &[f64; N]) -> f64,
{
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), termination: Termination::MaxSteps };
    traj.times.push(t0);
    traj.states.push(y0);

    let fail = |error: Error, partial: Trajectory<N>| Err(OdeFailure { error, partial });

    if !(spec.rel_tol > 0.0 && spec.abs_tol > 0.0 && spec.max_step > 0.0) {
        return fail(Error::domain("ODE tolerances and max step must be positive"), traj);
    }
    if stop(t0, &y0) <= 0.0 {
        traj.termination = Termination::Event;
        return Ok(traj);
    }
    if t0 >= spec.t_end {
        traj.termination = Termination::EndTime;
        return Ok(traj);
    }

    let mut t = t0;
    let mut y = y0;
    let mut h = spec.initial_step.unwrap_or_else(|| initial_step(&rhs, t0, &y0, spec));
    h = h.min(spec.max_step);

    let mut accepted = 0usize;
    while accepted < spec.max_steps {
        let remaining = spec.t_end - t;
        let hits_end = h >= remaining;
        if hits_end {
            h = remaining;
        }
        let floor = 8.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE);
        if h <= floor {
            return fail(Error::StepUnderflow { t }, traj);
        }

        let step = dopri_step(&rhs, t, &y, h);
        let err = error_norm(spec, &y, &step);
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
            continue;
        }

        let t_next = if hits_end { spec.t_end } else { t + h };
        if stop(t_next, &step.y) <= 0.0 {
            let (te, ye) = locate_event(&rhs, &stop, t, &y, h, spec.abs_tol);
            traj.times.push(te);
            traj.states.push(ye);
            traj.termination = Termination::Event;
            return Ok(traj);
        }

        t = t_next;
        y = step.y;
        traj.times.push(t);
        traj.states.push(y);
        accepted += 1;

        if hits_end {
            traj.termination = Termination::EndTime;
            return Ok(traj);
        }
        let growth = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * growth).min(spec.max_step);
    }
    traj.termination = Termination::MaxSteps;
    Ok(traj)
}

fn locate_event<const N: usize, F, G>(
    rhs: &F,
    stop: &G,
    t: f64,
    y: &[f64; N],
    h: f64,
    width: f64,
) -> (f64, [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(f64, &[f64; N]) -> f64,
{
    let mut lo = 0.0;
    let mut hi = h;
    let mut hi_state = dopri_step(rhs, t, y, h).y;
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let trial = dopri_step(rhs, t, y, mid).y;
        if stop(t + mid, &trial) <= 0.0 {
            hi = mid;
            hi_state = trial;
        } else {
            lo = mid;
        }
    }
    (t + hi, hi_state)
}

fn initial_step<const N: usize, F>(rhs: &F, t0: f64, y0: &[f64; N], spec: &OdeSpec) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let f0 = rhs(t0, y0);
    let scaled = |v: &[f64; N]| {
        let mut s = 0.0;
        for i in 0..N {
            let w = spec.abs_tol + spec.rel_tol * y0[i].abs();
            s += (v[i] / w) * (v[i] / w);
        }
        (s / N.max(1) as f64).sqrt()
    };
    let d0 = scaled(y0);
    let d1 = scaled(&f0);
    let h = if d0 < 1e-5 || d1 < 1e-5 || !d1.is_finite() { 1e-6 } else { 0.01 * d0 / d1 };
    let span = spec.t_end - t0;
    let h = if span.is_finite() { h.min(span) } else { h };
    h.min(spec.max_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let spec = OdeSpec { t_end: 1.0, ..OdeSpec::default() };
        let traj = ode_solve(|_, y: &[f64; 1]| [y[0]], [1.0], 0.0, |_, _| 1.0, &spec).unwrap();
        assert_eq!(traj.termination, Termination::EndTime);
        assert_eq!(traj.last_time(), 1.0);
        assert!((traj.last_state()[0] - core::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn square_root_extinction_event() {
        // rho' = -2/rho, rho(0) = 1 gives rho^2 = 1 - 4t.
        let spec = OdeSpec::default();
        let traj = ode_solve(
            |_, y: &[f64; 1]| [-2.0 / y[0]],
            [1.0],
            0.0,
            |_, y| y[0] - 1e-6,
            &spec,
        )
        .unwrap();
        assert_eq!(traj.termination, Termination::Event);
        assert!((traj.last_time() - 0.25).abs() < 1e-8, "{}", traj.last_time());
    }

    #[test]
    fn max_step_is_respected() {
        let spec = OdeSpec { t_end: 1.0, max_step: 0.01, ..OdeSpec::default() };
        let traj = ode_solve(|_, _: &[f64; 1]| [1.0], [0.0], 0.0, |_, _| 1.0, &spec).unwrap();
        for w in traj.times.windows(2) {
            assert!(w[1] - w[0] <= 0.01 * (1.0 + 1e-12));
        }
        assert!(traj.len() >= 101);
    }

    #[test]
    fn max_steps_terminates() {
        let spec = OdeSpec { max_steps: 10, max_step: 1e-3, ..OdeSpec::default() };
        let traj = ode_solve(|_, y: &[f64; 1]| [-y[0]], [1.0], 0.0, |_, _| 1.0, &spec).unwrap();
        assert_eq!(traj.termination, Termination::MaxSteps);
        assert_eq!(traj.len(), 11);
    }

    #[test]
    fn blow_up_reports_underflow_with_partial_trace() {
        // y' = y^2, y(0) = 1 blows up at t = 1.
        let spec = OdeSpec { t_end: 2.0, ..OdeSpec::default() };
        let err = ode_solve(|_, y: &[f64; 1]| [y[0] * y[0]], [1.0], 0.0, |_, _| 1.0, &spec)
            .unwrap_err();
        assert!(matches!(err.error, Error::StepUnderflow { .. }));
        let t_last = err.partial.last_time();
        assert!(t_last < 1.0 && t_last > 0.99, "{t_last}");
    }

    #[test]
    fn tighter_tolerance_improves_extinction_time() {
        let event_time = |rel_tol: f64| {
            let spec = OdeSpec { rel_tol, abs_tol: rel_tol * 1e-2, ..OdeSpec::default() };
            // Same law in a variable whose error does not vanish identically.
            ode_solve(
                |_, y: &[f64; 2]| [-2.0 / y[0], 1.0],
                [1.0, 0.0],
                0.0,
                |_, y| y[0] - 1e-6,
                &spec,
            )
            .unwrap()
            .last_time()
        };
        let exact = 0.25 * (1.0 - 1e-12);
        let errors: Vec<f64> = [1e-4, 1e-6, 1e-8].iter().map(|&tol| (event_time(tol) - exact).abs()).collect();
        assert!(errors[1] <= errors[0] && errors[2] <= errors[1], "{errors:?}");
    }
}
