//! Large-radius behaviour of the capacitary potential.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use super::PotentialSolution;
use crate::error::Result;
use crate::geometry::unit_sphere_area;
use crate::numerics::{integrate_improper, QuadSpec};
use crate::report::CheckReport;

const DECADES: f64 = 6.0;
const POINTS_PER_DECADE: usize = 10;

/// Residuals of the asymptotic expansions of `u` on a geometric grid
/// `r0 ≤ r ≤ 10^6 r0`. Fields that need `AVR > 0` (or balls about the
/// origin, for the Li–Yau ratio) are `None` when the model lacks them.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub model: String,
    pub max_radius: f64,
    pub samples: usize,
    /// `|u r^(n-2) - Cap/AVR| / (Cap/AVR)` at the largest radius.
    pub u_decay: Option<f64>,
    /// `∫_{r} ||Du| - (n-2)(Cap/AVR) r^(1-n)| dσ` at `r0`.
    pub gradient_l1_at_r0: Option<f64>,
    /// The same integral at the largest radius, divided by its value at
    /// `r0` (or by the flux when that vanishes).
    pub gradient_l1: Option<f64>,
    /// `sup r |Du| / u` over the grid.
    pub yau_sup: f64,
    /// Extremes of `u(r) / ∫_r^∞ s/|B(s)| ds` over the grid.
    pub li_yau_range: Option<(f64, f64)>,
    /// `∫_{r} u^((n-1)/(n-2)) dσ` at the largest radius against
    /// `|S^(n-1)| AVR (Cap/AVR)^((n-1)/(n-2))`, relative.
    pub sphere_integral: Option<f64>,
}

pub fn verify_asymptotics(sol: &PotentialSolution) -> Result<AsymptoticsReport> {
    sol.require_nonparabolic()?;
    let m = sol.manifold();
    let n = m.dim();
    let r0 = sol.r0();
    let cap = sol.capacity().expect("nonparabolic solutions carry a capacity");
    let avr = m.avr();

    let count = (DECADES as usize) * POINTS_PER_DECADE + 1;
    let radii: Vec<f64> = (0..count).map(|i| r0 * 10f64.powf(DECADES * i as f64 / (count - 1) as f64)).collect();
    let values = radii.iter().map(|&r| sol.value(r)).collect::<Result<Vec<_>>>()?;
    let r_max = *radii.last().unwrap();
    let u_max = *values.last().unwrap();

    let yau_sup = radii
        .iter()
        .zip(&values)
        .map(|(&r, &u)| r * sol.grad_mag(r) / u)
        .fold(0.0, f64::max);

    let (mut u_decay, mut gradient_l1, mut gradient_l1_at_r0, mut sphere_integral) = (None, None, None, None);
    if avr > 0.0 {
        let ratio = cap / avr;
        u_decay = Some((u_max * r_max.powf(n - 2.0) - ratio).abs() / ratio);

        let l1 = |r: f64| m.sphere_area(r) * (sol.grad_mag(r) - (n - 2.0) * ratio * r.powf(1.0 - n)).abs();
        let at_r0 = l1(r0);
        let denom = if at_r0 > 1e-12 * sol.flux() { at_r0 } else { sol.flux() };
        gradient_l1_at_r0 = Some(at_r0);
        gradient_l1 = Some(l1(r_max) / denom);

        let k = (n - 1.0) / (n - 2.0);
        let limit = unit_sphere_area(m.n()) * avr * ratio.powf(k);
        sphere_integral = Some((m.sphere_area(r_max) * u_max.powf(k) - limit).abs() / limit);
    }

    let li_yau_range = if m.warp().origin_closed() {
        let quad = QuadSpec::default().with_rel_tol(1e-8).with_abs_tol(0.0);
        let decay = m.tail_decay_exponent();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (&r, &u) in radii.iter().zip(&values) {
            let green_scale = integrate_improper(
                |s| s / m.ball_volume(s).unwrap_or(f64::NAN),
                r,
                decay,
                &quad,
            )?;
            let ratio = u / green_scale;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        Some((lo, hi))
    } else {
        None
    };

    Ok(AsymptoticsReport {
        model: m.to_string(),
        max_radius: r_max,
        samples: count,
        u_decay,
        gradient_l1_at_r0,
        gradient_l1,
        yau_sup,
        li_yau_range,
        sphere_integral,
    })
}

impl AsymptoticsReport {
    /// One report per branch; `tolerance` applies to the three relative
    /// residuals, the Yau and Li–Yau branches only require finiteness.
    pub fn checks(&self, tolerance: f64) -> Vec<CheckReport> {
        const SUITE: &str = "potential";
        let relative = |name: &str, value: Option<f64>| match value {
            Some(v) => CheckReport::evaluate(SUITE, name, &self.model, v, tolerance, 1),
            None => CheckReport::not_applicable(SUITE, name, &self.model),
        };
        let finite = |ok: bool| if ok { 0.0 } else { f64::INFINITY };
        let li_yau = match self.li_yau_range {
            Some((lo, hi)) => CheckReport::evaluate(
                SUITE,
                "li_yau_sandwich",
                &self.model,
                finite(lo > 0.0 && hi.is_finite()),
                0.0,
                self.samples,
            ),
            None => CheckReport::not_applicable(SUITE, "li_yau_sandwich", &self.model),
        };
        vec![
            relative("u_decay", self.u_decay),
            relative("gradient_l1", self.gradient_l1),
            relative("sphere_integral", self.sphere_integral),
            CheckReport::evaluate(
                SUITE,
                "yau_gradient",
                &self.model,
                finite(self.yau_sup.is_finite()),
                0.0,
                self.samples,
            ),
            li_yau,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ModelManifold, WarpProfile};
    use crate::potential::solve_exterior;

    fn report(n: usize, warp: WarpProfile) -> AsymptoticsReport {
        let m = ModelManifold::new(n, warp).unwrap();
        verify_asymptotics(&solve_exterior(&m, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn cone_is_exact() {
        let r = report(3, WarpProfile::Cone { alpha: 0.5 });
        assert!(r.u_decay.unwrap() < 1e-12);
        assert!(r.gradient_l1.unwrap() < 1e-12);
        assert!(r.gradient_l1_at_r0.unwrap() < 1e-12);
        assert!(r.sphere_integral.unwrap() < 1e-12);
        assert!((r.yau_sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_is_exact() {
        let r = report(3, WarpProfile::Euclidean);
        assert!(r.u_decay.unwrap() < 1e-12 && r.sphere_integral.unwrap() < 1e-12);
        let (lo, hi) = r.li_yau_range.unwrap();
        assert!(lo > 0.0 && hi.is_finite());
    }

    #[test]
    fn smoothed_cone_decays_to_cone_rate() {
        let r = report(3, WarpProfile::SmoothedCone { alpha: 0.7 });
        assert!(r.u_decay.unwrap() <= 1e-3, "{:?}", r.u_decay);
        assert!(r.gradient_l1.unwrap() <= 1e-3);
        assert!(r.sphere_integral.unwrap() <= 1e-3);
    }

    #[test]
    fn sub_euclidean_branches_not_applicable() {
        let r = report(3, WarpProfile::Power { gamma: 0.6 });
        assert!(r.u_decay.is_none() && r.li_yau_range.is_none());
        let checks = r.checks(1e-3);
        assert_eq!(checks[0].status, crate::report::Status::NotApplicable);
        assert_eq!(checks[3].status, crate::report::Status::Pass);
    }

    #[test]
    fn parabolic_input_rejected() {
        let m = ModelManifold::new(3, WarpProfile::Tanh).unwrap();
        let sol = solve_exterior(&m, 1.0).unwrap();
        assert!(matches!(verify_asymptotics(&sol), Err(crate::Error::NotApplicable { .. })));
    }
}
