//! Monotone level-set quantities of exterior potentials.
//!
//! For the capacitary potential `u` and `k = (n-1)/(n-2)`:
//!
//! - `U_β(t) = t^(-βk) ∫_{u=t} |Du|^(β+1) dσ` on `t ∈ (0, 1]`,
//! - `Φ_β(s) = ∫_{φ=s} |∇φ|^(β+1) dσ̃` in the conformal metric
//!   `g̃ = u^(2/(n-2)) g`, `φ = -log u`, so that `Φ_β(s) = U_β(e^(-s))`,
//! - `A_β(r) = r^(1-n) ∫_{b=r} |Db|^(β+1) dσ` with `b = u^(-1/(n-2))`,
//!
//! and for the parabolic potential `ψ`, `Ψ_β(s) = ∫_{ψ=s} |Dψ|^(β+1) dσ`.
//!
//! Derivatives are computed three ways: the level-set (surface) formula,
//! the sub-level (bulk) formula, and Richardson finite differences. On
//! radial solutions the tangential gradient of `|Du|` vanishes and the
//! refined Kato term is identically zero, but both are still evaluated from
//! their closed forms.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

// Float methods for no_std builds; unused when std is linked elsewhere.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::unit_sphere_area;
use crate::numerics::{central_diff_noisy, default_step, integrate_improper, QuadSpec};
use crate::potential::{LevelPoint, PotentialSolution, SpheroidPotential};
use crate::report::CheckReport;

/// Smallest `β` covered by the monotonicity theorems, `(n-2)/(n-1)`.
pub fn beta_threshold(n: usize) -> f64 {
    (n as f64 - 2.0) / (n as f64 - 1.0)
}

fn conformal_exponent(n: f64) -> f64 {
    (n - 1.0) / (n - 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonotoneKind {
    U,
    Phi,
    Psi,
    A,
}

impl MonotoneKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MonotoneKind::U => "U",
            MonotoneKind::Phi => "Phi",
            MonotoneKind::Psi => "Psi",
            MonotoneKind::A => "A",
        }
    }

    /// `true` if the quantity is nondecreasing in its level parameter.
    pub fn increasing(&self) -> bool {
        matches!(self, MonotoneKind::U)
    }
}

/// One evaluation of a monotone quantity. Derivative fields that were not
/// computed, or do not apply, are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneSample {
    pub beta: f64,
    pub level: f64,
    pub r_level: f64,
    pub value: f64,
    pub d_surface: f64,
    pub d_bulk: f64,
    pub d_fd: f64,
    /// Mean curvature of the level set (area-weighted mean if not constant).
    pub mean_curvature: f64,
    /// `|∇φ|_g̃ = |Du| / u^((n-1)/(n-2))` (area-weighted mean if not constant).
    pub grad_conf: f64,
}

impl MonotoneSample {
    fn bare(beta: f64, level: f64, r_level: f64, value: f64, mean_curvature: f64, grad_conf: f64) -> Self {
        MonotoneSample {
            beta,
            level,
            r_level,
            value,
            d_surface: f64::NAN,
            d_bulk: f64::NAN,
            d_fd: f64::NAN,
            mean_curvature,
            grad_conf,
        }
    }

    fn with(mut self, d: Derivatives) -> Self {
        self.d_surface = d.surface;
        self.d_bulk = d.bulk;
        self.d_fd = d.fd;
        self
    }
}

/// The three derivative estimates at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub surface: f64,
    /// NaN where the bulk formula does not apply (spheroids).
    pub bulk: f64,
    pub fd: f64,
    pub fd_error: f64,
}

/// A potential whose level sets the `U_β` family is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum LevelSource<'a> {
    Warped(&'a PotentialSolution),
    Spheroid(&'a SpheroidPotential),
}

impl<'a> From<&'a PotentialSolution> for LevelSource<'a> {
    fn from(sol: &'a PotentialSolution) -> Self {
        LevelSource::Warped(sol)
    }
}

impl<'a> From<&'a SpheroidPotential> for LevelSource<'a> {
    fn from(sp: &'a SpheroidPotential) -> Self {
        LevelSource::Spheroid(sp)
    }
}

impl LevelSource<'_> {
    pub fn dimension(&self) -> usize {
        match self {
            LevelSource::Warped(sol) => sol.manifold().n(),
            LevelSource::Spheroid(_) => 3,
        }
    }

    pub fn capacity(&self) -> Result<f64> {
        match self {
            LevelSource::Warped(sol) => {
                sol.require_nonparabolic()?;
                Ok(sol.capacity().expect("nonparabolic"))
            }
            LevelSource::Spheroid(sp) => Ok(sp.capacity()),
        }
    }

    pub fn avr(&self) -> f64 {
        match self {
            LevelSource::Warped(sol) => sol.manifold().avr(),
            LevelSource::Spheroid(_) => 1.0,
        }
    }

    pub fn model_id(&self) -> String {
        match self {
            LevelSource::Warped(sol) => sol.manifold().to_string(),
            LevelSource::Spheroid(sp) => {
                let (a, b) = sp.semi_axes();
                alloc::format!("spheroid(a={a},b={b})")
            }
        }
    }
}

/// Radial data of the coordinate sphere `{u = t}` or `{ψ = s}`.
#[derive(Debug, Clone, Copy)]
struct RadialLevel {
    r: f64,
    grad: f64,
    area: f64,
    mean_curvature: f64,
}

fn radial_level(sol: &PotentialSolution, level: f64) -> Result<RadialLevel> {
    let r = sol.level_radius(level)?;
    let m = sol.manifold();
    Ok(RadialLevel { r, grad: sol.grad_mag(r), area: m.sphere_area(r), mean_curvature: m.sphere_mean_curvature(r) })
}

fn check_beta(beta: f64) -> Result<()> {
    if beta >= 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "beta", value: beta, reason: "must be a non-negative number" })
    }
}

fn check_unit_level(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::RootNotBracketed { level: t })
    }
}

// ---------------------------------------------------------------------------
// U_β

/// `U_β(t)` without the `t ≤ 1` restriction, so differences can straddle
/// the boundary level.
fn u_value(src: LevelSource<'_>, beta: f64, t: f64) -> Result<f64> {
    let n = src.dimension() as f64;
    let weight = t.powf(-beta * conformal_exponent(n));
    match src {
        LevelSource::Warped(sol) => {
            let lv = radial_level(sol, t)?;
            Ok(weight * lv.grad.powf(beta + 1.0) * lv.area)
        }
        LevelSource::Spheroid(sp) => {
            let xi = sp.level_coordinate(t)?;
            Ok(weight * sp.surface_integral(xi, |p| p.grad.powf(beta + 1.0))?)
        }
    }
}

/// `U_β(t)` with the level radius, mean curvature and conformal gradient of
/// `{u = t}`. Derivative fields are left NaN; see [`du_beta`].
pub fn u_beta(src: LevelSource<'_>, beta: f64, t: f64) -> Result<MonotoneSample> {
    check_beta(beta)?;
    check_unit_level(t)?;
    let n = src.dimension() as f64;
    let k = conformal_exponent(n);
    match src {
        LevelSource::Warped(sol) => {
            sol.require_nonparabolic()?;
            let lv = radial_level(sol, t)?;
            let value = t.powf(-beta * k) * lv.grad.powf(beta + 1.0) * lv.area;
            Ok(MonotoneSample::bare(beta, t, lv.r, value, lv.mean_curvature, lv.grad / t.powf(k)))
        }
        LevelSource::Spheroid(sp) => {
            let xi = sp.level_coordinate(t)?;
            let area = sp.area(xi)?;
            let value = t.powf(-beta * k) * sp.surface_integral(xi, |p| p.grad.powf(beta + 1.0))?;
            let mean_h = sp.surface_integral(xi, |p| p.mean_curvature)? / area;
            let mean_conf = sp.surface_integral(xi, |p| p.grad)? / (area * t.powf(k));
            Ok(MonotoneSample::bare(beta, t, sp.level_axes(xi).0, value, mean_h, mean_conf))
        }
    }
}

/// Surface formula
/// `U_β'(t) = β t^(-βk) ∫_{u=t} |Du|^β (H - k |D log u|) dσ`.
fn u_surface_derivative(src: LevelSource<'_>, beta: f64, t: f64) -> Result<f64> {
    let n = src.dimension() as f64;
    let k = conformal_exponent(n);
    let weight = beta * t.powf(-beta * k);
    match src {
        LevelSource::Warped(sol) => {
            let lv = radial_level(sol, t)?;
            Ok(weight * lv.grad.powf(beta) * sol.mean_curvature_excess(lv.r)? * lv.area)
        }
        LevelSource::Spheroid(sp) => {
            // Here k = 2. H and k |Du| / u are each O(1/t) while the
            // weighted mean of their difference is O(t³), so the difference
            // is taken pointwise in closed form.
            let xi = sp.level_coordinate(t)?;
            let integrand = |p: LevelPoint| p.grad.powf(beta) * sp.mean_curvature_excess(xi, p.eta);
            // The integrand changes sign along the meridian.
            let l1 = sp.surface_integral(xi, |p| integrand(p).abs())?;
            let excess = sp.surface_integral_tol(xi, integrand, 1e-14 * l1)?;
            Ok(weight * excess)
        }
    }
}

/// Pointwise terms of the bulk integrands on a radial solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkTerms {
    /// `Ric(Dw, Dw)`.
    pub ricci: f64,
    /// `|DDw|²`.
    pub hessian_sq: f64,
    /// `|D|Dw||²`.
    pub grad_of_grad_sq: f64,
    /// `|D^T|Dw||²`, the part tangent to the level set.
    pub tangential_sq: f64,
}

impl BulkTerms {
    pub fn at(sol: &PotentialSolution, r: f64) -> Self {
        let m = sol.manifold();
        let warp = m.warp();
        let n = m.dim();
        let (f, df, ddf) = (warp.f(r), warp.df(r), warp.ddf(r));
        let first = sol.derivative(r);
        let second = sol.second_derivative(r);
        BulkTerms {
            ricci: -(n - 1.0) * ddf / f * first * first,
            hessian_sq: second * second + (n - 1.0) * (df * first / f).powi(2),
            grad_of_grad_sq: second * second,
            tangential_sq: 0.0,
        }
    }

    /// `|DDw|² - (n/(n-1)) |D|Dw||²`, nonnegative for harmonic `w`.
    pub fn kato_gap(&self, n: f64) -> f64 {
        self.hessian_sq - n / (n - 1.0) * self.grad_of_grad_sq
    }
}

/// Decay exponent of the `U_β` bulk integrand for a warp growing like `r^p`.
fn u_bulk_decay(sol: &PotentialSolution, beta: f64) -> f64 {
    let n = sol.manifold().dim();
    let q = sol.manifold().tail_decay_exponent();
    q + beta * (n - 1.0 - q) / (n - 2.0)
}

/// Bulk formula for `U_β'(t)`, integrated over `{u < t} = {r > r_t}`.
fn u_bulk_derivative(sol: &PotentialSolution, beta: f64, t: f64, scale: f64) -> Result<f64> {
    let m = sol.manifold();
    let n = m.dim();
    let k = conformal_exponent(n);
    let excess = beta - beta_threshold(m.n());
    let r_t = sol.level_radius(t)?;
    let warp = *m.warp();
    let integrand = |r: f64| -> f64 {
        let u = match sol.value(r) {
            Ok(u) => u,
            Err(_) => return f64::NAN,
        };
        let g = sol.grad_mag(r);
        let terms = BulkTerms::at(sol, r);
        let bracket = (n - 1.0) * warp.df(r) / warp.f(r) - k * g / u;
        let braces = terms.ricci
            + terms.kato_gap(n)
            + excess * terms.tangential_sq
            + excess * g * g * bracket * bracket;
        u.powf(2.0 - beta * k) * g.powf(beta - 2.0) * braces * m.sphere_area(r)
    };
    let quad = QuadSpec::default().with_rel_tol(1e-10).with_abs_tol(1e-13 * scale * t);
    let integral = integrate_improper(integrand, r_t, u_bulk_decay(sol, beta), &quad)?;
    Ok(beta / (t * t) * integral)
}

/// Relative accuracy of a single evaluation of a monotone quantity; each
/// goes through a root solve and quadratures at relative tolerance `1e-13`.
const LEVEL_ACCURACY: f64 = 1e-13;

fn fd_in_level<F: Fn(f64) -> f64>(f: F, level: f64) -> Result<(f64, f64)> {
    let d = central_diff_noisy(f, level, default_step(level), LEVEL_ACCURACY)?;
    Ok((d.value, d.error))
}

/// The surface representation of `U_β'(t)` alone.
pub fn du_surface(src: LevelSource<'_>, beta: f64, t: f64) -> Result<f64> {
    check_beta(beta)?;
    check_unit_level(t)?;
    if let LevelSource::Warped(sol) = src {
        sol.require_nonparabolic()?;
    }
    u_surface_derivative(src, beta, t)
}

/// The three estimates of `U_β'(t)`. The bulk estimate is NaN on spheroids.
pub fn du_beta(src: LevelSource<'_>, beta: f64, t: f64) -> Result<Derivatives> {
    check_beta(beta)?;
    check_unit_level(t)?;
    if let LevelSource::Warped(sol) = src {
        sol.require_nonparabolic()?;
    }
    let surface = u_surface_derivative(src, beta, t)?;
    let scale = u_value(src, beta, t)?.abs();
    let bulk = match src {
        LevelSource::Warped(sol) => u_bulk_derivative(sol, beta, t, scale)?,
        LevelSource::Spheroid(_) => f64::NAN,
    };
    // U_β varies on the scale t / p, where p is its log-slope (large on
    // sub-Euclidean ends, where U_β decays like a high power of t). The
    // surface value only sets the step; the difference quotient is its own.
    let log_slope = if scale > 0.0 { (t * surface / scale).abs() } else { 0.0 };
    let h0 = default_step(t).min(0.1 * t / log_slope.max(1.0));
    let d = central_diff_noisy(|x| u_value(src, beta, x).unwrap_or(f64::NAN), t, h0, LEVEL_ACCURACY)?;
    let (fd, fd_error) = (d.value, d.error);
    Ok(Derivatives { surface, bulk, fd, fd_error })
}

/// [`u_beta`] with all three derivatives filled in.
pub fn sample_u(src: LevelSource<'_>, beta: f64, t: f64) -> Result<MonotoneSample> {
    Ok(u_beta(src, beta, t)?.with(du_beta(src, beta, t)?))
}

// ---------------------------------------------------------------------------
// Φ_β

/// `Φ_β(s)` from conformal quantities, with derivatives from
/// `Φ_β'(s) = -t U_β'(t)` at `t = e^(-s)` and finite differences in `s`.
pub fn phi_beta(sol: &PotentialSolution, beta: f64, s: f64) -> Result<MonotoneSample> {
    check_beta(beta)?;
    sol.require_nonparabolic()?;
    if !(s >= 0.0) {
        return Err(Error::RootNotBracketed { level: s });
    }
    let value_at = |s: f64| -> Result<f64> { phi_value(sol, beta, s) };
    let value = value_at(s)?;
    let t = (-s).exp();
    let n = sol.manifold().dim();
    let lv = radial_level(sol, t)?;
    let src = LevelSource::Warped(sol);
    let d = du_beta(src, beta, t)?;
    let (fd, _) = fd_in_level(|x| value_at(x).unwrap_or(f64::NAN), s)?;
    Ok(MonotoneSample {
        beta,
        level: s,
        r_level: lv.r,
        value,
        d_surface: -t * d.surface,
        d_bulk: -t * d.bulk,
        d_fd: fd,
        mean_curvature: lv.mean_curvature,
        grad_conf: lv.grad / t.powf(conformal_exponent(n)),
    })
}

fn phi_value(sol: &PotentialSolution, beta: f64, s: f64) -> Result<f64> {
    let n = sol.manifold().dim();
    let k = conformal_exponent(n);
    let u = (-s).exp();
    let lv = radial_level(sol, u)?;
    let conf_grad = lv.grad / u.powf(k);
    let conf_area = u.powf(k) * lv.area;
    Ok(conf_grad.powf(beta + 1.0) * conf_area)
}

// ---------------------------------------------------------------------------
// Ψ_β

/// `Ψ_β(s)` on the parabolic potential. Derivative fields are NaN; see
/// [`dpsi_beta`].
pub fn psi_beta(sol: &PotentialSolution, beta: f64, s: f64) -> Result<MonotoneSample> {
    check_beta(beta)?;
    sol.require_parabolic()?;
    if !(s >= 0.0) {
        return Err(Error::RootNotBracketed { level: s });
    }
    let lv = radial_level(sol, s)?;
    let value = lv.grad.powf(beta + 1.0) * lv.area;
    Ok(MonotoneSample::bare(beta, s, lv.r, value, lv.mean_curvature, f64::NAN))
}

fn psi_value(sol: &PotentialSolution, beta: f64, s: f64) -> Result<f64> {
    let lv = radial_level(sol, s)?;
    Ok(lv.grad.powf(beta + 1.0) * lv.area)
}

/// Surface formula `Ψ_β'(s) = -β ∫_{ψ=s} |Dψ|^β H dσ`, the bulk formula
/// over `{ψ ≥ s}`, and finite differences.
pub fn dpsi_beta(sol: &PotentialSolution, beta: f64, s: f64) -> Result<Derivatives> {
    check_beta(beta)?;
    sol.require_parabolic()?;
    if !(s >= 0.0) {
        return Err(Error::RootNotBracketed { level: s });
    }
    let m = sol.manifold();
    let n = m.dim();
    let lv = radial_level(sol, s)?;
    let surface = -beta * lv.grad.powf(beta) * lv.mean_curvature * lv.area;

    let integrand = |r: f64| -> f64 {
        let g = sol.grad_mag(r);
        let terms = BulkTerms::at(sol, r);
        let braces = terms.ricci + terms.hessian_sq + (beta - 2.0) * terms.grad_of_grad_sq;
        let _ = n;
        g.powf(beta - 2.0) * braces * m.sphere_area(r)
    };
    let scale = lv.grad.powf(beta + 1.0) * lv.area;
    let quad = QuadSpec::default().with_rel_tol(1e-10).with_abs_tol(1e-14 * scale);
    // Parabolic warps are bounded, so the integrand decays at least like the
    // derivatives of f; the 1/x map is used and boundedness is verified.
    let bulk = -beta * integrate_improper(integrand, lv.r, 2.0, &quad)?;

    let (fd, fd_error) = fd_in_level(|x| psi_value(sol, beta, x).unwrap_or(f64::NAN), s)?;
    Ok(Derivatives { surface, bulk, fd, fd_error })
}

/// [`psi_beta`] with all three derivatives filled in.
pub fn sample_psi(sol: &PotentialSolution, beta: f64, s: f64) -> Result<MonotoneSample> {
    Ok(psi_beta(sol, beta, s)?.with(dpsi_beta(sol, beta, s)?))
}

// ---------------------------------------------------------------------------
// t → 0 limit

/// Levels used to extrapolate `U_β` to `t = 0`.
pub const LIMIT_LEVELS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub extrapolated: f64,
    pub formula: f64,
    pub values: [f64; 3],
}

/// `lim U_β = Cap^(1-β/(n-2)) AVR^(β/(n-2)) (n-2)^(β+1) |S^(n-1)|`, zero
/// when `AVR = 0`.
pub fn limit_formula(src: LevelSource<'_>, beta: f64) -> Result<f64> {
    let n = src.dimension();
    let nf = n as f64;
    let avr = src.avr();
    if avr == 0.0 {
        return Ok(0.0);
    }
    let cap = src.capacity()?;
    Ok(cap.powf(1.0 - beta / (nf - 2.0)) * avr.powf(beta / (nf - 2.0)) * (nf - 2.0).powf(beta + 1.0)
        * unit_sphere_area(n))
}

/// Aitken extrapolation of a sequence sampled at geometrically spaced
/// levels; falls back to the last value when the differences do not
/// contract monotonically.
pub fn aitken(values: [f64; 3]) -> f64 {
    let [a, b, c] = values;
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    let magnitude = a.abs().max(b.abs()).max(c.abs());
    if d1 == 0.0 || denom.abs() <= 1e-14 * magnitude {
        return c;
    }
    let ratio = d2 / d1;
    if !(ratio > 0.0 && ratio < 1.0) {
        return c;
    }
    c - d2 * d2 / denom
}

pub fn limit_t0(src: LevelSource<'_>, beta: f64) -> Result<LimitEstimate> {
    check_beta(beta)?;
    if let LevelSource::Warped(sol) = src {
        sol.require_nonparabolic()?;
    }
    let mut values = [0.0; 3];
    for (v, &t) in values.iter_mut().zip(LIMIT_LEVELS.iter()) {
        *v = u_value(src, beta, t)?;
    }
    Ok(LimitEstimate { extrapolated: aitken(values), formula: limit_formula(src, beta)?, values })
}

// ---------------------------------------------------------------------------
// A_β

/// `A_β(r) = r^(1-n) ∫_{b=r} |Db|^(β+1) dσ` with `b = u^(-1/(n-2))`.
pub fn colding_a_beta(sol: &PotentialSolution, beta: f64, r: f64) -> Result<f64> {
    check_beta(beta)?;
    sol.require_nonparabolic()?;
    if !(r > 0.0) {
        return Err(Error::RootNotBracketed { level: r });
    }
    let n = sol.manifold().dim();
    let u = r.powf(2.0 - n);
    let lv = radial_level(sol, u)?;
    let grad_b = lv.grad * u.powf(-conformal_exponent(n)) / (n - 2.0);
    Ok(r.powf(1.0 - n) * grad_b.powf(beta + 1.0) * lv.area)
}

/// Checks `Φ_β(s) = (n-2)^(β+1) A_β(e^(s/(n-2)))` on `s_grid` and that
/// `A_β` is nonincreasing along it. The violation is the larger of the
/// relative identity residual and the largest increase of `A_β` relative to
/// `A_β(1)`.
pub fn relation_check(sol: &PotentialSolution, beta: f64, s_grid: &[f64], tolerance: f64) -> Result<CheckReport> {
    sol.require_nonparabolic()?;
    let n = sol.manifold().dim();
    let mut grid: Vec<f64> = s_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut residual = 0.0f64;
    let mut a_values = Vec::with_capacity(grid.len());
    for &s in &grid {
        let phi = phi_value(sol, beta, s)?;
        let a = colding_a_beta(sol, beta, (s / (n - 2.0)).exp())?;
        residual = residual.max((phi - (n - 2.0).powf(beta + 1.0) * a).abs() / phi.abs());
        a_values.push(a);
    }
    let a_one = colding_a_beta(sol, beta, 1.0)?.abs();
    let rise = a_values.windows(2).map(|w| (w[1] - w[0]) / a_one).fold(0.0, f64::max);
    Ok(CheckReport::evaluate(
        "monotone",
        "colding_relation",
        sol.manifold(),
        residual.max(rise),
        tolerance,
        grid.len(),
    )
    .with_param("beta", beta))
}

// ---------------------------------------------------------------------------
// Gradient bound and rigidity

/// `|∇φ|_g̃ = |Du| / u^((n-1)/(n-2))` at radius `r`.
pub fn conformal_gradient(sol: &PotentialSolution, r: f64) -> Result<f64> {
    sol.require_nonparabolic()?;
    let k = conformal_exponent(sol.manifold().dim());
    Ok(sol.grad_mag(r) / sol.value(r)?.powf(k))
}

/// Checks that `sup_{r ≥ r0} |∇φ|_g̃` is attained on `∂Ω`: the violation is
/// the largest relative excess over the boundary value on a geometric grid
/// out to `10^6 r0`.
pub fn sharp_gradient_check(sol: &PotentialSolution, tolerance: f64) -> Result<CheckReport> {
    let r0 = sol.r0();
    let boundary = conformal_gradient(sol, r0)?;
    let count = 241;
    let mut excess = 0.0f64;
    for i in 0..count {
        let r = r0 * 10f64.powf(6.0 * i as f64 / (count - 1) as f64);
        excess = excess.max((conformal_gradient(sol, r)? - boundary) / boundary);
    }
    Ok(CheckReport::evaluate("monotone", "sharp_gradient", sol.manifold(), excess, tolerance, count))
}

/// Bulk integral of `U_β'` over `{u < t0}` plus `sup_{r ≥ r_t0} |f''|`.
/// Both vanish exactly when the exterior of `{u = t0}` is a cone.
pub fn rigidity_residual(sol: &PotentialSolution, beta: f64, t0: f64) -> Result<f64> {
    check_unit_level(t0)?;
    sol.require_nonparabolic()?;
    let scale = u_value(LevelSource::Warped(sol), beta, t0)?.abs();
    let bulk = u_bulk_derivative(sol, beta, t0, scale)?;
    let r_t = sol.level_radius(t0)?;
    let warp = sol.manifold().warp();
    let count = 241;
    let curvature = (0..count)
        .map(|i| warp.ddf(r_t * 10f64.powf(6.0 * i as f64 / (count - 1) as f64)).abs())
        .fold(0.0, f64::max);
    Ok(bulk + curvature)
}

// ---------------------------------------------------------------------------
// Series

/// Samples of one quantity at one `β`, sorted by level.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneSeries {
    pub kind: MonotoneKind,
    pub beta: f64,
    pub model: String,
    pub samples: Vec<MonotoneSample>,
    pub limit: Option<LimitEstimate>,
}

impl MonotoneSeries {
    pub fn new(kind: MonotoneKind, beta: f64, model: String, mut samples: Vec<MonotoneSample>) -> Self {
        samples.sort_by(|a, b| a.level.total_cmp(&b.level));
        MonotoneSeries { kind, beta, model, samples, limit: None }
    }

    /// Normalizing scale: the value at the boundary level (`t = 1` or
    /// `s = 0`) if sampled, else the largest magnitude.
    pub fn scale(&self) -> f64 {
        let boundary = match self.kind {
            MonotoneKind::U => 1.0,
            MonotoneKind::A => 1.0,
            MonotoneKind::Phi | MonotoneKind::Psi => 0.0,
        };
        self.samples
            .iter()
            .find(|s| s.level == boundary)
            .map(|s| s.value.abs())
            .unwrap_or_else(|| self.samples.iter().map(|s| s.value.abs()).fold(0.0, f64::max))
    }

    /// Largest step against the expected direction of monotonicity, in
    /// absolute units.
    pub fn monotonicity_violation(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let step = w[1].value - w[0].value;
                if self.kind.increasing() {
                    -step
                } else {
                    step
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest surface derivative of the wrong sign, in absolute units.
    pub fn sign_violation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| if self.kind.increasing() { -s.d_surface } else { s.d_surface })
            .fold(0.0, f64::max)
    }

    /// Largest `|d_surface - other| / max(|d_surface|, scale)`.
    pub fn agreement(&self, other: impl Fn(&MonotoneSample) -> f64) -> f64 {
        let scale = self.scale();
        self.samples
            .iter()
            .map(|s| (s.d_surface - other(s)).abs() / s.d_surface.abs().max(scale))
            .fold(0.0, f64::max)
    }
}

/// `U_β` with derivatives on each level of `levels`.
pub fn u_series(src: LevelSource<'_>, beta: f64, levels: &[f64]) -> Result<MonotoneSeries> {
    let samples = levels.iter().map(|&t| sample_u(src, beta, t)).collect::<Result<Vec<_>>>()?;
    let mut series = MonotoneSeries::new(MonotoneKind::U, beta, src.model_id(), samples);
    series.limit = Some(limit_t0(src, beta)?);
    Ok(series)
}

/// `Ψ_β` with derivatives on each level of `levels`.
pub fn psi_series(sol: &PotentialSolution, beta: f64, levels: &[f64]) -> Result<MonotoneSeries> {
    let samples = levels.iter().map(|&s| sample_psi(sol, beta, s)).collect::<Result<Vec<_>>>()?;
    Ok(MonotoneSeries::new(MonotoneKind::Psi, beta, sol.manifold().to_string(), samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ModelManifold, WarpProfile};
    use crate::potential::{solve_exterior, spheroid_exterior};
    use core::f64::consts::PI;

    fn solution(n: usize, warp: WarpProfile) -> PotentialSolution {
        solve_exterior(&ModelManifold::new(n, warp).unwrap(), 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn euclidean_u_is_constant() {
        let sol = solution(3, WarpProfile::Euclidean);
        for t in [1.0, 0.7, 0.01, 1e-4] {
            let s = sample_u((&sol).into(), 1.0, t).unwrap();
            assert!(rel(s.value, 4.0 * PI) < 1e-12, "{}", s.value);
            let zero = 1e-10 * s.value;
            assert!(s.d_surface.abs() < zero && s.d_bulk.abs() < zero && s.d_fd.abs() < zero, "{s:?}");
            assert!((s.grad_conf - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cone_u_is_constant_and_rigid() {
        let sol = solution(3, WarpProfile::Cone { alpha: 0.5 });
        let s = sample_u((&sol).into(), 1.0, 0.5).unwrap();
        assert!(rel(s.value, PI) < 1e-12);
        assert!(s.d_surface.abs() < 1e-10 && s.d_bulk.abs() < 1e-10 && s.d_fd.abs() < 1e-9);
        assert!(rigidity_residual(&sol, 1.0, 0.5).unwrap().abs() < 1e-10);
    }

    #[test]
    fn smoothed_cone_three_derivatives_agree() {
        let sol = solution(3, WarpProfile::SmoothedCone { alpha: 0.5 });
        let s = sample_u((&sol).into(), 1.0, 0.5).unwrap();
        // High-precision reference values computed independently.
        assert!(rel(s.value, 3.224_660_603_034_14) < 1e-11, "{}", s.value);
        assert!(rel(s.d_surface, 0.719_140_553_821_332_3) < 1e-10, "{}", s.d_surface);
        assert!(rel(s.d_bulk, s.d_surface) < 1e-6, "{} {}", s.d_bulk, s.d_surface);
        assert!(rel(s.d_fd, s.d_surface) < 1e-6);
        assert!(s.d_surface > 0.0);
        assert!(rigidity_residual(&sol, 1.0, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn phi_matches_u() {
        let sol = solution(4, WarpProfile::SmoothedCone { alpha: 0.7 });
        for s in [0.0, 0.8, 3.0] {
            let phi = phi_beta(&sol, 2.0, s).unwrap();
            let u = sample_u((&sol).into(), 2.0, (-s).exp()).unwrap();
            assert!(rel(phi.value, u.value) < 1e-12);
            assert!(rel(phi.d_surface, -(-s).exp() * u.d_surface) < 1e-12);
            assert!((phi.d_fd - phi.d_surface).abs() < 1e-6 * phi.value);
        }
    }

    #[test]
    fn spheroid_u_beta() {
        let sp = spheroid_exterior(2.0, 1.0).unwrap();
        let s = sample_u((&sp).into(), 1.0, 1.0).unwrap();
        assert!(rel(s.value, 13.141_814_349_010_555) < 1e-10, "{}", s.value);
        assert!(s.d_bulk.is_nan());
        assert!(rel(s.d_fd, s.d_surface) < 1e-6);
        let half = u_beta((&sp).into(), 1.0, 0.5).unwrap();
        assert!(rel(half.value, 12.613_186_445_798_4) < 1e-10);
    }

    #[test]
    fn u_beta_rejects_levels_outside_unit_interval() {
        let sol = solution(3, WarpProfile::Euclidean);
        assert!(matches!(u_beta((&sol).into(), 1.0, 0.0), Err(Error::RootNotBracketed { .. })));
        assert!(matches!(u_beta((&sol).into(), 1.0, 1.5), Err(Error::RootNotBracketed { .. })));
    }

    #[test]
    fn cylinder_psi_is_rigid() {
        let sol = solution(3, WarpProfile::CylinderEnd);
        let s = sample_psi(&sol, 2.0, 1.0).unwrap();
        assert!(rel(s.value, 4.0 * PI) < 1e-14);
        assert_eq!(s.mean_curvature, 0.0);
        assert!(s.d_surface == 0.0 && s.d_bulk.abs() < 1e-12 && s.d_fd.abs() < 1e-12);
    }

    #[test]
    fn tanh_psi() {
        let sol = solution(3, WarpProfile::Tanh);
        let s = sample_psi(&sol, 2.0, 0.0).unwrap();
        assert!(rel(s.value, 37.352_136_893_387_84) < 1e-12, "{}", s.value);
        assert!(s.d_surface < 0.0);
        assert!(rel(s.d_fd, s.d_surface) < 1e-6);
        assert!(rel(s.d_bulk, s.d_surface) < 1e-6);
        assert!(psi_beta(&sol, 2.0, -1.0).is_err());
    }

    #[test]
    fn limits() {
        let flat = solution(3, WarpProfile::Euclidean);
        let l = limit_t0((&flat).into(), 1.0).unwrap();
        assert!(rel(l.formula, 4.0 * PI) < 1e-14 && rel(l.extrapolated, 4.0 * PI) < 1e-12);

        let cone = solution(4, WarpProfile::Cone { alpha: 0.5 });
        let l = limit_t0((&cone).into(), 2.0).unwrap();
        assert!(rel(l.formula, 2.0 * PI * PI) < 1e-12);
        assert!(rel(l.extrapolated, 2.0 * PI * PI) < 1e-10);

        let power = solution(3, WarpProfile::Power { gamma: 0.6 });
        let l = limit_t0((&power).into(), 1.0).unwrap();
        let u1 = u_beta((&power).into(), 1.0, 1.0).unwrap().value;
        assert_eq!(l.formula, 0.0);
        assert!(l.extrapolated.abs() <= 1e-3 * u1);
    }

    #[test]
    fn aitken_recovers_geometric_limit() {
        let seq = [2.0 + 0.5, 2.0 + 0.05, 2.0 + 0.005];
        assert!((aitken(seq) - 2.0).abs() < 1e-12);
        assert_eq!(aitken([1.0, 1.0, 1.0]), 1.0);
        // Oscillating differences fall back to the last value.
        assert_eq!(aitken([1.0, 2.0, 1.5]), 1.5);
    }

    #[test]
    fn colding_examples() {
        let flat = solution(3, WarpProfile::Euclidean);
        assert!(rel(colding_a_beta(&flat, 1.0, 2.0).unwrap(), 4.0 * PI) < 1e-12);
        let cone = solution(3, WarpProfile::Cone { alpha: 0.5 });
        assert!(rel(colding_a_beta(&cone, 1.0, 7.0).unwrap(), PI) < 1e-12);
        let smooth = solution(3, WarpProfile::SmoothedCone { alpha: 0.7 });
        let grid: Vec<f64> = (0..64).map(|i| 5.0 * i as f64 / 63.0).collect();
        let report = relation_check(&smooth, 2.0, &grid, 1e-10).unwrap();
        assert!(!report.failed(), "{report:?}");
    }

    #[test]
    fn sharp_gradient_bound() {
        let cone = solution(3, WarpProfile::Cone { alpha: 0.5 });
        assert!((conformal_gradient(&cone, 3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(!sharp_gradient_check(&cone, 1e-10).unwrap().failed());
        let smooth = solution(3, WarpProfile::SmoothedCone { alpha: 0.5 });
        let report = sharp_gradient_check(&smooth, 1e-10).unwrap();
        assert!(!report.failed(), "{report:?}");
    }

    #[test]
    fn kato_gap_vanishes_on_radial_solutions() {
        let sol = solution(5, WarpProfile::SmoothedCone { alpha: 0.3 });
        for r in [1.0, 2.0, 40.0] {
            let terms = BulkTerms::at(&sol, r);
            assert!(terms.kato_gap(5.0).abs() <= 1e-12 * terms.hessian_sq);
        }
    }
}
