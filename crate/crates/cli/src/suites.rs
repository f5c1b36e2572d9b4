//! The check suites, split into independent cells.
//!
//! A cell is one unit of parallel work: a model (and `β`, or initial flow
//! radius) within a suite. Cells never share state; [`run_cell`] returns
//! everything a cell produced and the caller assembles outputs in cell
//! order.

use capmono_core::geometry::{ModelManifold, Parabolicity, WarpProfile};
use capmono_core::mcf::{flow_sphere, huisken_derivative_check, iso_ratio, FlowTrace};
use capmono_core::monotone::{
    beta_threshold, colding_a_beta, limit_t0, phi_beta, relation_check, sample_psi, sample_u, sharp_gradient_check,
    LevelSource, MonotoneKind, MonotoneSample, MonotoneSeries,
};
use capmono_core::potential::{solve_exterior, spheroid_exterior, verify_asymptotics, PotentialKind, PotentialSolution};
use capmono_core::willmore::{check_willmore, kasue_bounds, willmore_energy, SurfaceSpec};
use capmono_core::{CheckReport, Status};

use crate::config::ExperimentConfig;
use crate::models::ModelSpec;

/// Spheroids `(a, b)` whose Willmore energies must decrease to `4π`.
pub const SPHEROID_SEQUENCE: [(f64, f64); 4] = [(2.0, 1.0), (1.5, 1.0), (1.1, 1.0), (1.01, 1.0)];
/// The spheroid whose level sets carry a monotone series.
pub const MONOTONE_SPHEROID: (f64, f64) = (2.0, 1.0);

/// Radii, as multiples of `r0`, of the coordinate spheres in the Willmore
/// suite.
const WILLMORE_RADII: [f64; 3] = [1.0, 2.0, 4.0];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Geometry(usize),
    Potential(usize),
    Monotone(usize, f64),
    MonotoneModel(usize),
    SpheroidMonotone(f64),
    Willmore(usize),
    WillmoreSpheroids,
    Flow(usize, f64),
    FlowModel(usize),
}

/// One row of `monotone.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneRow {
    pub model: String,
    pub n: usize,
    pub kind: MonotoneKind,
    pub sample: MonotoneSample,
}

/// A check outcome, with a diagnostic when the check could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub report: CheckReport,
    pub note: Option<String>,
}

impl From<CheckReport> for Finding {
    fn from(report: CheckReport) -> Self {
        Finding { report, note: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellOutput {
    pub rows: Vec<MonotoneRow>,
    pub traces: Vec<FlowTrace>,
    pub findings: Vec<Finding>,
}

impl CellOutput {
    fn check(&mut self, report: CheckReport) {
        self.findings.push(report.into());
    }

    fn error(&mut self, suite: &str, check: &str, model: &str, error: impl std::fmt::Display) {
        let report = CheckReport::evaluate(suite, check, model, f64::INFINITY, 0.0, 0);
        self.findings.push(Finding { report, note: Some(error.to_string()) });
    }
}

/// Sets the tolerance of `report` to the configured one and re-derives its
/// status. Not-applicable reports are left alone.
///
/// The core checks are evaluated at tolerance zero and re-judged here, so
/// an override in the config changes nothing but the verdict.
fn retolerance(mut report: CheckReport, config: &ExperimentConfig) -> CheckReport {
    if report.status == Status::NotApplicable {
        return report;
    }
    // Error findings carry pseudo-checks with no configured tolerance.
    let key = format!("{}.{}", report.suite, report.check);
    let tol = config.tolerances.get(&key).copied().unwrap_or(report.tolerance);
    let equality = report.status == Status::Equality;
    report.tolerance = tol;
    report.status = if report.max_violation <= tol { Status::Pass } else { Status::Fail };
    report.with_equality(equality)
}

/// All cells of a run, in output order.
pub fn plan(config: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    let models = &config.models;
    if config.runs("geometry") {
        cells.extend((0..models.len()).map(Cell::Geometry));
    }
    if config.runs("potential") {
        cells.extend((0..models.len()).map(Cell::Potential));
    }
    if config.runs("monotone") {
        for (i, spec) in models.iter().enumerate() {
            cells.push(Cell::MonotoneModel(i));
            cells.extend(config.betas_for(spec.n).into_iter().map(|b| Cell::Monotone(i, b)));
        }
        cells.extend(config.betas_for(3).into_iter().map(Cell::SpheroidMonotone));
    }
    if config.runs("willmore") {
        cells.extend((0..models.len()).map(Cell::Willmore));
        cells.push(Cell::WillmoreSpheroids);
    }
    if config.runs("mcf") {
        for (i, spec) in models.iter().enumerate() {
            let m = spec.manifold().expect("validated config");
            if m.n() == 3 && m.warp().origin_closed() {
                cells.push(Cell::FlowModel(i));
                cells.extend(config.flow_radii.iter().map(|&r| Cell::Flow(i, r)));
            }
        }
    }
    cells
}

pub fn run_cell(cell: &Cell, config: &ExperimentConfig) -> CellOutput {
    let mut out = CellOutput::default();
    let spec = |i: usize| -> (&ModelSpec, ModelManifold) {
        let spec = &config.models[i];
        (spec, spec.manifold().expect("validated config"))
    };
    match *cell {
        Cell::Geometry(i) => {
            let (_, m) = spec(i);
            geometry(&mut out, &m, config);
        }
        Cell::Potential(i) => {
            let (_, m) = spec(i);
            potential(&mut out, &m, config);
        }
        Cell::MonotoneModel(i) => {
            let (_, m) = spec(i);
            monotone_model(&mut out, &m, config);
        }
        Cell::Monotone(i, beta) => {
            let (_, m) = spec(i);
            monotone(&mut out, &m, beta, config);
        }
        Cell::SpheroidMonotone(beta) => spheroid_monotone(&mut out, beta, config),
        Cell::Willmore(i) => {
            let (_, m) = spec(i);
            willmore(&mut out, &m, config);
        }
        Cell::WillmoreSpheroids => willmore_spheroids(&mut out, config),
        Cell::FlowModel(i) => {
            let (_, m) = spec(i);
            flow_model(&mut out, &m, config);
        }
        Cell::Flow(i, rho0) => {
            let (_, m) = spec(i);
            flow(&mut out, &m, rho0, config);
        }
    }
    let n = match *cell {
        Cell::SpheroidMonotone(_) | Cell::WillmoreSpheroids => Some(3),
        Cell::Geometry(i)
        | Cell::Potential(i)
        | Cell::Monotone(i, _)
        | Cell::MonotoneModel(i)
        | Cell::Willmore(i)
        | Cell::Flow(i, _)
        | Cell::FlowModel(i) => Some(config.models[i].n),
    };
    out.findings = out
        .findings
        .into_iter()
        .map(|f| {
            let mut report = retolerance(f.report, config);
            if let (Some(n), false) = (n, report.params.contains_key("n")) {
                report = report.with_param("n", n as f64);
            }
            Finding { report, ..f }
        })
        .collect();
    out
}

fn label(m: &ModelManifold) -> String {
    m.to_string()
}

fn with_n(report: CheckReport, m: &ModelManifold) -> CheckReport {
    report.with_param("n", m.n() as f64)
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect()
}

// ---------------------------------------------------------------------------

fn geometry(out: &mut CellOutput, m: &ModelManifold, config: &ExperimentConfig) {
    const SUITE: &str = "geometry";
    let id = label(m);
    let min_ricci = m.min_ricci(10_000);
    out.check(with_n(
        CheckReport::evaluate(SUITE, "ricci_admissible", &id, (-min_ricci).max(0.0), 0.0, 1).with_param("min_ricci", min_ricci),
        m,
    ));

    // Bishop–Gromov ratios along a geometric grid.
    let warp = m.warp();
    let lo = warp.domain_start().max(1e-3);
    let radii = geometric(lo, 1e6 * warp.tail_radius().max(1.0), 400);
    let mut rise = 0.0f64;
    let mut previous: Option<(f64, Option<f64>)> = None;
    for &r in &radii {
        let area = m.area_ratio(r);
        let volume = if warp.origin_closed() {
            match m.bishop_gromov(r) {
                Ok(b) => Some(b.volume_ratio),
                Err(e) => return out.error(SUITE, "bishop_gromov", &id, e),
            }
        } else {
            None
        };
        if let Some((pa, pv)) = previous {
            rise = rise.max(area - pa);
            if let (Some(v), Some(pv)) = (volume, pv) {
                rise = rise.max(v - pv);
            }
        }
        previous = Some((area, volume));
    }
    out.check(with_n(CheckReport::evaluate(SUITE, "bishop_gromov", &id, rise, 0.0, radii.len()), m));
    out.check(with_n(
        CheckReport::evaluate(SUITE, "avr_probe", &id, m.avr_crosscheck(), 0.0, 1).with_param("avr", m.avr()),
        m,
    ));
    match m.classify_parabolicity(config.r0) {
        Ok(p) => out.check(with_n(
            CheckReport::evaluate(SUITE, "parabolicity", &id, 0.0, 0.0, 1)
                .with_param("nonparabolic", if p == Parabolicity::Nonparabolic { 1.0 } else { 0.0 }),
            m,
        )),
        Err(e) => out.error(SUITE, "parabolicity", &id, e),
    }
}

fn solve(out: &mut CellOutput, suite: &str, m: &ModelManifold, config: &ExperimentConfig) -> Option<PotentialSolution> {
    match solve_exterior(m, config.r0) {
        Ok(sol) => Some(sol),
        Err(e) => {
            out.error(suite, "solve", &label(m), e);
            None
        }
    }
}

fn potential(out: &mut CellOutput, m: &ModelManifold, config: &ExperimentConfig) {
    const SUITE: &str = "potential";
    let id = label(m);
    let Some(sol) = solve(out, SUITE, m, config) else { return };
    let reach = if sol.kind() == PotentialKind::Nonparabolic { 1e6 } else { 1e3 };
    let radii = geometric(config.r0, reach * config.r0, 1000);
    let mut worst = 0.0f64;
    for &r in &radii {
        match sol.harmonicity_residual(r) {
            Ok(res) => worst = worst.max(res),
            Err(e) => return out.error(SUITE, "harmonicity", &id, e),
        }
    }
    out.check(with_n(CheckReport::evaluate(SUITE, "harmonicity", &id, worst, 0.0, radii.len()), m));
    if sol.kind() == PotentialKind::Nonparabolic {
        match verify_asymptotics(&sol) {
            Ok(report) => {
                for r in report.checks(0.0) {
                    out.check(with_n(r, m));
                }
            }
            Err(e) => out.error(SUITE, "asymptotics", &id, e),
        }
    }
}

// ---------------------------------------------------------------------------

/// Flat space or an exact cone: the rigidity case of every inequality.
fn is_conical(m: &ModelManifold) -> bool {
    matches!(m.warp(), WarpProfile::Euclidean | WarpProfile::Cone { .. })
}

fn series_checks(out: &mut CellOutput, series: &MonotoneSeries, n: usize, m_label: &str, bulk: bool) -> f64 {
    const SUITE: &str = "monotone";
    let scale = series.scale();
    let count = series.samples.len();
    let beta = series.beta;
    let tag = |r: CheckReport| r.with_param("beta", beta).with_param("n", n as f64);
    out.check(tag(CheckReport::evaluate(
        SUITE,
        "monotonicity",
        m_label,
        series.monotonicity_violation() / scale,
        0.0,
        count,
    )));
    if beta >= beta_threshold(n) {
        out.check(tag(CheckReport::evaluate(SUITE, "sign", m_label, series.sign_violation() / scale, 0.0, count)));
    } else {
        // Below the threshold the quantity is computed but nothing is claimed.
        out.check(tag(CheckReport::not_applicable(SUITE, "sign", m_label)));
    }
    out.check(tag(CheckReport::evaluate(SUITE, "derivative_fd", m_label, series.agreement(|s| s.d_fd), 0.0, count)));
    if bulk {
        out.check(tag(CheckReport::evaluate(
            SUITE,
            "derivative_bulk",
            m_label,
            series.agreement(|s| s.d_bulk),
            0.0,
            count,
        )));
    }
    scale
}

fn limit_check(out: &mut CellOutput, src: LevelSource<'_>, series: &MonotoneSeries, n: usize, id: &str) {
    const SUITE: &str = "monotone";
    let tag = |r: CheckReport| r.with_param("beta", series.beta).with_param("n", n as f64);
    match limit_t0(src, series.beta) {
        Ok(limit) if limit.formula > 0.0 => out.check(tag(
            CheckReport::evaluate(SUITE, "limit", id, (limit.extrapolated - limit.formula).abs() / limit.formula, 0.0, 3)
                .with_param("extrapolated", limit.extrapolated)
                .with_param("formula", limit.formula),
        )),
        Ok(limit) => out.check(tag(
            CheckReport::evaluate(SUITE, "limit_sub_euclidean", id, limit.extrapolated.abs() / series.scale(), 0.0, 3)
                .with_param("extrapolated", limit.extrapolated),
        )),
        Err(e) => out.error(SUITE, "limit", id, e),
    }
}

fn push_rows(out: &mut CellOutput, model: &str, n: usize, kind: MonotoneKind, samples: &[MonotoneSample]) {
    out.rows.extend(samples.iter().map(|&sample| MonotoneRow { model: model.to_string(), n, kind, sample }));
}

fn monotone(out: &mut CellOutput, m: &ModelManifold, beta: f64, config: &ExperimentConfig) {
    const SUITE: &str = "monotone";
    let id = label(m);
    let n = m.n();
    let Some(sol) = solve(out, SUITE, m, config) else { return };
    if sol.kind() == PotentialKind::Parabolic {
        return psi_monotone(out, &sol, beta, config);
    }
    let src = LevelSource::from(&sol);

    let u_samples: Result<Vec<_>, _> = config.t_grid.points().iter().map(|&t| sample_u(src, beta, t)).collect();
    let u_samples = match u_samples {
        Ok(s) => s,
        Err(e) => return out.error(SUITE, "monotonicity", &id, e),
    };
    let series = MonotoneSeries::new(MonotoneKind::U, beta, id.clone(), u_samples);
    push_rows(out, &id, n, MonotoneKind::U, &series.samples);
    series_checks(out, &series, n, &id, true);
    limit_check(out, src, &series, n, &id);

    let s_points = config.s_grid.points();
    let phi: Result<Vec<_>, _> = s_points.iter().map(|&s| phi_beta(&sol, beta, s)).collect();
    match phi {
        Ok(samples) => push_rows(out, &id, n, MonotoneKind::Phi, &samples),
        Err(e) => out.error(SUITE, "phi", &id, e),
    }
    let nf = n as f64;
    let mut a_rows = Vec::with_capacity(s_points.len());
    for &s in &s_points {
        let r = (s / (nf - 2.0)).exp();
        match colding_a_beta(&sol, beta, r) {
            Ok(value) => a_rows.push(MonotoneSample {
                beta,
                level: r,
                r_level: sol.level_radius(r.powf(2.0 - nf)).unwrap_or(f64::NAN),
                value,
                d_surface: f64::NAN,
                d_bulk: f64::NAN,
                d_fd: f64::NAN,
                mean_curvature: f64::NAN,
                grad_conf: f64::NAN,
            }),
            Err(e) => return out.error(SUITE, "colding_relation", &id, e),
        }
    }
    push_rows(out, &id, n, MonotoneKind::A, &a_rows);
    match relation_check(&sol, beta, &s_points, 0.0) {
        Ok(r) => out.check(with_n(r, m)),
        Err(e) => out.error(SUITE, "colding_relation", &id, e),
    }

    if is_conical(m) {
        let formula = match capmono_core::monotone::limit_formula(src, beta) {
            Ok(f) => f,
            Err(e) => return out.error(SUITE, "rigidity", &id, e),
        };
        let deviation = series
            .samples
            .iter()
            .map(|s| {
                let value = (s.value - formula).abs() / formula;
                // Derivatives in log-level form, t |dU/dt| / U: the roundoff
                // floor of a finite difference at level t grows like 1/t.
                let derivs = [s.d_surface, s.d_bulk, s.d_fd].iter().map(|d| s.level * d.abs() / s.value).fold(0.0, f64::max);
                value.max(derivs)
            })
            .fold(0.0, f64::max);
        out.check(
            with_n(CheckReport::evaluate(SUITE, "rigidity", &id, deviation, 0.0, series.samples.len()), m)
                .with_param("beta", beta),
        );
    }
}

fn psi_monotone(out: &mut CellOutput, sol: &PotentialSolution, beta: f64, config: &ExperimentConfig) {
    const SUITE: &str = "monotone";
    let m = sol.manifold();
    let id = label(m);
    let n = m.n();
    let samples: Result<Vec<_>, _> = config.s_grid.points().iter().map(|&s| sample_psi(sol, beta, s)).collect();
    let samples = match samples {
        Ok(s) => s,
        Err(e) => return out.error(SUITE, "monotonicity", &id, e),
    };
    let series = MonotoneSeries::new(MonotoneKind::Psi, beta, id.clone(), samples);
    push_rows(out, &id, n, MonotoneKind::Psi, &series.samples);
    series_checks(out, &series, n, &id, true);
    if *m.warp() == WarpProfile::CylinderEnd {
        // A product end: Ψ is constant and every level set is minimal.
        let deviation = series
            .samples
            .iter()
            .map(|s| [s.d_surface, s.d_bulk, s.d_fd, s.mean_curvature].iter().map(|d| d.abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        out.check(
            with_n(CheckReport::evaluate(SUITE, "psi_rigidity", &id, deviation, 0.0, series.samples.len()), m)
                .with_param("beta", beta),
        );
    }
}

fn monotone_model(out: &mut CellOutput, m: &ModelManifold, config: &ExperimentConfig) {
    const SUITE: &str = "monotone";
    let Some(sol) = solve(out, SUITE, m, config) else { return };
    if sol.kind() == PotentialKind::Nonparabolic {
        match sharp_gradient_check(&sol, 0.0) {
            Ok(r) => out.check(with_n(r, m)),
            Err(e) => out.error(SUITE, "sharp_gradient", &label(m), e),
        }
    }
}

fn spheroid_monotone(out: &mut CellOutput, beta: f64, config: &ExperimentConfig) {
    const SUITE: &str = "monotone";
    let (a, b) = MONOTONE_SPHEROID;
    let sp = match spheroid_exterior(a, b) {
        Ok(sp) => sp,
        Err(e) => return out.error(SUITE, "solve", "spheroid", e),
    };
    let src = LevelSource::from(&sp);
    let id = src.model_id();
    let samples: Result<Vec<_>, _> = config.t_grid.points().iter().map(|&t| sample_u(src, beta, t)).collect();
    let samples = match samples {
        Ok(s) => s,
        Err(e) => return out.error(SUITE, "monotonicity", &id, e),
    };
    let series = MonotoneSeries::new(MonotoneKind::U, beta, id.clone(), samples);
    push_rows(out, &id, 3, MonotoneKind::U, &series.samples);
    series_checks(out, &series, 3, &id, false);
    limit_check(out, src, &series, 3, &id);
}

// ---------------------------------------------------------------------------

fn willmore(out: &mut CellOutput, m: &ModelManifold, config: &ExperimentConfig) {
    const SUITE: &str = "willmore";
    let id = label(m);
    for factor in WILLMORE_RADII {
        let r = factor * config.r0;
        match SurfaceSpec::coordinate_sphere(*m, r).and_then(|s| check_willmore(&s, 0.0)) {
            Ok(report) => out.check(with_n(report, m)),
            Err(e) => out.error(SUITE, "willmore_inequality", &id, e),
        }
    }
    let Some(sol) = solve(out, SUITE, m, config) else { return };
    let nonparabolic = sol.kind() == PotentialKind::Nonparabolic;
    for beta in config.betas_for(m.n()) {
        if beta < beta_threshold(m.n()) {
            continue;
        }
        match kasue_bounds((&sol).into(), beta) {
            Ok(k) => {
                for r in k.checks(&id, nonparabolic, config.tolerance("willmore.kasue_bound")) {
                    let r = match k.statement_level {
                        Some(v) => r.with_param("statement_level", v),
                        None => r,
                    };
                    out.check(with_n(r, m));
                }
            }
            Err(e) => out.error(SUITE, "kasue_identity", &id, e),
        }
    }
}

fn willmore_spheroids(out: &mut CellOutput, _config: &ExperimentConfig) {
    const SUITE: &str = "willmore";
    let round = 4.0 * std::f64::consts::PI;
    let mut energies = Vec::new();
    for (a, b) in SPHEROID_SEQUENCE {
        let surface = match SurfaceSpec::spheroid(a, b) {
            Ok(s) => s,
            Err(e) => return out.error(SUITE, "willmore_inequality", "spheroid", e),
        };
        match check_willmore(&surface, 0.0) {
            Ok(r) => out.check(r.with_param("n", 3.0)),
            Err(e) => out.error(SUITE, "willmore_inequality", &surface.label(), e),
        }
        match willmore_energy(&surface) {
            Ok(e) => energies.push(e),
            Err(e) => return out.error(SUITE, "spheroid_sequence", &surface.label(), e),
        }
    }
    let strictly_decreasing = energies.windows(2).all(|w| w[1] < w[0]) && energies.iter().all(|&e| e > round);
    let gap = energies.last().map_or(f64::INFINITY, |e| e - round);
    let violation = if strictly_decreasing { gap } else { f64::INFINITY };
    out.check(
        CheckReport::evaluate(SUITE, "spheroid_sequence", "spheroid", violation, 0.0, energies.len())
            .with_param("n", 3.0)
            .with_param("final_energy", *energies.last().unwrap_or(&f64::NAN)),
    );
}

// ---------------------------------------------------------------------------

/// Model label of a flow trace: the model id and the initial radius.
pub fn trace_label(trace: &FlowTrace) -> String {
    format!("{}@rho0={:?}", trace.model, trace.rho0)
}

fn flow(out: &mut CellOutput, m: &ModelManifold, rho0: f64, _config: &ExperimentConfig) {
    const SUITE: &str = "mcf";
    let id = label(m);
    let trace = match flow_sphere(m, rho0, None) {
        Ok(t) => t,
        Err(failure) => {
            out.error(SUITE, "flow", &id, &failure.error);
            out.traces.push(*failure.partial);
            return;
        }
    };
    let tag = |r: CheckReport| r.with_param("rho0", rho0).with_param("n", 3.0);
    let samples = trace.len();
    out.check(tag(CheckReport::evaluate(SUITE, "iso_diff_monotone", &id, trace.monotonicity_violation(), 0.0, samples)));
    out.check(tag(CheckReport::evaluate(SUITE, "iso_diff_nonnegative", &id, trace.negativity(), 0.0, samples)));
    match huisken_derivative_check(&trace, m, 0.0) {
        Ok(r) => out.check(r.with_param("n", 3.0)),
        Err(e) => out.error(SUITE, "huisken_derivative", &id, e),
    }
    if is_conical(m) {
        out.check(tag(CheckReport::evaluate(SUITE, "iso_diff_rigidity", &id, trace.max_iso_diff(), 0.0, samples)));
        let expected = 0.25 * rho0 * rho0;
        // Relative, so that the tolerance reads as an absolute one at ρ0 = 1.
        let gap = trace.extinction_time.map_or(f64::INFINITY, |t| (t - expected).abs() / expected);
        out.check(tag(
            CheckReport::evaluate(SUITE, "extinction_time", &id, gap, 0.0, 1)
                .with_param("extinction_time", trace.extinction_time.unwrap_or(f64::NAN)),
        ));
    }
    out.traces.push(trace);
}

fn flow_model(out: &mut CellOutput, m: &ModelManifold, _config: &ExperimentConfig) {
    const SUITE: &str = "mcf";
    let id = label(m);
    let radii = geometric(1e-5, 1e6 * m.warp().tail_radius().max(1.0), 200);
    let mut ratios = Vec::with_capacity(radii.len());
    for &rho in &radii {
        match iso_ratio(m, rho) {
            Ok(q) => ratios.push(q),
            Err(e) => return out.error(SUITE, "iso_ratio", &id, e),
        }
    }
    let avr = m.avr();
    let deficit = ratios.iter().map(|q| (avr - q).max(0.0)).fold(0.0, f64::max);
    out.check(with_n(CheckReport::evaluate(SUITE, "iso_ratio", &id, deficit, 0.0, ratios.len()), m));
    // The small-ball limit is 1 only where the origin is smooth; cones keep
    // the ratio at AVR all the way in.
    let small_target = if m.warp().smooth_origin() { 1.0 } else { avr };
    let small = (ratios[0] - small_target).abs();
    let large = (ratios[ratios.len() - 1] - avr).abs();
    out.check(with_n(
        CheckReport::evaluate(SUITE, "iso_ratio_limits", &id, small.max(large), 0.0, 2)
            .with_param("small_ball", ratios[0])
            .with_param("large_ball", ratios[ratios.len() - 1]),
        m,
    ));
}
