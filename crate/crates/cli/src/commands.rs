//! Subcommand bodies. Each returns the full output text; nothing touches the
//! filesystem until the caller writes it.

use std::fmt::Write as _;

use pdm_dirac::analytic::{classify_levels, potential_sample, SpectrumEntry};
use pdm_dirac::feasibility::{
    evaluate, f_direct, f_factored, f_value, supremum_scan, FeasibilityResult, RefineOptions,
    ScanBox, SignVerdict, SupremumReport,
};
use pdm_dirac::solver::{
    compare_with, DiscreteSpectrum, Discretization, Potential, DEFAULT_DOMAIN, DEFAULT_POINTS,
};
use pdm_dirac::{
    validate_physical, DimensionlessParams, GridShape, NumericPolicy, PhysicalParams, Range,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigFile, Format};
use crate::output::fmt_num;
use crate::CliError;

pub const DEFAULT_N_MAX: u32 = 3;
pub const DEFAULT_SAMPLES: usize = 201;
pub const DEFAULT_SEED: u64 = 0;
pub const ROUTE_CHECK_SAMPLES: usize = 1000;
pub const ROUTE_CHECK_TOL: f64 = 1e-10;

fn bad<E: std::fmt::Display>(e: E) -> CliError {
    CliError::BadParams(e.to_string())
}

fn m0_of(s: &ConfigFile) -> f64 {
    s.m0.unwrap_or(1.0)
}

fn dimensionless(s: &ConfigFile) -> Result<DimensionlessParams, CliError> {
    let eta = s.eta.ok_or_else(|| bad("missing eta"))?;
    let m0 = m0_of(s);
    let lambda = match (s.alpha, s.lambda) {
        (Some(alpha), None) => return Ok(validate_physical(m0, eta, alpha).map_err(bad)?.reduce()),
        (None, Some(l)) => l,
        _ => return Err(bad("need alpha (with M0) or lambda")),
    };
    if m0 <= 0.0 || !m0.is_finite() {
        return Err(bad(pdm_dirac::ParamError::NonPositiveMass(m0)));
    }
    DimensionlessParams::new(eta, lambda).map_err(bad)
}

fn physical(s: &ConfigFile) -> Result<PhysicalParams, CliError> {
    let eta = s.eta.ok_or_else(|| bad("missing eta"))?;
    let m0 = m0_of(s);
    let alpha = match (s.alpha, s.lambda) {
        (Some(a), None) => a,
        (None, Some(l)) => l * m0,
        _ => return Err(bad("need alpha (with M0) or lambda")),
    };
    validate_physical(m0, eta, alpha).map_err(bad)
}

fn grid_of(s: &ConfigFile, default: GridShape) -> Result<GridShape, CliError> {
    let g = s.grid.map(|[a, b]| GridShape::new(a, b)).unwrap_or(default);
    if g.eta_nodes < 2 || g.lambda_nodes < 2 {
        return Err(bad("grid needs at least 2 nodes per axis"));
    }
    Ok(g)
}

fn box_of(s: &ConfigFile, eta: Range, lambda: Range) -> (Range, Range) {
    match s.scan_box {
        Some([a, b, c, d]) => (Range::new(a, b), Range::new(c, d)),
        None => (eta, lambda),
    }
}

#[derive(Debug, Serialize)]
struct SurfaceRow {
    eta: f64,
    lambda: f64,
    f: f64,
}

#[derive(Debug, Serialize)]
struct SurfaceJson {
    rows: Vec<SurfaceRow>,
    skipped_eta_zero_lines: usize,
}

/// f over the surface box; `eta = 0` lines become comment rows.
pub fn surface(s: &ConfigFile, format: Format) -> Result<String, CliError> {
    let policy = NumericPolicy::default();
    let grid = grid_of(s, policy.surface_grid)?;
    let (eta_r, lambda_r) = box_of(s, policy.surface_eta, policy.surface_lambda);
    for r in [eta_r, lambda_r] {
        if !(r.min.is_finite() && r.max.is_finite() && r.min <= r.max) {
            return Err(bad("invalid box"));
        }
    }
    if eta_r.min < -1.0 || eta_r.max > 1.0 || lambda_r.min < 0.0 {
        return Err(bad("surface box must satisfy |eta| <= 1 and lambda >= 0"));
    }
    let lambdas = lambda_r.nodes(grid.lambda_nodes);
    let mut csv = String::from("eta,lambda,f\n");
    let mut rows = Vec::new();
    let mut skipped = 0;
    for eta in eta_r.nodes(grid.eta_nodes) {
        if eta == 0.0 {
            skipped += 1;
            csv.push_str("# eta=0 skipped: f is singular on this line\n");
            continue;
        }
        for &lambda in &lambdas {
            let f = f_value(eta, lambda).map_err(bad)?;
            let _ = writeln!(csv, "{},{},{}", fmt_num(eta), fmt_num(lambda), fmt_num(f));
            rows.push(SurfaceRow { eta, lambda, f });
        }
    }
    Ok(match format {
        Format::Csv => csv,
        Format::Json => to_json(&SurfaceJson {
            rows,
            skipped_eta_zero_lines: skipped,
        }),
    })
}

#[derive(Debug, Serialize)]
struct SpectrumJson {
    eta: f64,
    lambda: f64,
    m0: f64,
    levels: Vec<SpectrumEntry>,
}

pub fn spectrum(s: &ConfigFile, format: Format) -> Result<String, CliError> {
    let d = dimensionless(s)?;
    let m0 = m0_of(s);
    let n_max = s.n_max.unwrap_or(DEFAULT_N_MAX);
    let levels = classify_levels(&d, m0, n_max).map_err(bad)?;
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("n,delta1,e_squared,classification,energy_magnitude\n");
            for l in &levels {
                let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    l.n,
                    fmt_num(l.delta1),
                    opt(l.e_squared),
                    l.classification.as_str(),
                    opt(l.energy_magnitude)
                );
            }
            out
        }
        Format::Json => to_json(&SpectrumJson {
            eta: d.eta(),
            lambda: d.lambda(),
            m0,
            levels,
        }),
    })
}

pub fn potential(s: &ConfigFile, format: Format) -> Result<String, CliError> {
    let p = physical(s)?;
    let [x_min, x_max] = s.x_range.unwrap_or([-10.0 / p.alpha(), 10.0 / p.alpha()]);
    let range = Range::new(x_min, x_max);
    if !(x_min.is_finite() && x_max.is_finite() && x_min <= x_max) {
        return Err(bad("invalid x range"));
    }
    let n = s.samples.unwrap_or(DEFAULT_SAMPLES);
    if n < 1 {
        return Err(bad("samples must be positive"));
    }
    let samples = range
        .nodes(n)
        .into_iter()
        .map(|x| potential_sample(&p, x))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad)?;
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("x,M,ImV,V_eff\n");
            for smp in &samples {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_num(smp.x),
                    fmt_num(smp.mass),
                    fmt_num(smp.vector_potential.im),
                    fmt_num(smp.v_eff)
                );
            }
            out
        }
        Format::Json => to_json(&samples),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Statement {
    SpectrumImaginaryOrEmpty,
    SpectrumRealFound,
    Inconclusive,
}

impl Statement {
    pub fn exit_code(&self) -> u8 {
        match self {
            Statement::SpectrumImaginaryOrEmpty => 0,
            Statement::SpectrumRealFound => 3,
            Statement::Inconclusive => 4,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictInputs {
    pub m0: f64,
    pub eta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub n_max: u32,
    pub half_width: f64,
    pub num_points: usize,
    pub control_well: bool,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct RouteCheck {
    pub seed: u64,
    pub samples: usize,
    pub max_scaled_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct ComparisonSummary {
    pub imaginary_levels_outside_spectrum: bool,
    pub unmatched_real_levels: Vec<u32>,
    pub consistent: bool,
}

#[derive(Debug, Serialize)]
pub struct VerdictReport {
    pub inputs: VerdictInputs,
    pub point: Option<FeasibilityResult>,
    pub supremum: Option<SupremumReport>,
    pub route_check: RouteCheck,
    pub analytic_levels: Option<Vec<SpectrumEntry>>,
    pub numeric: Option<DiscreteSpectrum>,
    pub comparison: Option<ComparisonSummary>,
    pub errors: Vec<String>,
    pub statement: Statement,
}

/// Seeded spot check of `f_direct` against `f_factored`.
pub fn route_check(seed: u64, samples: usize) -> RouteCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut eta: f64 = rng.gen_range(1e-3..=1.0);
        if rng.gen_bool(0.5) {
            eta = -eta;
        }
        let lambda = 10.0 - rng.gen_range(0.0..10.0);
        let (a, b) = (f_direct(eta, lambda), f_factored(eta, lambda));
        let scaled = match (a, b) {
            (Ok(a), Ok(b)) => (a - b).abs() / a.abs().max(1.0),
            _ => f64::INFINITY,
        };
        worst = worst.max(scaled);
    }
    RouteCheck {
        seed,
        samples,
        max_scaled_discrepancy: worst,
        tolerance: ROUTE_CHECK_TOL,
        passed: worst <= ROUTE_CHECK_TOL,
    }
}

pub fn verdict(s: &ConfigFile) -> Result<(VerdictReport, String), CliError> {
    let p = physical(s)?;
    let d = p.reduce();
    let n_max = s.n_max.unwrap_or(DEFAULT_N_MAX);
    let seed = s.seed.unwrap_or(DEFAULT_SEED);
    let control_well = s.control_well.unwrap_or(false);
    let half_width = s.half_width.unwrap_or(DEFAULT_DOMAIN / p.alpha());
    let num_points = s.num_points.unwrap_or(DEFAULT_POINTS);
    let policy = NumericPolicy::default();
    let grid = grid_of(s, policy.scan_grid)?;
    let (eta_r, lambda_r) = box_of(s, policy.scan_eta, policy.scan_lambda);
    let scan_box = ScanBox {
        eta: eta_r,
        lambda: lambda_r,
        exclude_eta_zero: true,
    };

    let mut errors = Vec::new();

    let point = match evaluate(d.eta(), d.lambda()) {
        Ok(r) => Some(r),
        Err(e) => {
            errors.push(format!("feasibility at input point: {e}"));
            None
        }
    };
    let supremum = match supremum_scan(&scan_box, grid, RefineOptions::default()) {
        Ok(r) => Some(r),
        Err(e) => {
            errors.push(format!("supremum scan: {e}"));
            None
        }
    };
    let route = route_check(seed, ROUTE_CHECK_SAMPLES);
    if !route.passed {
        errors.push(format!(
            "route check: discrepancy {} exceeds {}",
            route.max_scaled_discrepancy, route.tolerance
        ));
    }

    let target = if control_well {
        Potential::ControlWell
    } else {
        Potential::StepMass(p)
    };
    let (analytic_levels, numeric, comparison) = match Discretization::new(half_width, num_points)
        .and_then(|disc| compare_with(&target, &p, &disc, n_max))
    {
        Ok(c) => {
            if let Some(e) = &c.analytic_error {
                errors.push(format!("analytic levels: {e}"));
            }
            let summary = ComparisonSummary {
                imaginary_levels_outside_spectrum: c.imaginary_levels_outside_spectrum,
                unmatched_real_levels: c.unmatched_real_levels.clone(),
                consistent: c.consistent,
            };
            (c.analytic_levels, Some(c.numeric), Some(summary))
        }
        Err(e) => {
            errors.push(format!("numeric solver: {e}"));
            (None, None, None)
        }
    };

    let scan_dissent = supremum.as_ref().is_some_and(|r| !r.all_nodes_negative());
    let point_dissent = point
        .as_ref()
        .is_some_and(|r| d.lambda() > 0.0 && r.sign_verdict != SignVerdict::Negative);
    let numeric_dissent = numeric.as_ref().is_some_and(|n| n.localized_count() > 0);

    let statement = if !errors.is_empty() {
        Statement::Inconclusive
    } else if scan_dissent || point_dissent || numeric_dissent {
        Statement::SpectrumRealFound
    } else {
        Statement::SpectrumImaginaryOrEmpty
    };

    let report = VerdictReport {
        inputs: VerdictInputs {
            m0: p.m0(),
            eta: p.eta(),
            alpha: p.alpha(),
            lambda: d.lambda(),
            n_max,
            half_width,
            num_points,
            control_well,
            seed,
        },
        point,
        supremum,
        route_check: route,
        analytic_levels,
        numeric,
        comparison,
        errors,
        statement,
    };
    let text = to_json(&report);
    Ok((report, text))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
