//! Finite-difference solver for `−φ'' + V_eff(x) φ = E² φ` on `[−L, L]`
//! with Dirichlet walls.
//!
//! The operator is discretized with second-order central differences on
//! `N` interior nodes, giving a real symmetric tridiagonal matrix whose
//! eigenvalues are `E²` values. Only the slice below the continuum edge
//! `M0²(1 − |η|)²` (plus a 10% window) is ever computed. Box modes of the
//! truncated domain are told apart from genuine bound states by a
//! localization metric on the eigenvector.

use serde::Serialize;
use thiserror::Error;

use crate::analytic::{
    classify_levels, effective_potential, sech_squared, LevelClass, SpectrumEntry,
};
use crate::params::{PhysicalParams, DEFAULT_ABS_TOL};
use crate::tridiagonal::{SymTridiagonal, TridiagonalError};

/// Maximum `h·α` for which the step is considered resolved.
pub const MAX_STEP_RESOLUTION: f64 = 0.2;
/// `α·L` below this is rejected.
pub const MIN_DOMAIN: f64 = 3.0;
/// `α·L` below this is accepted with a warning.
pub const PRODUCTION_DOMAIN: f64 = 10.0;
pub const DEFAULT_DOMAIN: f64 = 25.0;
pub const DEFAULT_POINTS: usize = 8000;
/// Eigenvalues computed above the continuum edge, as a fraction of it.
pub const EDGE_WINDOW: f64 = 0.1;
pub const DEFAULT_MAX_EIGENVALUES: usize = 4096;
/// A candidate counts as localized at or above this interior mass fraction...
pub const MIN_INTERIOR_FRACTION: f64 = 0.99;
/// ...and at or below this relative edge amplitude.
pub const MAX_EDGE_AMPLITUDE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),
    #[error("grid too coarse: h*alpha = {0} exceeds {MAX_STEP_RESOLUTION}")]
    GridTooCoarse(f64),
    #[error("domain too small: alpha*L = {0} is below {MIN_DOMAIN}")]
    DomainTooSmall(f64),
    #[error(transparent)]
    Eigen(#[from] TridiagonalError),
}

/// Uniform interior grid `x_i = −L + (i+1) h`, `h = 2L/(N+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discretization {
    half_width: f64,
    num_points: usize,
}

impl Discretization {
    pub fn new(half_width: f64, num_points: usize) -> Result<Self, SolverError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(SolverError::InvalidDiscretization(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if num_points < 3 {
            return Err(SolverError::InvalidDiscretization(format!(
                "need at least 3 interior points, got {num_points}"
            )));
        }
        Ok(Self {
            half_width,
            num_points,
        })
    }

    /// `L = 25/α`, `N = 8000`.
    pub fn default_for(params: &PhysicalParams) -> Self {
        Self {
            half_width: DEFAULT_DOMAIN / params.alpha(),
            num_points: DEFAULT_POINTS,
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.num_points + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + (i + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.num_points).map(|i| self.node(i)).collect()
    }

    /// Resolution checks against an inverse length `alpha`.
    pub fn check_resolution(&self, alpha: f64) -> Result<Vec<String>, SolverError> {
        let h_alpha = self.spacing() * alpha;
        if h_alpha > MAX_STEP_RESOLUTION {
            return Err(SolverError::GridTooCoarse(h_alpha));
        }
        let alpha_l = alpha * self.half_width;
        if alpha_l < MIN_DOMAIN {
            return Err(SolverError::DomainTooSmall(alpha_l));
        }
        let mut warnings = Vec::new();
        if alpha_l < PRODUCTION_DOMAIN {
            warnings.push(format!(
                "alpha*L = {alpha_l} is below the production minimum {PRODUCTION_DOMAIN}"
            ));
        }
        Ok(warnings)
    }
}

/// Central-difference operator `−d²/dx² + V` on the interior grid.
/// Performs no resolution checks.
pub fn finite_difference_operator<F: Fn(f64) -> f64>(
    disc: &Discretization,
    potential: F,
) -> Result<SymTridiagonal, SolverError> {
    let h = disc.spacing();
    let kinetic = 1.0 / (h * h);
    let diag = disc
        .nodes()
        .into_iter()
        .map(|x| 2.0 * kinetic + potential(x))
        .collect();
    let off = vec![-kinetic; disc.num_points() - 1];
    Ok(SymTridiagonal::new(diag, off)?)
}

/// Potential fed to the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Potential {
    /// `V_eff = M(x)²` of the step-mass profile.
    StepMass(PhysicalParams),
    /// Control well `1 − 2 sech²x` with one bound state at `E² = 0`.
    ControlWell,
}

impl Potential {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::StepMass(p) => effective_potential(p, x),
            Potential::ControlWell => 1.0 - 2.0 * sech_squared(x),
        }
    }

    /// Lower asymptote of the potential.
    pub fn continuum_edge(&self) -> f64 {
        match self {
            Potential::StepMass(p) => {
                let low = p.m0() * (1.0 - p.eta().abs());
                low * low
            }
            Potential::ControlWell => 1.0,
        }
    }

    /// Inverse length used for the resolution checks.
    pub fn steepness(&self) -> f64 {
        match self {
            Potential::StepMass(p) => p.alpha(),
            Potential::ControlWell => 1.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Potential::StepMass(_) => "step-mass",
            Potential::ControlWell => "control-well",
        }
    }
}

/// Operator for the step-mass problem, with resolution checks.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub operator: SymTridiagonal,
    pub potential_grid: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn build_hamiltonian(
    params: &PhysicalParams,
    disc: &Discretization,
) -> Result<Hamiltonian, SolverError> {
    build_for(&Potential::StepMass(*params), disc)
}

pub fn build_for(potential: &Potential, disc: &Discretization) -> Result<Hamiltonian, SolverError> {
    let warnings = disc.check_resolution(potential.steepness())?;
    let potential_grid: Vec<f64> = disc
        .nodes()
        .into_iter()
        .map(|x| potential.value(x))
        .collect();
    let operator = finite_difference_operator(disc, |x| potential.value(x))?;
    Ok(Hamiltonian {
        operator,
        potential_grid,
        warnings,
    })
}

/// All eigenvalues below `threshold`, ascending, by Sturm bisection.
pub fn eigenvalues_below(
    operator: &SymTridiagonal,
    threshold: f64,
    max_count: usize,
) -> Result<Vec<f64>, SolverError> {
    let guarded = threshold - DEFAULT_ABS_TOL * threshold.abs().max(1.0);
    Ok(operator.eigenvalues_below(guarded, max_count)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationMetric {
    /// Fraction of `Σ|φ|²` on nodes with `|x| ≤ L/2`.
    pub interior_mass_fraction: f64,
    /// `max |φ|` over `|x| ≥ 0.9 L`, relative to `max |φ|`.
    pub edge_amplitude: f64,
}

impl LocalizationMetric {
    pub fn compute(disc: &Discretization, phi: &[f64]) -> Self {
        let l = disc.half_width();
        let mut total = 0.0;
        let mut inner = 0.0;
        let mut peak: f64 = 0.0;
        let mut edge: f64 = 0.0;
        for (i, &v) in phi.iter().enumerate() {
            let x = disc.node(i).abs();
            let w = v * v;
            total += w;
            if x <= 0.5 * l {
                inner += w;
            }
            peak = peak.max(v.abs());
            if x >= 0.9 * l {
                edge = edge.max(v.abs());
            }
        }
        if total == 0.0 {
            return Self {
                interior_mass_fraction: 0.0,
                edge_amplitude: 1.0,
            };
        }
        Self {
            interior_mass_fraction: (inner / total).clamp(0.0, 1.0),
            edge_amplitude: (edge / peak).clamp(0.0, 1.0),
        }
    }

    pub fn is_localized(&self) -> bool {
        self.interior_mass_fraction >= MIN_INTERIOR_FRACTION
            && self.edge_amplitude <= MAX_EDGE_AMPLITUDE
    }
}

/// `E = ±√E²`, imaginary when `E² < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub magnitude: f64,
    pub imaginary: bool,
}

impl EnergyValue {
    pub fn from_e_squared(e_squared: f64) -> Self {
        Self {
            magnitude: e_squared.abs().sqrt(),
            imaginary: e_squared < 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCandidate {
    pub e_squared: f64,
    pub energy: EnergyValue,
    pub localization: LocalizationMetric,
    pub localized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSpectrum {
    pub potential: &'static str,
    pub discretization: Discretization,
    /// Ascending eigenvalues (`E²`) below `continuum_edge · (1 + 10%)`.
    pub eigenvalues: Vec<f64>,
    pub continuum_edge: f64,
    pub bound_candidates: Vec<BoundCandidate>,
    pub min_grid_potential: f64,
    /// Grid potential never steps against the direction set by `sign(η)`
    /// and changes at least once. Always false for the control well.
    pub potential_monotone: bool,
    /// No candidate below the edge passes the localization test.
    pub empty_real_spectrum: bool,
    pub warnings: Vec<String>,
}

impl DiscreteSpectrum {
    pub fn localized_count(&self) -> usize {
        self.bound_candidates.iter().filter(|c| c.localized).count()
    }
}

/// Grid potential is monotone in the direction of `sign` (non-strictly,
/// since `tanh` saturates in f64) with at least one strict step.
pub fn grid_monotone(values: &[f64], sign: f64) -> bool {
    if sign == 0.0 {
        return false;
    }
    let mut strict = false;
    for w in values.windows(2) {
        let step = (w[1] - w[0]) * sign;
        if step < 0.0 {
            return false;
        }
        strict |= step > 0.0;
    }
    strict
}

pub fn spectrum_report(
    potential: &Potential,
    disc: &Discretization,
) -> Result<DiscreteSpectrum, SolverError> {
    let ham = build_for(potential, disc)?;
    let edge = potential.continuum_edge();
    let window = edge * (1.0 + EDGE_WINDOW);
    let eigenvalues = eigenvalues_below(&ham.operator, window, DEFAULT_MAX_EIGENVALUES)?;
    let guarded_edge = edge - DEFAULT_ABS_TOL * edge.abs().max(1.0);

    let bound_candidates: Vec<BoundCandidate> = eigenvalues
        .iter()
        .filter(|&&e| e < guarded_edge)
        .map(|&e| {
            let phi = ham.operator.eigenvector(e);
            let localization = LocalizationMetric::compute(disc, &phi);
            BoundCandidate {
                e_squared: e,
                energy: EnergyValue::from_e_squared(e),
                localization,
                localized: localization.is_localized(),
            }
        })
        .collect();

    let min_grid_potential = ham
        .potential_grid
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let potential_monotone = match potential {
        Potential::StepMass(p) => {
            let sign = if p.eta() == 0.0 {
                0.0
            } else {
                p.eta().signum()
            };
            grid_monotone(&ham.potential_grid, sign)
        }
        Potential::ControlWell => false,
    };
    let empty_real_spectrum = !bound_candidates.iter().any(|c| c.localized);

    Ok(DiscreteSpectrum {
        potential: potential.label(),
        discretization: *disc,
        eigenvalues,
        continuum_edge: edge,
        bound_candidates,
        min_grid_potential,
        potential_monotone,
        empty_real_spectrum,
        warnings: ham.warnings,
    })
}

pub fn bound_state_report(
    params: &PhysicalParams,
    disc: &Discretization,
) -> Result<DiscreteSpectrum, SolverError> {
    spectrum_report(&Potential::StepMass(*params), disc)
}

/// Grid eigenfunctions `(x_i, φ_k(x_i))` for the listed eigenvalues.
pub fn eigenfunctions(
    potential: &Potential,
    disc: &Discretization,
    eigenvalues: &[f64],
) -> Result<Vec<Vec<f64>>, SolverError> {
    let op = finite_difference_operator(disc, |x| potential.value(x))?;
    Ok(eigenvalues.iter().map(|&e| op.eigenvector(e)).collect())
}

/// Analytic level table juxtaposed with the numeric spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub analytic_levels: Option<Vec<SpectrumEntry>>,
    pub analytic_error: Option<String>,
    pub numeric: DiscreteSpectrum,
    /// Every `Imaginary` level has `E² < 0 < min grid V_eff`, so it cannot
    /// belong to the (positive) numeric operator's spectrum.
    pub imaginary_levels_outside_spectrum: bool,
    /// Levels whose radicand is positive yet have no localized numeric
    /// counterpart.
    pub unmatched_real_levels: Vec<u32>,
    pub consistent: bool,
}

pub fn analytic_vs_numeric(
    params: &PhysicalParams,
    disc: &Discretization,
    n_max: u32,
) -> Result<ComparisonReport, SolverError> {
    compare_with(&Potential::StepMass(*params), params, disc, n_max)
}

/// Like [`analytic_vs_numeric`] but with the numeric side run on an
/// arbitrary potential (the control well exercises the dissenting path).
pub fn compare_with(
    potential: &Potential,
    params: &PhysicalParams,
    disc: &Discretization,
    n_max: u32,
) -> Result<ComparisonReport, SolverError> {
    let numeric = spectrum_report(potential, disc)?;
    let (analytic_levels, analytic_error) =
        match classify_levels(&params.reduce(), params.m0(), n_max) {
            Ok(levels) => (Some(levels), None),
            Err(e) => (None, Some(e.to_string())),
        };
    let floor = numeric.min_grid_potential;
    let (imaginary_levels_outside_spectrum, unmatched_real_levels) = match &analytic_levels {
        Some(levels) => {
            let outside = levels
                .iter()
                .filter(|l| l.classification == LevelClass::Imaginary)
                .all(|l| {
                    let e2 = l.e_squared.unwrap_or(f64::NAN);
                    e2 < 0.0 && floor >= 0.0
                });
            let unmatched = levels
                .iter()
                .filter(|l| l.classification == LevelClass::Real)
                .filter(|l| {
                    let e2 = l.e_squared.unwrap_or(f64::NAN);
                    !numeric.bound_candidates.iter().any(|c| {
                        c.localized && (c.e_squared - e2).abs() <= 1e-3 * e2.abs().max(1.0)
                    })
                })
                .map(|l| l.n)
                .collect();
            (outside, unmatched)
        }
        None => (false, Vec::new()),
    };
    let consistent = analytic_levels.is_some()
        && imaginary_levels_outside_spectrum
        && numeric.empty_real_spectrum;
    Ok(ComparisonReport {
        analytic_levels,
        analytic_error,
        numeric,
        imaginary_levels_outside_spectrum,
        unmatched_real_levels,
        consistent,
    })
}
