//! The ground-level feasibility function
//!
//! ```text
//! f(η, Λ) = (1 + η²) − 4η²/t² − t²/4,    t = Λ − √(Λ² + 4η²)
//! ```
//!
//! whose sign decides whether the `n = 0` level can be real. It is evaluated
//! by two independent routes:
//!
//! * [`f_direct`] sums the three terms as written;
//! * [`f_factored`] uses the auxiliary root `u = (√(Λ²+4η²) − Λ)/2 = −t/2`
//!   and the factorization `f = (1 − u²)(u² − η²)/u²`.
//!
//! Since `u` is the positive root of `u² + Λu − η² = 0`, `0 < u ≤ |η| ≤ 1`,
//! so the first factor is non-negative and the second non-positive. The
//! [`sign_certificate`] reads the verdict off those factor signs instead of
//! the floating value of `f`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{level_energy_with, AnalyticError};
use crate::params::{DimensionlessParams, GridShape, NumericPolicy, Range};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibilityError {
    #[error("eta = 0 makes f singular (0/0 with a divergent limit)")]
    EtaZeroSingular,
    #[error("eta = 0 and lambda = 0: f is indeterminate")]
    BothZero,
    #[error("(eta, lambda) = ({0}, {1}) lies outside |eta| <= 1, lambda >= 0")]
    OutOfDomain(f64, f64),
}

fn check_domain(eta: f64, lambda: f64) -> Result<(), FeasibilityError> {
    if !(eta.is_finite() && lambda.is_finite()) || eta.abs() > 1.0 || lambda < 0.0 {
        return Err(FeasibilityError::OutOfDomain(eta, lambda));
    }
    if eta == 0.0 {
        return Err(if lambda == 0.0 {
            FeasibilityError::BothZero
        } else {
            FeasibilityError::EtaZeroSingular
        });
    }
    Ok(())
}

/// Auxiliary root `u = (√(Λ²+4η²) − Λ)/2`, computed as `2η²/(√(Λ²+4η²) + Λ)`.
pub fn aux_u(eta: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return eta.abs();
    }
    2.0 * eta * eta / (lambda.hypot(2.0 * eta) + lambda)
}

/// Three-term evaluation of `f`.
pub fn f_direct(eta: f64, lambda: f64) -> Result<f64, FeasibilityError> {
    check_domain(eta, lambda)?;
    let eta_sq = eta * eta;
    // t = Λ − √(Λ²+4η²), rewritten over its conjugate
    let t = -4.0 * eta_sq / (lambda + lambda.hypot(2.0 * eta));
    let t_sq = t * t;
    Ok((1.0 + eta_sq) - 4.0 * eta_sq / t_sq - 0.25 * t_sq)
}

/// Factored evaluation `(1 − u²)(u² − η²)/u²`.
pub fn f_factored(eta: f64, lambda: f64) -> Result<f64, FeasibilityError> {
    check_domain(eta, lambda)?;
    let (one_minus_u_sq, u_sq_minus_eta_sq, u, _) = factors(eta, lambda);
    Ok(one_minus_u_sq * u_sq_minus_eta_sq / (u * u))
}

/// `(1 − u², u² − η², u, |η| − u)`, each free of cancellation.
fn factors(eta: f64, lambda: f64) -> (f64, f64, f64, f64) {
    let u = aux_u(eta, lambda);
    let abs_eta = eta.abs();
    let root = lambda.hypot(2.0 * eta);
    // |η| − u = |η| Λ (1 + Λ/(s + 2|η|)) / (s + Λ),  s = √(Λ² + 4η²)
    let gap = abs_eta * lambda * (1.0 + lambda / (root + 2.0 * abs_eta)) / (root + lambda);
    // 1 − u = (1 − |η|) + (|η| − u), both terms ≥ 0 on the box
    let one_minus_u_sq = ((1.0 - abs_eta) + gap) * (1.0 + u);
    // u² − η² = −Λu from the defining quadratic
    let u_sq_minus_eta_sq = -lambda * u;
    (one_minus_u_sq, u_sq_minus_eta_sq, u, gap)
}

/// Value of `f` used for surfaces and scans: the factored route, with the
/// exact boundary identity `f(η, 0) = 0`.
pub fn f_value(eta: f64, lambda: f64) -> Result<f64, FeasibilityError> {
    if lambda == 0.0 {
        check_domain(eta, lambda)?;
        return Ok(0.0);
    }
    f_factored(eta, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SignVerdict {
    /// `f < 0` strictly: the ground level cannot be real.
    Negative,
    /// `f = 0` exactly (the `Λ = 0` edge).
    ZeroBoundary,
    /// Outside the physical box; the factor argument does not apply.
    Undefined,
}

/// Sign of `f` from the signs of its factors.
pub fn sign_certificate(eta: f64, lambda: f64) -> Result<SignVerdict, FeasibilityError> {
    match check_domain(eta, lambda) {
        Err(FeasibilityError::OutOfDomain(..)) => return Ok(SignVerdict::Undefined),
        Err(e) => return Err(e),
        Ok(()) => {}
    }
    let (first, second, u, gap) = factors(eta, lambda);
    if !(u > 0.0 && gap >= 0.0) || first < 0.0 || second > 0.0 {
        return Ok(SignVerdict::Undefined);
    }
    if second == 0.0 || first == 0.0 {
        return Ok(SignVerdict::ZeroBoundary);
    }
    Ok(SignVerdict::Negative)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityResult {
    pub eta: f64,
    pub lambda: f64,
    pub f_direct: f64,
    pub f_factored: f64,
    pub u: f64,
    pub sign_verdict: SignVerdict,
}

impl FeasibilityResult {
    /// `|f_direct − f_factored| ≤ tol · max(1, |f_direct|)`.
    pub fn routes_agree(&self, tol: f64) -> bool {
        (self.f_direct - self.f_factored).abs() <= tol * self.f_direct.abs().max(1.0)
    }
}

pub fn evaluate(eta: f64, lambda: f64) -> Result<FeasibilityResult, FeasibilityError> {
    Ok(FeasibilityResult {
        eta,
        lambda,
        f_direct: f_direct(eta, lambda)?,
        f_factored: f_factored(eta, lambda)?,
        u: aux_u(eta, lambda),
        sign_verdict: sign_certificate(eta, lambda)?,
    })
}

/// Outcome of the general-level inequality
/// `M0²(1+η²) ≥ η²M0⁴/(α²(n+δ₁)²) + α²(n+δ₁)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub n: u32,
    pub holds: bool,
    /// Left minus right side; equals the level's `E²`.
    pub margin: f64,
}

pub fn feasibility_inequality(
    params: &DimensionlessParams,
    m0: f64,
    n: u32,
) -> Result<InequalityCheck, AnalyticError> {
    let entry = level_energy_with(params, m0, n, &NumericPolicy::default())?;
    let margin = entry.e_squared.expect("non-pole level carries a radicand");
    Ok(InequalityCheck {
        n,
        holds: margin >= 0.0,
        margin,
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("empty or non-finite scan box")]
    EmptyBox,
    #[error("scan box straddles eta = 0; split it or enable the eta = 0 exclusion")]
    BoxIncludesEtaZero,
    #[error("scan box leaves the physical domain (|eta| <= 1, lambda_min > 0)")]
    OutsideDomain,
    #[error("grid must have at least 2 nodes per axis")]
    GridTooSmall,
}

/// Rectangular `(eta, lambda)` region for the supremum scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanBox {
    pub eta: Range,
    pub lambda: Range,
    /// Skip `eta = 0` gridlines and keep refinement on one side of zero.
    pub exclude_eta_zero: bool,
}

impl ScanBox {
    /// `η ∈ [−1, 1] \ {0}`, `Λ ∈ [1e−3, 10]`.
    pub fn physical() -> Self {
        let policy = NumericPolicy::default();
        Self {
            eta: policy.scan_eta,
            lambda: policy.scan_lambda,
            exclude_eta_zero: true,
        }
    }

    pub fn new(eta: Range, lambda: Range) -> Self {
        Self {
            eta,
            lambda,
            exclude_eta_zero: false,
        }
    }

    fn validate(&self) -> Result<(), ScanError> {
        for r in [self.eta, self.lambda] {
            if !(r.min.is_finite() && r.max.is_finite()) || r.min > r.max {
                return Err(ScanError::EmptyBox);
            }
        }
        if self.eta.min < -1.0 || self.eta.max > 1.0 || self.lambda.min <= 0.0 {
            return Err(ScanError::OutsideDomain);
        }
        if self.eta.contains(0.0) && !self.exclude_eta_zero {
            return Err(ScanError::BoxIncludesEtaZero);
        }
        if self.eta.min == 0.0 && self.eta.max == 0.0 {
            return Err(ScanError::EmptyBox);
        }
        Ok(())
    }
}

/// Local-refinement settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RefineOptions {
    /// Best grid nodes used as starting points.
    pub top_k: usize,
    /// Golden-section iterations per line search.
    pub steps: usize,
    /// Alternating eta/lambda line-search sweeps per start.
    pub sweeps: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            top_k: 5,
            steps: 60,
            sweeps: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub eta: f64,
    pub lambda: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupremumReport {
    pub scan_box: ScanBox,
    pub grid: GridShape,
    pub sup_estimate: f64,
    pub argmax: ScanPoint,
    /// Best point after each line search.
    pub refinement_trace: Vec<ScanPoint>,
    pub nodes_evaluated: usize,
    /// Number of `eta = 0` gridlines that were skipped.
    pub skipped_eta_zero_lines: usize,
    /// Grid nodes whose certificate was not `Negative`.
    pub non_negative_nodes: usize,
}

impl SupremumReport {
    pub fn all_nodes_negative(&self) -> bool {
        self.non_negative_nodes == 0
    }
}

/// Total order for the max reduction: larger `f` wins, ties go to smaller
/// `Λ`, then smaller `|η|`, then negative `η`.
fn better(a: &ScanPoint, b: &ScanPoint) -> bool {
    use std::cmp::Ordering::*;
    match a.f.total_cmp(&b.f) {
        Greater => true,
        Less => false,
        Equal => match b.lambda.total_cmp(&a.lambda) {
            Greater => true,
            Less => false,
            Equal => match b.eta.abs().total_cmp(&a.eta.abs()) {
                Greater => true,
                Less => false,
                Equal => a.eta < b.eta,
            },
        },
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization on `[lo, hi]`; interior points only.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, steps: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..steps {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn scan_value(eta: f64, lambda: f64) -> f64 {
    f_value(eta, lambda).unwrap_or(f64::NEG_INFINITY)
}

/// Grid scan of `f` over `scan_box`, refined from the best nodes by
/// coordinate-wise golden-section line searches. Deterministic for fixed
/// inputs regardless of thread count.
pub fn supremum_scan(
    scan_box: &ScanBox,
    grid: GridShape,
    refine: RefineOptions,
) -> Result<SupremumReport, ScanError> {
    scan_box.validate()?;
    if grid.eta_nodes < 2 || grid.lambda_nodes < 2 {
        return Err(ScanError::GridTooSmall);
    }
    let all_etas = scan_box.eta.nodes(grid.eta_nodes);
    let skipped = all_etas.iter().filter(|&&e| e == 0.0).count();
    let etas: Vec<f64> = all_etas.into_iter().filter(|&e| e != 0.0).collect();
    let lambdas = scan_box.lambda.nodes(grid.lambda_nodes);

    let rows: Vec<(Vec<ScanPoint>, usize)> = etas
        .par_iter()
        .map(|&eta| {
            let mut failures = 0;
            let row = lambdas
                .iter()
                .map(|&lambda| {
                    if sign_certificate(eta, lambda) != Ok(SignVerdict::Negative) {
                        failures += 1;
                    }
                    ScanPoint {
                        eta,
                        lambda,
                        f: scan_value(eta, lambda),
                    }
                })
                .collect();
            (row, failures)
        })
        .collect();

    let non_negative_nodes = rows.iter().map(|(_, n)| n).sum();
    let nodes: Vec<ScanPoint> = rows.into_iter().flat_map(|(r, _)| r).collect();

    // top_k by the same total order, deterministic
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&i, &j| {
        if better(&nodes[i], &nodes[j]) {
            std::cmp::Ordering::Less
        } else if better(&nodes[j], &nodes[i]) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let mut best = nodes[order[0]];

    let eta_step = eta_spacing(scan_box, grid);
    let lambda_step = lambda_spacing(scan_box, grid);
    let mut trace = Vec::new();
    for &start in order.iter().take(refine.top_k) {
        let mut point = nodes[start];
        // keep refinement on the starting point's side of eta = 0
        let (eta_lo_side, eta_hi_side) = if point.eta > 0.0 {
            (scan_box.eta.min.max(0.0), scan_box.eta.max)
        } else {
            (scan_box.eta.min, scan_box.eta.max.min(0.0))
        };
        for _ in 0..refine.sweeps {
            let lo = (point.eta - eta_step).max(eta_lo_side);
            let hi = (point.eta + eta_step).min(eta_hi_side);
            if hi > lo {
                let lambda = point.lambda;
                let (eta, f) = golden_max(|e| scan_value(e, lambda), lo, hi, refine.steps);
                let candidate = ScanPoint { eta, lambda, f };
                if better(&candidate, &point) {
                    point = candidate;
                }
                trace.push(point);
            }
            let lo = (point.lambda - lambda_step).max(scan_box.lambda.min);
            let hi = (point.lambda + lambda_step).min(scan_box.lambda.max);
            if hi > lo {
                let eta = point.eta;
                let (lambda, f) = golden_max(|l| scan_value(eta, l), lo, hi, refine.steps);
                let candidate = ScanPoint { eta, lambda, f };
                if better(&candidate, &point) {
                    point = candidate;
                }
                trace.push(point);
            }
        }
        if better(&point, &best) {
            best = point;
        }
    }

    Ok(SupremumReport {
        scan_box: *scan_box,
        grid,
        sup_estimate: best.f,
        argmax: best,
        refinement_trace: trace,
        nodes_evaluated: nodes.len(),
        skipped_eta_zero_lines: skipped,
        non_negative_nodes,
    })
}

fn eta_spacing(b: &ScanBox, g: GridShape) -> f64 {
    b.eta.width() / (g.eta_nodes - 1) as f64
}

fn lambda_spacing(b: &ScanBox, g: GridShape) -> f64 {
    b.lambda.width() / (g.lambda_nodes - 1) as f64
}
