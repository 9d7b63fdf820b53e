//! Validated parameter types and the shared numeric policy.
//!
//! Everything is in natural units (ħ = c = 1). The mass scale `M0` carries
//! the only dimension; `alpha` has the same units as `M0` and the reduced
//! steepness `Λ = α/M0` is dimensionless.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance, in units of `M0²` where a scale applies.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
/// Default relative tolerance for route-agreement checks.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("mass scale M0 must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("|eta| must not exceed 1 for a positive mass profile, got eta = {0}")]
    EtaOutOfRange(f64),
    #[error("steepness alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("reduced steepness lambda must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("invalid numeric policy: {0}")]
    InvalidPolicy(String),
}

/// Flags attached to accepted-but-special parameter values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamFlags {
    /// `|eta| = 1`: the mass touches zero at one asymptote.
    pub eta_at_boundary: bool,
    /// `eta = 0`: constant mass, the spectrum formulas are singular here.
    pub hermitian_degenerate: bool,
}

impl ParamFlags {
    fn for_eta(eta: f64) -> Self {
        Self {
            eta_at_boundary: eta.abs() == 1.0,
            hermitian_degenerate: eta == 0.0,
        }
    }
}

/// Dimensional inputs of the step-mass profile `M0 (1 + eta tanh(alpha x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    m0: f64,
    eta: f64,
    alpha: f64,
    flags: ParamFlags,
}

impl PhysicalParams {
    pub fn new(m0: f64, eta: f64, alpha: f64) -> Result<Self, ParamError> {
        validate_physical(m0, eta, alpha)
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn flags(&self) -> ParamFlags {
        self.flags
    }

    /// Same profile with `eta -> -eta`.
    pub fn mirrored(&self) -> Self {
        Self {
            eta: -self.eta,
            ..*self
        }
    }

    pub fn reduce(&self) -> DimensionlessParams {
        reduce(self)
    }
}

/// Reduced coordinates `(eta, Λ = α/M0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessParams {
    eta: f64,
    lambda: f64,
    flags: ParamFlags,
}

impl DimensionlessParams {
    pub fn new(eta: f64, lambda: f64) -> Result<Self, ParamError> {
        if !eta.is_finite() {
            return Err(ParamError::NonFinite("eta"));
        }
        if !lambda.is_finite() {
            return Err(ParamError::NonFinite("lambda"));
        }
        if eta.abs() > 1.0 {
            return Err(ParamError::EtaOutOfRange(eta));
        }
        if lambda < 0.0 {
            return Err(ParamError::NegativeLambda(lambda));
        }
        Ok(Self {
            eta,
            lambda,
            flags: ParamFlags::for_eta(eta),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn flags(&self) -> ParamFlags {
        self.flags
    }

    /// Restores dimensions for a chosen mass scale: `alpha = lambda * m0`.
    pub fn to_physical(&self, m0: f64) -> Result<PhysicalParams, ParamError> {
        validate_physical(m0, self.eta, self.lambda * m0)
    }
}

/// Validates raw inputs. Never clamps.
pub fn validate_physical(m0: f64, eta: f64, alpha: f64) -> Result<PhysicalParams, ParamError> {
    for (name, value) in [("M0", m0), ("eta", eta), ("alpha", alpha)] {
        if !value.is_finite() {
            return Err(ParamError::NonFinite(name));
        }
    }
    if m0 <= 0.0 {
        return Err(ParamError::NonPositiveMass(m0));
    }
    if eta.abs() > 1.0 {
        return Err(ParamError::EtaOutOfRange(eta));
    }
    if alpha <= 0.0 {
        return Err(ParamError::NonPositiveAlpha(alpha));
    }
    Ok(PhysicalParams {
        m0,
        eta,
        alpha,
        flags: ParamFlags::for_eta(eta),
    })
}

pub fn reduce(params: &PhysicalParams) -> DimensionlessParams {
    DimensionlessParams {
        eta: params.eta,
        lambda: params.alpha / params.m0,
        flags: params.flags,
    }
}

/// Node counts of a two-dimensional `(eta, lambda)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridShape {
    pub eta_nodes: usize,
    pub lambda_nodes: usize,
}

impl GridShape {
    pub const fn new(eta_nodes: usize, lambda_nodes: usize) -> Self {
        Self {
            eta_nodes,
            lambda_nodes,
        }
    }
}

/// Closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.min <= value && value <= self.max
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// `n` equispaced nodes; a zero-width range collapses to one node.
    pub fn nodes(&self, n: usize) -> Vec<f64> {
        if self.min == self.max || n < 2 {
            return vec![self.min];
        }
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.max
                } else {
                    self.min + self.width() * (i as f64 / last)
                }
            })
            .collect()
    }
}

/// Tolerances and sweep defaults shared across modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Surface output grid.
    pub surface_grid: GridShape,
    pub surface_eta: Range,
    pub surface_lambda: Range,
    /// Supremum scan grid.
    pub scan_grid: GridShape,
    pub scan_eta: Range,
    pub scan_lambda: Range,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
            surface_grid: GridShape::new(101, 101),
            surface_eta: Range::new(-1.0, 1.0),
            surface_lambda: Range::new(0.0, 10.0),
            scan_grid: GridShape::new(801, 801),
            scan_eta: Range::new(-1.0, 1.0),
            scan_lambda: Range::new(1e-3, 10.0),
        }
    }
}

impl NumericPolicy {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(ParamError::InvalidPolicy(
                "tolerances must be positive".into(),
            ));
        }
        for grid in [self.surface_grid, self.scan_grid] {
            if grid.eta_nodes < 2 || grid.lambda_nodes < 2 {
                return Err(ParamError::InvalidPolicy(
                    "grid sizes must be at least 2".into(),
                ));
            }
        }
        for range in [
            self.surface_eta,
            self.surface_lambda,
            self.scan_eta,
            self.scan_lambda,
        ] {
            if !(range.min.is_finite() && range.max.is_finite() && range.min <= range.max) {
                return Err(ParamError::InvalidPolicy(format!(
                    "bad range [{}, {}]",
                    range.min, range.max
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validation_examples() {
        assert!(validate_physical(1.0, 0.5, 1.0).is_ok());
        assert_eq!(
            validate_physical(1.0, 1.5, 1.0),
            Err(ParamError::EtaOutOfRange(1.5))
        );
        assert_eq!(
            validate_physical(0.0, 0.5, 1.0),
            Err(ParamError::NonPositiveMass(0.0))
        );
        assert_eq!(
            validate_physical(1.0, 0.5, -2.0),
            Err(ParamError::NonPositiveAlpha(-2.0))
        );
        assert_eq!(
            validate_physical(f64::NAN, 0.5, 1.0),
            Err(ParamError::NonFinite("M0"))
        );
        assert_eq!(
            validate_physical(1.0, 0.5, f64::INFINITY),
            Err(ParamError::NonFinite("alpha"))
        );
    }

    #[test]
    fn boundary_and_degenerate_flags() {
        let p = validate_physical(1.0, -1.0, 1.0).unwrap();
        assert!(p.flags().eta_at_boundary);
        assert!(!p.flags().hermitian_degenerate);
        let p = validate_physical(1.0, 0.0, 1.0).unwrap();
        assert!(p.flags().hermitian_degenerate);
    }

    #[test]
    fn reduce_examples() {
        let d = reduce(&validate_physical(1.0, 0.5, 1.0).unwrap());
        assert_eq!((d.eta(), d.lambda()), (0.5, 1.0));
        let d = reduce(&validate_physical(2.0, -0.3, 1.0).unwrap());
        assert_eq!((d.eta(), d.lambda()), (-0.3, 0.5));
        let d = reduce(&validate_physical(0.5, 1.0, 5.0).unwrap());
        assert_eq!((d.eta(), d.lambda()), (1.0, 10.0));
    }

    #[test]
    fn dimensionless_validation() {
        assert!(DimensionlessParams::new(0.5, 0.0).is_ok());
        assert_eq!(
            DimensionlessParams::new(0.5, -1.0),
            Err(ParamError::NegativeLambda(-1.0))
        );
        assert!(DimensionlessParams::new(0.5, 0.0)
            .unwrap()
            .to_physical(1.0)
            .is_err());
    }

    #[test]
    fn range_nodes() {
        let r = Range::new(-1.0, 1.0);
        let nodes = r.nodes(101);
        assert_eq!(nodes.len(), 101);
        assert_eq!(nodes[0], -1.0);
        assert_eq!(nodes[50], 0.0);
        assert_eq!(nodes[100], 1.0);
        assert_eq!(Range::new(0.5, 0.5).nodes(2), vec![0.5]);
    }

    #[test]
    fn default_policy_is_valid() {
        NumericPolicy::default().validate().unwrap();
        let mut p = NumericPolicy::default();
        p.scan_grid.eta_nodes = 1;
        assert!(p.validate().is_err());
        p = NumericPolicy::default();
        p.abs_tol = 0.0;
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn reduce_is_scale_invariant(
            m0 in 1e-3f64..1e3,
            eta in -1.0f64..=1.0,
            alpha in 1e-3f64..1e3,
            c in 1e-3f64..1e3,
        ) {
            let base = reduce(&validate_physical(m0, eta, alpha).unwrap());
            let scaled = reduce(&validate_physical(c * m0, eta, c * alpha).unwrap());
            prop_assert_eq!(base.eta(), scaled.eta());
            let rel = (base.lambda() - scaled.lambda()).abs() / base.lambda();
            prop_assert!(rel <= 4.0 * f64::EPSILON);
        }

        #[test]
        fn validated_then_reduced_stays_in_domain(
            m0 in -2.0f64..2.0,
            eta in -2.0f64..2.0,
            alpha in -2.0f64..2.0,
        ) {
            if let Ok(p) = validate_physical(m0, eta, alpha) {
                let d = reduce(&p);
                prop_assert!(d.lambda() >= 0.0);
                prop_assert!(d.eta().abs() <= 1.0);
            }
        }
    }
}
