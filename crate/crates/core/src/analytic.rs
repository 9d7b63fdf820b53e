//! Closed-form evaluators: the step-mass profile, the complex Lorentz vector
//! potential it induces, the effective Rosen-Morse potential `M(x)²`, the
//! level shift `δ₁` and the energy levels with their real/imaginary
//! classification.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::params::{DimensionlessParams, NumericPolicy, PhysicalParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("mass profile underflows to zero at x = {0}")]
    DegenerateMass(f64),
    #[error("lambda = 0: delta1 diverges")]
    LambdaZero,
    #[error("eta = 0 is the Hermitian limit: the n = 0 level divides by zero")]
    EtaZeroDegenerate,
    #[error("level n = {0} sits on the pole n + delta1 = 0")]
    LevelAtPole(u32),
}

/// `sech²(y)`, exactly zero once `cosh` overflows.
pub fn sech_squared(y: f64) -> f64 {
    let c = y.abs().cosh();
    if c.is_infinite() {
        0.0
    } else {
        let s = 1.0 / c;
        s * s
    }
}

/// `1 + eta tanh(y)` without cancellation when `eta tanh(y) → -1`.
pub fn one_plus_eta_tanh(eta: f64, y: f64) -> f64 {
    if eta * y >= 0.0 {
        return 1.0 + eta * y.tanh();
    }
    // 1 - tanh|y| = 2 / (exp(2|y|) + 1)
    let one_minus_tanh = 2.0 / ((2.0 * y.abs()).exp() + 1.0);
    (1.0 - eta.abs()) + eta.abs() * one_minus_tanh
}

/// `M(x) = M0 (1 + eta tanh(alpha x))`.
pub fn mass_profile(params: &PhysicalParams, x: f64) -> f64 {
    params.m0() * one_plus_eta_tanh(params.eta(), params.alpha() * x)
}

/// `M'(x) = M0 eta alpha sech²(alpha x)`.
pub fn mass_derivative(params: &PhysicalParams, x: f64) -> f64 {
    params.m0() * params.eta() * params.alpha() * sech_squared(params.alpha() * x)
}

/// Lorentz vector potential built from a mass value and its slope,
/// `V = (i/2) M'/M`.
pub fn vector_potential_from_mass(mass: f64, slope: f64) -> Complex64 {
    Complex64::new(0.0, 0.5 * slope / mass)
}

/// `V(x) = (i/2) alpha eta sech²(alpha x) / (1 + eta tanh(alpha x))`.
///
/// Purely imaginary for real `x`. Errors instead of returning infinity when
/// the denominator underflows, which only happens for `|eta| = 1` far out on
/// the vanishing side.
pub fn vector_potential(params: &PhysicalParams, x: f64) -> Result<Complex64, AnalyticError> {
    if params.eta() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let y = params.alpha() * x;
    let denom = one_plus_eta_tanh(params.eta(), y);
    if denom == 0.0 {
        return Err(AnalyticError::DegenerateMass(x));
    }
    let im = 0.5 * params.alpha() * params.eta() * sech_squared(y) / denom;
    Ok(Complex64::new(0.0, im))
}

/// `V_eff(x) = M(x)²`.
pub fn effective_potential(params: &PhysicalParams, x: f64) -> f64 {
    let m = mass_profile(params, x);
    m * m
}

/// Rosen-Morse expansion of `M(x)²`:
/// `M0²(1+eta²) + 2 eta M0² tanh(alpha x) - eta² M0² sech²(alpha x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RosenMorseTerms {
    pub constant: f64,
    pub tanh_term: f64,
    pub sech2_term: f64,
}

impl RosenMorseTerms {
    pub fn sum(&self) -> f64 {
        self.constant + self.tanh_term + self.sech2_term
    }
}

pub fn rosen_morse_terms(params: &PhysicalParams, x: f64) -> RosenMorseTerms {
    let m0_sq = params.m0() * params.m0();
    let eta = params.eta();
    let y = params.alpha() * x;
    RosenMorseTerms {
        constant: m0_sq * (1.0 + eta * eta),
        tanh_term: 2.0 * eta * m0_sq * y.tanh(),
        sech2_term: -eta * eta * m0_sq * sech_squared(y),
    }
}

/// One row of the potential table: `(x, M, V, V_eff)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSample {
    pub x: f64,
    pub mass: f64,
    pub vector_potential: Complex64,
    pub v_eff: f64,
}

pub fn potential_sample(params: &PhysicalParams, x: f64) -> Result<PotentialSample, AnalyticError> {
    let mass = mass_profile(params, x);
    Ok(PotentialSample {
        x,
        mass,
        vector_potential: vector_potential(params, x)?,
        v_eff: mass * mass,
    })
}

/// Level shift `δ₁ = ½(1 − √(1 + 4η²/Λ²))`, evaluated in the conjugate form
/// `−2η² / (Λ (Λ + √(Λ² + 4η²)))`. Always `≤ 0`, zero iff `η = 0`.
pub fn delta1(params: &DimensionlessParams) -> Result<f64, AnalyticError> {
    let (eta, lambda) = (params.eta(), params.lambda());
    if lambda == 0.0 {
        return Err(AnalyticError::LambdaZero);
    }
    let root = lambda.hypot(2.0 * eta);
    Ok(-2.0 * eta * eta / (lambda * (lambda + root)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LevelClass {
    Real,
    Imaginary,
    ZeroThreshold,
    Undefined,
}

impl LevelClass {
    pub fn from_e_squared(e_squared: f64, band: f64) -> Self {
        if e_squared > band {
            LevelClass::Real
        } else if e_squared < -band {
            LevelClass::Imaginary
        } else {
            LevelClass::ZeroThreshold
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LevelClass::Real => "Real",
            LevelClass::Imaginary => "Imaginary",
            LevelClass::ZeroThreshold => "ZeroThreshold",
            LevelClass::Undefined => "Undefined",
        }
    }
}

/// One analytic level. The `±` branches share `energy_magnitude`; the
/// classification says whether they sit on the real or imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub n: u32,
    pub delta1: f64,
    /// Radicand of the level formula in absolute units (`M0²`); `None` on a pole.
    pub e_squared: Option<f64>,
    pub classification: LevelClass,
    pub energy_magnitude: Option<f64>,
}

impl SpectrumEntry {
    /// `[+E, −E]`, with `E = i·|E|` for imaginary levels.
    pub fn energies(&self) -> Option<[Complex64; 2]> {
        let mag = self.energy_magnitude?;
        let e = match self.classification {
            LevelClass::Imaginary => Complex64::new(0.0, mag),
            LevelClass::Undefined => return None,
            _ => Complex64::new(mag, 0.0),
        };
        Some([e, -e])
    }
}

/// Radicand of level `n` in units of `M0²`, given `Λ(n + δ₁)`.
fn reduced_radicand(eta: f64, scaled_level: f64) -> f64 {
    let eta_sq = eta * eta;
    let w_sq = scaled_level * scaled_level;
    (1.0 + eta_sq) - eta_sq / w_sq - w_sq
}

pub fn level_energy(
    params: &DimensionlessParams,
    m0: f64,
    n: u32,
) -> Result<SpectrumEntry, AnalyticError> {
    level_energy_with(params, m0, n, &NumericPolicy::default())
}

/// Level `n` of `E² = M0²(1+η²) − η²M0⁴/(α²(n+δ₁)²) − α²(n+δ₁)²`.
pub fn level_energy_with(
    params: &DimensionlessParams,
    m0: f64,
    n: u32,
    policy: &NumericPolicy,
) -> Result<SpectrumEntry, AnalyticError> {
    if params.eta() == 0.0 {
        return Err(AnalyticError::EtaZeroDegenerate);
    }
    let d1 = delta1(params)?;
    let shifted = n as f64 + d1;
    if shifted.abs() <= policy.abs_tol {
        return Err(AnalyticError::LevelAtPole(n));
    }
    let m0_sq = m0 * m0;
    let e_squared = m0_sq * reduced_radicand(params.eta(), params.lambda() * shifted);
    Ok(SpectrumEntry {
        n,
        delta1: d1,
        e_squared: Some(e_squared),
        classification: LevelClass::from_e_squared(e_squared, policy.abs_tol * m0_sq),
        energy_magnitude: Some(e_squared.abs().sqrt()),
    })
}

pub fn classify_levels(
    params: &DimensionlessParams,
    m0: f64,
    n_max: u32,
) -> Result<Vec<SpectrumEntry>, AnalyticError> {
    classify_levels_with(params, m0, n_max, &NumericPolicy::default())
}

/// Levels `0..=n_max`. Pole levels become `Undefined` entries rather than
/// aborting the scan.
pub fn classify_levels_with(
    params: &DimensionlessParams,
    m0: f64,
    n_max: u32,
    policy: &NumericPolicy,
) -> Result<Vec<SpectrumEntry>, AnalyticError> {
    (0..=n_max)
        .map(|n| match level_energy_with(params, m0, n, policy) {
            Err(AnalyticError::LevelAtPole(n)) => Ok(SpectrumEntry {
                n,
                delta1: delta1(params)?,
                e_squared: None,
                classification: LevelClass::Undefined,
                energy_magnitude: None,
            }),
            other => other,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate_physical;
    use proptest::prelude::*;

    fn p(m0: f64, eta: f64, alpha: f64) -> PhysicalParams {
        validate_physical(m0, eta, alpha).unwrap()
    }

    fn d(eta: f64, lambda: f64) -> DimensionlessParams {
        DimensionlessParams::new(eta, lambda).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn mass_profile_examples() {
        let params = p(1.0, 0.5, 1.0);
        assert_eq!(mass_profile(&params, 0.0), 1.0);
        assert_eq!(mass_profile(&params, 50.0), 1.5);
        // 40-digit reference
        assert!(close(
            mass_profile(&params, 1.0),
            1.380_797_077_977_882_4,
            1e-15
        ));
    }

    #[test]
    fn mass_stays_positive_at_boundary_eta() {
        let params = p(1.0, -1.0, 1.0);
        let m = mass_profile(&params, 30.0);
        assert!(m > 0.0 && m < 1e-25, "m = {m}");
        assert!(mass_profile(&params, 400.0) == 0.0);
    }

    #[test]
    fn vector_potential_examples() {
        let v = vector_potential(&p(1.0, 0.5, 2.0), 0.0).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.5));
        let v = vector_potential(&p(1.0, 0.0, 1.0), 3.0).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        let params = p(1.0, 0.5, 1.0);
        let v = vector_potential(&params, 1.0).unwrap();
        assert_eq!(v.re, 0.0);
        assert!(close(v.im, 0.076_038_389_042_121_29, 1e-14));
        let via_mass =
            vector_potential_from_mass(mass_profile(&params, 1.0), mass_derivative(&params, 1.0));
        assert!(close(v.im, via_mass.im, 1e-14));
    }

    #[test]
    fn vector_potential_degenerate_mass_is_an_error() {
        let params = p(1.0, -1.0, 1.0);
        assert_eq!(
            vector_potential(&params, 400.0),
            Err(AnalyticError::DegenerateMass(400.0))
        );
        // far but representable: sech²/(1 - tanh) = 1 + tanh → 2 as x → ∞
        let v = vector_potential(&params, 30.0).unwrap();
        assert!(close(v.im, -1.0, 1e-12), "{v}");
    }

    #[test]
    fn effective_potential_examples() {
        let params = p(1.0, 0.5, 1.0);
        assert_eq!(effective_potential(&params, 0.0), 1.0);
        let terms = rosen_morse_terms(&params, 0.0);
        assert_eq!(
            (terms.constant, terms.tanh_term, terms.sech2_term),
            (1.25, 0.0, -0.25)
        );
        assert!(close(
            effective_potential(&params, 1.0),
            1.906_600_570_552_258_4,
            1e-15
        ));
        let flat = p(2.0, 0.0, 1.0);
        for x in [-3.0, 0.0, 7.0] {
            assert_eq!(effective_potential(&flat, x), 4.0);
        }
    }

    #[test]
    fn sech_squared_handles_overflow() {
        assert_eq!(sech_squared(0.0), 1.0);
        assert_eq!(sech_squared(800.0), 0.0);
        assert_eq!(sech_squared(-800.0), 0.0);
        assert!(sech_squared(700.0) >= 0.0);
    }

    #[test]
    fn delta1_examples() {
        assert_eq!(delta1(&d(0.0, 1.0)).unwrap(), 0.0);
        let half_root3 = 3f64.sqrt() / 2.0;
        assert!(close(delta1(&d(half_root3, 1.0)).unwrap(), -0.5, 1e-15));
        assert!(close(
            delta1(&d(0.5, 1.0)).unwrap(),
            -0.207_106_781_186_547_52,
            1e-15
        ));
        assert_eq!(delta1(&d(0.5, 0.0)), Err(AnalyticError::LambdaZero));
    }

    #[test]
    fn level_energy_examples() {
        let e = level_energy(&d(0.5, 1.0), 1.0, 0).unwrap();
        assert_eq!(e.classification, LevelClass::Imaginary);
        assert!(close(e.e_squared.unwrap(), -4.621_320_343_559_643, 1e-13));
        assert!(close(
            e.energy_magnitude.unwrap(),
            2.149_725_643_787_979_4,
            1e-13
        ));
        let [plus, minus] = e.energies().unwrap();
        assert_eq!(plus.re, 0.0);
        assert_eq!(minus, -plus);

        let e = level_energy(&d(3f64.sqrt() / 2.0, 1.0), 1.0, 0).unwrap();
        assert!((e.delta1 + 0.5).abs() <= 1e-15);
        assert!((e.e_squared.unwrap() + 1.5).abs() <= 1e-12);

        assert_eq!(
            level_energy(&d(0.0, 1.0), 1.0, 0),
            Err(AnalyticError::EtaZeroDegenerate)
        );
    }

    #[test]
    fn level_energy_scales_with_m0_squared() {
        let e1 = level_energy(&d(0.5, 1.0), 1.0, 0).unwrap();
        let e3 = level_energy(&d(0.5, 1.0), 3.0, 0).unwrap();
        assert!(close(
            e3.e_squared.unwrap(),
            9.0 * e1.e_squared.unwrap(),
            1e-14
        ));
    }

    #[test]
    fn first_excited_level_radicand() {
        // reported, not asserted as physics: n + δ₁ > 0 here
        let e = level_energy(&d(0.5, 1.0), 1.0, 1).unwrap();
        assert_eq!(e.classification, LevelClass::Real);
        assert!(close(e.e_squared.unwrap(), 0.223_661_540_003_753_38, 1e-13));
    }

    #[test]
    fn classify_levels_examples() {
        let levels = classify_levels(&d(0.5, 1.0), 1.0, 3).unwrap();
        assert_eq!(levels.len(), 4);
        assert_eq!(levels[0].classification, LevelClass::Imaginary);
        assert!(close(
            levels[0].e_squared.unwrap(),
            -4.621_320_343_559_643,
            1e-13
        ));
        assert_eq!(classify_levels(&d(0.5, 1.0), 1.0, 0).unwrap().len(), 1);

        // δ₁ = ½(1 − √401) ≈ −9.5125: n = 9, 10 straddle the pole without hitting it
        let levels = classify_levels(&d(1.0, 0.1), 1.0, 20).unwrap();
        assert_eq!(levels.len(), 21);
        assert!(close(levels[0].delta1, -9.512_492_197_250_393, 1e-14));
        assert!(levels
            .iter()
            .all(|l| l.classification != LevelClass::Undefined));

        assert_eq!(
            classify_levels(&d(0.0, 1.0), 1.0, 3),
            Err(AnalyticError::EtaZeroDegenerate)
        );
    }

    #[test]
    fn pole_levels_become_undefined_in_scans() {
        // δ₁ = −1 exactly when 4η²/Λ² = 8, i.e. η = 1, Λ = 1/√2
        let params = d(1.0, std::f64::consts::FRAC_1_SQRT_2);
        assert!(matches!(
            level_energy(&params, 1.0, 1),
            Err(AnalyticError::LevelAtPole(1))
        ));
        let levels = classify_levels(&params, 1.0, 3).unwrap();
        assert_eq!(levels[1].classification, LevelClass::Undefined);
        assert_eq!(levels[1].e_squared, None);
        assert!(levels[1].energies().is_none());
        assert_ne!(levels[2].classification, LevelClass::Undefined);
    }

    #[test]
    fn zero_threshold_band() {
        assert_eq!(
            LevelClass::from_e_squared(5e-13, 1e-12),
            LevelClass::ZeroThreshold
        );
        assert_eq!(
            LevelClass::from_e_squared(-5e-13, 1e-12),
            LevelClass::ZeroThreshold
        );
        assert_eq!(LevelClass::from_e_squared(2e-12, 1e-12), LevelClass::Real);
    }

    proptest! {
        #[test]
        fn parity_of_profile(eta in -1.0f64..=1.0, x in -50.0f64..50.0, alpha in 0.01f64..10.0) {
            let a = p(1.0, eta, alpha);
            let b = a.mirrored();
            prop_assert_eq!(mass_profile(&a, x), mass_profile(&b, -x));
            prop_assert_eq!(effective_potential(&a, x), effective_potential(&b, -x));
        }

        #[test]
        fn mass_bounds(eta in -1.0f64..=1.0, x in -100.0f64..100.0, m0 in 0.1f64..10.0) {
            let params = p(m0, eta, 1.0);
            let m = mass_profile(&params, x);
            prop_assert!(m >= m0 * (1.0 - eta.abs()) * (1.0 - 1e-15));
            prop_assert!(m <= m0 * (1.0 + eta.abs()) * (1.0 + 1e-15));
        }

        #[test]
        fn log_derivative_route_matches(eta in -1.0f64..=1.0, x in -30.0f64..30.0, alpha in 0.1f64..5.0) {
            let params = p(1.3, eta, alpha);
            let direct = vector_potential(&params, x).unwrap();
            let via = vector_potential_from_mass(mass_profile(&params, x), mass_derivative(&params, x));
            prop_assert_eq!(direct.re, 0.0);
            prop_assert!((direct.im - via.im).abs() <= 1e-10 * via.im.abs().max(1e-300));
        }

        #[test]
        fn rosen_morse_decomposition(eta in -1.0f64..=1.0, x in -40.0f64..40.0, m0 in 0.1f64..10.0) {
            let params = p(m0, eta, 0.7);
            let v = effective_potential(&params, x);
            let sum = rosen_morse_terms(&params, x).sum();
            prop_assert!((v - sum).abs() <= 1e-10 * v.max(m0 * m0));
        }

        #[test]
        fn delta1_monotone_in_eta(a in 1e-3f64..1.0, b in 1e-3f64..1.0, lambda in 1e-3f64..10.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            let dl = delta1(&d(lo, lambda)).unwrap();
            let dh = delta1(&d(-hi, lambda)).unwrap();
            prop_assert!(dl <= 0.0 && dh < dl);
        }
    }
}
