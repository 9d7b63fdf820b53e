//! Verification toolkit for a Dirac particle with the step-shaped
//! position-dependent mass `M(x) = M0 (1 + η tanh αx)`.
//!
//! The mass induces the imaginary Lorentz vector potential
//! `V(x) = (i/2) M'(x)/M(x)` and maps the Dirac problem onto the real
//! Schrödinger-like equation `−φ'' + M(x)² φ = E² φ`, a Rosen-Morse problem
//! with closed-form levels. This crate
//!
//! * evaluates those closed forms and classifies each level as real or
//!   imaginary ([`analytic`]);
//! * certifies the sign of the ground-level feasibility function
//!   `f(η, Λ)`, `Λ = α/M0`, over the physical box ([`feasibility`]);
//! * cross-checks with a finite-difference eigen-solver that no real bound
//!   state exists ([`solver`], built on [`tridiagonal`]).
//!
//! ```
//! use pdm_dirac::feasibility::{f_direct, f_factored, sign_certificate, SignVerdict};
//!
//! let f = f_factored(0.5, 1.0).unwrap();
//! assert!((f - f_direct(0.5, 1.0).unwrap()).abs() < 1e-12);
//! assert_eq!(sign_certificate(0.5, 1.0).unwrap(), SignVerdict::Negative);
//! ```

pub mod analytic;
pub mod feasibility;
pub mod params;
pub mod solver;
pub mod tridiagonal;

pub use params::{
    reduce, validate_physical, DimensionlessParams, GridShape, NumericPolicy, ParamError,
    PhysicalParams, Range,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/mass-profile.md")]
    mod mass_profile {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/feasibility.md")]
    mod feasibility {}
    #[doc = include_str!("../../../book/src/numeric-solver.md")]
    mod numeric_solver {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
