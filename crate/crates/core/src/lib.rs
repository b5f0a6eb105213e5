//! Extremal Chebyshev–Markov fractions on unions of intervals.
//!
//! The crate builds the harmonic-measure densities of `C \ E` for a finite
//! union of real intervals `E`, assembles the cosine fraction
//! `m_n = cos(γ_n)` whose phase `γ_n` integrates those densities, and uses it
//! to evaluate sharp pointwise and uniform bounds for derivatives of
//! fractions `p_n / sqrt(ρ)` that are bounded by one on `E`.
//!
//! Module map:
//!
//! - [`interval_system`]: the set `E`, its gaps and the endpoint polynomial `H`.
//! - [`numerics`]: arcsine-weight quadrature, bracketed roots, maximization.
//! - [`harmonic_measure`]: densities, band measures and a finite-difference oracle.
//! - [`extremal_fraction`]: quantization, `γ_n`, `m_n`, bound profile, Markov constant.
//! - [`rational_class`]: members of the admissible class and the star subclass.
//! - [`verify`]: inequality checks, counterexample reproductions and batches.
//! - [`cli`]: the `chebmark` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extremal_fraction;
pub mod harmonic_measure;
pub mod interval_system;
pub mod numerics;
pub mod rational_class;
pub mod verify;

pub use error::{Error, Result};
pub use extremal_fraction::{
    build_extremal, markov_constant, quantization_check, ExtremalFraction, MarkovConstant, PoleConfiguration,
    QuantizationSignature,
};
pub use harmonic_measure::{
    band_measures, combined_density, equilibrium_density, laplace_fd_band_measures, laplace_fd_oracle,
    pole_density, BandMeasureVector, DensityEvaluator, PolePoint,
};
pub use interval_system::IntervalSystem;
pub use numerics::QuadratureSpec;
pub use rational_class::{sample_star, RationalFraction, StarMembershipReport};
pub use verify::{batch_verify, BatchConfig, Fixture, VerificationReport};
