//! Numerical laboratory for the fractional gradient/divergence calculus:
//! nonlocal operators on sampled fields with direct-quadrature and
//! spectral backends, fractional-variation analytics, sharp 1D examples,
//! and the (alpha,2)-capacity obstacle solver.
//!
//! Everything numeric is generic over [`Scalar`] (f32 or f64); the
//! concrete `*64`/`*32` aliases below are the convenient entry points.

pub mod constants;
pub mod error;
pub mod grid;
pub mod measure;
pub mod ops;
pub mod quad;
pub mod scalar;
pub mod smoothing;

pub use error::{FracError, Result};
pub use scalar::Scalar;

pub use constants::FracConstants;
pub use grid::{pair, DecayClass, Grid, GridField, Rank};
pub use measure::{pair_measure, translate_measure, Atom, SignedMeasure};
pub use ops::{
    dcal_alpha, frac_divergence, frac_gradient, frac_laplacian, maximal_function, nl_divergence,
    nl_gradient, riesz_potential, riesz_transform, spectral_compose, BackendSpec, DirectSpec,
    OperatorResult, SpectralEngine, SpectralSpec, Symbol, ZeroModePolicy,
};
pub use smoothing::{apply_cutoff, mollify, CutoffShape, CutoffSpec, MollifierSpec};

/// Double-precision aliases (the default working types).
pub type Grid64 = Grid<f64>;
pub type GridField64 = GridField<f64>;
pub type SignedMeasure64 = SignedMeasure<f64>;
pub type FracConstants64 = FracConstants<f64>;
pub type BackendSpec64 = BackendSpec<f64>;
pub type OperatorResult64 = OperatorResult<f64>;

/// Single-precision aliases.
pub type Grid32 = Grid<f32>;
pub type GridField32 = GridField<f32>;
pub type SignedMeasure32 = SignedMeasure<f32>;
pub type FracConstants32 = FracConstants<f32>;
