//! Littlewood-Paley projections, fractional derivatives, maximal and Riesz
//! operators, weighted annulus norm scales and commutators on sampled
//! periodic grids, plus a harness that turns commutator and embedding
//! estimates into reproducible numerical sweeps.

pub mod cli;
pub mod commutator;
pub mod error;
pub mod field_io;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod realspace;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use grid::{forward_transform, inverse_transform, quadrature_integral, GridSpec, SampledField, SpectralField};
pub use spectral::{build_cutoff, fractional_derivative, BandIndex, CutoffProfile, LittlewoodPaley};
