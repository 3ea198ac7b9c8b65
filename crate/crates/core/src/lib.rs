//! Indicator-type functions with spectrum in a prescribed gapped set and
//! uniformly bounded partial Fourier sums, built on finite abelian groups.
//!
//! The crate is generic over the real scalar type; `f64` aliases are
//! exported at the root, `f32` ones under [`single`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construction;
pub mod error;
pub mod group;
pub mod kernels;
pub mod scalar;
pub mod set;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use set::{ElementSet, IndexSet, SpectrumSet};

pub type Group = group::Group<f64>;
pub type GroupFunction = group::GroupFunction<f64>;
pub type SpectralFunction = group::SpectralFunction<f64>;
pub type FejerSystem = kernels::FejerSystem<f64>;
pub type Partition = kernels::Partition<f64>;
pub type Schedules = construction::Schedules<f64>;
pub type ConstructionState = construction::ConstructionState<f64>;
pub type CorrectionResult = construction::CorrectionResult<f64>;
pub type BoundedCorrection = construction::BoundedCorrection<f64>;

/// Single-precision aliases.
pub mod single {
    pub type Group = crate::group::Group<f32>;
    pub type GroupFunction = crate::group::GroupFunction<f32>;
    pub type SpectralFunction = crate::group::SpectralFunction<f32>;
    pub type FejerSystem = crate::kernels::FejerSystem<f32>;
    pub type Partition = crate::kernels::Partition<f32>;
    pub type Schedules = crate::construction::Schedules<f32>;
    pub type ConstructionState = crate::construction::ConstructionState<f32>;
    pub type CorrectionResult = crate::construction::CorrectionResult<f32>;
}
