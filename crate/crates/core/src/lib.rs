//! Cluster ensembles and the Nielsen-Thurston classification of elements of
//! cluster modular groups.

pub mod catalog;
pub mod classify;
pub mod doc;
pub mod error;
pub mod explorer;
pub mod fixed_point;
pub mod nonneg;
pub mod positive;
pub mod scalar;
pub mod seed;
pub mod surface;
pub mod tropical;
pub mod word;

pub use error::{ClusterError, Result};
pub use positive::{Flavor, PositivePoint};
pub use seed::{Quiver, Seed, SeedIso};
pub use word::{MappingClassWord, Step};

/// Positive point with exact rational coordinates.
pub type ExactPoint = PositivePoint<num_rational::BigRational>;
/// Positive point in binary64.
pub type FloatPoint = PositivePoint<f64>;
/// Positive point stored by logarithms.
pub type LogPoint = PositivePoint<scalar::LogReal>;
