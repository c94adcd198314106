//! Regular stochastic block models: sampling, spectral and self-avoiding-walk
//! recovery, majority dynamics, and exhaustive oracles for small instances.

pub mod error;
pub mod graph;
pub mod graphgen;
pub mod io;
pub mod model;
pub mod recovery;
pub mod rigidity;
pub mod saw;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, Labeling};
pub use graphgen::{sample_instance, sample_lift, sample_rsbm, PlantedInstance, SamplerKind};
pub use model::{DerivedQuantities, RsbmParams};
pub use recovery::{majority_iterate, majority_step, overlap, spectral_recover, RecoveryMethod, RecoveryResult};
pub use spectral::EigenOptions;
