pub mod applications;
pub mod connection_builder;
pub mod free_objects;
pub mod graded_core;
pub mod homology_engine;
pub mod homotopy_structures;
pub mod hopf;
pub mod linalg;
pub mod model_io;
#[cfg(test)]
pub(crate) mod test_fixtures;
pub mod twisted_builders;
pub mod twisting;

pub use applications::{AppError, BundleModel, ManifoldModel};
pub use free_objects::{TruncationPolicy, Word};
pub use graded_core::{GradedMap, GradedSpace, Lin, Sign, Q};
pub use homology_engine::{ChainComplex, HomologyResult, ProductTable};
pub use homotopy_structures::{
    DefectReport, FiniteFamily, Pairing, StructureFamily, StructureKind,
};
pub use hopf::HopfAlgebra;
pub use model_io::{parse_model_file, LoadedModel, ModelError, ModelFile};
pub use twisted_builders::{ActionKind, TensorKey, TwistedAlgebra, TwistedCoalgebra};
pub use twisting::{TargetKind, TwistingCochain};
