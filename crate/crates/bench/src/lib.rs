//! Shared setup for the criterion benches.

use std::path::PathBuf;

use twisted_core::{parse_model_file, LoadedModel};

/// Loads a model from the workspace `fixtures/` directory.
pub fn fixture(name: &str) -> LoadedModel {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    parse_model_file(&p).unwrap_or_else(|e| panic!("{name}: {e}"))
}
