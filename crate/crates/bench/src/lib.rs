//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use survnet::formulation::{Approach, ProblemInstance, SurvivabilityMode};
use survnet::model::Instance;

/// Path of a bundled instance under `data/`.
pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Loads a bundled instance for one mode and approach.
pub fn problem(name: &str, mode: SurvivabilityMode, approach: Approach) -> ProblemInstance {
    let instance = Instance::load(data_file(name)).expect("bundled instance loads");
    ProblemInstance::from_instance(&instance, mode, approach).expect("bundled instance is valid")
}
