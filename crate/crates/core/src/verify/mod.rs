//! Failure simulation, disjointness checks and a brute-force oracle.

mod brute;
mod checks;
mod failures;
mod restorability;

pub use brute::{brute_force_optimum, prefer, BruteEngine, OracleResult, MAX_LSPS, MAX_NODES};
pub use checks::{check_consistency, check_disjointness, DisjointnessRule, DisjointnessViolation};
pub use failures::{enumerate_failures, FailureScenario};
pub use restorability::{check_restorability, contention_violations, Contention, RestorabilityReport, ScenarioRecord};
