//! The monomial maps `x -> x^n` on spheres around 1, their finite-depth
//! permutations, and the reports built on them.

mod birkhoff;
mod isometry;
mod partition;
mod permutation;
mod perturbation;
mod product;
mod system;
mod verdict;

use num_rational::Ratio;
use serde::Serializer;

pub use birkhoff::{birkhoff_average, orbit, space_average, BirkhoffAverage, TestFunction};
pub use isometry::{
    isometry_scaling_check, ScalingCounterexample, ScalingReport, MAX_LISTED_COUNTEREXAMPLES,
};
pub use partition::{
    induced_permutation, sphere_partition, BallPartition, PermutationAction, PARTITION_CAP,
};
pub use permutation::Permutation;
pub use perturbation::{
    explore_boundary_perturbation, perturbed_analysis, BoundaryObservations, CongruenceReport,
    Discrepancy, InvarianceLevel, NecessaryCondition, PerturbationReport, PerturbedLevel,
    PerturbedSystem, Polynomial, MAX_LISTED_DISCREPANCIES,
};
pub use product::{product_nonmixing_report, LogRatioInvariance, ProductReport, F_INVARIANCE_MAX_BALLS};
pub use system::MonomialSystem;
pub use verdict::{
    conjugated_verdict, fixed_points, haar_ball_measure, minimality_verdict, Evidence,
    LevelEvidence, Verdict, DEFAULT_K_MAX,
};

/// Writes an exact rational as `"a/b"` (or `"a"` when integral).
pub(crate) fn serialize_ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}
