//! Stabilizer toolkit for extracting GHZ states from linear cluster states.
//!
//! The crate is layered bottom-up:
//!
//! - [`pauli`]: packed binary-symplectic Pauli operators with exact phases.
//! - [`tableau`]: stabilizer/destabilizer tableau, Cliffords, Pauli
//!   measurements, discarding measured qubits, cut ranks.
//! - [`states`]: linear, ring, GHZ and rotated cluster constructors.
//! - [`planner`]: island decompositions, feasibility, size bounds, enumeration
//!   and measurement-pattern synthesis.
//! - [`extractor`]: executes plans, synthesizes local corrections, verifies
//!   the result, and hosts the exhaustive feasibility oracle.
//! - [`fidelity`]: two-setting sampling under Pauli noise and the fidelity
//!   lower-bound estimators.

pub mod extractor;
pub mod fidelity;
pub mod pauli;
pub mod planner;
pub mod rng;
pub mod states;
pub mod tableau;

pub use extractor::{
    brute_force_feasibility, brute_force_witness, extract, extract_in_frame, extract_with,
    is_ghz_class, run_extraction, synthesize_corrections, CorrectionSet, ExtractOptions, Extraction,
    ExtractionReport, ExtractorError, MeasurementRecord, Outcomes,
};
pub use fidelity::{
    estimate_cluster_bound, estimate_ghz_bound, estimate_no_identity_variant, sample_setting,
    ClusterExperiment, EstimatorOptions, Family, FidelityError, FidelityReport, GhzExperiment,
    NoiseModel, Setting, ShotTable,
};
pub use pauli::{Pauli, PauliError, PauliOperator, Phase};
pub use planner::{
    decompose_islands, enumerate_feasible, gap_bases, is_feasible, max_ghz_size, maximal_pattern,
    synthesize_pattern, ExtractionPlan, Island, IslandDecomposition, PlannerError, Verdict,
};
pub use states::{
    ghz, make_ghz, make_linear_cluster, make_rotated_cluster, GhzSpec, LinearClusterSpec,
    StatesError,
};
pub use tableau::{
    states_equal, Gate, IndexMap, Measurement, Outcome, OutcomeSampler, OutcomeSource,
    SignedPauli, SingleQubitClifford, StabilizerState, TableauError,
};
