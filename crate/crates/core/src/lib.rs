//! Pulse synthesis and verification for deterministic W <-> GHZ conversion of
//! three Rydberg-blockaded atoms.
//!
//! The pipeline runs: generators ([`algebra`]) -> closed-form exponential map
//! ([`unitary`]) -> curve-to-Hamiltonian map and constraints ([`dynamics`]) ->
//! endpoint search, curves and Rabi schedules ([`synthesis`]) -> Schrodinger
//! integration and fidelities ([`propagate`]). [`fullmodel`] checks the
//! four-level reduction against the full eight-level dynamics.

pub mod algebra;
pub mod checks;
pub mod dynamics;
pub mod error;
pub mod fullmodel;
pub mod linalg;
pub mod propagate;
pub mod roots;
pub mod schedule;
pub mod synthesis;
pub mod unitary;

pub use algebra::{
    build_generators, casimirs, expand_state, ghz_state, pseudospin_basis, w_state, GeneratorSet,
    PseudospinBasis,
};
pub use dynamics::{
    check_constraints, effective_hamiltonian, rabi_from_vectorial, vectorial_rabi, CurveSample,
    RabiTriple, VectorialRabi,
};
pub use error::{Error, Result};
pub use linalg::{Mat4, Mat8, State4, State8, C64};
pub use propagate::{
    extract_ghz_phase, ghz_fidelity, normalize_to_area, propagate, squared_area, PropagationResult,
};
pub use schedule::{PulseSchedule, ScheduleMetadata, ScheduleSample};
pub use synthesis::{
    build_curve, enumerate_endpoints, rabi_schedule, reverse_schedule, solve_endpoints,
    EndpointSolution, InitialPoint, ProfileKind, PulseProfile, Signs, SolveOptions, SphericalCurve,
};
pub use unitary::{
    exp_map, m_coefficients, transformed_pseudospin_states, MCoefficients, RotationVectorPair, Vec3,
};
