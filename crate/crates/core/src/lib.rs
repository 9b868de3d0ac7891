//! Simulation of two-atom entanglement prepared by dissipative Rydberg
//! pumping.
//!
//! [`models`] assembles Hamiltonians and jump operators of the two-qubit
//! (singlet/triplet) scheme and the qutrit scheme, [`dynamics`] builds the
//! Liouvillian and integrates or solves the master equation, and
//! [`measures`] evaluates fidelity, CHSH correlation and negativity.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod models;
pub mod presets;

pub use dynamics::{
    build_liouvillian, evolve, evolve_reduced, steady_state, EvolveOptions, Liouvillian, Method, SteadyBackend,
    SteadyOptions, SteadyState, Trajectory,
};
pub use error::{Error, Result};
pub use linalg::{BipartiteDims, ComplexMatrix, StateVector, C64};
pub use measures::{chsh_correlation, fidelity, negativity, populations, ObservableChsh};
pub use models::{
    build_bell_model, build_model, build_qutrit_model, InitialState, LabParams, Microwave, ModelParams, Scheme,
    SchemeVariant, SystemModel, Target,
};
pub use presets::{preset, preset_by_name, Preset, PresetId};
