//! Exact density-matrix simulation of the swapping and purification
//! circuits on at most four qubits. Every closed-form map in
//! [`crate::werner`] is checked against these circuits.

mod channels;
mod circuits;
mod state;

pub use channels::{apply_one_qubit_noisy, apply_two_qubit_noisy, gates, measure_noisy, MeasurementBranch};
pub use circuits::{
    epp_circuit, epp_oracle, es_circuit, es_oracle, EsConvention, PurifyOutcome, SwapBranch, SwapOutcome,
};
pub use state::{fidelity_to_bell, werner_state, BellKind, DensityMatrix, Invariants, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
