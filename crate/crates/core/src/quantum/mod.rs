//! Exact dense simulation of small qubit registers.

mod ensemble;
mod hamiltonian;
mod matrix;
mod state;

pub use ensemble::{EigenCoefficients, FactoredState, RealEigenBasis};
pub use hamiltonian::{build_ising_hamiltonian, propagator, HermitianOperator, IsingSpec};
pub use matrix::{ComplexMatrix, C64};
pub(crate) use state::check_angles;
pub use state::{
    encode_input, evolve, partial_trace_first, pauli_z_expectations, product_amplitudes, tensor,
    DensityMatrix, HERMITIAN_TOL, PSD_SLACK, TRACE_TOL,
};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;
