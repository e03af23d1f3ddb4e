//! Dense complex linear algebra and quantum-state primitives.
//!
//! Everything downstream (Hamiltonians, propagators, channels, tomography)
//! is built on the types here: [`ComplexMatrix`], [`StateVector`],
//! [`DensityMatrix`], [`KrausChannel`], and the Pauli-basis helpers.

mod channel;
mod eig;
mod matrix;
mod pauli;
mod state;

pub use channel::{make_channel, ChannelKind, KrausChannel};
pub use eig::{eig_hermitian, evolve_unitary};
pub use matrix::{kron, ComplexMatrix};
pub use pauli::{
    pauli_expectations, pauli_label, pauli_string_matrix, reconstruct_from_pauli, sigma_i,
    sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z, PauliVector,
};
pub use state::{partial_trace, DensityMatrix, StateVector};
