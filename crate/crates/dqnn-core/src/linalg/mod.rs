//! Dense complex linear algebra and qubit-register utilities.
//!
//! Everything is double-precision and heap-allocated; dimensions stay small
//! (at most `2^8`). Qubit registers follow one convention throughout the
//! crate: qubit 1 is the most significant bit of the basis index, so
//! `|b1 b2 .. bn>` maps to index `sum_i b_i * 2^(n-i)`.

mod eig;
mod embed;
mod matrix;
mod random;
mod state;

pub use eig::{hermitian_eig, psd_sqrt};
pub use embed::embed_on_qubits;
pub use matrix::{kron, pauli_x, pauli_y, pauli_z, ComplexMatrix, C_I, C_ONE, C_ZERO};
pub use random::{haar_pure_state, haar_unitary};
pub use state::{partial_trace, DensityMatrix, PureState};

pub(crate) use state::partial_trace_raw;
