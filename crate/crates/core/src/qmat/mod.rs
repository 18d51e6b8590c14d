//! 2×2 Hermitian linear algebra and single-qubit state functionals.
//!
//! Basis convention throughout the crate: index 0 is `|g⟩ = |0⟩`, index 1 is
//! `|e⟩ = |1⟩`.

mod functionals;
mod matrix;
mod state;

pub use functionals::{
    affinity, fidelity, log_state, relative_entropies, state_functionals, von_neumann_entropy,
    FloorPolicy, RelativeEntropies, StateFunctionals, LOG_FLOOR,
};
pub use matrix::{
    eig_hermitian, matrix_function, schatten_norms, singular_values, Ket, Matrix2, ScalarMap,
    SchattenNorms, SpectralDecomposition, DEGENERATE_GAP, HERMITIAN_TOL, SPECTRAL_ZERO,
};
pub use state::{QubitState, STATE_TOL};
