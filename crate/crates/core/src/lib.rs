//! Transmitting a full reference frame (an orthogonal trihedron) through
//! N elementary spins.
//!
//! The crate computes the optimal encoding state and covariant
//! measurement, the achievable average frame error, finite measurement
//! constructions with certified completeness, and a Monte-Carlo
//! simulation of the whole channel. The representation kernel (coupling
//! coefficients, rotation matrices, group quadrature) is built in with a
//! locked sign convention, since every downstream formula depends on it.

pub mod error;
pub mod euler;
pub mod fidelity;
pub mod halfint;
pub mod legendre;
pub mod povm;
pub mod quadrature;
pub mod sim;
pub mod states;
pub mod tridiag;
pub mod verify;
pub mod wigner;

pub use error::{CoreError, Result};
pub use euler::{compose, haar_sample, inverse, EulerAngles};
pub use fidelity::{
    asymptotic_fit, avg_t_general, avg_t_reduced, bounds, build_m_b, build_m_op,
    build_m_op_ladder, m_tensor, optimal_protocol, optimal_signal_state, ProtocolSolution,
};
pub use halfint::HalfInt;
pub use povm::{
    build_finite_povm, build_isotropic_set, check_completeness, check_discrete_orthogonality,
    minimal_povm_n2, CompletenessReport, FinitePovm, PovmFile,
};
pub use quadrature::{su2_quadrature_grid, GroupGrid};
pub use sim::{
    avg_t_quadrature, error_h, outcome_probs, overlap, simulate, simulate_with_guess,
    GuessStrategy, SimResult,
};
pub use states::{ladder, time_reverse, IrrepBlock, ReducedWeights, ReferenceState, SignalState};
pub use tridiag::{max_eigen, TridiagSym};
pub use wigner::{clebsch_gordan, trace_rep1, wigner_big_d, wigner_small_d};
