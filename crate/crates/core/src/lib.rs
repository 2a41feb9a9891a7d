//! Nonperturbative qubit channel between two delta-coupled Unruh-DeWitt
//! detectors and its classical capacity.
//!
//! Alice and Bob each couple a qubit detector to a massless scalar field at a
//! single instant of their proper time. The field enters the induced channel
//! only through five scalars ([`FieldStatistics`]): Bob's coherence damping
//! `nu_b`, the companion damping factors `nu_a`, `nu_ab_plus`, `nu_ab_minus`,
//! and the smeared commutator `delta_ab` between the two smearings.
//!
//! The crate is layered bottom-up:
//!
//! - [`field`]: smeared correlators for inertial Gaussian detectors in
//!   Minkowski space (closed forms plus quadrature oracles, vacuum and
//!   thermal).
//! - [`gamma`]: the Weyl-algebra coefficients that weight the channel's three
//!   terms.
//! - [`channel`]: the channel itself, output eigenvalues, Choi matrix.
//! - [`capacity`]: entropies, Holevo quantity, closed-form capacity and a
//!   brute-force ensemble search used as an optimality oracle.
//! - [`sweep`] and [`selftest`]: configuration, parameter sweeps and the
//!   invariant suite behind the `udw` command-line tool.
//!
//! Everything is dimensionless: the Gaussian width `sigma` of the detectors'
//! spatial profile is the unit of length and time.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channel;
pub mod error;
pub mod field;
pub mod gamma;
pub mod qubit;
pub mod quadrature;
pub mod selftest;
pub mod sweep;

pub use capacity::{
    binary_entropy, capacity_bruteforce, capacity_closed_form, holevo_chi, tune_bob_phase,
    von_neumann_entropy, CapacityResult, Ensemble, OptimizerConfig,
};
pub use channel::{ChannelOutput, ChannelParams, DeltaChannel};
pub use error::{Error, Result};
pub use field::{
    assemble_statistics, FieldBackend, FieldState, FieldStatistics, MinkowskiBackend,
    PairGeometry, SmearingSpec,
};
pub use gamma::{gammas_from_statistics, CombinedCoefficients, GammaSet};
pub use qubit::QubitState;

/// Complex scalar used throughout.
pub type Complex64 = nalgebra::Complex<f64>;
