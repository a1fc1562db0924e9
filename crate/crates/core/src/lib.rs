//! Classical simulation of many-body quantum dynamics with a
//! Clifford-augmented matrix product state: `|ψ⟩ = C ·|mps⟩` with `C` a
//! stabilizer tableau and the residual state a truncated tensor network.
//!
//! Clifford gates — however many — land in the tableau and never grow the
//! tensor network. A non-Clifford phase gate is pushed through the tableau
//! and contracted into the MPS as a bond-2 operator; a greedy sweep over the
//! 20 entanglement-distinct two-qubit Cliffords then tries to rotate the
//! created entanglement back out.
//!
//! # Example
//!
//! ```
//! use camps_core::{CampsState, Mps64, PhaseGateSpec, SiteState};
//! use camps_core::experiments::stream_rng;
//! use camps_core::magic::sre2_camps;
//!
//! let n = 6;
//! let mps = Mps64::product_state(&vec![SiteState::zero(); n], 64, 1e-12).unwrap();
//! let mut state = CampsState::new(mps);
//!
//! // A deep random Clifford layer costs no bond dimension at all...
//! let mut rng = stream_rng(42, 0, 1);
//! state.apply_random_clifford_layer(&mut rng).unwrap();
//! assert_eq!(state.mps().max_bond_dim(), 1);
//!
//! // ...and one absorbed T-gate is disentangled back to a product state
//! // carrying exactly one magic state's worth of stabilizer entropy.
//! let report = state
//!     .apply_phase_gate(&PhaseGateSpec::t_gate(0), true)
//!     .unwrap()
//!     .unwrap();
//! assert!(report.ee_after < 1e-10);
//! let magic = sre2_camps(&state).unwrap().value;
//! assert!((magic - 0.4150375).abs() < 1e-6);
//! ```

pub mod analytics;
pub mod camps;
pub mod dense;
pub mod dynamics;
pub mod experiments;
mod linalg;
pub mod magic;
pub mod mpo;
pub mod mps;
pub mod pauli;
pub mod records;
pub mod scalar;
pub mod tableau;
pub mod two_qubit_clifford;

pub use camps::{CampsState, DisentangleReport, PhaseGateSpec};
pub use magic::{sre2_camps, sre2_exact, sre2_product, SreMethod, SreResult};
pub use mpo::Mpo;
pub use mps::{Mps, SiteState};
pub use pauli::{PauliAxis, PauliString};
pub use records::TrajectoryRecord;
pub use scalar::{Cplx, Real};
pub use tableau::{CliffordTableau, Direction, Gate};
pub use two_qubit_clifford::{two_qubit_cliffords, TwoQubitCliffordId};

/// Concrete-precision aliases; the tensor kernels are generic over [`Real`].
pub type Mps64 = Mps<f64>;
pub type Mpo64 = Mpo<f64>;
pub type Camps64 = CampsState<f64>;
pub type Mps32 = Mps<f32>;
pub type Mpo32 = Mpo<f32>;
pub type Camps32 = CampsState<f32>;
