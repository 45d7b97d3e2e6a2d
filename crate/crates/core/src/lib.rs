//! Rate-region toolkit for the two-receiver broadcast channel with one-sided
//! receiver side information and a passive eavesdropper.
//!
//! The crate is organised bottom-up:
//!
//! * [`probability`]: finite joint distributions and information measures.
//! * [`channel`]: the broadcast channel kernel `p(y1, y2, z | x)` and its
//!   structural checks (determinism, physical degradedness).
//! * [`polyhedral`]: exact rational linear systems, Fourier-Motzkin
//!   elimination and redundancy pruning.
//! * [`region`]: planar rate regions: half-plane intersection, star-shaped
//!   unions, containment and Hausdorff distance.
//! * [`theorems`]: the achievable region per auxiliary cascade, the layered
//!   constraint system it is derived from, and the closed-form capacity
//!   regions for deterministic degraded channels.
//! * [`sim`]: a Monte-Carlo implementation of the layered secrecy code.

pub mod channel;
pub mod lp;
pub mod polyhedral;
pub mod probability;
pub mod region;
pub mod sim;
pub mod theorems;

pub use channel::{BroadcastChannel, DegradednessOrder, Output};
pub use polyhedral::{LinIneq, LinSystem, Relation};
pub use probability::{ConditionalPmf, JointPmf, Pmf};
pub use region::{HalfPlane, RatePoint, RateRegion2D};
pub use theorems::{AuxiliaryCascade, Theorem1Terms};
