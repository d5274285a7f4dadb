//! Exact synthesis of small Clifford+T unitaries.
//!
//! Unitaries are matrices over Z[1/√2, i] ([`ring`], [`matrix`]). Circuits are
//! lists of depth-one layers ([`gates`]). Databases of minimal circuits for
//! each equivalence class ([`canon`], [`db`]) are intersected with the target
//! by a meet-in-the-middle search ([`search`]). [`phasepoly`] rewrites
//! {CNOT, T} circuits into T-parallel form with ancillas.

pub mod canon;
pub mod db;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod phasepoly;
pub mod ring;
pub mod search;
pub mod targets;
pub mod text;

pub use error::{Error, Result};
pub use gates::{Circuit, Gate, GateSet, Layer};
pub use matrix::RingMatrix;
pub use ring::{OmegaInt, RingScalar};
