//! Isochronicity of the origin for `H = xy + H_{n+1}(x, y)` and the numerical
//! topology behind it: critical points, behavior at infinity, vanishing cycles,
//! periods and monodromy.

pub mod cycles;
pub mod error;
pub mod hamiltonian;
pub mod infinity;
pub mod poly;

pub use error::{Error, Result};
pub use hamiltonian::HomogeneousHamiltonianSystem;
