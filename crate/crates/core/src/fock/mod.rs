//! The S-symmetric Fock space: cocycle tensors, the projector `P_n`, the
//! Zamolodchikov-Faddeev normal-ordering engine and grid-sampled states.

pub mod perm;
pub mod projector;
pub mod fields;
pub mod grid;
pub mod zf;

pub use perm::{cocycle_tensor, Perm};
pub use projector::{project_pn, OrbitSpace};
pub use zf::{StateSum, WordState, ZfEngine, ZfExpr};
