//! Exact verification kit for finite-dimensional (super) quasi-Hopf algebras.
//!
//! Scalars live in Q(ζ₂₄) ([`cyclo`]); algebra and tensor arithmetic with
//! Koszul signs is in [`tensor`]; the axiom suite is in [`qhopf`].

pub mod cyclo;
pub mod deffile;
pub mod graded;
pub mod linalg;
pub mod qhopf;
pub mod salg;
pub mod solver;
pub mod tensor;
pub mod transport;
pub mod uqsl2;

pub use cyclo::CycNum;
pub use tensor::{Elem, SuperAlgebra, TensorElem};
