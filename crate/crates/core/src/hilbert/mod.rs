//! Labeled tensor-product spaces and the quantum objects that live on them.

mod operator;
mod space;
mod state;

pub use operator::{annihilation, embed, embed_subspace, number_operator, total_observable, Observable, UnitaryOp};
pub use space::{Factor, HilbertSpace};
pub use state::{apply, expectation, QuantumState};
