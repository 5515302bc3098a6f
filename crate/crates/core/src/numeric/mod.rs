//! Dense complex linear algebra.

mod eigen;
mod matrix;
mod random;
mod vector;

pub use eigen::{hermitian_eigensystem, unitary_from_hamiltonian, Eigensystem};
pub use matrix::{tensor_product, ComplexMatrix};
pub use random::{
    complex_gaussian, random_hermitian_with, random_unit_vector_with, random_unitary, random_unitary_with,
    seeded_rng,
};
pub use vector::ComplexVector;
