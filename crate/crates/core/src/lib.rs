pub mod conservation;
pub mod error;
pub mod hilbert;
pub mod numeric;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type C64 = Complex<f64>;
pub type CMatrix = numeric::ComplexMatrix<f64>;
pub type CVector = numeric::ComplexVector<f64>;
pub type State = hilbert::QuantumState<f64>;
pub type Obs = hilbert::Observable<f64>;
pub type Unitary = hilbert::UnitaryOp<f64>;
