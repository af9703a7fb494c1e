//! Constructive certificates for the Pythagorean identity of partitioned
//! matrices, `|A|^2 = sum_k U_k |A_k|^2 U_k*`, together with the singular
//! value, Schatten norm, hyperplane compression and functional-calculus
//! inequalities that follow from it.
//!
//! Every existence statement is realised by an explicit list of isometries
//! (or unitaries) whose defining identity or Loewner inequality has been
//! checked numerically before it is returned.

pub mod functional;
pub mod inequalities;
pub mod io;
pub mod linalg;
pub mod partition;
pub mod pythagoras;
pub mod random;
pub mod scalar_fn;
pub mod search;
pub mod tol;

mod error;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use partition::{BlockSpec, Partition, PartitionedMatrix};
pub use scalar_fn::ScalarFunction;
