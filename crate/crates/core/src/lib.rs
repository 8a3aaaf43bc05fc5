//! Classification of canonical and terminal fake weighted projective spaces,
//! reconstruction of their lattice simplices, and Fine interiors.

pub mod abgroup;
pub mod chart;
pub mod classify;
pub mod degmat;
pub mod error;
pub mod exec;
pub mod fine;
pub mod polytope;
pub mod rat;
pub mod singtest;

pub use error::{Error, Result};
pub use exec::Execution;
