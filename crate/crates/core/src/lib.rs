//! Exact construction of irregular cut-and-project windows over a quadratic
//! irrational rotation, and the dynamical diagnostics run on their model sets.

pub mod arith;
pub mod birkhoff;
pub mod cantor;
pub mod certificate;
pub mod cli;
pub mod complexity;
pub mod cps;
pub mod error;
pub mod independence;
pub mod interval;
pub mod measure;
pub mod pseudolines;
pub mod returns;
pub mod window;

pub use arith::{OrbitNumber, Rotation};
pub use error::{Error, Result};
pub use interval::IntervalSet;
