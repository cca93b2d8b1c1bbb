//! Quantized Landau-Zener dynamics: a qubit with a linearly swept splitting
//! coupled to a single quantized field mode.
//!
//! * [`lzrwa`] solves the rotating-wave model exactly, sector by sector,
//!   with confluent hypergeometric propagators from [`cfun`].
//! * [`lzfull`] integrates the full (counter-rotating) model numerically
//!   after a parity transform that decouples the qubit branches.
//! * [`oracle`] holds brute-force solvers used to check both.

pub mod cfun;
pub mod error;
pub mod lzfull;
pub mod lzrwa;
pub mod ode;
pub mod oracle;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use state::{FockSpec, JointState, Qubit};
