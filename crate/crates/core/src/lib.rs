//! Numerical laboratory for the vanishing-dissipation limit of one-dimensional
//! compressible flow toward a rarefaction-contact-rarefaction Riemann solution.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod gas;
pub mod harness;
pub mod kinetic;
pub mod ns;
pub mod numerics;
pub mod profiles;
pub mod riemann;

pub use error::{Error, FailedFamily, Result};
pub use gas::{Family, GasParams, ThermoState};
pub use riemann::{eval_riemann, rarefaction_u, solve_pattern, WavePattern};
pub use cli::cli_main;
