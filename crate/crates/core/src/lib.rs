//! Budgeted maximization of nonmonotone submodular functions under
//! routing costs (tours and multicast trees).

pub mod baselines;
mod error;
pub mod harness;
pub mod objectives;
pub mod optimizer;
pub mod routing;
pub mod set;
pub mod verification;

pub use error::{Error, Result};
