//! Hessian (Fisher-Rao) geometry of the Gibbs set of a rotating ideal gas
//! confined to a ball, and of its rigid-body limit.

// `!(x > 0.0)` is used on purpose so that NaN is rejected; tensor code indexes
// several arrays with one loop variable.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod covderiv;
pub mod curvature;
pub mod cumulants;
pub mod error;
pub mod jet;
pub mod model;
pub mod partition;
pub mod poisson;
pub mod rigidbody;
pub mod quad;
pub mod special;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
