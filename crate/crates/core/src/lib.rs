//! Truncated-jet toolkit for normal-form ambient metrics, conformal tractor
//! calculus and pointwise G₂ criteria for generic 2-plane fields.

pub mod ambient;
pub mod error;
pub mod g2;
pub mod geometries;
pub mod jet;
pub mod linalg;
pub mod parallel_ext;
pub mod poly;
pub mod scalar;
pub mod tensors;
pub mod tractor;

pub use error::{Error, Result};
pub use jet::{Jet, JetSpace};
pub use scalar::{q, QSqrt3, Scalar, Q};
