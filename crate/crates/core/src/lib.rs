//! Laguerre functions, bigraded harmonics on `C^n`, exact Weyl-operator
//! identities, twisted-convolution numerics and spectral expansions.

pub mod error;
pub mod exact;
pub mod harmonics;
pub mod laguerre;
pub mod poly;
pub mod par;
pub mod quadrature;
pub mod spectral;
pub mod twisted;
pub mod weyl;

pub use error::{Error, Result};
