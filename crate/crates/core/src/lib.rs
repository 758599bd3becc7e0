//! Green functions, Green energies and certified energy lower bounds on the
//! compact harmonic manifolds `S^n`, `RP^n`, `CP^n`, `HP^n` and `OP^2`.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod bounds;
pub mod energy;
pub mod error;
pub mod green;
pub mod manifold;
pub mod output;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use green::RadialGreenProfile;
pub use manifold::{Family, ManifoldSpec, Point, RngSeed};
pub use special::QuadratureSettings;
