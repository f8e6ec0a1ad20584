//! Exact desk-scale computations around the Iwasawa algebra of the group
//! Z_p ⋊ Z_p: truncated skew power-series arithmetic, sizes of double
//! coinvariant quotients of finitely presented modules together with their
//! growth bounds, and the closed-form determinants of the associated orbit
//! matrices verified by three independent routes.

pub mod coinvariants;
pub mod error;
pub mod orbit;
pub mod padic;
pub mod rng;
pub mod selftest;
pub mod skew;

pub use error::{Error, Result};
pub use padic::{ModularInt, Valuation};
pub use skew::{GammaCoordinates, SkewElement, SkewVar, TruncationBox};
