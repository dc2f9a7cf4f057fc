//! Fixed-precision p-adic integers and the dynamics of monomial maps
//! `x -> x^n` on the spheres `S_{p^{-l}}(1)`.
//!
//! The crate decides minimality, unique ergodicity and ergodicity of these
//! systems through the generator criterion on `G_{p^2}`, and re-derives each
//! verdict from the permutation the map induces on ball partitions of the
//! sphere. [`oracle`] holds independent brute-force certificates.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod modarith;
pub mod oracle;
pub mod padic;
pub mod unit_groups;

pub use error::{Error, Result};
pub use padic::{Ball, PadicInt, SphereSpec, Valuation};
