//! Fixed-precision arithmetic in `Z_p`, truncated to `Z/p^K`, together with
//! the ultrametric geometry of balls and spheres.

mod ball;
mod int;

pub use ball::{Ball, BallLabel, SphereSpec, MEMBER_CAP};
pub use int::{PadicInt, Valuation};
