use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::int::{PadicInt, Valuation};
use crate::error::{Error, Result};

/// Default bound on the number of residues a member enumeration may return.
pub const MEMBER_CAP: u64 = 10_000_000;

/// The closed ball `B_{p^{-r}}(center) = { x : |x - center|_p <= p^{-r} }`.
///
/// Membership is congruence mod `p^r`, so every member is a center. The open
/// ball of the same radius is the closed ball of radius `p^{-(r+1)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    center: PadicInt,
    radius_exp: u32,
}

impl Ball {
    pub fn new(center: PadicInt, radius_exp: u32) -> Result<Self> {
        if radius_exp > center.precision() {
            return Err(Error::usage(format!(
                "radius p^-{radius_exp} is finer than precision {}",
                center.precision()
            )));
        }
        Ok(Ball { center, radius_exp })
    }

    /// `B^-_{p^{-r}}(center)`, the open ball of radius `p^{-r}`.
    pub fn open(center: PadicInt, radius_exp: u32) -> Result<Self> {
        Self::new(center, radius_exp + 1)
    }

    pub fn center(&self) -> &PadicInt {
        &self.center
    }

    pub fn radius_exp(&self) -> u32 {
        self.radius_exp
    }

    pub fn contains(&self, x: &PadicInt) -> Result<bool> {
        Ok(x.dist(&self.center)?.lower_bound() >= self.radius_exp)
    }

    /// All residues mod `p^K` in the ball, ascending.
    pub fn members(&self) -> Result<Vec<PadicInt>> {
        let p = self.center.prime();
        let k = self.center.precision();
        let count = count_checked(p, k - self.radius_exp)?;
        let step = BigUint::from(p).pow(self.radius_exp);
        let base = self.center.residue() % &step;
        Ok((0..count)
            .map(|t| self.center.sibling_residue(&(&base + &step * t)))
            .collect())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "B_{{1/{}^{}}}({})",
            self.center.prime(),
            self.radius_exp,
            self.center.residue()
        )
    }
}

/// The sphere `S_{p^{-l}}(center) = { x : |x - center|_p = p^{-l} }`, `l >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereSpec {
    center: PadicInt,
    radius_exp: u32,
}

impl SphereSpec {
    /// The radius must leave at least one digit below it, i.e. `l < K`.
    pub fn new(center: PadicInt, radius_exp: u32) -> Result<Self> {
        if radius_exp == 0 {
            return Err(Error::usage("sphere radius exponent must be at least 1"));
        }
        if radius_exp >= center.precision() {
            return Err(Error::usage(format!(
                "sphere radius p^-{radius_exp} is not resolved at precision {}",
                center.precision()
            )));
        }
        Ok(SphereSpec { center, radius_exp })
    }

    /// `S_{p^{-l}}(1)` at precision `K`.
    pub fn around_one(prime: u64, radius_exp: u32, precision: u32) -> Result<Self> {
        Self::new(PadicInt::one(prime, precision)?, radius_exp)
    }

    pub fn center(&self) -> &PadicInt {
        &self.center
    }

    pub fn radius_exp(&self) -> u32 {
        self.radius_exp
    }

    pub fn contains(&self, x: &PadicInt) -> Result<bool> {
        Ok(x.dist(&self.center)? == Valuation::Finite(self.radius_exp))
    }

    /// All residues mod `p^K` on the sphere, ascending; there are
    /// `(p - 1) p^{K - l - 1}` of them.
    pub fn members(&self) -> Result<Vec<PadicInt>> {
        let p = self.center.prime();
        let k = self.center.precision();
        let l = self.radius_exp;
        let count = count_checked(p, k - l)?;
        let step = BigUint::from(p).pow(l);
        let mut out: Vec<PadicInt> = (0..count)
            .filter(|t| t % p != 0)
            .map(|t| self.center.sibling_residue(&(self.center.residue() + &step * t)))
            .collect();
        out.sort_by_key(PadicInt::residue);
        Ok(out)
    }
}

impl fmt::Display for SphereSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S_{{1/{}^{}}}({})",
            self.center.prime(),
            self.radius_exp,
            self.center.residue()
        )
    }
}

fn count_checked(p: u64, e: u32) -> Result<u64> {
    BigUint::from(p)
        .pow(e)
        .to_u64()
        .filter(|&c| c <= MEMBER_CAP)
        .ok_or_else(|| Error::resource(format!("{p}^{e} residues exceed the member cap")))
}

/// Serializable label of a ball: its least-residue center and radius exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallLabel {
    pub center: u64,
    pub radius_exp: u32,
    pub prime: u64,
}

impl fmt::Display for BallLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prime.checked_pow(self.radius_exp) {
            Some(r) => write!(f, "B_{{1/{r}}}({})", self.center),
            None => write!(f, "B_{{1/{}^{}}}({})", self.prime, self.radius_exp, self.center),
        }
    }
}
