use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{checked_prime_power, gcd, is_prime, pow_mod};

/// The monomial map `psi_n(x) = x^n` restricted to the sphere `S_{p^{-l}}(1)`.
///
/// Requires an odd prime and a unit exponent `n >= 2`; for non-units the
/// sphere is not invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialSystem {
    p: u64,
    n: u64,
    l: u32,
}

impl MonomialSystem {
    pub fn new(p: u64, n: u64, l: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if p == 2 {
            return Err(Error::domain(
                "the minimality criterion requires an odd prime p; \
                 for p = 2 the unit groups G_{2^l} are noncyclic once l >= 3",
            ));
        }
        if n < 2 {
            return Err(Error::domain(format!("exponent n = {n} must be at least 2")));
        }
        if gcd(n, p) != 1 {
            return Err(Error::domain(format!(
                "n = {n} is not a multiplicative unit mod {p}; the spheres around 1 are not invariant"
            )));
        }
        if l == 0 {
            return Err(Error::usage("sphere level l must be at least 1"));
        }
        Ok(MonomialSystem { p, n, l })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `p^{l+k}`, the modulus that resolves depth-`k` balls.
    pub fn modulus(&self, depth: u32) -> Result<u64> {
        checked_prime_power(self.p, self.l + depth)
    }

    /// One application of the map on residues mod `modulus`.
    #[inline]
    pub fn apply(&self, x: u64, modulus: u64) -> u64 {
        pow_mod(x, self.n, modulus)
    }
}
