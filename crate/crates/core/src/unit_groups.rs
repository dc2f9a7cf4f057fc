//! The unit groups `G_{p^l} = (Z/p^l)^*`: element orders, generator tests,
//! the cyclic subgroup `<n>`, and the level-lifting behaviour of generators.
//!
//! For odd `p` the group is cyclic of order `p^{l-1}(p-1)`, and a unit
//! generates every `G_{p^l}` with `l >= 2` exactly when it generates
//! `G_{p^2}`. For `p = 2` and `l >= 3` the group is not cyclic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{checked_prime_power, gcd, is_prime, mul_mod, pow_mod, prime_factors};

/// Default bound on how many residues [`generated_set`] may materialize.
pub const GENERATED_SET_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitGroupReport {
    pub p: u64,
    pub level: u32,
    pub group_order: u64,
    pub element: u64,
    pub element_order: u64,
    pub is_generator: bool,
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{p} is not prime")))
    }
}

fn require_unit(n: u64, p: u64) -> Result<()> {
    if gcd(n, p) != 1 {
        return Err(Error::domain(format!(
            "n = {n} is not a unit: gcd({n}, {p}) != 1"
        )));
    }
    Ok(())
}

/// `|G_{p^l}| = p^{l-1}(p-1)`.
pub fn group_order(p: u64, l: u32) -> Result<u64> {
    if l == 0 {
        return Err(Error::usage("level must be at least 1"));
    }
    Ok(checked_prime_power(p, l - 1)? * (p - 1))
}

/// Least `N >= 1` with `n^N = 1 (mod p^l)`.
///
/// Starts from the group order and strips prime factors while the power
/// stays trivial; the factorization of `p - 1` is by trial division.
pub fn multiplicative_order(n: u64, p: u64, l: u32) -> Result<u64> {
    require_prime(p)?;
    require_unit(n, p)?;
    let m = checked_prime_power(p, l.max(1))?;
    let mut order = group_order(p, l)?;
    let mut factors = prime_factors(p - 1);
    if l > 1 && !factors.contains(&p) {
        factors.push(p);
    }
    for q in factors {
        while order % q == 0 && pow_mod(n, order / q, m) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

pub fn unit_group_report(n: u64, p: u64, l: u32) -> Result<UnitGroupReport> {
    let group_order = group_order(p, l)?;
    let element_order = multiplicative_order(n, p, l)?;
    Ok(UnitGroupReport {
        p,
        level: l,
        group_order,
        element: n,
        element_order,
        is_generator: element_order == group_order,
    })
}

/// Whether `n` generates `G_{p^2}`, the master criterion for minimality.
pub fn is_generator_g_p2(n: u64, p: u64) -> Result<bool> {
    if p == 2 {
        return Err(Error::domain(
            "the generator criterion needs an odd prime; G_{2^l} is noncyclic for l >= 3",
        ));
    }
    Ok(multiplicative_order(n, p, 2)? == p * (p - 1))
}

/// `<n> = {n, n^2, ..., 1}` modulo `modulus`, in generation order.
pub fn generated_set(n: u64, modulus: u64) -> Result<Vec<u64>> {
    generated_set_capped(n, modulus, GENERATED_SET_CAP)
}

pub fn generated_set_capped(n: u64, modulus: u64, cap: u64) -> Result<Vec<u64>> {
    if modulus == 0 {
        return Err(Error::usage("modulus must be positive"));
    }
    if gcd(n, modulus) != 1 {
        return Err(Error::domain(format!(
            "{n} is not a unit modulo {modulus}"
        )));
    }
    if modulus > cap {
        return Err(Error::resource(format!(
            "modulus {modulus} exceeds the generated-set cap {cap}"
        )));
    }
    let one = 1 % modulus;
    let mut out = Vec::new();
    let mut x = n % modulus;
    loop {
        out.push(x);
        if x == one {
            return Ok(out);
        }
        x = mul_mod(x, n, modulus);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub n: u64,
    pub p: u64,
    pub levels: Vec<UnitGroupReport>,
    pub generator_at_level_two: bool,
    /// Generator status at level two equals generator status at every level
    /// up to `l_max`.
    pub consistent: bool,
}

/// Checks that `n` generates `G_{p^2}` iff it generates every `G_{p^l}`,
/// `2 <= l <= l_max`. Level one is reported for context only.
pub fn lemma_generation_oracle(n: u64, p: u64, l_max: u32) -> Result<GenerationReport> {
    if p == 2 {
        return Err(Error::domain("generation across levels is stated for odd p"));
    }
    if l_max < 2 {
        return Err(Error::usage("l_max must be at least 2"));
    }
    let levels = (1..=l_max)
        .map(|l| unit_group_report(n, p, l))
        .collect::<Result<Vec<_>>>()?;
    let at_two = levels[1].is_generator;
    let consistent = levels[1..].iter().all(|r| r.is_generator == at_two);
    Ok(GenerationReport {
        n,
        p,
        levels,
        generator_at_level_two: at_two,
        consistent,
    })
}

/// `true` when no unit mod `2^l` has order `2^{l-1}`, by exhaustion over the
/// odd residues.
pub fn noncyclic_2adic_check(l: u32) -> Result<bool> {
    if l < 3 {
        return Err(Error::usage(format!(
            "G_{{2^{l}}} is cyclic; the check starts at l = 3"
        )));
    }
    let m = checked_prime_power(2, l)?;
    let full = m / 2;
    for x in (1..m).step_by(2) {
        if multiplicative_order(x, 2, l)? == full {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite-precision density of `<n>` in `S_1(0)`: `<n>` covers every unit
/// mod `p^k`.
///
/// For `k >= 2` the answer is cross-checked against [`is_generator_g_p2`];
/// a disagreement is an integrity error.
pub fn density_check(n: u64, p: u64, k: u32) -> Result<bool> {
    if p == 2 {
        return Err(Error::domain("density of <n> is stated for odd p"));
    }
    require_prime(p)?;
    require_unit(n, p)?;
    let m = checked_prime_power(p, k.max(1))?;
    let covered = generated_set(n, m)?.len() as u64 == group_order(p, k)?;
    if k >= 2 && covered != is_generator_g_p2(n, p)? {
        return Err(Error::integrity(format!(
            "<{n}> mod {p}^{k} coverage disagrees with the G_{{p^2}} generator test"
        )));
    }
    Ok(covered)
}
