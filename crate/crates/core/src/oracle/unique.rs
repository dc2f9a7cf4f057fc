use std::collections::HashMap;

use serde_json::json;

use super::linear::{invariant_probability_vectors, render};
use super::naive::{is_prime, order, pow_by_squaring, power};
use super::{Certificate, OracleCaps};
use crate::error::{Error, Result};

/// The depth-`k` ball permutation, rebuilt from a residue table.
fn naive_permutation(p: u64, n: u64, l: u32, k: u32) -> Result<Vec<usize>> {
    let step = power(p, l).expect("checked against the cap");
    let modulus = power(p, l + k).expect("checked against the cap");
    let reps: Vec<u64> = (1..modulus / step)
        .filter(|t| t % p != 0)
        .map(|t| 1 + t * step)
        .collect();
    let index: HashMap<u64, usize> = reps.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    reps.iter()
        .map(|&c| {
            let image = pow_by_squaring(c, n, modulus);
            index
                .get(&image)
                .copied()
                .ok_or_else(|| Error::integrity(format!("{c}^{n} = {image} left the sphere")))
        })
        .collect()
}

/// Solves for every invariant probability vector on the depth-`k` balls and
/// certifies: unique and uniform when `n` generates `G_{p^2}`, otherwise a
/// non-uniform invariant probability vector exists (and is the witness).
///
/// At `k = 1` the partition cannot tell a generator from a primitive root
/// mod `p`, so uniqueness is expected exactly for primitive roots there.
pub fn verify_unique_invariance(
    p: u64,
    n: u64,
    l: u32,
    k: u32,
    caps: &OracleCaps,
) -> Result<Certificate> {
    if p == 2 || !is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    if n % p == 0 || n < 2 {
        return Err(Error::domain(format!("n = {n} is not a unit exponent >= 2")));
    }
    if l == 0 || k == 0 {
        return Err(Error::usage("l and k must be positive"));
    }
    caps.check_modulus(p, l + k)?;

    let sigma = naive_permutation(p, n, l, k)?;
    let solution = invariant_probability_vectors(&sigma)?;
    let generator = order(n, p * p) == p * (p - 1);
    // The p - 1 depth-1 balls only see whether n is a primitive root mod p.
    let transitive_expected = if k == 1 { order(n, p) == p - 1 } else { generator };
    let balls = sigma.len();

    let (ok, witness, note) = if transitive_expected {
        let ok = solution.dimension == 0 && solution.is_uniform() && solution.is_probability_vector();
        let note = format!(
            "{}: unique invariant vector, uniform with mass {} per ball",
            if generator { "minimal" } else { "not minimal, but transitive at depth 1" },
            render(&solution.particular[..1])[0]
        );
        (ok, None, note)
    } else {
        let ok = solution.dimension > 0
            && !solution.is_uniform()
            && solution.is_probability_vector();
        let note = format!(
            "not minimal: invariant probability vectors form a {}-parameter family, \
             spanned by {} independent invariant measures",
            solution.dimension,
            solution.dimension + 1
        );
        (ok, Some(json!({ "non_uniform_invariant_vector": render(&solution.particular) })), note)
    };

    Ok(Certificate::new(
        "Haar measure is the only invariant probability vector on the ball partition iff the system is minimal",
        json!({ "p": p, "n": n, "l": l, "k": k, "balls": balls }),
        ok,
        witness,
        vec![note, format!("solution space dimension {}", solution.dimension)],
    ))
}
