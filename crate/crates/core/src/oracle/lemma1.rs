use rayon::prelude::*;
use serde_json::json;

use super::naive::{is_prime, pow_by_repetition, power, valuation};
use super::{Certificate, OracleCaps};
use crate::error::{Error, Result};

#[derive(Default)]
struct Tally {
    pairs: u64,
    equal: u64,
    strict: u64,
    violations: u64,
    witness: Option<(u64, u64, Option<u32>, Option<u32>)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.pairs += other.pairs;
        self.equal += other.equal;
        self.strict += other.strict;
        self.violations += other.violations;
        self.witness = self.witness.or(other.witness);
        self
    }
}

/// Certifies `|x^n - y^n|_p <= |n|_p |x - y|_p` for all units `x = y mod p`
/// below `p^K` and `1 <= n <= n_max`, with equality exactly when `p > 2` or
/// `n` is odd; plus `v_p(k!) <= k - 1` (strict for odd `p`).
///
/// Representatives are treated as integers and `x^n - y^n` is reduced mod
/// `p^{K + v_p(n) + 1}`, so every valuation that matters is exact.
pub fn verify_lemma1(p: u64, precision: u32, n_max: u64, caps: &OracleCaps) -> Result<Certificate> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if n_max < 2 || precision == 0 {
        return Err(Error::usage("need n_max >= 2 and K >= 1"));
    }
    if n_max > caps.max_exponent {
        return Err(Error::resource(format!(
            "n_max = {n_max} exceeds the exponent cap {}",
            caps.max_exponent
        )));
    }
    let modulus = caps.check_modulus(p, precision)?;
    let units: Vec<u64> = (1..modulus).filter(|x| x % p != 0).collect();

    let mut ok = true;
    let mut witness = None;
    let mut annotations = Vec::new();
    for n in 1..=n_max {
        let v_n = valuation(u128::from(n), p).expect("n > 0");
        let wide = power(p, precision + v_n + 1)
            .ok_or_else(|| Error::resource("widened modulus overflows u64"))?;
        let powers: Vec<u64> = units
            .par_iter()
            .map(|&x| pow_by_repetition(x, n, wide))
            .collect();
        let equality_required = p != 2 || n % 2 == 1;
        let tally = (0..units.len())
            .into_par_iter()
            .map(|i| {
                let mut t = Tally::default();
                for j in 0..units.len() {
                    let (x, y) = (units[i], units[j]);
                    if x % p != y % p {
                        continue;
                    }
                    t.pairs += 1;
                    let diff = (u128::from(powers[i]) + u128::from(wide) - u128::from(powers[j]))
                        % u128::from(wide);
                    // None stands for "at least p^{K + v(n) + 1}" on the left
                    // and for infinity (x = y) on the right.
                    let lhs = valuation(diff, p);
                    let rhs = valuation(u128::from(x.abs_diff(y)), p).map(|v| v + v_n);
                    let fine = match (lhs, rhs) {
                        (None, None) => {
                            t.equal += 1;
                            true
                        }
                        (Some(a), Some(b)) if a == b => {
                            t.equal += 1;
                            true
                        }
                        (None, Some(_)) => {
                            t.strict += 1;
                            !equality_required
                        }
                        (Some(a), Some(b)) if a > b => {
                            t.strict += 1;
                            !equality_required
                        }
                        _ => false,
                    };
                    if !fine {
                        t.violations += 1;
                        t.witness.get_or_insert((x, y, lhs, rhs));
                    }
                }
                t
            })
            .reduce(Tally::default, Tally::merge);

        // For p = 2 and even n the equality must genuinely fail somewhere,
        // otherwise "exactly when n is odd" would not be witnessed.
        let n_ok = tally.violations == 0 && (equality_required || tally.strict > 0);
        annotations.push(format!(
            "n={n}: {} pairs, equality {}, strict {}, equality required: {}",
            tally.pairs, tally.equal, tally.strict, equality_required
        ));
        if !n_ok && witness.is_none() {
            witness = Some(match tally.witness {
                Some((x, y, lhs, rhs)) => json!({
                    "n": n, "x": x, "y": y,
                    "lhs_valuation": lhs, "rhs_valuation": rhs,
                }),
                None => json!({ "n": n, "reason": "no strict case for even n at p = 2" }),
            });
        }
        ok &= n_ok;
    }

    let k_top = u64::from(precision).max(n_max);
    let mut v_fact = 0u32;
    let mut factorial_ok = true;
    for k in 1..=k_top {
        v_fact += valuation(u128::from(k), p).expect("k > 0");
        if k < 2 {
            continue;
        }
        let bound = (k - 1) as u32;
        let holds = v_fact <= bound && (p == 2 || v_fact < bound);
        if !holds && factorial_ok {
            factorial_ok = false;
            witness.get_or_insert(json!({ "k": k, "factorial_valuation": v_fact }));
        }
    }
    annotations.push(format!(
        "v_{p}(k!) <= k - 1{} for 2 <= k <= {k_top}: {factorial_ok}",
        if p == 2 { "" } else { " strictly" }
    ));
    ok &= factorial_ok;

    Ok(Certificate::new(
        "|x^n - y^n|_p <= |n|_p |x - y|_p on units with |x - y|_p <= 1/p, equality iff p > 2 or n odd",
        json!({ "p": p, "K": precision, "n_max": n_max }),
        ok,
        witness,
        annotations,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        let caps = OracleCaps::default();
        for (p, k, n) in [(3, 4, 9), (2, 5, 4), (5, 3, 6)] {
            let c = verify_lemma1(p, k, n, &caps).unwrap();
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn caps_and_inputs() {
        let caps = OracleCaps::default();
        assert!(matches!(verify_lemma1(4, 3, 4, &caps), Err(Error::Domain(_))));
        assert!(matches!(verify_lemma1(3, 3, 1, &caps), Err(Error::Usage(_))));
        assert!(matches!(verify_lemma1(3, 20, 4, &caps), Err(Error::Resource(_))));
        assert!(matches!(verify_lemma1(3, 3, 65, &caps), Err(Error::Resource(_))));
    }
}
