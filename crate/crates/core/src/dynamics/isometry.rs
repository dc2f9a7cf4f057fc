use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::checked_prime_power;
use crate::padic::{PadicInt, Valuation};

/// Most counterexamples kept in a report.
pub const MAX_LISTED_COUNTEREXAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingCounterexample {
    pub x: u64,
    pub y: u64,
    /// `v(x^n - y^n)`.
    pub lhs: Valuation,
    /// `v(n) + v(x - y)`, capped at the precision.
    pub rhs: Valuation,
}

/// Result of comparing `|x^n - y^n|_p` with `|n|_p |x - y|_p` over all unit
/// pairs `x = y mod p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingReport {
    pub p: u64,
    pub n: u64,
    pub precision: u32,
    pub pairs_checked: u64,
    /// Equality is required for odd `p`, and for `p = 2` with `n` odd.
    pub equality_required: bool,
    pub equality_cases: u64,
    pub strict_cases: u64,
    pub counterexample_count: u64,
    pub counterexamples: Vec<ScalingCounterexample>,
    pub passed: bool,
}

/// Exhaustive check of `|x^n - y^n|_p <= |n|_p |x - y|_p` mod `p^K`.
///
/// Valuations are those of [`PadicInt`], so both sides saturate at `K`.
pub fn isometry_scaling_check(p: u64, n: u64, precision: u32) -> Result<ScalingReport> {
    if precision < 2 {
        return Err(Error::usage("precision must be at least 2"));
    }
    if n == 0 {
        return Err(Error::usage("exponent must be positive"));
    }
    let modulus = checked_prime_power(p, precision)?;
    let equality_required = p != 2 || n % 2 == 1;
    let v_n = PadicInt::from_integer(n as i128, p, precision)?.valuation();

    let units: Vec<PadicInt> = (1..modulus)
        .filter(|x| x % p != 0)
        .map(|x| PadicInt::from_integer(x as i128, p, precision))
        .collect::<Result<_>>()?;
    let powers: Vec<PadicInt> = units.par_iter().map(|x| x.pow_u64(n)).collect();

    struct Tally {
        pairs: u64,
        equal: u64,
        strict: u64,
        bad: u64,
        listed: Vec<ScalingCounterexample>,
    }
    let tallies: Vec<Tally> = (0..units.len())
        .into_par_iter()
        .map(|i| {
            let mut t = Tally {
                pairs: 0,
                equal: 0,
                strict: 0,
                bad: 0,
                listed: Vec::new(),
            };
            for j in 0..units.len() {
                let d = &units[i] - &units[j];
                if d.valuation() < Valuation::Finite(1) {
                    continue;
                }
                t.pairs += 1;
                let lhs = (&powers[i] - &powers[j]).valuation();
                let rhs = v_n.saturating_add(d.valuation(), precision);
                let ok = if lhs == rhs {
                    t.equal += 1;
                    true
                } else if lhs > rhs {
                    t.strict += 1;
                    !equality_required
                } else {
                    false
                };
                if !ok {
                    t.bad += 1;
                    if t.listed.len() < MAX_LISTED_COUNTEREXAMPLES {
                        t.listed.push(ScalingCounterexample {
                            x: units[i].residue_u64().expect("word-size modulus"),
                            y: units[j].residue_u64().expect("word-size modulus"),
                            lhs,
                            rhs,
                        });
                    }
                }
            }
            t
        })
        .collect();

    let mut report = ScalingReport {
        p,
        n,
        precision,
        pairs_checked: 0,
        equality_required,
        equality_cases: 0,
        strict_cases: 0,
        counterexample_count: 0,
        counterexamples: Vec::new(),
        passed: false,
    };
    for t in tallies {
        report.pairs_checked += t.pairs;
        report.equality_cases += t.equal;
        report.strict_cases += t.strict;
        report.counterexample_count += t.bad;
        for c in t.listed {
            if report.counterexamples.len() < MAX_LISTED_COUNTEREXAMPLES {
                report.counterexamples.push(c);
            }
        }
    }
    report.passed = report.counterexample_count == 0;
    Ok(report)
}
