use rayon::prelude::*;
use serde_json::json;

use super::naive::{is_prime, valuation};
use super::{Certificate, OracleCaps};
use crate::analysis::{padic_exp, padic_log};
use crate::error::{Error, Result};
use crate::padic::PadicInt;

/// Distance exponent of two residues mod `p^K`, capped at `K`.
fn capped_distance(a: u64, b: u64, p: u64, precision: u32) -> u32 {
    valuation(u128::from(a.abs_diff(b)), p).map_or(precision, |v| v.min(precision))
}

/// Certifies that `log` preserves distances on `1 + pZ_p` mod `p^K` and that
/// `exp(log x) = x` there. Distances are recomputed from plain residues.
pub fn verify_log_isometry(p: u64, precision: u32, caps: &OracleCaps) -> Result<Certificate> {
    if p == 2 || !is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    if precision < 2 {
        return Err(Error::usage("precision must be at least 2"));
    }
    let modulus = caps.check_modulus(p, precision)?;
    let points: Vec<u64> = (1..modulus).step_by(p as usize).collect();
    let logs: Vec<(u64, bool)> = points
        .par_iter()
        .map(|&x| {
            let px = PadicInt::from_integer(i128::from(x), p, precision)?;
            let lx = padic_log(&px)?;
            let round_trip = padic_exp(&lx)? == px;
            Ok((lx.residue_u64().expect("word-size modulus"), round_trip))
        })
        .collect::<Result<_>>()?;

    let round_trip_failures: Vec<u64> = points
        .iter()
        .zip(&logs)
        .filter(|(_, (_, rt))| !rt)
        .map(|(&x, _)| x)
        .collect();

    let (pairs, mismatch) = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut first = None;
            for j in i + 1..points.len() {
                let d = capped_distance(points[i], points[j], p, precision);
                let dl = capped_distance(logs[i].0, logs[j].0, p, precision);
                if d != dl && first.is_none() {
                    first = Some((points[i], points[j], d, dl));
                }
            }
            ((points.len() - i - 1) as u64, first)
        })
        .reduce(|| (0, None), |a, b| (a.0 + b.0, a.1.or(b.1)));

    let ok = mismatch.is_none() && round_trip_failures.is_empty();
    let witness = match (mismatch, round_trip_failures.first()) {
        (Some((x1, x2, d, dl)), _) => Some(json!({
            "x1": x1, "x2": x2, "distance_exponent": d, "log_distance_exponent": dl,
        })),
        (None, Some(x)) => Some(json!({ "exp_log_round_trip_failed_at": x })),
        (None, None) => None,
    };
    Ok(Certificate::new(
        "log is an isometry on 1 + pZ_p and exp inverts it",
        json!({ "p": p, "K": precision }),
        ok,
        witness,
        vec![
            format!("{} points, {pairs} pairs", points.len()),
            format!("exp(log x) = x failures: {}", round_trip_failures.len()),
        ],
    ))
}
