use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::partition::induced_permutation;
use super::system::MonomialSystem;
use crate::analysis::padic_log;
use crate::error::Result;
use crate::padic::PadicInt;

/// Largest ball count for which the log-ratio invariant is checked over all
/// pairs.
pub const F_INVARIANCE_MAX_BALLS: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogRatioInvariance {
    pub pairs_checked: u64,
    /// `F(x^n, y^n) = F(x, y)` for every pair, `F = log x / log y mod p^k`.
    pub preserved: bool,
    /// Number of values `F` takes; more than one means `F` is not constant.
    pub distinct_values: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductReport {
    pub depth: u32,
    pub ball_count: usize,
    pub pair_count: u64,
    pub product_cycle_count: u64,
    /// Cycle length -> number of cycles of that length.
    pub cycle_length_histogram: BTreeMap<u64, u64>,
    pub product_transitive: bool,
    /// `None` when the partition is larger than [`F_INVARIANCE_MAX_BALLS`].
    pub log_ratio_invariance: Option<LogRatioInvariance>,
}

/// The product map `(x, y) -> (x^n, y^n)` on pairs of depth-`k` balls.
///
/// A transitive product would be needed for weak mixing. The pair count
/// `M^2` always splits into at least `M` cycles, and the function
/// `F(x, y) = log x / log y` is a non-constant invariant of the product.
pub fn product_nonmixing_report(sys: &MonomialSystem, depth: u32) -> Result<ProductReport> {
    let action = induced_permutation(sys, depth)?;
    let m = action.partition.len();
    let sigma = action.permutation.images();

    let mut seen = vec![false; m * m];
    let mut histogram = BTreeMap::new();
    let mut cycles = 0u64;
    for start in 0..m * m {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            len += 1;
            let (i, j) = (cur / m, cur % m);
            cur = sigma[i] * m + sigma[j];
        }
        cycles += 1;
        *histogram.entry(len).or_insert(0) += 1;
    }

    let log_ratio_invariance = if m <= F_INVARIANCE_MAX_BALLS {
        Some(log_ratio_check(sys, depth, action.partition.representatives(), sigma)?)
    } else {
        None
    };

    Ok(ProductReport {
        depth,
        ball_count: m,
        pair_count: (m * m) as u64,
        product_cycle_count: cycles,
        cycle_length_histogram: histogram,
        product_transitive: cycles == 1,
        log_ratio_invariance,
    })
}

/// `log x` has valuation exactly `l` on the sphere, so `log x / p^l` is a
/// unit known mod `p^k` from `x mod p^{l+k}`; `F` is read mod `p^k`.
fn log_ratio_check(
    sys: &MonomialSystem,
    depth: u32,
    reps: &[u64],
    sigma: &[usize],
) -> Result<LogRatioInvariance> {
    let precision = sys.l() + depth;
    let scaled_logs = reps
        .iter()
        .map(|&c| {
            let x = PadicInt::from_integer(c as i128, sys.p(), precision)?;
            padic_log(&x)?.div_p_pow(sys.l())
        })
        .collect::<Result<Vec<_>>>()?;
    let inverses = scaled_logs
        .iter()
        .map(PadicInt::inverse)
        .collect::<Result<Vec<_>>>()?;
    let ratio = |a: usize, b: usize| {
        (&scaled_logs[a] * &inverses[b])
            .residue_u64()
            .expect("word-size modulus")
    };
    let mut preserved = true;
    let mut values = BTreeSet::new();
    let mut pairs = 0u64;
    for i in 0..reps.len() {
        for j in 0..reps.len() {
            let before = ratio(i, j);
            preserved &= before == ratio(sigma[i], sigma[j]);
            values.insert(before);
            pairs += 1;
        }
    }
    Ok(LogRatioInvariance {
        pairs_checked: pairs,
        preserved,
        distinct_values: values.len(),
    })
}
