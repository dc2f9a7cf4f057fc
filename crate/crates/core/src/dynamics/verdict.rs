use std::collections::HashMap;

use num_rational::Ratio;
use serde::Serialize;

use super::partition::{induced_permutation, sphere_partition, PermutationAction};
use super::permutation::Permutation;
use super::system::MonomialSystem;
use super::serialize_ratio;
use crate::analysis::roots_of_unity;
use crate::error::{Error, Result};
use crate::modarith::mul_mod;
use crate::padic::{BallLabel, PadicInt};
use crate::unit_groups::{generated_set, group_order, is_generator_g_p2, multiplicative_order};

/// Depth used when the caller does not choose one.
pub const DEFAULT_K_MAX: u32 = 4;

/// Normalized Haar measure of a single depth-`k` ball of the sphere:
/// `1 / ((p-1) p^{k-1})`.
pub fn haar_ball_measure(sys: &MonomialSystem, depth: u32) -> Result<Ratio<u64>> {
    if depth == 0 {
        return Err(Error::usage("depth must be at least 1"));
    }
    Ok(Ratio::new(1, group_order(sys.p(), depth)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelEvidence {
    pub depth: u32,
    pub ball_count: usize,
    pub cycle_lengths: Vec<usize>,
    pub transitive: bool,
    #[serde(serialize_with = "serialize_ratio")]
    pub haar_ball_measure: Ratio<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub p: u64,
    pub n: u64,
    pub l: u32,
    /// Residue of the sphere's center mod `p^{l + k_max}`.
    pub sphere_center: u64,
    pub generator_of_g_p2: bool,
    pub order_mod_p2: u64,
    pub group_order_p2: u64,
    /// `<n>` mod `p^2`, ascending.
    pub generated_set_mod_p2: Vec<u64>,
    pub levels: Vec<LevelEvidence>,
    /// For a non-minimal system: the balls of the cycle through the least
    /// representative at the shallowest non-transitive depth. Their union is
    /// a proper closed invariant set.
    pub invariant_balls: Vec<BallLabel>,
}

/// Minimality, unique ergodicity and ergodicity (w.r.t. Haar measure).
///
/// The three properties are equivalent for these systems, so the flags must
/// coincide; each is derived from its own piece of evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub minimal: bool,
    pub uniquely_ergodic: bool,
    pub ergodic: bool,
    pub evidence: Evidence,
}

fn level_evidence(sys: &MonomialSystem, action: &PermutationAction) -> Result<LevelEvidence> {
    let depth = action.partition.depth();
    Ok(LevelEvidence {
        depth,
        ball_count: action.partition.len(),
        cycle_lengths: action.cycle_lengths(),
        transitive: action.is_transitive(),
        haar_ball_measure: haar_ball_measure(sys, depth)?,
    })
}

fn assemble<C>(
    sys: &MonomialSystem,
    sphere_center: u64,
    actions: &[PermutationAction],
    center_of: C,
) -> Result<Verdict>
where
    C: Fn(&PermutationAction, usize) -> u64,
{
    let (p, n) = (sys.p(), sys.n());
    let generator = is_generator_g_p2(n, p)?;
    // On the p - 1 depth-1 balls the map is t -> n t mod p, so depth 1 only
    // sees whether n is a primitive root mod p; deeper levels see G_{p^2}.
    let primitive_mod_p = multiplicative_order(n, p, 1)? == p - 1;
    let mut levels = Vec::with_capacity(actions.len());
    let mut invariant_balls = Vec::new();
    for action in actions {
        let level = level_evidence(sys, action)?;
        let expected = if level.depth == 1 { primitive_mod_p } else { generator };
        if level.transitive != expected {
            return Err(Error::integrity(format!(
                "depth {}: transitivity {} but group test {} for p={p}, n={n}, l={}",
                level.depth,
                level.transitive,
                expected,
                sys.l()
            )));
        }
        if !level.transitive && invariant_balls.is_empty() {
            let radius_exp = sys.l() + level.depth;
            invariant_balls = action.cycles[0]
                .iter()
                .map(|&i| BallLabel {
                    center: center_of(action, i),
                    radius_exp,
                    prime: p,
                })
                .collect();
            invariant_balls.sort_by_key(|b| b.center);
        }
        levels.push(level);
    }

    let minimal = levels.iter().all(|l| l.transitive);
    // A probability vector invariant under a permutation is constant on its
    // cycles; it is forced to be uniform exactly when there is one cycle.
    let uniquely_ergodic = levels.iter().all(|l| l.cycle_lengths.len() == 1);
    let ergodic = generator;
    if minimal != uniquely_ergodic || minimal != ergodic {
        return Err(Error::integrity(format!(
            "verdict flags disagree: minimal={minimal}, uniquely_ergodic={uniquely_ergodic}, ergodic={ergodic}"
        )));
    }

    let mut generated = generated_set(n % (p * p), p * p)?;
    generated.sort_unstable();
    Ok(Verdict {
        minimal,
        uniquely_ergodic,
        ergodic,
        evidence: Evidence {
            p,
            n,
            l: sys.l(),
            sphere_center,
            generator_of_g_p2: generator,
            order_mod_p2: multiplicative_order(n, p, 2)?,
            group_order_p2: group_order(p, 2)?,
            generated_set_mod_p2: generated,
            levels,
            invariant_balls,
        },
    })
}

/// Decides minimality by the generator test on `G_{p^2}` and, independently,
/// by transitivity of the induced permutation at every depth `1..=k_max`.
pub fn minimality_verdict(sys: &MonomialSystem, k_max: u32) -> Result<Verdict> {
    if k_max < 2 {
        return Err(Error::usage("k_max must be at least 2"));
    }
    let actions = (1..=k_max)
        .map(|k| induced_permutation(sys, k))
        .collect::<Result<Vec<_>>>()?;
    assemble(sys, 1, &actions, |action, i| {
        action.partition.representatives()[i]
    })
}

/// The unit fixed points of `x -> x^n`: the `(n-1)`-th roots of unity.
pub fn fixed_points(sys: &MonomialSystem, precision: u32) -> Result<Vec<PadicInt>> {
    roots_of_unity(sys.n() - 1, sys.p(), precision)
}

/// Analyses `x -> x^n` on `S_{p^{-l}}(a)` for a unit fixed point `a`.
///
/// The map runs directly on the balls `B_{p^{-(l+k)}}(a c)`, `c` ranging over
/// the base representatives; ball `i` around `a` is the image of base ball
/// `i`. The resulting verdict must match the one on `S_{p^{-l}}(1)`.
pub fn conjugated_verdict(sys: &MonomialSystem, a: &PadicInt, k_max: u32) -> Result<Verdict> {
    if k_max < 2 {
        return Err(Error::usage("k_max must be at least 2"));
    }
    if a.prime() != sys.p() {
        return Err(Error::Mismatch(format!(
            "fixed point lives in Z_{}, system in Z_{}",
            a.prime(),
            sys.p()
        )));
    }
    if a.precision() < sys.l() + k_max {
        return Err(Error::usage(format!(
            "fixed point precision {} is below l + k_max = {}",
            a.precision(),
            sys.l() + k_max
        )));
    }
    if !a.is_unit() || a.pow_u64(sys.n()) != *a {
        return Err(Error::domain(format!(
            "{} is not a unit fixed point of x -> x^{}",
            a.residue(),
            sys.n()
        )));
    }
    let a_res = a
        .reduce_precision(sys.l() + k_max)?
        .residue_u64()
        .expect("word-size modulus");

    let mut actions = Vec::with_capacity(k_max as usize);
    let mut centers = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let partition = sphere_partition(sys, k)?;
        let m = partition.modulus();
        let moved: Vec<u64> = partition
            .representatives()
            .iter()
            .map(|&c| mul_mod(a_res % m, c, m))
            .collect();
        let index: HashMap<u64, usize> = moved.iter().enumerate().map(|(i, &y)| (y, i)).collect();
        let images = moved
            .iter()
            .map(|&y| {
                let image = sys.apply(y, m);
                index.get(&image).copied().ok_or_else(|| {
                    Error::integrity(format!("{y} maps to {image}, off S_{{p^-l}}({a_res})"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let permutation = Permutation::from_images(images)?;
        let cycles = permutation.cycles();
        actions.push(PermutationAction {
            partition,
            permutation,
            cycles,
        });
        centers.push(moved);
    }
    let verdict = assemble(sys, a_res, &actions, |action, i| {
        centers[action.partition.depth() as usize - 1][i]
    })?;

    let base = minimality_verdict(sys, k_max)?;
    let same_cycles = base
        .evidence
        .levels
        .iter()
        .zip(&verdict.evidence.levels)
        .all(|(x, y)| x.cycle_lengths == y.cycle_lengths);
    if base.minimal != verdict.minimal || !same_cycles {
        return Err(Error::integrity(format!(
            "conjugation by {} changed the dynamics",
            a.residue()
        )));
    }
    Ok(verdict)
}
