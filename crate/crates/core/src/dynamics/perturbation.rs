use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::partition::{action_of, BallPartition, PARTITION_CAP};
use super::system::MonomialSystem;
use crate::error::{Error, Result};
use crate::modarith::{add_mod, checked_prime_power, mul_mod, pow_mod};
use crate::unit_groups::is_generator_g_p2;

/// Integer polynomial `c_0 + c_1 x + ... + c_d x^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// Parses `"c0,c1,..."`; an empty string is the zero polynomial.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Self::zero());
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::usage(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Value at `x` modulo `m`, by Horner's rule.
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let big_m = BigInt::from(m);
        self.coeffs.iter().rev().fold(0, |acc, c| {
            let c = c.mod_floor(&big_m).to_u64().expect("reduced below m");
            add_mod(mul_mod(acc, x, m), c, m)
        })
    }

    /// Least coefficient valuation; `None` for the zero polynomial.
    pub fn min_coeff_valuation(&self, p: u64) -> Option<(usize, u32)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, integer_valuation(c, p)))
            .min_by_key(|&(_, v)| v)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(BigInt::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn integer_valuation(c: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut c = c.clone();
    let mut v = 0;
    while c.is_multiple_of(&p) {
        c /= &p;
        v += 1;
    }
    v
}

/// `psi_q(x) = x^n + q(x)` with every coefficient of `q` divisible by
/// `p^{l+2}`, which keeps `S_{p^{-l}}(1)` invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedSystem {
    base: MonomialSystem,
    q: Polynomial,
}

impl PerturbedSystem {
    pub fn new(base: MonomialSystem, q: Polynomial) -> Result<Self> {
        require_coeff_valuation(&base, &q, base.l() + 2)?;
        Ok(PerturbedSystem { base, q })
    }

    pub fn base(&self) -> &MonomialSystem {
        &self.base
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    #[inline]
    pub fn apply(&self, x: u64, m: u64) -> u64 {
        add_mod(self.base.apply(x, m), self.q.eval_mod(x, m), m)
    }
}

fn require_coeff_valuation(base: &MonomialSystem, q: &Polynomial, need: u32) -> Result<()> {
    match q.min_coeff_valuation(base.p()) {
        Some((i, v)) if v < need => Err(Error::domain(format!(
            "coefficient c{i} = {} has {}-adic valuation {v} < {need}",
            q.coeffs()[i],
            base.p()
        ))),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceLevel {
    pub depth: u32,
    pub residues_checked: u64,
    pub invariant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbedLevel {
    pub depth: u32,
    pub ball_count: usize,
    /// The map permutes the depth-`k` balls.
    pub bijective: bool,
    /// Empty when the map is not a bijection on the balls.
    pub cycle_lengths: Vec<usize>,
    pub transitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub x: u64,
    pub iteration: u64,
    pub actual: u64,
    pub predicted: u64,
}

/// Comparison of `psi_q^N(x) mod p^{l+2}` with `1 + n^N (a_l + a_{l+1} p) p^l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub modulus_exp: u32,
    pub residues_checked: u64,
    pub max_iterations: u64,
    /// The quadratic term `C(n,2) (a p^l)^2` vanishes mod `p^{l+2}` only for
    /// `l >= 2`; for `l = 1` the comparison is observational.
    pub expected_to_hold: bool,
    pub holds: bool,
    pub discrepancy_count: u64,
    /// The first [`MAX_LISTED_DISCREPANCIES`] discrepancies.
    pub discrepancies: Vec<Discrepancy>,
}

pub const MAX_LISTED_DISCREPANCIES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NecessaryCondition {
    pub transitive_on_depth_two: bool,
    pub generator_of_g_p2: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbationReport {
    pub p: u64,
    pub n: u64,
    pub l: u32,
    pub q: String,
    /// Depth-2 representatives at which `q == 0 mod p^{l+2}` was re-checked.
    pub pointwise_checked: u64,
    pub invariance: Vec<InvarianceLevel>,
    pub levels: Vec<PerturbedLevel>,
    pub congruence: CongruenceReport,
    pub necessary_condition: NecessaryCondition,
}

fn level_of<F>(base: &MonomialSystem, depth: u32, map: F) -> Result<(InvarianceLevel, PerturbedLevel)>
where
    F: Fn(u64) -> u64 + Sync,
{
    let partition = BallPartition::new(base.p(), base.l(), depth, PARTITION_CAP)?;
    let m = partition.modulus();
    let invariant = partition
        .representatives()
        .iter()
        .all(|&c| partition.index_of(map(c) % m).is_some());
    let invariance = InvarianceLevel {
        depth,
        residues_checked: partition.len() as u64,
        invariant,
    };
    let ball_count = partition.len();
    let level = match action_of(&partition, &map) {
        Ok(action) => PerturbedLevel {
            depth,
            ball_count,
            bijective: true,
            transitive: action.is_transitive(),
            cycle_lengths: action.cycle_lengths(),
        },
        Err(Error::Integrity(_)) => PerturbedLevel {
            depth,
            ball_count,
            bijective: false,
            cycle_lengths: Vec::new(),
            transitive: false,
        },
        Err(e) => return Err(e),
    };
    Ok((invariance, level))
}

/// Sphere invariance for depths `1..=k_max`, the iterate congruence for
/// `N <= n_max`, and the necessary condition for ergodicity: transitivity on
/// the `p(p-1)` depth-2 balls iff `n` generates `G_{p^2}`.
pub fn perturbed_analysis(
    psys: &PerturbedSystem,
    k_max: u32,
    n_max: u64,
) -> Result<PerturbationReport> {
    if k_max == 0 || n_max == 0 {
        return Err(Error::usage("k_max and n_max must be positive"));
    }
    let base = psys.base();
    let (p, n, l) = (base.p(), base.n(), base.l());
    let m2 = checked_prime_power(p, l + 2)?;
    let depth_two = BallPartition::new(p, l, 2, PARTITION_CAP)?;
    for &c in depth_two.representatives() {
        if psys.q().eval_mod(c, m2) != 0 {
            return Err(Error::integrity(format!(
                "q({c}) is not divisible by {p}^{} despite the coefficient bound",
                l + 2
            )));
        }
    }

    let mut invariance = Vec::new();
    let mut levels = Vec::new();
    for k in 1..=k_max {
        let m = base.modulus(k)?;
        let (inv, lvl) = level_of(base, k, |x| psys.apply(x, m))?;
        invariance.push(inv);
        levels.push(lvl);
    }

    let congruence = congruence_check(psys, &depth_two, n_max)?;

    let (_, two) = level_of(base, 2, |x| psys.apply(x, m2))?;
    let generator = is_generator_g_p2(n, p)?;
    let necessary_condition = NecessaryCondition {
        transitive_on_depth_two: two.transitive,
        generator_of_g_p2: generator,
        agrees: two.transitive == generator,
    };

    Ok(PerturbationReport {
        p,
        n,
        l,
        q: psys.q().to_string(),
        pointwise_checked: depth_two.len() as u64,
        invariance,
        levels,
        congruence,
        necessary_condition,
    })
}

fn congruence_check(
    psys: &PerturbedSystem,
    depth_two: &BallPartition,
    n_max: u64,
) -> Result<CongruenceReport> {
    let base = psys.base();
    let (p, n, l) = (base.p(), base.n(), base.l());
    let m = depth_two.modulus();
    let p_l = checked_prime_power(p, l)?;
    let mut discrepancies = Vec::new();
    let mut count = 0u64;
    for &x in depth_two.representatives() {
        let a_l = (x / p_l) % p;
        let a_l1 = (x / (p_l * p)) % p;
        let mut y = x;
        for iteration in 1..=n_max {
            y = psys.apply(y, m);
            let lead = mul_mod(pow_mod(n, iteration, m), (a_l + a_l1 * p) * p_l % m, m);
            let predicted = add_mod(1, lead, m);
            if y != predicted {
                count += 1;
                if discrepancies.len() < MAX_LISTED_DISCREPANCIES {
                    discrepancies.push(Discrepancy {
                        x,
                        iteration,
                        actual: y,
                        predicted,
                    });
                }
            }
        }
    }
    Ok(CongruenceReport {
        modulus_exp: l + 2,
        residues_checked: depth_two.len() as u64,
        max_iterations: n_max,
        expected_to_hold: l >= 2,
        holds: count == 0,
        discrepancy_count: count,
        discrepancies,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryObservations {
    pub p: u64,
    pub n: u64,
    pub l: u32,
    pub q: String,
    pub generator_of_g_p2: bool,
    pub invariance: Vec<InvarianceLevel>,
    pub levels: Vec<PerturbedLevel>,
}

/// Tabulates how `x^n + q(x)` acts when `q` is only divisible by `p^{l+1}`.
///
/// Whether such perturbations can change ergodicity is an open question, so
/// this returns observations and nothing that reads as a verdict.
pub fn explore_boundary_perturbation(
    base: &MonomialSystem,
    q: &Polynomial,
    k_max: u32,
) -> Result<BoundaryObservations> {
    require_coeff_valuation(base, q, base.l() + 1)?;
    let mut invariance = Vec::new();
    let mut levels = Vec::new();
    for k in 1..=k_max {
        let m = base.modulus(k)?;
        let (inv, lvl) = level_of(base, k, |x| {
            add_mod(base.apply(x, m), q.eval_mod(x, m), m)
        })?;
        invariance.push(inv);
        levels.push(lvl);
    }
    Ok(BoundaryObservations {
        p: base.p(),
        n: base.n(),
        l: base.l(),
        q: q.to_string(),
        generator_of_g_p2: is_generator_g_p2(base.n(), base.p())?,
        invariance,
        levels,
    })
}
