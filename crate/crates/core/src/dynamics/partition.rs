use rayon::prelude::*;

use super::permutation::Permutation;
use super::system::MonomialSystem;
use crate::error::{Error, Result};
use crate::modarith::checked_prime_power;
use crate::padic::BallLabel;

/// Default bound on the number of balls in a partition.
pub const PARTITION_CAP: u64 = 10_000_000;

/// The splitting of `S_{p^{-l}}(1)` into the `(p-1) p^{k-1}` balls of radius
/// `p^{-(l+k)}` centred at `1 + b_l p^l + ... + b_{l+k-1} p^{l+k-1}`,
/// `b_l != 0`.
///
/// Representatives are the least residues of the balls, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallPartition {
    p: u64,
    l: u32,
    depth: u32,
    modulus: u64,
    level_step: u64,
    representatives: Vec<u64>,
}

impl BallPartition {
    pub fn new(p: u64, l: u32, depth: u32, cap: u64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::usage("partition depth must be at least 1"));
        }
        let modulus = checked_prime_power(p, l + depth)?;
        let level_step = checked_prime_power(p, l)?;
        let count = (p - 1) * checked_prime_power(p, depth - 1)?;
        if count > cap {
            return Err(Error::resource(format!(
                "depth-{depth} partition has {count} balls, above the cap {cap}"
            )));
        }
        let span = modulus / level_step;
        let representatives = (1..span)
            .filter(|t| t % p != 0)
            .map(|t| 1 + t * level_step)
            .collect();
        Ok(BallPartition {
            p,
            l,
            depth,
            modulus,
            level_step,
            representatives,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `p^{l+k}`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn representatives(&self) -> &[u64] {
        &self.representatives
    }

    /// Index of the ball containing `x`, or `None` when `x` is off the sphere.
    pub fn index_of(&self, x: u64) -> Option<usize> {
        let r = x % self.modulus;
        let shifted = (r + self.modulus - 1) % self.modulus;
        if shifted % self.level_step != 0 {
            return None;
        }
        let t = shifted / self.level_step;
        if t % self.p == 0 {
            return None;
        }
        Some((t - t / self.p - 1) as usize)
    }

    pub fn label(&self, index: usize) -> BallLabel {
        BallLabel {
            center: self.representatives[index],
            radius_exp: self.l + self.depth,
            prime: self.p,
        }
    }
}

pub fn sphere_partition(sys: &MonomialSystem, depth: u32) -> Result<BallPartition> {
    BallPartition::new(sys.p(), sys.l(), depth, PARTITION_CAP)
}

/// The permutation `psi_n` induces on a ball partition, with its cycles.
#[derive(Clone, Debug)]
pub struct PermutationAction {
    pub partition: BallPartition,
    pub permutation: Permutation,
    pub cycles: Vec<Vec<usize>>,
}

impl PermutationAction {
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_transitive(&self) -> bool {
        self.cycles.len() == 1
    }
}

/// Maps each representative `c` to the ball of `c^n mod p^{l+k}`.
pub fn induced_permutation(sys: &MonomialSystem, depth: u32) -> Result<PermutationAction> {
    let partition = sphere_partition(sys, depth)?;
    action_of(&partition, |c| sys.apply(c, partition.modulus()))
}

/// Permutation induced on `partition` by an arbitrary residue map.
pub(crate) fn action_of<F>(partition: &BallPartition, map: F) -> Result<PermutationAction>
where
    F: Fn(u64) -> u64 + Sync,
{
    let images = partition
        .representatives()
        .par_iter()
        .map(|&c| {
            let image = map(c);
            partition.index_of(image).ok_or_else(|| {
                Error::integrity(format!(
                    "{c} maps to {image}, which is off the sphere mod {}",
                    partition.modulus()
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let permutation = Permutation::from_images(images)?;
    let cycles = permutation.cycles();
    Ok(PermutationAction {
        partition: partition.clone(),
        permutation,
        cycles,
    })
}
