//! Exact rational solve for invariant probability vectors of a permutation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest permutation the dense-ish elimination is allowed to handle.
const MAX_VARIABLES: usize = 5_000;

#[derive(Clone, Debug)]
struct Row {
    coeffs: BTreeMap<usize, BigRational>,
    rhs: BigRational,
}

impl Row {
    /// `self -= factor * other`.
    fn subtract(&mut self, factor: &BigRational, other: &Row) {
        for (&c, v) in &other.coeffs {
            let entry = self.coeffs.entry(c).or_insert_with(BigRational::zero);
            *entry -= factor * v;
            if entry.is_zero() {
                self.coeffs.remove(&c);
            }
        }
        self.rhs -= factor * &other.rhs;
    }
}

/// All probability vectors `v` with `v[sigma(i)] = v[i]`, as an affine space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSolution {
    /// Dimension of the solution space; 0 means the vector is unique.
    pub dimension: usize,
    /// The solution with every free variable set to zero.
    pub particular: Vec<BigRational>,
}

impl InvariantSolution {
    pub fn is_uniform(&self) -> bool {
        self.particular.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_probability_vector(&self) -> bool {
        !self.particular.iter().any(Signed::is_negative)
            && self.particular.iter().sum::<BigRational>().is_one()
    }
}

/// Solves `v_i - v_{sigma(i)} = 0`, `sum v_i = 1` by Gauss-Jordan elimination
/// over the rationals.
pub fn invariant_probability_vectors(sigma: &[usize]) -> Result<InvariantSolution> {
    let m = sigma.len();
    if m == 0 {
        return Err(Error::usage("empty permutation"));
    }
    if m > MAX_VARIABLES {
        return Err(Error::resource(format!(
            "{m} unknowns exceed the solver cap {MAX_VARIABLES}"
        )));
    }
    let one = BigRational::one();
    let mut equations = vec![Row {
        coeffs: (0..m).map(|i| (i, one.clone())).collect(),
        rhs: one.clone(),
    }];
    for (i, &j) in sigma.iter().enumerate() {
        if i != j {
            equations.push(Row {
                coeffs: BTreeMap::from([(i, one.clone()), (j, -one.clone())]),
                rhs: BigRational::zero(),
            });
        }
    }

    // pivot column -> row, kept fully reduced
    let mut pivots: BTreeMap<usize, Row> = BTreeMap::new();
    for eq in &equations {
        let mut row = eq.clone();
        let hits: Vec<usize> = row
            .coeffs
            .keys()
            .filter(|c| pivots.contains_key(c))
            .copied()
            .collect();
        for c in hits {
            if let Some(f) = row.coeffs.get(&c).cloned() {
                row.subtract(&f, &pivots[&c]);
            }
        }
        let Some((&col, lead)) = row.coeffs.iter().next() else {
            if !row.rhs.is_zero() {
                return Err(Error::integrity("inconsistent invariance equations"));
            }
            continue;
        };
        let inv = lead.recip();
        for v in row.coeffs.values_mut() {
            *v *= &inv;
        }
        row.rhs *= &inv;
        for other in pivots.values_mut() {
            if let Some(f) = other.coeffs.get(&col).cloned() {
                other.subtract(&f, &row);
            }
        }
        pivots.insert(col, row);
    }

    let mut particular = vec![BigRational::zero(); m];
    for (&c, row) in &pivots {
        particular[c] = row.rhs.clone();
    }
    for eq in &equations {
        let lhs: BigRational = eq.coeffs.iter().map(|(&c, v)| v * &particular[c]).sum();
        if lhs != eq.rhs {
            return Err(Error::integrity("back-substitution does not satisfy the system"));
        }
    }
    Ok(InvariantSolution {
        dimension: m - pivots.len(),
        particular,
    })
}

/// `"a/b"` rendering for witnesses.
pub(crate) fn render(v: &[BigRational]) -> Vec<String> {
    v.iter()
        .map(|r| {
            if r.denom() == &BigInt::one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cycle_is_uniform() {
        let s = invariant_probability_vectors(&[1, 2, 3, 4, 5, 0]).unwrap();
        assert_eq!(s.dimension, 0);
        assert!(s.is_uniform() && s.is_probability_vector());
        assert_eq!(render(&s.particular[..1]), vec!["1/6"]);
    }

    #[test]
    fn two_fixed_points_leave_a_free_parameter() {
        let s = invariant_probability_vectors(&[0, 1]).unwrap();
        assert_eq!(s.dimension, 1);
        assert!(!s.is_uniform() && s.is_probability_vector());
    }

    #[test]
    fn cycle_count_sets_dimension() {
        let s = invariant_probability_vectors(&[1, 0, 3, 4, 2, 5]).unwrap();
        assert_eq!(s.dimension, 2);
        assert!(s.is_probability_vector());
    }
}
