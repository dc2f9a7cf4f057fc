use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modarith;

/// p-adic valuation of a value known modulo `p^K`.
///
/// A zero residue only tells us the true valuation is at least `K`, so that
/// case is kept apart from exact valuations. The norm `|x|_p = p^{-v}` is only
/// ever reported through its exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    /// Exact valuation, `0 <= v < precision`.
    Finite(u32),
    /// The residue vanishes; the valuation is `>= precision`.
    AtLeast(u32),
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// The largest `v` for which `p^v` is known to divide the value.
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    /// Exponent of the norm, `log_p |x|_p = -v`, for exact valuations.
    pub fn norm_exponent(self) -> Option<i64> {
        self.finite().map(|v| -(v as i64))
    }

    /// Add two valuations, as for a product. The result saturates at `cap`.
    pub fn saturating_add(self, other: Valuation, cap: u32) -> Valuation {
        let sum = self.lower_bound() + other.lower_bound();
        if self.is_finite() && other.is_finite() && sum < cap {
            Valuation::Finite(sum)
        } else {
            Valuation::AtLeast(cap)
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by the known lower bound; an unresolved valuation sorts above an
/// exact one with the same bound.
impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lower_bound()
            .cmp(&other.lower_bound())
            .then_with(|| self.is_finite().cmp(&other.is_finite()).reverse())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::AtLeast(_) => s.serialize_str(&self.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Word { residue: u64, modulus: u64 },
    Multi { residue: BigUint, modulus: Arc<BigUint> },
}

/// An element of `Z_p` known to absolute precision `K`, stored as its
/// residue in `[0, p^K)`.
///
/// Residues whose modulus fits a machine word are kept inline; larger
/// moduli fall back to `BigUint`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    prime: u64,
    precision: u32,
    repr: Repr,
}

fn check_params(p: u64, precision: u32) -> Result<()> {
    if !modarith::is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if precision == 0 {
        return Err(Error::usage("precision must be at least 1"));
    }
    Ok(())
}

impl PadicInt {
    /// Builds an element from a residue already reduced mod `p^precision`.
    /// The caller guarantees that `prime` is prime.
    fn from_reduced(prime: u64, precision: u32, residue: BigUint) -> Self {
        let repr = match prime.checked_pow(precision) {
            Some(m) => Repr::Word {
                residue: residue.to_u64().expect("residue below a word-size modulus"),
                modulus: m,
            },
            None => Repr::Multi {
                residue,
                modulus: Arc::new(BigUint::from(prime).pow(precision)),
            },
        };
        PadicInt {
            prime,
            precision,
            repr,
        }
    }

    fn from_bigint_unchecked(z: &BigInt, prime: u64, precision: u32) -> Self {
        let m = BigInt::from(BigUint::from(prime).pow(precision));
        let r = z.mod_floor(&m);
        Self::from_reduced(prime, precision, r.to_biguint().expect("mod_floor is non-negative"))
    }

    /// `z mod p^K`. Negative integers wrap around.
    pub fn from_integer(z: i128, prime: u64, precision: u32) -> Result<Self> {
        Self::from_bigint(&BigInt::from(z), prime, precision)
    }

    pub fn from_bigint(z: &BigInt, prime: u64, precision: u32) -> Result<Self> {
        check_params(prime, precision)?;
        Ok(Self::from_bigint_unchecked(z, prime, precision))
    }

    /// `num / den` as an element of `Z_p`. The denominator must be a unit.
    pub fn from_rational(num: i128, den: i128, prime: u64, precision: u32) -> Result<Self> {
        check_params(prime, precision)?;
        if den == 0 {
            return Err(Error::usage("zero denominator"));
        }
        if den.rem_euclid(prime as i128) == 0 {
            return Err(Error::domain(format!(
                "not a p-adic integer: {prime} divides the denominator {den}"
            )));
        }
        let n = Self::from_bigint_unchecked(&BigInt::from(num), prime, precision);
        let d = Self::from_bigint_unchecked(&BigInt::from(den), prime, precision);
        Ok(&n * &d.inverse()?)
    }

    /// Re-assembles `sum a_i p^i` from base-`p` digits, least significant first.
    pub fn from_digits(digits: &[u64], prime: u64) -> Result<Self> {
        check_params(prime, digits.len() as u32)?;
        if let Some(d) = digits.iter().find(|&&d| d >= prime) {
            return Err(Error::usage(format!("digit {d} out of range for base {prime}")));
        }
        let mut acc = BigUint::zero();
        for &d in digits.iter().rev() {
            acc = acc * prime + d;
        }
        Ok(Self::from_reduced(prime, digits.len() as u32, acc))
    }

    pub fn zero(prime: u64, precision: u32) -> Result<Self> {
        Self::from_integer(0, prime, precision)
    }

    pub fn one(prime: u64, precision: u32) -> Result<Self> {
        Self::from_integer(1, prime, precision)
    }

    /// An element with the same prime and precision.
    pub fn sibling(&self, z: i128) -> Self {
        Self::from_bigint_unchecked(&BigInt::from(z), self.prime, self.precision)
    }

    pub fn sibling_residue(&self, residue: &BigUint) -> Self {
        Self::from_reduced(self.prime, self.precision, residue % self.modulus())
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> BigUint {
        match &self.repr {
            Repr::Word { residue, .. } => BigUint::from(*residue),
            Repr::Multi { residue, .. } => residue.clone(),
        }
    }

    /// The residue when it fits a machine word.
    pub fn residue_u64(&self) -> Option<u64> {
        match &self.repr {
            Repr::Word { residue, .. } => Some(*residue),
            Repr::Multi { residue, .. } => residue.to_u64(),
        }
    }

    pub fn modulus(&self) -> BigUint {
        match &self.repr {
            Repr::Word { modulus, .. } => BigUint::from(*modulus),
            Repr::Multi { modulus, .. } => (**modulus).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Word { residue, .. } => *residue == 0,
            Repr::Multi { residue, .. } => residue.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Word { residue, .. } => *residue == 1,
            Repr::Multi { residue, .. } => residue.is_one(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.digit(0) != 0
    }

    /// Base-`p` digits `a_0, ..., a_{K-1}`.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Word { residue, .. } => {
                let mut r = *residue;
                (0..self.precision)
                    .map(|_| {
                        let d = r % self.prime;
                        r /= self.prime;
                        d
                    })
                    .collect()
            }
            Repr::Multi { residue, .. } => {
                let mut r = residue.clone();
                (0..self.precision)
                    .map(|_| {
                        let (q, d) = r.div_rem(&BigUint::from(self.prime));
                        r = q;
                        d.to_u64().expect("digit below p")
                    })
                    .collect()
            }
        }
    }

    /// The `i`-th base-`p` digit; zero beyond the precision.
    pub fn digit(&self, i: u32) -> u64 {
        if i >= self.precision {
            return 0;
        }
        match &self.repr {
            Repr::Word { residue, .. } => (residue / self.prime.pow(i)) % self.prime,
            Repr::Multi { residue, .. } => {
                let q = residue / BigUint::from(self.prime).pow(i);
                (q % self.prime).to_u64().expect("digit below p")
            }
        }
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Word { residue, .. } => match modarith::valuation_u64(*residue, self.prime) {
                Some(v) => Valuation::Finite(v),
                None => Valuation::AtLeast(self.precision),
            },
            Repr::Multi { residue, .. } => {
                if residue.is_zero() {
                    return Valuation::AtLeast(self.precision);
                }
                let p = BigUint::from(self.prime);
                let mut r = residue.clone();
                let mut v = 0;
                loop {
                    let (q, rem) = r.div_rem(&p);
                    if !rem.is_zero() {
                        return Valuation::Finite(v);
                    }
                    r = q;
                    v += 1;
                }
            }
        }
    }

    /// `valuation(self - other)`: the exponent of `-log_p |x - y|_p`.
    pub fn dist(&self, other: &PadicInt) -> Result<Valuation> {
        Ok(self.checked_sub(other)?.valuation())
    }

    fn ensure_compatible(&self, other: &PadicInt) -> Result<()> {
        if self.prime != other.prime || self.precision != other.precision {
            return Err(Error::Mismatch(format!(
                "(p={}, K={}) vs (p={}, K={})",
                self.prime, self.precision, other.prime, other.precision
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PadicInt) -> Result<PadicInt> {
        self.ensure_compatible(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Word { residue: a, modulus }, Repr::Word { residue: b, .. }) => Repr::Word {
                residue: modarith::add_mod(*a, *b, *modulus),
                modulus: *modulus,
            },
            (Repr::Multi { residue: a, modulus }, Repr::Multi { residue: b, .. }) => {
                Repr::Multi {
                    residue: (a + b) % &**modulus,
                    modulus: modulus.clone(),
                }
            }
            _ => unreachable!("representation is fixed by (p, K)"),
        };
        Ok(self.with_repr(repr))
    }

    pub fn checked_sub(&self, other: &PadicInt) -> Result<PadicInt> {
        self.ensure_compatible(other)?;
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &PadicInt) -> Result<PadicInt> {
        self.ensure_compatible(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Word { residue: a, modulus }, Repr::Word { residue: b, .. }) => Repr::Word {
                residue: modarith::mul_mod(*a, *b, *modulus),
                modulus: *modulus,
            },
            (Repr::Multi { residue: a, modulus }, Repr::Multi { residue: b, .. }) => {
                Repr::Multi {
                    residue: (a * b) % &**modulus,
                    modulus: modulus.clone(),
                }
            }
            _ => unreachable!("representation is fixed by (p, K)"),
        };
        Ok(self.with_repr(repr))
    }

    fn with_repr(&self, repr: Repr) -> PadicInt {
        PadicInt {
            prime: self.prime,
            precision: self.precision,
            repr,
        }
    }

    pub fn neg(&self) -> PadicInt {
        let repr = match &self.repr {
            Repr::Word { residue, modulus } => Repr::Word {
                residue: if *residue == 0 { 0 } else { modulus - residue },
                modulus: *modulus,
            },
            Repr::Multi { residue, modulus } => Repr::Multi {
                residue: if residue.is_zero() {
                    BigUint::zero()
                } else {
                    &**modulus - residue
                },
                modulus: modulus.clone(),
            },
        };
        self.with_repr(repr)
    }

    /// `self^e` by square-and-multiply.
    pub fn pow_nat(&self, e: &BigUint) -> PadicInt {
        let repr = match &self.repr {
            Repr::Word { residue, modulus } => {
                let exp = e.to_u64();
                let r = match exp {
                    Some(exp) => modarith::pow_mod(*residue, exp, *modulus),
                    None => BigUint::from(*residue)
                        .modpow(e, &BigUint::from(*modulus))
                        .to_u64()
                        .expect("below modulus"),
                };
                Repr::Word {
                    residue: r,
                    modulus: *modulus,
                }
            }
            Repr::Multi { residue, modulus } => Repr::Multi {
                residue: residue.modpow(e, modulus),
                modulus: modulus.clone(),
            },
        };
        self.with_repr(repr)
    }

    pub fn pow_u64(&self, e: u64) -> PadicInt {
        self.pow_nat(&BigUint::from(e))
    }

    /// Multiplicative inverse; defined for units only.
    pub fn inverse(&self) -> Result<PadicInt> {
        if !self.is_unit() {
            return Err(Error::domain(format!(
                "{} is not a unit in Z_{}",
                self.residue(),
                self.prime
            )));
        }
        let repr = match &self.repr {
            Repr::Word { residue, modulus } => Repr::Word {
                residue: modarith::inv_mod(*residue, *modulus).expect("units are invertible"),
                modulus: *modulus,
            },
            Repr::Multi { residue, modulus } => {
                let m = BigInt::from((**modulus).clone());
                let a = BigInt::from(residue.clone());
                let g = a.extended_gcd(&m);
                let inv = g.x.mod_floor(&m);
                Repr::Multi {
                    residue: inv.to_biguint().expect("non-negative"),
                    modulus: modulus.clone(),
                }
            }
        };
        Ok(self.with_repr(repr))
    }

    /// Truncates to a lower precision.
    pub fn reduce_precision(&self, precision: u32) -> Result<PadicInt> {
        if precision == 0 || precision > self.precision {
            return Err(Error::usage(format!(
                "cannot reduce precision {} to {precision}",
                self.precision
            )));
        }
        Ok(Self::from_reduced(
            self.prime,
            precision,
            self.residue() % BigUint::from(self.prime).pow(precision),
        ))
    }

    /// Re-reads the least non-negative representative at a higher precision.
    /// The new digits are zero; they carry no information about the value.
    pub fn lift_representative(&self, precision: u32) -> Result<PadicInt> {
        if precision < self.precision {
            return Err(Error::usage(format!(
                "cannot lift precision {} to {precision}",
                self.precision
            )));
        }
        Ok(Self::from_reduced(self.prime, precision, self.residue()))
    }

    /// Exact division by `p^j`. Requires `p^j` to divide the residue; the
    /// quotient is known to precision `K - j`.
    pub fn div_p_pow(&self, j: u32) -> Result<PadicInt> {
        if j >= self.precision {
            return Err(Error::integrity(format!(
                "division by {}^{j} leaves no digits at precision {}",
                self.prime, self.precision
            )));
        }
        if self.valuation().lower_bound() < j {
            return Err(Error::integrity(format!(
                "{} is not divisible by {}^{j}",
                self.residue(),
                self.prime
            )));
        }
        let q = self.residue() / BigUint::from(self.prime).pow(j);
        Ok(Self::from_reduced(self.prime, self.precision - j, q))
    }
}

impl Add for &PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: &PadicInt) -> PadicInt {
        self.checked_add(rhs).expect("mismatched p-adic operands")
    }
}

impl Sub for &PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: &PadicInt) -> PadicInt {
        self.checked_sub(rhs).expect("mismatched p-adic operands")
    }
}

impl Mul for &PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: &PadicInt) -> PadicInt {
        self.checked_mul(rhs).expect("mismatched p-adic operands")
    }
}

impl Neg for &PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        PadicInt::neg(self)
    }
}

/// `…a2 a1 a0 (base p, K digits)`, most significant digit first.
impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.digits().iter().rev().map(u64::to_string).collect();
        write!(
            f,
            "…{} (base {}, {} digits)",
            digits.join(" "),
            self.prime,
            self.precision
        )
    }
}

impl Serialize for PadicInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PadicInt", 3)?;
        st.serialize_field("residue", &self.residue().to_string())?;
        st.serialize_field("digits", &self.to_string())?;
        st.serialize_field("precision", &self.precision)?;
        st.end()
    }
}
