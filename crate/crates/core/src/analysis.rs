//! p-adic logarithm and exponential, powers `x^a` with `a` in `Z_p`, and
//! roots of unity by Hensel lifting.
//!
//! All series are summed exactly: each term is computed at a guard precision
//! wide enough to absorb the division by `k` (or `k!`), divided exactly by
//! the `p`-part of the denominator, and truncated back to `K`. Summation
//! stops once a monotone lower bound on the term valuations reaches `K`.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::modarith::{gcd, pow_mod, valuation_u64};
use crate::padic::{PadicInt, Valuation};

/// Smallest distance exponent from 1 (resp. 0) on which log (resp. exp)
/// converges: 1 for odd `p`, 2 for `p = 2`.
pub fn convergence_radius_exp(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

fn floor_log(p: u64, k: u64) -> u32 {
    let mut e = 0;
    let mut acc = p;
    while acc <= k {
        e += 1;
        acc = acc.saturating_mul(p);
    }
    e
}

/// `v_p(k!)` by Legendre's formula.
fn factorial_valuation(p: u64, k: u64) -> u32 {
    let mut v = 0u64;
    let mut q = k / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v as u32
}

/// Unit part of `k`, i.e. `k / p^{v_p(k)}`, as an element of the same ring.
fn unit_part(like: &PadicInt, k: u64) -> PadicInt {
    let mut u = k;
    while u % like.prime() == 0 {
        u /= like.prime();
    }
    like.sibling(u as i128)
}

fn log_domain_check(x: &PadicInt) -> Result<Valuation> {
    let lambda_val = (x - &x.sibling(1)).valuation();
    let need = convergence_radius_exp(x.prime());
    if lambda_val.lower_bound() < need {
        return Err(Error::domain(format!(
            "log needs |x - 1|_p <= p^-{need}; x = {} has |x - 1|_p = p^-{lambda_val}",
            x.residue()
        )));
    }
    Ok(lambda_val)
}

/// `log x = sum_{k>=1} (-1)^{k+1} (x-1)^k / k`, exact mod `p^K`.
pub fn padic_log(x: &PadicInt) -> Result<PadicInt> {
    let lambda_val = log_domain_check(x)?;
    let one = x.sibling(1);
    let lambda = x - &one;
    let Valuation::Finite(v) = lambda_val else {
        return Ok(x.sibling(0));
    };
    let (p, k_target) = (x.prime(), x.precision());
    let v = v as u64;

    // k v - floor(log_p k) is non-decreasing and bounds term valuations below.
    let mut k_end = 1u64;
    while k_end * v < k_target as u64 + floor_log(p, k_end) as u64 {
        k_end += 1;
    }
    let guard = floor_log(p, k_end.saturating_sub(1).max(1));
    let wide = lambda.lift_representative(k_target + guard)?;

    let mut sum = x.sibling(0);
    let mut power = wide.clone();
    for k in 1..k_end {
        let j = valuation_u64(k, p).expect("k >= 1");
        let term = power.div_p_pow(j)?.reduce_precision(k_target)?;
        let term = &term * &unit_part(x, k).inverse()?;
        sum = if k % 2 == 1 { &sum + &term } else { &sum - &term };
        power = &power * &wide;
    }
    Ok(sum)
}

/// `exp x = sum_{k>=0} x^k / k!`, exact mod `p^K`.
pub fn padic_exp(x: &PadicInt) -> Result<PadicInt> {
    let need = convergence_radius_exp(x.prime());
    let val = x.valuation();
    if val.lower_bound() < need {
        return Err(Error::domain(format!(
            "exp needs |x|_p <= p^-{need}; x = {} has |x|_p = p^-{val}",
            x.residue()
        )));
    }
    let one = x.sibling(1);
    let Valuation::Finite(v) = val else {
        return Ok(one);
    };
    let (p, k_target) = (x.prime(), x.precision());
    let v = v as u64;

    // v_p(k!) <= (k-1)/(p-1), so k v - floor((k-1)/(p-1)) is a
    // non-decreasing lower bound on the valuation of x^k / k!.
    let mut k_end = 1u64;
    while k_end * v < k_target as u64 + (k_end - 1) / (p - 1) {
        k_end += 1;
    }
    let guard = factorial_valuation(p, k_end - 1);
    let wide = x.lift_representative(k_target + guard)?;

    let mut sum = one.clone();
    let mut power = wide.clone();
    let mut fact_unit = one;
    for k in 1..k_end {
        fact_unit = &fact_unit * &unit_part(x, k);
        let j = factorial_valuation(p, k);
        let term = power.div_p_pow(j)?.reduce_precision(k_target)?;
        sum = &sum + &(&term * &fact_unit.inverse()?);
        power = &power * &wide;
    }
    Ok(sum)
}

/// `x^a` for `x` in `B_{p^{-1}}(1)` (`B_{1/4}(1)` when `p = 2`) and `a` in
/// `Z_p`.
///
/// Computed both as `exp(a log x)` and as the natural power `x^{a mod p^K}`,
/// the truncation of `lim_{k -> a} x^k`. The two must agree exactly.
pub fn pow_padic(x: &PadicInt, a: &PadicInt) -> Result<PadicInt> {
    if x.prime() != a.prime() || x.precision() != a.precision() {
        return Err(Error::Mismatch("base and exponent rings differ".into()));
    }
    log_domain_check(x)?;
    let via_series = padic_exp(&(a * &padic_log(x)?))?;
    let via_limit = x.pow_nat(&a.residue());
    if via_series != via_limit {
        return Err(Error::integrity(format!(
            "x^a mismatch for x = {}, a = {}: exp/log gives {}, limit gives {}",
            x.residue(),
            a.residue(),
            via_series.residue(),
            via_limit.residue()
        )));
    }
    Ok(via_limit)
}

/// All `x` in `Z_p` with `x^d = 1`, read mod `p^K` and sorted by residue.
///
/// The roots of unity in `Z_p` (odd `p`) are the `(p-1)`-th roots, so the
/// `d`-th roots are the `gcd(d, p-1)`-th roots; there are `gcd(d, p-1)` of
/// them. Each root mod `p` is lifted by Newton iteration on `x^g - 1`.
pub fn roots_of_unity(d: u64, p: u64, precision: u32) -> Result<Vec<PadicInt>> {
    if p == 2 {
        return Err(Error::domain(
            "roots of unity are computed for odd p; in Z_2 they are only 1 and -1",
        ));
    }
    if d == 0 {
        return Err(Error::usage("d must be at least 1"));
    }
    let template = PadicInt::one(p, precision)?;
    let g = gcd(d, p - 1);
    let mut roots = Vec::with_capacity(g as usize);
    for r in 1..p {
        if pow_mod(r, g, p) == 1 {
            roots.push(hensel_lift_root(&template.sibling(r as i128), g)?);
        }
    }
    roots.sort_by_key(PadicInt::residue);
    Ok(roots)
}

/// Newton iteration `x <- x - (x^g - 1) / (g x^{g-1})` at full precision.
fn hensel_lift_root(start: &PadicInt, g: u64) -> Result<PadicInt> {
    let one = start.sibling(1);
    let g_elem = start.sibling(g as i128);
    let mut x = start.clone();
    // Quadratic convergence: ceil(log2 K) + 1 steps always suffice.
    for _ in 0..=(32 - start.precision().leading_zeros()) {
        let f = &x.pow_u64(g) - &one;
        if f.is_zero() {
            return Ok(x);
        }
        let df = &g_elem * &x.pow_u64(g - 1);
        x = &x - &(&f * &df.inverse()?);
    }
    Err(Error::integrity(format!(
        "Hensel lift of {} did not converge",
        start.residue()
    )))
}

/// The Teichmüller representative: the unique `(p-1)`-th root of unity
/// congruent to `x` mod `p`, the limit of `x^{p^m}`.
pub fn teichmuller(x: &PadicInt) -> Result<PadicInt> {
    if x.prime() == 2 {
        return Err(Error::domain("Teichmüller lifts are computed for odd p"));
    }
    if !x.is_unit() {
        return Err(Error::domain(format!("{} is not a unit", x.residue())));
    }
    let p = BigUint::from(x.prime());
    let mut y = x.clone();
    for _ in 0..=x.precision() {
        let next = y.pow_nat(&p);
        if next == y {
            return Ok(y);
        }
        y = next;
    }
    Err(Error::integrity("x^{p^m} failed to stabilize"))
}
