//! Textbook arithmetic on machine integers, kept separate from `modarith`.

/// `p^e`, or `None` on overflow.
pub(crate) fn power(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// `x^e mod m` by `e` successive multiplications.
pub(crate) fn pow_by_repetition(x: u64, e: u64, m: u64) -> u64 {
    let (x, m) = (u128::from(x % m), u128::from(m));
    let mut acc = 1 % m;
    for _ in 0..e {
        acc = acc * x % m;
    }
    acc as u64
}

/// `x^e mod m` by binary exponentiation on `u128`.
pub(crate) fn pow_by_squaring(x: u64, mut e: u64, m: u64) -> u64 {
    let m = u128::from(m);
    let mut base = u128::from(x) % m;
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

/// Exponent of `p` in `z`; `None` for zero.
pub(crate) fn valuation(mut z: u128, p: u64) -> Option<u32> {
    if z == 0 {
        return None;
    }
    let p = u128::from(p);
    let mut v = 0;
    while z % p == 0 {
        z /= p;
        v += 1;
    }
    Some(v)
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Multiplicative order of a unit `n` mod `m`, by walking its powers.
pub(crate) fn order(n: u64, m: u64) -> u64 {
    let (n, m128) = (u128::from(n % m), u128::from(m));
    let mut x = n;
    let mut k = 1;
    while x != 1 % m128 {
        x = x * n % m128;
        k += 1;
    }
    k
}

/// Units mod `p^2` represented by `2..=p^2+1`, so the class of 1 appears as
/// `p^2 + 1` and every exponent is at least 2.
pub(crate) fn unit_exponents(p: u64) -> Vec<u64> {
    (2..=p * p + 1).filter(|n| n % p != 0).collect()
}
