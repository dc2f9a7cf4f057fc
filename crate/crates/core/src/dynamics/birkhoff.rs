use num_rational::Ratio;
use serde::Serialize;

use super::serialize_ratio;
use super::system::MonomialSystem;
use super::verdict::haar_ball_measure;
use crate::error::{Error, Result};
use crate::modarith::checked_prime_power;
use crate::padic::{PadicInt, SphereSpec};

/// Observables for time averages. Ball indicators and digit readings both
/// take rational values, so every average is an exact rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// Indicator of `B_{p^{-(l+depth)}}(center)`.
    BallIndicator { center: u64, depth: u32 },
    /// The base-`p` digit `a_position`.
    Digit { position: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BirkhoffAverage {
    pub function: TestFunction,
    pub steps: u64,
    /// `(1/N) sum_{i<N} f(x0^{n^i})`.
    #[serde(serialize_with = "serialize_ratio")]
    pub time_average: Ratio<u64>,
    /// `integral f dm` against normalized Haar measure on the sphere.
    #[serde(serialize_with = "serialize_ratio")]
    pub space_average: Ratio<u64>,
}

fn check_on_sphere(sys: &MonomialSystem, x0: &PadicInt) -> Result<()> {
    if x0.prime() != sys.p() {
        return Err(Error::Mismatch(format!(
            "start point in Z_{}, system over Z_{}",
            x0.prime(),
            sys.p()
        )));
    }
    let sphere = SphereSpec::around_one(sys.p(), sys.l(), x0.precision())?;
    if !sphere.contains(x0)? {
        return Err(Error::domain(format!(
            "x0 = {} is not on {sphere}",
            x0.residue()
        )));
    }
    Ok(())
}

/// `x0, x0^n, x0^{n^2}, ...`, `steps` points at the precision of `x0`.
pub fn orbit(sys: &MonomialSystem, x0: &PadicInt, steps: u64) -> Result<Vec<PadicInt>> {
    check_on_sphere(sys, x0)?;
    let mut out = Vec::with_capacity(steps as usize);
    let mut x = x0.clone();
    for _ in 0..steps {
        let next = x.pow_u64(sys.n());
        out.push(x);
        x = next;
    }
    Ok(out)
}

/// Space average of `f` against normalized Haar measure on the sphere.
pub fn space_average(sys: &MonomialSystem, f: TestFunction) -> Result<Ratio<u64>> {
    let (p, l) = (sys.p(), sys.l());
    match f {
        TestFunction::BallIndicator { center, depth } => {
            let m = checked_prime_power(p, l + depth)?;
            let c = center % m;
            let on_sphere = (c + m - 1) % checked_prime_power(p, l)? == 0
                && (c + m - 1) % checked_prime_power(p, l + 1)? != 0;
            if on_sphere {
                haar_ball_measure(sys, depth)
            } else {
                Ok(Ratio::from_integer(0))
            }
        }
        // Digits below l are those of 1; digit l is uniform on 1..p-1, and
        // deeper digits are uniform on 0..p-1.
        TestFunction::Digit { position } => Ok(match position.cmp(&l) {
            std::cmp::Ordering::Less => Ratio::from_integer(u64::from(position == 0)),
            std::cmp::Ordering::Equal => Ratio::new(p, 2),
            std::cmp::Ordering::Greater => Ratio::new(p - 1, 2),
        }),
    }
}

fn evaluate(f: TestFunction, x: &PadicInt, p: u64, l: u32) -> Result<u64> {
    match f {
        TestFunction::BallIndicator { center, depth } => {
            let m = checked_prime_power(p, l + depth)?;
            let r = x.residue_u64().expect("word-size modulus") % m;
            Ok(u64::from(r == center % m))
        }
        TestFunction::Digit { position } => Ok(x.digit(position)),
    }
}

/// Exact Birkhoff average of `f` over the first `steps` orbit points of `x0`,
/// together with the Haar integral it should approach on ergodic systems.
pub fn birkhoff_average(
    sys: &MonomialSystem,
    x0: &PadicInt,
    f: TestFunction,
    steps: u64,
) -> Result<BirkhoffAverage> {
    if steps == 0 {
        return Err(Error::usage("the number of steps must be positive"));
    }
    match f {
        TestFunction::BallIndicator { depth, .. } if depth == 0 || sys.l() + depth > x0.precision() => {
            return Err(Error::usage(format!(
                "depth-{depth} balls need precision in 1..={}",
                x0.precision().saturating_sub(sys.l())
            )));
        }
        TestFunction::Digit { position } if position >= x0.precision() => {
            return Err(Error::usage(format!(
                "digit {position} is beyond precision {}",
                x0.precision()
            )));
        }
        _ => {}
    }
    let points = orbit(sys, x0, steps)?;
    let mut total = 0u64;
    for x in &points {
        total += evaluate(f, x, sys.p(), sys.l())?;
    }
    Ok(BirkhoffAverage {
        function: f,
        steps,
        time_average: Ratio::new(total, steps),
        space_average: space_average(sys, f)?,
    })
}
