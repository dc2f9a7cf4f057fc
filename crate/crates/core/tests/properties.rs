use proptest::prelude::*;

use padic_ergodic::analysis::padic_log;
use padic_ergodic::dynamics::{
    birkhoff_average, conjugated_verdict, fixed_points, minimality_verdict,
    product_nonmixing_report, sphere_partition, MonomialSystem, TestFunction,
};
use padic_ergodic::unit_groups::is_generator_g_p2;
use padic_ergodic::{PadicInt, Valuation};

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

fn odd_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13])
}

/// (p, n, l) with p odd and n a unit, n >= 2.
fn system() -> impl Strategy<Value = (u64, u64, u32)> {
    (odd_prime(), 2u64..200, 1u32..=2)
        .prop_filter("n must be a unit", |(p, n, _)| n % p != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ultrametric_inequality(p in prime(), k in 1u32..8, a in any::<i64>(), b in any::<i64>()) {
        let x = PadicInt::from_integer(a.into(), p, k).unwrap();
        let y = PadicInt::from_integer(b.into(), p, k).unwrap();
        prop_assert!((&x + &y).valuation() >= x.valuation().min(y.valuation()));
    }

    #[test]
    fn valuation_is_additive(p in prime(), k in 1u32..8, a in any::<i64>(), b in any::<i64>()) {
        let x = PadicInt::from_integer(a.into(), p, k).unwrap();
        let y = PadicInt::from_integer(b.into(), p, k).unwrap();
        prop_assert_eq!((&x * &y).valuation(), x.valuation().saturating_add(y.valuation(), k));
    }

    #[test]
    fn digits_round_trip(p in prime(), k in 1u32..40, a in any::<i128>()) {
        let x = PadicInt::from_integer(a, p, k).unwrap();
        let digits = x.digits();
        prop_assert_eq!(digits.len(), k as usize);
        prop_assert!(digits.iter().all(|&d| d < p));
        prop_assert_eq!(PadicInt::from_digits(&digits, p).unwrap(), x);
    }

    #[test]
    fn rationals_clear_denominators(p in prime(), k in 1u32..20, num in -10_000i128..10_000, den in 1i128..10_000) {
        prop_assume!(den % p as i128 != 0);
        let r = PadicInt::from_rational(num, den, p, k).unwrap();
        let d = PadicInt::from_integer(den, p, k).unwrap();
        prop_assert_eq!(&r * &d, PadicInt::from_integer(num, p, k).unwrap());
    }

    #[test]
    fn units_invert(p in prime(), k in 1u32..30, a in any::<i64>()) {
        prop_assume!(a.rem_euclid(p as i64) != 0);
        let x = PadicInt::from_integer(a.into(), p, k).unwrap();
        prop_assert!((&x * &x.inverse().unwrap()).is_one());
    }

    #[test]
    fn log_is_a_homomorphism(p in odd_prime(), k in 2u32..7, s in 0i128..100_000, t in 0i128..100_000) {
        let pi = p as i128;
        let x = PadicInt::from_integer(1 + pi * s, p, k).unwrap();
        let y = PadicInt::from_integer(1 + pi * t, p, k).unwrap();
        let lhs = padic_log(&(&x * &y)).unwrap();
        let rhs = &padic_log(&x).unwrap() + &padic_log(&y).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn powers_are_isometries_on_spheres((p, n, l) in system(), extra in 1u32..4, s in 1u64..10_000, t in 1u64..10_000) {
        prop_assume!(s % p != 0 && t % p != 0);
        let k = l + extra;
        let pl = p.pow(l) as i128;
        let x = PadicInt::from_integer(1 + pl * s as i128, p, k).unwrap();
        let y = PadicInt::from_integer(1 + pl * t as i128, p, k).unwrap();
        prop_assert_eq!(
            x.pow_u64(n).dist(&y.pow_u64(n)).unwrap(),
            x.dist(&y).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every depth-k ball has exactly p preimage residues one level deeper,
    /// the counting form of Haar measure invariance.
    #[test]
    fn preimages_have_the_measure_of_the_ball((p, n, l) in system(), depth in 1u32..3) {
        let sys = MonomialSystem::new(p, n, l).unwrap();
        let coarse = sphere_partition(&sys, depth).unwrap();
        let fine = sphere_partition(&sys, depth + 1).unwrap();
        let mut hits = vec![0u64; coarse.len()];
        for &x in fine.representatives() {
            let image = sys.apply(x, fine.modulus());
            hits[coarse.index_of(image).unwrap()] += 1;
        }
        prop_assert!(hits.iter().all(|&h| h == p));
    }

    #[test]
    fn birkhoff_averages_are_exact_on_minimal_systems((p, n, l) in system(), depth in 1u32..3, start in 0usize..1000) {
        prop_assume!(is_generator_g_p2(n, p).unwrap());
        let sys = MonomialSystem::new(p, n, l).unwrap();
        let part = sphere_partition(&sys, depth).unwrap();
        let m = part.len() as u64;
        let x0 = part.representatives()[start % part.len()];
        let x0 = PadicInt::from_integer(x0 as i128, p, l + depth).unwrap();
        for &center in part.representatives().iter().take(8) {
            let f = TestFunction::BallIndicator { center, depth };
            let avg = birkhoff_average(&sys, &x0, f, m).unwrap();
            prop_assert_eq!(avg.time_average, num_rational::Ratio::new(1, m));
            prop_assert_eq!(avg.time_average, avg.space_average);
        }
    }

    #[test]
    fn conjugation_preserves_the_verdict((p, n, l) in system()) {
        let sys = MonomialSystem::new(p, n, l).unwrap();
        let base = minimality_verdict(&sys, 2).unwrap();
        for a in fixed_points(&sys, l + 2).unwrap() {
            let v = conjugated_verdict(&sys, &a, 2).unwrap();
            prop_assert_eq!(v.minimal, base.minimal);
            prop_assert_eq!(v.uniquely_ergodic, base.uniquely_ergodic);
        }
    }

    #[test]
    fn product_is_never_transitive((p, n, l) in system(), depth in 1u32..3) {
        let sys = MonomialSystem::new(p, n, l).unwrap();
        let r = product_nonmixing_report(&sys, depth).unwrap();
        prop_assume!(r.ball_count >= 2);
        prop_assert!(r.product_cycle_count >= 2);
        prop_assert!(!r.product_transitive);
        if let Some(f) = r.log_ratio_invariance {
            prop_assert!(f.preserved);
            prop_assert!(f.distinct_values >= 2);
        }
    }

    #[test]
    fn verdict_flags_match_the_generator_test((p, n, l) in system()) {
        let sys = MonomialSystem::new(p, n, l).unwrap();
        let v = minimality_verdict(&sys, 3).unwrap();
        let g = is_generator_g_p2(n, p).unwrap();
        prop_assert_eq!(v.minimal, g);
        prop_assert_eq!(v.uniquely_ergodic, g);
        prop_assert_eq!(v.ergodic, g);
    }
}

#[test]
fn zero_has_saturated_valuation() {
    let z = PadicInt::zero(3, 5).unwrap();
    assert_eq!(z.valuation(), Valuation::AtLeast(5));
}
