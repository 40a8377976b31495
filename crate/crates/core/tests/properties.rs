use bernoulli_cubic::mt::{
    load_recurrence_matrices, match_count_model, mt_outputs, recover_matrices, scan_conditions_ab, temper, untemper,
};
use bernoulli_cubic::roots::poly_sign_at_dyadic;
use bernoulli_cubic::stats::{monobit, run_suite, DEFAULT_ALPHA};
use bernoulli_cubic::{
    build_seed_set, gap_report, generate_bits, generate_bits_with, inverse_step, isolate_root_bits, BitStream,
    CoeffTriple, DiscriminantClass, GenerateOptions,
};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use std::cmp::Ordering;

fn admissible() -> impl Strategy<Value = CoeffTriple> {
    (-40i64..40, 1i64..3000, 1i64..3000).prop_filter_map("admissible", |(b, c, nd)| CoeffTriple::new(b, c, -nd).ok())
}

/// Triples on the `b² = 3c` boundary: `b = 3k`, `c = 3k²`.
fn zero_class() -> impl Strategy<Value = CoeffTriple> {
    (-6i64..6, 1i64..400).prop_filter_map("admissible", |(k, nd)| CoeffTriple::new(3 * k, 3 * k * k, -nd).ok())
}

fn max_abs(t: &CoeffTriple) -> BigInt {
    [t.b(), t.c(), t.d()].into_iter().map(|x| x.abs()).max().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orbit_stays_admissible_and_invertible(seed in prop_oneof![admissible(), zero_class()]) {
        let mut t = seed;
        for _ in 0..1500 {
            let class = t.discriminant_class();
            let (next, bit) = t.step();
            prop_assert_eq!(bit, t.branch().bit());
            let (b, c, d) = next.clone().into_parts();
            prop_assert!(CoeffTriple::new(b, c, d).is_ok());
            prop_assert_eq!(next.discriminant_class(), class);
            prop_assert!(max_abs(&next) <= max_abs(&t) * 14 + 3);
            prop_assert_eq!(inverse_step(&next), Some(t));
            t = next;
        }
    }

    #[test]
    fn generator_matches_bisection(seed in admissible(), k in 0usize..=512) {
        let (fast, _) = generate_bits(&seed, k).unwrap();
        let (slow, interval) = isolate_root_bits(&seed, k).unwrap();
        prop_assert_eq!(fast, slow);
        prop_assert_eq!(poly_sign_at_dyadic(&seed, &interval.lo), Ordering::Less);
        prop_assert_eq!(poly_sign_at_dyadic(&seed, &interval.hi), Ordering::Greater);
    }

    #[test]
    fn block_width_does_not_change_output(seed in admissible(), width in 32usize..600) {
        let n = 6000;
        let opts = GenerateOptions { block_bits: width, max_coeff_bits: None };
        let (a, sa) = generate_bits_with(&seed, n, &opts).unwrap();
        let (b, sb) = generate_bits_with(&seed, n, &GenerateOptions::single_step()).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn parity_rule_gives_source_points(b in -8i64..8, extra in 0i64..60) {
        let c = (b * b + 2) / 3 + extra;
        if let Ok(set) = build_seed_set(b, c) {
            if set.parity_rule {
                prop_assert!(set.all_source_points());
            }
        }
    }

    #[test]
    fn gaps_are_ordered_and_bounded(c in 4i64..160) {
        let set = build_seed_set(0, c).unwrap();
        let report = gap_report(&set, 48).unwrap();
        let zero = bernoulli_cubic::DyadicRational::zero();
        for g in &report.gaps {
            prop_assert!(g.lower > zero);
        }
        prop_assert_eq!(report.within_mean_value_bounds(0), Some(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mt_lag_pairs_lie_on_diagonal(seed in any::<u32>()) {
        let words = mt_outputs(seed, 60_000);
        let (a, b) = load_recurrence_matrices().unwrap();
        let pairs = scan_conditions_ab(&words, &a, &b).unwrap();
        prop_assert!(pairs.iter().all(|p| p.on_diagonal()));
        let (mean, sd) = match_count_model(words.len());
        prop_assert!((pairs.len() as f64 - mean).abs() < 6.0 * sd);
    }

    #[test]
    fn recovery_is_seed_independent(seed in any::<u32>()) {
        let words = mt_outputs(seed, 3000);
        prop_assert_eq!(recover_matrices(&words).unwrap(), load_recurrence_matrices().unwrap());
    }

    #[test]
    fn suite_is_deterministic_and_in_range(words in prop::collection::vec(any::<u32>(), 400..1200)) {
        let s = BitStream::from_words(&words);
        let first = run_suite(&s, DEFAULT_ALPHA).unwrap();
        prop_assert_eq!(&first, &run_suite(&s, DEFAULT_ALPHA).unwrap());
        for t in &first.tests {
            prop_assert!((0.0..=1.0).contains(&t.p_value));
            prop_assert_eq!(t.passed, t.p_value >= DEFAULT_ALPHA);
        }
    }
}

proptest! {
    #[test]
    fn untemper_inverts_temper(x in any::<u32>()) {
        prop_assert_eq!(untemper(temper(x)), x);
    }

    #[test]
    fn monobit_ignores_complement(bits in prop::collection::vec(any::<bool>(), 100..2000)) {
        let s: BitStream = bits.into_iter().collect();
        prop_assert_eq!(monobit(&s).unwrap(), monobit(&s.complement()).unwrap());
    }
}

#[test]
fn zero_class_strategy_hits_the_boundary() {
    let t = CoeffTriple::new(3, 3, -1).unwrap();
    assert_eq!(t.discriminant_class(), DiscriminantClass::Zero);
}
