mod common;

use proptest::prelude::*;

use common::*;
use toricbk::building::oracle::FrameOracle;
use toricbk::building::onepar::{in_parabolic, in_parabolic_via_limit, ParabolicDescriptor};
use toricbk::building::{common_frame, is_adapted, ApartmentVerdict, Flag, GroupSpec};
use toricbk::linalg::Matrix;
use toricbk::{Field, F3, F5};

fn parabolic_tests_agree<F: Field>(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let r = 2 + (seed % 3) as usize;
    let l = random_onepar::<F>(&mut rng, r);
    let p = ParabolicDescriptor::new(GroupSpec::gl(r), toricbk::building::onepar::class_of(&l).flag().clone())
        .unwrap();
    let g: Matrix<F> = if seed % 2 == 0 {
        random_parabolic_element(&mut rng, &l)
    } else {
        random_invertible(&mut rng, r, 2)
    };
    let direct = in_parabolic(&g, &p).unwrap();
    prop_assert_eq!(direct, in_parabolic_via_limit(&g, &p).unwrap());
    if seed % 2 == 0 {
        prop_assert!(direct);
    }
    Ok(())
}

fn family<F: Field>(seed: u64, n: usize) -> Vec<Flag<F>> {
    let mut rng = rng(seed);
    let k = 2 + (seed % 3) as usize;
    (0..k).map(|_| random_proper_flag(&mut rng, n)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parabolic_membership_over_q(seed in any::<u64>()) { parabolic_tests_agree::<Q>(seed)?; }

    #[test]
    fn parabolic_membership_over_f5(seed in any::<u64>()) { parabolic_tests_agree::<F5>(seed)?; }

    #[test]
    fn found_frames_are_adapted(seed in any::<u64>()) {
        let n = 2 + (seed % 3) as usize;
        let flags = family::<Q>(seed, n);
        if let ApartmentVerdict::Found { frame, .. } = common_frame(&flags, &GroupSpec::gl(n)).unwrap() {
            for f in &flags {
                prop_assert!(is_adapted(f, &frame).unwrap());
            }
        }
    }

    #[test]
    fn verdicts_are_conjugation_invariant(seed in any::<u64>()) {
        let n = 2 + (seed % 3) as usize;
        let flags = family::<Q>(seed, n);
        let g: Matrix<Q> = random_invertible(&mut rng(seed ^ 0xabc), n, 2);
        let moved: Vec<Flag<Q>> = flags.iter().map(|f| f.image(&g).unwrap()).collect();
        let a = common_frame(&flags, &GroupSpec::gl(n)).unwrap();
        let b = common_frame(&moved, &GroupSpec::gl(n)).unwrap();
        prop_assert_eq!(
            matches!(a, ApartmentVerdict::Found { .. }),
            matches!(b, ApartmentVerdict::Found { .. })
        );
        prop_assert!(!matches!(a, ApartmentVerdict::Undetermined(_)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lattice_agrees_with_oracle_over_f3(seed in any::<u64>()) {
        let n = 3;
        let flags = family::<F3>(seed, n);
        let oracle = FrameOracle::<F3>::new(n, 1_000_000).unwrap();
        let found = oracle.common_frame(&flags).unwrap().is_some();
        let v = common_frame(&flags, &GroupSpec::gl(n)).unwrap();
        prop_assert_eq!(found, matches!(v, ApartmentVerdict::Found { .. }));
    }
}
