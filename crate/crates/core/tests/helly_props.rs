mod common;

use std::collections::HashSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::index::sample;

use common::*;
use toricbk::building::GroupSpec;
use toricbk::fan::Cone;
use toricbk::field::rat;
use toricbk::helly::HellySearch;
use toricbk::F2;

fn search() -> &'static HellySearch<F2> {
    static S: OnceLock<HellySearch<F2>> = OnceLock::new();
    S.get_or_init(|| HellySearch::new(GroupSpec::gl(3), 1_000_000).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn coherence_is_inherited_by_subfamilies(seed in any::<u64>()) {
        let s = search();
        let mut rng = rng(seed);
        let k = 2 + (seed % 4) as usize;
        let family = sample(&mut rng, s.flags().len(), k).into_vec();
        if s.coherent(&family).unwrap() {
            for drop in 0..k {
                let mut sub = family.clone();
                sub.remove(drop);
                prop_assert!(s.coherent(&sub).unwrap());
            }
        }
    }

    #[test]
    fn lattice_points_of_a_cone_are_generated(seed in any::<u64>()) {
        let a: Vec<i64> = vec![1 + (seed % 4) as i64, -((seed / 4 % 5) as i64)];
        let b: Vec<i64> = vec![-((seed / 20 % 3) as i64), 1 + (seed / 60 % 4) as i64];
        let cone = match Cone::new(2, vec![a, b]) {
            Ok(c) => c,
            Err(_) => return Ok(()),
        };
        if !cone.is_strongly_convex() {
            prop_assert!(cone.lattice_generators().is_err());
            return Ok(());
        }
        let gens = cone.lattice_generators().unwrap();
        for g in &gens {
            prop_assert!(cone.contains(&[rat(g[0]), rat(g[1])]));
        }
        // Every lattice point in a box is a nonnegative integer combination of the generators.
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                if (x, y) == (0, 0) || !cone.contains(&[rat(x), rat(y)]) {
                    continue;
                }
                prop_assert!(representable(&cone, &gens, x, y, &mut HashSet::new()), "({}, {}) not generated", x, y);
            }
        }
    }
}

/// Depth-first decomposition; the remainder stays in the cone so the search terminates.
fn representable(cone: &Cone, gens: &[Vec<i64>], x: i64, y: i64, seen: &mut HashSet<(i64, i64)>) -> bool {
    if (x, y) == (0, 0) {
        return true;
    }
    if !seen.insert((x, y)) {
        return false;
    }
    gens.iter().any(|g| {
        let (rx, ry) = (x - g[0], y - g[1]);
        (rx.abs() <= 64 && ry.abs() <= 64)
            && ((rx, ry) == (0, 0) || cone.contains(&[rat(rx), rat(ry)]))
            && representable(cone, gens, rx, ry, seen)
    })
}
