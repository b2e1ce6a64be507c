mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use toricbk::analysis::{aut_report, decide_split, decide_reduction_sp, SpSearch, Verdict};
use toricbk::building::{is_adapted, GroupSpec};
use toricbk::field::rat;
use toricbk::linalg::Matrix;
use toricbk::plmap::{KlyachkoData, PLMap};
use toricbk::Field;

fn random_point(rng: &mut rand_chacha::ChaCha8Rng, p: &PLMap<Q>) -> Vec<Q> {
    let fan = p.fan();
    let cone = rng.gen_range(0..fan.cones().len());
    let mut v = vec![rat(0); fan.rank()];
    for &r in &fan.cones()[cone] {
        let c = rat(rng.gen_range(1..=3));
        for (x, &y) in v.iter_mut().zip(fan.ray(r)) {
            *x = x.add(&c.mul(&rat(y)));
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn klyachko_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_surface_map(&mut rng, 2 + (seed % 2) as usize);
        prop_assert!(p.validate().unwrap().is_ok());
        let k = KlyachkoData::new(p.group().clone(), p.fan().clone(), p.ray_flags().unwrap()).unwrap();
        let back = PLMap::from_klyachko(&k).unwrap();
        prop_assert_eq!(back.ray_flags().unwrap(), p.ray_flags().unwrap());
        let v = random_point(&mut rng, &p);
        prop_assert_eq!(back.eval(&v).unwrap(), p.eval(&v).unwrap());
    }

    #[test]
    fn evaluation_is_homogeneous(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_surface_map(&mut rng, 3);
        let v = random_point(&mut rng, &p);
        let t = rat(rng.gen_range(1..=4));
        let a = p.eval(&v).unwrap();
        let tv: Vec<Q> = v.iter().map(|x| x.mul(&t)).collect();
        let b = p.eval(&tv).unwrap();
        prop_assert_eq!(a.flag(), b.flag());
        let scaled: Vec<Q> = a.labels().iter().map(|x| x.mul(&t)).collect();
        prop_assert_eq!(b.labels(), &scaled[..]);
    }

    #[test]
    fn conjugation_is_equivariant(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_surface_map(&mut rng, 3);
        let g: Matrix<Q> = random_invertible(&mut rng, 3, 2);
        let pg = p.conjugate(&g).unwrap();
        prop_assert!(pg.validate().unwrap().is_ok());
        prop_assert_eq!(pg.conjugate(&g.inverse().unwrap()).unwrap().ray_flags().unwrap(), p.ray_flags().unwrap());
        let v = random_point(&mut rng, &p);
        let moved = p.eval(&v).unwrap().image(&g.inverse().unwrap()).unwrap();
        prop_assert_eq!(pg.eval(&v).unwrap(), moved);
        let a = decide_split(&p).unwrap();
        let b = decide_split(&pg).unwrap();
        prop_assert_eq!(a.is_yes(), b.is_yes());
    }

    #[test]
    fn split_frames_adapt_to_every_value(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = if seed % 2 == 0 { random_surface_map(&mut rng, 3) } else { random_p1_map(&mut rng, 3, 3) };
        if let Verdict::Yes(frame) = decide_split(&p).unwrap() {
            for _ in 0..5 {
                let v = random_point(&mut rng, &p);
                prop_assert!(is_adapted(p.eval(&v).unwrap().flag(), &frame).unwrap());
            }
        }
    }

    #[test]
    fn aut_membership_matches_ray_stabilizers(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_surface_map(&mut rng, 3);
        let aut = aut_report(&p).unwrap();
        prop_assert_eq!(aut.dimension, aut.dimension_by_intersection);
        let g: Matrix<Q> = random_invertible(&mut rng, 3, 1);
        let expected = p.ray_flags().unwrap().iter().all(|f| f.flag().is_stabilized_by(&g).unwrap());
        prop_assert_eq!(aut.contains(&g).unwrap(), expected);
        prop_assert!(aut.contains(&Matrix::identity(3)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn genuine_sp_maps_are_recognized(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_sp4_map(&mut rng);
        let gl = PLMap::new(GroupSpec::gl(4), p.fan().clone(), p.charts().to_vec()).unwrap();
        match decide_reduction_sp(&gl, &SpSearch::default()).unwrap() {
            Verdict::Yes(cert) => prop_assert!(cert.verify(&gl).unwrap()),
            Verdict::No(reason) => prop_assert!(false, "genuine Sp map rejected: {}", reason),
            Verdict::Undetermined(_) => {}
        }
    }
}
