//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toricbk::building::{Flag, Frame, GroupSpec, LabeledFlag, OnePS, SymplecticForm};
use toricbk::fan::{fan_hirzebruch, fan_p1, fan_pn, Fan};
use toricbk::field::rat;
use toricbk::linalg::{Matrix, Subspace};
use toricbk::plmap::{ApartmentChart, KlyachkoData, PLMap};
use toricbk::{Field, Rational};

pub type Q = Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(x: &[i64]) -> Vec<Q> {
    x.iter().map(|&a| rat(a)).collect()
}

pub fn random_matrix<F: Field>(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Matrix<F> {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, F::from_i64(rng.gen_range(-bound..=bound)));
        }
    }
    m
}

pub fn random_invertible<F: Field>(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Matrix<F> {
    loop {
        let m = random_matrix(rng, n, n, bound);
        if m.is_invertible() {
            return m;
        }
    }
}

pub fn random_frame<F: Field>(rng: &mut ChaCha8Rng, n: usize) -> Frame<F> {
    Frame::from_vectors(&random_invertible::<F>(rng, n, 2).column_vectors()).unwrap()
}

/// A flag spanned by leading columns of a random invertible matrix, of random type.
pub fn random_flag<F: Field>(rng: &mut ChaCha8Rng, n: usize) -> Flag<F> {
    let g = random_invertible::<F>(rng, n, 2);
    let cols = g.column_vectors();
    let dims: Vec<usize> = (1..n).filter(|_| rng.gen_bool(0.5)).collect();
    let pieces = dims.iter().map(|&d| Subspace::span(n, &cols[..d]).unwrap()).collect();
    Flag::from_pieces_completing(n, pieces).unwrap()
}

/// A random nontrivial flag.
pub fn random_proper_flag<F: Field>(rng: &mut ChaCha8Rng, n: usize) -> Flag<F> {
    loop {
        let f = random_flag(rng, n);
        if !f.is_trivial() {
            return f;
        }
    }
}

/// A GL(r) map on the P^1 fan with random frames and weights in `[-bound, bound]`.
pub fn random_p1_map(rng: &mut ChaCha8Rng, r: usize, bound: i64) -> PLMap<Q> {
    let charts = (0..2)
        .map(|_| ApartmentChart::new(random_frame(rng, r), random_matrix(rng, r, 1, bound)).unwrap())
        .collect();
    PLMap::new(GroupSpec::gl(r), fan_p1(), charts).unwrap()
}

/// A random one-parameter subgroup with weights in `[-2, 2]`.
pub fn random_onepar<F: Field>(rng: &mut ChaCha8Rng, r: usize) -> OnePS<F> {
    let weights = (0..r).map(|_| rng.gen_range(-2..=2)).collect();
    OnePS::new(random_frame(rng, r), weights).unwrap()
}

/// A random element of the parabolic of `λ`: block triangular in `λ`'s frame.
pub fn random_parabolic_element<F: Field>(rng: &mut ChaCha8Rng, l: &OnePS<F>) -> Matrix<F> {
    let r = l.dim();
    let u = l.frame().matrix();
    let w = l.weights();
    loop {
        let mut y = Matrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                if w[i] >= w[j] {
                    y.set(i, j, F::from_i64(rng.gen_range(-2..=2)));
                }
            }
        }
        if y.is_invertible() {
            return u.mul(&y).unwrap().mul(&u.inverse().unwrap()).unwrap();
        }
    }
}

/// A random element of Sp for the standard form: a product of transvections `x ↦ x + c ω(v, x) v`.
pub fn random_symplectic(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Q> {
    let w = SymplecticForm::<Q>::standard(n).unwrap();
    let mut g = Matrix::identity(n);
    for _ in 0..4 {
        let v: Vec<Q> = (0..n).map(|_| rat(rng.gen_range(-1..=1))).collect();
        let c = rat(rng.gen_range(-2..=2));
        // row vector v^T Ω
        let vo = w.gram().transpose().mul_vec(&v).unwrap();
        let mut t = Matrix::<Q>::identity(n);
        for i in 0..n {
            for j in 0..n {
                let e = t.get(i, j).clone();
                t.set(i, j, e.add(&c.mul(&v[i]).mul(&vo[j])));
            }
        }
        g = t.mul(&g).unwrap();
    }
    g
}

/// A random isotropic labeled flag of `Q^4` (standard form) with symmetric integer labels.
pub fn random_isotropic_point(rng: &mut ChaCha8Rng) -> LabeledFlag<Q> {
    let n = 4;
    let g = random_symplectic(rng, n);
    // Standard order e1, e2, f1, f2.
    let e1 = Subspace::coordinate(n, &[0]);
    let lag = Subspace::coordinate(n, &[0, 1]);
    let hyper = Subspace::coordinate(n, &[0, 1, 3]);
    let a = rng.gen_range(1..=4);
    let (pieces, labels) = match rng.gen_range(0..4) {
        0 => (vec![], vec![0]),
        1 => (vec![lag], vec![a, -a]),
        2 => (vec![e1, hyper], vec![a, 0, -a]),
        _ => {
            let b = rng.gen_range(1..=a);
            (vec![e1, lag, hyper], vec![a + 1, b, -b, -a - 1])
        }
    };
    let f = Flag::from_pieces_completing(n, pieces).unwrap().image(&g).unwrap();
    LabeledFlag::new(f, q(&labels)).unwrap()
}

pub fn random_surface_fan(rng: &mut ChaCha8Rng) -> Fan {
    if rng.gen_bool(0.5) {
        fan_pn(2).unwrap()
    } else {
        fan_hirzebruch(rng.gen_range(0..=2)).unwrap()
    }
}

/// A genuine Sp(4) map built from random isotropic ray data.
pub fn random_sp4_map(rng: &mut ChaCha8Rng) -> PLMap<Q> {
    let fan = random_surface_fan(rng);
    let rays = (0..fan.rays().len()).map(|_| random_isotropic_point(rng)).collect();
    let k = KlyachkoData::new(GroupSpec::sp(4).unwrap(), fan, rays).unwrap();
    PLMap::from_klyachko(&k).unwrap()
}

/// A GL(r) map on a surface fan from random ray flags with labels in `[-3, 3]`.
pub fn random_surface_map(rng: &mut ChaCha8Rng, r: usize) -> PLMap<Q> {
    let fan = random_surface_fan(rng);
    let rays = (0..fan.rays().len())
        .map(|_| {
            let f: Flag<Q> = random_flag(rng, r);
            let mut labels: Vec<i64> = Vec::new();
            let mut top = rng.gen_range(-1..=3);
            for _ in 0..f.num_pieces() {
                labels.push(top);
                top -= rng.gen_range(1..=2);
            }
            LabeledFlag::new(f, q(&labels)).unwrap()
        })
        .collect();
    let k = KlyachkoData::new(GroupSpec::gl(r), fan, rays).unwrap();
    PLMap::from_klyachko(&k).unwrap()
}
