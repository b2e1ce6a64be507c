mod common;

use proptest::prelude::*;

use common::*;
use toricbk::linalg::{kernel, Matrix, Subspace};
use toricbk::{Field, F2, F3};

fn rref_laws<F: Field>(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let rows = 1 + (seed % 5) as usize;
    let cols = 1 + (seed / 5 % 5) as usize;
    let m: Matrix<F> = random_matrix(&mut rng, rows, cols, 3);
    let e = m.rref();
    prop_assert_eq!(e.reduced.rref().reduced, e.reduced.clone());
    prop_assert_eq!(m.rank() + kernel(&m).dim(), cols);
    prop_assert_eq!(m.rank(), m.transpose().rank());
    for v in kernel(&m).basis_vectors() {
        prop_assert!(m.mul_vec(&v).unwrap().iter().all(|x| x.is_zero()));
    }
    Ok(())
}

fn random_subspace<F: Field>(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Subspace<F> {
    let k = rand::Rng::gen_range(rng, 0..=n);
    Subspace::row_space(&random_matrix(rng, k, n, 2))
}

fn lattice_laws<F: Field>(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let n = 2 + (seed % 3) as usize;
    let a = random_subspace::<F>(&mut rng, n);
    let b = random_subspace::<F>(&mut rng, n);
    let c = a.sum(&random_subspace(&mut rng, n)).unwrap();
    // Modular law for A ⊆ C.
    let lhs = a.sum(&b).unwrap().intersect(&c).unwrap();
    let rhs = a.sum(&b.intersect(&c).unwrap()).unwrap();
    prop_assert_eq!(lhs, rhs);
    prop_assert_eq!(
        a.sum(&b).unwrap().dim() + a.intersect(&b).unwrap().dim(),
        a.dim() + b.dim()
    );
    prop_assert_eq!(a.annihilator().annihilator(), a.clone());
    let comp = a.complement_in(&a.intersect(&b).unwrap()).unwrap();
    prop_assert_eq!(comp.len(), a.dim() - a.intersect(&b).unwrap().dim());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rref_over_q(seed in any::<u64>()) { rref_laws::<Q>(seed)?; }

    #[test]
    fn rref_over_f2(seed in any::<u64>()) { rref_laws::<F2>(seed)?; }

    #[test]
    fn rref_over_f3(seed in any::<u64>()) { rref_laws::<F3>(seed)?; }

    #[test]
    fn subspace_lattice_over_q(seed in any::<u64>()) { lattice_laws::<Q>(seed)?; }

    #[test]
    fn subspace_lattice_over_f2(seed in any::<u64>()) { lattice_laws::<F2>(seed)?; }

    #[test]
    fn subspace_lattice_over_f3(seed in any::<u64>()) { lattice_laws::<F3>(seed)?; }

    #[test]
    fn inverse_and_determinant(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = 1 + (seed % 4) as usize;
        let g: Matrix<Q> = random_invertible(&mut rng, n, 3);
        let h: Matrix<Q> = random_invertible(&mut rng, n, 3);
        prop_assert_eq!(g.mul(&g.inverse().unwrap()).unwrap(), Matrix::identity(n));
        prop_assert_eq!(g.mul(&h).unwrap().det().unwrap(), g.det().unwrap().mul(&h.det().unwrap()));
    }
}
