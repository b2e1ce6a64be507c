//! Exact feasibility for `A x = b, x >= 0` (phase-one simplex, Bland's rule).

use crate::field::{Field, Rational};
use crate::linalg::matrix::Matrix;

/// Returns a nonnegative solution of `a x = b`, or `None` when none exists.
pub fn feasible_point(a: &Matrix<Rational>, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.rows(), b.len(), "rhs length");
    let m = a.rows();
    let n = a.cols();
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i] < Rational::zero();
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[j] = if flip { a.get(i, j).neg() } else { a.get(i, j).clone() };
        }
        row[n + i] = Rational::one();
        row[rhs] = if flip { b[i].neg() } else { b[i].clone() };
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Reduced cost of column j for the phase-one objective sum(artificials).
        let entering = (0..n + m).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut rc = if j >= n { Rational::one() } else { Rational::zero() };
            for (i, row) in t.iter().enumerate() {
                if basis[i] >= n {
                    rc = rc.sub(&row[j]);
                }
            }
            rc < Rational::zero()
        });
        let Some(col) = entering else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[col] > Rational::zero() {
                let ratio = row[rhs].div(&row[col]).expect("positive pivot");
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // Unbounded direction cannot occur: the objective is bounded below by 0.
            unreachable!("phase-one objective is bounded");
        };
        pivot(&mut t, r, col);
        basis[r] = col;
    }

    let infeasible = t.iter().enumerate().any(|(i, row)| basis[i] >= n && !row[rhs].is_zero());
    if infeasible {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][rhs].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], r: usize, c: usize) {
    let inv = t[r][c].inv().expect("nonzero pivot");
    for x in t[r].iter_mut() {
        *x = x.mul(&inv);
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, p) in row.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x = x.sub(&f.mul(p));
            }
        }
    }
}

/// Whether `v` is a nonnegative combination of `generators`.
pub fn in_cone(generators: &[Vec<Rational>], v: &[Rational]) -> bool {
    cone_coefficients(generators, v).is_some()
}

/// Nonnegative coefficients expressing `v` in terms of `generators`, if any.
pub fn cone_coefficients(generators: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    let n = v.len();
    if generators.is_empty() {
        return v.iter().all(Field::is_zero).then(Vec::new);
    }
    let a = Matrix::from_columns(n, generators).expect("generator length");
    feasible_point(&a, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn simple_feasibility() {
        let a = Matrix::<Rational>::from_i64_rows(&[&[1, 1]]);
        let x = feasible_point(&a, &q(&[3])).unwrap();
        assert!(x.iter().all(|v| *v >= rat(0)));
        assert_eq!(x[0].add(&x[1]), rat(3));
        assert!(feasible_point(&a, &q(&[-1])).is_none());
    }

    #[test]
    fn cone_membership() {
        let gens = vec![q(&[1, 0]), q(&[1, 2])];
        assert!(in_cone(&gens, &q(&[1, 1])));
        assert!(in_cone(&gens, &q(&[0, 0])));
        assert!(!in_cone(&gens, &q(&[0, 1])));
        assert!(!in_cone(&gens, &q(&[-1, 0])));
    }

    #[test]
    fn degenerate_rows() {
        // Redundant equality rows keep an artificial variable basic at zero.
        let a = Matrix::<Rational>::from_i64_rows(&[&[1, 1, 0], &[2, 2, 0], &[0, 0, 1]]);
        let x = feasible_point(&a, &q(&[1, 2, 5])).unwrap();
        assert_eq!(x[2], rat(5));
        assert!(feasible_point(&a, &q(&[1, 3, 5])).is_none());
    }
}
