//! Diagonalizable one-parameter subgroups, their equivalence, and parabolic membership.

use std::collections::BTreeMap;
use std::fmt;

use crate::building::flag::{flag_of_weights, Flag, Frame, LabeledFlag};
use crate::building::group::GroupSpec;
use crate::error::{check_dim, Error, Result};
use crate::field::{Field, Rational};
use crate::linalg::Matrix;

/// A Laurent polynomial in one variable `s`, stored sparsely (exponent -> nonzero coefficient).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly<F> {
    terms: BTreeMap<i64, F>,
}

impl<F: Field> LaurentPoly<F> {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn monomial(c: F, e: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &F)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn coefficient(&self, e: i64) -> F {
        self.terms.get(&e).cloned().unwrap_or_else(F::zero)
    }

    fn add_term(&mut self, e: i64, c: F) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(F::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1.mul(c2));
            }
        }
        out
    }
}

impl<F: Field> fmt::Debug for LaurentPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}*s^{e}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Square matrix of Laurent polynomials.
pub type LaurentMatrix<F> = Vec<Vec<LaurentPoly<F>>>;

fn laurent_mul<F: Field>(a: &LaurentMatrix<F>, b: &LaurentMatrix<F>) -> LaurentMatrix<F> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(LaurentPoly::zero(), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

/// `λ(s) = U diag(s^{w_1}, ..., s^{w_r}) U^{-1}` with `U` the frame matrix.
///
/// The weights are stored in the order of the frame's canonical line order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OnePS<F> {
    frame: Frame<F>,
    weights: Vec<i64>,
}

impl<F: Field> OnePS<F> {
    pub fn new(frame: Frame<F>, weights: Vec<i64>) -> Result<Self> {
        check_dim(frame.ambient(), weights.len())?;
        Ok(OnePS { frame, weights })
    }

    /// From unsorted `(vector, weight)` pairs; the weights follow their lines.
    pub fn from_pairs(vectors: &[Vec<F>], weights: &[i64]) -> Result<Self> {
        check_dim(vectors.len(), weights.len())?;
        let frame = Frame::from_vectors(vectors)?;
        let mut sorted = vec![0; weights.len()];
        for (v, w) in vectors.iter().zip(weights) {
            let pos = frame.position(&crate::linalg::Subspace::line(v)?).expect("line of the frame");
            sorted[pos] = *w;
        }
        Ok(OnePS { frame, weights: sorted })
    }

    pub fn diagonal(weights: &[i64]) -> Self {
        OnePS { frame: Frame::standard(weights.len()), weights: weights.to_vec() }
    }

    pub fn frame(&self) -> &Frame<F> {
        &self.frame
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `λ(s)` (or `λ(s)^{-1}` when `invert`) as a Laurent matrix.
    pub fn laurent_matrix(&self, invert: bool) -> LaurentMatrix<F> {
        let u = self.frame.matrix();
        let uinv = u.inverse().expect("frame matrix is invertible");
        let n = self.dim();
        let sign = if invert { -1 } else { 1 };
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut p = LaurentPoly::zero();
                        for k in 0..n {
                            p.add_term(sign * self.weights[k], u.get(i, k).mul(uinv.get(k, j)));
                        }
                        p
                    })
                    .collect()
            })
            .collect()
    }

    /// `g λ g^{-1}`: the frame moves by `g`, the weights stay with their lines.
    pub fn conjugate(&self, g: &Matrix<F>) -> Result<Self> {
        if !g.is_invertible() {
            return Err(Error::Singular);
        }
        let vs = self.frame.vectors().iter().map(|v| g.mul_vec(v)).collect::<Result<Vec<_>>>()?;
        Self::from_pairs(&vs, &self.weights)
    }
}

impl<F: Field> fmt::Debug for OnePS<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OnePS({:?}, {:?})", self.frame, self.weights)
    }
}

/// `λ_a(s) λ_b(s)^{-1}`.
pub fn quotient_matrix<F: Field>(a: &OnePS<F>, b: &OnePS<F>) -> Result<LaurentMatrix<F>> {
    check_dim(a.dim(), b.dim())?;
    Ok(laurent_mul(&a.laurent_matrix(false), &b.laurent_matrix(true)))
}

/// Whether `lim_{s -> 0} λ_a(s) λ_b(s)^{-1}` exists in the group.
///
/// The limit exists as a matrix iff no entry has a negative exponent; it lies
/// in the group iff, in addition, the constant term is invertible.
pub fn equivalent<F: Field>(a: &OnePS<F>, b: &OnePS<F>) -> Result<bool> {
    let m = quotient_matrix(a, b)?;
    if m.iter().flatten().any(|p| p.min_degree().is_some_and(|d| d < 0)) {
        return Ok(false);
    }
    let n = m.len();
    let mut m0 = Matrix::zeros(n, n);
    for (i, row) in m.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            m0.set(i, j, p.coefficient(0));
        }
    }
    Ok(m0.is_invertible())
}

/// The labeled flag of a one-parameter subgroup: level sets of its weights.
pub fn class_of<F: Field>(a: &OnePS<F>) -> LabeledFlag<F> {
    let w: Vec<Rational> = a.weights.iter().map(|&x| Rational::from_i64(x)).collect();
    flag_of_weights(&a.frame, &w).expect("weights match the frame")
}

/// A representative one-parameter subgroup of an integral labeled flag.
pub fn one_param_of<F: Field>(lf: &LabeledFlag<F>) -> Result<OnePS<F>> {
    if !lf.is_integral() {
        return Err(Error::NonIntegral(format!("{lf:?}")));
    }
    let n = lf.flag().ambient();
    let mut vectors = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut prev = crate::linalg::Subspace::zero(n);
    for (p, c) in lf.flag().pieces().iter().zip(lf.labels()) {
        let c = i64::try_from(c.to_integer()).map_err(|_| Error::NonIntegral(format!("label {c} out of range")))?;
        for v in p.complement_in(&prev)? {
            vectors.push(v);
            weights.push(c);
        }
        prev = p.clone();
    }
    OnePS::from_pairs(&vectors, &weights)
}

/// A parabolic subgroup, described by the flag it stabilizes.
#[derive(Clone, PartialEq, Eq)]
pub struct ParabolicDescriptor<F> {
    group: GroupSpec<F>,
    flag: Flag<F>,
}

impl<F: Field> ParabolicDescriptor<F> {
    pub fn new(group: GroupSpec<F>, flag: Flag<F>) -> Result<Self> {
        if !group.admits_flag(&flag)? {
            return Err(Error::InvalidFlag("flag is not isotropic for the form".into()));
        }
        Ok(ParabolicDescriptor { group, flag })
    }

    pub fn group(&self) -> &GroupSpec<F> {
        &self.group
    }

    pub fn flag(&self) -> &Flag<F> {
        &self.flag
    }

    /// A one-parameter subgroup whose parabolic is this one.
    pub fn representative(&self) -> OnePS<F> {
        let k = self.flag.num_pieces() as i64;
        let labels = (0..k).rev().map(Rational::from_i64).collect();
        let lf = LabeledFlag::new(self.flag.clone(), labels).expect("decreasing labels");
        one_param_of(&lf).expect("integral labels")
    }
}

impl<F: Field> fmt::Debug for ParabolicDescriptor<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Parabolic({:?}, {:?})", self.group, self.flag)
    }
}

fn check_invertible<F: Field>(g: &Matrix<F>, n: usize) -> Result<()> {
    check_dim(n, g.rows())?;
    check_dim(n, g.cols())?;
    if g.is_invertible() {
        Ok(())
    } else {
        Err(Error::Singular)
    }
}

/// Membership by the stabilizer test `g F_i = F_i`, plus membership in the group.
pub fn in_parabolic<F: Field>(g: &Matrix<F>, p: &ParabolicDescriptor<F>) -> Result<bool> {
    check_invertible(g, p.group.size())?;
    Ok(p.group.contains(g)? && p.flag.is_stabilized_by(g)?)
}

/// Membership by the limit criterion `g λ g^{-1} ~ λ`, plus membership in the group.
pub fn in_parabolic_via_limit<F: Field>(g: &Matrix<F>, p: &ParabolicDescriptor<F>) -> Result<bool> {
    check_invertible(g, p.group.size())?;
    if !p.group.contains(g)? {
        return Ok(false);
    }
    let lambda = p.representative();
    equivalent(&lambda.conjugate(g)?, &lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, F5};
    use crate::linalg::Subspace;

    type Q = Rational;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| rat(a)).collect()
    }

    #[test]
    fn laurent_arithmetic_cancels() {
        let a = LaurentPoly::<Q>::monomial(rat(1), -1).add(&LaurentPoly::monomial(rat(2), 0));
        let b = LaurentPoly::<Q>::monomial(rat(-1), -1);
        let s = a.add(&b);
        assert_eq!(s.min_degree(), Some(0));
        let p = a.mul(&LaurentPoly::monomial(rat(1), 1));
        assert_eq!(p.coefficient(0), rat(1));
        assert_eq!(p.coefficient(1), rat(2));
    }

    #[test]
    fn equivalence_examples() {
        let a = OnePS::<Q>::diagonal(&[1, 0]);
        assert!(equivalent(&a, &a).unwrap());

        // Same level-set flag <e1>, different frame: M(s) = [[1, 1 - s], [0, 1]].
        let b = OnePS::from_pairs(&[v(&[1, 0]), v(&[1, 1])], &[1, 0]).unwrap();
        let m = quotient_matrix(&b, &a).unwrap();
        assert_eq!(m[0][1].coefficient(0), rat(1));
        assert_eq!(m[0][1].coefficient(1), rat(-1));
        assert!(equivalent(&a, &b).unwrap());
        assert!(equivalent(&b, &a).unwrap());

        // Level-set flag <(1,1)> instead: a degree -1 term appears.
        let c = OnePS::from_pairs(&[v(&[1, 1]), v(&[0, 1])], &[1, 0]).unwrap();
        let m = quotient_matrix(&a, &c).unwrap();
        assert!(m.iter().flatten().any(|p| p.min_degree() == Some(-1)));
        assert!(!equivalent(&a, &c).unwrap());
        assert_ne!(class_of(&a), class_of(&c));
        assert_eq!(class_of(&a), class_of(&b));
    }

    #[test]
    fn shifted_weights_are_not_equivalent() {
        // λ_a λ_b^{-1} = diag(s, 1) has a limit, but it is singular.
        let a = OnePS::<Q>::diagonal(&[1, 0]);
        let b = OnePS::<Q>::diagonal(&[0, 0]);
        assert!(!equivalent(&a, &b).unwrap());
        assert_ne!(class_of(&a), class_of(&b));
    }

    #[test]
    fn classes() {
        let lf = class_of(&OnePS::<Q>::diagonal(&[2, 1, 1]));
        assert_eq!(lf.labels(), &[rat(2), rat(1)][..]);
        assert_eq!(lf.flag().pieces()[0], Subspace::coordinate(3, &[0]));
        let lf = class_of(&OnePS::<Q>::diagonal(&[4, 4]));
        assert!(lf.flag().is_trivial());
    }

    #[test]
    fn representatives_round_trip() {
        let f = Flag::from_pieces_completing(2, vec![Subspace::line(&v(&[1, 1])).unwrap()]).unwrap();
        let lf = LabeledFlag::new(f, v(&[2, -1])).unwrap();
        let a = one_param_of(&lf).unwrap();
        assert_eq!(class_of(&a), lf);

        let triv = LabeledFlag::new(Flag::<Q>::trivial(2), v(&[5])).unwrap();
        assert_eq!(one_param_of(&triv).unwrap().weights(), &[5, 5]);

        let half = LabeledFlag::new(Flag::<Q>::trivial(2), vec![crate::field::ratio(1, 2)]).unwrap();
        assert!(one_param_of(&half).is_err());
    }

    #[test]
    fn parabolic_examples() {
        let gl3 = GroupSpec::<Q>::gl(3);
        let full = ParabolicDescriptor::new(gl3.clone(), Flag::standard_full(3)).unwrap();
        let upper = Matrix::from_i64_rows(&[&[1, 2, 3], &[0, 4, 5], &[0, 0, 6]]);
        assert!(in_parabolic(&upper, &full).unwrap());
        assert!(in_parabolic_via_limit(&upper, &full).unwrap());

        let line = Flag::from_pieces_completing(3, vec![Subspace::coordinate(3, &[0])]).unwrap();
        let p = ParabolicDescriptor::new(gl3, line).unwrap();
        let g = Matrix::from_i64_rows(&[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert!(!in_parabolic(&g, &p).unwrap());
        assert!(!in_parabolic_via_limit(&g, &p).unwrap());

        assert!(in_parabolic(&Matrix::zeros(3, 3), &p).is_err());
    }

    #[test]
    fn parabolic_over_f5() {
        let gl2 = GroupSpec::<F5>::gl(2);
        let f = Flag::from_pieces_completing(2, vec![Subspace::line(&[F5::new(1), F5::new(2)]).unwrap()]).unwrap();
        let p = ParabolicDescriptor::new(gl2, f).unwrap();
        // g fixes (1,2): g = [[3,1],[1,4]] sends (1,2) to (5,9) = (0,4) mod 5: not fixed.
        let g = Matrix::<F5>::from_i64_rows(&[&[3, 1], &[1, 4]]);
        assert_eq!(in_parabolic(&g, &p).unwrap(), in_parabolic_via_limit(&g, &p).unwrap());
        let h = Matrix::<F5>::from_i64_rows(&[&[2, 0], &[0, 2]]);
        assert!(in_parabolic(&h, &p).unwrap());
        assert!(in_parabolic_via_limit(&h, &p).unwrap());
    }
}
