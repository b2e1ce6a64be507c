use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::field::Field;
use crate::linalg::matrix::{is_zero_vec, null_basis, Matrix};

/// A linear subspace of `F^n`, stored by its canonical reduced row-echelon basis.
///
/// Two subspaces are equal as sets iff their stored bases are entry-wise
/// equal, so the derived `Eq`, `Ord` and `Hash` are set-theoretic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    /// Row space of `m`.
    pub fn row_space(m: &Matrix<F>) -> Self {
        Subspace { ambient: m.cols(), basis: m.rref().row_basis() }
    }

    pub fn span(ambient: usize, vectors: &[Vec<F>]) -> Result<Self> {
        Ok(Self::row_space(&Matrix::from_rows(ambient, vectors)?))
    }

    pub fn line(v: &[F]) -> Result<Self> {
        if is_zero_vec(v) {
            return Err(Error::ZeroVector);
        }
        Self::span(v.len(), &[v.to_vec()])
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let rows: Vec<Vec<F>> =
            indices.iter().map(|&i| crate::linalg::matrix::unit_vector(ambient, i)).collect();
        Self::span(ambient, &rows).expect("unit vectors have ambient length")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<F>> {
        self.basis.row_vectors()
    }

    /// Normalized spanning vector of a line (first nonzero coordinate is 1).
    pub fn line_vector(&self) -> Option<Vec<F>> {
        (self.dim() == 1).then(|| self.basis.row(0).to_vec())
    }

    pub fn contains(&self, w: &[F]) -> Result<bool> {
        check_dim(self.ambient, w.len())?;
        if is_zero_vec(w) {
            return Ok(true);
        }
        // Reduce w against the pivots of the canonical basis.
        let mut r = w.to_vec();
        for i in 0..self.dim() {
            let row = self.basis.row(i);
            let c = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let f = r[c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, b) in r.iter_mut().zip(row) {
                *x = x.sub(&f.mul(b));
            }
        }
        Ok(is_zero_vec(&r))
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> Result<bool> {
        check_dim(self.ambient, other.ambient)?;
        for i in 0..other.dim() {
            if !self.contains(other.basis.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        check_dim(self.ambient, other.ambient)?;
        Ok(Self::row_space(&self.basis.stack(&other.basis)?))
    }

    /// Annihilator in the dual space, identified with `F^n` via the standard pairing.
    pub fn annihilator(&self) -> Subspace<F> {
        kernel(&self.basis)
    }

    pub fn intersect(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        check_dim(self.ambient, other.ambient)?;
        let ann = self.annihilator().basis.stack(&other.annihilator().basis)?;
        Ok(kernel(&ann))
    }

    /// Image under the linear map `x -> g x`.
    pub fn image(&self, g: &Matrix<F>) -> Result<Subspace<F>> {
        check_dim(self.ambient, g.cols())?;
        let imgs: Vec<Vec<F>> =
            (0..self.dim()).map(|i| g.mul_vec(self.basis.row(i))).collect::<Result<_>>()?;
        Self::span(g.rows(), &imgs)
    }

    /// Vectors of `self` extending a basis of `sub` to a basis of `self`.
    ///
    /// Picks canonical basis rows of `self` greedily, so the result is deterministic.
    pub fn complement_in(&self, sub: &Subspace<F>) -> Result<Vec<Vec<F>>> {
        check_dim(self.ambient, sub.ambient)?;
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for v in self.basis_vectors() {
            if !acc.contains(&v)? {
                acc = acc.sum(&Subspace::line(&v)?)?;
                out.push(v);
            }
        }
        Ok(out)
    }
}

/// Right null space of `m`.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    let e = m.rref();
    let vs = null_basis(&e, m.cols());
    Subspace::span(m.cols(), &vs).expect("null vectors have column length")
}

impl<F: Field> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?}", self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rational, F2};

    type Q = Rational;

    fn span(rows: &[&[i64]]) -> Subspace<Q> {
        Subspace::row_space(&Matrix::from_i64_rows(rows))
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel(&Matrix::<Q>::identity(3)).is_zero());
        assert!(kernel(&Matrix::<Q>::zeros(2, 3)).is_full());
        let k = kernel(&Matrix::<Q>::from_i64_rows(&[&[1, 1, 0]]));
        assert_eq!(k, span(&[&[1, -1, 0], &[0, 0, 1]]));
        let m = Matrix::<Q>::from_i64_rows(&[&[1, 1, 0]]);
        for v in k.basis_vectors() {
            assert!(m.mul_vec(&v).unwrap().iter().all(|x| x == &rat(0)));
        }
    }

    #[test]
    fn sum_and_intersection() {
        let a = span(&[&[1, 0, 0], &[0, 1, 0]]);
        let b = span(&[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), span(&[&[0, 1, 0]]));
        assert_eq!(span(&[&[1, 0, 0]]).sum(&span(&[&[0, 1, 0]])).unwrap(), a);

        let u = span(&[&[1, 1, 0], &[0, 0, 1]]);
        let v = span(&[&[1, 0, 0], &[0, 1, 1]]);
        let w = u.intersect(&v).unwrap();
        assert_eq!(w, span(&[&[1, 1, 1]]));
        let s = u.sum(&v).unwrap();
        assert_eq!(s.dim() + w.dim(), u.dim() + v.dim());
    }

    #[test]
    fn membership_and_mismatch() {
        let a = span(&[&[1, 1, 0]]);
        assert!(a.contains(&[rat(2), rat(2), rat(0)]).unwrap());
        assert!(!a.contains(&[rat(1), rat(0), rat(0)]).unwrap());
        assert!(a.contains(&[rat(1)]).is_err());
        assert!(a.sum(&Subspace::zero(2)).is_err());
    }

    #[test]
    fn subspaces_over_f2() {
        let l = Subspace::<F2>::line(&[F2::new(1), F2::new(1)]).unwrap();
        let m = Subspace::<F2>::line(&[F2::new(1), F2::new(0)]).unwrap();
        assert!(l.intersect(&m).unwrap().is_zero());
        assert!(l.sum(&m).unwrap().is_full());
    }

    #[test]
    fn complement_extends_basis() {
        let full = Subspace::<Q>::full(3);
        let sub = span(&[&[1, 1, 1]]);
        let c = full.complement_in(&sub).unwrap();
        assert_eq!(c.len(), 2);
        let all = Subspace::span(3, &[c, sub.basis_vectors()].concat()).unwrap();
        assert!(all.is_full());
    }
}
