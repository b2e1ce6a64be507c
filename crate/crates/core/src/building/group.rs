//! The groups GL(r), SL(r), Sp(2r) and symplectic geometry.

use std::fmt;

use crate::building::flag::{Flag, LabeledFlag};
use crate::error::{check_dim, Error, Result};
use crate::field::{Field, Rational};
use crate::linalg::{kernel, Matrix, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKind {
    GL,
    SL,
    Sp,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::GL => "GL",
            GroupKind::SL => "SL",
            GroupKind::Sp => "Sp",
        })
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GL" | "gl" => Ok(GroupKind::GL),
            "SL" | "sl" => Ok(GroupKind::SL),
            "Sp" | "SP" | "sp" => Ok(GroupKind::Sp),
            other => Err(Error::InvalidGroup(format!("unknown group kind {other:?}"))),
        }
    }
}

/// A nondegenerate alternating bilinear form on `F^{2r}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticForm<F> {
    gram: Matrix<F>,
}

impl<F: Field> SymplecticForm<F> {
    pub fn new(gram: Matrix<F>) -> Result<Self> {
        if !gram.is_square() || gram.rows() % 2 != 0 {
            return Err(Error::InvalidForm("gram matrix must be square of even size".into()));
        }
        let n = gram.rows();
        for i in 0..n {
            if !gram.get(i, i).is_zero() {
                return Err(Error::InvalidForm("diagonal entries must vanish".into()));
            }
            for j in 0..n {
                if *gram.get(i, j) != gram.get(j, i).neg() {
                    return Err(Error::InvalidForm("gram matrix is not skew-symmetric".into()));
                }
            }
        }
        if gram.det()?.is_zero() {
            return Err(Error::InvalidForm("form is degenerate".into()));
        }
        Ok(SymplecticForm { gram })
    }

    /// `Σ x_i ∧ y_i` in coordinates ordered `(e_1..e_r, f_1..f_r)`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim % 2 != 0 || dim == 0 {
            return Err(Error::InvalidForm(format!("dimension {dim} is not a positive even number")));
        }
        let r = dim / 2;
        let mut g = Matrix::zeros(dim, dim);
        for i in 0..r {
            g.set(i, r + i, F::one());
            g.set(r + i, i, F::one().neg());
        }
        Ok(SymplecticForm { gram: g })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<F> {
        &self.gram
    }

    pub fn pair(&self, u: &[F], v: &[F]) -> F {
        self.gram.bilinear(u, v)
    }

    /// Whether `g^T ω g = ω`.
    pub fn is_preserved_by(&self, g: &Matrix<F>) -> Result<bool> {
        check_dim(self.dim(), g.rows())?;
        Ok(g.transpose().mul(&self.gram)?.mul(g)? == self.gram)
    }
}

impl<F: Field> fmt::Debug for SymplecticForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymplecticForm({:?})", self.gram)
    }
}

/// `{v : ω(u, v) = 0 for all u ∈ U}`.
pub fn symplectic_complement<F: Field>(u: &Subspace<F>, form: &SymplecticForm<F>) -> Result<Subspace<F>> {
    check_dim(form.dim(), u.ambient())?;
    Ok(kernel(&u.basis().mul(form.gram())?))
}

/// Whether `F_j^⊥ = F_{k-j}` for every `j` (with `F_0 = 0`).
pub fn is_isotropic_flag<F: Field>(flag: &Flag<F>, form: &SymplecticForm<F>) -> Result<bool> {
    check_dim(form.dim(), flag.ambient())?;
    let k = flag.num_pieces();
    let pieces = flag.pieces();
    for j in 1..k {
        let perp = symplectic_complement(&pieces[j - 1], form)?;
        if perp != pieces[k - j - 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the ordered basis `(e_1..e_r, f_1..f_r)` is normal:
/// `ω(e_i, e_j) = 0`, `ω(e_i, f_i) = 1`, `ω(e_i, f_j) = 0` for `i ≠ j`, and
/// `ω(f_i, f_j) = 0`.
pub fn is_normal_basis<F: Field>(basis: &[Vec<F>], form: &SymplecticForm<F>) -> Result<bool> {
    let n = form.dim();
    check_dim(n, basis.len())?;
    let r = n / 2;
    let (es, fs) = basis.split_at(r);
    for i in 0..r {
        for j in 0..r {
            if !form.pair(&es[i], &es[j]).is_zero() || !form.pair(&fs[i], &fs[j]).is_zero() {
                return Ok(false);
            }
            let ef = form.pair(&es[i], &fs[j]);
            let ok = if i == j { ef.is_one() } else { ef.is_zero() };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Label symmetry of a labeled isotropic flag in dimension `dim`:
/// `c_j = -c_{k+1-j}` and `dim F_j + dim F_{k-j} = dim`.
pub fn symmetric_labels_ok<F: Field>(lf: &LabeledFlag<F>, dim: usize) -> bool {
    let labels = lf.labels();
    let k = labels.len();
    if lf.flag().ambient() != dim {
        return false;
    }
    if (0..k).any(|j| labels[j] != labels[k - 1 - j].neg()) {
        return false;
    }
    let dims = lf.flag().dims();
    (1..k).all(|j| dims[j - 1] + dims[k - j - 1] == dim)
}

/// The structure group: GL(r), SL(r), or Sp(2r) with its form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec<F> {
    kind: GroupKind,
    size: usize,
    form: Option<SymplecticForm<F>>,
}

impl<F: Field> GroupSpec<F> {
    pub fn gl(r: usize) -> Self {
        GroupSpec { kind: GroupKind::GL, size: r, form: None }
    }

    pub fn sl(r: usize) -> Self {
        GroupSpec { kind: GroupKind::SL, size: r, form: None }
    }

    /// Sp of the standard form on `F^dim`.
    pub fn sp(dim: usize) -> Result<Self> {
        Ok(GroupSpec { kind: GroupKind::Sp, size: dim, form: Some(SymplecticForm::standard(dim)?) })
    }

    pub fn sp_with_form(form: SymplecticForm<F>) -> Self {
        GroupSpec { kind: GroupKind::Sp, size: form.dim(), form: Some(form) }
    }

    pub fn new(kind: GroupKind, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidGroup("size must be positive".into()));
        }
        match kind {
            GroupKind::GL => Ok(Self::gl(size)),
            GroupKind::SL => Ok(Self::sl(size)),
            GroupKind::Sp => Self::sp(size).map_err(|e| Error::InvalidGroup(e.to_string())),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Dimension of the natural representation.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn form(&self) -> Option<&SymplecticForm<F>> {
        self.form.as_ref()
    }

    /// Whether `g` lies in the group.
    pub fn contains(&self, g: &Matrix<F>) -> Result<bool> {
        check_dim(self.size, g.rows())?;
        check_dim(self.size, g.cols())?;
        Ok(match self.kind {
            GroupKind::GL => g.is_invertible(),
            GroupKind::SL => g.det()?.is_one(),
            GroupKind::Sp => self.form.as_ref().expect("Sp carries a form").is_preserved_by(g)?,
        })
    }

    /// Whether a flag is a simplex of this group's building.
    pub fn admits_flag(&self, flag: &Flag<F>) -> Result<bool> {
        check_dim(self.size, flag.ambient())?;
        match &self.form {
            Some(w) => is_isotropic_flag(flag, w),
            None => Ok(true),
        }
    }

    /// Whether a labeled flag is a point of this group's extended building.
    pub fn admits_point(&self, lf: &LabeledFlag<F>) -> Result<bool> {
        Ok(match self.kind {
            GroupKind::GL => true,
            GroupKind::SL => lf.trace() == <Rational as Field>::zero(),
            GroupKind::Sp => {
                self.admits_flag(lf.flag())? && symmetric_labels_ok(lf, self.size)
            }
        })
    }
}

impl<F: Field> fmt::Debug for GroupSpec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, F3};

    type Q = Rational;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| rat(a)).collect()
    }

    #[test]
    fn standard_basis_is_normal() {
        let w = SymplecticForm::<Q>::standard(2).unwrap();
        assert!(is_normal_basis(&[v(&[1, 0]), v(&[0, 1])], &w).unwrap());
        assert!(!is_normal_basis(&[v(&[0, 1]), v(&[1, 0])], &w).unwrap());
        let w4 = SymplecticForm::<Q>::standard(4).unwrap();
        let std: Vec<Vec<Q>> = (0..4).map(|i| crate::linalg::unit_vector(4, i)).collect();
        assert!(is_normal_basis(&std, &w4).unwrap());
        // f_1 + e_2 breaks ω(e_2, f_1) = 0 even though the pairs stay dual.
        let mut bad = std.clone();
        bad[2] = v(&[0, 1, 1, 0]);
        assert!(!is_normal_basis(&bad, &w4).unwrap());
    }

    #[test]
    fn isotropic_flags() {
        let w = SymplecticForm::<Q>::standard(2).unwrap();
        let f = Flag::from_pieces_completing(2, vec![Subspace::line(&v(&[1, 0])).unwrap()]).unwrap();
        assert!(is_isotropic_flag(&f, &w).unwrap());

        let w4 = SymplecticForm::<Q>::standard(4).unwrap();
        let u = Subspace::coordinate(4, &[0, 1]);
        assert_eq!(symplectic_complement(&u, &w4).unwrap(), u);
        // <e1> ⊂ <e1,e2> ⊂ Q^4 is not isotropic: <e1>^⊥ has dimension 3.
        let g = Flag::from_pieces_completing(4, vec![Subspace::coordinate(4, &[0]), u.clone()]).unwrap();
        assert!(!is_isotropic_flag(&g, &w4).unwrap());
        let h = Flag::from_pieces_completing(4, vec![Subspace::coordinate(4, &[0]), Subspace::coordinate(4, &[0, 1, 3])])
            .unwrap();
        assert!(is_isotropic_flag(&h, &w4).unwrap());
    }

    #[test]
    fn symmetric_labels() {
        let f = Flag::from_pieces_completing(2, vec![Subspace::line(&v(&[1, 0])).unwrap()]).unwrap();
        assert!(symmetric_labels_ok(&LabeledFlag::new(f.clone(), v(&[1, -1])).unwrap(), 2));
        assert!(!symmetric_labels_ok(&LabeledFlag::new(f, v(&[2, 1])).unwrap(), 2));
        let g = Flag::<Q>::from_pieces_completing(4, vec![Subspace::coordinate(4, &[0]), Subspace::coordinate(4, &[0, 1, 3])])
            .unwrap();
        assert!(symmetric_labels_ok(&LabeledFlag::new(g, v(&[3, 0, -3])).unwrap(), 4));
    }

    #[test]
    fn degenerate_forms_rejected() {
        assert!(SymplecticForm::<Q>::new(Matrix::zeros(2, 2)).is_err());
        assert!(SymplecticForm::<Q>::new(Matrix::from_i64_rows(&[&[0, 1], &[1, 0]])).is_err());
        assert!(SymplecticForm::<F3>::new(Matrix::from_i64_rows(&[&[0, 1], &[-1, 0]])).is_ok());
        assert!(GroupSpec::<Q>::new(GroupKind::Sp, 3).is_err());
    }

    #[test]
    fn group_membership() {
        let sp = GroupSpec::<Q>::sp(2).unwrap();
        assert!(sp.contains(&Matrix::from_i64_rows(&[&[1, 1], &[0, 1]])).unwrap());
        assert!(!sp.contains(&Matrix::from_i64_rows(&[&[2, 0], &[0, 1]])).unwrap());
        let sl = GroupSpec::<Q>::sl(2);
        assert!(!sl.contains(&Matrix::from_i64_rows(&[&[2, 0], &[0, 1]])).unwrap());
    }
}
