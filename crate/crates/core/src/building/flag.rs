use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::field::{Field, Rational};
use crate::linalg::{Matrix, Subspace};

/// A strictly increasing chain of subspaces ending at the ambient space.
///
/// The zero subspace is implicit; the trivial flag has the single piece `F^n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flag<F> {
    pieces: Vec<Subspace<F>>,
}

impl<F: Field> Flag<F> {
    pub fn new(pieces: Vec<Subspace<F>>) -> Result<Self> {
        let Some(last) = pieces.last() else {
            return Err(Error::InvalidFlag("no pieces".into()));
        };
        let n = last.ambient();
        if !last.is_full() {
            return Err(Error::InvalidFlag("last piece is not the ambient space".into()));
        }
        for w in pieces.windows(2) {
            check_dim(n, w[0].ambient())?;
            if w[0].is_zero() {
                return Err(Error::InvalidFlag("zero subspace listed as a piece".into()));
            }
            if w[0].dim() >= w[1].dim() || !w[1].contains_subspace(&w[0])? {
                return Err(Error::InvalidFlag("pieces are not strictly increasing".into()));
            }
        }
        Ok(Flag { pieces })
    }

    /// Flag from pieces that may omit the final ambient space.
    pub fn from_pieces_completing(ambient: usize, mut pieces: Vec<Subspace<F>>) -> Result<Self> {
        if pieces.last().is_none_or(|p| !p.is_full()) {
            pieces.push(Subspace::full(ambient));
        }
        Self::new(pieces)
    }

    pub fn trivial(n: usize) -> Self {
        Flag { pieces: vec![Subspace::full(n)] }
    }

    /// The standard complete flag `<e1> ⊂ <e1,e2> ⊂ ... ⊂ F^n`.
    pub fn standard_full(n: usize) -> Self {
        let pieces = (1..=n).map(|k| Subspace::coordinate(n, &(0..k).collect::<Vec<_>>())).collect();
        Flag { pieces }
    }

    pub fn ambient(&self) -> usize {
        self.pieces[0].ambient()
    }

    /// Number of pieces, including the ambient space.
    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn pieces(&self) -> &[Subspace<F>] {
        &self.pieces
    }

    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(Subspace::dim).collect()
    }

    /// Image under an invertible `g`.
    pub fn image(&self, g: &Matrix<F>) -> Result<Flag<F>> {
        let pieces = self.pieces.iter().map(|p| p.image(g)).collect::<Result<Vec<_>>>()?;
        Flag::new(pieces)
    }

    pub fn is_stabilized_by(&self, g: &Matrix<F>) -> Result<bool> {
        for p in &self.pieces[..self.pieces.len() - 1] {
            if p.image(g)? != *p {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<F: Field> fmt::Debug for Flag<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.pieces).finish()
    }
}

/// A decomposition of `F^n` into `n` lines, stored in canonical order: decreasing
/// lexicographic order of the normalized basis rows, so the standard frame is `e_1, ..., e_n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frame<F> {
    lines: Vec<Subspace<F>>,
}

impl<F: Field> Frame<F> {
    pub fn new(mut lines: Vec<Subspace<F>>) -> Result<Self> {
        let Some(first) = lines.first() else {
            return Err(Error::InvalidFrame("no lines".into()));
        };
        let n = first.ambient();
        check_dim(n, lines.len())?;
        let mut vectors = Vec::with_capacity(n);
        for l in &lines {
            check_dim(n, l.ambient())?;
            vectors.push(l.line_vector().ok_or_else(|| Error::InvalidFrame("entry is not a line".into()))?);
        }
        if Subspace::span(n, &vectors)?.dim() != n {
            return Err(Error::InvalidFrame("lines do not span the ambient space".into()));
        }
        lines.sort_by(|a, b| b.cmp(a));
        Ok(Frame { lines })
    }

    pub fn from_vectors(vectors: &[Vec<F>]) -> Result<Self> {
        Self::new(vectors.iter().map(|v| Subspace::line(v)).collect::<Result<_>>()?)
    }

    pub fn standard(n: usize) -> Self {
        Frame { lines: (0..n).map(|i| Subspace::coordinate(n, &[i])).collect() }
    }

    pub fn ambient(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Subspace<F>] {
        &self.lines
    }

    pub fn position(&self, line: &Subspace<F>) -> Option<usize> {
        self.lines.binary_search_by(|l| line.cmp(l)).ok()
    }

    /// Normalized representative vectors, in line order.
    pub fn vectors(&self) -> Vec<Vec<F>> {
        self.lines.iter().map(|l| l.line_vector().expect("frame entries are lines")).collect()
    }

    /// The matrix whose columns are the line representatives.
    pub fn matrix(&self) -> Matrix<F> {
        Matrix::from_columns(self.ambient(), &self.vectors()).expect("square")
    }

    pub fn image(&self, g: &Matrix<F>) -> Result<Frame<F>> {
        Frame::new(self.lines.iter().map(|l| l.image(g)).collect::<Result<_>>()?)
    }

    /// Indices of the lines contained in `s`.
    pub fn lines_in(&self, s: &Subspace<F>) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, l) in self.lines.iter().enumerate() {
            if s.contains_subspace(l)? {
                out.push(i);
            }
        }
        Ok(out)
    }
}

impl<F: Field> fmt::Debug for Frame<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vectors().iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())).finish()
    }
}

/// Whether every piece of `flag` is spanned by lines of `frame`.
pub fn is_adapted<F: Field>(flag: &Flag<F>, frame: &Frame<F>) -> Result<bool> {
    check_dim(flag.ambient(), frame.ambient())?;
    for p in flag.pieces() {
        if frame.lines_in(p)?.len() != p.dim() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A flag with strictly decreasing rational labels: a point of the extended
/// building. Integral labels are lattice points.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledFlag<F> {
    flag: Flag<F>,
    labels: Vec<Rational>,
}

impl<F: Field> LabeledFlag<F> {
    pub fn new(flag: Flag<F>, labels: Vec<Rational>) -> Result<Self> {
        if labels.len() != flag.num_pieces() {
            return Err(Error::InvalidFlag(format!(
                "{} labels for {} pieces",
                labels.len(),
                flag.num_pieces()
            )));
        }
        if labels.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidFlag("labels are not strictly decreasing".into()));
        }
        Ok(LabeledFlag { flag, labels })
    }

    pub fn flag(&self) -> &Flag<F> {
        &self.flag
    }

    pub fn labels(&self) -> &[Rational] {
        &self.labels
    }

    pub fn is_integral(&self) -> bool {
        self.labels.iter().all(|c| c.is_integer())
    }

    /// `Σ_j c_j (dim F_j - dim F_{j-1})`, the weight sum of any representative.
    pub fn trace(&self) -> Rational {
        let mut prev = 0;
        let mut acc = <Rational as Field>::zero();
        for (p, c) in self.flag.pieces().iter().zip(&self.labels) {
            acc = acc.add(&c.mul(&Rational::from_i64((p.dim() - prev) as i64)));
            prev = p.dim();
        }
        acc
    }

    pub fn image(&self, g: &Matrix<F>) -> Result<LabeledFlag<F>> {
        Ok(LabeledFlag { flag: self.flag.image(g)?, labels: self.labels.clone() })
    }

    /// Label attached to a vector: the label of the smallest piece containing it.
    pub fn label_of(&self, v: &[F]) -> Result<Rational> {
        for (p, c) in self.flag.pieces().iter().zip(&self.labels) {
            if p.contains(v)? {
                return Ok(c.clone());
            }
        }
        unreachable!("last piece is the ambient space")
    }
}

impl<F: Field> fmt::Debug for LabeledFlag<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(|c| c.to_string()).collect();
        write!(f, "({:?}, {:?})", self.flag, labels)
    }
}

/// Level-set flag of a weight vector on a frame.
///
/// Labels are the distinct weights in decreasing order; piece `j` is the span
/// of all lines whose weight is at least the `j`-th label.
pub fn flag_of_weights<F: Field>(frame: &Frame<F>, weights: &[Rational]) -> Result<LabeledFlag<F>> {
    let n = frame.ambient();
    check_dim(n, weights.len())?;
    let mut labels: Vec<Rational> = weights.to_vec();
    labels.sort_by(|a, b| b.cmp(a));
    labels.dedup();
    let vectors = frame.vectors();
    let mut pieces = Vec::with_capacity(labels.len());
    for c in &labels {
        let vs: Vec<Vec<F>> =
            vectors.iter().zip(weights).filter(|(_, w)| *w >= c).map(|(v, _)| v.clone()).collect();
        pieces.push(Subspace::span(n, &vs)?);
    }
    LabeledFlag::new(Flag::new(pieces)?, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    type Q = Rational;

    fn line(v: &[i64]) -> Subspace<Q> {
        Subspace::line(&v.iter().map(|&x| rat(x)).collect::<Vec<_>>()).unwrap()
    }

    fn ws(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn adaptedness() {
        let std = Frame::<Q>::standard(2);
        let f = Flag::from_pieces_completing(2, vec![line(&[1, 0])]).unwrap();
        assert!(is_adapted(&f, &std).unwrap());
        let g = Flag::from_pieces_completing(2, vec![line(&[1, 1])]).unwrap();
        assert!(!is_adapted(&g, &std).unwrap());
        assert!(is_adapted(&f, &Frame::<Q>::standard(3)).is_err());
    }

    #[test]
    fn level_set_flags() {
        let fr = Frame::<Q>::standard(3);
        let lf = flag_of_weights(&fr, &ws(&[2, 2, 0])).unwrap();
        assert_eq!(lf.labels(), &ws(&[2, 0])[..]);
        assert_eq!(lf.flag().pieces()[0], Subspace::coordinate(3, &[0, 1]));

        let lf = flag_of_weights(&fr, &ws(&[0, 0, 0])).unwrap();
        assert!(lf.flag().is_trivial());
        assert_eq!(lf.labels(), &ws(&[0])[..]);

        let lf = flag_of_weights(&fr, &ws(&[3, 1, 2])).unwrap();
        assert_eq!(lf.labels(), &ws(&[3, 2, 1])[..]);
        assert_eq!(lf.flag().pieces()[0], Subspace::coordinate(3, &[0]));
        assert_eq!(lf.flag().pieces()[1], Subspace::coordinate(3, &[0, 2]));
    }

    #[test]
    fn invalid_objects_rejected() {
        assert!(Flag::new(vec![line(&[1, 0])]).is_err());
        assert!(Frame::new(vec![line(&[1, 0]), line(&[2, 0])]).is_err());
        let f = Flag::from_pieces_completing(2, vec![line(&[1, 0])]).unwrap();
        assert!(LabeledFlag::new(f.clone(), ws(&[0, 1])).is_err());
        assert!(LabeledFlag::new(f, ws(&[1])).is_err());
    }

    #[test]
    fn trace_of_labels() {
        let f = Flag::from_pieces_completing(2, vec![line(&[1, 0])]).unwrap();
        assert_eq!(LabeledFlag::new(f.clone(), ws(&[1, -1])).unwrap().trace(), rat(0));
        assert_eq!(LabeledFlag::new(f, ws(&[1, 0])).unwrap().trace(), rat(1));
    }
}
