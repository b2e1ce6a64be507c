//! Common apartments: frames (GL, SL) and normal frames (Sp) adapted to a family of flags.
//!
//! The flags' pieces generate a finite sublattice of the subspace lattice.
//! A frame adapted to every flag exists iff that lattice is distributive; in
//! that case each join-irreducible `J` contributes a complement `C_J` of its
//! lower cover `J⁻`, and the lines of all `C_J` form the frame.

use std::collections::HashMap;

use crate::building::flag::{is_adapted, Flag, Frame};
use crate::building::group::{is_isotropic_flag, is_normal_basis, symplectic_complement, GroupSpec, SymplecticForm};
use crate::error::{check_dim, Error, Result};
use crate::field::Field;
use crate::linalg::{solve_linear, vec_add, vec_scale, vec_sub, Matrix, Subspace};

pub const DEFAULT_LATTICE_BUDGET: usize = 4096;

/// The sublattice of subspaces generated by a set of subspaces, `0` and `F^n`.
#[derive(Clone)]
pub struct SubspaceLattice<F> {
    elements: Vec<Subspace<F>>,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
}

/// Outcome of generating a lattice: either the lattice, or a proof that it is not distributive.
pub enum Closure<F> {
    Lattice(SubspaceLattice<F>),
    /// More than `2^n` elements: no distributive lattice of length `n` is that large.
    TooLarge,
}

impl<F: Field> SubspaceLattice<F> {
    pub fn generate(ambient: usize, generators: &[Subspace<F>], budget: usize) -> Result<Closure<F>> {
        let cap = if ambient < 63 { 1usize << ambient } else { usize::MAX };
        let mut elements: Vec<Subspace<F>> = Vec::new();
        let mut index: HashMap<Subspace<F>, usize> = HashMap::new();
        let mut push = |s: Subspace<F>, elements: &mut Vec<Subspace<F>>| -> usize {
            *index.entry(s.clone()).or_insert_with(|| {
                elements.push(s);
                elements.len() - 1
            })
        };
        push(Subspace::zero(ambient), &mut elements);
        push(Subspace::full(ambient), &mut elements);
        for g in generators {
            check_dim(ambient, g.ambient())?;
            push(g.clone(), &mut elements);
        }
        let mut join: HashMap<(usize, usize), usize> = HashMap::new();
        let mut meet: HashMap<(usize, usize), usize> = HashMap::new();
        let mut i = 0;
        while i < elements.len() {
            for j in 0..=i {
                let s = elements[i].sum(&elements[j])?;
                let m = elements[i].intersect(&elements[j])?;
                let si = push(s, &mut elements);
                let mi = push(m, &mut elements);
                join.insert((i, j), si);
                meet.insert((i, j), mi);
                if elements.len() > cap {
                    return Ok(Closure::TooLarge);
                }
                if elements.len() > budget {
                    return Err(Error::BudgetExceeded { what: "subspace lattice closure".into(), budget });
                }
            }
            i += 1;
        }
        let n = elements.len();
        let table = |t: &HashMap<(usize, usize), usize>| -> Vec<Vec<usize>> {
            (0..n).map(|a| (0..n).map(|b| t[&(a.max(b), a.min(b))]).collect()).collect()
        };
        Ok(Closure::Lattice(SubspaceLattice { join: table(&join), meet: table(&meet), elements }))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Subspace<F>] {
        &self.elements
    }

    /// `x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)` for all triples.
    pub fn is_distributive(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| {
            (0..n).all(|y| {
                (y..n).all(|z| self.meet[x][self.join[y][z]] == self.join[self.meet[x][y]][self.meet[x][z]])
            })
        })
    }

    fn below(&self, a: usize, b: usize) -> bool {
        a != b && self.meet[a][b] == a
    }

    /// Join-irreducible elements with their lower covers `J⁻`, sorted by dimension.
    pub fn join_irreducibles(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let zero = self.elements.iter().position(Subspace::is_zero).expect("0 is an element");
        let mut out = Vec::new();
        for j in 0..n {
            if j == zero {
                continue;
            }
            let lower = (0..n).filter(|&a| self.below(a, j)).fold(zero, |acc, a| self.join[acc][a]);
            if lower != j {
                out.push((j, lower));
            }
        }
        out.sort_by_key(|&(j, _)| (self.elements[j].dim(), self.elements[j].clone()));
        out
    }
}

/// Answer of a common-apartment query.
#[derive(Clone, PartialEq, Eq)]
pub enum ApartmentVerdict<F> {
    /// An adapted frame; for Sp also a normal basis `(e_1..e_r, f_1..f_r)` spanning its lines.
    Found { frame: Frame<F>, normal_basis: Option<Vec<Vec<F>>> },
    /// No common apartment, with the reason.
    Absent(String),
    /// The procedure could not decide.
    Undetermined(String),
}

impl<F: Field> ApartmentVerdict<F> {
    pub fn frame(&self) -> Option<&Frame<F>> {
        match self {
            ApartmentVerdict::Found { frame, .. } => Some(frame),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, ApartmentVerdict::Found { .. })
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, ApartmentVerdict::Absent(_))
    }
}

impl<F: Field> std::fmt::Debug for ApartmentVerdict<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ApartmentVerdict::Found { frame, .. } => write!(f, "Found({frame:?})"),
            ApartmentVerdict::Absent(r) => write!(f, "Absent({r})"),
            ApartmentVerdict::Undetermined(r) => write!(f, "Undetermined({r})"),
        }
    }
}

/// A frame (GL, SL) or normal frame (Sp) adapted to every flag, with the default lattice budget.
pub fn common_frame<F: Field>(flags: &[Flag<F>], group: &GroupSpec<F>) -> Result<ApartmentVerdict<F>> {
    common_frame_with_budget(flags, group, DEFAULT_LATTICE_BUDGET)
}

pub fn common_frame_with_budget<F: Field>(
    flags: &[Flag<F>],
    group: &GroupSpec<F>,
    budget: usize,
) -> Result<ApartmentVerdict<F>> {
    if flags.is_empty() {
        return Err(Error::Precondition("no flags given".into()));
    }
    let n = group.size();
    for f in flags {
        check_dim(n, f.ambient())?;
    }
    match group.form() {
        None => gl_common_frame(flags, n, budget),
        Some(w) => {
            for f in flags {
                if !is_isotropic_flag(f, w)? {
                    return Err(Error::Precondition(format!("flag {f:?} is not isotropic")));
                }
            }
            sp_common_frame(flags, w, budget)
        }
    }
}

fn generators<F: Field>(flags: &[Flag<F>]) -> Vec<Subspace<F>> {
    let mut g: Vec<Subspace<F>> = flags.iter().flat_map(|f| f.pieces().iter().cloned()).collect();
    g.sort();
    g.dedup();
    g
}

/// The lattice, or the reason there is no common apartment.
fn distributive_lattice<F: Field>(
    flags: &[Flag<F>],
    n: usize,
    budget: usize,
) -> Result<std::result::Result<SubspaceLattice<F>, String>> {
    match SubspaceLattice::generate(n, &generators(flags), budget)? {
        Closure::TooLarge => Ok(Err(format!("generated lattice has more than 2^{n} elements"))),
        Closure::Lattice(l) if !l.is_distributive() => {
            Ok(Err(format!("generated lattice of {} subspaces is not distributive", l.len())))
        }
        Closure::Lattice(l) => Ok(Ok(l)),
    }
}

fn lines_of<F: Field>(vs: &[Vec<F>]) -> Result<Frame<F>> {
    Frame::from_vectors(vs)
}

fn verify_adapted<F: Field>(flags: &[Flag<F>], frame: &Frame<F>) -> Result<bool> {
    for f in flags {
        if !is_adapted(f, frame)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn gl_common_frame<F: Field>(flags: &[Flag<F>], n: usize, budget: usize) -> Result<ApartmentVerdict<F>> {
    let lat = match distributive_lattice(flags, n, budget)? {
        Ok(l) => l,
        Err(reason) => return Ok(ApartmentVerdict::Absent(reason)),
    };
    let mut vectors = Vec::with_capacity(n);
    for (j, lower) in lat.join_irreducibles() {
        vectors.extend(lat.elements[j].complement_in(&lat.elements[lower])?);
    }
    if vectors.len() != n {
        return Ok(ApartmentVerdict::Undetermined("join-irreducible complements do not span".into()));
    }
    let frame = lines_of(&vectors)?;
    if !verify_adapted(flags, &frame)? {
        return Ok(ApartmentVerdict::Undetermined("constructed frame failed verification".into()));
    }
    Ok(ApartmentVerdict::Found { frame, normal_basis: None })
}

fn gram<F: Field>(w: &SymplecticForm<F>, a: &[Vec<F>], b: &[Vec<F>]) -> Matrix<F> {
    let mut m = Matrix::zeros(a.len(), b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            m.set(i, j, w.pair(x, y));
        }
    }
    m
}

/// Normal-frame construction.
///
/// In a normal frame adapted to the lattice, the lines of `C_J` pair only with
/// the lines of `C_{J*}`, where `J*` is the least join-irreducible not inside
/// `J^⊥`. The induced pairing `J/J⁻ × J*/J*⁻` does not depend on the chosen
/// complements, so it must be nondegenerate. Processing join-irreducibles by
/// increasing dimension, each new vector is corrected by an element of `J⁻` to
/// be orthogonal to every fixed vector outside `C_{J*}`; the correction is
/// solvable because for each constraining `K` the block `C_{K*}` already lies in
/// `J⁻` and pairs nondegenerately with `C_K`.
fn sp_common_frame<F: Field>(flags: &[Flag<F>], w: &SymplecticForm<F>, budget: usize) -> Result<ApartmentVerdict<F>> {
    let n = w.dim();
    let lat = match distributive_lattice(flags, n, budget)? {
        Ok(l) => l,
        Err(reason) => return Ok(ApartmentVerdict::Absent(reason)),
    };
    let jis = lat.join_irreducibles();
    let m = jis.len();
    let elem = |t: usize| &lat.elements[jis[t].0];

    // Partner of each join-irreducible.
    let mut partner = vec![usize::MAX; m];
    for t in 0..m {
        let perp = symplectic_complement(elem(t), w)?;
        let outside: Vec<usize> =
            (0..m).filter(|&u| !perp.contains_subspace(elem(u)).unwrap_or(false)).collect();
        let least: Vec<usize> = outside
            .iter()
            .copied()
            .filter(|&u| outside.iter().all(|&x| elem(x).contains_subspace(elem(u)).unwrap_or(false)))
            .collect();
        match least.as_slice() {
            [u] => partner[t] = *u,
            _ => return Ok(ApartmentVerdict::Absent(format!("no unique partner for {:?}", elem(t)))),
        }
    }
    if (0..m).any(|t| partner[partner[t]] != t) {
        return Ok(ApartmentVerdict::Absent("partner map is not an involution".into()));
    }

    // block[t]: the fixed basis of C_{J_t}, filled in order.
    let mut block: Vec<Vec<Vec<F>>> = vec![Vec::new(); m];
    for t in 0..m {
        let (j, lower) = jis[t];
        let fresh = lat.elements[j].complement_in(&lat.elements[lower])?;
        let lower_basis = lat.elements[lower].basis_vectors();
        let p = partner[t];
        let mut fixed_here: Vec<Vec<F>> = Vec::new();
        for c in fresh {
            // Targets: every fixed vector outside C_{J*}, and earlier vectors of C_J unless J* = J.
            let mut targets: Vec<Vec<F>> = Vec::new();
            for (u, b) in block.iter().enumerate().take(t) {
                if u != p {
                    targets.extend(b.iter().cloned());
                }
            }
            if p != t {
                targets.extend(fixed_here.iter().cloned());
            }
            let adjusted = if targets.is_empty() || lower_basis.is_empty() {
                c
            } else {
                // ω(c + Σ a_i l_i, x) = 0 for all targets x.
                let rhs: Vec<F> = targets.iter().map(|x| w.pair(&c, x).neg()).collect();
                let a = correction_matrix(&lower_basis, &targets, w);
                match solve_linear(&a, &rhs)? {
                    Some((coef, _)) => {
                        let mut v = c;
                        for (l, k) in lower_basis.iter().zip(&coef) {
                            v = vec_add(&v, &vec_scale(l, k));
                        }
                        v
                    }
                    None => return Ok(ApartmentVerdict::Undetermined("orthogonal correction unsolvable".into())),
                }
            };
            if targets.iter().any(|x| !w.pair(&adjusted, x).is_zero()) {
                return Ok(ApartmentVerdict::Undetermined("orthogonal correction failed".into()));
            }
            fixed_here.push(adjusted);
        }
        if p == t {
            match symplectic_basis(w, &fixed_here) {
                Some(b) => fixed_here = b,
                None => return Ok(ApartmentVerdict::Absent(format!("induced form on {:?} is degenerate", elem(t)))),
            }
        } else if p < t {
            // Dual basis to the partner block.
            let g = gram(w, &block[p], &fixed_here);
            if !g.is_square() || !g.is_invertible() {
                return Ok(ApartmentVerdict::Absent(format!("induced pairing at {:?} is degenerate", elem(t))));
            }
            let ginv = g.inverse()?;
            // d_i = Σ_k ginv[k][i] c_k gives ω(b_j, d_i) = δ_ji.
            let dual = (0..fixed_here.len())
                .map(|i| {
                    fixed_here.iter().enumerate().fold(vec![F::zero(); n], |acc, (k, c)| {
                        vec_add(&acc, &vec_scale(c, ginv.get(k, i)))
                    })
                })
                .collect();
            fixed_here = dual;
        }
        block[t] = fixed_here;
    }

    let mut es = Vec::new();
    let mut fs = Vec::new();
    for t in 0..m {
        let p = partner[t];
        if p == t {
            let half = block[t].len() / 2;
            es.extend(block[t][..half].iter().cloned());
            fs.extend(block[t][half..].iter().cloned());
        } else if t < p {
            es.extend(block[t].iter().cloned());
            fs.extend(block[p].iter().cloned());
        }
    }
    if es.len() != n / 2 || fs.len() != n / 2 {
        return Ok(ApartmentVerdict::Absent("blocks do not pair into a normal basis".into()));
    }
    let basis: Vec<Vec<F>> = es.into_iter().chain(fs).collect();
    if !is_normal_basis(&basis, w)? {
        return Ok(ApartmentVerdict::Undetermined("constructed basis is not normal".into()));
    }
    let frame = lines_of(&basis)?;
    if !verify_adapted(flags, &frame)? {
        return Ok(ApartmentVerdict::Undetermined("constructed normal frame failed verification".into()));
    }
    Ok(ApartmentVerdict::Found { frame, normal_basis: Some(basis) })
}

/// Coefficient matrix of `a ↦ (ω(Σ a_i l_i, x))_x`: row per target, column per `l_i`.
fn correction_matrix<F: Field>(lower: &[Vec<F>], targets: &[Vec<F>], w: &SymplecticForm<F>) -> Matrix<F> {
    let mut m = Matrix::zeros(targets.len(), lower.len());
    for (r, x) in targets.iter().enumerate() {
        for (c, l) in lower.iter().enumerate() {
            m.set(r, c, w.pair(l, x));
        }
    }
    m
}

/// Symplectic Gram-Schmidt: `(e_1..e_m, f_1..f_m)` spanning the same space, or
/// `None` when the form restricted to it is degenerate.
pub fn symplectic_basis<F: Field>(w: &SymplecticForm<F>, vectors: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let mut rest: Vec<Vec<F>> = vectors.to_vec();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while let Some(e) = rest.first().cloned() {
        let pos = rest.iter().position(|x| !w.pair(&e, x).is_zero())?;
        let f0 = rest[pos].clone();
        let f = vec_scale(&f0, &w.pair(&e, &f0).inv()?);
        let mut next = Vec::new();
        for (i, x) in rest.iter().enumerate() {
            if i == 0 || i == pos {
                continue;
            }
            // x - ω(x, f) e + ω(x, e) f is orthogonal to both e and f.
            let y = vec_add(&vec_sub(x, &vec_scale(&e, &w.pair(x, &f))), &vec_scale(&f, &w.pair(x, &e)));
            next.push(y);
        }
        es.push(e);
        fs.push(f);
        rest = next;
    }
    Some(es.into_iter().chain(fs).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rational, F2, F3};

    type Q = Rational;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| rat(a)).collect()
    }

    fn line_flag(x: &[i64]) -> Flag<Q> {
        Flag::from_pieces_completing(x.len(), vec![Subspace::line(&v(x)).unwrap()]).unwrap()
    }

    #[test]
    fn two_lines_share_a_frame() {
        let g = GroupSpec::gl(2);
        let r = common_frame(&[line_flag(&[1, 0]), line_flag(&[0, 1])], &g).unwrap();
        assert_eq!(r.frame(), Some(&Frame::standard(2)));
    }

    #[test]
    fn three_lines_do_not() {
        let g = GroupSpec::gl(2);
        let r = common_frame(&[line_flag(&[1, 0]), line_flag(&[0, 1]), line_flag(&[1, 1])], &g).unwrap();
        assert!(r.is_absent());

        let l = |a: i64, b: i64| {
            Flag::from_pieces_completing(2, vec![Subspace::line(&[F2::new(a), F2::new(b)]).unwrap()]).unwrap()
        };
        let r = common_frame(&[l(1, 0), l(0, 1), l(1, 1)], &GroupSpec::gl(2)).unwrap();
        assert!(r.is_absent());
    }

    #[test]
    fn sp2_triple() {
        let g = GroupSpec::<Q>::sp(2).unwrap();
        let fl = [line_flag(&[1, 0]), line_flag(&[0, 1]), line_flag(&[1, 1])];
        for i in 0..3 {
            for j in i + 1..3 {
                let r = common_frame(&[fl[i].clone(), fl[j].clone()], &g).unwrap();
                let ApartmentVerdict::Found { frame, normal_basis: Some(b) } = r else { panic!("{r:?}") };
                assert!(is_normal_basis(&b, g.form().unwrap()).unwrap());
                assert!(is_adapted(&fl[i], &frame).unwrap() && is_adapted(&fl[j], &frame).unwrap());
            }
        }
        assert!(common_frame(&fl, &g).unwrap().is_absent());
    }

    #[test]
    fn sp4_flags() {
        let g = GroupSpec::<F3>::sp(4).unwrap();
        let w = g.form().unwrap();
        let e = |x: &[i64]| x.iter().map(|&a| F3::new(a)).collect::<Vec<_>>();
        let lag = Subspace::span(4, &[e(&[1, 0, 0, 0]), e(&[0, 1, 0, 0])]).unwrap();
        let l = Subspace::span(4, &[e(&[1, 0, 0, 0])]).unwrap();
        let f1 = Flag::new(vec![l.clone(), lag.clone(), symplectic_complement(&l, w).unwrap(), Subspace::full(4)])
            .unwrap();
        let m = Subspace::span(4, &[e(&[0, 0, 1, 1])]).unwrap();
        let f2 = Flag::new(vec![m.clone(), symplectic_complement(&m, w).unwrap(), Subspace::full(4)]).unwrap();
        let r = common_frame(&[f1.clone(), f2.clone()], &g).unwrap();
        let ApartmentVerdict::Found { frame, normal_basis: Some(b) } = r else { panic!("{r:?}") };
        assert!(is_normal_basis(&b, w).unwrap());
        assert!(is_adapted(&f1, &frame).unwrap() && is_adapted(&f2, &frame).unwrap());
    }

    #[test]
    fn non_isotropic_flags_rejected() {
        let g = GroupSpec::<Q>::sp(4).unwrap();
        let f = Flag::from_pieces_completing(4, vec![Subspace::coordinate(4, &[0])]).unwrap();
        assert!(common_frame(&[f], &g).is_err());
    }

    #[test]
    fn symplectic_gram_schmidt() {
        let w = SymplecticForm::<Q>::standard(4).unwrap();
        let vs = vec![v(&[1, 1, 0, 0]), v(&[0, 1, 0, 0]), v(&[0, 0, 1, 0]), v(&[0, 0, 1, 1])];
        let b = symplectic_basis(&w, &vs).unwrap();
        assert!(is_normal_basis(&b, &w).unwrap());
        assert!(symplectic_basis(&w, &[v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])]).is_none());
    }
}
