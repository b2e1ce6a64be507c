//! Rational polyhedral fans in `N_R = R^n`, given by rays and maximal cones.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::linalg::lp::{feasible_point, in_cone};
use crate::linalg::Matrix;

pub const DEFAULT_HILBERT_BUDGET: usize = 1_000_000;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// `v` divided by the gcd of its entries.
pub fn primitive(v: &[i64]) -> Result<Vec<i64>> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / g).collect())
}

pub fn to_rational(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_i64(x)).collect()
}

fn is_independent(vs: &[Vec<i64>], n: usize) -> bool {
    let rows: Vec<Vec<Rational>> = vs.iter().map(|v| to_rational(v)).collect();
    Matrix::from_rows(n, &rows).map(|m| m.rank() == vs.len()).unwrap_or(false)
}

/// A fan: primitive ray generators and maximal cones as sorted sets of ray indices.
///
/// Faces of the listed cones are implicit: for a valid fan the faces of a cone
/// are the cones spanned by subsets of its rays cut out by supporting hyperplanes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
    trusted: bool,
}

impl Fan {
    /// Checks shapes only; call [`Fan::validate`] for the fan axioms.
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Self> {
        for r in &rays {
            crate::error::check_dim(rank, r.len())?;
        }
        let mut sorted = Vec::with_capacity(cones.len());
        for c in cones {
            let set: BTreeSet<usize> = c.iter().copied().collect();
            if set.len() != c.len() {
                return Err(Error::InvalidCone(format!("cone {c:?} repeats a ray")));
            }
            if let Some(&bad) = set.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidCone(format!("ray index {bad} out of range")));
            }
            sorted.push(set.into_iter().collect());
        }
        Ok(Fan { rank, rays, cones: sorted, trusted: false })
    }

    /// Marks a non-simplicial fan as trusted: intersections of cones are not checked.
    pub fn trusted(mut self) -> Self {
        self.trusted = true;
        self
    }

    pub fn is_trusted(&self) -> bool {
        self.trusted
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    /// Maximal cones.
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> Cone {
        Cone { generators: self.cones[i].iter().map(|&r| self.rays[r].clone()).collect(), rank: self.rank }
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| is_independent(&c.iter().map(|&r| self.rays[r].clone()).collect::<Vec<_>>(), self.rank))
    }

    /// Ray indices shared by two maximal cones: the rays of their common face.
    pub fn shared_rays(&self, a: usize, b: usize) -> Vec<usize> {
        self.cones[a].iter().copied().filter(|r| self.cones[b].contains(r)).collect()
    }

    /// Maximal cones containing the ray.
    pub fn cones_of_ray(&self, ray: usize) -> Vec<usize> {
        (0..self.cones.len()).filter(|&c| self.cones[c].contains(&ray)).collect()
    }

    /// Maximal cones containing the point.
    pub fn containing_cones(&self, v: &[Rational]) -> Result<Vec<usize>> {
        crate::error::check_dim(self.rank, v.len())?;
        Ok((0..self.cones.len()).filter(|&c| self.cone(c).contains(v)).collect())
    }

    /// Checks the fan axioms, returning every violation found.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut diags = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            match primitive(r) {
                Err(_) => diags.push(format!("ray {i} is zero")),
                Ok(p) if p != *r => diags.push(format!("ray {i} {r:?} is not primitive")),
                Ok(_) => {}
            }
        }
        if !diags.is_empty() {
            return Err(diags);
        }
        let used: BTreeSet<usize> = self.cones.iter().flatten().copied().collect();
        for i in 0..self.rays.len() {
            if !used.contains(&i) {
                diags.push(format!("ray {i} belongs to no cone"));
            }
        }
        for (ci, c) in self.cones.iter().enumerate() {
            if c.is_empty() {
                diags.push(format!("cone {ci} has no rays"));
                continue;
            }
            let cone = self.cone(ci);
            if !cone.is_strongly_convex() {
                diags.push(format!("cone {ci} contains a line"));
                continue;
            }
            for (k, &r) in c.iter().enumerate() {
                let others: Vec<Vec<i64>> =
                    c.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &s)| self.rays[s].clone()).collect();
                if (Cone { generators: others, rank: self.rank }).contains(&to_rational(&self.rays[r])) {
                    diags.push(format!("ray {r} is not an extremal ray of cone {ci}"));
                }
            }
        }
        for a in 0..self.cones.len() {
            for b in 0..self.cones.len() {
                if a != b && self.cones[a].iter().all(|r| self.cones[b].contains(r)) {
                    diags.push(format!("cone {a} is a face of cone {b}, not maximal"));
                }
            }
        }
        if diags.is_empty() && !self.trusted {
            if !self.is_simplicial() {
                diags.push("fan is not simplicial; mark it trusted to skip intersection checks".into());
            } else {
                for a in 0..self.cones.len() {
                    for b in a + 1..self.cones.len() {
                        if !self.intersection_is_common_face(a, b) {
                            diags.push(format!("cones {a} and {b} meet outside a common face"));
                        }
                    }
                }
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    /// For simplicial cones `σ_a, σ_b` with shared rays `S`: `σ_a ∩ σ_b = cone(S)`.
    ///
    /// Decided by infeasibility of `Σ λ_i u_i = Σ μ_j w_j`, `λ, μ >= 0`, with unit
    /// weight on the rays of `σ_a` outside `S`: such a point would lie in the
    /// intersection but not in `cone(S)`, since simplicial coordinates are unique.
    fn intersection_is_common_face(&self, a: usize, b: usize) -> bool {
        let ua = &self.cones[a];
        let ub = &self.cones[b];
        let shared = self.shared_rays(a, b);
        let outside: Vec<usize> = ua.iter().copied().filter(|r| !shared.contains(r)).collect();
        if outside.is_empty() {
            return true;
        }
        let n = self.rank;
        let cols = ua.len() + ub.len();
        let mut m = Matrix::<Rational>::zeros(n + 1, cols);
        for (j, &r) in ua.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, Rational::from_i64(self.rays[r][i]));
            }
            if outside.contains(&r) {
                m.set(n, j, Rational::one());
            }
        }
        for (j, &r) in ub.iter().enumerate() {
            for i in 0..n {
                m.set(i, ua.len() + j, Rational::from_i64(-self.rays[r][i]));
            }
        }
        let mut rhs = vec![Rational::zero(); n + 1];
        rhs[n] = Rational::one();
        feasible_point(&m, &rhs).is_none()
    }
}

/// A cone spanned by integer generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    generators: Vec<Vec<i64>>,
    rank: usize,
}

impl Cone {
    pub fn new(rank: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        for g in &generators {
            crate::error::check_dim(rank, g.len())?;
            if g.iter().all(|&x| x == 0) {
                return Err(Error::ZeroVector);
            }
        }
        Ok(Cone { generators, rank })
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        let rows: Vec<Vec<Rational>> = self.generators.iter().map(|v| to_rational(v)).collect();
        Matrix::from_rows(self.rank, &rows).map(|m| m.rank()).unwrap_or(0)
    }

    pub fn is_simplicial(&self) -> bool {
        is_independent(&self.generators, self.rank)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let gens: Vec<Vec<Rational>> = self.generators.iter().map(|g| to_rational(g)).collect();
        in_cone(&gens, v)
    }

    fn contains_int(&self, v: &[i64]) -> bool {
        self.contains(&to_rational(v))
    }

    /// No nonzero nonnegative combination of the generators vanishes.
    pub fn is_strongly_convex(&self) -> bool {
        let k = self.generators.len();
        if k == 0 {
            return true;
        }
        let n = self.rank;
        let mut m = Matrix::<Rational>::zeros(n + 1, k);
        for (j, g) in self.generators.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, Rational::from_i64(g[i]));
            }
            m.set(n, j, Rational::one());
        }
        let mut rhs = vec![Rational::zero(); n + 1];
        rhs[n] = Rational::one();
        feasible_point(&m, &rhs).is_none()
    }

    /// A finite generating set of the semigroup `σ ∩ Z^n`, reduced to its irreducible elements.
    pub fn lattice_generators(&self) -> Result<Vec<Vec<i64>>> {
        self.lattice_generators_with_budget(DEFAULT_HILBERT_BUDGET)
    }

    pub fn lattice_generators_with_budget(&self, budget: usize) -> Result<Vec<Vec<i64>>> {
        if !self.is_strongly_convex() {
            return Err(Error::Precondition("cone is not strongly convex".into()));
        }
        let mut candidates: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut scanned = 0usize;
        if self.is_simplicial() {
            parallelepiped_points(&self.generators, self.rank, budget, &mut scanned, &mut candidates)?;
        } else {
            // Every point lies in the cone over some independent subset of generators.
            let d = self.dim();
            for subset in independent_subsets(&self.generators, self.rank, d) {
                let gens: Vec<Vec<i64>> = subset.iter().map(|&i| self.generators[i].clone()).collect();
                parallelepiped_points(&gens, self.rank, budget, &mut scanned, &mut candidates)?;
            }
        }
        let cands: Vec<Vec<i64>> = candidates.into_iter().collect();
        let mut out = Vec::new();
        for x in &cands {
            let reducible = cands.iter().any(|y| {
                y != x && {
                    let diff: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    diff.iter().any(|&c| c != 0) && self.contains_int(&diff)
                }
            });
            if !reducible {
                out.push(x.clone());
            }
        }
        Ok(out)
    }
}

fn independent_subsets(gens: &[Vec<i64>], n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let k = gens.len();
    let mut idx: Vec<usize> = (0..d).collect();
    if d == 0 || d > k {
        return out;
    }
    loop {
        let vs: Vec<Vec<i64>> = idx.iter().map(|&i| gens[i].clone()).collect();
        if is_independent(&vs, n) {
            out.push(idx.clone());
        }
        // Next combination in lexicographic order.
        let mut i = d;
        while i > 0 && idx[i - 1] == k - d + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Generators plus the nonzero lattice points `Σ t_i u_i`, `0 <= t_i < 1`.
fn parallelepiped_points(
    gens: &[Vec<i64>],
    n: usize,
    budget: usize,
    scanned: &mut usize,
    out: &mut BTreeSet<Vec<i64>>,
) -> Result<()> {
    for g in gens {
        out.insert(g.clone());
    }
    let lo: Vec<i64> = (0..n).map(|i| gens.iter().map(|g| g[i].min(0)).sum()).collect();
    let hi: Vec<i64> = (0..n).map(|i| gens.iter().map(|g| g[i].max(0)).sum()).collect();
    let volume = lo.iter().zip(&hi).try_fold(1usize, |acc, (l, h)| acc.checked_mul((h - l + 1) as usize));
    match volume {
        Some(v) if scanned.saturating_add(v) <= budget => *scanned += v,
        _ => return Err(Error::BudgetExceeded { what: "lattice point scan".into(), budget }),
    }
    // Coordinates in the generator basis: solve G t = x on the span.
    let cols: Vec<Vec<Rational>> = gens.iter().map(|g| to_rational(g)).collect();
    let gmat = Matrix::from_columns(n, &cols)?;
    let mut x = lo.clone();
    loop {
        if x.iter().any(|&c| c != 0) {
            if let Some((t, _)) = crate::linalg::solve_linear(&gmat, &to_rational(&x))? {
                let zero = Rational::zero();
                let one = Rational::one();
                if t.iter().all(|c| *c >= zero && *c < one) {
                    out.insert(x.clone());
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i];
            i += 1;
        }
    }
}

/// The fan of `P^1`: rays `1` and `-1`.
pub fn fan_p1() -> Fan {
    Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).expect("static fan")
}

/// The fan of `P^n`: rays `e_1, ..., e_n, -(e_1 + ... + e_n)`, maximal cones all `n`-subsets.
pub fn fan_pn(n: usize) -> Result<Fan> {
    if n == 0 {
        return Err(Error::Precondition("P^n needs n >= 1".into()));
    }
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    rays.push(vec![-1; n]);
    let cones = (0..=n).rev().map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    Fan::new(n, rays, cones)
}

/// The Hirzebruch surface `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
pub fn fan_hirzebruch(a: i64) -> Result<Fan> {
    if a < 0 {
        return Err(Error::Precondition("Hirzebruch parameter must be nonnegative".into()));
    }
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
}

/// Product fan in `N_1 ⊕ N_2`: maximal cones are products of maximal cones.
pub fn fan_product(f1: &Fan, f2: &Fan) -> Fan {
    let (n1, n2) = (f1.rank, f2.rank);
    let mut rays: Vec<Vec<i64>> =
        f1.rays.iter().map(|r| r.iter().copied().chain(std::iter::repeat_n(0, n2)).collect()).collect();
    rays.extend(f2.rays.iter().map(|r| std::iter::repeat_n(0, n1).chain(r.iter().copied()).collect()));
    let off = f1.rays.len();
    let mut cones = Vec::new();
    for c1 in &f1.cones {
        for c2 in &f2.cones {
            cones.push(c1.iter().copied().chain(c2.iter().map(|r| r + off)).collect());
        }
    }
    Fan { rank: n1 + n2, rays, cones, trusted: f1.trusted || f2.trusted }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[2, 4]).unwrap(), vec![1, 2]);
        assert_eq!(primitive(&[1, 0]).unwrap(), vec![1, 0]);
        assert_eq!(primitive(&[-6, 9]).unwrap(), vec![-2, 3]);
        assert!(primitive(&[0, 0]).is_err());
    }

    #[test]
    fn standard_fans_validate() {
        assert!(fan_p1().validate().is_ok());
        for n in 1..=3 {
            assert!(fan_pn(n).unwrap().validate().is_ok());
        }
        for a in 0..3 {
            assert!(fan_hirzebruch(a).unwrap().validate().is_ok());
        }
        let p1p1 = fan_product(&fan_p1(), &fan_p1());
        assert_eq!(p1p1.rays().len(), 4);
        assert_eq!(p1p1.cones().len(), 4);
        assert!(p1p1.validate().is_ok());
        let p2 = fan_pn(2).unwrap();
        assert_eq!((p2.rays().len(), p2.cones().len()), (3, 3));
        assert_eq!(fan_pn(1).unwrap().rays(), fan_p1().rays());
    }

    #[test]
    fn overlapping_cones_rejected() {
        let f = Fan::new(2, vec![vec![1, 0], vec![1, 2], vec![0, 1], vec![2, 1]], vec![vec![0, 1], vec![2, 3]]).unwrap();
        let err = f.validate().unwrap_err();
        assert!(err.iter().any(|d| d.contains("meet outside")), "{err:?}");
        let bad = Fan::new(1, vec![vec![2]], vec![vec![0]]).unwrap();
        assert!(bad.validate().is_err());
        let line = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0, 1]]).unwrap();
        assert!(line.validate().is_err());
    }

    #[test]
    fn hilbert_bases() {
        let c = Cone::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(c.lattice_generators().unwrap(), vec![vec![0, 1], vec![1, 0]]);
        let r = Cone::new(2, vec![vec![1, 2]]).unwrap();
        assert_eq!(r.lattice_generators().unwrap(), vec![vec![1, 2]]);
        let c = Cone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
        assert_eq!(c.lattice_generators().unwrap(), vec![vec![1, 0], vec![1, 1], vec![1, 2]]);
        // Non-simplicial cone over a square.
        let sq = Cone::new(3, vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]]).unwrap();
        let hb = sq.lattice_generators().unwrap();
        assert!(hb.contains(&vec![0, 0, 1]));
        assert_eq!(hb.len(), 5);
    }

    #[test]
    fn point_location() {
        let p2 = fan_pn(2).unwrap();
        let v = to_rational(&[-1, -2]);
        assert_eq!(p2.containing_cones(&v).unwrap().len(), 1);
        let on_ray = to_rational(&[1, 0]);
        assert_eq!(p2.containing_cones(&on_ray).unwrap().len(), 2);
    }
}
