//! Splitting, reduction of structure group and automorphisms of a PL map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::building::apartment::ApartmentVerdict;
use crate::building::{
    common_frame, is_isotropic_flag, symmetric_labels_ok, Flag, Frame, GroupKind, GroupSpec, LabeledFlag,
    SymplecticForm,
};
use crate::error::{Error, Result};
use crate::fan::to_rational;
use crate::field::{Field, Rational};
use crate::linalg::{kernel, Matrix, Subspace};
use crate::plmap::{chart_through_rays, charts_agree, ApartmentChart, PLMap};

/// A three-way decision with a witness on success.
#[derive(Clone, PartialEq, Eq)]
pub enum Verdict<T> {
    Yes(T),
    No(String),
    Undetermined(String),
}

impl<T> Verdict<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn witness(&self) -> Option<&T> {
        match self {
            Verdict::Yes(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Undetermined(_) => "undetermined",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Verdict::Yes(_) => None,
            Verdict::No(r) | Verdict::Undetermined(r) => Some(r),
        }
    }
}

impl<T> std::fmt::Debug for Verdict<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Yes(_) => write!(f, "Yes(..)"),
            Verdict::No(r) => write!(f, "No({r})"),
            Verdict::Undetermined(r) => write!(f, "Undetermined({r})"),
        }
    }
}

fn ray_flag_pieces<F: Field>(p: &PLMap<F>) -> Result<Vec<Flag<F>>> {
    Ok(p.ray_flags()?.into_iter().map(|lf| lf.flag().clone()).collect())
}

/// A maximal torus (frame, or normal frame for Sp) whose extended apartment
/// contains the whole image.
///
/// Only ray flags are consulted. Within a chart, the flag at `Σ t_ρ v_ρ` has
/// pieces `Σ_{Σ t_ρ c_ρ ≥ c} ∩_ρ F^ρ(c_ρ)`, built from ray-flag pieces by sums
/// and intersections, and the coordinate subspaces of a frame are closed under
/// both. So a frame adapted to every ray flag is adapted to every value.
pub fn decide_split<F: Field>(p: &PLMap<F>) -> Result<Verdict<Frame<F>>> {
    let flags = ray_flag_pieces(p)?;
    if flags.is_empty() {
        return Ok(Verdict::Yes(Frame::standard(p.group().size())));
    }
    Ok(match common_frame(&flags, p.group())? {
        ApartmentVerdict::Found { frame, .. } => Verdict::Yes(frame),
        ApartmentVerdict::Absent(r) => Verdict::No(r),
        ApartmentVerdict::Undetermined(r) => Verdict::Undetermined(r),
    })
}

/// Whether every chart has weight sum zero on its cone, which is the SL trace condition.
pub fn decide_reduction_sl<F: Field>(p: &PLMap<F>) -> Result<bool> {
    for (ci, cone) in p.fan().cones().iter().enumerate() {
        for &r in cone {
            let w = p.chart(ci).weights_at(&to_rational(p.fan().ray(r)))?;
            if w.iter().fold(Rational::zero(), |a, x| a.add(x)) != Rational::zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Search limits for the symplectic reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpSearch {
    /// Largest grid of coefficient vectors swept to prove that no nondegenerate form exists.
    pub grid_budget: usize,
    /// Number of seeded random combinations tried.
    pub random_tries: usize,
    /// Number of nondegenerate forms tried when re-charting.
    pub form_tries: usize,
    pub seed: u64,
}

impl Default for SpSearch {
    fn default() -> Self {
        SpSearch { grid_budget: 100_000, random_tries: 64, form_tries: 16, seed: 0 }
    }
}

/// A symplectic form and the same map written with ω-normal charts.
#[derive(Clone, PartialEq, Eq)]
pub struct SpCertificate<F> {
    pub form: SymplecticForm<F>,
    pub map: PLMap<F>,
}

impl<F: Field> SpCertificate<F> {
    /// Re-checks the certificate against the map it was produced for.
    pub fn verify(&self, original: &PLMap<F>) -> Result<bool> {
        let n = self.form.dim();
        let rf = original.ray_flags()?;
        for lf in &rf {
            if !is_isotropic_flag(lf.flag(), &self.form)? || !symmetric_labels_ok(lf, n) {
                return Ok(false);
            }
        }
        if self.map.group().form() != Some(&self.form) || self.map.validate()?.is_err() {
            return Ok(false);
        }
        if self.map.ray_flags()? != rf {
            return Ok(false);
        }
        for (ci, cone) in original.fan().cones().iter().enumerate() {
            let gens: Vec<Vec<i64>> = cone.iter().map(|&r| original.fan().ray(r).to_vec()).collect();
            if charts_agree(&gens, original.chart(ci), self.map.chart(ci))?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<F: Field> std::fmt::Debug for SpCertificate<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpCertificate").field("form", &self.form).field("map", &self.map).finish()
    }
}

/// Skew forms (as strictly upper triangular parameters) vanishing on `F_j × F_{k-j}` for every ray flag.
fn invariant_forms<F: Field>(n: usize, flags: &[LabeledFlag<F>]) -> Result<Vec<Matrix<F>>> {
    let params: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut rows = Vec::new();
    for lf in flags {
        let pieces = lf.flag().pieces();
        let k = pieces.len();
        for j in 1..k {
            for x in pieces[j - 1].basis_vectors() {
                for y in pieces[k - j - 1].basis_vectors() {
                    rows.push(params.iter().map(|&(a, b)| x[a].mul(&y[b]).sub(&x[b].mul(&y[a]))).collect::<Vec<F>>());
                }
            }
        }
    }
    let sol = if rows.is_empty() {
        Subspace::full(params.len())
    } else {
        kernel(&Matrix::from_rows(params.len(), &rows)?)
    };
    Ok(sol
        .basis_vectors()
        .iter()
        .map(|v| {
            let mut m = Matrix::zeros(n, n);
            for (&(a, b), c) in params.iter().zip(v) {
                m.set(a, b, c.clone());
                m.set(b, a, c.neg());
            }
            m
        })
        .collect())
}

fn combine<F: Field>(basis: &[Matrix<F>], coeffs: &[F]) -> Matrix<F> {
    let n = basis[0].rows();
    basis
        .iter()
        .zip(coeffs)
        .fold(Matrix::zeros(n, n), |acc, (b, c)| acc.add(&b.scale(c)).expect("same shape"))
}

/// Nondegenerate members of the span of `basis`, cheapest candidates first.
///
/// `Err(true)` means none exists: `det(Σ t_i B_i)` has degree at most `n` in
/// each `t_i`, so it vanishes on the grid `{0..n}^d` (or on all of `F_p^d` for
/// small `p`) only if it vanishes identically as a function on the field.
fn nondegenerate_forms<F: Field>(
    basis: &[Matrix<F>],
    search: &SpSearch,
) -> std::result::Result<Vec<Matrix<F>>, bool> {
    let d = basis.len();
    if d == 0 {
        return Err(true);
    }
    let n = basis[0].rows();
    let mut found: Vec<Matrix<F>> = Vec::new();
    let push = |m: Matrix<F>, found: &mut Vec<Matrix<F>>| {
        if m.is_invertible() && !found.contains(&m) {
            found.push(m);
        }
        found.len() >= search.form_tries
    };
    for i in 0..d {
        if push(basis[i].clone(), &mut found) {
            return Ok(found);
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            if push(basis[i].add(&basis[j]).expect("same shape"), &mut found) {
                return Ok(found);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    for _ in 0..search.random_tries {
        let c: Vec<F> = (0..d).map(|_| F::from_i64(rng.gen_range(-9..=9))).collect();
        if push(combine(basis, &c), &mut found) {
            return Ok(found);
        }
    }
    if !found.is_empty() {
        return Ok(found);
    }
    let values: Vec<F> = match F::elements() {
        Some(all) if all.len() <= n + 1 => all,
        _ => (0..=n as i64).map(F::from_i64).collect(),
    };
    let total = (values.len() as u128).checked_pow(d as u32);
    if total.is_none_or(|t| t > search.grid_budget as u128) {
        return Err(false);
    }
    let mut idx = vec![0usize; d];
    loop {
        let c: Vec<F> = idx.iter().map(|&i| values[i].clone()).collect();
        if push(combine(basis, &c), &mut found) || !found.is_empty() {
            return Ok(found);
        }
        let mut pos = 0;
        loop {
            if pos == d {
                return Err(true);
            }
            idx[pos] += 1;
            if idx[pos] < values.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Re-charts every cone with an ω-normal frame; `Ok(Err(cone))` names the first cone that fails.
fn sp_recharts<F: Field>(
    p: &PLMap<F>,
    rays: &[LabeledFlag<F>],
    group: &GroupSpec<F>,
) -> Result<std::result::Result<PLMap<F>, (usize, bool)>> {
    let fan = p.fan();
    let mut charts = Vec::with_capacity(fan.cones().len());
    for (ci, cone) in fan.cones().iter().enumerate() {
        let flags: Vec<Flag<F>> = cone.iter().map(|&r| rays[r].flag().clone()).collect();
        let frame = match common_frame(&flags, group)? {
            ApartmentVerdict::Found { frame, .. } => frame,
            ApartmentVerdict::Absent(_) => return Ok(Err((ci, true))),
            ApartmentVerdict::Undetermined(_) => return Ok(Err((ci, false))),
        };
        match rechart(p, ci, &frame, rays)? {
            Some(c) => charts.push(c),
            None => return Ok(Err((ci, false))),
        }
    }
    let m = PLMap::new(group.clone(), fan.clone(), charts)?;
    Ok(if m.validate()?.is_ok() { Ok(m) } else { Err((0, false)) })
}

/// The chart on cone `ci` with the given frame that agrees with the existing one.
fn rechart<F: Field>(
    p: &PLMap<F>,
    ci: usize,
    frame: &Frame<F>,
    rays: &[LabeledFlag<F>],
) -> Result<Option<ApartmentChart<F>>> {
    let cone = &p.fan().cones()[ci];
    let gens: Vec<Vec<i64>> = cone.iter().map(|&r| p.fan().ray(r).to_vec()).collect();
    let values: Vec<&LabeledFlag<F>> = cone.iter().map(|&r| &rays[r]).collect();
    let Some(chart) = chart_through_rays(frame, &gens, &values, p.fan().rank())? else {
        return Ok(None);
    };
    Ok(if charts_agree(&gens, p.chart(ci), &chart)?.is_none() { Some(chart) } else { None })
}

/// Reduction to Sp: a nondegenerate skew form making every ray flag isotropic
/// with symmetric labels, together with ω-normal charts for the same map.
pub fn decide_reduction_sp<F: Field>(p: &PLMap<F>, search: &SpSearch) -> Result<Verdict<SpCertificate<F>>> {
    let n = p.group().size();
    if n % 2 != 0 {
        return Err(Error::Precondition(format!("ambient dimension {n} is odd")));
    }
    let rays = p.ray_flags()?;
    for (i, lf) in rays.iter().enumerate() {
        if !symmetric_labels_ok(lf, n) {
            return Ok(Verdict::No(format!("asymmetric labels at ray {i}")));
        }
    }
    let basis = invariant_forms(n, &rays)?;
    let forms = match nondegenerate_forms(&basis, search) {
        Ok(f) => f,
        Err(true) => return Ok(Verdict::No("no nondegenerate invariant form".into())),
        Err(false) => {
            return Ok(Verdict::Undetermined(format!(
                "no nondegenerate form found in a {}-dimensional solution space within budget",
                basis.len()
            )))
        }
    };
    let mut last_failure = String::new();
    for gram in forms {
        let form = SymplecticForm::new(gram)?;
        let group = GroupSpec::sp_with_form(form.clone());
        match sp_recharts(p, &rays, &group)? {
            Ok(map) => {
                let cert = SpCertificate { form, map };
                if !cert.verify(p)? {
                    return Ok(Verdict::Undetermined("certificate failed re-verification".into()));
                }
                return Ok(Verdict::Yes(cert));
            }
            Err((cone, proven)) => {
                // With a one-dimensional solution space every candidate is a
                // rescaling, and normal frames do not depend on the scale.
                if proven && basis.len() == 1 {
                    return Ok(Verdict::No(format!("cone {cone} has no normal frame for the unique invariant form")));
                }
                last_failure = format!("cone {cone} could not be re-charted with a normal frame");
            }
        }
    }
    Ok(Verdict::Undetermined(last_failure))
}

/// Splits a map whose image lies in the building of the parabolic `Stab(f0)`
/// into one map per graded piece `f0_i / f0_{i-1}`.
pub fn reduce_to_levi<F: Field>(p: &PLMap<F>, f0: &Flag<F>) -> Result<Vec<PLMap<F>>> {
    let n = p.group().size();
    if f0.ambient() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f0.ambient() });
    }
    if f0.is_trivial() {
        return Ok(vec![p.clone()]);
    }
    let gl = GroupSpec::gl(n);
    let rays = p.ray_flags()?;
    for (i, lf) in rays.iter().enumerate() {
        if !common_frame(&[lf.flag().clone(), f0.clone()], &gl)?.is_found() {
            return Err(Error::Precondition(format!("ray {i}: flag shares no apartment with the parabolic flag")));
        }
    }
    let mut charts = Vec::new();
    for (ci, cone) in p.fan().cones().iter().enumerate() {
        let mut flags: Vec<Flag<F>> = cone.iter().map(|&r| rays[r].flag().clone()).collect();
        flags.push(f0.clone());
        let frame = match common_frame(&flags, &gl)? {
            ApartmentVerdict::Found { frame, .. } => frame,
            _ => {
                return Err(Error::Precondition(format!(
                    "cone {ci}: no frame adapted to the ray flags and the parabolic flag"
                )))
            }
        };
        charts.push(
            rechart(p, ci, &frame, &rays)?
                .ok_or_else(|| Error::Precondition(format!("cone {ci}: cannot re-chart with a frame adapted to f0")))?,
        );
    }
    let mut blocks = Vec::new();
    let mut prev = Subspace::zero(n);
    for piece in f0.pieces() {
        let comp = piece.complement_in(&prev)?;
        let d = comp.len();
        // Coordinates of x ∈ piece along comp, modulo prev.
        let mut cols = comp.clone();
        cols.extend(prev.basis_vectors());
        let coords = Matrix::from_columns(n, &cols)?;
        let mut block_charts = Vec::new();
        for c in &charts {
            let mut vs = Vec::new();
            let mut rows = Vec::new();
            for (i, v) in c.frame().vectors().into_iter().enumerate() {
                if piece.contains(&v)? && !prev.contains(&v)? {
                    let (x, _) = crate::linalg::solve_linear(&coords, &v)?.expect("vector lies in the piece");
                    vs.push(x[..d].to_vec());
                    rows.push(c.weights().row(i).to_vec());
                }
            }
            block_charts.push(ApartmentChart::from_rows(&vs, &rows, p.fan().rank())?);
        }
        let block = PLMap::new(GroupSpec::gl(d), p.fan().clone(), block_charts)?;
        if let Err(diags) = block.validate()? {
            return Err(Error::InvalidMap(format!("block of dimension {d}: {}", diags[0])));
        }
        blocks.push(block);
        prev = piece.clone();
    }
    Ok(blocks)
}

/// Constraints from one ray: entries `(i, j)` of `U^{-1} X U` forced to vanish.
#[derive(Clone, PartialEq, Eq)]
pub struct RayConstraint<F> {
    pub ray: usize,
    pub frame: Frame<F>,
    pub weights: Vec<Rational>,
    pub forbidden: Vec<(usize, usize)>,
}

impl<F: Field> std::fmt::Debug for RayConstraint<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RayConstraint(ray {}, forbidden {:?})", self.ray, self.forbidden)
    }
}

/// The equivariant automorphism group `∩_ρ P_ρ`, through its Lie algebra.
#[derive(Clone)]
pub struct AutReport<F> {
    pub group: GroupSpec<F>,
    /// Dimension from the assembled entry constraints.
    pub dimension: usize,
    /// Dimension from intersecting per-ray stabilizer algebras.
    pub dimension_by_intersection: usize,
    pub constraints: Vec<RayConstraint<F>>,
    pub ray_flags: Vec<Flag<F>>,
}

impl<F: Field> AutReport<F> {
    /// Whether `g` lies in the group and stabilizes every ray flag.
    pub fn contains(&self, g: &Matrix<F>) -> Result<bool> {
        if !self.group.contains(g)? {
            return Ok(false);
        }
        for f in &self.ray_flags {
            if !f.is_stabilized_by(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<F: Field> std::fmt::Debug for AutReport<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AutReport")
            .field("dimension", &self.dimension)
            .field("dimension_by_intersection", &self.dimension_by_intersection)
            .field("constraints", &self.constraints)
            .finish()
    }
}

/// Linear conditions on `vec(X)` (row-major) cutting out the Lie algebra of the group.
fn group_rows<F: Field>(group: &GroupSpec<F>) -> Vec<Vec<F>> {
    let r = group.size();
    let mut rows = Vec::new();
    match group.kind() {
        GroupKind::GL => {}
        GroupKind::SL => {
            let mut t = vec![F::zero(); r * r];
            for k in 0..r {
                t[k * r + k] = F::one();
            }
            rows.push(t);
        }
        GroupKind::Sp => {
            let w = group.form().expect("Sp form").gram();
            // (X^T Ω + Ω X)_{ab} = Σ_k X_{ka} Ω_{kb} + Σ_k Ω_{ak} X_{kb}
            for a in 0..r {
                for b in a + 1..r {
                    let mut row = vec![F::zero(); r * r];
                    for k in 0..r {
                        row[k * r + a] = row[k * r + a].add(w.get(k, b));
                        row[k * r + b] = row[k * r + b].add(w.get(a, k));
                    }
                    rows.push(row);
                }
            }
        }
    }
    rows
}

fn dim_of_solutions<F: Field>(cols: usize, rows: &[Vec<F>]) -> Result<usize> {
    if rows.is_empty() {
        return Ok(cols);
    }
    Ok(cols - Matrix::from_rows(cols, rows)?.rank())
}

pub fn aut_report<F: Field>(p: &PLMap<F>) -> Result<AutReport<F>> {
    let r = p.group().size();
    let fan = p.fan();
    let mut constraints = Vec::new();
    let mut rows = group_rows(p.group());
    for ray in 0..fan.rays().len() {
        let ci = *fan.cones_of_ray(ray).first().ok_or_else(|| Error::InvalidMap(format!("ray {ray} in no cone")))?;
        let chart = p.chart(ci);
        let a = chart.weights_at(&to_rational(fan.ray(ray)))?;
        let u = chart.frame().matrix();
        let uinv = u.inverse()?;
        let mut forbidden = Vec::new();
        for i in 0..r {
            for j in 0..r {
                if a[i] < a[j] {
                    forbidden.push((i, j));
                    let mut row = vec![F::zero(); r * r];
                    for k in 0..r {
                        for l in 0..r {
                            row[k * r + l] = uinv.get(i, k).mul(u.get(l, j));
                        }
                    }
                    rows.push(row);
                }
            }
        }
        constraints.push(RayConstraint { ray, frame: chart.frame().clone(), weights: a, forbidden });
    }
    let dimension = dim_of_solutions(r * r, &rows)?;

    let ray_flags = ray_flag_pieces(p)?;
    let base = group_rows(p.group());
    let mut acc = if base.is_empty() { Subspace::full(r * r) } else { kernel(&Matrix::from_rows(r * r, &base)?) };
    for f in &ray_flags {
        acc = acc.intersect(&stabilizer_algebra(f)?)?;
    }
    Ok(AutReport {
        group: p.group().clone(),
        dimension,
        dimension_by_intersection: acc.dim(),
        constraints,
        ray_flags,
    })
}

/// `{X : X F_j ⊆ F_j for all j}` as a subspace of `F^{r²}`.
pub fn stabilizer_algebra<F: Field>(flag: &Flag<F>) -> Result<Subspace<F>> {
    let r = flag.ambient();
    let mut rows = Vec::new();
    for piece in flag.pieces() {
        let ann = piece.annihilator().basis_vectors();
        for x in piece.basis_vectors() {
            for y in &ann {
                let mut row = vec![F::zero(); r * r];
                for k in 0..r {
                    for l in 0..r {
                        row[k * r + l] = y[k].mul(&x[l]);
                    }
                }
                rows.push(row);
            }
        }
    }
    Ok(if rows.is_empty() { Subspace::full(r * r) } else { kernel(&Matrix::from_rows(r * r, &rows)?) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{fan_p1, fan_pn};
    use crate::field::rat;
    use crate::plmap::KlyachkoData;

    type Q = Rational;

    fn q(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| rat(a)).collect()
    }

    fn line_flag(v: &[i64], labels: &[i64]) -> LabeledFlag<Q> {
        let f = Flag::from_pieces_completing(v.len(), vec![Subspace::line(&q(v)).unwrap()]).unwrap();
        LabeledFlag::new(f, q(labels)).unwrap()
    }

    fn three_lines() -> PLMap<Q> {
        let k = KlyachkoData::new(
            GroupSpec::gl(2),
            fan_pn(2).unwrap(),
            vec![line_flag(&[1, 0], &[1, 0]), line_flag(&[0, 1], &[1, 0]), line_flag(&[1, 1], &[1, 0])],
        )
        .unwrap();
        PLMap::from_klyachko(&k).unwrap()
    }

    #[test]
    fn split_three_lines_and_p1() {
        assert!(decide_split(&three_lines()).unwrap().is_no());
        let c0 = ApartmentChart::from_rows(&[q(&[1, 2]), q(&[0, 1])], &[q(&[3]), q(&[1])], 1).unwrap();
        let c1 = ApartmentChart::from_rows(&[q(&[1, 1]), q(&[1, 0])], &[q(&[-1]), q(&[2])], 1).unwrap();
        let p = PLMap::new(GroupSpec::gl(2), fan_p1(), vec![c0, c1]).unwrap();
        assert!(p.validate().unwrap().is_ok());
        let frame = decide_split(&p).unwrap().witness().unwrap().clone();
        for lf in p.ray_flags().unwrap() {
            assert!(crate::building::is_adapted(lf.flag(), &frame).unwrap());
        }
    }

    #[test]
    fn sl_trace() {
        let c = ApartmentChart::<Q>::new(Frame::standard(2), Matrix::from_i64_rows(&[&[1], &[-1]])).unwrap();
        let p = PLMap::linear(GroupSpec::gl(2), fan_p1(), c).unwrap();
        assert!(decide_reduction_sl(&p).unwrap());
        assert!(!decide_reduction_sl(&three_lines()).unwrap());
    }

    #[test]
    fn sp_on_planes() {
        let k = KlyachkoData::new(
            GroupSpec::gl(2),
            fan_pn(2).unwrap(),
            vec![line_flag(&[1, 0], &[1, -1]), line_flag(&[0, 1], &[2, -2]), line_flag(&[1, 1], &[1, -1])],
        )
        .unwrap();
        let p = PLMap::from_klyachko(&k).unwrap();
        let v = decide_reduction_sp(&p, &SpSearch::default()).unwrap();
        let cert = v.witness().expect("certificate");
        assert!(cert.verify(&p).unwrap());
        assert!(decide_reduction_sp(&three_lines(), &SpSearch::default()).unwrap().is_no());
    }

    #[test]
    fn levi_blocks() {
        let f0 = Flag::from_pieces_completing(2, vec![Subspace::coordinate(2, &[0])]).unwrap();
        let c = ApartmentChart::<Q>::new(Frame::standard(2), Matrix::from_i64_rows(&[&[1], &[0]])).unwrap();
        let p = PLMap::linear(GroupSpec::gl(2), fan_p1(), c).unwrap();
        let blocks = reduce_to_levi(&p, &f0).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].chart(0).weights(), &Matrix::from_i64_rows(&[&[1]]));
        assert_eq!(blocks[1].chart(0).weights(), &Matrix::from_i64_rows(&[&[0]]));
        assert_eq!(reduce_to_levi(&p, &Flag::trivial(2)).unwrap(), vec![p.clone()]);
        assert!(matches!(reduce_to_levi(&three_lines(), &f0), Err(Error::Precondition(_))));
        let f1 = Flag::from_pieces_completing(2, vec![Subspace::line(&q(&[1, -1])).unwrap()]).unwrap();
        assert!(reduce_to_levi(&three_lines(), &f1).is_err());
    }

    #[test]
    fn aut_dimensions() {
        for r in 2..=4 {
            let t = PLMap::<Q>::trivial(GroupSpec::gl(r), fan_pn(2).unwrap()).unwrap();
            let a = aut_report(&t).unwrap();
            assert_eq!((a.dimension, a.dimension_by_intersection), (r * r, r * r));
        }
        let a = aut_report(&three_lines()).unwrap();
        assert_eq!((a.dimension, a.dimension_by_intersection), (1, 1));
        let c = ApartmentChart::<Q>::new(Frame::standard(3), Matrix::from_i64_rows(&[&[2], &[1], &[1]])).unwrap();
        let p = PLMap::linear(GroupSpec::gl(3), crate::fan::Fan::new(1, vec![vec![1]], vec![vec![0]]).unwrap(), c)
            .unwrap();
        let a = aut_report(&p).unwrap();
        assert_eq!(a.constraints[0].forbidden, vec![(1, 0), (2, 0)]);
        assert_eq!((a.dimension, a.dimension_by_intersection), (7, 7));
        let sl = p.with_group(GroupSpec::sl(3)).unwrap();
        assert_eq!(aut_report(&sl).unwrap().dimension, 6);
    }
}
