//! Piecewise-linear maps from a fan into the extended building: one apartment
//! chart (frame plus weight matrix) per maximal cone.

use rayon::prelude::*;

use crate::building::apartment::ApartmentVerdict;
use crate::building::flag::{flag_of_weights, Frame, LabeledFlag};
use crate::building::group::{GroupKind, GroupSpec, SymplecticForm};
use crate::building::{common_frame, Flag};
use crate::error::{check_dim, Error, Result};
use crate::fan::{to_rational, Fan};
use crate::field::{Field, Rational};
use crate::linalg::lp::feasible_point;
use crate::linalg::{dot, solve_linear, Matrix, Subspace};

/// The restriction of a PL map to one maximal cone: `v ↦ flag_of_weights(frame, A v)`.
///
/// Row `i` of the weight matrix belongs to line `i` of the frame (canonical line order).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ApartmentChart<F> {
    frame: Frame<F>,
    weights: Matrix<Rational>,
}

impl<F: Field> ApartmentChart<F> {
    pub fn new(frame: Frame<F>, weights: Matrix<Rational>) -> Result<Self> {
        check_dim(frame.ambient(), weights.rows())?;
        Ok(ApartmentChart { frame, weights })
    }

    /// From line vectors in any order, each with its weight row.
    pub fn from_rows(vectors: &[Vec<F>], rows: &[Vec<Rational>], rank: usize) -> Result<Self> {
        check_dim(vectors.len(), rows.len())?;
        let frame = Frame::from_vectors(vectors)?;
        let mut sorted = vec![Vec::new(); rows.len()];
        for (v, row) in vectors.iter().zip(rows) {
            check_dim(rank, row.len())?;
            sorted[frame.position(&Subspace::line(v)?).expect("line of the frame")] = row.clone();
        }
        Ok(ApartmentChart { frame, weights: Matrix::from_rows(rank, &sorted)? })
    }

    pub fn frame(&self) -> &Frame<F> {
        &self.frame
    }

    pub fn weights(&self) -> &Matrix<Rational> {
        &self.weights
    }

    pub fn weights_at(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.weights.mul_vec(v)
    }

    pub fn eval(&self, v: &[Rational]) -> Result<LabeledFlag<F>> {
        flag_of_weights(&self.frame, &self.weights_at(v)?)
    }

    /// Index of each line's ω-partner, when the lines pair perfectly.
    pub fn pairing(&self, w: &SymplecticForm<F>) -> Option<Vec<usize>> {
        let vs = self.frame.vectors();
        let mut partner = Vec::with_capacity(vs.len());
        for x in &vs {
            let nz: Vec<usize> = (0..vs.len()).filter(|&j| !w.pair(x, &vs[j]).is_zero()).collect();
            match nz.as_slice() {
                [j] => partner.push(*j),
                _ => return None,
            }
        }
        Some(partner)
    }
}

impl<F: Field> std::fmt::Debug for ApartmentChart<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Chart({:?}, {:?})", self.frame, self.weights)
    }
}

/// What a validation failure concerns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Fan,
    NonIntegral,
    Pairing,
    Trace,
    Inconsistent,
}

impl DiagnosticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagnosticKind::Fan => "fan",
            DiagnosticKind::NonIntegral => "non-integral",
            DiagnosticKind::Pairing => "pairing",
            DiagnosticKind::Trace => "trace",
            DiagnosticKind::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic { kind, message: message.into() }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind.as_str(), self.message)
    }
}

/// A fan with one chart per maximal cone.
#[derive(Clone, PartialEq, Eq)]
pub struct PLMap<F> {
    group: GroupSpec<F>,
    fan: Fan,
    charts: Vec<ApartmentChart<F>>,
}

impl<F: Field> PLMap<F> {
    /// `charts[i]` belongs to maximal cone `i`.
    pub fn new(group: GroupSpec<F>, fan: Fan, charts: Vec<ApartmentChart<F>>) -> Result<Self> {
        if charts.len() != fan.cones().len() {
            return Err(Error::InvalidMap(format!(
                "{} charts for {} maximal cones",
                charts.len(),
                fan.cones().len()
            )));
        }
        for c in &charts {
            check_dim(group.size(), c.frame.ambient())?;
            check_dim(fan.rank(), c.weights.cols())?;
        }
        if let Some(w) = group.form() {
            for (i, c) in charts.iter().enumerate() {
                if c.pairing(w).is_none() {
                    return Err(Error::InvalidMap(format!("chart {i}: frame lines do not pair perfectly under the form")));
                }
            }
        }
        Ok(PLMap { group, fan, charts })
    }

    /// The map `Φ ≡ 0` with standard frames.
    pub fn trivial(group: GroupSpec<F>, fan: Fan) -> Result<Self> {
        let chart = ApartmentChart::new(Frame::standard(group.size()), Matrix::zeros(group.size(), fan.rank()))?;
        let charts = vec![chart; fan.cones().len()];
        Self::new(group, fan, charts)
    }

    /// A globally linear map: the same chart on every cone.
    pub fn linear(group: GroupSpec<F>, fan: Fan, chart: ApartmentChart<F>) -> Result<Self> {
        let charts = vec![chart; fan.cones().len()];
        Self::new(group, fan, charts)
    }

    pub fn group(&self) -> &GroupSpec<F> {
        &self.group
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn charts(&self) -> &[ApartmentChart<F>] {
        &self.charts
    }

    pub fn chart(&self, cone: usize) -> &ApartmentChart<F> {
        &self.charts[cone]
    }

    /// Same charts, different structure group.
    pub fn with_group(&self, group: GroupSpec<F>) -> Result<Self> {
        Self::new(group, self.fan.clone(), self.charts.clone())
    }

    /// Evaluates at a point of the support, using the first maximal cone containing it.
    pub fn eval(&self, v: &[Rational]) -> Result<LabeledFlag<F>> {
        let cones = self.fan.containing_cones(v)?;
        let c = *cones.first().ok_or(Error::OutsideSupport)?;
        self.charts[c].eval(v)
    }

    /// Value at the primitive generator of each ray.
    pub fn ray_flags(&self) -> Result<Vec<LabeledFlag<F>>> {
        (0..self.fan.rays().len()).map(|r| self.ray_flag(r)).collect()
    }

    pub fn ray_flag(&self, ray: usize) -> Result<LabeledFlag<F>> {
        let c = *self
            .fan
            .cones_of_ray(ray)
            .first()
            .ok_or_else(|| Error::InvalidMap(format!("ray {ray} belongs to no cone")))?;
        self.charts[c].eval(&to_rational(self.fan.ray(ray)))
    }

    /// Whether `A_σ h` is integral for every lattice generator `h` of every maximal cone.
    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.integrality_diagnostics()?.is_empty())
    }

    /// Integrality on the Hilbert basis of each maximal cone. The Hilbert basis
    /// of a face consists of the basis elements lying in that face, so this
    /// covers every face, and nonnegative integer combinations cover `σ ∩ N`.
    fn integrality_diagnostics(&self) -> Result<Vec<Diagnostic>> {
        let mut out = Vec::new();
        for (ci, cone) in self.fan.cones().iter().enumerate() {
            let hb = self.fan.cone(ci).lattice_generators()?;
            for h in hb {
                let w = self.charts[ci].weights_at(&to_rational(&h))?;
                if w.iter().all(|x| x.is_integer()) {
                    continue;
                }
                let place = match cone.iter().find(|&&r| self.fan.ray(r) == h.as_slice()) {
                    Some(r) => format!("ray {r}"),
                    None => format!("lattice point {h:?}"),
                };
                out.push(Diagnostic::new(
                    DiagnosticKind::NonIntegral,
                    format!("cone {ci}: non-integral weights {} at {place}", show(&w)),
                ));
            }
        }
        Ok(out)
    }

    /// Checks the fan, integrality, the group conditions and face consistency.
    pub fn validate(&self) -> Result<std::result::Result<(), Vec<Diagnostic>>> {
        if let Err(d) = self.fan.validate() {
            return Ok(Err(d.into_iter().map(|m| Diagnostic::new(DiagnosticKind::Fan, m)).collect()));
        }
        let mut diags = self.integrality_diagnostics()?;
        for (ci, c) in self.charts.iter().enumerate() {
            let rays = &self.fan.cones()[ci];
            match self.group.kind() {
                GroupKind::GL => {}
                GroupKind::SL => {
                    for &r in rays {
                        let w = c.weights_at(&to_rational(self.fan.ray(r)))?;
                        if w.iter().fold(Rational::zero(), |a, x| a.add(x)) != Rational::zero() {
                            diags.push(Diagnostic::new(
                                DiagnosticKind::Trace,
                                format!("cone {ci}: weights at ray {r} do not sum to zero"),
                            ));
                        }
                    }
                }
                GroupKind::Sp => {
                    let partner = c.pairing(self.group.form().expect("Sp form")).expect("checked at construction");
                    for (i, &j) in partner.iter().enumerate() {
                        if i < j && c.weights.row(i).iter().zip(c.weights.row(j)).any(|(x, y)| *x != y.neg()) {
                            diags.push(Diagnostic::new(
                                DiagnosticKind::Pairing,
                                format!("cone {ci}: rows {i} and {j} of paired lines are not opposite"),
                            ));
                        }
                    }
                }
            }
        }
        let m = self.fan.cones().len();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
        let found: Vec<Result<Option<String>>> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let shared = self.fan.shared_rays(a, b);
                let gens: Vec<Vec<i64>> = shared.iter().map(|&r| self.fan.ray(r).to_vec()).collect();
                charts_agree(&gens, &self.charts[a], &self.charts[b])
            })
            .collect();
        for ((a, b), r) in pairs.into_iter().zip(found) {
            if let Some(msg) = r? {
                diags.push(Diagnostic::new(DiagnosticKind::Inconsistent, format!("cones {a} and {b}: {msg}")));
            }
        }
        Ok(if diags.is_empty() { Ok(()) } else { Err(diags) })
    }

    /// Changes the framing by `g`: every chart line `L` becomes `g^{-1} L`, weights unchanged.
    pub fn conjugate(&self, g: &Matrix<F>) -> Result<Self> {
        check_dim(self.group.size(), g.rows())?;
        let ginv = g.inverse()?;
        if !self.group.contains(g)? {
            return Err(Error::Precondition("matrix is not in the structure group".into()));
        }
        let charts = self
            .charts
            .iter()
            .map(|c| {
                let vs = c.frame.vectors().iter().map(|v| ginv.mul_vec(v)).collect::<Result<Vec<_>>>()?;
                ApartmentChart::from_rows(&vs, &c.weights.row_vectors(), self.fan.rank())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.group.clone(), self.fan.clone(), charts)
    }

    /// Builds a map from ray data on a simplicial fan.
    pub fn from_klyachko(k: &KlyachkoData<F>) -> Result<Self> {
        let fan = &k.fan;
        if !fan.is_simplicial() {
            return Err(Error::Precondition("ray data determines charts only on simplicial fans".into()));
        }
        let mut charts = Vec::with_capacity(fan.cones().len());
        for (ci, cone) in fan.cones().iter().enumerate() {
            let flags: Vec<Flag<F>> = cone.iter().map(|&r| k.rays[r].flag().clone()).collect();
            let frame = match common_frame(&flags, &k.group)? {
                ApartmentVerdict::Found { frame, .. } => frame,
                ApartmentVerdict::Absent(reason) => return Err(Error::Incompatible { cone: ci, reason }),
                ApartmentVerdict::Undetermined(reason) => {
                    return Err(Error::Incompatible { cone: ci, reason: format!("undetermined: {reason}") })
                }
            };
            let labeled: Vec<&LabeledFlag<F>> = cone.iter().map(|&r| &k.rays[r]).collect();
            let gens: Vec<Vec<i64>> = cone.iter().map(|&r| fan.ray(r).to_vec()).collect();
            charts.push(chart_through_rays(&frame, &gens, &labeled, fan.rank())?.ok_or_else(|| {
                Error::Incompatible { cone: ci, reason: "ray weights are not linear on the cone".into() }
            })?);
        }
        let p = Self::new(k.group.clone(), fan.clone(), charts)?;
        match p.validate()? {
            Ok(()) => Ok(p),
            Err(d) => Err(Error::InvalidMap(d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "))),
        }
    }
}

impl<F: Field> std::fmt::Debug for PLMap<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PLMap").field("group", &self.group).field("fan", &self.fan).field("charts", &self.charts).finish()
    }
}

/// The chart on a cone with the given frame whose value at each generator is
/// the given labeled flag: each line's weight there is the label of the
/// smallest piece containing it. `None` when no linear map fits.
pub fn chart_through_rays<F: Field>(
    frame: &Frame<F>,
    gens: &[Vec<i64>],
    values: &[&LabeledFlag<F>],
    rank: usize,
) -> Result<Option<ApartmentChart<F>>> {
    let g = Matrix::from_rows(rank, &gens.iter().map(|v| to_rational(v)).collect::<Vec<_>>())?;
    let mut rows = Vec::with_capacity(frame.ambient());
    for line in frame.vectors() {
        let w = values.iter().map(|lf| lf.label_of(&line)).collect::<Result<Vec<_>>>()?;
        match solve_linear(&g, &w)? {
            Some((x, _)) => rows.push(x),
            None => return Ok(None),
        }
    }
    Ok(Some(ApartmentChart::new(frame.clone(), Matrix::from_rows(rank, &rows)?)?))
}

/// Ray data: a labeled flag per ray of a fan.
#[derive(Clone, PartialEq, Eq)]
pub struct KlyachkoData<F> {
    pub group: GroupSpec<F>,
    pub fan: Fan,
    pub rays: Vec<LabeledFlag<F>>,
}

impl<F: Field> KlyachkoData<F> {
    pub fn new(group: GroupSpec<F>, fan: Fan, rays: Vec<LabeledFlag<F>>) -> Result<Self> {
        check_dim(fan.rays().len(), rays.len())?;
        for (i, lf) in rays.iter().enumerate() {
            check_dim(group.size(), lf.flag().ambient())?;
            if !lf.is_integral() {
                return Err(Error::NonIntegral(format!("labels at ray {i}")));
            }
        }
        Ok(KlyachkoData { group, fan, rays })
    }
}

fn forms<F: Field>(chart: &ApartmentChart<F>, g: &Matrix<Rational>) -> Result<Vec<Vec<Rational>>> {
    // Row i: the linear form t ↦ (A G t)_i on generator coefficients.
    Ok(chart.weights.mul(g)?.row_vectors())
}

fn normalize(h: &[Rational]) -> Option<Vec<Rational>> {
    let lead = h.iter().find(|x| !x.is_zero())?;
    let s = lead.inv().expect("nonzero");
    let s = if s < Rational::zero() { s.neg() } else { s };
    Some(h.iter().map(|x| x.mul(&s)).collect())
}

/// A point `t >= 1` with `sign_i · h_i(t) >= 1` for every constraint, if any.
fn cell_point(k: usize, cons: &[(Vec<Rational>, bool)]) -> Option<Vec<Rational>> {
    // t = 1 + s with s >= 0; one slack per constraint.
    let m = cons.len();
    if m == 0 {
        return Some(vec![Rational::one(); k]);
    }
    let mut a = Matrix::<Rational>::zeros(m, k + m);
    let mut b = Vec::with_capacity(m);
    for (i, (h, positive)) in cons.iter().enumerate() {
        for j in 0..k {
            a.set(i, j, h[j].clone());
        }
        let h1 = h.iter().fold(Rational::zero(), |acc, x| acc.add(x));
        if *positive {
            a.set(i, k + i, Rational::one().neg());
            b.push(Rational::one().sub(&h1));
        } else {
            a.set(i, k + i, Rational::one());
            b.push(Rational::one().neg().sub(&h1));
        }
    }
    let s = feasible_point(&a, &b)?;
    Some(s[..k].iter().map(|x| x.add(&Rational::one())).collect())
}

/// Whether two charts define the same map on the cone spanned by `gens`.
///
/// The cone is cut by every hyperplane on which two weights of one chart
/// coincide. On each open cell both charts have constant flags and labels that
/// are linear functions, and every point of the cone lies in the closure of a
/// full-dimensional cell. So it suffices to compare, on each cell, the flags
/// at one interior point and the label functions as linear forms; continuity
/// then gives agreement on the closure, where level sets merge identically in
/// both charts. Ray generators are compared directly as well.
///
/// Returns a description of the first disagreement.
pub fn charts_agree<F: Field>(gens: &[Vec<i64>], a: &ApartmentChart<F>, b: &ApartmentChart<F>) -> Result<Option<String>> {
    if gens.is_empty() {
        return Ok(None);
    }
    let n = a.weights.cols();
    let k = gens.len();
    for g in gens {
        let v = to_rational(g);
        if a.eval(&v)? != b.eval(&v)? {
            return Ok(Some(format!("values differ at ray generator {g:?}")));
        }
    }
    let cols: Vec<Vec<Rational>> = gens.iter().map(|g| to_rational(g)).collect();
    let gmat = Matrix::from_columns(n, &cols)?;
    let fa = forms(a, &gmat)?;
    let fb = forms(b, &gmat)?;
    let mut hyperplanes: Vec<Vec<Rational>> = Vec::new();
    for f in [&fa, &fb] {
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                let d: Vec<Rational> = f[i].iter().zip(&f[j]).map(|(x, y)| x.sub(y)).collect();
                if let Some(h) = normalize(&d) {
                    if !hyperplanes.contains(&h) {
                        hyperplanes.push(h);
                    }
                }
            }
        }
    }
    let mut cells: Vec<Vec<(Vec<Rational>, bool)>> = vec![Vec::new()];
    for h in &hyperplanes {
        let mut next = Vec::new();
        for cell in &cells {
            for positive in [true, false] {
                let mut c = cell.clone();
                c.push((h.clone(), positive));
                if cell_point(k, &c).is_some() {
                    next.push(c);
                }
            }
        }
        cells = next;
    }
    for cell in &cells {
        let t = cell_point(k, cell).expect("feasible cell");
        let v = gmat.mul_vec(&t)?;
        let ea = a.eval(&v)?;
        let eb = b.eval(&v)?;
        if ea.flag() != eb.flag() {
            return Ok(Some(format!("flags differ at {}", show(&v))));
        }
        let wa = a.weights_at(&v)?;
        let wb = b.weights_at(&v)?;
        for label in ea.labels() {
            let ia = wa.iter().position(|x| x == label).expect("label is a weight");
            let ib = wb.iter().position(|x| x == label).expect("same labels");
            if fa[ia] != fb[ib] {
                return Ok(Some(format!("labels differ as linear functions near {}", show(&v))));
            }
        }
        if ea.labels() != eb.labels() {
            return Ok(Some(format!("labels differ at {}", show(&v))));
        }
    }
    Ok(None)
}

fn show(v: &[Rational]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

/// `Σ_i w_i` for a weight vector.
pub fn weight_sum(w: &[Rational]) -> Rational {
    dot(w, &vec![Rational::one(); w.len()])
}
