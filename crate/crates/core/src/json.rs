//! JSON input and output. Rationals are written as integers or `"p/q"` strings.
//! Every input document carries `"schema": 1`; unknown fields are rejected.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::building::{Flag, Frame, GroupKind, GroupSpec, LabeledFlag, SymplecticForm};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::field::{parse_rational, Field, Rational};
use crate::linalg::{Matrix, Subspace};
use crate::plmap::{ApartmentChart, KlyachkoData, PLMap};

pub const SCHEMA_VERSION: u32 = 1;

/// A number as written in a document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Num::Int(i) => Ok(Rational::from_integer((*i).into())),
            Num::Str(s) => parse_rational(s).ok_or_else(|| Error::Parse(format!("not a rational number: {s:?}"))),
        }
    }

    pub fn to_field<F: Field>(&self) -> Result<F> {
        let q = self.to_rational()?;
        F::from_rational(&q).ok_or_else(|| Error::Parse(format!("{q} is not defined in the field")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FanDoc {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    /// Maximal cones as lists of ray indices.
    pub cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trusted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub kind: String,
    pub size: usize,
    /// Gram matrix of the symplectic form; the standard form when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<Vec<Num>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    pub cone: usize,
    /// Line vectors; `weights[i]` belongs to `frame[i]`.
    pub frame: Vec<Vec<Num>>,
    pub weights: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PLMapDoc {
    pub schema: u32,
    pub group: GroupDoc,
    pub fan: FanDoc,
    pub charts: Vec<ChartDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RayDoc {
    /// Bases of the proper pieces, smallest first; the ambient space may be included.
    pub flag: Vec<Vec<Vec<Num>>>,
    pub labels: Vec<Num>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct KlyachkoDoc {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDoc>,
    pub fan: FanDoc,
    pub rays: Vec<RayDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FlagDoc {
    pub schema: u32,
    pub flag: Vec<Vec<Vec<Num>>>,
}

fn parse_doc<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn check_schema(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {v}")));
    }
    Ok(())
}

fn rational_rows(rows: &[Vec<Num>]) -> Result<Vec<Vec<Rational>>> {
    rows.iter().map(|r| r.iter().map(Num::to_rational).collect()).collect()
}

fn field_rows<F: Field>(rows: &[Vec<Num>]) -> Result<Vec<Vec<F>>> {
    rows.iter().map(|r| r.iter().map(Num::to_field).collect()).collect()
}

impl FanDoc {
    pub fn to_fan(&self) -> Result<Fan> {
        let f = Fan::new(self.rank, self.rays.clone(), self.cones.clone())?;
        Ok(if self.trusted { f.trusted() } else { f })
    }

    pub fn from_fan(f: &Fan) -> Self {
        FanDoc { rank: f.rank(), rays: f.rays().to_vec(), cones: f.cones().to_vec(), trusted: f.is_trusted() }
    }
}

impl GroupDoc {
    pub fn to_group<F: Field>(&self) -> Result<GroupSpec<F>> {
        let kind: GroupKind = self.kind.parse()?;
        match (&self.form, kind) {
            (Some(rows), GroupKind::Sp) => {
                let g = Matrix::from_rows(self.size, &field_rows::<F>(rows)?)?;
                check_square(&g, self.size)?;
                Ok(GroupSpec::sp_with_form(SymplecticForm::new(g)?))
            }
            (Some(_), _) => Err(Error::InvalidGroup("only Sp takes a form".into())),
            (None, _) => GroupSpec::new(kind, self.size),
        }
    }

    pub fn from_group<F: Field>(g: &GroupSpec<F>) -> Self {
        let form = match g.form() {
            Some(w) if *w != SymplecticForm::standard(g.size()).expect("even size") => {
                Some(w.gram().row_vectors().iter().map(|r| nums(r)).collect())
            }
            _ => None,
        };
        GroupDoc { kind: g.kind().to_string(), size: g.size(), form }
    }
}

fn check_square<F: Field>(m: &Matrix<F>, n: usize) -> Result<()> {
    if m.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.rows() });
    }
    Ok(())
}

/// A field element as a document number.
pub fn num<F: Field>(x: &F) -> Num {
    let s = x.to_string();
    match s.parse::<i64>() {
        Ok(i) => Num::Int(i),
        Err(_) => Num::Str(s),
    }
}

pub fn nums<F: Field>(xs: &[F]) -> Vec<Num> {
    xs.iter().map(num).collect()
}

pub fn num_value<F: Field>(x: &F) -> Value {
    serde_json::to_value(num(x)).expect("numbers serialize")
}

pub fn vector_value<F: Field>(xs: &[F]) -> Value {
    Value::Array(xs.iter().map(num_value).collect())
}

pub fn matrix_value<F: Field>(rows: &[Vec<F>]) -> Value {
    Value::Array(rows.iter().map(|r| vector_value(r)).collect())
}

pub fn flag_from_doc<F: Field>(n: usize, pieces: &[Vec<Vec<Num>>]) -> Result<Flag<F>> {
    let subs = pieces
        .iter()
        .map(|b| Subspace::span(n, &field_rows::<F>(b)?))
        .collect::<Result<Vec<_>>>()?;
    Flag::from_pieces_completing(n, subs)
}

/// Canonical bases of the proper pieces.
pub fn flag_value<F: Field>(f: &Flag<F>) -> Value {
    Value::Array(f.pieces().iter().filter(|p| !p.is_full()).map(|p| matrix_value(&p.basis_vectors())).collect())
}

pub fn labeled_flag_value<F: Field>(lf: &LabeledFlag<F>) -> Value {
    json!({ "flag": flag_value(lf.flag()), "labels": vector_value(lf.labels()) })
}

pub fn frame_value<F: Field>(fr: &Frame<F>) -> Value {
    matrix_value(&fr.vectors())
}

pub fn fan_value(f: &Fan) -> Value {
    serde_json::to_value(FanDoc::from_fan(f)).expect("fan serializes")
}

pub fn group_value<F: Field>(g: &GroupSpec<F>) -> Value {
    serde_json::to_value(GroupDoc::from_group(g)).expect("group serializes")
}

pub fn parse_plmap(text: &str) -> Result<PLMapDoc> {
    let d: PLMapDoc = parse_doc(text)?;
    check_schema(d.schema)?;
    Ok(d)
}

pub fn parse_klyachko(text: &str) -> Result<KlyachkoDoc> {
    let d: KlyachkoDoc = parse_doc(text)?;
    check_schema(d.schema)?;
    Ok(d)
}

pub fn parse_flag(text: &str) -> Result<FlagDoc> {
    let d: FlagDoc = parse_doc(text)?;
    check_schema(d.schema)?;
    Ok(d)
}

impl PLMapDoc {
    pub fn to_plmap(&self) -> Result<PLMap<Rational>> {
        let group = self.group.to_group::<Rational>()?;
        let fan = self.fan.to_fan()?;
        let m = fan.cones().len();
        let mut slots: Vec<Option<ApartmentChart<Rational>>> = vec![None; m];
        for c in &self.charts {
            if c.cone >= m {
                return Err(Error::InvalidMap(format!("chart for cone {} but the fan has {m} cones", c.cone)));
            }
            if slots[c.cone].is_some() {
                return Err(Error::InvalidMap(format!("two charts for cone {}", c.cone)));
            }
            let vs = rational_rows(&c.frame)?;
            let ws = rational_rows(&c.weights)?;
            slots[c.cone] = Some(ApartmentChart::from_rows(&vs, &ws, fan.rank())?);
        }
        let charts = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::InvalidMap(format!("no chart for cone {i}"))))
            .collect::<Result<Vec<_>>>()?;
        PLMap::new(group, fan, charts)
    }
}

impl KlyachkoDoc {
    pub fn to_data(&self) -> Result<KlyachkoData<Rational>> {
        let fan = self.fan.to_fan()?;
        let n = match &self.group {
            Some(g) => g.size,
            None => self.rays.iter().flat_map(|r| r.flag.iter().flatten()).map(|v| v.len()).next().unwrap_or(0),
        };
        let group = match &self.group {
            Some(g) => g.to_group()?,
            None => GroupSpec::gl(n),
        };
        let rays = self
            .rays
            .iter()
            .map(|r| {
                let labels = r.labels.iter().map(Num::to_rational).collect::<Result<Vec<_>>>()?;
                LabeledFlag::new(flag_from_doc(n, &r.flag)?, labels)
            })
            .collect::<Result<Vec<_>>>()?;
        KlyachkoData::new(group, fan, rays)
    }
}

pub fn plmap_value<F: Field>(p: &PLMap<F>) -> Value {
    let charts: Vec<Value> = p
        .charts()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "cone": i,
                "frame": frame_value(c.frame()),
                "weights": matrix_value(&c.weights().row_vectors()),
            })
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "group": group_value(p.group()),
        "fan": fan_value(p.fan()),
        "charts": charts,
    })
}

/// Sorted keys, two-space indentation, trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
