//! Helly numbers of the buildings of GL and Sp over small prime fields.
//!
//! A family of flags is *coherent* when some frame (normal frame for Sp) is
//! adapted to all of them. The Helly number is the least `k` such that
//! coherence of every `k`-subfamily forces coherence of the whole family.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::building::apartment::ApartmentVerdict;
use crate::building::{common_frame, is_adapted, is_isotropic_flag, Flag, Frame, FrameOracle, GroupKind, GroupSpec};
use crate::building::SymplecticForm;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};

/// Default cap on enumerated objects and search nodes.
pub const DEFAULT_BUDGET: usize = 2_000_000;
/// Oracle frames are enumerated only below this count.
pub const ORACLE_FRAME_LIMIT: usize = 200_000;

/// All `d`-dimensional subspaces of `F^n`, one per reduced row echelon form.
pub fn enum_subspaces<F: Field>(n: usize, d: usize, budget: usize) -> Result<Vec<Subspace<F>>> {
    let elems = F::elements().ok_or_else(|| Error::Precondition("field is not finite".into()))?;
    if d > n {
        return Ok(Vec::new());
    }
    let q = elems.len() as f64;
    let estimate = q.powi((d * (n - d)) as i32) * 4.0;
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded { what: format!("{d}-subspaces of F^{n}"), budget });
    }
    let mut out = Vec::new();
    for pivots in combinations(n, d) {
        // Free entries: row i, columns after pivot i that are not pivots.
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (pivots[i] + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
            .collect();
        let count = elems.len().pow(free.len() as u32);
        for mut code in 0..count {
            let mut m = Matrix::zeros(d, n);
            for (i, &p) in pivots.iter().enumerate() {
                m.set(i, p, F::one());
            }
            for &(i, c) in &free {
                m.set(i, c, elems[code % elems.len()].clone());
                code /= elems.len();
            }
            out.push(Subspace::row_space(&m));
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Flags whose proper pieces have the given strictly increasing dimensions.
/// For Sp only isotropic flags are kept.
pub fn enum_flags<F: Field>(group: &GroupSpec<F>, dims: &[usize], budget: usize) -> Result<Vec<Flag<F>>> {
    let n = group.size();
    if dims.windows(2).any(|w| w[0] >= w[1]) || dims.iter().any(|&d| d == 0 || d >= n) {
        return Err(Error::InvalidFlag(format!("bad dimension type {dims:?}")));
    }
    let levels: Vec<Vec<Subspace<F>>> = dims.iter().map(|&d| enum_subspaces(n, d, budget)).collect::<Result<_>>()?;
    let mut chains: Vec<Vec<Subspace<F>>> = vec![Vec::new()];
    for level in &levels {
        let mut next = Vec::new();
        for c in &chains {
            for s in level {
                if c.last().map_or(Ok(true), |l| s.contains_subspace(l))? {
                    let mut e = c.clone();
                    e.push(s.clone());
                    next.push(e);
                }
            }
            if next.len() > budget {
                return Err(Error::BudgetExceeded { what: "flag enumeration".into(), budget });
            }
        }
        chains = next;
    }
    let mut out = Vec::with_capacity(chains.len());
    for c in chains {
        let f = Flag::from_pieces_completing(n, c)?;
        if let Some(w) = group.form() {
            if !is_isotropic_flag(&f, w)? {
                continue;
            }
        }
        out.push(f);
    }
    Ok(out)
}

/// Every nontrivial flag (isotropic for Sp), grouped by type in increasing order.
pub fn all_flags<F: Field>(group: &GroupSpec<F>, budget: usize) -> Result<Vec<Flag<F>>> {
    let n = group.size();
    let mut types: Vec<Vec<usize>> = (1u32..(1 << (n - 1)))
        .map(|mask| (1..n).filter(|d| mask >> (d - 1) & 1 == 1).collect())
        .collect();
    types.sort_by_key(|t: &Vec<usize>| (t.len(), t.clone()));
    let mut out = Vec::new();
    for t in types {
        out.extend(enum_flags(group, &t, budget)?);
        if out.len() > budget {
            return Err(Error::BudgetExceeded { what: "flag enumeration".into(), budget });
        }
    }
    Ok(out)
}

/// Whether every line of the frame pairs nontrivially with exactly one other line.
pub fn is_normal_frame<F: Field>(frame: &Frame<F>, w: &SymplecticForm<F>) -> bool {
    let vs = frame.vectors();
    vs.iter().all(|x| vs.iter().filter(|y| !w.pair(x, y).is_zero()).count() == 1)
}

struct Oracle<F> {
    frames: FrameOracle<F>,
    candidates: Vec<u128>,
    constraints: Vec<Vec<(u128, u32)>>,
}

/// The building of a group over a prime field, with its flags and a memoized coherence test.
pub struct HellySearch<F> {
    group: GroupSpec<F>,
    flags: Vec<Flag<F>>,
    index: HashMap<Flag<F>, usize>,
    oracle: Option<Oracle<F>>,
    symmetries: Vec<Vec<usize>>,
    cache: Mutex<HashMap<Vec<u32>, bool>>,
}

impl<F: Field> HellySearch<F> {
    pub fn new(group: GroupSpec<F>, budget: usize) -> Result<Self> {
        if !F::is_finite() {
            return Err(Error::Precondition("Helly search needs a finite field".into()));
        }
        if group.kind() == GroupKind::SL {
            return Err(Error::InvalidGroup("the SL building is the GL building; use GL".into()));
        }
        let flags = all_flags(&group, budget)?;
        let index: HashMap<Flag<F>, usize> = flags.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let oracle = match FrameOracle::<F>::new(group.size(), ORACLE_FRAME_LIMIT) {
            Ok(frames) => {
                let candidates = match group.form() {
                    Some(w) => frames.normal_frames(w),
                    None => frames.frame_masks().to_vec(),
                };
                let constraints =
                    flags.iter().map(|f| frames.constraints(std::slice::from_ref(f))).collect::<Result<_>>()?;
                Some(Oracle { frames, candidates, constraints })
            }
            Err(Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        let symmetries = permutation_actions(&group, &flags, &index)?;
        Ok(HellySearch { group, flags, index, oracle, symmetries, cache: Mutex::new(HashMap::new()) })
    }

    pub fn group(&self) -> &GroupSpec<F> {
        &self.group
    }

    pub fn flags(&self) -> &[Flag<F>] {
        &self.flags
    }

    pub fn flag_index(&self, f: &Flag<F>) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn has_oracle(&self) -> bool {
        self.oracle.is_some()
    }

    /// Coherence of the family given by flag indices.
    ///
    /// The lattice construction decides; when the exhaustive oracle is
    /// available it decides too, and the two must agree.
    pub fn coherent(&self, family: &[usize]) -> Result<bool> {
        let mut key: Vec<u32> = family.iter().map(|&i| i as u32).collect();
        key.sort_unstable();
        key.dedup();
        if let Some(&v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let fs: Vec<Flag<F>> = key.iter().map(|&i| self.flags[i as usize].clone()).collect();
        let lattice = if fs.is_empty() { ApartmentVerdict::Absent(String::new()) } else { common_frame(&fs, &self.group)? };
        let answer = match &self.oracle {
            Some(o) => {
                let found = o.candidates.iter().any(|&fr| {
                    key.iter().all(|&i| o.constraints[i as usize].iter().all(|&(m, d)| (m & fr).count_ones() == d))
                });
                let agrees = match &lattice {
                    ApartmentVerdict::Found { .. } => found,
                    ApartmentVerdict::Absent(_) => !found,
                    ApartmentVerdict::Undetermined(_) => true,
                };
                if !agrees && !fs.is_empty() {
                    return Err(Error::Precondition(format!(
                        "lattice and exhaustive coherence disagree on family {key:?}"
                    )));
                }
                found || fs.is_empty()
            }
            None => match lattice {
                ApartmentVerdict::Found { .. } => true,
                ApartmentVerdict::Absent(_) => false,
                ApartmentVerdict::Undetermined(r) => {
                    return Err(Error::Precondition(format!("coherence undetermined: {r}")))
                }
            },
        };
        if key.len() <= 2 {
            assert!(answer, "two flags always share an apartment");
        }
        self.cache.lock().expect("cache lock").insert(key, answer);
        Ok(answer)
    }

    /// A frame witnessing coherence of the family.
    pub fn frame_for(&self, family: &[usize]) -> Result<Option<Frame<F>>> {
        let fs: Vec<Flag<F>> = family.iter().map(|&i| self.flags[i].clone()).collect();
        if let Some(fr) = common_frame(&fs, &self.group)?.frame() {
            return Ok(Some(fr.clone()));
        }
        if let Some(o) = &self.oracle {
            let hit = o.candidates.iter().copied().find(|&fr| {
                family.iter().all(|&i| o.constraints[i].iter().all(|&(m, d)| (m & fr).count_ones() == d))
            });
            return Ok(hit.map(|m| o.frames.frame_of(m)));
        }
        Ok(None)
    }

    /// Indices that are least in their orbit under the coordinate symmetries.
    fn orbit_representatives(&self) -> Vec<usize> {
        (0..self.flags.len()).filter(|&i| self.symmetries.iter().all(|g| g[i] >= i)).collect()
    }

    /// Whether every `k`-subset of `family` containing its last element is coherent
    /// (all subsets when the family is shorter than `k`).
    fn new_subsets_coherent(&self, family: &[usize], k: usize) -> Result<bool> {
        let m = family.len();
        if m <= k {
            return self.coherent(family);
        }
        let last = family[m - 1];
        for c in combinations(m - 1, k - 1) {
            let mut sub: Vec<usize> = c.iter().map(|&i| family[i]).collect();
            sub.push(last);
            if !self.coherent(&sub)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn witness(&self, family: &[usize], k: usize) -> Result<HellyWitness<F>> {
        let mut subset_frames = Vec::new();
        for c in combinations(family.len(), k) {
            let sub: Vec<usize> = c.iter().map(|&i| family[i]).collect();
            subset_frames.push(self.frame_for(&sub)?.expect("coherent subset has a frame"));
        }
        let fs: Vec<Flag<F>> = family.iter().map(|&i| self.flags[i].clone()).collect();
        let refutation = match common_frame(&fs, &self.group)? {
            ApartmentVerdict::Absent(r) => r,
            _ => "no frame in the exhaustive enumeration".into(),
        };
        Ok(HellyWitness { k, flags: fs, subset_frames, refutation })
    }

    /// A family of `size` flags whose `k`-subsets are coherent but which is not.
    pub fn find_witness(&self, k: usize, size: usize, budget: usize, seed: u64) -> Result<WitnessSearch<F>> {
        if k == 0 || size <= k {
            return Err(Error::Precondition(format!("family size {size} must exceed k = {k}")));
        }
        let reps = self.orbit_representatives();
        let per_branch = (budget / reps.len().max(1)).max(1);
        let results: Vec<Result<Branch>> = reps
            .par_iter()
            .map(|&first| {
                let mut nodes = 0usize;
                let mut fam = vec![first];
                let r = self.witness_dfs(&mut fam, k, size, per_branch, &mut nodes);
                r.map(|hit| match hit {
                    Some(f) => Branch::Hit(f),
                    None if nodes >= per_branch => Branch::Exhausted,
                    None => Branch::Done,
                })
            })
            .collect();
        let mut exhausted = false;
        for r in results {
            match r? {
                Branch::Hit(f) => {
                    let w = self.witness(&f, k)?;
                    if !w.verify(&self.group)? {
                        return Err(Error::Precondition("witness failed re-verification".into()));
                    }
                    return Ok(WitnessSearch::Found(w));
                }
                Branch::Exhausted => exhausted = true,
                Branch::Done => {}
            }
        }
        if !exhausted {
            return Ok(WitnessSearch::NoneExists);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if self.flags.len() >= size {
            for _ in 0..budget {
                let mut fam: Vec<usize> = sample(&mut rng, self.flags.len(), size).into_vec();
                fam.sort_unstable();
                if self.all_subsets_coherent(&fam, k)? && !self.coherent(&fam)? {
                    let w = self.witness(&fam, k)?;
                    if w.verify(&self.group)? {
                        return Ok(WitnessSearch::Found(w));
                    }
                }
            }
        }
        Ok(WitnessSearch::BudgetExhausted { seed })
    }

    fn all_subsets_coherent(&self, fam: &[usize], k: usize) -> Result<bool> {
        for c in combinations(fam.len(), k.min(fam.len())) {
            let sub: Vec<usize> = c.iter().map(|&i| fam[i]).collect();
            if !self.coherent(&sub)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn witness_dfs(
        &self,
        fam: &mut Vec<usize>,
        k: usize,
        size: usize,
        budget: usize,
        nodes: &mut usize,
    ) -> Result<Option<Vec<usize>>> {
        *nodes += 1;
        if *nodes > budget {
            return Ok(None);
        }
        if fam.len() == size {
            return Ok(if self.coherent(fam)? { None } else { Some(fam.clone()) });
        }
        let start = fam.last().map_or(0, |&l| l + 1);
        for next in start..self.flags.len() {
            if self.flags.len() - next < size - fam.len() {
                break;
            }
            fam.push(next);
            if self.new_subsets_coherent(fam, k)? {
                if let Some(w) = self.witness_dfs(fam, k, size, budget, nodes)? {
                    return Ok(Some(w));
                }
            }
            fam.pop();
            if *nodes > budget {
                break;
            }
        }
        Ok(None)
    }

    /// Checks that every family of at most `max_family` flags whose `k`-subsets
    /// are coherent is itself coherent.
    pub fn verify_upper(&self, k: usize, max_family: usize, budget: usize, seed: u64) -> Result<UpperReport<F>> {
        if k == 0 {
            return Err(Error::Precondition("k must be positive".into()));
        }
        let reps = self.orbit_representatives();
        let per_branch = (budget / reps.len().max(1)).max(1);
        let results: Vec<Result<(Option<Vec<usize>>, usize, bool)>> = reps
            .par_iter()
            .map(|&first| {
                let mut nodes = 0usize;
                let mut fam = vec![first];
                let hit = self.upper_dfs(&mut fam, k, max_family, per_branch, &mut nodes)?;
                Ok((hit, nodes.min(per_branch), nodes > per_branch))
            })
            .collect();
        let mut checked = 0;
        let mut exhaustive = true;
        for r in results {
            let (hit, nodes, over) = r?;
            checked += nodes;
            exhaustive &= !over;
            if let Some(f) = hit {
                let w = self.witness(&f, k)?;
                return Ok(UpperReport { k, max_family, exhaustive, checked, counterexample: Some(w), seed });
            }
        }
        if !exhaustive {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes: Vec<usize> = (k + 1..=max_family.min(self.flags.len())).collect();
            for i in 0..budget {
                if sizes.is_empty() {
                    break;
                }
                let size = sizes[i % sizes.len()];
                let mut fam: Vec<usize> = sample(&mut rng, self.flags.len(), size).into_vec();
                fam.sort_unstable();
                checked += 1;
                if self.all_subsets_coherent(&fam, k)? && !self.coherent(&fam)? {
                    let w = self.witness(&fam, k)?;
                    return Ok(UpperReport { k, max_family, exhaustive, checked, counterexample: Some(w), seed });
                }
            }
        }
        Ok(UpperReport { k, max_family, exhaustive, checked, counterexample: None, seed })
    }

    fn upper_dfs(
        &self,
        fam: &mut Vec<usize>,
        k: usize,
        max_family: usize,
        budget: usize,
        nodes: &mut usize,
    ) -> Result<Option<Vec<usize>>> {
        *nodes += 1;
        if *nodes > budget {
            return Ok(None);
        }
        if fam.len() > k {
            let whole = self.coherent(fam)?;
            if !whole {
                return Ok(Some(fam.clone()));
            }
            // Monotonicity: a coherent family has coherent subfamilies.
            let parent = &fam[..fam.len() - 1];
            assert!(self.coherent(parent)?, "subfamily of a coherent family is incoherent");
        }
        if fam.len() == max_family {
            return Ok(None);
        }
        let start = fam.last().map_or(0, |&l| l + 1);
        for next in start..self.flags.len() {
            fam.push(next);
            if self.new_subsets_coherent(fam, k)? {
                if let Some(w) = self.upper_dfs(fam, k, max_family, budget, nodes)? {
                    return Ok(Some(w));
                }
            }
            fam.pop();
            if *nodes > budget {
                break;
            }
        }
        Ok(None)
    }

    /// Lower bound from witnesses for `k = 2, 3, ...`, then an upper check at that bound.
    pub fn helly_bounds(&self, max_family: Option<usize>, budget: usize, seed: u64) -> Result<HellyBounds<F>> {
        let cap = self.group.size() + 1;
        let mut lower = 2;
        let mut witness = None;
        let mut exhausted = false;
        for k in 2..=cap {
            match self.find_witness(k, k + 1, budget, seed)? {
                WitnessSearch::Found(w) => {
                    lower = k + 1;
                    witness = Some(w);
                }
                WitnessSearch::NoneExists => break,
                WitnessSearch::BudgetExhausted { .. } => {
                    exhausted = true;
                    break;
                }
            }
        }
        let max_family = max_family.unwrap_or(lower + 3);
        let upper = self.verify_upper(lower, max_family, budget, seed)?;
        Ok(HellyBounds { lower, witness, search_exhausted: exhausted, upper })
    }
}

enum Branch {
    Hit(Vec<usize>),
    Exhausted,
    Done,
}

/// Action of coordinate permutations (pair permutations for Sp) on flag indices.
fn permutation_actions<F: Field>(
    group: &GroupSpec<F>,
    flags: &[Flag<F>],
    index: &HashMap<Flag<F>, usize>,
) -> Result<Vec<Vec<usize>>> {
    let n = group.size();
    let perms: Vec<Vec<usize>> = match group.kind() {
        GroupKind::Sp => {
            let r = n / 2;
            permutations(r).into_iter().map(|p| (0..n).map(|i| if i < r { p[i] } else { r + p[i - r] }).collect()).collect()
        }
        _ => permutations(n),
    };
    let mut out = Vec::new();
    for p in perms.into_iter().skip(1) {
        let mut g = Matrix::zeros(n, n);
        for (i, &j) in p.iter().enumerate() {
            g.set(j, i, F::one());
        }
        if let Some(w) = group.form() {
            if !w.is_preserved_by(&g)? {
                continue;
            }
        }
        let act = flags
            .iter()
            .map(|f| index.get(&f.image(&g)?).copied().ok_or_else(|| Error::InvalidFlag("image not enumerated".into())))
            .collect::<Result<Vec<usize>>>()?;
        out.push(act);
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for pos in 0..=k {
                let mut q = p.clone();
                q.insert(pos, k);
                next.push(q);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Flags whose `k`-subsets share apartments while the whole family does not.
#[derive(Clone)]
pub struct HellyWitness<F> {
    pub k: usize,
    pub flags: Vec<Flag<F>>,
    /// One frame per `k`-subset, in lexicographic order of the subsets.
    pub subset_frames: Vec<Frame<F>>,
    pub refutation: String,
}

impl<F: Field> HellyWitness<F> {
    /// Re-checks every subset frame and the absence of a common frame for the whole family.
    pub fn verify(&self, group: &GroupSpec<F>) -> Result<bool> {
        let subsets = combinations(self.flags.len(), self.k);
        if subsets.len() != self.subset_frames.len() {
            return Ok(false);
        }
        for (c, fr) in subsets.iter().zip(&self.subset_frames) {
            if let Some(w) = group.form() {
                if !is_normal_frame(fr, w) {
                    return Ok(false);
                }
            }
            for &i in c {
                if !is_adapted(&self.flags[i], fr)? {
                    return Ok(false);
                }
            }
        }
        let whole = common_frame(&self.flags, group)?;
        if !whole.is_absent() {
            return Ok(false);
        }
        // Exhaustive confirmation when the space is small enough.
        if let Ok(o) = FrameOracle::<F>::new(group.size(), ORACLE_FRAME_LIMIT) {
            let found = match group.form() {
                Some(w) => o.common_normal_frame(&self.flags, &o.normal_frames(w))?,
                None => o.common_frame(&self.flags)?,
            };
            if found.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<F: Field> std::fmt::Debug for HellyWitness<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HellyWitness").field("k", &self.k).field("flags", &self.flags).finish()
    }
}

pub enum WitnessSearch<F> {
    Found(HellyWitness<F>),
    /// The exhaustive search completed without a witness.
    NoneExists,
    /// Neither the exhaustive nor the random phase finished or found one.
    BudgetExhausted { seed: u64 },
}

impl<F> WitnessSearch<F> {
    pub fn witness(&self) -> Option<&HellyWitness<F>> {
        match self {
            WitnessSearch::Found(w) => Some(w),
            _ => None,
        }
    }
}

pub struct UpperReport<F> {
    pub k: usize,
    pub max_family: usize,
    /// True when every candidate family was examined.
    pub exhaustive: bool,
    /// Search nodes visited plus random samples drawn.
    pub checked: usize,
    pub counterexample: Option<HellyWitness<F>>,
    pub seed: u64,
}

impl<F> UpperReport<F> {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

pub struct HellyBounds<F> {
    pub lower: usize,
    pub witness: Option<HellyWitness<F>>,
    /// The witness search for the next `k` ran out of budget.
    pub search_exhausted: bool,
    pub upper: UpperReport<F>,
}

impl<F: Field> std::fmt::Debug for WitnessSearch<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WitnessSearch::Found(w) => write!(f, "Found({w:?})"),
            WitnessSearch::NoneExists => write!(f, "NoneExists"),
            WitnessSearch::BudgetExhausted { seed } => write!(f, "BudgetExhausted(seed {seed})"),
        }
    }
}

impl<F: Field> std::fmt::Debug for UpperReport<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UpperReport")
            .field("k", &self.k)
            .field("max_family", &self.max_family)
            .field("exhaustive", &self.exhaustive)
            .field("checked", &self.checked)
            .field("counterexample", &self.counterexample)
            .finish()
    }
}

impl<F: Field> std::fmt::Debug for HellyBounds<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HellyBounds").field("lower", &self.lower).field("upper", &self.upper).finish()
    }
}
