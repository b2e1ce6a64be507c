//! Exhaustive apartment search over a finite field.
//!
//! Every line of `F_p^n` gets an index; a subspace becomes the bitmask of the
//! lines it contains and a frame the bitmask of its `n` lines. A subspace `S` is
//! spanned by lines of a frame `L` iff `popcount(mask(S) & L) = dim S`.

use std::collections::HashMap;

use crate::building::flag::{Flag, Frame};
use crate::building::group::SymplecticForm;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Subspace;

/// Hard limit on the number of lines (one bit each).
pub const MAX_LINES: usize = 128;

#[derive(Clone)]
pub struct FrameOracle<F> {
    n: usize,
    lines: Vec<Subspace<F>>,
    index: HashMap<Subspace<F>, usize>,
    frames: Vec<u128>,
}

/// All nonzero vectors of `F^n` whose first nonzero coordinate is 1.
pub fn projective_points<F: Field>(n: usize) -> Result<Vec<Vec<F>>> {
    let elems = F::elements().ok_or_else(|| Error::Precondition("field is not finite".into()))?;
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let count = elems.len().checked_pow(free as u32).ok_or_else(|| Error::BudgetExceeded {
            what: "projective point enumeration".into(),
            budget: usize::MAX,
        })?;
        for mut code in 0..count {
            let mut v = vec![F::zero(); n];
            v[lead] = F::one();
            for x in v.iter_mut().skip(lead + 1) {
                *x = elems[code % elems.len()].clone();
                code /= elems.len();
            }
            out.push(v);
        }
    }
    Ok(out)
}

impl<F: Field> FrameOracle<F> {
    /// Enumerates every frame of `F^n`; fails when there are more than [`MAX_LINES`] lines
    /// or more than `budget` frames.
    pub fn new(n: usize, budget: usize) -> Result<Self> {
        let points = projective_points::<F>(n)?;
        if points.len() > MAX_LINES {
            return Err(Error::BudgetExceeded { what: "oracle line count".into(), budget: MAX_LINES });
        }
        let lines: Vec<Subspace<F>> = points.iter().map(|p| Subspace::line(p)).collect::<Result<_>>()?;
        let index = lines.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut frames = Vec::new();
        // Depth-first choice of increasing line indices, keeping the chosen lines independent.
        let mut stack: Vec<(usize, Subspace<F>, u128)> = vec![(0, Subspace::zero(n), 0)];
        while let Some((start, span, mask)) = stack.pop() {
            if span.dim() == n {
                frames.push(mask);
                if frames.len() > budget {
                    return Err(Error::BudgetExceeded { what: "oracle frame enumeration".into(), budget });
                }
                continue;
            }
            let needed = n - span.dim();
            for i in (start..lines.len()).rev() {
                if lines.len() - i < needed {
                    continue;
                }
                if !span.contains(&points[i])? {
                    stack.push((i + 1, span.sum(&lines[i])?, mask | (1u128 << i)));
                }
            }
        }
        frames.sort_unstable();
        Ok(FrameOracle { n, lines, index, frames })
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn frame_masks(&self) -> &[u128] {
        &self.frames
    }

    pub fn lines(&self) -> &[Subspace<F>] {
        &self.lines
    }

    /// Bitmask of the lines inside `s`.
    pub fn mask(&self, s: &Subspace<F>) -> Result<u128> {
        let mut m = 0u128;
        for (i, l) in self.lines.iter().enumerate() {
            if s.contains_subspace(l)? {
                m |= 1 << i;
            }
        }
        Ok(m)
    }

    pub fn frame_of(&self, mask: u128) -> Frame<F> {
        let lines = (0..self.lines.len()).filter(|i| mask >> i & 1 == 1).map(|i| self.lines[i].clone()).collect();
        Frame::new(lines).expect("oracle frames are frames")
    }

    pub fn mask_of_frame(&self, frame: &Frame<F>) -> u128 {
        frame.lines().iter().fold(0, |m, l| m | 1 << self.index[l])
    }

    /// `(mask, dim)` constraints for every piece of every flag.
    pub fn constraints(&self, flags: &[Flag<F>]) -> Result<Vec<(u128, u32)>> {
        let mut out = Vec::new();
        for f in flags {
            for p in f.pieces() {
                if !p.is_full() {
                    out.push((self.mask(p)?, p.dim() as u32));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn first_frame(&self, candidates: &[u128], cons: &[(u128, u32)]) -> Option<u128> {
        candidates.iter().copied().find(|&fr| cons.iter().all(|&(m, d)| (m & fr).count_ones() == d))
    }

    /// Least (by mask) frame adapted to all flags.
    pub fn common_frame(&self, flags: &[Flag<F>]) -> Result<Option<Frame<F>>> {
        let cons = self.constraints(flags)?;
        Ok(self.first_frame(&self.frames, &cons).map(|m| self.frame_of(m)))
    }

    /// Frames whose lines pair perfectly under `w`: each line pairs nontrivially with exactly one other.
    pub fn normal_frames(&self, w: &SymplecticForm<F>) -> Vec<u128> {
        let k = self.lines.len();
        let vecs: Vec<Vec<F>> = self.lines.iter().map(|l| l.line_vector().expect("line")).collect();
        let mut pairs = vec![0u128; k];
        for i in 0..k {
            for j in 0..k {
                if !w.pair(&vecs[i], &vecs[j]).is_zero() {
                    pairs[i] |= 1 << j;
                }
            }
        }
        self.frames
            .iter()
            .copied()
            .filter(|&fr| (0..k).filter(|i| fr >> i & 1 == 1).all(|i| (pairs[i] & fr).count_ones() == 1))
            .collect()
    }

    /// Least normal frame adapted to all flags.
    pub fn common_normal_frame(&self, flags: &[Flag<F>], normal: &[u128]) -> Result<Option<Frame<F>>> {
        let cons = self.constraints(flags)?;
        Ok(self.first_frame(normal, &cons).map(|m| self.frame_of(m)))
    }
}
