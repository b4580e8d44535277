//! Finite labeled fragments of a tiling on the integer grid.
//!
//! Tiles are unit intervals (1D) or unit squares (2D). A tile at position
//! `[x, y]` occupies `[x, x+1] x [y, y+1]`; in one dimension the second
//! coordinate is always zero. Coronas follow the closed-star convention: the
//! first corona of a tile is every tile whose closure meets its closure, so the
//! `n`-th corona of a tile on a full grid is the `(2n+1)^d` box around it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a tile label in the alphabet of a rule.
pub type TileId = u16;

/// Integer grid position. One-dimensional patches keep `y = 0`.
pub type Pos = [i64; 2];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Patch {
    dimension: usize,
    cells: BTreeMap<Pos, TileId>,
    mark: Option<Pos>,
}

impl Patch {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension == 1 || dimension == 2, "dimension must be 1 or 2");
        Patch {
            dimension,
            cells: BTreeMap::new(),
            mark: None,
        }
    }

    /// A one-dimensional patch occupying positions `0..word.len()`.
    pub fn from_word(word: &[TileId]) -> Self {
        let mut p = Patch::new(1);
        for (i, &t) in word.iter().enumerate() {
            p.cells.insert([i as i64, 0], t);
        }
        p
    }

    /// A two-dimensional patch from rows listed bottom to top.
    pub fn from_rows_bottom_up(rows: &[Vec<TileId>]) -> Self {
        let mut p = Patch::new(2);
        for (y, row) in rows.iter().enumerate() {
            for (x, &t) in row.iter().enumerate() {
                p.cells.insert([x as i64, y as i64], t);
            }
        }
        p
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn insert(&mut self, pos: Pos, tile: TileId) -> Option<TileId> {
        debug_assert!(self.dimension == 2 || pos[1] == 0);
        self.cells.insert(pos, tile)
    }

    pub fn get(&self, pos: Pos) -> Option<TileId> {
        self.cells.get(&pos).copied()
    }

    pub fn contains(&self, pos: Pos) -> bool {
        self.cells.contains_key(&pos)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pos, TileId)> + '_ {
        self.cells.iter().map(|(&p, &t)| (p, t))
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> + '_ {
        self.cells.keys().copied()
    }

    pub fn mark(&self) -> Option<Pos> {
        self.mark
    }

    pub fn set_mark(&mut self, pos: Option<Pos>) {
        if let Some(p) = pos {
            assert!(self.contains(p), "mark must be an occupied cell");
        }
        self.mark = pos;
    }

    pub fn with_mark(mut self, pos: Pos) -> Self {
        self.set_mark(Some(pos));
        self
    }

    /// Labels of a one-dimensional patch read left to right.
    pub fn word(&self) -> Vec<TileId> {
        self.cells.values().copied().collect()
    }

    pub fn translate(&self, by: Pos) -> Patch {
        let by = if self.dimension == 1 { [by[0], 0] } else { by };
        Patch {
            dimension: self.dimension,
            cells: self
                .cells
                .iter()
                .map(|(p, &t)| ([p[0] + by[0], p[1] + by[1]], t))
                .collect(),
            mark: self.mark.map(|m| [m[0] + by[0], m[1] + by[1]]),
        }
    }

    /// Translate so the lexicographically least occupied position is the origin.
    pub fn canonical(&self) -> Patch {
        match self.cells.keys().next() {
            Some(&min) => self.translate([-min[0], -min[1]]),
            None => self.clone(),
        }
    }

    /// Inclusive bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> Option<(Pos, Pos)> {
        let mut it = self.cells.keys();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Some((lo, hi))
    }

    /// Connectivity through shared faces (edges in 2D, endpoints in 1D).
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.cells.keys().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for q in face_neighbors(p, self.dimension) {
                if self.cells.contains_key(&q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen.len() == self.cells.len()
    }

    /// Sub-patch on the given positions; positions outside the patch are skipped.
    pub fn restrict(&self, keep: impl Fn(Pos) -> bool) -> Patch {
        Patch {
            dimension: self.dimension,
            cells: self
                .cells
                .iter()
                .filter(|(p, _)| keep(**p))
                .map(|(&p, &t)| (p, t))
                .collect(),
            mark: self.mark.filter(|m| keep(*m)),
        }
    }

    /// Whether every cell of `self` occurs in `other` with the same label.
    pub fn is_subpatch_of(&self, other: &Patch) -> bool {
        self.cells
            .iter()
            .all(|(p, t)| other.cells.get(p) == Some(t))
    }

    /// Deterministic label of a pointed patch up to translation; `None` when unmarked.
    pub fn canonical_label(&self) -> Option<CanonicalLabel> {
        let mark = self.mark?;
        let t = self.cells[&mark];
        let mut bytes = Vec::with_capacity(8 + self.cells.len() * 18);
        bytes.push(self.dimension as u8);
        bytes.extend_from_slice(&t.to_be_bytes());
        bytes.extend_from_slice(&(self.cells.len() as u32).to_be_bytes());
        for &label in self.cells.values() {
            bytes.extend_from_slice(&label.to_be_bytes());
        }
        for p in self.cells.keys() {
            for a in 0..self.dimension {
                let off = p[a] - mark[a];
                bytes.extend_from_slice(&((off as u64) ^ (1 << 63)).to_be_bytes());
            }
        }
        Some(CanonicalLabel(bytes))
    }
}

pub(crate) fn face_neighbors(p: Pos, dimension: usize) -> Vec<Pos> {
    let mut out = vec![[p[0] - 1, p[1]], [p[0] + 1, p[1]]];
    if dimension == 2 {
        out.push([p[0], p[1] - 1]);
        out.push([p[0], p[1] + 1]);
    }
    out
}

/// Byte string identifying a pointed patch up to translation.
///
/// Layout: dimension, marked label, cell count, labels in position order, then
/// offsets from the mark. Labels precede offsets so that, among patches of one
/// shape, sorting labels orders by the marked tile first and then the contents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalLabel(pub Vec<u8>);

impl fmt::Display for CanonicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// A tile together with its first `level` coronas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corona {
    pub center: Pos,
    pub level: usize,
    /// Marked at `center`.
    pub patch: Patch,
}

impl Corona {
    pub fn contains(&self, other: &Corona) -> bool {
        other.patch.is_subpatch_of(&self.patch)
    }
}

/// The closed-star corona of `center` at the given level.
pub fn corona(host: &Patch, center: Pos, n: usize) -> Result<Corona> {
    if !host.contains(center) {
        return Err(Error::CoronaUndetermined(format!(
            "center {center:?} is not in the host patch"
        )));
    }
    let n = n as i64;
    let ry = if host.dimension == 2 { n } else { 0 };
    let mut patch = Patch::new(host.dimension);
    for dy in -ry..=ry {
        for dx in -n..=n {
            let q = [center[0] + dx, center[1] + dy];
            match host.get(q) {
                Some(t) => {
                    patch.insert(q, t);
                }
                None => {
                    return Err(Error::CoronaUndetermined(format!(
                        "level-{n} corona of {center:?} needs position {q:?}"
                    )))
                }
            }
        }
    }
    patch.set_mark(Some(center));
    Ok(Corona {
        center,
        level: n as usize,
        patch,
    })
}

/// Whether the radius-`r` closed-star neighbourhoods of the two marks are translates.
pub fn t_equivalent(ctx1: &Patch, ctx2: &Patch, r: usize) -> Result<bool> {
    let context = |p: &Patch| -> Result<Patch> {
        let mark = p
            .mark()
            .ok_or_else(|| Error::ContextUndetermined("patch has no marked cell".into()))?;
        corona(p, mark, r)
            .map(|c| c.patch.translate([-mark[0], -mark[1]]))
            .map_err(|e| Error::ContextUndetermined(e.to_string()))
    };
    if ctx1.dimension != ctx2.dimension {
        return Ok(false);
    }
    Ok(context(ctx1)? == context(ctx2)?)
}

/// Exact value `coefficient * sqrt(diameter_squared)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RadiusBound {
    pub coefficient: u64,
    pub diameter_squared: u64,
}

impl RadiusBound {
    pub fn to_f64(self) -> f64 {
        self.coefficient as f64 * (self.diameter_squared as f64).sqrt()
    }
}

impl fmt::Display for RadiusBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.diameter_squared == 1 {
            write!(f, "{}", self.coefficient)
        } else if self.coefficient == 1 {
            write!(f, "√{}", self.diameter_squared)
        } else {
            write!(f, "{}·√{}", self.coefficient, self.diameter_squared)
        }
    }
}

/// `(n+1) L` with `L` the largest tile diameter: metric agreement on a ball of
/// strictly larger radius forces equal images in the level-`n` approximant.
pub fn pe_radius_bound(dimension: usize, n: usize) -> RadiusBound {
    RadiusBound {
        coefficient: n as u64 + 1,
        diameter_squared: dimension as u64,
    }
}
