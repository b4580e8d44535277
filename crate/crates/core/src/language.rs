//! Allowed patterns of a primitive substitution.
//!
//! The set of allowed adjacent pairs (2-letter words, or 2x2 blocks) is the
//! least set containing the pairs inside every single-tile image and closed
//! under substitution. Any allowed window no larger than the smallest
//! `k`-fold image then lies inside the `k`-fold image of an allowed pair,
//! which is how windows of every size are enumerated.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::patch::{Pos, TileId};
use crate::substitution::{Image, SubstitutionRule};

const MAX_CLOSURE_ROUNDS: usize = 10_000;
const MAX_BLOCK_CELLS: usize = 1 << 24;

/// Dense rectangle of tiles, `data[y * width + x]`. 1D blocks have height 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Block {
    pub width: usize,
    pub height: usize,
    pub data: Vec<TileId>,
}

impl Block {
    pub fn get(&self, x: usize, y: usize) -> TileId {
        self.data[y * self.width + x]
    }

    pub fn window(&self, x0: usize, y0: usize, w: usize, h: usize) -> Block {
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            data.extend_from_slice(&self.data[y * self.width + x0..y * self.width + x0 + w]);
        }
        Block {
            width: w,
            height: h,
            data,
        }
    }

    pub fn windows(&self, w: usize, h: usize) -> impl Iterator<Item = Block> + '_ {
        let nx = (self.width + 1).saturating_sub(w);
        let ny = (self.height + 1).saturating_sub(h);
        (0..ny).flat_map(move |y| (0..nx).map(move |x| self.window(x, y, w, h)))
    }
}

/// A block placed on the grid with its lower-left tile at `origin`.
#[derive(Clone, Debug)]
pub(crate) struct PlacedBlock {
    pub origin: Pos,
    pub block: Block,
}

/// Read access to tiles by grid position.
pub(crate) trait TileSource {
    fn tile_at(&self, p: Pos) -> Option<TileId>;
}

impl TileSource for PlacedBlock {
    fn tile_at(&self, p: Pos) -> Option<TileId> {
        let x = p[0] - self.origin[0];
        let y = p[1] - self.origin[1];
        if x < 0 || y < 0 || x as usize >= self.block.width || y as usize >= self.block.height {
            return None;
        }
        Some(self.block.get(x as usize, y as usize))
    }
}

impl TileSource for crate::patch::Patch {
    fn tile_at(&self, p: Pos) -> Option<TileId> {
        self.get(p)
    }
}

/// Substitute a block. For 1D rules the second value gives, for each source
/// tile, the x offset where its image starts.
pub(crate) fn substitute(rule: &SubstitutionRule, b: &Block) -> (Block, Vec<usize>) {
    match rule.dimension() {
        1 => {
            let mut data = Vec::new();
            let mut starts = Vec::with_capacity(b.width);
            for &t in &b.data {
                starts.push(data.len());
                let Image::Word(w) = rule.image(t) else {
                    unreachable!()
                };
                data.extend_from_slice(w);
            }
            (
                Block {
                    width: data.len(),
                    height: 1,
                    data,
                },
                starts,
            )
        }
        _ => {
            let e = rule.expansion().unwrap();
            let (w, h) = (b.width * e, b.height * e);
            let mut data = vec![0; w * h];
            for y in 0..b.height {
                for x in 0..b.width {
                    let Image::Block(cells) = rule.image(b.get(x, y)) else {
                        unreachable!()
                    };
                    for dy in 0..e {
                        for dx in 0..e {
                            data[(y * e + dy) * w + x * e + dx] = cells[dy * e + dx];
                        }
                    }
                }
            }
            let starts = (0..b.width).map(|x| x * e).collect();
            (
                Block {
                    width: w,
                    height: h,
                    data,
                },
                starts,
            )
        }
    }
}

fn single(t: TileId) -> Block {
    Block {
        width: 1,
        height: 1,
        data: vec![t],
    }
}

/// The allowed-pattern language of a primitive rule.
#[derive(Clone, Debug)]
pub(crate) struct Language<'a> {
    rule: &'a SubstitutionRule,
    pairs: BTreeSet<Block>,
}

impl<'a> Language<'a> {
    pub fn new(rule: &'a SubstitutionRule) -> Result<Self> {
        if !rule.is_primitive() {
            return Err(Error::Unsupported(
                "rule is not primitive; its hull is not determined by the substitution".into(),
            ));
        }
        let (pw, ph) = pair_shape(rule);
        let mut pairs = BTreeSet::new();
        if rule.tile_count() == 1 && rule.dimension() == 1 {
            // the only tiling is the constant one
            pairs.insert(Block {
                width: 2,
                height: 1,
                data: vec![0, 0],
            });
        }
        for t in 0..rule.tile_count() as TileId {
            let (img, _) = substitute(rule, &single(t));
            pairs.extend(img.windows(pw, ph));
        }
        let mut quiet = 0;
        let mut rounds = 0;
        let mut frontier: Vec<Block> = pairs.iter().cloned().collect();
        while quiet < 2 {
            rounds += 1;
            if rounds > MAX_CLOSURE_ROUNDS {
                return Err(Error::Budget(format!(
                    "allowed pairs did not stabilize after {rounds} rounds"
                )));
            }
            let mut next = Vec::new();
            for b in &frontier {
                let (img, _) = substitute(rule, b);
                for w in img.windows(pw, ph) {
                    if !pairs.contains(&w) {
                        pairs.insert(w.clone());
                        next.push(w);
                    }
                }
            }
            quiet = if next.is_empty() { quiet + 1 } else { 0 };
            frontier = if next.is_empty() {
                pairs.iter().cloned().collect()
            } else {
                next
            };
        }
        Ok(Language { rule, pairs })
    }

    pub fn pairs(&self) -> &BTreeSet<Block> {
        &self.pairs
    }

    /// Tiles that occur in the language.
    pub fn letters(&self) -> BTreeSet<TileId> {
        self.pairs
            .iter()
            .flat_map(|b| b.data.iter().copied())
            .collect()
    }

    /// Least `k` such that every `k`-fold image is at least `size` tiles wide.
    fn depth_for(&self, size: usize) -> Result<usize> {
        let rule = self.rule;
        let n = rule.tile_count();
        let mut lengths = vec![1usize; n];
        for k in 0..64 {
            if lengths.iter().all(|&l| l >= size) {
                return Ok(k);
            }
            let prev = lengths.clone();
            for (t, len) in lengths.iter_mut().enumerate() {
                *len = match rule.image(t as TileId) {
                    Image::Word(w) => w.iter().map(|&s| prev[s as usize]).sum(),
                    Image::Block(_) => prev[t] * rule.expansion().unwrap(),
                };
            }
            if lengths == prev {
                // constant tiling: every image stays a single tile
                return Ok(0);
            }
        }
        Err(Error::Budget(format!("images never reach width {size}")))
    }

    /// All allowed `w x h` windows (`h = 1` in 1D).
    pub fn windows(&self, w: usize, h: usize) -> Result<BTreeSet<Block>> {
        let size = w.max(h);
        if self.rule.tile_count() == 1 {
            return Ok(BTreeSet::from([Block {
                width: w,
                height: h,
                data: vec![0; w * h],
            }]));
        }
        let k = self.depth_for(size)?;
        let found = self.windows_at_depth(w, h, k)?;
        // stabilization check: one more round must not add anything
        let again = self.windows_at_depth(w, h, k + 1)?;
        if !again.is_subset(&found) {
            return Err(Error::Internal(format!(
                "allowed {w}x{h} windows did not stabilize at depth {k}"
            )));
        }
        Ok(found)
    }

    fn windows_at_depth(&self, w: usize, h: usize, k: usize) -> Result<BTreeSet<Block>> {
        let mut out = BTreeSet::new();
        for pair in &self.pairs {
            let mut b = pair.clone();
            for _ in 0..k {
                b = substitute(self.rule, &b).0;
                if b.data.len() > MAX_BLOCK_CELLS {
                    return Err(Error::Budget(format!(
                        "patch of {} tiles exceeds the enumeration budget",
                        b.data.len()
                    )));
                }
            }
            out.extend(b.windows(w, h));
        }
        Ok(out)
    }
}

fn pair_shape(rule: &SubstitutionRule) -> (usize, usize) {
    if rule.dimension() == 1 {
        (2, 1)
    } else {
        (2, 2)
    }
}
