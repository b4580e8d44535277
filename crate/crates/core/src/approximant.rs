//! Collared approximant complexes and the cellular maps between them.
//!
//! A cell of the tiling's grid decomposition is addressed by its base point
//! `p` and a mask of the axes it extends along (bit 0: x, bit 1: y), so a tile
//! at `p` is the cell `(p, full mask)`, its bottom edge is `(p, 0b01)` and its
//! lower-left vertex is `(p, 0)`. At level `n >= 1` a cell is identified by the
//! rectangle of tiles meeting it together with their `(n-1)`-coronas: along an
//! axis the cell extends in this is `[p-n, p+n]`, along the others
//! `[p-n, p+n-1]`. For a tile this is its `n`-collar.
//!
//! Level 0 has no collars; lower cells are glued whenever two tiles share them
//! in some allowed neighbouring pair.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::complex::{Cell, CellComplex, CellularMap, MapKind, UnionFind};
use crate::error::{Error, Result};
use crate::homalg::IntegerMatrix;
use crate::language::{substitute, Block, Language, PlacedBlock, TileSource};
use crate::patch::{CanonicalLabel, Corona, Patch, Pos, TileId};
use crate::substitution::SubstitutionRule;

/// A tile labelled by its first `level` coronas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollaredTile {
    pub id: usize,
    pub center: TileId,
    pub collar: Corona,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct CellKey {
    mask: u8,
    block: Block,
}

/// At level 0: a face of one tile, `(tile, mask, offset from the tile)`.
type Slot = (TileId, u8, Pos);

#[derive(Clone, Debug)]
enum Lookup {
    Collared(HashMap<CellKey, usize>),
    Uncollared(HashMap<Slot, usize>),
}

#[derive(Clone, Debug)]
pub struct ApproximantComplex {
    level: usize,
    rule: SubstitutionRule,
    complex: CellComplex,
    canonical: Vec<Vec<CanonicalLabel>>,
    keys: Vec<Vec<CellKey>>,
    lookup: Lookup,
    tiles: Vec<CollaredTile>,
}

pub const UNCOLLARED_CAVEAT: &str =
    "uncollared approximant: boundary identifications are not forced by tile neighbourhoods";

pub(crate) fn masks(d: usize) -> Vec<u8> {
    if d == 1 {
        vec![0, 1]
    } else {
        vec![0, 1, 2, 3]
    }
}

pub(crate) fn mask_dim(mask: u8) -> usize {
    mask.count_ones() as usize
}

fn full_mask(d: usize) -> u8 {
    if d == 1 {
        1
    } else {
        3
    }
}

/// Ordered signed faces of the cell `(p, mask)`: an edge gives tail then head,
/// a square its boundary edges counterclockwise from the bottom.
pub(crate) fn faces(p: Pos, mask: u8) -> Vec<(Pos, u8, i32)> {
    let [x, y] = p;
    match mask {
        0 => vec![],
        1 => vec![(p, 0, -1), ([x + 1, y], 0, 1)],
        2 => vec![(p, 0, -1), ([x, y + 1], 0, 1)],
        3 => vec![
            (p, 1, 1),
            ([x + 1, y], 2, 1),
            ([x, y + 1], 1, -1),
            (p, 2, -1),
        ],
        _ => unreachable!("mask {mask}"),
    }
}

/// Tile rectangle identifying `(p, mask)` at level `n >= 1`: origin, width, height.
fn region(d: usize, n: usize, p: Pos, mask: u8) -> (Pos, usize, usize) {
    let n_i = n as i64;
    let side = |bit: u8| if mask & bit != 0 { 2 * n + 1 } else { 2 * n };
    if d == 1 {
        ([p[0] - n_i, 0], side(1), 1)
    } else {
        ([p[0] - n_i, p[1] - n_i], side(1), side(2))
    }
}

fn extract(src: &impl TileSource, origin: Pos, w: usize, h: usize) -> Option<Block> {
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            data.push(src.tile_at([origin[0] + x, origin[1] + y])?);
        }
    }
    Some(Block {
        width: w,
        height: h,
        data,
    })
}

fn placed(d: usize, n: usize, key: &CellKey) -> PlacedBlock {
    PlacedBlock {
        origin: region(d, n, [0, 0], key.mask).0,
        block: key.block.clone(),
    }
}

fn key_patch(d: usize, n: usize, key: &CellKey) -> Patch {
    let pb = placed(d, n, key);
    let mut patch = Patch::new(d);
    for y in 0..key.block.height {
        for x in 0..key.block.width {
            patch.insert(
                [pb.origin[0] + x as i64, pb.origin[1] + y as i64],
                key.block.get(x, y),
            );
        }
    }
    patch.with_mark([0, 0])
}

fn joiner(rule: &SubstitutionRule) -> &'static str {
    if rule.alphabet().iter().all(|a| a.chars().count() == 1) {
        ""
    } else {
        ","
    }
}

fn readable(rule: &SubstitutionRule, n: usize, key: &CellKey) -> String {
    let name = |t: TileId| rule.tile_name(t).to_string();
    let sep = joiner(rule);
    let b = &key.block;
    if rule.dimension() == 1 {
        let names: Vec<String> = b.data.iter().map(|&t| name(t)).collect();
        let sep = if sep.is_empty() { "" } else { " " };
        if key.mask == 1 {
            format!(
                "{}[{}]{}",
                names[..n].join(sep),
                names[n],
                names[n + 1..].join(sep)
            )
        } else {
            format!("{}|{}", names[..n].join(sep), names[n..].join(sep))
        }
    } else {
        let kind = ['p', 'h', 'v', 'f'][key.mask as usize];
        let rows: Vec<String> = (0..b.height)
            .rev()
            .map(|y| {
                (0..b.width)
                    .map(|x| name(b.get(x, y)))
                    .collect::<Vec<_>>()
                    .join(sep)
            })
            .collect();
        format!("{kind}:{}", rows.join("/"))
    }
}

fn slot_name(rule: &SubstitutionRule, s: &Slot) -> String {
    let (t, mask, c) = *s;
    let name = rule.tile_name(t);
    let tag = if rule.dimension() == 1 {
        match (mask, c[0]) {
            (1, _) => "",
            (_, 0) => "<",
            _ => ">",
        }
    } else {
        match (mask, c) {
            (3, _) => "",
            (1, [_, 0]) => ".s",
            (1, _) => ".n",
            (2, [0, _]) => ".w",
            (2, _) => ".e",
            (_, [0, 0]) => ".sw",
            (_, [1, 0]) => ".se",
            (_, [0, 1]) => ".nw",
            _ => ".ne",
        }
    };
    format!("{name}{tag}")
}

/// Faces of the tile at the origin, as slots of tile `t`.
fn tile_slots(d: usize, t: TileId) -> Vec<Slot> {
    let mut out = Vec::new();
    for mask in masks(d) {
        let ys: &[i64] = if d == 2 && mask & 2 == 0 {
            &[0, 1]
        } else {
            &[0]
        };
        let xs: &[i64] = if mask & 1 == 0 { &[0, 1] } else { &[0] };
        for &y in ys {
            for &x in xs {
                out.push((t, mask, [x, y]));
            }
        }
    }
    out
}

impl ApproximantComplex {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn rule(&self) -> &SubstitutionRule {
        &self.rule
    }

    pub fn dimension(&self) -> usize {
        self.rule.dimension()
    }

    pub fn complex(&self) -> &CellComplex {
        &self.complex
    }

    pub fn count(&self, k: usize) -> usize {
        self.complex.count(k)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.complex.counts()
    }

    pub fn collared_tiles(&self) -> &[CollaredTile] {
        &self.tiles
    }

    pub fn label(&self, k: usize, id: usize) -> &str {
        &self.complex.cells[k][id].label
    }

    pub fn canonical_label(&self, k: usize, id: usize) -> &CanonicalLabel {
        &self.canonical[k][id]
    }

    pub fn find(&self, k: usize, label: &str) -> Option<usize> {
        self.complex.find(k, label)
    }

    pub fn is_uncollared(&self) -> bool {
        self.level == 0
    }

    pub fn caveat(&self) -> Option<&'static str> {
        self.is_uncollared().then_some(UNCOLLARED_CAVEAT)
    }

    /// The cell that `(p, mask)` of a tiling fragment maps to. `Ok(None)` when
    /// the fragment does not contain the tiles needed to decide.
    pub(crate) fn cell_at(&self, src: &impl TileSource, p: Pos, mask: u8) -> Result<Option<usize>> {
        match &self.lookup {
            Lookup::Uncollared(map) => {
                let Some(t) = src.tile_at(p) else {
                    return Ok(None);
                };
                map.get(&(t, mask, [0, 0]))
                    .copied()
                    .map(Some)
                    .ok_or_else(|| {
                        Error::UnknownPattern(format!(
                            "{} does not occur in the tiling",
                            self.rule.tile_name(t)
                        ))
                    })
            }
            Lookup::Collared(map) => {
                let (origin, w, h) = region(self.dimension(), self.level, p, mask);
                let Some(block) = extract(src, origin, w, h) else {
                    return Ok(None);
                };
                let key = CellKey { mask, block };
                map.get(&key)
                    .copied()
                    .map(Some)
                    .ok_or_else(|| Error::UnknownPattern(readable(&self.rule, self.level, &key)))
            }
        }
    }

    /// Pointed pattern identifying a cell, marked at the cell's base tile.
    /// Lower cells of the uncollared complex have none.
    pub fn context(&self, k: usize, id: usize) -> Option<Patch> {
        if self.level == 0 {
            return (k == self.dimension()).then(|| self.tiles[id].collar.patch.clone());
        }
        Some(key_patch(self.dimension(), self.level, &self.keys[k][id]))
    }

    /// Cell of `(p, mask)` in a patch, if its context is determined.
    pub fn cell_in_patch(&self, host: &Patch, p: Pos, mask: u8) -> Result<Option<usize>> {
        self.cell_at(host, p, mask)
    }
}

pub fn collared_tiles(rule: &SubstitutionRule, n: usize) -> Result<Vec<CollaredTile>> {
    let lang = Language::new(rule)?;
    let d = rule.dimension();
    if n == 0 {
        return Ok(lang
            .letters()
            .into_iter()
            .enumerate()
            .map(|(id, t)| CollaredTile {
                id,
                center: t,
                collar: Corona {
                    center: [0, 0],
                    level: 0,
                    patch: crate::substitution::seed(rule, t).with_mark([0, 0]),
                },
                level: 0,
            })
            .collect());
    }
    let mask = full_mask(d);
    let (_, w, h) = region(d, n, [0, 0], mask);
    let mut entries: Vec<(CanonicalLabel, CellKey)> = lang
        .windows(w, h)?
        .into_iter()
        .map(|block| {
            let key = CellKey { mask, block };
            (key_patch(d, n, &key).canonical_label().unwrap(), key)
        })
        .collect();
    entries.sort();
    Ok(entries
        .into_iter()
        .enumerate()
        .map(|(id, (_, key))| collared(d, n, id, &key))
        .collect())
}

fn collared(d: usize, n: usize, id: usize, key: &CellKey) -> CollaredTile {
    let patch = key_patch(d, n, key);
    CollaredTile {
        id,
        center: patch.get([0, 0]).unwrap(),
        collar: Corona {
            center: [0, 0],
            level: n,
            patch,
        },
        level: n,
    }
}

pub fn build_approximant(rule: &SubstitutionRule, n: usize) -> Result<ApproximantComplex> {
    let lang = Language::new(rule)?;
    if n == 0 {
        build_uncollared(rule, &lang)
    } else {
        build_collared(rule, &lang, n)
    }
}

fn build_collared(
    rule: &SubstitutionRule,
    lang: &Language,
    n: usize,
) -> Result<ApproximantComplex> {
    let d = rule.dimension();
    let mut entries: Vec<Vec<(CanonicalLabel, CellKey)>> = vec![Vec::new(); d + 1];
    for mask in masks(d) {
        let (_, w, h) = region(d, n, [0, 0], mask);
        for block in lang.windows(w, h)? {
            let key = CellKey { mask, block };
            let label = key_patch(d, n, &key).canonical_label().unwrap();
            entries[mask_dim(mask)].push((label, key));
        }
    }
    let mut map = HashMap::new();
    for level in entries.iter_mut() {
        // orientation first, so that level 0 and the collared levels agree
        level.sort_by(|a, b| (a.1.mask, &a.0).cmp(&(b.1.mask, &b.0)));
        for (id, (_, key)) in level.iter().enumerate() {
            map.insert(key.clone(), id);
        }
    }
    let mut ac = ApproximantComplex {
        level: n,
        rule: rule.clone(),
        complex: CellComplex {
            dimension: d,
            cells: Vec::new(),
        },
        canonical: Vec::new(),
        keys: Vec::new(),
        lookup: Lookup::Collared(map),
        tiles: Vec::new(),
    };
    let mut cells = Vec::with_capacity(d + 1);
    for level in &entries {
        let mut out = Vec::with_capacity(level.len());
        for (_, key) in level {
            let pb = placed(d, n, key);
            let mut boundary = Vec::new();
            for (q, m, s) in faces([0, 0], key.mask) {
                let id = ac.cell_at(&pb, q, m)?.ok_or_else(|| {
                    Error::Internal(format!(
                        "face of {} lies outside its context",
                        readable(rule, n, key)
                    ))
                })?;
                boundary.push((id, s));
            }
            out.push(Cell {
                label: readable(rule, n, key),
                boundary,
            });
        }
        cells.push(out);
    }
    ac.complex = CellComplex::new(d, cells)?;
    ac.tiles = entries[d]
        .iter()
        .enumerate()
        .map(|(id, (_, key))| collared(d, n, id, key))
        .collect();
    ac.canonical = entries
        .iter()
        .map(|l| l.iter().map(|(c, _)| c.clone()).collect())
        .collect();
    ac.keys = entries
        .into_iter()
        .map(|l| l.into_iter().map(|(_, k)| k).collect())
        .collect();
    Ok(ac)
}

fn build_uncollared(rule: &SubstitutionRule, lang: &Language) -> Result<ApproximantComplex> {
    let d = rule.dimension();
    let letters = lang.letters();
    let mut slots: Vec<Slot> = Vec::new();
    for &t in &letters {
        slots.extend(tile_slots(d, t));
    }
    let index: HashMap<Slot, usize> = slots.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut uf = UnionFind::new(slots.len());
    for pair in lang.pairs() {
        let mut at: BTreeMap<(Pos, u8), Vec<usize>> = BTreeMap::new();
        for y in 0..pair.height {
            for x in 0..pair.width {
                let t = pair.get(x, y);
                for (_, mask, c) in tile_slots(d, t) {
                    let q = [x as i64 + c[0], y as i64 + c[1]];
                    at.entry((q, mask)).or_default().push(index[&(t, mask, c)]);
                }
            }
        }
        for group in at.values() {
            for w in group.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<Slot>> = BTreeMap::new();
    for (i, s) in slots.iter().enumerate() {
        classes.entry(uf.find(i)).or_default().push(*s);
    }
    let mut per_dim: Vec<Vec<(String, Vec<Slot>)>> = vec![Vec::new(); d + 1];
    for members in classes.into_values() {
        let mask = members[0].1;
        let mut names: Vec<String> = members.iter().map(|s| slot_name(rule, s)).collect();
        names.sort();
        let label = if mask == full_mask(d) {
            names.join(",")
        } else {
            let kind = if d == 1 {
                ['p', 'e'][mask as usize]
            } else {
                ['p', 'h', 'v', 'f'][mask as usize]
            };
            format!("{kind}:{}", names.join(","))
        };
        per_dim[mask_dim(mask)].push((label, members));
    }
    let mut map = HashMap::new();
    for level in per_dim.iter_mut() {
        level.sort_by(|a, b| (a.1[0].1, &a.0).cmp(&(b.1[0].1, &b.0)));
        for (id, (_, members)) in level.iter().enumerate() {
            for s in members {
                map.insert(*s, id);
            }
        }
    }
    let mut cells = Vec::with_capacity(d + 1);
    for level in &per_dim {
        let mut out = Vec::new();
        for (label, members) in level {
            let (t, mask, c) = members[0];
            let boundary = faces(c, mask)
                .into_iter()
                .map(|(q, m, s)| (map[&(t, m, q)], s))
                .collect();
            out.push(Cell {
                label: label.clone(),
                boundary,
            });
        }
        cells.push(out);
    }
    let complex = CellComplex::new(d, cells)?;
    let tiles = per_dim[d]
        .iter()
        .enumerate()
        .map(|(id, (_, members))| {
            let t = members[0].0;
            CollaredTile {
                id,
                center: t,
                collar: Corona {
                    center: [0, 0],
                    level: 0,
                    patch: crate::substitution::seed(rule, t).with_mark([0, 0]),
                },
                level: 0,
            }
        })
        .collect();
    let canonical = per_dim
        .iter()
        .map(|l| {
            l.iter()
                .map(|(s, _)| CanonicalLabel(s.clone().into_bytes()))
                .collect()
        })
        .collect();
    Ok(ApproximantComplex {
        level: 0,
        rule: rule.clone(),
        complex,
        canonical,
        keys: Vec::new(),
        lookup: Lookup::Uncollared(map),
        tiles,
    })
}

impl fmt::Display for ApproximantComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["vertices", "edges", "faces"];
        let parts: Vec<String> = self
            .counts()
            .iter()
            .enumerate()
            .map(|(k, c)| format!("{c} {}", names[k]))
            .collect();
        write!(f, "Γ_{}: {}", self.level, parts.join(", "))
    }
}

fn map_from_images(
    kind: MapKind,
    source: &ApproximantComplex,
    target: &ApproximantComplex,
    images: Vec<Vec<Vec<usize>>>,
) -> Result<CellularMap> {
    let chain: Vec<IntegerMatrix> = images
        .iter()
        .enumerate()
        .map(|(k, cols)| {
            IntegerMatrix::from_triplets(
                target.count(k),
                source.count(k),
                cols.iter()
                    .enumerate()
                    .flat_map(|(j, img)| img.iter().map(move |&i| (i, j, 1))),
            )
        })
        .collect();
    let vertex_images = images[0].iter().map(|img| img[0]).collect();
    let edge_images = images[1]
        .iter()
        .map(|img| img.iter().map(|&e| (e, 1)).collect())
        .collect();
    let map = CellularMap {
        kind,
        source_level: Some(source.level),
        target_level: Some(target.level),
        chain,
        vertex_images,
        edge_images,
    };
    if let Some(k) = map.commutation_defect(&source.complex, &target.complex) {
        return Err(Error::Internal(format!(
            "{kind:?} map does not commute with the boundary in degree {k}"
        )));
    }
    map.check_paths(&source.complex, &target.complex)?;
    Ok(map)
}

/// The map `Γ_{n'} -> Γ_n` forgetting the outer coronas.
pub fn forgetful_map_between(
    source: &ApproximantComplex,
    target: &ApproximantComplex,
) -> Result<CellularMap> {
    if source.level <= target.level {
        return Err(Error::Precondition(format!(
            "forgetful map needs a higher source level, got {} -> {}",
            source.level, target.level
        )));
    }
    if source.rule != target.rule {
        return Err(Error::Precondition(
            "complexes come from different rules".into(),
        ));
    }
    let d = source.dimension();
    let mut images = Vec::with_capacity(d + 1);
    for keys in &source.keys {
        let mut col = Vec::with_capacity(keys.len());
        for key in keys {
            let pb = placed(d, source.level, key);
            let id = target.cell_at(&pb, [0, 0], key.mask)?.ok_or_else(|| {
                Error::Internal(format!(
                    "context of {} too small for level {}",
                    readable(&source.rule, source.level, key),
                    target.level
                ))
            })?;
            col.push(vec![id]);
        }
        images.push(col);
    }
    map_from_images(MapKind::Forgetful, source, target, images)
}

pub fn forgetful_map(rule: &SubstitutionRule, from: usize, to: usize) -> Result<CellularMap> {
    if from <= to {
        return Err(Error::Precondition(format!(
            "forgetful map needs from > to, got {from} -> {to}"
        )));
    }
    forgetful_map_between(
        &build_approximant(rule, from)?,
        &build_approximant(rule, to)?,
    )
}

/// Refuses rules not declared aperiodic.
pub fn check_substitution_route(rule: &SubstitutionRule, n: usize) -> Result<()> {
    match rule.declared_aperiodic() {
        Some(true) => {}
        Some(false) => {
            return Err(Error::RouteRefused(
                "the rule is declared periodic; the substitution self-map computes a solenoid, \
                 not the hull; use the gahler route"
                    .into(),
            ))
        }
        None => {
            return Err(Error::RouteRefused(
                "the rule does not declare \"aperiodic\": true; the substitution route is only \
                 valid for aperiodic rules; use the gahler route"
                    .into(),
            ))
        }
    }
    if n == 0 {
        return Err(Error::RouteRefused(
            "the substitution route needs collared tiles (collar >= 1)".into(),
        ));
    }
    Ok(())
}

/// Self-map of `Γ_n` induced by substituting and rescaling.
pub fn substitution_map_on(ac: &ApproximantComplex) -> Result<CellularMap> {
    let rule = &ac.rule;
    check_substitution_route(rule, ac.level)?;
    let d = rule.dimension();
    let n = ac.level;
    let mut images = Vec::with_capacity(d + 1);
    for keys in &ac.keys {
        let mut col = Vec::with_capacity(keys.len());
        for key in keys {
            let (img, starts) = substitute(rule, &key.block);
            let (origin, subcells): (Pos, Vec<Pos>) = if d == 1 {
                let start = starts[n] as i64;
                let len = rule.image_extent(key.block.data[n]) as i64;
                let cells = match key.mask {
                    0 => vec![[0, 0]],
                    _ => (0..len).map(|i| [i, 0]).collect(),
                };
                ([-start, 0], cells)
            } else {
                let b = rule.expansion().unwrap() as i64;
                let o = -(n as i64) * b;
                let cells = match key.mask {
                    0 => vec![[0, 0]],
                    1 => (0..b).map(|i| [i, 0]).collect(),
                    2 => (0..b).map(|i| [0, i]).collect(),
                    _ => (0..b).flat_map(|y| (0..b).map(move |x| [x, y])).collect(),
                };
                ([o, o], cells)
            };
            let pb = PlacedBlock { origin, block: img };
            let mut ids = Vec::with_capacity(subcells.len());
            for q in subcells {
                let id = ac.cell_at(&pb, q, key.mask)?.ok_or_else(|| {
                    Error::Internal(format!(
                        "substituted context of {} is too small",
                        readable(rule, n, key)
                    ))
                })?;
                ids.push(id);
            }
            col.push(ids);
        }
        images.push(col);
    }
    map_from_images(MapKind::Substitution, ac, ac, images)
}

pub fn substitution_map(rule: &SubstitutionRule, n: usize) -> Result<CellularMap> {
    check_substitution_route(rule, n)?;
    substitution_map_on(&build_approximant(rule, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::parse_rule;

    fn fib() -> SubstitutionRule {
        parse_rule(
            r#"{"dimension":1,"tiles":["a","b"],"rule":{"a":"ab","b":"a"},"aperiodic":true}"#,
        )
        .unwrap()
    }

    #[test]
    fn fibonacci_level_one() {
        let g = build_approximant(&fib(), 1).unwrap();
        assert_eq!(g.counts(), [3, 4]);
        let labels: Vec<&str> = (0..4).map(|i| g.label(1, i)).collect();
        assert_eq!(labels, ["a[a]b", "b[a]a", "b[a]b", "a[b]a"]);
        let vertices: Vec<&str> = (0..3).map(|i| g.label(0, i)).collect();
        assert_eq!(vertices, ["a|a", "b|a", "a|b"]);
        assert!(g.complex().is_connected());
        assert_eq!(g.complex().euler_characteristic(), -1);
    }

    #[test]
    fn fibonacci_level_two_and_forgetting() {
        let r = fib();
        let g2 = build_approximant(&r, 2).unwrap();
        assert_eq!(g2.counts(), [5, 6]);
        let g1 = build_approximant(&r, 1).unwrap();
        let f = forgetful_map_between(&g2, &g1).unwrap();
        let mut hit: Vec<usize> = f.edge_images.iter().map(|p| p[0].0).collect();
        hit.sort();
        hit.dedup();
        assert_eq!(hit.len(), 4);
        assert!(forgetful_map(&r, 1, 1).is_err());
    }

    #[test]
    fn uncollared_fibonacci() {
        let g = build_approximant(&fib(), 0).unwrap();
        assert_eq!(g.counts(), [1, 2]);
        assert!(g.caveat().is_some());
        let g1 = build_approximant(&fib(), 1).unwrap();
        forgetful_map_between(&g1, &g).unwrap();
    }

    #[test]
    fn substitution_lengths() {
        let r = fib();
        let g = build_approximant(&r, 1).unwrap();
        let s = substitution_map_on(&g).unwrap();
        let lens: Vec<usize> = s.edge_images.iter().map(Vec::len).collect();
        assert_eq!(lens, [2, 2, 2, 1]);
    }

    #[test]
    fn periodic_square_is_a_torus() {
        let r = parse_rule(
            r#"{"dimension":2,"tiles":["t"],"expansion":2,"rule":{"t":["tt","tt"]},"aperiodic":false}"#,
        )
        .unwrap();
        for n in 0..3 {
            let g = build_approximant(&r, n).unwrap();
            assert_eq!(g.counts(), [1, 2, 1], "level {n}");
        }
        assert!(matches!(
            substitution_map(&r, 1),
            Err(Error::RouteRefused(_))
        ));
    }
}
