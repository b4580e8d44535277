//! Substitution rules: 1D symbolic substitutions on unit intervals and 2D
//! block substitutions on unit squares with a single integer expansion.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::patch::{Patch, Pos, TileId};

/// Largest patch `expand_patch` will produce unless told otherwise.
pub const DEFAULT_PATCH_BUDGET: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    Word(Vec<TileId>),
    /// `expansion x expansion` labels stored row-major from the bottom row up,
    /// so `cells[y * expansion + x]` sits at grid offset `(x, y)`.
    Block(Vec<TileId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionRule {
    dimension: usize,
    alphabet: Vec<String>,
    images: Vec<Image>,
    expansion: Option<usize>,
    declared_aperiodic: Option<bool>,
}

impl SubstitutionRule {
    pub fn one_dimensional(
        alphabet: Vec<String>,
        images: Vec<Vec<TileId>>,
        declared_aperiodic: Option<bool>,
    ) -> Result<Self> {
        check_alphabet(&alphabet)?;
        if images.len() != alphabet.len() {
            return Err(Error::parse("rule", "one image per tile is required"));
        }
        for (name, img) in alphabet.iter().zip(&images) {
            if img.is_empty() {
                return Err(Error::parse(format!("rule.{name}"), "image is empty"));
            }
            check_labels(&alphabet, name, img)?;
        }
        Ok(SubstitutionRule {
            dimension: 1,
            alphabet,
            images: images.into_iter().map(Image::Word).collect(),
            expansion: None,
            declared_aperiodic,
        })
    }

    /// `images[i]` lists the rows of tile `i`'s image from top to bottom.
    pub fn two_dimensional(
        alphabet: Vec<String>,
        expansion: usize,
        images: Vec<Vec<Vec<TileId>>>,
        declared_aperiodic: Option<bool>,
    ) -> Result<Self> {
        check_alphabet(&alphabet)?;
        if expansion < 2 {
            return Err(Error::parse("expansion", "expansion must be at least 2"));
        }
        if images.len() != alphabet.len() {
            return Err(Error::parse("rule", "one image per tile is required"));
        }
        let mut blocks = Vec::with_capacity(images.len());
        for (name, rows) in alphabet.iter().zip(&images) {
            if rows.len() != expansion || rows.iter().any(|r| r.len() != expansion) {
                let shape: Vec<usize> = rows.iter().map(Vec::len).collect();
                return Err(Error::RaggedBlock {
                    key: format!("rule.{name}"),
                    message: format!(
                        "expected {expansion}x{expansion}, found {} rows of widths {shape:?}",
                        rows.len()
                    ),
                });
            }
            let mut cells = vec![0; expansion * expansion];
            for (r, row) in rows.iter().enumerate() {
                check_labels(&alphabet, name, row)?;
                let y = expansion - 1 - r;
                for (x, &t) in row.iter().enumerate() {
                    cells[y * expansion + x] = t;
                }
            }
            blocks.push(Image::Block(cells));
        }
        Ok(SubstitutionRule {
            dimension: 2,
            alphabet,
            images: blocks,
            expansion: Some(expansion),
            declared_aperiodic,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn tile_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, t: TileId) -> &Image {
        &self.images[t as usize]
    }

    /// Block expansion `B` of a 2D rule.
    pub fn expansion(&self) -> Option<usize> {
        self.expansion
    }

    pub fn declared_aperiodic(&self) -> Option<bool> {
        self.declared_aperiodic
    }

    pub fn tile_name(&self, t: TileId) -> &str {
        &self.alphabet[t as usize]
    }

    pub fn tile_id(&self, name: &str) -> Option<TileId> {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .map(|i| i as TileId)
    }

    fn single_char_names(&self) -> bool {
        self.alphabet.iter().all(|a| a.chars().count() == 1)
    }

    /// Parse a run of tile names: characters when every name is one character
    /// long, whitespace-separated tokens otherwise.
    pub fn parse_word(&self, text: &str) -> Result<Vec<TileId>> {
        tokenize(&self.alphabet, text)?
            .into_iter()
            .map(|tok| {
                self.tile_id(&tok).ok_or_else(|| Error::UnknownLabel {
                    key: "word".into(),
                    label: tok,
                })
            })
            .collect()
    }

    pub fn format_word(&self, word: &[TileId]) -> String {
        let sep = if self.single_char_names() { "" } else { " " };
        word.iter()
            .map(|&t| self.tile_name(t))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Length of the image of each tile along one axis (`B` in 2D).
    pub fn image_extent(&self, t: TileId) -> usize {
        match &self.images[t as usize] {
            Image::Word(w) => w.len(),
            Image::Block(_) => self.expansion.unwrap_or(1),
        }
    }

    /// `M[i][j]` = number of occurrences of tile `i` in the image of tile `j`.
    pub fn abelianization(&self) -> Vec<Vec<u64>> {
        let n = self.alphabet.len();
        let mut m = vec![vec![0u64; n]; n];
        for (j, img) in self.images.iter().enumerate() {
            let cells: &[TileId] = match img {
                Image::Word(w) => w,
                Image::Block(b) => b,
            };
            for &t in cells {
                m[t as usize][j] += 1;
            }
        }
        m
    }

    /// Least `k <= |A|^2` with `M^k` entrywise positive.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.alphabet.len();
        let base: Vec<Vec<bool>> = self
            .abelianization()
            .iter()
            .map(|r| r.iter().map(|&v| v > 0).collect())
            .collect();
        let mut power = base.clone();
        for k in 1..=n * n {
            if power.iter().all(|r| r.iter().all(|&b| b)) {
                return Some(k);
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for j in 0..n {
                    next[i][j] = (0..n).any(|l| power[i][l] && base[l][j]);
                }
            }
            power = next;
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }

    /// Maximum tile diameter squared: 1 for unit intervals, `d` for unit cubes.
    pub fn tile_diameter_squared(&self) -> u64 {
        self.dimension as u64
    }
}

fn check_alphabet(alphabet: &[String]) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::parse("tiles", "alphabet is empty"));
    }
    if alphabet.len() > TileId::MAX as usize {
        return Err(Error::parse("tiles", "alphabet too large"));
    }
    for (i, a) in alphabet.iter().enumerate() {
        if a.is_empty() || a.chars().any(char::is_whitespace) {
            return Err(Error::parse(
                "tiles",
                format!("invalid tile name {a:?}: names must be nonempty without whitespace"),
            ));
        }
        if alphabet[..i].contains(a) {
            return Err(Error::parse("tiles", format!("duplicate tile name {a:?}")));
        }
    }
    Ok(())
}

fn check_labels(alphabet: &[String], key: &str, labels: &[TileId]) -> Result<()> {
    match labels.iter().find(|&&t| t as usize >= alphabet.len()) {
        Some(t) => Err(Error::UnknownLabel {
            key: format!("rule.{key}"),
            label: format!("#{t}"),
        }),
        None => Ok(()),
    }
}

fn tokenize(alphabet: &[String], text: &str) -> Result<Vec<String>> {
    if alphabet.iter().all(|a| a.chars().count() == 1) {
        Ok(text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect())
    } else {
        Ok(text.split_whitespace().map(String::from).collect())
    }
}

fn resolve(alphabet: &[String], key: &str, text: &str) -> Result<Vec<TileId>> {
    tokenize(alphabet, text)?
        .into_iter()
        .map(|tok| match alphabet.iter().position(|a| *a == tok) {
            Some(i) => Ok(i as TileId),
            None => Err(Error::UnknownLabel {
                key: key.to_string(),
                label: tok,
            }),
        })
        .collect()
}

/// Parse a rule document (JSON). See the README for the schema.
pub fn parse_rule(document: &str) -> Result<SubstitutionRule> {
    let root: Value =
        serde_json::from_str(document).map_err(|e| Error::parse("<document>", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::parse("<document>", "expected a JSON object"))?;
    for key in obj.keys() {
        if ![
            "dimension",
            "tiles",
            "expansion",
            "rule",
            "aperiodic",
            "name",
        ]
        .contains(&key.as_str())
        {
            return Err(Error::parse(key.clone(), "unexpected key"));
        }
    }
    let dimension = obj
        .get("dimension")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::parse("dimension", "required integer 1 or 2"))?;
    if dimension != 1 && dimension != 2 {
        return Err(Error::parse("dimension", "must be 1 or 2"));
    }
    let tiles = obj
        .get("tiles")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse("tiles", "required array of strings"))?;
    let alphabet = tiles
        .iter()
        .map(|t| {
            t.as_str()
                .map(String::from)
                .ok_or_else(|| Error::parse("tiles", "tile names must be strings"))
        })
        .collect::<Result<Vec<_>>>()?;
    check_alphabet(&alphabet)?;
    let aperiodic = match obj.get("aperiodic") {
        None | Some(Value::Null) => None,
        Some(Value::Bool(b)) => Some(*b),
        Some(_) => return Err(Error::parse("aperiodic", "must be a boolean")),
    };
    let rule = obj
        .get("rule")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::parse("rule", "required object mapping tile -> image"))?;
    for key in rule.keys() {
        if !alphabet.contains(key) {
            return Err(Error::UnknownLabel {
                key: "rule".into(),
                label: key.clone(),
            });
        }
    }
    let image_of = |name: &str| {
        rule.get(name)
            .ok_or_else(|| Error::parse(format!("rule.{name}"), "missing image"))
    };

    if dimension == 1 {
        if obj.contains_key("expansion") {
            return Err(Error::parse("expansion", "only valid for 2D rules"));
        }
        let mut images = Vec::new();
        for name in &alphabet {
            let key = format!("rule.{name}");
            let text = image_of(name)?
                .as_str()
                .ok_or_else(|| Error::parse(key.clone(), "1D image must be a string"))?;
            images.push(resolve(&alphabet, &key, text)?);
        }
        return SubstitutionRule::one_dimensional(alphabet, images, aperiodic);
    }

    let mut images = Vec::new();
    for name in &alphabet {
        let key = format!("rule.{name}");
        let rows = image_of(name)?
            .as_array()
            .ok_or_else(|| Error::parse(key.clone(), "2D image must be an array of rows"))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_str()
                    .ok_or_else(|| Error::parse(key.clone(), "rows must be strings"))
                    .and_then(|s| resolve(&alphabet, &key, s))
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(rows);
    }
    let expansion = match obj.get("expansion") {
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Error::parse("expansion", "must be an integer"))?
            as usize,
        None => images[0].len(),
    };
    SubstitutionRule::two_dimensional(alphabet, expansion, images, aperiodic)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Expansion {
    /// Image length of each tile.
    Lengths(Vec<usize>),
    Block(usize),
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ValidationReport {
    pub primitive: bool,
    pub primitivity_exponent: Option<usize>,
    pub abelianization: Vec<Vec<u64>>,
    pub expansion: Expansion,
    pub declared_aperiodic: Option<bool>,
    pub warnings: Vec<String>,
}

pub fn validate_rule(rule: &SubstitutionRule) -> ValidationReport {
    let exponent = rule.primitivity_exponent();
    let mut warnings = Vec::new();
    if rule.declared_aperiodic.is_none() {
        warnings.push(
            "aperiodic flag absent: treated as not aperiodic; substitution route unavailable"
                .to_string(),
        );
    }
    if rule.tile_count() == 1 {
        warnings.push("periodic hull: approximant tower constant".to_string());
    }
    if exponent.is_none() {
        warnings.push("rule is not primitive: approximants are not built".to_string());
    }
    let expansion = match rule.expansion {
        Some(b) => Expansion::Block(b),
        None => Expansion::Lengths(
            (0..rule.tile_count())
                .map(|t| rule.image_extent(t as TileId))
                .collect(),
        ),
    };
    ValidationReport {
        primitive: exponent.is_some(),
        primitivity_exponent: exponent,
        abelianization: rule.abelianization(),
        expansion,
        declared_aperiodic: rule.declared_aperiodic,
        warnings,
    }
}

/// Apply the substitution `iterations` times, using the default size budget.
pub fn expand_patch(rule: &SubstitutionRule, patch: &Patch, iterations: usize) -> Result<Patch> {
    expand_patch_with_budget(rule, patch, iterations, DEFAULT_PATCH_BUDGET)
}

pub fn expand_patch_with_budget(
    rule: &SubstitutionRule,
    patch: &Patch,
    iterations: usize,
    budget: usize,
) -> Result<Patch> {
    if patch.dimension() != rule.dimension() {
        return Err(Error::Precondition(
            "patch and rule dimensions differ".into(),
        ));
    }
    if !patch.is_connected() {
        return Err(Error::Precondition("patch is not connected".into()));
    }
    let mut current = patch.canonical();
    for _ in 0..iterations {
        current = substitute_once(rule, &current, budget)?;
    }
    Ok(current.canonical())
}

fn substitute_once(rule: &SubstitutionRule, patch: &Patch, budget: usize) -> Result<Patch> {
    let size: usize = patch
        .iter()
        .map(|(_, t)| rule.image_extent(t).pow(rule.dimension() as u32))
        .sum();
    if size > budget {
        return Err(Error::Budget(format!(
            "expanded patch would have {size} tiles (budget {budget})"
        )));
    }
    let mut out = Patch::new(rule.dimension());
    let mut mark: Option<Pos> = None;
    match rule.dimension() {
        1 => {
            let mut x = 0i64;
            for (p, t) in patch.iter() {
                if patch.mark() == Some(p) {
                    mark = Some([x, 0]);
                }
                let Image::Word(w) = rule.image(t) else {
                    unreachable!()
                };
                for &s in w {
                    out.insert([x, 0], s);
                    x += 1;
                }
            }
        }
        _ => {
            let b = rule.expansion().unwrap() as i64;
            for (p, t) in patch.iter() {
                let origin = [p[0] * b, p[1] * b];
                if patch.mark() == Some(p) {
                    mark = Some(origin);
                }
                let Image::Block(cells) = rule.image(t) else {
                    unreachable!()
                };
                for y in 0..b {
                    for x in 0..b {
                        out.insert([origin[0] + x, origin[1] + y], cells[(y * b + x) as usize]);
                    }
                }
            }
        }
    }
    out.set_mark(mark);
    Ok(out)
}

/// Single-tile seed patch.
pub fn seed(rule: &SubstitutionRule, t: TileId) -> Patch {
    let mut p = Patch::new(rule.dimension());
    p.insert([0, 0], t);
    p
}

/// Counts of each label within a patch, keyed by tile id.
pub fn label_counts(patch: &Patch) -> BTreeMap<TileId, usize> {
    let mut counts = BTreeMap::new();
    for (_, t) in patch.iter() {
        *counts.entry(t).or_default() += 1;
    }
    counts
}
