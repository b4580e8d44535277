use std::collections::HashMap;

use num_bigint::BigInt;
use serde::Serialize;

use super::group::FiniteGroup;
use super::presentation::{induced_on_generators, Letter, Presentation};
use crate::complex::{CellComplex, CellularMap};
use crate::error::{Error, Result};
use crate::homalg::{cohomology, Coefficients};

pub const DEFAULT_HOM_BUDGET: u128 = 10_000_000;

/// Images of the generators, as element indices.
pub type Representation = Vec<usize>;

pub fn evaluate(g: &FiniteGroup, rho: &[usize], word: &[Letter]) -> usize {
    word.iter().fold(g.identity(), |acc, &(i, s)| {
        let x = if s > 0 { rho[i] } else { g.inv(rho[i]) };
        g.mul(acc, x)
    })
}

/// All homomorphisms π₁ → G, in lexicographic order of generator images.
pub fn enumerate_homs(p: &Presentation, g: &FiniteGroup) -> Result<Vec<Representation>> {
    enumerate_homs_with_budget(p, g, DEFAULT_HOM_BUDGET)
}

pub fn enumerate_homs_with_budget(
    p: &Presentation,
    g: &FiniteGroup,
    budget: u128,
) -> Result<Vec<Representation>> {
    let n = p.generator_count();
    let candidates = (g.order() as u128).checked_pow(n as u32);
    match candidates {
        Some(c) if c <= budget => {}
        _ => {
            return Err(Error::Budget(format!(
                "{}^{} candidate assignments exceed the budget of {}",
                g.order(),
                n,
                budget
            )))
        }
    }
    // a relator is checked as soon as its last generator is assigned
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, word) in p.relators.iter().enumerate() {
        if let Some(last) = word.iter().map(|&(i, _)| i).max() {
            due[last].push(r);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    let mut rho = vec![0usize; n];
    let mut depth = 0usize;
    loop {
        let ok = due[depth]
            .iter()
            .all(|&r| evaluate(g, &rho, &p.relators[r]) == g.identity());
        if ok && depth + 1 == n {
            out.push(rho.clone());
        }
        if ok && depth + 1 < n {
            depth += 1;
            rho[depth] = 0;
            continue;
        }
        // advance to the next candidate at this depth, backtracking as needed
        loop {
            rho[depth] += 1;
            if rho[depth] < g.order() {
                break;
            }
            if depth == 0 {
                return Ok(out);
            }
            depth -= 1;
        }
    }
}

/// Homomorphisms up to conjugation in the target group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepVariety {
    /// Lexicographically least member of each orbit, orbits in order of their
    /// representatives.
    pub representatives: Vec<Representation>,
    pub orbit_sizes: Vec<usize>,
    orbit_of: HashMap<Representation, usize>,
}

impl RepVariety {
    pub fn orbit_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn hom_count(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn orbit_of(&self, rho: &[usize]) -> Option<usize> {
        self.orbit_of.get(rho).copied()
    }

    pub fn homs(&self) -> impl Iterator<Item = (&Representation, usize)> {
        self.orbit_of.iter().map(|(r, &o)| (r, o))
    }
}

pub fn conjugate_rep(g: &FiniteGroup, by: usize, rho: &[usize]) -> Representation {
    rho.iter().map(|&x| g.conjugate(by, x)).collect()
}

pub fn conj_quotient(homs: &[Representation], g: &FiniteGroup) -> RepVariety {
    let mut orbit_of = HashMap::with_capacity(homs.len());
    let mut representatives = Vec::new();
    let mut orbit_sizes = Vec::new();
    let mut sorted: Vec<&Representation> = homs.iter().collect();
    sorted.sort();
    for rho in sorted {
        if orbit_of.contains_key(rho) {
            continue;
        }
        let id = representatives.len();
        let mut size = 0;
        for h in 0..g.order() {
            let c = conjugate_rep(g, h, rho);
            if orbit_of.insert(c, id).is_none() {
                size += 1;
            }
        }
        representatives.push(rho.clone());
        orbit_sizes.push(size);
    }
    RepVariety {
        representatives,
        orbit_sizes,
        orbit_of,
    }
}

/// Variety of a complex: presentation, enumeration and quotient in one go.
pub fn rep_variety(x: &CellComplex, g: &FiniteGroup) -> Result<(Presentation, RepVariety)> {
    let p = super::presentation::fundamental_presentation(x)?;
    let homs = enumerate_homs(&p, g)?;
    for rho in &homs {
        if p.relators
            .iter()
            .any(|r| evaluate(g, rho, r) != g.identity())
        {
            return Err(Error::Internal(
                "enumerated assignment violates a relator".into(),
            ));
        }
    }
    Ok((p, conj_quotient(&homs, g)))
}

/// Map of varieties `Var(Y) → Var(X)` induced by `f: X → Y`, as orbit indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarietyMap {
    pub images: Vec<usize>,
    pub source_orbits: usize,
    pub target_orbits: usize,
}

impl VarietyMap {
    pub fn is_bijection(&self) -> bool {
        if self.source_orbits != self.target_orbits {
            return false;
        }
        let mut hit = vec![false; self.target_orbits];
        for &i in &self.images {
            if std::mem::replace(&mut hit[i], true) {
                return false;
            }
        }
        true
    }
}

/// Pulls every homomorphism of π₁(Y) back along `f` and checks the result is a
/// homomorphism of π₁(X) whose orbit depends only on the orbit upstairs.
pub fn induced_repvar_map(
    f: &CellularMap,
    x: &CellComplex,
    px: &Presentation,
    vx: &RepVariety,
    py: &Presentation,
    vy: &RepVariety,
    g: &FiniteGroup,
) -> Result<VarietyMap> {
    let words = induced_on_generators(f, px, py, x)?;
    let pull =
        |rho: &[usize]| -> Representation { words.iter().map(|w| evaluate(g, rho, w)).collect() };
    let mut images = Vec::with_capacity(vy.orbit_count());
    for rep in &vy.representatives {
        let img = pull(rep);
        let orbit = vx.orbit_of(&img).ok_or_else(|| {
            Error::Internal("pulled-back representation violates a relator".into())
        })?;
        images.push(orbit);
    }
    for (rho, o) in vy.homs() {
        if vx.orbit_of(&pull(rho)) != Some(images[o]) {
            return Err(Error::Internal(
                "induced map on representation varieties is not conjugation invariant".into(),
            ));
        }
    }
    Ok(VarietyMap {
        images,
        source_orbits: vy.orbit_count(),
        target_orbits: vx.orbit_count(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VarietyLimit {
    /// The maps out of `level` are bijections for `window` consecutive steps.
    Stabilized {
        level: usize,
        window: usize,
        orbits: usize,
        homs: usize,
        caveat: &'static str,
    },
    Undetermined {
        orbit_trajectory: Vec<usize>,
        reason: String,
    },
}

pub const STABILIZATION_CAVEAT: &str =
    "stabilization across a finite window is evidence, not proof, that the limit is reached";

/// `varieties[i]` belongs to level `first_level + i`; `maps[i]` goes from
/// `varieties[i]` to `varieties[i + 1]`. Only the last `window` maps are examined.
pub fn repvar_limit(
    varieties: &[RepVariety],
    maps: &[VarietyMap],
    first_level: usize,
    window: usize,
) -> VarietyLimit {
    let window = window.max(1);
    if maps.len() >= window {
        let start = maps.len() - window;
        if maps[start..].iter().all(VarietyMap::is_bijection) {
            return VarietyLimit::Stabilized {
                level: first_level + start,
                window,
                orbits: varieties[start].orbit_count(),
                homs: varieties[start].hom_count(),
                caveat: STABILIZATION_CAVEAT,
            };
        }
    }
    VarietyLimit::Undetermined {
        orbit_trajectory: varieties.iter().map(RepVariety::orbit_count).collect(),
        reason: format!("the last {window} induced maps are not all bijections"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianCrosscheck {
    pub hom_count: usize,
    /// `∏ |H¹(X; Z/m_i)|` over the invariant factors `m_i` of the group.
    pub cohomology_count: String,
    pub agrees: bool,
}

/// For abelian `G ≅ ⊕ Z/m_i`, `Hom(π₁X, G) ≅ ⊕ H¹(X; Z/m_i)`; compares the
/// enumerated hom count against that product.
pub fn abelian_crosscheck(x: &CellComplex, g: &FiniteGroup) -> Result<AbelianCrosscheck> {
    let inv = g
        .abelian_invariants()
        .ok_or_else(|| Error::Precondition("cross-check needs an abelian group".into()))?;
    let (_, v) = rep_variety(x, g)?;
    let cc = x.cochain_complex()?;
    let mut product = BigInt::from(1);
    for m in inv.torsion() {
        let m: u64 = m
            .try_into()
            .map_err(|_| Error::Internal("group order overflow".into()))?;
        let coh = cohomology(&cc, Coefficients::Modular(m))?;
        let h1 = coh.group(1);
        product *= h1
            .order()
            .ok_or_else(|| Error::Internal("mod-m cohomology is infinite".into()))?;
    }
    Ok(AbelianCrosscheck {
        hom_count: v.hom_count(),
        agrees: product == BigInt::from(v.hom_count()),
        cohomology_count: product.to_string(),
    })
}
