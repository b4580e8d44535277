//! Pattern-equivariant cochains: descending local rules to an approximant and
//! pulling approximant cochains back to finite patches.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::approximant::{faces, mask_dim, masks, ApproximantComplex};
use crate::error::{Error, Result};
use crate::patch::{Patch, Pos};

/// Integer cochain on an approximant, indexed by cell id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub level: usize,
    pub degree: usize,
    pub values: Vec<BigInt>,
}

impl Cochain {
    /// `δ c`, evaluated on `(degree + 1)`-cells.
    pub fn coboundary(&self, ac: &ApproximantComplex) -> Cochain {
        let k = self.degree + 1;
        let values = if k > ac.dimension() {
            Vec::new()
        } else {
            ac.complex().cells[k]
                .iter()
                .map(|c| {
                    c.boundary
                        .iter()
                        .map(|&(f, s)| &self.values[f] * BigInt::from(s))
                        .sum()
                })
                .collect()
        };
        Cochain {
            level: self.level,
            degree: k,
            values,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

/// Cochain taking `assignment[label]` on each `degree`-cell. Fails listing
/// every cell whose label is not assigned.
pub fn descend_cochain(
    ac: &ApproximantComplex,
    degree: usize,
    assignment: &BTreeMap<String, BigInt>,
) -> Result<Cochain> {
    descend_cochain_with(ac, degree, |label, _| assignment.get(label).cloned())
}

/// Cochain whose value on a cell is `rule(label, context)`.
pub fn descend_cochain_with(
    ac: &ApproximantComplex,
    degree: usize,
    mut rule: impl FnMut(&str, Option<&Patch>) -> Option<BigInt>,
) -> Result<Cochain> {
    if degree > ac.dimension() {
        return Err(Error::Precondition(format!(
            "degree {degree} exceeds the dimension {}",
            ac.dimension()
        )));
    }
    let mut values = Vec::with_capacity(ac.count(degree));
    let mut missing = Vec::new();
    for id in 0..ac.count(degree) {
        let ctx = ac.context(degree, id);
        let label = ac.label(degree, id);
        match rule(label, ctx.as_ref()) {
            Some(v) => values.push(v),
            None => {
                missing.push(label.to_string());
                values.push(BigInt::zero());
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingAssignment { cells: missing });
    }
    Ok(Cochain {
        level: ac.level(),
        degree,
        values,
    })
}

/// A cochain on the cells of a finite patch; `None` marks cells whose context
/// the patch does not determine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchCochain {
    pub degree: usize,
    pub values: BTreeMap<(Pos, u8), Option<BigInt>>,
}

impl PatchCochain {
    pub fn determined(&self) -> impl Iterator<Item = ((Pos, u8), &BigInt)> + '_ {
        self.values
            .iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (*k, v)))
    }

    pub fn undetermined_count(&self) -> usize {
        self.values.values().filter(|v| v.is_none()).count()
    }
}

/// Every `degree`-cell in the closure of the host's tiles.
fn patch_cells(host: &Patch, degree: usize) -> BTreeSet<(Pos, u8)> {
    let d = host.dimension();
    let mut out = BTreeSet::new();
    for p in host.positions() {
        for mask in masks(d) {
            if mask_dim(mask) != degree {
                continue;
            }
            let ys: &[i64] = if d == 2 && mask & 2 == 0 {
                &[0, 1]
            } else {
                &[0]
            };
            let xs: &[i64] = if mask & 1 == 0 { &[0, 1] } else { &[0] };
            for &y in ys {
                for &x in xs {
                    out.insert(([p[0] + x, p[1] + y], mask));
                }
            }
        }
    }
    out
}

/// Evaluate the cochain on every cell of the host through the cell's context.
pub fn pullback_cochain(
    cochain: &Cochain,
    ac: &ApproximantComplex,
    host: &Patch,
) -> Result<PatchCochain> {
    if cochain.level != ac.level() || cochain.values.len() != ac.count(cochain.degree) {
        return Err(Error::Precondition(
            "cochain does not live on this approximant".into(),
        ));
    }
    if host.dimension() != ac.dimension() {
        return Err(Error::Precondition(
            "patch and rule dimensions differ".into(),
        ));
    }
    let mut values = BTreeMap::new();
    for (q, mask) in patch_cells(host, cochain.degree) {
        let v = ac
            .cell_in_patch(host, q, mask)?
            .map(|id| cochain.values[id].clone());
        values.insert((q, mask), v);
    }
    Ok(PatchCochain {
        degree: cochain.degree,
        values,
    })
}

/// Coboundary on the patch, defined where every face value is.
pub fn patch_coboundary(c: &PatchCochain, host: &Patch) -> PatchCochain {
    let mut values = BTreeMap::new();
    for (q, mask) in patch_cells(host, c.degree + 1) {
        let v = faces(q, mask)
            .into_iter()
            .map(|(f, m, s)| {
                c.values
                    .get(&(f, m))
                    .cloned()
                    .flatten()
                    .map(|v| v * BigInt::from(s))
            })
            .sum::<Option<BigInt>>();
        values.insert((q, mask), v);
    }
    PatchCochain {
        degree: c.degree + 1,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximant::build_approximant;
    use crate::substitution::parse_rule;

    #[test]
    fn letter_indicator() {
        let r =
            parse_rule(r#"{"dimension":1,"tiles":["a","b"],"rule":{"a":"ab","b":"a"}}"#).unwrap();
        let g = build_approximant(&r, 1).unwrap();
        let c = descend_cochain_with(&g, 1, |_, ctx| {
            Some(BigInt::from((ctx?.get([0, 0])? == 0) as i32))
        })
        .unwrap();
        let v: Vec<i32> = c.values.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(v, [1, 1, 1, 0]);
        let mut partial = BTreeMap::new();
        partial.insert("a[a]b".to_string(), BigInt::from(1));
        let err = descend_cochain(&g, 1, &partial).unwrap_err();
        assert!(matches!(err, Error::MissingAssignment { cells } if cells.len() == 3));
    }
}
