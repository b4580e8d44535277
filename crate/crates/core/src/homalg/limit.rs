//! Direct limits of abelian groups along towers and along a single endomorphism.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::group::{prime_factors, subgroup_structure, AbelianGroup, GroupHom};
use super::matrix::{IntegerMatrix, SparseMatrixDoc};
use super::snf::{column_lattice_basis, kernel_basis, solve};
use crate::error::{Error, Result};

/// Rank-one summand `Z[1/p_1...p_k]` (plain `Z` when no primes are inverted).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Localization {
    pub inverted: Vec<u64>,
}

impl fmt::Display for Localization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted.is_empty() {
            return write!(f, "Z");
        }
        let prod = self
            .inverted
            .iter()
            .fold(BigInt::one(), |acc, p| acc * BigInt::from(*p));
        write!(f, "Z[1/{prod}]")
    }
}

/// Limit of `G` under an endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoLimit {
    /// Rank of the eventual image of the free part.
    pub rank: usize,
    /// The endomorphism restricted to that image; invertible over `Q`.
    pub matrix: IntegerMatrix,
    /// Decomposition into rank-one summands, when one was found.
    pub simplified: Option<Vec<Localization>>,
    /// Torsion surviving in the limit.
    pub torsion: AbelianGroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitGroup {
    /// The last `window` maps of a tower were isomorphisms.
    Stabilized {
        group: AbelianGroup,
        level: usize,
        window: usize,
        caveat: String,
    },
    EndoLimit(EndoLimit),
    Undetermined {
        trajectory: Vec<AbelianGroup>,
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Equality {
    Equal,
    Distinct,
    Indeterminate,
}

impl fmt::Display for Equality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equality::Equal => "equal",
            Equality::Distinct => "distinct",
            Equality::Indeterminate => "indeterminate",
        })
    }
}

/// Limit of `groups[0] -> groups[1] -> ...` judged from the last `window` maps.
/// `level` in the result indexes into `groups`.
pub fn direct_limit_sequence(
    groups: &[AbelianGroup],
    maps: &[GroupHom],
    window: usize,
) -> Result<LimitGroup> {
    limit_sequence_by(
        groups,
        maps,
        window,
        GroupHom::is_isomorphism,
        "an isomorphism",
    )
}

/// Same for rational coefficients, where `groups` are the free lattices
/// behind `Q^r`: a map only needs to be invertible over `Q`.
pub fn direct_limit_sequence_rational(
    groups: &[AbelianGroup],
    maps: &[GroupHom],
    window: usize,
) -> Result<LimitGroup> {
    let invertible = |f: &GroupHom| f.free_block().is_invertible_over_q();
    limit_sequence_by(groups, maps, window, invertible, "invertible over Q")
}

fn limit_sequence_by(
    groups: &[AbelianGroup],
    maps: &[GroupHom],
    window: usize,
    iso: impl Fn(&GroupHom) -> bool,
    what: &str,
) -> Result<LimitGroup> {
    if groups.is_empty() || maps.len() + 1 != groups.len() {
        return Err(Error::Precondition(format!(
            "{} maps for {} groups",
            maps.len(),
            groups.len()
        )));
    }
    if window == 0 {
        return Err(Error::Precondition("window must be at least 1".into()));
    }
    for (i, f) in maps.iter().enumerate() {
        if f.source != groups[i] || f.target != groups[i + 1] {
            return Err(Error::Precondition(format!(
                "map {i} does not go from group {i} to group {}",
                i + 1
            )));
        }
    }
    if maps.len() < window {
        return Ok(LimitGroup::Undetermined {
            trajectory: groups.to_vec(),
            reason: format!("{} maps computed, window needs {window}", maps.len()),
        });
    }
    let tail = &maps[maps.len() - window..];
    if let Some(bad) = tail.iter().position(|f| !iso(f)) {
        let idx = maps.len() - window + bad;
        return Ok(LimitGroup::Undetermined {
            trajectory: groups.to_vec(),
            reason: format!("map {idx} -> {} is not {what}", idx + 1),
        });
    }
    Ok(stabilized(
        groups.last().unwrap().clone(),
        groups.len() - 1 - window,
        window,
    ))
}

fn stabilized(group: AbelianGroup, level: usize, window: usize) -> LimitGroup {
    LimitGroup::Stabilized {
        group,
        level,
        window,
        caveat: format!("heuristic stabilization at level {level}, window {window}"),
    }
}

/// Limit of `G -> G -> ...` with every map equal to `e`.
pub fn direct_limit_endomorphism(g: &AbelianGroup, e: &GroupHom) -> Result<LimitGroup> {
    if &e.source != g || &e.target != g {
        return Err(Error::Precondition(
            "map is not an endomorphism of the given group".into(),
        ));
    }
    let r = g.free_rank();
    let m = e.free_block();
    let image = column_lattice_basis(&m.pow(r as u32));
    let rank = image.cols();
    let restricted = solve(&image, &m.mul(&image))
        .ok_or_else(|| Error::Internal("eventual image is not invariant".into()))?;
    let torsion = surviving_torsion(g, e);
    let simplified = simplify(&restricted);
    Ok(LimitGroup::EndoLimit(EndoLimit {
        rank,
        matrix: restricted,
        simplified,
        torsion,
    }))
}

/// Structure of `e^j(T)` once the chain of images stops shrinking.
fn surviving_torsion(g: &AbelianGroup, e: &GroupHom) -> AbelianGroup {
    let r = g.free_rank();
    let n = g.generator_count();
    if n == r {
        return AbelianGroup::trivial();
    }
    let idx: Vec<usize> = (r..n).collect();
    let t = e.matrix().select_rows(&idx).select_cols(&idx);
    let moduli = &g.torsion().to_vec();
    let mut power = IntegerMatrix::identity(idx.len());
    let mut current = subgroup_structure(&power, moduli);
    loop {
        power = t.mul(&power).reduce_rows(moduli);
        let next = subgroup_structure(&power, moduli);
        if next.order() == current.order() {
            return next;
        }
        current = next;
    }
}

fn primes_of(v: &BigInt) -> Option<Vec<u64>> {
    prime_factors(v)
}

/// Rank-one decomposition of the limit of `Z^r` under an invertible-over-`Q` matrix.
fn simplify(m: &IntegerMatrix) -> Option<Vec<Localization>> {
    let r = m.rows();
    if r == 0 {
        return Some(Vec::new());
    }
    let det = m.determinant();
    if det.abs().is_one() {
        return Some(vec![Localization { inverted: vec![] }; r]);
    }
    if let Some(eigen) = integer_eigenvalues(m) {
        let sets: Vec<Vec<u64>> = eigen.iter().map(primes_of).collect::<Option<_>>()?;
        if is_chain(&sets) || z_diagonalizable(m, &eigen) {
            let mut out: Vec<Localization> = sets
                .into_iter()
                .map(|inverted| Localization { inverted })
                .collect();
            out.sort();
            return Some(out);
        }
    }
    // every eigenvalue divisible by every prime of det: the limit is Z[1/S]^r
    let s = primes_of(&det)?;
    if s.iter().all(|&p| {
        m.pow(r as u32)
            .reduce_rows(&vec![BigInt::from(p); r])
            .is_zero()
    }) {
        return Some(vec![Localization { inverted: s }; r]);
    }
    None
}

/// Prime sets totally ordered by inclusion: a triangular form with the larger
/// sets first splits, since the quotient pieces are uniquely divisible by the
/// primes of the sub pieces.
fn is_chain(sets: &[Vec<u64>]) -> bool {
    let sets: Vec<BTreeSet<u64>> = sets.iter().map(|s| s.iter().copied().collect()).collect();
    sets.iter()
        .all(|a| sets.iter().all(|b| a.is_subset(b) || b.is_subset(a)))
}

fn z_diagonalizable(m: &IntegerMatrix, eigen: &[BigInt]) -> bool {
    let r = m.rows();
    let distinct: BTreeSet<&BigInt> = eigen.iter().collect();
    let mut cols = Vec::new();
    for l in distinct {
        let shifted = m.sub(&IntegerMatrix::identity(r).scale(l));
        let k = kernel_basis(&shifted);
        for j in 0..k.cols() {
            cols.push(k.column(j));
        }
    }
    cols.len() == r
        && IntegerMatrix::from_columns(r, &cols)
            .determinant()
            .abs()
            .is_one()
}

/// Characteristic polynomial coefficients `c_0..c_n` (`c_n = 1`), Faddeev-LeVerrier.
pub fn characteristic_polynomial(a: &IntegerMatrix) -> Vec<BigInt> {
    let n = a.rows();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk = IntegerMatrix::zeros(n, n);
    for k in 1..=n {
        mk = a
            .mul(&mk)
            .add(&IntegerMatrix::identity(n).scale(&c[n - k + 1]));
        let am = a.mul(&mk);
        let tr: BigInt = (0..n).map(|i| am.get(i, i)).sum();
        c[n - k] = -tr / BigInt::from(k);
    }
    c
}

const MAX_DIVISORS: usize = 100_000;

/// All eigenvalues with multiplicity, if they are all integers.
fn integer_eigenvalues(a: &IntegerMatrix) -> Option<Vec<BigInt>> {
    let mut poly = characteristic_polynomial(a);
    let c0 = poly[0].abs().to_u64()?;
    if c0 == 0 {
        return None;
    }
    let divisors = divisors(c0)?;
    let mut roots = Vec::new();
    for d in divisors {
        for cand in [BigInt::from(d), -BigInt::from(d)] {
            while poly.len() > 1 {
                match divide_linear(&poly, &cand) {
                    Some(q) => {
                        roots.push(cand.clone());
                        poly = q;
                    }
                    None => break,
                }
            }
        }
    }
    (poly.len() == 1).then_some(roots)
}

/// Quotient by `(x - root)` when it divides exactly.
fn divide_linear(poly: &[BigInt], root: &BigInt) -> Option<Vec<BigInt>> {
    let n = poly.len() - 1;
    let mut q = vec![BigInt::zero(); n];
    let mut carry = BigInt::zero();
    for k in (0..=n).rev() {
        let v = &poly[k] + &carry * root;
        if k == 0 {
            return v.is_zero().then_some(q);
        }
        q[k - 1] = v.clone();
        carry = v;
    }
    unreachable!()
}

fn divisors(n: u64) -> Option<Vec<u64>> {
    let primes = prime_factors(&BigInt::from(n))?;
    let mut out = vec![1u64];
    let mut rest = n;
    for p in primes {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        let mut next = Vec::with_capacity(out.len() * (e + 1));
        for &d in &out {
            let mut x = d;
            for _ in 0..=e {
                next.push(x);
                x = x.saturating_mul(p);
            }
        }
        out = next;
        if out.len() > MAX_DIVISORS {
            return None;
        }
    }
    out.sort_unstable();
    Some(out)
}

/// Canonical decomposition: plain `Z` count, localized summands, torsion.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Canonical {
    summands: Vec<Localization>,
    torsion: AbelianGroup,
}

impl LimitGroup {
    fn canonical(&self) -> Option<Canonical> {
        match self {
            LimitGroup::Stabilized { group, .. } => Some(Canonical {
                summands: vec![Localization { inverted: vec![] }; group.free_rank()],
                torsion: AbelianGroup::from_cyclic(0, group.torsion()),
            }),
            LimitGroup::EndoLimit(e) => e.simplified.as_ref().map(|s| {
                let mut summands = s.clone();
                summands.sort();
                Canonical {
                    summands,
                    torsion: e.torsion.clone(),
                }
            }),
            LimitGroup::Undetermined { .. } => None,
        }
    }

    /// Dimension over `Q`.
    pub fn rational_rank(&self) -> Option<usize> {
        match self {
            LimitGroup::Stabilized { group, .. } => Some(group.free_rank()),
            LimitGroup::EndoLimit(e) => Some(e.rank),
            LimitGroup::Undetermined { .. } => None,
        }
    }

    fn torsion(&self) -> Option<&AbelianGroup> {
        match self {
            LimitGroup::Stabilized { group, .. } => Some(group),
            LimitGroup::EndoLimit(e) => Some(&e.torsion),
            LimitGroup::Undetermined { .. } => None,
        }
    }

    /// `dim_{F_p}` of `F / pF` for the torsion-free part `F`.
    fn free_mod_p(&self, p: u64) -> Option<usize> {
        match self {
            LimitGroup::Stabilized { group, .. } => Some(group.free_rank()),
            LimitGroup::EndoLimit(e) => {
                if e.rank == 0 {
                    return Some(0);
                }
                Some(e.matrix.pow(e.rank as u32).rank_mod_prime(p))
            }
            LimitGroup::Undetermined { .. } => None,
        }
    }

    pub fn caveat(&self) -> Option<&str> {
        match self {
            LimitGroup::Stabilized { caveat, .. } => Some(caveat),
            LimitGroup::Undetermined { reason, .. } => Some(reason),
            LimitGroup::EndoLimit(_) => None,
        }
    }

    /// Renumbers a tower limit whose first group sits at level `first`.
    pub fn with_first_level(self, first: usize) -> LimitGroup {
        match self {
            LimitGroup::Stabilized {
                group,
                level,
                window,
                ..
            } => stabilized(group, level + first, window),
            other => other,
        }
    }

    pub fn is_determined(&self) -> bool {
        !matches!(self, LimitGroup::Undetermined { .. })
    }
}

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Sound but incomplete isomorphism test.
pub fn group_equal(a: &LimitGroup, b: &LimitGroup) -> Equality {
    if !a.is_determined() || !b.is_determined() {
        return Equality::Indeterminate;
    }
    if let (Some(ca), Some(cb)) = (a.canonical(), b.canonical()) {
        // completely decomposable groups are classified by their rank-one types
        return if ca == cb {
            Equality::Equal
        } else {
            Equality::Distinct
        };
    }
    if a.rational_rank() != b.rational_rank() {
        return Equality::Distinct;
    }
    let ta = a.torsion().map(|t| t.torsion().to_vec());
    let tb = b.torsion().map(|t| t.torsion().to_vec());
    if ta != tb {
        return Equality::Distinct;
    }
    for p in SMALL_PRIMES {
        if a.free_mod_p(p) != b.free_mod_p(p) {
            return Equality::Distinct;
        }
    }
    if let (LimitGroup::EndoLimit(x), LimitGroup::EndoLimit(y)) = (a, b) {
        if x.matrix == y.matrix {
            return Equality::Equal;
        }
    }
    Equality::Indeterminate
}

impl fmt::Display for LimitGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitGroup::Stabilized { group, .. } => write!(f, "{group}"),
            LimitGroup::EndoLimit(e) => {
                let mut parts = Vec::new();
                match &e.simplified {
                    Some(s) => {
                        let plain = s.iter().filter(|l| l.inverted.is_empty()).count();
                        match plain {
                            0 => {}
                            1 => parts.push("Z".to_string()),
                            k => parts.push(format!("Z^{k}")),
                        }
                        parts.extend(
                            s.iter()
                                .filter(|l| !l.inverted.is_empty())
                                .map(|l| l.to_string()),
                        );
                    }
                    None => parts.push(format!("limit of Z^{} under M = {}", e.rank, e.matrix)),
                }
                parts.extend(e.torsion.torsion().iter().map(|d| format!("Z/{d}")));
                if parts.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", parts.join(" ⊕ "))
                }
            }
            LimitGroup::Undetermined { trajectory, .. } => {
                let t: Vec<String> = trajectory.iter().map(|g| g.to_string()).collect();
                write!(f, "undetermined ({})", t.join(" -> "))
            }
        }
    }
}

impl Serialize for LimitGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("display", &self.to_string())?;
        match self {
            LimitGroup::Stabilized {
                group,
                level,
                window,
                caveat,
            } => {
                map.serialize_entry("kind", "stabilized")?;
                map.serialize_entry("group", group)?;
                map.serialize_entry("level", level)?;
                map.serialize_entry("window", window)?;
                map.serialize_entry("caveat", caveat)?;
            }
            LimitGroup::EndoLimit(e) => {
                map.serialize_entry("kind", "endo_limit")?;
                map.serialize_entry("rank", &e.rank)?;
                map.serialize_entry("matrix", &SparseMatrixDoc::from(&e.matrix))?;
                map.serialize_entry("simplified", &e.simplified)?;
                map.serialize_entry("torsion", &e.torsion)?;
            }
            LimitGroup::Undetermined { trajectory, reason } => {
                map.serialize_entry("kind", "undetermined")?;
                map.serialize_entry("trajectory", trajectory)?;
                map.serialize_entry("reason", reason)?;
            }
        }
        map.end()
    }
}
