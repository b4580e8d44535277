use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::matrix::IntegerMatrix;
use super::snf::{invariant_factors, snf_with, Transforms};

/// Finitely generated abelian group `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`
/// with `2 <= d_1 | d_2 | ... | d_k`.
///
/// Generators are ordered free first, then torsion in invariant-factor order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        AbelianGroup::free(0)
    }

    /// Canonical form of `Z^free_rank ⊕ ⊕ Z/orders[i]`; orders 0 count as free,
    /// orders 1 vanish.
    pub fn from_cyclic(free_rank: usize, orders: &[BigInt]) -> Self {
        let mut free = free_rank;
        let mut cyclic = Vec::new();
        for o in orders {
            let o = o.abs();
            if o.is_zero() {
                free += 1;
            } else if !o.is_one() {
                cyclic.push(o);
            }
        }
        let torsion = if cyclic.is_empty() {
            Vec::new()
        } else {
            let n = cyclic.len();
            let m = IntegerMatrix::from_triplets(
                n,
                n,
                cyclic.into_iter().enumerate().map(|(i, o)| (i, i, o)),
            );
            invariant_factors(&m)
                .into_iter()
                .filter(|d| !d.is_one())
                .collect()
        };
        AbelianGroup {
            free_rank: free,
            torsion,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Order of generator `i` (0 for free generators).
    pub fn generator_order(&self, i: usize) -> BigInt {
        if i < self.free_rank {
            BigInt::zero()
        } else {
            self.torsion[i - self.free_rank].clone()
        }
    }

    pub fn generator_orders(&self) -> Vec<BigInt> {
        (0..self.generator_count())
            .map(|i| self.generator_order(i))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of a finite group.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    /// Number of invariant factors divisible by `p`.
    pub fn torsion_divisible_by(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|d| d.is_multiple_of(&p)).count()
    }

    /// `Hom(self, Z/m)` has order `m^free * prod gcd(d_i, m)`.
    pub fn hom_count_to_cyclic(&self, m: u64) -> BigInt {
        let m = BigInt::from(m);
        let mut n = num_traits::pow(m.clone(), self.free_rank);
        for d in &self.torsion {
            n *= d.gcd(&m);
        }
        n
    }

    /// `self ⊗ Z/m`.
    pub fn tensor_cyclic(&self, m: u64) -> AbelianGroup {
        let m = BigInt::from(m);
        let mut orders = vec![m.clone(); self.free_rank];
        orders.extend(self.torsion.iter().map(|d| d.gcd(&m)));
        AbelianGroup::from_cyclic(0, &orders)
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        AbelianGroup::from_cyclic(self.free_rank + other.free_rank, &orders)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AbelianGroup", 3)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        let torsion: Vec<String> = self.torsion.iter().map(|d| d.to_string()).collect();
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("display", &self.to_string())?;
        st.end()
    }
}

/// Homomorphism given by its matrix on canonical generators
/// (column `j` = image of source generator `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub source: AbelianGroup,
    pub target: AbelianGroup,
    matrix: IntegerMatrix,
}

impl GroupHom {
    /// Entries in torsion rows are reduced into `[0, d)`. Fails if some source
    /// relation does not map into the target relations.
    pub fn new(
        source: AbelianGroup,
        target: AbelianGroup,
        matrix: IntegerMatrix,
    ) -> Result<Self, String> {
        if matrix.rows() != target.generator_count() || matrix.cols() != source.generator_count() {
            return Err(format!(
                "matrix is {}x{}, groups need {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generator_count(),
                source.generator_count()
            ));
        }
        let matrix = matrix.reduce_rows(&target.generator_orders());
        for j in source.free_rank()..source.generator_count() {
            let d = source.generator_order(j);
            for i in 0..target.generator_count() {
                let img = matrix.get(i, j) * &d;
                let o = target.generator_order(i);
                let ok = if o.is_zero() {
                    img.is_zero()
                } else {
                    img.is_multiple_of(&o)
                };
                if !ok {
                    return Err(format!(
                        "torsion generator {j} of order {d} does not map to an element of order dividing {d}"
                    ));
                }
            }
        }
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(g: &AbelianGroup) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            matrix: IntegerMatrix::identity(g.generator_count()),
        }
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom, String> {
        if other.target != self.source {
            return Err("composition of non-composable maps".into());
        }
        GroupHom::new(
            other.source.clone(),
            self.target.clone(),
            self.matrix.mul(&other.matrix),
        )
    }

    /// Block of the matrix on free generators.
    pub fn free_block(&self) -> IntegerMatrix {
        let rows: Vec<usize> = (0..self.target.free_rank()).collect();
        let cols: Vec<usize> = (0..self.source.free_rank()).collect();
        self.matrix.select_rows(&rows).select_cols(&cols)
    }

    /// Surjective iff the image together with the target relations spans the
    /// generator lattice.
    pub fn is_surjective(&self) -> bool {
        let t = &self.target;
        let n = t.generator_count();
        let rel = IntegerMatrix::from_triplets(n, n, (0..n).map(|i| (i, i, t.generator_order(i))));
        let stacked = self.matrix.hstack(&rel);
        let f = snf_with(&stacked, Transforms::NONE).diagonal;
        f.len() == n && f.iter().all(One::is_one)
    }

    /// Isomorphism test: isomorphic groups plus surjectivity suffice because
    /// finitely generated abelian groups are Hopfian.
    pub fn is_isomorphism(&self) -> bool {
        self.source == self.target && self.is_surjective()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.matrix == IntegerMatrix::identity(self.source.generator_count())
    }
}

/// Structure of the subgroup of `⊕ Z/moduli[i]` generated by the columns of `gens`.
pub fn subgroup_structure(gens: &IntegerMatrix, moduli: &[BigInt]) -> AbelianGroup {
    let n = moduli.len();
    if n == 0 {
        return AbelianGroup::trivial();
    }
    let rel = IntegerMatrix::from_triplets(
        n,
        n,
        moduli.iter().cloned().enumerate().map(|(i, d)| (i, i, d)),
    );
    // H = span(gens) + D; subgroup = H / D
    let basis = super::snf::column_lattice_basis(&gens.hstack(&rel));
    let coords = super::snf::solve(&basis, &rel).expect("relations lie in the span");
    let factors = invariant_factors(&coords);
    AbelianGroup::from_cyclic(0, &factors)
}

/// Primes dividing `n` by trial division; `None` when `n` does not fit in `u64`.
pub fn prime_factors(n: &BigInt) -> Option<Vec<u64>> {
    let mut n = n.abs().to_u64()?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    Some(out)
}

/// Multiset of prime powers of a finite group, keyed by prime.
pub fn primary_decomposition(g: &AbelianGroup) -> BTreeMap<u64, Vec<u32>> {
    let mut out: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for d in g.torsion() {
        let Some(primes) = prime_factors(d) else {
            continue;
        };
        let mut rest = d.clone();
        for p in primes {
            let bp = BigInt::from(p);
            let mut e = 0;
            while rest.is_multiple_of(&bp) {
                rest /= &bp;
                e += 1;
            }
            out.entry(p).or_default().push(e);
        }
    }
    for v in out.values_mut() {
        v.sort_unstable();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn canonical_forms() {
        let g = AbelianGroup::from_cyclic(1, &[b(2), b(3), b(1), b(4)]);
        assert_eq!(g.torsion(), [b(2), b(12)]);
        assert_eq!(g.to_string(), "Z ⊕ Z/2 ⊕ Z/12");
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
        assert_eq!(AbelianGroup::free(2).to_string(), "Z^2");
        assert_eq!(
            AbelianGroup::from_cyclic(0, &[b(2), b(4)]).to_string(),
            "Z/2 ⊕ Z/4"
        );
    }

    #[test]
    fn hom_and_tensor_counts() {
        let g = AbelianGroup::from_cyclic(1, &[b(2)]);
        assert_eq!(g.hom_count_to_cyclic(3), b(3));
        assert_eq!(g.hom_count_to_cyclic(4), b(8));
        assert_eq!(g.tensor_cyclic(2).order(), Some(b(4)));
    }

    #[test]
    fn isomorphism_checks() {
        let z2 = AbelianGroup::free(2);
        let fib = GroupHom::new(
            z2.clone(),
            z2.clone(),
            IntegerMatrix::from_rows(&[vec![1, 1], vec![1, 0]]),
        )
        .unwrap();
        assert!(fib.is_isomorphism());
        let double = GroupHom::new(
            AbelianGroup::free(1),
            AbelianGroup::free(1),
            IntegerMatrix::from_rows(&[vec![2]]),
        )
        .unwrap();
        assert!(!double.is_isomorphism());
        let z4 = AbelianGroup::from_cyclic(0, &[b(4)]);
        let three =
            GroupHom::new(z4.clone(), z4.clone(), IntegerMatrix::from_rows(&[vec![3]])).unwrap();
        assert!(three.is_isomorphism());
        let bad = GroupHom::new(
            z4.clone(),
            AbelianGroup::free(1),
            IntegerMatrix::from_rows(&[vec![1]]),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn subgroups() {
        // <2> in Z/4 is Z/2
        let s = subgroup_structure(&IntegerMatrix::from_rows(&[vec![2]]), &[b(4)]);
        assert_eq!(s, AbelianGroup::from_cyclic(0, &[b(2)]));
        let s = subgroup_structure(
            &IntegerMatrix::from_rows(&[vec![1, 0], vec![0, 0]]),
            &[b(2), b(6)],
        );
        assert_eq!(s.order(), Some(b(2)));
        assert_eq!(prime_factors(&b(360)), Some(vec![2, 3, 5]));
    }
}
