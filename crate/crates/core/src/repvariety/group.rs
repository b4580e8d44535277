use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::homalg::AbelianGroup;

/// Finite group given by its Cayley table; element 0 need not be the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CayleyDocument {
    elements: Vec<String>,
    table: Vec<Vec<String>>,
}

impl FiniteGroup {
    /// Checks closure, associativity, identity and inverses exhaustively.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidGroup("no elements".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name) {
                return Err(Error::InvalidGroup(format!("duplicate element {name:?}")));
            }
        }
        if table.len() != n
            || table
                .iter()
                .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return Err(Error::InvalidGroup(format!(
                "table must be {n}x{n} over the elements"
            )));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "not associative: ({0} {1}) {2} != {0} ({1} {2})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("{} has no inverse", names[a])))?;
            inverses.push(inv);
        }
        Ok(FiniteGroup {
            names,
            table,
            identity,
            inverses,
        })
    }

    /// `{"elements": [...], "table": [[name, ...], ...]}`.
    pub fn from_cayley_json(text: &str) -> Result<Self> {
        let doc: CayleyDocument = serde_json::from_str(text)
            .map_err(|e| Error::InvalidGroup(format!("bad Cayley table document: {e}")))?;
        let index: BTreeMap<&str, usize> = doc
            .elements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut table = Vec::with_capacity(doc.table.len());
        for row in &doc.table {
            let mut r = Vec::with_capacity(row.len());
            for name in row {
                r.push(*index.get(name.as_str()).ok_or_else(|| {
                    Error::InvalidGroup(format!("table entry {name:?} is not an element"))
                })?);
            }
            table.push(r);
        }
        FiniteGroup::from_table(doc.elements.clone(), table)
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1).unwrap()
    }

    /// `Z/k` with elements `0..k`.
    pub fn cyclic(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let names = (0..k).map(|i| i.to_string()).collect();
        let table = (0..k)
            .map(|a| (0..k).map(|b| (a + b) % k).collect())
            .collect();
        FiniteGroup::from_table(names, table)
    }

    /// Symmetries of the regular `n`-gon, order `2n`: `r_i` rotations, `s_i = r^i s`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 1".into()));
        }
        // element (i, f) = r^i s^f, with s r = r^-1 s
        let decode = |x: usize| (x % n, x / n);
        let names = (0..2 * n)
            .map(|x| {
                let (i, f) = decode(x);
                format!("{}{i}", if f == 0 { 'r' } else { 's' })
            })
            .collect();
        let table = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (i, f) = decode(a);
                        let (j, g) = decode(b);
                        let rot = if f == 0 { (i + j) % n } else { (i + n - j) % n };
                        rot + n * ((f + g) % 2)
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(names, table)
    }

    /// Permutations of `1..=n` in lexicographic order, composed right to left.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidGroup(format!(
                "symmetric groups are built in for 1 <= n <= 5, got {n}"
            )));
        }
        let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
        let mut cur: Vec<usize> = (0..n).collect();
        while next_permutation(&mut cur) {
            perms.push(cur.clone());
        }
        let index: BTreeMap<Vec<usize>, usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let names = perms
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect::<String>())
            .collect();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index[&b.iter().map(|&x| a[x]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(names, table)
    }

    /// `cyclic:k`, `dihedral:n` or `sym:n`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidGroup(format!("unknown group {spec:?}")))?;
        let n: usize = arg
            .parse()
            .map_err(|_| Error::InvalidGroup(format!("bad size in {spec:?}")))?;
        match kind {
            "cyclic" => FiniteGroup::cyclic(n),
            "dihedral" => FiniteGroup::dihedral(n),
            "sym" => FiniteGroup::symmetric(n),
            _ => Err(Error::InvalidGroup(format!(
                "unknown group family {kind:?}"
            ))),
        }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `g x g^-1`.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inverses[g])
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    fn power(&self, x: usize, k: u64) -> usize {
        let mut acc = self.identity;
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Invariant factors of an abelian group, read off from the sizes of the
    /// subgroups `{x : x^(p^j) = e}`.
    pub fn abelian_invariants(&self) -> Option<AbelianGroup> {
        if !self.is_abelian() {
            return None;
        }
        let n = self.order() as u64;
        let primes = crate::homalg::group::prime_factors(&BigInt::from(n))?;
        let mut orders = Vec::new();
        for p in primes {
            // counts[j] = |{x : x^(p^j) = e}| = p^(sum_i min(j, e_i))
            let mut counts = vec![1u64];
            let mut pj = 1u64;
            loop {
                pj *= p;
                let c = (0..self.order())
                    .filter(|&x| self.power(x, pj) == self.identity)
                    .count() as u64;
                if c == *counts.last().unwrap() {
                    break;
                }
                counts.push(c);
            }
            // factors with exponent >= j
            let at_least: Vec<u32> = counts.windows(2).map(|w| (w[1] / w[0]).ilog(p)).collect();
            for j in 0..at_least.len() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..at_least[j] - next {
                    orders.push(BigInt::from(p.pow(j as u32 + 1)));
                }
            }
        }
        Some(AbelianGroup::from_cyclic(0, &orders))
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
