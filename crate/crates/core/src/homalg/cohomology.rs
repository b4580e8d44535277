//! Cohomology of finite cochain complexes of free abelian groups.
//!
//! Every degree is computed as a lattice quotient `L / I` inside `Z^n`, where
//! `L` holds the cochains whose coboundary vanishes (mod `m` for `Z/m`
//! coefficients) and `I` the coboundaries (plus `m Z^n`). Keeping `L` and the
//! change of basis around gives canonical generators and a coordinate map,
//! which is all that induced maps need.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::group::{AbelianGroup, GroupHom};
use super::matrix::IntegerMatrix;
use super::snf::{column_lattice_basis, kernel_basis, snf_with, LatticeSolver, Transforms};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Integer,
    /// `Z/m`, `m >= 2`.
    Modular(u64),
    Rational,
}

impl Coefficients {
    fn modulus(self) -> u64 {
        match self {
            Coefficients::Modular(m) => m,
            _ => 0,
        }
    }
}

impl FromStr for Coefficients {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "int" | "Z" => Ok(Coefficients::Integer),
            "rat" | "Q" => Ok(Coefficients::Rational),
            _ => {
                let Some(k) = s.strip_prefix("mod:") else {
                    return Err(format!(
                        "unknown coefficients {s:?}; expected int, mod:k or rat"
                    ));
                };
                match k.parse::<u64>() {
                    Ok(m) if m >= 2 => Ok(Coefficients::Modular(m)),
                    _ => Err(format!("modulus in {s:?} must be an integer >= 2")),
                }
            }
        }
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integer => write!(f, "Z"),
            Coefficients::Modular(m) => write!(f, "Z/{m}"),
            Coefficients::Rational => write!(f, "Q"),
        }
    }
}

impl Serialize for Coefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `0 -> C^0 -> C^1 -> ... -> C^top -> 0` with `C^k = Z^counts[k]`.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    counts: Vec<usize>,
    coboundaries: Vec<IntegerMatrix>,
}

impl CochainComplex {
    /// `coboundaries[k]` is `δ_k : C^k -> C^{k+1}` (`counts[k+1] x counts[k]`).
    /// Fails with `NotAComplex` if some `δ_{k+1} δ_k` is nonzero.
    pub fn new(counts: Vec<usize>, coboundaries: Vec<IntegerMatrix>) -> Result<Self> {
        if counts.is_empty() || coboundaries.len() + 1 != counts.len() {
            return Err(Error::Precondition(format!(
                "{} coboundary matrices for {} degrees",
                coboundaries.len(),
                counts.len()
            )));
        }
        for (k, d) in coboundaries.iter().enumerate() {
            if d.cols() != counts[k] || d.rows() != counts[k + 1] {
                return Err(Error::Precondition(format!(
                    "coboundary in degree {k} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    counts[k + 1],
                    counts[k]
                )));
            }
        }
        for k in 1..coboundaries.len() {
            if !coboundaries[k].mul(&coboundaries[k - 1]).is_zero() {
                return Err(Error::NotAComplex { degree: k - 1 });
            }
        }
        Ok(CochainComplex {
            counts,
            coboundaries,
        })
    }

    /// From cellular boundary maps: `boundaries[k] = ∂_{k+1} : C_{k+1} -> C_k`.
    pub fn from_boundaries(counts: Vec<usize>, boundaries: &[IntegerMatrix]) -> Result<Self> {
        let cob = boundaries.iter().map(IntegerMatrix::transpose).collect();
        CochainComplex::new(counts, cob)
    }

    pub fn top_degree(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts[k]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn coboundary(&self, k: usize) -> Option<&IntegerMatrix> {
        self.coboundaries.get(k)
    }
}

/// One degree of a cohomology computation.
#[derive(Clone, Debug)]
pub struct DegreeCohomology {
    pub degree: usize,
    /// Over `Q` this records `Z^r` for `Q^r`.
    pub group: AbelianGroup,
    /// Cocycle representatives of the canonical generators, as columns.
    generators: IntegerMatrix,
    cocycles: LatticeSolver,
    /// Rows of the quotient change of basis that give generator coordinates.
    coordinate_rows: IntegerMatrix,
    modulus: u64,
    /// Integer-coefficient group before tensoring, kept for `Q`.
    integral: Option<AbelianGroup>,
}

impl DegreeCohomology {
    pub fn generators(&self) -> &IntegerMatrix {
        &self.generators
    }

    /// Coordinates of the class of a cocycle on the canonical generators,
    /// reduced modulo generator orders. `None` if `x` is not a cocycle.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let y = self.cocycles.solve_vec(x)?;
        let c = self.coordinate_rows.mul_vec(&y);
        Some(
            c.into_iter()
                .enumerate()
                .map(|(i, v)| {
                    let o = self.group.generator_order(i);
                    if o.is_zero() {
                        v
                    } else {
                        num_integer::Integer::mod_floor(&v, &o)
                    }
                })
                .collect(),
        )
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyResult {
    pub coefficients: Coefficients,
    degrees: Vec<DegreeCohomology>,
}

impl CohomologyResult {
    pub fn degree(&self, k: usize) -> &DegreeCohomology {
        &self.degrees[k]
    }

    pub fn degrees(&self) -> &[DegreeCohomology] {
        &self.degrees
    }

    pub fn group(&self, k: usize) -> &AbelianGroup {
        &self.degrees[k].group
    }

    pub fn groups(&self) -> Vec<AbelianGroup> {
        self.degrees.iter().map(|d| d.group.clone()).collect()
    }

    /// Human-readable group in degree `k` (`Q^r` over the rationals).
    pub fn describe(&self, k: usize) -> String {
        describe_group(self.coefficients, &self.degrees[k].group)
    }

    /// The integral group behind a rational result.
    pub fn integral_group(&self, k: usize) -> Option<&AbelianGroup> {
        self.degrees[k].integral.as_ref()
    }
}

pub fn describe_group(coeff: Coefficients, g: &AbelianGroup) -> String {
    match coeff {
        Coefficients::Rational => match g.free_rank() {
            0 => "0".into(),
            1 => "Q".into(),
            r => format!("Q^{r}"),
        },
        _ => g.to_string(),
    }
}

pub fn cohomology(complex: &CochainComplex, coeff: Coefficients) -> Result<CohomologyResult> {
    let m = coeff.modulus();
    let mut degrees = Vec::with_capacity(complex.counts.len());
    for k in 0..complex.counts.len() {
        let mut d = degree_cohomology(complex, k, m);
        if coeff == Coefficients::Rational {
            let free = AbelianGroup::free(d.group.free_rank());
            let keep: Vec<usize> = (0..free.free_rank()).collect();
            d.generators = d.generators.select_cols(&keep);
            d.coordinate_rows = d.coordinate_rows.select_rows(&keep);
            d.integral = Some(std::mem::replace(&mut d.group, free));
        }
        degrees.push(d);
    }
    Ok(CohomologyResult {
        coefficients: coeff,
        degrees,
    })
}

/// `{x : δ x ≡ 0 mod m}` as a column basis (`m = 0` for the integers).
fn cocycle_lattice(complex: &CochainComplex, k: usize, m: u64) -> IntegerMatrix {
    let n = complex.counts[k];
    let Some(delta) = complex.coboundaries.get(k) else {
        return IntegerMatrix::identity(n);
    };
    if m == 0 {
        return kernel_basis(delta);
    }
    let rows = delta.rows();
    let scaled = IntegerMatrix::identity(rows).scale(&BigInt::from(m));
    let kernel = kernel_basis(&delta.hstack(&scaled));
    let keep: Vec<usize> = (0..n).collect();
    column_lattice_basis(&kernel.select_rows(&keep))
}

/// Coboundaries in degree `k`, plus `m Z^n`.
fn coboundary_generators(complex: &CochainComplex, k: usize, m: u64) -> IntegerMatrix {
    let n = complex.counts[k];
    let mut gens = if k == 0 {
        IntegerMatrix::zeros(n, 0)
    } else {
        complex.coboundaries[k - 1].clone()
    };
    if m != 0 {
        gens = gens.hstack(&IntegerMatrix::identity(n).scale(&BigInt::from(m)));
    }
    gens
}

fn degree_cohomology(complex: &CochainComplex, k: usize, m: u64) -> DegreeCohomology {
    let n = complex.counts[k];
    let basis = cocycle_lattice(complex, k, m);
    let z = basis.cols();
    let cocycles = LatticeSolver::new(&basis);
    let image = coboundary_generators(complex, k, m);
    let in_basis: Vec<Vec<BigInt>> = (0..image.cols())
        .map(|j| {
            cocycles
                .solve_vec(&image.column(j))
                .expect("coboundaries are cocycles")
        })
        .collect();
    let a = IntegerMatrix::from_columns(z, &in_basis);
    // U A V = D: the quotient Z^z / im A has basis U^-1 e_i with order d_i
    let parts = snf_with(
        &a,
        Transforms {
            u: true,
            u_inv: true,
            v: false,
            v_inv: false,
        },
    );
    let u = IntegerMatrix::from_sparse_rows(z, z, parts.u.unwrap());
    let u_inv = IntegerMatrix::from_sparse_rows(z, z, parts.u_inv_t.unwrap()).transpose();
    let mut torsion_idx = Vec::new();
    let mut orders = Vec::new();
    for (i, d) in parts.diagonal.iter().enumerate() {
        if !d.is_one() {
            torsion_idx.push(i);
            orders.push(d.clone());
        }
    }
    let free_idx: Vec<usize> = (parts.diagonal.len()..z).collect();
    // canonical order: free generators first, torsion in divisibility order
    let order: Vec<usize> = free_idx.iter().chain(&torsion_idx).copied().collect();
    let group = AbelianGroup::from_cyclic(free_idx.len(), &orders);
    debug_assert_eq!(group.generator_count(), order.len());
    let generators = basis.mul(&u_inv.select_cols(&order));
    let coordinate_rows = u.select_rows(&order);
    debug_assert_eq!(generators.rows(), n);
    DegreeCohomology {
        degree: k,
        group,
        generators,
        cocycles,
        coordinate_rows,
        modulus: m,
        integral: None,
    }
}

/// Map `H^k(Y) -> H^k(X)` induced by a chain map `X -> Y` whose degree-`k`
/// matrix is `chain` (rows: cells of `Y`, columns: cells of `X`).
pub fn induced_map(
    chain: &IntegerMatrix,
    source: &CohomologyResult,
    target: &CohomologyResult,
    k: usize,
) -> Result<GroupHom> {
    if source.coefficients != target.coefficients {
        return Err(Error::Precondition(
            "cohomologies use different coefficients".into(),
        ));
    }
    let (Some(hx), Some(hy)) = (source.degrees.get(k), target.degrees.get(k)) else {
        return Err(Error::Precondition(format!("degree {k} out of range")));
    };
    if chain.rows() != hy.generators.rows() || chain.cols() != hx.generators.rows() {
        return Err(Error::Precondition(format!(
            "chain map in degree {k} is {}x{} but the complexes have {} and {} cells",
            chain.rows(),
            chain.cols(),
            hy.generators.rows(),
            hx.generators.rows()
        )));
    }
    let pulled = chain.transpose().mul(&hy.generators);
    let mut cols = Vec::with_capacity(pulled.cols());
    for j in 0..pulled.cols() {
        let c = hx.coordinates(&pulled.column(j)).ok_or_else(|| {
            Error::Precondition(format!(
                "pullback of generator {j} in degree {k} is not a cocycle; not a chain map"
            ))
        })?;
        cols.push(c);
    }
    let matrix = IntegerMatrix::from_columns(hx.group.generator_count(), &cols);
    GroupHom::new(hy.group.clone(), hx.group.clone(), matrix).map_err(Error::Internal)
}
