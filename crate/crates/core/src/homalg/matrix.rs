use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Sorted `(index, value)` pairs with nonzero values.
pub(crate) type SparseVec = Vec<(usize, BigInt)>;

/// `a + c * b` for sparse vectors.
pub(crate) fn axpy(a: &SparseVec, c: &BigInt, b: &SparseVec) -> SparseVec {
    if c.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + c * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// `p * a + q * b`.
pub(crate) fn lincomb(p: &BigInt, a: &SparseVec, q: &BigInt, b: &SparseVec) -> SparseVec {
    let scaled: SparseVec = if p.is_zero() {
        Vec::new()
    } else {
        a.iter().map(|(i, v)| (*i, p * v)).collect()
    };
    axpy(&scaled, q, b)
}

pub(crate) fn sparse_get(v: &SparseVec, idx: usize) -> Option<&BigInt> {
    v.binary_search_by_key(&idx, |e| e.0).ok().map(|k| &v[k].1)
}

/// Integer matrix with arbitrary-precision entries, stored as sparse rows.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        IntegerMatrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, BigInt::one())]).collect(),
        }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntegerMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.data[i] = r
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.clone().into()))
                .filter(|(_, v)| !v.is_zero())
                .collect();
        }
        m
    }

    /// Build from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets<T: Into<BigInt>>(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Self {
        let mut m = IntegerMatrix::zeros(rows, cols);
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "entry ({i}, {j}) out of range");
            let v: BigInt = v.into();
            let cur = m.get(i, j);
            m.set(i, j, cur + v);
        }
        m
    }

    pub(crate) fn from_sparse_rows(rows: usize, cols: usize, data: Vec<SparseVec>) -> Self {
        debug_assert_eq!(data.len(), rows);
        IntegerMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        sparse_get(&self.data[i], j).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(k) if v.is_zero() => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = v,
            Err(_) if v.is_zero() => {}
            Err(k) => row.insert(k, (j, v)),
        }
    }

    pub(crate) fn into_sparse_rows(self) -> Vec<SparseVec> {
        self.data
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row_dense(&self, i: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.cols];
        for (j, v) in &self.data[i] {
            out[*j] = v.clone();
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_dense(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                data[*j].push((i, v.clone()));
            }
        }
        IntegerMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc: SparseVec = Vec::new();
                for (k, v) in r {
                    acc = axpy(&acc, v, &other.data[*k]);
                }
                acc
            })
            .collect();
        IntegerMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in product");
        self.data
            .iter()
            .map(|r| r.iter().map(|(j, v)| v * &x[*j]).sum())
            .collect()
    }

    pub fn add(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let one = BigInt::one();
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| axpy(a, &one, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntegerMatrix) -> IntegerMatrix {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> IntegerMatrix {
        if c.is_zero() {
            return IntegerMatrix::zeros(self.rows, self.cols);
        }
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|r| r.iter().map(|(j, v)| (*j, v * c)).collect())
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> IntegerMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = IntegerMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntegerMatrix {
        IntegerMatrix {
            rows: idx.len(),
            cols: self.cols,
            data: idx.iter().map(|&i| self.data[i].clone()).collect(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntegerMatrix {
        self.transpose().select_rows(idx).transpose()
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.rows, other.rows);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(j, v)| (j + self.cols, v.clone())));
                r
            })
            .collect();
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        }
    }

    /// Column vectors as a matrix.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    m.data[i].push((j, v.clone()));
                }
            }
        }
        m
    }

    /// Reduce row `i` modulo `moduli[i]` (0 means no reduction), into `[0, m)`.
    pub fn reduce_rows(&self, moduli: &[BigInt]) -> IntegerMatrix {
        assert_eq!(moduli.len(), self.rows);
        let data = self
            .data
            .iter()
            .zip(moduli)
            .map(|(r, m)| {
                if m.is_zero() {
                    r.clone()
                } else {
                    r.iter()
                        .map(|(j, v)| (*j, num_integer::Integer::mod_floor(v, m)))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                }
            })
            .collect();
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Rank over `F_p`; `p` must be prime.
    pub fn rank_mod_prime(&self, p: u64) -> usize {
        let pb = BigInt::from(p);
        let mut a: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                self.row_dense(i)
                    .iter()
                    .map(|v| {
                        use num_traits::ToPrimitive;
                        num_integer::Integer::mod_floor(v, &pb).to_u64().unwrap()
                    })
                    .collect()
            })
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = mod_pow(a[rank][c], p - 2, p);
            for v in a[rank].iter_mut() {
                *v = mul_mod(*v, inv, p);
            }
            for i in 0..self.rows {
                if i != rank && a[i][c] != 0 {
                    let f = a[i][c];
                    let pivot = a[rank].clone();
                    for (x, y) in a[i][c..].iter_mut().zip(&pivot[c..]) {
                        *x = (*x + p - mul_mod(f, *y, p)) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible_over_q(&self) -> bool {
        self.is_square() && (self.rows == 0 || !self.determinant().is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.triplets()
            .map(|(_, _, v)| v.abs())
            .max()
            .unwrap_or_default()
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix({}x{}) {}", self.rows, self.cols, self)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row_dense(i).iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Serialized form: dimensions plus `[row, col, value]` triplets.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SparseMatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl From<&IntegerMatrix> for SparseMatrixDoc {
    fn from(m: &IntegerMatrix) -> Self {
        SparseMatrixDoc {
            rows: m.rows,
            cols: m.cols,
            entries: m
                .triplets()
                .map(|(i, j, v)| (i, j, v.to_string()))
                .collect(),
        }
    }
}

impl TryFrom<&SparseMatrixDoc> for IntegerMatrix {
    type Error = String;

    fn try_from(doc: &SparseMatrixDoc) -> Result<Self, String> {
        let mut entries = Vec::with_capacity(doc.entries.len());
        for (i, j, v) in &doc.entries {
            if *i >= doc.rows || *j >= doc.cols {
                return Err(format!("entry ({i}, {j}) out of range"));
            }
            let v: BigInt = v.parse().map_err(|_| format!("bad integer {v:?}"))?;
            entries.push((*i, *j, v));
        }
        Ok(IntegerMatrix::from_triplets(doc.rows, doc.cols, entries))
    }
}
