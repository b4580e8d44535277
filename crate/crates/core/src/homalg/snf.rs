//! Smith normal form over the integers with optional transform tracking.
//!
//! Pivots are chosen by least absolute value (ties broken by shorter row, then
//! position), which keeps coefficients small on sparse coboundary matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{axpy, lincomb, IntegerMatrix, SparseVec};

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    diagonal: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Nonzero diagonal entries, each dividing the next.
    pub fn diagonal(&self) -> &[BigInt] {
        &self.diagonal
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
    let parts = snf_with(a, Transforms::ALL);
    let mut d = IntegerMatrix::zeros(a.rows(), a.cols());
    for (i, v) in parts.diagonal.iter().enumerate() {
        d.set(i, i, v.clone());
    }
    let (m, n) = (a.rows(), a.cols());
    SmithDecomposition {
        u: IntegerMatrix::from_sparse_rows(m, m, parts.u.unwrap()),
        u_inv: IntegerMatrix::from_sparse_rows(m, m, parts.u_inv_t.unwrap()).transpose(),
        v: IntegerMatrix::from_sparse_rows(n, n, parts.v_t.unwrap()).transpose(),
        v_inv: IntegerMatrix::from_sparse_rows(n, n, parts.v_inv.unwrap()),
        d,
        diagonal: parts.diagonal,
    }
}

/// Nonzero invariant factors of `a` (its rank is their count).
pub fn invariant_factors(a: &IntegerMatrix) -> Vec<BigInt> {
    snf_with(a, Transforms::NONE).diagonal
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Transforms {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
    pub v_inv: bool,
}

impl Transforms {
    pub const ALL: Transforms = Transforms {
        u: true,
        u_inv: true,
        v: true,
        v_inv: true,
    };
    pub const NONE: Transforms = Transforms {
        u: false,
        u_inv: false,
        v: false,
        v_inv: false,
    };
}

/// Raw SNF output. `u` and `v_inv` are stored by rows, `u_inv_t` and `v_t`
/// are the transposes of `U^-1` and `V` stored by rows.
pub(crate) struct SnfParts {
    pub diagonal: Vec<BigInt>,
    pub u: Option<Vec<SparseVec>>,
    pub u_inv_t: Option<Vec<SparseVec>>,
    pub v_t: Option<Vec<SparseVec>>,
    pub v_inv: Option<Vec<SparseVec>>,
}

fn identity_rows(n: usize) -> Vec<SparseVec> {
    (0..n).map(|i| vec![(i, BigInt::one())]).collect()
}

struct Calc {
    w: Vec<SparseVec>,
    cols: usize,
    u: Option<Vec<SparseVec>>,
    u_inv_t: Option<Vec<SparseVec>>,
    v_t: Option<Vec<SparseVec>>,
    v_inv: Option<Vec<SparseVec>>,
}

impl Calc {
    fn entry(&self, i: usize, j: usize) -> Option<&BigInt> {
        super::matrix::sparse_get(&self.w[i], j)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.w.swap(a, b);
        if let Some(u) = &mut self.u {
            u.swap(a, b);
        }
        if let Some(ui) = &mut self.u_inv_t {
            ui.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize, from_row: usize) {
        if a == b {
            return;
        }
        for row in self.w[from_row..].iter_mut() {
            let mut touched = false;
            for e in row.iter_mut() {
                if e.0 == a {
                    e.0 = b;
                    touched = true;
                } else if e.0 == b {
                    e.0 = a;
                    touched = true;
                }
            }
            if touched {
                row.sort_by_key(|e| e.0);
            }
        }
        if let Some(vt) = &mut self.v_t {
            vt.swap(a, b);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap(a, b);
        }
    }

    /// row `dst` += c * row `src`
    fn add_row(&mut self, dst: usize, c: &BigInt, src: usize) {
        self.w[dst] = axpy(&self.w[dst], c, &self.w[src]);
        if let Some(u) = &mut self.u {
            u[dst] = axpy(&u[dst], c, &u[src]);
        }
        if let Some(ui) = &mut self.u_inv_t {
            let neg = -c;
            ui[src] = axpy(&ui[src], &neg, &ui[dst]);
        }
    }

    /// column `dst` += c * column `src`, where column `src` is zero outside row `src_row`.
    fn add_col_single(&mut self, dst: usize, c: &BigInt, src: usize, src_row: usize) {
        let pivot = self.entry(src_row, src).cloned().unwrap_or_default();
        let cur = self.entry(src_row, dst).cloned().unwrap_or_default();
        let v = cur + c * pivot;
        set_sparse(&mut self.w[src_row], dst, v);
        if let Some(vt) = &mut self.v_t {
            vt[dst] = axpy(&vt[dst], c, &vt[src]);
        }
        if let Some(vi) = &mut self.v_inv {
            let neg = -c;
            vi[src] = axpy(&vi[src], &neg, &vi[dst]);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for e in self.w[r].iter_mut() {
            e.1 = -&e.1;
        }
        for store in [&mut self.u, &mut self.u_inv_t].into_iter().flatten() {
            for e in store[r].iter_mut() {
                e.1 = -&e.1;
            }
        }
    }

    fn pick_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize, usize)> = None;
        for (i, row) in self.w.iter().enumerate().skip(t) {
            for (j, v) in row {
                if *j < t {
                    continue;
                }
                let key = (v.abs(), row.len(), i, *j);
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
        best.map(|(_, _, i, j)| (i, j))
    }

    fn run(&mut self) -> Vec<BigInt> {
        let m = self.w.len();
        let n = self.cols;
        let mut t = 0;
        while t < m.min(n) {
            let Some((pi, pj)) = self.pick_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj, t);
            loop {
                let p = self.entry(t, t).cloned().unwrap();
                // clear column t below the pivot
                let mut smallest: Option<(BigInt, usize)> = None;
                for i in t + 1..m {
                    let Some(v) = self.entry(i, t).cloned() else {
                        continue;
                    };
                    let q = &v / &p;
                    if !q.is_zero() {
                        self.add_row(i, &-q, t);
                    }
                    if let Some(r) = self.entry(i, t) {
                        let key = (r.abs(), i);
                        if smallest.as_ref().is_none_or(|s| key < *s) {
                            smallest = Some(key);
                        }
                    }
                }
                if let Some((_, i)) = smallest {
                    self.swap_rows(t, i);
                    continue;
                }
                // clear row t right of the pivot
                let right: Vec<(usize, BigInt)> =
                    self.w[t].iter().filter(|e| e.0 > t).cloned().collect();
                let mut smallest: Option<(BigInt, usize)> = None;
                for (j, v) in right {
                    let q = &v / &p;
                    if !q.is_zero() {
                        self.add_col_single(j, &-q, t, t);
                    }
                    if let Some(r) = self.entry(t, j) {
                        let key = (r.abs(), j);
                        if smallest.as_ref().is_none_or(|s| key < *s) {
                            smallest = Some(key);
                        }
                    }
                }
                match smallest {
                    Some((_, j)) => self.swap_cols(t, j, t),
                    None => break,
                }
            }
            if self.entry(t, t).unwrap().is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        let mut diag: Vec<BigInt> = (0..t).map(|i| self.entry(i, i).cloned().unwrap()).collect();
        self.fix_divisibility(&mut diag);
        diag
    }

    fn fix_divisibility(&mut self, diag: &mut [BigInt]) {
        let r = diag.len();
        for i in 0..r {
            for j in i + 1..r {
                if diag[j].is_multiple_of(&diag[i]) {
                    continue;
                }
                let (a, b) = (diag[i].clone(), diag[j].clone());
                let eg = a.extended_gcd(&b);
                let (g, s, t) = (eg.gcd, eg.x, eg.y);
                let (ag, bg) = (&a / &g, &b / &g);
                let one = BigInt::one();
                let zero_one = -BigInt::one();
                // rows: R = [[s, t], [-b/g, a/g]]
                if let Some(u) = &mut self.u {
                    combine(u, i, j, [&s, &t, &-&bg, &ag]);
                }
                if let Some(ui) = &mut self.u_inv_t {
                    combine(ui, i, j, [&ag, &bg, &-&t, &s]);
                }
                // columns: C = [[1, -t b/g], [1, s a/g]]
                let c01 = -(&t * &bg);
                let c11 = &s * &ag;
                if let Some(vt) = &mut self.v_t {
                    combine(vt, i, j, [&one, &one, &c01, &c11]);
                }
                if let Some(vi) = &mut self.v_inv {
                    let tb = &t * &bg;
                    combine(vi, i, j, [&c11, &tb, &zero_one, &one]);
                }
                let l = &a * &bg;
                set_sparse(&mut self.w[i], i, g.clone());
                set_sparse(&mut self.w[j], j, l.clone());
                diag[i] = g;
                diag[j] = l;
            }
        }
    }
}

/// rows (i, j) <- [[c0, c1], [c2, c3]] * rows (i, j)
fn combine(rows: &mut [SparseVec], i: usize, j: usize, c: [&BigInt; 4]) {
    let ri = lincomb(c[0], &rows[i], c[1], &rows[j]);
    let rj = lincomb(c[2], &rows[i], c[3], &rows[j]);
    rows[i] = ri;
    rows[j] = rj;
}

fn set_sparse(row: &mut SparseVec, j: usize, v: BigInt) {
    match row.binary_search_by_key(&j, |e| e.0) {
        Ok(k) if v.is_zero() => {
            row.remove(k);
        }
        Ok(k) => row[k].1 = v,
        Err(_) if v.is_zero() => {}
        Err(k) => row.insert(k, (j, v)),
    }
}

pub(crate) fn snf_with(a: &IntegerMatrix, flags: Transforms) -> SnfParts {
    let (m, n) = (a.rows(), a.cols());
    let mut calc = Calc {
        w: a.clone().into_sparse_rows(),
        cols: n,
        u: flags.u.then(|| identity_rows(m)),
        u_inv_t: flags.u_inv.then(|| identity_rows(m)),
        v_t: flags.v.then(|| identity_rows(n)),
        v_inv: flags.v_inv.then(|| identity_rows(n)),
    };
    let diagonal = calc.run();
    SnfParts {
        diagonal,
        u: calc.u,
        u_inv_t: calc.u_inv_t,
        v_t: calc.v_t,
        v_inv: calc.v_inv,
    }
}

/// Rank over the rationals.
pub fn rank(a: &IntegerMatrix) -> usize {
    invariant_factors(a).len()
}

/// A `Z`-basis (as columns) of the lattice spanned by the columns of `a`.
pub fn column_lattice_basis(a: &IntegerMatrix) -> IntegerMatrix {
    let parts = snf_with(
        a,
        Transforms {
            u: false,
            u_inv: true,
            v: false,
            v_inv: false,
        },
    );
    // A V = U^-1 D, so the image is spanned by d_i * (column i of U^-1)
    let u_inv_t = parts.u_inv_t.unwrap();
    let cols: Vec<Vec<BigInt>> = parts
        .diagonal
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut col = vec![BigInt::zero(); a.rows()];
            for (k, v) in &u_inv_t[i] {
                col[*k] = v * d;
            }
            col
        })
        .collect();
    IntegerMatrix::from_columns(a.rows(), &cols)
}

/// A saturated `Z`-basis (as columns) of the integer kernel of `a`.
pub fn kernel_basis(a: &IntegerMatrix) -> IntegerMatrix {
    let parts = snf_with(
        a,
        Transforms {
            u: false,
            u_inv: false,
            v: true,
            v_inv: false,
        },
    );
    let r = parts.diagonal.len();
    let v_t = parts.v_t.unwrap();
    let rows: Vec<SparseVec> = v_t[r..].to_vec();
    IntegerMatrix::from_sparse_rows(rows.len(), a.cols(), rows).transpose()
}

/// Solves `A x = b` over the integers for a fixed `A`, reusing one SNF.
#[derive(Clone, Debug)]
pub struct LatticeSolver {
    u: IntegerMatrix,
    v: IntegerMatrix,
    diagonal: Vec<BigInt>,
}

impl LatticeSolver {
    pub fn new(a: &IntegerMatrix) -> Self {
        let parts = snf_with(
            a,
            Transforms {
                u: true,
                u_inv: false,
                v: true,
                v_inv: false,
            },
        );
        let (m, n) = (a.rows(), a.cols());
        LatticeSolver {
            u: IntegerMatrix::from_sparse_rows(m, m, parts.u.unwrap()),
            v: IntegerMatrix::from_sparse_rows(n, n, parts.v_t.unwrap()).transpose(),
            diagonal: parts.diagonal,
        }
    }

    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Some integer `x` with `A x = b`, if one exists.
    pub fn solve_vec(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        // D (V^-1 x) = U b
        let ub = self.u.mul_vec(b);
        let r = self.rank();
        if ub[r..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut y = vec![BigInt::zero(); self.v.rows()];
        for (i, d) in self.diagonal.iter().enumerate() {
            let (q, rem) = ub[i].div_rem(d);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        }
        Some(self.v.mul_vec(&y))
    }
}

/// Some integer `X` with `A X = B`, if one exists.
pub fn solve(a: &IntegerMatrix, b: &IntegerMatrix) -> Option<IntegerMatrix> {
    assert_eq!(a.rows(), b.rows());
    let solver = LatticeSolver::new(a);
    let cols = (0..b.cols())
        .map(|j| solver.solve_vec(&b.column(j)))
        .collect::<Option<Vec<_>>>()?;
    Some(IntegerMatrix::from_columns(a.cols(), &cols))
}
