//! Finite regular CW complexes of dimension at most 2 and cellular maps between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homalg::matrix::SparseMatrixDoc;
use crate::homalg::{CochainComplex, IntegerMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub label: String,
    /// Faces in traversal order with incidence signs. An edge lists its tail
    /// with -1 and its head with +1; a 2-cell lists its boundary edges around
    /// the loop, +1 when traversed along the edge orientation.
    pub boundary: Vec<(usize, i32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellComplex {
    pub dimension: usize,
    pub cells: Vec<Vec<Cell>>,
}

impl CellComplex {
    /// Checks face indices and incidence signs.
    pub fn new(dimension: usize, cells: Vec<Vec<Cell>>) -> Result<Self> {
        if cells.len() != dimension + 1 {
            return Err(Error::parse(
                "cells",
                format!(
                    "expected {} dimensions of cells, got {}",
                    dimension + 1,
                    cells.len()
                ),
            ));
        }
        let c = CellComplex { dimension, cells };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.dimension > 2 {
            return Err(Error::Unsupported("complexes of dimension above 2".into()));
        }
        for (k, cells) in self.cells.iter().enumerate() {
            for (i, cell) in cells.iter().enumerate() {
                let key = format!("cells[{k}][{i}]");
                if k == 0 && !cell.boundary.is_empty() {
                    return Err(Error::parse(key, "vertices have empty boundary"));
                }
                for &(f, s) in &cell.boundary {
                    if k == 0 || f >= self.cells[k - 1].len() {
                        return Err(Error::parse(&key, format!("face {f} out of range")));
                    }
                    if s != 1 && s != -1 {
                        return Err(Error::parse(&key, format!("incidence {s} is not ±1")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(tail, head)` of an edge written as `[[tail, -1], [head, 1]]`.
    pub fn edge_endpoints(&self, e: usize) -> Option<(usize, usize)> {
        match self.cells[1][e].boundary.as_slice() {
            [(t, -1), (h, 1)] => Some((*t, *h)),
            _ => None,
        }
    }

    /// Every edge has a tail and a head, and every 2-cell boundary is a closed
    /// edge path. Needed for fundamental groups.
    pub fn check_edge_paths(&self) -> Result<()> {
        for e in 0..self.count(1) {
            if self.edge_endpoints(e).is_none() {
                return Err(Error::Precondition(format!(
                    "edge {} does not have the form [[tail, -1], [head, 1]]",
                    self.cells[1][e].label
                )));
            }
        }
        for face in self.cells.get(2).into_iter().flatten() {
            let path: Vec<(usize, usize)> = face
                .boundary
                .iter()
                .map(|&(e, s)| {
                    let (t, h) = self.edge_endpoints(e).unwrap();
                    if s > 0 {
                        (t, h)
                    } else {
                        (h, t)
                    }
                })
                .collect();
            for j in 0..path.len() {
                if path[j].1 != path[(j + 1) % path.len()].0 {
                    return Err(Error::Precondition(format!(
                        "boundary of 2-cell {} is not a closed edge path",
                        face.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k % 2 == 0 {
                    c.len() as i64
                } else {
                    -(c.len() as i64)
                }
            })
            .sum()
    }

    /// `∂_k : C_k -> C_{k-1}` for `k >= 1` (rows: `(k-1)`-cells).
    pub fn boundary_matrix(&self, k: usize) -> IntegerMatrix {
        assert!(k >= 1 && k <= self.dimension);
        IntegerMatrix::from_triplets(
            self.count(k - 1),
            self.count(k),
            self.cells[k]
                .iter()
                .enumerate()
                .flat_map(|(j, c)| c.boundary.iter().map(move |&(i, s)| (i, j, s))),
        )
    }

    pub fn boundary_matrices(&self) -> Vec<IntegerMatrix> {
        (1..=self.dimension)
            .map(|k| self.boundary_matrix(k))
            .collect()
    }

    /// First degree `k` with `∂_k ∂_{k+1} != 0`.
    pub fn boundary_defect(&self) -> Option<usize> {
        (1..self.dimension).find(|&k| {
            !self
                .boundary_matrix(k)
                .mul(&self.boundary_matrix(k + 1))
                .is_zero()
        })
    }

    pub fn cochain_complex(&self) -> Result<CochainComplex> {
        CochainComplex::from_boundaries(self.counts(), &self.boundary_matrices())
    }

    pub fn is_connected(&self) -> bool {
        let n = self.count(0);
        if n == 0 {
            return false;
        }
        let mut uf = UnionFind::new(n);
        if self.dimension >= 1 {
            for e in &self.cells[1] {
                for w in e.boundary.windows(2) {
                    uf.union(w[0].0, w[1].0);
                }
            }
        }
        (0..n).all(|v| uf.find(v) == uf.find(0))
    }

    pub fn find(&self, k: usize, label: &str) -> Option<usize> {
        self.cells.get(k)?.iter().position(|c| c.label == label)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Identity,
    Forgetful,
    Substitution,
    Composite,
}

/// Cellular map between two complexes, with enough combinatorial data to
/// induce maps on chains and on fundamental groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularMap {
    pub kind: MapKind,
    pub source_level: Option<usize>,
    pub target_level: Option<usize>,
    /// `chain[k]`: rows are target `k`-cells, columns source `k`-cells.
    pub chain: Vec<IntegerMatrix>,
    pub vertex_images: Vec<usize>,
    /// Each source edge maps to this edge path, from the image of its tail to
    /// the image of its head.
    pub edge_images: Vec<Vec<(usize, i32)>>,
}

impl CellularMap {
    pub fn identity(x: &CellComplex) -> Self {
        CellularMap {
            kind: MapKind::Identity,
            source_level: None,
            target_level: None,
            chain: (0..=x.dimension)
                .map(|k| IntegerMatrix::identity(x.count(k)))
                .collect(),
            vertex_images: (0..x.count(0)).collect(),
            edge_images: (0..x.count(1)).map(|e| vec![(e, 1)]).collect(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CellularMap) -> Result<CellularMap> {
        if self.chain.len() != inner.chain.len()
            || self
                .chain
                .iter()
                .zip(&inner.chain)
                .any(|(a, b)| a.cols() != b.rows())
        {
            return Err(Error::Precondition("maps are not composable".into()));
        }
        let chain = self
            .chain
            .iter()
            .zip(&inner.chain)
            .map(|(a, b)| a.mul(b))
            .collect();
        let vertex_images = inner
            .vertex_images
            .iter()
            .map(|&v| self.vertex_images[v])
            .collect();
        let edge_images = inner
            .edge_images
            .iter()
            .map(|path| {
                let mut out = Vec::new();
                for &(e, s) in path {
                    let img = &self.edge_images[e];
                    if s > 0 {
                        out.extend(img.iter().copied());
                    } else {
                        out.extend(img.iter().rev().map(|&(f, t)| (f, -t)));
                    }
                }
                out
            })
            .collect();
        Ok(CellularMap {
            kind: MapKind::Composite,
            source_level: inner.source_level,
            target_level: self.target_level,
            chain,
            vertex_images,
            edge_images,
        })
    }

    /// Exact check of `∂ f = f ∂` in every degree; returns the first failing degree.
    pub fn commutation_defect(&self, source: &CellComplex, target: &CellComplex) -> Option<usize> {
        (1..=source.dimension.min(target.dimension)).find(|&k| {
            let lhs = target.boundary_matrix(k).mul(&self.chain[k]);
            let rhs = self.chain[k - 1].mul(&source.boundary_matrix(k));
            lhs != rhs
        })
    }

    /// Checks the path data against the complexes: edge images are connected
    /// paths between the images of the endpoints and agree with the chain matrix.
    pub fn check_paths(&self, source: &CellComplex, target: &CellComplex) -> Result<()> {
        for (e, path) in self.edge_images.iter().enumerate() {
            let bad = || Error::Internal(format!("edge {e} or its image lacks endpoints"));
            let (tail, head) = source.edge_endpoints(e).ok_or_else(bad)?;
            let mut at = self.vertex_images[tail];
            for &(f, s) in path {
                let (t, h) = target.edge_endpoints(f).ok_or_else(bad)?;
                let (from, to) = if s > 0 { (t, h) } else { (h, t) };
                if from != at {
                    return Err(Error::Internal(format!("image path of edge {e} is broken")));
                }
                at = to;
            }
            if at != self.vertex_images[head] {
                return Err(Error::Internal(format!(
                    "image path of edge {e} ends wrongly"
                )));
            }
            let mut col = vec![0i64; target.count(1)];
            for &(f, s) in path {
                col[f] += s as i64;
            }
            for (f, v) in col.iter().enumerate() {
                if self.chain[1].get(f, e) != (*v).into() {
                    return Err(Error::Internal(format!(
                        "image path of edge {e} disagrees with the chain map"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.chain
            .iter()
            .all(|m| m.is_square() && *m == IntegerMatrix::identity(m.rows()))
    }

    pub fn chain_docs(&self) -> Vec<SparseMatrixDoc> {
        self.chain.iter().map(SparseMatrixDoc::from).collect()
    }
}

/// Serialized complex: cells per dimension with labels and signed boundaries.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    pub cells: Vec<Vec<Cell>>,
}

pub fn parse_complex(text: &str) -> Result<CellComplex> {
    let doc: ComplexDocument =
        serde_json::from_str(text).map_err(|e| Error::parse("<document>", e.to_string()))?;
    CellComplex::new(doc.dimension, doc.cells)
}

pub fn complex_to_json(x: &CellComplex, level: Option<usize>) -> String {
    let doc = ComplexDocument {
        dimension: x.dimension,
        level,
        cells: x.cells.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("complex serializes")
}

/// Serialized chain map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapDocument {
    pub kind: MapKind,
    pub source_level: Option<usize>,
    pub target_level: Option<usize>,
    pub chain: Vec<SparseMatrixDoc>,
}

impl From<&CellularMap> for MapDocument {
    fn from(f: &CellularMap) -> Self {
        MapDocument {
            kind: f.kind,
            source_level: f.source_level,
            target_level: f.target_level,
            chain: f.chain_docs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn torus() -> CellComplex {
        let v = Cell {
            label: "v".into(),
            boundary: vec![],
        };
        let edge = |l: &str| Cell {
            label: l.into(),
            boundary: vec![(0, -1), (0, 1)],
        };
        let face = Cell {
            label: "f".into(),
            boundary: vec![(0, 1), (1, 1), (0, -1), (1, -1)],
        };
        CellComplex::new(2, vec![vec![v], vec![edge("a"), edge("b")], vec![face]]).unwrap()
    }

    #[test]
    fn torus_structure() {
        let t = torus();
        assert_eq!(t.euler_characteristic(), 0);
        assert!(t.boundary_matrix(2).is_zero());
        assert!(t.is_connected());
        assert_eq!(t.boundary_defect(), None);
        let id = CellularMap::identity(&t);
        assert_eq!(id.commutation_defect(&t, &t), None);
        id.check_paths(&t, &t).unwrap();
        assert!(id.compose(&id).unwrap().is_identity());
    }

    #[test]
    fn json_round_trip() {
        let t = torus();
        let text = complex_to_json(&t, Some(3));
        assert_eq!(parse_complex(&text).unwrap(), t);
        assert!(parse_complex(
            r#"{"dimension":1,"cells":[[],[{"label":"e","boundary":[[0,1]]}]]}"#
        )
        .is_err());
        assert!(parse_complex(r#"{"dimension":0,"cells":[[]],"extra":1}"#).is_err());
    }

    #[test]
    fn open_boundary_word_rejected() {
        let mut t = torus();
        t.cells[0].push(Cell {
            label: "w".into(),
            boundary: vec![],
        });
        t.cells[1][0].boundary = vec![(0, -1), (1, 1)];
        let t = CellComplex::new(2, t.cells).unwrap();
        assert!(t.check_edge_paths().is_err());
        assert!(CellComplex::new(2, vec![vec![], vec![], vec![]]).is_ok());
        assert!(CellComplex::new(
            1,
            vec![
                vec![],
                vec![Cell {
                    label: "e".into(),
                    boundary: vec![(0, 1)]
                }]
            ]
        )
        .is_err());
    }
}
