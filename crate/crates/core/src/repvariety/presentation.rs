use std::collections::VecDeque;

use crate::complex::{CellComplex, CellularMap};
use crate::error::{Error, Result};

/// A letter of a word in the generators: generator index and exponent ±1.
pub type Letter = (usize, i32);

/// Presentation of π₁ of a connected 2-complex: one generator per edge outside
/// a breadth-first spanning tree (rooted at vertex 0 unless chosen otherwise),
/// one relator per 2-cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub base: usize,
    /// Edge ids of the generators, ascending.
    pub generators: Vec<usize>,
    /// Freely reduced; trivial relators are dropped.
    pub relators: Vec<Vec<Letter>>,
    generator_of_edge: Vec<Option<usize>>,
}

impl Presentation {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Generator index of an edge, `None` for tree edges.
    pub fn generator_of_edge(&self, e: usize) -> Option<usize> {
        self.generator_of_edge[e]
    }

    /// The word read along an edge path; tree edges contribute nothing.
    pub fn path_word(&self, path: &[(usize, i32)]) -> Vec<Letter> {
        let word = path
            .iter()
            .filter_map(|&(e, s)| self.generator_of_edge[e].map(|g| (g, s)));
        free_reduce(word)
    }

    /// `g1 g2^-1 ...`; generators are named by edge label when given.
    pub fn format_word(&self, word: &[Letter], names: Option<&[String]>) -> String {
        if word.is_empty() {
            return "1".into();
        }
        word.iter()
            .map(|&(g, s)| {
                let name = match names {
                    Some(n) => n[self.generators[g]].clone(),
                    None => format!("g{g}"),
                };
                if s > 0 {
                    name
                } else {
                    format!("{name}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn free_reduce(word: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for (g, s) in word {
        match out.last() {
            Some(&(h, t)) if h == g && t == -s => {
                out.pop();
            }
            _ => out.push((g, s)),
        }
    }
    out
}

pub fn fundamental_presentation(x: &CellComplex) -> Result<Presentation> {
    fundamental_presentation_from(x, 0)
}

/// Same construction with the spanning tree grown from `root`.
pub fn fundamental_presentation_from(x: &CellComplex, root: usize) -> Result<Presentation> {
    if root >= x.count(0) {
        return Err(Error::Precondition(format!(
            "no vertex {root} to root the spanning tree"
        )));
    }
    if !x.is_connected() {
        return Err(Error::Precondition(
            "fundamental group needs a connected complex".into(),
        ));
    }
    x.check_edge_paths()?;
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); x.count(0)];
    for e in 0..x.count(1) {
        let (t, h) = x.edge_endpoints(e).expect("checked edge paths");
        adjacency[t].push((e, h));
        adjacency[h].push((e, t));
    }
    let mut visited = vec![false; x.count(0)];
    let mut tree = vec![false; x.count(1)];
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    while let Some(v) = queue.pop_front() {
        for &(e, w) in &adjacency[v] {
            if !visited[w] {
                visited[w] = true;
                tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    let generators: Vec<usize> = (0..x.count(1)).filter(|&e| !tree[e]).collect();
    let mut generator_of_edge = vec![None; x.count(1)];
    for (i, &e) in generators.iter().enumerate() {
        generator_of_edge[e] = Some(i);
    }
    let mut p = Presentation {
        base: root,
        generators,
        relators: Vec::new(),
        generator_of_edge,
    };
    if x.dimension >= 2 {
        p.relators = x.cells[2]
            .iter()
            .map(|c| p.path_word(&c.boundary))
            .filter(|w| !w.is_empty())
            .collect();
    }
    Ok(p)
}

/// Images of the generators of π₁(X) under `f: X → Y`, as words in the
/// generators of π₁(Y).
///
/// A generator `e` of X is the loop `tree(tail) e tree(head)^-1`; its image
/// runs along tree paths of X mapped into Y, which are read off like any other
/// path. Changing basepoint in Y only conjugates by a tree path, which reads
/// as the empty word.
pub fn induced_on_generators(
    f: &CellularMap,
    x: &Presentation,
    y: &Presentation,
    source: &CellComplex,
) -> Result<Vec<Vec<Letter>>> {
    let n = source.count(0);
    // tree path of X from the base to each vertex, mapped into Y
    let mut image_to: Vec<Option<Vec<(usize, i32)>>> = vec![None; n];
    image_to[x.base] = Some(Vec::new());
    let mut queue = VecDeque::from([x.base]);
    let mut incident: Vec<Vec<(usize, usize, i32)>> = vec![Vec::new(); n];
    for e in 0..source.count(1) {
        if x.generator_of_edge(e).is_some() {
            continue;
        }
        let (t, h) = source
            .edge_endpoints(e)
            .ok_or_else(|| Error::Internal(format!("edge {e} lacks endpoints")))?;
        incident[t].push((e, h, 1));
        incident[h].push((e, t, -1));
    }
    while let Some(v) = queue.pop_front() {
        for &(e, w, s) in &incident[v] {
            if image_to[w].is_none() {
                let mut path = image_to[v].clone().unwrap();
                path.extend(oriented(&f.edge_images[e], s));
                image_to[w] = Some(path);
                queue.push_back(w);
            }
        }
    }
    x.generators
        .iter()
        .map(|&e| {
            let (t, h) = source.edge_endpoints(e).unwrap();
            let (Some(to_t), Some(to_h)) = (&image_to[t], &image_to[h]) else {
                return Err(Error::Internal(
                    "spanning tree does not reach every vertex".into(),
                ));
            };
            let mut path = to_t.clone();
            path.extend(f.edge_images[e].iter().copied());
            path.extend(oriented(to_h, -1));
            Ok(y.path_word(&path))
        })
        .collect()
}

fn oriented(path: &[(usize, i32)], s: i32) -> Vec<(usize, i32)> {
    if s > 0 {
        path.to_vec()
    } else {
        path.iter().rev().map(|&(e, t)| (e, -t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;

    #[test]
    fn torus_commutator() {
        let x = parse_complex(include_str!("../../data/complexes/torus.cw")).unwrap();
        let p = fundamental_presentation(&x).unwrap();
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relators, vec![vec![(0, 1), (1, 1), (0, -1), (1, -1)]]);
    }

    #[test]
    fn free_reduction() {
        assert!(free_reduce([(0, 1), (1, 1), (1, -1), (0, -1)]).is_empty());
        assert_eq!(free_reduce([(0, 1), (0, 1)]), vec![(0, 1), (0, 1)]);
    }
}
