//! Materialized multislice graph: vertex table plus transposition adjacency.

use std::collections::VecDeque;
use std::io::Write;

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::vertex::{self, rank_levels, Vertex, VertexIndex};

/// The graph `G_{N,k}` with vertices stored in canonical order.
///
/// Every vertex has exactly `degree` neighbors, so adjacency is stored as a
/// flat `len × degree` table of neighbor ranks together with the swapped
/// position pair for each entry.
#[derive(Debug, Clone)]
pub struct Multislice {
    composition: Composition,
    n: usize,
    len: usize,
    degree: usize,
    levels: Vec<u8>,
    adjacency: Vec<u32>,
    swaps: Vec<(u16, u16)>,
}

impl Multislice {
    pub fn new(composition: &Composition, budget: u64) -> Result<Self> {
        let card = vertex::check_budget(composition, budget)?;
        if card > u32::MAX as u64 {
            return Err(Error::BudgetExceeded { cardinality: card.to_string(), budget });
        }
        let n = composition.n();
        let len = card as usize;
        let degree = composition.degree() as usize;
        let mut levels = Vec::with_capacity(len * n);
        let mut current = vertex::first_levels(composition);
        loop {
            levels.extend_from_slice(&current);
            if !vertex::next_permutation(&mut current) {
                break;
            }
        }
        debug_assert_eq!(levels.len(), len * n);

        let mut adjacency = Vec::with_capacity(len * degree);
        let mut swaps = Vec::with_capacity(len * degree);
        let mut scratch = vec![0u8; n];
        for v in 0..len {
            let x = &levels[v * n..(v + 1) * n];
            for i in 0..n {
                for j in i + 1..n {
                    if x[i] != x[j] {
                        scratch.copy_from_slice(x);
                        scratch.swap(i, j);
                        adjacency.push(rank_levels(&scratch, composition.counts(), card) as u32);
                        swaps.push((i as u16, j as u16));
                    }
                }
            }
        }
        debug_assert_eq!(adjacency.len(), len * degree);

        Ok(Multislice {
            composition: composition.clone(),
            n,
            len,
            degree,
            levels,
            adjacency,
            swaps,
        })
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Particle count `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Level sequence of the vertex with rank `v`.
    pub fn levels(&self, v: usize) -> &[u8] {
        &self.levels[v * self.n..(v + 1) * self.n]
    }

    pub fn vertex(&self, v: usize) -> Vertex {
        Vertex::from_raw(self.levels(v).to_vec())
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v * self.degree..(v + 1) * self.degree]
    }

    /// Position pairs `(i, j)` aligned with [`Multislice::neighbors`].
    pub fn swaps(&self, v: usize) -> &[(u16, u16)] {
        &self.swaps[v * self.degree..(v + 1) * self.degree]
    }

    pub fn rank_of(&self, x: &Vertex) -> Result<usize> {
        Ok(vertex::rank(x, &self.composition)?.0 as usize)
    }

    pub(crate) fn rank_of_levels(&self, levels: &[u8]) -> usize {
        rank_levels(levels, self.composition.counts(), self.len as u64) as usize
    }

    pub fn index(&self, v: usize) -> VertexIndex {
        VertexIndex(v as u64)
    }

    /// Breadth-first search from rank 0 reaches every vertex.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == self.len
    }

    /// Undirected edges `(u, v)` with `u < v`, in increasing order of `u` then `v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len * self.degree / 2);
        for u in 0..self.len {
            let mut row: Vec<usize> = self.neighbors(u).iter().map(|&w| w as usize).filter(|&w| w > u).collect();
            row.sort_unstable();
            out.extend(row.into_iter().map(|w| (u, w)));
        }
        out
    }

    /// One `u v` rank pair per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Graphviz DOT, vertices labelled by their level sequence.
    pub fn write_dot<W: Write>(&self, mut out: W) -> Result<()> {
        let counts: Vec<String> = self.composition.counts().iter().map(|c| c.to_string()).collect();
        writeln!(out, "graph multislice_{} {{", counts.join("_"))?;
        for v in 0..self.len {
            writeln!(out, "  {v} [label=\"{}\"];", self.vertex(v))?;
        }
        for (u, v) in self.edges() {
            writeln!(out, "  {u} -- {v};")?;
        }
        writeln!(out, "}}")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: &[usize]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn regular_and_symmetric() {
        for c in Composition::all_weak(5, 3).into_iter().chain([k(&[2, 2, 2])]) {
            let g = Multislice::new(&c, 10_000).unwrap();
            assert_eq!(g.len() as u64, c.cardinality_u64().unwrap());
            for v in 0..g.len() {
                let nb = g.neighbors(v);
                assert_eq!(nb.len() as u64, c.degree());
                let mut sorted = nb.to_vec();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), nb.len(), "duplicate neighbors");
                for (&w, &(i, j)) in nb.iter().zip(g.swaps(v)) {
                    assert!(g.neighbors(w as usize).contains(&(v as u32)));
                    let expected = g.vertex(v).transpose(i as usize, j as usize).unwrap();
                    assert_eq!(g.vertex(w as usize), expected);
                }
            }
        }
    }

    #[test]
    fn connectivity_examples() {
        assert!(Multislice::new(&k(&[1, 1, 1]), 100).unwrap().is_connected());
        assert!(Multislice::new(&k(&[4]), 100).unwrap().is_connected());
        assert!(Multislice::new(&k(&[3, 2]), 100).unwrap().is_connected());
        for n in 1..=6 {
            for c in Composition::all_reduced(n) {
                assert!(Multislice::new(&c, 10_000).unwrap().is_connected(), "{c}");
            }
        }
    }

    #[test]
    fn edge_list_and_dot() {
        let g = Multislice::new(&k(&[2, 1]), 100).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 2\n1 2\n");
        let mut dot = Vec::new();
        g.write_dot(&mut dot).unwrap();
        let dot = String::from_utf8(dot).unwrap();
        assert!(dot.starts_with("graph multislice_2_1 {"));
        assert!(dot.contains("0 [label=\"(0,0,1)\"]"));
        assert!(dot.contains("1 -- 2;"));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(Multislice::new(&k(&[1; 8]), 1000), Err(Error::BudgetExceeded { .. })));
    }
}
