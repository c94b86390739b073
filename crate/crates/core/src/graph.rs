//! Vertex-colored undirected graphs and the incidence graph of a design.
//!
//! Adjacency is stored twice: as bitset rows for O(1) edge tests and
//! certificate building, and as neighbor lists for the refinement loops.

use crate::error::{Error, Result};
use crate::incidence::{IncidenceStructure, PointSet};

/// Undirected loop-free graph with a color per vertex. Color ids always
/// form a contiguous range starting at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
    neighbors: Vec<Vec<u32>>,
    colors: Vec<u32>,
}

impl ColoredGraph {
    /// Builds a graph from an edge list. Colors are compacted to 0..k
    /// preserving their relative order.
    pub fn new(n: usize, edges: &[(u32, u32)], colors: Vec<u32>) -> Result<Self> {
        if colors.len() != n {
            return Err(Error::shape(format!(
                "{} colors for {} vertices",
                colors.len(),
                n
            )));
        }
        let stride = n.div_ceil(64);
        let mut g = ColoredGraph {
            n,
            stride,
            bits: vec![0u64; n * stride],
            neighbors: vec![Vec::new(); n],
            colors: compact_colors(colors),
        };
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        for list in g.neighbors.iter_mut() {
            list.sort_unstable();
        }
        Ok(g)
    }

    fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        let (ui, vi) = (u as usize, v as usize);
        if ui >= self.n || vi >= self.n {
            return Err(Error::OutOfRange { index: ui.max(vi), limit: self.n });
        }
        if u == v {
            return Err(Error::domain(format!("self-loop at vertex {u}")));
        }
        if !self.adjacent(ui, vi) {
            self.bits[ui * self.stride + vi / 64] |= 1 << (vi % 64);
            self.bits[vi * self.stride + ui / 64] |= 1 << (ui % 64);
            self.neighbors[ui].push(v);
            self.neighbors[vi].push(u);
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.stride + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_count(&self) -> usize {
        self.colors.iter().max().map_or(0, |&c| c as usize + 1)
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    /// The image of the graph under a vertex relabeling: vertex v of the
    /// original becomes `labeling[v]` in the result.
    pub fn relabel(&self, labeling: &[u32]) -> Result<ColoredGraph> {
        if labeling.len() != self.n {
            return Err(Error::shape("labeling length differs from vertex count"));
        }
        let mut colors = vec![0u32; self.n];
        let mut edges = Vec::with_capacity(self.edge_count());
        for v in 0..self.n {
            colors[labeling[v] as usize] = self.colors[v];
            for &w in &self.neighbors[v] {
                if (w as usize) > v {
                    edges.push((labeling[v], labeling[w as usize]));
                }
            }
        }
        ColoredGraph::new(self.n, &edges, colors)
    }
}

fn compact_colors(colors: Vec<u32>) -> Vec<u32> {
    let mut distinct: Vec<u32> = colors.clone();
    distinct.sort_unstable();
    distinct.dedup();
    colors
        .into_iter()
        .map(|c| distinct.binary_search(&c).unwrap() as u32)
        .collect()
}

/// How vertices of an incidence graph are colored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphColoring {
    /// Points and blocks get distinct colors, so no automorphism can
    /// exchange the two sides.
    PointBlock,
    /// A single color for everything, admitting dualities of a symmetric
    /// design as graph automorphisms.
    SelfDual,
}

/// Builds the bipartite incidence graph of a structure: vertices 0..v are
/// points, v..v+b are blocks, an edge joins point i to block j when
/// i is in block j.
///
/// Without a marking: points get color 0, blocks color 1 (or everything
/// color 0 in self-dual mode). With a marked point set: unmarked points 0,
/// marked points 1, blocks 2 (blocks rejoin color 0 in self-dual mode).
pub fn incidence_graph(
    s: &IncidenceStructure,
    marked: Option<&PointSet>,
    coloring: GraphColoring,
) -> Result<ColoredGraph> {
    let v = s.point_count();
    let b = s.block_count();
    if let Some(set) = marked {
        if let Some(&bad) = set.iter().find(|&&p| p as usize >= v) {
            return Err(Error::OutOfRange { index: bad as usize, limit: v });
        }
    }
    let n = v + b;
    let mut colors = vec![0u32; n];
    let block_color = match (marked, coloring) {
        (Some(_), GraphColoring::PointBlock) => 2,
        (None, GraphColoring::PointBlock) => 1,
        (_, GraphColoring::SelfDual) => 0,
    };
    for c in colors[v..].iter_mut() {
        *c = block_color;
    }
    if let Some(set) = marked {
        for &p in set.iter() {
            colors[p as usize] = 1;
        }
    }
    let mut edges = Vec::with_capacity(s.blocks().iter().map(|b| b.len()).sum());
    for (j, block) in s.blocks().iter().enumerate() {
        for &p in block {
            edges.push((p, (v + j) as u32));
        }
    }
    ColoredGraph::new(n, &edges, colors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_pg2, hermitian_unital};

    #[test]
    fn fano_graph_is_heawood() {
        let s = build_pg2(2).unwrap();
        let g = incidence_graph(&s, None, GraphColoring::PointBlock).unwrap();
        assert_eq!(g.vertex_count(), 14);
        assert!((0..14).all(|v| g.degree(v) == 3));
        assert_eq!(g.color_count(), 2);
        // Bipartite: no point-point or block-block edges.
        for u in 0..14 {
            for &w in g.neighbors(u) {
                assert_ne!(g.color(u), g.color(w as usize));
            }
        }
    }

    #[test]
    fn pg2_16_graph_is_17_regular_on_546() {
        let s = build_pg2(16).unwrap();
        let g = incidence_graph(&s, None, GraphColoring::SelfDual).unwrap();
        assert_eq!(g.vertex_count(), 546);
        assert!((0..546).all(|v| g.degree(v) == 17));
        assert_eq!(g.color_count(), 1);
    }

    #[test]
    fn marking_only_changes_colors() {
        let s = build_pg2(16).unwrap();
        let u = hermitian_unital(4).unwrap();
        let plain = incidence_graph(&s, None, GraphColoring::PointBlock).unwrap();
        let marked = incidence_graph(&s, Some(&u), GraphColoring::PointBlock).unwrap();
        assert_eq!(marked.colors().iter().filter(|&&c| c == 1).count(), 65);
        assert_eq!(marked.color_count(), 3);
        for v in 0..546 {
            assert_eq!(plain.neighbors(v), marked.neighbors(v));
        }
    }

    #[test]
    fn block_vertex_degree_is_block_size() {
        let s = build_pg2(4).unwrap();
        let g = incidence_graph(&s, None, GraphColoring::PointBlock).unwrap();
        for (j, block) in s.blocks().iter().enumerate() {
            assert_eq!(g.degree(21 + j), block.len());
        }
    }

    #[test]
    fn marked_index_out_of_range() {
        let s = build_pg2(2).unwrap();
        let bogus = PointSet::new(vec![10], 64).unwrap();
        assert!(incidence_graph(&s, Some(&bogus), GraphColoring::PointBlock).is_err());
    }

    #[test]
    fn self_loops_rejected() {
        assert!(ColoredGraph::new(3, &[(0, 0)], vec![0, 0, 0]).is_err());
    }

    #[test]
    fn colors_compacted() {
        let g = ColoredGraph::new(3, &[(0, 1)], vec![7, 3, 7]).unwrap();
        assert_eq!(g.colors(), &[1, 0, 1]);
    }
}
