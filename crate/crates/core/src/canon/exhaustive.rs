//! Exhaustive automorphism enumeration by plain backtracking.
//!
//! This is the independent cross-check for the refinement-based search: it
//! shares no code with it beyond the graph type. Vertices are assigned
//! images one at a time in a breadth-first order, so each new vertex
//! (after the first of its component) has an already-assigned neighbor and
//! candidate images can be read off that neighbor's image.

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::perm::Permutation;

/// Hard ceiling on enumerated automorphisms.
pub const ENUMERATION_LIMIT: u64 = 100_000_000;

/// Number of color- and adjacency-preserving permutations of `g`.
pub fn count_automorphisms(g: &ColoredGraph) -> Result<u64> {
    let mut count = 0u64;
    enumerate(g, &mut |_| {
        count += 1;
        count <= ENUMERATION_LIMIT
    })?;
    Ok(count)
}

/// Every automorphism of `g`, for graphs small enough to list them all.
pub fn all_automorphisms(g: &ColoredGraph, cap: usize) -> Result<Vec<Permutation>> {
    let mut out = Vec::new();
    enumerate(g, &mut |images| {
        out.push(Permutation::from_images(images.to_vec()).unwrap());
        out.len() <= cap
    })?;
    Ok(out)
}

fn enumerate(g: &ColoredGraph, visit: &mut dyn FnMut(&[u32]) -> bool) -> Result<()> {
    let n = g.vertex_count();
    if n == 0 {
        visit(&[]);
        return Ok(());
    }

    // Breadth-first vertex order; every component is rooted at its smallest
    // vertex, so after the root each vertex has an assigned neighbor.
    let mut bfs_order = Vec::with_capacity(n);
    let mut anchor = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut head = bfs_order.len();
        bfs_order.push(start as u32);
        while head < bfs_order.len() {
            let v = bfs_order[head] as usize;
            head += 1;
            for &w in g.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    anchor[w as usize] = v;
                    bfs_order.push(w);
                }
            }
        }
    }

    let stride = n.div_ceil(64);
    // row(v) = adjacency bitset of v in original indices.
    let row = |v: usize| -> Vec<u64> {
        let mut bits = vec![0u64; stride];
        for &w in g.neighbors(v) {
            bits[w as usize / 64] |= 1 << (w % 64);
        }
        bits
    };
    let rows: Vec<Vec<u64>> = (0..n).map(row).collect();

    let mut image = vec![u32::MAX; n];
    let mut used = vec![false; n];
    // Bitset over image space of vertices assigned so far.
    let mut assigned_mask = vec![0u64; stride];
    let mut required = vec![vec![0u64; stride]; n + 1];

    fn dfs(
        k: usize,
        g: &ColoredGraph,
        bfs_order: &[u32],
        anchor: &[usize],
        rows: &[Vec<u64>],
        image: &mut [u32],
        used: &mut [bool],
        assigned_mask: &mut [u64],
        required: &mut [Vec<u64>],
        visit: &mut dyn FnMut(&[u32]) -> bool,
        ok: &mut bool,
    ) {
        if !*ok {
            return;
        }
        if k == bfs_order.len() {
            if !visit(image) {
                *ok = false;
            }
            return;
        }
        let v = bfs_order[k] as usize;
        // Images of the already-assigned neighbors of v.
        let (req, rest) = required.split_at_mut(k + 1);
        let req = &mut req[k];
        let _ = rest;
        req.iter_mut().for_each(|w| *w = 0);
        for &w in g.neighbors(v) {
            let wi = image[w as usize];
            if wi != u32::MAX {
                req[wi as usize / 64] |= 1 << (wi % 64);
            }
        }

        let candidates: Vec<u32> = if anchor[v] == usize::MAX {
            (0..g.vertex_count() as u32).collect()
        } else {
            g.neighbors(image[anchor[v]] as usize).to_vec()
        };
        for c in candidates {
            let ci = c as usize;
            if used[ci]
                || g.color(ci) != g.color(v)
                || g.degree(ci) != g.degree(v)
            {
                continue;
            }
            // All edges between v and assigned vertices must map to edges,
            // and non-edges to non-edges.
            let consistent = (0..assigned_mask.len()).all(|wd| {
                rows[ci][wd] & assigned_mask[wd] == required[k][wd]
            });
            if !consistent {
                continue;
            }
            image[v] = c;
            used[ci] = true;
            assigned_mask[ci / 64] |= 1 << (ci % 64);
            dfs(
                k + 1, g, bfs_order, anchor, rows, image, used, assigned_mask, required,
                visit, ok,
            );
            assigned_mask[ci / 64] &= !(1 << (ci % 64));
            used[ci] = false;
            image[v] = u32::MAX;
            if !*ok {
                return;
            }
        }
    }

    let mut ok = true;
    dfs(
        0,
        g,
        &bfs_order,
        &anchor,
        &rows,
        &mut image,
        &mut used,
        &mut assigned_mask,
        &mut required,
        visit,
        &mut ok,
    );
    if ok {
        Ok(())
    } else {
        Err(Error::Budget("automorphism enumeration exceeded its cap".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::search::is_automorphism;

    #[test]
    fn four_cycle_dihedral() {
        let g = ColoredGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![0; 4]).unwrap();
        assert_eq!(count_automorphisms(&g).unwrap(), 8);
        let all = all_automorphisms(&g, 16).unwrap();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|p| is_automorphism(&g, p)));
    }

    #[test]
    fn colors_restrict() {
        // Path 0-1-2 with matching end colors has one nontrivial flip;
        // distinct end colors kill it.
        let sym = ColoredGraph::new(3, &[(0, 1), (1, 2)], vec![0, 1, 0]).unwrap();
        assert_eq!(count_automorphisms(&sym).unwrap(), 2);
        let asym = ColoredGraph::new(3, &[(0, 1), (1, 2)], vec![0, 1, 2]).unwrap();
        assert_eq!(count_automorphisms(&asym).unwrap(), 1);
    }

    #[test]
    fn disconnected_components_swap() {
        // Two disjoint edges: each edge flips, and the edges swap: 2*2*2 = 8.
        let g = ColoredGraph::new(4, &[(0, 1), (2, 3)], vec![0; 4]).unwrap();
        assert_eq!(count_automorphisms(&g).unwrap(), 8);
    }

    #[test]
    fn empty_and_complete_graphs() {
        let e = ColoredGraph::new(4, &[], vec![0; 4]).unwrap();
        assert_eq!(count_automorphisms(&e).unwrap(), 24);
        let edges: Vec<(u32, u32)> =
            (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        let k4 = ColoredGraph::new(4, &edges, vec![0; 4]).unwrap();
        assert_eq!(count_automorphisms(&k4).unwrap(), 24);
    }
}
