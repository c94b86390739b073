//! Ordered-partition data structure and equitable refinement.
//!
//! The partition keeps vertices in one flat array grouped by cell, plus the
//! inverse position map and per-position cell bookkeeping, so splitting a
//! cell touches only that cell's slice. Refinement is the usual worklist
//! scheme: pull a splitter cell, count neighbors of its members, split every
//! affected cell by count, enqueue fragments (skipping one largest fragment
//! when the parent cell was not queued).
//!
//! Every refinement accumulates a 64-bit trace hash over the sequence of
//! (splitter position, cell position, count value, fragment size) events.
//! Those quantities are determined by the partition structure alone, never
//! by vertex labels, so corresponding nodes of isomorphic graphs produce
//! identical traces.

use std::collections::VecDeque;

use crate::graph::ColoredGraph;

#[derive(Debug, Clone)]
pub(crate) struct Partition {
    /// Vertices grouped by cell.
    order: Vec<u32>,
    /// pos[v] = index of v in `order`.
    pos: Vec<u32>,
    /// cell_of[p] = start position of the cell containing position p.
    cell_of: Vec<u32>,
    /// cell_len[s] = length of the cell starting at position s (only
    /// meaningful at start positions).
    cell_len: Vec<u32>,
    num_cells: usize,
}

/// Snapshot of a partition, restored when the search backtracks.
pub(crate) struct Snapshot {
    order: Vec<u32>,
    pos: Vec<u32>,
    cell_of: Vec<u32>,
    cell_len: Vec<u32>,
    num_cells: usize,
}

/// Reusable buffers for the refinement inner loop.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    count: Vec<u32>,
    touched: Vec<u32>,
    affected: Vec<u32>,
    cell_marked: Vec<bool>,
    splitter: Vec<u32>,
    bucket: Vec<u32>,
    values: Vec<u32>,
    rebuilt: Vec<u32>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Scratch {
            count: vec![0; n],
            touched: Vec::with_capacity(n),
            affected: Vec::with_capacity(n),
            cell_marked: vec![false; n],
            bucket: vec![0; n + 1],
            values: Vec::with_capacity(n),
            splitter: Vec::with_capacity(n),
            rebuilt: Vec::with_capacity(n),
        }
    }
}

const HASH_SEED: u64 = 0xcbf29ce484222325;

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x100000001b3).rotate_left(23)
}

impl Partition {
    /// The unit partition grouped by vertex color, colors ascending.
    pub(crate) fn from_colors(g: &ColoredGraph) -> Partition {
        let n = g.vertex_count();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&v| (g.color(v as usize), v));
        let mut pos = vec![0u32; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        let mut cell_of = vec![0u32; n];
        let mut cell_len = vec![0u32; n];
        let mut num_cells = 0;
        let mut start = 0usize;
        while start < n {
            let color = g.color(order[start] as usize);
            let mut end = start;
            while end < n && g.color(order[end] as usize) == color {
                end += 1;
            }
            for p in start..end {
                cell_of[p] = start as u32;
            }
            cell_len[start] = (end - start) as u32;
            num_cells += 1;
            start = end;
        }
        Partition { order, pos, cell_of, cell_len, num_cells }
    }

    pub(crate) fn is_discrete(&self) -> bool {
        self.num_cells == self.order.len()
    }

    pub(crate) fn position_of(&self, v: u32) -> u32 {
        self.pos[v as usize]
    }

    /// The canonical-index map at a discrete partition.
    pub(crate) fn labeling(&self) -> &[u32] {
        &self.pos
    }

    pub(crate) fn vertex_at(&self, position: usize) -> u32 {
        self.order[position]
    }

    /// Start positions of all cells, in position order.
    pub(crate) fn cell_starts(&self) -> Vec<u32> {
        let mut starts = Vec::with_capacity(self.num_cells);
        let mut p = 0usize;
        while p < self.order.len() {
            starts.push(p as u32);
            p += self.cell_len[p] as usize;
        }
        starts
    }

    /// Start of the first largest non-singleton cell. Individualizing in a
    /// big cell splits the most at once; on incidence graphs of planes the
    /// small cells are pencils whose members stay symmetric for many levels,
    /// so picking them first sends the search down a deep, useless spine.
    pub(crate) fn target_cell(&self) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        let mut p = 0usize;
        while p < self.order.len() {
            let len = self.cell_len[p];
            if len > 1 && best.map_or(true, |(blen, _)| len > blen) {
                best = Some((len, p as u32));
            }
            p += len as usize;
        }
        best.map(|(_, start)| start)
    }

    /// Members of the cell starting at `start`, sorted by vertex index.
    pub(crate) fn cell_members_sorted(&self, start: u32) -> Vec<u32> {
        let s = start as usize;
        let mut members = self.order[s..s + self.cell_len[s] as usize].to_vec();
        members.sort_unstable();
        members
    }

    pub(crate) fn snapshot(&self) -> Snapshot {
        Snapshot {
            order: self.order.clone(),
            pos: self.pos.clone(),
            cell_of: self.cell_of.clone(),
            cell_len: self.cell_len.clone(),
            num_cells: self.num_cells,
        }
    }

    pub(crate) fn restore(&mut self, snap: &Snapshot) {
        self.order.copy_from_slice(&snap.order);
        self.pos.copy_from_slice(&snap.pos);
        self.cell_of.copy_from_slice(&snap.cell_of);
        self.cell_len.copy_from_slice(&snap.cell_len);
        self.num_cells = snap.num_cells;
    }

    /// Splits {v} off the front of its cell. Returns the singleton's start
    /// position. The caller refines with that position as the worklist.
    pub(crate) fn individualize(&mut self, v: u32) -> u32 {
        let s = self.cell_of[self.pos[v as usize] as usize] as usize;
        let len = self.cell_len[s] as usize;
        debug_assert!(len > 1, "cannot individualize inside a singleton");
        let pv = self.pos[v as usize] as usize;
        let other = self.order[s];
        self.order.swap(s, pv);
        self.pos[v as usize] = s as u32;
        self.pos[other as usize] = pv as u32;
        self.cell_len[s] = 1;
        self.cell_len[s + 1] = (len - 1) as u32;
        for p in (s + 1)..(s + len) {
            self.cell_of[p] = (s + 1) as u32;
        }
        self.num_cells += 1;
        s as u32
    }

    /// Refines to the coarsest equitable partition reachable from the given
    /// worklist of splitter cells. Returns the trace hash of the run.
    pub(crate) fn refine(
        &mut self,
        g: &ColoredGraph,
        worklist: &[u32],
        scratch: &mut Scratch,
    ) -> u64 {
        let n = self.order.len();
        let mut hash = HASH_SEED;
        let mut queue: VecDeque<u32> = VecDeque::with_capacity(n);
        let mut in_queue = vec![false; n];
        for &s in worklist {
            if !in_queue[s as usize] {
                in_queue[s as usize] = true;
                queue.push_back(s);
            }
        }

        while let Some(ws) = queue.pop_front() {
            if self.num_cells == n {
                // Discrete already; nothing left to split. Drain quietly so
                // the trace stays a function of the partition sequence.
                break;
            }
            let ws = ws as usize;
            in_queue[ws] = false;
            hash = mix(hash, ws as u64);

            scratch.splitter.clear();
            scratch
                .splitter
                .extend_from_slice(&self.order[ws..ws + self.cell_len[ws] as usize]);

            // Count edges from every vertex into the splitter.
            scratch.touched.clear();
            for &w in &scratch.splitter {
                for &x in g.neighbors(w as usize) {
                    if scratch.count[x as usize] == 0 {
                        scratch.touched.push(x);
                    }
                    scratch.count[x as usize] += 1;
                }
            }

            scratch.affected.clear();
            for &x in &scratch.touched {
                let c = self.cell_of[self.pos[x as usize] as usize];
                if !scratch.cell_marked[c as usize] {
                    scratch.cell_marked[c as usize] = true;
                    scratch.affected.push(c);
                }
            }
            scratch.affected.sort_unstable();

            for ai in 0..scratch.affected.len() {
                let cs = scratch.affected[ai] as usize;
                scratch.cell_marked[cs] = false;
                let cl = self.cell_len[cs] as usize;
                if cl == 1 {
                    hash = mix(hash, cs as u64);
                    hash = mix(hash, scratch.count[self.order[cs] as usize] as u64);
                    continue;
                }

                // Bucket the cell's members by count value.
                scratch.values.clear();
                for p in cs..cs + cl {
                    let c = scratch.count[self.order[p] as usize];
                    if scratch.bucket[c as usize] == 0 {
                        scratch.values.push(c);
                    }
                    scratch.bucket[c as usize] += 1;
                }
                scratch.values.sort_unstable();

                hash = mix(hash, cs as u64);
                if scratch.values.len() == 1 {
                    hash = mix(hash, scratch.values[0] as u64);
                    scratch.bucket[scratch.values[0] as usize] = 0;
                    continue;
                }

                // Stable counting sort of the slice by count, ascending.
                let mut offset = cs;
                let mut largest = (0u32, cs as u32);
                for &val in &scratch.values {
                    let size = scratch.bucket[val as usize];
                    scratch.bucket[val as usize] = offset as u32;
                    hash = mix(hash, val as u64);
                    hash = mix(hash, size as u64);
                    if size > largest.0 {
                        largest = (size, offset as u32);
                    }
                    offset += size as usize;
                }
                scratch.rebuilt.clear();
                scratch.rebuilt.extend_from_slice(&self.order[cs..cs + cl]);
                for &v in &scratch.rebuilt {
                    let val = scratch.count[v as usize];
                    let dst = scratch.bucket[val as usize] as usize;
                    scratch.bucket[val as usize] += 1;
                    self.order[dst] = v;
                    self.pos[v as usize] = dst as u32;
                }

                // Fragment bookkeeping: bucket[val] now holds each
                // fragment's end position.
                let was_queued = in_queue[cs];
                let mut frag_start = cs;
                for &val in &scratch.values {
                    let frag_end = scratch.bucket[val as usize] as usize;
                    scratch.bucket[val as usize] = 0;
                    for p in frag_start..frag_end {
                        self.cell_of[p] = frag_start as u32;
                    }
                    self.cell_len[frag_start] = (frag_end - frag_start) as u32;
                    let enqueue = if was_queued {
                        // The parent cell was pending; all fragments stand in
                        // for it. Its slot persists at cs.
                        frag_start != cs
                    } else {
                        frag_start as u32 != largest.1
                    };
                    if enqueue && !in_queue[frag_start] {
                        in_queue[frag_start] = true;
                        queue.push_back(frag_start as u32);
                    }
                    frag_start = frag_end;
                }
                self.num_cells += scratch.values.len() - 1;
            }

            for &x in &scratch.touched {
                scratch.count[x as usize] = 0;
            }
        }

        // Unprocessed queue entries must not leak marks into the next run.
        hash = mix(hash, self.num_cells as u64);
        hash
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{incidence_graph, ColoredGraph, GraphColoring};

    fn path3() -> ColoredGraph {
        ColoredGraph::new(3, &[(0, 1), (1, 2)], vec![0, 0, 0]).unwrap()
    }

    fn refine_all(g: &ColoredGraph) -> Partition {
        let mut part = Partition::from_colors(g);
        let starts = part.cell_starts();
        let mut scratch = Scratch::new(g.vertex_count());
        part.refine(g, &starts, &mut scratch);
        part
    }

    #[test]
    fn regular_unicolored_graph_stays_coarse() {
        let square = ColoredGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![0; 4]).unwrap();
        let part = refine_all(&square);
        assert_eq!(part.cell_starts(), vec![0]);
    }

    #[test]
    fn path_splits_endpoints_from_middle() {
        let part = refine_all(&path3());
        assert_eq!(part.cell_starts().len(), 2);
        // Degree-1 endpoints first (two of them), middle vertex alone.
        let starts = part.cell_starts();
        let endpoint_cell = part.cell_members_sorted(starts[0]);
        let middle_cell = part.cell_members_sorted(starts[1]);
        assert_eq!(endpoint_cell, vec![0, 2]);
        assert_eq!(middle_cell, vec![1]);
    }

    #[test]
    fn individualization_refines_plane_graph() {
        let s = crate::geometry::build_pg2(16).unwrap();
        let g = incidence_graph(&s, None, GraphColoring::SelfDual).unwrap();
        let mut part = Partition::from_colors(&g);
        let mut scratch = Scratch::new(g.vertex_count());
        part.refine(&g, &part.cell_starts(), &mut scratch);
        assert_eq!(part.cell_starts().len(), 1, "17-regular graph is equitable");
        let s0 = part.individualize(0);
        part.refine(&g, &[s0], &mut scratch);
        // {v}, its 17 neighbors, 272 points, 256 lines.
        let sizes: Vec<u32> = part
            .cell_starts()
            .iter()
            .map(|&s| part.cell_members_sorted(s).len() as u32)
            .collect();
        let mut sorted = sizes.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 17, 256, 272]);
    }

    #[test]
    fn equitable_property_holds_after_refinement() {
        let s = crate::geometry::build_pg2(4).unwrap();
        let g = incidence_graph(&s, None, GraphColoring::PointBlock).unwrap();
        let mut part = Partition::from_colors(&g);
        let mut scratch = Scratch::new(g.vertex_count());
        part.refine(&g, &part.cell_starts(), &mut scratch);
        part.individualize(3);
        part.refine(&g, &[part.position_of(3)], &mut scratch);
        // Every cell has uniform neighbor counts into every cell.
        let starts = part.cell_starts();
        for &a in &starts {
            let members = part.cell_members_sorted(a);
            for &b in &starts {
                let target = part.cell_members_sorted(b);
                let counts: Vec<usize> = members
                    .iter()
                    .map(|&v| {
                        g.neighbors(v as usize)
                            .iter()
                            .filter(|w| target.contains(w))
                            .count()
                    })
                    .collect();
                assert!(counts.windows(2).all(|w| w[0] == w[1]), "cells {a}->{b}");
            }
        }
    }

    #[test]
    fn snapshot_roundtrip() {
        let g = path3();
        let mut part = Partition::from_colors(&g);
        let mut scratch = Scratch::new(3);
        let snap = part.snapshot();
        part.refine(&g, &part.cell_starts(), &mut scratch);
        assert_eq!(part.cell_starts().len(), 2);
        part.restore(&snap);
        assert_eq!(part.cell_starts().len(), 1);
    }
}
