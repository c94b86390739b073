//! Individualization-refinement search for canonical labelings and
//! automorphism generators.
//!
//! The tree is explored depth-first. Two reference leaves are kept: the
//! first leaf reached anchors automorphism detection, and the best leaf so
//! far (ordered by invariant path, then by labeled-graph bytes, larger
//! winning) defines the canonical form. A node is pruned when its invariant
//! path can no longer match the first leaf nor beat the best one. Every
//! discovered automorphism is recorded and used to skip branch vertices in
//! the same orbit of the subgroup fixing the node's individualized prefix,
//! and the search jumps straight back to the deepest node shared with the
//! matched reference path.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::perm::Permutation;

use super::refine::{Partition, Scratch};

#[derive(Debug, Clone)]
pub struct CanonConfig {
    /// Ceiling on search-tree nodes before giving up with a resource error.
    pub node_budget: u64,
}

impl Default for CanonConfig {
    fn default() -> Self {
        CanonConfig { node_budget: 100_000_000 }
    }
}

pub(crate) struct IrOutcome {
    pub generators: Vec<Permutation>,
    /// Vertex -> canonical index.
    pub canonical_labeling: Vec<u32>,
    pub certificate_bytes: Vec<u8>,
    pub nodes: u64,
}

struct PathRecord {
    base: Vec<u32>,
    inv: Vec<u64>,
    labeling: Vec<u32>,
    bytes: Vec<u8>,
}

/// Serialized form of a labeled graph: vertex count (big-endian u32), the
/// color of each canonical vertex (big-endian u32 each), then the upper
/// triangle of the adjacency matrix in row-major order, most significant
/// bit first.
pub(crate) fn certificate_bytes(g: &ColoredGraph, labeling: &[u32]) -> Vec<u8> {
    let n = g.vertex_count();
    let mut inverse = vec![0u32; n];
    for (v, &idx) in labeling.iter().enumerate() {
        inverse[idx as usize] = v as u32;
    }
    let bit_count = n * n.saturating_sub(1) / 2;
    let mut bytes = Vec::with_capacity(4 + 4 * n + bit_count.div_ceil(8));
    bytes.extend_from_slice(&(n as u32).to_be_bytes());
    for &v in &inverse {
        bytes.extend_from_slice(&g.color(v as usize).to_be_bytes());
    }
    let mut acc = 0u8;
    let mut filled = 0u8;
    for i in 0..n {
        for j in (i + 1)..n {
            acc <<= 1;
            if g.adjacent(inverse[i] as usize, inverse[j] as usize) {
                acc |= 1;
            }
            filled += 1;
            if filled == 8 {
                bytes.push(acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        bytes.push(acc << (8 - filled));
    }
    bytes
}

struct LevelOrbits {
    parent: Vec<u32>,
}

impl LevelOrbits {
    fn new(n: usize) -> Self {
        LevelOrbits { parent: (0..n as u32).collect() }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }

    fn merge_generator(&mut self, g: &Permutation) {
        for v in 0..g.degree() as u32 {
            self.union(v, g.apply(v as usize) as u32);
        }
    }
}

struct Searcher<'g> {
    g: &'g ColoredGraph,
    budget: u64,
    nodes: u64,
    zeta: Option<PathRecord>,
    best: Option<PathRecord>,
    /// Bumped whenever `best` is replaced so suspended ancestors can notice.
    best_stamp: u64,
    autos: Vec<Permutation>,
    base_stack: Vec<u32>,
    inv_stack: Vec<u64>,
    level_orbits: Vec<LevelOrbits>,
    scratch: Scratch,
}

pub(crate) fn run(g: &ColoredGraph, config: &CanonConfig) -> Result<IrOutcome> {
    let n = g.vertex_count();
    let mut searcher = Searcher {
        g,
        budget: config.node_budget,
        nodes: 0,
        zeta: None,
        best: None,
        best_stamp: 0,
        autos: Vec::new(),
        base_stack: Vec::new(),
        inv_stack: Vec::new(),
        level_orbits: Vec::new(),
        scratch: Scratch::new(n),
    };
    let mut part = Partition::from_colors(g);
    let starts = part.cell_starts();
    let root_inv = part.refine(g, &starts, &mut searcher.scratch);
    searcher.inv_stack.push(root_inv);
    searcher.node(&mut part, 0, true, Ordering::Equal)?;

    let best = searcher.best.expect("search always reaches at least one leaf");
    Ok(IrOutcome {
        generators: searcher.autos,
        canonical_labeling: best.labeling,
        certificate_bytes: best.bytes,
        nodes: searcher.nodes,
    })
}

impl<'g> Searcher<'g> {
    /// Processes one refined node. Returns the depth to unwind to: siblings
    /// at depths greater than the returned value are abandoned.
    fn node(
        &mut self,
        part: &mut Partition,
        depth: usize,
        eq_zeta: bool,
        cmp_best: Ordering,
    ) -> Result<usize> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!(
                "canonical labeling exceeded {} search nodes",
                self.budget
            )));
        }
        if part.is_discrete() {
            return self.leaf(part, depth, eq_zeta, cmp_best);
        }

        let target = part.target_cell().expect("non-discrete partition has a target");
        let members = part.cell_members_sorted(target);
        self.ensure_orbits(depth);

        let mut explored: Vec<u32> = Vec::new();
        let mut stamp = self.best_stamp;
        let mut cmp_best = cmp_best;
        for v in members {
            if stamp != self.best_stamp {
                // A descendant installed a new best leaf; this node lies on
                // the new best path, so its invariant prefix now reads equal.
                if cmp_best == Ordering::Greater {
                    cmp_best = Ordering::Equal;
                }
                stamp = self.best_stamp;
            }
            {
                let uf = &mut self.level_orbits[depth];
                if explored.iter().any(|&u| uf.find(u) == uf.find(v)) {
                    continue;
                }
            }
            explored.push(v);

            let snap = part.snapshot();
            let singleton = part.individualize(v);
            let inv = part.refine(self.g, &[singleton], &mut self.scratch);
            self.base_stack.push(v);
            self.inv_stack.push(inv);
            let child_depth = depth + 1;

            let child_eq_zeta = eq_zeta
                && match &self.zeta {
                    None => true,
                    Some(z) => child_depth < z.inv.len() && inv == z.inv[child_depth],
                };
            let child_cmp = match cmp_best {
                Ordering::Equal => match &self.best {
                    None => Ordering::Equal,
                    // A node outliving the best leaf's depth with an equal
                    // prefix ranks below it; shorter paths win ties.
                    Some(b) if child_depth >= b.inv.len() => Ordering::Less,
                    Some(b) => inv.cmp(&b.inv[child_depth]),
                },
                sticky => sticky,
            };

            let back = if !child_eq_zeta && child_cmp == Ordering::Less {
                child_depth
            } else {
                self.node(part, child_depth, child_eq_zeta, child_cmp)?
            };

            self.base_stack.pop();
            self.inv_stack.pop();
            part.restore(&snap);

            if back < depth {
                return Ok(back);
            }
        }
        Ok(depth)
    }

    fn leaf(
        &mut self,
        part: &Partition,
        depth: usize,
        eq_zeta: bool,
        cmp_best: Ordering,
    ) -> Result<usize> {
        let labeling = part.labeling().to_vec();

        if self.zeta.is_none() {
            let bytes = certificate_bytes(self.g, &labeling);
            self.zeta = Some(PathRecord {
                base: self.base_stack.clone(),
                inv: self.inv_stack.clone(),
                labeling: labeling.clone(),
                bytes: bytes.clone(),
            });
            self.best = Some(PathRecord {
                base: self.base_stack.clone(),
                inv: self.inv_stack.clone(),
                labeling,
                bytes,
            });
            return Ok(depth);
        }

        if eq_zeta && self.zeta.as_ref().unwrap().base.len() == depth {
            let bytes = certificate_bytes(self.g, &labeling);
            if bytes == self.zeta.as_ref().unwrap().bytes {
                return Ok(self.record_automorphism(&labeling, depth, true));
            }
            // Not an automorphism of the first leaf; it may still beat the
            // best leaf below.
            return Ok(self.compare_with_best(labeling, bytes, depth, cmp_best));
        }

        match cmp_best {
            Ordering::Greater | Ordering::Equal => {
                let bytes = certificate_bytes(self.g, &labeling);
                Ok(self.compare_with_best(labeling, bytes, depth, cmp_best))
            }
            Ordering::Less => Ok(depth),
        }
    }

    fn compare_with_best(
        &mut self,
        labeling: Vec<u32>,
        bytes: Vec<u8>,
        depth: usize,
        cmp_best: Ordering,
    ) -> usize {
        let replace = match cmp_best {
            Ordering::Greater => true,
            Ordering::Equal => {
                let best = self.best.as_ref().unwrap();
                if best.base.len() != depth {
                    // Equal prefix but this leaf came earlier: it outranks
                    // the deeper best (matches the Less rule for deeper
                    // nodes in `node`).
                    depth < best.base.len()
                } else {
                    match bytes.cmp(&best.bytes) {
                        Ordering::Greater => true,
                        Ordering::Equal => {
                            return self.record_automorphism(&labeling, depth, false);
                        }
                        Ordering::Less => false,
                    }
                }
            }
            Ordering::Less => false,
        };
        if replace {
            self.best = Some(PathRecord {
                base: self.base_stack.clone(),
                inv: self.inv_stack.clone(),
                labeling,
                bytes,
            });
            self.best_stamp += 1;
        }
        depth
    }

    /// Extracts the automorphism mapping the reference leaf (zeta or best)
    /// onto the current one, merges it into the orbit structures of every
    /// level whose prefix it fixes, and decides how far to backjump.
    fn record_automorphism(&mut self, labeling: &[u32], depth: usize, from_zeta: bool) -> usize {
        let reference = if from_zeta {
            self.zeta.as_ref().unwrap()
        } else {
            self.best.as_ref().unwrap()
        };
        let n = labeling.len();
        let mut inverse = vec![0u32; n];
        for (v, &idx) in labeling.iter().enumerate() {
            inverse[idx as usize] = v as u32;
        }
        let images: Vec<u32> =
            (0..n).map(|v| inverse[reference.labeling[v] as usize]).collect();
        let gamma = Permutation::from_images(images).expect("leaf labelings are bijections");
        debug_assert!(is_automorphism(self.g, &gamma));

        // How much of the current individualized prefix does gamma fix?
        let fixed_prefix = self
            .base_stack
            .iter()
            .take_while(|&&b| gamma.apply(b as usize) == b as usize)
            .count();
        // Does gamma map the reference base onto the current one? If so the
        // whole sibling range between here and the divergence point is
        // mirrored by an already-explored subtree and can be skipped.
        let maps_base = reference.base.len() == depth
            && reference
                .base
                .iter()
                .zip(&self.base_stack)
                .all(|(&zb, &cb)| gamma.apply(zb as usize) == cb as usize);
        let jump_to = if maps_base {
            reference
                .base
                .iter()
                .zip(&self.base_stack)
                .take_while(|(&zb, &cb)| zb == cb)
                .count()
        } else {
            depth
        };

        for level in 0..=fixed_prefix.min(self.level_orbits.len() - 1) {
            self.level_orbits[level].merge_generator(&gamma);
        }
        self.autos.push(gamma);
        jump_to
    }

    fn ensure_orbits(&mut self, depth: usize) {
        let n = self.g.vertex_count();
        while self.level_orbits.len() <= depth {
            self.level_orbits.push(LevelOrbits::new(n));
        }
        let uf = &mut self.level_orbits[depth];
        uf.reset();
        let prefix = &self.base_stack[..depth];
        for gamma in &self.autos {
            if prefix.iter().all(|&b| gamma.apply(b as usize) == b as usize) {
                uf.merge_generator(gamma);
            }
        }
    }
}

pub(crate) fn is_automorphism(g: &ColoredGraph, p: &Permutation) -> bool {
    let n = g.vertex_count();
    if p.degree() != n {
        return false;
    }
    (0..n).all(|v| {
        let pv = p.apply(v);
        g.color(v) == g.color(pv)
            && g.neighbors(v).len() == g.neighbors(pv).len()
            && g.neighbors(v).iter().all(|&w| g.adjacent(pv, p.apply(w as usize)))
    })
}
