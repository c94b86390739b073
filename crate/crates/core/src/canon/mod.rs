//! Colored-graph automorphism groups, canonical forms and isomorphism
//! testing, via individualization-refinement.

pub mod exhaustive;
mod refine;
mod search;

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::group::{self, GroupChain};
use crate::perm::Permutation;

pub use search::CanonConfig;
pub(crate) use search::is_automorphism;

/// Canonical encoding of a colored graph: equal exactly for isomorphic
/// graphs. Layout: vertex count as big-endian u32, the canonical color
/// sequence (big-endian u32 per vertex), then the upper triangle of the
/// canonical adjacency matrix packed row-major, most significant bit first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate(Vec<u8>);

impl Certificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Short hex fingerprint for reports.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(&self.0);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({} bytes, {})", self.0.len(), self.fingerprint())
    }
}

/// Automorphism group of a colored graph.
#[derive(Debug, Clone)]
pub struct AutResult {
    pub generators: Vec<Permutation>,
    pub order: BigUint,
    pub orbits: Vec<Vec<u32>>,
    /// Maps each vertex to its canonical index.
    pub canonical_labeling: Permutation,
    /// Search-tree nodes the computation took.
    pub nodes: u64,
}

/// Computes generators, exact order, orbits and the canonical labeling of
/// the color-preserving automorphism group.
pub fn automorphism_group(g: &ColoredGraph) -> Result<AutResult> {
    automorphism_group_with(g, &CanonConfig::default())
}

pub fn automorphism_group_with(g: &ColoredGraph, config: &CanonConfig) -> Result<AutResult> {
    let outcome = search::run(g, config)?;
    for p in &outcome.generators {
        if !is_automorphism(g, p) {
            return Err(Error::Contract(
                "search produced a non-automorphism generator".into(),
            ));
        }
    }
    let chain = group::schreier_sims(g.vertex_count(), &outcome.generators)?;
    let orbits = group::orbits(&outcome.generators, g.vertex_count());
    Ok(AutResult {
        order: chain.order().clone(),
        orbits,
        generators: outcome.generators,
        canonical_labeling: Permutation::from_images(outcome.canonical_labeling)?,
        nodes: outcome.nodes,
    })
}

/// The verified stabilizer chain of the automorphism group.
pub fn automorphism_chain(g: &ColoredGraph, config: &CanonConfig) -> Result<GroupChain> {
    let outcome = search::run(g, config)?;
    group::schreier_sims(g.vertex_count(), &outcome.generators)
}

/// Canonical certificate and labeling. Isomorphic graphs (colors permuted
/// along with vertices) get byte-identical certificates.
pub fn canonical_form(g: &ColoredGraph) -> Result<(Certificate, Permutation)> {
    canonical_form_with(g, &CanonConfig::default())
}

pub fn canonical_form_with(
    g: &ColoredGraph,
    config: &CanonConfig,
) -> Result<(Certificate, Permutation)> {
    let outcome = search::run(g, config)?;
    Ok((
        Certificate(outcome.certificate_bytes),
        Permutation::from_images(outcome.canonical_labeling)?,
    ))
}

/// Explicit isomorphism when one exists: a map taking vertices of `g1` to
/// vertices of `g2`, verified edge by edge before being returned.
pub fn are_isomorphic(g1: &ColoredGraph, g2: &ColoredGraph) -> Result<Option<Permutation>> {
    if g1.vertex_count() != g2.vertex_count() {
        return Ok(None);
    }
    let (c1, l1) = canonical_form(g1)?;
    let (c2, l2) = canonical_form(g2)?;
    if c1 != c2 {
        return Ok(None);
    }
    let mapping = l1.then(&l2.inverse());
    let n = g1.vertex_count();
    for v in 0..n {
        let mv = mapping.apply(v);
        if g1.color(v) != g2.color(mv) {
            return Err(Error::Contract("certificate matched but colors do not".into()));
        }
        for &w in g1.neighbors(v) {
            if !g2.adjacent(mv, mapping.apply(w as usize)) {
                return Err(Error::Contract("certificate matched but edges do not".into()));
            }
        }
        if g1.degree(v) != g2.degree(mv) {
            return Err(Error::Contract("certificate matched but degrees do not".into()));
        }
    }
    Ok(Some(mapping))
}
