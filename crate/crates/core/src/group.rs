//! Exact permutation groups via base and strong generating sets.
//!
//! The chain is built with the deterministic Schreier-Sims procedure:
//! every Schreier generator is processed and must sift to the identity,
//! so the reported order is exact, not probabilistic. `verify` re-runs
//! that check from scratch.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::incidence::PointSet;
use crate::perm::Permutation;

/// One level of the stabilizer chain.
#[derive(Debug, Clone)]
struct Level {
    base: u32,
    /// Indices into the global strong-generator pool of the generators
    /// fixing all earlier base points.
    gens: Vec<usize>,
    /// Orbit of `base` under those generators, in discovery order.
    orbit: Vec<u32>,
    /// rep[p] maps `base` to `p`; entries are written once.
    rep: Vec<Option<Permutation>>,
    /// processed[i] = how many of `gens` have been expanded at orbit[i].
    processed: Vec<usize>,
}

impl Level {
    fn new(degree: usize, base: u32) -> Self {
        let mut rep = vec![None; degree];
        rep[base as usize] = Some(Permutation::identity(degree));
        Level { base, gens: Vec::new(), orbit: vec![base], rep, processed: vec![0] }
    }

    fn pending_pair(&self) -> Option<(usize, usize)> {
        (0..self.orbit.len())
            .find(|&i| self.processed[i] < self.gens.len())
            .map(|i| (i, self.processed[i]))
    }
}

/// A base and strong generating set with exact group order.
#[derive(Debug, Clone)]
pub struct GroupChain {
    degree: usize,
    pool: Vec<Permutation>,
    levels: Vec<Level>,
    order: BigUint,
}

/// Builds a verified stabilizer chain for the group generated by `generators`.
pub fn schreier_sims(degree: usize, generators: &[Permutation]) -> Result<GroupChain> {
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::shape(format!(
            "generator degree {} differs from domain size {degree}",
            g.degree()
        )));
    }
    let mut chain =
        GroupChain { degree, pool: Vec::new(), levels: Vec::new(), order: BigUint::one() };
    for g in generators {
        chain.insert(g.clone());
    }
    chain.order = chain.levels.iter().map(|l| BigUint::from(l.orbit.len())).product();
    chain.verify()?;
    Ok(chain)
}

impl GroupChain {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.pool
    }

    /// Sifts an element through the chain starting at `level`. Returns the
    /// first level where the residue has no transversal entry, together
    /// with the residue itself; a residue of identity means membership.
    fn sift_from(&self, mut level: usize, mut g: Permutation) -> (usize, Permutation) {
        while level < self.levels.len() {
            if g.is_identity() {
                break;
            }
            let lvl = &self.levels[level];
            let img = g.apply(lvl.base as usize);
            match &lvl.rep[img] {
                None => break,
                Some(rep) => g = g.then(&rep.inverse()),
            }
            level += 1;
        }
        (level, g)
    }

    fn insert(&mut self, g: Permutation) {
        let (level, residue) = self.sift_from(0, g);
        if residue.is_identity() {
            return;
        }
        self.add_strong_generator(level, residue);
        self.process_pending();
    }

    /// Registers a new strong generator whose sift dropped out at `level`,
    /// creating the level if the chain was exhausted.
    fn add_strong_generator(&mut self, level: usize, g: Permutation) {
        if level == self.levels.len() {
            self.levels.push(Level::new(self.degree, choose_base(&g)));
        }
        let gen_idx = self.pool.len();
        self.pool.push(g);
        // The generator joins every level whose base prefix it fixes.
        for i in 0..self.levels.len() {
            if i > 0 && self.pool[gen_idx].apply(self.levels[i - 1].base as usize)
                != self.levels[i - 1].base as usize
            {
                break;
            }
            self.levels[i].gens.push(gen_idx);
        }
    }

    /// Drains Schreier-generator work until every level is closed.
    fn process_pending(&mut self) {
        loop {
            let Some(level) = (0..self.levels.len())
                .rev()
                .find(|&i| self.levels[i].pending_pair().is_some())
            else {
                return;
            };
            let (pos, gidx) = self.levels[level].pending_pair().unwrap();
            self.levels[level].processed[pos] = gidx + 1;

            let lvl = &self.levels[level];
            let delta = lvl.orbit[pos];
            let s = &self.pool[lvl.gens[gidx]];
            let gamma = s.apply(delta as usize);
            let rep_delta = lvl.rep[delta as usize].as_ref().unwrap().clone();
            let to_gamma = rep_delta.then(s);
            if self.levels[level].rep[gamma].is_none() {
                let lvl = &mut self.levels[level];
                lvl.rep[gamma] = Some(to_gamma.clone());
                lvl.orbit.push(gamma as u32);
                lvl.processed.push(0);
            }
            let schreier =
                to_gamma.then(&self.levels[level].rep[gamma].as_ref().unwrap().inverse());
            if schreier.is_identity() {
                continue;
            }
            let (l, residue) = self.sift_from(level + 1, schreier);
            if !residue.is_identity() {
                self.add_strong_generator(l, residue);
            }
        }
    }

    /// Re-checks the defining property of the chain: every generator of a
    /// level fixes all earlier base points, and every Schreier generator
    /// sifts to the identity.
    pub fn verify(&self) -> Result<()> {
        for (i, lvl) in self.levels.iter().enumerate() {
            for &gi in &lvl.gens {
                let g = &self.pool[gi];
                for earlier in &self.levels[..i] {
                    if g.apply(earlier.base as usize) != earlier.base as usize {
                        return Err(Error::Contract(format!(
                            "level {i} generator moves base point {}",
                            earlier.base
                        )));
                    }
                }
            }
            for &delta in &lvl.orbit {
                let rep_delta = lvl.rep[delta as usize].as_ref().unwrap();
                for &gi in &lvl.gens {
                    let s = &self.pool[gi];
                    let gamma = s.apply(delta as usize);
                    let rep_gamma = lvl.rep[gamma].as_ref().ok_or_else(|| {
                        Error::Contract(format!("orbit of level {i} not closed"))
                    })?;
                    let schreier = rep_delta.then(s).then(&rep_gamma.inverse());
                    let (_, residue) = self.sift_from(i + 1, schreier);
                    if !residue.is_identity() {
                        return Err(Error::Contract(format!(
                            "Schreier generator at level {i} does not sift to identity"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Membership test by sifting.
    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::shape(format!(
                "element degree {} differs from chain degree {}",
                g.degree(),
                self.degree
            )));
        }
        let (_, residue) = self.sift_from(0, g.clone());
        Ok(residue.is_identity())
    }

    /// Exactly uniform random group element: the product of independently
    /// uniform transversal representatives, one per level.
    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        // Deepest representative applies first.
        for lvl in self.levels.iter().rev() {
            let delta = lvl.orbit[rng.gen_range(0..lvl.orbit.len())];
            g = g.then(lvl.rep[delta as usize].as_ref().unwrap());
        }
        g
    }

    /// Convenience wrapper seeding the generator used by `random_element`.
    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Exact order of the setwise stabilizer {g : g(set) = set}, by
    /// backtracking over the stabilizer-chain tree. Branches whose base
    /// image lands on the wrong side of the set are pruned; complete
    /// elements are still checked in full before being counted.
    ///
    /// Feasible only for small groups; refuses when |G| exceeds
    /// `SETWISE_ORACLE_LIMIT` rather than risk runaway work.
    pub fn setwise_stabilizer_order(&self, set: &PointSet) -> Result<BigUint> {
        if self.order > BigUint::from(SETWISE_ORACLE_LIMIT) {
            return Err(Error::Budget(format!(
                "setwise stabilizer oracle limited to groups of order <= {SETWISE_ORACLE_LIMIT}, \
                 got {}",
                self.order
            )));
        }
        if let Some(&bad) = set.iter().find(|&&p| p as usize >= self.degree) {
            return Err(Error::OutOfRange { index: bad as usize, limit: self.degree });
        }
        let mut count = 0u64;
        self.stabilizer_dfs(0, &Permutation::identity(self.degree), set, &mut count);
        Ok(BigUint::from(count))
    }

    fn stabilizer_dfs(
        &self,
        level: usize,
        outer: &Permutation,
        set: &PointSet,
        count: &mut u64,
    ) {
        if level == self.levels.len() {
            let fixes = set.iter().all(|&p| set.contains(outer.apply(p as usize) as u32));
            if fixes {
                *count += 1;
            }
            return;
        }
        let lvl = &self.levels[level];
        let base_in_set = set.contains(lvl.base);
        for &delta in &lvl.orbit {
            // outer is applied after the deeper part, so the final image of
            // this base point is already determined here.
            let image = outer.apply(delta as usize) as u32;
            if set.contains(image) != base_in_set {
                continue;
            }
            let next = lvl.rep[delta as usize].as_ref().unwrap().then(outer);
            self.stabilizer_dfs(level + 1, &next, set, count);
        }
    }
}

/// Guard for [`GroupChain::setwise_stabilizer_order`].
pub const SETWISE_ORACLE_LIMIT: u64 = 10_000_000;

/// Base point choice for a new level: the smallest point on a longest
/// cycle of the incoming generator, so chains stay shallow.
fn choose_base(g: &Permutation) -> u32 {
    let n = g.degree();
    let mut seen = vec![false; n];
    let mut best: Option<(usize, u32)> = None;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut min = start;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            len += 1;
            min = min.min(cur);
            cur = g.apply(cur);
        }
        if len > 1 && best.map_or(true, |(bl, _)| len > bl) {
            best = Some((len, min as u32));
        }
    }
    best.expect("identity cannot become a strong generator").1
}

/// Orbits of the group generated by `generators` on {0,...,n-1}: the finest
/// partition closed under all of them, each class sorted, classes ordered
/// by their minimum element.
pub fn orbits(generators: &[Permutation], n: usize) -> Vec<Vec<u32>> {
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    for g in generators {
        for x in 0..n as u32 {
            let (a, b) = (find(&mut parent, x), find(&mut parent, g.apply(x as usize) as u32));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut classes: Vec<Vec<u32>> = vec![Vec::new(); n];
    for x in 0..n as u32 {
        let root = find(&mut parent, x);
        classes[root as usize].push(x);
    }
    classes.retain(|c| !c.is_empty());
    classes
}

/// Configuration for [`subgroup_seeds`].
#[derive(Debug, Clone)]
pub struct SubgroupSeedConfig {
    pub seed: u64,
    /// How many random group elements to draw.
    pub element_draws: usize,
    /// How many two-generator combinations to add.
    pub pair_budget: usize,
    /// Primes up to this bound are used to extract prime-order powers.
    pub prime_limit: u64,
}

impl Default for SubgroupSeedConfig {
    fn default() -> Self {
        SubgroupSeedConfig { seed: 1, element_draws: 40, pair_budget: 60, prime_limit: 17 }
    }
}

const SMALL_PRIMES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Deterministic collection of small subgroups of the chain's group, given
/// as generator lists: cyclic groups of prime order obtained as powers of
/// random elements, plus two-generator products of those.
///
/// Which subgroups are worth seeding is a policy choice of this crate, not
/// something the underlying mathematics dictates; the defaults simply work
/// well on the order-16 planes.
pub fn subgroup_seeds(chain: &GroupChain, config: &SubgroupSeedConfig) -> Vec<Vec<Permutation>> {
    if chain.order() == &BigUint::one() {
        return vec![Vec::new()];
    }
    let mut rng = GroupChain::rng(config.seed);
    let mut cyclic: Vec<Permutation> = Vec::new();
    for _ in 0..config.element_draws {
        let g = chain.random_element(&mut rng);
        let o = g.order();
        for &p in SMALL_PRIMES.iter().filter(|&&p| p <= config.prime_limit) {
            if o % p == 0 {
                let h = g.pow(o / p);
                if !h.is_identity() && !cyclic.contains(&h) {
                    cyclic.push(h);
                }
            }
        }
    }
    let mut seeds: Vec<Vec<Permutation>> = cyclic.iter().map(|h| vec![h.clone()]).collect();
    let mut pairs = 0usize;
    'outer: for i in 0..cyclic.len() {
        for j in (i + 1)..cyclic.len() {
            if pairs >= config.pair_budget {
                break 'outer;
            }
            seeds.push(vec![cyclic[i].clone(), cyclic[j].clone()]);
            pairs += 1;
        }
    }
    // Dedup by the sorted image lists of the generator sets.
    let mut seen: Vec<Vec<Vec<u32>>> = Vec::new();
    seeds.retain(|gens| {
        let mut key: Vec<Vec<u32>> = gens.iter().map(|g| g.images().to_vec()).collect();
        key.sort();
        if seen.contains(&key) {
            false
        } else {
            seen.push(key);
            true
        }
    });
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use std::collections::BTreeSet;

    fn chain_of(n: usize, cycles: &[&[&[u32]]]) -> GroupChain {
        let gens: Vec<Permutation> =
            cycles.iter().map(|c| Permutation::from_cycles(n, c).unwrap()).collect();
        schreier_sims(n, &gens).unwrap()
    }

    /// Exhaustive closure of a generating set, for cross-checking orders.
    fn enumerate_group(n: usize, gens: &[Permutation], cap: usize) -> BTreeSet<Vec<u32>> {
        let mut elements = BTreeSet::new();
        let mut frontier = vec![Permutation::identity(n)];
        elements.insert(frontier[0].images().to_vec());
        while let Some(g) = frontier.pop() {
            for s in gens {
                let h = g.then(s);
                if elements.insert(h.images().to_vec()) {
                    assert!(elements.len() <= cap, "group larger than cap");
                    frontier.push(h);
                }
            }
        }
        elements
    }

    #[test]
    fn trivial_group() {
        let chain = schreier_sims(5, &[Permutation::identity(5)]).unwrap();
        assert_eq!(chain.order(), &BigUint::one());
        assert!(chain.contains(&Permutation::identity(5)).unwrap());
    }

    #[test]
    fn cyclic_group_order() {
        let chain = chain_of(7, &[&[&[0, 1, 2, 3, 4, 5, 6]]]);
        assert_eq!(chain.order(), &BigUint::from(7u32));
    }

    #[test]
    fn symmetric_group_order() {
        // S_8 from a transposition and an 8-cycle.
        let chain = chain_of(8, &[&[&[0, 1]], &[&[0, 1, 2, 3, 4, 5, 6, 7]]]);
        assert_eq!(chain.order(), &BigUint::from(40320u32));
    }

    #[test]
    fn order_matches_exhaustive_enumeration() {
        // A few groups of order <= 10^4, enumerated element by element.
        let cases: Vec<(usize, Vec<Permutation>)> = vec![
            // D_4 acting on the square.
            (4, vec![
                Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
                Permutation::from_cycles(4, &[&[1, 3]]).unwrap(),
            ]),
            // S_6.
            (6, vec![
                Permutation::from_cycles(6, &[&[0, 1]]).unwrap(),
                Permutation::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap(),
            ]),
            // A_5 from two 3-cycles.
            (5, vec![
                Permutation::from_cycles(5, &[&[0, 1, 2]]).unwrap(),
                Permutation::from_cycles(5, &[&[2, 3, 4]]).unwrap(),
            ]),
            // C_2 x C_3.
            (5, vec![
                Permutation::from_cycles(5, &[&[0, 1]]).unwrap(),
                Permutation::from_cycles(5, &[&[2, 3, 4]]).unwrap(),
            ]),
        ];
        for (n, gens) in cases {
            let chain = schreier_sims(n, &gens).unwrap();
            let brute = enumerate_group(n, &gens, 10_000);
            assert_eq!(chain.order(), &BigUint::from(brute.len()));
            // Membership agrees with the enumeration on every element.
            for images in &brute {
                let g = Permutation::from_images(images.clone()).unwrap();
                assert!(chain.contains(&g).unwrap());
            }
        }
    }

    #[test]
    fn non_membership() {
        let chain = chain_of(3, &[&[&[0, 1]]]);
        let three_cycle = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        assert!(!chain.contains(&three_cycle).unwrap());
        assert!(chain.contains(&Permutation::identity(3)).unwrap());
    }

    #[test]
    fn degree_mismatch_is_error() {
        let chain = chain_of(3, &[&[&[0, 1]]]);
        assert!(chain.contains(&Permutation::identity(4)).is_err());
        let mixed = vec![Permutation::identity(3), Permutation::identity(4)];
        assert!(schreier_sims(3, &mixed).is_err());
    }

    #[test]
    fn orbit_partition() {
        let n = 6;
        assert_eq!(orbits(&[Permutation::identity(n)], n).len(), n);
        let cycle = Permutation::from_cycles(n, &[&[0, 1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(orbits(&[cycle], n), vec![vec![0, 1, 2, 3, 4, 5]]);
        let two = Permutation::from_cycles(n, &[&[0, 1], &[2, 3]]).unwrap();
        let parts = orbits(&[two], n);
        assert_eq!(parts, vec![vec![0, 1], vec![2, 3], vec![4], vec![5]]);
        // Sizes always sum to n and generators map each orbit onto itself.
        assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), n);
    }

    #[test]
    fn random_elements_are_members_and_uniform() {
        // C_6: 6000 draws, each element within 5 sigma of 1000.
        let chain = chain_of(6, &[&[&[0, 1, 2, 3, 4, 5]]]);
        let mut rng = GroupChain::rng(42);
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..6000 {
            let g = chain.random_element(&mut rng);
            assert!(chain.contains(&g).unwrap());
            *counts.entry(g.images().to_vec()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 6);
        // sigma = sqrt(6000 * (1/6)(5/6)) ~ 28.9, so 5 sigma ~ 144.
        for (_, c) in counts {
            assert!((c as i64 - 1000).abs() < 145, "count {c} too far from 1000");
        }
    }

    #[test]
    fn setwise_stabilizer_basics() {
        // Stabilizer of the full domain is the whole group.
        let chain = chain_of(6, &[&[&[0, 1]], &[&[0, 1, 2, 3, 4, 5]]]);
        let all = PointSet::new((0..6).collect(), 6).unwrap();
        assert_eq!(&chain.setwise_stabilizer_order(&all).unwrap(), chain.order());

        // <(0 1 2)> stabilizing {0} is trivial.
        let c3 = chain_of(3, &[&[&[0, 1, 2]]]);
        let single = PointSet::new(vec![0], 3).unwrap();
        assert_eq!(c3.setwise_stabilizer_order(&single).unwrap(), BigUint::one());

        // S_5 stabilizing a 2-subset: S_2 x S_3 has order 12.
        let s5 = chain_of(5, &[&[&[0, 1]], &[&[0, 1, 2, 3, 4]]]);
        let pair = PointSet::new(vec![0, 1], 5).unwrap();
        assert_eq!(s5.setwise_stabilizer_order(&pair).unwrap(), BigUint::from(12u32));
    }

    #[test]
    fn setwise_stabilizer_divides_group_order() {
        let chain = chain_of(7, &[&[&[0, 1, 2, 3, 4, 5, 6]], &[&[1, 2, 4], &[3, 6, 5]]]);
        let order = chain.order().to_u64().unwrap();
        for set in [vec![0], vec![0, 1, 3], vec![2, 5], vec![0, 1, 2, 3]] {
            let set = PointSet::new(set, 7).unwrap();
            let stab = chain.setwise_stabilizer_order(&set).unwrap().to_u64().unwrap();
            assert_eq!(order % stab, 0, "Lagrange violated");
        }
    }

    #[test]
    fn subgroup_seeds_trivial_and_cyclic() {
        let trivial = schreier_sims(4, &[]).unwrap();
        let seeds = subgroup_seeds(&trivial, &SubgroupSeedConfig::default());
        assert_eq!(seeds, vec![Vec::new()]);

        let c6 = chain_of(6, &[&[&[0, 1, 2, 3, 4, 5]]]);
        let seeds = subgroup_seeds(&c6, &SubgroupSeedConfig::default());
        let orders: BTreeSet<u64> =
            seeds.iter().flat_map(|gens| gens.iter().map(|g| g.order())).collect();
        assert!(orders.contains(&2), "no order-2 seed");
        assert!(orders.contains(&3), "no order-3 seed");
    }

    #[test]
    fn chain_verification_passes() {
        let chain = chain_of(8, &[&[&[0, 1]], &[&[0, 1, 2, 3, 4, 5, 6, 7]]]);
        chain.verify().unwrap();
    }
}
