//! The incidence-structure data model: block designs, parameter validation,
//! duality and line/set intersection profiles.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cap on how many violations a [`ValidationReport`] will enumerate.
pub const MAX_REPORTED_VIOLATIONS: usize = 1000;

/// A set of points (sorted, duplicate-free, 0-based) inside a structure
/// with a known point count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointSet {
    indices: Vec<u32>,
}

impl PointSet {
    /// Builds a set from arbitrary indices, sorting them and rejecting
    /// duplicates or out-of-range entries.
    pub fn new(mut indices: Vec<u32>, point_count: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate point {}", w[0])));
        }
        if let Some(&bad) = indices.last().filter(|&&p| p as usize >= point_count) {
            return Err(Error::OutOfRange { index: bad as usize, limit: point_count });
        }
        Ok(PointSet { indices })
    }

    pub fn empty() -> Self {
        PointSet { indices: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, p: u32) -> bool {
        self.indices.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u32> {
        self.indices.iter()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.indices
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.indices
    }
}

/// Points and blocks, with blocks stored as sorted point-index lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceStructure {
    v: usize,
    blocks: Vec<Vec<u32>>,
    name: String,
}

impl IncidenceStructure {
    /// Builds a structure, sorting each block and rejecting duplicate or
    /// out-of-range point indices.
    pub fn new(v: usize, mut blocks: Vec<Vec<u32>>, name: impl Into<String>) -> Result<Self> {
        for block in blocks.iter_mut() {
            block.sort_unstable();
            if let Some(w) = block.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::domain(format!("duplicate point {} in a block", w[0])));
            }
            if let Some(&bad) = block.last().filter(|&&p| p as usize >= v) {
                return Err(Error::OutOfRange { index: bad as usize, limit: v });
            }
        }
        Ok(IncidenceStructure { v, blocks, name: name.into() })
    }

    pub fn point_count(&self) -> usize {
        self.v
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Block size if it is uniform across all blocks.
    pub fn uniform_block_size(&self) -> Option<usize> {
        let k = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == k).then_some(k)
    }

    /// The order n of a projective plane with these parameters, i.e. k-1
    /// when v = b = n^2+n+1 and every block has k = n+1 points.
    pub fn plane_order(&self) -> Option<usize> {
        let k = self.uniform_block_size()?;
        let n = k.checked_sub(1)?;
        (self.v == self.blocks.len() && self.v == n * n + n + 1).then_some(n)
    }

    /// Exchanges the roles of points and blocks.
    pub fn dual(&self) -> Result<IncidenceStructure> {
        if self.v != self.blocks.len() {
            return Err(Error::shape(format!(
                "dual requires v = b, got v={} b={}",
                self.v,
                self.blocks.len()
            )));
        }
        let mut dual_blocks = vec![Vec::new(); self.v];
        for (j, block) in self.blocks.iter().enumerate() {
            for &p in block {
                dual_blocks[p as usize].push(j as u32);
            }
        }
        IncidenceStructure::new(self.blocks.len(), dual_blocks, format!("{}_dual", self.name))
    }

    /// For each block, the size of its intersection with `set`, as a
    /// size -> block count map.
    pub fn line_profile(&self, set: &PointSet) -> Result<BTreeMap<usize, usize>> {
        if let Some(&bad) = set.iter().find(|&&p| p as usize >= self.v) {
            return Err(Error::OutOfRange { index: bad as usize, limit: self.v });
        }
        let mut profile = BTreeMap::new();
        for block in &self.blocks {
            let hits = block.iter().filter(|p| set.contains(**p)).count();
            *profile.entry(hits).or_insert(0) += 1;
        }
        Ok(profile)
    }
}

/// A single constraint violation found by [`validate_design`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Pair of points covered a number of times other than lambda.
    PairCoverage { points: (u32, u32), count: usize },
    /// Block with the wrong number of points.
    BlockSize { block: usize, size: usize },
}

/// Outcome of checking 2-design parameters.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub v: usize,
    pub b: usize,
    /// Uniform block size, when there is one.
    pub k: Option<usize>,
    /// The lambda the pairs were checked against.
    pub lambda: usize,
    pub violations: Vec<Violation>,
    /// Total number of violations, including any beyond the report cap.
    pub violation_count: usize,
    /// Whether the dual is also a 2-design with the same parameters.
    pub symmetric: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks that every point pair lies in exactly `lambda` blocks and that
/// blocks have uniform size `k`. `k` and `lambda` default to the values
/// observed in the structure. Violations are report content, not errors.
pub fn validate_design(
    s: &IncidenceStructure,
    k: Option<usize>,
    lambda: Option<usize>,
) -> ValidationReport {
    let v = s.point_count();
    let expected_k = k.or_else(|| s.blocks().first().map(|b| b.len()));
    let mut violations = Vec::new();
    let mut violation_count = 0usize;
    let mut push = |violations: &mut Vec<Violation>, viol: Violation| {
        violation_count += 1;
        if violations.len() < MAX_REPORTED_VIOLATIONS {
            violations.push(viol);
        }
    };

    if let Some(k) = expected_k {
        for (i, block) in s.blocks().iter().enumerate() {
            if block.len() != k {
                push(&mut violations, Violation::BlockSize { block: i, size: block.len() });
            }
        }
    }

    // Pair coverage over the upper triangle.
    let mut coverage = vec![0u32; v * v];
    for block in s.blocks() {
        for (i, &p) in block.iter().enumerate() {
            for &q in &block[i + 1..] {
                coverage[p as usize * v + q as usize] += 1;
            }
        }
    }
    let lambda = lambda.unwrap_or_else(|| {
        if v >= 2 { coverage[1] as usize } else { 1 }
    });
    for p in 0..v {
        for q in (p + 1)..v {
            let c = coverage[p * v + q] as usize;
            if c != lambda {
                push(
                    &mut violations,
                    Violation::PairCoverage { points: (p as u32, q as u32), count: c },
                );
            }
        }
    }

    let symmetric = violation_count == 0
        && v == s.block_count()
        && s.dual()
            .map(|d| validate_design_inner(&d, expected_k, lambda))
            .unwrap_or(false);

    ValidationReport {
        v,
        b: s.block_count(),
        k: s.uniform_block_size(),
        lambda,
        violations,
        violation_count,
        symmetric,
    }
}

/// Plain validity check used for the symmetry flag, without building a
/// second report.
fn validate_design_inner(s: &IncidenceStructure, k: Option<usize>, lambda: usize) -> bool {
    let v = s.point_count();
    if let Some(k) = k {
        if s.blocks().iter().any(|b| b.len() != k) {
            return false;
        }
    }
    let mut coverage = vec![0u32; v * v];
    for block in s.blocks() {
        for (i, &p) in block.iter().enumerate() {
            for &q in &block[i + 1..] {
                coverage[p as usize * v + q as usize] += 1;
            }
        }
    }
    (0..v).all(|p| ((p + 1)..v).all(|q| coverage[p * v + q] as usize == lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_pg2, hermitian_unital};

    #[test]
    fn pg2_16_is_symmetric_2_273_17_1() {
        let s = build_pg2(16).unwrap();
        let report = validate_design(&s, None, None);
        assert!(report.is_valid());
        assert_eq!((report.v, report.b, report.k, report.lambda), (273, 273, Some(17), 1));
        assert!(report.symmetric);
    }

    #[test]
    fn fano_is_valid_2_7_3_1() {
        let s = build_pg2(2).unwrap();
        let report = validate_design(&s, Some(3), Some(1));
        assert!(report.is_valid());
        assert!(report.symmetric);
    }

    #[test]
    fn fano_with_block_deleted_reports_uncovered_pairs() {
        let s = build_pg2(2).unwrap();
        let mut blocks = s.blocks().to_vec();
        blocks.pop();
        let broken = IncidenceStructure::new(7, blocks, "broken_fano").unwrap();
        let report = validate_design(&broken, Some(3), Some(1));
        assert!(!report.is_valid());
        // Removing one line uncovers exactly its C(3,2) = 3 point pairs.
        assert_eq!(report.violation_count, 3);
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, Violation::PairCoverage { count: 0, .. })));
    }

    #[test]
    fn violation_cap_respected() {
        // No blocks at all: every pair is uncovered.
        let s = IncidenceStructure::new(100, vec![], "empty").unwrap();
        let report = validate_design(&s, None, Some(1));
        assert_eq!(report.violation_count, 100 * 99 / 2);
        assert_eq!(report.violations.len(), MAX_REPORTED_VIOLATIONS);
    }

    #[test]
    fn dual_is_involution() {
        let s = build_pg2(4).unwrap();
        let mut dd = s.dual().unwrap().dual().unwrap();
        dd.rename(s.name());
        assert_eq!(dd, s);
    }

    #[test]
    fn dual_of_pg2_16_is_valid() {
        let d = build_pg2(16).unwrap().dual().unwrap();
        let report = validate_design(&d, Some(17), Some(1));
        assert!(report.is_valid());
        assert!(report.symmetric);
    }

    #[test]
    fn dual_requires_square_counts() {
        let s = IncidenceStructure::new(4, vec![vec![0, 1], vec![2, 3], vec![0, 2]], "s").unwrap();
        assert!(s.dual().is_err());
    }

    #[test]
    fn line_profile_of_full_line() {
        let s = build_pg2(16).unwrap();
        let line = PointSet::new(s.blocks()[0].clone(), 273).unwrap();
        let profile = s.line_profile(&line).unwrap();
        assert_eq!(profile.get(&17), Some(&1));
        assert_eq!(profile.get(&1), Some(&272));
        assert_eq!(profile.values().sum::<usize>(), 273);
    }

    #[test]
    fn line_profile_of_hermitian_unital() {
        let s = build_pg2(16).unwrap();
        let u = hermitian_unital(4).unwrap();
        let profile = s.line_profile(&u).unwrap();
        assert_eq!(profile.get(&1), Some(&65));
        assert_eq!(profile.get(&5), Some(&208));
        assert_eq!(profile.len(), 2);
    }

    #[test]
    fn line_profile_of_empty_set() {
        let s = build_pg2(16).unwrap();
        let profile = s.line_profile(&PointSet::empty()).unwrap();
        assert_eq!(profile.get(&0), Some(&273));
        assert_eq!(profile.len(), 1);
    }

    #[test]
    fn point_set_rejects_bad_input() {
        assert!(PointSet::new(vec![1, 1], 5).is_err());
        assert!(PointSet::new(vec![5], 5).is_err());
        assert!(PointSet::new(vec![4, 0, 2], 5).is_ok());
    }
}
