//! Algebraic construction of the Desarguesian planes PG(2,q) and their
//! Hermitian unitals.
//!
//! Points are 1-dimensional subspaces of GF(q)^3, normalized so the first
//! nonzero coordinate is 1, and both points and lines are numbered in
//! lexicographic order of their normalized coordinate triples. That makes
//! the labeling reproducible run to run.

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::incidence::{IncidenceStructure, PointSet};

/// A projective point in normalized homogeneous coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjectivePoint {
    pub coords: [FieldElement; 3],
}

impl ProjectivePoint {
    /// Normalizes a coordinate triple; fails on the zero vector.
    pub fn new(coords: [FieldElement; 3]) -> Result<Self> {
        let field = Field::get(coords[0].field_order())?;
        let lead = coords.iter().position(|c| !c.is_zero()).ok_or_else(|| {
            Error::domain("the zero vector is not a projective point")
        })?;
        let scale = field.inv(coords[lead])?;
        let mut out = [field.zero(); 3];
        for (o, &c) in out.iter_mut().zip(&coords) {
            *o = field.mul(c, scale)?;
        }
        Ok(ProjectivePoint { coords: out })
    }
}

/// All points of PG(2,q) in lexicographic order of normalized coordinates.
pub fn pg2_points(q: u16) -> Result<Vec<ProjectivePoint>> {
    let field = Field::get(q)?;
    let mut points = Vec::with_capacity(q as usize * q as usize + q as usize + 1);
    // Enumerate one representative per subspace directly: (1,y,z), (0,1,z), (0,0,1).
    for y in field.elements() {
        for z in field.elements() {
            points.push(ProjectivePoint { coords: [field.one(), y, z] });
        }
    }
    for z in field.elements() {
        points.push(ProjectivePoint { coords: [field.zero(), field.one(), z] });
    }
    points.push(ProjectivePoint { coords: [field.zero(), field.zero(), field.one()] });
    points.sort();
    Ok(points)
}

fn incident(field: &Field, line: &ProjectivePoint, point: &ProjectivePoint) -> Result<bool> {
    let mut acc = field.zero();
    for (a, x) in line.coords.iter().zip(&point.coords) {
        acc = field.add(acc, field.mul(*a, *x)?)?;
    }
    Ok(acc.is_zero())
}

/// Constructs PG(2,q) as an incidence structure with q^2+q+1 points and lines.
pub fn build_pg2(q: u16) -> Result<IncidenceStructure> {
    let field = Field::get(q)?;
    let points = pg2_points(q)?;
    // Lines carry dual coordinates and get the same lexicographic numbering.
    let lines = pg2_points(q)?;
    let mut blocks = Vec::with_capacity(lines.len());
    for line in &lines {
        let mut block = Vec::with_capacity(q as usize + 1);
        for (i, point) in points.iter().enumerate() {
            if incident(field, line, point)? {
                block.push(i as u32);
            }
        }
        blocks.push(block);
    }
    IncidenceStructure::new(points.len(), blocks, format!("pg2_{q}"))
}

/// The classical unital of PG(2, q0^2): all points with
/// x^(q0+1) + y^(q0+1) + z^(q0+1) = 0. Indices refer to `build_pg2(q0^2)`.
pub fn hermitian_unital(q0: u16) -> Result<PointSet> {
    let q = q0.checked_mul(q0).ok_or(Error::UnsupportedField(0))?;
    let field = Field::get(q)?;
    let points = pg2_points(q)?;
    let e = q0 as u32 + 1;
    let mut indices = Vec::new();
    for (i, point) in points.iter().enumerate() {
        let mut acc = field.zero();
        for &c in &point.coords {
            acc = field.add(acc, field.pow(c, e)?)?;
        }
        if acc.is_zero() {
            indices.push(i as u32);
        }
    }
    PointSet::new(indices, points.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_plane_shape() {
        let s = build_pg2(2).unwrap();
        assert_eq!(s.point_count(), 7);
        assert_eq!(s.block_count(), 7);
        assert!(s.blocks().iter().all(|b| b.len() == 3));
    }

    #[test]
    fn pg2_4_point_degrees() {
        let s = build_pg2(4).unwrap();
        assert_eq!(s.point_count(), 21);
        for p in 0..21u32 {
            let on = s.blocks().iter().filter(|b| b.contains(&p)).count();
            assert_eq!(on, 5);
        }
    }

    #[test]
    fn pg2_16_parameters() {
        let s = build_pg2(16).unwrap();
        assert_eq!(s.point_count(), 273);
        assert_eq!(s.block_count(), 273);
        assert!(s.blocks().iter().all(|b| b.len() == 17));
    }

    #[test]
    fn every_point_pair_on_one_line() {
        for q in [2u16, 3, 4] {
            let s = build_pg2(q).unwrap();
            let v = s.point_count() as u32;
            for a in 0..v {
                for b in (a + 1)..v {
                    let common = s
                        .blocks()
                        .iter()
                        .filter(|blk| blk.contains(&a) && blk.contains(&b))
                        .count();
                    assert_eq!(common, 1, "q={q} pair ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn hermitian_sizes() {
        assert_eq!(hermitian_unital(2).unwrap().len(), 9);
        assert_eq!(hermitian_unital(3).unwrap().len(), 28);
        assert_eq!(hermitian_unital(4).unwrap().len(), 65);
    }

    #[test]
    fn hermitian_meets_every_line_in_one_or_q0_plus_one() {
        for q0 in [2u16, 4] {
            let s = build_pg2(q0 * q0).unwrap();
            let u = hermitian_unital(q0).unwrap();
            for block in s.blocks() {
                let hits = block.iter().filter(|p| u.contains(**p)).count() as u16;
                assert!(
                    hits == 1 || hits == q0 + 1,
                    "q0={q0}: line meets unital in {hits} points"
                );
            }
        }
    }

    #[test]
    fn hermitian_one_tangent_per_point() {
        let s = build_pg2(4).unwrap();
        let u = hermitian_unital(2).unwrap();
        for &p in u.iter() {
            let tangents = s
                .blocks()
                .iter()
                .filter(|b| {
                    b.contains(&p) && b.iter().filter(|x| u.contains(**x)).count() == 1
                })
                .count();
            assert_eq!(tangents, 1);
        }
    }

    #[test]
    fn unsupported_order_is_config_error() {
        assert!(build_pg2(6).is_err());
        assert!(hermitian_unital(5).is_err());
    }
}
