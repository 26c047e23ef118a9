use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dimvec::{multiset_decompositions, DimVector};
use crate::error::{Error, Result};
use crate::quiver::Quiver;

/// Classification of a positive root by its symmetrized form value.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootClass {
    Real,
    Isotropic,
    Hyperbolic,
}

impl RootClass {
    /// Split on (d,d): 2 real, 0 isotropic, negative hyperbolic. Any other
    /// value inside a root set indicates a broken invariant: (d,d) is always
    /// even, and values above 2 fail the defining inequality against the
    /// decomposition into unit vectors.
    pub fn from_sym(sym: i64) -> Result<RootClass> {
        match sym {
            2 => Ok(RootClass::Real),
            0 => Ok(RootClass::Isotropic),
            s if s < 0 => Ok(RootClass::Hyperbolic),
            s => Err(Error::InternalInconsistency(format!(
                "root with (d,d) = {s}; only 2, 0, or negative values can occur"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RootClass::Real => "real",
            RootClass::Isotropic => "isotropic",
            RootClass::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RootInfo {
    pub class: RootClass,
    /// Whether the root satisfies the defining strict inequality itself (as
    /// opposed to entering only as a multiple of an isotropic root).
    pub primitive: bool,
}

/// The positive roots found within a box, each tagged with class and
/// primitivity.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RootSet {
    pub roots: BTreeMap<DimVector, RootInfo>,
}

impl RootSet {
    pub fn contains(&self, d: &DimVector) -> bool {
        self.roots.contains_key(d)
    }

    pub fn class(&self, d: &DimVector) -> Option<RootClass> {
        self.roots.get(d).map(|info| info.class)
    }

    pub fn is_primitive(&self, d: &DimVector) -> bool {
        self.roots.get(d).is_some_and(|info| info.primitive)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DimVector, &RootInfo)> {
        self.roots.iter()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Membership of d in the primitive positive roots: for every decomposition
/// into more than one nonzero part, 2 - (d,d) strictly exceeds the sum of
/// 2 - (part,part).
pub fn is_primitive_root(q: &Quiver, d: &DimVector) -> Result<bool> {
    if d.is_zero() {
        return Ok(false);
    }
    let lhs = 2 - q.sym_form(d, d)?;
    for decomposition in multiset_decompositions(d) {
        let mut rhs = 0i64;
        for part in &decomposition {
            rhs += 2 - q.sym_form(part, part)?;
        }
        if lhs <= rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All primitive positive roots within the box, in lexicographic order.
pub fn primitive_roots(q: &Quiver, bound: &DimVector) -> Result<Vec<DimVector>> {
    bound.expect_len(q.num_vertices)?;
    let mut out = Vec::new();
    for d in DimVector::boxed_nonzero(bound) {
        if is_primitive_root(q, &d)? {
            out.push(d);
        }
    }
    Ok(out)
}

/// The positive roots within the box: primitive roots plus every multiple of
/// an isotropic primitive root that still fits, classified by (d,d).
pub fn positive_roots(q: &Quiver, bound: &DimVector) -> Result<RootSet> {
    let mut roots: BTreeMap<DimVector, RootInfo> = BTreeMap::new();
    let primitives = primitive_roots(q, bound)?;
    for d in &primitives {
        let class = RootClass::from_sym(q.sym_form(d, d)?)?;
        roots.insert(
            d.clone(),
            RootInfo {
                class,
                primitive: true,
            },
        );
    }
    for d in &primitives {
        if q.sym_form(d, d)? != 0 {
            continue;
        }
        let mut multiple = d.clone();
        loop {
            multiple = &multiple + d;
            if !multiple.leq(bound) {
                break;
            }
            roots.entry(multiple.clone()).or_insert(RootInfo {
                class: RootClass::Isotropic,
                primitive: false,
            });
        }
    }
    Ok(RootSet { roots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    #[test]
    fn jordan_primitives_and_multiples() {
        let q = Quiver::jordan();
        assert_eq!(primitive_roots(&q, &dv(&[3])).unwrap(), vec![dv(&[1])]);

        let set = positive_roots(&q, &dv(&[4])).unwrap();
        assert_eq!(set.len(), 4);
        for n in 1..=4u32 {
            assert_eq!(set.class(&dv(&[n])), Some(RootClass::Isotropic));
            assert_eq!(set.is_primitive(&dv(&[n])), n == 1);
        }
    }

    #[test]
    fn a2_roots_are_the_two_simples() {
        let q = Quiver::linear(2);
        assert_eq!(
            primitive_roots(&q, &dv(&[2, 2])).unwrap(),
            vec![dv(&[0, 1]), dv(&[1, 0])]
        );
        let set = positive_roots(&q, &dv(&[2, 2])).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.class(&dv(&[1, 0])), Some(RootClass::Real));
        assert_eq!(set.class(&dv(&[0, 1])), Some(RootClass::Real));
        // (1,1) fails the strict inequality: 0 > 0 is false.
        assert!(!set.contains(&dv(&[1, 1])));
    }

    #[test]
    fn two_loop_quiver_is_all_hyperbolic() {
        let q = Quiver::loops(2);
        assert_eq!(
            primitive_roots(&q, &dv(&[3])).unwrap(),
            vec![dv(&[1]), dv(&[2]), dv(&[3])]
        );
        let set = positive_roots(&q, &dv(&[3])).unwrap();
        for n in 1..=3u32 {
            assert_eq!(set.class(&dv(&[n])), Some(RootClass::Hyperbolic));
            assert!(set.is_primitive(&dv(&[n])));
        }
    }

    #[test]
    fn framed_point_quiver_roots() {
        let q = Quiver::point().frame(&dv(&[1])).unwrap();
        // The framed Euler form evaluates to 2 on (1,1)...
        assert_eq!(q.sym_form(&dv(&[1, 1]), &dv(&[1, 1])).unwrap(), 2);
        // ...but (1,1) still fails the strict inequality, exactly as for the
        // path quiver of the same shape.
        let set = positive_roots(&q, &dv(&[2, 1])).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.class(&dv(&[1, 0])), Some(RootClass::Real));
        assert_eq!(set.class(&dv(&[0, 1])), Some(RootClass::Real));
    }

    #[test]
    fn classification_rejects_impossible_values() {
        assert!(RootClass::from_sym(1).is_err());
        assert!(RootClass::from_sym(4).is_err());
        assert_eq!(RootClass::from_sym(2).unwrap(), RootClass::Real);
        assert_eq!(RootClass::from_sym(-6).unwrap(), RootClass::Hyperbolic);
    }

    #[test]
    fn returned_primitives_survive_reverification() {
        let q = Quiver::kronecker(2);
        for d in primitive_roots(&q, &dv(&[2, 2])).unwrap() {
            assert!(is_primitive_root(&q, &d).unwrap());
        }
        // Kronecker (1,1) is isotropic and primitive; (2,2) is its multiple.
        let set = positive_roots(&q, &dv(&[2, 2])).unwrap();
        assert_eq!(set.class(&dv(&[1, 1])), Some(RootClass::Isotropic));
        assert!(set.is_primitive(&dv(&[1, 1])));
        assert_eq!(set.class(&dv(&[2, 2])), Some(RootClass::Isotropic));
        assert!(!set.is_primitive(&dv(&[2, 2])));
    }
}
