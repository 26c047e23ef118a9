use std::fmt;
use std::ops::{Add, Index};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vector of natural numbers indexed by the vertices of a quiver.
///
/// Serialized as a plain JSON array, displayed as comma-separated entries.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn new(entries: Vec<u32>) -> Self {
        DimVector(entries)
    }

    pub fn zero(len: usize) -> Self {
        DimVector(vec![0; len])
    }

    /// The coordinate vector with a single 1 at `vertex`.
    pub fn unit(len: usize, vertex: usize) -> Self {
        let mut v = vec![0; len];
        v[vertex] = 1;
        DimVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Sum of the entries, written |d|.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    /// Vertices with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] != 0).collect()
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &DimVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &DimVector) -> Option<DimVector> {
        if !other.leq(self) {
            return None;
        }
        Some(DimVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn expect_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::DimLength {
                expected,
                got: self.len(),
            });
        }
        Ok(())
    }

    /// All vectors `0 <= e <= bound` in lexicographic order, including zero.
    pub fn boxed_iter(bound: &DimVector) -> BoxIter {
        BoxIter {
            bound: bound.clone(),
            next: Some(DimVector::zero(bound.len())),
        }
    }

    /// All nonzero vectors `0 < e <= bound` in lexicographic order.
    pub fn boxed_nonzero(bound: &DimVector) -> impl Iterator<Item = DimVector> {
        DimVector::boxed_iter(bound).filter(|d| !d.is_zero())
    }

    /// Parse a comma-separated entry list such as `2,1,0`.
    pub fn parse(text: &str) -> Result<DimVector> {
        let entries = text
            .split(',')
            .map(|part| {
                part.trim().parse::<u32>().map_err(|e| Error::Parse {
                    pos: 0,
                    msg: format!("bad dimension entry {part:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DimVector(entries))
    }
}

impl Index<usize> for DimVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl Add<&DimVector> for &DimVector {
    type Output = DimVector;
    fn add(self, other: &DimVector) -> DimVector {
        debug_assert_eq!(self.len(), other.len());
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

pub struct BoxIter {
    bound: DimVector,
    next: Option<DimVector>,
}

impl Iterator for BoxIter {
    type Item = DimVector;

    fn next(&mut self) -> Option<DimVector> {
        let current = self.next.take()?;
        // Odometer step: increment the last entry, carrying leftwards.
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break; // overflow: this was the last vector
            }
            pos -= 1;
            if succ.0[pos] < self.bound.0[pos] {
                succ.0[pos] += 1;
                self.next = Some(succ);
                break;
            }
            succ.0[pos] = 0;
        }
        Some(current)
    }
}

/// Enumerate all unordered decompositions of `d` into `t > 1` nonzero parts,
/// as multisets. Parts are produced in non-increasing lexicographic order to
/// avoid revisiting permutations of the same multiset.
pub fn multiset_decompositions(d: &DimVector) -> Vec<Vec<DimVector>> {
    let mut out = Vec::new();
    let mut parts: Vec<DimVector> = Vec::new();
    recurse(d, None, &mut parts, &mut out);
    out.retain(|ps| ps.len() > 1);
    out
}

fn recurse(
    remaining: &DimVector,
    max_part: Option<&DimVector>,
    parts: &mut Vec<DimVector>,
    out: &mut Vec<Vec<DimVector>>,
) {
    if remaining.is_zero() {
        out.push(parts.clone());
        return;
    }
    // Candidate next parts: nonzero, <= remaining componentwise, and <= the
    // previous part in the (total) ordering on vectors so each multiset is
    // visited exactly once.
    for part in DimVector::boxed_nonzero(remaining) {
        if let Some(cap) = max_part {
            if &part > cap {
                continue;
            }
        }
        let rest = remaining
            .checked_sub(&part)
            .expect("bounded iteration stays below the remainder");
        parts.push(part.clone());
        recurse(&rest, Some(&part), parts, out);
        parts.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    #[test]
    fn box_iteration_is_complete_and_ordered() {
        let all: Vec<_> = DimVector::boxed_iter(&dv(&[1, 2])).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], dv(&[0, 0]));
        assert_eq!(all[5], dv(&[1, 2]));
    }

    #[test]
    fn decompositions_of_a_small_vector_are_multisets() {
        // (2): only 1+1.
        let decs = multiset_decompositions(&dv(&[2]));
        assert_eq!(decs, vec![vec![dv(&[1]), dv(&[1])]]);

        // (1,1): only (1,0)+(0,1), counted once.
        let decs = multiset_decompositions(&dv(&[1, 1]));
        assert_eq!(decs.len(), 1);
        assert_eq!(decs[0].len(), 2);

        // (3): 1+1+1 and 1+2.
        let decs = multiset_decompositions(&dv(&[3]));
        assert_eq!(decs.len(), 2);
    }

    #[test]
    fn display_and_parse_round_trip() {
        let d = dv(&[2, 0, 1]);
        assert_eq!(d.to_string(), "2,0,1");
        assert_eq!(DimVector::parse("2, 0 ,1").unwrap(), d);
        assert!(DimVector::parse("2,x").is_err());
    }

    #[test]
    fn subtraction_requires_domination() {
        assert_eq!(dv(&[2, 1]).checked_sub(&dv(&[1, 1])), Some(dv(&[1, 0])));
        assert_eq!(dv(&[2, 1]).checked_sub(&dv(&[0, 2])), None);
    }
}
