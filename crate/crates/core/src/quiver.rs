use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dimvec::DimVector;
use crate::error::{Error, Result};

/// A finite quiver: vertices are dense indices `0..num_vertices`, arrows are
/// ordered pairs `(source, target)` identified by their position in `arrows`.
/// Arrow ids are stable, so the optional structure maps survive serialization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quiver {
    pub num_vertices: usize,
    pub arrows: Vec<(usize, usize)>,
    /// Fixed-point-free involution pairing each arrow with its reverse, when
    /// the quiver was produced by `double`/`triple` (or deserialized as such).
    pub star_pairing: Option<BTreeMap<usize, usize>>,
    /// Arrow ids of the marked loops (one loop per vertex on tripled quivers).
    pub loop_marks: Option<Vec<usize>>,
    /// Vertex designated as the framing vertex, when present. A doubly framed
    /// quiver stores its first framing vertex here; the second is the next
    /// index.
    pub framing_vertex: Option<usize>,
}

impl Quiver {
    pub fn new(num_vertices: usize, arrows: Vec<(usize, usize)>) -> Result<Quiver> {
        let q = Quiver {
            num_vertices,
            arrows,
            star_pairing: None,
            loop_marks: None,
            framing_vertex: None,
        };
        q.validate()?;
        Ok(q)
    }

    /// Single vertex, no arrows.
    pub fn point() -> Quiver {
        Quiver::new(1, vec![]).expect("valid")
    }

    /// Path quiver on `n` vertices with arrows i -> i+1 (type A_n).
    pub fn linear(n: usize) -> Quiver {
        let arrows = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Quiver::new(n, arrows).expect("valid")
    }

    /// One vertex with `g` loops; `g = 1` is the Jordan quiver.
    pub fn loops(g: usize) -> Quiver {
        Quiver::new(1, vec![(0, 0); g]).expect("valid")
    }

    pub fn jordan() -> Quiver {
        Quiver::loops(1)
    }

    /// Two vertices with `k` parallel arrows 0 -> 1; `k = 2` is the Kronecker
    /// quiver.
    pub fn kronecker(k: usize) -> Quiver {
        Quiver::new(2, vec![(0, 1); k]).expect("valid")
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn validate(&self) -> Result<()> {
        for &(s, t) in &self.arrows {
            if s >= self.num_vertices || t >= self.num_vertices {
                return Err(Error::InvalidQuiver(format!(
                    "arrow ({s},{t}) out of range for {} vertices",
                    self.num_vertices
                )));
            }
        }
        if let Some(pairing) = &self.star_pairing {
            for (&a, &b) in pairing {
                if a >= self.arrows.len() || b >= self.arrows.len() {
                    return Err(Error::InvalidQuiver(format!(
                        "star pairing touches missing arrow ({a},{b})"
                    )));
                }
                if a == b {
                    return Err(Error::InvalidQuiver(format!(
                        "star pairing fixes arrow {a}"
                    )));
                }
                if pairing.get(&b) != Some(&a) {
                    return Err(Error::InvalidQuiver(format!(
                        "star pairing is not an involution at arrow {a}"
                    )));
                }
                let (s, t) = self.arrows[a];
                if self.arrows[b] != (t, s) {
                    return Err(Error::InvalidQuiver(format!(
                        "paired arrows {a},{b} are not mutual reverses"
                    )));
                }
            }
        }
        if let Some(marks) = &self.loop_marks {
            let mut seen = vec![false; self.num_vertices];
            for &a in marks {
                if a >= self.arrows.len() {
                    return Err(Error::InvalidQuiver(format!("loop mark {a} out of range")));
                }
                let (s, t) = self.arrows[a];
                if s != t {
                    return Err(Error::InvalidQuiver(format!(
                        "marked arrow {a} is not a loop"
                    )));
                }
                if seen[s] {
                    return Err(Error::InvalidQuiver(format!(
                        "vertex {s} carries two marked loops"
                    )));
                }
                seen[s] = true;
            }
        }
        if let Some(v) = self.framing_vertex {
            if v >= self.num_vertices {
                return Err(Error::InvalidQuiver(format!(
                    "framing vertex {v} out of range"
                )));
            }
        }
        Ok(())
    }

    /// True when the quiver has the full tripled structure: a marked loop at
    /// every vertex and a star pairing covering exactly the unmarked arrows.
    pub fn is_tripled_shape(&self) -> bool {
        let Some(marks) = &self.loop_marks else {
            return false;
        };
        let Some(pairing) = &self.star_pairing else {
            return false;
        };
        if marks.len() != self.num_vertices {
            return false;
        }
        let marked: Vec<bool> = {
            let mut m = vec![false; self.arrows.len()];
            for &a in marks {
                m[a] = true;
            }
            m
        };
        (0..self.arrows.len()).all(|a| marked[a] != pairing.contains_key(&a))
    }

    /// The marked loop arrow at `vertex` of a tripled quiver.
    pub fn loop_mark_at(&self, vertex: usize) -> Option<usize> {
        let marks = self.loop_marks.as_ref()?;
        marks.iter().copied().find(|&a| self.arrows[a].0 == vertex)
    }

    /// Euler form: sum_i d_i e_i - sum_{a} d_{s(a)} e_{t(a)}.
    pub fn euler_form(&self, d: &DimVector, e: &DimVector) -> Result<i64> {
        d.expect_len(self.num_vertices)?;
        e.expect_len(self.num_vertices)?;
        let mut acc: i64 = 0;
        for i in 0..self.num_vertices {
            acc += d[i] as i64 * e[i] as i64;
        }
        for &(s, t) in &self.arrows {
            acc -= d[s] as i64 * e[t] as i64;
        }
        Ok(acc)
    }

    /// Symmetrized Euler form (d,e) = <d,e> + <e,d>.
    pub fn sym_form(&self, d: &DimVector, e: &DimVector) -> Result<i64> {
        Ok(self.euler_form(d, e)? + self.euler_form(e, d)?)
    }

    /// Sign rule (-1)^{tau(d,e)} with tau = <d,d><e,e> + <d,e> mod 2.
    pub fn tau_sign(&self, d: &DimVector, e: &DimVector) -> Result<i64> {
        let dd = self.euler_form(d, d)?;
        let ee = self.euler_form(e, e)?;
        let de = self.euler_form(d, e)?;
        Ok(if (dd * ee + de).rem_euclid(2) == 0 {
            1
        } else {
            -1
        })
    }

    /// Add a reversed partner for every arrow; the pairing records partners.
    pub fn double(&self) -> Quiver {
        let m = self.arrows.len();
        let mut arrows = self.arrows.clone();
        arrows.extend(self.arrows.iter().map(|&(s, t)| (t, s)));
        let mut pairing = BTreeMap::new();
        for a in 0..m {
            pairing.insert(a, a + m);
            pairing.insert(a + m, a);
        }
        Quiver {
            num_vertices: self.num_vertices,
            arrows,
            star_pairing: Some(pairing),
            loop_marks: None,
            framing_vertex: self.framing_vertex,
        }
    }

    /// Double, then add one marked loop at every vertex.
    pub fn triple(&self) -> Quiver {
        let mut q = self.double();
        let base = q.arrows.len();
        let mut marks = Vec::with_capacity(self.num_vertices);
        for i in 0..self.num_vertices {
            q.arrows.push((i, i));
            marks.push(base + i);
        }
        q.loop_marks = Some(marks);
        q
    }

    /// Add a framing vertex with `f_i` arrows from it into each vertex `i`.
    pub fn frame(&self, f: &DimVector) -> Result<Quiver> {
        f.expect_len(self.num_vertices)?;
        let inf = self.num_vertices;
        let mut arrows = self.arrows.clone();
        for i in 0..self.num_vertices {
            for _ in 0..f[i] {
                arrows.push((inf, i));
            }
        }
        Ok(Quiver {
            num_vertices: self.num_vertices + 1,
            arrows,
            star_pairing: self.star_pairing.clone(),
            loop_marks: self.loop_marks.clone(),
            framing_vertex: Some(inf),
        })
    }

    /// Add two framing vertices, each with its own arrow multiplicities into
    /// the base vertices.
    pub fn frame2(&self, f1: &DimVector, f2: &DimVector) -> Result<Quiver> {
        f1.expect_len(self.num_vertices)?;
        f2.expect_len(self.num_vertices)?;
        let inf1 = self.num_vertices;
        let inf2 = self.num_vertices + 1;
        let mut arrows = self.arrows.clone();
        for i in 0..self.num_vertices {
            for _ in 0..f1[i] {
                arrows.push((inf1, i));
            }
        }
        for i in 0..self.num_vertices {
            for _ in 0..f2[i] {
                arrows.push((inf2, i));
            }
        }
        Ok(Quiver {
            num_vertices: self.num_vertices + 2,
            arrows,
            star_pairing: self.star_pairing.clone(),
            loop_marks: self.loop_marks.clone(),
            framing_vertex: Some(inf1),
        })
    }

    /// Reverse every arrow, dropping the structure maps (they do not carry
    /// over meaningfully for a bare shape op).
    pub fn opposite(&self) -> Quiver {
        Quiver {
            num_vertices: self.num_vertices,
            arrows: self.arrows.iter().map(|&(s, t)| (t, s)).collect(),
            star_pairing: None,
            loop_marks: None,
            framing_vertex: None,
        }
    }

    /// Restriction to a vertex subset (given as sorted indices): keeps arrows
    /// with both ends inside and renumbers vertices densely.
    pub fn restrict(&self, vertices: &[usize]) -> Quiver {
        let mut new_index = vec![usize::MAX; self.num_vertices];
        for (new, &old) in vertices.iter().enumerate() {
            new_index[old] = new;
        }
        let arrows = self
            .arrows
            .iter()
            .filter(|&&(s, t)| new_index[s] != usize::MAX && new_index[t] != usize::MAX)
            .map(|&(s, t)| (new_index[s], new_index[t]))
            .collect();
        Quiver {
            num_vertices: vertices.len(),
            arrows,
            star_pairing: None,
            loop_marks: None,
            framing_vertex: None,
        }
    }

    /// True when the arrow multiset is closed under reversal (shape only).
    pub fn is_symmetric_shape(&self) -> bool {
        let mut count: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(s, t) in &self.arrows {
            *count.entry((s, t)).or_insert(0) += 1;
            *count.entry((t, s)).or_insert(0) -= 1;
        }
        count.values().all(|&c| c == 0)
    }

    pub fn has_loops(&self) -> bool {
        self.arrows.iter().any(|&(s, t)| s == t)
    }

    /// Canonical JSON of the shape (no weights). Used for cache keys.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.to_document(None)).expect("quiver serializes")
    }

    /// Hex SHA-256 of the canonical shape JSON.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_document(&self, weights: Option<&Weighting>) -> QuiverDocument {
        let star_pairing = self.star_pairing.as_ref().map(|p| {
            p.iter()
                .filter(|(a, b)| a < b)
                .map(|(&a, &b)| (a, b))
                .collect()
        });
        QuiverDocument {
            vertices: self.num_vertices,
            arrows: self.arrows.clone(),
            star_pairing,
            loop_marks: self.loop_marks.clone(),
            framing_vertex: self.framing_vertex,
            weights: weights.cloned(),
        }
    }
}

/// On-disk JSON form of a quiver, with optional attached weighting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuiverDocument {
    pub vertices: usize,
    pub arrows: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star_pairing: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loop_marks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framing_vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Weighting>,
}

impl QuiverDocument {
    pub fn parse(text: &str) -> Result<(Quiver, Option<Weighting>)> {
        let doc: QuiverDocument = serde_json::from_str(text)?;
        doc.into_quiver()
    }

    pub fn into_quiver(self) -> Result<(Quiver, Option<Weighting>)> {
        let mut pairing = None;
        if let Some(pairs) = self.star_pairing {
            let mut map = BTreeMap::new();
            for (a, b) in pairs {
                map.insert(a, b);
                map.insert(b, a);
            }
            pairing = Some(map);
        }
        let q = Quiver {
            num_vertices: self.vertices,
            arrows: self.arrows,
            star_pairing: pairing,
            loop_marks: self.loop_marks,
            framing_vertex: self.framing_vertex,
        };
        q.validate()?;
        if let Some(wt) = &self.weights {
            wt.expect_arrows(q.num_arrows())?;
        }
        Ok((q, self.weights))
    }
}

/// Integer weight vectors attached to the arrows, valued in Z^rank.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Weighting {
    pub rank: usize,
    pub per_arrow: Vec<Vec<i64>>,
}

impl Weighting {
    pub fn new(rank: usize, per_arrow: Vec<Vec<i64>>) -> Result<Weighting> {
        let wt = Weighting { rank, per_arrow };
        for w in &wt.per_arrow {
            if w.len() != wt.rank {
                return Err(Error::InvalidWeighting(format!(
                    "weight vector {w:?} does not have rank {}",
                    wt.rank
                )));
            }
        }
        Ok(wt)
    }

    /// The all-zero weighting of the given rank.
    pub fn zeros(num_arrows: usize, rank: usize) -> Weighting {
        Weighting {
            rank,
            per_arrow: vec![vec![0; rank]; num_arrows],
        }
    }

    /// The rank-2 weighting on a tripled quiver sending originals to (1,0),
    /// stars to (0,1), and marked loops to (-1,-1).
    pub fn canonical_tripled(q: &Quiver) -> Result<Weighting> {
        if !q.is_tripled_shape() {
            return Err(Error::InvalidQuiver(
                "canonical weighting needs a tripled quiver".into(),
            ));
        }
        let pairing = q.star_pairing.as_ref().expect("tripled");
        let mut per_arrow = vec![vec![0i64; 2]; q.num_arrows()];
        for (a, w) in per_arrow.iter_mut().enumerate() {
            if let Some(&b) = pairing.get(&a) {
                *w = if a < b { vec![1, 0] } else { vec![0, 1] };
            } else {
                *w = vec![-1, -1];
            }
        }
        Ok(Weighting { rank: 2, per_arrow })
    }

    pub fn expect_arrows(&self, num_arrows: usize) -> Result<()> {
        if self.per_arrow.len() != num_arrows {
            return Err(Error::InvalidWeighting(format!(
                "weighting covers {} arrows, quiver has {num_arrows}",
                self.per_arrow.len()
            )));
        }
        for w in &self.per_arrow {
            if w.len() != self.rank {
                return Err(Error::InvalidWeighting(format!(
                    "weight vector {w:?} does not have rank {}",
                    self.rank
                )));
            }
        }
        Ok(())
    }

    pub fn weight(&self, arrow: usize) -> &[i64] {
        &self.per_arrow[arrow]
    }
}

fn vec_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_neg(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}

/// Check the two weighting conditions on a tripled quiver: every arrow pair
/// satisfies wt(a) + wt(a*) + wt(omega_i) = 0 at both endpoint loops, and an
/// integer-linear map L: Z^rank -> Z^2 exists sending originals to (1,0),
/// stars to (0,1), and marked loops to (-1,-1).
pub fn validate_weighting(q: &Quiver, wt: &Weighting) -> Result<()> {
    if !q.is_tripled_shape() {
        return Err(Error::InvalidQuiver(
            "weighting validation needs a tripled quiver".into(),
        ));
    }
    wt.expect_arrows(q.num_arrows())?;
    let pairing = q.star_pairing.as_ref().expect("tripled");
    let marks = q.loop_marks.as_ref().expect("tripled");

    // All marked-loop weights must agree (their common negation is hbar).
    let omega0 = wt.weight(marks[0]).to_vec();
    for &m in marks {
        if wt.weight(m) != omega0.as_slice() {
            return Err(Error::InvalidWeighting(format!(
                "marked-loop weights differ: {:?} vs {:?} (hbar would be inconsistent)",
                omega0,
                wt.weight(m)
            )));
        }
    }

    // Invariance: each pair sums to -wt(omega) at both endpoints.
    for (&a, &b) in pairing.iter().filter(|(a, b)| a < b) {
        let (s, t) = q.arrows[a];
        let pair_sum = vec_add(wt.weight(a), wt.weight(b));
        for v in [s, t] {
            let mark = q.loop_mark_at(v).expect("tripled quiver has all marks");
            let total = vec_add(&pair_sum, wt.weight(mark));
            if total.iter().any(|&x| x != 0) {
                return Err(Error::InvalidWeighting(format!(
                    "arrow pair ({a},{b}) plus loop weight at vertex {v} sums to {total:?}, not zero"
                )));
            }
        }
    }

    // Integer-linear L: rows of the constraint system are the weight vectors,
    // right-hand sides the two target coordinates.
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut rhs1: Vec<i64> = Vec::new();
    let mut rhs2: Vec<i64> = Vec::new();
    for a in 0..q.num_arrows() {
        rows.push(wt.weight(a).to_vec());
        if let Some(&b) = pairing.get(&a) {
            if a < b {
                rhs1.push(1);
                rhs2.push(0);
            } else {
                rhs1.push(0);
                rhs2.push(1);
            }
        } else {
            rhs1.push(-1);
            rhs2.push(-1);
        }
    }
    for (rhs, which) in [(rhs1, "first"), (rhs2, "second")] {
        if solve_integer_system(&rows, &rhs).is_none() {
            return Err(Error::InvalidWeighting(format!(
                "no integer-linear map hits the {which} target coordinate"
            )));
        }
    }
    Ok(())
}

pub fn weighting_is_valid(q: &Quiver, wt: &Weighting) -> bool {
    validate_weighting(q, wt).is_ok()
}

/// hbar as a vector of t-coefficients: wt(a) + wt(a*) for any pair, equal to
/// -wt(omega_i); requires a validated weighting.
pub fn hbar(q: &Quiver, wt: &Weighting) -> Result<Vec<i64>> {
    validate_weighting(q, wt)?;
    let marks = q.loop_marks.as_ref().expect("tripled");
    Ok(vec_neg(wt.weight(marks[0])))
}

/// True when the weighted arrow multiset is closed under reversal with
/// negated weight; products over such quivers obey the pure-sign swap law.
pub fn is_graded_symmetric(q: &Quiver, wt: &Weighting) -> bool {
    if wt.per_arrow.len() != q.num_arrows() {
        return false;
    }
    let mut count: BTreeMap<(usize, usize, Vec<i64>), i64> = BTreeMap::new();
    for a in 0..q.num_arrows() {
        let (s, t) = q.arrows[a];
        let w = wt.weight(a).to_vec();
        *count.entry((s, t, w.clone())).or_insert(0) += 1;
        *count.entry((t, s, vec_neg(&w))).or_insert(0) -= 1;
    }
    count.values().all(|&c| c == 0)
}

/// Solve A x = b over the integers via Smith normal form; returns one
/// solution when it exists. Sizes here are tiny (arrows x rank).
fn solve_integer_system(a_rows: &[Vec<i64>], b: &[i64]) -> Option<Vec<i64>> {
    let m = a_rows.len();
    let n = if m == 0 { 0 } else { a_rows[0].len() };
    if m == 0 {
        return Some(vec![]);
    }
    let mut a: Vec<Vec<i128>> = a_rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // Row transforms applied to b, column transforms accumulated in v.
    let mut bb: Vec<i128> = b.iter().map(|&x| x as i128).collect();
    let mut v: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();

    let mut k = 0usize;
    while k < m.min(n) {
        // Find a pivot with the smallest nonzero absolute value.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if a[i][j] != 0
                    && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(k, pi);
        bb.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        for vr in v.iter_mut() {
            vr.swap(k, pj);
        }

        let mut dirty = false;
        for i in (k + 1)..m {
            let qq = a[i][k].div_euclid(a[k][k]);
            if qq != 0 {
                for j in k..n {
                    a[i][j] -= qq * a[k][j];
                }
                bb[i] -= qq * bb[k];
            }
            if a[i][k] != 0 {
                dirty = true;
            }
        }
        for j in (k + 1)..n {
            let qq = a[k][j].div_euclid(a[k][k]);
            if qq != 0 {
                for row in a.iter_mut() {
                    row[j] -= qq * row[k];
                }
                for vr in v.iter_mut() {
                    vr[j] -= qq * vr[k];
                }
            }
            if a[k][j] != 0 {
                dirty = true;
            }
        }
        if !dirty {
            k += 1;
        }
    }

    // a is now diagonal (up to the trailing zero block); solve D y = bb.
    let mut y = vec![0i128; n];
    for i in 0..m {
        let d = if i < n { a[i][i] } else { 0 };
        if d == 0 {
            if bb[i] != 0 {
                return None;
            }
        } else {
            if bb[i] % d != 0 {
                return None;
            }
            y[i] = bb[i] / d;
        }
    }
    // x = V y.
    let x: Vec<i64> = (0..n)
        .map(|i| {
            let s: i128 = (0..n).map(|j| v[i][j] * y[j]).sum();
            s as i64
        })
        .collect();
    Some(x)
}

/// A slope function: zeta is a rational vector over the vertices, theta the
/// target slope; the slope of d != 0 is (zeta . d) / |d|.
#[derive(Clone, Debug)]
pub struct StabilityCondition {
    pub zeta: Vec<BigRational>,
    pub theta: BigRational,
}

impl StabilityCondition {
    pub fn from_integers(zeta: &[i64], theta_num: i64, theta_den: i64) -> StabilityCondition {
        StabilityCondition {
            zeta: zeta
                .iter()
                .map(|&z| BigRational::from_integer(BigInt::from(z)))
                .collect(),
            theta: BigRational::new(BigInt::from(theta_num), BigInt::from(theta_den)),
        }
    }

    pub fn slope(&self, d: &DimVector) -> Option<BigRational> {
        if d.is_zero() {
            return None;
        }
        let mut num = BigRational::zero();
        for i in 0..d.len() {
            num += &self.zeta[i] * BigRational::from_integer(BigInt::from(d[i]));
        }
        Some(num / BigRational::from_integer(BigInt::from(d.total())))
    }
}

/// True when the Euler form is symmetric on all pairs of the slope-theta cone
/// members within the bound.
pub fn is_generic(q: &Quiver, stab: &StabilityCondition, bound: &DimVector) -> Result<bool> {
    bound.expect_len(q.num_vertices)?;
    if stab.zeta.len() != q.num_vertices {
        return Err(Error::DimLength {
            expected: q.num_vertices,
            got: stab.zeta.len(),
        });
    }
    let cone: Vec<DimVector> = DimVector::boxed_nonzero(bound)
        .filter(|d| stab.slope(d).as_ref() == Some(&stab.theta))
        .collect();
    for d1 in &cone {
        for d2 in &cone {
            if q.euler_form(d1, d2)? != q.euler_form(d2, d1)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vertices, arrows", self.num_vertices)?;
        for &(s, t) in &self.arrows {
            write!(f, " {s}->{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    #[test]
    fn euler_form_on_reference_quivers() {
        let a2 = Quiver::linear(2);
        assert_eq!(a2.euler_form(&dv(&[1, 1]), &dv(&[1, 1])).unwrap(), 1);

        let jordan = Quiver::jordan();
        for n in 0..5u32 {
            assert_eq!(jordan.euler_form(&dv(&[n]), &dv(&[n])).unwrap(), 0);
        }

        let k3 = Quiver::kronecker(3);
        assert_eq!(k3.euler_form(&dv(&[2, 1]), &dv(&[1, 1])).unwrap(), -3);
    }

    #[test]
    fn sym_form_on_reference_quivers() {
        let a2 = Quiver::linear(2);
        assert_eq!(a2.sym_form(&dv(&[1, 0]), &dv(&[0, 1])).unwrap(), -1);
        assert_eq!(Quiver::jordan().sym_form(&dv(&[1]), &dv(&[1])).unwrap(), 0);
        assert_eq!(Quiver::loops(2).sym_form(&dv(&[1]), &dv(&[1])).unwrap(), -2);
    }

    #[test]
    fn form_rejects_wrong_lengths() {
        let a2 = Quiver::linear(2);
        assert!(a2.euler_form(&dv(&[1]), &dv(&[1, 1])).is_err());
    }

    #[test]
    fn tripled_constructions() {
        let t1 = Quiver::point().triple();
        assert_eq!(t1.num_vertices, 1);
        assert_eq!(t1.arrows, vec![(0, 0)]);
        assert!(t1.is_tripled_shape());

        let t2 = Quiver::linear(2).triple();
        assert_eq!(t2.num_vertices, 2);
        assert_eq!(t2.arrows, vec![(0, 1), (1, 0), (0, 0), (1, 1)]);
        assert!(t2.is_tripled_shape());
        // Euler form of the tripled shape evaluates through the constructed
        // arrows: <d1,d2> = 0*... with one arrow each way and two loops.
        assert_eq!(t2.euler_form(&dv(&[1, 0]), &dv(&[0, 1])).unwrap(), -1);
    }

    #[test]
    fn framed_construction_adds_source_arrows() {
        let f = Quiver::point().frame(&dv(&[2])).unwrap();
        assert_eq!(f.num_vertices, 2);
        assert_eq!(f.arrows, vec![(1, 0), (1, 0)]);
        assert_eq!(f.framing_vertex, Some(1));

        let f2 = Quiver::point().frame2(&dv(&[1]), &dv(&[1])).unwrap();
        assert_eq!(f2.num_vertices, 3);
        assert_eq!(f2.arrows, vec![(1, 0), (2, 0)]);
    }

    #[test]
    fn tau_sign_values() {
        let t2 = Quiver::linear(2).triple();
        assert_eq!(t2.tau_sign(&dv(&[1, 0]), &dv(&[0, 1])).unwrap(), -1);
        assert_eq!(t2.tau_sign(&dv(&[1, 1]), &dv(&[0, 0])).unwrap(), 1);

        let tj = Quiver::jordan().triple();
        // <(1),(1)> on the tripled Jordan quiver is 1 - 3 = -2, so the sign
        // exponent is even.
        assert_eq!(tj.euler_form(&dv(&[1]), &dv(&[1])).unwrap(), -2);
        assert_eq!(tj.tau_sign(&dv(&[1]), &dv(&[1])).unwrap(), 1);
    }

    #[test]
    fn tau_sign_is_symmetric_on_samples() {
        let q = Quiver::kronecker(3).triple();
        for d in DimVector::boxed_nonzero(&dv(&[2, 2])) {
            for e in DimVector::boxed_nonzero(&dv(&[2, 2])) {
                assert_eq!(q.tau_sign(&d, &e).unwrap(), q.tau_sign(&e, &d).unwrap());
            }
        }
    }

    #[test]
    fn genericity_checks() {
        let a2 = Quiver::linear(2);
        let all = StabilityCondition::from_integers(&[0, 0], 0, 1);
        assert!(!is_generic(&a2, &all, &dv(&[2, 2])).unwrap());

        let one_side = StabilityCondition::from_integers(&[1, 0], 1, 1);
        assert!(is_generic(&a2, &one_side, &dv(&[2, 2])).unwrap());

        // Symmetric quivers are generic for every slope.
        let sym = Quiver::jordan().double();
        for theta in [0, 1] {
            let stab = StabilityCondition::from_integers(&[1], theta, 1);
            assert!(is_generic(&sym, &stab, &dv(&[3])).unwrap());
        }
    }

    #[test]
    fn weighting_validation_and_hbar() {
        // Tripled point: only the marked loop, weight (-1,-1).
        let t1 = Quiver::point().triple();
        let wt = Weighting::new(2, vec![vec![-1, -1]]).unwrap();
        validate_weighting(&t1, &wt).unwrap();
        assert_eq!(hbar(&t1, &wt).unwrap(), vec![1, 1]);

        // Canonical weighting on the tripled A_2 quiver.
        let t2 = Quiver::linear(2).triple();
        let wt = Weighting::canonical_tripled(&t2).unwrap();
        validate_weighting(&t2, &wt).unwrap();
        assert_eq!(hbar(&t2, &wt).unwrap(), vec![1, 1]);

        // Breaking one loop weight breaks invariance.
        let mut bad = wt.clone();
        bad.per_arrow[2] = vec![-1, 0];
        assert!(validate_weighting(&t2, &bad).is_err());
        assert!(!weighting_is_valid(&t2, &bad));
    }

    #[test]
    fn graded_symmetry_detection() {
        let t2 = Quiver::linear(2).triple();
        // Canonical weighting is not closed under reversal with negation.
        let canonical = Weighting::canonical_tripled(&t2).unwrap();
        assert!(!is_graded_symmetric(&t2, &canonical));
        // The zero weighting is.
        assert!(is_graded_symmetric(&t2, &Weighting::zeros(4, 2)));
        // Rank-1 weighting with opposite pair weights and zero loop weight is.
        let sym = Weighting::new(1, vec![vec![1], vec![-1], vec![0], vec![0]]).unwrap();
        assert!(is_graded_symmetric(&t2, &sym));
        // ...but it is not a valid weighting (no integer-linear map exists).
        assert!(!weighting_is_valid(&t2, &sym));
    }

    #[test]
    fn quiver_json_round_trip() {
        let q = Quiver::linear(2).triple();
        let wt = Weighting::canonical_tripled(&q).unwrap();
        let doc = q.to_document(Some(&wt));
        let text = serde_json::to_string(&doc).unwrap();
        let (q2, wt2) = QuiverDocument::parse(&text).unwrap();
        assert_eq!(q, q2);
        assert_eq!(Some(wt), wt2);
        // Shape hash ignores weights and is stable across round trips.
        assert_eq!(q.hash(), q2.hash());
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(QuiverDocument::parse("{}").is_err());
        assert!(QuiverDocument::parse("{\"vertices\":1,\"arrows\":[[0,3]]}").is_err());
        // Star pairing must reverse.
        let text = "{\"vertices\":2,\"arrows\":[[0,1],[0,1]],\"star_pairing\":[[0,1]]}";
        assert!(QuiverDocument::parse(text).is_err());
    }

    #[test]
    fn integer_system_solver_handles_solvable_and_unsolvable() {
        // x + y = 1 has integer solutions.
        assert!(solve_integer_system(&[vec![1, 1]], &[1]).is_some());
        // 2x = 1 does not.
        assert!(solve_integer_system(&[vec![2]], &[1]).is_none());
        // 2x + 3y = 1 does.
        let x = solve_integer_system(&[vec![2, 3]], &[1]).unwrap();
        assert_eq!(2 * x[0] + 3 * x[1], 1);
    }
}
