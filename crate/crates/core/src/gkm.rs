//! Graded dimensions of generalized Kac–Moody algebras built from quiver
//! Cartan data: a tensor algebra on weighted generators is cut by twisted
//! Serre relations via exact rational linear algebra, and the resulting
//! dimensions are compared against character-level predictions.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dimvec::DimVector;
use crate::error::{Error, Result};
use crate::quiver::{Quiver, QuiverDocument};
use crate::repcount::KacPolynomial;
use crate::roots::positive_roots;

/// One graded generator: a dimension-vector degree, an even cohomological
/// degree, and a multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GkmGenerator {
    pub degree: DimVector,
    #[serde(default)]
    pub coh_degree: i64,
    #[serde(default = "default_mult")]
    pub mult: u64,
}

fn default_mult() -> u64 {
    1
}

/// A base quiver together with generators placed at its positive roots.
///
/// Vertices without loops are "real simple" positions: when such a unit
/// vector carries generators at all, it must carry exactly one of
/// multiplicity one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmDatum {
    quiver: Quiver,
    generators: Vec<GkmGenerator>,
}

#[derive(Serialize, Deserialize)]
struct DatumDoc {
    quiver: QuiverDocument,
    generators: Vec<GkmGenerator>,
}

fn is_real_simple(q: &Quiver, d: &DimVector) -> bool {
    if d.total() != 1 {
        return false;
    }
    let vertex = d.support()[0];
    !q.arrows.iter().any(|&(s, t)| s == t && s == vertex)
}

impl GkmDatum {
    pub fn new(quiver: Quiver, generators: Vec<GkmGenerator>) -> Result<GkmDatum> {
        let n = quiver.num_vertices;
        let mut merged: BTreeMap<(DimVector, i64), u64> = BTreeMap::new();
        for g in &generators {
            g.degree.expect_len(n)?;
            if g.degree.is_zero() {
                return Err(Error::InvalidDatum(
                    "generator at the zero dimension vector".into(),
                ));
            }
            if g.coh_degree.rem_euclid(2) != 0 {
                return Err(Error::InvalidDatum(format!(
                    "generator at {} has odd cohomological degree {}",
                    g.degree, g.coh_degree
                )));
            }
            if g.mult == 0 {
                return Err(Error::InvalidDatum(format!(
                    "generator at {} has multiplicity 0",
                    g.degree
                )));
            }
            *merged.entry((g.degree.clone(), g.coh_degree)).or_insert(0) += g.mult;
        }
        if !merged.is_empty() {
            let mut bound = DimVector::zero(n);
            for (d, _) in merged.keys() {
                for i in 0..n {
                    if d[i] > bound[i] {
                        bound.0[i] = d[i];
                    }
                }
            }
            let roots = positive_roots(&quiver, &bound)?;
            for (d, _) in merged.keys() {
                if !roots.contains(d) {
                    return Err(Error::InvalidDatum(format!(
                        "generator degree {d} is not a positive root of the quiver"
                    )));
                }
            }
            // One multiplicity-1 generator at any populated real simple root.
            let mut per_degree: BTreeMap<&DimVector, (usize, u64)> = BTreeMap::new();
            for ((d, _), m) in &merged {
                let entry = per_degree.entry(d).or_insert((0, 0));
                entry.0 += 1;
                entry.1 += m;
            }
            for (d, (entries, total)) in per_degree {
                if is_real_simple(&quiver, d) && (entries != 1 || total != 1) {
                    return Err(Error::InvalidDatum(format!(
                        "real simple root {d} must carry exactly one generator of multiplicity 1"
                    )));
                }
            }
        }
        let generators = merged
            .into_iter()
            .map(|((degree, coh_degree), mult)| GkmGenerator {
                degree,
                coh_degree,
                mult,
            })
            .collect();
        Ok(GkmDatum { quiver, generators })
    }

    /// One multiplicity-1 generator in cohomological degree 0 at every unit
    /// vector.
    pub fn simple_generators(q: &Quiver) -> Result<GkmDatum> {
        let gens = (0..q.num_vertices)
            .map(|i| GkmGenerator {
                degree: DimVector::unit(q.num_vertices, i),
                coh_degree: 0,
                mult: 1,
            })
            .collect();
        GkmDatum::new(q.clone(), gens)
    }

    pub fn parse(text: &str) -> Result<GkmDatum> {
        let doc: DatumDoc = serde_json::from_str(text)?;
        let (quiver, _) = doc.quiver.into_quiver()?;
        GkmDatum::new(quiver, doc.generators)
    }

    pub fn from_value(v: &Value) -> Result<GkmDatum> {
        let doc: DatumDoc = serde_json::from_value(v.clone())?;
        let (quiver, _) = doc.quiver.into_quiver()?;
        GkmDatum::new(quiver, doc.generators)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(DatumDoc {
            quiver: self.quiver.to_document(None),
            generators: self.generators.clone(),
        })
        .expect("datum serializes")
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn generators(&self) -> &[GkmGenerator] {
        &self.generators
    }
}

/// Finitely supported table of graded dimensions, keyed by dimension vector
/// and cohomological degree. Zero dimensions are not stored; `get` returns 0
/// for absent keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GradedDims {
    dims: BTreeMap<(DimVector, i64), u64>,
}

impl GradedDims {
    pub fn new() -> GradedDims {
        GradedDims::default()
    }

    pub fn insert(&mut self, degree: DimVector, coh_degree: i64, dim: u64) {
        if dim > 0 {
            self.dims.insert((degree, coh_degree), dim);
        }
    }

    pub fn get(&self, degree: &DimVector, coh_degree: i64) -> u64 {
        self.dims
            .get(&(degree.clone(), coh_degree))
            .copied()
            .unwrap_or(0)
    }

    /// Sum over all cohomological degrees at one dimension vector.
    pub fn total_at(&self, degree: &DimVector) -> u64 {
        self.dims
            .iter()
            .filter(|((d, _), _)| d == degree)
            .map(|(_, &m)| m)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DimVector, i64, u64)> {
        self.dims.iter().map(|((d, k), &m)| (d, *k, m))
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,coh_degree,dim\n");
        for (d, k, m) in self.iter() {
            out.push_str(&format!("\"{d}\",{k},{m}\n"));
        }
        out
    }

    pub fn to_value(&self) -> Value {
        Value::Array(
            self.iter()
                .map(|(d, k, m)| {
                    serde_json::json!({
                        "degree": d,
                        "coh_degree": k,
                        "dim": m,
                    })
                })
                .collect(),
        )
    }
}

/// Resource bounds for the tensor-algebra computations.
#[derive(Debug, Clone)]
pub struct GkmConfig {
    /// Maximum admitted word count for any single graded piece.
    pub tensor_dim_limit: u128,
}

impl Default for GkmConfig {
    fn default() -> GkmConfig {
        GkmConfig {
            tensor_dim_limit: 100_000,
        }
    }
}

/// The power to which the twisted adjoint action of a degree-`d1` generator
/// must annihilate a degree-`d2` generator, when the relation scheme applies:
/// `1 - (d1,d2)` whenever the symmetrized pairing vanishes or `d1` is a real
/// simple root — except for a pair at one and the same real simple root,
/// which is unconstrained.
pub fn serre_exponent(q: &Quiver, d1: &DimVector, d2: &DimVector) -> Result<Option<u32>> {
    d1.expect_len(q.num_vertices)?;
    d2.expect_len(q.num_vertices)?;
    let pairing = q.sym_form(d1, d2)?;
    let d1_real_simple = is_real_simple(q, d1);
    if d1_real_simple && d1 == d2 {
        return Ok(None);
    }
    if pairing != 0 && !d1_real_simple {
        return Ok(None);
    }
    let exponent = 1 - pairing;
    if exponent < 0 {
        return Ok(None);
    }
    Ok(Some(exponent as u32))
}

/// A tensor word over the expanded generator basis.
type Word = Vec<u16>;
/// A rational linear combination of tensor words.
type Elem = HashMap<Word, BigRational>;

struct Relation {
    degree: DimVector,
    elem: Vec<(Word, BigRational)>,
}

struct Engine {
    quiver: Quiver,
    tripled: Quiver,
    /// One entry per multiplicity unit: (degree, cohomological degree).
    basis: Vec<(DimVector, i64)>,
}

impl Engine {
    fn new(datum: &GkmDatum) -> Result<Engine> {
        let mut basis = Vec::new();
        for g in datum.generators() {
            for _ in 0..g.mult {
                basis.push((g.degree.clone(), g.coh_degree));
            }
        }
        if basis.len() > u16::MAX as usize {
            return Err(Error::InvalidDatum(format!(
                "{} generators exceed the supported basis size",
                basis.len()
            )));
        }
        Ok(Engine {
            tripled: datum.quiver().triple(),
            quiver: datum.quiver().clone(),
            basis,
        })
    }

    /// Sign for moving a generator of degree `(d1, k1)` past an element of
    /// degree `(d2, k2)`: cohomological Koszul parity times the twist sign of
    /// the tripled quiver.
    fn eps(&self, d1: &DimVector, k1: i64, d2: &DimVector, k2: i64) -> Result<BigRational> {
        let koszul = if (k1 * k2).rem_euclid(2) != 0 { -1 } else { 1 };
        let tau = self.tripled.tau_sign(d1, d2)?;
        Ok(BigRational::from_integer(BigInt::from(koszul * tau)))
    }

    /// Twisted commutator with the generator on the left: `g·x − ε(g,x)·x·g`.
    fn ad(&self, g: u16, x: &Elem, xdeg: &DimVector, xcoh: i64) -> Result<Elem> {
        let (dg, kg) = self.basis[g as usize].clone();
        let eps = self.eps(&dg, kg, xdeg, xcoh)?;
        let mut out: Elem = HashMap::new();
        for (w, c) in x {
            let mut left = Vec::with_capacity(w.len() + 1);
            left.push(g);
            left.extend_from_slice(w);
            add_to(&mut out, left, c.clone());
            let mut right = w.clone();
            right.push(g);
            add_to(&mut out, right, -(c * &eps));
        }
        Ok(out)
    }

    /// Twisted commutator with the generator on the right: `x·g − ε(x,g)·g·x`.
    fn bracket_right(&self, x: &Elem, xdeg: &DimVector, xcoh: i64, g: u16) -> Result<Elem> {
        let (dg, kg) = self.basis[g as usize].clone();
        let eps = self.eps(xdeg, xcoh, &dg, kg)?;
        let mut out: Elem = HashMap::new();
        for (w, c) in x {
            let mut right = w.clone();
            right.push(g);
            add_to(&mut out, right, c.clone());
            let mut left = Vec::with_capacity(w.len() + 1);
            left.push(g);
            left.extend_from_slice(w);
            add_to(&mut out, left, -(c * &eps));
        }
        Ok(out)
    }

    fn word_degree_coh(&self, w: &[u16]) -> (DimVector, i64) {
        let n = self.quiver.num_vertices;
        let mut deg = DimVector::zero(n);
        let mut coh = 0;
        for &g in w {
            let (d, k) = &self.basis[g as usize];
            deg = &deg + d;
            coh += k;
        }
        (deg, coh)
    }

    /// Word counts for every degree in the box, with the resource check.
    fn check_word_counts(&self, cutoff: &DimVector, limit: u128) -> Result<()> {
        let mut counts: BTreeMap<DimVector, u128> = BTreeMap::new();
        for d in DimVector::boxed_iter(cutoff) {
            let c = if d.is_zero() {
                1
            } else {
                let mut total: u128 = 0;
                for (dg, _) in &self.basis {
                    if let Some(rem) = d.checked_sub(dg) {
                        total = total.saturating_add(counts[&rem]);
                    }
                }
                total
            };
            if c > limit {
                return Err(Error::ResourceLimit {
                    what: format!("tensor basis at degree {d}"),
                    needed: c,
                    limit,
                });
            }
            counts.insert(d, c);
        }
        Ok(())
    }

    /// All tensor words for every degree in the box, built first-letter-wise.
    fn build_words(&self, cutoff: &DimVector) -> BTreeMap<DimVector, Vec<Word>> {
        let mut words: BTreeMap<DimVector, Vec<Word>> = BTreeMap::new();
        for d in DimVector::boxed_iter(cutoff) {
            let mut out = Vec::new();
            if d.is_zero() {
                out.push(Vec::new());
            } else {
                for (g, (dg, _)) in self.basis.iter().enumerate() {
                    if let Some(rem) = d.checked_sub(dg) {
                        for tail in &words[&rem] {
                            let mut w = Vec::with_capacity(tail.len() + 1);
                            w.push(g as u16);
                            w.extend_from_slice(tail);
                            out.push(w);
                        }
                    }
                }
            }
            words.insert(d, out);
        }
        words
    }

    fn build_relations(&self, cutoff: &DimVector) -> Result<Vec<Relation>> {
        let mut relations = Vec::new();
        for a in 0..self.basis.len() {
            for b in 0..self.basis.len() {
                let (da, ka) = self.basis[a].clone();
                let (db, kb) = self.basis[b].clone();
                let Some(n) = serre_exponent(&self.quiver, &da, &db)? else {
                    continue;
                };
                let mut target = db.clone();
                for _ in 0..n {
                    target = &target + &da;
                }
                if !target.leq(cutoff) {
                    continue;
                }
                let mut elem: Elem = HashMap::new();
                elem.insert(vec![b as u16], BigRational::one());
                let mut deg = db;
                let mut coh = kb;
                for _ in 0..n {
                    elem = self.ad(a as u16, &elem, &deg, coh)?;
                    deg = &da + &deg;
                    coh += ka;
                }
                if !elem.is_empty() {
                    let mut sorted: Vec<_> = elem.into_iter().collect();
                    sorted.sort();
                    relations.push(Relation {
                        degree: deg,
                        elem: sorted,
                    });
                }
            }
        }
        Ok(relations)
    }

    /// Column layout of the degree-`d` piece: per cohomological degree, a map
    /// from word to column index, plus the block sizes.
    #[allow(clippy::type_complexity)]
    fn block_index(
        &self,
        words: &[Word],
    ) -> (BTreeMap<i64, u64>, HashMap<Word, (i64, usize)>) {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        let mut index = HashMap::new();
        for w in words {
            let (_, coh) = self.word_degree_coh(w);
            let slot = counts.entry(coh).or_insert(0);
            index.insert(w.clone(), (coh, *slot as usize));
            *slot += 1;
        }
        (counts, index)
    }

    /// Feeds every ideal element of degree `d` (relation sandwiched between
    /// basis words) into the per-block elimination states.
    fn add_ideal_rows(
        &self,
        d: &DimVector,
        words: &BTreeMap<DimVector, Vec<Word>>,
        index: &HashMap<Word, (i64, usize)>,
        relations: &[Relation],
        gauss: &mut BTreeMap<i64, Gauss>,
    ) -> Result<()> {
        for rel in relations {
            let Some(rem) = d.checked_sub(&rel.degree) else {
                continue;
            };
            for dx in DimVector::boxed_iter(&rem) {
                let dy = rem.checked_sub(&dx).expect("in box");
                for x in &words[&dx] {
                    for y in &words[&dy] {
                        let mut row = BTreeMap::new();
                        let mut block = None;
                        for (w, c) in &rel.elem {
                            let mut full =
                                Vec::with_capacity(x.len() + w.len() + y.len());
                            full.extend_from_slice(x);
                            full.extend_from_slice(w);
                            full.extend_from_slice(y);
                            let &(coh, col) = index.get(&full).ok_or_else(|| {
                                Error::InternalInconsistency(format!(
                                    "ideal word escaped the degree-{d} basis"
                                ))
                            })?;
                            block = Some(coh);
                            row.insert(col, c.clone());
                        }
                        if let Some(coh) = block {
                            gauss.entry(coh).or_default().add_row(row);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Feeds every left-normed bracket word of degree `d` into the
    /// elimination states.
    fn add_lie_rows(
        &self,
        d: &DimVector,
        index: &HashMap<Word, (i64, usize)>,
        gauss: &mut BTreeMap<i64, Gauss>,
    ) -> Result<()> {
        for g in 0..self.basis.len() {
            let (dg, kg) = self.basis[g].clone();
            if !dg.leq(d) {
                continue;
            }
            let mut elem: Elem = HashMap::new();
            elem.insert(vec![g as u16], BigRational::one());
            self.lie_dfs(d, dg, kg, elem, index, gauss)?;
        }
        Ok(())
    }

    fn lie_dfs(
        &self,
        d: &DimVector,
        deg: DimVector,
        coh: i64,
        elem: Elem,
        index: &HashMap<Word, (i64, usize)>,
        gauss: &mut BTreeMap<i64, Gauss>,
    ) -> Result<()> {
        if &deg == d {
            let mut row = BTreeMap::new();
            for (w, c) in &elem {
                let &(_, col) = index.get(w).ok_or_else(|| {
                    Error::InternalInconsistency(format!(
                        "bracket word escaped the degree-{d} basis"
                    ))
                })?;
                row.insert(col, c.clone());
            }
            gauss.entry(coh).or_default().add_row(row);
            return Ok(());
        }
        for g in 0..self.basis.len() {
            let (dg, kg) = self.basis[g].clone();
            let next_deg = &deg + &dg;
            if !next_deg.leq(d) {
                continue;
            }
            let next = self.bracket_right(&elem, &deg, coh, g as u16)?;
            if next.is_empty() {
                continue;
            }
            self.lie_dfs(d, next_deg, coh + kg, next, index, gauss)?;
        }
        Ok(())
    }
}

fn add_to(elem: &mut Elem, w: Word, c: BigRational) {
    use std::collections::hash_map::Entry;
    match elem.entry(w) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
    }
}

/// Incremental row-echelon state over the rationals.
#[derive(Default)]
struct Gauss {
    pivots: BTreeMap<usize, BTreeMap<usize, BigRational>>,
}

impl Gauss {
    /// Reduces the row against existing pivots, recording it if independent.
    fn add_row(&mut self, mut row: BTreeMap<usize, BigRational>) -> bool {
        loop {
            let Some((&lead, _)) = row.iter().next() else {
                return false;
            };
            let Some(pivot) = self.pivots.get(&lead) else {
                let lc = row[&lead].clone();
                for v in row.values_mut() {
                    *v /= &lc;
                }
                self.pivots.insert(lead, row);
                return true;
            };
            let factor = row[&lead].clone();
            for (col, pc) in pivot {
                let delta = &factor * pc;
                match row.entry(*col) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= &delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Graded dimensions of the tensor algebra on the datum's generators modulo
/// the two-sided ideal of twisted Serre relations, for every degree up to
/// `cutoff`. The degree-0 piece is the ground field.
pub fn associative_dims(
    datum: &GkmDatum,
    cutoff: &DimVector,
    config: &GkmConfig,
) -> Result<GradedDims> {
    cutoff.expect_len(datum.quiver().num_vertices)?;
    let engine = Engine::new(datum)?;
    engine.check_word_counts(cutoff, config.tensor_dim_limit)?;
    let words = engine.build_words(cutoff);
    let relations = engine.build_relations(cutoff)?;
    let mut out = GradedDims::new();
    for d in DimVector::boxed_iter(cutoff) {
        let (counts, index) = engine.block_index(&words[&d]);
        let mut gauss: BTreeMap<i64, Gauss> = BTreeMap::new();
        engine.add_ideal_rows(&d, &words, &index, &relations, &mut gauss)?;
        for (coh, count) in counts {
            let rank = gauss.get(&coh).map_or(0, Gauss::rank) as u64;
            out.insert(d.clone(), coh, count - rank);
        }
    }
    Ok(out)
}

/// Graded dimensions of the Lie algebra generated by the datum's generators
/// under the twisted commutator, inside the associative quotient. Degree 0
/// is omitted.
pub fn lie_dims(datum: &GkmDatum, cutoff: &DimVector, config: &GkmConfig) -> Result<GradedDims> {
    cutoff.expect_len(datum.quiver().num_vertices)?;
    let engine = Engine::new(datum)?;
    engine.check_word_counts(cutoff, config.tensor_dim_limit)?;
    let words = engine.build_words(cutoff);
    let relations = engine.build_relations(cutoff)?;
    let mut out = GradedDims::new();
    for d in DimVector::boxed_iter(cutoff) {
        if d.is_zero() {
            continue;
        }
        let (_, index) = engine.block_index(&words[&d]);
        let mut gauss: BTreeMap<i64, Gauss> = BTreeMap::new();
        engine.add_ideal_rows(&d, &words, &index, &relations, &mut gauss)?;
        let ideal_ranks: BTreeMap<i64, usize> =
            gauss.iter().map(|(k, g)| (*k, g.rank())).collect();
        engine.add_lie_rows(&d, &index, &mut gauss)?;
        for (coh, g) in &gauss {
            let base = ideal_ranks.get(coh).copied().unwrap_or(0);
            out.insert(d.clone(), *coh, (g.rank() - base) as u64);
        }
    }
    Ok(out)
}

/// Root multiplicity of the Kac–Moody algebra of a loop-free quiver: the
/// dimension at `d` of the Lie algebra on one degree-0 generator per vertex.
pub fn km_root_mult(
    q: &Quiver,
    d: &DimVector,
    cutoff: &DimVector,
    config: &GkmConfig,
) -> Result<u64> {
    if q.has_loops() {
        return Err(Error::InvalidQuiver(
            "root multiplicities are defined for loop-free quivers only".into(),
        ));
    }
    d.expect_len(q.num_vertices)?;
    if !d.leq(cutoff) {
        return Err(Error::DegreeMismatch(format!(
            "degree {d} exceeds the cutoff {cutoff}"
        )));
    }
    let datum = GkmDatum::simple_generators(q)?;
    let dims = lie_dims(&datum, cutoff, config)?;
    Ok(dims.total_at(d))
}

/// Laurent polynomial in a half-integer power of q, with integer
/// coefficients. Exponents are stored doubled, so key `k` is the monomial
/// `q^(k/2)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QHalfPolynomial {
    coeffs: BTreeMap<i64, BigInt>,
}

impl QHalfPolynomial {
    pub fn zero() -> QHalfPolynomial {
        QHalfPolynomial::default()
    }

    pub fn one() -> QHalfPolynomial {
        QHalfPolynomial::term(0, BigInt::one())
    }

    /// The monomial `c·q^(half2/2)`.
    pub fn term(half2: i64, c: BigInt) -> QHalfPolynomial {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(half2, c);
        }
        QHalfPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^(half2/2)`.
    pub fn coeff(&self, half2: i64) -> BigInt {
        self.coeffs.get(&half2).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Terms as (doubled exponent, coefficient), ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    pub fn add_assign(&mut self, other: &QHalfPolynomial) {
        for (k, c) in &other.coeffs {
            let entry = self.coeffs.entry(*k).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                self.coeffs.remove(k);
            }
        }
    }

    /// Multiplication by `q^(half2/2)`.
    pub fn shifted(&self, half2: i64) -> QHalfPolynomial {
        QHalfPolynomial {
            coeffs: self.coeffs.iter().map(|(&k, c)| (k + half2, c.clone())).collect(),
        }
    }

    /// Value at q = 1: the sum of the coefficients.
    pub fn at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// True when the polynomial is supported purely in nonnegative integer
    /// powers of q.
    pub fn is_polynomial_in_q(&self) -> bool {
        self.coeffs.keys().all(|&k| k >= 0 && k % 2 == 0)
    }

    /// Terms as `[doubled exponent, coefficient]` pairs.
    pub fn to_value(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(k, c)| serde_json::json!([k, c.to_string()]))
                .collect(),
        )
    }
}

impl std::fmt::Display for QHalfPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, c) in self.coeffs.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.magnitude();
            let power = match k {
                0 => None,
                2 => Some("q".to_string()),
                k if k % 2 == 0 && k > 0 => Some(format!("q^{}", k / 2)),
                k if k % 2 == 0 => Some(format!("q^({})", k / 2)),
                k => Some(format!("q^({k}/2)")),
            };
            match power {
                None => write!(f, "{a}")?,
                Some(p) if a.is_one() => write!(f, "{p}")?,
                Some(p) => write!(f, "{a}*{p}")?,
            }
        }
        Ok(())
    }
}

/// The predicted character of one graded piece: the count polynomial
/// evaluated at q^(-1), so a count coefficient at q^j lands in cohomological
/// degree -2j.
pub fn bps_character(q: &Quiver, d: &DimVector, kac: &KacPolynomial) -> Result<QHalfPolynomial> {
    d.expect_len(q.num_vertices)?;
    if &kac.d != d {
        return Err(Error::DegreeMismatch(format!(
            "count data is for degree {}, requested {d}",
            kac.d
        )));
    }
    if kac.quiver_hash != q.hash() {
        return Err(Error::InvalidDatum(
            "count data was computed for a different quiver".into(),
        ));
    }
    let mut out = QHalfPolynomial::zero();
    for (j, &c) in kac.coefficients.iter().enumerate() {
        if c != 0 {
            out.add_assign(&QHalfPolynomial::term(-2 * (j as i64), BigInt::from(c)));
        }
    }
    Ok(out)
}

/// Character of the free graded-commutative algebra on one generator family
/// per count polynomial, each tensored with a truncated polynomial tail
/// (powers q^0 .. q^(u_truncation-1)), for every degree up to `cutoff`.
///
/// Every contributing generator must have an even self-parity (integer power
/// of q); cross-degree signs cannot change symmetric-algebra dimensions, so
/// only the self-parity is checked.
pub fn pbw_character(
    q: &Quiver,
    family: &BTreeMap<DimVector, KacPolynomial>,
    cutoff: &DimVector,
    u_truncation: u32,
) -> Result<BTreeMap<DimVector, QHalfPolynomial>> {
    cutoff.expect_len(q.num_vertices)?;
    let mut generators: Vec<(DimVector, i64, u64)> = Vec::new();
    for (d, kac) in family {
        d.expect_len(q.num_vertices)?;
        if d.is_zero() {
            return Err(Error::InvalidDatum(
                "character family contains the zero dimension vector".into(),
            ));
        }
        if &kac.d != d {
            return Err(Error::DegreeMismatch(format!(
                "count data is for degree {}, listed under {d}",
                kac.d
            )));
        }
        if !d.leq(cutoff) {
            continue;
        }
        for (j, &c) in kac.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                return Err(Error::UnsupportedSignStructure(format!(
                    "negative multiplicity {c} at degree {d}"
                )));
            }
            for u in 0..u_truncation {
                generators.push((d.clone(), -2 * (j as i64) + 2 * (u as i64), c as u64));
            }
        }
    }
    for (d, half2, _) in &generators {
        if half2.rem_euclid(2) != 0 {
            return Err(Error::UnsupportedSignStructure(format!(
                "generator at degree {d} has odd self-parity q^({half2}/2)"
            )));
        }
    }
    let mut series: BTreeMap<DimVector, QHalfPolynomial> = DimVector::boxed_iter(cutoff)
        .map(|d| (d, QHalfPolynomial::zero()))
        .collect();
    series.insert(DimVector::zero(cutoff.len()), QHalfPolynomial::one());
    for (e, half2, mult) in &generators {
        for _ in 0..*mult {
            // Ascending box order makes each pass a geometric-series factor.
            for d in DimVector::boxed_iter(cutoff) {
                let Some(rem) = d.checked_sub(e) else {
                    continue;
                };
                let add = series[&rem].shifted(*half2);
                series.get_mut(&d).expect("in box").add_assign(&add);
            }
        }
    }
    Ok(series)
}
