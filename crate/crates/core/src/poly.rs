//! Exact sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! The variable universe is `t[1..r]` (equivariant parameters) together with
//! `x[slot, vertex, index]` generators, where slot 0 denotes the plain
//! single-factor ring and slots 1, 2, ... distinguish tensor factors.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Exact coefficient type used throughout the symbolic layer.
pub type Coeff = BigRational;

/// A generator of the polynomial ring.
///
/// The derived order (all `T`s first, then `X`s by slot, vertex, index) is the
/// fixed variable order used for canonical monomial keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Equivariant parameter `t[k]` (0-based internally, 1-based in display).
    T(u8),
    /// Coordinate `x[slot, vertex, index]`; `slot == 0` means unslotted.
    X { slot: u8, vertex: u8, idx: u8 },
}

impl Var {
    pub fn t(k: usize) -> Self {
        Var::T(k as u8)
    }

    pub fn x(vertex: usize, idx: usize) -> Self {
        Var::X {
            slot: 0,
            vertex: vertex as u8,
            idx: idx as u8,
        }
    }

    pub fn x_slot(slot: usize, vertex: usize, idx: usize) -> Self {
        Var::X {
            slot: slot as u8,
            vertex: vertex as u8,
            idx: idx as u8,
        }
    }

    /// Canonical textual name, 1-based: `t[1]`, `x[2,1]`, `x[1,2,1]`.
    pub fn name(&self) -> String {
        match *self {
            Var::T(k) => format!("t[{}]", k as usize + 1),
            Var::X { slot: 0, vertex, idx } => {
                format!("x[{},{}]", vertex as usize + 1, idx as usize + 1)
            }
            Var::X { slot, vertex, idx } => {
                format!("x[{},{},{}]", slot, vertex as usize + 1, idx as usize + 1)
            }
        }
    }

    /// Parses a canonical name produced by [`Var::name`].
    pub fn parse_name(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            pos: 0,
            msg: format!("{msg} in variable name {s:?}"),
        };
        let inner = s
            .strip_suffix(']')
            .ok_or_else(|| bad("missing closing bracket"))?;
        let (head, body) = inner
            .split_once('[')
            .ok_or_else(|| bad("missing opening bracket"))?;
        let nums: Vec<u32> = body
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| bad("bad integer")))
            .collect::<Result<_>>()?;
        let small = |n: u32| -> Result<u8> {
            if (1..=255).contains(&n) {
                Ok((n - 1) as u8)
            } else {
                Err(bad("index out of range"))
            }
        };
        match (head, nums.as_slice()) {
            ("t", [k]) => Ok(Var::T(small(*k)?)),
            ("x", [i, m]) => Ok(Var::X {
                slot: 0,
                vertex: small(*i)?,
                idx: small(*m)?,
            }),
            ("x", [s, i, m]) => {
                if !(1..=255).contains(s) {
                    return Err(bad("slot out of range"));
                }
                Ok(Var::X {
                    slot: *s as u8,
                    vertex: small(*i)?,
                    idx: small(*m)?,
                })
            }
            _ => Err(bad("unrecognized variable")),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A power product of variables, kept sorted by ascending [`Var`] with
/// strictly positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    pairs: Vec<(Var, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { pairs: Vec::new() }
    }

    pub fn var(v: Var) -> Self {
        Monomial { pairs: vec![(v, 1)] }
    }

    pub fn power(v: Var, e: u32) -> Self {
        if e == 0 { Self::one() } else { Monomial { pairs: vec![(v, e)] } }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut acc: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *acc.entry(v).or_insert(0) += e;
            }
        }
        Monomial {
            pairs: acc.into_iter().collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.pairs.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.pairs
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.pairs[i].1)
            .unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.pairs.len() + other.pairs.len());
        let (mut i, mut j) = (0, 0);
        while i < self.pairs.len() && j < other.pairs.len() {
            match self.pairs[i].0.cmp(&other.pairs[j].0) {
                Ordering::Less => {
                    out.push(self.pairs[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.pairs[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.pairs[i].0, self.pairs[i].1 + other.pairs[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.pairs[i..]);
        out.extend_from_slice(&other.pairs[j..]);
        Monomial { pairs: out }
    }

    /// Componentwise quotient, or `None` when some exponent would go negative.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.pairs.len());
        let mut i = 0;
        for &(v, e) in &other.pairs {
            loop {
                if i >= self.pairs.len() {
                    return None;
                }
                let (w, d) = self.pairs[i];
                match w.cmp(&v) {
                    Ordering::Less => {
                        out.push((w, d));
                        i += 1;
                    }
                    Ordering::Equal => {
                        if d < e {
                            return None;
                        }
                        if d > e {
                            out.push((w, d - e));
                        }
                        i += 1;
                        break;
                    }
                    Ordering::Greater => return None,
                }
            }
        }
        out.extend_from_slice(&self.pairs[i..]);
        Some(Monomial { pairs: out })
    }

    /// The monomial with `v` struck out entirely.
    pub fn without_var(&self, v: Var) -> Monomial {
        Monomial {
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|&(w, _)| w != v)
                .collect(),
        }
    }

    /// Applies a variable renaming; images may collide (exponents add).
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.pairs.iter().map(|&(v, e)| (f(v), e)))
    }
}

/// Lexicographic monomial order on the fixed variable order: walking the
/// variable universe in ascending order, the first variable with differing
/// exponents decides, higher exponent first. This is multiplication
/// compatible with `1` as the unique minimum, which exact division relies on.
impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.pairs.get(i), other.pairs.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match ea.cmp(&eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Display comparison: total degree first (descending), then a walk over the
/// variable universe in descending order, higher exponent first.
fn display_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    match b.total_degree().cmp(&a.total_degree()) {
        Ordering::Equal => {}
        ord => return ord,
    }
    let (mut i, mut j) = (a.pairs.len(), b.pairs.len());
    loop {
        match (i, j) {
            (0, 0) => return Ordering::Equal,
            (_, 0) => return Ordering::Less,
            (0, _) => return Ordering::Greater,
            _ => {
                let (va, ea) = a.pairs[i - 1];
                let (vb, eb) = b.pairs[j - 1];
                match va.cmp(&vb) {
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Equal => {
                        match eb.cmp(&ea) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        i -= 1;
                        j -= 1;
                    }
                }
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for &(v, e) in self.pairs.iter().rev() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse exact polynomial: canonical map from monomials to nonzero rationals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        MultiPoly::constant(Coeff::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        MultiPoly::term(Monomial::var(v), Coeff::one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    /// `Σ coeffs[k] · t[k]`, skipping zero coefficients.
    pub fn t_combination(coeffs: &[i64]) -> Self {
        let mut out = MultiPoly::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                out.add_term(
                    Monomial::var(Var::t(k)),
                    Coeff::from_integer(BigInt::from(c)),
                );
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> + '_ {
        self.terms.iter()
    }

    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Coeff {
        self.coeff_of(&Monomial::one())
    }

    /// Greatest term in the monomial order, if any.
    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &MultiPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &MultiPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        // Multiply the smaller term list into the larger one.
        let (small, big) = if self.num_terms() <= other.num_terms() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = MultiPoly::zero();
        for (ms, cs) in &small.terms {
            for (mb, cb) in &big.terms {
                out.add_term(ms.mul(mb), cs * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = MultiPoly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Exact quotient `self / divisor`; any remainder is a hard error.
    pub fn exact_div(&self, divisor: &MultiPoly) -> Result<MultiPoly> {
        let (dm, dc) = divisor
            .leading()
            .ok_or_else(|| Error::InexactDivision("division by zero polynomial".into()))?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.try_div(dm).ok_or_else(|| {
                Error::InexactDivision(format!(
                    "leading term {rm} not divisible by {dm}"
                ))
            })?;
            let qc = rc / dc;
            // rem -= (qm, qc) * divisor; the leading terms cancel exactly.
            for (m, c) in &divisor.terms {
                rem.add_term(qm.mul(m), -(&qc * c));
            }
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// `true` when `divisor` divides `self` exactly.
    pub fn divisible_by(&self, divisor: &MultiPoly) -> bool {
        self.exact_div(divisor).is_ok()
    }

    /// Applies a variable renaming to every monomial (images may collide).
    pub fn rename_vars(&self, f: impl Fn(Var) -> Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.rename(&f), c.clone());
        }
        out
    }

    /// Views the polynomial as univariate in `v`: exponent of `v` mapped to
    /// the (v-free) coefficient polynomial.
    pub fn split_by_var(&self, v: Var) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.degree_in(v);
            out.entry(k)
                .or_insert_with(MultiPoly::zero)
                .add_term(m.without_var(v), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Highest power of `v` appearing in any term.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// All distinct variables appearing with nonzero exponent.
    pub fn support_vars(&self) -> Vec<Var> {
        let mut set: Vec<Var> = Vec::new();
        for m in self.terms.keys() {
            for (v, _) in m.vars() {
                if let Err(i) = set.binary_search(&v) {
                    set.insert(i, v);
                }
            }
        }
        set
    }

    /// Terms in display order (total degree descending, then descending-var walk).
    pub fn display_terms(&self) -> Vec<(&Monomial, &Coeff)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| display_cmp(a.0, b.0));
        terms
    }

    /// Sparse term-list JSON: `[{"coeff":"p/q","exps":{"x[1,1]":2}}, ...]`.
    pub fn to_terms_value(&self) -> serde_json::Value {
        let arr: Vec<serde_json::Value> = self
            .display_terms()
            .into_iter()
            .map(|(m, c)| {
                let exps: serde_json::Map<String, serde_json::Value> = m
                    .vars()
                    .map(|(v, e)| (v.name(), serde_json::Value::from(e)))
                    .collect();
                serde_json::json!({ "coeff": c.to_string(), "exps": exps })
            })
            .collect();
        serde_json::Value::Array(arr)
    }

    /// Parses the term-list JSON produced by [`MultiPoly::to_terms_value`].
    pub fn from_terms_value(value: &serde_json::Value) -> Result<MultiPoly> {
        let arr = value.as_array().ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "term list must be a JSON array".into(),
        })?;
        let mut out = MultiPoly::zero();
        for item in arr {
            let coeff_str = item
                .get("coeff")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: "term missing string \"coeff\"".into(),
                })?;
            let coeff = Coeff::from_str(coeff_str).map_err(|e| Error::Parse {
                pos: 0,
                msg: format!("bad rational {coeff_str:?}: {e}"),
            })?;
            let mut mono = Monomial::one();
            if let Some(exps) = item.get("exps") {
                let map = exps.as_object().ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: "\"exps\" must be a JSON object".into(),
                })?;
                for (name, val) in map {
                    let v = Var::parse_name(name)?;
                    let e = val.as_u64().ok_or_else(|| Error::Parse {
                        pos: 0,
                        msg: format!("bad exponent for {name}"),
                    })?;
                    mono = mono.mul(&Monomial::power(v, e as u32));
                }
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (pos, (m, c)) in self.display_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if pos == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl std::ops::Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl std::ops::Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul(rhs)
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize, m: usize) -> MultiPoly {
        MultiPoly::var(Var::x(i, m))
    }

    fn xs(s: usize, i: usize, m: usize) -> MultiPoly {
        MultiPoly::var(Var::x_slot(s, i, m))
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let one = Monomial::one();
        let a = Monomial::var(Var::x(0, 0));
        let a2 = Monomial::power(Var::x(0, 0), 2);
        let b = Monomial::var(Var::x(0, 1));
        let t = Monomial::var(Var::T(0));
        assert!(one < a);
        assert!(a < a2);
        // Earlier variables dominate: t's come before x's in the fixed order.
        assert!(t > a);
        assert!(a > b);
        // Compatibility with multiplication on a sample of pairs.
        let monos = [one.clone(), a.clone(), a2.clone(), b.clone(), t.clone()];
        for p in &monos {
            for q in &monos {
                if p < q {
                    for r in &monos {
                        assert!(p.mul(r) < q.mul(r), "{p} {q} {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn leading_term_of_product_is_product_of_leading_terms() {
        let p = &(&x(0, 0) + &x(0, 1)) + &MultiPoly::one();
        let q = &x(0, 0) - &MultiPoly::var(Var::T(0));
        let lead = |f: &MultiPoly| f.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let (pm, pc) = lead(&p);
        let (qm, qc) = lead(&q);
        let (rm, rc) = lead(&p.mul(&q));
        assert_eq!(rm, pm.mul(&qm));
        assert_eq!(rc, pc * qc);
    }

    #[test]
    fn exact_division_succeeds_and_fails_as_expected() {
        let xv = x(0, 0);
        let yv = x(0, 1);
        let num = &xv.mul(&xv) - &yv.mul(&yv);
        let den = &xv - &yv;
        let quot = num.exact_div(&den).unwrap();
        assert_eq!(quot, &xv + &yv);

        let bad = &xv.mul(&xv) + &MultiPoly::one();
        assert!(matches!(
            bad.exact_div(&den),
            Err(Error::InexactDivision(_))
        ));
        assert!(matches!(
            xv.exact_div(&MultiPoly::zero()),
            Err(Error::InexactDivision(_))
        ));
        // Division of zero by anything nonzero is zero.
        assert!(MultiPoly::zero().exact_div(&den).unwrap().is_zero());
    }

    #[test]
    fn display_matches_pinned_conventions() {
        assert_eq!(MultiPoly::zero().to_string(), "0");
        assert_eq!(MultiPoly::from_int(-3).to_string(), "-3");
        let d = &xs(2, 0, 0).pow(2) - &xs(1, 0, 0).pow(2);
        assert_eq!(d.to_string(), "x[2,1,1]^2 - x[1,1,1]^2");
        let mut p = MultiPoly::from_int(1);
        p.add_assign_ref(&x(0, 0).pow(2).mul(&MultiPoly::var(Var::T(0))));
        assert_eq!(p.to_string(), "x[1,1]^2*t[1] + 1");
        let half = MultiPoly::constant(Coeff::new(BigInt::from(-1), BigInt::from(2)));
        let q = half.mul(&MultiPoly::var(Var::T(0)));
        assert_eq!(q.to_string(), "-1/2*t[1]");
    }

    #[test]
    fn rename_merges_colliding_images() {
        let p = &x(0, 0) + &x(0, 1);
        let merged = p.rename_vars(|_| Var::x(0, 0));
        assert_eq!(merged.to_string(), "2*x[1,1]");
    }

    #[test]
    fn split_by_var_buckets_exponents() {
        let xv = Var::x(0, 0);
        let p = &(&x(0, 0).pow(2) + &x(0, 0).mul(&x(0, 1))) + &MultiPoly::from_int(7);
        let split = p.split_by_var(xv);
        assert_eq!(split.len(), 3);
        assert_eq!(split[&0].to_string(), "7");
        assert_eq!(split[&1].to_string(), "x[1,2]");
        assert_eq!(split[&2].to_string(), "1");
    }

    #[test]
    fn json_round_trip() {
        let p = &(&xs(2, 0, 0).pow(2) - &xs(1, 0, 0).pow(2))
            + &MultiPoly::constant(Coeff::new(BigInt::from(1), BigInt::from(2)));
        let v = p.to_terms_value();
        let back = MultiPoly::from_terms_value(&v).unwrap();
        assert_eq!(p, back);
        let names: Vec<String> = v.as_array().unwrap()[0]["exps"]
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect();
        assert_eq!(names, vec!["x[2,1,1]".to_string()]);
    }

    #[test]
    fn var_names_round_trip() {
        for v in [Var::T(0), Var::t(3), Var::x(1, 2), Var::x_slot(2, 0, 0)] {
            assert_eq!(Var::parse_name(&v.name()).unwrap(), v);
        }
        assert!(Var::parse_name("x[0,1]").is_err());
        assert!(Var::parse_name("y[1]").is_err());
        assert!(Var::parse_name("x[1").is_err());
    }

    #[test]
    fn t_combination_builds_linear_forms() {
        let h = MultiPoly::t_combination(&[1, 1]);
        assert_eq!(h.to_string(), "t[2] + t[1]");
        assert!(MultiPoly::t_combination(&[0, 0]).is_zero());
    }
}
