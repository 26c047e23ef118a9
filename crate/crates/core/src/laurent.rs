//! Truncated Laurent expansions in the inverse of a chosen variable, with
//! exact polynomial coefficients and honest truncation bookkeeping.

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, Var};
use std::collections::BTreeMap;
use std::fmt;

/// Order value used for series known exactly to all orders (finite objects).
pub const EXACT_ORDER: i64 = i64::MAX / 4;

/// A finite sum `Σ_k c_k · v^{-k}` (keys `k` may be negative, i.e. positive
/// powers of `v`), exact for all `k ≤ order` and silent beyond.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    var: Var,
    order: i64,
    coeffs: BTreeMap<i64, MultiPoly>,
}

impl LaurentSeries {
    pub fn zero(var: Var, order: i64) -> Self {
        LaurentSeries {
            var,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    /// Buckets a polynomial by powers of `var`; the result is exact.
    pub fn from_poly(var: Var, poly: &MultiPoly) -> Self {
        let mut coeffs = BTreeMap::new();
        for (power, coeff) in poly.split_by_var(var) {
            coeffs.insert(-(power as i64), coeff);
        }
        LaurentSeries {
            var,
            order: EXACT_ORDER,
            coeffs,
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Largest inverse power the series is exact for.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Coefficient of `var^{-k}` (zero when absent, meaningful for `k ≤ order`).
    pub fn coeff(&self, k: i64) -> MultiPoly {
        self.coeffs.get(&k).cloned().unwrap_or_else(MultiPoly::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &MultiPoly)> + '_ {
        self.coeffs.iter().map(|(&k, p)| (k, p))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn set_term(&mut self, k: i64, p: MultiPoly) {
        if !p.is_zero() && k <= self.order {
            self.coeffs.insert(k, p);
        }
    }

    pub fn add_term(&mut self, k: i64, p: &MultiPoly) {
        if k > self.order || p.is_zero() {
            return;
        }
        let mut cur = self.coeffs.remove(&k).unwrap_or_else(MultiPoly::zero);
        cur.add_assign_ref(p);
        self.set_term(k, cur);
    }

    /// Smallest key at which a term could exist: the smallest present key, or
    /// just beyond the order for a (truncated) zero series.
    fn effective_min(&self) -> i64 {
        self.coeffs
            .keys()
            .next()
            .copied()
            .unwrap_or_else(|| self.order.saturating_add(1).min(EXACT_ORDER))
    }

    pub fn truncate(mut self, order: i64) -> Self {
        self.order = self.order.min(order);
        let cutoff = self.order;
        self.coeffs.retain(|&k, _| k <= cutoff);
        self
    }

    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_var(other)?;
        let mut out = LaurentSeries::zero(self.var, self.order.min(other.order));
        for (k, p) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_term(*k, p);
        }
        Ok(out)
    }

    /// Product with the truncation order each factor can actually support:
    /// a term of one factor below its minimal key cannot influence keys up to
    /// the other factor's order plus that minimum.
    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_var(other)?;
        let order = (self.order.saturating_add(other.effective_min()))
            .min(other.order.saturating_add(self.effective_min()))
            .min(EXACT_ORDER);
        let mut out = LaurentSeries::zero(self.var, order);
        for (&ka, pa) in &self.coeffs {
            for (&kb, pb) in &other.coeffs {
                let k = ka + kb;
                if k <= order {
                    out.add_term(k, &pa.mul(pb));
                }
            }
        }
        Ok(out)
    }

    /// The coefficient of `var^{-1}`; requires truncation order at least 1.
    pub fn residue(&self) -> Result<MultiPoly> {
        if self.order < 1 {
            return Err(Error::InsufficientOrder {
                order: self.order,
                requested: 1,
            });
        }
        Ok(self.coeff(1))
    }

    fn check_var(&self, other: &LaurentSeries) -> Result<()> {
        if self.var != other.var {
            return Err(Error::InternalInconsistency(format!(
                "series in {} combined with series in {}",
                self.var, other.var
            )));
        }
        Ok(())
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&k, p) in &self.coeffs {
            // Pull the sign out of single-term coefficients for readability.
            let (neg, shown) = if p.num_terms() == 1 {
                let rendered = p.to_string();
                match rendered.strip_prefix('-') {
                    Some(abs) => (true, abs.to_string()),
                    None => (false, rendered),
                }
            } else {
                (false, format!("({p})"))
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            let var_part = match k.signum() {
                0 => String::new(),
                _ if k == -1 => format!("{}", self.var),
                -1 => format!("{}^{}", self.var, -k),
                _ => format!("{}^(-{})", self.var, k),
            };
            match (var_part.is_empty(), shown == "1") {
                (true, _) => write!(f, "{shown}")?,
                (false, true) => write!(f, "{var_part}")?,
                (false, false) => write!(f, "{shown}*{var_part}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    fn xv() -> Var {
        Var::x(0, 0)
    }

    #[test]
    fn from_poly_buckets_and_is_exact() {
        let p = &MultiPoly::var(xv()).pow(2) + &MultiPoly::var(Var::T(0));
        let s = LaurentSeries::from_poly(xv(), &p);
        assert_eq!(s.coeff(-2).to_string(), "1");
        assert_eq!(s.coeff(0).to_string(), "t[1]");
        assert_eq!(s.order(), EXACT_ORDER);
        assert_eq!(s.residue().unwrap().to_string(), "0");
    }

    #[test]
    fn multiplication_tracks_honest_orders() {
        // s = x^{-1} + x^{-2} + ... truncated at 3.
        let mut s = LaurentSeries::zero(xv(), 3);
        for k in 1..=3 {
            s.add_term(k, &MultiPoly::one());
        }
        let prod = s.mul(&s).unwrap();
        // Each factor starts at key 1, so the product is exact up to 3 + 1.
        assert_eq!(prod.order(), 4);
        assert_eq!(prod.coeff(2).to_string(), "1");
        assert_eq!(prod.coeff(3).to_string(), "2");
        assert_eq!(prod.coeff(4).to_string(), "3");
    }

    #[test]
    fn residue_requires_enough_order() {
        let s = LaurentSeries::zero(xv(), 0);
        assert!(matches!(
            s.residue(),
            Err(Error::InsufficientOrder {
                order: 0,
                requested: 1
            })
        ));
    }

    #[test]
    fn display_shows_powers_of_the_inverse_variable() {
        let mut s = LaurentSeries::zero(xv(), 5);
        s.add_term(-1, &MultiPoly::one());
        s.add_term(0, &MultiPoly::from_int(3));
        s.add_term(1, &MultiPoly::t_combination(&[2, 2]));
        s.add_term(2, &MultiPoly::from_int(-1));
        assert_eq!(
            s.to_string(),
            "x[1,1] + 3 + (2*t[2] + 2*t[1])*x[1,1]^(-1) - x[1,1]^(-2)"
        );
    }
}
