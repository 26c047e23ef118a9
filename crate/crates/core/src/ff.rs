use crate::error::{Error, Result};

/// A finite field of order p^k. Elements are `u64` codes: for k = 1 the code
/// is the residue itself; for k > 1 the code packs the coefficient vector of
/// the polynomial representative in base p (degree-j coefficient = j-th
/// digit).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteField {
    p: u64,
    k: u32,
    /// Low coefficients c_0..c_{k-1} of the monic modulus x^k + c_{k-1}
    /// x^{k-1} + ... + c_0; empty when k = 1.
    modulus: Vec<u64>,
    q: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteField {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<FiniteField> {
        if !is_prime(p) {
            return Err(Error::InvalidQuiver(format!("{p} is not prime")));
        }
        Ok(FiniteField {
            p,
            k: 1,
            modulus: vec![],
            q: p,
        })
    }

    /// The field F_{p^k} presented by a monic irreducible modulus with the
    /// given low coefficients c_0..c_{k-1}. Irreducibility is verified by
    /// searching for monic factors of degree up to k/2.
    pub fn extension(p: u64, k: u32, modulus_low: Vec<u64>) -> Result<FiniteField> {
        if !is_prime(p) {
            return Err(Error::InvalidQuiver(format!("{p} is not prime")));
        }
        if k < 2 {
            return Err(Error::InvalidQuiver(
                "extension degree must be at least 2 (use prime() for k = 1)".into(),
            ));
        }
        if modulus_low.len() != k as usize {
            return Err(Error::InvalidQuiver(format!(
                "modulus needs {k} low coefficients, got {}",
                modulus_low.len()
            )));
        }
        if modulus_low.iter().any(|&c| c >= p) {
            return Err(Error::InvalidQuiver(
                "modulus coefficients must be reduced mod p".into(),
            ));
        }
        let q = p
            .checked_pow(k)
            .ok_or_else(|| Error::InvalidQuiver("field order overflows u64".into()))?;
        // Full modulus as coefficient vector, degree k monic.
        let mut full = modulus_low.clone();
        full.push(1);
        if !poly_is_irreducible(&full, p) {
            return Err(Error::InvalidQuiver(format!(
                "modulus {modulus_low:?} + x^{k} factors over F_{p}"
            )));
        }
        Ok(FiniteField {
            p,
            k,
            modulus: modulus_low,
            q,
        })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            let mut out = 0u64;
            let (mut a, mut b, mut scale) = (a, b, 1u64);
            while a != 0 || b != 0 {
                let da = a % self.p;
                let db = b % self.p;
                let mut s = da + db;
                if s >= self.p {
                    s -= self.p;
                }
                out += s * scale;
                a /= self.p;
                b /= self.p;
                scale *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if self.k == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let mut out = 0u64;
            let (mut a, mut scale) = (a, 1u64);
            while a != 0 {
                let da = a % self.p;
                if da != 0 {
                    out += (self.p - da) * scale;
                }
                a /= self.p;
                scale *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            (a * b) % self.p
        } else {
            self.mul_ext(a, b)
        }
    }

    fn mul_ext(&self, a: u64, b: u64) -> u64 {
        let k = self.k as usize;
        let mut da = vec![0u64; k];
        let mut db = vec![0u64; k];
        let (mut aa, mut bb) = (a, b);
        for i in 0..k {
            da[i] = aa % self.p;
            db[i] = bb % self.p;
            aa /= self.p;
            bb /= self.p;
        }
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if da[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
            }
        }
        // Reduce x^{k+j} = -modulus_low * x^j from the top down.
        for top in (k..2 * k - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &m) in self.modulus.iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + c * (self.p - m) % (self.p * self.p)) % self.p;
            }
        }
        let mut out = 0u64;
        for i in (0..k).rev() {
            out = out * self.p + prod[i];
        }
        out
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via a^{q-2}; a must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0, "inverse of zero");
        self.pow(a, self.q - 2)
    }
}

/// Remainder of a by monic b over F_p.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let mut r: Vec<u64> = a.to_vec();
    while r.len() > db {
        let lead = *r.last().unwrap();
        let top = r.len() - 1;
        if lead != 0 {
            for i in 0..db {
                let idx = top - db + i;
                r[idx] = (r[idx] + lead * (p - b[i]) % (p * p)) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Irreducibility of a monic polynomial over F_p by exhaustive search for
/// monic factors of degree 1..deg/2. Desk-scale inputs only.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        // All monic polynomials of degree d: p^d choices of low coefficients.
        let total = p.pow(d as u32);
        for code in 0..total {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push(c % p);
                c /= p;
            }
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Dense matrix over a finite field; entries are element codes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl FMatrix {
    pub fn zero(rows: usize, cols: usize) -> FMatrix {
        FMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> FMatrix {
        let mut m = FMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn identity(n: usize) -> FMatrix {
        FMatrix::from_fn(n, n, |i, j| u64::from(i == j))
    }

    pub fn mul(&self, other: &FMatrix, f: &FiniteField) -> FMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = FMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, other.get(l, j));
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, t));
                }
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, f: &FiniteField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self.get(row, j);
                self.set(row, j, self.get(pr, j));
                self.set(pr, j, tmp);
            }
            let inv = f.inv(self.get(row, col));
            for j in col..self.cols {
                let v = f.mul(self.get(row, j), inv);
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row && self.get(r, col) != 0 {
                    let factor = self.get(r, col);
                    for j in col..self.cols {
                        let v = f.sub(self.get(r, j), f.mul(factor, self.get(row, j)));
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &FiniteField) -> usize {
        let mut m = self.clone();
        m.rref(f).len()
    }

    /// A basis of the right nullspace {x : Ax = 0}.
    pub fn nullspace(&self, f: &FiniteField) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![0u64; self.cols];
            vec[free] = 1;
            for (col, &pv) in pivot_set.iter().enumerate() {
                if let Some(r) = pv {
                    vec[col] = f.neg(m.get(r, free));
                }
            }
            basis.push(vec);
        }
        basis
    }

    pub fn is_invertible(&self, f: &FiniteField) -> bool {
        self.rows == self.cols && self.rank(f) == self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(f5.order(), 5);
        assert_eq!(f5.add(3, 4), 2);
        assert_eq!(f5.mul(3, 4), 2);
        assert_eq!(f5.neg(2), 3);
        for a in 1..5 {
            assert_eq!(f5.mul(a, f5.inv(a)), 1);
        }
        assert!(FiniteField::prime(4).is_err());
        assert!(FiniteField::prime(1).is_err());
    }

    #[test]
    fn f4_via_irreducible_modulus() {
        // x^2 + x + 1 over F_2.
        let f4 = FiniteField::extension(2, 2, vec![1, 1]).unwrap();
        assert_eq!(f4.order(), 4);
        // Element 2 encodes x; x * x = x + 1 = 3.
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f4.mul(2, 3), 1);
        for a in 1..4 {
            assert_eq!(f4.mul(a, f4.inv(a)), 1);
        }
        // Distributivity spot check over all triples.
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(f4.mul(a, f4.add(b, c)), f4.add(f4.mul(a, b), f4.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x+1)^2 over F_2.
        assert!(FiniteField::extension(2, 2, vec![1, 0]).is_err());
        // x^2 + 1 is irreducible over F_3.
        let f9 = FiniteField::extension(3, 2, vec![1, 0]).unwrap();
        assert_eq!(f9.order(), 9);
        assert_eq!(f9.mul(3, 3), f9.neg(1));
    }

    #[test]
    fn matrix_rank_and_nullspace() {
        let f3 = FiniteField::prime(3).unwrap();
        let m = FMatrix::from_fn(2, 3, |i, j| ((i + j) % 3) as u64);
        assert_eq!(m.rank(&f3), 2);
        let ns = m.nullspace(&f3);
        assert_eq!(ns.len(), 1);
        // Verify the nullspace vector actually annihilates.
        for i in 0..2 {
            let mut acc = 0;
            for j in 0..3 {
                acc = f3.add(acc, f3.mul(m.get(i, j), ns[0][j]));
            }
            assert_eq!(acc, 0);
        }

        let id = FMatrix::identity(3);
        assert!(id.is_invertible(&f3));
        assert_eq!(id.nullspace(&f3).len(), 0);

        let zero = FMatrix::zero(2, 2);
        assert_eq!(zero.nullspace(&f3).len(), 2);
    }

    #[test]
    fn matrix_multiplication() {
        let f2 = FiniteField::prime(2).unwrap();
        let a = FMatrix::from_fn(2, 2, |i, j| u64::from(i <= j));
        let b = a.mul(&a, &f2);
        // [[1,1],[0,1]]^2 = [[1,0],[0,1]] over F_2.
        assert_eq!(b, FMatrix::identity(2));
    }
}
