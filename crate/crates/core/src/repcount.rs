use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write as IoWrite};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dimvec::DimVector;
use crate::error::{Error, Result};
use crate::ff::{FMatrix, FiniteField};
use crate::pool::parallel_chunk_sum;
use crate::quiver::Quiver;

/// Resource limits and threading for the brute-force counters. Exceeding a
/// threshold is a hard error, never a silent truncation.
#[derive(Clone, Debug)]
pub struct CountConfig {
    /// Cap on the number of representation points q^{dim A_d}.
    pub point_threshold: u128,
    /// Cap on the endomorphism enumeration q^{dim End}; checked against the
    /// worst case dim End = sum d_i^2 (attained at the zero point).
    pub end_threshold: u128,
    /// Worker threads; 0 = machine parallelism.
    pub threads: usize,
    /// Override for the interpolation degree bound (default 1 - <d,d>).
    pub degree_bound_override: Option<usize>,
}

impl Default for CountConfig {
    fn default() -> CountConfig {
        CountConfig {
            point_threshold: 10_000_000,
            end_threshold: 1_000_000,
            threads: 0,
            degree_bound_override: None,
        }
    }
}

/// One point of the representation space: a matrix per arrow, of shape
/// d_{t(a)} x d_{s(a)} over the field.
#[derive(Clone, Debug)]
pub struct RepPoint {
    pub mats: Vec<FMatrix>,
}

impl RepPoint {
    pub fn zero(q: &Quiver, d: &DimVector) -> Result<RepPoint> {
        d.expect_len(q.num_vertices)?;
        let mats = q
            .arrows
            .iter()
            .map(|&(s, t)| FMatrix::zero(d[t] as usize, d[s] as usize))
            .collect();
        Ok(RepPoint { mats })
    }

    /// Decode the little-endian base-q point index (entries ordered arrow by
    /// arrow, row-major).
    pub fn decode(q: &Quiver, d: &DimVector, f: &FiniteField, index: u64) -> Result<RepPoint> {
        let mut point = RepPoint::zero(q, d)?;
        let mut rest = index;
        for m in &mut point.mats {
            for entry in m.data.iter_mut() {
                *entry = rest % f.order();
                rest /= f.order();
            }
        }
        if rest != 0 {
            return Err(Error::InternalInconsistency(format!(
                "point index {index} out of range"
            )));
        }
        Ok(point)
    }

    pub fn check_shape(&self, q: &Quiver, d: &DimVector) -> Result<()> {
        d.expect_len(q.num_vertices)?;
        if self.mats.len() != q.num_arrows() {
            return Err(Error::InvalidQuiver(format!(
                "point has {} matrices, quiver has {} arrows",
                self.mats.len(),
                q.num_arrows()
            )));
        }
        for (a, m) in self.mats.iter().enumerate() {
            let (s, t) = q.arrows[a];
            if m.rows != d[t] as usize || m.cols != d[s] as usize {
                return Err(Error::InvalidQuiver(format!(
                    "matrix for arrow {a} has shape {}x{}, expected {}x{}",
                    m.rows, m.cols, d[t], d[s]
                )));
            }
        }
        Ok(())
    }
}

/// Number of matrix entries in the representation space A_d(Q).
pub fn dim_rep_space(q: &Quiver, d: &DimVector) -> u64 {
    q.arrows
        .iter()
        .map(|&(s, t)| d[t] as u64 * d[s] as u64)
        .sum()
}

/// |GL_d(F_q)| = prod_i prod_{j<d_i} (q^{d_i} - q^j).
pub fn gl_order(d: &DimVector, q: u64) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..d.len() {
        let n = d[i];
        let qn = (q as u128).pow(n);
        for j in 0..n {
            acc *= qn - (q as u128).pow(j);
        }
    }
    acc
}

fn checked_pow_u128(base: u64, exp: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

fn check_threshold(q: u64, exp: u64, limit: u128, what: &str) -> Result<u64> {
    let needed = checked_pow_u128(q, exp).unwrap_or(u128::MAX);
    if needed > limit {
        return Err(Error::ResourceLimit {
            what: what.to_string(),
            needed,
            limit,
        });
    }
    Ok(needed as u64)
}

/// Flattened layout of the per-vertex endomorphism blocks: (offset, size)
/// per vertex, total length.
fn block_layout(d: &DimVector) -> (Vec<(usize, usize)>, usize) {
    let mut blocks = Vec::with_capacity(d.len());
    let mut off = 0usize;
    for i in 0..d.len() {
        let n = d[i] as usize;
        blocks.push((off, n));
        off += n * n;
    }
    (blocks, off)
}

/// The linear system whose nullspace is End(M): unknowns are the entries of
/// the per-vertex matrices (vertex-major, row-major), one equation per entry
/// of phi_{t(a)} M(a) - M(a) phi_{s(a)} for each arrow.
fn intertwiner_system(
    q: &Quiver,
    d: &DimVector,
    mats: &[FMatrix],
    f: &FiniteField,
    blocks: &[(usize, usize)],
    var_count: usize,
) -> FMatrix {
    let rows: usize = q
        .arrows
        .iter()
        .map(|&(s, t)| d[t] as usize * d[s] as usize)
        .sum();
    let mut sys = FMatrix::zero(rows, var_count);
    let mut row = 0usize;
    for (a, &(s, t)) in q.arrows.iter().enumerate() {
        let (dt, ds) = (d[t] as usize, d[s] as usize);
        let m = &mats[a];
        for r in 0..dt {
            for c in 0..ds {
                for k in 0..dt {
                    let col = blocks[t].0 + r * dt + k;
                    let cur = sys.get(row, col);
                    sys.set(row, col, f.add(cur, m.get(k, c)));
                }
                for k in 0..ds {
                    let col = blocks[s].0 + k * ds + c;
                    let cur = sys.get(row, col);
                    sys.set(row, col, f.sub(cur, m.get(r, k)));
                }
                row += 1;
            }
        }
    }
    sys
}

/// Basis of the endomorphism algebra End(M), each element given as one
/// matrix per vertex.
pub fn end_algebra(
    q: &Quiver,
    d: &DimVector,
    m: &RepPoint,
    f: &FiniteField,
) -> Result<Vec<Vec<FMatrix>>> {
    m.check_shape(q, d)?;
    let (blocks, var_count) = block_layout(d);
    let sys = intertwiner_system(q, d, &m.mats, f, &blocks, var_count);
    let flat = sys.nullspace(f);
    Ok(flat
        .into_iter()
        .map(|v| {
            blocks
                .iter()
                .map(|&(off, n)| FMatrix::from_fn(n, n, |r, c| v[off + r * n + c]))
                .collect()
        })
        .collect())
}

#[inline]
fn block_invertible(phi: &[u64], off: usize, n: usize, f: &FiniteField, scratch: &mut Vec<u64>) -> bool {
    let prime = f.degree() == 1;
    match n {
        0 => true,
        1 => phi[off] != 0,
        2 if prime => {
            // Entries are < p, so the products stay far below u64 overflow;
            // reduce once at the end instead of per operation.
            let p = f.characteristic();
            (phi[off] * phi[off + 3]) % p != (phi[off + 1] * phi[off + 2]) % p
        }
        2 => {
            let det = f.sub(
                f.mul(phi[off], phi[off + 3]),
                f.mul(phi[off + 1], phi[off + 2]),
            );
            det != 0
        }
        3 if prime => {
            let p = f.characteristic();
            let (a, b, c) = (phi[off], phi[off + 1], phi[off + 2]);
            let (d_, e, g) = (phi[off + 3], phi[off + 4], phi[off + 5]);
            let (h, i, j) = (phi[off + 6], phi[off + 7], phi[off + 8]);
            let pos = a * e * j + b * g * h + c * d_ * i;
            let neg = c * e * h + b * d_ * j + a * g * i;
            pos % p != neg % p
        }
        3 => {
            let (a, b, c) = (phi[off], phi[off + 1], phi[off + 2]);
            let (d_, e, g) = (phi[off + 3], phi[off + 4], phi[off + 5]);
            let (h, i, j) = (phi[off + 6], phi[off + 7], phi[off + 8]);
            let pos = f.add(
                f.add(f.mul(a, f.mul(e, j)), f.mul(b, f.mul(g, h))),
                f.mul(c, f.mul(d_, i)),
            );
            let neg = f.add(
                f.add(f.mul(c, f.mul(e, h)), f.mul(b, f.mul(d_, j))),
                f.mul(a, f.mul(g, i)),
            );
            pos != neg
        }
        _ => {
            scratch.clear();
            scratch.extend_from_slice(&phi[off..off + n * n]);
            // Gaussian elimination; singular iff some pivot column is empty.
            for col in 0..n {
                let Some(pr) = (col..n).find(|&r| scratch[r * n + col] != 0) else {
                    return false;
                };
                if pr != col {
                    for j in 0..n {
                        scratch.swap(col * n + j, pr * n + j);
                    }
                }
                let inv = f.inv(scratch[col * n + col]);
                for j in col..n {
                    scratch[col * n + j] = f.mul(scratch[col * n + j], inv);
                }
                for r in (col + 1)..n {
                    let factor = scratch[r * n + col];
                    if factor != 0 {
                        for j in col..n {
                            scratch[r * n + j] =
                                f.sub(scratch[r * n + j], f.mul(factor, scratch[col * n + j]));
                        }
                    }
                }
            }
            true
        }
    }
}

fn modpow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Reduce v against the echelon rows (each normalized with leading 1 at its
/// pivot) and insert the remainder as a new row if nonzero.
fn echelon_insert(rows: &mut Vec<(usize, Vec<u64>)>, mut v: Vec<u64>, p: u64) {
    for (pivot, row) in rows.iter() {
        let c = v[*pivot];
        if c != 0 {
            for (x, y) in v.iter_mut().zip(row.iter()) {
                *x = (*x + (p - c % p) * *y) % p;
            }
        }
    }
    if let Some(pivot) = v.iter().position(|&x| x != 0) {
        let inv = modpow(v[pivot], p - 2, p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        let pos = rows.partition_point(|(pv, _)| *pv < pivot);
        rows.insert(pos, (pivot, v));
    }
}

/// Enumerate End(M) from its basis: count units (every vertex block
/// invertible) and decide absolute indecomposability per the local-algebra
/// test — unit count q^e - q^{e-1} and non-units additively closed.
///
/// With `abort_when_saturated`, stop as soon as the non-unit span fills the
/// whole coefficient space: the identity is then a unit outside the closure,
/// so the point is decomposable and its unit count is not needed. Callers
/// that report the automorphism count must pass false.
fn enumerate_endos(
    f: &FiniteField,
    basis: &[Vec<u64>],
    blocks: &[(usize, usize)],
    abort_when_saturated: bool,
) -> (u64, bool) {
    let e = basis.len();
    let q = f.order();
    debug_assert!(e >= 1);
    let v_len = basis[0].len();
    let total = checked_pow_u128(q, e as u64).expect("pre-checked") as u64;
    let p = f.characteristic();
    let k = f.degree() as usize;
    let full_dim = e * k;

    // scaled[j][s] = s * basis[j], entrywise.
    let scaled: Vec<Vec<Vec<u64>>> = basis
        .iter()
        .map(|b| {
            (0..q)
                .map(|s| b.iter().map(|&x| f.mul(s, x)).collect())
                .collect()
        })
        .collect();

    let mut digits = vec![0u64; e];
    let mut phi = vec![0u64; v_len];
    let mut scratch = Vec::new();
    let mut units: u64 = 0;
    let mut nonunits: u64 = 0;
    let mut rows: Vec<(usize, Vec<u64>)> = Vec::new();

    for step in 0..total {
        let unit = blocks
            .iter()
            .all(|&(off, n)| block_invertible(&phi, off, n, f, &mut scratch));
        if unit {
            units += 1;
        } else {
            nonunits += 1;
            if rows.len() < full_dim {
                // F_p coordinates of the coefficient vector: base-p digits of
                // each field element code.
                let mut vec = Vec::with_capacity(full_dim);
                for &code in &digits {
                    let mut c = code;
                    for _ in 0..k {
                        vec.push(c % p);
                        c /= p;
                    }
                }
                echelon_insert(&mut rows, vec, p);
                if abort_when_saturated && rows.len() == full_dim {
                    return (0, false);
                }
            }
        }
        if step + 1 == total {
            break;
        }
        // Advance the coefficient odometer, updating phi by the scaled basis
        // delta for every digit that changes.
        for j in 0..e {
            let old = digits[j];
            let (new, carry) = if old + 1 < q { (old + 1, false) } else { (0, true) };
            digits[j] = new;
            let delta = f.sub(new, old);
            let sc = &scaled[j][delta as usize];
            for (x, y) in phi.iter_mut().zip(sc.iter()) {
                *x = f.add(*x, *y);
            }
            if !carry {
                break;
            }
        }
    }

    let span = rows.len();
    let closed = (nonunits as u128) == checked_pow_u128(p, span as u64).expect("small");
    let expected_units = (q as u128).pow(e as u32) - (q as u128).pow(e as u32 - 1);
    let abs = closed && (units as u128) == expected_units;
    (units, abs)
}

/// Absolute indecomposability of a single point, with its automorphism
/// count: enumerate End(M), count units, and test that the non-units form an
/// additive subgroup with residue degree one.
pub fn is_abs_indec(
    q: &Quiver,
    d: &DimVector,
    m: &RepPoint,
    f: &FiniteField,
    cfg: &CountConfig,
) -> Result<(bool, u64)> {
    let basis_mats = end_algebra(q, d, m, f)?;
    let (blocks, v_len) = block_layout(d);
    let basis: Vec<Vec<u64>> = basis_mats
        .iter()
        .map(|mats| {
            let mut flat = vec![0u64; v_len];
            for (&(off, n), mat) in blocks.iter().zip(mats) {
                for r in 0..n {
                    for c in 0..n {
                        flat[off + r * n + c] = mat.get(r, c);
                    }
                }
            }
            flat
        })
        .collect();
    if basis.is_empty() {
        return Err(Error::InternalInconsistency(
            "endomorphism algebra without identity".into(),
        ));
    }
    check_threshold(
        f.order(),
        basis.len() as u64,
        cfg.end_threshold,
        "endomorphism enumeration",
    )?;
    let (units, abs) = enumerate_endos(f, &basis, &blocks, false);
    Ok((abs, units))
}

const POINT_CHUNK: u64 = 4096;

/// Number of isomorphism classes of absolutely indecomposable d-dimensional
/// representations over F: weight every absolutely indecomposable point by
/// its automorphism count and divide by |GL_d| (each orbit contributes
/// exactly |GL_d|).
pub fn count_abs_indec(
    q: &Quiver,
    d: &DimVector,
    f: &FiniteField,
    cfg: &CountConfig,
) -> Result<u64> {
    d.expect_len(q.num_vertices)?;
    if d.is_zero() {
        return Ok(0);
    }
    let dim_a = dim_rep_space(q, d);
    let total = check_threshold(f.order(), dim_a, cfg.point_threshold, "representation space")?;
    let dim_end_max: u64 = (0..d.len()).map(|i| d[i] as u64 * d[i] as u64).sum();
    check_threshold(
        f.order(),
        dim_end_max,
        cfg.end_threshold,
        "endomorphism enumeration",
    )?;

    let (blocks, var_count) = block_layout(d);
    // Entry index -> (arrow, flat position) for the point odometer.
    let entries: Vec<(usize, usize)> = q
        .arrows
        .iter()
        .enumerate()
        .flat_map(|(a, &(s, t))| (0..(d[t] as usize * d[s] as usize)).map(move |i| (a, i)))
        .collect();
    let order = f.order();

    let sum = parallel_chunk_sum(total, POINT_CHUNK, cfg.threads, |start, end| {
        let mut point = RepPoint::decode(q, d, f, start).expect("in range");
        let mut codes: Vec<u64> = entries
            .iter()
            .map(|&(a, i)| point.mats[a].data[i])
            .collect();
        let mut acc: u128 = 0;
        for idx in start..end {
            let sys = intertwiner_system(q, d, &point.mats, f, &blocks, var_count);
            let basis = sys.nullspace(f);
            let (units, abs) = enumerate_endos(f, &basis, &blocks, true);
            if abs {
                acc += units as u128;
            }
            if idx + 1 == end {
                break;
            }
            for (j, &(a, i)) in entries.iter().enumerate() {
                if codes[j] + 1 < order {
                    codes[j] += 1;
                    point.mats[a].data[i] = codes[j];
                    break;
                }
                codes[j] = 0;
                point.mats[a].data[i] = 0;
            }
        }
        acc
    });

    let gl = gl_order(d, order);
    if sum % gl != 0 {
        return Err(Error::InternalInconsistency(format!(
            "automorphism-weighted sum {sum} not divisible by |GL| = {gl}"
        )));
    }
    let count = sum / gl;
    u64::try_from(count).map_err(|_| Error::InternalInconsistency("count overflows u64".into()))
}

/// Point count of the zero fiber of the moment map on the doubled quiver:
/// representations of the double where, at every vertex, the incoming
/// composites minus the outgoing composites of each arrow pair cancel.
pub fn count_mu_fiber(
    q: &Quiver,
    d: &DimVector,
    f: &FiniteField,
    cfg: &CountConfig,
) -> Result<u64> {
    d.expect_len(q.num_vertices)?;
    let doubled = q.double();
    let dim = dim_rep_space(&doubled, d);
    let total = check_threshold(f.order(), dim, cfg.point_threshold, "moment-map fiber")?;
    let m = q.num_arrows();
    let order = f.order();

    let entries: Vec<(usize, usize)> = doubled
        .arrows
        .iter()
        .enumerate()
        .flat_map(|(a, &(s, t))| (0..(d[t] as usize * d[s] as usize)).map(move |i| (a, i)))
        .collect();

    let count = parallel_chunk_sum(total, POINT_CHUNK, cfg.threads, |start, end| {
        let mut point = RepPoint::decode(&doubled, d, f, start).expect("in range");
        let mut codes: Vec<u64> = entries
            .iter()
            .map(|&(a, i)| point.mats[a].data[i])
            .collect();
        let mut acc: u128 = 0;
        for idx in start..end {
            let mut ok = true;
            'vertices: for i in 0..q.num_vertices {
                let n = d[i] as usize;
                if n == 0 {
                    continue;
                }
                let mut mu = vec![0u64; n * n];
                for a in 0..m {
                    let (s, t) = q.arrows[a];
                    if t == i {
                        // + M(a) M(a*) : V_t -> V_t
                        let ma = &point.mats[a];
                        let ms = &point.mats[a + m];
                        for r in 0..n {
                            for c in 0..n {
                                let mut dot = 0u64;
                                for l in 0..d[s] as usize {
                                    dot = f.add(dot, f.mul(ma.get(r, l), ms.get(l, c)));
                                }
                                mu[r * n + c] = f.add(mu[r * n + c], dot);
                            }
                        }
                    }
                    if s == i {
                        // - M(a*) M(a) : V_s -> V_s
                        let ma = &point.mats[a];
                        let ms = &point.mats[a + m];
                        for r in 0..n {
                            for c in 0..n {
                                let mut dot = 0u64;
                                for l in 0..d[t] as usize {
                                    dot = f.add(dot, f.mul(ms.get(r, l), ma.get(l, c)));
                                }
                                mu[r * n + c] = f.sub(mu[r * n + c], dot);
                            }
                        }
                    }
                }
                if mu.iter().any(|&x| x != 0) {
                    ok = false;
                    break 'vertices;
                }
            }
            if ok {
                acc += 1;
            }
            if idx + 1 == end {
                break;
            }
            for (j, &(a, i)) in entries.iter().enumerate() {
                if codes[j] + 1 < order {
                    codes[j] += 1;
                    point.mats[a].data[i] = codes[j];
                    break;
                }
                codes[j] = 0;
                point.mats[a].data[i] = 0;
            }
        }
        acc
    });

    u64::try_from(count).map_err(|_| Error::InternalInconsistency("count overflows u64".into()))
}

/// A Kac polynomial: dense nonnegative integer coefficients in q, lowest
/// degree first, tagged with the dimension vector and quiver shape hash.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KacPolynomial {
    pub quiver_hash: String,
    pub d: DimVector,
    pub coefficients: Vec<i64>,
}

impl KacPolynomial {
    pub fn degree(&self) -> Option<usize> {
        if self.coefficients.is_empty() {
            None
        } else {
            Some(self.coefficients.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn eval(&self, q: u64) -> i128 {
        let mut acc: i128 = 0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * q as i128 + c as i128;
        }
        acc
    }

    /// Constant term a(0), or 0 for the zero polynomial.
    pub fn constant_term(&self) -> i64 {
        self.coefficients.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for KacPolynomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly_in_q(out, &self.coefficients)
    }
}

/// Render a dense coefficient list (lowest first) as a polynomial in q,
/// descending powers with explicit ^.
pub fn write_poly_in_q(out: &mut fmt::Formatter<'_>, coefficients: &[i64]) -> fmt::Result {
    if coefficients.iter().all(|&c| c == 0) {
        return write!(out, "0");
    }
    let mut first = true;
    for (k, &c) in coefficients.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        if first {
            if c < 0 {
                write!(out, "-")?;
            }
            first = false;
        } else if c < 0 {
            write!(out, " - ")?;
        } else {
            write!(out, " + ")?;
        }
        if mag != 1 || k == 0 {
            write!(out, "{mag}")?;
        }
        match k {
            0 => {}
            1 => write!(out, "q")?,
            _ => write!(out, "q^{k}")?,
        }
    }
    Ok(())
}

/// First n primes, smallest first.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut cand = 2u64;
    while primes.len() < n {
        if (2..cand).take_while(|d| d * d <= cand).all(|d| cand % d != 0) {
            primes.push(cand);
        }
        cand += 1;
    }
    primes
}

/// Default interpolation degree bound: 1 - <d,d>, clamped at 0.
pub fn degree_bound(q: &Quiver, d: &DimVector) -> Result<usize> {
    let chi = q.euler_form(d, d)?;
    Ok((1 - chi).max(0) as usize)
}

/// The default sample fields for (Q, d): the first (bound + 2) primes, so
/// interpolation uses bound + 1 of them and at least one is held out.
pub fn default_sample_fields(q: &Quiver, d: &DimVector, cfg: &CountConfig) -> Result<Vec<FiniteField>> {
    let b = cfg
        .degree_bound_override
        .map_or_else(|| degree_bound(q, d), Ok)?;
    first_primes(b + 2).into_iter().map(FiniteField::prime).collect()
}

/// Brute-force counts at each sample field, Lagrange interpolation through
/// the first (bound + 1) of them, and exact validation against every
/// remaining held-out sample.
pub fn kac_polynomial(
    q: &Quiver,
    d: &DimVector,
    sample_fields: &[FiniteField],
    cfg: &CountConfig,
) -> Result<KacPolynomial> {
    d.expect_len(q.num_vertices)?;
    let b = cfg
        .degree_bound_override
        .map_or_else(|| degree_bound(q, d), Ok)?;
    if sample_fields.len() < b + 2 {
        return Err(Error::BadInterpolation(format!(
            "degree bound {b} needs at least {} sample fields, got {}",
            b + 2,
            sample_fields.len()
        )));
    }
    let counts: Vec<u64> = sample_fields
        .iter()
        .map(|f| count_abs_indec(q, d, f, cfg))
        .collect::<Result<_>>()?;
    interpolate_and_validate(q, d, sample_fields, &counts, b)
}

/// Interpolates through the first `b + 1` counts and validates the
/// polynomial against every remaining held-out count.
fn interpolate_and_validate(
    q: &Quiver,
    d: &DimVector,
    sample_fields: &[FiniteField],
    counts: &[u64],
    b: usize,
) -> Result<KacPolynomial> {
    let node_count = b + 1;
    let coefficients = lagrange_integer(
        &sample_fields[..node_count]
            .iter()
            .map(|f| f.order())
            .collect::<Vec<_>>(),
        &counts[..node_count],
    )?;

    let poly = KacPolynomial {
        quiver_hash: q.hash(),
        d: d.clone(),
        coefficients,
    };
    for (f, &counted) in sample_fields.iter().zip(counts).skip(node_count) {
        let predicted = poly.eval(f.order());
        if predicted != counted as i128 {
            return Err(Error::HeldOutMismatch {
                q: f.order(),
                predicted: predicted.to_string(),
                counted: counted.to_string(),
            });
        }
    }
    if let Some(&min) = poly.coefficients.iter().min() {
        if min < 0 {
            return Err(Error::BadInterpolation(format!(
                "interpolated coefficients {:?} contain a negative entry",
                poly.coefficients
            )));
        }
    }
    Ok(poly)
}

/// Exact Lagrange interpolation through (x_j, y_j); errors if any
/// coefficient is non-integral.
fn lagrange_integer(xs: &[u64], ys: &[u64]) -> Result<Vec<i64>> {
    let n = xs.len();
    let mut acc = vec![BigRational::zero(); n];
    for j in 0..n {
        // numerator poly prod_{m != j} (x - x_m), coefficients low-first.
        let mut num = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for m in 0..n {
            if m == j {
                continue;
            }
            let xm = BigRational::from_integer(BigInt::from(xs[m]));
            let mut next = vec![BigRational::zero(); num.len() + 1];
            for (i, c) in num.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * &xm;
            }
            num = next;
            denom *= BigRational::from_integer(BigInt::from(xs[j])) - xm;
        }
        let yj = BigRational::from_integer(BigInt::from(ys[j]));
        let scale = yj / denom;
        for (a, c) in acc.iter_mut().zip(num) {
            *a += c * &scale;
        }
    }
    let mut out = Vec::with_capacity(n);
    for c in &acc {
        if !c.is_integer() {
            return Err(Error::BadInterpolation(format!(
                "non-integral coefficient {c} in interpolation"
            )));
        }
        let int = c.to_integer();
        let val = int.to_i64().ok_or_else(|| {
            Error::BadInterpolation(format!("coefficient {int} out of i64 range"))
        })?;
        out.push(val);
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok(out)
}

const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    version: u32,
    kind: String,
    quiver_hash: String,
    d: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<i64>>,
}

/// Append-only JSON-lines cache of brute-force counts and interpolated
/// polynomials, keyed by quiver shape hash and dimension vector.
pub struct CountCache {
    path: Option<PathBuf>,
    counts: HashMap<(String, Vec<u32>, u64), u64>,
    polys: HashMap<(String, Vec<u32>), Vec<i64>>,
}

impl CountCache {
    /// Purely in-memory cache.
    pub fn in_memory() -> CountCache {
        CountCache {
            path: None,
            counts: HashMap::new(),
            polys: HashMap::new(),
        }
    }

    /// Open (or create) a file-backed cache, loading existing records.
    pub fn open(path: &Path) -> Result<CountCache> {
        let mut cache = CountCache::in_memory();
        cache.path = Some(path.to_path_buf());
        if path.exists() {
            let file = std::fs::File::open(path)?;
            for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CacheRecord =
                    serde_json::from_str(&line).map_err(|e| Error::Parse {
                        pos: lineno + 1,
                        msg: format!("cache line: {e}"),
                    })?;
                if rec.version != CACHE_VERSION {
                    return Err(Error::Parse {
                        pos: lineno + 1,
                        msg: format!("unsupported cache version {}", rec.version),
                    });
                }
                match rec.kind.as_str() {
                    "count" => {
                        let (Some(q), Some(count)) = (rec.q, rec.count) else {
                            return Err(Error::Parse {
                                pos: lineno + 1,
                                msg: "count record missing q or count".into(),
                            });
                        };
                        cache.counts.insert((rec.quiver_hash, rec.d, q), count);
                    }
                    "kac" => {
                        let Some(coeffs) = rec.coefficients else {
                            return Err(Error::Parse {
                                pos: lineno + 1,
                                msg: "kac record missing coefficients".into(),
                            });
                        };
                        cache.polys.insert((rec.quiver_hash, rec.d), coeffs);
                    }
                    other => {
                        return Err(Error::Parse {
                            pos: lineno + 1,
                            msg: format!("unknown cache record kind {other:?}"),
                        });
                    }
                }
            }
        }
        Ok(cache)
    }

    fn append(&self, rec: &CacheRecord) -> Result<()> {
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            let mut file = std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)?;
            let mut line = serde_json::to_string(rec)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn lookup_count(&self, hash: &str, d: &DimVector, q: u64) -> Option<u64> {
        self.counts
            .get(&(hash.to_string(), d.0.clone(), q))
            .copied()
    }

    pub fn insert_count(&mut self, hash: &str, d: &DimVector, q: u64, count: u64) -> Result<()> {
        self.append(&CacheRecord {
            version: CACHE_VERSION,
            kind: "count".into(),
            quiver_hash: hash.to_string(),
            d: d.0.clone(),
            q: Some(q),
            count: Some(count),
            coefficients: None,
        })?;
        self.counts.insert((hash.to_string(), d.0.clone(), q), count);
        Ok(())
    }

    pub fn lookup_poly(&self, hash: &str, d: &DimVector) -> Option<KacPolynomial> {
        self.polys
            .get(&(hash.to_string(), d.0.clone()))
            .map(|coeffs| KacPolynomial {
                quiver_hash: hash.to_string(),
                d: d.clone(),
                coefficients: coeffs.clone(),
            })
    }

    pub fn insert_poly(&mut self, poly: &KacPolynomial) -> Result<()> {
        self.append(&CacheRecord {
            version: CACHE_VERSION,
            kind: "kac".into(),
            quiver_hash: poly.quiver_hash.clone(),
            d: poly.d.0.clone(),
            q: None,
            count: None,
            coefficients: Some(poly.coefficients.clone()),
        })?;
        self.polys
            .insert((poly.quiver_hash.clone(), poly.d.0.clone()), poly.coefficients.clone());
        Ok(())
    }
}

/// Cache-aware count: look up, else compute and record.
pub fn count_abs_indec_cached(
    q: &Quiver,
    d: &DimVector,
    f: &FiniteField,
    cfg: &CountConfig,
    cache: &mut CountCache,
) -> Result<u64> {
    let hash = q.hash();
    if let Some(hit) = cache.lookup_count(&hash, d, f.order()) {
        return Ok(hit);
    }
    let count = count_abs_indec(q, d, f, cfg)?;
    cache.insert_count(&hash, d, f.order(), count)?;
    Ok(count)
}

/// `kac_polynomial` with both the per-field counts and the final polynomial
/// read through (and written back to) the cache.
pub fn kac_polynomial_cached(
    q: &Quiver,
    d: &DimVector,
    sample_fields: &[FiniteField],
    cfg: &CountConfig,
    cache: &mut CountCache,
) -> Result<KacPolynomial> {
    d.expect_len(q.num_vertices)?;
    let hash = q.hash();
    if let Some(poly) = cache.lookup_poly(&hash, d) {
        return Ok(poly);
    }
    let b = cfg
        .degree_bound_override
        .map_or_else(|| degree_bound(q, d), Ok)?;
    if sample_fields.len() < b + 2 {
        return Err(Error::BadInterpolation(format!(
            "degree bound {b} needs at least {} sample fields, got {}",
            b + 2,
            sample_fields.len()
        )));
    }
    let counts: Vec<u64> = sample_fields
        .iter()
        .map(|f| count_abs_indec_cached(q, d, f, cfg, cache))
        .collect::<Result<_>>()?;
    let poly = interpolate_and_validate(q, d, sample_fields, &counts, b)?;
    cache.insert_poly(&poly)?;
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    fn f(p: u64) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    fn cfg() -> CountConfig {
        CountConfig {
            threads: 1,
            ..CountConfig::default()
        }
    }

    #[test]
    fn end_algebra_dimensions() {
        let a2 = Quiver::linear(2);
        let f3 = f(3);
        // Nonzero 1x1 map between one-dimensional spaces: only scalars.
        let mut m = RepPoint::zero(&a2, &dv(&[1, 1])).unwrap();
        m.mats[0].set(0, 0, 2);
        assert_eq!(end_algebra(&a2, &dv(&[1, 1]), &m, &f3).unwrap().len(), 1);
        // Zero map: the two scalars are independent.
        let z = RepPoint::zero(&a2, &dv(&[1, 1])).unwrap();
        assert_eq!(end_algebra(&a2, &dv(&[1, 1]), &z, &f3).unwrap().len(), 2);
        // Jordan block: polynomials in the block.
        let jordan = Quiver::jordan();
        let mut jb = RepPoint::zero(&jordan, &dv(&[2])).unwrap();
        jb.mats[0].set(0, 1, 1);
        assert_eq!(end_algebra(&jordan, &dv(&[2]), &jb, &f(2)).unwrap().len(), 2);
    }

    #[test]
    fn abs_indec_examples() {
        let a2 = Quiver::linear(2);
        for p in [2u64, 3] {
            let fld = f(p);
            let mut m = RepPoint::zero(&a2, &dv(&[1, 1])).unwrap();
            m.mats[0].set(0, 0, 1);
            assert_eq!(
                is_abs_indec(&a2, &dv(&[1, 1]), &m, &fld, &cfg()).unwrap(),
                (true, p - 1)
            );
            let z = RepPoint::zero(&a2, &dv(&[1, 1])).unwrap();
            assert_eq!(
                is_abs_indec(&a2, &dv(&[1, 1]), &z, &fld, &cfg()).unwrap(),
                (false, (p - 1) * (p - 1))
            );
        }
        let jordan = Quiver::jordan();
        let mut jb = RepPoint::zero(&jordan, &dv(&[2])).unwrap();
        jb.mats[0].set(0, 1, 1);
        assert_eq!(
            is_abs_indec(&jordan, &dv(&[2]), &jb, &f(2), &cfg()).unwrap(),
            (true, 2)
        );
    }

    #[test]
    fn counting_oracles() {
        let jordan = Quiver::jordan();
        assert_eq!(count_abs_indec(&jordan, &dv(&[1]), &f(2), &cfg()).unwrap(), 2);
        assert_eq!(count_abs_indec(&jordan, &dv(&[1]), &f(3), &cfg()).unwrap(), 3);
        assert_eq!(count_abs_indec(&jordan, &dv(&[2]), &f(2), &cfg()).unwrap(), 2);

        let g2 = Quiver::loops(2);
        assert_eq!(count_abs_indec(&g2, &dv(&[1]), &f(2), &cfg()).unwrap(), 4);
        assert_eq!(count_abs_indec(&g2, &dv(&[1]), &f(3), &cfg()).unwrap(), 9);

        let kron = Quiver::kronecker(2);
        assert_eq!(count_abs_indec(&kron, &dv(&[1, 1]), &f(2), &cfg()).unwrap(), 3);
        assert_eq!(count_abs_indec(&kron, &dv(&[1, 1]), &f(3), &cfg()).unwrap(), 4);

        let a2 = Quiver::linear(2);
        assert_eq!(count_abs_indec(&a2, &dv(&[1, 1]), &f(2), &cfg()).unwrap(), 1);
        assert_eq!(count_abs_indec(&a2, &dv(&[2, 1]), &f(2), &cfg()).unwrap(), 0);
        assert_eq!(count_abs_indec(&a2, &dv(&[0, 0]), &f(2), &cfg()).unwrap(), 0);
    }

    #[test]
    fn kac_polynomial_examples() {
        let c = cfg();
        let jordan = Quiver::jordan();
        let fields = default_sample_fields(&jordan, &dv(&[1]), &c).unwrap();
        assert_eq!(
            fields.iter().map(|f| f.order()).collect::<Vec<_>>(),
            vec![2, 3, 5]
        );
        let poly = kac_polynomial(&jordan, &dv(&[1]), &fields, &c).unwrap();
        assert_eq!(poly.coefficients, vec![0, 1]);
        assert_eq!(poly.to_string(), "q");

        let a2 = Quiver::linear(2);
        let fields = default_sample_fields(&a2, &dv(&[1, 1]), &c).unwrap();
        let poly = kac_polynomial(&a2, &dv(&[1, 1]), &fields, &c).unwrap();
        assert_eq!(poly.coefficients, vec![1]);

        let zero = kac_polynomial(&a2, &dv(&[2, 1]), &default_sample_fields(&a2, &dv(&[2, 1]), &c).unwrap(), &c).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.to_string(), "0");

        let k3 = Quiver::kronecker(3);
        let fields = default_sample_fields(&k3, &dv(&[1, 1]), &c).unwrap();
        assert_eq!(fields.len(), 4);
        let poly = kac_polynomial(&k3, &dv(&[1, 1]), &fields, &c).unwrap();
        assert_eq!(poly.coefficients, vec![1, 1, 1]);
        assert_eq!(poly.to_string(), "q^2 + q + 1");
    }

    #[test]
    fn held_out_validation_catches_bad_bounds() {
        let k3 = Quiver::kronecker(3);
        let mut c = cfg();
        c.degree_bound_override = Some(0);
        let fields = vec![f(2), f(3)];
        let err = kac_polynomial(&k3, &dv(&[1, 1]), &fields, &c).unwrap_err();
        assert!(matches!(err, Error::HeldOutMismatch { q: 3, .. }), "{err:?}");
    }

    #[test]
    fn mu_fiber_examples() {
        let point = Quiver::point();
        assert_eq!(count_mu_fiber(&point, &dv(&[1]), &f(3), &cfg()).unwrap(), 1);
        assert_eq!(count_mu_fiber(&point, &dv(&[2]), &f(2), &cfg()).unwrap(), 1);

        let a2 = Quiver::linear(2);
        assert_eq!(count_mu_fiber(&a2, &dv(&[1, 1]), &f(2), &cfg()).unwrap(), 3);

        let jordan = Quiver::jordan();
        for p in [2u64, 3] {
            assert_eq!(
                count_mu_fiber(&jordan, &dv(&[1]), &f(p), &cfg()).unwrap(),
                p * p
            );
        }
    }

    #[test]
    fn thresholds_are_enforced() {
        let jordan = Quiver::jordan();
        let tight = CountConfig {
            point_threshold: 10,
            ..cfg()
        };
        let err = count_abs_indec(&jordan, &dv(&[2]), &f(2), &tight).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));

        let tight_end = CountConfig {
            end_threshold: 1,
            ..cfg()
        };
        let err = count_abs_indec(&jordan, &dv(&[1]), &f(2), &tight_end).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn counts_match_across_thread_counts() {
        let kron = Quiver::kronecker(2);
        let serial = count_abs_indec(&kron, &dv(&[2, 1]), &f(3), &cfg()).unwrap();
        let threaded = count_abs_indec(
            &kron,
            &dv(&[2, 1]),
            &f(3),
            &CountConfig {
                threads: 4,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(serial, threaded);
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("qha-cache-test-{}", std::process::id()));
        let path = dir.join("cache.jsonl");
        let _ = std::fs::remove_file(&path);
        let mut cache = CountCache::open(&path).unwrap();
        let d = dv(&[1, 1]);
        cache.insert_count("abc", &d, 2, 3).unwrap();
        let poly = KacPolynomial {
            quiver_hash: "abc".into(),
            d: d.clone(),
            coefficients: vec![1, 1],
        };
        cache.insert_poly(&poly).unwrap();

        let reloaded = CountCache::open(&path).unwrap();
        assert_eq!(reloaded.lookup_count("abc", &d, 2), Some(3));
        assert_eq!(reloaded.lookup_poly("abc", &d).unwrap().coefficients, vec![1, 1]);
        assert_eq!(reloaded.lookup_count("abc", &d, 5), None);
        let _ = std::fs::remove_file(&path);
        let _ = std::fs::remove_dir(&dir);
    }

    #[test]
    fn cached_wrapper_hits_on_second_call() {
        let a2 = Quiver::linear(2);
        let mut cache = CountCache::in_memory();
        let first =
            count_abs_indec_cached(&a2, &dv(&[1, 1]), &f(2), &cfg(), &mut cache).unwrap();
        assert_eq!(first, 1);
        assert_eq!(cache.lookup_count(&a2.hash(), &dv(&[1, 1]), 2), Some(1));
        let second =
            count_abs_indec_cached(&a2, &dv(&[1, 1]), &f(2), &cfg(), &mut cache).unwrap();
        assert_eq!(second, 1);
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(&dv(&[1]), 5), 4);
        assert_eq!(gl_order(&dv(&[2]), 2), 6);
        assert_eq!(gl_order(&dv(&[3]), 5), 124 * 120 * 100);
        assert_eq!(gl_order(&dv(&[1, 1]), 3), 4);
    }

    #[test]
    #[ignore = "timing probe for the largest brute-force case; run explicitly"]
    fn jordan_d3_f5_within_budget() {
        let jordan = Quiver::jordan();
        let big = CountConfig {
            end_threshold: 10_000_000,
            threads: 0,
            ..CountConfig::default()
        };
        let start = std::time::Instant::now();
        let count = count_abs_indec(&jordan, &dv(&[3]), &f(5), &big).unwrap();
        eprintln!("jordan d=3 q=5: {count} in {:?}", start.elapsed());
        assert_eq!(count, 5);
    }

    #[test]
    fn restricted_quiver_counts_agree_on_support() {
        // d with a zero vertex counts like the restriction to the support.
        let a3 = Quiver::linear(3);
        let d = dv(&[1, 0, 1]);
        let sub = a3.restrict(&[0, 2]);
        for p in [2u64, 3] {
            assert_eq!(
                count_abs_indec(&a3, &d, &f(p), &cfg()).unwrap(),
                count_abs_indec(&sub, &dv(&[1, 1]), &f(p), &cfg()).unwrap()
            );
        }
    }
}
