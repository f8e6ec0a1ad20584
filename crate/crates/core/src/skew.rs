//! Truncated arithmetic in the skew power-series ring Z_p[[S, T; sigma,
//! delta]], the completed group ring of Z_p semidirect Z_p.
//!
//! Elements are kept in T-left canonical form: finite sums of monomials
//! T^j S^i with coefficients in Z/p^N, 0 <= j < D_T, 0 <= i < D_S.  The
//! generators satisfy
//!
//! ```text
//!     (1 + S)(1 + T) = (1 + T)(1 + S)^q,        q = 1 + p u,
//! ```
//!
//! equivalently T F(S) = sigma(F(S)) T + delta(F(S)) with sigma the
//! substitution S -> (1+S)^c - 1 for c = q^{-1} and delta = sigma - id.
//! Products are computed by the rewrite F(S) T = T sigma^{-1}(F) +
//! sigma^{-1}(F) - F, where sigma^{-1} substitutes with the integer
//! exponent q.
//!
//! Truncation drops monomials with i >= D_S or j >= D_T.  Dropping high
//! S-degrees is consistent (sigma and its inverse preserve S-adic order),
//! while dropping high T-degrees loses information that left
//! multiplication could bring back below D_T; callers that need exact
//! T-degrees keep products inside the box, and the associativity property
//! suite runs in guard boxes for that reason.

use crate::error::{Error, Result};
use crate::padic::{
    self, binomial_mod, checked_pow, factorial_valuation, is_odd_prime, ModularInt,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Shared parameters of a family of truncated skew elements: the prime,
/// the coefficient precision, both degree bounds, and the unit u giving
/// the commutation exponent q = 1 + p u.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncationBox {
    p: u64,
    precision: u32,
    deg_s: u32,
    deg_t: u32,
    u: u64,
}

impl TruncationBox {
    pub fn new(p: u64, precision: u32, deg_s: u32, deg_t: u32, u: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if precision == 0 || deg_s == 0 || deg_t == 0 {
            return Err(Error::InvalidParameter(
                "precision and degree bounds must be >= 1".into(),
            ));
        }
        if u == 0 || u % p == 0 {
            return Err(Error::InvalidParameter(format!(
                "u = {u} must be a unit modulo p = {p}"
            )));
        }
        checked_pow(p, precision)?;
        p.checked_mul(u)
            .and_then(|pu| pu.checked_add(1))
            .ok_or_else(|| Error::InvalidParameter("q = 1 + p u overflows".into()))?;
        Ok(TruncationBox {
            p,
            precision,
            deg_s,
            deg_t,
            u,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn deg_s(&self) -> u32 {
        self.deg_s
    }

    pub fn deg_t(&self) -> u32 {
        self.deg_t
    }

    pub fn unit(&self) -> u64 {
        self.u
    }

    /// The commutation exponent q = 1 + p u as an exact integer.
    pub fn q(&self) -> u64 {
        1 + self.p * self.u
    }

    pub fn modulus(&self) -> u64 {
        checked_pow(self.p, self.precision).expect("validated at construction")
    }

    /// Same parameters at a different precision / degree bounds.
    pub fn resized(&self, precision: u32, deg_s: u32, deg_t: u32) -> Result<Self> {
        TruncationBox::new(self.p, precision, deg_s, deg_t, self.u)
    }

    /// Guard digits needed to evaluate binom(c, k) mod p^N for all k < D_S.
    fn sigma_guard(&self) -> u32 {
        factorial_valuation(self.deg_s.saturating_sub(1) as u64, self.p)
    }

    /// The exponent c = q^{-1} as a residue with sigma_guard() extra digits.
    fn sigma_exponent(&self) -> Result<ModularInt> {
        let guard_prec = self.precision + self.sigma_guard();
        let q = ModularInt::new(self.p, guard_prec, self.q() as i128)?;
        q.inv()
    }
}

/// A truncated element of the skew ring, stored as (T-degree, S-degree)
/// -> residue with zero coefficients omitted.  Equality of the maps is
/// equality of elements: the representation is canonical.
#[derive(Clone, PartialEq, Eq)]
pub struct SkewElement {
    bx: TruncationBox,
    coeffs: BTreeMap<(u32, u32), u64>,
}

/// Which of the two variables an omega element is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewVar {
    S,
    T,
}

/// One monomial record of the textual serialization: coefficient c on
/// T^t S^s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub t: u32,
    pub s: u32,
    pub c: u64,
}

impl std::fmt::Debug for SkewElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SkewElement({self})")
    }
}

impl std::fmt::Display for SkewElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(j, i), &c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (j, i) {
                (0, 0) => write!(f, "{c}")?,
                _ => {
                    write!(f, "{c}")?;
                    if j > 0 {
                        write!(f, "*T{}", if j > 1 { format!("^{j}") } else { String::new() })?;
                    }
                    if i > 0 {
                        write!(f, "*S{}", if i > 1 { format!("^{i}") } else { String::new() })?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl SkewElement {
    pub fn zero(bx: TruncationBox) -> Self {
        SkewElement {
            bx,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(bx: TruncationBox) -> Self {
        Self::monomial(bx, 0, 0, 1).expect("degree (0,0) is always inside the box")
    }

    pub fn var_s(bx: TruncationBox) -> Result<Self> {
        Self::monomial(bx, 0, 1, 1)
    }

    pub fn var_t(bx: TruncationBox) -> Result<Self> {
        Self::monomial(bx, 1, 0, 1)
    }

    /// value * T^t_deg S^s_deg; the degrees must lie inside the box.
    pub fn monomial(bx: TruncationBox, t_deg: u32, s_deg: u32, value: i128) -> Result<Self> {
        if t_deg >= bx.deg_t || s_deg >= bx.deg_s {
            return Err(Error::Truncation(format!(
                "monomial T^{t_deg} S^{s_deg} outside box (D_T={}, D_S={})",
                bx.deg_t, bx.deg_s
            )));
        }
        let modulus = bx.modulus();
        let c = value.rem_euclid(modulus as i128) as u64;
        let mut coeffs = BTreeMap::new();
        if c != 0 {
            coeffs.insert((t_deg, s_deg), c);
        }
        Ok(SkewElement { bx, coeffs })
    }

    pub fn from_terms(bx: TruncationBox, terms: &[(u32, u32, i128)]) -> Result<Self> {
        let mut acc = Self::zero(bx);
        for &(j, i, c) in terms {
            acc = acc.add(&Self::monomial(bx, j, i, c)?)?;
        }
        Ok(acc)
    }

    pub fn bx(&self) -> TruncationBox {
        self.bx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of T^j S^i as a value in Z/p^N.
    pub fn coefficient(&self, j: u32, i: u32) -> ModularInt {
        let c = self.coeffs.get(&(j, i)).copied().unwrap_or(0);
        ModularInt::new(self.bx.p, self.bx.precision, c as i128).expect("box is valid")
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.coeffs.iter().map(|(&(j, i), &c)| (j, i, c))
    }

    pub fn max_t_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(j, _)| j).max().unwrap_or(0)
    }

    pub fn max_s_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(_, i)| i).max().unwrap_or(0)
    }

    fn check_box(&self, other: &Self) -> Result<()> {
        if self.bx != other.bx {
            return Err(Error::BoxMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_box(other)?;
        let modulus = self.bx.modulus();
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            let entry = coeffs.entry(k).or_insert(0);
            *entry = ((*entry as u128 + c as u128) % modulus as u128) as u64;
            if *entry == 0 {
                coeffs.remove(&k);
            }
        }
        Ok(SkewElement { bx: self.bx, coeffs })
    }

    pub fn neg(&self) -> Self {
        let modulus = self.bx.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, &c)| (k, modulus - c))
            .collect();
        SkewElement { bx: self.bx, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, value: i128) -> Self {
        let modulus = self.bx.modulus();
        let c = value.rem_euclid(modulus as i128) as u64;
        let mut coeffs = BTreeMap::new();
        for (&k, &a) in &self.coeffs {
            let v = ((a as u128 * c as u128) % modulus as u128) as u64;
            if v != 0 {
                coeffs.insert(k, v);
            }
        }
        SkewElement { bx: self.bx, coeffs }
    }

    // -- dense helpers -------------------------------------------------

    fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut rows = vec![vec![0u64; self.bx.deg_s as usize]; self.bx.deg_t as usize];
        for (&(j, i), &c) in &self.coeffs {
            rows[j as usize][i as usize] = c;
        }
        rows
    }

    fn from_dense(bx: TruncationBox, rows: Vec<Vec<u64>>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (j, row) in rows.into_iter().enumerate() {
            for (i, c) in row.into_iter().enumerate() {
                if c != 0 {
                    coeffs.insert((j as u32, i as u32), c);
                }
            }
        }
        SkewElement { bx, coeffs }
    }

    // -- ring structure ------------------------------------------------

    /// Product in canonical form.  Expands the right factor row by row
    /// over its T-degrees, advancing self by one right-multiplication by
    /// T per row; the advance applies sigma^{-1} once per coordinate.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_box(other)?;
        let bx = self.bx;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(bx));
        }
        let modulus = bx.modulus();
        let rhs = other.to_dense();
        let top = other.max_t_degree() as usize;
        let pow_table = if top > 0 {
            Some(sigma_inv_power_table(&bx)?)
        } else {
            None
        };
        let mut acc = vec![vec![0u64; bx.deg_s as usize]; bx.deg_t as usize];
        let mut cur = self.to_dense();
        for j2 in 0..=top {
            if rhs[j2].iter().any(|&c| c != 0) {
                for (arow, crow) in acc.iter_mut().zip(cur.iter()) {
                    poly_mul_acc(arow, crow, &rhs[j2], modulus);
                }
            }
            if j2 < top {
                cur = advance_by_t(&cur, pow_table.as_ref().expect("built above"), modulus);
            }
        }
        Ok(Self::from_dense(bx, acc))
    }

    /// The ring automorphism sigma: substitution S -> (1+S)^c - 1 with
    /// c = q^{-1}, applied to an element of the S-subring.
    pub fn sigma_apply(&self) -> Result<Self> {
        self.substituted(sigma_power_table(&self.bx)?)
    }

    /// delta = sigma - id on the S-subring.
    pub fn delta_apply(&self) -> Result<Self> {
        self.sigma_apply()?.sub(self)
    }

    /// sigma^{-1}: substitution S -> (1+S)^q - 1 with the integer
    /// exponent q.
    pub fn sigma_inv_apply(&self) -> Result<Self> {
        self.substituted(sigma_inv_power_table(&self.bx)?)
    }

    fn substituted(&self, powers: Vec<Vec<u64>>) -> Result<Self> {
        if self.max_t_degree() > 0 {
            return Err(Error::ExpectedSSubring);
        }
        let bx = self.bx;
        let modulus = bx.modulus();
        let mut out = vec![0u64; bx.deg_s as usize];
        for (&(_, i), &c) in &self.coeffs {
            for (k, &b) in powers[i as usize].iter().enumerate() {
                out[k] = ((out[k] as u128 + c as u128 * b as u128) % modulus as u128) as u64;
            }
        }
        Ok(Self::from_dense(bx, vec![out]))
    }

    /// Canonical form of (1+T)^j (1+S)^i: the binomial expansion is
    /// already T-left, truncated to the box.
    pub fn group_word(bx: TruncationBox, j: u64, i: u64) -> Self {
        let modulus = bx.modulus();
        let mut coeffs = BTreeMap::new();
        for a in 0..bx.deg_t as u64 {
            let cj = binomial_mod(j, a, modulus);
            if cj == 0 {
                continue;
            }
            for b in 0..bx.deg_s as u64 {
                let ci = binomial_mod(i, b, modulus);
                let c = ((cj as u128 * ci as u128) % modulus as u128) as u64;
                if c != 0 {
                    coeffs.insert((a as u32, b as u32), c);
                }
            }
        }
        SkewElement { bx, coeffs }
    }

    /// omega_m = (1 + var)^{p^m} - 1.  The polynomial has degree p^m and
    /// must be stored exactly, so p^m < D is required.
    pub fn omega(bx: TruncationBox, m: u32, var: SkewVar) -> Result<Self> {
        let pm = checked_pow(bx.p, m)?;
        let bound = match var {
            SkewVar::S => bx.deg_s,
            SkewVar::T => bx.deg_t,
        } as u64;
        if pm >= bound {
            return Err(Error::Truncation(format!(
                "omega_{m} has degree {pm}, which does not fit below the bound {bound}"
            )));
        }
        let modulus = bx.modulus();
        let mut coeffs = BTreeMap::new();
        for k in 1..=pm {
            let c = binomial_mod(pm, k, modulus);
            if c != 0 {
                let key = match var {
                    SkewVar::S => (0u32, k as u32),
                    SkewVar::T => (k as u32, 0u32),
                };
                coeffs.insert(key, c);
            }
        }
        Ok(SkewElement { bx, coeffs })
    }

    /// xi_m = omega_m / omega_{m-1}, an exact polynomial quotient in S
    /// (xi_0 = omega_0 = S).
    pub fn xi(bx: TruncationBox, m: u32) -> Result<Self> {
        if m == 0 {
            return Self::var_s(bx);
        }
        let num = Self::omega(bx, m, SkewVar::S)?;
        let den = Self::omega(bx, m - 1, SkewVar::S)?;
        let modulus = bx.modulus();
        let mut a: Vec<u64> = num.to_dense().remove(0);
        let b: Vec<u64> = den.to_dense().remove(0);
        let deg_b = checked_pow(bx.p, m - 1)? as usize;
        debug_assert_eq!(b[deg_b], 1, "omega is monic");
        let deg_a = checked_pow(bx.p, m)? as usize;
        let mut quot = vec![0u64; a.len()];
        for i in (deg_b..=deg_a).rev() {
            let c = a[i];
            if c == 0 {
                continue;
            }
            quot[i - deg_b] = c;
            for (k, &bk) in b.iter().enumerate().take(deg_b + 1) {
                let sub = (c as u128 * bk as u128 % modulus as u128) as u64;
                a[i - deg_b + k] = (a[i - deg_b + k] + modulus - sub) % modulus;
            }
        }
        assert!(a.iter().all(|&c| c == 0), "omega_{m} is divisible by omega_{}", m - 1);
        Ok(Self::from_dense(bx, vec![quot]))
    }

    /// Reduction modulo omega_m(S) Lambda: repeatedly rewrites the
    /// current highest S-degree via
    ///     S^i = -(sum_{1<=j<p^m} binom(p^m, j) S^j) S^{i-p^m}
    /// until every S-degree is < p^m, and returns the p^m coordinate
    /// series over Lambda(Gamma).
    pub fn reduce_mod_omega_s(&self, m: u32) -> Result<GammaCoordinates> {
        let bx = self.bx;
        let pm = checked_pow(bx.p, m)?;
        if pm > bx.deg_s as u64 {
            return Err(Error::Truncation(format!(
                "reduction at level {m} needs p^m = {pm} <= D_S = {}",
                bx.deg_s
            )));
        }
        let pm = pm as usize;
        let modulus = bx.modulus();
        let binom = omega_fold_table(bx.p, m, modulus)?;
        let mut rows = self.to_dense();
        for row in rows.iter_mut() {
            fold_dense(row, pm, &binom, modulus);
        }
        let coords = (0..pm)
            .map(|i| (0..bx.deg_t as usize).map(|j| rows[j][i]).collect())
            .collect();
        Ok(GammaCoordinates {
            bx,
            level: m,
            coords,
        })
    }

    /// Drop the element into a smaller box (lower precision and/or
    /// degree bounds; same p and u).
    pub fn truncate_to(&self, target: TruncationBox) -> Result<Self> {
        if target.p != self.bx.p || target.u != self.bx.u {
            return Err(Error::BoxMismatch);
        }
        if target.precision > self.bx.precision
            || target.deg_s > self.bx.deg_s
            || target.deg_t > self.bx.deg_t
        {
            return Err(Error::InvalidParameter(
                "truncate_to only shrinks a box".into(),
            ));
        }
        let modulus = target.modulus();
        let mut coeffs = BTreeMap::new();
        for (&(j, i), &c) in &self.coeffs {
            if j < target.deg_t && i < target.deg_s && c % modulus != 0 {
                coeffs.insert((j, i), c % modulus);
            }
        }
        Ok(SkewElement { bx: target, coeffs })
    }

    // -- serialization -------------------------------------------------

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.coeffs
            .iter()
            .map(|(&(j, i), &c)| TermRecord { t: j, s: i, c })
            .collect()
    }

    pub fn from_records(bx: TruncationBox, records: &[TermRecord]) -> Result<Self> {
        let terms: Vec<(u32, u32, i128)> =
            records.iter().map(|r| (r.t, r.s, r.c as i128)).collect();
        Self::from_terms(bx, &terms)
    }
}

/// The image of an element in Lambda(G)/omega_m Lambda(G), written on the
/// free Lambda(Gamma)-basis 1, S, ..., S^{p^m - 1}: coordinate i is the
/// truncated T-series multiplying S^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaCoordinates {
    bx: TruncationBox,
    level: u32,
    coords: Vec<Vec<u64>>,
}

impl GammaCoordinates {
    pub fn bx(&self) -> TruncationBox {
        self.bx
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Coordinate i as T-coefficients of length D_T.
    pub fn coordinate(&self, i: usize) -> &[u64] {
        &self.coords[i]
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.iter().all(|&x| x == 0))
    }

    /// Back to a skew element with S-degrees < p^m.
    pub fn lift(&self) -> SkewElement {
        let mut coeffs = BTreeMap::new();
        for (i, series) in self.coords.iter().enumerate() {
            for (j, &c) in series.iter().enumerate() {
                if c != 0 {
                    coeffs.insert((j as u32, i as u32), c);
                }
            }
        }
        SkewElement {
            bx: self.bx,
            coeffs,
        }
    }

    /// Left multiplication by a polynomial in T, coordinate-wise,
    /// truncated to D_T.  This is the Lambda(Gamma)-module structure.
    pub fn scale_gamma(&self, t_poly: &[i128]) -> Self {
        let modulus = self.bx.modulus();
        let poly: Vec<u64> = t_poly
            .iter()
            .map(|&c| c.rem_euclid(modulus as i128) as u64)
            .collect();
        let coords = self
            .coords
            .iter()
            .map(|series| {
                let mut out = vec![0u64; series.len()];
                poly_mul_acc(&mut out, &poly, series, modulus);
                out
            })
            .collect();
        GammaCoordinates {
            bx: self.bx,
            level: self.level,
            coords,
        }
    }

    /// Fold every coordinate modulo omega_level(T): entries of T-degree
    /// p^level and above are rewritten down, leaving a T-polynomial
    /// remainder of degree below p^level (higher slots zero).
    pub fn fold_mod_omega_t(&self, level: u32) -> Result<Self> {
        let pt = checked_pow(self.bx.p, level)?;
        if pt > self.bx.deg_t as u64 {
            return Err(Error::Truncation(format!(
                "T-side reduction at level {level} needs p^level <= D_T = {}",
                self.bx.deg_t
            )));
        }
        let modulus = self.bx.modulus();
        let binom = omega_fold_table(self.bx.p, level, modulus)?;
        let coords = self
            .coords
            .iter()
            .map(|series| {
                let mut s = series.clone();
                fold_dense(&mut s, pt as usize, &binom, modulus);
                s
            })
            .collect();
        Ok(GammaCoordinates {
            bx: self.bx,
            level: self.level,
            coords,
        })
    }
}

// ---------------------------------------------------------------------
// dense polynomial kernels
// ---------------------------------------------------------------------

/// acc += a * b, all dense in S, truncated to acc.len().
fn poly_mul_acc(acc: &mut [u64], a: &[u64], b: &[u64], modulus: u64) {
    let n = acc.len();
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 || i >= n {
            continue;
        }
        for (k, &bk) in b.iter().enumerate() {
            if bk == 0 || i + k >= n {
                continue;
            }
            let t = (ai as u128 * bk as u128 % modulus as u128) as u64;
            acc[i + k] = ((acc[i + k] as u128 + t as u128) % modulus as u128) as u64;
        }
    }
}

/// binom(p^m, j) mod modulus for j = 0..p^m-1, the fold coefficients of
/// omega_m.
fn omega_fold_table(p: u64, m: u32, modulus: u64) -> Result<Vec<u64>> {
    let pm = checked_pow(p, m)?;
    Ok((0..pm).map(|j| binomial_mod(pm, j, modulus)).collect())
}

/// In-place rewrite of every degree >= period down through
///     X^i = -(sum_{1<=j<period} binom[j] X^j) X^{i-period},
/// highest degree first; one descending pass suffices because each
/// rewrite only feeds strictly lower degrees.
fn fold_dense(coeffs: &mut [u64], period: usize, binom: &[u64], modulus: u64) {
    for i in (period..coeffs.len()).rev() {
        let c = coeffs[i];
        if c == 0 {
            continue;
        }
        coeffs[i] = 0;
        for (j, &bj) in binom.iter().enumerate().skip(1) {
            let sub = (c as u128 * bj as u128 % modulus as u128) as u64;
            let slot = &mut coeffs[i - period + j];
            *slot = (*slot + modulus - sub) % modulus;
        }
    }
}

/// Powers 0..D_S of the series sigma^{-1}(S) = (1+S)^q - 1 (integer
/// exponent q), dense, truncated to D_S.
fn sigma_inv_power_table(bx: &TruncationBox) -> Result<Vec<Vec<u64>>> {
    let modulus = bx.modulus();
    let base: Vec<u64> = (0..bx.deg_s as u64)
        .map(|k| if k == 0 { 0 } else { binomial_mod(bx.q(), k, modulus) })
        .collect();
    Ok(power_table(&base, bx.deg_s as usize, modulus))
}

/// Powers of sigma(S) = (1+S)^c - 1 with c = q^{-1} carried at guard
/// precision.
fn sigma_power_table(bx: &TruncationBox) -> Result<Vec<Vec<u64>>> {
    let c = bx.sigma_exponent()?;
    let mut base = vec![0u64; bx.deg_s as usize];
    for k in 1..bx.deg_s {
        base[k as usize] = padic::padic_binomial(&c, k, bx.precision)?.residue();
    }
    Ok(power_table(&base, bx.deg_s as usize, bx.modulus()))
}

fn power_table(base: &[u64], deg: usize, modulus: u64) -> Vec<Vec<u64>> {
    let mut table = Vec::with_capacity(deg);
    let mut one = vec![0u64; deg];
    one[0] = 1;
    table.push(one);
    for i in 1..deg {
        let mut next = vec![0u64; deg];
        poly_mul_acc(&mut next, &table[i - 1], base, modulus);
        table.push(next);
    }
    table
}

/// Right multiplication by T on dense rows:
///     (sum_j T^j X_j) T = sum_j T^{j+1} sigma^{-1}(X_j)
///                       + sum_j T^j (sigma^{-1}(X_j) - X_j).
fn advance_by_t(rows: &[Vec<u64>], pow_table: &[Vec<u64>], modulus: u64) -> Vec<Vec<u64>> {
    let deg_s = rows[0].len();
    let sig: Vec<Vec<u64>> = rows
        .iter()
        .map(|row| {
            let mut out = vec![0u64; deg_s];
            for (i, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (k, &b) in pow_table[i].iter().enumerate() {
                    if b == 0 {
                        continue;
                    }
                    let t = (c as u128 * b as u128 % modulus as u128) as u64;
                    out[k] = ((out[k] as u128 + t as u128) % modulus as u128) as u64;
                }
            }
            out
        })
        .collect();
    let mut next = vec![vec![0u64; deg_s]; rows.len()];
    for j in 0..rows.len() {
        for k in 0..deg_s {
            // sigma^{-1}(X_j) - X_j stays at T-degree j ...
            let mut v = (sig[j][k] + modulus - rows[j][k]) % modulus;
            // ... and sigma^{-1}(X_{j-1}) moves up to T-degree j.
            if j > 0 {
                v = (v + sig[j - 1][k]) % modulus;
            }
            next[j][k] = v;
        }
    }
    next
}
