//! Exact arithmetic in Z/p^N for an odd prime p, together with p-adic
//! valuations, multiplicative orders modulo p^n, and p-adic binomial
//! coefficients with explicit guard-precision checking.
//!
//! Every value carries its own (p, N); the modulus p^N must fit in a `u64`
//! and intermediate products are taken in `u128`, so arithmetic is exact
//! for the whole desk-scale range (p up to 7, N well past 20 for p = 3).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// p-adic valuation of an integer: the largest v with p^v | x, or
/// `Infinite` when x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Finite value, or `cap` for the infinite marker.
    pub fn capped(&self, cap: u32) -> u32 {
        match *self {
            Valuation::Finite(v) => v.min(cap),
            Valuation::Infinite => cap,
        }
    }
}

/// Trial-division primality check; inputs stay far below the range where
/// this matters for speed.
pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p^exp as a `u64`, or `ModulusOverflow` when it does not fit.
pub fn checked_pow(p: u64, exp: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(p).ok_or(Error::ModulusOverflow(exp))?;
    }
    Ok(acc)
}

/// Largest v with p^v dividing x (x given as any signed integer).
pub fn valuation(x: i128, p: u64) -> Valuation {
    assert!(is_odd_prime(p) || p == 2, "valuation requires a prime");
    if x == 0 {
        return Valuation::Infinite;
    }
    let p = p as i128;
    let mut x = x.abs();
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

/// Valuation of k! at p, by Legendre's formula.
pub fn factorial_valuation(k: u64, p: u64) -> u32 {
    let mut total = 0u64;
    let mut q = p;
    loop {
        total += k / q;
        match q.checked_mul(p) {
            Some(next) if next <= k => q = next,
            _ => break,
        }
    }
    total as u32
}

/// Least k >= 1 with q^k = 1 mod p^n.  Direct powering; the order divides
/// (p-1)p^(n-1), which stays tiny at desk scale.
pub fn mult_order(q: u64, p: u64, n: u32) -> Result<u64> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("level n must be >= 1".into()));
    }
    let modulus = checked_pow(p, n)?;
    let q = q % modulus;
    if q % p == 0 {
        return Err(Error::NonUnit(q, modulus));
    }
    let mut acc = q;
    let mut k = 1u64;
    while acc != 1 {
        acc = mul_mod(acc, q, modulus);
        k += 1;
    }
    Ok(k)
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Modular inverse by extended Euclid; `None` when gcd(a, m) != 1.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// An element of Z/p^N with the prime and the precision carried along.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModularInt {
    p: u64,
    precision: u32,
    modulus: u64,
    residue: u64,
}

impl std::fmt::Debug for ModularInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.p, self.precision)
    }
}

impl std::fmt::Display for ModularInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.residue)
    }
}

impl ModularInt {
    /// New element of Z/p^N.  Rejects p = 2, composite p, and N = 0.
    pub fn new(p: u64, precision: u32, value: i128) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if precision == 0 {
            return Err(Error::InvalidParameter("precision must be >= 1".into()));
        }
        let modulus = checked_pow(p, precision)?;
        Ok(ModularInt {
            p,
            precision,
            modulus,
            residue: value.rem_euclid(modulus as i128) as u64,
        })
    }

    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 0)
    }

    pub fn one(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.precision != other.precision {
            return Err(Error::ParamMismatch(format!(
                "(p, N) = ({}, {}) vs ({}, {})",
                self.p, self.precision, other.p, other.precision
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            residue: ((self.residue as u128 + other.residue as u128) % self.modulus as u128) as u64,
            ..*self
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            residue: (self.residue + self.modulus - other.residue) % self.modulus,
            ..*self
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            residue: mul_mod(self.residue, other.residue, self.modulus),
            ..*self
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            residue: if self.residue == 0 { 0 } else { self.modulus - self.residue },
            ..*self
        }
    }

    /// Multiplicative inverse; errors when the residue is divisible by p.
    pub fn inv(&self) -> Result<Self> {
        if self.residue % self.p == 0 {
            return Err(Error::NonUnit(self.residue, self.modulus));
        }
        let residue = inv_mod(self.residue, self.modulus).expect("unit has an inverse");
        Ok(Self { residue, ..*self })
    }

    pub fn pow(&self, exp: u64) -> Self {
        Self {
            residue: pow_mod(self.residue, exp, self.modulus),
            ..*self
        }
    }

    /// Valuation of the residue, capped at the precision (a zero residue
    /// only certifies valuation >= N).
    pub fn valuation(&self) -> u32 {
        valuation(self.residue as i128, self.p).capped(self.precision)
    }

    /// Reinterpret the canonical representative at a different precision.
    /// Raising the precision treats the stored residue as an exact integer.
    pub fn at_precision(&self, precision: u32) -> Result<Self> {
        Self::new(self.p, precision, self.residue as i128)
    }
}

/// binom(c, i) = c(c-1)...(c-i+1)/i! reduced mod p^N, for c a p-adic
/// integer known modulo p^M.  Exact as a p-adic integer; the input must
/// carry guard precision M >= N + v_p(i!) or the call is rejected rather
/// than silently wrong.
pub fn padic_binomial(c: &ModularInt, i: u32, target_precision: u32) -> Result<ModularInt> {
    if target_precision == 0 {
        return Err(Error::InvalidParameter("precision must be >= 1".into()));
    }
    let need = target_precision + factorial_valuation(i as u64, c.p());
    if c.precision() < need {
        return Err(Error::InsufficientPrecision {
            have: c.precision(),
            need,
        });
    }
    let modulus = checked_pow(c.p(), target_precision)?;
    let mut num = BigInt::from(1);
    for t in 0..i as i128 {
        num *= BigInt::from(c.residue() as i128 - t);
    }
    let mut den = BigInt::from(1);
    for t in 2..=i as i128 {
        den *= BigInt::from(t);
    }
    let (q, r) = (num.clone() / &den, num % &den);
    assert!(r.is_zero(), "falling factorial of an integer is divisible by i!");
    let residue = q
        .mod_floor_u64(modulus)
        .expect("reduction fits in u64");
    ModularInt::new(c.p(), target_precision, residue as i128)
}

/// Ordinary binomial coefficient reduced mod m, via exact big-integer
/// arithmetic.  Used for the integer-exponent expansions.
pub(crate) fn binomial_mod(n: u64, k: u64, m: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = BigInt::from(1);
    for t in 0..k {
        num *= BigInt::from(n - t);
    }
    let mut den = BigInt::from(1);
    for t in 2..=k {
        den *= BigInt::from(t);
    }
    let q = num / den;
    q.mod_floor_u64(m).expect("reduction fits in u64")
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, m: u64) -> Option<u64>;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: u64) -> Option<u64> {
        let m_big = BigInt::from(m);
        let mut r = self % &m_big;
        if r.is_negative() {
            r += &m_big;
        }
        r.to_u64()
    }
}
