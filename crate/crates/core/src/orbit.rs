//! The 0/1 orbit matrices A(p, n, d, u) on Z/p^n attached to the
//! multiplication action of q = 1 + p u, their exact determinants, and the
//! closed form they satisfy.
//!
//! Three independent routes to the determinant are provided:
//!
//!  * `det_exact` — fraction-free Bareiss elimination on the raw matrix,
//!    over exact integers;
//!  * `det_blocks` — decompose the index set into multiplicative q-orbits,
//!    read each block as a circulant, and take the product of circulant
//!    determinants computed as integer resultants against x^P - 1;
//!  * `closed_form` — the closed formula (1 for n = 1, d^{(p-1)(n-1)} for
//!    d < p, 0 for d >= p when n > 1).
//!
//! `verify` runs all three and demands exact agreement.

use crate::error::{Error, Result};
use crate::padic::{checked_pow, is_odd_prime, mult_order};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Parameters (p, n, d, u) with p an odd prime and gcd(u, p) = 1; the
/// multiplier is q = 1 + p u.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitMatrixParams {
    pub p: u64,
    pub n: u32,
    pub d: u64,
    pub u: u64,
}

impl OrbitMatrixParams {
    pub fn new(p: u64, n: u32, d: u64, u: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if n == 0 || d == 0 {
            return Err(Error::InvalidParameter("need n >= 1 and d >= 1".into()));
        }
        if u == 0 || u % p == 0 {
            return Err(Error::InvalidParameter(format!(
                "u = {u} must be coprime to p = {p}"
            )));
        }
        checked_pow(p, n)?;
        Ok(OrbitMatrixParams { p, n, d, u })
    }

    pub fn q(&self) -> u64 {
        1 + self.p * self.u
    }

    /// p^n, the matrix dimension.
    pub fn size(&self) -> u64 {
        checked_pow(self.p, self.n).expect("validated at construction")
    }
}

/// The p^n x p^n indicator matrix with a_{ij} = 1 iff
/// j = (i-1) q^k + 1 mod p^n for some 0 <= k <= d-1 (1-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMatrix {
    params: OrbitMatrixParams,
    size: usize,
    rows: Vec<Vec<u8>>,
}

impl OrbitMatrix {
    pub fn params(&self) -> OrbitMatrixParams {
        self.params
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at 1-based (i, j).
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.rows[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Plain-text 0/1 grid, one row per line.
    pub fn grid_string(&self) -> String {
        let mut out = String::with_capacity(self.size * (2 * self.size + 1));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Sparse coordinate list as CSV with header `i,j`, 1-based.
    pub fn sparse_csv(&self) -> String {
        let mut out = String::from("i,j\n");
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    out.push_str(&format!("{},{}\n", i + 1, j + 1));
                }
            }
        }
        out
    }
}

/// Build A(p, n, d, u); values of k hitting the same column collapse to a
/// single 1.
pub fn build_matrix(params: &OrbitMatrixParams) -> OrbitMatrix {
    let modulus = params.size();
    let size = modulus as usize;
    let q = params.q() % modulus;
    let mut rows = vec![vec![0u8; size]; size];
    for i in 0..modulus {
        // row i+1 marks the first d points of the q-orbit of the residue i,
        // shifted by one
        let mut t = i;
        for _ in 0..params.d.min(modulus) {
            rows[i as usize][t as usize] = 1;
            t = t * q % modulus;
        }
    }
    OrbitMatrix {
        params: *params,
        size,
        rows,
    }
}

// ---------------------------------------------------------------------
// route 1: exact elimination
// ---------------------------------------------------------------------

/// Exact determinant by fraction-free Bareiss elimination.  Runs in i128
/// first and falls back to big integers if an intermediate minor would
/// overflow.
pub fn det_exact(matrix: &OrbitMatrix) -> BigInt {
    let ints: Vec<Vec<i128>> = matrix
        .rows
        .iter()
        .map(|row| row.iter().map(|&c| c as i128).collect())
        .collect();
    match bareiss_i128(ints.clone()) {
        Some(det) => BigInt::from(det),
        None => bareiss_big(
            ints.into_iter()
                .map(|row| row.into_iter().map(BigInt::from).collect())
                .collect(),
        ),
    }
}

/// Bareiss over i128 with overflow detection; `None` means retry with
/// big integers.
pub(crate) fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(swap) => {
                    m.swap(k, swap);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[k][k].checked_mul(m[i][j])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                let num = a.checked_sub(b)?;
                debug_assert_eq!(num % prev, 0, "Bareiss divisions are exact");
                m[i][j] = num / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

pub(crate) fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(swap) => {
                    m.swap(k, swap);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                debug_assert!((&num % &prev).is_zero());
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

// ---------------------------------------------------------------------
// route 2: orbit decomposition and circulant blocks
// ---------------------------------------------------------------------

/// Label of one q-orbit on {1, ..., p^n}: either the fixed column 1, or
/// the class through i p^{m-1} + 1 of size p^{n-m}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassLabel {
    /// The residue 1, fixed by the action; its own singleton class.
    Fixed,
    /// The class {i p^{m-1} + 1 + p^m l}, 1 <= i <= p-1, 1 <= m <= n.
    Orbit { i: u64, m: u32 },
}

/// One class of the partition, listed in the cyclic order given by
/// repeated multiplication t -> (t-1) q + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClass {
    pub label: ClassLabel,
    pub members: Vec<u64>,
}

impl OrbitClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Partition {1, ..., p^n} into the singleton {1} and the classes
/// {i p^{m-1} + 1 + p^m l} for 1 <= i <= p-1, 1 <= m <= n, each listed
/// in its multiplicative cyclic order.
pub fn orbit_partition(p: u64, n: u32, u: u64) -> Result<Vec<OrbitClass>> {
    let params = OrbitMatrixParams::new(p, n, 1, u)?;
    let modulus = params.size();
    let q = params.q() % modulus;
    let mut classes = vec![OrbitClass {
        label: ClassLabel::Fixed,
        members: vec![1],
    }];
    for m in 1..=n {
        let pm1 = checked_pow(p, m - 1)?;
        // class size p^{n-m} = order of q modulo p^{n-m+1}
        let size = checked_pow(p, n - m)?;
        debug_assert_eq!(mult_order(q, p, n - m + 1).unwrap(), size);
        for i in 1..p {
            let start = (i * pm1 + 1) % modulus;
            let start = if start == 0 { modulus } else { start };
            let mut members = Vec::with_capacity(size as usize);
            let mut t = start;
            for _ in 0..size {
                members.push(t);
                t = ((t - 1) * q) % modulus + 1;
            }
            debug_assert_eq!(t, start, "orbit closes after p^(n-m) steps");
            classes.push(OrbitClass {
                label: ClassLabel::Orbit { i, m },
                members,
            });
        }
    }
    Ok(classes)
}

/// First row of the circulant block carried by a class: the indicator of
/// the offsets {k mod P : 0 <= k <= d-1}.  Collapses to all ones when
/// d >= P.
pub fn block_first_row(class: &OrbitClass, d: u64) -> Vec<u8> {
    let len = class.members.len() as u64;
    let mut row = vec![0u8; len as usize];
    for k in 0..d.min(len) {
        row[(k % len) as usize] = 1;
    }
    row
}

/// Exact product of f(zeta) over all P-th roots of unity zeta, where f is
/// the polynomial with the given 0/1 coefficient list: the resultant of
/// x^P - 1 and f, computed over the integers.
pub fn circulant_det_exact(first_row: &[u8], len: usize) -> BigInt {
    assert_eq!(first_row.len(), len);
    assert!(len >= 1);
    let mut cyc = vec![BigInt::zero(); len + 1];
    cyc[0] = BigInt::from(-1);
    cyc[len] = BigInt::one();
    let f: Vec<BigInt> = first_row.iter().map(|&c| BigInt::from(c)).collect();
    resultant(&IntPoly::new(cyc), &IntPoly::new(f))
}

/// Determinant through the block decomposition: the product of the
/// circulant determinants over all classes.
pub fn det_blocks(params: &OrbitMatrixParams) -> Result<BigInt> {
    let classes = orbit_partition(params.p, params.n, params.u)?;
    let mut acc = BigInt::one();
    for class in &classes {
        let row = block_first_row(class, params.d);
        acc *= circulant_det_exact(&row, class.len());
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------
// route 3: closed form
// ---------------------------------------------------------------------

/// 1 when n = 1; d^{(p-1)(n-1)} when n > 1 and d < p; 0 when n > 1 and
/// d >= p.
pub fn closed_form(p: u64, n: u32, d: u64) -> Result<BigInt> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and d >= 1".into()));
    }
    if n == 1 {
        return Ok(BigInt::one());
    }
    if d >= p {
        return Ok(BigInt::zero());
    }
    let exp = (p - 1) as u32 * (n - 1);
    Ok(BigInt::from(d).pow(exp))
}

// ---------------------------------------------------------------------
// the three-way agreement harness
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub params: OrbitMatrixParams,
    pub det_exact: BigInt,
    pub det_blocks: BigInt,
    pub closed_form: BigInt,
    pub agree: bool,
    /// The raw grid, kept only on disagreement so it can be dumped.
    pub matrix_dump: Option<String>,
}

impl VerifyReport {
    pub fn csv_header() -> &'static str {
        "p,n,d,u,det_exact,det_blocks,closed_form,agree"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.params.p,
            self.params.n,
            self.params.d,
            self.params.u,
            self.det_exact,
            self.det_blocks,
            self.closed_form,
            self.agree
        )
    }
}

/// Compute the determinant by all three routes and compare exactly.
pub fn verify(params: &OrbitMatrixParams) -> Result<VerifyReport> {
    let matrix = build_matrix(params);
    let exact = det_exact(&matrix);
    let blocks = det_blocks(params)?;
    let closed = closed_form(params.p, params.n, params.d)?;
    let agree = exact == blocks && blocks == closed;
    Ok(VerifyReport {
        params: *params,
        det_exact: exact,
        det_blocks: blocks,
        closed_form: closed,
        agree,
        matrix_dump: if agree { None } else { Some(matrix.grid_string()) },
    })
}

// ---------------------------------------------------------------------
// integer polynomials and the subresultant PRS resultant
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntPoly {
    /// Coefficients, lowest degree first, no trailing zeros.
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub(crate) fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    fn lc(&self) -> &BigInt {
        self.coeffs.last().expect("nonzero polynomial")
    }

    fn scaled(&self, c: &BigInt) -> Self {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    fn shifted(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly::new(coeffs)
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        IntPoly::new(out)
    }

    fn divided_exact(&self, c: &BigInt) -> Self {
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|a| {
                    debug_assert!((a % c).is_zero(), "subresultant divisions are exact");
                    a / c
                })
                .collect(),
        )
    }
}

/// Pseudo-remainder of lc(b)^{deg a - deg b + 1} * a under division by b.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.degree();
    let lc_b = b.lc().clone();
    let mut r = a.clone();
    let mut scale_left = a.degree() - db + 1;
    while !r.is_zero() && r.degree() >= db {
        let dr = r.degree();
        let lead = r.lc().clone();
        r = r.scaled(&lc_b).sub(&b.scaled(&lead).shifted(dr - db));
        scale_left -= 1;
        debug_assert!(r.is_zero() || r.degree() < dr);
    }
    // one lc(b) factor was applied per elimination; degree drops larger
    // than one skip eliminations, so pad the multiplier up to the full
    // lc(b)^{da - db + 1}
    for _ in 0..scale_left {
        r = r.scaled(&lc_b);
    }
    r
}

/// Resultant of a and b over the integers, by the subresultant polynomial
/// remainder sequence.
pub(crate) fn resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let mut s = BigInt::one();
    let (mut a, mut b) = (a.clone(), b.clone());
    if a.degree() < b.degree() {
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.degree() == 0 {
        return s * b.lc().pow(a.degree() as u32);
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.degree();
        let db = b.degree();
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        let divisor = &g * h.pow(delta);
        b = if r.is_zero() {
            IntPoly::new(vec![])
        } else {
            r.divided_exact(&divisor)
        };
        g = a.lc().clone();
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            let den = h.pow(delta - 1);
            debug_assert!((&num % &den).is_zero());
            num / den
        };
        if b.is_zero() {
            // a common divisor of positive degree: the resultant vanishes
            return BigInt::zero();
        }
        if b.degree() == 0 {
            let da = a.degree() as u32;
            let num = b.lc().pow(da);
            let den = h.pow(da.saturating_sub(1));
            debug_assert!((&num % &den).is_zero());
            return s * (num / den);
        }
    }
}
