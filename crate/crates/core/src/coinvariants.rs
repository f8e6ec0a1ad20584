//! Finite quotients of finitely presented left modules over the skew ring:
//! the double coinvariant X/(I_{H_n} X + I_{Gamma_n} X) at level n, its
//! exact size exponent e_n through elementary divisors over Z/p^N, the
//! S-side-only quotient sizes used for growth fitting, and the growth
//! bound report.
//!
//! A presentation is a relation matrix of skew elements over g generators;
//! the level-n quotient is assembled on the monomial basis
//! {generator_k (x) T^j S^i : i, j < p^n} by left-multiplying every
//! relation by every basis monomial, reducing modulo omega_n(S) to
//! Gamma-coordinates and then modulo omega_n(T) by monic division.  The
//! working box is sized so that S-truncation errors fold to zero modulo
//! p^N; undersized boxes are rejected rather than silently wrong, and
//! every reported exponent is re-run at two extra digits of precision
//! before it is called stable.

use crate::error::{Error, Result};
use crate::padic::{checked_pow, inv_mod, valuation};
use crate::skew::{SkewElement, TermRecord, TruncationBox};
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------
// presentations
// ---------------------------------------------------------------------

/// Exponents (m_1, ..., m_s) of an elementary module, the direct sum of
/// the quotients by p^{m_i}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementarySpec {
    exponents: Vec<u32>,
}

impl ElementarySpec {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() || exponents.iter().any(|&m| m == 0) {
            return Err(Error::InvalidParameter(
                "an elementary spec needs s >= 1 positive exponents".into(),
            ));
        }
        Ok(ElementarySpec { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// The mu invariant: the sum of the exponents.
    pub fn mu(&self) -> u64 {
        self.exponents.iter().map(|&m| m as u64).sum()
    }
}

/// A finitely presented left module: g generators and a list of relation
/// rows, each row holding one skew element per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulePresentation {
    bx: TruncationBox,
    generators: usize,
    relations: Vec<Vec<SkewElement>>,
}

impl ModulePresentation {
    pub fn new(
        bx: TruncationBox,
        generators: usize,
        relations: Vec<Vec<SkewElement>>,
    ) -> Result<Self> {
        if generators == 0 {
            return Err(Error::InvalidParameter("need at least one generator".into()));
        }
        for row in &relations {
            if row.len() != generators {
                return Err(Error::InvalidParameter(format!(
                    "relation has {} components, expected {generators}",
                    row.len()
                )));
            }
            if row.iter().any(|e| e.bx() != bx) {
                return Err(Error::BoxMismatch);
            }
        }
        Ok(ModulePresentation {
            bx,
            generators,
            relations,
        })
    }

    pub fn bx(&self) -> TruncationBox {
        self.bx
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &[Vec<SkewElement>] {
        &self.relations
    }

    pub fn max_relation_s_degree(&self) -> u32 {
        self.relations
            .iter()
            .flatten()
            .map(|e| e.max_s_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn max_relation_t_degree(&self) -> u32 {
        self.relations
            .iter()
            .flatten()
            .map(|e| e.max_t_degree())
            .max()
            .unwrap_or(0)
    }

    /// Rebuild the same integer-representative relation data inside a
    /// different box (same p and u).  Coefficients are reinterpreted via
    /// their canonical representatives, so raising the precision is exact
    /// for presentations written with small integer coefficients.
    pub fn with_box(&self, target: TruncationBox) -> Result<Self> {
        let relations = self
            .relations
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| SkewElement::from_records(target, &e.to_records()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ModulePresentation::new(target, self.generators, relations)
    }

    /// The elementary module for a spec: one generator and one relation
    /// p^{m_i} per summand.  The box must carry more precision than every
    /// exponent or the relation would vanish from its own presentation.
    pub fn elementary(bx: TruncationBox, spec: &ElementarySpec) -> Result<Self> {
        let max_m = *spec.exponents().iter().max().expect("nonempty");
        if bx.precision() <= max_m {
            return Err(Error::InsufficientPrecision {
                have: bx.precision(),
                need: max_m + 1,
            });
        }
        let g = spec.exponents().len();
        let mut relations = Vec::with_capacity(g);
        for (k, &m) in spec.exponents().iter().enumerate() {
            let mut row = vec![SkewElement::zero(bx); g];
            row[k] = SkewElement::monomial(bx, 0, 0, checked_pow(bx.p(), m)? as i128)?;
            relations.push(row);
        }
        ModulePresentation::new(bx, g, relations)
    }

    /// Direct sum of two presentations over the same box.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.bx != other.bx {
            return Err(Error::BoxMismatch);
        }
        let g = self.generators + other.generators;
        let mut relations = Vec::new();
        for row in &self.relations {
            let mut r = row.clone();
            r.extend(std::iter::repeat(SkewElement::zero(self.bx)).take(other.generators));
            relations.push(r);
        }
        for row in &other.relations {
            let mut r: Vec<SkewElement> =
                std::iter::repeat(SkewElement::zero(self.bx)).take(self.generators).collect();
            r.extend(row.iter().cloned());
            relations.push(r);
        }
        ModulePresentation::new(self.bx, g, relations)
    }
}

/// The pseudo-null test module cut out by (p, T): one generator,
/// relations p and T.  Finite at every S-level, of size p^{p^m}.
pub fn fixture_p_t(bx: TruncationBox) -> Result<ModulePresentation> {
    let relations = vec![
        vec![SkewElement::monomial(bx, 0, 0, bx.p() as i128)?],
        vec![SkewElement::var_t(bx)?],
    ];
    ModulePresentation::new(bx, 1, relations)
}

/// Z/p with both variables acting trivially: relations p, T and S.
pub fn fixture_p_t_s(bx: TruncationBox) -> Result<ModulePresentation> {
    let relations = vec![
        vec![SkewElement::monomial(bx, 0, 0, bx.p() as i128)?],
        vec![SkewElement::var_t(bx)?],
        vec![SkewElement::var_s(bx)?],
    ];
    ModulePresentation::new(bx, 1, relations)
}

// ---------------------------------------------------------------------
// matrices over Z/p^N and their elementary divisors
// ---------------------------------------------------------------------

/// A dense matrix over Z/p^N; rows may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicMatrix {
    p: u64,
    precision: u32,
    modulus: u64,
    ncols: usize,
    rows: Vec<Vec<u64>>,
}

impl PadicMatrix {
    pub fn new(p: u64, precision: u32, ncols: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        let modulus = checked_pow(p, precision)?;
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::InvalidParameter("ragged matrix".into()));
            }
        }
        Ok(PadicMatrix {
            p,
            precision,
            modulus,
            ncols,
            rows: rows
                .into_iter()
                .map(|r| r.into_iter().map(|c| c % modulus).collect())
                .collect(),
        })
    }

    pub fn from_int_rows(p: u64, precision: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let modulus = checked_pow(p, precision)? as i128;
        let ncols = rows.first().map_or(0, |r| r.len());
        let converted = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&c| (c as i128).rem_euclid(modulus) as u64)
                    .collect()
            })
            .collect();
        PadicMatrix::new(p, precision, ncols, converted)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }
}

/// Diagonal valuations of a Smith-type normal form over Z/p^N, in
/// nondecreasing order, together with the data needed to read off the
/// cokernel size.  A column with no pivot below the precision ceiling
/// contributes a full Z/p^N factor and makes the outcome a lower bound
/// only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithReport {
    pub valuations: Vec<u32>,
    pub ncols: usize,
    pub precision: u32,
}

impl SmithReport {
    /// True when every column carries an elementary divisor strictly
    /// below the precision ceiling.
    pub fn stable(&self) -> bool {
        self.valuations.len() == self.ncols
    }

    /// p-exponent of the cokernel size: sum of min(N, v) over all columns,
    /// unpivoted columns counting as N.
    pub fn exponent(&self) -> u64 {
        let pivots: u64 = self.valuations.iter().map(|&v| v as u64).sum();
        pivots + (self.ncols - self.valuations.len()) as u64 * self.precision as u64
    }
}

/// Elementary divisors over the local ring Z/p^N: repeatedly pick the
/// entry of minimal valuation as pivot, normalize its unit part away, and
/// clear its row and column.
pub fn smith_exponents(matrix: &PadicMatrix) -> SmithReport {
    let modulus = matrix.modulus;
    let p = matrix.p;
    let precision = matrix.precision;
    let mut m = matrix.rows.clone();
    let nr = m.len();
    let nc = matrix.ncols;
    let steps = nr.min(nc);
    let mut valuations = Vec::new();
    let val = |x: u64| -> u32 { valuation(x as i128, p).capped(precision) };
    for t in 0..steps {
        // pivot: minimal valuation in the active submatrix
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if m[i][j] == 0 {
                    continue;
                }
                let v = val(m[i][j]);
                if best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break;
                    }
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((v, pi, pj)) = best else { break };
        m.swap(t, pi);
        if pj != t {
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
        }
        // normalize the pivot row so the pivot becomes exactly p^v
        let pv = checked_pow(p, v).expect("v < precision");
        let unit = m[t][t] / pv;
        let unit_inv = inv_mod(unit, modulus).expect("unit part is invertible");
        for j in t..nc {
            m[t][j] = (m[t][j] as u128 * unit_inv as u128 % modulus as u128) as u64;
        }
        // clear the pivot column below; rows above are already isolated
        for i in t + 1..nr {
            if m[i][t] == 0 {
                continue;
            }
            debug_assert!(val(m[i][t]) >= v);
            let w = m[i][t] / pv;
            for j in t..nc {
                let sub = (w as u128 * m[t][j] as u128 % modulus as u128) as u64;
                m[i][j] = (m[i][j] + modulus - sub) % modulus;
            }
        }
        // clearing the pivot row is a column operation that only touches
        // row t, because column t now holds the pivot alone
        for j in t + 1..nc {
            m[t][j] = 0;
        }
        valuations.push(v);
    }
    debug_assert!(valuations.windows(2).all(|w| w[0] <= w[1]));
    SmithReport {
        valuations,
        ncols: nc,
        precision,
    }
}

// ---------------------------------------------------------------------
// level quotients
// ---------------------------------------------------------------------

/// Degree bounds under which the level-n assembly is exact modulo p^N:
/// S-truncation tails fold into multiples of p^N, and products never
/// overflow the T bound.
fn required_bounds(pres: &ModulePresentation, pn: u64, precision: u32) -> (u32, u32) {
    let pn = pn as u32;
    let rel_s = pres.max_relation_s_degree();
    let rel_t = pres.max_relation_t_degree();
    let fold_guard = (precision + 1) * pn.saturating_sub(1) + 1;
    let deg_s = pn.max(rel_s + 1).max(fold_guard);
    let deg_t = pn + rel_t + 1;
    (deg_s, deg_t)
}

fn working_box(pres: &ModulePresentation, pn: u64, precision: u32) -> Result<TruncationBox> {
    let (deg_s, deg_t) = required_bounds(pres, pn, precision);
    pres.bx().resized(precision, deg_s, deg_t)
}

/// Relation matrix of the finite quotient at level n over the basis
/// {generator_k (x) T^j S^i : i, j < p^n}: every presentation relation is
/// left-multiplied by every basis monomial, reduced modulo omega_n(S)
/// into Gamma-coordinates, and each coordinate is reduced modulo
/// omega_n(T).  The omega-multiples themselves reduce to zero, so no
/// extra rows are needed.
pub fn level_relation_matrix(pres: &ModulePresentation, n: u32) -> Result<PadicMatrix> {
    let bx = pres.bx();
    let pn64 = checked_pow(bx.p(), n)?;
    let (need_s, need_t) = required_bounds(pres, pn64, bx.precision());
    if (bx.deg_s() as u64) < pn64 || bx.deg_s() < need_s {
        return Err(Error::Truncation(format!(
            "level {n} needs D_S >= {need_s} (got {})",
            bx.deg_s()
        )));
    }
    if (bx.deg_t() as u64) < pn64 || bx.deg_t() < need_t {
        return Err(Error::Truncation(format!(
            "level {n} needs D_T >= {need_t} (got {})",
            bx.deg_t()
        )));
    }
    let pn = pn64 as usize;
    let ncols = pres.generators() * pn * pn;
    let mut rows = Vec::with_capacity(pres.relations().len() * pn * pn);
    for rel in pres.relations() {
        for j in 0..pn as u32 {
            for i in 0..pn as u32 {
                let w = SkewElement::monomial(bx, j, i, 1)?;
                let mut row = Vec::with_capacity(ncols);
                for comp in rel {
                    let prod = w.mul(comp)?;
                    let coords = prod.reduce_mod_omega_s(n)?.fold_mod_omega_t(n)?;
                    for c in 0..pn {
                        let series = coords.coordinate(c);
                        debug_assert!(series[pn..].iter().all(|&x| x == 0));
                        row.extend_from_slice(&series[..pn]);
                    }
                }
                rows.push(row);
            }
        }
    }
    PadicMatrix::new(bx.p(), bx.precision(), ncols, rows)
}

/// p-exponent of the size of the level-n double coinvariant quotient.
/// Computed at the presentation's precision and re-run at two more
/// digits; the flag is true only when no divisor sits at either ceiling
/// and both runs agree.  The returned value is the higher-precision one.
pub fn e_exponent(pres: &ModulePresentation, n: u32) -> Result<(u64, bool)> {
    let base = pres.bx().precision();
    let (e1, s1) = e_exponent_at(pres, n, base)?;
    let (e2, s2) = e_exponent_at(pres, n, base + 2)?;
    Ok((e2, s1 && s2 && e1 == e2))
}

fn e_exponent_at(pres: &ModulePresentation, n: u32, precision: u32) -> Result<(u64, bool)> {
    let pn = checked_pow(pres.bx().p(), n)?;
    let wpres = pres.with_box(working_box(pres, pn, precision)?)?;
    let report = smith_exponents(&level_relation_matrix(&wpres, n)?);
    Ok((report.exponent(), report.stable()))
}

/// Closed-form exponent of an elementary module: mu * p^{2n}.
pub fn elementary_e(spec: &ElementarySpec, p: u64, n: u32) -> Result<u64> {
    let sq = checked_pow(p, 2 * n)?;
    spec.mu()
        .checked_mul(sq)
        .ok_or_else(|| Error::InvalidParameter("exponent overflows u64".into()))
}

// ---------------------------------------------------------------------
// S-side growth of the finite part
// ---------------------------------------------------------------------

/// Exponents of the S-side quotients of a presentation that is finite at
/// every level (a fixture responsibility), with the exact affine fit in
/// p^m drawn from the last two levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePartGrowth {
    /// a_m for m = 0..=m_max.
    pub exponents: Vec<u64>,
    pub mu: u64,
    pub nu: i64,
    /// Fit solved exactly in integers from the last two levels.
    pub exact_fit: bool,
    /// Least m0 such that a_m = mu p^m + nu for all computed m >= m0.
    pub consistent_from: Option<u32>,
    pub stable: bool,
}

/// Sizes #(A / I_{H_m} A) for m = 0..=m_max: the quotient by omega_m(S)
/// only, counted over a T-degree cutoff that is grown until the exponent
/// stops moving.  `stable` is false when no cutoff stabilizes or a
/// divisor reaches the precision ceiling.
pub fn finite_part_growth(pres: &ModulePresentation, m_max: u32) -> Result<FinitePartGrowth> {
    let base = pres.bx().precision();
    let mut exponents = Vec::with_capacity(m_max as usize + 1);
    let mut stable = true;
    for m in 0..=m_max {
        let (e1, s1) = s_side_exponent(pres, m, base)?;
        let (e2, s2) = s_side_exponent(pres, m, base + 2)?;
        stable = stable && s1 && s2 && e1 == e2;
        exponents.push(e2);
    }
    // exact affine fit a_m = mu p^m + nu from the last two levels
    let p = pres.bx().p();
    let (mu, nu, exact_fit) = if m_max == 0 {
        (0, exponents[0] as i64, true)
    } else {
        let hi = checked_pow(p, m_max)? as i64;
        let lo = checked_pow(p, m_max - 1)? as i64;
        let da = exponents[m_max as usize] as i64 - exponents[m_max as usize - 1] as i64;
        if da >= 0 && da % (hi - lo) == 0 {
            let mu = da / (hi - lo);
            (mu as u64, exponents[m_max as usize] as i64 - mu * hi, true)
        } else {
            (0, 0, false)
        }
    };
    let consistent_from = if exact_fit {
        let mut from = None;
        for m in (0..=m_max).rev() {
            let pm = checked_pow(p, m)? as i64;
            if exponents[m as usize] as i64 == mu as i64 * pm + nu {
                from = Some(m);
            } else {
                break;
            }
        }
        from
    } else {
        None
    };
    Ok(FinitePartGrowth {
        exponents,
        mu,
        nu,
        exact_fit,
        consistent_from,
        stable,
    })
}

const T_CUTOFF_CAP: u32 = 12;

fn s_side_exponent(pres: &ModulePresentation, m: u32, precision: u32) -> Result<(u64, bool)> {
    let mut prev: Option<(u64, bool)> = None;
    for cut in 2..=T_CUTOFF_CAP {
        let outcome = s_side_exponent_at(pres, m, precision, cut)?;
        if let Some(last) = prev {
            if last == outcome {
                return Ok(outcome);
            }
        }
        prev = Some(outcome);
    }
    // never settled: report the last value, flagged unstable
    Ok((prev.expect("at least one cutoff ran").0, false))
}

fn s_side_exponent_at(
    pres: &ModulePresentation,
    m: u32,
    precision: u32,
    t_cutoff: u32,
) -> Result<(u64, bool)> {
    let p = pres.bx().p();
    let pm = checked_pow(p, m)? as usize;
    let (need_s, _) = required_bounds(pres, pm as u64, precision);
    let deg_t = t_cutoff + pres.max_relation_t_degree() + 1;
    let bx = pres.bx().resized(precision, need_s, deg_t)?;
    let wpres = pres.with_box(bx)?;
    let cut = t_cutoff as usize;
    let ncols = wpres.generators() * pm * cut;
    let mut rows = Vec::with_capacity(wpres.relations().len() * pm * cut);
    for rel in wpres.relations() {
        for j in 0..cut as u32 {
            for i in 0..pm as u32 {
                let w = SkewElement::monomial(bx, j, i, 1)?;
                let mut row = Vec::with_capacity(ncols);
                for comp in rel {
                    let coords = w.mul(comp)?.reduce_mod_omega_s(m)?;
                    for c in 0..pm {
                        // project away T-degrees at and beyond the cutoff
                        row.extend_from_slice(&coords.coordinate(c)[..cut]);
                    }
                }
                rows.push(row);
            }
        }
    }
    let report = smith_exponents(&PadicMatrix::new(p, precision, ncols, rows)?);
    Ok((report.exponent(), report.stable()))
}

// ---------------------------------------------------------------------
// growth reports
// ---------------------------------------------------------------------

/// One level of a growth report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u32,
    pub e_n: u64,
    pub lower: u64,
    pub upper: u64,
    pub stable: bool,
    pub pass: bool,
}

/// Measured exponents with predicted bounds and per-level verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn all_stable(&self) -> bool {
        self.rows.iter().all(|r| r.stable)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("n,e_n,lower,upper,stable,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.e_n, r.lower, r.upper, r.stable, r.pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Growth report against the bounds mu p^{2n} <= e_n <= mu p^{2n} +
/// mu_A p^n + nu_A + nu_B, with the pseudo-isomorphism data declared by
/// the caller.
pub fn bounds_report(
    pres: &ModulePresentation,
    spec: &ElementarySpec,
    mu_a: u64,
    nu_a: i64,
    nu_b: i64,
    n_max: u32,
) -> Result<GrowthReport> {
    let p = pres.bx().p();
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let (e, stable) = e_exponent(pres, n)?;
        let lower = elementary_e(spec, p, n)?;
        let upper_i = lower as i128
            + mu_a as i128 * checked_pow(p, n)? as i128
            + nu_a as i128
            + nu_b as i128;
        let upper = u64::try_from(upper_i.max(0)).map_err(|_| {
            Error::InvalidParameter("upper bound overflows u64".into())
        })?;
        let pass = lower <= e && e <= upper;
        rows.push(GrowthRow {
            n,
            e_n: e,
            lower,
            upper,
            stable,
            pass,
        });
    }
    Ok(GrowthReport { rows })
}

// ---------------------------------------------------------------------
// file format
// ---------------------------------------------------------------------

/// On-disk shape of a presentation, optionally carrying declared
/// pseudo-isomorphism data for growth reports.  A relation is a list of
/// term records for a single generator, or a list of such lists when
/// there are several generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PresentationFile {
    p: u64,
    #[serde(rename = "N")]
    precision: u32,
    q_u: u64,
    #[serde(rename = "D_S")]
    deg_s: u32,
    #[serde(rename = "D_T")]
    deg_t: u32,
    generators: usize,
    relations: Vec<RelationEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elementary: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_a: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_a: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_b: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RelationEntry {
    PerGenerator(Vec<Vec<TermRecord>>),
    Single(Vec<TermRecord>),
}

/// A presentation together with whatever pseudo-isomorphism data the
/// file declared.
#[derive(Debug, Clone)]
pub struct GrowthInput {
    pub presentation: ModulePresentation,
    pub elementary: Option<ElementarySpec>,
    pub mu_a: Option<u64>,
    pub nu_a: Option<i64>,
    pub nu_b: Option<i64>,
}

impl GrowthInput {
    /// The declared data, or an error naming what is missing.
    pub fn declared(&self) -> Result<(&ElementarySpec, u64, i64, i64)> {
        let spec = self.elementary.as_ref().ok_or_else(|| {
            Error::Parse("growth input lacks the declared `elementary` exponents".into())
        })?;
        let mu_a = self.mu_a.ok_or_else(|| Error::Parse("missing `mu_a`".into()))?;
        let nu_a = self.nu_a.ok_or_else(|| Error::Parse("missing `nu_a`".into()))?;
        let nu_b = self.nu_b.ok_or_else(|| Error::Parse("missing `nu_b`".into()))?;
        Ok((spec, mu_a, nu_a, nu_b))
    }
}

pub fn presentation_from_json(text: &str) -> Result<ModulePresentation> {
    Ok(growth_input_from_json(text)?.presentation)
}

pub fn growth_input_from_json(text: &str) -> Result<GrowthInput> {
    let file: PresentationFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let bx = TruncationBox::new(file.p, file.precision, file.deg_s, file.deg_t, file.q_u)?;
    let mut relations = Vec::with_capacity(file.relations.len());
    for entry in &file.relations {
        let row = match entry {
            RelationEntry::Single(records) => {
                if file.generators != 1 {
                    return Err(Error::Parse(
                        "flat relation entry requires exactly one generator".into(),
                    ));
                }
                vec![SkewElement::from_records(bx, records)?]
            }
            RelationEntry::PerGenerator(per_gen) => {
                if per_gen.len() != file.generators {
                    return Err(Error::Parse(format!(
                        "relation lists {} generator components, expected {}",
                        per_gen.len(),
                        file.generators
                    )));
                }
                per_gen
                    .iter()
                    .map(|records| SkewElement::from_records(bx, records))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        relations.push(row);
    }
    let presentation = ModulePresentation::new(bx, file.generators, relations)?;
    let elementary = match file.elementary {
        Some(exps) => Some(ElementarySpec::new(exps)?),
        None => None,
    };
    Ok(GrowthInput {
        presentation,
        elementary,
        mu_a: file.mu_a,
        nu_a: file.nu_a,
        nu_b: file.nu_b,
    })
}

pub fn presentation_to_json(
    pres: &ModulePresentation,
    declared: Option<(&ElementarySpec, u64, i64, i64)>,
) -> String {
    let bx = pres.bx();
    let relations = pres
        .relations()
        .iter()
        .map(|row| {
            if pres.generators() == 1 {
                RelationEntry::Single(row[0].to_records())
            } else {
                RelationEntry::PerGenerator(row.iter().map(|e| e.to_records()).collect())
            }
        })
        .collect();
    let file = PresentationFile {
        p: bx.p(),
        precision: bx.precision(),
        q_u: bx.unit(),
        deg_s: bx.deg_s(),
        deg_t: bx.deg_t(),
        generators: pres.generators(),
        relations,
        elementary: declared.map(|(s, _, _, _)| s.exponents().to_vec()),
        mu_a: declared.map(|(_, m, _, _)| m),
        nu_a: declared.map(|(_, _, a, _)| a),
        nu_b: declared.map(|(_, _, _, b)| b),
    };
    serde_json::to_string_pretty(&file).expect("presentation serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(p: u64, precision: u32, deg_s: u32, deg_t: u32) -> TruncationBox {
        TruncationBox::new(p, precision, deg_s, deg_t, 1).unwrap()
    }

    fn lambda_mod_p_power(p: u64, m: u32) -> ModulePresentation {
        let precision = 4.max(m + 2);
        let b = bx(p, precision, (precision + 3) * 9 + 1, 16);
        ModulePresentation::elementary(b, &ElementarySpec::new(vec![m]).unwrap()).unwrap()
    }

    #[test]
    fn smith_identity_and_diag() {
        let m = PadicMatrix::from_int_rows(3, 4, &[vec![1, 0], vec![0, 1]]).unwrap();
        let r = smith_exponents(&m);
        assert_eq!(r.valuations, vec![0, 0]);
        assert!(r.stable());
        assert_eq!(r.exponent(), 0);

        let m = PadicMatrix::from_int_rows(3, 4, &[vec![3, 0], vec![0, 9]]).unwrap();
        let r = smith_exponents(&m);
        assert_eq!(r.valuations, vec![1, 2]);
        assert!(r.stable());
        assert_eq!(r.exponent(), 3);
    }

    #[test]
    fn smith_handles_rank_deficiency() {
        // one relation on two columns: a free factor remains
        let m = PadicMatrix::from_int_rows(3, 4, &[vec![1, 0]]).unwrap();
        let r = smith_exponents(&m);
        assert_eq!(r.valuations, vec![0]);
        assert!(!r.stable());
        assert_eq!(r.exponent(), 4);
        // the zero matrix pins nothing
        let m = PadicMatrix::from_int_rows(3, 4, &[vec![0, 0]]).unwrap();
        let r = smith_exponents(&m);
        assert!(r.valuations.is_empty());
        assert_eq!(r.exponent(), 8);
    }

    #[test]
    fn smith_needs_row_and_column_moves() {
        // minimal valuation sits off the diagonal; divisors 3 and 27
        let m = PadicMatrix::from_int_rows(3, 5, &[vec![9, 3], vec![27, 18]]).unwrap();
        let r = smith_exponents(&m);
        assert_eq!(r.valuations, vec![1, 3]);
        assert!(r.stable());
        // a singular integer matrix leaves one column unpivoted
        let m = PadicMatrix::from_int_rows(3, 5, &[vec![9, 3], vec![27, 9]]).unwrap();
        let r = smith_exponents(&m);
        assert_eq!(r.valuations, vec![1]);
        assert!(!r.stable());
    }

    #[test]
    fn level_matrix_mod_p_at_level_zero() {
        let pres = lambda_mod_p_power(3, 1);
        let m = level_relation_matrix(&pres, 0).unwrap();
        assert_eq!(m.nrows(), 1);
        assert_eq!(m.ncols(), 1);
        assert_eq!(m.rows()[0][0], 3);
    }

    #[test]
    fn e_exponent_examples() {
        let pres = lambda_mod_p_power(3, 1);
        assert_eq!(e_exponent(&pres, 0).unwrap(), (1, true));
        assert_eq!(e_exponent(&pres, 1).unwrap(), (9, true));
        let pres = lambda_mod_p_power(3, 2);
        assert_eq!(e_exponent(&pres, 1).unwrap(), (18, true));
    }

    #[test]
    fn free_module_is_flagged_unstable() {
        let b = bx(3, 4, 6, 4);
        let pres = ModulePresentation::new(b, 1, vec![]).unwrap();
        let (e, stable) = e_exponent(&pres, 0).unwrap();
        assert!(!stable);
        // the value is the ceiling exponent of the higher-precision run
        assert_eq!(e, 6);
    }

    #[test]
    fn elementary_e_formula() {
        let spec = ElementarySpec::new(vec![1]).unwrap();
        assert_eq!(elementary_e(&spec, 3, 2).unwrap(), 81);
        let spec = ElementarySpec::new(vec![1, 2]).unwrap();
        assert_eq!(elementary_e(&spec, 3, 1).unwrap(), 27);
        assert!(ElementarySpec::new(vec![]).is_err());
        assert!(ElementarySpec::new(vec![1, 0]).is_err());
    }

    #[test]
    fn e_matches_formula_on_a_two_summand_spec() {
        let spec = ElementarySpec::new(vec![1, 2]).unwrap();
        let b = bx(3, 4, (4 + 3) * 3 + 1, 8);
        let pres = ModulePresentation::elementary(b, &spec).unwrap();
        let (e, stable) = e_exponent(&pres, 1).unwrap();
        assert!(stable);
        assert_eq!(e, elementary_e(&spec, 3, 1).unwrap());
    }

    #[test]
    fn direct_sum_adds_exponents() {
        let b = bx(3, 4, 36, 8);
        let x = ModulePresentation::elementary(b, &ElementarySpec::new(vec![1]).unwrap()).unwrap();
        let y = fixture_p_t_s(b).unwrap();
        let both = x.direct_sum(&y).unwrap();
        for n in [0u32, 1] {
            let (ex, sx) = e_exponent(&x, n).unwrap();
            let (ey, sy) = e_exponent(&y, n).unwrap();
            let (es, ss) = e_exponent(&both, n).unwrap();
            assert!(sx && sy && ss);
            assert_eq!(es, ex + ey);
        }
    }

    #[test]
    fn e_is_invariant_under_relation_order_and_unit_scaling() {
        let b = bx(3, 4, 36, 8);
        let pres = fixture_p_t_s(b).unwrap();
        let mut rels = pres.relations().to_vec();
        rels.reverse();
        let permuted = ModulePresentation::new(b, 1, rels).unwrap();
        // left-multiply one relation by the unit (1 + T)
        let unit = SkewElement::group_word(b, 1, 0);
        let scaled_rels: Vec<Vec<SkewElement>> = pres
            .relations()
            .iter()
            .enumerate()
            .map(|(k, row)| {
                if k == 1 {
                    row.iter().map(|e| unit.mul(e).unwrap()).collect()
                } else {
                    row.clone()
                }
            })
            .collect();
        let scaled = ModulePresentation::new(b, 1, scaled_rels).unwrap();
        for n in [0u32, 1] {
            let base = e_exponent(&pres, n).unwrap();
            assert_eq!(e_exponent(&permuted, n).unwrap(), base);
            assert_eq!(e_exponent(&scaled, n).unwrap(), base);
        }
    }

    #[test]
    fn finite_part_growth_of_p_t_fixture() {
        let b = bx(3, 4, 80, 8);
        let pres = fixture_p_t(b).unwrap();
        let growth = finite_part_growth(&pres, 2).unwrap();
        assert_eq!(growth.exponents, vec![1, 3, 9]);
        assert_eq!((growth.mu, growth.nu), (1, 0));
        assert!(growth.exact_fit);
        assert_eq!(growth.consistent_from, Some(0));
        assert!(growth.stable);
    }

    #[test]
    fn finite_part_growth_of_trivial_and_zero_modules() {
        let b = bx(3, 4, 80, 8);
        let pres = fixture_p_t_s(b).unwrap();
        let growth = finite_part_growth(&pres, 2).unwrap();
        assert_eq!(growth.exponents, vec![1, 1, 1]);
        assert_eq!((growth.mu, growth.nu), (0, 1));
        assert!(growth.stable);
        // the zero module: a single unit relation
        let one = SkewElement::one(b);
        let zero_mod = ModulePresentation::new(b, 1, vec![vec![one]]).unwrap();
        let growth = finite_part_growth(&zero_mod, 2).unwrap();
        assert_eq!(growth.exponents, vec![0, 0, 0]);
        assert_eq!((growth.mu, growth.nu), (0, 0));
    }

    #[test]
    fn bounds_report_examples() {
        let spec = ElementarySpec::new(vec![1]).unwrap();
        let b = bx(3, 4, 36, 8);
        // X = Lambda/3: tight bounds at (mu_A, nu_A, nu_B) = (0, 0, 0)
        let x = ModulePresentation::elementary(b, &spec).unwrap();
        let report = bounds_report(&x, &spec, 0, 0, 0, 1).unwrap();
        assert!(report.all_pass() && report.all_stable());
        assert_eq!(report.rows[0].e_n, 1);
        assert_eq!(report.rows[1].e_n, 9);
        assert_eq!(
            report.csv(),
            "n,e_n,lower,upper,stable,pass\n0,1,1,1,true,true\n1,9,9,9,true,true\n"
        );
        // X = Lambda/3 (+) Z/3 trivial: one extra constant
        let x2 = x.direct_sum(&fixture_p_t_s(b).unwrap()).unwrap();
        let report = bounds_report(&x2, &spec, 0, 1, 0, 1).unwrap();
        assert!(report.all_pass() && report.all_stable());
        assert_eq!(report.rows[0].e_n, 2);
        assert_eq!(report.rows[1].e_n, 10);
        // X = Lambda/3 (+) the (p, T) fixture
        let x3 = x.direct_sum(&fixture_p_t(b).unwrap()).unwrap();
        let report = bounds_report(&x3, &spec, 1, 0, 0, 1).unwrap();
        assert!(report.all_pass() && report.all_stable());
        assert_eq!(report.rows[0].e_n, 2);
        assert_eq!(report.rows[1].e_n, 12);
    }

    #[test]
    fn json_round_trip_single_generator() {
        let b = bx(3, 4, 36, 8);
        let pres = fixture_p_t(b).unwrap();
        let spec = ElementarySpec::new(vec![1]).unwrap();
        let json = presentation_to_json(&pres, Some((&spec, 1, 0, 0)));
        let input = growth_input_from_json(&json).unwrap();
        assert_eq!(input.presentation, pres);
        let (s, mu_a, nu_a, nu_b) = input.declared().unwrap();
        assert_eq!(s.exponents(), &[1]);
        assert_eq!((mu_a, nu_a, nu_b), (1, 0, 0));
    }

    #[test]
    fn json_round_trip_multi_generator() {
        let b = bx(3, 4, 36, 8);
        let x = ModulePresentation::elementary(b, &ElementarySpec::new(vec![1]).unwrap()).unwrap();
        let both = x.direct_sum(&fixture_p_t(b).unwrap()).unwrap();
        let json = presentation_to_json(&both, None);
        let input = growth_input_from_json(&json).unwrap();
        assert_eq!(input.presentation, both);
        assert!(input.declared().is_err());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            growth_input_from_json("{ not json"),
            Err(Error::Parse(_))
        ));
        // generator count mismatch inside a relation
        let bad = r#"{"p":3,"N":4,"q_u":1,"D_S":8,"D_T":4,"generators":2,
                      "relations":[[{"t":0,"s":0,"c":3}]]}"#;
        assert!(growth_input_from_json(bad).is_err());
    }

    #[test]
    fn undersized_boxes_are_rejected() {
        let b = bx(3, 4, 4, 4);
        let pres =
            ModulePresentation::elementary(b, &ElementarySpec::new(vec![1]).unwrap()).unwrap();
        assert!(matches!(
            level_relation_matrix(&pres, 1),
            Err(Error::Truncation(_))
        ));
    }
}
