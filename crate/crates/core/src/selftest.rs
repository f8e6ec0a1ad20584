//! The seeded property suite over the skew ring: associativity under
//! guard truncation, the defining group relation, two-sidedness witnesses
//! for the omega elements, the reduction round trip, and the power
//! rewrite modulo omega_2.  Deterministic for a fixed seed.

use crate::error::{Error, Result};
use crate::padic::checked_pow;
use crate::rng::SplitMix64;
use crate::skew::{SkewElement, SkewVar, TruncationBox};

#[derive(Debug, Clone)]
pub struct SelftestConfig {
    pub p: u64,
    pub u: u64,
    pub precision: u32,
    pub deg_s: u32,
    pub deg_t: u32,
    pub trials: u32,
    pub seed: u64,
    /// Testing hook: perturb every product so the harness provably fails.
    pub corrupt_mul: bool,
}

impl SelftestConfig {
    pub fn new(p: u64, u: u64, precision: u32, deg_s: u32, deg_t: u32) -> Self {
        SelftestConfig {
            p,
            u,
            precision,
            deg_s,
            deg_t,
            trials: 100,
            seed: 42,
            corrupt_mul: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Run the five properties and report one outcome per property.
pub fn run_selftest(cfg: &SelftestConfig) -> Result<Vec<PropertyOutcome>> {
    let bx = TruncationBox::new(cfg.p, cfg.precision, cfg.deg_s, cfg.deg_t, cfg.u)?;
    if checked_pow(cfg.p, 2)? >= cfg.deg_s as u64 {
        return Err(Error::InvalidParameter(
            "the suite needs p^2 < D_S so omega_2 fits in the box".into(),
        ));
    }
    let mut rng = SplitMix64::new(cfg.seed);
    Ok(vec![
        associativity(cfg, &mut rng)?,
        group_relation(cfg, bx)?,
        omega_two_sided(cfg, bx)?,
        reduce_round_trip(cfg, bx, &mut rng)?,
        power_rewrite(cfg, bx)?,
    ])
}

fn hooked_mul(cfg: &SelftestConfig, a: &SkewElement, b: &SkewElement) -> Result<SkewElement> {
    let prod = a.mul(b)?;
    if cfg.corrupt_mul {
        prod.add(&SkewElement::one(a.bx()))
    } else {
        Ok(prod)
    }
}

fn random_element(
    bx: TruncationBox,
    rng: &mut SplitMix64,
    max_t: u32,
    max_s: u32,
    terms: u32,
) -> Result<SkewElement> {
    let modulus = bx.modulus();
    let mut acc = SkewElement::zero(bx);
    for _ in 0..terms {
        let j = rng.below(max_t as u64 + 1) as u32;
        let i = rng.below(max_s as u64 + 1) as u32;
        let c = rng.below(modulus) as i128;
        acc = acc.add(&SkewElement::monomial(bx, j, i, c)?)?;
    }
    Ok(acc)
}

/// mul(mul(a,b),c) = mul(a,mul(b,c)) after truncation to the public box,
/// for triples whose T-supports keep the exact product inside a doubled
/// guard box.
fn associativity(cfg: &SelftestConfig, rng: &mut SplitMix64) -> Result<PropertyOutcome> {
    let public = TruncationBox::new(cfg.p, cfg.precision, cfg.deg_s, cfg.deg_t, cfg.u)?;
    let guard = public.resized(cfg.precision, cfg.deg_s * 2, cfg.deg_t * 2)?;
    let max_t = (2 * cfg.deg_t - 2) / 3;
    let max_s = cfg.deg_s - 1;
    let mut failures = 0u32;
    for _ in 0..cfg.trials {
        let a = random_element(guard, rng, max_t, max_s, 4)?;
        let b = random_element(guard, rng, max_t, max_s, 4)?;
        let c = random_element(guard, rng, max_t, max_s, 4)?;
        let left = hooked_mul(cfg, &hooked_mul(cfg, &a, &b)?, &c)?.truncate_to(public)?;
        let right = hooked_mul(cfg, &a, &hooked_mul(cfg, &b, &c)?)?.truncate_to(public)?;
        if left != right {
            failures += 1;
        }
    }
    Ok(PropertyOutcome {
        name: "associativity",
        pass: failures == 0,
        detail: format!("{failures}/{} failing triples (seed {})", cfg.trials, cfg.seed),
    })
}

/// (1+S)(1+T) = (1+T)(1+S)^q exactly inside the box.
fn group_relation(cfg: &SelftestConfig, bx: TruncationBox) -> Result<PropertyOutcome> {
    let one_s = SkewElement::group_word(bx, 0, 1);
    let one_t = SkewElement::group_word(bx, 1, 0);
    let lhs = hooked_mul(cfg, &one_s, &one_t)?;
    let rhs = hooked_mul(cfg, &one_t, &SkewElement::group_word(bx, 0, bx.q()))?;
    let pass = lhs == rhs;
    Ok(PropertyOutcome {
        name: "group_relation",
        pass,
        detail: format!("q = {}", bx.q()),
    })
}

/// omega_m generates a two-sided ideal: for g in {S, T, 1+T} there is a
/// g' with omega_m g = g' omega_m.  The witness comes from
/// sigma^{-1}(omega_m) = omega_m * W with W = sum of (1+S)^{t p^m} over
/// t < q.
fn omega_two_sided(cfg: &SelftestConfig, bx: TruncationBox) -> Result<PropertyOutcome> {
    let mut detail = String::new();
    let mut pass = true;
    for m in 1..=2u32 {
        let om = SkewElement::omega(bx, m, SkewVar::S)?;
        let pm = checked_pow(bx.p(), m)?;
        let mut witness = SkewElement::zero(bx);
        for t in 0..bx.q() {
            witness = witness.add(&SkewElement::group_word(bx, 0, t * pm))?;
        }
        let one_t = SkewElement::group_word(bx, 1, 0);
        let t_var = SkewElement::var_t(bx)?;
        let s_var = SkewElement::var_s(bx)?;
        let gt_prime = hooked_mul(cfg, &one_t, &witness)?;
        let cases: [(&str, &SkewElement, SkewElement); 3] = [
            ("S", &s_var, s_var.clone()),
            ("1+T", &one_t, gt_prime.clone()),
            ("T", &t_var, gt_prime.sub(&SkewElement::one(bx))?),
        ];
        for (label, g, g_prime) in cases {
            let lhs = hooked_mul(cfg, &om, g)?;
            let rhs = hooked_mul(cfg, &g_prime, &om)?;
            if lhs != rhs {
                pass = false;
                detail.push_str(&format!("m={m} g={label} mismatch; "));
            }
        }
    }
    if detail.is_empty() {
        detail = "witnesses for omega_1, omega_2 over {S, T, 1+T}".into();
    }
    Ok(PropertyOutcome {
        name: "omega_two_sided",
        pass,
        detail,
    })
}

/// r minus the lift of its reduction is a left multiple of omega_m: its
/// own reduction must vanish identically.
fn reduce_round_trip(
    cfg: &SelftestConfig,
    bx: TruncationBox,
    rng: &mut SplitMix64,
) -> Result<PropertyOutcome> {
    let mut failures = 0u32;
    for _ in 0..cfg.trials {
        let r = random_element(bx, rng, bx.deg_t() - 1, bx.deg_s() - 1, 6)?;
        for m in 1..=2u32 {
            let residual = r.sub(&r.reduce_mod_omega_s(m)?.lift())?;
            if !residual.reduce_mod_omega_s(m)?.is_zero() {
                failures += 1;
            }
        }
    }
    Ok(PropertyOutcome {
        name: "reduce_round_trip",
        pass: failures == 0,
        detail: format!("{failures} failing residuals over {} trials", cfg.trials),
    })
}

/// (1+S)^{p^2-1} (1+T) = (1+T)(1+S)^{(p^2-1) q mod p^2} modulo omega_2;
/// at p = 3, q = 4 this is the rewrite of S-power 8 to 5.
fn power_rewrite(cfg: &SelftestConfig, bx: TruncationBox) -> Result<PropertyOutcome> {
    let p2 = checked_pow(bx.p(), 2)?;
    let a = p2 - 1;
    let target = (a * bx.q()) % p2;
    let one_t = SkewElement::group_word(bx, 1, 0);
    let lhs = hooked_mul(cfg, &SkewElement::group_word(bx, 0, a), &one_t)?
        .reduce_mod_omega_s(2)?;
    let rhs = hooked_mul(cfg, &one_t, &SkewElement::group_word(bx, 0, target))?
        .reduce_mod_omega_s(2)?;
    Ok(PropertyOutcome {
        name: "power_rewrite_mod_omega2",
        pass: lhs == rhs,
        detail: format!("(1+S)^{a}(1+T) = (1+T)(1+S)^{target} mod omega_2"),
    })
}

/// Exhaustive injectivity check for multiplication by omega_1 modulo p:
/// over every f supported on T-degrees < max_t and S-degrees < max_s with
/// mod-p coefficients, omega_1 f = 0 in a guard box only for f = 0.
/// Returns the number of nonzero f that multiply to zero (so 0 means the
/// check passed).
pub fn omega_injectivity_exhaustive(p: u64, u: u64, max_s: u32, max_t: u32) -> Result<u64> {
    if max_s == 0 || max_t == 0 {
        return Err(Error::InvalidParameter("support bounds must be >= 1".into()));
    }
    let q = 1 + p * u;
    // sigma^{-1} raises S-degrees by a factor up to q per T-rewrite
    let deg_s64 = checked_pow(q, max_t - 1)? * p + max_s as u64 + 2;
    let deg_s = u32::try_from(deg_s64)
        .map_err(|_| Error::InvalidParameter("guard box degree overflows".into()))?;
    let bx = TruncationBox::new(p, 1, deg_s, max_t + 1, u)?;
    let om = SkewElement::omega(bx, 1, SkewVar::S)?;
    let cells = max_s * max_t;
    let total = checked_pow(p, cells)?;
    let mut bad = 0u64;
    for code in 1..total {
        let mut rest = code;
        let mut terms = Vec::with_capacity(cells as usize);
        for j in 0..max_t {
            for i in 0..max_s {
                let c = rest % p;
                rest /= p;
                if c != 0 {
                    terms.push((j, i, c as i128));
                }
            }
        }
        let f = SkewElement::from_terms(bx, &terms)?;
        if om.mul(&f)?.is_zero() {
            bad += 1;
        }
    }
    Ok(bad)
}
