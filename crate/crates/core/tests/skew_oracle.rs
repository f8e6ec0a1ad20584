//! Cross-check of the canonical-form multiplication against an oracle
//! that works in the group-element basis (1+T)^a (1+S)^b, where the
//! product rule is pure exponent bookkeeping:
//!
//!     (1+S)^b (1+T)^a  =  (1+T)^a (1+S)^{b q^a}
//!
//! with exact integer exponents.  The oracle never touches the sigma
//! substitution series or the T-rewrite, so agreement exercises a fully
//! independent path through the algebra.

use iwasawa_core::rng::SplitMix64;
use iwasawa_core::{SkewElement, TruncationBox};
use std::collections::BTreeMap;

/// A finite Z-linear combination of group words, keyed by the exponent
/// pair (a, b) of (1+T)^a (1+S)^b.
#[derive(Debug, Clone, PartialEq, Eq)]
struct GroupCombo {
    terms: BTreeMap<(u64, u64), i128>,
}

impl GroupCombo {
    fn zero() -> Self {
        GroupCombo {
            terms: BTreeMap::new(),
        }
    }

    fn insert(&mut self, key: (u64, u64), coeff: i128) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(key).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.remove(&key);
        }
    }

    fn mul(&self, other: &Self, q: u64) -> Self {
        let mut out = GroupCombo::zero();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &other.terms {
                // move (1+S)^{b1} across (1+T)^{a2}
                let shift = q.checked_pow(a2 as u32).expect("oracle exponent fits");
                let b = b1.checked_mul(shift).and_then(|x| x.checked_add(b2)).expect("fits");
                out.insert((a1 + a2, b), c1.checked_mul(c2).expect("fits"));
            }
        }
        out
    }
}

fn binom_i128(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for t in 0..k {
        acc = acc.checked_mul((n - t) as i128).expect("fits");
        acc /= (t + 1) as i128;
    }
    acc
}

/// T^j S^i = ((1+T) - 1)^j ((1+S) - 1)^i expanded over group words.
fn monomial_to_combo(j: u64, i: u64) -> GroupCombo {
    let mut out = GroupCombo::zero();
    for a in 0..=j {
        for b in 0..=i {
            let sign = if (j - a + i - b) % 2 == 0 { 1 } else { -1 };
            out.insert((a, b), sign * binom_i128(j, a) * binom_i128(i, b));
        }
    }
    out
}

fn element_to_combo(x: &SkewElement) -> GroupCombo {
    let mut out = GroupCombo::zero();
    for (j, i, c) in x.support() {
        let m = monomial_to_combo(j as u64, i as u64);
        for (&key, &coeff) in &m.terms {
            out.insert(key, coeff * c as i128);
        }
    }
    out
}

fn combo_to_element(combo: &GroupCombo, bx: TruncationBox) -> SkewElement {
    let mut acc = SkewElement::zero(bx);
    for (&(a, b), &c) in &combo.terms {
        let word = SkewElement::group_word(bx, a, b).scalar_mul(c);
        acc = acc.add(&word).expect("same box");
    }
    acc
}

fn random_element(bx: TruncationBox, rng: &mut SplitMix64, terms: u32) -> SkewElement {
    let mut acc = SkewElement::zero(bx);
    for _ in 0..terms {
        let j = rng.below(bx.deg_t() as u64) as u32;
        let i = rng.below(bx.deg_s() as u64) as u32;
        let c = rng.below(bx.modulus()) as i128;
        acc = acc
            .add(&SkewElement::monomial(bx, j, i, c).unwrap())
            .unwrap();
    }
    acc
}

#[test]
fn mul_matches_group_basis_oracle() {
    for (p, u, deg_s, deg_t) in [(3u64, 1u64, 10u32, 4u32), (3, 2, 8, 3), (5, 1, 12, 3)] {
        let bx = TruncationBox::new(p, 2, deg_s, deg_t, u).unwrap();
        let mut rng = SplitMix64::new(2024 + p + u);
        for _ in 0..40 {
            let x = random_element(bx, &mut rng, 3);
            let y = random_element(bx, &mut rng, 3);
            let direct = x.mul(&y).unwrap();
            let oracle = combo_to_element(
                &element_to_combo(&x).mul(&element_to_combo(&y), bx.q()),
                bx,
            );
            assert_eq!(direct, oracle, "p={p} u={u} x={x} y={y}");
        }
    }
}

#[test]
fn oracle_confirms_the_pinned_st_product() {
    // S T = T S + T S^3 + S^3 at p = 3, N = 1, q = 4, D_S = 4
    let bx = TruncationBox::new(3, 1, 4, 3, 1).unwrap();
    let s = SkewElement::var_s(bx).unwrap();
    let t = SkewElement::var_t(bx).unwrap();
    let oracle = combo_to_element(&element_to_combo(&s).mul(&element_to_combo(&t), 4), bx);
    assert_eq!(s.mul(&t).unwrap(), oracle);
    let want = SkewElement::from_terms(bx, &[(1, 1, 1), (1, 3, 1), (0, 3, 1)]).unwrap();
    assert_eq!(oracle, want);
}

#[test]
fn sigma_matches_conjugation_by_the_t_generator() {
    // sigma(F) is (1+T) F (1+T)^{-1}; equivalently (1+T) F = sigma(F) (1+T),
    // which the oracle can check with exact exponents.
    let bx = TruncationBox::new(3, 2, 10, 4, 1).unwrap();
    let mut rng = SplitMix64::new(7);
    let one_t = SkewElement::group_word(bx, 1, 0);
    for _ in 0..25 {
        let mut f = SkewElement::zero(bx);
        for _ in 0..3 {
            let i = rng.below(bx.deg_s() as u64) as u32;
            let c = rng.below(bx.modulus()) as i128;
            f = f.add(&SkewElement::monomial(bx, 0, i, c).unwrap()).unwrap();
        }
        let lhs = one_t.mul(&f).unwrap();
        let rhs = f.sigma_apply().unwrap().mul(&one_t).unwrap();
        assert_eq!(lhs, rhs, "f = {f}");
    }
}
