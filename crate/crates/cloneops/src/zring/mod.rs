//! Exact arithmetic in tensor powers of the deformed ring
//! `A = Z<t,x> / (t^2 = q, tx = -xt, x^2 = 0)`.
//!
//! As a free abelian group, `A^{⊗n}` has basis `t_S x_T` indexed by pairs
//! of subsets `S, T ⊆ {1..n}`; the product of basis monomials is
//!
//! ```text
//! t_S x_T · t_U x_V = 0                                   if T ∩ V ≠ ∅,
//! t_S x_T · t_U x_V = (-1)^{|T ∩ U|} q^{|S ∩ U|} t_{S △ U} x_{T ∪ V}
//! ```
//!
//! Coefficients are arbitrary-precision integers so that the `q^{|S ∩ U|}`
//! growth under repeated multiplication never overflows silently; products
//! of machine-sized operands take a checked `i128` fast path.

mod checks;
mod parse;

pub use checks::{
    check_anticommutant_lemma, check_square_root_lemma, check_tau_identities,
    elements_squaring_to,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported tensor arity; subset masks must fit one machine word.
pub const MAX_ARITY: usize = 16;

/// A validated deformation parameter.
///
/// The classification of ring morphisms requires `q` to be a natural
/// number that is not a square, so squares are rejected at construction;
/// `q = 1` (the Sweedler integral Hopf ring) is admitted only through the
/// explicit [`Q::hopf_unit`] constructor, and `q = 0` never.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(u64);

impl Q {
    pub fn new(q: u64) -> Result<Q> {
        if q.sqrt().pow(2) == q {
            let reason = if q == 1 {
                "1 is a square; use Q::hopf_unit() to opt into hopf mode".to_string()
            } else {
                format!("{q} is a square")
            };
            return Err(Error::InvalidQ { q, reason });
        }
        Ok(Q(q))
    }

    /// The hopf-mode parameter `q = 1`.
    pub fn hopf_unit() -> Q {
        Q(1)
    }

    /// Accepts any non-square, plus `q = 1`; used when reading serialized
    /// data that may have been produced in hopf mode.
    pub fn parse(q: u64) -> Result<Q> {
        if q == 1 {
            Ok(Q::hopf_unit())
        } else {
            Q::new(q)
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_hopf(self) -> bool {
        self.0 == 1
    }
}

/// Tensor arity and deformation parameter shared by the elements of one
/// ring `A^{⊗n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Params {
    n: usize,
    q: Q,
}

impl Params {
    pub fn new(n: usize, q: Q) -> Result<Params> {
        if n == 0 || n > MAX_ARITY {
            return Err(Error::Invalid(format!(
                "tensor arity {n} out of range 1..={MAX_ARITY}"
            )));
        }
        Ok(Params { n, q })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn q(self) -> Q {
        self.q
    }

    /// Same parameter, different arity.
    pub fn with_n(self, n: usize) -> Result<Params> {
        Params::new(n, self.q)
    }
}

/// A basis monomial `t_S x_T`, with both subsets stored as bit masks over
/// positions `1..=n` (bit `i-1` set means `i` is in the subset).
///
/// The ordering is ascending in `(T, S)`, matching the canonical term
/// order used for display and iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    ts: u16,
    xs: u16,
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.xs, self.ts).cmp(&(other.xs, other.ts))
    }
}

impl Monomial {
    /// The unit monomial `t_∅ x_∅`.
    pub fn one() -> Monomial {
        Monomial { ts: 0, xs: 0 }
    }

    pub fn from_masks(ts: u16, xs: u16) -> Monomial {
        Monomial { ts, xs }
    }

    /// Builds `t_S x_T` from 1-based index lists.
    pub fn from_indices(t_idx: &[usize], x_idx: &[usize]) -> Result<Monomial> {
        let mut mono = Monomial::one();
        for &i in t_idx {
            mono.ts |= mask_of(i)?;
        }
        for &i in x_idx {
            mono.xs |= mask_of(i)?;
        }
        Ok(mono)
    }

    pub fn t_mask(self) -> u16 {
        self.ts
    }

    pub fn x_mask(self) -> u16 {
        self.xs
    }

    pub fn has_t(self, i: usize) -> bool {
        (1..=MAX_ARITY).contains(&i) && self.ts & (1 << (i - 1)) != 0
    }

    pub fn has_x(self, i: usize) -> bool {
        (1..=MAX_ARITY).contains(&i) && self.xs & (1 << (i - 1)) != 0
    }

    pub fn fits(self, n: usize) -> bool {
        let allowed = mask_up_to(n);
        self.ts & !allowed == 0 && self.xs & !allowed == 0
    }

    /// All monomials over positions `1..=n` in canonical `(T, S)` order.
    pub fn all(n: usize) -> Vec<Monomial> {
        let top = 1u32 << n;
        let mut out = Vec::with_capacity(1 << (2 * n));
        for xs in 0..top {
            for ts in 0..top {
                out.push(Monomial {
                    ts: ts as u16,
                    xs: xs as u16,
                });
            }
        }
        out
    }
}

fn mask_of(i: usize) -> Result<u16> {
    if i == 0 || i > MAX_ARITY {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: MAX_ARITY,
        });
    }
    Ok(1 << (i - 1))
}

fn mask_up_to(n: usize) -> u16 {
    if n >= 16 {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

/// An element of `A^{⊗n}`: a finite integer combination of basis
/// monomials.  No zero coefficients are stored, and two elements are equal
/// exactly when their `(q, n, terms)` agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawElem", into = "RawElem")]
pub struct RingElem {
    params: Params,
    terms: BTreeMap<Monomial, BigInt>,
}

#[derive(Serialize, Deserialize)]
struct RawElem {
    n: usize,
    q: u64,
    expr: String,
}

impl TryFrom<RawElem> for RingElem {
    type Error = Error;
    fn try_from(raw: RawElem) -> Result<Self> {
        let params = Params::new(raw.n, Q::parse(raw.q)?)?;
        RingElem::parse(params, &raw.expr)
    }
}

impl From<RingElem> for RawElem {
    fn from(e: RingElem) -> Self {
        RawElem {
            n: e.params.n(),
            q: e.params.q().get(),
            expr: e.to_string(),
        }
    }
}

impl RingElem {
    pub fn zero(params: Params) -> RingElem {
        RingElem {
            params,
            terms: BTreeMap::new(),
        }
    }

    /// The multiplicative unit `1 = t_∅ x_∅`.
    pub fn unit(params: Params) -> RingElem {
        RingElem::scalar(params, 1)
    }

    pub fn scalar(params: Params, c: impl Into<BigInt>) -> RingElem {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        RingElem { params, terms }
    }

    /// The generator `t_i = 1 ⊗ .. ⊗ t ⊗ .. ⊗ 1`.
    pub fn generator_t(params: Params, i: usize) -> Result<RingElem> {
        Self::check_index(params, i)?;
        RingElem::from_monomial(params, Monomial::from_masks(mask_of(i)?, 0), 1)
    }

    /// The generator `x_i = 1 ⊗ .. ⊗ x ⊗ .. ⊗ 1`.
    pub fn generator_x(params: Params, i: usize) -> Result<RingElem> {
        Self::check_index(params, i)?;
        RingElem::from_monomial(params, Monomial::from_masks(0, mask_of(i)?), 1)
    }

    fn check_index(params: Params, i: usize) -> Result<()> {
        if i == 0 || i > params.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: params.n(),
            });
        }
        Ok(())
    }

    pub fn from_monomial(
        params: Params,
        mono: Monomial,
        coeff: impl Into<BigInt>,
    ) -> Result<RingElem> {
        RingElem::from_terms(params, [(mono, coeff.into())])
    }

    pub fn from_terms(
        params: Params,
        terms: impl IntoIterator<Item = (Monomial, BigInt)>,
    ) -> Result<RingElem> {
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (mono, coeff) in terms {
            if !mono.fits(params.n()) {
                return Err(Error::Invalid(format!(
                    "monomial {mono} uses positions beyond arity {}",
                    params.n()
                )));
            }
            if coeff.is_zero() {
                continue;
            }
            let slot = map.entry(mono).or_insert_with(BigInt::zero);
            *slot += coeff;
            if slot.is_zero() {
                map.remove(&mono);
            }
        }
        Ok(RingElem {
            params,
            terms: map,
        })
    }

    pub fn from_i64_terms(params: Params, terms: &[(Monomial, i64)]) -> Result<RingElem> {
        RingElem::from_terms(params, terms.iter().map(|&(m, c)| (m, BigInt::from(c))))
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn q(&self) -> Q {
        self.params.q()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical ascending `(T, S)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coeff(&self, mono: &Monomial) -> BigInt {
        self.terms.get(mono).cloned().unwrap_or_else(BigInt::zero)
    }

    fn check_params(&self, other: &RingElem) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ParamMismatch(format!(
                "operands live in different rings: (n={}, q={}) vs (n={}, q={})",
                self.n(),
                self.q().get(),
                other.n(),
                other.q().get()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElem) -> Result<RingElem> {
        self.check_params(other)?;
        let mut terms = self.terms.clone();
        for (mono, coeff) in &other.terms {
            let slot = terms.entry(*mono).or_insert_with(BigInt::zero);
            *slot += coeff;
            if slot.is_zero() {
                terms.remove(mono);
            }
        }
        Ok(RingElem {
            params: self.params,
            terms,
        })
    }

    pub fn sub(&self, other: &RingElem) -> Result<RingElem> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RingElem {
        RingElem {
            params: self.params,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> RingElem {
        let k = k.into();
        if k.is_zero() {
            return RingElem::zero(self.params);
        }
        RingElem {
            params: self.params,
            terms: self.terms.iter().map(|(m, c)| (*m, c * &k)).collect(),
        }
    }

    /// The product in `A^{⊗n}`, extending the basis rule bilinearly.
    pub fn mul(&self, other: &RingElem) -> Result<RingElem> {
        self.check_params(other)?;
        if let Some(fast) = self.mul_fast(other) {
            return Ok(fast);
        }
        Ok(self.mul_big(other))
    }

    /// Checked machine-integer path; `None` when a coefficient does not
    /// fit or an intermediate value would overflow.
    fn mul_fast(&self, other: &RingElem) -> Option<RingElem> {
        let a = small_terms(&self.terms)?;
        let b = small_terms(&other.terms)?;
        let q = self.q().get() as u128;
        let n = self.n();
        if n <= 4 {
            let mut acc = [0i128; 256];
            for &(ma, ca) in &a {
                for &(mb, cb) in &b {
                    let (mono, neg, qpow) = mono_mul(ma, mb)?;
                    let contrib = small_contrib(ca, cb, neg, q, qpow)?;
                    let idx = ((mono.xs as usize) << n) | mono.ts as usize;
                    acc[idx] = acc[idx].checked_add(contrib)?;
                }
            }
            let mut terms = BTreeMap::new();
            for xs in 0..(1u16 << n) {
                for ts in 0..(1u16 << n) {
                    let idx = ((xs as usize) << n) | ts as usize;
                    if acc[idx] != 0 {
                        terms.insert(Monomial { ts, xs }, BigInt::from(acc[idx]));
                    }
                }
            }
            Some(RingElem {
                params: self.params,
                terms,
            })
        } else {
            let mut acc: BTreeMap<Monomial, i128> = BTreeMap::new();
            for &(ma, ca) in &a {
                for &(mb, cb) in &b {
                    let (mono, neg, qpow) = mono_mul(ma, mb)?;
                    let contrib = small_contrib(ca, cb, neg, q, qpow)?;
                    let slot = acc.entry(mono).or_insert(0);
                    *slot = slot.checked_add(contrib)?;
                }
            }
            let terms = acc
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|(m, c)| (m, BigInt::from(c)))
                .collect();
            Some(RingElem {
                params: self.params,
                terms,
            })
        }
    }

    fn mul_big(&self, other: &RingElem) -> RingElem {
        let q = BigInt::from(self.q().get());
        let mut powers = vec![BigInt::one()];
        for k in 1..=self.n() {
            let next = &powers[k - 1] * &q;
            powers.push(next);
        }
        let mut terms: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let Some((mono, neg, qpow)) = mono_mul(*ma, *mb) else {
                    continue;
                };
                let mut contrib = ca * cb * &powers[qpow as usize];
                if neg {
                    contrib = -contrib;
                }
                let slot = terms.entry(mono).or_insert_with(BigInt::zero);
                *slot += contrib;
                if slot.is_zero() {
                    terms.remove(&mono);
                }
            }
        }
        RingElem {
            params: self.params,
            terms,
        }
    }

    /// The ring twist `τ_d`: kills terms with `d ∈ T`, negates terms with
    /// `d ∈ S` and fixes the rest.  It is the unique ring morphism with
    /// `τ_d(t_d) = -t_d`, `τ_d(x_d) = 0` fixing the other generators, and
    /// mediates moving `x_d` across elements: `x_d a = τ_d(a) x_d`.
    pub fn tau(&self, d: usize) -> Result<RingElem> {
        Self::check_index(self.params, d)?;
        let bit = mask_of(d)?;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.xs & bit == 0)
            .map(|(m, c)| (*m, if m.ts & bit != 0 { -c } else { c.clone() }))
            .collect();
        Ok(RingElem {
            params: self.params,
            terms,
        })
    }

    /// Does `a^2 = q · 1` hold exactly?
    pub fn squares_to_q(&self) -> bool {
        let square = self.mul(self).expect("same parameters");
        square == RingElem::scalar(self.params, self.q().get())
    }

    /// Membership in the right ideal `A^{⊗n} x_d`: every stored term must
    /// contain `d` in its `x`-subset.  The zero element belongs to every
    /// ideal.
    pub fn in_ideal_x(&self, d: usize) -> Result<bool> {
        Self::check_index(self.params, d)?;
        let bit = mask_of(d)?;
        Ok(self.terms.keys().all(|m| m.xs & bit != 0))
    }

    /// Does `ab + ba = 0` hold exactly?
    pub fn anticommutes(&self, other: &RingElem) -> Result<bool> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        Ok(ab.add(&ba)?.is_zero())
    }

    /// Structural square-root test: returns `(sign, d)` when the element
    /// is exactly `±t_d + f·x_d` for some `f`, i.e. its only `x`-free term
    /// is `±t_d` and every other term contains `d` in its `x`-subset.
    pub fn sqrt_shape(&self) -> Option<(i8, usize)> {
        let mut head: Option<(i8, usize)> = None;
        for (mono, coeff) in &self.terms {
            if mono.xs != 0 {
                continue;
            }
            if head.is_some() || mono.ts.count_ones() != 1 {
                return None;
            }
            let d = mono.ts.trailing_zeros() as usize + 1;
            let sign = if *coeff == BigInt::one() {
                1
            } else if *coeff == -BigInt::one() {
                -1
            } else {
                return None;
            };
            head = Some((sign, d));
        }
        let (sign, d) = head?;
        let bit = 1u16 << (d - 1);
        for mono in self.terms.keys() {
            if mono.xs == 0 {
                continue;
            }
            if mono.xs & bit == 0 {
                return None;
            }
        }
        Some((sign, d))
    }

    /// The `x_d`-quotient: strips `d` from the `x`-subset of every term.
    /// Errors unless every term contains `d` there, i.e. unless the
    /// element lies in `A^{⊗n} x_d`.
    pub fn strip_x(&self, d: usize) -> Result<RingElem> {
        if !self.in_ideal_x(d)? {
            return Err(Error::Invalid(format!(
                "element is not a multiple of x_{d}"
            )));
        }
        let bit = mask_of(d)?;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial::from_masks(m.ts, m.xs & !bit), c.clone()))
            .collect();
        Ok(RingElem {
            params: self.params,
            terms,
        })
    }

    /// The part of the element supported on `x`-free monomials `t_S`.
    pub fn x_free_part(&self) -> RingElem {
        RingElem {
            params: self.params,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.xs == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Re-indexes the element into positions `offset+1 ..= offset+n` of a
    /// larger tensor power (the block embedding `A^{⊗n} -> A^{⊗N}`).
    pub fn embed_at(&self, offset: usize, target: Params) -> Result<RingElem> {
        if self.params.q() != target.q() {
            return Err(Error::ParamMismatch("embedding changes q".into()));
        }
        if offset + self.n() > target.n() {
            return Err(Error::ArityMismatch(format!(
                "block {}..{} does not fit arity {}",
                offset + 1,
                offset + self.n(),
                target.n()
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                (
                    Monomial::from_masks(m.ts << offset, m.xs << offset),
                    c.clone(),
                )
            })
            .collect();
        Ok(RingElem {
            params: target,
            terms,
        })
    }
}

/// Basis-rule product of two monomials: `None` when `T ∩ V ≠ ∅` (the
/// product vanishes), otherwise the target monomial, the sign and the
/// exponent of `q`.
fn mono_mul(a: Monomial, b: Monomial) -> Option<(Monomial, bool, u32)> {
    if a.xs & b.xs != 0 {
        return None;
    }
    let neg = (a.xs & b.ts).count_ones() % 2 == 1;
    let qpow = (a.ts & b.ts).count_ones();
    Some((
        Monomial {
            ts: a.ts ^ b.ts,
            xs: a.xs | b.xs,
        },
        neg,
        qpow,
    ))
}

fn small_terms(terms: &BTreeMap<Monomial, BigInt>) -> Option<Vec<(Monomial, i64)>> {
    terms
        .iter()
        .map(|(m, c)| c.to_i64().map(|c| (*m, c)))
        .collect()
}

fn small_contrib(ca: i64, cb: i64, neg: bool, q: u128, qpow: u32) -> Option<i128> {
    let qp = q.checked_pow(qpow)?;
    let qp = i128::try_from(qp).ok()?;
    let c = (ca as i128).checked_mul(cb as i128)?.checked_mul(qp)?;
    Some(if neg { c.checked_neg()? } else { c })
}

/// Samples an element with at most `max_terms` random monomials and
/// nonzero coefficients in `[-bound, bound]`.
pub fn random_elem(
    params: Params,
    rng: &mut impl rand::Rng,
    max_terms: usize,
    bound: i64,
) -> RingElem {
    let all = Monomial::all(params.n());
    let count = rng.gen_range(0..=max_terms);
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let mono = all[rng.gen_range(0..all.len())];
        let mut c = 0i64;
        while c == 0 {
            c = rng.gen_range(-bound..=bound);
        }
        terms.push((mono, c));
    }
    RingElem::from_i64_terms(params, &terms).expect("sampled monomials fit")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, q: u64) -> Params {
        Params::new(n, Q::parse(q).unwrap()).unwrap()
    }

    fn parse(n: usize, q: u64, s: &str) -> RingElem {
        RingElem::parse(params(n, q), s).unwrap()
    }

    #[test]
    fn q_validation() {
        assert!(Q::new(2).is_ok());
        assert!(Q::new(3).is_ok());
        assert!(Q::new(5).is_ok());
        assert!(Q::new(0).is_err());
        assert!(Q::new(1).is_err());
        assert!(Q::new(4).is_err());
        assert!(Q::new(9).is_err());
        assert!(Q::new(1 << 62).is_err());
        assert_eq!(Q::hopf_unit().get(), 1);
        assert!(Q::parse(1).is_ok());
        assert!(Q::parse(4).is_err());
    }

    #[test]
    fn params_validation() {
        let q = Q::new(2).unwrap();
        assert!(Params::new(0, q).is_err());
        assert!(Params::new(17, q).is_err());
        assert!(Params::new(16, q).is_ok());
    }

    #[test]
    fn defining_relations() {
        let p = params(1, 2);
        let t = RingElem::generator_t(p, 1).unwrap();
        let x = RingElem::generator_x(p, 1).unwrap();
        assert_eq!(t.mul(&t).unwrap(), RingElem::scalar(p, 2));
        assert!(x.mul(&x).unwrap().is_zero());
        // x·t = -t·x
        assert_eq!(x.mul(&t).unwrap(), t.mul(&x).unwrap().neg());
        assert_eq!(x.mul(&t).unwrap(), parse(1, 2, "-1*t{1}x{1}"));
    }

    #[test]
    fn mixed_index_product() {
        // t_{12} · t_2 x_1 = q t_1 x_1 at q = 2
        let a = parse(2, 2, "t{1,2}x{}");
        let b = parse(2, 2, "t{2}x{1}");
        assert_eq!(a.mul(&b).unwrap(), parse(2, 2, "2*t{1}x{1}"));
    }

    #[test]
    fn generators_commute_across_positions() {
        let p = params(2, 2);
        let t1 = RingElem::generator_t(p, 1).unwrap();
        let x2 = RingElem::generator_x(p, 2).unwrap();
        assert_eq!(t1.mul(&x2).unwrap(), x2.mul(&t1).unwrap());
    }

    #[test]
    fn tau_on_generators() {
        let p = params(2, 2);
        let t1 = RingElem::generator_t(p, 1).unwrap();
        let x1 = RingElem::generator_x(p, 1).unwrap();
        assert_eq!(t1.tau(1).unwrap(), t1.neg());
        assert!(x1.tau(1).unwrap().is_zero());
        let fixed = parse(2, 2, "t{2}x{2}");
        assert_eq!(fixed.tau(1).unwrap(), fixed);
        assert!(t1.tau(3).is_err());
    }

    #[test]
    fn squares_to_q_examples() {
        let p = params(1, 2);
        let t = RingElem::generator_t(p, 1).unwrap();
        let x = RingElem::generator_x(p, 1).unwrap();
        assert!(t.squares_to_q());
        assert!(t.add(&x).unwrap().squares_to_q());
        assert!(!RingElem::unit(p).squares_to_q());
    }

    #[test]
    fn ideal_membership() {
        let a = parse(1, 2, "t{1}x{1}");
        assert!(a.in_ideal_x(1).unwrap());
        let b = parse(1, 2, "t{1}x{}");
        assert!(!b.in_ideal_x(1).unwrap());
        assert!(RingElem::zero(params(1, 2)).in_ideal_x(1).unwrap());
    }

    #[test]
    fn anticommute_examples() {
        let p = params(1, 2);
        let t = RingElem::generator_t(p, 1).unwrap();
        let x = RingElem::generator_x(p, 1).unwrap();
        assert!(t.anticommutes(&x).unwrap());
        assert!(!t.anticommutes(&t).unwrap());
        // an instance of the anticommutant lemma with f = t_2
        let big = parse(2, 2, "t{1}x{} + t{2}x{1}");
        let x1 = RingElem::generator_x(params(2, 2), 1).unwrap();
        assert!(big.anticommutes(&x1).unwrap());
    }

    #[test]
    fn module_ops() {
        let p = params(2, 2);
        let t1 = RingElem::generator_t(p, 1).unwrap();
        assert!(t1.add(&t1.neg()).unwrap().is_zero());
        assert!(t1.scale(0).is_zero());
        assert_eq!(
            RingElem::generator_t(p, 2).unwrap(),
            parse(2, 2, "t{2}x{}")
        );
        assert!(RingElem::generator_t(p, 3).is_err());
        let other = params(3, 2);
        assert!(t1.add(&RingElem::unit(other)).is_err());
    }

    #[test]
    fn sqrt_shape_detection() {
        assert_eq!(parse(1, 2, "t{1}x{}").sqrt_shape(), Some((1, 1)));
        assert_eq!(
            parse(2, 2, "-1*t{2}x{} + t{1}x{2} - 2*t{}x{1,2}").sqrt_shape(),
            Some((-1, 2))
        );
        assert_eq!(parse(1, 2, "1").sqrt_shape(), None);
        assert_eq!(parse(1, 2, "2*t{1}x{}").sqrt_shape(), None);
        // stray term without d in its x-subset
        assert_eq!(parse(2, 2, "t{1}x{} + t{}x{2}").sqrt_shape(), None);
        assert_eq!(parse(2, 2, "t{1}x{} + t{1,2}x{}").sqrt_shape(), None);
    }

    #[test]
    fn strip_and_embed() {
        let a = parse(2, 2, "t{1}x{1,2} - 3*t{}x{1}");
        assert_eq!(a.strip_x(1).unwrap(), parse(2, 2, "-3 + t{1}x{2}"));
        assert!(a.strip_x(2).is_err());

        let small = parse(1, 2, "t{1}x{1}");
        let p3 = params(3, 2);
        assert_eq!(
            small.embed_at(1, p3).unwrap(),
            RingElem::parse(p3, "t{2}x{2}").unwrap()
        );
        assert!(small.embed_at(3, p3).is_err());
    }

    #[test]
    fn scalar_part_of_square_is_local() {
        // the unit coefficient of a^2 only depends on the x-free part of a;
        // this fact backs the branch pruning in the exhaustive scans.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            let p = params(n, 2);
            for _ in 0..200 {
                let a = random_elem(p, &mut rng, 6, 3);
                let full = a.mul(&a).unwrap().coeff(&Monomial::one());
                let free = a.x_free_part();
                let reduced = free.mul(&free).unwrap().coeff(&Monomial::one());
                assert_eq!(full, reduced);
            }
        }
    }

    #[test]
    fn huge_q_powers_fall_back_exactly() {
        // q^3 for this q exceeds i128, forcing the BigInt path mid-product
        let q = (1u64 << 62) + 1;
        let p = Params::new(3, Q::new(q).unwrap()).unwrap();
        let t123 = RingElem::parse(p, "t{1,2,3}x{}").unwrap();
        let sq = t123.mul(&t123).unwrap();
        let expected = BigInt::from(q).pow(3);
        assert_eq!(sq, RingElem::scalar(p, expected));
    }

    #[test]
    fn big_coefficients_fall_back_exactly() {
        let p = params(2, 3);
        let huge = BigInt::from(i64::MAX) * BigInt::from(i64::MAX);
        let a = RingElem::from_terms(
            p,
            [
                (Monomial::from_indices(&[1], &[]).unwrap(), huge.clone()),
                (Monomial::from_indices(&[], &[2]).unwrap(), BigInt::from(7)),
            ],
        )
        .unwrap();
        let sq = a.mul(&a).unwrap();
        // (h t_1 + 7 x_2)^2 = 3 h^2 + 14 h t_1 x_2
        assert_eq!(sq.coeff(&Monomial::one()), &huge * &huge * 3);
        assert_eq!(
            sq.coeff(&Monomial::from_indices(&[1], &[2]).unwrap()),
            &huge * 14
        );
        assert_eq!(sq.num_terms(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_elem(n: usize, q: u64) -> impl Strategy<Value = RingElem> {
            let monos = Monomial::all(n);
            proptest::collection::vec(
                (0..monos.len(), -3i64..=3),
                0..=4,
            )
            .prop_map(move |picks| {
                let terms: Vec<(Monomial, i64)> =
                    picks.into_iter().map(|(i, c)| (monos[i], c)).collect();
                RingElem::from_i64_terms(params(n, q), &terms).unwrap()
            })
        }

        proptest! {
            #[test]
            fn mul_is_associative(
                a in arb_elem(3, 2), b in arb_elem(3, 2), c in arb_elem(3, 2)
            ) {
                let lhs = a.mul(&b.mul(&c).unwrap()).unwrap();
                let rhs = a.mul(&b).unwrap().mul(&c).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn mul_distributes(
                a in arb_elem(3, 5), b in arb_elem(3, 5), c in arb_elem(3, 5)
            ) {
                let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
                let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn unit_laws(a in arb_elem(3, 2)) {
                let one = RingElem::unit(a.params());
                prop_assert_eq!(&one.mul(&a).unwrap(), &a);
                prop_assert_eq!(&a.mul(&one).unwrap(), &a);
            }

            #[test]
            fn tau_moves_x_across(a in arb_elem(3, 3), d in 1usize..=3) {
                let p = a.params();
                let x = RingElem::generator_x(p, d).unwrap();
                let t = RingElem::generator_t(p, d).unwrap();
                // x_d a = τ_d(a) x_d
                prop_assert_eq!(
                    x.mul(&a).unwrap(),
                    a.tau(d).unwrap().mul(&x).unwrap()
                );
                // t_d τ_d(a) = τ_d(a) t_d
                prop_assert_eq!(
                    t.mul(&a.tau(d).unwrap()).unwrap(),
                    a.tau(d).unwrap().mul(&t).unwrap()
                );
            }

            #[test]
            fn tau_squared_kills_x_terms(a in arb_elem(3, 2), d in 1usize..=3) {
                // τ_d ∘ τ_d drops every term with d in its x-subset and
                // fixes the rest; on elements with no such term it is an
                // involution acting as the identity.
                let twice = a.tau(d).unwrap().tau(d).unwrap();
                let bit = 1u16 << (d - 1);
                let projected = RingElem::from_terms(
                    a.params(),
                    a.terms()
                        .filter(|(m, _)| m.x_mask() & bit == 0)
                        .map(|(m, c)| (*m, c.clone())),
                ).unwrap();
                prop_assert_eq!(twice, projected);
            }
        }
    }
}
