//! Ring morphisms `A -> A^{⊗n}` out of the deformed ring, their canonical
//! classification `t -> ±t_d + f·x_d, x -> g·x_d`, the clone substitution
//! on them, and brute-force enumeration oracles over bounded coefficient
//! boxes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::clone_core::{AbstractClone, CartesianOperad};
use crate::error::{Error, Result};
use crate::fincard::Selection;
use crate::report::CheckReport;
use crate::zring::{elements_squaring_to, Monomial, Params, Q, RingElem};

/// A candidate ring morphism `A -> A^{⊗n}`, determined by the images of
/// the generators `t` and `x`.  The image of `1` is the unit and the image
/// of `tx` is always derived as `img_t · img_x`, never stored.
///
/// The type deliberately admits non-morphisms (the enumeration oracle and
/// hopf mode need them); [`GenImages::is_ring_morphism`] decides.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGenImages", into = "RawGenImages")]
pub struct GenImages {
    params: Params,
    img_t: RingElem,
    img_x: RingElem,
}

#[derive(Serialize, Deserialize)]
struct RawGenImages {
    q: u64,
    n: usize,
    t: String,
    x: String,
}

impl TryFrom<RawGenImages> for GenImages {
    type Error = Error;
    fn try_from(raw: RawGenImages) -> Result<Self> {
        let params = Params::new(raw.n, Q::parse(raw.q)?)?;
        GenImages::new(
            RingElem::parse(params, &raw.t)?,
            RingElem::parse(params, &raw.x)?,
        )
    }
}

impl From<GenImages> for RawGenImages {
    fn from(m: GenImages) -> Self {
        RawGenImages {
            q: m.params.q().get(),
            n: m.params.n(),
            t: m.img_t.to_string(),
            x: m.img_x.to_string(),
        }
    }
}

impl GenImages {
    pub fn new(img_t: RingElem, img_x: RingElem) -> Result<GenImages> {
        if img_t.params() != img_x.params() {
            return Err(Error::ParamMismatch(
                "generator images live in different rings".into(),
            ));
        }
        Ok(GenImages {
            params: img_t.params(),
            img_t,
            img_x,
        })
    }

    /// The `i`-th tensor insertion `a -> 1 ⊗ .. ⊗ a ⊗ .. ⊗ 1`.
    pub fn projection(params: Params, i: usize) -> Result<GenImages> {
        GenImages::new(
            RingElem::generator_t(params, i)?,
            RingElem::generator_x(params, i)?,
        )
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

    pub fn img_t(&self) -> &RingElem {
        &self.img_t
    }

    pub fn img_x(&self) -> &RingElem {
        &self.img_x
    }

    /// The derived image of `tx`.
    pub fn img_tx(&self) -> RingElem {
        self.img_t.mul(&self.img_x).expect("same ring")
    }

    /// Do the generator images satisfy the defining relations
    /// `t^2 = q`, `x^2 = 0`, `tx + xt = 0`?
    pub fn is_ring_morphism(&self) -> bool {
        let q_unit = RingElem::scalar(self.params, self.params.q().get());
        if self.img_t.mul(&self.img_t).expect("same ring") != q_unit {
            return false;
        }
        if !self.img_x.mul(&self.img_x).expect("same ring").is_zero() {
            return false;
        }
        self.img_t.anticommutes(&self.img_x).expect("same ring")
    }

    /// Linear extension to all of `A` on the basis `{1, t, x, tx}`.
    pub fn apply(&self, a: &RingElem) -> Result<RingElem> {
        tensor_contract(std::slice::from_ref(self), a)
    }

    /// Extracts the canonical form `(sign, d, f, g)` with
    /// `t -> sign·t_d + f·x_d` and `x -> g·x_d`.
    ///
    /// Fails with [`Error::NotClassifiable`] when the images do not have
    /// this shape — the input is not a ring morphism, or the deformation
    /// parameter is a square (hopf mode), where the classification
    /// genuinely breaks down.
    pub fn to_canonical(&self) -> Result<CanonicalForm> {
        let (sign, d) = self.img_t.sqrt_shape().ok_or_else(|| {
            Error::NotClassifiable(format!(
                "t-image {} is not of the form ±t_d + f·x_d",
                self.img_t
            ))
        })?;
        let head = RingElem::generator_t(self.params, d)?.scale(sign as i64);
        let f = self.img_t.sub(&head)?.strip_x(d)?;
        let g = self.img_x.strip_x(d).map_err(|_| {
            Error::NotClassifiable(format!(
                "x-image {} is not a multiple of x_{d}",
                self.img_x
            ))
        })?;
        CanonicalForm::new(sign, d, f, g)
    }
}

/// The structural form of a ring morphism `A -> A^{⊗n}`:
/// `t -> sign·t_d + f·x_d`, `x -> g·x_d`, hence `tx -> sign·g·t_d x_d`.
///
/// `f` and `g` are canonical representatives containing no term with `d`
/// in its x-subset (such terms are annihilated by right multiplication
/// with `x_d`, so a normal form is needed for equality testing).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "RawCanonicalForm")]
pub struct CanonicalForm {
    sign: i8,
    d: usize,
    f: RingElem,
    g: RingElem,
}

#[derive(Serialize)]
struct RawCanonicalForm {
    sign: i8,
    d: usize,
    f: String,
    g: String,
}

impl From<CanonicalForm> for RawCanonicalForm {
    fn from(c: CanonicalForm) -> Self {
        RawCanonicalForm {
            sign: c.sign,
            d: c.d,
            f: c.f.to_string(),
            g: c.g.to_string(),
        }
    }
}

impl CanonicalForm {
    pub fn new(sign: i8, d: usize, f: RingElem, g: RingElem) -> Result<CanonicalForm> {
        if sign != 1 && sign != -1 {
            return Err(Error::Invalid(format!("sign must be ±1, got {sign}")));
        }
        if f.params() != g.params() {
            return Err(Error::ParamMismatch(
                "f and g live in different rings".into(),
            ));
        }
        if d == 0 || d > f.params().n() {
            return Err(Error::IndexOutOfRange {
                index: d,
                max: f.params().n(),
            });
        }
        for part in [&f, &g] {
            if part.terms().any(|(m, _)| m.has_x(d)) {
                return Err(Error::Invalid(format!(
                    "canonical representative {part} has a term with x_{d}"
                )));
            }
        }
        Ok(CanonicalForm { sign, d, f, g })
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn f(&self) -> &RingElem {
        &self.f
    }

    pub fn g(&self) -> &RingElem {
        &self.g
    }

    pub fn params(&self) -> Params {
        self.f.params()
    }

    /// Builds the morphism `t -> sign·t_d + f·x_d`, `x -> g·x_d`.  The
    /// result satisfies the ring relations for every `f` and `g`.
    pub fn to_gen_images(&self) -> GenImages {
        let params = self.params();
        let x_d = RingElem::generator_x(params, self.d).expect("d in range");
        let t_d = RingElem::generator_t(params, self.d).expect("d in range");
        let img_t = t_d
            .scale(self.sign as i64)
            .add(&self.f.mul(&x_d).expect("same ring"))
            .expect("same ring");
        let img_x = self.g.mul(&x_d).expect("same ring");
        GenImages::new(img_t, img_x).expect("same ring")
    }
}

/// [`CanonicalForm::to_gen_images`] as a free function, mirroring
/// [`GenImages::to_canonical`].
pub fn from_canonical(c: &CanonicalForm) -> GenImages {
    c.to_gen_images()
}

/// The linear map `μ^{m-1} ∘ (ψ_1 ⊗ .. ⊗ ψ_m) : A^{⊗m} -> A^{⊗n}`.
///
/// A basis monomial `t_S x_T` factors as the elementary tensor whose
/// `i`-th component is `t^{[i∈S]} x^{[i∈T]}`; each component is replaced
/// by its image under `ψ_i` and the `m` results are multiplied left to
/// right in `A^{⊗n}`.  This intermediate of the substitution product is
/// exposed so the composition lemmas can be checked on it directly.
pub fn tensor_contract(psis: &[GenImages], h: &RingElem) -> Result<RingElem> {
    let m = psis.len();
    if h.n() != m {
        return Err(Error::ArityMismatch(format!(
            "contracting an element of arity {} through {} morphisms",
            h.n(),
            m
        )));
    }
    let params = psis[0].params();
    for psi in psis {
        if psi.params() != params {
            return Err(Error::ParamMismatch(
                "tensor factors live in different rings".into(),
            ));
        }
    }
    if params.q() != h.q() {
        return Err(Error::ParamMismatch(
            "deformation parameters disagree".into(),
        ));
    }
    let mut acc = RingElem::zero(params);
    for (mono, coeff) in h.terms() {
        let mut prod = RingElem::unit(params);
        for (i, psi) in psis.iter().enumerate() {
            if mono.has_t(i + 1) {
                prod = prod.mul(&psi.img_t)?;
            }
            if mono.has_x(i + 1) {
                prod = prod.mul(&psi.img_x)?;
            }
        }
        acc = acc.add(&prod.scale(coeff.clone()))?;
    }
    Ok(acc)
}

/// The clone substitution `φ • (ψ_1, .., ψ_m) = μ^{m-1} ∘ (ψ_1 ⊗ .. ⊗ ψ_m) ∘ φ`
/// on generator images.
pub fn bullet(phi: &GenImages, psis: &[GenImages]) -> Result<GenImages> {
    if psis.len() != phi.n() {
        return Err(Error::ArityMismatch(format!(
            "bullet expects {} inner morphisms, got {}",
            phi.n(),
            psis.len()
        )));
    }
    GenImages::new(
        tensor_contract(psis, &phi.img_t)?,
        tensor_contract(psis, &phi.img_x)?,
    )
}

/// The selection action `φ · f = φ • (π_{f[1],n}, .., π_{f[m],n})`.
pub fn dot_selection(phi: &GenImages, f: &Selection) -> Result<GenImages> {
    if f.target_size() != phi.n() {
        return Err(Error::ArityMismatch(format!(
            "dot expects a selection into [{}], got one into [{}]",
            phi.n(),
            f.target_size()
        )));
    }
    let params = phi.params().with_n(f.source_size())?;
    let projections: Vec<GenImages> = f
        .values()
        .iter()
        .map(|&i| GenImages::projection(params, i))
        .collect::<Result<_>>()?;
    bullet(phi, &projections)
}

/// Every candidate whose generator-image coefficients lie in
/// `[-bound, bound]` and which satisfies the ring relations, in canonical
/// order.
///
/// The `t`-image box is pruned by `img_t^2 = q` and the `x`-image box by
/// `img_x^2 = 0` before the anticommutation relation is tested pairwise;
/// this is equivalent to filtering the full double box through
/// [`GenImages::is_ring_morphism`], which the test suite checks.
pub fn enumerate_morphisms(params: Params, bound: i64) -> Vec<GenImages> {
    let q_big = BigInt::from(params.q().get());
    let t_candidates = elements_squaring_to(params, bound, &q_big);
    let x_candidates = elements_squaring_to(params, bound, &BigInt::zero());
    let mut out = Vec::new();
    for t in &t_candidates {
        for x in &x_candidates {
            if t.anticommutes(x).expect("same ring") {
                out.push(GenImages::new(t.clone(), x.clone()).expect("same ring"));
            }
        }
    }
    out.sort();
    out
}

fn in_box(e: &RingElem, bound: i64) -> bool {
    let b = BigInt::from(bound);
    e.terms().all(|(_, c)| c.abs() <= b)
}

/// Result of the classification oracle: three independently computed sets
/// of morphisms over the same coefficient box.
pub struct ClassificationScan {
    /// Full double-box scan filtered through `is_ring_morphism` only.
    pub valid: BTreeSet<GenImages>,
    /// The canonical family `t -> ±t_d + f·x_d, x -> g·x_d` intersected
    /// with the box.
    pub family: BTreeSet<GenImages>,
    /// Output of the pruned enumerator [`enumerate_morphisms`].
    pub enumerated: BTreeSet<GenImages>,
}

/// Runs the three routes of the classification oracle.  Feasible for
/// `n = 1` with small bounds (the full double box has
/// `(2B+1)^(2·4^n)` candidates).
pub fn classification_scan(params: Params, bound: i64) -> ClassificationScan {
    let monos = Monomial::all(params.n());
    let mut valid = BTreeSet::new();

    // route 1: filter the full double box through is_ring_morphism
    let mut t_coeffs = vec![-bound; monos.len()];
    loop {
        let img_t = elem_from(params, &monos, &t_coeffs);
        let mut x_coeffs = vec![-bound; monos.len()];
        loop {
            let img_x = elem_from(params, &monos, &x_coeffs);
            let candidate =
                GenImages::new(img_t.clone(), img_x).expect("same ring");
            if candidate.is_ring_morphism() {
                valid.insert(candidate);
            }
            if !step(&mut x_coeffs, bound) {
                break;
            }
        }
        if !step(&mut t_coeffs, bound) {
            break;
        }
    }

    // route 2: generate the canonical family inside the box
    let mut family = BTreeSet::new();
    for d in 1..=params.n() {
        let free: Vec<Monomial> = monos.iter().copied().filter(|m| !m.has_x(d)).collect();
        for sign in [1i8, -1] {
            let mut f_coeffs = vec![-bound; free.len()];
            loop {
                let f = elem_from(params, &free, &f_coeffs);
                let mut g_coeffs = vec![-bound; free.len()];
                loop {
                    let g = elem_from(params, &free, &g_coeffs);
                    let c = CanonicalForm::new(sign, d, f.clone(), g)
                        .expect("representatives avoid x_d");
                    let m = c.to_gen_images();
                    if in_box(m.img_t(), bound) && in_box(m.img_x(), bound) {
                        family.insert(m);
                    }
                    if !step(&mut g_coeffs, bound) {
                        break;
                    }
                }
                if !step(&mut f_coeffs, bound) {
                    break;
                }
            }
        }
    }

    // route 3: the pruned enumerator
    let enumerated: BTreeSet<GenImages> = enumerate_morphisms(params, bound).into_iter().collect();

    ClassificationScan {
        valid,
        family,
        enumerated,
    }
}

fn elem_from(params: Params, monos: &[Monomial], coeffs: &[i64]) -> RingElem {
    let terms: Vec<(Monomial, i64)> = monos
        .iter()
        .copied()
        .zip(coeffs.iter().copied())
        .filter(|&(_, c)| c != 0)
        .collect();
    RingElem::from_i64_terms(params, &terms).expect("basis fits")
}

fn step(coeffs: &mut [i64], bound: i64) -> bool {
    for slot in coeffs.iter_mut().rev() {
        if *slot < bound {
            *slot += 1;
            return true;
        }
        *slot = -bound;
    }
    false
}

/// Classification check: for a non-square `q` the three routes must agree
/// exactly; any discrepancy is reported with the first witness.  In hopf
/// mode (`q = 1`) the classification genuinely fails and this check
/// reports the morphism outside the canonical family.
pub fn check_classification(params: Params, bound: i64) -> CheckReport {
    let suite = "classification";
    let scan = classification_scan(params, bound);
    let checked = scan.valid.len() as u64;
    if scan.valid == scan.family && scan.valid == scan.enumerated {
        CheckReport::pass(suite, 0, checked, None)
    } else {
        let witness = scan
            .valid
            .symmetric_difference(&scan.family)
            .chain(scan.valid.symmetric_difference(&scan.enumerated))
            .next();
        CheckReport::fail(
            suite,
            0,
            checked,
            None,
            json!({
                "valid": scan.valid.len(),
                "family": scan.family.len(),
                "enumerated": scan.enumerated.len(),
                "witness": witness.map(|m| serde_json::to_value(m).expect("serializes")),
                "witness_classifiable": witness.map(|m| m.to_canonical().is_ok()),
            }),
        )
    }
}

/// Samples a valid morphism through the canonical family: random sign and
/// position, and random `f`, `g` supported away from `x_d` with at most
/// `max_terms` terms and coefficients in `[-bound, bound]`.
pub fn random_morphism(
    params: Params,
    rng: &mut impl Rng,
    max_terms: usize,
    bound: i64,
) -> GenImages {
    let d = rng.gen_range(1..=params.n());
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let free: Vec<Monomial> = Monomial::all(params.n())
        .into_iter()
        .filter(|m| !m.has_x(d))
        .collect();
    let pick = |rng: &mut dyn rand::RngCore| {
        let count = rng.gen_range(0..=max_terms);
        let terms: Vec<(Monomial, i64)> = (0..count)
            .map(|_| {
                let mono = free[rng.gen_range(0..free.len())];
                let mut c = 0i64;
                while c == 0 {
                    c = rng.gen_range(-bound..=bound);
                }
                (mono, c)
            })
            .collect();
        RingElem::from_i64_terms(params, &terms).expect("basis fits")
    };
    let f = pick(rng);
    let g = pick(rng);
    CanonicalForm::new(sign, d, f, g)
        .expect("representatives avoid x_d")
        .to_gen_images()
}

/// The endomorphism clone of the deformed ring at a fixed deformation
/// parameter: elements of arity `n` are the (candidate) morphisms
/// `A -> A^{⊗n}`.
#[derive(Debug, Clone, Copy)]
pub struct MorphismClone {
    pub q: Q,
}

impl AbstractClone for MorphismClone {
    type Elem = GenImages;

    fn arity(&self, e: &GenImages) -> usize {
        e.n()
    }

    fn projection(&self, i: usize, n: usize) -> Result<GenImages> {
        GenImages::projection(Params::new(n, self.q)?, i)
    }

    fn bullet(&self, phi: &GenImages, psis: &[GenImages]) -> Result<GenImages> {
        bullet(phi, psis)
    }

    fn elems_equal(&self, a: &GenImages, b: &GenImages) -> bool {
        a == b
    }

    fn elem_json(&self, e: &GenImages) -> serde_json::Value {
        serde_json::to_value(e).expect("morphism serializes")
    }
}

/// The endomorphism operad of the deformed ring with its native structure:
/// multicomposition places the inner morphisms into disjoint tensor
/// blocks, and the selection action re-indexes tensor positions directly.
/// Serves as an independent route against the clone-derived structure.
#[derive(Debug, Clone, Copy)]
pub struct MorphismOperad {
    pub q: Q,
}

impl MorphismOperad {
    /// Applies re-indexed generator products for one image: each monomial
    /// `t_S x_T` of `h` maps to the ordered product over positions `i` of
    /// the chosen factors.
    fn reindex(
        &self,
        h: &RingElem,
        target: Params,
        mut factor_t: impl FnMut(usize) -> Result<RingElem>,
        mut factor_x: impl FnMut(usize) -> Result<RingElem>,
    ) -> Result<RingElem> {
        let mut acc = RingElem::zero(target);
        for (mono, coeff) in h.terms() {
            let mut prod = RingElem::unit(target);
            for i in 1..=h.n() {
                if mono.has_t(i) {
                    prod = prod.mul(&factor_t(i)?)?;
                }
                if mono.has_x(i) {
                    prod = prod.mul(&factor_x(i)?)?;
                }
            }
            acc = acc.add(&prod.scale(coeff.clone()))?;
        }
        Ok(acc)
    }
}

impl CartesianOperad for MorphismOperad {
    type Elem = GenImages;

    fn arity(&self, e: &GenImages) -> usize {
        e.n()
    }

    fn identity(&self) -> GenImages {
        let params = Params::new(1, self.q).expect("arity 1 is valid");
        GenImages::projection(params, 1).expect("index 1 is valid")
    }

    fn compose(&self, phi: &GenImages, psis: &[GenImages]) -> Result<GenImages> {
        if psis.len() != phi.n() {
            return Err(Error::ArityMismatch(format!(
                "compose expects {} inner morphisms, got {}",
                phi.n(),
                psis.len()
            )));
        }
        let total: usize = psis.iter().map(|p| p.n()).sum();
        let target = Params::new(total, self.q)?;
        let mut offsets = Vec::with_capacity(psis.len());
        let mut offset = 0;
        for psi in psis {
            offsets.push(offset);
            offset += psi.n();
        }
        let shifted: Vec<(RingElem, RingElem)> = psis
            .iter()
            .zip(&offsets)
            .map(|(psi, &off)| {
                Ok((
                    psi.img_t().embed_at(off, target)?,
                    psi.img_x().embed_at(off, target)?,
                ))
            })
            .collect::<Result<_>>()?;
        let img_t = self.reindex(
            phi.img_t(),
            target,
            |i| Ok(shifted[i - 1].0.clone()),
            |i| Ok(shifted[i - 1].1.clone()),
        )?;
        let img_x = self.reindex(
            phi.img_x(),
            target,
            |i| Ok(shifted[i - 1].0.clone()),
            |i| Ok(shifted[i - 1].1.clone()),
        )?;
        GenImages::new(img_t, img_x)
    }

    fn dot(&self, phi: &GenImages, f: &Selection) -> Result<GenImages> {
        if f.target_size() != phi.n() {
            return Err(Error::ArityMismatch(format!(
                "dot expects a selection into [{}], got one into [{}]",
                phi.n(),
                f.target_size()
            )));
        }
        let target = Params::new(f.source_size(), self.q)?;
        let values = f.values();
        let img_t = self.reindex(
            phi.img_t(),
            target,
            |i| RingElem::generator_t(target, values[i - 1]),
            |i| RingElem::generator_x(target, values[i - 1]),
        )?;
        let img_x = self.reindex(
            phi.img_x(),
            target,
            |i| RingElem::generator_t(target, values[i - 1]),
            |i| RingElem::generator_x(target, values[i - 1]),
        )?;
        GenImages::new(img_t, img_x)
    }

    fn elems_equal(&self, a: &GenImages, b: &GenImages) -> bool {
        a == b
    }

    fn elem_json(&self, e: &GenImages) -> serde_json::Value {
        serde_json::to_value(e).expect("morphism serializes")
    }
}
