//! Instance-level verification around the hopf-mode ring (`q = 1`, the
//! integral Sweedler ring): its comultiplication is a ring morphism whose
//! contraction with the multiplication is not, and the multiplication map
//! `A ⊗ A -> A` itself fails multiplicativity because `A` is
//! noncommutative.

use serde::Serialize;
use serde_json::json;

use crate::endo_operad::GenImages;
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::zring::{Monomial, Params, Q, RingElem};

/// The Sweedler comultiplication `t -> t ⊗ t`, `x -> 1 ⊗ x + x ⊗ t` as a
/// candidate morphism `A -> A^{⊗2}` at `q = 1`.
pub fn sweedler_delta() -> GenImages {
    let params = Params::new(2, Q::hopf_unit()).expect("arity 2 is valid");
    let img_t = RingElem::parse(params, "t{1,2}x{}").expect("literal parses");
    let img_x = RingElem::parse(params, "t{2}x{1} + t{}x{2}").expect("literal parses");
    GenImages::new(img_t, img_x).expect("same ring")
}

/// The multiplication `A ⊗ A -> A` as a linear map on the basis:
/// `t_S x_T` maps to the product in `A` of its two local factors, left
/// factor first.
pub fn mu_elem(a: &RingElem) -> Result<RingElem> {
    if a.n() != 2 {
        return Err(Error::ArityMismatch(format!(
            "contraction is defined on A ⊗ A, got arity {}",
            a.n()
        )));
    }
    let target = a.params().with_n(1)?;
    let local = |has_t: bool, has_x: bool| -> RingElem {
        let mono = Monomial::from_masks(u16::from(has_t), u16::from(has_x));
        RingElem::from_monomial(target, mono, 1).expect("fits arity 1")
    };
    let mut acc = RingElem::zero(target);
    for (mono, coeff) in a.terms() {
        let left = local(mono.has_t(1), mono.has_x(1));
        let right = local(mono.has_t(2), mono.has_x(2));
        acc = acc.add(&left.mul(&right)?.scale(coeff.clone()))?;
    }
    Ok(acc)
}

/// Post-composes a candidate morphism `A -> A ⊗ A` with the
/// multiplication, yielding the contraction `μ ∘ m : A -> A`.
pub fn mu_contract(m: &GenImages) -> Result<GenImages> {
    GenImages::new(mu_elem(m.img_t())?, mu_elem(m.img_x())?)
}

/// First pair from the given list with `μ(ab) ≠ μ(a)μ(b)`, scanning in
/// list order.
pub fn mu_multiplicativity_witness_over(
    basis: &[RingElem],
) -> Result<Option<(RingElem, RingElem)>> {
    for a in basis {
        for b in basis {
            let lhs = mu_elem(&a.mul(b)?)?;
            let rhs = mu_elem(a)?.mul(&mu_elem(b)?)?;
            if lhs != rhs {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

/// Tests multiplicativity of `μ : A ⊗ A -> A` over the 16-element basis of
/// `A^{⊗2}`; returns the first failing pair in canonical order, or `None`
/// when `μ` is a ring morphism on the span.
pub fn mu_multiplicativity_witness(q: Q) -> Option<(RingElem, RingElem)> {
    let params = Params::new(2, q).expect("arity 2 is valid");
    let basis: Vec<RingElem> = Monomial::all(2)
        .into_iter()
        .map(|m| RingElem::from_monomial(params, m, 1).expect("fits"))
        .collect();
    mu_multiplicativity_witness_over(&basis).expect("same ring")
}

/// Is the multiplication map a ring morphism?  For this family the answer
/// is no for every admitted `q`, since `A` is noncommutative.
pub fn mul_is_morphism(q: Q) -> bool {
    mu_multiplicativity_witness(q).is_none()
}

/// First basis pair of `A^{⊗n}` that fails to commute, or `None` when the
/// spanned ring is commutative.
pub fn commutativity_witness(params: Params) -> Option<(RingElem, RingElem)> {
    let basis: Vec<RingElem> = Monomial::all(params.n())
        .into_iter()
        .map(|m| RingElem::from_monomial(params, m, 1).expect("fits"))
        .collect();
    for a in &basis {
        for b in &basis {
            if a.mul(b).expect("same ring") != b.mul(a).expect("same ring") {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// The full worked counterexample, serialized for the `hopf demo` command.
#[derive(Debug, Clone, Serialize)]
pub struct HopfDemo {
    /// The comultiplication `t -> t ⊗ t`, `x -> 1 ⊗ x + x ⊗ t`.
    pub comultiplication: GenImages,
    pub comultiplication_is_morphism: bool,
    /// Classification fails at square `q`; the error message.
    pub comultiplication_classification_error: String,
    /// The contraction `μ ∘ Δ`.
    pub contraction: GenImages,
    pub contraction_is_morphism: bool,
    /// `μ∘Δ(t) · μ∘Δ(x)`, the tx-image derived from the generator images.
    pub derived_tx_image: String,
    /// `μ(Δ(t)·Δ(x))`, the true contraction of the tx-image.
    pub contracted_tx_image: String,
    /// Their difference; nonzero exactly because `μ ∘ Δ` is no morphism.
    pub witness_difference: String,
    /// First basis pair with `μ(ab) ≠ μ(a)μ(b)` at `q = 1` and `q = 2`.
    pub mu_witness_q1: Option<(String, String)>,
    pub mu_witness_q2: Option<(String, String)>,
    /// First noncommuting basis pair of `A`.
    pub commutativity_witness: Option<(String, String)>,
}

impl HopfDemo {
    /// Do all the demo's expectations hold?
    pub fn all_expected(&self) -> bool {
        self.comultiplication_is_morphism
            && !self.contraction_is_morphism
            && self.witness_difference == "2*t{1}x{1}"
            && self.mu_witness_q1.is_some()
            && self.mu_witness_q2.is_some()
            && self.commutativity_witness == Some(("t{1}x{}".into(), "t{}x{1}".into()))
    }
}

/// Runs the whole counterexample computation.
pub fn hopf_demo() -> HopfDemo {
    let delta = sweedler_delta();
    let classification_error = match delta.to_canonical() {
        Err(e) => e.to_string(),
        Ok(_) => "unexpectedly classifiable".into(),
    };
    let contraction = mu_contract(&delta).expect("arity 2");
    let derived_tx = contraction.img_tx();
    let contracted_tx = mu_elem(&delta.img_tx()).expect("arity 2");
    let difference = contracted_tx.sub(&derived_tx).expect("same ring");
    let fmt_pair =
        |p: Option<(RingElem, RingElem)>| p.map(|(a, b)| (a.to_string(), b.to_string()));
    HopfDemo {
        comultiplication: delta.clone(),
        comultiplication_is_morphism: delta.is_ring_morphism(),
        comultiplication_classification_error: classification_error,
        contraction_is_morphism: contraction.is_ring_morphism(),
        contraction,
        derived_tx_image: derived_tx.to_string(),
        contracted_tx_image: contracted_tx.to_string(),
        witness_difference: difference.to_string(),
        mu_witness_q1: fmt_pair(mu_multiplicativity_witness(Q::hopf_unit())),
        mu_witness_q2: fmt_pair(mu_multiplicativity_witness(Q::new(2).expect("non-square"))),
        commutativity_witness: fmt_pair(commutativity_witness(
            Params::new(1, Q::new(2).expect("non-square")).expect("arity 1"),
        )),
    }
}

/// The demo as a pass/fail report (pass when every expectation holds).
pub fn check_hopf_instance() -> CheckReport {
    let suite = "hopf-instance";
    let demo = hopf_demo();
    if demo.all_expected() {
        CheckReport::pass(suite, 0, 6, None)
    } else {
        CheckReport::fail(
            suite,
            0,
            6,
            None,
            json!({ "demo": serde_json::to_value(&demo).expect("demo serializes") }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sweedler_is_a_morphism_but_not_classifiable() {
        let delta = sweedler_delta();
        assert!(delta.is_ring_morphism());
        assert!(delta.to_canonical().is_err());
        assert_eq!(delta.img_t().to_string(), "t{1,2}x{}");
        assert_eq!(delta.img_t().num_terms(), 1);
    }

    #[test]
    fn contraction_images() {
        let c = mu_contract(&sweedler_delta()).unwrap();
        let p1 = Params::new(1, Q::hopf_unit()).unwrap();
        assert_eq!(c.img_t(), &RingElem::unit(p1));
        assert_eq!(c.img_x().to_string(), "t{}x{1} - t{1}x{1}");
        assert!(!c.is_ring_morphism());
    }

    #[test]
    fn witness_difference_is_2tx() {
        let demo = hopf_demo();
        assert!(demo.all_expected(), "{demo:?}");
        assert_eq!(demo.derived_tx_image, "t{}x{1} - t{1}x{1}");
        assert_eq!(demo.contracted_tx_image, "t{}x{1} + t{1}x{1}");
        assert_eq!(demo.witness_difference, "2*t{1}x{1}");
    }

    #[test]
    fn mu_is_never_multiplicative_here() {
        for q in [Q::hopf_unit(), Q::new(2).unwrap(), Q::new(3).unwrap()] {
            let witness = mu_multiplicativity_witness(q);
            assert!(witness.is_some());
            let (a, b) = witness.unwrap();
            let lhs = mu_elem(&a.mul(&b).unwrap()).unwrap();
            let rhs = mu_elem(&a).unwrap().mul(&mu_elem(&b).unwrap()).unwrap();
            assert_ne!(lhs, rhs);
            assert!(!mul_is_morphism(q));
        }
    }

    #[test]
    fn mu_is_multiplicative_on_the_scalar_subring() {
        let params = Params::new(2, Q::new(2).unwrap()).unwrap();
        let sub = vec![RingElem::unit(params), RingElem::scalar(params, 5)];
        assert!(mu_multiplicativity_witness_over(&sub).unwrap().is_none());
    }

    #[test]
    fn commutativity_witness_is_t_x() {
        let params = Params::new(1, Q::new(2).unwrap()).unwrap();
        let (a, b) = commutativity_witness(params).unwrap();
        assert_eq!(a.to_string(), "t{1}x{}");
        assert_eq!(b.to_string(), "t{}x{1}");
    }

    #[test]
    fn contraction_is_linear() {
        let params = Params::new(2, Q::hopf_unit()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a = crate::zring::random_elem(params, &mut rng, 4, 3);
            let b = crate::zring::random_elem(params, &mut rng, 4, 3);
            assert_eq!(
                mu_elem(&a.add(&b).unwrap()).unwrap(),
                mu_elem(&a).unwrap().add(&mu_elem(&b).unwrap()).unwrap()
            );
            assert_eq!(
                mu_elem(&a.scale(-7)).unwrap(),
                mu_elem(&a).unwrap().scale(-7)
            );
        }
    }

    #[test]
    fn demo_report_passes() {
        let report = check_hopf_instance();
        assert!(report.passed(), "{report:?}");
    }
}
