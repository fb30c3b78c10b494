//! Abstract clones and cartesian operads: behavioral interfaces, seeded
//! axiom checkers, and the translation between the two structures.
//!
//! Both concrete instances in this crate (finitary operations on a finite
//! set, and ring morphisms out of the deformed ring) have infinitely many
//! elements per arity, so the interfaces hand elements around lazily and
//! the checkers draw from externally supplied samplers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fincard::{self, Selection};
use crate::report::CheckReport;

/// An abstract clone: a graded family with projections and a substitution
/// product `φ • (ψ_1, .., ψ_m)` subject to identity, projection and
/// associativity axioms.
pub trait AbstractClone {
    type Elem: Clone;

    fn arity(&self, e: &Self::Elem) -> usize;

    /// The projection `π_{i,n}`, `1 <= i <= n`.
    fn projection(&self, i: usize, n: usize) -> Result<Self::Elem>;

    /// Substitution `φ • (ψ_1, .., ψ_m)` where `m = arity(φ) = psis.len()`
    /// and all `ψ_i` share one arity.  Implementations may require
    /// `psis` to be nonempty.
    fn bullet(&self, phi: &Self::Elem, psis: &[Self::Elem]) -> Result<Self::Elem>;

    fn elems_equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// Serialization used in counterexample reports.
    fn elem_json(&self, e: &Self::Elem) -> serde_json::Value;
}

/// A cartesian operad: an operad together with an action `φ · f` of
/// selections, compatible with multicomposition.
pub trait CartesianOperad {
    type Elem: Clone;

    fn arity(&self, e: &Self::Elem) -> usize;

    /// The identity element of `O_1`.
    fn identity(&self) -> Self::Elem;

    /// Multicomposition `φ ∘ (ψ_1, .., ψ_n)` where `n = arity(φ)` and the
    /// `ψ_i` may have distinct arities; the result has arity `Σ arity(ψ_i)`.
    fn compose(&self, phi: &Self::Elem, psis: &[Self::Elem]) -> Result<Self::Elem>;

    /// The selection action: for `f : [n] -> [m]` and `φ` of arity `m`,
    /// `φ · f` has arity `n`.
    fn dot(&self, phi: &Self::Elem, f: &Selection) -> Result<Self::Elem>;

    fn elems_equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    fn elem_json(&self, e: &Self::Elem) -> serde_json::Value;
}

/// Configuration for the randomized axiom checkers.
#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub trials: u64,
    pub seed: u64,
    /// Maximum arity sampled for outer elements.
    pub max_outer: usize,
    /// Maximum arity sampled for inner elements and selections.
    pub max_inner: usize,
}

impl CheckConfig {
    pub fn new(trials: u64, seed: u64, max_outer: usize, max_inner: usize) -> Self {
        CheckConfig {
            trials,
            seed,
            max_outer,
            max_inner,
        }
    }
}

/// A seeded element sampler: given the shared RNG and a requested arity,
/// produce an element of that arity.
pub type Sampler<'a, E> = dyn FnMut(&mut ChaCha8Rng, usize) -> E + 'a;

/// Verifies the three clone axioms on randomly sampled tuples:
///
/// 1. `φ • (π_{1,n}, .., π_{n,n}) = φ`
/// 2. `π_{i,m} • (ψ_1, .., ψ_m) = ψ_i`
/// 3. `φ • (ψ_1 • ρ⃗, .., ψ_m • ρ⃗) = (φ • ψ⃗) • ρ⃗`
///
/// Arities are drawn in `1..=max`; the first counterexample is reported
/// with full operand serialization.
pub fn check_clone_axioms<C: AbstractClone>(
    clone: &C,
    sampler: &mut Sampler<'_, C::Elem>,
    cfg: &CheckConfig,
) -> CheckReport {
    let suite = "clone-axioms";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checked = 0u64;
    let fail = |checked: u64, witness: serde_json::Value| {
        CheckReport::fail(suite, cfg.trials, checked, Some(cfg.seed), witness)
    };
    for trial in 0..cfg.trials {
        let m = rng_range(&mut rng, 1, cfg.max_outer);
        let n = rng_range(&mut rng, 1, cfg.max_inner);
        let l = rng_range(&mut rng, 1, cfg.max_inner);

        // axiom 1
        let phi = sampler(&mut rng, n);
        let projections: Vec<C::Elem> = match (1..=n)
            .map(|i| clone.projection(i, n))
            .collect::<Result<_>>()
        {
            Ok(p) => p,
            Err(e) => return fail(checked, json!({ "error": e.to_string() })),
        };
        match clone.bullet(&phi, &projections) {
            Ok(r) if clone.elems_equal(&r, &phi) => {}
            Ok(r) => {
                return fail(
                    checked,
                    json!({
                        "axiom": 1, "trial": trial,
                        "phi": clone.elem_json(&phi),
                        "got": clone.elem_json(&r),
                    }),
                )
            }
            Err(e) => return fail(checked, json!({ "axiom": 1, "error": e.to_string() })),
        }
        checked += 1;

        // axiom 2
        let psis: Vec<C::Elem> = (0..m).map(|_| sampler(&mut rng, n)).collect();
        let i = rng_range(&mut rng, 1, m);
        let pi = match clone.projection(i, m) {
            Ok(p) => p,
            Err(e) => return fail(checked, json!({ "error": e.to_string() })),
        };
        match clone.bullet(&pi, &psis) {
            Ok(r) if clone.elems_equal(&r, &psis[i - 1]) => {}
            Ok(r) => {
                return fail(
                    checked,
                    json!({
                        "axiom": 2, "trial": trial, "i": i, "m": m,
                        "psis": psis.iter().map(|p| clone.elem_json(p)).collect::<Vec<_>>(),
                        "got": clone.elem_json(&r),
                    }),
                )
            }
            Err(e) => return fail(checked, json!({ "axiom": 2, "error": e.to_string() })),
        }
        checked += 1;

        // axiom 3
        let phi = sampler(&mut rng, m);
        let rhos: Vec<C::Elem> = (0..n).map(|_| sampler(&mut rng, l)).collect();
        let outcome = (|| -> Result<(C::Elem, C::Elem)> {
            let inner: Vec<C::Elem> = psis
                .iter()
                .map(|psi| clone.bullet(psi, &rhos))
                .collect::<Result<_>>()?;
            let lhs = clone.bullet(&phi, &inner)?;
            let rhs = clone.bullet(&clone.bullet(&phi, &psis)?, &rhos)?;
            Ok((lhs, rhs))
        })();
        match outcome {
            Ok((lhs, rhs)) if clone.elems_equal(&lhs, &rhs) => {}
            Ok((lhs, rhs)) => {
                return fail(
                    checked,
                    json!({
                        "axiom": 3, "trial": trial, "m": m, "n": n, "l": l,
                        "phi": clone.elem_json(&phi),
                        "psis": psis.iter().map(|p| clone.elem_json(p)).collect::<Vec<_>>(),
                        "rhos": rhos.iter().map(|p| clone.elem_json(p)).collect::<Vec<_>>(),
                        "lhs": clone.elem_json(&lhs),
                        "rhs": clone.elem_json(&rhs),
                    }),
                )
            }
            Err(e) => return fail(checked, json!({ "axiom": 3, "error": e.to_string() })),
        }
        checked += 1;
    }
    CheckReport::pass(suite, cfg.trials, checked, Some(cfg.seed))
}

/// Verifies the three cartesian-operad laws on sampled data:
///
/// * `(φ · g) · f = φ · (g ∘ f)`
/// * `φ · id = φ`
/// * `(φ · f) ∘ (ψ_1 · g_1, .., ψ_n · g_n) = [φ ∘ (ψ_{f[1]}, .., ψ_{f[m]})] · [f ≀ (g_1, .., g_n)]`
pub fn check_cartesian_axioms<O: CartesianOperad>(
    operad: &O,
    sampler: &mut Sampler<'_, O::Elem>,
    cfg: &CheckConfig,
) -> CheckReport {
    let suite = "cartesian-axioms";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checked = 0u64;
    let fail = |checked: u64, witness: serde_json::Value| {
        CheckReport::fail(suite, cfg.trials, checked, Some(cfg.seed), witness)
    };
    for trial in 0..cfg.trials {
        // law 1: (φ · g) · f = φ · (g ∘ f) on a composable pair of
        // selections with nonempty layers.
        let n = rng_range(&mut rng, 1, cfg.max_inner);
        let m = rng_range(&mut rng, 1, cfg.max_inner);
        let k = rng_range(&mut rng, 1, cfg.max_inner);
        let f = nonempty_selection(&mut rng, n, m);
        let g = nonempty_selection(&mut rng, m, k);
        let phi = sampler(&mut rng, k);
        let outcome = (|| -> Result<(O::Elem, O::Elem)> {
            let lhs = operad.dot(&operad.dot(&phi, &g)?, &f)?;
            let rhs = operad.dot(&phi, &fincard::compose(&g, &f)?)?;
            Ok((lhs, rhs))
        })();
        match outcome {
            Ok((lhs, rhs)) if operad.elems_equal(&lhs, &rhs) => {}
            Ok((lhs, rhs)) => {
                return fail(
                    checked,
                    json!({
                        "law": "dot-composition", "trial": trial,
                        "phi": operad.elem_json(&phi),
                        "f": f, "g": g,
                        "lhs": operad.elem_json(&lhs),
                        "rhs": operad.elem_json(&rhs),
                    }),
                )
            }
            Err(e) => {
                return fail(
                    checked,
                    json!({ "law": "dot-composition", "error": e.to_string() }),
                )
            }
        }
        checked += 1;

        // law 2: φ · id = φ
        let phi = sampler(&mut rng, n);
        match operad.dot(&phi, &Selection::identity(n)) {
            Ok(r) if operad.elems_equal(&r, &phi) => {}
            Ok(r) => {
                return fail(
                    checked,
                    json!({
                        "law": "dot-identity", "trial": trial,
                        "phi": operad.elem_json(&phi),
                        "got": operad.elem_json(&r),
                    }),
                )
            }
            Err(e) => {
                return fail(checked, json!({ "law": "dot-identity", "error": e.to_string() }))
            }
        }
        checked += 1;

        // law 3 (interchange): ψ_i of arity l_i, g_i : [k_i] -> [l_i],
        // f : [n] -> [m], φ of arity m.
        let m = rng_range(&mut rng, 1, cfg.max_inner);
        let n = rng_range(&mut rng, 1, cfg.max_inner);
        let f = nonempty_selection(&mut rng, n, m);
        let phi = sampler(&mut rng, m);
        let psis: Vec<O::Elem> = (0..n)
            .map(|_| {
                let l = rng_range(&mut rng, 1, cfg.max_inner);
                sampler(&mut rng, l)
            })
            .collect();
        let gs: Vec<Selection> = psis
            .iter()
            .map(|psi| {
                let k = rng_range(&mut rng, 1, cfg.max_inner);
                nonempty_selection(&mut rng, k, operad.arity(psi))
            })
            .collect();
        let outcome = (|| -> Result<(O::Elem, O::Elem)> {
            let dotted: Vec<O::Elem> = psis
                .iter()
                .zip(&gs)
                .map(|(psi, gi)| operad.dot(psi, gi))
                .collect::<Result<_>>()?;
            let lhs = operad.compose(&operad.dot(&phi, &f)?, &dotted)?;
            let picked: Vec<O::Elem> = f.values().iter().map(|&i| psis[i - 1].clone()).collect();
            let rhs = operad.dot(
                &operad.compose(&phi, &picked)?,
                &fincard::substitute(&f, &gs)?,
            )?;
            Ok((lhs, rhs))
        })();
        match outcome {
            Ok((lhs, rhs)) if operad.elems_equal(&lhs, &rhs) => {}
            Ok((lhs, rhs)) => {
                return fail(
                    checked,
                    json!({
                        "law": "interchange", "trial": trial,
                        "phi": operad.elem_json(&phi),
                        "f": f,
                        "gs": gs,
                        "psis": psis.iter().map(|p| operad.elem_json(p)).collect::<Vec<_>>(),
                        "lhs": operad.elem_json(&lhs),
                        "rhs": operad.elem_json(&rhs),
                    }),
                )
            }
            Err(e) => {
                return fail(checked, json!({ "law": "interchange", "error": e.to_string() }))
            }
        }
        checked += 1;
    }
    CheckReport::pass(suite, cfg.trials, checked, Some(cfg.seed))
}

fn rng_range(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    use rand::Rng;
    rng.gen_range(lo..=hi.max(lo))
}

/// Random selection `[n] -> [m]` with the given sizes (`m >= 1` assumed).
fn nonempty_selection(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Selection {
    use rand::Rng;
    let values = (0..m).map(|_| rng.gen_range(1..=n)).collect();
    Selection::new(n, values).expect("entries sampled in range")
}

/// Wraps an abstract clone as a cartesian operad:
/// `φ · f = φ • (π_{f[1],n}, .., π_{f[m],n})` and
/// `φ ∘ (ψ_1, .., ψ_n) = φ • (ψ_1 · π^1, .., ψ_n · π^n)`.
#[derive(Debug, Clone)]
pub struct OperadFromClone<C>(pub C);

impl<C: AbstractClone> CartesianOperad for OperadFromClone<C> {
    type Elem = C::Elem;

    fn arity(&self, e: &Self::Elem) -> usize {
        self.0.arity(e)
    }

    fn identity(&self) -> Self::Elem {
        self.0
            .projection(1, 1)
            .expect("pi_{1,1} exists in every clone")
    }

    fn compose(&self, phi: &Self::Elem, psis: &[Self::Elem]) -> Result<Self::Elem> {
        if psis.len() != self.0.arity(phi) {
            return Err(Error::ArityMismatch(format!(
                "compose expects {} arguments, got {}",
                self.0.arity(phi),
                psis.len()
            )));
        }
        let sizes: Vec<usize> = psis.iter().map(|p| self.0.arity(p)).collect();
        let dotted: Vec<C::Elem> = psis
            .iter()
            .enumerate()
            .map(|(idx, psi)| self.dot(psi, &Selection::proj(idx + 1, &sizes)?))
            .collect::<Result<_>>()?;
        self.0.bullet(phi, &dotted)
    }

    fn dot(&self, phi: &Self::Elem, f: &Selection) -> Result<Self::Elem> {
        if f.target_size() != self.0.arity(phi) {
            return Err(Error::ArityMismatch(format!(
                "dot expects a selection into [{}], got one into [{}]",
                self.0.arity(phi),
                f.target_size()
            )));
        }
        let n = f.source_size();
        let projections: Vec<C::Elem> = f
            .values()
            .iter()
            .map(|&i| self.0.projection(i, n))
            .collect::<Result<_>>()?;
        self.0.bullet(phi, &projections)
    }

    fn elems_equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.elems_equal(a, b)
    }

    fn elem_json(&self, e: &Self::Elem) -> serde_json::Value {
        self.0.elem_json(e)
    }
}

/// Wraps a cartesian operad as an abstract clone:
/// `π_{i,n} = id · π^i` and
/// `φ • (ψ_1, .., ψ_m) = (φ ∘ (ψ_1, .., ψ_m)) · Δ^{m-1}_[n]`.
#[derive(Debug, Clone)]
pub struct CloneFromOperad<O>(pub O);

impl<O: CartesianOperad> AbstractClone for CloneFromOperad<O> {
    type Elem = O::Elem;

    fn arity(&self, e: &Self::Elem) -> usize {
        self.0.arity(e)
    }

    fn projection(&self, i: usize, n: usize) -> Result<Self::Elem> {
        let pi = Selection::proj(i, &vec![1; n])?;
        self.0.dot(&self.0.identity(), &pi)
    }

    fn bullet(&self, phi: &Self::Elem, psis: &[Self::Elem]) -> Result<Self::Elem> {
        let m = psis.len();
        if m != self.0.arity(phi) {
            return Err(Error::ArityMismatch(format!(
                "bullet expects {} arguments, got {}",
                self.0.arity(phi),
                m
            )));
        }
        if m == 0 {
            return Err(Error::ArityMismatch(
                "bullet with no arguments cannot infer the target arity".into(),
            ));
        }
        let n = self.0.arity(&psis[0]);
        if psis.iter().any(|p| self.0.arity(p) != n) {
            return Err(Error::ArityMismatch(
                "bullet arguments must share one arity".into(),
            ));
        }
        let composed = self.0.compose(phi, psis)?;
        self.0.dot(&composed, &Selection::delta_power(n, m)?)
    }

    fn elems_equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.elems_equal(a, b)
    }

    fn elem_json(&self, e: &Self::Elem) -> serde_json::Value {
        self.0.elem_json(e)
    }
}

/// Round trip clone -> operad -> clone: `bullet` and projections must agree
/// extensionally with the original on sampled tuples.
pub fn check_clone_roundtrip<C: AbstractClone + Clone>(
    clone: &C,
    sampler: &mut Sampler<'_, C::Elem>,
    cfg: &CheckConfig,
) -> CheckReport {
    let suite = "roundtrip-clone-operad-clone";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let derived = CloneFromOperad(OperadFromClone(clone.clone()));
    let mut checked = 0u64;
    for trial in 0..cfg.trials {
        let m = rng_range(&mut rng, 1, cfg.max_outer);
        let n = rng_range(&mut rng, 1, cfg.max_inner);
        let phi = sampler(&mut rng, m);
        let psis: Vec<C::Elem> = (0..m).map(|_| sampler(&mut rng, n)).collect();
        let direct = clone.bullet(&phi, &psis);
        let wrapped = derived.bullet(&phi, &psis);
        match (direct, wrapped) {
            (Ok(a), Ok(b)) if clone.elems_equal(&a, &b) => {}
            (direct, wrapped) => {
                return CheckReport::fail(
                    suite,
                    cfg.trials,
                    checked,
                    Some(cfg.seed),
                    json!({
                        "trial": trial,
                        "phi": clone.elem_json(&phi),
                        "psis": psis.iter().map(|p| clone.elem_json(p)).collect::<Vec<_>>(),
                        "direct": direct.map(|a| clone.elem_json(&a)).map_err(|e| e.to_string()),
                        "wrapped": wrapped.map(|a| clone.elem_json(&a)).map_err(|e| e.to_string()),
                    }),
                );
            }
        }
        checked += 1;
        for i in 1..=n {
            let direct = clone.projection(i, n);
            let wrapped = derived.projection(i, n);
            match (direct, wrapped) {
                (Ok(a), Ok(b)) if clone.elems_equal(&a, &b) => {}
                _ => {
                    return CheckReport::fail(
                        suite,
                        cfg.trials,
                        checked,
                        Some(cfg.seed),
                        json!({ "trial": trial, "projection": [i, n] }),
                    );
                }
            }
            checked += 1;
        }
    }
    CheckReport::pass(suite, cfg.trials, checked, Some(cfg.seed))
}

/// Round trip operad -> clone -> operad: `dot` and `compose` must agree
/// extensionally with the original on sampled tuples.
pub fn check_operad_roundtrip<O: CartesianOperad + Clone>(
    operad: &O,
    sampler: &mut Sampler<'_, O::Elem>,
    cfg: &CheckConfig,
) -> CheckReport {
    let suite = "roundtrip-operad-clone-operad";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let derived = OperadFromClone(CloneFromOperad(operad.clone()));
    let mut checked = 0u64;
    for trial in 0..cfg.trials {
        let m = rng_range(&mut rng, 1, cfg.max_inner);
        let n = rng_range(&mut rng, 1, cfg.max_inner);
        let f = nonempty_selection(&mut rng, n, m);
        let phi = sampler(&mut rng, m);
        let direct = operad.dot(&phi, &f);
        let wrapped = derived.dot(&phi, &f);
        match (direct, wrapped) {
            (Ok(a), Ok(b)) if operad.elems_equal(&a, &b) => {}
            (direct, wrapped) => {
                return CheckReport::fail(
                    suite,
                    cfg.trials,
                    checked,
                    Some(cfg.seed),
                    json!({
                        "trial": trial, "op": "dot",
                        "phi": operad.elem_json(&phi),
                        "f": f,
                        "direct": direct.map(|a| operad.elem_json(&a)).map_err(|e| e.to_string()),
                        "wrapped": wrapped.map(|a| operad.elem_json(&a)).map_err(|e| e.to_string()),
                    }),
                );
            }
        }
        checked += 1;

        let phi = sampler(&mut rng, m);
        let psis: Vec<O::Elem> = (0..m)
            .map(|_| {
                let k = rng_range(&mut rng, 1, cfg.max_inner);
                sampler(&mut rng, k)
            })
            .collect();
        let direct = operad.compose(&phi, &psis);
        let wrapped = derived.compose(&phi, &psis);
        match (direct, wrapped) {
            (Ok(a), Ok(b)) if operad.elems_equal(&a, &b) => {}
            (direct, wrapped) => {
                return CheckReport::fail(
                    suite,
                    cfg.trials,
                    checked,
                    Some(cfg.seed),
                    json!({
                        "trial": trial, "op": "compose",
                        "phi": operad.elem_json(&phi),
                        "psis": psis.iter().map(|p| operad.elem_json(p)).collect::<Vec<_>>(),
                        "direct": direct.map(|a| operad.elem_json(&a)).map_err(|e| e.to_string()),
                        "wrapped": wrapped.map(|a| operad.elem_json(&a)).map_err(|e| e.to_string()),
                    }),
                );
            }
        }
        checked += 1;
    }
    CheckReport::pass(suite, cfg.trials, checked, Some(cfg.seed))
}
