//! Exhaustive and randomized verification suites for the ring lemmas: the
//! square-root classification, the anticommutant characterization and the
//! twist identities.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::CheckReport;

use super::{random_elem, Monomial, Params, RingElem};

/// Splits the monomial basis of `A^{⊗n}` into the x-free part (`T = ∅`)
/// and the rest, each in canonical order.
fn split_basis(n: usize) -> (Vec<Monomial>, Vec<Monomial>) {
    let all = Monomial::all(n);
    let free: Vec<Monomial> = all.iter().copied().filter(|m| m.x_mask() == 0).collect();
    let rest: Vec<Monomial> = all.iter().copied().filter(|m| m.x_mask() != 0).collect();
    (free, rest)
}

/// Steps a coefficient odometer over `[-bound, bound]^len`; returns false
/// when the odometer wraps around to all `-bound`.
fn step_odometer(coeffs: &mut [i64], bound: i64) -> bool {
    for slot in coeffs.iter_mut().rev() {
        if *slot < bound {
            *slot += 1;
            return true;
        }
        *slot = -bound;
    }
    false
}

fn box_size(width: i64, len: usize) -> u64 {
    (width as u64).pow(len as u32)
}

/// Walks the coefficient box `[-bound, bound]` over all basis monomials,
/// organized into branches by the x-free coefficient pattern.  A branch is
/// descended into only when `branch_filter` accepts its x-free part;
/// skipped branches are counted as covered without visiting.
///
/// Pruning on the x-free part alone is sound for the scans below because
/// the unit coefficient of `a^2` coincides with that of the square of the
/// x-free part of `a` (x-subsets only grow under multiplication), and the
/// structural shape `±t_d + f·x_d` constrains the x-free part alone.
fn for_each_in_box(
    params: Params,
    bound: i64,
    mut branch_filter: impl FnMut(&RingElem) -> bool,
    mut visit: impl FnMut(&RingElem) -> bool,
) -> BoxScan {
    let (free, rest) = split_basis(params.n());
    let width = 2 * bound + 1;
    let branch_size = box_size(width, rest.len());
    let mut scan = BoxScan {
        covered: 0,
        visited: 0,
        aborted: false,
    };
    let mut free_coeffs = vec![-bound; free.len()];
    loop {
        let base_terms: Vec<(Monomial, i64)> = free
            .iter()
            .copied()
            .zip(free_coeffs.iter().copied())
            .filter(|&(_, c)| c != 0)
            .collect();
        let base = RingElem::from_i64_terms(params, &base_terms).expect("basis fits");
        if branch_filter(&base) {
            let mut rest_coeffs = vec![-bound; rest.len()];
            loop {
                let mut terms = base_terms.clone();
                terms.extend(
                    rest.iter()
                        .copied()
                        .zip(rest_coeffs.iter().copied())
                        .filter(|&(_, c)| c != 0),
                );
                let candidate = RingElem::from_i64_terms(params, &terms).expect("basis fits");
                scan.visited += 1;
                scan.covered += 1;
                if !visit(&candidate) {
                    scan.aborted = true;
                    return scan;
                }
                if !step_odometer(&mut rest_coeffs, bound) {
                    break;
                }
            }
        } else {
            scan.covered += branch_size;
        }
        if !step_odometer(&mut free_coeffs, bound) {
            return scan;
        }
    }
}

struct BoxScan {
    covered: u64,
    visited: u64,
    aborted: bool,
}

/// All elements of the coefficient box `[-bound, bound]` whose square is
/// `target · 1`, in canonical order.
pub fn elements_squaring_to(params: Params, bound: i64, target: &BigInt) -> Vec<RingElem> {
    let rhs = RingElem::scalar(params, target.clone());
    let mut out = Vec::new();
    for_each_in_box(
        params,
        bound,
        |base| base.mul(base).expect("same ring").coeff(&Monomial::one()) == *target,
        |a| {
            if a.mul(a).expect("same ring") == rhs {
                out.push(a.clone());
            }
            true
        },
    );
    out
}

/// Exhaustively verifies the square-root classification over the
/// coefficient box: `a^2 = q` holds exactly for the elements of shape
/// `±t_d + f·x_d`.  Skipped branches cannot contain members of either
/// side; visited candidates compare the predicate against the structural
/// shape directly.
pub fn check_square_root_lemma(params: Params, bound: i64) -> CheckReport {
    let suite = "square-root-lemma";
    let q = BigInt::from(params.q().get());
    let mut counterexample = None;
    let scan = for_each_in_box(
        params,
        bound,
        |base| {
            base.mul(base).expect("same ring").coeff(&Monomial::one()) == q
                || base.sqrt_shape().is_some()
        },
        |a| {
            let squares = a.squares_to_q();
            let shaped = a.sqrt_shape().is_some();
            if squares != shaped {
                counterexample = Some(json!({
                    "n": params.n(),
                    "q": params.q().get(),
                    "element": a.to_string(),
                    "squares_to_q": squares,
                    "structural_shape": shaped,
                }));
                return false;
            }
            true
        },
    );
    match counterexample {
        None => CheckReport::pass(suite, 0, scan.covered, None),
        Some(w) => CheckReport::fail(suite, 0, scan.covered - scan.visited, None, w),
    }
}

/// Randomized verification of the twist identities: for random `a` and
/// position `d`,
///
/// * `x_d a = τ_d(a) x_d`,
/// * `t_d τ_d(a) = τ_d(a) t_d`,
/// * `τ_d ∘ τ_d` agrees with the projection killing terms with `d ∈ T`.
pub fn check_tau_identities(
    params: Params,
    trials: u64,
    seed: u64,
    max_terms: usize,
    bound: i64,
) -> CheckReport {
    let suite = "tau-identities";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    for trial in 0..trials {
        let a = random_elem(params, &mut rng, max_terms, bound);
        let d = rng.gen_range(1..=params.n());
        let witness = |law: &str| {
            json!({
                "law": law,
                "trial": trial,
                "d": d,
                "a": a.to_string(),
            })
        };
        let x = RingElem::generator_x(params, d).expect("in range");
        let t = RingElem::generator_t(params, d).expect("in range");
        let tau_a = a.tau(d).expect("in range");
        if x.mul(&a).expect("same ring") != tau_a.mul(&x).expect("same ring") {
            return CheckReport::fail(suite, trials, checked, Some(seed), witness("x_d a = tau_d(a) x_d"));
        }
        checked += 1;
        if t.mul(&tau_a).expect("same ring") != tau_a.mul(&t).expect("same ring") {
            return CheckReport::fail(
                suite,
                trials,
                checked,
                Some(seed),
                witness("t_d tau_d(a) = tau_d(a) t_d"),
            );
        }
        checked += 1;
        let twice = tau_a.tau(d).expect("in range");
        let projected = RingElem::from_terms(
            params,
            a.terms()
                .filter(|(m, _)| !m.has_x(d))
                .map(|(m, c)| (*m, c.clone())),
        )
        .expect("subset of terms");
        if twice != projected {
            return CheckReport::fail(
                suite,
                trials,
                checked,
                Some(seed),
                witness("tau_d^2 = projection"),
            );
        }
        checked += 1;
    }
    CheckReport::pass(suite, trials, checked, Some(seed))
}

/// Exhaustively compares, for random elements `T = ±t_d + f·x_d`, the
/// anticommutant `{X in the box : TX + XT = 0}` with the right ideal
/// `A^{⊗n} x_d` intersected with the same box.
///
/// The anticommutator is linear in `X`, and the x-subset of every monomial
/// of `T·w + w·T` contains the x-subset of `w`; the kernel is therefore
/// enumerated by a depth-first walk over coefficients in order of
/// ascending x-subset, finalizing and pruning each x-grade of the
/// accumulated anticommutator as soon as it is complete.  The walk visits
/// exactly the box elements anticommuting with `T`.
pub fn check_anticommutant_lemma(
    params: Params,
    t_samples: u64,
    bound: i64,
    f_terms: usize,
    f_bound: i64,
    seed: u64,
) -> CheckReport {
    let suite = "anticommutant-lemma";
    let n = params.n();
    if n > 4 {
        return CheckReport::fail(
            suite,
            t_samples,
            0,
            Some(seed),
            json!({ "error": "anticommutant scan supports n <= 4" }),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    for trial in 0..t_samples {
        let d = rng.gen_range(1..=n);
        let sign: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let f = random_elem(params, &mut rng, f_terms, f_bound);
        let t_elem = RingElem::generator_t(params, d)
            .expect("in range")
            .scale(sign)
            .add(
                &f.mul(&RingElem::generator_x(params, d).expect("in range"))
                    .expect("same ring"),
            )
            .expect("same ring");

        let outcome = anticommutant_box(params, &t_elem, bound);
        let kernel = match outcome {
            Ok(k) => k,
            Err(e) => {
                return CheckReport::fail(
                    suite,
                    t_samples,
                    checked,
                    Some(seed),
                    json!({ "trial": trial, "T": t_elem.to_string(), "error": e.to_string() }),
                )
            }
        };

        // every kernel member must lie in the ideal generated by x_d ...
        for x in &kernel {
            if !x.in_ideal_x(d).expect("in range") {
                return CheckReport::fail(
                    suite,
                    t_samples,
                    checked,
                    Some(seed),
                    json!({
                        "trial": trial,
                        "T": t_elem.to_string(),
                        "X": x.to_string(),
                        "anticommutes": true,
                        "in_ideal": false,
                    }),
                );
            }
        }
        // ... and conversely every boxed ideal element must anticommute.
        let ideal_monos = Monomial::all(n)
            .into_iter()
            .filter(|m| m.has_x(d))
            .count();
        let expected = box_size(2 * bound + 1, ideal_monos);
        if kernel.len() as u64 != expected {
            let witness = first_ideal_noncommuting(params, &t_elem, d, bound);
            return CheckReport::fail(
                suite,
                t_samples,
                checked,
                Some(seed),
                json!({
                    "trial": trial,
                    "T": t_elem.to_string(),
                    "kernel_size": kernel.len(),
                    "ideal_box_size": expected,
                    "ideal_witness": witness.map(|x| x.to_string()),
                }),
            );
        }
        // spot-check the wiring through the public predicates
        for x in kernel.iter().take(3) {
            if !t_elem.anticommutes(x).expect("same ring") {
                return CheckReport::fail(
                    suite,
                    t_samples,
                    checked,
                    Some(seed),
                    json!({ "trial": trial, "T": t_elem.to_string(), "X": x.to_string(),
                            "error": "kernel scan disagrees with anticommutes()" }),
                );
            }
        }
        checked += kernel.len() as u64 + expected;
    }
    CheckReport::pass(suite, t_samples, checked, Some(seed))
}

/// Enumerates `{X with coefficients in [-bound, bound] : TX + XT = 0}`.
fn anticommutant_box(params: Params, t_elem: &RingElem, bound: i64) -> Result<Vec<RingElem>> {
    let n = params.n();
    let dense = 1usize << (2 * n);
    let idx_of = |m: &Monomial| ((m.x_mask() as usize) << n) | m.t_mask() as usize;

    // source monomials ordered by ascending x-grade
    let mut monos = Monomial::all(n);
    monos.sort_by_key(|m| (m.x_mask().count_ones(), m.x_mask(), m.t_mask()));

    // dense anticommutator images L(w) = T·w + w·T
    let mut images = Vec::with_capacity(monos.len());
    for w in &monos {
        let w_elem = RingElem::from_monomial(params, *w, 1)?;
        let l = t_elem.mul(&w_elem)?.add(&w_elem.mul(t_elem)?)?;
        let mut row = vec![0i64; dense];
        for (m, c) in l.terms() {
            row[idx_of(m)] = c.to_i64().ok_or_else(|| {
                Error::Invalid("anticommutator coefficient exceeds i64".into())
            })?;
        }
        images.push(row);
    }

    // monomials of each result x-grade, for finalization checks
    let mut grade_slots: std::collections::BTreeMap<u16, Vec<usize>> = Default::default();
    for m in Monomial::all(n) {
        grade_slots.entry(m.x_mask()).or_default().push(idx_of(&m));
    }

    let mut acc = vec![0i64; dense];
    let mut coeffs = vec![0i64; monos.len()];
    let mut found = Vec::new();
    let mut budget: u64 = 200_000_000;

    struct Walk<'a> {
        monos: &'a [Monomial],
        images: &'a [Vec<i64>],
        grade_slots: &'a std::collections::BTreeMap<u16, Vec<usize>>,
        bound: i64,
        params: Params,
    }

    impl Walk<'_> {
        fn go(
            &self,
            pos: usize,
            acc: &mut [i64],
            coeffs: &mut [i64],
            found: &mut Vec<RingElem>,
            budget: &mut u64,
        ) -> Result<()> {
            if *budget == 0 {
                return Err(Error::Invalid("anticommutant scan budget exceeded".into()));
            }
            *budget -= 1;
            if pos == self.monos.len() {
                let terms: Vec<(Monomial, i64)> = self
                    .monos
                    .iter()
                    .copied()
                    .zip(coeffs.iter().copied())
                    .filter(|&(_, c)| c != 0)
                    .collect();
                found.push(RingElem::from_i64_terms(self.params, &terms)?);
                return Ok(());
            }
            let grade_end = pos + 1 == self.monos.len()
                || self.monos[pos + 1].x_mask() != self.monos[pos].x_mask();
            for c in -self.bound..=self.bound {
                coeffs[pos] = c;
                if c != 0 {
                    for (slot, delta) in acc.iter_mut().zip(&self.images[pos]) {
                        *slot += c * delta;
                    }
                }
                let ok = !grade_end
                    || self.grade_slots[&self.monos[pos].x_mask()]
                        .iter()
                        .all(|&i| acc[i] == 0);
                if ok {
                    self.go(pos + 1, acc, coeffs, found, budget)?;
                }
                if c != 0 {
                    for (slot, delta) in acc.iter_mut().zip(&self.images[pos]) {
                        *slot -= c * delta;
                    }
                }
            }
            coeffs[pos] = 0;
            Ok(())
        }
    }

    let walk = Walk {
        monos: &monos,
        images: &images,
        grade_slots: &grade_slots,
        bound,
        params,
    };
    walk.go(0, &mut acc, &mut coeffs, &mut found, &mut budget)?;
    Ok(found)
}

/// Failure-path helper: the first boxed element of the ideal `A x_d` that
/// does not anticommute with `T`, if any.
fn first_ideal_noncommuting(
    params: Params,
    t_elem: &RingElem,
    d: usize,
    bound: i64,
) -> Option<RingElem> {
    let monos: Vec<Monomial> = Monomial::all(params.n())
        .into_iter()
        .filter(|m| m.has_x(d))
        .collect();
    let mut coeffs = vec![-bound; monos.len()];
    loop {
        let terms: Vec<(Monomial, i64)> = monos
            .iter()
            .copied()
            .zip(coeffs.iter().copied())
            .filter(|&(_, c)| c != 0)
            .collect();
        let x = RingElem::from_i64_terms(params, &terms).expect("basis fits");
        if !t_elem.anticommutes(&x).expect("same ring") {
            return Some(x);
        }
        if !step_odometer(&mut coeffs, bound) {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Q;
    use super::*;
    use num_traits::Zero;

    fn params(n: usize, q: u64) -> Params {
        Params::new(n, Q::parse(q).unwrap()).unwrap()
    }

    #[test]
    fn square_roots_n1_bound1() {
        // {a : a^2 = q} in the [-1,1] box over A is exactly
        // {±t + αx + βtx}, 18 elements.
        let p = params(1, 2);
        let roots = elements_squaring_to(p, 1, &BigInt::from(2));
        assert_eq!(roots.len(), 18);
        for a in &roots {
            assert!(a.sqrt_shape().is_some());
        }
    }

    #[test]
    fn square_root_lemma_small() {
        for q in [2u64, 3] {
            let report = check_square_root_lemma(params(1, q), 1);
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.checked, 81);
        }
    }

    #[test]
    fn elements_squaring_to_zero() {
        // square-zero elements of A in the [-1,1] box: multiples of x and
        // tx and their sums, i.e. {αx + βtx}, 9 elements.
        let p = params(1, 2);
        let nil = elements_squaring_to(p, 1, &BigInt::zero());
        assert_eq!(nil.len(), 9);
        for a in &nil {
            assert!(a.in_ideal_x(1).unwrap());
        }
    }

    #[test]
    fn tau_identities_pass() {
        let report = check_tau_identities(params(3, 2), 300, 9, 5, 3);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checked, 900);
    }

    #[test]
    fn anticommutant_small() {
        let report = check_anticommutant_lemma(params(2, 2), 20, 1, 3, 2, 123);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn anticommutant_kernel_matches_bruteforce() {
        // cross-check the graded walk against a direct box filter
        let p = params(1, 2);
        let t = RingElem::parse(p, "t{1}x{} + t{1}x{1}").unwrap();
        let fast: std::collections::BTreeSet<RingElem> =
            anticommutant_box(p, &t, 2).unwrap().into_iter().collect();
        let mut slow = std::collections::BTreeSet::new();
        let monos = Monomial::all(1);
        let mut coeffs = vec![-2i64; 4];
        loop {
            let terms: Vec<(Monomial, i64)> = monos
                .iter()
                .copied()
                .zip(coeffs.iter().copied())
                .filter(|&(_, c)| c != 0)
                .collect();
            let x = RingElem::from_i64_terms(p, &terms).unwrap();
            if t.anticommutes(&x).unwrap() {
                slow.insert(x);
            }
            if !step_odometer(&mut coeffs, 2) {
                break;
            }
        }
        assert_eq!(fast, slow);
    }
}
