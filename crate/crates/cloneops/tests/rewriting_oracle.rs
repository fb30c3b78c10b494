//! Independent oracle for the ring arithmetic: elements as integer
//! combinations of generator words, multiplied by literal term rewriting
//! with the defining relations, with no shared code with the bitmask
//! implementation.  Used to cross-check the basis-rule product and to
//! re-derive the associativity counterexample through a disjoint route.

use std::collections::BTreeMap;

use cloneops::zring::{Monomial, Params, Q, RingElem};
use num_traits::ToPrimitive;

/// A generator of `A^{⊗n}`: `t_i` or `x_i` with a 1-based position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Gen {
    T(usize),
    X(usize),
}

impl Gen {
    fn pos(self) -> usize {
        match self {
            Gen::T(i) | Gen::X(i) => i,
        }
    }

    fn is_x(self) -> bool {
        matches!(self, Gen::X(_))
    }
}

/// Normalizes a word of generators into `(coefficient, sorted word)` by
/// insertion sort with the relations:
///
/// * generators at distinct positions commute,
/// * `x_i t_i = -t_i x_i`,
/// * `t_i t_i = q` (a scalar factor), `x_i x_i = 0`.
///
/// The normal form lists `t`s and `x`s position by position, `t` first.
fn normalize(q: u64, word: &[Gen]) -> Option<(i64, Vec<Gen>)> {
    let mut out: Vec<Gen> = Vec::with_capacity(word.len());
    let mut coeff: i64 = 1;
    let key = |g: Gen| (g.pos(), g.is_x());
    for &g in word {
        out.push(g);
        let mut i = out.len() - 1;
        while i > 0 && key(out[i - 1]) > key(out[i]) {
            // adjacent swap: a sign appears only for x_i t_i -> -t_i x_i
            if out[i - 1].pos() == out[i].pos() {
                coeff = -coeff;
            }
            out.swap(i - 1, i);
            i -= 1;
        }
    }
    // collapse equal adjacent generators
    let mut reduced: Vec<Gen> = Vec::with_capacity(out.len());
    for g in out {
        if reduced.last() == Some(&g) {
            match g {
                Gen::T(_) => {
                    reduced.pop();
                    coeff = coeff.checked_mul(i64::try_from(q).ok()?)?;
                }
                Gen::X(_) => return None, // x_i x_i = 0
            }
        } else {
            reduced.push(g);
        }
    }
    Some((coeff, reduced))
}

/// An element as a map from normal words to coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
struct WordElem {
    q: u64,
    terms: BTreeMap<Vec<Gen>, i64>,
}

impl WordElem {
    fn zero(q: u64) -> Self {
        WordElem {
            q,
            terms: BTreeMap::new(),
        }
    }

    fn add_term(&mut self, coeff: i64, word: &[Gen]) {
        if let Some((sign, normal)) = normalize(self.q, word) {
            let c = self.terms.entry(normal.clone()).or_insert(0);
            *c += coeff * sign;
            if *c == 0 {
                self.terms.remove(&normal);
            }
        }
    }

    fn add(&self, other: &WordElem) -> WordElem {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            let slot = out.terms.entry(w.clone()).or_insert(0);
            *slot += c;
            if *slot == 0 {
                out.terms.remove(w);
            }
        }
        out
    }

    fn mul(&self, other: &WordElem) -> WordElem {
        let mut out = WordElem::zero(self.q);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut joined = wa.clone();
                joined.extend_from_slice(wb);
                out.add_term(ca * cb, &joined);
            }
        }
        out
    }

    fn scale(&self, k: i64) -> WordElem {
        if k == 0 {
            return WordElem::zero(self.q);
        }
        WordElem {
            q: self.q,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect(),
        }
    }
}

/// Converts a bitmask element into word form (translation only; no
/// arithmetic shared).
fn to_words(e: &RingElem) -> WordElem {
    let mut out = WordElem::zero(e.q().get());
    for (mono, coeff) in e.terms() {
        let mut word = Vec::new();
        for i in 1..=e.n() {
            if mono.has_t(i) {
                word.push(Gen::T(i));
            }
        }
        for i in 1..=e.n() {
            if mono.has_x(i) {
                word.push(Gen::X(i));
            }
        }
        out.add_term(coeff.to_i64().expect("test coefficients are small"), &word);
    }
    out
}

fn params(n: usize, q: u64) -> Params {
    Params::new(n, Q::parse(q).unwrap()).unwrap()
}

#[test]
fn rewriting_agrees_with_basis_rule_on_all_monomial_pairs() {
    for q in [2u64, 3, 5] {
        for n in 1..=3 {
            let p = params(n, q);
            let monos = Monomial::all(n);
            for &ma in &monos {
                let a = RingElem::from_monomial(p, ma, 1).unwrap();
                for &mb in &monos {
                    let b = RingElem::from_monomial(p, mb, 1).unwrap();
                    let fast = to_words(&a.mul(&b).unwrap());
                    let slow = to_words(&a).mul(&to_words(&b));
                    assert_eq!(fast, slow, "monomials {ma:?} · {mb:?} at n={n}, q={q}");
                }
            }
        }
    }
}

#[test]
fn rewriting_agrees_on_random_elements() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let p = params(3, 3);
        let a = cloneops::zring::random_elem(p, &mut rng, 5, 3);
        let b = cloneops::zring::random_elem(p, &mut rng, 5, 3);
        assert_eq!(to_words(&a.mul(&b).unwrap()), to_words(&a).mul(&to_words(&b)));
    }
}

/// A substitution built purely on the word arithmetic: expand each image
/// of the outer morphism in normal words, send the generators at position
/// `i` through the `i`-th inner morphism, and multiply left to right.
fn word_bullet(
    q: u64,
    phi: (&WordElem, &WordElem),
    psis: &[(WordElem, WordElem)],
) -> (WordElem, WordElem) {
    let contract = |image: &WordElem| {
        let mut acc = WordElem::zero(q);
        for (word, coeff) in &image.terms {
            let mut product = WordElem::zero(q);
            product.add_term(1, &[]);
            // normal words list each position's t before its x, so walking
            // the word left to right visits positions in ascending order
            for g in word {
                let (img_t, img_x) = &psis[g.pos() - 1];
                let factor = if g.is_x() { img_x } else { img_t };
                product = product.mul(factor);
            }
            acc = acc.add(&product.scale(*coeff));
        }
        acc
    };
    (contract(phi.0), contract(phi.1))
}

#[test]
fn associativity_counterexample_reproduces_under_rewriting() {
    // the same minimal instance as
    // endo_operad::tests::bullet_associativity_counterexample, recomputed
    // entirely in the word arithmetic
    let q = 2u64;
    let t = |i| Gen::T(i);
    let x = |i| Gen::X(i);
    let elem = |terms: &[(i64, &[Gen])]| {
        let mut e = WordElem::zero(q);
        for (c, w) in terms {
            e.add_term(*c, w);
        }
        e
    };

    // φ = ψ2 = (t -> t_1 + t_2 x_1, x -> x_1), ψ1 = π_2, ρ = id
    let phi_t = elem(&[(1, &[t(1)]), (1, &[t(2), x(1)])]);
    let phi_x = elem(&[(1, &[x(1)])]);
    let psi1 = (elem(&[(1, &[t(2)])]), elem(&[(1, &[x(2)])]));
    let psi2 = (phi_t.clone(), phi_x.clone());
    let id = (elem(&[(1, &[t(1)])]), elem(&[(1, &[x(1)])]));
    let rhos = [id.clone(), id];

    let sigma1 = word_bullet(q, (&psi1.0, &psi1.1), &rhos);
    let sigma2 = word_bullet(q, (&psi2.0, &psi2.1), &rhos);
    let lhs = word_bullet(q, (&phi_t, &phi_x), &[sigma1, sigma2]);

    let beta = word_bullet(q, (&phi_t, &phi_x), &[psi1, psi2]);
    let rhs = word_bullet(q, (&beta.0, &beta.1), &rhos);

    // t - tx  vs  t + tx
    assert_eq!(lhs.0, elem(&[(1, &[t(1)]), (-1, &[t(1), x(1)])]));
    assert_eq!(rhs.0, elem(&[(1, &[t(1)]), (1, &[t(1), x(1)])]));
    assert_eq!(lhs.1, rhs.1);
    assert_ne!(lhs.0, rhs.0);

    // and it matches the bitmask implementation term for term
    let p2 = params(2, q);
    let m_phi = cloneops::endo_operad::GenImages::new(
        RingElem::parse(p2, "t{1}x{} + t{2}x{1}").unwrap(),
        RingElem::parse(p2, "t{}x{1}").unwrap(),
    )
    .unwrap();
    let m_psi1 = cloneops::endo_operad::GenImages::projection(p2, 2).unwrap();
    let m_id = cloneops::endo_operad::GenImages::projection(params(1, q), 1).unwrap();
    let m_rhos = [m_id.clone(), m_id];
    let m_sigma1 = cloneops::endo_operad::bullet(&m_psi1, &m_rhos).unwrap();
    let m_sigma2 = cloneops::endo_operad::bullet(&m_phi, &m_rhos).unwrap();
    let m_lhs = cloneops::endo_operad::bullet(&m_phi, &[m_sigma1, m_sigma2]).unwrap();
    let m_beta = cloneops::endo_operad::bullet(&m_phi, &[m_psi1, m_phi.clone()]).unwrap();
    let m_rhs = cloneops::endo_operad::bullet(&m_beta, &m_rhos).unwrap();
    assert_eq!(to_words(m_lhs.img_t()), lhs.0);
    assert_eq!(to_words(m_rhs.img_t()), rhs.0);
}

#[test]
fn word_bullet_agrees_with_bitmask_bullet_on_random_morphisms() {
    use cloneops::endo_operad::{bullet, random_morphism};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let phi = random_morphism(params(m, 2), &mut rng, 3, 2);
        let psis: Vec<_> = (0..m)
            .map(|_| random_morphism(params(n, 2), &mut rng, 3, 2))
            .collect();
        let direct = bullet(&phi, &psis).unwrap();

        let word_psis: Vec<(WordElem, WordElem)> = psis
            .iter()
            .map(|p| (to_words(p.img_t()), to_words(p.img_x())))
            .collect();
        let (wt, wx) = word_bullet(
            2,
            (&to_words(phi.img_t()), &to_words(phi.img_x())),
            &word_psis,
        );
        assert_eq!(to_words(direct.img_t()), wt);
        assert_eq!(to_words(direct.img_x()), wx);
    }
}
