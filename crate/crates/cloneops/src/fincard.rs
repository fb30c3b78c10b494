//! The opposite category of finite cardinals: selections, their monoidal
//! sum, uniform copying and deletion, canonical projections and the
//! substitution product.
//!
//! A *selection* `[n] -> [m]` picks an `m`-tuple out of an `n`-tuple, with
//! repetition and omission allowed.  It is stored as the underlying index
//! map `[m] -> [n]`, one 1-based index per output position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A morphism `[n] -> [m]` in the opposite category of finite cardinals.
///
/// `values[j]` is the (1-based) source index selected for output position
/// `j + 1`.  Both `n` and `m` may be zero; `[n] -> [0]` is the empty
/// selection, which is a legal value rather than an error.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSelection", into = "RawSelection")]
pub struct Selection {
    source_size: usize,
    values: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSelection {
    n: usize,
    values: Vec<usize>,
}

impl TryFrom<RawSelection> for Selection {
    type Error = Error;
    fn try_from(raw: RawSelection) -> Result<Self> {
        Selection::new(raw.n, raw.values)
    }
}

impl From<Selection> for RawSelection {
    fn from(s: Selection) -> Self {
        RawSelection {
            n: s.source_size,
            values: s.values,
        }
    }
}

impl Selection {
    /// Builds a selection `[source_size] -> [values.len()]`, checking that
    /// every entry lies in `1..=source_size`.
    pub fn new(source_size: usize, values: Vec<usize>) -> Result<Self> {
        for &v in &values {
            if v == 0 || v > source_size {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    max: source_size,
                });
            }
        }
        Ok(Selection {
            source_size,
            values,
        })
    }

    /// The identity selection `[n] -> [n]`.
    pub fn identity(n: usize) -> Self {
        Selection {
            source_size: n,
            values: (1..=n).collect(),
        }
    }

    /// Uniform copying `[n] -> [2n]`, selecting `(1,..,n,1,..,n)`.
    pub fn delta(n: usize) -> Self {
        Selection {
            source_size: n,
            values: (1..=n).chain(1..=n).collect(),
        }
    }

    /// Uniform deletion `[n] -> [0]`, the empty selection.
    pub fn epsilon(n: usize) -> Self {
        Selection {
            source_size: n,
            values: Vec::new(),
        }
    }

    /// Uniform copying applied `m - 1` times: `[n] -> [m*n]` selecting
    /// `(1,..,n)` repeated `m` times.  `m = 0` is rejected.
    pub fn delta_power(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid(
                "delta_power requires at least one copy (m >= 1)".into(),
            ));
        }
        let mut values = Vec::with_capacity(n * m);
        for _ in 0..m {
            values.extend(1..=n);
        }
        Ok(Selection {
            source_size: n,
            values,
        })
    }

    /// The canonical projection `[m_1 + .. + m_k] -> [m_i]` onto the `i`-th
    /// block (1-based `i`).
    pub fn proj(i: usize, sizes: &[usize]) -> Result<Self> {
        if i == 0 || i > sizes.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: sizes.len(),
            });
        }
        let total: usize = sizes.iter().sum();
        let offset: usize = sizes[..i - 1].iter().sum();
        Ok(Selection {
            source_size: total,
            values: (offset + 1..=offset + sizes[i - 1]).collect(),
        })
    }

    /// Source cardinality `n` of `[n] -> [m]`.
    pub fn source_size(&self) -> usize {
        self.source_size
    }

    /// Target cardinality `m` of `[n] -> [m]`.
    pub fn target_size(&self) -> usize {
        self.values.len()
    }

    /// The underlying index map `[m] -> [n]`, 1-based.
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_identity(&self) -> bool {
        self.values.len() == self.source_size
            && self.values.iter().enumerate().all(|(j, &v)| v == j + 1)
    }
}

/// Composition `g ∘ f : [n] -> [k]` of selections `f : [n] -> [m]` and
/// `g : [m] -> [k]`.  On underlying maps this is `f ∘ g` read right to
/// left: the result selects `f.values[g.values[j]]` at position `j`.
pub fn compose(g: &Selection, f: &Selection) -> Result<Selection> {
    if g.source_size != f.values.len() {
        return Err(Error::ArityMismatch(format!(
            "cannot compose [{}]->[{}] after [{}]->[{}]",
            g.source_size,
            g.values.len(),
            f.source_size,
            f.values.len()
        )));
    }
    Ok(Selection {
        source_size: f.source_size,
        values: g.values.iter().map(|&j| f.values[j - 1]).collect(),
    })
}

/// Monoidal sum `f1 ⊕ f2`: acts as `f1` on the first block and as `f2`
/// shifted by `n1` on the second.
pub fn oplus(f1: &Selection, f2: &Selection) -> Selection {
    let mut values = f1.values.clone();
    values.extend(f2.values.iter().map(|&v| v + f1.source_size));
    Selection {
        source_size: f1.source_size + f2.source_size,
        values,
    }
}

/// Monoidal sum of a list of selections (empty list gives the identity of
/// `[0]`).
pub fn oplus_all(fs: &[Selection]) -> Selection {
    fs.iter().fold(Selection::epsilon(0), |acc, f| oplus(&acc, f))
}

/// Substitution `f ≀ (g_1, .., g_n)` of selections `g_i : [n_i] -> [m_i]`
/// into `f : [n] -> [m]`.
///
/// The result is the selection `[n_1 + .. + n_n] -> [m_{f[1]} + .. +
/// m_{f[m]}]` whose `j`-th block is `g_{f[j]}` shifted by the offset of
/// source block `f[j]`.  This is block index arithmetic for
/// `(g_{f[1]} ⊗ .. ⊗ g_{f[m]}) ∘ π^(f)`; the equivalence with the
/// projection route is checked in the test suite.
pub fn substitute(f: &Selection, gs: &[Selection]) -> Result<Selection> {
    if gs.len() != f.source_size {
        return Err(Error::ArityMismatch(format!(
            "substitute expects {} selections, got {}",
            f.source_size,
            gs.len()
        )));
    }
    let mut offsets = Vec::with_capacity(gs.len());
    let mut total = 0usize;
    for g in gs {
        offsets.push(total);
        total += g.source_size;
    }
    let mut values = Vec::new();
    for &i in &f.values {
        let g = &gs[i - 1];
        let offset = offsets[i - 1];
        values.extend(g.values.iter().map(|&v| v + offset));
    }
    Ok(Selection {
        source_size: total,
        values,
    })
}

/// The canonical morphism `π^(f)` of a selection, materialized as a
/// selection itself: `π^(f) = f ≀ (id, .., id)` over source blocks of the
/// given sizes.
pub fn pi_of(f: &Selection, sizes: &[usize]) -> Result<Selection> {
    if sizes.len() != f.source_size {
        return Err(Error::ArityMismatch(format!(
            "pi_of expects {} block sizes, got {}",
            f.source_size,
            sizes.len()
        )));
    }
    let ids: Vec<Selection> = sizes.iter().map(|&k| Selection::identity(k)).collect();
    substitute(f, &ids)
}

/// Randomized suite over the selection calculus: associativity of
/// composition, the interchange law between composition and the monoidal
/// sum, coassociativity of iterated copying, counitality of copying
/// against the block projections, and agreement of the direct block
/// substitution with the projection route.
pub fn check_selection_laws(trials: u64, seed: u64, max_n: usize) -> crate::report::CheckReport {
    use rand::SeedableRng;
    let suite = "selection-laws";
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    let fail = |checked: u64, witness: serde_json::Value| {
        crate::report::CheckReport::fail(suite, trials, checked, Some(seed), witness)
    };
    for trial in 0..trials {
        use rand::Rng;
        // associativity on a composable triple
        let f = random_selection(&mut rng, max_n);
        let g = random_selection_from(&mut rng, f.target_size(), max_n);
        let h = random_selection_from(&mut rng, g.target_size(), max_n);
        let lhs = compose(&h, &compose(&g, &f).expect("composable"));
        let rhs = compose(&compose(&h, &g).expect("composable"), &f);
        if lhs != rhs {
            return fail(
                checked,
                serde_json::json!({ "law": "associativity", "trial": trial, "f": f, "g": g, "h": h }),
            );
        }
        checked += 1;

        // interchange of ⊕ with composition
        let f1 = random_selection(&mut rng, max_n);
        let g1 = random_selection_from(&mut rng, f1.target_size(), max_n);
        let f2 = random_selection(&mut rng, max_n);
        let g2 = random_selection_from(&mut rng, f2.target_size(), max_n);
        let lhs = oplus(
            &compose(&g1, &f1).expect("composable"),
            &compose(&g2, &f2).expect("composable"),
        );
        let rhs = compose(&oplus(&g1, &g2), &oplus(&f1, &f2)).expect("composable");
        if lhs != rhs {
            return fail(
                checked,
                serde_json::json!({ "law": "interchange", "trial": trial, "f1": f1, "g1": g1, "f2": f2, "g2": g2 }),
            );
        }
        checked += 1;

        // coassociativity: both bracketings of one more copy agree
        let n = rng.gen_range(0..=max_n);
        let m = rng.gen_range(1..=max_n.max(1));
        let next = Selection::delta_power(n, m + 1).expect("m+1 >= 1");
        let base = Selection::delta_power(n, m).expect("m >= 1");
        let left = compose(
            &oplus(&Selection::delta(n), &Selection::identity((m - 1) * n)),
            &base,
        )
        .expect("composable");
        let right = compose(
            &oplus(&Selection::identity((m - 1) * n), &Selection::delta(n)),
            &base,
        )
        .expect("composable");
        if next != left || next != right {
            return fail(
                checked,
                serde_json::json!({ "law": "coassociativity", "trial": trial, "n": n, "m": m }),
            );
        }
        checked += 1;

        // counitality of Δ against the two block projections
        let d = Selection::delta(n);
        let keep_first = compose(&Selection::proj(1, &[n, n]).expect("valid"), &d);
        let keep_second = compose(&Selection::proj(2, &[n, n]).expect("valid"), &d);
        if keep_first != Ok(Selection::identity(n)) || keep_second != Ok(Selection::identity(n)) {
            return fail(
                checked,
                serde_json::json!({ "law": "counitality", "trial": trial, "n": n }),
            );
        }
        checked += 1;

        // substitution agrees with the projection route
        let f = random_selection(&mut rng, max_n);
        let gs: Vec<Selection> = (0..f.source_size())
            .map(|_| random_selection(&mut rng, max_n))
            .collect();
        let direct = substitute(&f, &gs).expect("lengths match");
        let sizes: Vec<usize> = gs.iter().map(|g| g.source_size()).collect();
        let pi = pi_of(&f, &sizes).expect("lengths match");
        let picked: Vec<Selection> = f.values().iter().map(|&i| gs[i - 1].clone()).collect();
        let via_pi = compose(&oplus_all(&picked), &pi).expect("composable");
        if direct != via_pi {
            return fail(
                checked,
                serde_json::json!({ "law": "substitution", "trial": trial, "f": f, "gs": gs, "direct": direct, "via_pi": via_pi }),
            );
        }
        checked += 1;
    }
    crate::report::CheckReport::pass(suite, trials, checked, Some(seed))
}

/// Samples a selection `[n] -> [m]` with `n, m <= max_n` uniformly over
/// index maps.  A source of size 0 forces the empty target.
pub fn random_selection(rng: &mut impl rand::Rng, max_n: usize) -> Selection {
    let n = rng.gen_range(0..=max_n);
    let m = if n == 0 { 0 } else { rng.gen_range(0..=max_n) };
    let values = (0..m).map(|_| rng.gen_range(1..=n)).collect();
    Selection {
        source_size: n,
        values,
    }
}

/// Samples a selection with the given source size.
pub fn random_selection_from(rng: &mut impl rand::Rng, n: usize, max_m: usize) -> Selection {
    let m = if n == 0 { 0 } else { rng.gen_range(0..=max_m) };
    let values = (0..m).map(|_| rng.gen_range(1..=n)).collect();
    Selection {
        source_size: n,
        values,
    }
}
