//! The cartesian category of finite sets as a concrete model: tuple
//! selections, the classical clone of finitary operations on a finite
//! carrier, and clone closure of a generating set.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::clone_core::{AbstractClone, CartesianOperad};
use crate::error::{Error, Result};
use crate::fincard::{self, Selection};
use crate::report::CheckReport;

/// A finitary operation `X^k -> X` on the carrier `{0, .., s-1}`, tabulated
/// densely in row-major order with the last argument varying fastest.
///
/// The derived `Ord` (carrier, arity, table) gives a total order on
/// operations, which keeps closure output deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawFiniteOp", into = "RawFiniteOp")]
pub struct FiniteOp {
    carrier: usize,
    arity: usize,
    table: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct RawFiniteOp {
    s: usize,
    arity: usize,
    table: Vec<u8>,
}

impl TryFrom<RawFiniteOp> for FiniteOp {
    type Error = Error;
    fn try_from(raw: RawFiniteOp) -> Result<Self> {
        FiniteOp::new(raw.s, raw.arity, raw.table)
    }
}

impl From<FiniteOp> for RawFiniteOp {
    fn from(op: FiniteOp) -> Self {
        RawFiniteOp {
            s: op.carrier,
            arity: op.arity,
            table: op.table,
        }
    }
}

impl FiniteOp {
    pub fn new(carrier: usize, arity: usize, table: Vec<u8>) -> Result<Self> {
        if carrier == 0 || carrier > 255 {
            return Err(Error::Invalid(format!(
                "carrier size {carrier} out of range 1..=255"
            )));
        }
        let expected = carrier.checked_pow(arity as u32).ok_or_else(|| {
            Error::Invalid(format!("table size {carrier}^{arity} overflows"))
        })?;
        if table.len() != expected {
            return Err(Error::Invalid(format!(
                "table length {} does not match {carrier}^{arity} = {expected}",
                table.len()
            )));
        }
        if table.iter().any(|&v| (v as usize) >= carrier) {
            return Err(Error::Invalid("table entry outside carrier".into()));
        }
        Ok(FiniteOp {
            carrier,
            arity,
            table,
        })
    }

    /// The projection `π_{i,n}` on the given carrier, `1 <= i <= n`.
    pub fn projection(i: usize, n: usize, carrier: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, max: n });
        }
        let mut table = vec![0u8; carrier.pow(n as u32)];
        for (idx, slot) in table.iter_mut().enumerate() {
            *slot = tuple_of_index(idx, n, carrier)[i - 1];
        }
        FiniteOp::new(carrier, n, table)
    }

    /// Tabulates `f` over all `carrier^arity` argument tuples.
    pub fn from_fn(
        carrier: usize,
        arity: usize,
        mut f: impl FnMut(&[u8]) -> u8,
    ) -> Result<Self> {
        let mut table = vec![0u8; carrier.pow(arity as u32)];
        for (idx, slot) in table.iter_mut().enumerate() {
            *slot = f(&tuple_of_index(idx, arity, carrier));
        }
        FiniteOp::new(carrier, arity, table)
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Evaluates the operation on one argument tuple.
    pub fn apply(&self, args: &[u8]) -> Result<u8> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch(format!(
                "operation of arity {} applied to {} arguments",
                self.arity,
                args.len()
            )));
        }
        let mut idx = 0usize;
        for &a in args {
            if (a as usize) >= self.carrier {
                return Err(Error::Invalid("argument outside carrier".into()));
            }
            idx = idx * self.carrier + a as usize;
        }
        Ok(self.table[idx])
    }
}

fn tuple_of_index(mut idx: usize, arity: usize, carrier: usize) -> Vec<u8> {
    let mut out = vec![0u8; arity];
    for slot in out.iter_mut().rev() {
        *slot = (idx % carrier) as u8;
        idx /= carrier;
    }
    out
}

/// Applies a selection to a tuple: `result[j] = x[f.values[j]]`.
pub fn apply_selection<T: Clone>(f: &Selection, x: &[T]) -> Result<Vec<T>> {
    if x.len() != f.source_size() {
        return Err(Error::ArityMismatch(format!(
            "selection from [{}] applied to a tuple of length {}",
            f.source_size(),
            x.len()
        )));
    }
    Ok(f.values().iter().map(|&i| x[i - 1].clone()).collect())
}

/// Shared-argument composition `φ • (ψ_1, .., ψ_m)`:
/// `result(x⃗) = φ(ψ_1(x⃗), .., ψ_m(x⃗))`.
///
/// The common arity of the `ψ_i` is inferred, so the list must be nonempty;
/// use [`set_bullet_at`] when composing a constant (`m = 0`).
pub fn set_bullet(phi: &FiniteOp, psis: &[FiniteOp]) -> Result<FiniteOp> {
    let n = psis
        .first()
        .ok_or_else(|| {
            Error::ArityMismatch(
                "set_bullet with no arguments cannot infer the target arity; use set_bullet_at"
                    .into(),
            )
        })?
        .arity();
    set_bullet_at(phi, psis, n)
}

/// Shared-argument composition with an explicit target arity, covering the
/// nullary case `φ • () ∈ C_n` for constants `φ ∈ C_0`.
pub fn set_bullet_at(phi: &FiniteOp, psis: &[FiniteOp], n: usize) -> Result<FiniteOp> {
    if psis.len() != phi.arity() {
        return Err(Error::ArityMismatch(format!(
            "bullet expects {} arguments, got {}",
            phi.arity(),
            psis.len()
        )));
    }
    let s = phi.carrier_size();
    for psi in psis {
        if psi.carrier_size() != s {
            return Err(Error::ParamMismatch("mixed carriers in bullet".into()));
        }
        if psi.arity() != n {
            return Err(Error::ArityMismatch(
                "bullet arguments must share one arity".into(),
            ));
        }
    }
    let mut inner = vec![0u8; psis.len()];
    FiniteOp::from_fn(s, n, |args| {
        for (slot, psi) in inner.iter_mut().zip(psis) {
            *slot = psi.apply(args).expect("arity checked");
        }
        phi.apply(&inner).expect("arity checked")
    })
}

/// The projection `π_{i,n}` as a tabulated operation.
pub fn set_projection(i: usize, n: usize, carrier: usize) -> Result<FiniteOp> {
    FiniteOp::projection(i, n, carrier)
}

/// All operations of the given arity on the carrier, in table order.
pub fn all_ops(carrier: usize, arity: usize) -> Vec<FiniteOp> {
    let len = carrier.pow(arity as u32);
    let count = carrier.pow(len as u32);
    let mut out = Vec::with_capacity(count);
    let mut table = vec![0u8; len];
    loop {
        out.push(FiniteOp::new(carrier, arity, table.clone()).expect("valid table"));
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if (table[pos] as usize) + 1 < carrier {
                table[pos] += 1;
                table[pos + 1..].fill(0);
                break;
            }
        }
    }
}

/// Smallest set of operations containing all projections of arity
/// `1..=max_arity` and the given generators (of arity `<= max_arity`),
/// closed under shared-argument composition within the arity cap.
/// Deterministic fixpoint iteration over a totally ordered set.
pub fn clone_closure(generators: &[FiniteOp], max_arity: usize) -> Result<BTreeSet<FiniteOp>> {
    let carrier = match generators.first() {
        Some(g) => g.carrier_size(),
        None => {
            return Err(Error::Invalid(
                "clone_closure needs at least one generator to fix the carrier; \
                 use clone_closure_on for a bare carrier"
                    .into(),
            ))
        }
    };
    clone_closure_on(carrier, generators, max_arity)
}

/// [`clone_closure`] with the carrier given explicitly, so the generator
/// set may be empty (yielding exactly the projections).
pub fn clone_closure_on(
    carrier: usize,
    generators: &[FiniteOp],
    max_arity: usize,
) -> Result<BTreeSet<FiniteOp>> {
    let mut set: BTreeSet<FiniteOp> = BTreeSet::new();
    for n in 1..=max_arity {
        for i in 1..=n {
            set.insert(FiniteOp::projection(i, n, carrier)?);
        }
    }
    for g in generators {
        if g.carrier_size() != carrier {
            return Err(Error::ParamMismatch("mixed carriers in closure".into()));
        }
        if g.arity() <= max_arity {
            set.insert(g.clone());
        }
    }
    loop {
        let snapshot: Vec<FiniteOp> = set.iter().cloned().collect();
        let mut added = false;
        for phi in &snapshot {
            let m = phi.arity();
            for n in 0..=max_arity {
                let inner: Vec<&FiniteOp> =
                    snapshot.iter().filter(|o| o.arity() == n).collect();
                if inner.is_empty() && m > 0 {
                    continue;
                }
                let mut pick = vec![0usize; m];
                'tuples: loop {
                    let psis: Vec<FiniteOp> =
                        pick.iter().map(|&k| inner[k].clone()).collect();
                    let composed = set_bullet_at(phi, &psis, n)?;
                    if set.insert(composed) {
                        added = true;
                    }
                    let mut pos = m;
                    loop {
                        if pos == 0 {
                            break 'tuples;
                        }
                        pos -= 1;
                        if pick[pos] + 1 < inner.len() {
                            pick[pos] += 1;
                            pick[pos + 1..].fill(0);
                            break;
                        }
                    }
                }
            }
        }
        if !added {
            return Ok(set);
        }
    }
}

/// Random tuple over the carrier.
fn random_tuple(rng: &mut ChaCha8Rng, len: usize, carrier: usize) -> Vec<u8> {
    use rand::Rng;
    (0..len).map(|_| rng.gen_range(0..carrier) as u8).collect()
}

/// Verifies the six defining identities of the canonical tuple selections
/// `π^(f)` in the finite-set model, on random selections and tuples:
///
/// 1. identity selection acts as the identity,
/// 2. contravariant compatibility with composition,
/// 3. compatibility with the monoidal sum (tuple concatenation),
/// 4. uniform copying duplicates the tuple,
/// 5. uniform deletion yields the empty tuple,
/// 6. the block projection picks the block.
pub fn check_pi_properties(
    trials: u64,
    max_n: usize,
    carrier_size: usize,
    seed: u64,
) -> CheckReport {
    let suite = "pi-properties";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    let fail = |checked: u64, witness: serde_json::Value| {
        CheckReport::fail(suite, trials, checked, Some(seed), witness)
    };
    for trial in 0..trials {
        use rand::Rng;
        // (1) identity
        let n = rng.gen_range(0..=max_n);
        let x = random_tuple(&mut rng, n, carrier_size);
        if apply_selection(&Selection::identity(n), &x).unwrap() != x {
            return fail(checked, json!({ "property": 1, "trial": trial, "x": x }));
        }
        checked += 1;

        // (2) composition: π^(g ∘ f) = π^(g) ∘ π^(f) read on tuples
        let f = fincard::random_selection(&mut rng, max_n);
        let g = fincard::random_selection_from(&mut rng, f.target_size(), max_n);
        let x = random_tuple(&mut rng, f.source_size(), carrier_size);
        let composed = fincard::compose(&g, &f).unwrap();
        let lhs = apply_selection(&composed, &x).unwrap();
        let rhs = apply_selection(&g, &apply_selection(&f, &x).unwrap()).unwrap();
        if lhs != rhs {
            return fail(
                checked,
                json!({ "property": 2, "trial": trial, "f": f, "g": g, "x": x, "lhs": lhs, "rhs": rhs }),
            );
        }
        checked += 1;

        // (3) monoidal sum: π^(f1 ⊕ f2) = π^(f1) ⊗ π^(f2)
        let f1 = fincard::random_selection(&mut rng, max_n);
        let f2 = fincard::random_selection(&mut rng, max_n);
        let x1 = random_tuple(&mut rng, f1.source_size(), carrier_size);
        let x2 = random_tuple(&mut rng, f2.source_size(), carrier_size);
        let mut joined = x1.clone();
        joined.extend_from_slice(&x2);
        let lhs = apply_selection(&fincard::oplus(&f1, &f2), &joined).unwrap();
        let mut rhs = apply_selection(&f1, &x1).unwrap();
        rhs.extend(apply_selection(&f2, &x2).unwrap());
        if lhs != rhs {
            return fail(
                checked,
                json!({ "property": 3, "trial": trial, "f1": f1, "f2": f2, "x": joined }),
            );
        }
        checked += 1;

        // (4) uniform copying
        let n = rng.gen_range(0..=max_n);
        let x = random_tuple(&mut rng, n, carrier_size);
        let mut doubled = x.clone();
        doubled.extend_from_slice(&x);
        if apply_selection(&Selection::delta(n), &x).unwrap() != doubled {
            return fail(checked, json!({ "property": 4, "trial": trial, "x": x }));
        }
        checked += 1;

        // (5) uniform deletion
        if !apply_selection(&Selection::epsilon(n), &x).unwrap().is_empty() {
            return fail(checked, json!({ "property": 5, "trial": trial, "x": x }));
        }
        checked += 1;

        // (6) block projection picks the block
        let k = rng.gen_range(1..=max_n.max(1));
        let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(0..=max_n)).collect();
        let i = rng.gen_range(1..=k);
        let total: usize = sizes.iter().sum();
        let x = random_tuple(&mut rng, total, carrier_size);
        let offset: usize = sizes[..i - 1].iter().sum();
        let block = x[offset..offset + sizes[i - 1]].to_vec();
        let pi = Selection::proj(i, &sizes).unwrap();
        if apply_selection(&pi, &x).unwrap() != block {
            return fail(
                checked,
                json!({ "property": 6, "trial": trial, "i": i, "sizes": sizes, "x": x }),
            );
        }
        checked += 1;
    }
    CheckReport::pass(suite, trials, checked, Some(seed))
}

/// Exhaustively verifies the three clone axioms for the full set of
/// operations of arity `<= max_arity` on the carrier, including the
/// nullary cases through [`set_bullet_at`].
pub fn check_set_clone_axioms_exhaustive(carrier: usize, max_arity: usize) -> CheckReport {
    let suite = "set-clone-axioms";
    let ops: Vec<Vec<FiniteOp>> = (0..=max_arity).map(|k| all_ops(carrier, k)).collect();
    let mut checked = 0u64;
    let fail = |checked: u64, witness: serde_json::Value| {
        CheckReport::fail(suite, 0, checked, None, witness)
    };

    // axiom 1: φ • (π_{1,n}, .., π_{n,n}) = φ
    for (n, ops_n) in ops.iter().enumerate() {
        let projections: Vec<FiniteOp> = (1..=n)
            .map(|i| FiniteOp::projection(i, n, carrier).expect("valid projection"))
            .collect();
        for phi in ops_n {
            match set_bullet_at(phi, &projections, n) {
                Ok(r) if r == *phi => checked += 1,
                _ => {
                    return fail(
                        checked,
                        json!({ "axiom": 1, "phi": phi, "n": n }),
                    )
                }
            }
        }
    }

    // axiom 2: π_{i,m} • (ψ_1, .., ψ_m) = ψ_i
    for m in 1..=max_arity {
        for (n, ops_n) in ops.iter().enumerate() {
            let mut pick = vec![0usize; m];
            loop {
                let psis: Vec<FiniteOp> = pick.iter().map(|&k| ops_n[k].clone()).collect();
                for i in 1..=m {
                    let pi = FiniteOp::projection(i, m, carrier).expect("valid projection");
                    match set_bullet_at(&pi, &psis, n) {
                        Ok(r) if r == psis[i - 1] => checked += 1,
                        _ => {
                            return fail(
                                checked,
                                json!({ "axiom": 2, "i": i, "m": m, "psis": psis }),
                            )
                        }
                    }
                }
                if !step_pick(&mut pick, ops_n.len()) {
                    break;
                }
            }
        }
    }

    // axiom 3: φ • (ψ_1 • ρ⃗, .., ψ_m • ρ⃗) = (φ • ψ⃗) • ρ⃗
    for m in 0..=max_arity {
        for n in 0..=max_arity {
            for l in 0..=max_arity {
                for phi in &ops[m] {
                    let mut psi_pick = vec![0usize; m];
                    loop {
                        let psis: Vec<FiniteOp> =
                            psi_pick.iter().map(|&k| ops[n][k].clone()).collect();
                        let mut rho_pick = vec![0usize; n];
                        loop {
                            let rhos: Vec<FiniteOp> =
                                rho_pick.iter().map(|&k| ops[l][k].clone()).collect();
                            let outcome = (|| -> Result<(FiniteOp, FiniteOp)> {
                                let inner: Vec<FiniteOp> = psis
                                    .iter()
                                    .map(|psi| set_bullet_at(psi, &rhos, l))
                                    .collect::<Result<_>>()?;
                                let lhs = set_bullet_at(phi, &inner, l)?;
                                let rhs =
                                    set_bullet_at(&set_bullet_at(phi, &psis, n)?, &rhos, l)?;
                                Ok((lhs, rhs))
                            })();
                            match outcome {
                                Ok((lhs, rhs)) if lhs == rhs => checked += 1,
                                _ => {
                                    return fail(
                                        checked,
                                        json!({
                                            "axiom": 3, "m": m, "n": n, "l": l,
                                            "phi": phi, "psis": psis, "rhos": rhos,
                                        }),
                                    )
                                }
                            }
                            if !step_pick(&mut rho_pick, ops[l].len()) {
                                break;
                            }
                        }
                        if !step_pick(&mut psi_pick, ops[n].len()) {
                            break;
                        }
                    }
                }
            }
        }
    }
    CheckReport::pass(suite, 0, checked, None)
}

fn step_pick(pick: &mut [usize], base: usize) -> bool {
    for slot in pick.iter_mut().rev() {
        if *slot + 1 < base {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// The clone of all finitary operations on a fixed finite carrier.
#[derive(Debug, Clone, Copy)]
pub struct SetClone {
    pub carrier: usize,
}

impl AbstractClone for SetClone {
    type Elem = FiniteOp;

    fn arity(&self, e: &FiniteOp) -> usize {
        e.arity()
    }

    fn projection(&self, i: usize, n: usize) -> Result<FiniteOp> {
        FiniteOp::projection(i, n, self.carrier)
    }

    fn bullet(&self, phi: &FiniteOp, psis: &[FiniteOp]) -> Result<FiniteOp> {
        set_bullet(phi, psis)
    }

    fn elems_equal(&self, a: &FiniteOp, b: &FiniteOp) -> bool {
        a == b
    }

    fn elem_json(&self, e: &FiniteOp) -> serde_json::Value {
        serde_json::to_value(e).expect("finite op serializes")
    }
}

/// The endomorphism operad of the carrier in finite sets, with its native
/// disjoint-argument composition.  Serves as an independent route against
/// the clone-derived operad structure.
#[derive(Debug, Clone, Copy)]
pub struct SetOperad {
    pub carrier: usize,
}

impl CartesianOperad for SetOperad {
    type Elem = FiniteOp;

    fn arity(&self, e: &FiniteOp) -> usize {
        e.arity()
    }

    fn identity(&self) -> FiniteOp {
        FiniteOp::projection(1, 1, self.carrier).expect("identity operation")
    }

    fn compose(&self, phi: &FiniteOp, psis: &[FiniteOp]) -> Result<FiniteOp> {
        if psis.len() != phi.arity() {
            return Err(Error::ArityMismatch(format!(
                "compose expects {} arguments, got {}",
                phi.arity(),
                psis.len()
            )));
        }
        for psi in psis {
            if psi.carrier_size() != self.carrier {
                return Err(Error::ParamMismatch("mixed carriers in compose".into()));
            }
        }
        let total: usize = psis.iter().map(|p| p.arity()).sum();
        let mut inner = vec![0u8; psis.len()];
        FiniteOp::from_fn(self.carrier, total, |args| {
            let mut offset = 0;
            for (slot, psi) in inner.iter_mut().zip(psis) {
                *slot = psi
                    .apply(&args[offset..offset + psi.arity()])
                    .expect("arity checked");
                offset += psi.arity();
            }
            phi.apply(&inner).expect("arity checked")
        })
    }

    fn dot(&self, phi: &FiniteOp, f: &Selection) -> Result<FiniteOp> {
        if f.target_size() != phi.arity() {
            return Err(Error::ArityMismatch(format!(
                "dot expects a selection into [{}], got one into [{}]",
                phi.arity(),
                f.target_size()
            )));
        }
        FiniteOp::from_fn(self.carrier, f.source_size(), |args| {
            let picked = apply_selection(f, args).expect("length checked");
            phi.apply(&picked).expect("arity checked")
        })
    }

    fn elems_equal(&self, a: &FiniteOp, b: &FiniteOp) -> bool {
        a == b
    }

    fn elem_json(&self, e: &FiniteOp) -> serde_json::Value {
        serde_json::to_value(e).expect("finite op serializes")
    }
}

/// Samples an arbitrary operation of the requested arity.
pub fn random_op(rng: &mut ChaCha8Rng, carrier: usize, arity: usize) -> FiniteOp {
    use rand::Rng;
    let len = carrier.pow(arity as u32);
    let table = (0..len).map(|_| rng.gen_range(0..carrier) as u8).collect();
    FiniteOp::new(carrier, arity, table).expect("valid random table")
}
