//! Exact-arithmetic toolkit for abstract clones, cartesian operads and the
//! deformed ring `A = Z<t,x> / (t^2 = q, tx = -xt, x^2 = 0)`.
//!
//! The crate has three layers:
//!
//! * [`fincard`] — the opposite category of finite cardinals: selections,
//!   their monoidal sum, uniform copying/deletion, block projections and
//!   the substitution product.  This is the indexing calculus every
//!   cartesian operad consumes.
//! * [`clone_core`], [`set_model`] — behavioral interfaces for abstract
//!   clones and cartesian operads, seeded axiom checkers, the translation
//!   between the two structures, and the classical clone of finitary
//!   operations on a finite set as a concrete model.
//! * [`zring`], [`endo_operad`], [`hopf_check`] — exact integer arithmetic
//!   in `A^{⊗n}`, the classification of ring morphisms `A -> A^{⊗n}` as
//!   `t -> ±t_d + f·x_d`, `x -> g·x_d`, the clone substitution on them,
//!   brute-force enumeration oracles, and the hopf-mode (`q = 1`)
//!   counterexample where the endomorphism operad is *not* a clone.
//!
//! Everything is exact: equalities asserted by the verification suites are
//! integer identities with zero tolerance.  All randomness flows from a
//! single 64-bit seed through `ChaCha8Rng`, so every report is
//! reproducible.
//!
//! ```
//! use cloneops::zring::{Params, Q, RingElem};
//!
//! let params = Params::new(1, Q::new(2)?)?;
//! let t = RingElem::generator_t(params, 1)?;
//! let x = RingElem::generator_x(params, 1)?;
//! assert_eq!(t.mul(&t)?, RingElem::scalar(params, 2));
//! assert_eq!(x.mul(&t)?, t.mul(&x)?.neg());
//! assert!(t.add(&x)?.squares_to_q());
//! # Ok::<(), cloneops::Error>(())
//! ```

pub mod clone_core;
pub mod endo_operad;
pub mod error;
pub mod fincard;
pub mod hopf_check;
pub mod report;
pub mod set_model;
pub mod zring;

pub use error::{Error, Result};
pub use report::{CheckReport, Status};

/// Library version, echoed into CLI reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The guide chapters double as doc tests so their code stays honest.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(selections, "../../../book/src/selections.md");
    chapter!(set_model, "../../../book/src/set-model.md");
    chapter!(deformed_ring, "../../../book/src/deformed-ring.md");
    chapter!(morphisms, "../../../book/src/morphisms.md");
    chapter!(clones_and_operads, "../../../book/src/clones-and-operads.md");
    chapter!(hopf, "../../../book/src/hopf.md");
}
