//! Construction and exhaustive verification of q-ary c-frameproof codes.
//!
//! A code is `c`-frameproof when no coalition of at most `c` codewords can
//! assemble, position by position, a codeword outside the coalition. This
//! crate builds such codes by recursive composition over finite fields and
//! from orthogonal arrays, and checks them with two independent exhaustive
//! verifiers.
//!
//! ```
//! use frameproof::{base_code, compose, is_frameproof_cover, BaseCodeId, Compose, VerifyOptions};
//!
//! let parent = base_code(BaseCodeId::Ex1);
//! let code = compose(&parent, &Compose::new(3, 2, 2)).unwrap();
//! assert_eq!((code.alphabet(), code.len()), (7, 72));
//! assert!(is_frameproof_cover(&code, 2, VerifyOptions::default()).unwrap().verdict);
//! ```

pub mod construct;
pub mod error;
pub mod field;
pub mod format;
pub mod model;
pub mod oa;
pub mod plan;
pub mod selftest;
pub mod verify;

pub use construct::{
    augment_infinity, base_code, compose, default_eval_points, oa_family, oa_pipeline, BaseCodeId, Compose, EvalPoint,
    EvalPoints,
};
pub use error::{Error, Result};
pub use field::{is_prime_power, Field, Poly};
pub use format::Document;
pub use model::{
    apply_coordinate_permutation, descendant_contains, enumerate_descendants, Code, PairAlphabet, PairSymbol,
    PtViolation, Symbol, Witness, Word,
};
pub use oa::{
    build_oa_strength2, normalize_column_to_infinity, oa_to_frameproof, oa_to_pt_code, verify_oa, OrthogonalArray,
};
pub use plan::{
    achieved_rate, blackburn_leading, execute_plan, factor_prime_powers, plan, plan_c2_length4, plan_c3_length5,
    ssw_bound, BoundReport, ConstructionPlan, PlanStep, Rational,
};
pub use verify::{is_frameproof_cover, is_frameproof_naive, satisfies_property_pt, VerifyOptions, VerifyReport};
