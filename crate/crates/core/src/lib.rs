//! Virtual numbers: exact arithmetic with infinitesimal and infinite
//! quantities, and the calculus built on them.
//!
//! Values live on two tiers. The series tier holds exact truncated Laurent
//! polynomials in the canonical infinitesimal `del` (one per index parity);
//! the sequence tier holds pure index rules sampled on a schedule. Predicates
//! on sampled values return three-valued verdicts.

pub mod calculus;
pub mod classify;
pub mod domain;
pub mod error;
mod format;
pub mod integrate;
pub mod laurent;
pub mod magnitude;
pub mod props;
pub mod realfun;
pub mod scalar;
pub mod settings;
pub mod verdict;
pub mod vnum;

pub use calculus::{
    check_continuity_at, check_differentiable_at, check_uniform_continuity, derivative_at,
    sine_quotient_check, taylor_expand, DerivativeReport, InfinitesimalFamily, TaylorReport,
    UniformReport,
};
pub use classify::{
    classify, cmp_reals, confront, is_finite, is_infinite, is_infinitesimal, is_interior_point,
    near, neighbour, standard_part, Classification, FinitudeClass, RealsSide,
};
pub use domain::{DomainDescriptor, Interval};
pub use error::{Error, Result};
pub use integrate::{
    ftc_check, geom_measure, integrate, make_partition, riemann_sum, ExtendedPartition, FtcReport,
    GeomKind, IntegralReport, TagScheme,
};
pub use laurent::LaurentPolynomial;
pub use magnitude::{compare_magnitude, in_order_of, leading_order, negligible, Magnitude, OrderProfile};
pub use realfun::{
    diff_expr, eval_const, eval_real, eval_virtual, extend_apply, parse_expr, Expr, Func, RealFunction,
};
pub use scalar::Scalar;
pub use settings::{Schedule, Settings};
pub use verdict::{Decision, Verdict};
pub use vnum::{rel_ext, Relation, SequenceGen, VirtualNumber};
