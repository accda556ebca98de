//! The λυ-calculus of explicit substitutions: terms and their rewriting,
//! exact enumeration through generating functions, a size-preserving
//! bijection with plane binary trees, uniform exact-size sampling, and
//! sampling experiments over redex statistics.
//!
//! ```
//! use upsilon_core::{normalize, parse_term, Strategy};
//!
//! let t = parse_term("(\\\\1) 0").unwrap();
//! let n = normalize(&t, Strategy::Full, 100).unwrap();
//! assert_eq!(n.term.to_string(), "\\1");
//! assert_eq!(n.trace.len(), 5);
//! ```

pub mod bijection;
pub mod enumerate;
pub mod rewrite;
pub mod series;
pub mod stats;
pub mod syntax;
pub mod term;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use bijection::{phi, phi_inv, remy_tree, sample_term, BinTree, Rng, SampleError};
pub use enumerate::{
    catalan, count_substs, count_terms, enumerate_terms, expected_param_exact,
    nested_free_fraction, solve_core_series, solve_restricted_series, total_param_bruteforce,
    EnumError, Enumerator, ExpectationTable, ParamKind,
};
pub use rewrite::{
    apply_at, count_redexes, find_redexes, has_nested_substitution, is_strict_form_bounded,
    match_redex, normalize, unsuspended_constructors, Normalized, Redex, RewriteError, RuleKind,
    RuleSet, Strategy, StrictForm, Trace,
};
pub use series::{Scalar, Series, SeriesError};
pub use stats::{
    compare_to_reference, export_report, run_experiment, ComparisonReport, ExportFormat, Measure,
    Report, SampleSummary, StatsError, Tolerance,
};
pub use syntax::{parse_term, render_term, ParseError};
pub use term::{Position, Subst, Term};

/// Exact integer series; every enumeration series has integer coefficients.
pub type IntSeries = Series<BigInt>;
/// Exact rational series.
pub type RatSeries = Series<BigRational>;
/// Floating-point series, for quick approximations at moderate orders.
pub type FloatSeries = Series<f64>;

/// Exact expectation table.
pub type ExactExpectations = ExpectationTable<BigInt>;
