//! Back-and-forth relations on finite relational structures.
//!
//! [`engine`] decides `(A, ā) ≤ₙ (B, b̄)` and compares structures.
//! [`catalog`] enumerates the types realized in a class of small
//! structures, [`rank`] computes Scott ranks, and [`bfstruct`] packs a
//! class into projection, permutation and extension tables.
//! [`extlang`] adds one predicate per type and writes out the defining
//! sentences; [`builder`] grows finite diagrams from Π₂ theories.
//!
//! ```
//! use bfcalc::class::linear_order;
//! use bfcalc::engine::{bf_compare, Comparison};
//!
//! let (a, b) = (linear_order(1).unwrap(), linear_order(2).unwrap());
//! assert_eq!(bf_compare(&a, &[], &b, &[], 1).unwrap(), Comparison::Geq);
//! ```

pub mod bfstruct;
pub mod builder;
pub mod catalog;
pub mod class;
pub mod cli;
pub mod diagram;
pub mod engine;
pub mod error;
pub mod extlang;
pub mod formula;
pub mod oracle;
pub mod rank;
pub mod structure;
