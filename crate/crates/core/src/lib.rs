//! Exact-arithmetic verifier for the codegree characterization of sixteen
//! finite simple groups.
//!
//! The crate is `no_std` + `alloc`. Every number that appears in the argument
//! (group orders, codegrees, indices) is carried as a [`FactoredInteger`], so
//! divisibility, valuation and parity checks are map operations rather than
//! machine arithmetic.
//!
//! Module map:
//!
//! * [`factored_int`] — prime-factorized positive integers.
//! * [`catalog`] — group data (orders, degree lists, Schur multipliers), the
//!   parametric candidate families, and maximal-subgroup tables.
//! * [`chartab`] — parser for a small line-oriented character-table format and
//!   the kernel / codegree computation on it.
//! * [`diophantine`] — exact root search for the monotone one-parameter
//!   expressions used to rule out parametric families.
//! * [`elimination`] — the per-target case analysis, driven by a recipe table.
//! * [`finale`] — the six-step closing argument (squares, covers, GL scans,
//!   inertia quotients, index bounds).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod chartab;
pub mod diophantine;
pub mod elimination;
pub mod factored_int;
pub mod finale;
pub use catalog::{Catalog, CodegreeSet, FamilyId, GroupId, GroupRecord};
pub use chartab::{codegrees_of_table, CharacterTable};
pub use diophantine::{solve, solve_in, ExprFamily, ParamDomain, Solution};
pub use elimination::{CaseVerdict, Engine, LemmaReport, ReasonKind, ReplayConfig, Status, Verdict, Witness};
pub use factored_int::FactoredInteger;
pub use finale::{verify_main_theorem, TheoremReport};


