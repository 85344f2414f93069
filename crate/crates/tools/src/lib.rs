//! Std companion of `quench-core`: the brute-force Fock-space oracle, the
//! `quench` command-line front end, and the deterministic file formats it
//! emits.

// see quench-core: NaN-rejecting negated comparisons and recurrence loops
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod oracle;
pub mod output;
pub mod run;
