// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fem;
pub mod lcp;
pub mod linalg;
pub mod mor;
pub mod scenario;
pub mod solver;
