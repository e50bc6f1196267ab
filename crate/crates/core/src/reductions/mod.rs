//! Encodings of 3SAT into PPCFG settings and of factoring into PPCSG settings,
//! with certificate maps in both directions and independent oracles.

pub mod factoring;
pub mod sat;

pub use factoring::{
    divisor_membership, factor_via_ppcsg, factoring_to_ppcsg, factoring_to_ppcsg_with, target_string, CollapseGadget,
    FactorOutcome, FactoringError, FactoringReduction, TargetString,
};
pub use sat::{
    dpll_solve, parse_dimacs, sat_solve_via_grammar, sat_to_ppcfg, Assignment, Literal, SatError, SatInstance,
    SatReduction,
};
