//! Fedosov connection, flat lifts and the resulting star products.

mod class;
mod report;
mod solution;
mod star;
mod suite;
mod tau;

pub use class::{
    base_values, c2_minus_from_star, canonical_class_check, extract_c2_minus, first_order_matrix,
    kahler_degeneration, kappa_via_c2, kappa_via_formula, two_form_matrix, KappaRoutes,
};
pub use report::{extract_bidifferential_tables, star_report, StarReport, TableEntry};
pub use solution::{FedosovSolution, Variant};
pub use star::{equivalence, poisson_bracket, Series, StarProduct};
pub use suite::{flatness_suite, lemma_suite, star_suite};
pub use tau::{lift_tau, TauExpansion};
