//! The formal Wick algebra `W ⊗ Λ` and the Fedosov operators acting on it.

mod element;
mod operators;
mod product;
mod suite;

pub use element::{describe_key, interior, wedge_sign, Key, WickElement};
pub use operators::{
    delta, delta_inverse, fibre_equivalence, hodge_decompose, laplacian, nabla, sigma,
    torsion_and_curvature_elements, Direction,
};
pub use product::{
    ad_divided_by_nu, graded_commutator, multiply, sigma_of_product, Pairing, TruncationPolicy,
};
pub use suite::operator_suite;
