//! Almost-Kähler chart data and the tensors derived from it.

mod chart;
mod derived;
mod tensor;

pub use chart::{
    closedness_witness, exterior_derivative, validate_chart, ChartGeometry, CheckResult,
    ValidationReport,
};
pub use derived::{
    chern_weil_form, covariant_derivative_2form, covariant_derivative_endomorphism,
    curvature_of, curvature_tensor, cyclic_identity_residual, derive_metric, levi_civita,
    nijenhuis_tensor, s_tensor, torsion_of, yano_connection, z_tensor, DerivedGeometry, Metric,
    YanoConnection,
};
pub use tensor::{describe_component, matrix_witness, Tensor};
