use serde::{Deserialize, Serialize};

use super::tensor::{describe_component, matrix_witness};
use crate::error::{Error, Result};
use crate::jets::{invert_constant, Jet, JetMatrix};

/// Almost-Kähler data on one chart, expanded at the origin.
///
/// `omega.get(j, k)` is `ω_{jk}`; `j.get(k, j)` is `J^k_j`, i.e. column `j`
/// of the matrix is the image `J(∂_j)`.
#[derive(Clone, Debug)]
pub struct ChartGeometry {
    pub name: String,
    pub omega: JetMatrix,
    pub j: JetMatrix,
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub identity: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn pass(identity: impl Into<String>) -> Self {
        CheckResult {
            identity: identity.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn from_witness(identity: impl Into<String>, witness: Option<String>) -> Self {
        CheckResult {
            identity: identity.into(),
            passed: witness.is_none(),
            witness,
        }
    }

    /// Turn a failed check into an internal-consistency error.
    pub fn require(self) -> Result<CheckResult> {
        if self.passed {
            Ok(self)
        } else {
            Err(Error::consistency(
                self.identity,
                self.witness.unwrap_or_default(),
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

pub(crate) const OMEGA_NONDEGENERATE: &str = "omega nondegenerate";
pub(crate) const METRIC_NONDEGENERATE: &str = "g nondegenerate";

impl ChartGeometry {
    pub fn new(name: impl Into<String>, omega: JetMatrix, j: JetMatrix) -> Result<Self> {
        let n = omega.rows();
        if !omega.is_square() || !j.is_square() || j.rows() != n {
            return Err(Error::Shape("omega and J must be square of equal size".into()));
        }
        if n % 2 != 0 || n == 0 {
            return Err(Error::Shape(format!("chart dimension {n} is not even and positive")));
        }
        if omega.dim() != n || j.dim() != n {
            return Err(Error::Shape("jet variables must match the chart dimension".into()));
        }
        let order = omega.order().min(j.order());
        Ok(ChartGeometry {
            name: name.into(),
            omega: omega.truncate(order),
            j: j.truncate(order),
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn order(&self) -> u32 {
        self.omega.order()
    }

    /// `g_{jk} = J^α_j ω_{αk}`.
    pub fn metric(&self) -> JetMatrix {
        self.j
            .transpose()
            .mul(&self.omega)
            .expect("square matrices of equal size")
    }

    /// Run every compatibility check; never fails, see [`validate_chart`].
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let k = self.order();
        let mut checks = Vec::new();

        let antisym = self.omega.add(&self.omega.transpose()).expect("square");
        checks.push(CheckResult::from_witness(
            "omega antisymmetric",
            matrix_witness(&antisym),
        ));

        let j2 = self.j.mul(&self.j).expect("square");
        let j2_plus_id = j2.add(&JetMatrix::identity(n, n, k)).expect("square");
        checks.push(CheckResult::from_witness("J^2 = -Id", matrix_witness(&j2_plus_id)));

        checks.push(CheckResult::from_witness("d omega = 0", closedness_witness(&self.omega)));

        let compat = self
            .j
            .transpose()
            .mul(&self.omega)
            .and_then(|m| m.mul(&self.j))
            .and_then(|m| m.sub(&self.omega))
            .expect("square");
        checks.push(CheckResult::from_witness(
            "omega(J.,J.) = omega",
            matrix_witness(&compat),
        ));

        let omega_inv = invert_constant(&self.omega.constant_part());
        checks.push(CheckResult::from_witness(
            OMEGA_NONDEGENERATE,
            omega_inv
                .is_none()
                .then(|| "constant term of omega is singular".to_string()),
        ));

        let g = self.metric();
        let g_sym = g.sub(&g.transpose()).expect("square");
        checks.push(CheckResult::from_witness("g symmetric", matrix_witness(&g_sym)));
        checks.push(CheckResult::from_witness(
            METRIC_NONDEGENERATE,
            invert_constant(&g.constant_part())
                .is_none()
                .then(|| "constant term of g is singular".to_string()),
        ));

        ValidationReport { checks }
    }
}

/// Validate and turn the first failure into an error: degeneracy failures
/// become [`Error::Degeneracy`], everything else [`Error::InvalidGeometry`].
pub fn validate_chart(chart: &ChartGeometry) -> Result<ValidationReport> {
    let report = chart.validate();
    if let Some(failed) = report.first_failure() {
        return Err(match failed.identity.as_str() {
            OMEGA_NONDEGENERATE => Error::Degeneracy {
                what: "omega".into(),
            },
            METRIC_NONDEGENERATE => Error::Degeneracy { what: "g".into() },
            _ => Error::InvalidGeometry {
                identity: failed.identity.clone(),
                witness: failed.witness.clone().unwrap_or_default(),
            },
        });
    }
    Ok(report)
}

/// Cyclic sum `∂_a F_{bc} + ∂_b F_{ca} + ∂_c F_{ab}` for a 2-form given as an
/// antisymmetric matrix; `None` when it vanishes (or the order is exhausted).
pub fn closedness_witness(form: &JetMatrix) -> Option<String> {
    let n = form.rows();
    if form.order() == 0 {
        return None;
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                let d = |i: usize, j: usize, k: usize| {
                    form.get(j, k).derivative(i).expect("order checked above")
                };
                let cyc = &(&d(a, b, c) + &d(b, c, a)) + &d(c, a, b);
                if !cyc.is_zero() {
                    return Some(describe_component(&[a, b, c], &cyc));
                }
            }
        }
    }
    None
}

/// Exterior derivative of a 1-form, as an antisymmetric matrix.
pub fn exterior_derivative(one_form: &[Jet]) -> Result<JetMatrix> {
    let n = one_form.len();
    let dim = one_form[0].dim();
    let order = one_form.iter().map(Jet::order).min().unwrap_or(0);
    if order == 0 {
        return Err(Error::order("exterior derivative of a 1-form", 0));
    }
    let mut rows = vec![vec![Jet::zero(dim, order - 1); n]; n];
    for k in 0..n {
        for l in 0..n {
            rows[k][l] = &one_form[l].derivative(k)? - &one_form[k].derivative(l)?;
        }
    }
    JetMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::scalar::gq;

    fn constant(dim: usize, order: u32, rows: &[&[i64]]) -> JetMatrix {
        JetMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Jet::constant(dim, order, gq(v, 1))).collect())
                .collect(),
        )
        .unwrap()
    }

    fn flat2d(order: u32) -> ChartGeometry {
        let w = constant(2, order, &[&[0, 1], &[-1, 0]]);
        let j = constant(2, order, &[&[0, 1], &[-1, 0]]);
        ChartGeometry::new("flat2d", w, j).unwrap()
    }

    #[test]
    fn flat_chart_passes() {
        let report = validate_chart(&flat2d(3)).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.checks.len(), 7);
    }

    #[test]
    fn vanishing_omega_constant_term_is_degenerate() {
        let x1 = Jet::variable(2, 3, 0);
        let z = Jet::zero(2, 3);
        let w = JetMatrix::from_rows(vec![vec![z.clone(), x1.clone()], vec![-&x1, z]]).unwrap();
        let j = constant(2, 3, &[&[0, 1], &[-1, 0]]);
        let chart = ChartGeometry::new("bad", w, j).unwrap();
        // closedness holds trivially in two dimensions
        let report = chart.validate();
        assert!(report.checks.iter().any(|c| c.identity == "d omega = 0" && c.passed));
        assert!(matches!(
            validate_chart(&chart),
            Err(Error::Degeneracy { what }) if what == "omega"
        ));
    }

    #[test]
    fn scaled_j_fails_with_witness() {
        let w = constant(2, 3, &[&[0, 1], &[-1, 0]]);
        let j = constant(2, 3, &[&[0, 2], &[-2, 0]]);
        let chart = ChartGeometry::new("scaled", w, j).unwrap();
        match validate_chart(&chart) {
            Err(Error::InvalidGeometry { identity, witness }) => {
                assert_eq!(identity, "J^2 = -Id");
                assert!(witness.contains("component [1,1]"), "{witness}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_closed_omega_detected() {
        // ω_{12} = 1 + x3 in four dimensions is not closed
        let order = 3;
        let one = Jet::one(4, order);
        let x3 = Jet::variable(4, order, 2);
        let z = Jet::zero(4, order);
        let w12 = &one + &x3;
        let w = JetMatrix::from_rows(vec![
            vec![z.clone(), w12.clone(), z.clone(), z.clone()],
            vec![-&w12, z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), one.clone()],
            vec![z.clone(), z.clone(), -&one, z.clone()],
        ])
        .unwrap();
        let j = constant(
            4,
            order,
            &[&[0, 1, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, -1, 0]],
        );
        let chart = ChartGeometry::new("open", w, j).unwrap();
        let report = chart.validate();
        let closed = report.checks.iter().find(|c| c.identity == "d omega = 0").unwrap();
        assert!(!closed.passed);
    }

    #[test]
    fn odd_dimension_rejected() {
        let m = JetMatrix::identity(3, 3, 2);
        assert!(matches!(ChartGeometry::new("odd", m.clone(), m), Err(Error::Shape(_))));
    }
}
