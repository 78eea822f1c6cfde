use super::class::{base_values, canonical_class_check, kappa_via_c2, kappa_via_formula};
use super::solution::{FedosovSolution, Variant};
use super::star::StarProduct;
use crate::error::Result;
use crate::geometry::CheckResult;
use crate::jets::{GaussianRational, Jet, MultiIndex};

/// `C_r(x^f, x^g)` at the base point for `r = 0..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub f: MultiIndex,
    pub g: MultiIndex,
    pub values: Vec<GaussianRational>,
}

/// Bidifferential coefficients of `∗` (or `∗′`) on every pair of monomials
/// of degree at most `max_input_degree`. By `ν`-linearity these determine
/// `C_r` on all polynomials of that degree.
pub fn extract_bidifferential_tables(
    sol: &FedosovSolution,
    n: u32,
    variant: Variant,
    max_input_degree: u32,
) -> Result<Vec<TableEntry>> {
    let dim = sol.dim();
    let order = sol.geometry.chart.order();
    let monomials = MultiIndex::up_to_degree(dim, max_input_degree);
    let jets: Vec<Jet> = monomials
        .iter()
        .map(|m| Jet::from_coeffs(dim, order, [(m.exponents(dim), crate::jets::scalar::one())]))
        .collect::<Result<_>>()?;
    let mut star = StarProduct::new(sol, variant);
    let mut out = Vec::with_capacity(jets.len() * jets.len());
    for (f, jf) in monomials.iter().zip(&jets) {
        for (g, jg) in monomials.iter().zip(&jets) {
            out.push(TableEntry {
                f: *f,
                g: *g,
                values: star.multiply(jf, jg, n)?.values(),
            });
        }
    }
    Ok(out)
}

/// Everything the star-product pipeline establishes about one chart.
#[derive(Clone, Debug)]
pub struct StarReport {
    pub order: u32,
    pub tables: Vec<TableEntry>,
    pub primed_tables: Vec<TableEntry>,
    pub kappa_formula: Vec<Vec<GaussianRational>>,
    pub kappa_extracted: Vec<Vec<GaussianRational>>,
    pub gamma: Vec<Vec<GaussianRational>>,
    pub mu: Vec<GaussianRational>,
    pub residuals: Vec<CheckResult>,
}

impl StarReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|c| c.passed)
    }
}

pub fn star_report(sol: &FedosovSolution, n: u32, max_input_degree: u32) -> Result<StarReport> {
    let geo = &sol.geometry;
    let routes = kappa_via_formula(sol)?;
    let kappa_formula = base_values(&routes.via_chern_weil);
    let kappa_extracted = kappa_via_c2(sol)?;
    let mut residuals = sol.checks.clone();
    residuals.extend(sol.equation_residuals()?.into_iter().map(|(_, c)| c));
    residuals.extend(routes.checks.iter().cloned());
    residuals.push(CheckResult::from_witness(
        "kappa from C_2^- = kappa from the formula at the base point",
        (kappa_formula != kappa_extracted).then(|| "base-point matrices differ".to_string()),
    ));
    residuals.extend(canonical_class_check(sol, &routes.via_chern_weil)?);
    Ok(StarReport {
        order: n,
        tables: extract_bidifferential_tables(sol, n, Variant::Plain, max_input_degree)?,
        primed_tables: extract_bidifferential_tables(sol, n, Variant::Primed, max_input_degree)?,
        kappa_formula,
        kappa_extracted,
        gamma: base_values(&geo.gamma_form),
        mu: geo.mu_form.iter().map(Jet::value).collect(),
        residuals,
    })
}
