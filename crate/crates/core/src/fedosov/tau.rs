use super::solution::{FedosovSolution, Variant};
use crate::error::{Error, Result};
use crate::geometry::CheckResult;
use crate::jets::Jet;
use crate::wick::{ad_divided_by_nu, delta_inverse, nabla, sigma, TruncationPolicy, WickElement};

/// Flat lift `τ(f)` (or `τ′(f)`) by `Deg`-homogeneous components.
#[derive(Clone, Debug)]
pub struct TauExpansion {
    pub source: Jet,
    pub variant: Variant,
    pub components: Vec<WickElement>,
}

impl TauExpansion {
    pub fn max_deg(&self) -> u32 {
        self.components.len() as u32 - 1
    }

    pub fn component(&self, k: u32) -> &WickElement {
        &self.components[k as usize]
    }

    /// Sum of all components.
    pub fn total(&self) -> WickElement {
        let mut acc = self.components[0].clone();
        for c in &self.components[1..] {
            acc.add_assign(c);
        }
        acc
    }

    /// Coefficient `t_r(f)` of `ν^r`, summed over the computed degrees.
    pub fn nu_coefficient(&self, r: u32) -> WickElement {
        self.total().nu_part(r)
    }

    /// `Dτ = 0` per degree, for the degrees fully determined by the
    /// computed components and `r`.
    pub fn flatness_checks(&self, sol: &FedosovSolution) -> Result<Vec<CheckResult>> {
        let mut out = Vec::new();
        let top = self.max_deg().min(sol.max_deg().saturating_sub(1));
        let mut partial = self.components[0].clone();
        for d in 0..top {
            partial.add_assign(&self.components[d as usize + 1]);
            let residual = sol
                .apply_connection(&partial, self.variant, d)?
                .filter(|k| k.total_degree() == d);
            out.push(CheckResult::from_witness(
                format!("D tau = 0, Deg {d}"),
                residual.witness(),
            ));
        }
        let sig = sigma(&self.total()).sub(&WickElement::scalar(self.source.clone()));
        out.push(CheckResult::from_witness("sigma(tau(f)) = f", sig.witness()));
        Ok(out)
    }
}

/// `τ(f)^{(0)} = f`, `τ(f)^{(k+1)} = δ⁻¹(∇τ^{(k)} - (i/ν) Σ_l ad(r^{(l+2)}) τ^{(k-l)})`.
pub fn lift_tau(
    sol: &FedosovSolution,
    f: &Jet,
    max_deg: u32,
    variant: Variant,
) -> Result<TauExpansion> {
    if max_deg > sol.max_deg().max(1) {
        return Err(Error::order(
            "lifting needs r up to the degree of the lift",
            sol.max_deg(),
        ));
    }
    let pairing = sol.pairing(variant);
    let policy = TruncationPolicy::unbounded();
    let mut components = vec![WickElement::scalar(f.clone())];
    for k in 0..max_deg {
        let current = &components[k as usize];
        let mut rhs = nabla(current, &sol.geometry.gamma).map_err(|_| Error::Order {
            context: format!("lift of a function to Deg {}", k + 1),
            achieved: k,
        })?;
        for l in 0..k {
            let r = sol.connection_component(variant, l + 2);
            let t = &components[(k - l) as usize];
            if r.is_zero() || t.is_zero() {
                continue;
            }
            let target = rhs.order();
            rhs = rhs.sub(&ad_divided_by_nu(
                &r.truncate_order(target),
                &t.truncate_order(target),
                pairing,
                &policy,
            )?);
        }
        components.push(delta_inverse(&rhs));
    }
    Ok(TauExpansion {
        source: f.clone(),
        variant,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::GeometrySpec;
    use crate::geometry::DerivedGeometry;
    use crate::jets::MultiIndex;
    use crate::wick::Key;

    fn solve(name: &str, order: u32, max_deg: u32) -> FedosovSolution {
        let chart = GeometrySpec::bundled(name).unwrap().to_chart(Some(order)).unwrap();
        FedosovSolution::solve(&DerivedGeometry::derive(&chart).unwrap(), max_deg).unwrap()
    }

    #[test]
    fn coordinate_lifts_on_flat_chart() {
        let sol = solve("flat2d", 6, 4);
        let x1 = Jet::variable(2, 6, 0);
        let tau = lift_tau(&sol, &x1, 4, Variant::Plain).unwrap();
        let expected = WickElement::scalar(x1.clone()).add(&WickElement::y(2, 6, 0));
        assert_eq!(tau.total().sub(&expected).witness(), None);
        assert!(tau.flatness_checks(&sol).unwrap().iter().all(|c| c.passed));
    }

    #[test]
    fn constants_lift_to_themselves() {
        let sol = solve("nonintegrable4d", 6, 5);
        let tau = lift_tau(&sol, &Jet::one(4, 6), 4, Variant::Plain).unwrap();
        assert_eq!(tau.total().sub(&WickElement::one(4, 6)).witness(), None);
    }

    #[test]
    fn lifts_are_flat_and_project_back() {
        let sol = solve("nonintegrable4d", 7, 6);
        let f = crate::cli::expr::parse_jet("x1*x2 - x3^2 + 2*x4", 4, 7).unwrap();
        for variant in [Variant::Plain, Variant::Primed] {
            let tau = lift_tau(&sol, &f, 5, variant).unwrap();
            for c in tau.flatness_checks(&sol).unwrap() {
                assert!(c.passed, "{}: {:?}", c.identity, c.witness);
            }
            let first = tau.component(1);
            for p in 0..4 {
                let key = Key::new(0, MultiIndex::unit(p), 0);
                let c = first.coeff(&key).cloned().unwrap_or_else(|| Jet::zero(4, 7));
                assert!(c.agrees_with(&f.derivative(p).unwrap()));
            }
        }
    }
}
