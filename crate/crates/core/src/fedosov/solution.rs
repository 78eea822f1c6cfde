use crate::error::{Error, Result};
use crate::geometry::{CheckResult, DerivedGeometry};
use crate::jets::scalar::imag_unit;
use crate::wick::{
    ad_divided_by_nu, delta, delta_inverse, fibre_equivalence, multiply, nabla,
    torsion_and_curvature_elements, Direction, Pairing, TruncationPolicy, WickElement,
};

/// Which fibrewise product and connection form to use.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Variant {
    /// Wick product `∘` with `r`.
    Plain,
    /// Weyl product `∘′` with `r′ = G r`.
    Primed,
}

/// The solution `r` of the Fedosov equation, by `Deg`-homogeneous
/// components, together with `r′ = G r`.
#[derive(Clone, Debug)]
pub struct FedosovSolution {
    pub geometry: DerivedGeometry,
    pub wick: Pairing,
    pub weyl: Pairing,
    pub torsion_element: WickElement,
    pub curvature_element: WickElement,
    components: Vec<WickElement>,
    primed: Vec<WickElement>,
    pub checks: Vec<CheckResult>,
}

fn check(checks: &mut Vec<CheckResult>, c: CheckResult) -> Result<()> {
    let r = c.clone().require().map(|_| ());
    checks.push(c);
    r
}

impl FedosovSolution {
    /// Run the recursion up to total degree `max_deg`.
    pub fn solve(geometry: &DerivedGeometry, max_deg: u32) -> Result<Self> {
        if max_deg < 2 {
            return Err(Error::MalformedInput("the Fedosov recursion needs max Deg >= 2".into()));
        }
        let n = geometry.dim();
        let gamma = &geometry.gamma;
        let wick = Pairing::wick(&geometry.metric);
        let weyl = Pairing::weyl(&geometry.metric);
        let (t_elt, r_elt) = torsion_and_curvature_elements(geometry);
        let mut checks = Vec::new();

        check(
            &mut checks,
            CheckResult::from_witness("delta T = 0", delta(&t_elt).witness()),
        )?;
        if t_elt.order() > 0 {
            let diff = delta(&r_elt).sub(&nabla(&t_elt, gamma)?);
            check(
                &mut checks,
                CheckResult::from_witness("delta R = nabla T", diff.witness()),
            )?;
        }

        let mut components = vec![
            WickElement::zero(n, t_elt.order()),
            WickElement::zero(n, t_elt.order()),
            delta_inverse(&t_elt),
        ];
        let policy = TruncationPolicy::unbounded();
        for m in 3..=max_deg {
            let exhausted = |_| Error::Order {
                context: format!("Fedosov recursion for r^({m})"),
                achieved: m - 1,
            };
            let mut rhs = nabla(&components[m as usize - 1], gamma).map_err(exhausted)?;
            if m == 3 {
                rhs.add_assign(&r_elt);
            }
            let squares = sum_of_products(&components, m + 1, rhs.order(), &wick, &policy)?;
            rhs = rhs.sub(&squares.divide_nu()?.scale(&imag_unit()));
            components.push(delta_inverse(&rhs));
        }

        for (k, c) in components.iter().enumerate().skip(2) {
            let bad_grading = c
                .terms()
                .find(|(key, _)| key.total_degree() != k as u32 || key.form_degree() != 1);
            if let Some((key, _)) = bad_grading {
                return Err(Error::consistency(
                    format!("r^({k}) homogeneous of Deg {k} and form degree 1"),
                    crate::wick::describe_key(key, n),
                ));
            }
        }
        let kernel: Option<String> = components
            .iter()
            .find_map(|c| delta_inverse(c).witness());
        check(&mut checks, CheckResult::from_witness("delta^-1 r = 0", kernel))?;

        let g_inv = &geometry.metric.g_inv;
        let primed = components
            .iter()
            .map(|c| fibre_equivalence(c, g_inv, Direction::Forward))
            .collect();
        Ok(FedosovSolution {
            geometry: geometry.clone(),
            wick,
            weyl,
            torsion_element: t_elt,
            curvature_element: r_elt,
            components,
            primed,
            checks,
        })
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    /// Highest total degree computed.
    pub fn max_deg(&self) -> u32 {
        self.components.len() as u32 - 1
    }

    /// `r^{(k)}` (zero above the computed range is not implied; callers
    /// must stay within `max_deg`).
    pub fn component(&self, k: u32) -> &WickElement {
        &self.components[k as usize]
    }

    pub fn primed_component(&self, k: u32) -> &WickElement {
        &self.primed[k as usize]
    }

    pub fn connection_component(&self, variant: Variant, k: u32) -> &WickElement {
        match variant {
            Variant::Plain => self.component(k),
            Variant::Primed => self.primed_component(k),
        }
    }

    pub fn pairing(&self, variant: Variant) -> &Pairing {
        match variant {
            Variant::Plain => &self.wick,
            Variant::Primed => &self.weyl,
        }
    }

    /// Per-degree residual of `δr = T + R + ∇r - (i/ν) r∘r`; the component
    /// of degree `d` involves `r` up to degree `d + 1`, so `d < max_deg`.
    pub fn equation_residuals(&self) -> Result<Vec<(u32, CheckResult)>> {
        let policy = TruncationPolicy::unbounded();
        let mut out = Vec::new();
        for d in 1..self.max_deg() {
            let lhs = delta(self.component(d + 1));
            let mut rhs = nabla(self.component(d), &self.geometry.gamma)?;
            if d == 1 {
                rhs.add_assign(&self.torsion_element);
            }
            if d == 2 {
                rhs.add_assign(&self.curvature_element);
            }
            let order = lhs.order().min(rhs.order());
            let squares = sum_of_products(&self.components, d + 2, order, &self.wick, &policy)?;
            rhs = rhs.sub(&squares.divide_nu()?.scale(&imag_unit()));
            let residual = lhs.sub(&rhs);
            out.push((
                d,
                CheckResult::from_witness(format!("Fedosov equation, Deg {d}"), residual.witness()),
            ));
        }
        Ok(out)
    }

    /// `D a = -δa + ∇a - (i/ν)[r, a]` (or the primed version) up to total
    /// degree `max_out`, which needs `r` up to degree `max_out + 2`.
    pub fn apply_connection(
        &self,
        a: &WickElement,
        variant: Variant,
        max_out: u32,
    ) -> Result<WickElement> {
        if max_out + 2 > self.max_deg() {
            return Err(Error::order(
                "Fedosov connection beyond the computed degree of r",
                self.max_deg(),
            ));
        }
        let policy = TruncationPolicy::unbounded();
        let pairing = self.pairing(variant);
        let mut out = delta(&a.filter(|k| k.total_degree() <= max_out + 1)).neg();
        out.add_assign(&nabla(
            &a.filter(|k| k.total_degree() <= max_out),
            &self.geometry.gamma,
        )?);
        let target = out.order();
        for k in 2..=max_out + 2 {
            let r = self.connection_component(variant, k);
            if r.is_zero() {
                continue;
            }
            let r = r.truncate_order(target);
            for q in 0..=self.dim() as u32 {
                let part = a.truncate_order(target).filter(|key| {
                    key.total_degree() + k <= max_out + 2 && key.form_degree() == q
                });
                if part.is_zero() {
                    continue;
                }
                out = out.sub(&ad_divided_by_nu(&r, &part, pairing, &policy)?);
            }
        }
        Ok(out.filter(|k| k.total_degree() <= max_out))
    }

    /// `D²a` restricted to the degrees where it is determined, `Deg ≤ max_deg - 3`.
    pub fn flatness_residual(&self, a: &WickElement, variant: Variant) -> Result<WickElement> {
        let top = self
            .max_deg()
            .checked_sub(3)
            .ok_or_else(|| Error::order("flatness check needs r up to Deg 3", self.max_deg()))?;
        let once = self.apply_connection(a, variant, top + 1)?;
        self.apply_connection(&once, variant, top)
    }
}

/// `Σ_{a+b=total, a,b≥2} r^{(a)} ∘ r^{(b)}`, computed at jet order at most `order`.
fn sum_of_products(
    components: &[WickElement],
    total: u32,
    order: u32,
    pairing: &Pairing,
    policy: &TruncationPolicy,
) -> Result<WickElement> {
    let n = components[0].dim();
    let mut acc: Option<WickElement> = None;
    for a in 2..=total.saturating_sub(2) {
        let b = total - a;
        let (Some(ra), Some(rb)) = (components.get(a as usize), components.get(b as usize)) else {
            continue;
        };
        if ra.is_zero() || rb.is_zero() {
            let o = ra.order().min(rb.order()).min(order);
            acc = Some(match acc {
                Some(x) => x.truncate_order(o),
                None => WickElement::zero(n, o),
            });
            continue;
        }
        let p = multiply(&ra.truncate_order(order), &rb.truncate_order(order), pairing, policy)?;
        acc = Some(match acc {
            Some(mut x) => {
                x.add_assign(&p);
                x
            }
            None => p,
        });
    }
    Ok(acc.unwrap_or_else(|| WickElement::zero(n, components[0].order().min(order))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::GeometrySpec;
    use crate::jets::scalar::gq;
    use crate::jets::{Jet, MultiIndex};
    use crate::wick::Key;

    fn solve(name: &str, order: u32, max_deg: u32) -> FedosovSolution {
        let chart = GeometrySpec::bundled(name).unwrap().to_chart(Some(order)).unwrap();
        let geometry = DerivedGeometry::derive(&chart).unwrap();
        FedosovSolution::solve(&geometry, max_deg).unwrap()
    }

    #[test]
    fn flat_charts_have_vanishing_r() {
        for name in ["flat2d", "flat_c2"] {
            let sol = solve(name, 6, 5);
            for k in 0..=5 {
                assert!(sol.component(k).is_zero(), "{name} r^({k})");
                assert!(sol.primed_component(k).is_zero());
            }
        }
    }

    #[test]
    fn second_component_matches_closed_form() {
        // r^(2) = (1/3) ω_{sα} T^α_{tl} y^s y^t dx^l
        let sol = solve("nonintegrable4d", 5, 3);
        let geo = &sol.geometry;
        let n = geo.dim();
        let order = sol.component(2).order();
        let mut expected = WickElement::zero(n, order);
        for s in 0..n {
            for t in 0..n {
                for l in 0..n {
                    let mut c = Jet::zero(n, order);
                    for al in 0..n {
                        c.add_assign_jet(&(geo.omega().get(s, al) * geo.torsion.get(&[al, t, l])));
                    }
                    let y = MultiIndex::unit(s).increment(t);
                    expected.add_term(Key::new(0, y, 1 << l), &c.scale(&gq(1, 3)));
                }
            }
        }
        assert!(!expected.is_zero());
        assert_eq!(sol.component(2).sub(&expected).witness(), None);
    }

    #[test]
    fn fedosov_equation_holds_per_degree() {
        let sol = solve("nonintegrable4d", 6, 6);
        let residuals = sol.equation_residuals().unwrap();
        assert_eq!(residuals.len(), 5);
        for (d, c) in residuals {
            assert!(c.passed, "Deg {d}: {:?}", c.witness);
        }
        assert!(sol.checks.iter().all(|c| c.passed));
    }

    #[test]
    fn connection_is_flat_on_sections() {
        let sol = solve("nonintegrable4d", 6, 6);
        let n = sol.dim();
        let a = WickElement::from_terms(
            n,
            6,
            [
                (Key::new(0, MultiIndex::new(&[1, 0, 0, 0]).unwrap(), 0), Jet::variable(n, 6, 2)),
                (Key::new(0, MultiIndex::new(&[0, 1, 1, 0]).unwrap(), 0b0001), Jet::one(n, 6)),
                (Key::new(1, MultiIndex::ZERO, 0), Jet::variable(n, 6, 0)),
            ],
        );
        for variant in [Variant::Plain, Variant::Primed] {
            let residual = sol.flatness_residual(&a, variant).unwrap();
            assert_eq!(residual.witness(), None);
        }
    }

    #[test]
    fn running_out_of_jet_order_reports_achieved_degree() {
        let chart = GeometrySpec::bundled("nonintegrable4d").unwrap().to_chart(Some(3)).unwrap();
        let geometry = DerivedGeometry::derive(&chart).unwrap();
        match FedosovSolution::solve(&geometry, 8) {
            Err(Error::Order { achieved, .. }) => assert!(achieved >= 2),
            other => panic!("expected an order error, got {other:?}"),
        }
    }
}
