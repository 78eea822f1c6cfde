use std::collections::HashMap;

use super::solution::{FedosovSolution, Variant};
use super::tau::{lift_tau, TauExpansion};
use crate::error::Result;
use crate::jets::{GaussianRational, Jet, MultiIndex};
use crate::wick::{fibre_equivalence, sigma, sigma_of_product, Direction, Key, TruncationPolicy};

/// Formal series `Σ ν^r a_r` of jets, each coefficient at its own reliable order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub coeffs: Vec<Jet>,
}

impl Series {
    pub fn function(f: Jet) -> Self {
        Series { coeffs: vec![f] }
    }

    /// Coefficients evaluated at the base point.
    pub fn values(&self) -> Vec<GaussianRational> {
        self.coeffs.iter().map(Jet::value).collect()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficientwise agreement at the common reliable order of each pair.
    pub fn agrees_with(&self, other: &Series) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.agrees_with(b))
    }

    /// First `ν`-power where the two series disagree.
    pub fn first_disagreement(&self, other: &Series) -> Option<usize> {
        (0..self.coeffs.len().max(other.coeffs.len())).find(|&r| {
            match (self.coeffs.get(r), other.coeffs.get(r)) {
                (Some(a), Some(b)) => !a.agrees_with(b),
                _ => true,
            }
        })
    }
}

fn accumulate(slot: &mut Option<Jet>, value: Jet) {
    *slot = Some(match slot.take() {
        Some(acc) => acc + value,
        None => value,
    });
}

/// Star products built from one Fedosov solution, with the lifts `τ(f)`
/// cached per input jet.
pub struct StarProduct<'a> {
    sol: &'a FedosovSolution,
    variant: Variant,
    lifts: HashMap<Jet, TauExpansion>,
}

impl<'a> StarProduct<'a> {
    pub fn new(sol: &'a FedosovSolution, variant: Variant) -> Self {
        StarProduct {
            sol,
            variant,
            lifts: HashMap::new(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn solution(&self) -> &FedosovSolution {
        self.sol
    }

    /// `τ(f)` up to total degree `deg`, reusing a longer cached lift.
    pub fn lift(&mut self, f: &Jet, deg: u32) -> Result<&TauExpansion> {
        let fresh = match self.lifts.get(f) {
            Some(t) => t.max_deg() < deg,
            None => true,
        };
        if fresh {
            let t = lift_tau(self.sol, f, deg, self.variant)?;
            self.lifts.insert(f.clone(), t);
        }
        Ok(&self.lifts[f])
    }

    /// `C_t(f, g)` as a jet: `σ` of the degree-`2t` part of `τ(f) ∘ τ(g)`.
    pub fn bidifferential(&mut self, f: &Jet, g: &Jet, t: u32) -> Result<Jet> {
        let tf = self.lift(f, 2 * t)?.clone();
        let tg = self.lift(g, 2 * t)?.clone();
        self.bidifferential_from(&tf, &tg, t)
    }

    fn bidifferential_from(&self, tf: &TauExpansion, tg: &TauExpansion, t: u32) -> Result<Jet> {
        let pairing = self.sol.pairing(self.variant);
        let policy = TruncationPolicy::unbounded();
        let mut acc: Option<Jet> = None;
        for i in 0..=2 * t {
            let a = tf.component(i);
            let b = tg.component(2 * t - i);
            let s = sigma_of_product(a, b, pairing, &policy)?;
            let key = Key::new(t, MultiIndex::ZERO, 0);
            let c = s
                .coeff(&key)
                .cloned()
                .unwrap_or_else(|| Jet::zero(a.dim(), s.order()));
            accumulate(&mut acc, c.truncate(s.order()));
        }
        Ok(acc.expect("at least one term"))
    }

    /// `a ∗ b` through `ν^n`.
    pub fn multiply_series(&mut self, a: &Series, b: &Series, n: u32) -> Result<Series> {
        let lift_all = |this: &mut Self, s: &Series| -> Result<Vec<TauExpansion>> {
            s.coeffs
                .iter()
                .enumerate()
                .take(n as usize + 1)
                .map(|(r, f)| this.lift(f, 2 * (n - r as u32)).cloned())
                .collect()
        };
        let ta = lift_all(self, a)?;
        let tb = lift_all(self, b)?;
        let mut coeffs = Vec::new();
        for m in 0..=n {
            let mut acc: Option<Jet> = None;
            for r in 0..=m.min(ta.len() as u32 - 1) {
                for s in 0..=(m - r).min(tb.len() as u32 - 1) {
                    let t = m - r - s;
                    let c = self.bidifferential_from(&ta[r as usize], &tb[s as usize], t)?;
                    accumulate(&mut acc, c);
                }
            }
            coeffs.push(acc.expect("at least one term"));
        }
        Ok(Series { coeffs })
    }

    /// `f ∗ g` through `ν^n`.
    pub fn multiply(&mut self, f: &Jet, g: &Jet, n: u32) -> Result<Series> {
        self.multiply_series(&Series::function(f.clone()), &Series::function(g.clone()), n)
    }
}

/// `{f, g} = ω^{jk} ∂_j f ∂_k g`.
pub fn poisson_bracket(sol: &FedosovSolution, f: &Jet, g: &Jet) -> Result<Jet> {
    let omega_inv = &sol.geometry.metric.omega_inv;
    let n = f.dim();
    let order = f.order().min(g.order()).saturating_sub(1).min(omega_inv.order());
    let mut acc = Jet::zero(n, order);
    for j in 0..n {
        let df = f.derivative(j)?;
        for k in 0..n {
            let w = omega_inv.get(j, k);
            if w.is_zero() {
                continue;
            }
            acc.add_assign_jet(&(w * &(&df * &g.derivative(k)?)));
        }
    }
    Ok(acc)
}

/// `Bf = σ(G τ(f))` through `ν^n`, applied coefficientwise to a series.
pub fn equivalence(sol: &FedosovSolution, a: &Series, n: u32) -> Result<Series> {
    let g_inv = &sol.geometry.metric.g_inv;
    let mut coeffs: Vec<Option<Jet>> = vec![None; n as usize + 1];
    for (r, f) in a.coeffs.iter().enumerate().take(n as usize + 1) {
        let budget = n - r as u32;
        let tau = lift_tau(sol, f, 2 * budget, Variant::Plain)?;
        for s in 0..=budget {
            let c = sigma(&fibre_equivalence(tau.component(2 * s), g_inv, Direction::Forward));
            let key = Key::new(s, MultiIndex::ZERO, 0);
            let v = c
                .coeff(&key)
                .cloned()
                .unwrap_or_else(|| Jet::zero(f.dim(), c.order()));
            accumulate(&mut coeffs[r + s as usize], v.truncate(c.order()));
        }
    }
    Ok(Series {
        coeffs: coeffs.into_iter().map(|c| c.expect("filled")).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::expr::parse_jet;
    use crate::cli::GeometrySpec;
    use crate::geometry::DerivedGeometry;
    use crate::jets::scalar::{gi, gq};

    fn solve(name: &str, order: u32, max_deg: u32) -> FedosovSolution {
        let chart = GeometrySpec::bundled(name).unwrap().to_chart(Some(order)).unwrap();
        FedosovSolution::solve(&DerivedGeometry::derive(&chart).unwrap(), max_deg).unwrap()
    }

    fn jet(text: &str, n: usize, order: u32) -> Jet {
        parse_jet(text, n, order).unwrap()
    }

    #[test]
    fn unit_and_pointwise_product() {
        let sol = solve("nonintegrable4d", 7, 5);
        let f = jet("1 + x1*x2 - 3*x4^2 + x3", 4, 7);
        let g = jet("x2 - x1^3 + 2", 4, 7);
        let one = Jet::one(4, 7);
        for variant in [Variant::Plain, Variant::Primed] {
            let mut star = StarProduct::new(&sol, variant);
            let left = star.multiply(&one, &f, 2).unwrap();
            let right = star.multiply(&f, &one, 2).unwrap();
            assert!(left.coeffs[0].agrees_with(&f) && right.coeffs[0].agrees_with(&f));
            for r in 1..=2 {
                assert!(left.coeffs[r].is_zero() && right.coeffs[r].is_zero());
            }
            let c0 = star.bidifferential(&f, &g, 0).unwrap();
            assert!(c0.agrees_with(&(&f * &g)));
        }
    }

    #[test]
    fn first_order_terms_reproduce_the_bracket() {
        for name in ["flat2d", "kahler2d", "nonintegrable4d"] {
            let sol = solve(name, 6, 4);
            let n = sol.dim();
            let f = jet("x1*x2 + x1^2 - x2", n, 6);
            let g = jet("x2^3 + 2*x1 + x1*x2^2", n, 6);
            let bracket = poisson_bracket(&sol, &f, &g).unwrap();
            let mut plain = StarProduct::new(&sol, Variant::Plain);
            let c1 = plain.bidifferential(&f, &g, 1).unwrap() - plain.bidifferential(&g, &f, 1).unwrap();
            assert!(c1.agrees_with(&bracket.scale(&gi(1, 1))), "{name}");
            let mut primed = StarProduct::new(&sol, Variant::Primed);
            let c1 = primed.bidifferential(&f, &g, 1).unwrap();
            assert!(c1.agrees_with(&bracket.scale(&gi(1, 2))), "{name}");
        }
    }

    #[test]
    fn flat_primed_product_of_coordinates_is_moyal() {
        // x1 ∗′ x2 = x1 x2 + (iν/2) ω^{12}
        let sol = solve("flat2d", 6, 4);
        let mut star = StarProduct::new(&sol, Variant::Primed);
        let x1 = Jet::variable(2, 6, 0);
        let x2 = Jet::variable(2, 6, 1);
        let s = star.multiply(&x1, &x2, 2).unwrap();
        let w12 = sol.geometry.metric.omega_inv.get(0, 1).value();
        assert_eq!(s.values()[1], w12 * gi(1, 2));
        assert!(s.coeffs[2].is_zero());
    }

    #[test]
    fn associativity_on_the_nonintegrable_chart() {
        let sol = solve("nonintegrable4d", 6, 6);
        let f = Series::function(jet("x1 + x2*x3", 4, 6));
        let g = Series::function(jet("x2^2 - x4", 4, 6));
        let h = Series::function(jet("x3*x1 + x4^2", 4, 6));
        for variant in [Variant::Plain, Variant::Primed] {
            let mut star = StarProduct::new(&sol, variant);
            let fg = star.multiply_series(&f, &g, 2).unwrap();
            let gh = star.multiply_series(&g, &h, 2).unwrap();
            let left = star.multiply_series(&fg, &h, 2).unwrap();
            let right = star.multiply_series(&f, &gh, 2).unwrap();
            assert_eq!(left.first_disagreement(&right), None, "{variant:?}");
        }
    }

    #[test]
    fn equivalence_intertwines_the_products() {
        for name in ["flat2d", "nonintegrable4d"] {
            let sol = solve(name, 6, 5);
            let n = sol.dim();
            let f = Series::function(jet("x1^2 + x2", n, 6));
            let g = Series::function(jet("x1*x2 - x2^2", n, 6));
            let mut plain = StarProduct::new(&sol, Variant::Plain);
            let mut primed = StarProduct::new(&sol, Variant::Primed);
            let fg = plain.multiply_series(&f, &g, 2).unwrap();
            let lhs = equivalence(&sol, &fg, 2).unwrap();
            let bf = equivalence(&sol, &f, 2).unwrap();
            let bg = equivalence(&sol, &g, 2).unwrap();
            let rhs = primed.multiply_series(&bf, &bg, 2).unwrap();
            assert_eq!(lhs.first_disagreement(&rhs), None, "{name}");
            assert!(bf.coeffs[0].agrees_with(&f.coeffs[0]));
        }
        let sol = solve("flat2d", 6, 4);
        let b = equivalence(&sol, &Series::function(jet("x1^2", 2, 6)), 2).unwrap();
        // G shifts y1² by -ν g^{11}/2 and τ(x1²) carries y1²
        assert_eq!(b.values(), vec![gq(0, 1), gq(-1, 2), gq(0, 1)]);
    }
}
