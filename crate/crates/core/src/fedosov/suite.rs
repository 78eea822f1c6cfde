use super::solution::{FedosovSolution, Variant};
use super::star::{equivalence, poisson_bracket, Series, StarProduct};
use crate::error::Result;
use crate::geometry::{CheckResult, DerivedGeometry};
use crate::jets::scalar::{gi, imag_unit};
use crate::jets::Jet;
use crate::sampling::{ElementShape, Sampler, Tally};
use crate::wick::{graded_commutator, laplacian, Pairing, TruncationPolicy};

fn series_witness(label: &str, a: &Series, b: &Series) -> Option<String> {
    a.first_disagreement(b).map(|r| format!("{label} differs at nu^{r}"))
}

fn jet_witness(a: &Jet, b: &Jet) -> Option<String> {
    if a.agrees_with(b) {
        return None;
    }
    let order = a.order().min(b.order());
    let diff = a.truncate(order) - b.truncate(order);
    diff.first_nonzero()
        .map(|(m, c)| format!("coefficient of {}: {}", m.monomial_string("x"), crate::jets::scalar::render(&c)))
}

/// `D²a = 0` for both connections on random sections of form degree 0 and 1,
/// within the degrees `r` determines.
pub fn flatness_suite(sol: &FedosovSolution, samples: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let n = sol.dim();
    let order = sol.geometry.chart.order();
    let mut rng = Sampler::new(seed);
    let mut plain = Tally::new("D^2 a = 0 (Wick)");
    let mut primed = Tally::new("D'^2 a = 0 (Weyl)");
    for k in 0..samples {
        let shape = ElementShape { max_nu: 1, ..ElementShape::fibre(3, (k % 2) as u32, 3) };
        let a = rng.element(n, order, shape);
        plain.record(sol.flatness_residual(&a, Variant::Plain)?.witness());
        primed.record(sol.flatness_residual(&a, Variant::Primed)?.witness());
    }
    Ok(vec![plain.finish(), primed.finish()])
}

/// Star-product axioms through `ν^n` on random polynomial triples of degree
/// at most `max_degree`.
pub fn star_suite(
    sol: &FedosovSolution,
    n: u32,
    samples: usize,
    max_degree: u32,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let dim = sol.dim();
    let order = sol.geometry.chart.order();
    let mut rng = Sampler::new(seed);
    let mut star = StarProduct::new(sol, Variant::Plain);
    let mut primed = StarProduct::new(sol, Variant::Primed);
    let one = Jet::one(dim, order);

    let mut tallies: Vec<Tally> = [
        "1 * f = f * 1 = f",
        "(f * g) * h = f * (g * h)",
        "1 *' f = f *' 1 = f",
        "(f *' g) *' h = f *' (g *' h)",
        "C_0(f, g) = f g",
        "C_1(f, g) - C_1(g, f) = i{f, g}",
        "C'_0(f, g) = f g",
        "C'_1(f, g) = (i/2){f, g}",
        "B(f * g) = Bf *' Bg",
    ]
    .iter()
    .map(|s| Tally::new(*s))
    .collect();

    for _ in 0..samples {
        let f = rng.polynomial(dim, order, max_degree, 3);
        let g = rng.polynomial(dim, order, max_degree, 3);
        let h = rng.polynomial(dim, order, max_degree, 3);
        let bracket = poisson_bracket(sol, &f, &g)?;
        let pointwise = &f * &g;

        for (slot, s) in [(0usize, &mut star), (2, &mut primed)] {
            let f_series = Series::function(f.clone());
            let left = s.multiply(&one, &f, n)?;
            let right = s.multiply(&f, &one, n)?;
            let mut unit = Series::function(f.clone());
            unit.coeffs.resize(n as usize + 1, Jet::zero(dim, order));
            tallies[slot].record(
                series_witness("1 * f", &left, &unit).or_else(|| series_witness("f * 1", &right, &unit)),
            );

            let fg = s.multiply(&f, &g, n)?;
            let gh = s.multiply(&g, &h, n)?;
            let outer = s.multiply_series(&fg, &Series::function(h.clone()), n)?;
            let inner = s.multiply_series(&f_series, &gh, n)?;
            tallies[slot + 1].record(series_witness("associator", &outer, &inner));
        }

        let c0 = star.bidifferential(&f, &g, 0)?;
        tallies[4].record(jet_witness(&c0, &pointwise));
        let c1 = star.bidifferential(&f, &g, 1)? - star.bidifferential(&g, &f, 1)?;
        tallies[5].record(jet_witness(&c1, &bracket.scale(&imag_unit())));
        let c0 = primed.bidifferential(&f, &g, 0)?;
        tallies[6].record(jet_witness(&c0, &pointwise));
        let c1 = primed.bidifferential(&f, &g, 1)?;
        tallies[7].record(jet_witness(&c1, &bracket.scale(&gi(1, 2))));

        let fg = star.multiply(&f, &g, n)?;
        let lhs = equivalence(sol, &fg, n)?;
        let bf = equivalence(sol, &Series::function(f.clone()), n)?;
        let bg = equivalence(sol, &Series::function(g.clone()), n)?;
        let rhs = primed.multiply_series(&bf, &bg, n)?;
        tallies[8].record(series_witness("B(f * g) - Bf *' Bg", &lhs, &rhs));
    }
    Ok(tallies.into_iter().map(Tally::finish).collect())
}

/// For random `a, b` homogeneous of `Deg 2`, `deg_s 2` and form degree 0,
/// `c = (1/ν)[a, b]` splits as `c_0 + c_2` with `c_0 = νΔc_2`.
pub fn lemma_suite(geo: &DerivedGeometry, samples: usize, seed: u64) -> Result<CheckResult> {
    let n = geo.dim();
    let order = geo.chart.order();
    let wick = Pairing::wick(&geo.metric);
    let policy = TruncationPolicy::unbounded();
    let mut rng = Sampler::new(seed);
    let mut tally = Tally::new("c_0 = nu Delta c_2 for (1/nu)[a, b], a, b of Deg 2 and deg_s 2");
    for _ in 0..samples {
        let a = rng.homogeneous(n, order, 0, 2, 0, 3);
        let b = rng.homogeneous(n, order, 0, 2, 0, 3);
        let c = graded_commutator(&a, &b, &wick, &policy)?.divide_nu()?;
        let c0 = c.filter(|k| k.sym_degree() == 0);
        let c2 = c.filter(|k| k.sym_degree() == 2);
        let stray = c.filter(|k| k.sym_degree() != 0 && k.sym_degree() != 2);
        let lemma = c0.sub(&laplacian(&c2, &geo.metric.g_inv).shift_nu(1));
        tally.record(stray.witness().or_else(|| lemma.witness()));
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::GeometrySpec;

    fn solve(name: &str, order: u32, max_deg: u32) -> FedosovSolution {
        let chart = GeometrySpec::bundled(name).unwrap().to_chart(Some(order)).unwrap();
        FedosovSolution::solve(&DerivedGeometry::derive(&chart).unwrap(), max_deg).unwrap()
    }

    fn all_pass(checks: &[CheckResult]) {
        for c in checks {
            assert!(c.passed, "{}: {:?}", c.identity, c.witness);
        }
    }

    #[test]
    fn flatness_on_random_sections() {
        all_pass(&flatness_suite(&solve("nonintegrable4d", 5, 5), 3, 1).unwrap());
        all_pass(&flatness_suite(&solve("kahler2d", 5, 5), 3, 2).unwrap());
    }

    #[test]
    fn star_axioms_at_low_order() {
        all_pass(&star_suite(&solve("kahler2d", 6, 4), 1, 2, 3, 3).unwrap());
        all_pass(&star_suite(&solve("nonintegrable4d", 6, 4), 1, 2, 3, 4).unwrap());
    }

    #[test]
    fn lemma_on_every_chart() {
        for spec in GeometrySpec::all_bundled() {
            let geo = DerivedGeometry::derive(&spec.to_chart(Some(3)).unwrap()).unwrap();
            let c = lemma_suite(&geo, 20, 5).unwrap();
            assert!(c.passed, "{}: {:?}", spec.name, c.witness);
        }
    }
}
