use super::element::WickElement;
use super::operators::{
    delta, delta_inverse, fibre_equivalence, hodge_decompose, nabla, torsion_and_curvature_elements,
    Direction,
};
use super::product::{ad_divided_by_nu, multiply, Pairing, TruncationPolicy};
use crate::error::Result;
use crate::geometry::{CheckResult, DerivedGeometry};
use crate::sampling::{ElementShape, Sampler, Tally};

fn sign(form_degree: u32) -> i64 {
    if form_degree % 2 == 1 {
        -1
    } else {
        1
    }
}

/// Operator identities of the Wick algebra on `samples` random elements per
/// identity, drawn from `seed`.
pub fn operator_suite(geo: &DerivedGeometry, samples: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let n = geo.dim();
    let order = geo.chart.order();
    let wick = Pairing::wick(&geo.metric);
    let weyl = Pairing::weyl(&geo.metric);
    let g_inv = &geo.metric.g_inv;
    let gamma = &geo.gamma;
    let (t_elt, r_elt) = torsion_and_curvature_elements(geo);
    let policy = TruncationPolicy::unbounded();
    let mut rng = Sampler::new(seed);

    let names = [
        "delta^2 = 0",
        "(delta^-1)^2 = 0",
        "delta delta^-1 + delta^-1 delta + sigma = id",
        "delta is a graded derivation of the Wick product",
        "nabla is a graded derivation of the Wick product",
        "nabla delta + delta nabla = (i/nu) ad(T)",
        "nabla^2 = -(i/nu) ad(R)",
        "G nabla = nabla G",
        "G delta = delta G",
        "G^-1 G = id",
        "a o' b = G(G^-1 a o G^-1 b)",
        "Wick product is associative",
    ];
    let mut tallies: Vec<Tally> = names.iter().map(|s| Tally::new(*s)).collect();

    for _ in 0..samples {
        let qa = rng.below(3).min(n) as u32;
        let qb = rng.below(2) as u32;
        let a = rng.element(n, order, ElementShape { max_nu: 1, ..ElementShape::fibre(3, qa, 3) });
        let b = rng.element(n, order, ElementShape::fibre(2, qb, 3));
        let c = rng.element(n, order, ElementShape::fibre(2, 0, 2));

        tallies[0].record(delta(&delta(&a)).witness());
        tallies[1].record(delta_inverse(&delta_inverse(&a)).witness());
        let (x, y, z) = hodge_decompose(&a);
        tallies[2].record(x.add(&y).add(&z).sub(&a).witness());

        let ab = multiply(&a, &b, &wick, &policy)?;
        let s = crate::jets::scalar::gq(sign(qa), 1);
        let leibniz = multiply(&delta(&a), &b, &wick, &policy)?
            .add(&multiply(&a, &delta(&b), &wick, &policy)?.scale(&s));
        tallies[3].record(delta(&ab).sub(&leibniz).witness());
        let leibniz = multiply(&nabla(&a, gamma)?, &b, &wick, &policy)?
            .add(&multiply(&a, &nabla(&b, gamma)?, &wick, &policy)?.scale(&s));
        tallies[4].record(nabla(&ab, gamma)?.sub(&leibniz).witness());

        let anti = nabla(&delta(&a), gamma)?.add(&delta(&nabla(&a, gamma)?));
        let torsion_ad = ad_divided_by_nu(&t_elt, &a, &wick, &policy)?;
        tallies[5].record(anti.sub(&torsion_ad).witness());
        let twice = nabla(&nabla(&a, gamma)?, gamma)?;
        let curvature_ad = ad_divided_by_nu(&r_elt, &a, &wick, &policy)?;
        tallies[6].record(twice.add(&curvature_ad).witness());

        let g = |e: &WickElement| fibre_equivalence(e, g_inv, Direction::Forward);
        let g_back = |e: &WickElement| fibre_equivalence(e, g_inv, Direction::Inverse);
        tallies[7].record(g(&nabla(&a, gamma)?).sub(&nabla(&g(&a), gamma)?).witness());
        tallies[8].record(g(&delta(&a)).sub(&delta(&g(&a))).witness());
        tallies[9].record(g_back(&g(&a)).sub(&a).witness());

        let primed = multiply(&a, &b, &weyl, &policy)?;
        let conjugated = g(&multiply(&g_back(&a), &g_back(&b), &wick, &policy)?);
        tallies[10].record(primed.sub(&conjugated).witness());

        let left = multiply(&ab, &c, &wick, &policy)?;
        let right = multiply(&a, &multiply(&b, &c, &wick, &policy)?, &wick, &policy)?;
        tallies[11].record(left.sub(&right).witness());
    }
    Ok(tallies.into_iter().map(Tally::finish).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::GeometrySpec;

    #[test]
    fn every_operator_identity_holds_on_the_corpus() {
        for spec in GeometrySpec::all_bundled() {
            let chart = spec.to_chart(Some(4)).unwrap();
            let geo = DerivedGeometry::derive(&chart).unwrap();
            for c in operator_suite(&geo, 20, 11).unwrap() {
                assert!(c.passed, "{}: {}: {:?}", spec.name, c.identity, c.witness);
            }
        }
    }

    #[test]
    fn torsion_and_curvature_terms_are_not_vacuous() {
        let chart = GeometrySpec::bundled("nonintegrable4d").unwrap().to_chart(Some(4)).unwrap();
        let geo = DerivedGeometry::derive(&chart).unwrap();
        let (t_elt, r_elt) = torsion_and_curvature_elements(&geo);
        let wick = Pairing::wick(&geo.metric);
        let policy = TruncationPolicy::unbounded();
        let a = WickElement::y(4, 4, 0).add(&WickElement::y(4, 4, 2));
        assert!(!ad_divided_by_nu(&t_elt, &a, &wick, &policy).unwrap().is_zero());
        assert!(!ad_divided_by_nu(&r_elt, &a, &wick, &policy).unwrap().is_zero());
        let twice = nabla(&nabla(&a, &geo.gamma).unwrap(), &geo.gamma).unwrap();
        assert!(!twice.is_zero());
    }
}
