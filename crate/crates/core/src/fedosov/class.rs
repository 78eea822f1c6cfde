use super::solution::{FedosovSolution, Variant};
use super::star::StarProduct;
use super::tau::lift_tau;
use crate::error::{Error, Result};
use crate::geometry::{closedness_witness, matrix_witness, CheckResult};
use crate::jets::scalar::{gi, gq, imag_unit};
use crate::jets::{GaussianRational, Jet, JetMatrix, MultiIndex};
use crate::wick::{delta, laplacian, multiply, nabla, Key, TruncationPolicy, WickElement};

/// Antisymmetric matrix `F` of a `y`- and `ν`-free 2-form `Σ_{k<l} F_{kl} dx^k∧dx^l`.
pub fn two_form_matrix(a: &WickElement) -> Result<JetMatrix> {
    let n = a.dim();
    let order = a.order();
    let mut rows = vec![vec![Jet::zero(n, order); n]; n];
    for (key, c) in a.terms() {
        if key.nu != 0 || key.y != MultiIndex::ZERO || key.form_degree() != 2 {
            return Err(Error::Grading(format!(
                "expected a scalar 2-form, found {}",
                crate::wick::describe_key(key, n)
            )));
        }
        let k = key.dx.trailing_zeros() as usize;
        let l = 7 - (key.dx.leading_zeros() as usize);
        let c = c.truncate(order);
        rows[l][k] = -&c;
        rows[k][l] = c;
    }
    JetMatrix::from_rows(rows)
}

fn agree(identity: &str, a: &JetMatrix, b: &JetMatrix) -> Result<CheckResult> {
    let order = a.order().min(b.order());
    let diff = a.truncate(order).sub(&b.truncate(order))?;
    Ok(CheckResult::from_witness(identity, matrix_witness(&diff)))
}

/// κ by three independent routes, `λ = Δ∇r^{(2)}`, and the identities
/// linking the routes.
#[derive(Clone, Debug)]
pub struct KappaRoutes {
    /// `(i/ν) δ((r′)^{(3)}_1)`
    pub via_primed: JetMatrix,
    /// `-iΔ(R + ∇r^{(2)})`
    pub via_laplacian: JetMatrix,
    /// `(i/2)γ - i dμ`
    pub via_chern_weil: JetMatrix,
    pub lambda: JetMatrix,
    pub d_mu: JetMatrix,
    pub checks: Vec<CheckResult>,
}

impl KappaRoutes {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn kappa_via_formula(sol: &FedosovSolution) -> Result<KappaRoutes> {
    if sol.max_deg() < 3 {
        return Err(Error::order("kappa needs r up to Deg 3", sol.max_deg()));
    }
    let geo = &sol.geometry;
    let g_inv = &geo.metric.g_inv;
    let i = imag_unit();
    let mut checks = Vec::new();

    let r2 = sol.component(2);
    let r3 = sol.component(3);
    let nabla_r2 = nabla(r2, &geo.gamma)?;

    let r3p_1 = sol.primed_component(3).filter(|k| k.sym_degree() == 1);
    let via_primed = two_form_matrix(&delta(&r3p_1).divide_nu()?.scale(&i))?;

    let curvature_part = sol.curvature_element.add(&nabla_r2);
    let via_laplacian = two_form_matrix(&laplacian(&curvature_part, g_inv).scale(&gi(-1, 1)))?;

    let d_mu = geo.d_mu()?;
    let via_chern_weil = geo.gamma_form.scale(&gi(1, 2)).sub(&d_mu.scale(&i))?;
    let lambda = two_form_matrix(&laplacian(&nabla_r2, g_inv))?;

    checks.push(agree("kappa: primed route = Laplacian route", &via_primed, &via_laplacian)?);
    checks.push(agree("kappa: Laplacian route = Chern-Weil route", &via_laplacian, &via_chern_weil)?);
    checks.push(agree("lambda = d mu", &lambda, &d_mu)?);

    // c = (i/ν) r^{(2)}∘r^{(2)} = c_0 + c_2 split by symmetric degree
    let policy = TruncationPolicy::unbounded();
    let c = multiply(r2, r2, &sol.wick, &policy)?.divide_nu()?.scale(&i);
    let c0 = c.filter(|k| k.sym_degree() == 0);
    let c2 = c.filter(|k| k.sym_degree() == 2);
    let lemma = c0.sub(&laplacian(&c2, g_inv).shift_nu(1));
    checks.push(CheckResult::from_witness("c_0 = nu Delta c_2", lemma.witness()));

    let r3_1 = r3.filter(|k| k.sym_degree() == 1);
    let r3_3 = r3.filter(|k| k.sym_degree() == 3);
    checks.push(CheckResult::from_witness(
        "delta r^(3)_1 = -c_0",
        delta(&r3_1).add(&c0).witness(),
    ));
    let upper = delta(&r3_3).sub(&curvature_part.sub(&c2));
    checks.push(CheckResult::from_witness(
        "delta r^(3)_3 = R + nabla r^(2) - c_2",
        upper.witness(),
    ));
    let first = delta(&r3p_1)
        .sub(&delta(&r3_1))
        .add(&laplacian(&delta(&r3_3), g_inv).shift_nu(1));
    checks.push(CheckResult::from_witness(
        "delta (r')^(3)_1 = delta r^(3)_1 - nu Delta delta r^(3)_3",
        first.witness(),
    ));

    Ok(KappaRoutes {
        via_primed,
        via_laplacian,
        via_chern_weil,
        lambda,
        d_mu,
        checks,
    })
}

/// `C₂⁻(f,g) = (i/2) ω^{pq}(∂_p t₀(f) ∂_q t₁(g) + ∂_p t₁(f) ∂_q t₀(g))|_{y=0}`
/// from the primed lifts.
pub fn extract_c2_minus(sol: &FedosovSolution, f: &Jet, g: &Jet) -> Result<Jet> {
    let n = sol.dim();
    let tf = lift_tau(sol, f, 3, Variant::Primed)?;
    let tg = lift_tau(sol, g, 3, Variant::Primed)?;
    let slope = |t: &WickElement, p: usize| {
        t.coeff(&Key::new(0, MultiIndex::unit(p), 0))
            .cloned()
            .unwrap_or_else(|| Jet::zero(n, t.order()))
    };
    let (f0, f1) = (tf.nu_coefficient(0), tf.nu_coefficient(1));
    let (g0, g1) = (tg.nu_coefficient(0), tg.nu_coefficient(1));
    let omega_inv = &sol.geometry.metric.omega_inv;
    let order = [&f0, &f1, &g0, &g1]
        .iter()
        .map(|t| t.order())
        .min()
        .unwrap_or(0)
        .min(omega_inv.order());
    let mut acc = Jet::zero(n, order);
    for p in 0..n {
        for q in 0..n {
            let w = omega_inv.get(p, q);
            if w.is_zero() {
                continue;
            }
            let pair = &(&slope(&f0, p) * &slope(&g1, q)) + &(&slope(&f1, p) * &slope(&g0, q));
            acc.add_assign_jet(&(w * &pair));
        }
    }
    Ok(acc.scale(&gi(1, 2)))
}

/// `½(C′₂(f,g) - C′₂(g,f))` from the primed star product.
pub fn c2_minus_from_star(star: &mut StarProduct, f: &Jet, g: &Jet) -> Result<Jet> {
    let fg = star.bidifferential(f, g, 2)?;
    let gf = star.bidifferential(g, f, 2)?;
    Ok((fg - gf).scale(&gq(1, 2)))
}

/// κ at the base point from `C₂⁻(x^a, x^b) = ½ κ(ξ_a, ξ_b)` with
/// `ξ_f = ω^{jk} ∂_j f ∂_k`, so that `F = ω M ωᵀ` for `M_{ab} = 2C₂⁻(x^a,x^b)`.
pub fn kappa_via_c2(sol: &FedosovSolution) -> Result<Vec<Vec<GaussianRational>>> {
    let n = sol.dim();
    let k = sol.geometry.chart.order();
    let coords: Vec<Jet> = (0..n).map(|a| Jet::variable(n, k, a)).collect();
    let mut m = vec![vec![GaussianRational::default(); n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let v = extract_c2_minus(sol, &coords[a], &coords[b])?.value();
            let v = v.clone() + v;
            m[b][a] = -v.clone();
            m[a][b] = v;
        }
    }
    let w = sol.geometry.omega().constant_part();
    let prod = |x: &[Vec<GaussianRational>], y: &[Vec<GaussianRational>]| {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(GaussianRational::default(), |s, l| {
                            s + x[i][l].clone() * y[l][j].clone()
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let wt: Vec<Vec<GaussianRational>> =
        (0..n).map(|i| (0..n).map(|j| w[j][i].clone()).collect()).collect();
    Ok(prod(&prod(&w, &m), &wt))
}

/// `κ - (i/2)γ = -i dμ`, `Tr R̂ = 0`, and closedness of κ and γ.
pub fn canonical_class_check(sol: &FedosovSolution, kappa: &JetMatrix) -> Result<Vec<CheckResult>> {
    let geo = &sol.geometry;
    let n = geo.dim();
    let lhs = kappa.sub(&geo.gamma_form.scale(&gi(1, 2)))?;
    let rhs = geo.d_mu()?.scale(&gi(-1, 1));
    let mut out = vec![agree("kappa - (i/2) gamma = -i d mu", &lhs, &rhs)?];
    let curvature = &geo.curvature;
    let trace = JetMatrix::from_fn(n, n, n, curvature.order(), |k, l| {
        let mut acc = Jet::zero(n, curvature.order());
        for s in 0..n {
            acc.add_assign_jet(curvature.get(&[s, s, k, l]));
        }
        acc
    });
    out.push(CheckResult::from_witness("Tr R = 0", matrix_witness(&trace)));
    out.push(CheckResult::from_witness("d kappa = 0", closedness_witness(kappa)));
    out.push(CheckResult::from_witness(
        "d gamma = 0",
        closedness_witness(&geo.gamma_form),
    ));
    Ok(out)
}

/// Base-point values of a 2-form.
pub fn base_values(m: &JetMatrix) -> Vec<Vec<GaussianRational>> {
    m.constant_part()
}

/// Checks of the Kähler degeneration: `T`, `r^{(2)}`, `μ` vanish, and `C₁`
/// differentiates `f` along `(1,0)` and `g` along `(0,1)` at the base point,
/// i.e. `Π̄ M = 0 = M Πᵀ` for `M^{pq} = C₁(x^p, x^q)(0)` and `Π = ½(1 - iJ)`.
pub fn kahler_degeneration(sol: &FedosovSolution) -> Result<Vec<CheckResult>> {
    let geo = &sol.geometry;
    let n = geo.dim();
    if !geo.nijenhuis.is_zero() {
        return Err(Error::MalformedInput(
            "Kähler degeneration needs an integrable J".into(),
        ));
    }
    let mut out = vec![
        CheckResult::from_witness("torsion = 0", geo.torsion.witness()),
        CheckResult::from_witness("r^(2) = 0", sol.component(2).witness()),
        CheckResult::from_witness(
            "mu = 0",
            geo.mu_form
                .iter()
                .position(|m| !m.is_zero())
                .map(|l| format!("mu_{}", l + 1)),
        ),
    ];
    let m = first_order_matrix(sol, Variant::Plain)?;
    let j = geo.j().constant_part();
    let half = gq(1, 2);
    let projector = |s: GaussianRational| -> Vec<Vec<GaussianRational>> {
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let id = if a == b { gq(1, 1) } else { gq(0, 1) };
                        (id + s.clone() * j[a][b].clone()) * half.clone()
                    })
                    .collect()
            })
            .collect()
    };
    let pi = projector(gi(-1, 1));
    let pi_bar = projector(gi(1, 1));
    let left = find_nonzero(n, |p, q| {
        (0..n).fold(GaussianRational::default(), |s, a| s + pi_bar[p][a].clone() * m[a][q].clone())
    });
    let right = find_nonzero(n, |p, q| {
        (0..n).fold(GaussianRational::default(), |s, b| s + m[p][b].clone() * pi[q][b].clone())
    });
    let nontrivial = find_nonzero(n, |p, q| m[p][q].clone());
    out.push(CheckResult::from_witness(
        "C_1 differentiates f along (1,0): Pi_bar M = 0",
        left,
    ));
    out.push(CheckResult::from_witness(
        "C_1 differentiates g along (0,1): M Pi^T = 0",
        right,
    ));
    out.push(CheckResult::from_witness(
        "C_1 is nonzero",
        nontrivial.is_none().then(|| "C_1(x^p, x^q)(0) = 0 for all p, q".to_string()),
    ));
    Ok(out)
}

fn find_nonzero(n: usize, entry: impl Fn(usize, usize) -> GaussianRational) -> Option<String> {
    for p in 0..n {
        for q in 0..n {
            let v = entry(p, q);
            if v != GaussianRational::default() {
                return Some(format!("[{}][{}] = {}", p + 1, q + 1, crate::jets::scalar::render(&v)));
            }
        }
    }
    None
}

/// `M^{pq} = C₁(x^p, x^q)` at the base point.
pub fn first_order_matrix(sol: &FedosovSolution, variant: Variant) -> Result<Vec<Vec<GaussianRational>>> {
    let n = sol.dim();
    let k = sol.geometry.chart.order();
    let mut star = StarProduct::new(sol, variant);
    let coords: Vec<Jet> = (0..n).map(|a| Jet::variable(n, k, a)).collect();
    (0..n)
        .map(|p| {
            (0..n)
                .map(|q| Ok(star.bidifferential(&coords[p], &coords[q], 1)?.value()))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::GeometrySpec;
    use crate::geometry::DerivedGeometry;

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
    fn flat_charts_have_vanishing_kappa() {
        for name in ["flat2d", "flat_c2"] {
            let sol = solve(name, 5, 4);
            let routes = kappa_via_formula(&sol).unwrap();
            all_pass(&routes.checks);
            assert!(routes.via_primed.is_zero() && routes.via_chern_weil.is_zero());
            let extracted = kappa_via_c2(&sol).unwrap();
            assert!(extracted.iter().flatten().all(|v| *v == GaussianRational::default()));
            all_pass(&canonical_class_check(&sol, &routes.via_primed).unwrap());
        }
    }

    #[test]
    fn kahler_chart_degenerates() {
        let sol = solve("kahler2d", 6, 4);
        all_pass(&kahler_degeneration(&sol).unwrap());
        let routes = kappa_via_formula(&sol).unwrap();
        all_pass(&routes.checks);
        assert!(routes.lambda.is_zero());
        let half_gamma = sol.geometry.gamma_form.scale(&gi(1, 2));
        assert!(!half_gamma.is_zero());
        assert_eq!(matrix_witness(&routes.via_primed.sub(&half_gamma).unwrap()), None);
        all_pass(&canonical_class_check(&sol, &routes.via_primed).unwrap());
    }

    #[test]
    fn nonintegrable_chart_routes_agree() {
        let sol = solve("nonintegrable4d", 6, 4);
        let routes = kappa_via_formula(&sol).unwrap();
        all_pass(&routes.checks);
        // μ vanishes identically, so the class is carried by γ alone
        assert!(routes.d_mu.is_zero() && routes.lambda.is_zero());
        assert!(!routes.via_chern_weil.is_zero());
        all_pass(&canonical_class_check(&sol, &routes.via_chern_weil).unwrap());
        assert_eq!(kappa_via_c2(&sol).unwrap(), base_values(&routes.via_chern_weil));

        let n = sol.dim();
        let mut star = StarProduct::new(&sol, Variant::Primed);
        let f = crate::cli::expr::parse_jet("x1*x2 + x3", n, 6).unwrap();
        let g = crate::cli::expr::parse_jet("x2^2 - x1*x4", n, 6).unwrap();
        let direct = extract_c2_minus(&sol, &f, &g).unwrap();
        let table = c2_minus_from_star(&mut star, &f, &g).unwrap();
        assert!(direct.agrees_with(&table));
    }

    #[test]
    fn integrability_is_required_for_the_degeneration_check() {
        let sol = solve("nonintegrable4d", 5, 3);
        assert!(matches!(kahler_degeneration(&sol), Err(Error::MalformedInput(_))));
    }
}
