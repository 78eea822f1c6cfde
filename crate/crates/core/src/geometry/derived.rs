use super::chart::{closedness_witness, exterior_derivative, validate_chart, ChartGeometry, CheckResult};
use super::tensor::{matrix_witness, sum_products, Tensor};
use crate::error::{Error, Result};
use crate::jets::scalar::gq;
use crate::jets::{Jet, JetMatrix};

/// `g`, `g⁻¹` and `ω⁻¹`.
#[derive(Clone, Debug)]
pub struct Metric {
    pub g: JetMatrix,
    pub g_inv: JetMatrix,
    pub omega_inv: JetMatrix,
}

/// Every tensor derived from the chart, together with the identities that
/// were verified along the way.
#[derive(Clone, Debug)]
pub struct DerivedGeometry {
    pub chart: ChartGeometry,
    pub metric: Metric,
    /// `N^l_{jk}`
    pub nijenhuis: Tensor,
    /// `S^l_{jk}` built from the torsion
    pub s_tensor: Tensor,
    pub levi_civita: Tensor,
    /// `Γ^l_{jk}` of the metric connection with torsion `-N/4`
    pub gamma: Tensor,
    /// `T^l_{jk}`
    pub torsion: Tensor,
    /// `R^s_{tkl}`
    pub curvature: Tensor,
    /// `Z_{jkl}`
    pub z_tensor: Tensor,
    /// Chern–Weil 2-form as an antisymmetric matrix `γ_{kl}`, `γ = Σ_{k<l} γ_{kl} dx^k∧dx^l`
    pub gamma_form: JetMatrix,
    /// `μ_l`
    pub mu_form: Vec<Jet>,
    pub checks: Vec<CheckResult>,
}

impl DerivedGeometry {
    pub fn derive(chart: &ChartGeometry) -> Result<Self> {
        validate_chart(chart)?;
        if chart.order() < 3 {
            return Err(Error::order(
                "geometry derivation needs jet order >= 3 (curvature and its closedness)",
                chart.order(),
            ));
        }
        let mut checks = Vec::new();
        let metric = derive_metric(chart, &mut checks)?;
        let nijenhuis = nijenhuis_tensor(chart, &mut checks)?;
        let levi_civita = levi_civita(&metric)?;
        let yano = yano_connection(chart, &metric, &nijenhuis, &levi_civita, &mut checks)?;
        let curvature = curvature_tensor(chart, &yano.gamma, &mut checks)?;
        let (gamma_form, mu_form) = chern_weil_form(chart, &curvature, &yano.torsion, &mut checks)?;
        Ok(DerivedGeometry {
            chart: chart.clone(),
            metric,
            nijenhuis,
            s_tensor: yano.s_tensor,
            levi_civita,
            gamma: yano.gamma,
            torsion: yano.torsion,
            curvature,
            z_tensor: yano.z_tensor,
            gamma_form,
            mu_form,
            checks,
        })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn omega(&self) -> &JetMatrix {
        &self.chart.omega
    }

    pub fn j(&self) -> &JetMatrix {
        &self.chart.j
    }

    /// `dμ` as an antisymmetric matrix.
    pub fn d_mu(&self) -> Result<JetMatrix> {
        exterior_derivative(&self.mu_form)
    }
}

fn record(checks: &mut Vec<CheckResult>, check: CheckResult) -> Result<()> {
    let outcome = check.clone().require().map(|_| ());
    checks.push(check);
    outcome
}

fn derivatives(m: &JetMatrix) -> Result<Vec<JetMatrix>> {
    let n = m.dim();
    (0..n)
        .map(|a| {
            let rows = (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.get(i, j).derivative(a)).collect())
                .collect::<Result<Vec<Vec<Jet>>>>()?;
            JetMatrix::from_rows(rows)
        })
        .collect()
}

/// `g_{jk} = J^α_j ω_{αk}`, its inverse and `ω⁻¹`; checks
/// `J^k_j = g_{jα}ω^{αk} = g^{kα}ω_{αj}`.
pub fn derive_metric(chart: &ChartGeometry, checks: &mut Vec<CheckResult>) -> Result<Metric> {
    let g = chart.metric();
    let g_inv = g.inverse().map_err(|e| match e {
        Error::Degeneracy { .. } => Error::Degeneracy { what: "g".into() },
        other => other,
    })?;
    let omega_inv = chart.omega.inverse().map_err(|e| match e {
        Error::Degeneracy { .. } => Error::Degeneracy {
            what: "omega".into(),
        },
        other => other,
    })?;
    // (g ω⁻¹)_{jk} = J^k_j, i.e. g ω⁻¹ = Jᵀ
    let jt = chart.j.transpose();
    let first = g.mul(&omega_inv)?.sub(&jt)?;
    record(
        checks,
        CheckResult::from_witness("J^k_j = g_{ja} omega^{ak}", matrix_witness(&first)),
    )?;
    let second = g_inv.mul(&chart.omega)?.sub(&chart.j)?;
    record(
        checks,
        CheckResult::from_witness("J^k_j = g^{ka} omega_{aj}", matrix_witness(&second)),
    )?;
    Ok(Metric {
        g,
        g_inv,
        omega_inv,
    })
}

/// Nijenhuis tensor in coordinates; checks antisymmetry and both type identities.
pub fn nijenhuis_tensor(chart: &ChartGeometry, checks: &mut Vec<CheckResult>) -> Result<Tensor> {
    let n = chart.dim();
    let j = &chart.j;
    let dj = derivatives(j)?;
    let order = dj[0].order();
    let nt = Tensor::from_fn(n, 3, |idx| {
        let (l, a, b) = (idx[0], idx[1], idx[2]);
        let mut acc = Jet::zero(n, order);
        for al in 0..n {
            acc.add_assign_jet(&(dj[al].get(l, a) * j.get(al, b)));
            acc.add_scaled(&(dj[al].get(l, b) * j.get(al, a)), &gq(-1, 1));
        }
        for be in 0..n {
            let diff = dj[a].get(be, b) - dj[b].get(be, a);
            acc.add_assign_jet(&(&diff * j.get(l, be)));
        }
        acc
    });

    let antisym = Tensor::from_fn(n, 3, |i| nt.get(&[i[0], i[1], i[2]]) + nt.get(&[i[0], i[2], i[1]]));
    record(checks, CheckResult::from_witness("N^l_{jk} = -N^l_{kj}", antisym.witness()))?;

    let first = Tensor::from_fn(n, 3, |i| {
        let (l, a, b) = (i[0], i[1], i[2]);
        let mut acc = nt.get(&[l, a, b]).clone();
        for al in 0..n {
            for be in 0..n {
                let t = &(j.get(al, a) * nt.get(&[be, al, b])) * j.get(l, be);
                acc.add_scaled(&t, &gq(-1, 1));
            }
        }
        acc
    });
    record(
        checks,
        CheckResult::from_witness("N^l_{jk} = J^a_j N^b_{ak} J^l_b", first.witness()),
    )?;

    let second = Tensor::from_fn(n, 3, |i| {
        let (l, a, b) = (i[0], i[1], i[2]);
        let mut acc = nt.get(&[l, a, b]).clone();
        for al in 0..n {
            for be in 0..n {
                let t = &(j.get(al, a) * nt.get(&[l, al, be])) * j.get(be, b);
                acc.add_assign_jet(&t);
            }
        }
        acc
    });
    record(
        checks,
        CheckResult::from_witness("N^l_{jk} = -J^a_j N^l_{ab} J^b_k", second.witness()),
    )?;
    Ok(nt)
}

/// `S^l_{jk} = T^l_{jk} - J^a_j T^l_{ab} J^b_k + J^a_j T^b_{ak} J^l_b - J^a_k T^b_{aj} J^l_b`.
pub fn s_tensor(j: &JetMatrix, t: &Tensor) -> Tensor {
    let n = t.n();
    Tensor::from_fn(n, 3, |i| {
        let (l, a, b) = (i[0], i[1], i[2]);
        let mut acc = t.get(&[l, a, b]).clone();
        for p in 0..n {
            for q in 0..n {
                acc.add_scaled(&(&(j.get(p, a) * t.get(&[l, p, q])) * j.get(q, b)), &gq(-1, 1));
                acc.add_assign_jet(&(&(j.get(p, a) * t.get(&[q, p, b])) * j.get(l, q)));
                acc.add_scaled(&(&(j.get(p, b) * t.get(&[q, p, a])) * j.get(l, q)), &gq(-1, 1));
            }
        }
        acc
    })
}

/// Christoffel symbols of the Levi-Civita connection of `g`.
pub fn levi_civita(metric: &Metric) -> Result<Tensor> {
    let n = metric.g.rows();
    let dg = derivatives(&metric.g)?;
    let order = dg[0].order();
    // first kind: [m; jk] = ½(∂_j g_{km} + ∂_k g_{jm} - ∂_m g_{jk})
    let first = Tensor::from_fn(n, 3, |i| {
        let (m, a, b) = (i[0], i[1], i[2]);
        let s = &(dg[a].get(b, m) + dg[b].get(a, m)) - dg[m].get(a, b);
        s.scale(&gq(1, 2))
    });
    Ok(Tensor::from_fn(n, 3, |i| {
        let (l, a, b) = (i[0], i[1], i[2]);
        sum_products(
            n,
            order,
            (0..n).map(|m| (metric.g_inv.get(l, m), first.get(&[m, a, b]))),
        )
    }))
}

/// `∇_a M_{bc}` for a covariant 2-tensor.
pub fn covariant_derivative_2form(gamma: &Tensor, m: &JetMatrix) -> Result<Tensor> {
    let n = gamma.n();
    let dm = derivatives(m)?;
    Ok(Tensor::from_fn(n, 3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut acc = dm[a].get(b, c).clone();
        for al in 0..n {
            acc.add_scaled(&(gamma.get(&[al, a, b]) * m.get(al, c)), &gq(-1, 1));
            acc.add_scaled(&(gamma.get(&[al, a, c]) * m.get(b, al)), &gq(-1, 1));
        }
        acc
    }))
}

/// `∇_a J^b_c` for the (1,1)-tensor stored as `J[b][c]`.
pub fn covariant_derivative_endomorphism(gamma: &Tensor, j: &JetMatrix) -> Result<Tensor> {
    let n = gamma.n();
    let dj = derivatives(j)?;
    Ok(Tensor::from_fn(n, 3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut acc = dj[a].get(b, c).clone();
        for al in 0..n {
            acc.add_assign_jet(&(gamma.get(&[b, a, al]) * j.get(al, c)));
            acc.add_scaled(&(gamma.get(&[al, a, c]) * j.get(b, al)), &gq(-1, 1));
        }
        acc
    }))
}

/// Torsion `Γ^l_{jk} - Γ^l_{kj}`.
pub fn torsion_of(gamma: &Tensor) -> Tensor {
    Tensor::from_fn(gamma.n(), 3, |i| {
        gamma.get(&[i[0], i[1], i[2]]) - gamma.get(&[i[0], i[2], i[1]])
    })
}

/// `Z_{jkl} = T^a_{jk} ω_{al} + T^a_{kl} ω_{aj} + T^a_{lj} ω_{ak}`.
pub fn z_tensor(t: &Tensor, omega: &JetMatrix) -> Tensor {
    let n = t.n();
    let order = t.order().min(omega.order());
    Tensor::from_fn(n, 3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut acc = Jet::zero(n, order);
        for al in 0..n {
            acc.add_assign_jet(&(t.get(&[al, a, b]) * omega.get(al, c)));
            acc.add_assign_jet(&(t.get(&[al, b, c]) * omega.get(al, a)));
            acc.add_assign_jet(&(t.get(&[al, c, a]) * omega.get(al, b)));
        }
        acc
    })
}

/// Residual of `∇_j ω_{kl} + ∇_k ω_{lj} + ∇_l ω_{jk} = -Z_{jkl}` for an
/// arbitrary connection.
pub fn cyclic_identity_residual(gamma: &Tensor, omega: &JetMatrix) -> Result<Tensor> {
    let nabla = covariant_derivative_2form(gamma, omega)?;
    let z = z_tensor(&torsion_of(gamma), omega);
    Ok(Tensor::from_fn(gamma.n(), 3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let cyc = &(nabla.get(&[a, b, c]) + nabla.get(&[b, c, a])) + nabla.get(&[c, a, b]);
        &cyc + z.get(&[a, b, c])
    }))
}

pub struct YanoConnection {
    pub gamma: Tensor,
    pub torsion: Tensor,
    pub s_tensor: Tensor,
    pub z_tensor: Tensor,
}

/// Metric connection with torsion `T = -N/4`, as Levi-Civita plus contorsion
/// `½ g^{lm}(T_{m,jk} - T_{j,km} + T_{k,mj})`, `T_{m,jk} = g_{ma} T^a_{jk}`.
///
/// Both defining properties and the consequences `∇ω = ∇J = 0`, `Z = 0`,
/// `N = -S` are re-verified before returning.
pub fn yano_connection(
    chart: &ChartGeometry,
    metric: &Metric,
    nijenhuis: &Tensor,
    levi_civita: &Tensor,
    checks: &mut Vec<CheckResult>,
) -> Result<YanoConnection> {
    let n = chart.dim();
    let torsion = nijenhuis.scale(&gq(-1, 4));
    let order = torsion.order().min(metric.g.order());
    let lowered = Tensor::from_fn(n, 3, |i| {
        sum_products(
            n,
            order,
            (0..n).map(|al| (metric.g.get(i[0], al), torsion.get(&[al, i[1], i[2]]))),
        )
    });
    let gamma = Tensor::from_fn(n, 3, |i| {
        let (l, a, b) = (i[0], i[1], i[2]);
        let mut contorsion = Jet::zero(n, order);
        for m in 0..n {
            let bracket = &(lowered.get(&[m, a, b]) - lowered.get(&[a, b, m])) + lowered.get(&[b, m, a]);
            contorsion.add_assign_jet(&(metric.g_inv.get(l, m) * &bracket));
        }
        levi_civita.get(&[l, a, b]) + &contorsion.scale(&gq(1, 2))
    });

    let torsion_residual = torsion_of(&gamma).sub(&torsion);
    record(
        checks,
        CheckResult::from_witness("torsion = -1/4 N", torsion_residual.witness()),
    )?;
    let nabla_g = covariant_derivative_2form(&gamma, &metric.g)?;
    record(checks, CheckResult::from_witness("nabla g = 0", nabla_g.witness()))?;
    let nabla_omega = covariant_derivative_2form(&gamma, &chart.omega)?;
    record(checks, CheckResult::from_witness("nabla omega = 0", nabla_omega.witness()))?;
    let nabla_j = covariant_derivative_endomorphism(&gamma, &chart.j)?;
    record(checks, CheckResult::from_witness("nabla J = 0", nabla_j.witness()))?;

    let z = z_tensor(&torsion, &chart.omega);
    let z_antisym = Tensor::from_fn(n, 3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let s1 = z.get(&[a, b, c]) + z.get(&[b, a, c]);
        let s2 = z.get(&[a, b, c]) + z.get(&[a, c, b]);
        if s1.is_zero() {
            s2
        } else {
            s1
        }
    });
    record(
        checks,
        CheckResult::from_witness("Z totally antisymmetric", z_antisym.witness()),
    )?;
    record(checks, CheckResult::from_witness("Z = 0", z.witness()))?;

    let s = s_tensor(&chart.j, &torsion);
    record(
        checks,
        CheckResult::from_witness("N = -S", nijenhuis.add(&s).witness()),
    )?;

    let cyc = cyclic_identity_residual(&gamma, &chart.omega)?;
    record(
        checks,
        CheckResult::from_witness("cyclic omega identity (torsion connection)", cyc.witness()),
    )?;
    let cyc_lc = cyclic_identity_residual(levi_civita, &chart.omega)?;
    record(
        checks,
        CheckResult::from_witness("cyclic omega identity (Levi-Civita)", cyc_lc.witness()),
    )?;

    Ok(YanoConnection {
        gamma,
        torsion,
        s_tensor: s,
        z_tensor: z,
    })
}

/// `R^s_{tkl} = ∂_kΓ^s_{lt} - ∂_lΓ^s_{kt} + Γ^s_{ka}Γ^a_{lt} - Γ^s_{la}Γ^a_{kt}`.
pub fn curvature_of(gamma: &Tensor) -> Result<Tensor> {
    let n = gamma.n();
    if gamma.order() == 0 {
        return Err(Error::order("curvature needs a connection of order >= 1", 0));
    }
    let dgamma: Vec<Tensor> = (0..n)
        .map(|a| Tensor::try_from_fn(n, 3, |i| gamma.get(i).derivative(a)))
        .collect::<Result<_>>()?;
    Ok(Tensor::from_fn(n, 4, |i| {
        let (s, t, k, l) = (i[0], i[1], i[2], i[3]);
        let mut acc = dgamma[k].get(&[s, l, t]) - dgamma[l].get(&[s, k, t]);
        for al in 0..n {
            acc.add_assign_jet(&(gamma.get(&[s, k, al]) * gamma.get(&[al, l, t])));
            acc.add_scaled(&(gamma.get(&[s, l, al]) * gamma.get(&[al, k, t])), &gq(-1, 1));
        }
        acc
    }))
}

pub fn curvature_tensor(
    chart: &ChartGeometry,
    gamma: &Tensor,
    checks: &mut Vec<CheckResult>,
) -> Result<Tensor> {
    let n = chart.dim();
    let r = curvature_of(gamma)?;
    let antisym = Tensor::from_fn(n, 4, |i| {
        r.get(&[i[0], i[1], i[2], i[3]]) + r.get(&[i[0], i[1], i[3], i[2]])
    });
    record(
        checks,
        CheckResult::from_witness("R^s_{tkl} = -R^s_{tlk}", antisym.witness()),
    )?;
    let omega = &chart.omega;
    let order = r.order().min(omega.order());
    let lowered = Tensor::from_fn(n, 4, |i| {
        sum_products(
            n,
            order,
            (0..n).map(|al| (omega.get(i[0], al), r.get(&[al, i[1], i[2], i[3]]))),
        )
    });
    let sari = Tensor::from_fn(n, 4, |i| {
        lowered.get(&[i[0], i[1], i[2], i[3]]) - lowered.get(&[i[1], i[0], i[2], i[3]])
    });
    record(
        checks,
        CheckResult::from_witness("omega_{sa} R^a_{tkl} symmetric in (s,t)", sari.witness()),
    )?;
    let trace = Tensor::from_fn(n, 2, |i| {
        let mut acc = Jet::zero(n, r.order());
        for t in 0..n {
            acc.add_assign_jet(r.get(&[t, t, i[0], i[1]]));
        }
        acc
    });
    record(checks, CheckResult::from_witness("R^t_{tkl} = 0", trace.witness()))?;
    Ok(r)
}

/// `γ_{kl} = -½ J^t_s R^s_{tkl}` (so `γ = -¼ J^t_s R^s_{tkl} dx^k∧dx^l`) and
/// `μ_l = (1/6) J^t_s T^s_{tl}`; checks `dγ = 0`.
pub fn chern_weil_form(
    chart: &ChartGeometry,
    curvature: &Tensor,
    torsion: &Tensor,
    checks: &mut Vec<CheckResult>,
) -> Result<(JetMatrix, Vec<Jet>)> {
    let n = chart.dim();
    let j = &chart.j;
    let order = curvature.order().min(j.order());
    let gamma_form = JetMatrix::from_fn(n, n, n, order, |k, l| {
        let mut acc = Jet::zero(n, order);
        for s in 0..n {
            for t in 0..n {
                acc.add_assign_jet(&(j.get(t, s) * curvature.get(&[s, t, k, l])));
            }
        }
        acc.scale(&gq(-1, 2))
    });
    if gamma_form.order() == 0 {
        return Err(Error::order("closedness of the Chern-Weil form", 0));
    }
    record(
        checks,
        CheckResult::from_witness("d gamma = 0", closedness_witness(&gamma_form)),
    )?;
    let mu_order = torsion.order().min(j.order());
    let mu_form = (0..n)
        .map(|l| {
            let mut acc = Jet::zero(n, mu_order);
            for s in 0..n {
                for t in 0..n {
                    acc.add_assign_jet(&(j.get(t, s) * torsion.get(&[s, t, l])));
                }
            }
            acc.scale(&gq(1, 6))
        })
        .collect();
    Ok((gamma_form, mu_form))
}
