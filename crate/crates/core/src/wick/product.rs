use std::cell::Cell;
use std::collections::HashMap;

use super::element::{wedge_sign, Key, WickElement};
use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::jets::scalar::{self, gi, gq, imag_unit};
use crate::jets::{GaussianRational, Jet, JetMatrix, MultiIndex};

/// Cap on the total degree `Deg` kept by products; discarded terms are
/// counted so reports can state what was cut.
#[derive(Clone, Debug, Default)]
pub struct TruncationPolicy {
    max_deg: Option<u32>,
    discarded: Cell<u64>,
}

impl TruncationPolicy {
    pub fn unbounded() -> Self {
        TruncationPolicy::default()
    }

    pub fn up_to(max_deg: u32) -> Self {
        TruncationPolicy {
            max_deg: Some(max_deg),
            discarded: Cell::new(0),
        }
    }

    pub fn max_deg(&self) -> Option<u32> {
        self.max_deg
    }

    /// Number of terms dropped so far.
    pub fn discarded(&self) -> u64 {
        self.discarded.get()
    }

    fn admits(&self, deg: u32) -> bool {
        match self.max_deg {
            Some(m) if deg > m => {
                self.discarded.set(self.discarded.get() + 1);
                false
            }
            _ => true,
        }
    }

    pub fn apply(&self, a: &WickElement) -> WickElement {
        a.filter(|k| self.admits(k.total_degree()))
    }
}

/// The bivector contracted against fibre derivatives in a fibrewise product:
/// `Λ = ω⁻¹ - i g⁻¹` for the Wick product, `ω⁻¹` for the Weyl product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    matrix: JetMatrix,
}

impl Pairing {
    pub fn wick(metric: &Metric) -> Self {
        let lambda = metric
            .omega_inv
            .sub(&metric.g_inv.scale(&imag_unit()))
            .expect("square matrices of equal size");
        Pairing { matrix: lambda }
    }

    pub fn weyl(metric: &Metric) -> Self {
        Pairing {
            matrix: metric.omega_inv.clone(),
        }
    }

    pub fn from_matrix(matrix: JetMatrix) -> Self {
        Pairing { matrix }
    }

    pub fn matrix(&self) -> &JetMatrix {
        &self.matrix
    }

    /// `L_j b = Σ_k P^{jk} ∂b/∂y^k`.
    fn lower(&self, j: usize, b: &WickElement) -> WickElement {
        let n = b.dim();
        let order = b.order().min(self.matrix.order());
        let mut out = WickElement::zero(n, order);
        for (key, c) in b.terms() {
            for k in 0..n {
                let e = key.y.exponent(k);
                if e == 0 {
                    continue;
                }
                let p = self.matrix.get(j, k);
                if p.is_zero() {
                    continue;
                }
                let y = key.y.decrement(k).expect("positive exponent");
                out.accumulate(Key::new(key.nu, y, key.dx), (c * p).scale(&gq(e as i64, 1)));
            }
        }
        out
    }
}

/// `L^γ b` for every multi-index `γ` of degree up to `max`, built from
/// `L^{γ-e_j} b` with `j` the first variable of `γ`.
fn lowered_family(b: &WickElement, pairing: &Pairing, max: u32) -> HashMap<MultiIndex, WickElement> {
    let n = b.dim();
    let mut family = HashMap::new();
    family.insert(MultiIndex::ZERO, b.clone());
    for deg in 1..=max {
        for gamma in MultiIndex::of_degree(n, deg) {
            let j = (0..n).find(|&i| gamma.exponent(i) > 0).expect("nonzero multi-index");
            let parent = gamma.decrement(j).expect("positive exponent");
            let lowered = pairing.lower(j, &family[&parent]);
            family.insert(gamma, lowered);
        }
    }
    family
}

/// `(i/2)^m / γ!` for `|γ| = m`.
fn expansion_factor(gamma: MultiIndex) -> GaussianRational {
    let m = gamma.degree();
    let mut f = gq(1, gamma.factorial() as i64);
    let half_i = gi(1, 2);
    for _ in 0..m {
        f *= &half_i;
    }
    f
}

/// `∂^γ/∂y^γ y^α = α!/(α-γ)! y^{α-γ}`.
fn falling_factor(alpha: MultiIndex, gamma: MultiIndex, dim: usize) -> i64 {
    let mut f = 1i64;
    for i in 0..dim {
        let (a, g) = (alpha.exponent(i) as i64, gamma.exponent(i) as i64);
        for t in 0..g {
            f *= a - t;
        }
    }
    f
}

/// Raw coefficient products per output key, merged lazily so that
/// repeated additions into one jet do not rebuild it every time.
struct ProductBuffer {
    dim: usize,
    order: u32,
    buckets: HashMap<Key, Vec<(MultiIndex, GaussianRational)>>,
}

const COMPACT_AT: usize = 1 << 14;

fn compact(bucket: &mut Vec<(MultiIndex, GaussianRational)>) {
    bucket.sort_unstable_by_key(|(m, _)| *m);
    let mut merged: Vec<(MultiIndex, GaussianRational)> = Vec::with_capacity(bucket.len() / 2);
    for (m, c) in bucket.drain(..) {
        match merged.last_mut() {
            Some((last, acc)) if *last == m => *acc += c,
            _ => merged.push((m, c)),
        }
    }
    merged.retain(|(_, c)| !scalar::is_zero(c));
    *bucket = merged;
}

impl ProductBuffer {
    fn new(dim: usize, order: u32) -> Self {
        ProductBuffer {
            dim,
            order,
            buckets: HashMap::new(),
        }
    }

    /// Add `±a·b` to the coefficient of `key`.
    fn push(&mut self, key: Key, a: &Jet, b: &Jet, negative: bool) {
        let order = self.order;
        let bucket = self.buckets.entry(key).or_default();
        for (ma, ca) in a.terms() {
            let da = ma.degree();
            if da > order {
                continue;
            }
            for (mb, cb) in b.terms() {
                if da + mb.degree() > order {
                    continue;
                }
                let c = scalar::mul(ca, cb);
                bucket.push((ma.add(*mb), if negative { -c } else { c }));
            }
        }
        if bucket.len() > COMPACT_AT {
            compact(bucket);
        }
    }

    fn finish(self) -> WickElement {
        let (dim, order) = (self.dim, self.order);
        let mut out = WickElement::zero(dim, order);
        for (key, terms) in self.buckets {
            out.accumulate(key, Jet::from_terms_truncating(dim, order, terms));
        }
        out
    }
}

/// Fibrewise product `a ∘ b = Σ_γ (iν/2)^{|γ|}/γ! ∂^γ_y a · L^γ b`, with
/// `L_j = P^{jk}∂_{y^k}` and form parts wedged.
pub fn multiply(
    a: &WickElement,
    b: &WickElement,
    pairing: &Pairing,
    policy: &TruncationPolicy,
) -> Result<WickElement> {
    if a.dim() != b.dim() || a.dim() != pairing.matrix.rows() {
        return Err(Error::Shape("wick product operands differ in dimension".into()));
    }
    let n = a.dim();
    let order = a.order().min(b.order()).min(pairing.matrix.order());
    if a.is_zero() || b.is_zero() {
        return Ok(WickElement::zero(n, order));
    }
    let mut out = ProductBuffer::new(n, order);
    let max_gamma = a.max_sym_degree().min(b.max_sym_degree());
    let family = lowered_family(b, pairing, max_gamma);
    let mut gammas: Vec<_> = family.keys().copied().collect();
    gammas.sort();
    for gamma in gammas {
        let lb = &family[&gamma];
        if lb.is_zero() {
            continue;
        }
        let m = gamma.degree();
        let factor = expansion_factor(gamma);
        for (ka, ca) in a.terms() {
            let Some(rest) = ka.y.checked_sub(gamma) else {
                continue;
            };
            let ca = ca.scale(&(&factor * gq(falling_factor(ka.y, gamma, n), 1)));
            for (kb, cb) in lb.terms() {
                let key = Key::new(ka.nu + kb.nu + m, rest.add(kb.y), ka.dx | kb.dx);
                let Some(negative) = wedge_sign(ka.dx, kb.dx) else {
                    continue;
                };
                if !policy.admits(key.total_degree()) {
                    continue;
                }
                out.push(key, &ca, cb, negative);
            }
        }
    }
    Ok(out.finish())
}

/// `σ(a ∘ b)` without forming the full product: only `y^α` terms of `a`
/// paired with `(L^α b)|_{y=0}` survive, with weight `(iν/2)^{|α|}`.
pub fn sigma_of_product(
    a: &WickElement,
    b: &WickElement,
    pairing: &Pairing,
    policy: &TruncationPolicy,
) -> Result<WickElement> {
    if a.dim() != b.dim() || a.dim() != pairing.matrix.rows() {
        return Err(Error::Shape("wick product operands differ in dimension".into()));
    }
    let n = a.dim();
    let a = a.filter(|k| k.dx == 0);
    let b = b.filter(|k| k.dx == 0);
    let order = a.order().min(b.order()).min(pairing.matrix.order());
    let mut out = WickElement::zero(n, order);
    let max_gamma = a.max_sym_degree().min(b.max_sym_degree());
    let b = b.filter(|k| k.sym_degree() <= max_gamma);
    let family = lowered_family(&b, pairing, max_gamma);
    let half_i = gi(1, 2);
    for (ka, ca) in a.terms() {
        let Some(lb) = family.get(&ka.y) else {
            continue;
        };
        let m = ka.y.degree();
        let mut factor = gq(1, 1);
        for _ in 0..m {
            factor *= &half_i;
        }
        let ca = ca.scale(&factor);
        for (kb, cb) in lb.terms() {
            if kb.y != MultiIndex::ZERO {
                continue;
            }
            let key = Key::new(ka.nu + kb.nu + m, MultiIndex::ZERO, 0);
            if !policy.admits(key.total_degree()) {
                continue;
            }
            out.accumulate(key, &ca * cb);
        }
    }
    Ok(out)
}

/// Graded commutator `[a, b] = a∘b - (-1)^{deg_a(a) deg_a(b)} b∘a`.
pub fn graded_commutator(
    a: &WickElement,
    b: &WickElement,
    pairing: &Pairing,
    policy: &TruncationPolicy,
) -> Result<WickElement> {
    let da = a.form_degree()?;
    let db = b.form_degree()?;
    let ab = multiply(a, b, pairing, policy)?;
    let ba = multiply(b, a, pairing, policy)?;
    Ok(if (da * db) % 2 == 1 { ab.add(&ba) } else { ab.sub(&ba) })
}

/// `(i/ν)[a, b]`.
pub fn ad_divided_by_nu(
    a: &WickElement,
    b: &WickElement,
    pairing: &Pairing,
    policy: &TruncationPolicy,
) -> Result<WickElement> {
    let c = graded_commutator(a, b, pairing, policy)?;
    Ok(c.divide_nu()?.scale(&imag_unit()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::scalar::gq;

    fn flat_lambda(order: u32) -> Pairing {
        // ω⁻¹ = [[0,-1],[1,0]], g⁻¹ = Id
        let c = |v: GaussianRational| Jet::constant(2, order, v);
        Pairing::from_matrix(
            JetMatrix::from_rows(vec![
                vec![c(gi(-1, 1)), c(gq(-1, 1))],
                vec![c(gq(1, 1)), c(gi(-1, 1))],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn unit_and_single_contraction() {
        let p = flat_lambda(2);
        let pol = TruncationPolicy::unbounded();
        let y1 = WickElement::y(2, 2, 0);
        let one = WickElement::one(2, 2);
        assert_eq!(multiply(&one, &y1, &p, &pol).unwrap(), y1);
        assert_eq!(multiply(&y1, &one, &p, &pol).unwrap(), y1);
        // y1∘y1 = y1² + (iν/2)Λ¹¹
        let sq = multiply(&y1, &y1, &p, &pol).unwrap();
        let expected = WickElement::monomial(
            Key::new(0, MultiIndex::new(&[2, 0]).unwrap(), 0),
            Jet::one(2, 2),
        )
        .add(&WickElement::nu(2, 2).mul_jet(&p.matrix().get(0, 0).scale(&gi(1, 2))));
        assert_eq!(sq, expected);
    }

    #[test]
    fn commutator_of_fibre_coordinates() {
        let p = flat_lambda(2);
        let pol = TruncationPolicy::unbounded();
        let y1 = WickElement::y(2, 2, 0);
        let y2 = WickElement::y(2, 2, 1);
        let c = graded_commutator(&y1, &y2, &p, &pol).unwrap();
        // (iν/2)(Λ¹² - Λ²¹) = iν ω¹²
        let diff = p.matrix().get(0, 1) - p.matrix().get(1, 0);
        assert_eq!(c, WickElement::nu(2, 2).mul_jet(&diff.scale(&gi(1, 2))));
        assert_eq!(c, WickElement::nu(2, 2).scale(&gi(-1, 1)));
        let ad = ad_divided_by_nu(&y1, &y2, &p, &pol).unwrap();
        assert_eq!(ad, WickElement::one(2, 2));
        let one = WickElement::one(2, 2);
        assert!(graded_commutator(&one, &y2, &p, &pol).unwrap().is_zero());
        assert!(ad_divided_by_nu(&y2, &one, &p, &pol).unwrap().is_zero());
    }

    #[test]
    fn divisibility_failure() {
        let p = flat_lambda(2);
        let pol = TruncationPolicy::unbounded();
        let dx1 = WickElement::dx(2, 2, 0);
        let dx2 = WickElement::dx(2, 2, 1);
        // graded commutators always lose their ν⁰ part; a bare product does not
        let f = WickElement::scalar(Jet::variable(2, 2, 0));
        assert!(ad_divided_by_nu(&f, &f.add(&WickElement::one(2, 2)), &p, &pol)
            .unwrap()
            .is_zero());
        let prod = multiply(&dx1, &dx2, &p, &pol).unwrap();
        assert!(matches!(prod.divide_nu(), Err(Error::Divisibility(_))));
        let mixed = dx1.add(&WickElement::one(2, 2));
        assert!(matches!(
            graded_commutator(&mixed, &dx2, &p, &pol),
            Err(Error::Grading(_))
        ));
    }

    #[test]
    fn odd_self_commutator_doubles() {
        let p = flat_lambda(2);
        let pol = TruncationPolicy::unbounded();
        let a = WickElement::y(2, 2, 0).add(&WickElement::y(2, 2, 1));
        let a = multiply(&a, &WickElement::dx(2, 2, 0), &p, &pol).unwrap();
        let c = graded_commutator(&a, &a, &p, &pol).unwrap();
        let sq = multiply(&a, &a, &p, &pol).unwrap();
        assert_eq!(c, sq.scale(&gq(2, 1)));
    }

    #[test]
    fn truncation_counts_discards() {
        let p = flat_lambda(2);
        let pol = TruncationPolicy::up_to(1);
        let y1 = WickElement::y(2, 2, 0);
        let out = multiply(&y1, &y1, &p, &pol).unwrap();
        assert!(out.is_zero());
        assert_eq!(pol.discarded(), 2);
    }

    #[test]
    fn sigma_shortcut_matches_full_product() {
        let p = flat_lambda(3);
        let pol = TruncationPolicy::unbounded();
        let x1 = Jet::variable(2, 3, 0);
        let a = WickElement::y(2, 3, 0)
            .add(&WickElement::y(2, 3, 1).mul_jet(&x1))
            .add(&WickElement::scalar(x1.clone()));
        let b = multiply(&a, &a, &p, &pol).unwrap().add(&WickElement::y(2, 3, 1));
        let full = multiply(&a, &b, &p, &pol).unwrap();
        let sigma_full = full.filter(|k| k.y == MultiIndex::ZERO && k.dx == 0);
        assert_eq!(sigma_of_product(&a, &b, &p, &pol).unwrap(), sigma_full);
    }
}
