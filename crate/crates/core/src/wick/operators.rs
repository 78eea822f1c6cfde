use super::element::{interior, wedge_sign, Key, WickElement};
use crate::error::{Error, Result};
use crate::geometry::{DerivedGeometry, Tensor};
use crate::jets::scalar::gq;
use crate::jets::{Jet, JetMatrix, MultiIndex};

/// `δa = dx^j ∧ ∂a/∂y^j`.
pub fn delta(a: &WickElement) -> WickElement {
    let n = a.dim();
    let mut out = WickElement::zero(n, a.order());
    for (k, c) in a.terms() {
        for j in 0..n {
            let e = k.y.exponent(j);
            if e == 0 {
                continue;
            }
            let Some(negative) = wedge_sign(1 << j, k.dx) else {
                continue;
            };
            let y = k.y.decrement(j).expect("positive exponent");
            let sign = if negative { -(e as i64) } else { e as i64 };
            out.accumulate(Key::new(k.nu, y, k.dx | (1 << j)), c.scale(&gq(sign, 1)));
        }
    }
    out
}

/// `δ⁻¹a = (1/(p+q)) y^j i(∂_{x^j}) a` on the part of symmetric degree `p`
/// and form degree `q`, zero where `p = q = 0`.
pub fn delta_inverse(a: &WickElement) -> WickElement {
    let n = a.dim();
    let mut out = WickElement::zero(n, a.order());
    for (k, c) in a.terms() {
        let weight = k.sym_degree() + k.form_degree();
        if weight == 0 {
            continue;
        }
        for j in 0..n {
            let Some((negative, rest)) = interior(j, k.dx) else {
                continue;
            };
            let sign = if negative { -1 } else { 1 };
            out.accumulate(
                Key::new(k.nu, k.y.increment(j), rest),
                c.scale(&gq(sign, weight as i64)),
            );
        }
    }
    out
}

/// `σ(a)`: the part free of `y` and `dx`.
pub fn sigma(a: &WickElement) -> WickElement {
    a.filter(|k| k.y == MultiIndex::ZERO && k.dx == 0)
}

/// `(δδ⁻¹a, δ⁻¹δa, σ(a))`, which sum to `a`.
pub fn hodge_decompose(a: &WickElement) -> (WickElement, WickElement, WickElement) {
    (delta(&delta_inverse(a)), delta_inverse(&delta(a)), sigma(a))
}

/// `∇a = dx^j ∧ (∂a/∂x^j - Γ^l_{jk} y^k ∂a/∂y^l)`.
pub fn nabla(a: &WickElement, gamma: &Tensor) -> Result<WickElement> {
    let n = a.dim();
    if a.order() == 0 {
        return Err(Error::order("connection applied to a jet of order 0", 0));
    }
    let order = (a.order() - 1).min(gamma.order());
    let mut out = WickElement::zero(n, order);
    for (k, c) in a.terms() {
        for j in 0..n {
            let Some(negative) = wedge_sign(1 << j, k.dx) else {
                continue;
            };
            let dx = k.dx | (1 << j);
            let sign = |v: Jet| if negative { -v } else { v };
            out.accumulate(Key::new(k.nu, k.y, dx), sign(c.derivative(j)?));
            for l in 0..n {
                let e = k.y.exponent(l);
                if e == 0 {
                    continue;
                }
                let lowered = k.y.decrement(l).expect("positive exponent");
                for m in 0..n {
                    let g = gamma.get(&[l, j, m]);
                    if g.is_zero() {
                        continue;
                    }
                    let term = (g * c).scale(&gq(-(e as i64), 1));
                    out.accumulate(Key::new(k.nu, lowered.increment(m), dx), sign(term));
                }
            }
        }
    }
    Ok(out)
}

/// `T = Σ_{k<l} ω_{sα}T^α_{kl} y^s dx^k∧dx^l` and
/// `R = Σ_{k<l} ½ ω_{sα}R^α_{tkl} y^s y^t dx^k∧dx^l`.
pub fn torsion_and_curvature_elements(d: &DerivedGeometry) -> (WickElement, WickElement) {
    let n = d.dim();
    let omega = d.omega();
    let t_order = d.torsion.order().min(omega.order());
    let r_order = d.curvature.order().min(omega.order());
    let mut t_elt = WickElement::zero(n, t_order);
    let mut r_elt = WickElement::zero(n, r_order);
    for k in 0..n {
        for l in (k + 1)..n {
            let dx = (1u8 << k) | (1u8 << l);
            for s in 0..n {
                let mut c = Jet::zero(n, t_order);
                for al in 0..n {
                    c.add_assign_jet(&(omega.get(s, al) * d.torsion.get(&[al, k, l])));
                }
                t_elt.accumulate(Key::new(0, MultiIndex::unit(s), dx), c);
                for t in 0..n {
                    let mut c = Jet::zero(n, r_order);
                    for al in 0..n {
                        c.add_assign_jet(&(omega.get(s, al) * d.curvature.get(&[al, t, k, l])));
                    }
                    let y = MultiIndex::unit(s).increment(t);
                    r_elt.accumulate(Key::new(0, y, dx), c.scale(&gq(1, 2)));
                }
            }
        }
    }
    (t_elt, r_elt)
}

/// `Δa = ¼ g^{jk} ∂²a/∂y^j∂y^k`.
pub fn laplacian(a: &WickElement, g_inv: &JetMatrix) -> WickElement {
    let n = a.dim();
    let order = a.order().min(g_inv.order());
    let mut out = WickElement::zero(n, order);
    for j in 0..n {
        let dj = a.y_derivative(j);
        if dj.is_zero() {
            continue;
        }
        for k in 0..n {
            let g = g_inv.get(j, k);
            if g.is_zero() {
                continue;
            }
            let djk = dj.y_derivative(k);
            for (key, c) in djk.terms() {
                out.accumulate(*key, (c * g).scale(&gq(1, 4)));
            }
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    /// `G = exp(-νΔ)`
    Forward,
    /// `G⁻¹ = exp(νΔ)`
    Inverse,
}

/// Fibrewise equivalence operator `G = exp(-νΔ)` or its inverse; the series
/// stops once `Δ` has consumed all fibre degree.
pub fn fibre_equivalence(a: &WickElement, g_inv: &JetMatrix, direction: Direction) -> WickElement {
    let sign = match direction {
        Direction::Forward => -1,
        Direction::Inverse => 1,
    };
    let mut out = a.truncate_order(g_inv.order());
    let mut power = a.clone();
    let mut n = 1i64;
    loop {
        power = laplacian(&power, g_inv).shift_nu(1);
        if power.is_zero() {
            break;
        }
        let mut factorial = 1i64;
        for t in 2..=n {
            factorial *= t;
        }
        let s = if n % 2 == 1 { sign } else { 1 };
        out.add_assign(&power.scale(&gq(s, factorial)));
        n += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::scalar::gq;

    fn mono(exps: &[u32], dx: u8, order: u32) -> WickElement {
        WickElement::monomial(
            Key::new(0, MultiIndex::new(exps).unwrap(), dx),
            Jet::one(exps.len(), order),
        )
    }

    #[test]
    fn delta_examples() {
        // δ(y1 y2) = dx1 y2 + dx2 y1
        let a = mono(&[1, 1], 0, 2);
        let expected = mono(&[0, 1], 0b01, 2).add(&mono(&[1, 0], 0b10, 2));
        assert_eq!(delta(&a), expected);
        let f = WickElement::scalar(Jet::variable(2, 2, 0));
        assert!(delta(&f).is_zero());
    }

    #[test]
    fn delta_inverse_examples() {
        // δ⁻¹(y1 dx2) = ½ y1 y2
        let a = mono(&[1, 0], 0b10, 2);
        assert_eq!(delta_inverse(&a), mono(&[1, 1], 0, 2).scale(&gq(1, 2)));
        let f = WickElement::scalar(Jet::variable(2, 2, 0));
        assert!(delta_inverse(&f).is_zero());
    }

    #[test]
    fn hodge_on_fibre_coordinate() {
        let y1 = mono(&[1, 0], 0, 2);
        // δ⁻¹y1 = 0 while δ⁻¹δy1 = δ⁻¹dx1 = y1
        let (a, b, c) = hodge_decompose(&y1);
        assert_eq!(b, y1);
        assert!(a.is_zero() && c.is_zero());
        let form = mono(&[0, 1], 0b01, 2);
        let (a, b, c) = hodge_decompose(&form);
        assert_eq!(a.add(&b).add(&c), form);
        let f = WickElement::scalar(Jet::variable(2, 2, 1));
        let (a, b, c) = hodge_decompose(&f);
        assert!(a.is_zero() && b.is_zero());
        assert_eq!(c, f);
    }

    #[test]
    fn laplacian_and_equivalence() {
        let g_inv = JetMatrix::identity(2, 2, 2);
        let y1 = mono(&[1, 0], 0, 2);
        assert_eq!(fibre_equivalence(&y1, &g_inv, Direction::Forward), y1);
        // G(y1²) = y1² - ν/2
        let sq = mono(&[2, 0], 0, 2);
        let expected = sq.sub(&WickElement::nu(2, 2).scale(&gq(1, 2)));
        assert_eq!(fibre_equivalence(&sq, &g_inv, Direction::Forward), expected);
        let quartic = mono(&[2, 2], 0b01, 2).add(&mono(&[4, 0], 0, 2));
        let there = fibre_equivalence(&quartic, &g_inv, Direction::Forward);
        assert_eq!(fibre_equivalence(&there, &g_inv, Direction::Inverse), quartic);
    }

    #[test]
    fn nabla_of_coordinate_function() {
        let gamma = Tensor::from_fn(2, 3, |_| Jet::zero(2, 3));
        let x1 = WickElement::scalar(Jet::variable(2, 3, 0));
        assert_eq!(nabla(&x1, &gamma).unwrap(), WickElement::dx(2, 2, 0));
        let y1 = mono(&[1, 0], 0, 3);
        assert!(nabla(&y1, &gamma).unwrap().is_zero());
    }
}
