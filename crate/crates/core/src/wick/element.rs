use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jets::scalar::{self, gq};
use crate::jets::{GaussianRational, Jet, MultiIndex};

/// Basis label `ν^nu · y^y · dx^I` with `I` a bit set (bit `i` is `dx^{i+1}`,
/// wedge factors in increasing index order).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Key {
    pub nu: u32,
    pub y: MultiIndex,
    pub dx: u8,
}

impl Key {
    pub fn new(nu: u32, y: MultiIndex, dx: u8) -> Self {
        Key { nu, y, dx }
    }

    /// `Deg = 2 deg_ν + deg_s`.
    pub fn total_degree(self) -> u32 {
        2 * self.nu + self.y.degree()
    }

    pub fn sym_degree(self) -> u32 {
        self.y.degree()
    }

    pub fn form_degree(self) -> u32 {
        self.dx.count_ones()
    }
}

/// Sign of `dx^I ∧ dx^J` relative to the sorted wedge of `I ∪ J`, or `None`
/// when the sets overlap.
pub fn wedge_sign(left: u8, right: u8) -> Option<bool> {
    if left & right != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = left;
    while rest != 0 {
        let i = rest.trailing_zeros();
        swaps += (right & ((1u8 << i) - 1)).count_ones();
        rest &= rest - 1;
    }
    Some(swaps % 2 == 1)
}

/// Interior product with `∂_{x^j}`: sign and remaining set, `None` if `dx^j`
/// does not occur.
pub fn interior(j: usize, mask: u8) -> Option<(bool, u8)> {
    let bit = 1u8 << j;
    if mask & bit == 0 {
        return None;
    }
    let before = (mask & (bit - 1)).count_ones();
    Some((before % 2 == 1, mask & !bit))
}

/// Element of `W ⊗ Λ`: a finite sum of `ν^r y^α dx^I` with jet coefficients,
/// all kept at one reliable jet order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WickElement {
    dim: usize,
    order: u32,
    terms: BTreeMap<Key, Jet>,
}

impl WickElement {
    pub fn zero(dim: usize, order: u32) -> Self {
        WickElement {
            dim,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize, order: u32) -> Self {
        WickElement::scalar(Jet::one(dim, order))
    }

    /// A function of `x` only.
    pub fn scalar(f: Jet) -> Self {
        WickElement::monomial(Key::new(0, MultiIndex::ZERO, 0), f)
    }

    pub fn monomial(key: Key, coeff: Jet) -> Self {
        let mut e = WickElement::zero(coeff.dim(), coeff.order());
        e.add_term(key, &coeff);
        e
    }

    /// Fibre coordinate `y^{i+1}`.
    pub fn y(dim: usize, order: u32, i: usize) -> Self {
        WickElement::monomial(Key::new(0, MultiIndex::unit(i), 0), Jet::one(dim, order))
    }

    /// `dx^{i+1}`.
    pub fn dx(dim: usize, order: u32, i: usize) -> Self {
        WickElement::monomial(Key::new(0, MultiIndex::ZERO, 1 << i), Jet::one(dim, order))
    }

    pub fn nu(dim: usize, order: u32) -> Self {
        WickElement::monomial(Key::new(1, MultiIndex::ZERO, 0), Jet::one(dim, order))
    }

    pub fn from_terms(dim: usize, order: u32, terms: impl IntoIterator<Item = (Key, Jet)>) -> Self {
        let mut e = WickElement::zero(dim, order);
        for (k, c) in terms {
            e.add_term(k, &c);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Jet)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &Key) -> Option<&Jet> {
        self.terms.get(key)
    }

    /// Add `coeff` to the coefficient of `key`; the element's order drops to
    /// the coefficient's if that is lower.
    pub fn add_term(&mut self, key: Key, coeff: &Jet) {
        assert_eq!(coeff.dim(), self.dim, "jet dimension mismatch");
        if coeff.order() < self.order {
            self.truncate_in_place(coeff.order());
        }
        self.add_scaled_term(key, coeff, &scalar::one());
    }

    fn add_scaled_term(&mut self, key: Key, coeff: &Jet, c: &GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        let order = self.order;
        debug_assert!(coeff.order() >= order);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                existing.add_scaled(coeff, c);
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                let v = coeff.truncate(order).scale(c).with_order(order);
                if !v.is_zero() {
                    self.terms.insert(key, v);
                }
            }
        }
    }

    /// Move a term into place without reconciling orders; callers guarantee
    /// `coeff.order() >= self.order`.
    pub(crate) fn accumulate(&mut self, key: Key, coeff: Jet) {
        let coeff = if coeff.order() == self.order {
            coeff
        } else {
            coeff.with_order(self.order)
        };
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_jet(&coeff);
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    fn truncate_in_place(&mut self, order: u32) {
        if order >= self.order {
            return;
        }
        self.order = order;
        let old = std::mem::take(&mut self.terms);
        for (k, c) in old {
            let c = c.with_order(order);
            if !c.is_zero() {
                self.terms.insert(k, c);
            }
        }
    }

    /// Lower the reliable jet order.
    pub fn truncate_order(&self, order: u32) -> Self {
        let mut e = self.clone();
        e.truncate_in_place(order);
        e
    }

    fn check_compatible(&self, other: &WickElement) {
        assert_eq!(self.dim, other.dim, "wick element dimension mismatch");
    }

    pub fn add(&self, other: &WickElement) -> WickElement {
        self.combine(other, &scalar::one())
    }

    pub fn sub(&self, other: &WickElement) -> WickElement {
        self.combine(other, &gq(-1, 1))
    }

    fn combine(&self, other: &WickElement, c: &GaussianRational) -> WickElement {
        self.check_compatible(other);
        let mut out = self.truncate_order(other.order);
        for (k, v) in &other.terms {
            out.add_scaled_term(*k, v, c);
        }
        out
    }

    pub fn add_assign(&mut self, other: &WickElement) {
        self.check_compatible(other);
        self.truncate_in_place(other.order);
        for (k, v) in &other.terms {
            self.add_scaled_term(*k, v, &scalar::one());
        }
    }

    pub fn neg(&self) -> WickElement {
        self.scale(&gq(-1, 1))
    }

    pub fn scale(&self, c: &GaussianRational) -> WickElement {
        if scalar::is_zero(c) {
            return WickElement::zero(self.dim, self.order);
        }
        WickElement {
            dim: self.dim,
            order: self.order,
            terms: self.terms.iter().map(|(k, v)| (*k, v.scale(c))).collect(),
        }
    }

    /// Multiply every coefficient by a function of `x`.
    pub fn mul_jet(&self, f: &Jet) -> WickElement {
        let order = self.order.min(f.order());
        WickElement::from_terms(
            self.dim,
            order,
            self.terms.iter().map(|(k, v)| (*k, v * f)),
        )
    }

    /// Multiply by `ν^shift`.
    pub fn shift_nu(&self, shift: u32) -> WickElement {
        WickElement {
            dim: self.dim,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (Key::new(k.nu + shift, k.y, k.dx), v.clone()))
                .collect(),
        }
    }

    /// Divide by `ν`, failing if some term has no `ν` factor.
    pub fn divide_nu(&self) -> Result<WickElement> {
        if let Some((k, _)) = self.terms.iter().find(|(k, _)| k.nu == 0) {
            return Err(Error::Divisibility(format!(
                "term {} carries no factor of nu",
                describe_key(k, self.dim)
            )));
        }
        Ok(WickElement {
            dim: self.dim,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (Key::new(k.nu - 1, k.y, k.dx), v.clone()))
                .collect(),
        })
    }

    /// Coefficient of `ν^r`, as an element without `ν`.
    pub fn nu_part(&self, r: u32) -> WickElement {
        WickElement {
            dim: self.dim,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.nu == r)
                .map(|(k, v)| (Key::new(0, k.y, k.dx), v.clone()))
                .collect(),
        }
    }

    pub fn filter(&self, mut keep: impl FnMut(&Key) -> bool) -> WickElement {
        WickElement {
            dim: self.dim,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Component of total degree `Deg = deg`.
    pub fn degree_component(&self, deg: u32) -> WickElement {
        self.filter(|k| k.total_degree() == deg)
    }

    pub fn max_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.total_degree()).max()
    }

    pub fn max_sym_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.sym_degree()).max().unwrap_or(0)
    }

    /// The common `deg_a` of all terms (0 for the zero element).
    pub fn form_degree(&self) -> Result<u32> {
        let mut degrees = self.terms.keys().map(|k| k.form_degree());
        let first = degrees.next().unwrap_or(0);
        if degrees.any(|d| d != first) {
            return Err(Error::Grading("element is not homogeneous in form degree".into()));
        }
        Ok(first)
    }

    /// `∂/∂y^{j+1}`.
    pub fn y_derivative(&self, j: usize) -> WickElement {
        let mut out = WickElement::zero(self.dim, self.order);
        for (k, v) in &self.terms {
            let e = k.y.exponent(j);
            if e > 0 {
                let y = k.y.decrement(j).expect("positive exponent");
                out.accumulate(Key::new(k.nu, y, k.dx), v.scale(&gq(e as i64, 1)));
            }
        }
        out
    }

    /// Coefficients of `ν^0, ν^1, …` of the `y = 0`, form-free part,
    /// evaluated at the base point.
    pub fn base_values(&self) -> Vec<GaussianRational> {
        let max = self.terms.keys().map(|k| k.nu).max().unwrap_or(0);
        let mut out = vec![scalar::zero(); max as usize + 1];
        for (k, v) in &self.terms {
            if k.y == MultiIndex::ZERO && k.dx == 0 {
                out[k.nu as usize] = v.value();
            }
        }
        while out.len() > 1 && scalar::is_zero(out.last().unwrap()) {
            out.pop();
        }
        out
    }

    /// First nonzero term, described for failure reports.
    pub fn witness(&self) -> Option<String> {
        self.terms.iter().next().map(|(k, v)| {
            let (m, c) = v.first_nonzero().expect("stored coefficients are nonzero");
            format!(
                "term {}, coefficient of {}: {}",
                describe_key(k, self.dim),
                m.monomial_string("x"),
                scalar::render(&c)
            )
        })
    }
}

pub fn describe_key(k: &Key, dim: usize) -> String {
    let mut parts = Vec::new();
    if k.nu > 0 {
        parts.push(if k.nu == 1 {
            "nu".to_string()
        } else {
            format!("nu^{}", k.nu)
        });
    }
    if k.y != MultiIndex::ZERO {
        parts.push(k.y.monomial_string("y"));
    }
    if k.dx != 0 {
        let forms: Vec<String> = (0..dim)
            .filter(|i| k.dx & (1 << i) != 0)
            .map(|i| format!("dx{}", i + 1))
            .collect();
        parts.push(forms.join("^"));
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for WickElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, v)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{}]*{}", v.to_poly_string(), describe_key(k, self.dim))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        // dx2 ∧ dx1 = -dx1 ∧ dx2
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b01, 0b01), None);
        // dx3 ∧ (dx1 ∧ dx2) is an even permutation
        assert_eq!(wedge_sign(0b100, 0b011), Some(false));
        // (dx2) ∧ (dx1 ∧ dx3): one transposition
        assert_eq!(wedge_sign(0b010, 0b101), Some(true));
    }

    #[test]
    fn interior_signs() {
        assert_eq!(interior(0, 0b011), Some((false, 0b010)));
        assert_eq!(interior(1, 0b011), Some((true, 0b001)));
        assert_eq!(interior(2, 0b011), None);
    }

    #[test]
    fn gradings_and_division() {
        let e = WickElement::y(2, 2, 0).shift_nu(1).add(&WickElement::dx(2, 2, 1));
        assert!(e.form_degree().is_err());
        assert!(e.divide_nu().is_err());
        let k = *e.terms().next().unwrap().0;
        assert_eq!(k.total_degree(), 0);
        assert_eq!(e.max_total_degree(), Some(3));
        let d = WickElement::y(2, 2, 0).shift_nu(2).divide_nu().unwrap();
        assert_eq!(d, WickElement::y(2, 2, 0).shift_nu(1));
    }

    #[test]
    fn cancellation_drops_terms() {
        let y = WickElement::y(2, 3, 1);
        assert!(y.sub(&y).is_zero());
        assert_eq!(y.to_string(), "[1]*y2");
    }
}
