use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::multi_index::{MultiIndex, MAX_DIM};
use super::scalar::{self, GaussianRational};
use crate::error::{Error, Result};

/// Truncated Taylor expansion at the base point.
///
/// A jet of order `K` stores the coefficients of all monomials of total
/// degree at most `K`; everything above is unknown, not zero. Binary
/// operations on jets of different order return a jet of the smaller order.
///
/// Coefficients are kept sorted by multi-index with zeros dropped.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Jet {
    dim: usize,
    order: u32,
    coeffs: Vec<(MultiIndex, GaussianRational)>,
}

/// Binary operation selector for [`Jet::arith`].
#[derive(Debug, Clone)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Scale(GaussianRational),
}

impl Jet {
    pub fn zero(dim: usize, order: u32) -> Self {
        debug_assert!(dim >= 1 && dim <= MAX_DIM);
        Jet {
            dim,
            order,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(dim: usize, order: u32, value: GaussianRational) -> Self {
        let mut jet = Jet::zero(dim, order);
        if !scalar::is_zero(&value) {
            jet.coeffs.push((MultiIndex::ZERO, value));
        }
        jet
    }

    pub fn one(dim: usize, order: u32) -> Self {
        Jet::constant(dim, order, scalar::one())
    }

    /// The coordinate function `x^i` (0-based `i`).
    pub fn variable(dim: usize, order: u32, i: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        let mut jet = Jet::zero(dim, order);
        if order >= 1 {
            jet.coeffs.push((MultiIndex::unit(i), scalar::one()));
        }
        jet
    }

    /// Build a jet from explicit coefficients, validating every key.
    pub fn from_coeffs(
        dim: usize,
        order: u32,
        coeffs: impl IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    ) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::MalformedInput(format!("unsupported dimension {dim}")));
        }
        let mut map = BTreeMap::new();
        for (exps, value) in coeffs {
            if exps.len() != dim {
                return Err(Error::MalformedInput(format!(
                    "multi-index of length {} in dimension {dim}",
                    exps.len()
                )));
            }
            let idx = MultiIndex::new(&exps)?;
            if idx.degree() > order {
                return Err(Error::MalformedInput(format!(
                    "monomial of degree {} exceeds jet order {order}",
                    idx.degree()
                )));
            }
            map.insert(idx, value);
        }
        Ok(Jet {
            dim,
            order,
            coeffs: map.into_iter().filter(|(_, c)| !scalar::is_zero(c)).collect(),
        })
    }

    /// Build from (possibly unsorted, duplicated, too-high) terms; high terms
    /// are truncated, duplicates summed.
    pub(crate) fn from_terms_truncating(
        dim: usize,
        order: u32,
        mut terms: Vec<(MultiIndex, GaussianRational)>,
    ) -> Self {
        terms.retain(|(m, _)| m.degree() <= order);
        terms.sort_unstable_by_key(|(m, _)| *m);
        let mut coeffs: Vec<(MultiIndex, GaussianRational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match coeffs.last_mut() {
                Some((last, acc)) if *last == m => *acc += c,
                _ => coeffs.push((m, c)),
            }
        }
        coeffs.retain(|(_, c)| !scalar::is_zero(c));
        Jet { dim, order, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reliable order `K`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.coeffs.iter().map(|(m, c)| (m, c))
    }

    pub fn coeff(&self, idx: MultiIndex) -> GaussianRational {
        match self.coeffs.binary_search_by_key(&idx, |(m, _)| *m) {
            Ok(pos) => self.coeffs[pos].1.clone(),
            Err(_) => scalar::zero(),
        }
    }

    /// Value at the base point.
    pub fn value(&self) -> GaussianRational {
        match self.coeffs.first() {
            Some((m, c)) if *m == MultiIndex::ZERO => c.clone(),
            _ => scalar::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|(m, _)| *m == MultiIndex::ZERO)
    }

    /// Drop information above `order` (no-op if already lower).
    pub fn truncate(&self, order: u32) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            dim: self.dim,
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .cloned()
                .collect(),
        }
    }

    pub fn with_order(mut self, order: u32) -> Jet {
        if order < self.order {
            self.coeffs.retain(|(m, _)| m.degree() <= order);
        }
        self.order = order;
        self
    }

    /// Checked arithmetic: operands must agree in dimension and order.
    pub fn arith(&self, op: JetOp, other: &Jet) -> Result<Jet> {
        if let JetOp::Scale(c) = op {
            return Ok(self.scale(&c));
        }
        if self.dim != other.dim || self.order != other.order {
            return Err(Error::Shape(format!(
                "jets of (dim {}, order {}) and (dim {}, order {})",
                self.dim, self.order, other.dim, other.order
            )));
        }
        Ok(match op {
            JetOp::Add => self + other,
            JetOp::Sub => self - other,
            JetOp::Mul => self * other,
            JetOp::Scale(_) => unreachable!(),
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Jet {
        if scalar::is_zero(c) {
            return Jet::zero(self.dim, self.order);
        }
        Jet {
            dim: self.dim,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(m, v)| (*m, scalar::mul(v, c))).collect(),
        }
    }

    /// `self += other * c`, at the smaller of the two orders.
    pub fn add_scaled(&mut self, other: &Jet, c: &GaussianRational) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        let order = self.order.min(other.order);
        if order < self.order {
            *self = std::mem::replace(self, Jet::zero(self.dim, 0)).with_order(order);
        }
        if other.coeffs.is_empty() || scalar::is_zero(c) {
            return;
        }
        let unit = *c == scalar::one();
        let times = |v: &GaussianRational| if unit { v.clone() } else { scalar::mul(v, c) };
        let lhs = std::mem::take(&mut self.coeffs);
        let mut out = Vec::with_capacity(lhs.len() + other.coeffs.len());
        let mut a = lhs.into_iter().peekable();
        let mut b = other
            .coeffs
            .iter()
            .filter(|(m, _)| m.degree() <= order)
            .peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ma, _)), Some((mb, _))) => {
                    if ma < mb {
                        out.push(a.next().unwrap());
                    } else if mb < ma {
                        let (m, v) = b.next().unwrap();
                        out.push((*m, times(v)));
                    } else {
                        let (m, mut sum) = a.next().unwrap();
                        let (_, vb) = b.next().unwrap();
                        sum += times(vb);
                        if !scalar::is_zero(&sum) {
                            out.push((m, sum));
                        }
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (m, v) = b.next().unwrap();
                    out.push((*m, times(v)));
                }
                (None, None) => break,
            }
        }
        self.coeffs = out;
    }

    pub fn add_assign_jet(&mut self, other: &Jet) {
        self.add_scaled(other, &scalar::one());
    }

    /// Formal partial derivative `∂/∂x^i` (0-based); the result has order `K - 1`.
    pub fn derivative(&self, i: usize) -> Result<Jet> {
        if i >= self.dim {
            return Err(Error::Shape(format!(
                "derivative direction {} out of range for dimension {}",
                i + 1,
                self.dim
            )));
        }
        if self.order == 0 {
            return Err(Error::order("differentiation of an order-0 jet", 0));
        }
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exponent(i);
                m.decrement(i)
                    .map(|lowered| (lowered, c * scalar::from_int(e as i64)))
            })
            .collect::<Vec<_>>();
        // decrementing one fixed variable preserves lexicographic order
        Ok(Jet {
            dim: self.dim,
            order: self.order - 1,
            coeffs,
        })
    }

    /// Exact equality after truncating both sides to the common order.
    pub fn agrees_with(&self, other: &Jet) -> bool {
        let order = self.order.min(other.order);
        self.truncate(order).coeffs == other.truncate(order).coeffs
    }

    /// Lowest-degree nonzero coefficient, for witnesses in failure reports.
    pub fn first_nonzero(&self) -> Option<(MultiIndex, GaussianRational)> {
        self.coeffs
            .iter()
            .min_by_key(|(m, _)| (m.degree(), *m))
            .cloned()
    }

    /// Polynomial text in `x1..xn` (exact coefficients, graded order),
    /// parseable by the expression grammar.
    pub fn to_poly_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by_key(|(m, _)| (m.degree(), std::cmp::Reverse(*m)));
        let mut out = String::new();
        for (k, (m, c)) in terms.iter().enumerate() {
            let negative = scalar::is_real(c) && c.real < 0u32;
            let magnitude = if negative { -(*c).clone() } else { (*c).clone() };
            let sep = match (k, negative) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            out.push_str(sep);
            let coeff = scalar::render(&magnitude);
            let coeff = if scalar::is_real(&magnitude) { coeff } else { format!("({coeff})") };
            if *m == MultiIndex::ZERO {
                out.push_str(&coeff);
            } else if magnitude == scalar::one() {
                out.push_str(&m.monomial_string("x"));
            } else {
                out.push_str(&format!("{coeff}*{}", m.monomial_string("x")));
            }
        }
        out
    }
}

fn merge(a: &Jet, b: &Jet, negate_b: bool) -> Jet {
    assert_eq!(a.dim, b.dim, "jet dimension mismatch");
    let order = a.order.min(b.order);
    let mut out = a.truncate(order);
    let sign = if negate_b {
        scalar::from_int(-1)
    } else {
        scalar::one()
    };
    out.add_scaled(b, &sign);
    out
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        merge(self, rhs, false)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        merge(self, rhs, true)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;

    /// Truncated Cauchy product.
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        let order = self.order.min(rhs.order);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Jet::zero(self.dim, order);
        }
        if rhs.is_constant() {
            return self.truncate(order).scale(&rhs.coeffs[0].1);
        }
        if self.is_constant() {
            return rhs.truncate(order).scale(&self.coeffs[0].1);
        }
        let mut terms = Vec::with_capacity(self.coeffs.len() * 2);
        for (ma, ca) in &self.coeffs {
            let da = ma.degree();
            if da > order {
                continue;
            }
            for (mb, cb) in &rhs.coeffs {
                if da + mb.degree() <= order {
                    terms.push((ma.add(*mb), scalar::mul(ca, cb)));
                }
            }
        }
        Jet::from_terms_truncating(self.dim, order, terms)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[d={}, K={}]({})", self.dim, self.order, self.to_poly_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::scalar::{gi, gq};

    fn x(dim: usize, order: u32, i: usize) -> Jet {
        Jet::variable(dim, order, i)
    }

    #[test]
    fn constant_jet() {
        let j = Jet::from_coeffs(2, 3, [(vec![0, 0], gq(1, 1))]).unwrap();
        assert_eq!(j, Jet::one(2, 3));
    }

    #[test]
    fn rejects_excess_degree() {
        let err = Jet::from_coeffs(2, 1, [(vec![1, 0], gq(1, 1)), (vec![2, 0], gq(1, 1))]);
        assert!(matches!(err, Err(Error::MalformedInput(_))));
    }

    #[test]
    fn rejects_wrong_length() {
        let err = Jet::from_coeffs(2, 3, [(vec![1, 0, 0], gq(1, 1))]);
        assert!(matches!(err, Err(Error::MalformedInput(_))));
    }

    #[test]
    fn zero_coefficients_dropped() {
        let j = Jet::from_coeffs(1, 2, [(vec![1], gq(0, 1))]).unwrap();
        assert!(j.is_zero());
        assert_eq!(j.len(), 0);
    }

    #[test]
    fn difference_of_squares() {
        let one = Jet::one(1, 2);
        let x1 = x(1, 2, 0);
        let prod = &(&one + &x1) * &(&one - &x1);
        let expected = Jet::from_coeffs(1, 2, [(vec![0], gq(1, 1)), (vec![2], gq(-1, 1))]).unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn product_truncates() {
        let one = Jet::one(1, 1);
        let a = &one + &x(1, 1, 0);
        let sq = &a * &a;
        let expected = Jet::from_coeffs(1, 1, [(vec![0], gq(1, 1)), (vec![1], gq(2, 1))]).unwrap();
        assert_eq!(sq, expected);
    }

    #[test]
    fn scalar_action() {
        let m = &x(2, 3, 0) * &x(2, 3, 1);
        let scaled = m.arith(JetOp::Scale(gi(1, 1)), &m).unwrap();
        assert_eq!(scaled.coeff(MultiIndex::new(&[1, 1]).unwrap()), gi(1, 1));
    }

    #[test]
    fn checked_arith_rejects_mismatch() {
        let a = Jet::one(2, 3);
        let b = Jet::one(2, 2);
        assert!(matches!(a.arith(JetOp::Add, &b), Err(Error::Shape(_))));
        let c = Jet::one(3, 3);
        assert!(matches!(a.arith(JetOp::Mul, &c), Err(Error::Shape(_))));
    }

    #[test]
    fn monomial_derivative() {
        let f = &(&x(2, 4, 0) * &x(2, 4, 0)) * &x(2, 4, 1);
        let df = f.derivative(0).unwrap();
        let expected = (&x(2, 3, 0) * &x(2, 3, 1)).scale(&gq(2, 1));
        assert_eq!(df, expected);
        assert_eq!(df.order(), 3);
    }

    #[test]
    fn constant_derivative_vanishes() {
        let c = Jet::constant(2, 3, gq(7, 2));
        assert!(c.derivative(1).unwrap().is_zero());
    }

    #[test]
    fn derivative_of_order_zero_is_order_error() {
        let c = Jet::constant(2, 0, gq(1, 1));
        assert!(matches!(c.derivative(0), Err(Error::Order { .. })));
        assert!(matches!(c.derivative(5), Err(Error::Shape(_))));
    }

    #[test]
    fn mixed_order_takes_minimum() {
        let a = &Jet::one(2, 5) + &x(2, 5, 0);
        let b = &Jet::one(2, 2) + &x(2, 2, 1);
        assert_eq!((&a * &b).order(), 2);
        assert_eq!((&a + &b).order(), 2);
    }
}
