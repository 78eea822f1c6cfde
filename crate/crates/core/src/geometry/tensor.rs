use std::fmt::Write as _;

use crate::jets::{Jet, JetMatrix};

/// Component tensor of jets with every index ranging over `0..n`.
///
/// Indices are stored in the order they are written, upper ones first
/// (`Γ^l_{jk}` is `[l, j, k]`, `R^s_{tkl}` is `[s, t, k, l]`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tensor {
    n: usize,
    rank: usize,
    order: u32,
    data: Vec<Jet>,
}

impl Tensor {
    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Self {
        let len = n.pow(rank as u32);
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; rank];
        for flat in 0..len {
            let mut rem = flat;
            for slot in (0..rank).rev() {
                idx[slot] = rem % n;
                rem /= n;
            }
            data.push(f(&idx));
        }
        let order = data.iter().map(Jet::order).min().unwrap_or(0);
        let data = data.into_iter().map(|j| j.with_order(order)).collect();
        Tensor { n, rank, order, data }
    }

    pub fn try_from_fn<E>(
        n: usize,
        rank: usize,
        mut f: impl FnMut(&[usize]) -> Result<Jet, E>,
    ) -> Result<Self, E> {
        let mut err = None;
        let t = Tensor::from_fn(n, rank, |idx| match f(idx) {
            Ok(j) => j,
            Err(e) => {
                err.get_or_insert(e);
                Jet::zero(n, 0)
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(t),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.data[self.offset(idx)]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Jet::is_zero)
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert_eq!((self.n, self.rank), (other.n, other.rank));
        Tensor::from_fn(self.n, self.rank, |idx| self.get(idx) - other.get(idx))
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!((self.n, self.rank), (other.n, other.rank));
        Tensor::from_fn(self.n, self.rank, |idx| self.get(idx) + other.get(idx))
    }

    pub fn scale(&self, c: &crate::jets::GaussianRational) -> Tensor {
        Tensor::from_fn(self.n, self.rank, |idx| self.get(idx).scale(c))
    }

    pub fn values(&self) -> impl Iterator<Item = (Vec<usize>, &Jet)> {
        let (n, rank) = (self.n, self.rank);
        self.data.iter().enumerate().map(move |(flat, j)| {
            let mut idx = vec![0usize; rank];
            let mut rem = flat;
            for slot in (0..rank).rev() {
                idx[slot] = rem % n;
                rem /= n;
            }
            (idx, j)
        })
    }

    /// First nonzero component, described for a failure report.
    pub fn witness(&self) -> Option<String> {
        self.values()
            .find(|(_, j)| !j.is_zero())
            .map(|(idx, j)| describe_component(&idx, j))
    }
}

/// `component [1,2,3], x2: -1/4` (1-based indices).
pub fn describe_component(idx: &[usize], jet: &Jet) -> String {
    let mut s = String::from("component [");
    for (p, i) in idx.iter().enumerate() {
        if p > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", i + 1);
    }
    s.push(']');
    if let Some((m, c)) = jet.first_nonzero() {
        let _ = write!(
            s,
            ", coefficient of {}: {}",
            m.monomial_string("x"),
            crate::jets::scalar::render(&c)
        );
    }
    s
}

pub fn matrix_witness(m: &JetMatrix) -> Option<String> {
    m.first_nonzero()
        .map(|(i, j)| describe_component(&[i, j], m.get(i, j)))
}

/// Sum of jet products, accumulated at the smallest order involved.
pub(crate) fn sum_products<'a>(
    dim: usize,
    order: u32,
    pairs: impl IntoIterator<Item = (&'a Jet, &'a Jet)>,
) -> Jet {
    let mut acc = Jet::zero(dim, order);
    for (a, b) in pairs {
        if a.is_zero() || b.is_zero() {
            let o = acc.order().min(a.order()).min(b.order());
            acc = acc.with_order(o);
            continue;
        }
        acc.add_assign_jet(&(a * b));
    }
    acc
}
