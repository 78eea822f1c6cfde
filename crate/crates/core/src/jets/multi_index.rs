use std::fmt;

use crate::error::{Error, Result};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 8;

const BYTE_SUM: u64 = 0x0101_0101_0101_0101;

/// Exponent vector `α` packed one byte per variable, variable 0 in the most
/// significant byte.
///
/// Packing keeps `Ord` equal to lexicographic order on the exponents, and
/// monomial multiplication is plain integer addition as long as every
/// exponent stays below 256 (total degrees here are far smaller).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(u64);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex(0);

    pub fn new(exponents: &[u32]) -> Result<Self> {
        if exponents.len() > MAX_DIM {
            return Err(Error::MalformedInput(format!(
                "multi-index of length {} exceeds the supported dimension {MAX_DIM}",
                exponents.len()
            )));
        }
        let mut packed = 0u64;
        for (i, &e) in exponents.iter().enumerate() {
            if e > 255 {
                return Err(Error::MalformedInput(format!("exponent {e} too large")));
            }
            packed |= (e as u64) << shift(i);
        }
        let idx = MultiIndex(packed);
        if idx.degree() as u64 != exponents.iter().map(|&e| e as u64).sum::<u64>() {
            return Err(Error::MalformedInput("total degree exceeds 255".into()));
        }
        Ok(idx)
    }

    /// `e_i`, the exponent vector of the single variable `i`.
    pub fn unit(i: usize) -> Self {
        debug_assert!(i < MAX_DIM);
        MultiIndex(1u64 << shift(i))
    }

    #[inline]
    pub fn exponent(self, i: usize) -> u32 {
        ((self.0 >> shift(i)) & 0xff) as u32
    }

    /// `|α|`.
    #[inline]
    pub fn degree(self) -> u32 {
        (self.0.wrapping_mul(BYTE_SUM) >> 56) as u32
    }

    pub fn exponents(self, dim: usize) -> Vec<u32> {
        (0..dim).map(|i| self.exponent(i)).collect()
    }

    /// Highest variable index carrying a nonzero exponent plus one.
    pub fn support_len(self) -> usize {
        (0..MAX_DIM).rev().find(|&i| self.exponent(i) > 0).map_or(0, |i| i + 1)
    }

    #[inline]
    pub fn add(self, other: Self) -> Self {
        MultiIndex(self.0 + other.0)
    }

    /// `α - β` when `β ≤ α` componentwise.
    pub fn checked_sub(self, other: Self) -> Option<Self> {
        for i in 0..MAX_DIM {
            if self.exponent(i) < other.exponent(i) {
                return None;
            }
        }
        Some(MultiIndex(self.0 - other.0))
    }

    pub fn increment(self, i: usize) -> Self {
        MultiIndex(self.0 + (1u64 << shift(i)))
    }

    pub fn decrement(self, i: usize) -> Option<Self> {
        (self.exponent(i) > 0).then(|| MultiIndex(self.0 - (1u64 << shift(i))))
    }

    /// `α!`
    pub fn factorial(self) -> u64 {
        (0..MAX_DIM)
            .map(|i| (1..=self.exponent(i) as u64).product::<u64>())
            .product()
    }

    /// All multi-indices of length `dim` with `|α| = degree`, in lexicographic order.
    pub fn of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; dim];
        fill(&mut current, 0, degree, &mut out);
        out.sort();
        out
    }

    /// All multi-indices of length `dim` with `|α| ≤ degree`, in lexicographic order.
    pub fn up_to_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out: Vec<_> = (0..=degree).flat_map(|d| Self::of_degree(dim, d)).collect();
        out.sort();
        out
    }

    pub fn fmt_with_dim(self, dim: usize) -> String {
        let parts: Vec<String> = self.exponents(dim).iter().map(u32::to_string).collect();
        format!("({})", parts.join(","))
    }

    /// Human-readable monomial in the given variable name, e.g. `x1^2*x3`.
    pub fn monomial_string(self, var: &str) -> String {
        let mut parts = Vec::new();
        for i in 0..MAX_DIM {
            match self.exponent(i) {
                0 => {}
                1 => parts.push(format!("{var}{}", i + 1)),
                e => parts.push(format!("{var}{}^{e}", i + 1)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

#[inline]
fn shift(i: usize) -> u32 {
    (56 - 8 * i) as u32
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current).expect("bounded exponents"));
        current[pos] = 0;
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex::ZERO);
        }
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        fill(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with_dim(self.support_len().max(1)))
    }
}
