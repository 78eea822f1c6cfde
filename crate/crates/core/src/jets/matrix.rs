use std::fmt;

use super::jet::Jet;
use super::scalar::{self, GaussianRational};
use crate::error::{Error, Result};

/// Dense matrix of jets sharing one dimension and order.
#[derive(Clone, PartialEq, Eq)]
pub struct JetMatrix {
    rows: usize,
    cols: usize,
    dim: usize,
    order: u32,
    entries: Vec<Jet>,
}

impl JetMatrix {
    pub fn zeros(rows: usize, cols: usize, dim: usize, order: u32) -> Self {
        JetMatrix {
            rows,
            cols,
            dim,
            order,
            entries: vec![Jet::zero(dim, order); rows * cols],
        }
    }

    pub fn identity(n: usize, dim: usize, order: u32) -> Self {
        let mut m = JetMatrix::zeros(n, n, dim, order);
        for i in 0..n {
            m.entries[i * n + i] = Jet::one(dim, order);
        }
        m
    }

    /// Entries in row-major order; every entry is truncated to the smallest
    /// order present.
    pub fn from_rows(rows: Vec<Vec<Jet>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(Error::Shape("empty matrix".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        let dim = rows[0][0].dim();
        if rows.iter().flatten().any(|j| j.dim() != dim) {
            return Err(Error::Shape("matrix entries of different dimension".into()));
        }
        let order = rows.iter().flatten().map(Jet::order).min().unwrap();
        let entries = rows.into_iter().flatten().map(|j| j.with_order(order)).collect();
        Ok(JetMatrix {
            rows: r,
            cols: c,
            dim,
            order,
            entries,
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        dim: usize,
        order: u32,
        mut f: impl FnMut(usize, usize) -> Jet,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        let order = entries.iter().map(Jet::order).min().unwrap_or(order).min(order);
        let entries = entries.into_iter().map(|j| j.with_order(order)).collect();
        JetMatrix {
            rows,
            cols,
            dim,
            order,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn truncate(&self, order: u32) -> JetMatrix {
        if order >= self.order {
            return self.clone();
        }
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            dim: self.dim,
            order,
            entries: self.entries.iter().map(|j| j.truncate(order)).collect(),
        }
    }

    pub fn transpose(&self) -> JetMatrix {
        JetMatrix::from_fn(self.cols, self.rows, self.dim, self.order, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn mul(&self, other: &JetMatrix) -> Result<JetMatrix> {
        if self.cols != other.rows || self.dim != other.dim {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let order = self.order.min(other.order);
        Ok(JetMatrix::from_fn(self.rows, other.cols, self.dim, order, |i, j| {
            let mut acc = Jet::zero(self.dim, order);
            for k in 0..self.cols {
                acc.add_assign_jet(&(self.get(i, k) * other.get(k, j)));
            }
            acc
        }))
    }

    pub fn add(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &JetMatrix, f: impl Fn(&Jet, &Jet) -> Jet) -> Result<JetMatrix> {
        if self.rows != other.rows || self.cols != other.cols || self.dim != other.dim {
            return Err(Error::Shape("matrix shapes differ".into()));
        }
        let order = self.order.min(other.order);
        Ok(JetMatrix::from_fn(self.rows, self.cols, self.dim, order, |i, j| {
            f(self.get(i, j), other.get(i, j))
        }))
    }

    pub fn scale(&self, c: &GaussianRational) -> JetMatrix {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            dim: self.dim,
            order: self.order,
            entries: self.entries.iter().map(|j| j.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Jet::is_zero)
    }

    /// First `(row, col)` whose entry is nonzero.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|j| !j.is_zero())
            .map(|p| (p / self.cols, p % self.cols))
    }

    /// Values at the base point.
    pub fn constant_part(&self) -> Vec<Vec<GaussianRational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).value()).collect())
            .collect()
    }

    /// Inverse modulo the jet order: exact inverse of the constant term,
    /// then Newton steps `X ← X + X(I − M X)`, each doubling the number of
    /// correct orders.
    pub fn inverse(&self) -> Result<JetMatrix> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let c0 = invert_constant(&self.constant_part()).ok_or_else(|| Error::Degeneracy {
            what: "matrix".into(),
        })?;
        let mut x = JetMatrix::from_fn(n, n, self.dim, self.order, |i, j| {
            Jet::constant(self.dim, self.order, c0[i][j].clone())
        });
        let identity = JetMatrix::identity(n, self.dim, self.order);
        let mut correct = 1u64;
        while correct <= self.order as u64 {
            let residual = identity.sub(&self.mul(&x)?)?;
            x = x.add(&x.mul(&residual)?)?;
            correct *= 2;
        }
        if self.mul(&x)? != identity {
            return Err(Error::consistency("M·M⁻¹ = I", "Newton iteration"));
        }
        Ok(x)
    }
}

/// Gauss–Jordan inverse over the Gaussian rationals.
pub fn invert_constant(m: &[Vec<GaussianRational>]) -> Option<Vec<Vec<GaussianRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<GaussianRational>> = m.to_vec();
    let mut inv: Vec<Vec<GaussianRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { scalar::one() } else { scalar::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !scalar::is_zero(&a[r][col]))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = scalar::inverse(&a[col][col])?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col || scalar::is_zero(&a[r][col]) {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let t = &factor * &a[col][j];
                a[r][j] -= t;
                let t = &factor * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

impl fmt::Debug for JetMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "JetMatrix {}x{} (d={}, K={})", self.rows, self.cols, self.dim, self.order)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_poly_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::scalar::gq;

    fn constant_matrix(vals: &[&[i64]], dim: usize, order: u32) -> JetMatrix {
        JetMatrix::from_rows(
            vals.iter()
                .map(|row| row.iter().map(|&v| Jet::constant(dim, order, gq(v, 1))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_inverts_to_identity() {
        let id = JetMatrix::identity(3, 2, 4);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn antisymmetric_constant_inverse() {
        let m = constant_matrix(&[&[0, 1], &[-1, 0]], 2, 3);
        let expected = constant_matrix(&[&[0, -1], &[1, 0]], 2, 3);
        assert_eq!(m.inverse().unwrap(), expected);
    }

    #[test]
    fn singular_constant_term_is_degenerate() {
        let x = Jet::variable(2, 3, 0);
        let z = Jet::zero(2, 3);
        let m = JetMatrix::from_rows(vec![vec![z.clone(), x.clone()], vec![-&x, z]]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::Degeneracy { .. })));
    }

    #[test]
    fn non_square_rejected() {
        let m = JetMatrix::zeros(2, 3, 2, 2);
        assert!(matches!(m.inverse(), Err(Error::Shape(_))));
    }

    #[test]
    fn unipotent_perturbation_series() {
        // (I + x1 E)^{-1} = I - x1 E + x1^2 E^2 - ..., E nilpotent of index 3
        let order = 5;
        let dim = 2;
        let x1 = Jet::variable(dim, order, 0);
        let e = constant_matrix(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]], dim, order);
        let m = JetMatrix::identity(3, dim, order)
            .add(&JetMatrix::from_fn(3, 3, dim, order, |i, j| e.get(i, j) * &x1))
            .unwrap();
        let inv = m.inverse().unwrap();
        let e2 = e.mul(&e).unwrap();
        let x1sq = &x1 * &x1;
        let expected = JetMatrix::from_fn(3, 3, dim, order, |i, j| {
            let mut acc = if i == j { Jet::one(dim, order) } else { Jet::zero(dim, order) };
            acc.add_scaled(&(e.get(i, j) * &x1), &gq(-1, 1));
            acc.add_assign_jet(&(e2.get(i, j) * &x1sq));
            acc
        });
        assert_eq!(inv, expected);
        assert_eq!(m.mul(&inv).unwrap(), JetMatrix::identity(3, dim, order));
    }
}
