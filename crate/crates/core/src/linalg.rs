//! Dense matrices over `F_q`.
//!
//! All reductions use plain Gaussian elimination with the first nonzero
//! entry (scanning top to bottom) as pivot, so every result is deterministic.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Fe, Field};
use crate::{Error, Result};

/// A dense row-major matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

/// Result of an in-place reduction to row echelon form.
struct Echelon {
    /// Pivot column of each of the first `rank` rows.
    pivots: Vec<usize>,
    /// Product of the applied row swaps' signs and pivot values; only
    /// meaningful for square inputs of full rank.
    det: Fe,
}

impl Matrix {
    /// The `rows × cols` zero matrix.
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    /// The `n × n` identity.
    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = Fe::ONE;
        }
        m
    }

    /// Build from integer rows, reducing each entry modulo `q`.
    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows"));
        }
        let data = rows.iter().flatten().map(|&v| field.elem(v)).collect();
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Build from reduced elements in row-major order.
    pub fn from_elems(field: Field, rows: usize, cols: usize, data: Vec<Fe>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("entry count"));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// The field the entries live in.
    pub fn field(&self) -> Field {
        self.field
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(r, c)`.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    /// Set entry `(r, c)`.
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Fe] {
        &self.data
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch("product inner dimension"));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if !a.is_zero() {
                    // dst += a * rhs[k] written as dst -= (-a) * rhs[k].
                    f.sub_scaled(dst, rhs.row(k), f.neg(a));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Fe]) -> Result<Vec<Fe>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length"));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// `self` scaled by `c`.
    pub fn scaled(&self, c: Fe) -> Matrix {
        let mut out = self.clone();
        self.field.scale(&mut out.data, c);
        out
    }

    /// Entrywise `self - rhs`.
    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("difference shape"));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Matrix { data, ..*self })
    }

    /// `self` stacked on top of `below`.
    pub fn vstack(&self, below: &Matrix) -> Result<Matrix> {
        if self.cols != below.cols {
            return Err(Error::DimensionMismatch("stack column count"));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    /// The sub-matrix formed by the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// The sub-matrix formed by the given columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let c = self.cols;
            let (lo, hi) = (a.min(b), a.max(b));
            let (head, tail) = self.data.split_at_mut(hi * c);
            head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
        }
    }

    /// Eliminate below each pivot. Entries left of a pivot are untouched, so
    /// only columns `>= pivot` are updated.
    fn echelon(&mut self) -> Echelon {
        let f = self.field;
        let c = self.cols;
        let mut pivots = Vec::new();
        let mut det = Fe::ONE;
        let mut r = 0;
        for col in 0..c {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, col).is_zero()) else {
                continue;
            };
            if p != r {
                self.swap_rows(p, r);
                det = f.neg(det);
            }
            let pv = self.get(r, col);
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("pivot is nonzero");
            let (head, tail) = self.data.split_at_mut((r + 1) * c);
            let prow = &head[r * c + col..(r + 1) * c];
            for below in tail.chunks_exact_mut(c) {
                let lead = below[col];
                if !lead.is_zero() {
                    f.sub_scaled(&mut below[col..], prow, f.mul(lead, inv));
                }
            }
            pivots.push(col);
            r += 1;
        }
        Echelon { pivots, det }
    }

    /// Row rank.
    pub fn rank(&self) -> usize {
        self.clone().echelon().pivots.len()
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> Result<Fe> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let e = self.clone().echelon();
        Ok(if e.pivots.len() < self.rows {
            Fe::ZERO
        } else {
            e.det
        })
    }

    /// Solve `self · x = b` for a square nonsingular `self`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch("right-hand side row count"));
        }
        let n = self.rows;
        let w = n + b.cols;
        let mut aug = Matrix::zeros(self.field, n, w);
        for i in 0..n {
            aug.data[i * w..i * w + n].copy_from_slice(self.row(i));
            aug.data[i * w + n..(i + 1) * w].copy_from_slice(b.row(i));
        }
        aug.reduce_left_block(n)?;
        Ok(aug.select_cols(&(n..w).collect::<Vec<_>>()))
    }

    /// Inverse of a square nonsingular matrix.
    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.field, self.rows))
    }

    /// Gauss-Jordan on the leading `n × n` block of an `n × w` matrix,
    /// leaving the identity there. Fails if that block is singular.
    fn reduce_left_block(&mut self, n: usize) -> Result<()> {
        let f = self.field;
        let w = self.cols;
        for col in 0..n {
            let p = (col..n)
                .find(|&i| !self.get(i, col).is_zero())
                .ok_or(Error::Singular)?;
            self.swap_rows(p, col);
            let inv = f.inv(self.get(col, col))?;
            f.scale(&mut self.data[col * w + col..(col + 1) * w], inv);
            let prow: Vec<Fe> = self.data[col * w + col..(col + 1) * w].to_vec();
            for (i, row) in self.data.chunks_exact_mut(w).enumerate() {
                if i != col {
                    let lead = row[col];
                    if !lead.is_zero() {
                        f.sub_scaled(&mut row[col..], &prow, lead);
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `self` and `other` span the same row space.
    pub fn rowspace_equal(&self, other: &Matrix) -> Result<bool> {
        let stacked = self.vstack(other)?;
        let ra = self.rank();
        Ok(ra == other.rank() && ra == stacked.rank())
    }

    /// The matrix `B` with `B · self = target`, where `self` has full row
    /// rank and every row of `target` lies in the row space of `self`.
    pub fn change_of_basis(&self, target: &Matrix) -> Result<Matrix> {
        if self.cols != target.cols {
            return Err(Error::DimensionMismatch("column count"));
        }
        let pivots = self.clone().echelon().pivots;
        if pivots.len() < self.rows {
            return Err(Error::DimensionMismatch(
                "subspace basis is not full row rank",
            ));
        }
        // self restricted to its pivot columns is invertible; solve there and
        // confirm the solution on the full width.
        let sub_p = self.select_cols(&pivots);
        let tgt_p = target.select_cols(&pivots);
        // B · sub_p = tgt_p  <=>  sub_pᵀ · Bᵀ = tgt_pᵀ
        let bt = sub_p.transpose().solve(&tgt_p.transpose())?;
        let b = bt.transpose();
        if b.mul(self)? != *target {
            return Err(Error::NotInSpan);
        }
        Ok(b)
    }

    /// Transpose.
    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;
    use proptest::prelude::*;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn random(field: Field, rows: usize, cols: usize, g: &mut XorShift64Star) -> Matrix {
        let data = (0..rows * cols)
            .map(|_| Fe(g.below(field.modulus())))
            .collect();
        Matrix::from_elems(field, rows, cols, data).unwrap()
    }

    fn random_nonsingular(field: Field, n: usize, g: &mut XorShift64Star) -> Matrix {
        loop {
            let m = random(field, n, n, g);
            if m.rank() == n {
                return m;
            }
        }
    }

    /// Permutation expansion, independent of elimination.
    fn leibniz_det(m: &Matrix) -> Fe {
        let n = m.rows();
        let fld = m.field();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Fe::ZERO;
        permute(&mut perm, 0, &mut |p| {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let term = (0..n).fold(Fe::ONE, |acc, i| fld.mul(acc, m.get(i, p[i])));
            total = if inversions % 2 == 0 {
                fld.add(total, term)
            } else {
                fld.sub(total, term)
            };
        });
        total
    }

    fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == p.len() {
            visit(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, visit);
            p.swap(k, i);
        }
    }

    #[test]
    fn rank_basics() {
        let fl = f(7);
        assert_eq!(Matrix::identity(fl, 5).rank(), 5);
        assert_eq!(Matrix::zeros(fl, 3, 4).rank(), 0);
        let m = Matrix::from_rows(fl, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn det_basics() {
        let fl = f(5);
        assert_eq!(Matrix::identity(fl, 4).det().unwrap(), Fe::ONE);
        let m = Matrix::from_rows(fl, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(m.det().unwrap(), fl.elem(4));
        assert_eq!(
            Matrix::zeros(fl, 2, 3).det(),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn det_matches_leibniz() {
        let fl = f(11);
        let mut g = XorShift64Star::new(3);
        for n in 1..=5 {
            for _ in 0..20 {
                let m = random(fl, n, n, &mut g);
                assert_eq!(m.det().unwrap(), leibniz_det(&m));
            }
        }
    }

    #[test]
    fn solve_cases() {
        let fl = f(7);
        let mut g = XorShift64Star::new(11);
        let b = random(fl, 4, 3, &mut g);
        assert_eq!(Matrix::identity(fl, 4).solve(&b).unwrap(), b);

        let a = random_nonsingular(fl, 8, &mut g);
        let b = random(fl, 8, 2, &mut g);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);

        let sing = Matrix::from_rows(fl, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(sing.solve(&Matrix::identity(fl, 2)), Err(Error::Singular));
    }

    #[test]
    fn rowspace_scaling() {
        let fl = f(7);
        let mut g = XorShift64Star::new(5);
        let a = random(fl, 3, 6, &mut g);
        assert!(a.rowspace_equal(&a.scaled(fl.elem(3))).unwrap());
        let other = Matrix::identity(fl, 6).select_rows(&[0, 1, 2]);
        if a.rank() == 3 && a.select_cols(&[3, 4, 5]).rank() > 0 {
            assert!(!a.rowspace_equal(&other).unwrap());
        }
    }

    #[test]
    fn change_of_basis_cases() {
        let fl = f(5);
        let sub = Matrix::from_rows(fl, &[vec![1, 0, 2, 0], vec![0, 1, 0, 3]]).unwrap();
        assert_eq!(sub.change_of_basis(&sub).unwrap(), Matrix::identity(fl, 2));
        assert_eq!(
            sub.change_of_basis(&sub.scaled(fl.elem(2))).unwrap(),
            Matrix::identity(fl, 2).scaled(fl.elem(2))
        );
        let outside = Matrix::from_rows(fl, &[vec![1, 0, 2, 0], vec![0, 0, 1, 0]]).unwrap();
        assert_eq!(sub.change_of_basis(&outside), Err(Error::NotInSpan));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn det_is_multiplicative(seed in any::<u64>(), n in 1usize..=8) {
            let fl = f(11);
            let mut g = XorShift64Star::new(seed);
            let a = random(fl, n, n, &mut g);
            let b = random(fl, n, n, &mut g);
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.det().unwrap(), fl.mul(a.det().unwrap(), b.det().unwrap()));
        }

        #[test]
        fn stacking_preserves_rank(seed in any::<u64>(), r in 1usize..6, c in 1usize..6) {
            let fl = f(3);
            let mut g = XorShift64Star::new(seed);
            let a = random(fl, r, c, &mut g);
            prop_assert_eq!(a.vstack(&a).unwrap().rank(), a.rank());
        }

        #[test]
        fn solve_round_trip(seed in any::<u64>(), n in 1usize..8) {
            let fl = f(7);
            let mut g = XorShift64Star::new(seed);
            let a = random(fl, n, n, &mut g);
            let b = random(fl, n, 2, &mut g);
            if let Ok(x) = a.solve(&b) {
                prop_assert_eq!(a.mul(&x).unwrap(), b);
            } else {
                prop_assert!(a.rank() < n);
            }
        }

        #[test]
        fn change_of_basis_round_trip(seed in any::<u64>(), p in 1usize..5, extra in 0usize..4) {
            let fl = f(13);
            let mut g = XorShift64Star::new(seed);
            let sub = random(fl, p, p + extra, &mut g);
            prop_assume!(sub.rank() == p);
            let mix = random(fl, p, p, &mut g);
            let target = mix.mul(&sub).unwrap();
            let b = sub.change_of_basis(&target).unwrap();
            prop_assert_eq!(b.mul(&sub).unwrap(), target);
        }
    }
}
