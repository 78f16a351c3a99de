//! Dense matrices over a finite field context.  Desk-scale sizes only; all
//! elimination is plain Gaussian elimination with exact arithmetic.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    ctx: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} over F_{}^{}", self.rows, self.cols, self.ctx.p(), self.ctx.k())?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.ctx.format_elem(self.get(i, j)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zero(ctx: Arc<FieldCtx>, rows: usize, cols: usize) -> Mat {
        Mat { ctx, rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(ctx: Arc<FieldCtx>, n: usize) -> Mat {
        let mut m = Mat::zero(ctx, n, n);
        for i in 0..n {
            m.set(i, i, m.ctx.one());
        }
        m
    }

    pub fn from_rows(ctx: Arc<FieldCtx>, rows: Vec<Vec<Fe>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Malformed("ragged matrix rows".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend(row);
        }
        Ok(Mat { ctx, rows: r, cols: c, data })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Fe> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.ctx.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let ctx = &self.ctx;
        let mut out = Mat::zero(ctx.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, ctx.add(cur, ctx.mul(a, other.get(l, j))));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(other.data.iter()) {
            *a = self.ctx.add(*a, b);
        }
        out
    }

    pub fn map<F: Fn(Fe) -> Fe>(&self, f: F) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = f(*a);
        }
        out
    }

    /// Entrywise `p^e`-th power.
    pub fn frobenius(&self, e: u64) -> Mat {
        self.map(|a| self.ctx.frobenius(a, e))
    }

    /// Entrywise `p^e`-th root.
    pub fn frobenius_root(&self, e: u64) -> Mat {
        self.map(|a| self.ctx.frobenius_root(a, e))
    }

    /// Map every entry through a field embedding, producing a matrix over
    /// the target context.
    pub fn lift(&self, emb: &Embedding) -> Mat {
        Mat {
            ctx: emb.to.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| emb.apply(a)).collect(),
        }
    }

    /// Row echelon form; returns (echelon matrix, pivot column per pivot row).
    fn echelon(&self) -> (Mat, Vec<usize>) {
        let ctx = self.ctx.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let pivot = (row..m.rows).find(|&i| !m.get(i, col).is_zero());
            let Some(p) = pivot else { continue };
            if p != row {
                for j in 0..m.cols {
                    let (a, b) = (m.get(row, j), m.get(p, j));
                    m.set(row, j, b);
                    m.set(p, j, a);
                }
            }
            let inv = ctx.inv(m.get(row, col)).expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(row, j, ctx.mul(m.get(row, j), inv));
            }
            for i in 0..m.rows {
                if i != row && !m.get(i, col).is_zero() {
                    let f = m.get(i, col);
                    for j in 0..m.cols {
                        let v = ctx.sub(m.get(i, j), ctx.mul(f, m.get(row, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> Fe {
        assert_eq!(self.rows, self.cols);
        let ctx = self.ctx.clone();
        let mut m = self.clone();
        let mut det = ctx.one();
        for col in 0..m.cols {
            let pivot = (col..m.rows).find(|&i| !m.get(i, col).is_zero());
            let Some(p) = pivot else { return Fe::ZERO };
            if p != col {
                det = ctx.neg(det);
                for j in 0..m.cols {
                    let (a, b) = (m.get(col, j), m.get(p, j));
                    m.set(col, j, b);
                    m.set(p, j, a);
                }
            }
            let pv = m.get(col, col);
            det = ctx.mul(det, pv);
            let inv = ctx.inv(pv).unwrap();
            for i in col + 1..m.rows {
                let f = ctx.mul(m.get(i, col), inv);
                if f.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = ctx.sub(m.get(i, j), ctx.mul(f, m.get(col, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zero(self.ctx.clone(), n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, self.ctx.one());
        }
        let (ech, pivots) = aug.echelon();
        if pivots.len() < n || pivots[..n] != (0..n).collect::<Vec<_>>()[..] {
            return Err(Error::Domain("matrix is singular".into()));
        }
        let mut inv = Mat::zero(self.ctx.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, ech.get(i, n + j));
            }
        }
        Ok(inv)
    }

    /// Basis of the right kernel (as column vectors).
    pub fn kernel_basis(&self) -> Vec<Vec<Fe>> {
        let ctx = self.ctx.clone();
        let (ech, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![Fe::ZERO; self.cols];
            v[fc] = ctx.one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = ctx.neg(ech.get(prow, fc));
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[Fe]) -> Option<Vec<Fe>> {
        assert_eq!(b.len(), self.rows);
        let ctx = self.ctx.clone();
        let mut aug = Mat::zero(ctx.clone(), self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (ech, pivots) = aug.echelon();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Fe::ZERO; self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = ech.get(prow, self.cols);
        }
        Some(x)
    }

    /// Stack the rows of `self` on top of the rows of `other` and take the
    /// rank of the combined row space.
    pub fn row_space_rank_with(&self, other: &Mat) -> usize {
        assert_eq!(self.cols, other.cols);
        let mut rows = Vec::new();
        for i in 0..self.rows {
            rows.push(self.row(i));
        }
        for i in 0..other.rows {
            rows.push(other.row(i));
        }
        Mat::from_rows(self.ctx.clone(), rows).unwrap().rank()
    }

    /// Complete the given independent columns (placed rightmost, in order)
    /// to an invertible square matrix using standard basis vectors.
    pub fn completion_with_last_columns(
        ctx: Arc<FieldCtx>,
        n: usize,
        last_cols: &[Vec<Fe>],
    ) -> Result<Mat> {
        let k = last_cols.len();
        assert!(k <= n);
        let mut chosen: Vec<Vec<Fe>> = Vec::new();
        // greedily add standard basis vectors that keep the set independent
        for i in 0..n {
            if chosen.len() == n - k {
                break;
            }
            let mut e = vec![Fe::ZERO; n];
            e[i] = ctx.one();
            let mut cand: Vec<Vec<Fe>> = chosen.clone();
            cand.push(e.clone());
            cand.extend(last_cols.iter().cloned());
            let m = Mat::from_rows(ctx.clone(), cand)?; // rows = candidate columns
            if m.rank() == m.rows() {
                chosen.push(e);
            }
        }
        if chosen.len() != n - k {
            return Err(Error::Internal("could not complete to an invertible matrix".into()));
        }
        let mut g = Mat::zero(ctx.clone(), n, n);
        for (j, c) in chosen.iter().chain(last_cols.iter()).enumerate() {
            for i in 0..n {
                g.set(i, j, c[i]);
            }
        }
        debug_assert!(g.is_invertible());
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::new(2, 1).unwrap()
    }

    #[test]
    fn rank_and_kernel() {
        let ctx = f2();
        let one = ctx.one();
        let a = Mat::from_rows(
            ctx.clone(),
            vec![
                vec![one, Fe::ZERO, Fe::ZERO],
                vec![Fe::ZERO, Fe::ZERO, one],
                vec![Fe::ZERO, Fe::ZERO, Fe::ZERO],
            ],
        )
        .unwrap();
        assert_eq!(a.rank(), 2);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            // A v = 0
            for i in 0..3 {
                let mut acc = Fe::ZERO;
                for j in 0..3 {
                    acc = ctx.add(acc, ctx.mul(a.get(i, j), v[j]));
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let ctx = FieldCtx::new(3, 1).unwrap();
        let e = |c: u64| ctx.from_prime(c);
        let a = Mat::from_rows(
            ctx.clone(),
            vec![vec![e(1), e(2)], vec![e(1), e(1)]],
        )
        .unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(ctx.clone(), 2));
        assert_eq!(inv.mul(&a), Mat::identity(ctx, 2));
    }

    #[test]
    fn solve_consistent_system() {
        let ctx = FieldCtx::new(5, 1).unwrap();
        let e = |c: u64| ctx.from_prime(c);
        let a = Mat::from_rows(
            ctx.clone(),
            vec![vec![e(2), e(3)], vec![e(1), e(1)]],
        )
        .unwrap();
        let b = vec![e(1), e(2)];
        let x = a.solve(&b).unwrap();
        for i in 0..2 {
            let mut acc = Fe::ZERO;
            for j in 0..2 {
                acc = ctx.add(acc, ctx.mul(a.get(i, j), x[j]));
            }
            assert_eq!(acc, b[i]);
        }
    }

    #[test]
    fn completion_produces_invertible() {
        let ctx = f2();
        let one = ctx.one();
        let v = vec![vec![one, one, Fe::ZERO]];
        let g = Mat::completion_with_last_columns(ctx, 3, &v).unwrap();
        assert!(g.is_invertible());
        assert_eq!(g.col(2), v[0]);
    }
}
