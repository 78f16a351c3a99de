//! The Frobenius-form data type: a degree `q+1` form `h = (x^[q])^T A x`
//! encoded by its matrix `A`, the twisted congruence action of coordinate
//! changes, and the basic invariants (rank, embedding dimension, singular
//! locus, Hessian vanishing, Hermitian detection).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};
use crate::matrix::Mat;
use crate::poly::{Monomial, MultiPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusForm {
    ctx: Arc<FieldCtx>,
    e: u64,
    n: usize,
    a: Mat,
}

/// An invertible coordinate change `x <- g x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordChange {
    g: Mat,
}

impl CoordChange {
    pub fn new(g: Mat) -> Result<CoordChange> {
        if g.rows() != g.cols() {
            return Err(Error::Domain("coordinate change must be square".into()));
        }
        if !g.is_invertible() {
            return Err(Error::Domain("coordinate change is singular".into()));
        }
        Ok(CoordChange { g })
    }

    pub fn matrix(&self) -> &Mat {
        &self.g
    }

    pub fn identity(ctx: Arc<FieldCtx>, n: usize) -> CoordChange {
        CoordChange { g: Mat::identity(ctx, n) }
    }

    /// `self` applied first, then `other`.
    pub fn then(&self, other: &CoordChange) -> CoordChange {
        CoordChange { g: self.g.mul(&other.g) }
    }
}

impl FrobeniusForm {
    pub fn new(ctx: Arc<FieldCtx>, e: u64, a: Mat) -> Result<FrobeniusForm> {
        if a.rows() != a.cols() {
            return Err(Error::Domain("frobenius form matrix must be square".into()));
        }
        if *a.ctx() != ctx {
            return Err(Error::Domain("matrix context mismatch".into()));
        }
        let n = a.rows();
        Ok(FrobeniusForm { ctx, e, n, a })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.ctx.p().pow(self.e as u32)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    /// Extract the matrix of a degree `q+1` form lying in `m^[q]`.
    ///
    /// For `e >= 1` the factorization `h = sum x_i^q L_i` is unique.  For
    /// `e = 0` it is not, and the canonical representative puts the whole
    /// coefficient of `x_i x_j` (i < j) into `A_ij`, leaving `A_ji = 0`.
    pub fn from_polynomial(f: &MultiPoly, e: u64) -> Result<FrobeniusForm> {
        let ctx = f.ctx().clone();
        let n = f.nvars();
        let q = ctx.p().pow(e as u32);
        let d = f.homogeneous_degree();
        if d != Some(q as u32 + 1) {
            return Err(Error::Domain(format!(
                "not a frobenius form: degree {:?} differs from q+1 = {}",
                d,
                q + 1
            )));
        }
        if !f.in_frobenius_power(e) {
            return Err(Error::Domain(
                "not a frobenius form: the form is not in m^[q]".into(),
            ));
        }
        let mut a = Mat::zero(ctx.clone(), n, n);
        for (m, c) in f.terms() {
            let mut placed = false;
            if e >= 1 {
                for i in 0..n {
                    if m.0[i] as u64 >= q {
                        // exponent pattern is x_i^q * x_j (or x_i^{q+1})
                        let j = if m.0[i] as u64 == q + 1 {
                            i
                        } else {
                            (0..n)
                                .find(|&j| j != i && m.0[j] == 1)
                                .ok_or_else(|| Error::Internal("bad monomial shape".into()))?
                        };
                        a.set(i, j, c);
                        placed = true;
                        break;
                    }
                }
            } else {
                // q = 1: quadric; coefficient of x_i x_j (i < j) goes to A_ij
                let support: Vec<usize> = (0..n).filter(|&i| m.0[i] > 0).collect();
                match support.as_slice() {
                    [i] => a.set(*i, *i, c),
                    [i, j] => a.set(*i, *j, c),
                    _ => return Err(Error::Internal("bad quadric monomial".into())),
                }
                placed = true;
            }
            if !placed {
                return Err(Error::Internal(
                    "monomial of a form in m^[q] without a q-th power".into(),
                ));
            }
        }
        FrobeniusForm::new(ctx, e, a)
    }

    pub fn to_polynomial(&self) -> MultiPoly {
        let q = self.q();
        let mut f = MultiPoly::zero(self.ctx.clone(), self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let c = self.a.get(i, j);
                if c.is_zero() {
                    continue;
                }
                let mut exps = vec![0u32; self.n];
                exps[i] += q as u32;
                exps[j] += 1;
                f = f
                    .add(&MultiPoly::from_term(self.ctx.clone(), self.n, Monomial(exps), c))
                    .expect("same ring");
            }
        }
        f
    }

    /// The twisted congruence action `A <- (g^[q])^T A g`.
    pub fn act(&self, g: &CoordChange) -> Result<FrobeniusForm> {
        if g.g.rows() != self.n {
            return Err(Error::Domain("coordinate change has wrong size".into()));
        }
        let gq_t = g.g.frobenius(self.e).transpose();
        let a = gq_t.mul(&self.a).mul(&g.g);
        FrobeniusForm::new(self.ctx.clone(), self.e, a)
    }

    /// Swap of variables `i` and `j`: swaps rows i,j and columns i,j.
    pub fn elementary_swap(&self, i: usize, j: usize) -> FrobeniusForm {
        let mut a = self.a.clone();
        for c in 0..self.n {
            let (x, y) = (a.get(i, c), a.get(j, c));
            a.set(i, c, y);
            a.set(j, c, x);
        }
        for r in 0..self.n {
            let (x, y) = (a.get(r, i), a.get(r, j));
            a.set(r, i, y);
            a.set(r, j, x);
        }
        FrobeniusForm { ctx: self.ctx.clone(), e: self.e, n: self.n, a }
    }

    /// Scale `x_i` by `lambda`: row i times `lambda^q`, column i times
    /// `lambda`.
    pub fn elementary_scale(&self, i: usize, lambda: Fe) -> Result<FrobeniusForm> {
        if lambda.is_zero() {
            return Err(Error::Domain("scaling by zero is singular".into()));
        }
        let ctx = &self.ctx;
        let lq = ctx.frobenius(lambda, self.e);
        let mut a = self.a.clone();
        for c in 0..self.n {
            a.set(i, c, ctx.mul(a.get(i, c), lq));
        }
        for r in 0..self.n {
            a.set(r, i, ctx.mul(a.get(r, i), lambda));
        }
        Ok(FrobeniusForm { ctx: self.ctx.clone(), e: self.e, n: self.n, a })
    }

    /// The shear `x_i <- x_i + lambda x_j`: column `C_j += lambda C_i`, then
    /// row `R_j += lambda^q R_i` (on the updated matrix).
    pub fn elementary_shear(&self, i: usize, j: usize, lambda: Fe) -> Result<FrobeniusForm> {
        if i == j {
            return Err(Error::Domain("shear needs distinct variables".into()));
        }
        let ctx = &self.ctx;
        let lq = ctx.frobenius(lambda, self.e);
        let mut a = self.a.clone();
        for r in 0..self.n {
            let v = ctx.add(a.get(r, j), ctx.mul(lambda, a.get(r, i)));
            a.set(r, j, v);
        }
        for c in 0..self.n {
            let v = ctx.add(a.get(j, c), ctx.mul(lq, a.get(i, c)));
            a.set(j, c, v);
        }
        Ok(FrobeniusForm { ctx: self.ctx.clone(), e: self.e, n: self.n, a })
    }

    pub fn rank(&self) -> usize {
        self.a.rank()
    }

    /// `dim(rowspace(A) + colspace(A^[1/q]))`.
    pub fn embedding_dimension(&self) -> usize {
        let root_t = self.a.frobenius_root(self.e).transpose();
        self.a.row_space_rank_with(&root_t)
    }

    /// Kernel basis of `(A^[1/q])^T`; spans the reduced singular locus.
    pub fn singular_locus(&self) -> Vec<Vec<Fe>> {
        self.a.frobenius_root(self.e).transpose().kernel_basis()
    }

    pub fn hessian_is_zero(&self) -> bool {
        hessian_is_zero_poly(&self.to_polynomial())
    }

    /// `A_ij = (A_ji)^q` for all i, j.
    pub fn is_hermitian(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if self.a.get(i, j) != self.ctx.frobenius(self.a.get(j, i), self.e) {
                    return false;
                }
            }
        }
        true
    }

    pub fn lift(&self, emb: &Embedding) -> FrobeniusForm {
        FrobeniusForm {
            ctx: emb.to.clone(),
            e: self.e,
            n: self.n,
            a: self.a.lift(emb),
        }
    }
}

/// Do all second partials of `f` vanish?  Exposed separately so that
/// non-Frobenius control polynomials can go through the same check.
pub fn hessian_is_zero_poly(f: &MultiPoly) -> bool {
    for i in 0..f.nvars() {
        let di = f.partial_derivative(i);
        for j in i..f.nvars() {
            if !di.partial_derivative(j).is_zero() {
                return false;
            }
        }
    }
    true
}

/// JSON codec for matrices: `{p, k, e, n, rows}` with elements as
/// coefficient lists over the prime field.
#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: u64,
    pub k: usize,
    pub e: u64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub rows: Vec<Vec<Vec<u64>>>,
}

impl MatrixJson {
    pub fn encode(form: &FrobeniusForm) -> MatrixJson {
        let ctx = form.ctx();
        let rows = (0..form.n())
            .map(|i| {
                (0..form.n())
                    .map(|j| ctx.digits(form.matrix().get(i, j)))
                    .collect()
            })
            .collect();
        MatrixJson {
            p: ctx.p(),
            k: ctx.k(),
            e: form.e(),
            n: form.n(),
            modulus: if ctx.k() > 1 {
                Some(ctx.modulus().to_vec())
            } else {
                None
            },
            rows,
        }
    }

    pub fn decode(&self) -> Result<FrobeniusForm> {
        let ctx = match &self.modulus {
            Some(m) => FieldCtx::with_modulus(self.p, self.k, m.clone())?,
            None => FieldCtx::new(self.p, self.k)?,
        };
        if self.rows.len() != self.n {
            return Err(Error::Malformed("matrix row count mismatch".into()));
        }
        let mut a = Mat::zero(ctx.clone(), self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::Malformed("matrix column count mismatch".into()));
            }
            for (j, coeffs) in row.iter().enumerate() {
                a.set(i, j, ctx.from_coeffs(coeffs)?);
            }
        }
        FrobeniusForm::new(ctx, self.e, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::new(2, 1).unwrap()
    }

    fn poly(ctx: &Arc<FieldCtx>, s: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(ctx.clone(), s, Some(n)).unwrap()
    }

    fn random_invertible(ctx: &Arc<FieldCtx>, n: usize, rng: &mut ChaCha8Rng) -> CoordChange {
        loop {
            let mut g = Mat::zero(ctx.clone(), n, n);
            for i in 0..n {
                for j in 0..n {
                    g.set(i, j, Fe(rng.gen_range(0..ctx.order())));
                }
            }
            if g.is_invertible() {
                return CoordChange::new(g).unwrap();
            }
        }
    }

    #[test]
    fn codec_examples() {
        let ctx = f2();
        let diag = poly(&ctx, "x0^3 + x1^3 + x2^3", 3);
        let f = FrobeniusForm::from_polynomial(&diag, 1).unwrap();
        assert_eq!(*f.matrix(), Mat::identity(ctx.clone(), 3));
        assert_eq!(f.to_polynomial(), diag);

        let cusp = poly(&ctx, "x0^3 + x1^2*x2", 3);
        let f = FrobeniusForm::from_polynomial(&cusp, 1).unwrap();
        let one = ctx.one();
        let mut want = Mat::zero(ctx.clone(), 3, 3);
        want.set(0, 0, one);
        want.set(1, 2, one);
        assert_eq!(*f.matrix(), want);
        assert_eq!(f.rank(), 2);
        assert_eq!(f.singular_locus().len(), 1);

        let not = poly(&ctx, "x0^2*x1 + x0*x1^2", 2);
        assert!(FrobeniusForm::from_polynomial(&not, 2).is_err());
    }

    #[test]
    fn codec_exhaustive_n2_q2() {
        let ctx = f2();
        for bits in 0..16u32 {
            let mut a = Mat::zero(ctx.clone(), 2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    if bits >> (2 * i + j) & 1 == 1 {
                        a.set(i, j, ctx.one());
                    }
                }
            }
            let f = FrobeniusForm::new(ctx.clone(), 1, a.clone()).unwrap();
            let h = f.to_polynomial();
            if h.is_zero() {
                continue; // zero form has no degree, codec not applicable
            }
            let back = FrobeniusForm::from_polynomial(&h, 1).unwrap();
            assert_eq!(*back.matrix(), a);
        }
    }

    #[test]
    fn act_matches_polynomial_substitution() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let n = 3;
            let mut a = Mat::zero(ctx.clone(), n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, Fe(rng.gen_range(0..ctx.order())));
                }
            }
            let f = FrobeniusForm::new(ctx.clone(), 1, a).unwrap();
            let g = random_invertible(&ctx, n, &mut rng);
            let acted = f.act(&g).unwrap();
            let subbed = f.to_polynomial().apply_linear_change(g.matrix()).unwrap();
            assert_eq!(acted.to_polynomial(), subbed);
            assert_eq!(acted.rank(), f.rank());
            assert_eq!(acted.embedding_dimension(), f.embedding_dimension());
        }
    }

    #[test]
    fn elementary_ops_match_act() {
        let ctx = FieldCtx::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 3;
        let mut a = Mat::zero(ctx.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, Fe(rng.gen_range(0..ctx.order())));
            }
        }
        let f = FrobeniusForm::new(ctx.clone(), 1, a).unwrap();

        // swap = permutation matrix action
        let mut pm = Mat::identity(ctx.clone(), n);
        pm.set(0, 0, Fe::ZERO);
        pm.set(2, 2, Fe::ZERO);
        pm.set(0, 2, ctx.one());
        pm.set(2, 0, ctx.one());
        assert_eq!(
            f.elementary_swap(0, 2).matrix(),
            f.act(&CoordChange::new(pm).unwrap()).unwrap().matrix()
        );

        // scale
        let lam = ctx.gen();
        let mut sm = Mat::identity(ctx.clone(), n);
        sm.set(1, 1, lam);
        assert_eq!(
            f.elementary_scale(1, lam).unwrap().matrix(),
            f.act(&CoordChange::new(sm).unwrap()).unwrap().matrix()
        );

        // shear x_0 <- x_0 + lam*x_2 corresponds to g = I + lam*E_{0,2}
        let mut hm = Mat::identity(ctx.clone(), n);
        hm.set(0, 2, lam);
        assert_eq!(
            f.elementary_shear(0, 2, lam).unwrap().matrix(),
            f.act(&CoordChange::new(hm).unwrap()).unwrap().matrix()
        );

        // inverse shear undoes
        let sheared = f.elementary_shear(0, 2, lam).unwrap();
        let back = sheared.elementary_shear(0, 2, ctx.neg(lam)).unwrap();
        assert_eq!(back.matrix(), f.matrix());
    }

    #[test]
    fn invariants_rank_embdim_hessian() {
        let ctx = f2();
        let diag = FrobeniusForm::from_polynomial(&poly(&ctx, "x0^3 + x1^3 + x2^3", 3), 1).unwrap();
        assert_eq!(diag.rank(), 3);
        assert_eq!(diag.embedding_dimension(), 3);
        assert!(diag.singular_locus().is_empty());
        assert!(diag.hessian_is_zero());

        let xqy = FrobeniusForm::from_polynomial(&poly(&ctx, "x0^2*x1", 2), 1).unwrap();
        assert_eq!(xqy.rank(), 1);
        assert_eq!(xqy.embedding_dimension(), 2);
        assert!(2 * xqy.rank() >= xqy.embedding_dimension());

        let padded = FrobeniusForm::from_polynomial(&poly(&ctx, "x0^3", 3), 1).unwrap();
        assert_eq!(padded.embedding_dimension(), 1);

        // control: a non-Frobenius polynomial has a nonzero Hessian
        let ctx3 = FieldCtx::new(3, 1).unwrap();
        let control = poly(&ctx3, "x0^2*x1^2", 2);
        assert!(!hessian_is_zero_poly(&control));
    }

    #[test]
    fn hermitian_detection() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let t = ctx.gen();
        let t2 = ctx.mul(t, t);
        let mut a = Mat::zero(ctx.clone(), 2, 2);
        a.set(0, 1, t);
        a.set(1, 0, t2);
        let f = FrobeniusForm::new(ctx.clone(), 1, a).unwrap();
        assert!(f.is_hermitian());

        let id = FrobeniusForm::new(ctx.clone(), 1, Mat::identity(ctx.clone(), 2)).unwrap();
        assert!(id.is_hermitian());

        let mut b = Mat::zero(ctx.clone(), 2, 2);
        b.set(0, 1, ctx.one());
        let g = FrobeniusForm::new(ctx, 1, b).unwrap();
        assert!(!g.is_hermitian());
    }

    #[test]
    fn embedding_dimension_matches_support_oracle() {
        // minimum variable support over all of GL_n(F_2), n <= 3
        let ctx = f2();
        let n = 3;
        let all_g: Vec<Mat> = {
            let mut v = Vec::new();
            for bits in 0..512u32 {
                let mut g = Mat::zero(ctx.clone(), n, n);
                for i in 0..n {
                    for j in 0..n {
                        if bits >> (n * i + j) & 1 == 1 {
                            g.set(i, j, ctx.one());
                        }
                    }
                }
                if g.is_invertible() {
                    v.push(g);
                }
            }
            v
        };
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let mut a = Mat::zero(ctx.clone(), n, n);
            for i in 0..n {
                for j in 0..n {
                    if rng.gen_bool(0.5) {
                        a.set(i, j, ctx.one());
                    }
                }
            }
            let f = FrobeniusForm::new(ctx.clone(), 1, a).unwrap();
            if f.to_polynomial().is_zero() {
                continue;
            }
            let mut min_support = n;
            for g in &all_g {
                let h = f
                    .act(&CoordChange::new(g.clone()).unwrap())
                    .unwrap()
                    .to_polynomial();
                let mut used = vec![false; n];
                for (m, _) in h.terms() {
                    for (i, &e) in m.0.iter().enumerate() {
                        if e > 0 {
                            used[i] = true;
                        }
                    }
                }
                min_support = min_support.min(used.iter().filter(|&&u| u).count());
            }
            assert_eq!(
                f.embedding_dimension(),
                min_support,
                "embedding dimension disagrees with the GL_3(F_2) support oracle"
            );
        }
    }

    #[test]
    fn matrix_json_round_trip() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let mut a = Mat::zero(ctx.clone(), 2, 2);
        a.set(0, 1, ctx.gen());
        a.set(1, 1, ctx.one());
        let f = FrobeniusForm::new(ctx, 1, a).unwrap();
        let j = MatrixJson::encode(&f);
        let s = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.decode().unwrap(), f);
    }
}
