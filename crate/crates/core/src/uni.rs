//! Univariate polynomials over a field context.  Support code for the
//! reducedness test and the line-configuration checks: gcd, derivatives,
//! and exhaustive root search with controlled field extension.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};

/// Total extension degree cap over the prime field for root searches.
pub const MAX_SEARCH_DEGREE: usize = 8;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    ctx: Arc<FieldCtx>,
    /// Little-endian coefficients, no trailing zeros.
    coeffs: Vec<Fe>,
}

impl UniPoly {
    pub fn new(ctx: Arc<FieldCtx>, mut coeffs: Vec<Fe>) -> UniPoly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { ctx, coeffs }
    }

    pub fn zero(ctx: Arc<FieldCtx>) -> UniPoly {
        UniPoly { ctx, coeffs: Vec::new() }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(self.ctx.clone());
        }
        let ctx = &self.ctx;
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        UniPoly::new(ctx.clone(), out)
    }

    pub fn derivative(&self) -> UniPoly {
        let ctx = &self.ctx;
        let mut out = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            let mut scaled = Fe::ZERO;
            for _ in 0..(i as u64 % ctx.p()) {
                scaled = ctx.add(scaled, c);
            }
            out.push(scaled);
        }
        UniPoly::new(ctx.clone(), out)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let ctx = &self.ctx;
        let mut acc = Fe::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = ctx.add(ctx.mul(acc, x), c);
        }
        acc
    }

    /// Remainder of `self` by monic-normalized `other`.
    pub fn rem(&self, other: &UniPoly) -> UniPoly {
        assert!(!other.is_zero());
        let ctx = self.ctx.clone();
        let lead_inv = ctx.inv(*other.coeffs.last().unwrap()).unwrap();
        let d = other.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        while r.len() > d {
            let lead = *r.last().unwrap();
            if !lead.is_zero() {
                let f = ctx.mul(lead, lead_inv);
                let shift = r.len() - 1 - d;
                for (i, &oc) in other.coeffs.iter().enumerate() {
                    r[shift + i] = ctx.sub(r[shift + i], ctx.mul(f, oc));
                }
            }
            while r.last().map_or(false, |c| c.is_zero()) {
                r.pop();
            }
            if r.len() <= d {
                break;
            }
        }
        UniPoly::new(ctx, r)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.coeffs.last() {
            let inv = a.ctx.inv(lead).unwrap();
            let ctx = a.ctx.clone();
            a = UniPoly::new(
                ctx.clone(),
                a.coeffs.iter().map(|&c| ctx.mul(c, inv)).collect(),
            );
        }
        a
    }

    /// All roots in the current field.
    pub fn roots_in_field(&self) -> Vec<Fe> {
        self.ctx
            .elements()
            .filter(|&x| self.eval(x).is_zero())
            .collect()
    }

    pub fn lift(&self, emb: &Embedding) -> UniPoly {
        UniPoly {
            ctx: emb.to.clone(),
            coeffs: self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
        }
    }

    /// Extend the base field (smallest sufficient degree, capped at
    /// `MAX_SEARCH_DEGREE` over the prime field) until the polynomial has at
    /// least `want_distinct` distinct roots, or report how far we got.
    ///
    /// Returns the lifted polynomial, its roots, and the embedding from the
    /// original context into the working context.
    pub fn split_with_extension(
        &self,
        want_distinct: usize,
    ) -> Result<(UniPoly, Vec<Fe>, Embedding)> {
        for d in 1..=MAX_SEARCH_DEGREE / self.ctx.k() {
            let (cur, emb) = if d == 1 {
                (self.clone(), Embedding::identity(self.ctx.clone()))
            } else {
                let (_, emb) = self.ctx.extend(d)?;
                (self.lift(&emb), emb)
            };
            let roots = cur.roots_in_field();
            if roots.len() >= want_distinct {
                return Ok((cur, roots, emb));
            }
        }
        Err(Error::Capacity(format!(
            "roots did not split within extension degree {MAX_SEARCH_DEGREE} over F_{}",
            self.ctx.p()
        )))
    }
}
