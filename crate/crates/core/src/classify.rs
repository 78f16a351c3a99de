//! Enumeration of sparse forms by embedding dimension and rank: the
//! binomial count of nondegenerate patterns, the Fibonacci bound, and an
//! exhaustive orbit check that the small-dimension patterns are pairwise
//! non-isomorphic.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::frobform::{CoordChange, FrobeniusForm};
use crate::matrix::Mat;
use crate::normalize::is_sparse;

/// Default cap on the embedding dimension for enumeration.
pub const ENUMERATION_CAP: usize = 12;

/// A sparse pattern: the row `i` carries its single unit entry in column
/// `j_i` (both 1-indexed), with the `j_i` strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePattern {
    pub n: usize,
    pub r: usize,
    /// `(i, j_i)` pairs, 1-indexed, `j_i` strictly decreasing.
    pub positions: Vec<(usize, usize)>,
}

impl SparsePattern {
    /// Stable identifier: the decreasing column sequence as a comma list.
    pub fn id(&self) -> String {
        self.positions
            .iter()
            .map(|&(_, j)| j.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Do the variables `x_{r+1}..x_n` all appear among the chosen columns?
    pub fn is_nondegenerate(&self) -> bool {
        (self.r + 1..=self.n).all(|v| self.positions.iter().any(|&(_, j)| j == v))
    }
}

/// All sparse patterns with embedding data `(n, r)`; with
/// `nondegenerate_only` the tail variables are forced and exactly
/// `C(r, n-r)` patterns remain.
pub fn enumerate_sparse(n: usize, r: usize, nondegenerate_only: bool) -> Result<Vec<SparsePattern>> {
    if n > ENUMERATION_CAP {
        return Err(Error::Capacity(format!(
            "enumeration capped at n <= {ENUMERATION_CAP}"
        )));
    }
    if r < 1 || r > n {
        return Err(Error::Domain(format!("rank {r} out of range 1..={n}")));
    }
    let mut out = Vec::new();
    // choose r distinct columns out of 1..=n, listed in decreasing order
    let mut choice: Vec<usize> = Vec::with_capacity(r);
    fn rec(
        n: usize,
        r: usize,
        nondeg: bool,
        start: usize,
        choice: &mut Vec<usize>,
        out: &mut Vec<SparsePattern>,
    ) {
        if choice.len() == r {
            // choice is ascending; row i (1-indexed) takes the i-th largest
            let positions: Vec<(usize, usize)> = choice
                .iter()
                .rev()
                .enumerate()
                .map(|(i, &j)| (i + 1, j))
                .collect();
            let pat = SparsePattern { n, r, positions };
            if !nondeg || pat.is_nondegenerate() {
                out.push(pat);
            }
            return;
        }
        for j in start..=n {
            choice.push(j);
            rec(n, r, nondeg, j + 1, choice, out);
            choice.pop();
        }
    }
    rec(n, r, nondegenerate_only, 1, &mut choice, &mut out);
    Ok(out)
}

/// The Fibonacci bound on nondegenerate class counts, with F_0 = F_1 = 1.
pub fn fibonacci_bound(n: usize) -> u128 {
    let mut a: u128 = 1;
    let mut b: u128 = 1;
    for _ in 0..n {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// Binomial coefficient, exact in u128 for desk-scale arguments.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// The 0/1 matrix of a pattern as a Frobenius form over the given field.
pub fn pattern_to_form(p: &SparsePattern, ctx: &Arc<FieldCtx>, e: u64) -> Result<FrobeniusForm> {
    let mut a = Mat::zero(ctx.clone(), p.n, p.n);
    for &(i, j) in &p.positions {
        if i < 1 || i > p.n || j < 1 || j > p.n {
            return Err(Error::Malformed(format!(
                "pattern position ({i},{j}) out of range for n={}",
                p.n
            )));
        }
        a.set(i - 1, j - 1, ctx.one());
    }
    if !is_sparse(&a) {
        return Err(Error::Malformed("pattern does not satisfy the sparse conditions".into()));
    }
    FrobeniusForm::new(ctx.clone(), e, a)
}

/// Enumerate all invertible n x n matrices over the (small) field.
fn gl_matrices(ctx: &Arc<FieldCtx>, n: usize) -> Result<Vec<Mat>> {
    let order = ctx.order();
    let cells = n * n;
    let total = (order as u128).checked_pow(cells as u32).ok_or_else(|| {
        Error::Capacity("matrix space too large to enumerate".into())
    })?;
    if total > 20_000_000 {
        return Err(Error::Capacity("matrix space too large to enumerate".into()));
    }
    let mut out = Vec::new();
    let mut counter = vec![0u64; cells];
    loop {
        let mut g = Mat::zero(ctx.clone(), n, n);
        for (idx, &c) in counter.iter().enumerate() {
            g.set(idx / n, idx % n, crate::ff::Fe(c));
        }
        if g.is_invertible() {
            out.push(g);
        }
        let mut t = cells;
        loop {
            if t == 0 {
                break;
            }
            counter[t - 1] += 1;
            if counter[t - 1] < order {
                break;
            }
            counter[t - 1] = 0;
            t -= 1;
        }
        if t == 0 {
            break;
        }
    }
    Ok(out)
}

/// Exhaustive orbit check that the given forms are pairwise inequivalent
/// under every invertible change of coordinates over the form's field.
/// Gated to n <= 4 and tiny fields by the enumeration bound.
pub fn pairwise_non_isomorphic(forms: &[FrobeniusForm]) -> Result<bool> {
    if forms.is_empty() {
        return Ok(true);
    }
    let ctx = forms[0].ctx().clone();
    let n = forms[0].n();
    if n > 4 {
        return Err(Error::Capacity("orbit check gated to n <= 4".into()));
    }
    for f in forms {
        if f.n() != n || **f.ctx() != *ctx {
            return Err(Error::Domain("orbit check needs forms of equal shape and field".into()));
        }
    }
    let group = gl_matrices(&ctx, n)?;
    for a in 0..forms.len() {
        for b in a + 1..forms.len() {
            for g in &group {
                let moved = forms[a].act(&CoordChange::new(g.clone())?)?;
                if moved.matrix() == forms[b].matrix() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nondegenerate_counts_match_binomials() {
        for n in 1..=8usize {
            for r in 1..=n {
                let pats = enumerate_sparse(n, r, true).unwrap();
                assert_eq!(pats.len() as u128, binomial(r, n - r), "n={n} r={r}");
                for p in &pats {
                    assert!(p.is_nondegenerate());
                    assert_eq!(p.r, r);
                }
            }
        }
    }

    #[test]
    fn small_counts_and_fibonacci() {
        assert_eq!(fibonacci_bound(1), 1);
        assert_eq!(fibonacci_bound(2), 2);
        assert_eq!(fibonacci_bound(3), 3);
        assert_eq!(fibonacci_bound(4), 5);
        for n in 1..=8usize {
            let total: u128 = (1..=n)
                .map(|r| enumerate_sparse(n, r, true).unwrap().len() as u128)
                .sum();
            assert_eq!(total, fibonacci_bound(n), "n={n}");
        }
        // the identity holds out to n = 20 via the binomial sum
        for n in 1..=20usize {
            let total: u128 = (1..=n).map(|r| binomial(r, n - r)).sum();
            assert_eq!(total, fibonacci_bound(n), "n={n}");
        }
    }

    #[test]
    fn low_rank_patterns_are_empty() {
        // 2r >= n is forced for nondegenerate patterns
        assert!(enumerate_sparse(6, 2, true).unwrap().is_empty());
        assert!(!enumerate_sparse(6, 3, true).unwrap().is_empty());
    }

    #[test]
    fn patterns_build_sparse_forms_with_declared_invariants() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        for n in 1..=4usize {
            for r in 1..=n {
                for p in enumerate_sparse(n, r, true).unwrap() {
                    let f = pattern_to_form(&p, &ctx, 1).unwrap();
                    assert!(is_sparse(f.matrix()));
                    assert_eq!(f.rank(), r);
                    assert_eq!(f.embedding_dimension(), n);
                }
            }
        }
    }

    #[test]
    fn pattern_ids_are_decreasing_column_lists() {
        let pats = enumerate_sparse(2, 1, false).unwrap();
        let ids: Vec<String> = pats.iter().map(|p| p.id()).collect();
        assert!(ids.contains(&"1".to_string()));
        assert!(ids.contains(&"2".to_string()));
        let full = enumerate_sparse(4, 3, true).unwrap();
        for p in &full {
            let cols: Vec<usize> = p.positions.iter().map(|&(_, j)| j).collect();
            let mut sorted = cols.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            assert_eq!(cols, sorted);
        }
    }

    #[test]
    fn n3_patterns_pairwise_non_isomorphic_over_f2() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let mut forms = Vec::new();
        for r in 1..=3usize {
            for p in enumerate_sparse(3, r, true).unwrap() {
                forms.push(pattern_to_form(&p, &ctx, 1).unwrap());
            }
        }
        assert_eq!(forms.len(), 3);
        assert!(pairwise_non_isomorphic(&forms).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_sparse(13, 7, true), Err(Error::Capacity(_))));
    }
}
