//! Sparse multivariate polynomials over `F_{p^k}` with the operations the
//! threshold search needs: truncated powering modulo Frobenius powers of the
//! maximal ideal, linear substitution, hyperplane quotients and a
//! probabilistic reducedness test.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Budget, Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};
use crate::matrix::Mat;
use crate::uni::UniPoly;

/// Exponent vector with graded-lexicographic order (total degree first,
/// then lexicographic on the exponents of `x0, x1, ...`).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ctx: Arc<FieldCtx>,
    nvars: usize,
    /// No zero coefficients stored.
    terms: BTreeMap<Monomial, Fe>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl MultiPoly {
    pub fn zero(ctx: Arc<FieldCtx>, nvars: usize) -> MultiPoly {
        MultiPoly { ctx, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: Arc<FieldCtx>, nvars: usize, c: Fe) -> MultiPoly {
        let mut p = MultiPoly::zero(ctx, nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    pub fn one(ctx: Arc<FieldCtx>, nvars: usize) -> MultiPoly {
        let one = ctx.one();
        MultiPoly::constant(ctx, nvars, one)
    }

    pub fn var(ctx: Arc<FieldCtx>, nvars: usize, i: usize) -> MultiPoly {
        assert!(i < nvars);
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let one = ctx.one();
        MultiPoly::from_term(ctx, nvars, Monomial(exps), one)
    }

    pub fn from_term(ctx: Arc<FieldCtx>, nvars: usize, m: Monomial, c: Fe) -> MultiPoly {
        assert_eq!(m.0.len(), nvars);
        let mut p = MultiPoly::zero(ctx, nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Fe)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Fe {
        self.terms.get(m).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// `Some(d)` when every term has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.total_degree());
        let d = degs.next()?;
        if degs.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    fn check_compat(&self, other: &MultiPoly) -> Result<()> {
        if *self.ctx != *other.ctx || self.nvars != other.nvars {
            return Err(Error::Domain(
                "polynomials live over different rings".into(),
            ));
        }
        Ok(())
    }

    fn insert_add(&mut self, m: Monomial, c: Fe) {
        if c.is_zero() {
            return;
        }
        let ctx = self.ctx.clone();
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = ctx.add(*e.get(), c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.insert_add(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        let ctx = self.ctx.clone();
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| (m.clone(), ctx.neg(c)))
            .collect();
        MultiPoly { ctx, nvars: self.nvars, terms }
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: Fe) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.ctx.clone(), self.nvars);
        }
        let ctx = self.ctx.clone();
        let terms = self
            .terms
            .iter()
            .map(|(m, &v)| (m.clone(), ctx.mul(v, c)))
            .collect();
        MultiPoly { ctx, nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.mul_budgeted(other, &mut Budget::unlimited())
    }

    pub fn mul_budgeted(&self, other: &MultiPoly, budget: &mut Budget) -> Result<MultiPoly> {
        self.check_compat(other)?;
        budget.charge(self.terms.len() as u64 * other.terms.len() as u64)?;
        let ctx = self.ctx.clone();
        let mut out = MultiPoly::zero(ctx.clone(), self.nvars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let m = Monomial(
                    ma.0.iter().zip(&mb.0).map(|(&a, &b)| a + b).collect(),
                );
                out.insert_add(m, ctx.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<MultiPoly> {
        let mut acc = MultiPoly::one(self.ctx.clone(), self.nvars);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Normal form modulo the Frobenius power `m^[p^e]`: every monomial with
    /// some exponent `>= p^e` is deleted.  For `e = 0` the ideal is `m`
    /// itself, so only degree-0 terms survive.
    pub fn reduce_mod_frobenius_power(&self, e: u64) -> MultiPoly {
        let threshold = self.ctx.p().pow(e as u32);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0.iter().all(|&x| (x as u64) < threshold))
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        MultiPoly { ctx: self.ctx.clone(), nvars: self.nvars, terms }
    }

    pub fn in_frobenius_power(&self, e: u64) -> bool {
        self.reduce_mod_frobenius_power(e).is_zero()
    }

    /// `f^N` reduced modulo `m^[p^e]`, by square-and-multiply with reduction
    /// after every product.
    pub fn truncated_power(&self, n: u64, e: u64, budget: &mut Budget) -> Result<MultiPoly> {
        let mut acc = MultiPoly::one(self.ctx.clone(), self.nvars).reduce_mod_frobenius_power(e);
        let mut base = self.reduce_mod_frobenius_power(e);
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_budgeted(&base, budget)?.reduce_mod_frobenius_power(e);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_budgeted(&base, budget)?.reduce_mod_frobenius_power(e);
            }
        }
        Ok(acc)
    }

    /// Substitute `x_i <- images[i]`.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.nvars {
            return Err(Error::Domain("wrong number of substitution images".into()));
        }
        let out_vars = images
            .first()
            .map(|p| p.nvars)
            .unwrap_or(self.nvars);
        let mut out = MultiPoly::zero(
            images.first().map(|p| p.ctx.clone()).unwrap_or(self.ctx.clone()),
            out_vars,
        );
        for (m, &c) in &self.terms {
            let mut term = MultiPoly::constant(out.ctx.clone(), out_vars, c);
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[i])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// The ring automorphism `x_i <- sum_j g[i][j] x_j` for invertible `g`.
    pub fn apply_linear_change(&self, g: &Mat) -> Result<MultiPoly> {
        if g.rows() != self.nvars || g.cols() != self.nvars {
            return Err(Error::Domain("coordinate change has wrong size".into()));
        }
        if !g.is_invertible() {
            return Err(Error::Domain("coordinate change is singular".into()));
        }
        let images: Vec<MultiPoly> = (0..self.nvars)
            .map(|i| {
                let mut l = MultiPoly::zero(self.ctx.clone(), self.nvars);
                for j in 0..self.nvars {
                    let c = g.get(i, j);
                    if !c.is_zero() {
                        let mut exps = vec![0; self.nvars];
                        exps[j] = 1;
                        l.insert_add(Monomial(exps), c);
                    }
                }
                l
            })
            .collect();
        self.substitute(&images)
    }

    /// Image of `f` in `k[x]/<L>`, reindexed over `nvars - 1` variables.
    /// The variable with the largest-index nonzero coefficient of `L` is
    /// eliminated by solving `L = 0` for it.
    pub fn quotient_by_linear_form(&self, l: &[Fe]) -> Result<MultiPoly> {
        if l.len() != self.nvars {
            return Err(Error::Domain("linear form has wrong length".into()));
        }
        let pivot = match l.iter().rposition(|c| !c.is_zero()) {
            Some(p) => p,
            None => return Err(Error::Domain("linear form is zero".into())),
        };
        let ctx = self.ctx.clone();
        let pivot_inv = ctx.inv(l[pivot])?;
        let out_vars = self.nvars - 1;
        // x_pivot <- -(1/c_pivot) * sum_{j != pivot} c_j x_j, other variables
        // keep their relative order
        let mut images = Vec::with_capacity(self.nvars);
        let reindex = |j: usize| if j < pivot { j } else { j - 1 };
        for i in 0..self.nvars {
            if i == pivot {
                let mut img = MultiPoly::zero(ctx.clone(), out_vars);
                for j in 0..self.nvars {
                    if j == pivot || l[j].is_zero() {
                        continue;
                    }
                    let c = ctx.neg(ctx.mul(l[j], pivot_inv));
                    let mut exps = vec![0; out_vars];
                    exps[reindex(j)] = 1;
                    img.insert_add(Monomial(exps), c);
                }
                images.push(img);
            } else {
                images.push(MultiPoly::var(ctx.clone(), out_vars, reindex(i)));
            }
        }
        self.substitute(&images)
    }

    pub fn partial_derivative(&self, i: usize) -> MultiPoly {
        assert!(i < self.nvars);
        let ctx = self.ctx.clone();
        let mut out = MultiPoly::zero(ctx.clone(), self.nvars);
        for (m, &c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut scaled = Fe::ZERO;
            for _ in 0..(e as u64 % ctx.p()) {
                scaled = ctx.add(scaled, c);
            }
            if scaled.is_zero() {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.insert_add(Monomial(exps), scaled);
        }
        out
    }

    pub fn eval(&self, point: &[Fe]) -> Fe {
        assert_eq!(point.len(), self.nvars);
        let ctx = &self.ctx;
        let mut acc = Fe::ZERO;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.0.iter().enumerate() {
                t = ctx.mul(t, ctx.pow(point[i], e as u64));
            }
            acc = ctx.add(acc, t);
        }
        acc
    }

    pub fn lift(&self, emb: &Embedding) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| (m.clone(), emb.apply(c)))
            .collect();
        MultiPoly { ctx: emb.to.clone(), nvars: self.nvars, terms }
    }

    // -- reducedness ---------------------------------------------------------

    /// Probabilistic squarefreeness test via random plane sections.
    ///
    /// A single squarefree section certifies reducedness exactly (a repeated
    /// factor of `f` restricts to a repeated factor on every plane); the
    /// negative verdict is probabilistic, reached only when every sampled
    /// section exhibits a repeated factor.
    pub fn is_reduced(&self, trials: u32, seed: u64) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::Domain("reducedness of the zero polynomial".into()));
        }
        let d = match self.homogeneous_degree() {
            Some(d) => d,
            None => return Err(Error::Domain("reducedness test needs a homogeneous form".into())),
        };
        if d == 0 {
            return Ok(true);
        }
        if self.nvars == 1 {
            return Ok(d == 1);
        }
        if self.nvars == 2 {
            return Ok(binary_form_squarefree(self));
        }
        // extend so sampling has room to be "general"
        let want = 4 * d as u64 * trials as u64;
        let mut f = self.clone();
        while f.ctx.order() < want && f.ctx.k() * 2 <= crate::uni::MAX_SEARCH_DEGREE {
            let (_, emb) = f.ctx.extend(2)?;
            f = f.lift(&emb);
        }
        let ctx = f.ctx.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut clean = false;
        let mut degenerate = 0u32;
        for _ in 0..trials {
            // sample a rank-2 plane
            let (a, b) = loop {
                let a: Vec<Fe> = (0..f.nvars).map(|_| Fe(rng.gen_range(0..ctx.order()))).collect();
                let b: Vec<Fe> = (0..f.nvars).map(|_| Fe(rng.gen_range(0..ctx.order()))).collect();
                let m = Mat::from_rows(ctx.clone(), vec![a.clone(), b.clone()])?;
                if m.rank() == 2 {
                    break (a, b);
                }
            };
            let images: Vec<MultiPoly> = (0..f.nvars)
                .map(|i| {
                    let mut img = MultiPoly::zero(ctx.clone(), 2);
                    img.insert_add(Monomial(vec![1, 0]), a[i]);
                    img.insert_add(Monomial(vec![0, 1]), b[i]);
                    img
                })
                .collect();
            let section = f.substitute(&images)?;
            if section.is_zero() {
                degenerate += 1;
                continue;
            }
            if binary_form_squarefree(&section) {
                clean = true;
                break;
            }
        }
        let _ = degenerate;
        Ok(clean)
    }

    // -- text codec ----------------------------------------------------------

    /// Parse the term grammar `c*x0^3*x1 + ...`.  Coefficients are plain
    /// integers (prime subfield) or bracketed lists `[c0,c1,...]`.
    pub fn parse(ctx: Arc<FieldCtx>, text: &str, nvars: Option<usize>) -> Result<MultiPoly> {
        let tokens = split_terms(text)?;
        // first pass to find the variable count
        let mut max_var: Option<usize> = None;
        let mut parsed_terms = Vec::new();
        for (negated, term) in tokens {
            let pt = parse_term(&ctx, &term)?;
            for &(v, _) in &pt.1 {
                max_var = Some(max_var.map_or(v, |m| m.max(v)));
            }
            parsed_terms.push((negated, pt));
        }
        let inferred = max_var.map_or(0, |m| m + 1);
        let n = match nvars {
            Some(n) if n >= inferred => n,
            Some(n) => {
                return Err(Error::Malformed(format!(
                    "polynomial mentions x{} but only {n} variables were declared",
                    inferred - 1
                )))
            }
            None => inferred.max(1),
        };
        let mut out = MultiPoly::zero(ctx.clone(), n);
        for (negated, (coeff, vars)) in parsed_terms {
            let mut exps = vec![0u32; n];
            for (v, e) in vars {
                exps[v] += e;
            }
            let c = if negated { ctx.neg(coeff) } else { coeff };
            out.insert_add(Monomial(exps), c);
        }
        Ok(out)
    }
}

fn split_terms(text: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0u32;
    let mut negated = false;
    for ch in text.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Malformed("unbalanced brackets".into()))?;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push((negated, cur.trim().to_string()));
                } else if ch == '+' && !out.is_empty() {
                    return Err(Error::Malformed("empty term".into()));
                }
                cur = String::new();
                negated = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Malformed("unbalanced brackets".into()));
    }
    if !cur.trim().is_empty() {
        out.push((negated, cur.trim().to_string()));
    }
    Ok(out)
}

type ParsedTerm = (Fe, Vec<(usize, u32)>);

fn parse_term(ctx: &Arc<FieldCtx>, term: &str) -> Result<ParsedTerm> {
    let mut coeff = ctx.one();
    let mut vars = Vec::new();
    // split on '*' outside brackets
    let mut factors = Vec::new();
    let mut cur = String::new();
    let mut depth = 0u32;
    for ch in term.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                cur.push(ch);
            }
            '*' if depth == 0 => {
                factors.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        factors.push(cur.trim().to_string());
    }
    for fac in factors {
        if let Some(rest) = fac.strip_prefix('x') {
            let (v_str, e_str) = match rest.split_once('^') {
                Some((v, e)) => (v, Some(e)),
                None => (rest, None),
            };
            let v: usize = v_str
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad variable {fac:?}")))?;
            let e: u32 = match e_str {
                Some(e) => e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Malformed(format!("bad exponent in {fac:?}")))?,
                None => 1,
            };
            vars.push((v, e));
        } else {
            let c = ctx.parse_elem(&fac)?;
            coeff = ctx.mul(coeff, c);
        }
    }
    Ok((coeff, vars))
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut pieces: Vec<String> = Vec::new();
            let is_const = m.0.iter().all(|&e| e == 0);
            if c != self.ctx.one() || is_const {
                pieces.push(self.ctx.format_elem(c));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => pieces.push(format!("x{i}")),
                    _ => pieces.push(format!("x{i}^{e}")),
                }
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}

/// Squarefreeness of a nonzero homogeneous binary form, exactly.
pub fn binary_form_squarefree(g: &MultiPoly) -> bool {
    assert_eq!(g.nvars(), 2);
    let ctx = g.ctx().clone();
    let d = g.homogeneous_degree().expect("binary form must be homogeneous");
    // g = sum c_j s^(d-j) t^j; collect u(t) = g(1, t)
    let mut coeffs = vec![Fe::ZERO; d as usize + 1];
    for (m, c) in g.terms() {
        coeffs[m.0[1] as usize] = c;
    }
    let jmin = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let jmax = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
    if jmin > 1 || (d as usize - jmax) > 1 {
        return false; // repeated t or s factor
    }
    let w = UniPoly::new(ctx, coeffs[jmin..=jmax].to_vec());
    if w.is_constant() {
        return true;
    }
    let dw = w.derivative();
    if dw.is_zero() {
        return false; // p-th power content
    }
    w.gcd(&dw).is_constant()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FieldCtx> {
        FieldCtx::new(2, 2).unwrap()
    }

    #[test]
    fn parse_display_round_trip() {
        let ctx = f4();
        let f = MultiPoly::parse(ctx.clone(), "x0^3 + x1^3 + x2^3", None).unwrap();
        assert_eq!(f.nvars(), 3);
        assert_eq!(f.num_terms(), 3);
        assert_eq!(format!("{f}"), "x0^3 + x1^3 + x2^3");
        let g = MultiPoly::parse(ctx.clone(), &format!("{f}"), Some(3)).unwrap();
        assert_eq!(f, g);
        let h = MultiPoly::parse(ctx, "[0,1]*x0^2*x1 + x1", Some(2)).unwrap();
        assert_eq!(h.num_terms(), 2);
        let round = MultiPoly::parse(h.ctx().clone(), &format!("{h}"), Some(2)).unwrap();
        assert_eq!(h, round);
    }

    #[test]
    fn parse_handles_signs_and_coefficients() {
        let ctx = FieldCtx::new(3, 1).unwrap();
        let f = MultiPoly::parse(ctx.clone(), "x0^2 - x1^2", Some(2)).unwrap();
        let m = Monomial(vec![0, 2]);
        assert_eq!(f.coeff(&m), ctx.from_prime(2));
        let g = MultiPoly::parse(ctx.clone(), "2*x0 + x0", Some(1)).unwrap();
        assert_eq!(g, MultiPoly::zero(ctx, 1));
    }

    #[test]
    fn truncated_power_matches_plain_power() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let f = MultiPoly::parse(ctx, "x0^2 + x0*x1 + x1^2", Some(2)).unwrap();
        let mut budget = Budget::unlimited();
        for n in 0..6u32 {
            let full = f.pow(n).unwrap().reduce_mod_frobenius_power(3);
            let trunc = f.truncated_power(n as u64, 3, &mut budget).unwrap();
            assert_eq!(full, trunc);
        }
    }

    #[test]
    fn frobenius_power_membership() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let f = MultiPoly::parse(ctx.clone(), "x0^2*x1 + x1^2*x0", Some(2)).unwrap();
        assert!(f.in_frobenius_power(1));
        assert!(!f.in_frobenius_power(2));
        // e = 0: only degree-0 terms survive reduction mod m itself
        let g = MultiPoly::parse(ctx.clone(), "1 + x0", Some(2)).unwrap();
        let r = g.reduce_mod_frobenius_power(0);
        assert_eq!(r, MultiPoly::one(ctx.clone(), 2));
        let one = MultiPoly::one(ctx, 2);
        let mut b = Budget::unlimited();
        assert_eq!(one.truncated_power(0, 0, &mut b).unwrap().num_terms(), 1);
    }

    #[test]
    fn linear_change_is_action() {
        let ctx = FieldCtx::new(3, 1).unwrap();
        let f = MultiPoly::parse(ctx.clone(), "x0^3 + x0*x1^2", Some(2)).unwrap();
        let g1 = Mat::from_rows(
            ctx.clone(),
            vec![
                vec![ctx.from_prime(1), ctx.from_prime(1)],
                vec![ctx.from_prime(0), ctx.from_prime(1)],
            ],
        )
        .unwrap();
        let g2 = Mat::from_rows(
            ctx.clone(),
            vec![
                vec![ctx.from_prime(2), ctx.from_prime(0)],
                vec![ctx.from_prime(1), ctx.from_prime(1)],
            ],
        )
        .unwrap();
        let lhs = f.apply_linear_change(&g1).unwrap().apply_linear_change(&g2).unwrap();
        // substituting g1 then g2 composes to the product g1 * g2
        let rhs = f.apply_linear_change(&g1.mul(&g2)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn quotient_by_linear_form_eliminates_pivot() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let one = ctx.one();
        let f = MultiPoly::parse(ctx.clone(), "x0*x1 + x2^2", Some(3)).unwrap();
        // L = x0 + x2 eliminates x2, so x2 <- x0 and f |-> x0*x1 + x0^2
        let q = f.quotient_by_linear_form(&[one, Fe::ZERO, one]).unwrap();
        let expect = MultiPoly::parse(ctx, "x0*x1 + x0^2", Some(2)).unwrap();
        assert_eq!(q, expect);
    }

    #[test]
    fn partial_derivative_and_eval() {
        let ctx = FieldCtx::new(5, 1).unwrap();
        let f = MultiPoly::parse(ctx.clone(), "x0^3*x1 + 2*x1^2", Some(2)).unwrap();
        let dx0 = f.partial_derivative(0);
        let expect = MultiPoly::parse(ctx.clone(), "3*x0^2*x1", Some(2)).unwrap();
        assert_eq!(dx0, expect);
        let v = f.eval(&[ctx.from_prime(2), ctx.from_prime(3)]);
        // 8*3 + 2*9 = 42 = 2 mod 5
        assert_eq!(v, ctx.from_prime(2));
    }

    #[test]
    fn binary_squarefree_detects_squares() {
        let ctx = FieldCtx::new(3, 1).unwrap();
        let sq = MultiPoly::parse(ctx.clone(), "x0^2 + 2*x0*x1 + x1^2", Some(2)).unwrap();
        assert!(!binary_form_squarefree(&sq)); // (x0+x1)^2
        let sf = MultiPoly::parse(ctx.clone(), "x0^2 + x1^2", Some(2)).unwrap();
        assert!(binary_form_squarefree(&sf)); // no repeated root over closure
        let cube = MultiPoly::parse(ctx, "x0^3 + x1^3", Some(2)).unwrap();
        assert!(!binary_form_squarefree(&cube)); // = (x0+x1)^3 in char 3
    }

    #[test]
    fn is_reduced_basics() {
        let ctx = f4();
        let diag = MultiPoly::parse(ctx.clone(), "x0^3 + x1^3 + x2^3", Some(3)).unwrap();
        assert!(diag.is_reduced(8, 7).unwrap());
        let sq = MultiPoly::parse(ctx.clone(), "x0^2*x2^2 + x1^4", Some(3)).unwrap();
        // (x0*x2 + x1^2)^2 in char 2
        assert!(!sq.is_reduced(8, 7).unwrap());
        let line = MultiPoly::parse(ctx, "x0^2", Some(1)).unwrap();
        assert!(!line.is_reduced(8, 7).unwrap());
    }

    #[test]
    fn reduced_quadric_with_bad_tangent_sections() {
        // x0*x2 + x1^2 is smooth hence reduced, even though sections by
        // tangent planes degenerate; one clean sample must still certify it
        let ctx = FieldCtx::new(5, 1).unwrap();
        let f = MultiPoly::parse(ctx, "x0*x2 + x1^2", Some(3)).unwrap();
        assert!(f.is_reduced(8, 11).unwrap());
    }
}
