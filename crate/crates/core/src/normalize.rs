//! Constructive normal forms for Frobenius forms: the sparse form with a
//! replayable change-of-coordinates certificate, the index-sequence lemma
//! that drives the column-clearing chains, and full-rank diagonalization
//! with an exhaustive root search standing in for the Nullstellensatz.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};
use crate::frobform::{CoordChange, FrobeniusForm};
use crate::matrix::Mat;
use crate::uni::{UniPoly, MAX_SEARCH_DEGREE};

/// One elementary change of coordinates in the sense of the row/column
/// operation dictionary: a variable swap, a scaling, or a shear
/// `x_i <- x_i + lambda x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElemOp {
    Swap { i: usize, j: usize },
    Scale { i: usize, lambda: Fe },
    Shear { i: usize, j: usize, lambda: Fe },
}

impl ElemOp {
    pub fn to_matrix(&self, ctx: &Arc<FieldCtx>, n: usize) -> Mat {
        let mut g = Mat::identity(ctx.clone(), n);
        match *self {
            ElemOp::Swap { i, j } => {
                g.set(i, i, Fe::ZERO);
                g.set(j, j, Fe::ZERO);
                g.set(i, j, ctx.one());
                g.set(j, i, ctx.one());
            }
            ElemOp::Scale { i, lambda } => {
                g.set(i, i, lambda);
            }
            ElemOp::Shear { i, j, lambda } => {
                g.set(i, j, lambda);
            }
        }
        g
    }

    pub fn lift(&self, emb: &Embedding) -> ElemOp {
        match *self {
            ElemOp::Swap { i, j } => ElemOp::Swap { i, j },
            ElemOp::Scale { i, lambda } => ElemOp::Scale { i, lambda: emb.apply(lambda) },
            ElemOp::Shear { i, j, lambda } => ElemOp::Shear { i, j, lambda: emb.apply(lambda) },
        }
    }

    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> ElemOp {
        match *self {
            ElemOp::Swap { i, j } => ElemOp::Swap { i: f(i), j: f(j) },
            ElemOp::Scale { i, lambda } => ElemOp::Scale { i: f(i), lambda },
            ElemOp::Shear { i, j, lambda } => ElemOp::Shear { i: f(i), j: f(j), lambda },
        }
    }
}

/// Factor an invertible matrix into elementary operations so that the ops
/// applied in order compose (as `g_1 * g_2 * ...`) to the given matrix.
pub fn decompose_into_elementary(g: &Mat) -> Result<Vec<ElemOp>> {
    let ctx = g.ctx().clone();
    let n = g.rows();
    if !g.is_invertible() {
        return Err(Error::Domain("cannot decompose a singular matrix".into()));
    }
    let mut m = g.clone();
    let mut ops: Vec<ElemOp> = Vec::new();
    // Gauss-Jordan; each recorded op is the inverse of the row operation
    // performed, so that g = op_1 * op_2 * ... * op_k.
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m.get(r, col).is_zero())
            .ok_or_else(|| Error::Internal("invertible matrix lost its pivot".into()))?;
        if pivot != col {
            for c in 0..n {
                let (a, b) = (m.get(col, c), m.get(pivot, c));
                m.set(col, c, b);
                m.set(pivot, c, a);
            }
            ops.push(ElemOp::Swap { i: col, j: pivot });
        }
        let d = m.get(col, col);
        if d != ctx.one() {
            let dinv = ctx.inv(d)?;
            for c in 0..n {
                m.set(col, c, ctx.mul(m.get(col, c), dinv));
            }
            ops.push(ElemOp::Scale { i: col, lambda: d });
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m.get(row, col);
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = ctx.sub(m.get(row, c), ctx.mul(f, m.get(col, c)));
                m.set(row, c, v);
            }
            ops.push(ElemOp::Shear { i: row, j: col, lambda: f });
        }
    }
    // sanity: the recorded ops multiply back to g
    let mut prod = Mat::identity(ctx.clone(), n);
    for op in &ops {
        prod = prod.mul(&op.to_matrix(&ctx, n));
    }
    if prod != *g {
        return Err(Error::Internal("elementary factorization does not reproduce g".into()));
    }
    Ok(ops)
}

/// Conditions (1)-(3) of the sparse form: rows beyond the rank are zero and
/// the first `r` rows carry exactly one entry each, equal to 1, in strictly
/// decreasing column positions.
pub fn is_sparse(a: &Mat) -> bool {
    let n = a.rows();
    let ctx = a.ctx();
    let mut cols: Vec<usize> = Vec::new();
    let mut seen_zero_row = false;
    for i in 0..n {
        let nz: Vec<usize> = (0..n).filter(|&j| !a.get(i, j).is_zero()).collect();
        match nz.as_slice() {
            [] => seen_zero_row = true,
            [j] => {
                if seen_zero_row {
                    return false; // a nonzero row after the zero block
                }
                if a.get(i, *j) != ctx.one() {
                    return false;
                }
                if let Some(&prev) = cols.last() {
                    if *j >= prev {
                        return false;
                    }
                }
                cols.push(*j);
            }
            _ => return false,
        }
    }
    true
}

/// The unique index sequence of the sequence lemma, 0-indexed: starting from
/// `i1` in `[r-1, n-2]`, follow the unique nonzero entry of each successive
/// column until a zero column terminates the walk.
pub fn lemma75_sequence(a: &Mat, r: usize, i1: usize) -> Result<Vec<usize>> {
    let n = a.rows();
    if r < 2 || i1 + 1 < r || i1 + 2 > n {
        return Err(Error::Malformed(format!(
            "sequence start {i1} out of range [{}, {}]",
            r - 1,
            n.saturating_sub(2)
        )));
    }
    let mut seq = vec![i1];
    loop {
        let c = *seq.last().unwrap();
        let nz: Vec<usize> = (0..n).filter(|&row| !a.get(row, c).is_zero()).collect();
        match nz.as_slice() {
            [] => return Ok(seq),
            [u] => {
                let u = *u;
                if u < 1 || u + 2 > r {
                    return Err(Error::Malformed(format!(
                        "sequence index {u} escapes the middle band [1, {}]",
                        r - 2
                    )));
                }
                if seq.contains(&u) {
                    return Err(Error::Malformed(format!(
                        "sequence revisits index {u}; input is not in the required block shape"
                    )));
                }
                if seq.len() > r {
                    return Err(Error::Internal("sequence exceeded the rank bound".into()));
                }
                seq.push(u);
            }
            _ => {
                return Err(Error::Malformed(format!(
                    "column {c} has several nonzero entries; input is not in the required block shape"
                )))
            }
        }
    }
}

/// A sparse normal form together with a replayable witness: the sparse
/// matrix equals `(g^[q])^T * input * g` over the working field, with `g`
/// the ordered product of the elementary `ops`.
#[derive(Debug, Clone)]
pub struct SparseCertificate {
    pub base_ctx: Arc<FieldCtx>,
    pub ctx: Arc<FieldCtx>,
    /// Base field into working field (identity when no extension occurred).
    pub emb: Embedding,
    pub e: u64,
    pub n: usize,
    pub input: Mat,
    pub sparse: Mat,
    pub g: Mat,
    pub ops: Vec<ElemOp>,
}

impl SparseCertificate {
    /// Replay the certificate from scratch and check every claim it makes.
    pub fn verify(&self) -> Result<()> {
        let lifted_input = self.input.lift(&self.emb);
        let form = FrobeniusForm::new(self.ctx.clone(), self.e, lifted_input)?;
        // product of ops equals g
        let mut prod = Mat::identity(self.ctx.clone(), self.n);
        for op in &self.ops {
            prod = prod.mul(&op.to_matrix(&self.ctx, self.n));
        }
        if prod != self.g {
            return Err(Error::Internal("ops do not multiply to the witness g".into()));
        }
        // replay through the elementary interface
        let mut cur = form.clone();
        for op in &self.ops {
            cur = match *op {
                ElemOp::Swap { i, j } => cur.elementary_swap(i, j),
                ElemOp::Scale { i, lambda } => cur.elementary_scale(i, lambda)?,
                ElemOp::Shear { i, j, lambda } => cur.elementary_shear(i, j, lambda)?,
            };
        }
        if *cur.matrix() != self.sparse {
            return Err(Error::Internal("replayed ops do not reach the sparse matrix".into()));
        }
        // direct congruence check
        let acted = form.act(&CoordChange::new(self.g.clone())?)?;
        if *acted.matrix() != self.sparse {
            return Err(Error::Internal("(g^[q])^T A g differs from the sparse matrix".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// working state

struct Work {
    base_ctx: Arc<FieldCtx>,
    input: Mat,
    emb: Embedding,
    form: FrobeniusForm,
    ops: Vec<ElemOp>,
}

impl Work {
    fn new(form: &FrobeniusForm) -> Work {
        Work {
            base_ctx: form.ctx().clone(),
            input: form.matrix().clone(),
            emb: Embedding::identity(form.ctx().clone()),
            form: form.clone(),
            ops: Vec::new(),
        }
    }

    fn ctx(&self) -> &Arc<FieldCtx> {
        self.form.ctx()
    }

    fn mat(&self) -> &Mat {
        self.form.matrix()
    }

    fn n(&self) -> usize {
        self.form.n()
    }

    fn apply(&mut self, op: ElemOp) -> Result<()> {
        self.form = match op {
            ElemOp::Swap { i, j } => self.form.elementary_swap(i, j),
            ElemOp::Scale { i, lambda } => self.form.elementary_scale(i, lambda)?,
            ElemOp::Shear { i, j, lambda } => self.form.elementary_shear(i, j, lambda)?,
        };
        self.ops.push(op);
        Ok(())
    }

    fn apply_general(&mut self, g: &Mat) -> Result<()> {
        for op in decompose_into_elementary(g)? {
            self.apply(op)?;
        }
        Ok(())
    }

    fn lift_through(&mut self, emb: &Embedding) -> Result<()> {
        if emb.from == emb.to {
            return Ok(());
        }
        if *emb.from != **self.ctx() {
            return Err(Error::Internal("embedding does not start at the working field".into()));
        }
        self.form = self.form.lift(emb);
        self.ops = self.ops.iter().map(|op| op.lift(emb)).collect();
        self.emb = self.emb.then(emb);
        Ok(())
    }

    fn into_certificate(self) -> Result<SparseCertificate> {
        let n = self.n();
        let ctx = self.ctx().clone();
        let mut g = Mat::identity(ctx.clone(), n);
        for op in &self.ops {
            g = g.mul(&op.to_matrix(&ctx, n));
        }
        let cert = SparseCertificate {
            base_ctx: self.base_ctx,
            ctx,
            emb: self.emb,
            e: self.form.e(),
            n,
            input: self.input,
            sparse: self.form.matrix().clone(),
            g,
            ops: self.ops,
        };
        cert.verify()?;
        Ok(cert)
    }
}

fn dump(a: &Mat) -> String {
    let ctx = a.ctx();
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| ctx.format_elem(a.get(i, j)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn expect(cond: bool, msg: &str, a: &Mat) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Internal(format!("{msg}; matrix [{}]", dump(a))))
    }
}

fn sub_matrix(a: &Mat, idx: &[usize]) -> Mat {
    let mut s = Mat::zero(a.ctx().clone(), idx.len(), idx.len());
    for (si, &i) in idx.iter().enumerate() {
        for (sj, &j) in idx.iter().enumerate() {
            s.set(si, sj, a.get(i, j));
        }
    }
    s
}

/// Embed a block matrix into the identity on `n` variables at the given
/// index positions.
fn embed_matrix(g: &Mat, n: usize, idx: &[usize]) -> Mat {
    let mut big = Mat::identity(g.ctx().clone(), n);
    for (si, &i) in idx.iter().enumerate() {
        big.set(i, i, Fe::ZERO);
        for (sj, &j) in idx.iter().enumerate() {
            big.set(i, j, g.get(si, sj));
        }
    }
    big
}

fn replay_certificate(w: &mut Work, cert: &SparseCertificate, idx: &[usize]) -> Result<()> {
    if *cert.base_ctx != **w.ctx() {
        return Err(Error::Internal("sub-certificate starts over the wrong field".into()));
    }
    w.lift_through(&cert.emb)?;
    for op in &cert.ops {
        w.apply(op.map_indices(|i| idx[i]))?;
    }
    expect(
        sub_matrix(w.mat(), idx) == cert.sparse,
        "replaying a sub-certificate did not reproduce its sparse matrix",
        w.mat(),
    )
}

// ---------------------------------------------------------------------------
// full-rank diagonalization

/// Evaluate the final-column system at `y`; returns whether all `F_j`
/// vanish.  The identity `sum_j y_j^q F_j = 0` is checked on every call.
fn final_column_system_ok(a: &Mat, y: &[Fe], q: u64) -> Result<bool> {
    let ctx = a.ctx();
    let kk = y.len();
    let yq: Vec<Fe> = y.iter().map(|&v| ctx.pow(v, q)).collect();
    let yq2: Vec<Fe> = y.iter().map(|&v| ctx.pow(v, q * q)).collect();
    let mut ann = Fe::ZERO;
    for l in 0..kk {
        for k in 0..kk {
            ann = ctx.add(ann, ctx.mul(a.get(l, k), ctx.mul(yq[l], y[k])));
        }
    }
    let annq1 = ctx.pow(ann, q - 1);
    let mut all_zero = true;
    let mut combo = Fe::ZERO;
    for j in 0..kk {
        let mut lin = Fe::ZERO;
        for k in 0..kk {
            lin = ctx.add(lin, ctx.mul(a.get(j, k), y[k]));
        }
        let mut tail = Fe::ZERO;
        for l in 0..kk {
            tail = ctx.add(tail, ctx.mul(ctx.pow(a.get(l, j), q), yq2[l]));
        }
        let fj = ctx.sub(ctx.mul(annq1, lin), tail);
        if !fj.is_zero() {
            all_zero = false;
        }
        combo = ctx.add(combo, ctx.mul(yq[j], fj));
    }
    if !combo.is_zero() {
        return Err(Error::Internal(
            "final-column residuals violate the relation sum y_j^q F_j = 0".into(),
        ));
    }
    Ok(all_zero)
}

/// Search all projective points of the current field for a solution of the
/// final-column system.  Deterministic: first hit in enumeration order.
fn search_final_column(a: &Mat, q: u64) -> Result<Option<Vec<Fe>>> {
    let ctx = a.ctx();
    let kk = a.rows();
    let order = ctx.order();
    for lead in 0..kk {
        // y[lead] = 1, earlier coordinates 0, later coordinates free
        let free = kk - lead - 1;
        let mut counter = vec![0u64; free];
        loop {
            let mut y = vec![Fe::ZERO; kk];
            y[lead] = ctx.one();
            for (t, &c) in counter.iter().enumerate() {
                y[lead + 1 + t] = Fe(c);
            }
            if final_column_system_ok(a, &y, q)? {
                return Ok(Some(y));
            }
            // odometer, last coordinate fastest
            let mut t = free;
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
    }
    Ok(None)
}

/// Find a nonzero final column for a full-rank form, extending the field
/// (smallest sufficient degree within the cap) until the system has a
/// solution.
pub fn fullrank_final_column(f: &FrobeniusForm) -> Result<(Vec<Fe>, Embedding)> {
    if f.rank() != f.n() {
        return Err(Error::Domain("final-column search needs a full-rank form".into()));
    }
    let q = f.q();
    // enumeration-cost guard: projective points of the candidate field
    let affordable = |ctx: &Arc<FieldCtx>| -> bool {
        let points = (ctx.order() as u128).pow(f.n().saturating_sub(1) as u32);
        points <= 50_000_000
    };
    if !affordable(f.ctx()) {
        return Err(Error::Capacity(
            "final-column enumeration exceeds the search budget".into(),
        ));
    }
    if let Some(y) = search_final_column(f.matrix(), q)? {
        return Ok((y, Embedding::identity(f.ctx().clone())));
    }
    let k = f.ctx().k();
    for d in 2..=MAX_SEARCH_DEGREE / k {
        let (big, emb) = f.ctx().extend(d)?;
        if !affordable(&big) {
            return Err(Error::Capacity(
                "final-column enumeration exceeds the search budget".into(),
            ));
        }
        let a = f.matrix().lift(&emb);
        if let Some(y) = search_final_column(&a, q)? {
            return Ok((y, emb));
        }
    }
    Err(Error::Capacity(format!(
        "no final column within extension degree {MAX_SEARCH_DEGREE} over F_{}",
        f.ctx().p()
    )))
}

/// Does the leading `kk` block satisfy the splitting condition
/// `a_{i,kk-1} * a_{kk-1,kk-1}^(q-1) = a_{kk-1,i}^q` with nonzero corner?
fn corner_condition_holds(a: &Mat, kk: usize, q: u64) -> bool {
    let ctx = a.ctx();
    let corner = a.get(kk - 1, kk - 1);
    if corner.is_zero() {
        return false;
    }
    let cq1 = ctx.pow(corner, q - 1);
    (0..kk - 1).all(|i| {
        ctx.mul(a.get(i, kk - 1), cq1) == ctx.pow(a.get(kk - 1, i), q)
    })
}

/// Take the `m`-th root of the entry produced by `fetch`, extending the
/// working field by the smallest sufficient degree within the cap.
fn root_with_extension(
    w: &mut Work,
    m: u64,
    fetch: impl Fn(&Work) -> Fe,
) -> Result<Fe> {
    let a = fetch(w);
    if let Some(c) = w.ctx().nth_root(a, m)? {
        return Ok(c);
    }
    let k = w.ctx().k();
    for d in 2..=MAX_SEARCH_DEGREE / k {
        let (big, emb) = w.ctx().extend(d)?;
        if big.nth_root(emb.apply(a), m)?.is_some() {
            w.lift_through(&emb)?;
            let a2 = fetch(w);
            return w
                .ctx()
                .nth_root(a2, m)?
                .ok_or_else(|| Error::Internal("root vanished after lifting".into()));
        }
    }
    Err(Error::Capacity(format!(
        "no {m}-th root within extension degree {MAX_SEARCH_DEGREE} over F_{}",
        w.ctx().p()
    )))
}

/// A 2x2 change of coordinates turning `x^{q+1} + y^{q+1}` into
/// `x^q y + y^q x`, computed over a sufficient extension.
fn pair_conversion_ops(w: &mut Work, i: usize, j: usize) -> Result<()> {
    let e = w.form.e();
    let q = w.form.q();
    // alpha in F_{q^2} with alpha^{q+1} = -1
    let find_alpha = |ctx: &Arc<FieldCtx>| -> Option<Fe> {
        let minus1 = ctx.neg(ctx.one());
        ctx.elements()
            .skip(1)
            .find(|&x| ctx.pow(x, q + 1) == minus1 && ctx.frobenius(x, 2 * e) == x)
    };
    let mut alpha = match find_alpha(w.ctx()) {
        Some(x) => x,
        None => {
            let k = w.ctx().k();
            let mut found = None;
            for d in 2..=MAX_SEARCH_DEGREE / k {
                let (big, emb) = w.ctx().extend(d)?;
                if let Some(x) = find_alpha(&big) {
                    w.lift_through(&emb)?;
                    found = Some(x);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::Capacity(format!(
                    "no norm -1 element within extension degree {MAX_SEARCH_DEGREE} over F_{}",
                    w.ctx().p()
                ))
            })?
        }
    };
    // beta with alpha*beta^q + alpha^q*beta = 1
    let build_beta_poly = |ctx: &Arc<FieldCtx>, alpha: Fe| -> UniPoly {
        let mut coeffs = vec![Fe::ZERO; q as usize + 1];
        coeffs[0] = ctx.neg(ctx.one());
        coeffs[1] = ctx.frobenius(alpha, e);
        coeffs[q as usize] = ctx.add(coeffs[q as usize], alpha);
        UniPoly::new(ctx.clone(), coeffs)
    };
    let beta = match build_beta_poly(w.ctx(), alpha).roots_in_field().first() {
        Some(&b) => b,
        None => {
            let k = w.ctx().k();
            let mut found = None;
            for d in 2..=MAX_SEARCH_DEGREE / k {
                let (big, emb) = w.ctx().extend(d)?;
                let lifted_alpha = emb.apply(alpha);
                if let Some(&b) = build_beta_poly(&big, lifted_alpha).roots_in_field().first() {
                    w.lift_through(&emb)?;
                    alpha = lifted_alpha;
                    found = Some(b);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::Capacity(format!(
                    "pair-conversion equation has no root within extension degree \
                     {MAX_SEARCH_DEGREE} over F_{}",
                    w.ctx().p()
                ))
            })?
        }
    };
    let ctx = w.ctx().clone();
    let alpha_q = ctx.frobenius(alpha, e);
    let delta = ctx.sub(ctx.one(), ctx.mul(alpha_q, beta));
    let mut g = Mat::identity(ctx.clone(), 2);
    g.set(0, 0, alpha);
    g.set(0, 1, beta);
    g.set(1, 0, ctx.one());
    g.set(1, 1, delta);
    let big = embed_matrix(&g, w.n(), &[i, j]);
    w.apply_general(&big)
}

fn diagonalize_into(w: &mut Work) -> Result<()> {
    let n = w.n();
    let q = w.form.q();
    expect(w.form.rank() == n, "diagonalization needs a full-rank form", w.mat())?;
    for kk in (1..=n).rev() {
        if kk >= 2 {
            // establish the splitting condition on the leading kk block
            if !corner_condition_holds(w.mat(), kk, q) {
                let idx: Vec<usize> = (0..kk).collect();
                let block = sub_matrix(w.mat(), &idx);
                let sub = FrobeniusForm::new(w.ctx().clone(), w.form.e(), block)?;
                let (y, emb) = fullrank_final_column(&sub)?;
                w.lift_through(&emb)?;
                let g = Mat::completion_with_last_columns(w.ctx().clone(), kk, &[y])?;
                w.apply_general(&embed_matrix(&g, n, &idx))?;
                expect(
                    corner_condition_holds(w.mat(), kk, q),
                    "final column did not establish the splitting condition",
                    w.mat(),
                )?;
            }
        }
        // scale the corner to 1 with a (q+1)-th root
        let c = root_with_extension(w, q + 1, |w| {
            w.ctx()
                .inv(w.mat().get(kk - 1, kk - 1))
                .expect("corner is nonzero")
        })?;
        w.apply(ElemOp::Scale { i: kk - 1, lambda: c })?;
        expect(
            w.mat().get(kk - 1, kk - 1) == w.ctx().one(),
            "corner scaling failed",
            w.mat(),
        )?;
        if kk >= 2 {
            expect(
                corner_condition_holds(w.mat(), kk, q),
                "scaling destroyed the splitting condition",
                w.mat(),
            )?;
            // x_{kk-1} <- x_{kk-1} - sum a_{kk-1,i} x_i splits off the corner
            for i in 0..kk - 1 {
                let v = w.mat().get(kk - 1, i);
                if !v.is_zero() {
                    let ctx = w.ctx().clone();
                    w.apply(ElemOp::Shear { i: kk - 1, j: i, lambda: ctx.neg(v) })?;
                }
            }
            for i in 0..kk - 1 {
                expect(
                    w.mat().get(kk - 1, i).is_zero() && w.mat().get(i, kk - 1).is_zero(),
                    "corner split left residue in the last row or column",
                    w.mat(),
                )?;
            }
        }
    }
    expect(
        *w.mat() == Mat::identity(w.ctx().clone(), n),
        "diagonalization did not reach the identity matrix",
        w.mat(),
    )?;
    // identity -> reverse permutation, one disjoint variable pair at a time
    for i in 0..n / 2 {
        pair_conversion_ops(w, i, n - 1 - i)?;
    }
    let mut rev = Mat::zero(w.ctx().clone(), n, n);
    for i in 0..n {
        rev.set(i, n - 1 - i, w.ctx().one());
    }
    expect(*w.mat() == rev, "pair conversion missed the reverse permutation", w.mat())
}

/// Diagonalize a full-rank form: certificate with the reverse permutation
/// matrix (the sparse representative of `x_1^{q+1} + ... + x_n^{q+1}`).
pub fn diagonalize_full_rank(f: &FrobeniusForm) -> Result<SparseCertificate> {
    if f.rank() != f.n() {
        return Err(Error::Domain("diagonalize_full_rank needs a full-rank form".into()));
    }
    let mut w = Work::new(f);
    diagonalize_into(&mut w)?;
    w.into_certificate()
}

// ---------------------------------------------------------------------------
// step 1 and step 2

fn col_support(a: &Mat, col: usize) -> Vec<usize> {
    (0..a.rows()).filter(|&i| !a.get(i, col).is_zero()).collect()
}

/// One whack-a-mole chain: clear one nonzero entry of column 0 without
/// changing anything else.
fn step1_chain(w: &mut Work, r: usize) -> Result<()> {
    let before = w.mat().clone();
    let support = col_support(w.mat(), 0);
    expect(support.len() >= 2, "step 1 chain needs two entries to play with", w.mat())?;
    let (c1, c2) = (support[0], support[1]);
    let s1 = lemma75_sequence(w.mat(), r, c1)?;
    let s2 = lemma75_sequence(w.mat(), r, c2)?;
    if s1.iter().any(|i| s2.contains(i)) {
        return Err(Error::Internal(format!(
            "sequence disjointness failed on [{}]",
            dump(w.mat())
        )));
    }
    // label so that the i-sequence is the shorter one
    let (iseq, jseq) = if s1.len() <= s2.len() { (&s1, &s2) } else { (&s2, &s1) };
    let m = iseq.len();
    let e = w.form.e();
    // the single unwanted entry starts in column 0, at the row targeted by
    // the first operation
    let mut pos = if m % 2 == 1 { (jseq[0], 0usize) } else { (iseq[0], 0usize) };
    for l in 1..=m {
        let (s, t) = if l % 2 == m % 2 {
            (iseq[l - 1], jseq[l - 1])
        } else {
            (jseq[l - 1], iseq[l - 1])
        };
        expect(pos.0 == t, "chain lost track of the unwanted entry", w.mat())?;
        let denom = w.mat().get(s, pos.1);
        expect(!denom.is_zero(), "chain pivot entry vanished", w.mat())?;
        let next_pos = if l < m {
            let nz = col_support(w.mat(), s);
            expect(nz.len() == 1, "chain column is not a unit column", w.mat())?;
            Some((nz[0], t))
        } else {
            expect(col_support(w.mat(), s).is_empty(), "final chain column must be zero", w.mat())?;
            None
        };
        let ctx = w.ctx().clone();
        let lambda = ctx.div(w.mat().get(pos.0, pos.1), denom)?;
        let mu = ctx.frobenius_root(ctx.neg(lambda), e);
        w.apply(ElemOp::Shear { i: s, j: t, lambda: mu })?;
        match next_pos {
            Some(p) => pos = p,
            None => break,
        }
    }
    // the proof's key property: only column 0 changed, and it lost an entry
    for i in 0..w.n() {
        for j in 1..w.n() {
            expect(
                w.mat().get(i, j) == before.get(i, j),
                "step 1 chain leaked outside column 0",
                w.mat(),
            )?;
        }
    }
    expect(
        col_support(w.mat(), 0).len() == support.len() - 1,
        "step 1 chain did not clear an entry",
        w.mat(),
    )?;
    Ok(())
}

/// Step 1: reduce column 0 to a single nonzero entry, changing nothing else.
pub fn step1_clear_column(f: &FrobeniusForm) -> Result<(FrobeniusForm, Vec<ElemOp>)> {
    let mut w = Work::new(f);
    let r = f.rank();
    while col_support(w.mat(), 0).len() > 1 {
        step1_chain(&mut w, r)?;
    }
    Ok((w.form.clone(), w.ops))
}

fn step2_into(w: &mut Work, r: usize) -> Result<()> {
    let n = w.n();
    let support = col_support(w.mat(), 0);
    expect(support.len() == 1, "step 2 needs a single entry in column 0", w.mat())?;
    let mut jj = support[0];
    expect(jj + 1 >= r && jj + 2 <= n, "step 2 entry outside the allowed band", w.mat())?;
    // scale column 0 so its entry is 1, then repair position (0, n-1)
    let v = w.mat().get(jj, 0);
    if v != w.ctx().one() {
        let ctx = w.ctx().clone();
        let c = ctx.inv(v)?;
        w.apply(ElemOp::Scale { i: 0, lambda: c })?;
        let damage = w.mat().get(0, n - 1);
        let repair = ctx.inv(damage)?;
        w.apply(ElemOp::Scale { i: n - 1, lambda: repair })?;
    }
    expect(w.mat().get(jj, 0) == w.ctx().one(), "step 2 scaling failed", w.mat())?;
    expect(w.mat().get(0, n - 1) == w.ctx().one(), "step 2 repair failed", w.mat())?;
    while jj + 1 > r {
        let s_up = lemma75_sequence(w.mat(), r, jj - 1)?;
        let s_dn = lemma75_sequence(w.mat(), r, jj)?;
        if s_up.iter().any(|i| s_dn.contains(i)) {
            return Err(Error::Internal(format!(
                "sequence disjointness failed on [{}]",
                dump(w.mat())
            )));
        }
        let m = s_up.len().min(s_dn.len());
        for l in 0..m {
            w.apply(ElemOp::Swap { i: s_up[l], j: s_dn[l] })?;
        }
        jj -= 1;
        let sup = col_support(w.mat(), 0);
        expect(
            sup == vec![jj] && w.mat().get(jj, 0) == w.ctx().one(),
            "swap chain did not move the entry up by one",
            w.mat(),
        )?;
        let middle: Vec<usize> = (1..n - 1).collect();
        expect(
            is_sparse(&sub_matrix(w.mat(), &middle)),
            "swap chain broke sparseness of the middle matrix",
            w.mat(),
        )?;
    }
    Ok(())
}

/// Step 2: move the single entry of column 0 up to row `r-1` (0-indexed)
/// and normalize it to 1, keeping the middle matrix sparse.
pub fn step2_move_to_er(f: &FrobeniusForm) -> Result<(FrobeniusForm, Vec<ElemOp>)> {
    let mut w = Work::new(f);
    let r = f.rank();
    step2_into(&mut w, r)?;
    Ok((w.form.clone(), w.ops))
}

// ---------------------------------------------------------------------------
// sparsify

fn common_kernel_vector(a: &Mat, e: u64) -> Option<Vec<Fe>> {
    // ker(A) intersect ker((A^[1/q])^T): kernel of the vertical stack
    let n = a.rows();
    let root_t = a.frobenius_root(e).transpose();
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        rows.push(a.row(i));
    }
    for i in 0..n {
        rows.push(root_t.row(i));
    }
    let stacked = Mat::from_rows(a.ctx().clone(), rows).ok()?;
    stacked.kernel_basis().into_iter().next()
}

fn sparsify_nondeg(f: &FrobeniusForm) -> Result<SparseCertificate> {
    let m = f.n();
    let r = f.rank();
    let e = f.e();
    if r == m {
        return diagonalize_full_rank(f);
    }
    let mut w = Work::new(f);
    // Janet: zero out the rows beyond the rank
    let kernel = w.mat().frobenius_root(e).transpose().kernel_basis();
    expect(kernel.len() == m - r, "singular-locus dimension mismatch", w.mat())?;
    let g = Mat::completion_with_last_columns(w.ctx().clone(), m, &kernel)?;
    w.apply_general(&g)?;
    for i in r..m {
        for j in 0..m {
            expect(w.mat().get(i, j).is_zero(), "row normalization failed", w.mat())?;
        }
    }
    // pivot: smallest row with a nonzero entry in the last column
    let pivot = (0..r).find(|&i| !w.mat().get(i, m - 1).is_zero());
    let pivot = match pivot {
        Some(p) => p,
        None => {
            return Err(Error::Internal(format!(
                "nondegenerate form with zero last column [{}]",
                dump(w.mat())
            )))
        }
    };
    if pivot != 0 {
        w.apply(ElemOp::Swap { i: 0, j: pivot })?;
    }
    let ctx = w.ctx().clone();
    let scale = ctx.frobenius_root(ctx.inv(w.mat().get(0, m - 1))?, e);
    if scale != ctx.one() {
        w.apply(ElemOp::Scale { i: 0, lambda: scale })?;
    }
    expect(w.mat().get(0, m - 1) == ctx.one(), "pivot scaling failed", w.mat())?;
    // clear the rest of the last column with row operations from row 0
    for i in 1..r {
        let v = w.mat().get(i, m - 1);
        if !v.is_zero() {
            let lambda = ctx.frobenius_root(ctx.neg(v), e);
            w.apply(ElemOp::Shear { i: 0, j: i, lambda })?;
        }
    }
    // clear the first row with column operations against column m-1
    clear_first_row(&mut w)?;
    assert_b_shape(w.mat())?;
    // recurse on the middle matrix
    if m >= 3 {
        let idx: Vec<usize> = (1..m - 1).collect();
        let b = sub_matrix(w.mat(), &idx);
        let sub = FrobeniusForm::new(w.ctx().clone(), e, b)?;
        let cert = sparsify(&sub)?;
        replay_certificate(&mut w, &cert, &idx)?;
        assert_b_shape(w.mat())?;
    }
    let idx: Vec<usize> = (1..m.max(2) - 1).collect();
    let rb = sub_matrix(w.mat(), &idx).rank();
    if rb + 1 == r {
        // Case 1: E is dependent on the middle columns
        case1_clear(&mut w, r)?;
    } else if rb + 2 == r {
        // Case 2: pre-clear the upper band, then Step 1 and Step 2
        case2_clear(&mut w, r)?;
        while col_support(w.mat(), 0).len() > 1 {
            step1_chain(&mut w, r)?;
        }
        step2_into(&mut w, r)?;
    } else {
        return Err(Error::Internal(format!(
            "middle matrix rank {rb} incompatible with rank {r} [{}]",
            dump(w.mat())
        )));
    }
    expect(is_sparse(w.mat()), "sparsify output failed the sparse check", w.mat())?;
    w.into_certificate()
}

fn clear_first_row(w: &mut Work) -> Result<()> {
    let m = w.n();
    let ctx = w.ctx().clone();
    for t in 0..m - 1 {
        let v = w.mat().get(0, t);
        if !v.is_zero() {
            w.apply(ElemOp::Shear { i: m - 1, j: t, lambda: ctx.neg(v) })?;
        }
    }
    Ok(())
}

fn assert_b_shape(a: &Mat) -> Result<()> {
    let m = a.rows();
    let ctx = a.ctx();
    for t in 0..m {
        expect(
            a.get(m - 1, t).is_zero(),
            "bottom row is not zero in the block form",
            a,
        )?;
        let want_top = if t == m - 1 { ctx.one() } else { Fe::ZERO };
        expect(a.get(0, t) == want_top, "top row is not e_n in the block form", a)?;
        let want_right = if t == 0 { ctx.one() } else { Fe::ZERO };
        expect(
            a.get(t, m - 1) == want_right,
            "last column is not e_1 in the block form",
            a,
        )?;
    }
    Ok(())
}

fn case1_clear(w: &mut Work, r: usize) -> Result<()> {
    let m = w.n();
    let idx: Vec<usize> = (1..m - 1).collect();
    let b = sub_matrix(w.mat(), &idx);
    let e_vec: Vec<Fe> = idx.iter().map(|&i| w.mat().get(i, 0)).collect();
    if e_vec.iter().all(|v| v.is_zero()) {
        return Ok(());
    }
    let ctx = w.ctx().clone();
    let neg_e: Vec<Fe> = e_vec.iter().map(|&v| ctx.neg(v)).collect();
    let lambda = b
        .solve(&neg_e)
        .ok_or_else(|| Error::Internal(format!("case 1 system inconsistent [{}]", dump(w.mat()))))?;
    for (c, &l) in lambda.iter().enumerate() {
        if !l.is_zero() {
            w.apply(ElemOp::Shear { i: idx[c], j: 0, lambda: l })?;
        }
    }
    clear_first_row(w)?;
    for i in 0..m {
        expect(
            i == 0 || w.mat().get(i, 0).is_zero(),
            "case 1 left residue in column 0",
            w.mat(),
        )?;
    }
    let _ = r;
    Ok(())
}

fn case2_clear(w: &mut Work, r: usize) -> Result<()> {
    let m = w.n();
    let ctx = w.ctx().clone();
    // rows 1..r-1 of column 0 are cleared against the unit columns of B
    for i in 1..r.max(1) - 1 {
        let v = w.mat().get(i, 0);
        if v.is_zero() {
            continue;
        }
        let c = (1..m - 1)
            .find(|&c| w.mat().get(i, c) == ctx.one())
            .ok_or_else(|| {
                Error::Internal(format!("case 2 row {i} lacks its unit entry [{}]", dump(w.mat())))
            })?;
        w.apply(ElemOp::Shear { i: c, j: 0, lambda: ctx.neg(v) })?;
    }
    clear_first_row(w)?;
    for i in 1..r - 1 {
        expect(
            w.mat().get(i, 0).is_zero(),
            "case 2 pre-clear left residue above the band",
            w.mat(),
        )?;
    }
    Ok(())
}

/// The sparse normal form of an arbitrary Frobenius form (`e >= 1`) with a
/// full change-of-coordinates certificate.
pub fn sparsify(f: &FrobeniusForm) -> Result<SparseCertificate> {
    if f.e() < 1 {
        return Err(Error::Domain("sparsify needs e >= 1".into()));
    }
    let mut w = Work::new(f);
    let n = f.n();
    let mut active = n;
    // eliminate degenerate variables one at a time, sending each to the last
    // active position (where it leaves a zero row and column)
    while active > 0 {
        let idx: Vec<usize> = (0..active).collect();
        let block = sub_matrix(w.mat(), &idx);
        let v = match common_kernel_vector(&block, f.e()) {
            Some(v) => v,
            None => break,
        };
        let g = Mat::completion_with_last_columns(w.ctx().clone(), active, &[v])?;
        w.apply_general(&embed_matrix(&g, n, &idx))?;
        for t in 0..n {
            expect(
                w.mat().get(active - 1, t).is_zero() && w.mat().get(t, active - 1).is_zero(),
                "variable elimination left residue",
                w.mat(),
            )?;
        }
        active -= 1;
    }
    if active > 0 {
        let idx: Vec<usize> = (0..active).collect();
        let block = sub_matrix(w.mat(), &idx);
        let sub = FrobeniusForm::new(w.ctx().clone(), f.e(), block)?;
        let cert = sparsify_nondeg(&sub)?;
        replay_certificate(&mut w, &cert, &idx)?;
    }
    expect(is_sparse(w.mat()), "sparsify output failed the sparse check", w.mat())?;
    w.into_certificate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn form(ctx: &Arc<FieldCtx>, e: u64, rows: &[&[u64]]) -> FrobeniusForm {
        let m = Mat::from_rows(
            ctx.clone(),
            rows.iter().map(|r| r.iter().map(|&v| Fe(v)).collect()).collect(),
        )
        .unwrap();
        FrobeniusForm::new(ctx.clone(), e, m).unwrap()
    }

    fn random_form(ctx: &Arc<FieldCtx>, e: u64, n: usize, rng: &mut StdRng) -> FrobeniusForm {
        let order = ctx.order();
        let mut a = Mat::zero(ctx.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, Fe(rng.gen_range(0..order)));
            }
        }
        FrobeniusForm::new(ctx.clone(), e, a).unwrap()
    }

    /// A random form with a known sparse representative: act(g, S0) for a
    /// random sparse pattern S0 and random invertible g.
    fn random_orbit_form(ctx: &Arc<FieldCtx>, e: u64, n: usize, rng: &mut StdRng) -> FrobeniusForm {
        let order = ctx.order();
        let r = rng.gen_range(0..=n);
        let mut cols: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let j = rng.gen_range(0..n);
            cols.swap(i, j);
        }
        let mut chosen: Vec<usize> = cols[..r].to_vec();
        chosen.sort_unstable_by(|a, b| b.cmp(a));
        let mut s0 = Mat::zero(ctx.clone(), n, n);
        for (i, &c) in chosen.iter().enumerate() {
            s0.set(i, c, ctx.one());
        }
        let g = loop {
            let mut g = Mat::zero(ctx.clone(), n, n);
            for i in 0..n {
                for j in 0..n {
                    g.set(i, j, Fe(rng.gen_range(0..order)));
                }
            }
            if g.is_invertible() {
                break g;
            }
        };
        let f0 = FrobeniusForm::new(ctx.clone(), e, s0).unwrap();
        f0.act(&CoordChange::new(g).unwrap()).unwrap()
    }

    #[test]
    fn sparse_predicate_examples() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let z = Mat::zero(ctx.clone(), 3, 3);
        assert!(is_sparse(&z));
        let rev = form(&ctx, 1, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        assert!(is_sparse(rev.matrix()));
        // increasing columns violate the ordering
        let bad = form(&ctx, 1, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert!(!is_sparse(bad.matrix()));
        // nonzero row after a zero row
        let bad2 = form(&ctx, 1, &[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]]);
        assert!(!is_sparse(bad2.matrix()));
        // non-unit entry
        let ctx3 = FieldCtx::new(3, 1).unwrap();
        let bad3 = form(&ctx3, 1, &[&[0, 2], &[0, 0]]);
        assert!(!is_sparse(bad3.matrix()));
    }

    #[test]
    fn decompose_reproduces_random_invertible_matrices() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let mut seen = 0;
        while seen < 30 {
            let mut g = Mat::zero(ctx.clone(), 4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    g.set(i, j, Fe(rng.gen_range(0..4)));
                }
            }
            if !g.is_invertible() {
                continue;
            }
            seen += 1;
            let ops = decompose_into_elementary(&g).unwrap();
            let mut prod = Mat::identity(ctx.clone(), 4);
            for op in &ops {
                prod = prod.mul(&op.to_matrix(&ctx, 4));
            }
            assert_eq!(prod, g);
        }
    }

    #[test]
    fn sequence_walk_and_disjointness() {
        // middle band rows 1..2 carry units; columns 3 and 4 start two walks
        let ctx = FieldCtx::new(2, 2).unwrap();
        let a = form(
            &ctx,
            1,
            &[
                &[0, 0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 1, 0],
                &[0, 0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 0],
            ],
        );
        let r = 4;
        let s4 = lemma75_sequence(a.matrix(), r, 4).unwrap();
        assert_eq!(s4, vec![4, 1]);
        let s3 = lemma75_sequence(a.matrix(), r, 3).unwrap();
        assert_eq!(s3, vec![3, 2]);
        assert!(s3.iter().all(|i| !s4.contains(i)));
        assert!(lemma75_sequence(a.matrix(), r, 0).is_err());
    }

    #[test]
    fn two_variable_forms_reach_their_three_sparse_classes() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..60 {
            let f = random_orbit_form(&ctx, 1, 2, &mut rng);
            let cert = sparsify(&f).unwrap();
            cert.verify().unwrap();
            let s = &cert.sparse;
            let sctx = s.ctx();
            let r = f.rank();
            match r {
                0 => assert!(s.is_zero()),
                1 => {
                    // one unit entry, position depending on degeneracy
                    let nz: Vec<(usize, usize)> = (0..2)
                        .flat_map(|i| (0..2).map(move |j| (i, j)))
                        .filter(|&(i, j)| !s.get(i, j).is_zero())
                        .collect();
                    assert_eq!(nz.len(), 1);
                    assert_eq!(s.get(nz[0].0, nz[0].1), sctx.one());
                    assert_eq!(nz[0].0, 0);
                }
                2 => {
                    assert_eq!(s.get(0, 1), sctx.one());
                    assert_eq!(s.get(1, 0), sctx.one());
                    assert!(s.get(0, 0).is_zero() && s.get(1, 1).is_zero());
                }
                _ => unreachable!(),
            }
            assert_eq!(cert.sparse.rank(), r);
        }
    }

    #[test]
    fn hyperbolic_form_diagonalizes_over_f2() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let f = form(&ctx, 1, &[&[0, 1], &[1, 0]]);
        let cert = diagonalize_full_rank(&f).unwrap();
        cert.verify().unwrap();
        assert_eq!(cert.sparse.get(0, 1), cert.ctx.one());
        assert_eq!(cert.sparse.get(1, 0), cert.ctx.one());
    }

    #[test]
    fn identity_forms_diagonalize_to_reverse_permutation() {
        for (p, k, e, n) in [(2u64, 1usize, 1u64, 2usize), (2, 1, 1, 3), (3, 1, 1, 2)] {
            let ctx = FieldCtx::new(p, k).unwrap();
            let f = FrobeniusForm::new(ctx.clone(), e, Mat::identity(ctx.clone(), n)).unwrap();
            let cert = diagonalize_full_rank(&f).unwrap();
            cert.verify().unwrap();
            for i in 0..n {
                assert_eq!(cert.sparse.get(i, n - 1 - i), cert.ctx.one());
            }
        }
    }

    #[test]
    fn random_forms_sparsify_with_invariants_preserved() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        for n in [3usize, 4] {
            for _ in 0..40 {
                let f = random_orbit_form(&ctx, 1, n, &mut rng);
                let cert = sparsify(&f).unwrap();
                cert.verify().unwrap();
                assert!(is_sparse(&cert.sparse));
                let lifted = FrobeniusForm::new(
                    cert.ctx.clone(),
                    cert.e,
                    cert.input.lift(&cert.emb),
                )
                .unwrap();
                let out = FrobeniusForm::new(cert.ctx.clone(), cert.e, cert.sparse.clone()).unwrap();
                assert_eq!(lifted.rank(), out.rank());
                assert_eq!(lifted.embedding_dimension(), out.embedding_dimension());
            }
        }
    }

    #[test]
    fn sparsify_rejects_the_classical_case() {
        let ctx = FieldCtx::new(5, 1).unwrap();
        let f = FrobeniusForm::new(ctx.clone(), 0, Mat::identity(ctx.clone(), 2)).unwrap();
        assert!(matches!(sparsify(&f), Err(Error::Domain(_))));
    }

    #[test]
    fn uniform_random_inputs_never_fail_internally() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..40 {
            let f = random_form(&ctx, 1, 3, &mut rng);
            match sparsify(&f) {
                Ok(cert) => cert.verify().unwrap(),
                Err(Error::Capacity(_)) => {}
                Err(e) => panic!("unexpected error class: {e}"),
            }
        }
    }

    #[test]
    fn step_wrappers_act_only_where_promised() {
        // a rank-3 case-2 shape on 5 variables over F_4: middle unit at
        // (1,2), outer frame, and two stray entries in column 0
        let ctx = FieldCtx::new(2, 2).unwrap();
        let a = form(
            &ctx,
            1,
            &[
                &[0, 0, 0, 0, 1],
                &[0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0],
            ],
        );
        let mut m = a.matrix().clone();
        m.set(2, 0, Fe(2));
        m.set(3, 0, Fe(3));
        let f = FrobeniusForm::new(ctx.clone(), 1, m).unwrap();
        let (g1, ops1) = step1_clear_column(&f).unwrap();
        assert!(!ops1.is_empty());
        let support: Vec<usize> = (0..5).filter(|&i| !g1.matrix().get(i, 0).is_zero()).collect();
        assert_eq!(support.len(), 1);
        for i in 0..5 {
            for j in 1..5 {
                assert_eq!(g1.matrix().get(i, j), f.matrix().get(i, j));
            }
        }
        let (g2, _ops2) = step2_move_to_er(&g1).unwrap();
        assert!(is_sparse(g2.matrix()));
        assert_eq!(g2.matrix().get(2, 0), ctx.one());
    }
}
