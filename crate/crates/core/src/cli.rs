//! Command-line front end: stable JSON (default) and text reports over the
//! library. Exit codes: 0 success, 2 malformed input or domain error,
//! 3 capacity/budget, 4 internal invariant violation.

use std::io::Read as _;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use frobforms::classify::{enumerate_sparse, fibonacci_bound, pattern_to_form};
use frobforms::error::{Budget, Error, Result};
use frobforms::ff::{Embedding, Fe, FieldCtx};
use frobforms::fpt::fpt_interval;
use frobforms::frobform::{CoordChange, FrobeniusForm, MatrixJson};
use frobforms::geom::{align_lines, gauss_data, hyperplane_section, star_classify};
use frobforms::matrix::Mat;
use frobforms::normalize::{diagonalize_full_rank, sparsify, ElemOp, SparseCertificate};
use frobforms::poly::MultiPoly;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "frobforms",
    about = "Exact F-pure thresholds and Frobenius-form normalization over small finite fields"
)]
struct Cli {
    /// Emit plain text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Seed for any randomized behavior (fixed default for reproducibility).
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Multiplication budget; overrides the FROBFORMS_BUDGET environment
    /// variable and the built-in default.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct FormInput {
    /// Field spec "p^k" or "p^k/modulus=c0,c1,...,ck" (for polynomial input).
    #[arg(long)]
    field: Option<String>,
    /// Frobenius level e (q = p^e) for polynomial input.
    #[arg(long, default_value_t = 1)]
    e: u64,
    /// Polynomial text, inline matrix JSON, "@path", or "-" for stdin.
    input: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Nu table, threshold interval, and exact characterizations.
    Fpt {
        #[arg(long)]
        field: String,
        /// Highest Frobenius level for the nu sweep.
        #[arg(long, default_value_t = 4)]
        emax: u64,
        input: String,
    },
    /// Extract the Frobenius-form matrix of a degree q+1 polynomial.
    Detect {
        #[arg(long)]
        field: String,
        /// Level override; by default inferred from the degree.
        #[arg(long)]
        e: Option<u64>,
        input: String,
    },
    /// Rank, embedding dimension, singular locus, Hessian, Hermitian.
    Invariants(FormInput),
    /// Sparse normal form with a replayable certificate.
    Sparsify(FormInput),
    /// Full-rank diagonalization to the reverse permutation form.
    Diagonalize(FormInput),
    /// Replay and check a certificate produced by sparsify/diagonalize.
    Verify {
        /// Certificate JSON, "@path", or "-" for stdin.
        input: String,
    },
    /// Table of nondegenerate sparse classes for embedding dimension n.
    Classify {
        #[arg(long)]
        n: usize,
        /// Field order for the representative forms.
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        e: u64,
    },
    /// Enumerate sparse patterns and the Fibonacci bound.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Restrict to one rank.
        #[arg(long)]
        r: Option<usize>,
        /// Include degenerate patterns.
        #[arg(long)]
        all: bool,
    },
    /// Hyperplane section and its re-extraction as a Frobenius form.
    Section {
        /// Comma-separated coefficients of the linear form.
        #[arg(long)]
        hyperplane: String,
        #[command(flatten)]
        form: FormInput,
    },
    /// Gauss-map data: inseparability degree and the dual form.
    Gauss(FormInput),
    /// Perfect-star classification of the section through two lines.
    Star {
        /// First line as a linear form (defaults to x = 0).
        #[arg(long)]
        l1: Option<String>,
        /// Second line as a linear form (defaults to y = 0).
        #[arg(long)]
        l2: Option<String>,
        #[command(flatten)]
        form: FormInput,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(report) => {
            if cli.text {
                println!("{}", render_text(&report));
            } else {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            }
            0
        }
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Value> {
    let mut budget = match cli.budget {
        Some(limit) => Budget::new(limit),
        None => Budget::default(),
    };
    match &cli.command {
        Cmd::Fpt { field, emax, input } => cmd_fpt(field, *emax, input, &mut budget),
        Cmd::Detect { field, e, input } => cmd_detect(field, *e, input),
        Cmd::Invariants(fi) => cmd_invariants(fi),
        Cmd::Sparsify(fi) => {
            let form = load_form(fi)?;
            let cert = sparsify(&form)?;
            cert.verify()?;
            Ok(certificate_json("sparsify", &cert))
        }
        Cmd::Diagonalize(fi) => {
            let form = load_form(fi)?;
            let cert = diagonalize_full_rank(&form)?;
            cert.verify()?;
            Ok(certificate_json("diagonalize", &cert))
        }
        Cmd::Verify { input } => cmd_verify(input),
        Cmd::Classify { n, q, e } => cmd_classify(*n, *q, *e),
        Cmd::Enumerate { n, r, all } => cmd_enumerate(*n, *r, *all),
        Cmd::Section { hyperplane, form } => cmd_section(hyperplane, form),
        Cmd::Gauss(fi) => cmd_gauss(fi),
        Cmd::Star { l1, l2, form } => cmd_star(l1.as_deref(), l2.as_deref(), form),
    }
}

// ---------------------------------------------------------------------------
// input plumbing

fn read_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Malformed(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else if let Some(path) = input.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Malformed(format!("cannot read {path}: {e}")))
    } else {
        Ok(input.to_string())
    }
}

fn parse_poly(field: &Option<String>, e: u64, text: &str) -> Result<FrobeniusForm> {
    let spec = field
        .as_deref()
        .ok_or_else(|| Error::Malformed("--field is required for polynomial input".into()))?;
    let ctx = FieldCtx::parse_spec(spec)?;
    let f = MultiPoly::parse(ctx, text, None)?;
    FrobeniusForm::from_polynomial(&f, e)
}

fn load_form(fi: &FormInput) -> Result<FrobeniusForm> {
    let text = read_input(&fi.input)?;
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let mj: MatrixJson = serde_json::from_str(trimmed)
            .map_err(|e| Error::Malformed(format!("bad matrix JSON: {e}")))?;
        mj.decode()
    } else {
        parse_poly(&fi.field, fi.e, trimmed)
    }
}

// ---------------------------------------------------------------------------
// element and matrix serialization

fn elem_json(ctx: &Arc<FieldCtx>, a: Fe) -> Value {
    json!(ctx.digits(a))
}

fn mat_json(m: &Mat) -> Value {
    let ctx = m.ctx();
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array((0..m.cols()).map(|j| elem_json(ctx, m.get(i, j))).collect())
            })
            .collect(),
    )
}

fn mat_from_json(ctx: &Arc<FieldCtx>, v: &Value, n: usize) -> Result<Mat> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Malformed("matrix must be an array of rows".into()))?;
    if rows.len() != n {
        return Err(Error::Malformed("matrix row count mismatch".into()));
    }
    let mut m = Mat::zero(ctx.clone(), n, n);
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .filter(|c| c.len() == n)
            .ok_or_else(|| Error::Malformed("matrix column count mismatch".into()))?;
        for (j, cell) in cells.iter().enumerate() {
            m.set(i, j, elem_from_json(ctx, cell)?);
        }
    }
    Ok(m)
}

fn elem_from_json(ctx: &Arc<FieldCtx>, v: &Value) -> Result<Fe> {
    let digits = v
        .as_array()
        .ok_or_else(|| Error::Malformed("field element must be a coefficient list".into()))?
        .iter()
        .map(|c| {
            c.as_u64()
                .ok_or_else(|| Error::Malformed("coefficients must be nonnegative integers".into()))
        })
        .collect::<Result<Vec<u64>>>()?;
    ctx.from_coeffs(&digits)
}

fn linear_form(ctx: &Arc<FieldCtx>, text: &str) -> Result<Vec<Fe>> {
    text.split(',')
        .map(|s| ctx.parse_elem(s.trim()))
        .collect()
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_fpt(field: &str, emax: u64, input: &str, budget: &mut Budget) -> Result<Value> {
    let ctx = FieldCtx::parse_spec(field)?;
    let text = read_input(input)?;
    let f = MultiPoly::parse(ctx.clone(), text.trim(), None)?;
    let iv = fpt_interval(&f, emax, budget)?;
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "fpt",
        "field": ctx.spec_string(),
        "polynomial": f.to_string(),
        "degree": iv.degree,
        "levels": iv.levels.iter().map(|r| json!({"e": r.e, "nu": r.nu})).collect::<Vec<_>>(),
        "interval": {"lo": iv.lo.to_string(), "hi": iv.hi.to_string()},
        "exact": iv.exact.map(|(v, why)| json!({"value": v.to_string(), "reason": why.as_str()})),
        "budget_used": budget.used(),
    }))
}

fn cmd_detect(field: &str, e: Option<u64>, input: &str) -> Result<Value> {
    let ctx = FieldCtx::parse_spec(field)?;
    let text = read_input(input)?;
    let f = MultiPoly::parse(ctx.clone(), text.trim(), None)?;
    let e = match e {
        Some(e) => e,
        None => infer_level(&ctx, &f)?,
    };
    let base = json!({
        "schema": SCHEMA_VERSION,
        "command": "detect",
        "field": ctx.spec_string(),
        "polynomial": f.to_string(),
        "e": e,
        "q": ctx.p().pow(e as u32),
    });
    match FrobeniusForm::from_polynomial(&f, e) {
        Ok(form) => {
            let mut out = base;
            out["is_frobenius_form"] = json!(true);
            out["matrix"] = mat_json(form.matrix());
            Ok(out)
        }
        Err(Error::Malformed(why)) | Err(Error::Domain(why)) => {
            let mut out = base;
            out["is_frobenius_form"] = json!(false);
            out["reason"] = json!(why);
            Ok(out)
        }
        Err(err) => Err(err),
    }
}

/// Level with p^e + 1 equal to the degree.
fn infer_level(ctx: &Arc<FieldCtx>, f: &MultiPoly) -> Result<u64> {
    let d = f
        .homogeneous_degree()
        .ok_or_else(|| Error::Malformed("detect needs a homogeneous polynomial".into()))?
        as u64;
    if d < 2 {
        return Err(Error::Malformed("degree must be q + 1 >= 2".into()));
    }
    let q = d - 1;
    let mut pe = 1u64;
    for e in 0.. {
        if pe == q {
            return Ok(e);
        }
        if pe > q / ctx.p() {
            break;
        }
        pe *= ctx.p();
    }
    Err(Error::Malformed(format!(
        "degree {d} is not q + 1 for a power q of {}",
        ctx.p()
    )))
}

fn cmd_invariants(fi: &FormInput) -> Result<Value> {
    let form = load_form(fi)?;
    let ctx = form.ctx();
    let locus = form.singular_locus();
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "invariants",
        "field": ctx.spec_string(),
        "e": form.e(),
        "q": form.q(),
        "n": form.n(),
        "matrix": mat_json(form.matrix()),
        "rank": form.rank(),
        "embedding_dimension": form.embedding_dimension(),
        "singular_locus_dim": form.n() - form.rank(),
        "singular_locus_basis": locus.iter()
            .map(|v| Value::Array(v.iter().map(|&c| elem_json(ctx, c)).collect()))
            .collect::<Vec<_>>(),
        "hessian_is_zero": form.hessian_is_zero(),
        "is_hermitian": form.is_hermitian(),
    }))
}

fn certificate_json(command: &str, cert: &SparseCertificate) -> Value {
    let ops: Vec<Value> = cert
        .ops
        .iter()
        .map(|op| match *op {
            ElemOp::Swap { i, j } => json!({"kind": "swap", "i": i, "j": j}),
            ElemOp::Scale { i, lambda } => {
                json!({"kind": "scale", "i": i, "lambda": elem_json(&cert.ctx, lambda)})
            }
            ElemOp::Shear { i, j, lambda } => {
                json!({"kind": "shear", "i": i, "j": j, "lambda": elem_json(&cert.ctx, lambda)})
            }
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "field": cert.ctx.spec_string(),
        "base_field": cert.base_ctx.spec_string(),
        "n": cert.n,
        "e": cert.e,
        "input_matrix": mat_json(&cert.input.lift(&cert.emb)),
        "sparse_matrix": mat_json(&cert.sparse),
        "g": mat_json(&cert.g),
        "ops": ops,
    })
}

fn cmd_verify(input: &str) -> Result<Value> {
    let text = read_input(input)?;
    let v: Value = serde_json::from_str(text.trim())
        .map_err(|e| Error::Malformed(format!("bad certificate JSON: {e}")))?;
    let field = v["field"]
        .as_str()
        .ok_or_else(|| Error::Malformed("certificate is missing the field spec".into()))?;
    let ctx = FieldCtx::parse_spec(field)?;
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::Malformed("certificate is missing n".into()))? as usize;
    let e = v["e"]
        .as_u64()
        .ok_or_else(|| Error::Malformed("certificate is missing e".into()))?;
    let input_m = mat_from_json(&ctx, &v["input_matrix"], n)?;
    let sparse = mat_from_json(&ctx, &v["sparse_matrix"], n)?;
    let g = mat_from_json(&ctx, &v["g"], n)?;
    let ops_v = v["ops"]
        .as_array()
        .ok_or_else(|| Error::Malformed("certificate is missing ops".into()))?;
    let mut ops = Vec::with_capacity(ops_v.len());
    for op in ops_v {
        let idx = |key: &str| -> Result<usize> {
            op[key]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Malformed(format!("op is missing index {key}")))
        };
        ops.push(match op["kind"].as_str() {
            Some("swap") => ElemOp::Swap { i: idx("i")?, j: idx("j")? },
            Some("scale") => ElemOp::Scale {
                i: idx("i")?,
                lambda: elem_from_json(&ctx, &op["lambda"])?,
            },
            Some("shear") => ElemOp::Shear {
                i: idx("i")?,
                j: idx("j")?,
                lambda: elem_from_json(&ctx, &op["lambda"])?,
            },
            _ => return Err(Error::Malformed("unknown op kind".into())),
        });
    }
    let cert = SparseCertificate {
        base_ctx: ctx.clone(),
        ctx: ctx.clone(),
        emb: Embedding::identity(ctx),
        e,
        n,
        input: input_m,
        sparse,
        g,
        ops,
    };
    cert.verify()?;
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "verify",
        "verified": true,
        "n": n,
        "e": e,
        "ops": cert.ops.len(),
    }))
}

/// Factor a prime power q = p^k.
fn prime_power(q: u64) -> Result<(u64, usize)> {
    if q < 2 {
        return Err(Error::Malformed("field order must be at least 2".into()));
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut k = 0;
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            if rest != 1 {
                return Err(Error::Malformed(format!("{q} is not a prime power")));
            }
            return Ok((p, k));
        }
        p += 1;
    }
    Ok((q, 1))
}

fn cmd_classify(n: usize, q: u64, e: u64) -> Result<Value> {
    let (p, k) = prime_power(q)?;
    let ctx = FieldCtx::new(p, k)?;
    let mut rows = Vec::new();
    for r in 1..=n {
        for pat in enumerate_sparse(n, r, true)? {
            let form = pattern_to_form(&pat, &ctx, e)?;
            rows.push(json!({
                "pattern": pat.id(),
                "r": r,
                "embedding_dimension": form.embedding_dimension(),
                "singular_locus_dim": n - r,
                "polynomial": form.to_polynomial().to_string(),
            }));
        }
    }
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "classify",
        "field": ctx.spec_string(),
        "n": n,
        "e": e,
        "classes": rows.len(),
        "fibonacci_bound": fibonacci_bound(n).to_string(),
        "table": rows,
    }))
}

fn cmd_enumerate(n: usize, r: Option<usize>, all: bool) -> Result<Value> {
    let ranks: Vec<usize> = match r {
        Some(r) => vec![r],
        None => (1..=n).collect(),
    };
    let mut groups = Vec::new();
    let mut total = 0usize;
    for r in ranks {
        let pats = enumerate_sparse(n, r, !all)?;
        total += pats.len();
        groups.push(json!({
            "r": r,
            "count": pats.len(),
            "patterns": pats.iter().map(|p| p.id()).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "enumerate",
        "n": n,
        "nondegenerate_only": !all,
        "total": total,
        "fibonacci_bound": fibonacci_bound(n).to_string(),
        "groups": groups,
    }))
}

fn cmd_section(hyperplane: &str, fi: &FormInput) -> Result<Value> {
    let form = load_form(fi)?;
    let ctx = form.ctx().clone();
    let l = linear_form(&ctx, hyperplane)?;
    let (section, extracted) = hyperplane_section(&form.to_polynomial(), &l, form.e())?;
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "section",
        "field": ctx.spec_string(),
        "e": form.e(),
        "hyperplane": l.iter().map(|&c| elem_json(&ctx, c)).collect::<Vec<_>>(),
        "section": section.to_string(),
        "is_frobenius_form": extracted.is_some(),
        "matrix": extracted.map(|g| mat_json(g.matrix())),
    }))
}

fn cmd_gauss(fi: &FormInput) -> Result<Value> {
    let form = load_form(fi)?;
    let d = gauss_data(&form);
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "gauss",
        "field": form.ctx().spec_string(),
        "e": form.e(),
        "n": form.n(),
        "rank": form.rank(),
        "inseparability_degree": d.insep_degree,
        "dual_matrix": mat_json(&d.dual_matrix),
        "dual_is_frobenius": d.dual_is_frobenius,
        "note": d.note,
    }))
}

fn cmd_star(l1: Option<&str>, l2: Option<&str>, fi: &FormInput) -> Result<Value> {
    let mut form = load_form(fi)?;
    let ctx = form.ctx().clone();
    if l1.is_some() || l2.is_some() {
        let one = ctx.one();
        let default1 = vec![one, Fe::ZERO, Fe::ZERO];
        let default2 = vec![Fe::ZERO, one, Fe::ZERO];
        let v1 = match l1 {
            Some(s) => linear_form(&ctx, s)?,
            None => default1,
        };
        let v2 = match l2 {
            Some(s) => linear_form(&ctx, s)?,
            None => default2,
        };
        let g = align_lines(&ctx, &v1, &v2)?;
        form = form.act(&CoordChange::new(g)?)?;
    }
    let rep = star_classify(&form)?;
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "command": "star",
        "field": ctx.spec_string(),
        "e": form.e(),
        "verdict": rep.verdict.as_str(),
        "factor_field": rep.factor_ctx.spec_string(),
        "a_b": [elem_json(&rep.factor_ctx, rep.emb.apply(rep.a_b.0)),
                 elem_json(&rep.factor_ctx, rep.emb.apply(rep.a_b.1))],
        "factors": rep.factors.iter().map(|&((cx, cy), mult)| json!({
            "x_coeff": elem_json(&rep.factor_ctx, cx),
            "y_coeff": elem_json(&rep.factor_ctx, cy),
            "multiplicity": mult,
        })).collect::<Vec<_>>(),
    }))
}

// ---------------------------------------------------------------------------
// text rendering

fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_value(v, 0, &mut out);
    out.trim_end().to_string()
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                if key == "schema" {
                    continue;
                }
                match val {
                    Value::Object(_) | Value::Array(_) if !is_flat(val) => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render_value(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{key}: {}\n", flat(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_flat(item) {
                    out.push_str(&format!("{pad}- {}\n", flat(item)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_value(item, indent + 1, out);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", flat(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_object() && is_flat(i)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
