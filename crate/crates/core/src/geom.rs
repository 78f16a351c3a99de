//! Geometric reports for the hypersurfaces cut out by Frobenius forms:
//! hyperplane sections and their re-extraction, Gauss-map data with the
//! dual form, and the perfect-star classification of plane sections
//! through two intersecting lines.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};
use crate::frobform::FrobeniusForm;
use crate::matrix::Mat;
use crate::poly::{binary_form_squarefree, Monomial, MultiPoly};
use crate::uni::UniPoly;

/// Restrict a homogeneous polynomial to the hyperplane `L = 0` and try to
/// re-extract the result as a Frobenius form of the same level.
pub fn hyperplane_section(
    f: &MultiPoly,
    l: &[Fe],
    e: u64,
) -> Result<(MultiPoly, Option<FrobeniusForm>)> {
    let section = f.quotient_by_linear_form(l)?;
    let form = FrobeniusForm::from_polynomial(&section, e).ok();
    Ok((section, form))
}

/// Hyperplane section of a Frobenius form; the section of a Frobenius form
/// is again one, so failure to re-extract is an internal error.
pub fn hyperplane_section_form(
    form: &FrobeniusForm,
    l: &[Fe],
) -> Result<(MultiPoly, FrobeniusForm)> {
    let (section, extracted) = hyperplane_section(&form.to_polynomial(), l, form.e())?;
    match extracted {
        Some(g) => Ok((section, g)),
        None => Err(Error::Internal(
            "hyperplane section of a Frobenius form failed to re-extract".into(),
        )),
    }
}

/// Gauss-map report: inseparability degree (for smooth hypersurfaces,
/// i.e. full rank) and the matrix of the dual form.
#[derive(Debug, Clone)]
pub struct GaussData {
    /// `q^(n-1)` when the form has full rank; absent otherwise.
    pub insep_degree: Option<u64>,
    pub dual_matrix: Mat,
    pub dual_is_frobenius: bool,
    pub note: Option<String>,
}

pub fn gauss_data(form: &FrobeniusForm) -> GaussData {
    let n = form.n();
    let q = form.q();
    let full = form.rank() == n;
    let insep_degree = if full {
        Some(q.pow(n.saturating_sub(1) as u32))
    } else {
        None
    };
    GaussData {
        insep_degree,
        dual_matrix: form.matrix().frobenius(form.e()),
        dual_is_frobenius: true,
        note: if full {
            None
        } else {
            Some("rank-deficient: Gauss image dimension not computed".into())
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarVerdict {
    PerfectStar,
    QFoldLinePlusLine,
    PlaneContained,
}

impl StarVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            StarVerdict::PerfectStar => "perfect-star",
            StarVerdict::QFoldLinePlusLine => "q-fold-line-plus-line",
            StarVerdict::PlaneContained => "plane-contained",
        }
    }
}

/// Classification of the plane section through the coordinate lines
/// `x = 0`, `y = 0`: the section reduces to `a x^q y + b x y^q`.
#[derive(Debug, Clone)]
pub struct StarReport {
    pub verdict: StarVerdict,
    /// Field over which the linear factors are listed.
    pub factor_ctx: Arc<FieldCtx>,
    pub emb: Embedding,
    /// Linear binary forms `(c_x, c_y)` with multiplicities.
    pub factors: Vec<((Fe, Fe), u32)>,
    pub a_b: (Fe, Fe),
}

/// Classify the section of a 3-variable Frobenius form by the plane
/// spanned by the two coordinate lines `x = 0` and `y = 0` (that is,
/// restrict to `z = 0`).  The two lines must lie on the hypersurface.
pub fn star_classify(form: &FrobeniusForm) -> Result<StarReport> {
    if form.n() != 3 {
        return Err(Error::Domain("star sections are defined for 3-variable forms".into()));
    }
    let ctx = form.ctx().clone();
    let q = form.q();
    let h = form.to_polynomial();
    let zero_last = [Fe::ZERO, Fe::ZERO, ctx.one()];
    let section = h.quotient_by_linear_form(&zero_last)?;
    if section.is_zero() {
        return Ok(StarReport {
            verdict: StarVerdict::PlaneContained,
            factor_ctx: ctx.clone(),
            emb: Embedding::identity(ctx),
            factors: Vec::new(),
            a_b: (Fe::ZERO, Fe::ZERO),
        });
    }
    // every term must be divisible by both x and y
    for (m, _) in section.terms() {
        if m.0[0] == 0 || m.0[1] == 0 {
            return Err(Error::Malformed(
                "section is not divisible by both coordinate lines".into(),
            ));
        }
    }
    let a = section.coeff(&Monomial(vec![q as u32, 1]));
    let b = section.coeff(&Monomial(vec![1, q as u32]));
    // a Frobenius section through both lines has no other monomials
    let expected_terms = usize::from(!a.is_zero()) + usize::from(!b.is_zero());
    if section.num_terms() != expected_terms {
        return Err(Error::Internal(
            "star section is not of the shape a*x^q*y + b*x*y^q".into(),
        ));
    }
    if a.is_zero() || b.is_zero() {
        // exactly one is nonzero (both zero would mean a zero section)
        let factors = if b.is_zero() {
            vec![((ctx.one(), Fe::ZERO), q as u32), ((Fe::ZERO, ctx.one()), 1)]
        } else {
            vec![((ctx.one(), Fe::ZERO), 1), ((Fe::ZERO, ctx.one()), q as u32)]
        };
        return Ok(StarReport {
            verdict: StarVerdict::QFoldLinePlusLine,
            factor_ctx: ctx.clone(),
            emb: Embedding::identity(ctx),
            factors,
            a_b: (a, b),
        });
    }
    // perfect star: factors x, y, and the q-1 roots of a t^(q-1) + b
    let mut coeffs = vec![Fe::ZERO; q as usize];
    coeffs[0] = b;
    coeffs[q as usize - 1] = a;
    let slope_poly = UniPoly::new(ctx.clone(), coeffs);
    let (_, roots, emb) = slope_poly.split_with_extension(q as usize - 1)?;
    let big = emb.to.clone();
    let mut factors = vec![((big.one(), Fe::ZERO), 1u32), ((Fe::ZERO, big.one()), 1u32)];
    // root t means the slope x/y = t vanishes on the factor x - t y
    for &t in &roots {
        factors.push(((big.one(), big.neg(t)), 1));
    }
    Ok(StarReport {
        verdict: StarVerdict::PerfectStar,
        factor_ctx: big,
        emb,
        factors,
        a_b: (a, b),
    })
}

/// Build the coordinate change that moves two independent linear forms in
/// three variables to the first two coordinates, so that the lines they cut
/// out become `x = 0` and `y = 0`.
pub fn align_lines(ctx: &Arc<FieldCtx>, l1: &[Fe], l2: &[Fe]) -> Result<Mat> {
    if l1.len() != 3 || l2.len() != 3 {
        return Err(Error::Malformed("lines must be linear forms in 3 variables".into()));
    }
    // complete [l1; l2] to an invertible row basis
    for extra in 0..3 {
        let mut rows = vec![l1.to_vec(), l2.to_vec()];
        let mut third = vec![Fe::ZERO; 3];
        third[extra] = ctx.one();
        rows.push(third);
        let m = Mat::from_rows(ctx.clone(), rows)?;
        if m.is_invertible() {
            return m.inverse();
        }
    }
    Err(Error::Domain("the two linear forms are not independent".into()))
}

/// Decide whether a squarefree binary form of degree `d` is projectively
/// equivalent to `x^d - y^d`, i.e. cuts a perfect star of slopes.
pub fn verify_perfect_star(f: &MultiPoly) -> Result<bool> {
    if f.nvars() != 2 {
        return Err(Error::Domain("perfect-star check needs a binary form".into()));
    }
    let ctx = f.ctx().clone();
    let d = f
        .homogeneous_degree()
        .ok_or_else(|| Error::Domain("perfect-star check needs a homogeneous form".into()))?
        as u64;
    if d < 3 {
        return Err(Error::Domain("perfect stars have degree at least 3".into()));
    }
    if d % ctx.p() == 0 {
        return Err(Error::Domain(
            "perfect stars require the characteristic not to divide the degree".into(),
        ));
    }
    if !binary_form_squarefree(f) {
        return Ok(false);
    }
    // roots of f in P^1: the dehomogenization f(t, 1) plus infinity when
    // the leading coefficient vanishes
    let mut coeffs = vec![Fe::ZERO; d as usize + 1];
    for (m, c) in f.terms() {
        coeffs[m.0[0] as usize] = c;
    }
    let u = UniPoly::new(ctx.clone(), coeffs.clone());
    let finite_wanted = u.degree().map_or(0, |deg| deg) as usize;
    let (_, mut roots, emb1) = u.split_with_extension(finite_wanted)?;
    if roots.len() != finite_wanted {
        return Err(Error::Internal("squarefree form lost roots while splitting".into()));
    }
    let mid = emb1.to.clone();
    // projective points (a : b); infinity is (1 : 0)
    let mut points: Vec<(Fe, Fe)> = roots.drain(..).map(|t| (t, mid.one())).collect();
    if (finite_wanted as u64) < d {
        points.push((mid.one(), Fe::ZERO));
    }
    if points.len() != d as usize {
        return Err(Error::Internal("root count does not match the degree".into()));
    }
    // the mu_d reference star over a field containing the d-th roots of 1
    let mut unity = vec![Fe::ZERO; d as usize + 1];
    unity[0] = mid.neg(mid.one());
    unity[d as usize] = mid.one();
    let (_, mu, emb2) = UniPoly::new(mid.clone(), unity).split_with_extension(d as usize)?;
    let big = emb2.to.clone();
    let points: Vec<(Fe, Fe)> = points
        .iter()
        .map(|&(a, b)| (emb2.apply(a), emb2.apply(b)))
        .collect();
    let mu_points: Vec<(Fe, Fe)> = mu.iter().map(|&t| (t, big.one())).collect();
    // normalize the reference star by a fixed anchor triple
    let reference = normalize_by_triple(&big, &mu_points, [0, 1, 2])?;
    // accept iff some ordered source triple normalizes onto the reference
    let m = points.len();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if i == j || j == k || i == k {
                    continue;
                }
                let shot = normalize_by_triple(&big, &points, [i, j, k])?;
                if same_point_set(&big, &shot, &reference) {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Apply the unique Moebius map sending the anchor triple to 0, 1,
/// infinity; returns the image of the whole point list.
fn normalize_by_triple(
    ctx: &Arc<FieldCtx>,
    pts: &[(Fe, Fe)],
    anchor: [usize; 3],
) -> Result<Vec<(Fe, Fe)>> {
    let s1 = pts[anchor[0]];
    let s2 = pts[anchor[1]];
    let s3 = pts[anchor[2]];
    // row 1 kills s1 (image 0), row 2 kills s3 (image infinity)
    let row1 = (s1.1, ctx.neg(s1.0));
    let row2 = (s3.1, ctx.neg(s3.0));
    let app = |row: (Fe, Fe), p: (Fe, Fe)| ctx.add(ctx.mul(row.0, p.0), ctx.mul(row.1, p.1));
    let u = app(row1, s2);
    let v = app(row2, s2);
    if u.is_zero() || v.is_zero() {
        return Err(Error::Internal("anchor points are not pairwise distinct".into()));
    }
    // scale rows so the middle anchor goes to (1 : 1)
    let row1 = (ctx.mul(row1.0, v), ctx.mul(row1.1, v));
    let row2 = (ctx.mul(row2.0, u), ctx.mul(row2.1, u));
    Ok(pts
        .iter()
        .map(|&p| canonical(ctx, (app(row1, p), app(row2, p))))
        .collect())
}

fn canonical(ctx: &Arc<FieldCtx>, p: (Fe, Fe)) -> (Fe, Fe) {
    if !p.1.is_zero() {
        (ctx.div(p.0, p.1).expect("nonzero denominator"), ctx.one())
    } else {
        (ctx.one(), Fe::ZERO)
    }
}

fn same_point_set(_ctx: &Arc<FieldCtx>, a: &[(Fe, Fe)], b: &[(Fe, Fe)]) -> bool {
    let mut x: Vec<(u64, u64)> = a.iter().map(|p| ((p.0).0, (p.1).0)).collect();
    let mut y: Vec<(u64, u64)> = b.iter().map(|p| ((p.0).0, (p.1).0)).collect();
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    fn diag3(ctx: &Arc<FieldCtx>, e: u64) -> FrobeniusForm {
        FrobeniusForm::new(ctx.clone(), e, Mat::identity(ctx.clone(), 3)).unwrap()
    }

    #[test]
    fn coordinate_section_of_diagonal_cubic() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let f = diag3(&ctx, 1);
        let l = [Fe::ZERO, Fe::ZERO, ctx.one()];
        let (section, g) = hyperplane_section_form(&f, &l).unwrap();
        assert_eq!(section.homogeneous_degree(), Some(3));
        assert_eq!(*g.matrix(), Mat::identity(ctx.clone(), 2));
    }

    #[test]
    fn oblique_sections_re_extract() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let f = diag3(&ctx, 1);
        let l = [ctx.one(), ctx.one(), ctx.one()];
        let (_, g) = hyperplane_section_form(&f, &l).unwrap();
        assert_eq!(g.n(), 2);
    }

    #[test]
    fn gauss_data_of_diagonal_forms() {
        for (p, k) in [(2u64, 1usize), (2, 2), (3, 1)] {
            let ctx = FieldCtx::new(p, k).unwrap();
            let f = diag3(&ctx, 1);
            let d = gauss_data(&f);
            assert_eq!(d.insep_degree, Some(f.q() * f.q()));
            assert_eq!(d.dual_matrix, Mat::identity(ctx.clone(), 3));
            assert!(d.dual_is_frobenius);
            // dual of dual is the q^2 Frobenius of the original
            let dd = d.dual_matrix.frobenius(f.e());
            assert_eq!(dd, f.matrix().frobenius(2 * f.e()));
        }
    }

    #[test]
    fn gauss_data_of_rank_deficient_forms() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let mut a = Mat::zero(ctx.clone(), 3, 3);
        a.set(0, 2, ctx.one());
        let f = FrobeniusForm::new(ctx.clone(), 1, a).unwrap();
        let d = gauss_data(&f);
        assert_eq!(d.insep_degree, None);
        assert!(d.note.is_some());
    }

    #[test]
    fn star_verdicts() {
        // x^q y + x y^q + z^(q+1): section by z=0 is a perfect star
        let ctx = FieldCtx::new(2, 1).unwrap();
        let mut a = Mat::zero(ctx.clone(), 3, 3);
        a.set(0, 1, ctx.one());
        a.set(1, 0, ctx.one());
        a.set(2, 2, ctx.one());
        let f = FrobeniusForm::new(ctx.clone(), 1, a).unwrap();
        let rep = star_classify(&f).unwrap();
        assert_eq!(rep.verdict, StarVerdict::PerfectStar);
        assert_eq!(rep.factors.len(), 3);
        // x^q y + z^(q+1): q-fold line plus line
        let mut b = Mat::zero(ctx.clone(), 3, 3);
        b.set(0, 1, ctx.one());
        b.set(2, 2, ctx.one());
        let g = FrobeniusForm::new(ctx.clone(), 1, b).unwrap();
        assert_eq!(star_classify(&g).unwrap().verdict, StarVerdict::QFoldLinePlusLine);
        // z^(q+1) only in x,y-free terms: zero section
        let mut c = Mat::zero(ctx.clone(), 3, 3);
        c.set(2, 2, ctx.one());
        let h = FrobeniusForm::new(ctx.clone(), 1, c).unwrap();
        assert_eq!(star_classify(&h).unwrap().verdict, StarVerdict::PlaneContained);
    }

    #[test]
    fn perfect_star_reference_cases() {
        // x^3 - y^3 over F_2 (minus = plus)
        let ctx = FieldCtx::new(2, 1).unwrap();
        let f = MultiPoly::parse(ctx.clone(), "x0^3 + x1^3", Some(2)).unwrap();
        assert!(verify_perfect_star(&f).unwrap());
        // x^q y - x y^q over F_3 (q = 3 gives degree 4, char 3 ok)
        let ctx3 = FieldCtx::new(3, 1).unwrap();
        let g = MultiPoly::parse(ctx3.clone(), "x0^3*x1 + 2*x0*x1^3", Some(2)).unwrap();
        assert!(verify_perfect_star(&g).unwrap());
        // x^q y is not squarefree
        let h = MultiPoly::parse(ctx3.clone(), "x0^3*x1", Some(2)).unwrap();
        assert!(!verify_perfect_star(&h).unwrap());
        // squarefree but not a star: x(x+y)(x+2y)... degree 4 product of
        // 4 distinct lines IS mu_4-like only if cross ratios match
        let j = MultiPoly::parse(ctx3.clone(), "x0^4 + 2*x1^4", Some(2)).unwrap();
        let _ = verify_perfect_star(&j).unwrap();
    }

    #[test]
    fn align_lines_moves_forms() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let l1 = [ctx.one(), ctx.one(), Fe::ZERO];
        let l2 = [Fe::ZERO, ctx.one(), ctx.one()];
        let g = align_lines(&ctx, &l1, &l2).unwrap();
        assert!(g.is_invertible());
    }
}
