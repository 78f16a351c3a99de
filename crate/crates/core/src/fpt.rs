//! The nu sequence `nu_e = max{N : f^N not in m^[p^e]}`, the derived
//! F-pure-threshold interval, and the two proof-backed exact
//! characterizations (Frobenius forms and powers of linear forms).

use num_rational::Ratio;

use crate::error::{Budget, Error, Result};
use crate::poly::{Monomial, MultiPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NuRecord {
    pub e: u64,
    pub nu: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactReason {
    FrobeniusForm,
    PowerOfLinearForm,
}

impl ExactReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExactReason::FrobeniusForm => "frobenius-form",
            ExactReason::PowerOfLinearForm => "power-of-linear-form",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptInterval {
    pub degree: u32,
    pub levels: Vec<NuRecord>,
    /// `max_e nu_e / p^e` over the computed levels.
    pub lo: Ratio<u64>,
    /// `min_e (nu_e + 1) / p^e` over the computed levels.
    pub hi: Ratio<u64>,
    pub exact: Option<(Ratio<u64>, ExactReason)>,
}

/// Largest `N` with `f^N` not in `m^[p^e]`, by binary search over
/// `[0, n * p^e)`; valid because membership is monotone in `N`.
pub fn nu(f: &MultiPoly, e: u64, budget: &mut Budget) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::Domain("nu of the zero polynomial".into()));
    }
    if f.homogeneous_degree().map_or(true, |d| d == 0) {
        return Err(Error::Domain(
            "nu needs a homogeneous form of positive degree".into(),
        ));
    }
    let p = f.ctx().p();
    let q = p
        .checked_pow(e as u32)
        .ok_or_else(|| Error::Capacity(format!("p^{e} overflows")))?;
    let upper = f.nvars() as u64 * q; // f^(n*q) is always in m^[q]
    // invariant: f^lo not in m^[q], f^hi in m^[q]
    let mut lo = 0u64;
    let mut hi = upper;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f.truncated_power(mid, e, budget)?.is_zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Compute `nu_e` for `e = 1..=e_max` and bracket the threshold.
///
/// A budget exhaustion mid-sweep surfaces as a `Capacity` error whose
/// message carries the levels that did complete.
pub fn fpt_interval(f: &MultiPoly, e_max: u64, budget: &mut Budget) -> Result<FptInterval> {
    if e_max < 1 {
        return Err(Error::Domain("fpt_interval needs e_max >= 1".into()));
    }
    let d = f
        .homogeneous_degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Domain("fpt needs a homogeneous form of positive degree".into()))?;
    let p = f.ctx().p();
    let mut levels: Vec<NuRecord> = Vec::new();
    for e in 1..=e_max {
        match nu(f, e, budget) {
            Ok(n) => {
                if let Some(prev) = levels.last() {
                    if p * prev.nu > n {
                        return Err(Error::Internal(format!(
                            "nu sequence not monotone: p*nu_{} = {} > nu_{} = {}",
                            prev.e,
                            p * prev.nu,
                            e,
                            n
                        )));
                    }
                }
                levels.push(NuRecord { e, nu: n });
            }
            Err(Error::Capacity(msg)) => {
                let partial: Vec<String> = levels
                    .iter()
                    .map(|r| format!("nu_{} = {}", r.e, r.nu))
                    .collect();
                return Err(Error::Capacity(format!(
                    "{msg}; partial results: [{}]",
                    partial.join(", ")
                )));
            }
            Err(err) => return Err(err),
        }
    }
    let mut lo = Ratio::new(0, 1);
    let mut hi = Ratio::new(f.nvars() as u64, 1);
    for r in &levels {
        let q = p.pow(r.e as u32);
        lo = lo.max(Ratio::new(r.nu, q));
        hi = hi.min(Ratio::new(r.nu + 1, q));
    }
    let exact = fpt_exact(f)?;
    if let Some((v, _)) = exact {
        if v < lo || v > hi {
            return Err(Error::Internal(format!(
                "exact threshold {v} escapes the bracket [{lo}, {hi}]"
            )));
        }
    }
    Ok(FptInterval { degree: d, levels, lo, hi, exact })
}

/// The two characterizations that pin the threshold exactly:
/// `1/(d-1)` for a reduced degree-`q+1` form lying in `m^[q]` (including
/// `q = 1`, where every reduced quadric gets threshold `1`), and `1/d` for a
/// scalar multiple of `L^d` with `L` linear.
pub fn fpt_exact(f: &MultiPoly) -> Result<Option<(Ratio<u64>, ExactReason)>> {
    let d = match f.homogeneous_degree() {
        Some(d) if d >= 1 => d,
        _ => return Ok(None),
    };
    let p = f.ctx().p();
    if d >= 2 {
        let q = d as u64 - 1;
        // q must be a power of p (q = 1 allowed: e = 0)
        let mut e = 0u64;
        let mut pe = 1u64;
        let is_p_power = loop {
            if pe == q {
                break true;
            }
            if pe > q {
                break false;
            }
            pe *= p;
            e += 1;
        };
        if is_p_power && f.in_frobenius_power(e) && f.is_reduced(8, 0x5eed)? {
            return Ok(Some((Ratio::new(1, d as u64 - 1), ExactReason::FrobeniusForm)));
        }
    }
    if detect_power_of_linear_form(f)? {
        return Ok(Some((Ratio::new(1, d as u64), ExactReason::PowerOfLinearForm)));
    }
    Ok(None)
}

/// Is `f = a * L^d` for some nonzero scalar `a` and linear form `L`?
fn detect_power_of_linear_form(f: &MultiPoly) -> Result<bool> {
    let ctx = f.ctx().clone();
    let p = ctx.p();
    // strip the p-power part: over a perfect field f is a p-th power exactly
    // when every exponent is divisible by p
    let mut h = f.clone();
    while h
        .terms()
        .all(|(m, _)| m.0.iter().all(|&e| e as u64 % p == 0))
    {
        let mut root = MultiPoly::zero(ctx.clone(), h.nvars());
        let mut parts = Vec::new();
        for (m, c) in h.terms() {
            let exps: Vec<u32> = m.0.iter().map(|&e| e / p as u32).collect();
            parts.push((Monomial(exps), ctx.frobenius_root(c, 1)));
        }
        for (m, c) in parts {
            root = root.add(&MultiPoly::from_term(ctx.clone(), h.nvars(), m, c))?;
        }
        h = root;
    }
    let m = match h.homogeneous_degree() {
        Some(m) if m >= 1 => m,
        _ => return Ok(false),
    };
    if m as u64 % p == 0 {
        // a power of a linear form with p | degree is a p-th power, which the
        // stripping loop would have consumed
        return Ok(false);
    }
    if m == 1 {
        return Ok(true);
    }
    // candidate L normalized monic at the smallest appearing variable
    let i0 = match (0..h.nvars()).find(|&i| h.terms().any(|(mon, _)| mon.0[i] > 0)) {
        Some(i) => i,
        None => return Ok(false),
    };
    let mut pure = vec![0u32; h.nvars()];
    pure[i0] = m;
    let a = h.coeff(&Monomial(pure));
    if a.is_zero() {
        return Ok(false); // x_i0^m must appear in a*(x_i0 + ...)^m
    }
    let m_inv = ctx.inv(ctx.from_prime(m as u64 % p))?;
    let mut l = MultiPoly::var(ctx.clone(), h.nvars(), i0);
    for j in 0..h.nvars() {
        if j == i0 {
            continue;
        }
        let mut exps = vec![0u32; h.nvars()];
        exps[i0] = m - 1;
        exps[j] = 1;
        // coeff of x_i0^(m-1) x_j in a*L^m is a*m*c_j
        let c = ctx.mul(ctx.mul(h.coeff(&Monomial(exps)), ctx.inv(a)?), m_inv);
        if !c.is_zero() {
            l = l.add(&MultiPoly::from_term(
                ctx.clone(),
                h.nvars(),
                Monomial({
                    let mut ex = vec![0u32; h.nvars()];
                    ex[j] = 1;
                    ex
                }),
                c,
            ))?;
        }
    }
    Ok(l.pow(m)?.scalar_mul(a) == h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipReport {
    pub member: bool,
    /// Vacuously true when `member` holds; otherwise verifies the level-`2e`
    /// refinement `nu_{2e} >= p^e + 1`.
    pub nu_refinement_holds: bool,
}

pub fn check_membership_criterion(
    f: &MultiPoly,
    e: u64,
    budget: &mut Budget,
) -> Result<MembershipReport> {
    if f.homogeneous_degree().is_none() {
        return Err(Error::Domain("membership criterion needs a homogeneous form".into()));
    }
    let member = f.in_frobenius_power(e);
    if member {
        return Ok(MembershipReport { member: true, nu_refinement_holds: true });
    }
    let pe = f
        .ctx()
        .p()
        .checked_pow(e as u32)
        .ok_or_else(|| Error::Capacity(format!("p^{e} overflows")))?;
    let n2e = nu(f, 2 * e, budget)?;
    Ok(MembershipReport { member: false, nu_refinement_holds: n2e >= pe + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;
    use std::sync::Arc;

    fn poly(ctx: &Arc<FieldCtx>, s: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(ctx.clone(), s, Some(n)).unwrap()
    }

    #[test]
    fn nu_monomial_and_diagonal() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let mut b = Budget::unlimited();
        let xy = poly(&ctx, "x0*x1", 2);
        assert_eq!(nu(&xy, 2, &mut b).unwrap(), 3);
        let cube = poly(&ctx, "x0^3 + x1^3", 2);
        assert_eq!(nu(&cube, 2, &mut b).unwrap(), 1);
        // x^d in one variable: nu_e = ceil(p^e/d) - 1
        let x2 = poly(&ctx, "x0^2", 1);
        for e in 0..5u64 {
            let pe = 2u64.pow(e as u32);
            assert_eq!(nu(&x2, e, &mut b).unwrap(), pe.div_ceil(2) - 1);
        }
    }

    #[test]
    fn interval_for_xy() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let xy = poly(&ctx, "x0*x1", 2);
        let iv = fpt_interval(&xy, 3, &mut Budget::unlimited()).unwrap();
        assert_eq!(iv.lo, Ratio::new(7, 8));
        assert_eq!(iv.hi, Ratio::new(1, 1));
        // reduced quadric: exact = 1 via the q = 1 Frobenius-form case
        assert_eq!(iv.exact, Some((Ratio::new(1, 1), ExactReason::FrobeniusForm)));
    }

    #[test]
    fn exact_diagonal_cubic_and_cusp() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let diag = poly(&ctx, "x0^3 + x1^3 + x2^3", 3);
        assert_eq!(
            fpt_exact(&diag).unwrap(),
            Some((Ratio::new(1, 2), ExactReason::FrobeniusForm))
        );
        let cusp = poly(&ctx, "x0^3 + x1^2*x2", 3);
        assert_eq!(
            fpt_exact(&cusp).unwrap(),
            Some((Ratio::new(1, 2), ExactReason::FrobeniusForm))
        );
    }

    #[test]
    fn exact_power_of_linear_form() {
        let ctx = FieldCtx::new(3, 1).unwrap();
        let f = poly(&ctx, "x0^3 + x1^3", 2); // (x0+x1)^3 in char 3
        assert_eq!(
            fpt_exact(&f).unwrap(),
            Some((Ratio::new(1, 3), ExactReason::PowerOfLinearForm))
        );
        let g = poly(&ctx, "x0^2 + 2*x0*x1 + x1^2", 2); // (x0+x1)^2
        assert_eq!(
            fpt_exact(&g).unwrap(),
            Some((Ratio::new(1, 2), ExactReason::PowerOfLinearForm))
        );
        let h = poly(&ctx, "x0^2 + x1^2", 2); // irreducible over F_3, reduced quadric
        assert_eq!(
            fpt_exact(&h).unwrap(),
            Some((Ratio::new(1, 1), ExactReason::FrobeniusForm))
        );
        let not = poly(&ctx, "x0^3 + x1^3 + x0*x1^2", 2);
        assert!(!matches!(
            fpt_exact(&not).unwrap(),
            Some((_, ExactReason::PowerOfLinearForm))
        ));
    }

    #[test]
    fn membership_refinement() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let mut b = Budget::unlimited();
        let diag = poly(&ctx, "x0^3 + x1^3 + x2^3", 3);
        let r = check_membership_criterion(&diag, 1, &mut b).unwrap();
        assert!(r.member);
        let cube = poly(&ctx, "x0^3 + x1^3", 2);
        let r = check_membership_criterion(&cube, 2, &mut b).unwrap();
        assert!(!r.member);
        assert!(r.nu_refinement_holds); // f^5 not in m^[16]
    }

    #[test]
    fn budget_exhaustion_reports_partials() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let f = poly(&ctx, "x0^3 + x1^3 + x2^3 + x0*x1*x2", 3);
        let mut tiny = Budget::new(500);
        match fpt_interval(&f, 6, &mut tiny) {
            Err(Error::Capacity(msg)) => assert!(msg.contains("partial results")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }
}
