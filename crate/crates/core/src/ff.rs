//! Exact arithmetic in small finite fields `F_{p^k}`.
//!
//! Elements are stored as base-`p` digit strings packed into a machine word
//! (`c0` least significant), so an element is just an index into the field.
//! Multiplication goes through discrete-log tables built once per context;
//! addition works directly on the packed digits.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Field order cap: all arithmetic stays in one machine word and the
/// log/exp tables stay small.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

/// A field element, packed as `c0 + c1*p + ... + c_{k-1}*p^{k-1}`.
/// Only meaningful relative to the `FieldCtx` it came from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Fe(pub u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Immutable context for `F_{p^k}`; shareable across threads.
pub struct FieldCtx {
    p: u64,
    k: usize,
    q: u64,
    /// Monic irreducible modulus, coefficient list of length `k + 1`.
    modulus: Vec<u64>,
    /// `p^0 .. p^k`.
    p_pows: Vec<u64>,
    /// `exp[i] = g^i` for a fixed generator `g` of the unit group.
    exp: Vec<u32>,
    /// `log[packed element]`, unit group only; `log[0]` is a sentinel.
    log: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx(F_{}^{}, modulus {:?})", self.p, self.k, self.modulus)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// Polynomials over F_p (coefficient vectors, little endian), used only for
// modulus validation and table construction.
// ---------------------------------------------------------------------------

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    fp_rem(&mut prod, f, p);
    prod
}

fn fp_rem(a: &mut Vec<u64>, f: &[u64], p: u64) {
    let df = f.len() - 1;
    fp_trim(a);
    while a.len() > df {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - df;
        if lead != 0 {
            // f is monic
            for (i, &fi) in f.iter().enumerate() {
                let idx = shift + i;
                let sub = (lead * fi) % p;
                a[idx] = (a[idx] + p * p - sub) % p;
            }
        }
        fp_trim(a);
        if a.is_empty() {
            break;
        }
    }
}

fn fp_powmod_x(e: u64, f: &[u64], p: u64) -> Vec<u64> {
    // x^e mod f by square and multiply
    let mut base = vec![0u64, 1];
    fp_rem(&mut base, f, p);
    let mut acc = vec![1u64];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &base, f, p);
        }
        base = fp_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        // make b monic for the remainder step
        let lead = *b.last().unwrap();
        if lead != 1 {
            let inv = mod_inverse(lead, p);
            for c in b.iter_mut() {
                *c = (*c * inv) % p;
            }
        }
        fp_rem(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is a small prime
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mut bb = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let k = (f.len() - 1) as u64;
    if k == 0 {
        return false;
    }
    // x^(p^k) == x mod f
    let pk = p.checked_pow(k as u32).expect("field order overflow");
    let xpk = fp_powmod_x(pk, f, p);
    let mut x = vec![0u64, 1];
    fp_rem(&mut x, f, p);
    let mut xpk_minus_x = xpk.clone();
    while xpk_minus_x.len() < x.len() {
        xpk_minus_x.push(0);
    }
    for (i, &xi) in x.iter().enumerate() {
        xpk_minus_x[i] = (xpk_minus_x[i] + p - xi % p) % p;
    }
    fp_trim(&mut xpk_minus_x);
    if !xpk_minus_x.is_empty() {
        return false;
    }
    // gcd(x^(p^(k/t)) - x, f) == 1 for each prime t | k
    for t in prime_factors(k) {
        let e = p.pow((k / t) as u32);
        let mut g = fp_powmod_x(e, f, p);
        while g.len() < 2 {
            g.push(0);
        }
        g[1] = (g[1] + p - 1) % p;
        fp_trim(&mut g);
        let d = fp_gcd(&g, f, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible of degree `k` over `F_p`, in the fixed
/// enumeration order of packed low-coefficient vectors.
fn default_modulus(p: u64, k: usize) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1]; // x
    }
    let pk = p.pow(k as u32);
    for packed in 0..pk {
        let mut f = Vec::with_capacity(k + 1);
        let mut m = packed;
        for _ in 0..k {
            f.push(m % p);
            m /= p;
        }
        f.push(1);
        if fp_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomial of degree {k} over F_{p} exists");
}

impl FieldCtx {
    /// `F_{p^k}` with the built-in (deterministic) modulus.
    pub fn new(p: u64, k: usize) -> Result<Arc<FieldCtx>> {
        let modulus = if k == 1 { vec![0, 1] } else { default_modulus(p, k) };
        Self::with_modulus(p, k, modulus)
    }

    pub fn with_modulus(p: u64, k: usize, modulus: Vec<u64>) -> Result<Arc<FieldCtx>> {
        if !is_prime(p) {
            return Err(Error::Malformed(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::Malformed("extension degree must be >= 1".into()));
        }
        let q = (p as u128).checked_pow(k as u32).filter(|&q| q <= MAX_FIELD_ORDER as u128);
        let q = match q {
            Some(q) => q as u64,
            None => {
                return Err(Error::Capacity(format!(
                    "field order {p}^{k} exceeds the machine-word cap"
                )))
            }
        };
        if modulus.len() != k + 1 || modulus[k] != 1 {
            return Err(Error::Malformed(format!(
                "modulus must be monic of degree {k} (got {} coefficients)",
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::Malformed("modulus coefficients must lie in [0, p)".into()));
        }
        if k > 1 && !fp_is_irreducible(&modulus, p) {
            return Err(Error::Malformed(format!(
                "modulus {modulus:?} is reducible over F_{p}"
            )));
        }
        let mut p_pows = Vec::with_capacity(k + 1);
        let mut acc = 1u64;
        for _ in 0..=k {
            p_pows.push(acc);
            acc = acc.saturating_mul(p);
        }
        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            p_pows,
            exp: Vec::new(),
            log: Vec::new(),
        };
        ctx.build_tables();
        Ok(Arc::new(ctx))
    }

    /// Parse `"p^k"` or `"p^k/modulus=c0,c1,...,ck"` (also plain `"p"`).
    pub fn parse_spec(spec: &str) -> Result<Arc<FieldCtx>> {
        let (base, modulus) = match spec.split_once("/modulus=") {
            Some((b, m)) => (b, Some(m)),
            None => (spec, None),
        };
        let (p_str, k_str) = match base.split_once('^') {
            Some((p, k)) => (p, k),
            None => (base, "1"),
        };
        let p: u64 = p_str
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad field spec {spec:?}")))?;
        let k: usize = k_str
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad field spec {spec:?}")))?;
        match modulus {
            None => FieldCtx::new(p, k),
            Some(m) => {
                let coeffs: Vec<u64> = m
                    .split(',')
                    .map(|c| c.trim().parse().map_err(|_| {
                        Error::Malformed(format!("bad modulus in field spec {spec:?}"))
                    }))
                    .collect::<Result<_>>()?;
                FieldCtx::with_modulus(p, k, coeffs)
            }
        }
    }

    pub fn spec_string(&self) -> String {
        format!("{}^{}", self.p, self.k)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        if q == 2 {
            self.exp = vec![1];
            self.log = vec![u32::MAX, 0];
            return;
        }
        let gen = self.find_generator();
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = Fe(1);
        for i in 0..(q - 1) {
            exp.push(cur.0 as u32);
            log[cur.0 as usize] = i as u32;
            cur = self.mul_slow(cur, gen);
        }
        debug_assert_eq!(cur, Fe(1));
        self.exp = exp;
        self.log = log;
    }

    fn find_generator(&self) -> Fe {
        let order = self.q - 1;
        let factors = prime_factors(order);
        'cand: for c in 1..self.q {
            let g = Fe(c);
            for &t in &factors {
                if self.pow_slow(g, order / t) == Fe(1) {
                    continue 'cand;
                }
            }
            return g;
        }
        unreachable!("unit group of a finite field is cyclic");
    }

    // -- slow (table-free) arithmetic used during construction --------------

    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        let av = self.digits(a);
        let bv = self.digits(b);
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &ai) in av.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in bv.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % self.p;
            }
        }
        fp_rem(&mut prod, &self.modulus, self.p);
        prod.resize(self.k, 0);
        let mut packed = 0u64;
        for (i, &c) in prod.iter().enumerate() {
            packed += c * self.p_pows[i];
        }
        Fe(packed)
    }

    fn pow_slow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    // -- accessors ----------------------------------------------------------

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    pub fn one(&self) -> Fe {
        Fe(1)
    }

    /// The packed generator of `F_{p^k}` over `F_p` (the residue of `t`),
    /// meaningful for `k > 1`.
    pub fn gen(&self) -> Fe {
        Fe(self.p % self.q)
    }

    pub fn from_prime(&self, c: u64) -> Fe {
        Fe(c % self.p)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Fe> {
        if coeffs.len() > self.k {
            return Err(Error::Malformed(format!(
                "element has {} coefficients but the field has degree {}",
                coeffs.len(),
                self.k
            )));
        }
        let mut packed = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            packed += (c % self.p) * self.p_pows[i];
        }
        Ok(Fe(packed))
    }

    pub fn digits(&self, a: Fe) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.k);
        let mut m = a.0;
        for _ in 0..self.k {
            v.push(m % self.p);
            m /= self.p;
        }
        v
    }

    /// Key realizing the lexicographic order on coefficient vectors
    /// (highest coefficient compared first, so the prime subfield sorts
    /// lowest).  Used for deterministic smallest-element picks; coincides
    /// with the packed representation.
    pub fn lex_key(&self, a: Fe) -> u64 {
        a.0
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    // -- arithmetic ---------------------------------------------------------

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let mut out = 0u64;
        let (mut x, mut y) = (a.0, b.0);
        for i in 0..self.k {
            let s = (x % self.p + y % self.p) % self.p;
            out += s * self.p_pows[i];
            x /= self.p;
            y /= self.p;
        }
        out_fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let mut out = 0u64;
        let mut x = a.0;
        for i in 0..self.k {
            let c = x % self.p;
            if c != 0 {
                out += (self.p - c) * self.p_pows[i];
            }
            x /= self.p;
        }
        out_fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe(0);
        }
        let la = self.log[a.0 as usize] as u64;
        let lb = self.log[b.0 as usize] as u64;
        Fe(self.exp[((la + lb) % (self.q - 1)) as usize] as u64)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let la = self.log[a.0 as usize] as u64;
        Ok(Fe(self.exp[((self.q - 1 - la) % (self.q - 1)) as usize] as u64))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if a.is_zero() {
            return if e == 0 { Fe(1) } else { Fe(0) };
        }
        let la = self.log[a.0 as usize] as u128;
        let e = e as u128 % (self.q - 1) as u128;
        Fe(self.exp[((la * e) % (self.q - 1) as u128) as usize] as u64)
    }

    /// `a^(p^e)`.
    pub fn frobenius(&self, a: Fe, e: u64) -> Fe {
        if a.0 <= 1 {
            return a;
        }
        let pe = mod_pow(self.p, e, self.q - 1);
        self.pow(a, pe)
    }

    /// The unique `b` with `b^(p^e) = a` (finite fields are perfect).
    pub fn frobenius_root(&self, a: Fe, e: u64) -> Fe {
        let k = self.k as u64;
        let r = (k - e % k) % k;
        self.frobenius(a, r)
    }

    /// Some `b` with `b^m = a`, or `None` if `a` is not an `m`-th power.
    /// Deterministic choice: smallest in the lexicographic element order.
    pub fn nth_root(&self, a: Fe, m: u64) -> Result<Option<Fe>> {
        if m == 0 {
            return Err(Error::Domain("0-th root is undefined".into()));
        }
        if a.is_zero() {
            return Ok(Some(Fe(0)));
        }
        let order = self.q - 1;
        let la = self.log[a.0 as usize] as u64;
        let g = gcd(m % order, order).max(1);
        let g = if m % order == 0 { order } else { g };
        if la % g != 0 {
            return Ok(None);
        }
        // solve m*x = la (mod order)
        let m_red = (m % order) / g;
        let ord_red = order / g;
        let x0 = if ord_red == 1 {
            0
        } else {
            (la / g) % ord_red * mod_inverse_general(m_red % ord_red, ord_red) % ord_red
        };
        let mut best: Option<(u64, Fe)> = None;
        for t in 0..g {
            let x = (x0 + t * ord_red) % order;
            let b = Fe(self.exp[x as usize] as u64);
            debug_assert_eq!(self.pow(b, m), a);
            let key = self.lex_key(b);
            if best.map_or(true, |(bk, _)| key < bk) {
                best = Some((key, b));
            }
        }
        Ok(best.map(|(_, b)| b))
    }

    /// `F_{p^(k*factor)}` together with the embedding of this field.
    pub fn extend(self: &Arc<Self>, factor: usize) -> Result<(Arc<FieldCtx>, Embedding)> {
        if factor == 0 {
            return Err(Error::Domain("extension factor must be >= 1".into()));
        }
        let k2 = self.k * factor;
        let ctx2 = FieldCtx::new(self.p, k2)?;
        let emb = Embedding::locate(self.clone(), ctx2.clone())?;
        Ok((ctx2, emb))
    }

    // -- text codec ---------------------------------------------------------

    pub fn format_elem(&self, a: Fe) -> String {
        if self.k == 1 {
            return format!("{}", a.0);
        }
        let d = self.digits(a);
        let parts: Vec<String> = d.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn parse_elem(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let coeffs: Vec<u64> = inner
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse()
                        .map_err(|_| Error::Malformed(format!("bad field element {s:?}")))
                })
                .collect::<Result<_>>()?;
            self.from_coeffs(&coeffs)
        } else {
            let c: u64 = s
                .parse()
                .map_err(|_| Error::Malformed(format!("bad field element {s:?}")))?;
            Ok(self.from_prime(c))
        }
    }
}

fn out_fe(v: u64) -> Fe {
    Fe(v)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mod_inverse_general(a: u64, m: u64) -> u64 {
    // extended Euclid; gcd(a, m) == 1 assumed
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        let tmp = old_r - qt * r;
        old_r = r;
        r = tmp;
        let tmp = old_s - qt * s;
        old_s = s;
        s = tmp;
    }
    (old_s.rem_euclid(m as i128)) as u64
}

/// Injective field map from a subfield context into an extension context,
/// determined by the image of the subfield generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub from: Arc<FieldCtx>,
    pub to: Arc<FieldCtx>,
    gen_image: Fe,
}

impl Embedding {
    /// Identity embedding of a context into itself.
    pub fn identity(ctx: Arc<FieldCtx>) -> Embedding {
        let gen_image = ctx.gen();
        Embedding { from: ctx.clone(), to: ctx, gen_image }
    }

    fn locate(from: Arc<FieldCtx>, to: Arc<FieldCtx>) -> Result<Embedding> {
        if to.p() != from.p() || to.k() % from.k() != 0 {
            return Err(Error::Domain(format!(
                "no embedding of F_{}^{} into F_{}^{}",
                from.p(),
                from.k(),
                to.p(),
                to.k()
            )));
        }
        // smallest root (lex order) of the subfield modulus in the big field
        let mut best: Option<(u64, Fe)> = None;
        for cand in to.elements() {
            let mut acc = to.zero();
            for &c in from.modulus().iter().rev() {
                acc = to.add(to.mul(acc, cand), to.from_prime(c));
            }
            if acc.is_zero() {
                let key = to.lex_key(cand);
                if best.map_or(true, |(bk, _)| key < bk) {
                    best = Some((key, cand));
                }
            }
        }
        match best {
            Some((_, root)) => Ok(Embedding { from, to, gen_image: root }),
            None => Err(Error::Internal(
                "subfield modulus has no root in the extension".into(),
            )),
        }
    }

    pub fn apply(&self, a: Fe) -> Fe {
        let d = self.from.digits(a);
        let mut acc = self.to.zero();
        for &c in d.iter().rev() {
            acc = self
                .to
                .add(self.to.mul(acc, self.gen_image), self.to.from_prime(c));
        }
        acc
    }

    /// Composition `other . self` (first self, then other).
    pub fn then(&self, other: &Embedding) -> Embedding {
        debug_assert_eq!(*self.to, *other.from);
        Embedding {
            from: self.from.clone(),
            to: other.to.clone(),
            gen_image: other.apply_raw_chain(self.gen_image),
        }
    }

    fn apply_raw_chain(&self, a: Fe) -> Fe {
        self.apply(a)
    }
}
