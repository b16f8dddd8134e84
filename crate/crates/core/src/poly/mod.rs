//! Sparse multivariate polynomials over Z/p^e with lex-ordered packed
//! monomials, divided-power differential operators and a text format.

mod diffop;
mod parse;

pub use diffop::DiffOp;
pub use parse::{parse_poly, parse_poly_with_p};

use std::collections::HashMap;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Result, WittError};
use crate::exactnum::{binomial_fast, checked_pow, Zmod};

pub const MAX_VARS: usize = 4;
const FIELD_BITS: u32 = 16;
const FIELD_MASK: u64 = (1 << FIELD_BITS) - 1;
pub const MAX_EXP: u32 = FIELD_MASK as u32;

/// A monomial T1^a1...Tn^an packed into a u64, T1 in the highest field,
/// so integer order is lex order with T1 > T2 > ...
pub type Mono = u64;

#[inline]
fn shift(i: usize) -> u32 {
    (MAX_VARS - 1 - i) as u32 * FIELD_BITS
}

pub fn mono_pack(exps: &[u32]) -> Mono {
    assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
    let mut m = 0;
    for (i, &e) in exps.iter().enumerate() {
        assert!(e <= MAX_EXP, "exponent {e} overflows the monomial encoding");
        m |= (e as u64) << shift(i);
    }
    m
}

#[inline]
pub fn mono_exp(m: Mono, i: usize) -> u32 {
    ((m >> shift(i)) & FIELD_MASK) as u32
}

pub fn mono_exps(m: Mono, n: usize) -> Vec<u32> {
    (0..n).map(|i| mono_exp(m, i)).collect()
}

pub fn mono_deg(m: Mono) -> u32 {
    (0..MAX_VARS).map(|i| mono_exp(m, i)).sum()
}

pub fn mono_var(i: usize, e: u32) -> Mono {
    assert!(e <= MAX_EXP);
    (e as u64) << shift(i)
}

/// Componentwise a <= b.
#[inline]
pub fn mono_divides(a: Mono, b: Mono) -> bool {
    (0..MAX_VARS).all(|i| mono_exp(a, i) <= mono_exp(b, i))
}

pub fn mono_scale(m: Mono, k: u64) -> Mono {
    let mut out = 0;
    for i in 0..MAX_VARS {
        let e = mono_exp(m, i) as u64 * k;
        assert!(e <= MAX_EXP as u64, "exponent overflows the monomial encoding");
        out |= e << shift(i);
    }
    out
}

/// Smallest p-adic valuation of the exponents; `None` for the unit monomial.
pub fn mono_min_val(m: Mono, p: u64) -> Option<u32> {
    (0..MAX_VARS)
        .map(|i| mono_exp(m, i))
        .filter(|&e| e > 0)
        .map(|e| crate::exactnum::val_u64(e as u64, p).unwrap())
        .min()
}

/// All monomials in `n` variables of total degree <= `deg`, ascending lex.
pub fn monomials_up_to(n: usize, deg: u32) -> Vec<Mono> {
    fn rec(i: usize, n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Mono>) {
        if i == n {
            out.push(mono_pack(cur));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(i + 1, n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, deg, &mut Vec::new(), &mut out);
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    ring: Zmod,
    nvars: usize,
    /// Ascending by monomial, no zero coefficients.
    terms: Vec<(Mono, u64)>,
}

impl MultiPoly {
    pub fn zero(ring: Zmod, nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        MultiPoly {
            ring,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: Zmod, nvars: usize, c: u64) -> Self {
        Self::monomial(ring, nvars, 0, c)
    }

    pub fn one(ring: Zmod, nvars: usize) -> Self {
        Self::constant(ring, nvars, 1)
    }

    pub fn monomial(ring: Zmod, nvars: usize, m: Mono, c: u64) -> Self {
        let mut p = Self::zero(ring, nvars);
        let c = c % ring.m;
        if c != 0 {
            p.terms.push((m, c));
        }
        p
    }

    pub fn var(ring: Zmod, nvars: usize, i: usize) -> Self {
        Self::monomial(ring, nvars, mono_var(i, 1), 1)
    }

    /// Builds from arbitrary (monomial, coefficient) pairs, merging repeats.
    pub fn from_terms(ring: Zmod, nvars: usize, terms: impl IntoIterator<Item = (Mono, u64)>) -> Self {
        let mut acc: FxHashMap<Mono, u64> = FxHashMap::default();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(0);
            *e = ring.add(*e, c % ring.m);
        }
        Self::from_map(ring, nvars, acc)
    }

    fn from_map(ring: Zmod, nvars: usize, acc: FxHashMap<Mono, u64>) -> Self {
        let mut terms: Vec<(Mono, u64)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        terms.sort_unstable_by_key(|t| t.0);
        MultiPoly { ring, nvars, terms }
    }

    pub fn ring(&self) -> Zmod {
        self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Mono, u64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> u64 {
        match self.terms.binary_search_by_key(&m, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| mono_deg(t.0)).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.iter().map(|t| mono_exp(t.0, i)).max()
    }

    /// Smallest valuation among the coefficients (`e` for zero).
    pub fn min_val(&self) -> u32 {
        self.terms
            .iter()
            .map(|&(_, c)| self.ring.val(c))
            .min()
            .unwrap_or(self.ring.e)
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(self.ring, other.ring, "coefficient rings differ");
        assert_eq!(self.nvars, other.nvars, "variable counts differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compat(other);
        let r = self.ring;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let c = r.add(a[i].1, b[j].1);
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn neg(&self) -> Self {
        let r = self.ring;
        MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms: self.terms.iter().map(|&(m, c)| (m, r.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: u64) -> Self {
        let r = self.ring;
        let k = k % r.m;
        MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter_map(|&(m, c)| {
                    let x = r.mul(c, k);
                    (x != 0).then_some((m, x))
                })
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: Mono, c: u64) -> Self {
        let r = self.ring;
        if let (Some(d), true) = (self.total_degree(), m != 0) {
            assert!(d + mono_deg(m) <= MAX_EXP, "exponent overflow");
        }
        MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter_map(|&(a, x)| {
                    let y = r.mul(x, c % r.m);
                    (y != 0).then_some((a + m, y))
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ring, self.nvars);
        }
        if other.terms.len() == 1 {
            let (m, c) = other.terms[0];
            return self.mul_monomial(m, c);
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms[0];
            return other.mul_monomial(m, c);
        }
        let d = self.total_degree().unwrap() + other.total_degree().unwrap();
        assert!(d <= MAX_EXP, "exponent overflow in product");
        let work = self.terms.len() * other.terms.len();
        if work >= 4096 {
            if let Some(out) = self.mul_dense(other) {
                return out;
            }
        }
        let r = self.ring;
        let mut acc: FxHashMap<Mono, u64> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * 4, Default::default());
        for &(a, x) in &self.terms {
            for &(b, y) in &other.terms {
                let e = acc.entry(a + b).or_insert(0);
                *e = r.add(*e, r.mul(x, y));
            }
        }
        Self::from_map(r, self.nvars, acc)
    }

    /// Product accumulated in an array over the exponent box; `None` when
    /// the box is too large to be worth it.
    fn mul_dense(&self, other: &Self) -> Option<Self> {
        let n = self.nvars.max(1);
        let mut ext = vec![0usize; n];
        let mut cells = 1usize;
        for (i, e) in ext.iter_mut().enumerate() {
            *e = (self.degree_in(i).unwrap_or(0) + other.degree_in(i).unwrap_or(0)) as usize + 1;
            cells = cells.checked_mul(*e)?;
        }
        if cells > (1 << 24) || cells > 64 * self.terms.len() * other.terms.len() {
            return None;
        }
        let mut stride = vec![1usize; n];
        for i in (0..n - 1).rev() {
            stride[i] = stride[i + 1] * ext[i + 1];
        }
        let index = |m: Mono| (0..n).map(|i| mono_exp(m, i) as usize * stride[i]).sum::<usize>();
        let ia: Vec<usize> = self.terms.iter().map(|t| index(t.0)).collect();
        let ib: Vec<usize> = other.terms.iter().map(|t| index(t.0)).collect();
        let r = self.ring;
        let mut acc = vec![0u64; cells];
        let lazy = (r.m as u128).pow(2) * (self.terms.len().min(other.terms.len()) as u128) < (1u128 << 64);
        let (short, long, is, il) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms, &ia, &ib)
        } else {
            (&other.terms, &self.terms, &ib, &ia)
        };
        for (&(_, x), &a) in short.iter().zip(is.iter()) {
            for (&(_, y), &b) in long.iter().zip(il.iter()) {
                let c = &mut acc[a + b];
                if lazy {
                    *c += x * y;
                } else {
                    *c = r.add(*c, r.mul(x, y));
                }
            }
        }
        let mut terms = Vec::new();
        for (idx, &c) in acc.iter().enumerate() {
            let c = c % r.m;
            if c != 0 {
                let mut m = 0;
                let mut rem = idx;
                for i in 0..n {
                    m |= mono_var(i, (rem / stride[i]) as u32);
                    rem %= stride[i];
                }
                terms.push((m, c));
            }
        }
        Some(MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms,
        })
    }

    pub fn pow(&self, mut k: u64) -> Self {
        if (2..=6).contains(&self.terms.len()) && k >= 4 {
            return self.pow_split(k);
        }
        let mut base = self.clone();
        let mut acc = Self::one(self.ring, self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Power of a sparse polynomial via (t + rest)^k = sum C(k,i) t^i rest^(k-i),
    /// building the powers of rest one factor at a time. Much cheaper than
    /// squaring when the result has far fewer terms than the square of a half power.
    fn pow_split(&self, k: u64) -> Self {
        let d = self.total_degree().unwrap() as u64 * k;
        assert!(d <= MAX_EXP as u64, "exponent overflow in power");
        let r = self.ring;
        let (m0, c0) = self.terms[0];
        let rest = MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms: self.terms[1..].to_vec(),
        };
        let mut rest_pows = Vec::with_capacity(k as usize + 1);
        rest_pows.push(Self::one(r, self.nvars));
        for j in 1..=k as usize {
            let next = rest_pows[j - 1].mul(&rest);
            rest_pows.push(next);
        }
        let mut acc: FxHashMap<Mono, u64> = FxHashMap::default();
        let (mut tm, mut tc) = (0 as Mono, 1 % r.m);
        for i in 0..=k {
            let c = r.mul(binomial_fast(k, i, r), tc);
            if c != 0 {
                for &(m, x) in rest_pows[(k - i) as usize].terms() {
                    let e = acc.entry(m + tm).or_insert(0);
                    *e = r.add(*e, r.mul(x, c));
                }
            }
            if i < k {
                tm += m0;
                tc = r.mul(tc, c0);
            }
        }
        Self::from_map(r, self.nvars, acc)
    }

    /// Reduces coefficients into Z/p^e for a smaller e.
    pub fn reduce_to(&self, e: u32) -> Self {
        assert!(e <= self.ring.e, "reduce_to can only lower precision");
        let r = self.ring.with_exp(e);
        MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter_map(|&(m, c)| {
                    let x = c % r.m;
                    (x != 0).then_some((m, x))
                })
                .collect(),
        }
    }

    /// Reinterprets coefficients (taken in [0, p^e)) in Z/p^e' for e' >= e.
    pub fn lift_to(&self, e: u32) -> Self {
        assert!(e >= self.ring.e, "lift_to can only raise precision");
        MultiPoly {
            ring: self.ring.with_exp(e),
            nvars: self.nvars,
            terms: self.terms.clone(),
        }
    }

    /// Multiplies by p^k, moving from Z/p^e to Z/p^(e+k).
    pub fn shift_up(&self, k: u32) -> Self {
        let r = self.ring.with_exp(self.ring.e + k);
        let pk = checked_pow(r.p, k).unwrap();
        MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms: self.terms.iter().map(|&(m, c)| (m, c * pk)).collect(),
        }
    }

    /// Divides by p^k, moving from Z/p^e to Z/p^(e-k); `None` if some
    /// coefficient is not divisible.
    pub fn div_p_pow(&self, k: u32) -> Option<Self> {
        if k > self.ring.e {
            return if self.is_zero() {
                Some(Self::zero(self.ring.with_exp(0), self.nvars))
            } else {
                None
            };
        }
        let pk = checked_pow(self.ring.p, k).unwrap();
        let r = self.ring.with_exp(self.ring.e - k);
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            if c % pk != 0 {
                return None;
            }
            let x = (c / pk) % r.m;
            if x != 0 {
                terms.push((m, x));
            }
        }
        Some(MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms,
        })
    }

    /// Substitutes T_i -> T_i^(p^k), keeping coefficients. Over F_p this is
    /// the k-th power of Frobenius.
    pub fn frob_sub(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let q = checked_pow(self.ring.p, k).unwrap();
        MultiPoly {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().map(|&(m, c)| (mono_scale(m, q), c)).collect(),
        }
    }

    /// p-th root over F_p.
    pub fn pth_root(&self) -> Result<Self> {
        assert_eq!(self.ring.e, 1, "pth_root works over F_p");
        let p = self.ring.p as u32;
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            let mut out = 0;
            for i in 0..self.nvars {
                let e = mono_exp(m, i);
                if e % p != 0 {
                    return Err(WittError::NotAPthPower);
                }
                out |= mono_var(i, e / p);
            }
            terms.push((out, c));
        }
        Ok(MultiPoly {
            ring: self.ring,
            nvars: self.nvars,
            terms,
        })
    }

    /// Iterated p-th root over F_p.
    pub fn pth_root_iter(&self, k: u32) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.pth_root()?;
        }
        Ok(f)
    }

    /// `self^(p^k)`.
    pub fn pow_p_iter(&self, k: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.pow(self.ring.p);
        }
        f
    }

    /// Divided-power derivative: sum c * prod C(a_i, K_i) T^(a - K).
    pub fn divided_power(&self, k: Mono) -> Self {
        if k == 0 {
            return self.clone();
        }
        let r = self.ring;
        let mut terms = Vec::new();
        for &(m, c) in &self.terms {
            if !mono_divides(k, m) {
                continue;
            }
            let mut x = c;
            for i in 0..self.nvars {
                let ki = mono_exp(k, i);
                if ki > 0 {
                    x = r.mul(x, binomial_fast(mono_exp(m, i) as u64, ki as u64, r));
                    if x == 0 {
                        break;
                    }
                }
            }
            if x != 0 {
                terms.push((m - k, x));
            }
        }
        // subtracting a fixed k keeps the surviving terms sorted
        MultiPoly {
            ring: r,
            nvars: self.nvars,
            terms,
        }
    }

    /// Divided-power derivative in a single variable.
    pub fn divided_power_var(&self, l: usize, m: u32) -> Self {
        self.divided_power(mono_var(l, m))
    }

    /// Substitutes T_i -> subs[i]; coefficients are read as integers in
    /// [0, p^e) and the result lives in the ring of `subs`.
    pub fn compose(&self, subs: &[MultiPoly]) -> Self {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        assert!(!subs.is_empty() || self.nvars == 0);
        let (ring, nv) = if let Some(s) = subs.first() {
            (s.ring, s.nvars)
        } else {
            (self.ring, 0)
        };
        let mut cache: HashMap<(usize, u32), MultiPoly> = HashMap::new();
        let mut acc = MultiPoly::zero(ring, nv);
        for &(m, c) in &self.terms {
            let mut t = MultiPoly::constant(ring, nv, c % ring.m);
            for (i, s) in subs.iter().enumerate() {
                let e = mono_exp(m, i);
                if e == 0 {
                    continue;
                }
                let pw = cache.entry((i, e)).or_insert_with(|| s.pow(e as u64));
                t = t.mul(pw);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Coefficients mapped through `f`; zero results are dropped.
    pub fn map_coeffs(&self, ring: Zmod, f: impl Fn(u64) -> u64) -> Self {
        MultiPoly::from_terms(ring, self.nvars, self.terms.iter().map(|&(m, c)| (m, f(c))))
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(Mono, u64) -> bool) -> Self {
        MultiPoly {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().copied().filter(|&(m, c)| keep(m, c)).collect(),
        }
    }

    /// Widens to more variables (new variables do not occur).
    pub fn with_nvars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars && nvars <= MAX_VARS);
        MultiPoly {
            ring: self.ring,
            nvars,
            terms: self.terms.clone(),
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if c != 1 || m == 0 {
                factors.push(c.to_string());
            }
            for i in 0..self.nvars {
                match mono_exp(m, i) {
                    0 => {}
                    1 => factors.push(format!("T{}", i + 1)),
                    e => factors.push(format!("T{}^{}", i + 1, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Zmod {
        Zmod::new(p, 1)
    }

    #[test]
    fn packing_orders_lex() {
        let a = mono_pack(&[2, 0]);
        let b = mono_pack(&[1, 5]);
        assert!(a > b);
        assert_eq!(mono_exps(b, 2), vec![1, 5]);
        assert!(mono_divides(mono_pack(&[1, 2]), mono_pack(&[1, 3])));
        assert!(!mono_divides(mono_pack(&[2, 0]), mono_pack(&[1, 3])));
    }

    #[test]
    fn arithmetic() {
        let r = Zmod::new(3, 2);
        let f = parse_poly("T1 + 2*T2", r, 2).unwrap();
        let g = f.mul(&f);
        assert_eq!(g.to_string(), "T1^2 + 4*T1*T2 + 4*T2^2");
        assert!(f.sub(&f).is_zero());
        assert_eq!(f.pow(3), f.mul(&f).mul(&f));
    }

    #[test]
    fn divided_powers_over_z4() {
        let r = Zmod::new(2, 2);
        let t3 = parse_poly("T^3", r, 1).unwrap();
        let t5 = parse_poly("T^5", r, 1).unwrap();
        assert_eq!(t3.divided_power_var(0, 2).to_string(), "3*T1");
        assert_eq!(t5.divided_power_var(0, 2).to_string(), "2*T1^3");
    }

    #[test]
    fn pth_roots() {
        let f = parse_poly("T^2 + T^4", fp(2), 1).unwrap();
        assert_eq!(f.pth_root().unwrap().to_string(), "T1^2 + T1");
        let g = parse_poly("T^3", fp(2), 1).unwrap();
        assert_eq!(g.pth_root(), Err(WittError::NotAPthPower));
    }

    #[test]
    fn frobenius_is_pth_power_mod_p() {
        let f = parse_poly("T1^2*T2 + 2*T2 + 1", fp(3), 2).unwrap();
        assert_eq!(f.pow(3), f.frob_sub(1));
    }

    #[test]
    fn compose_substitutes() {
        let r = Zmod::new(5, 2);
        let f = parse_poly("T1^2 + 3", r, 1).unwrap();
        let s = parse_poly("T1 + T2", r, 2).unwrap();
        assert_eq!(f.compose(&[s]).to_string(), "T1^2 + 2*T1*T2 + T2^2 + 3");
    }

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_up_to(2, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }
}
