//! Witt differential operators at a working context.
//!
//! At a context (p, n, L, D, m) an operator acts on the embedded image
//! W' of W_L inside (Z/p^L)[T] and is determined by its values on the
//! probes p^s(K) T^K with |K| <= D p^(L-1). Every such operator has a
//! unique expansion sum_K c_K d^[K] with c_K known modulo p^(L - s(K)),
//! and the multi-indices K correspond one to one with normal-form terms
//!
//!   F^-r(alpha) {d}_{J/p^r} {d}^I_{p^m}.
//!
//! Writing P = p^(m + L - 1), K = J p^(L-1-r) + I P with the low part of K
//! below P componentwise; r = 0 covers the terms alpha {d}_K with K < p^m.

mod checks;
mod text;

pub use checks::{
    check_commutator, check_derivation_mod_p, check_filtration_mod_p, check_frobenius_conjugate,
    check_products_lemma, commutator_probe, commutator_symbolic, Elementary,
};
pub use text::{format_normal_form, parse_operator};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embed::{decode, embed, embed_at, image_level, membership};
use crate::error::{invalid, Result, WittError};
use crate::exactnum::{binomial_pu, checked_pow, is_prime, val_or_inf, Zmod};
use crate::poly::{mono_deg, mono_exp, mono_exps, mono_pack, monomials_up_to, DiffOp, Mono, MultiPoly, MAX_VARS};
use crate::witt::WittVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkingContext {
    pub p: u64,
    pub nvars: usize,
    pub len: usize,
    pub max_deg: u32,
    pub level: u32,
}

impl WorkingContext {
    pub fn new(p: u64, nvars: usize, len: usize, max_deg: u32, level: u32) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        if len == 0 {
            return invalid("length must be at least 1");
        }
        if nvars == 0 || nvars > MAX_VARS {
            return invalid(format!("need 1 to {MAX_VARS} variables"));
        }
        Zmod::try_new(p, len as u32 + 2)?;
        let ctx = WorkingContext {
            p,
            nvars,
            len,
            max_deg,
            level,
        };
        let budget = checked_pow(p, len as u32 - 1).and_then(|q| q.checked_mul(max_deg as u64));
        let big = checked_pow(p, level + len as u32 - 1);
        match (budget, big) {
            (Some(b), Some(_)) if b <= 4096 => Ok(ctx),
            _ => invalid("degree budget too large for exact probing"),
        }
    }

    pub fn r_top(&self) -> u32 {
        self.len as u32 - 1
    }

    /// Coefficient ring Z/p^L of the embedded image.
    pub fn ring(&self) -> Zmod {
        Zmod::new(self.p, self.len as u32)
    }

    /// Degree budget D p^(L-1) of embedded polynomials.
    pub fn budget(&self) -> u32 {
        self.max_deg * checked_pow(self.p, self.r_top()).unwrap() as u32
    }

    /// P = p^(m + L - 1), the index of {d}_{p^m}.
    pub fn big_p(&self) -> u64 {
        checked_pow(self.p, self.level + self.r_top()).unwrap()
    }

    pub fn probes(&self) -> Vec<Mono> {
        monomials_up_to(self.nvars, self.budget())
    }

    pub fn probe_poly(&self, k: Mono) -> MultiPoly {
        let s = image_level(k, self.p, self.len);
        MultiPoly::monomial(self.ring(), self.nvars, k, self.ring().p_pow(s))
    }

    pub fn s_of(&self, k: Mono) -> u32 {
        image_level(k, self.p, self.len)
    }

    pub fn with_level(&self, level: u32) -> Result<Self> {
        Self::new(self.p, self.nvars, self.len, self.max_deg, level)
    }

    pub fn check_witt(&self, w: &WittVec) -> Result<()> {
        if w.p() != self.p || w.nvars() != self.nvars || w.len() != self.len {
            return invalid(format!(
                "Witt vector (p={}, n={}, L={}) does not match the context (p={}, n={}, L={})",
                w.p(),
                w.nvars(),
                w.len(),
                self.p,
                self.nvars,
                self.len
            ));
        }
        Ok(())
    }

    /// Splits a multi-index into (twist r, fractional index J, level index I).
    pub fn split_index(&self, k: Mono) -> TermIndex {
        let n = self.nvars;
        let big = self.big_p();
        let exps = mono_exps(k, n);
        let level_index: Vec<u64> = exps.iter().map(|&e| e as u64 / big).collect();
        let low: Vec<u64> = exps.iter().map(|&e| e as u64 % big).collect();
        let t = low.iter().map(|&x| val_or_inf(x, self.p)).min().unwrap_or(u32::MAX);
        let r_top = self.r_top();
        if t >= r_top {
            let q = checked_pow(self.p, r_top).unwrap();
            TermIndex {
                twist: 0,
                frac: low.iter().map(|&x| x / q).collect(),
                level_index,
            }
        } else {
            let q = checked_pow(self.p, t).unwrap();
            TermIndex {
                twist: r_top - t,
                frac: low.iter().map(|&x| x / q).collect(),
                level_index,
            }
        }
    }

    /// Inverse of [`split_index`]; `None` when the term acts as zero at
    /// this length or is not in normal form.
    pub fn join_index(&self, idx: &TermIndex) -> Option<Mono> {
        let r_top = self.r_top();
        if idx.twist > r_top || idx.frac.len() != self.nvars || idx.level_index.len() != self.nvars {
            return None;
        }
        let scale = checked_pow(self.p, r_top - idx.twist)?;
        let big = self.big_p();
        let mut exps = Vec::with_capacity(self.nvars);
        for (&j, &i) in idx.frac.iter().zip(&idx.level_index) {
            let e = j.checked_mul(scale)?.checked_add(i.checked_mul(big)?)?;
            if e > crate::poly::MAX_EXP as u64 {
                return None;
            }
            exps.push(e as u32);
        }
        let k = mono_pack(&exps);
        (self.split_index(k) == *idx).then_some(k)
    }

    /// gamma_K = p^f u with d^[low] (d^[P])^I = gamma_K d^[K].
    fn gamma(&self, k: Mono) -> (u32, u64) {
        let ring = self.ring();
        let big = self.big_p();
        let (mut f, mut u) = (0u32, 1 % ring.m);
        for l in 0..self.nvars {
            let e = mono_exp(k, l) as u64;
            let (i, low) = (e / big, e % big);
            let mut factors = vec![(low + i * big, low)];
            factors.extend((1..=i).map(|q| (q * big, big)));
            for (a, b) in factors {
                let (v, w) = binomial_pu(a, b, ring);
                f += v;
                u = ring.mul(u, w);
            }
        }
        (f, u)
    }

    /// Length of the canonical coefficient of the term with index K.
    pub fn coeff_len(&self, k: Mono) -> usize {
        let s = self.s_of(k);
        let (f, _) = self.gamma(k);
        (self.len as u32).saturating_sub(s + f) as usize
    }

    /// c_K modulo p^(L - s) for the term with index K and coefficient alpha.
    fn coeff_poly(&self, k: Mono, alpha: &WittVec) -> MultiPoly {
        let s = self.s_of(k);
        let e = self.len as u32 - s;
        let (f, u) = self.gamma(k);
        let ring = Zmod::new(self.p, e);
        if f >= e {
            return MultiPoly::zero(ring, self.nvars);
        }
        let g = embed_at(alpha, e as usize);
        g.scale(ring.mul(u % ring.m, ring.p_pow(f)))
    }

    /// Recovers the canonical coefficient from c_K modulo p^(L - s).
    fn alpha_from_coeff(&self, k: Mono, c: &MultiPoly) -> Result<Option<WittVec>> {
        let s = self.s_of(k);
        let e = self.len as u32 - s;
        debug_assert_eq!(c.ring().e, e);
        let (f, u) = self.gamma(k);
        if c.is_zero() {
            return Ok(None);
        }
        if f >= e {
            return Err(WittError::NotAnOperator(format!(
                "nonzero coefficient at an index whose term acts trivially ({})",
                self.describe_index(k)
            )));
        }
        let kk = e - f;
        let c1 = c.div_p_pow(f).ok_or_else(|| {
            WittError::NotAnOperator(format!("coefficient at {} is not divisible by p^{f}", self.describe_index(k)))
        })?;
        let ring = Zmod::new(self.p, kk);
        let uinv = ring.inv(u % ring.m).expect("gamma unit part is a unit");
        let g = c1.scale(uinv);
        let beta = decode(&g, kk as usize).map_err(|_| {
            WittError::NotAnOperator(format!("coefficient at {} is not a Witt vector", self.describe_index(k)))
        })?;
        let coords = beta
            .coords()
            .iter()
            .map(|x| x.pth_root_iter(f))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| {
                WittError::NotAnOperator(format!("coefficient at {} is not an F^{f}-image", self.describe_index(k)))
            })?;
        let alpha = WittVec::from_coords(self.p, self.nvars, coords)?;
        Ok((!alpha.is_zero()).then_some(alpha))
    }

    fn describe_index(&self, k: Mono) -> String {
        format!("K={:?}", mono_exps(k, self.nvars))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TermIndex {
    pub twist: u32,
    pub frac: Vec<u64>,
    pub level_index: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WdoTerm {
    pub twist: u32,
    pub coeff: WittVec,
    pub frac: Vec<u64>,
    pub level_index: Vec<u64>,
}

/// Canonical normal form at a context: one coefficient per multi-index,
/// truncated to the length that the operator actually sees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WdoNormalForm {
    ctx: WorkingContext,
    terms: BTreeMap<Mono, WittVec>,
}

/// Operator values on the probes of a context, in probe order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeTable {
    pub ctx: WorkingContext,
    pub outputs: Vec<(Mono, MultiPoly)>,
}

/// Anything that acts on the embedded image at a context.
pub trait WittOperator {
    fn context(&self) -> &WorkingContext;
    fn apply_embedded(&self, g: &MultiPoly) -> Result<MultiPoly>;

    fn apply(&self, w: &WittVec) -> Result<WittVec> {
        let ctx = self.context();
        ctx.check_witt(w)?;
        if !w.fits_degree(ctx.max_deg) {
            return Err(WittError::ContextOverflow(format!(
                "input exceeds weighted degree {} of the context",
                ctx.max_deg
            )));
        }
        decode(&self.apply_embedded(&embed(w))?, ctx.len)
    }

    fn evaluate(&self) -> Result<ProbeTable> {
        let ctx = *self.context();
        let outputs = ctx
            .probes()
            .into_iter()
            .map(|k| Ok((k, self.apply_embedded(&ctx.probe_poly(k))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbeTable { ctx, outputs })
    }
}

/// c * d^[K] applied to g in the image, where c is known modulo p^(L - s).
fn apply_term(ctx: &WorkingContext, k: Mono, c: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly> {
    let s = ctx.s_of(k);
    let y = g.divided_power(k);
    if y.is_zero() {
        return Ok(y);
    }
    let y = y
        .div_p_pow(s)
        .ok_or_else(|| WittError::NotInImage("operator input is not in the embedded image".into()))?;
    Ok(c.mul(&y).shift_up(s))
}

impl WittOperator for WdoNormalForm {
    fn context(&self) -> &WorkingContext {
        &self.ctx
    }

    fn apply_embedded(&self, g: &MultiPoly) -> Result<MultiPoly> {
        let mut acc = MultiPoly::zero(self.ctx.ring(), self.ctx.nvars);
        let gdeg = g.total_degree().unwrap_or(0);
        for (&k, alpha) in &self.terms {
            if mono_deg(k) > gdeg {
                continue;
            }
            let c = self.ctx.coeff_poly(k, alpha);
            acc = acc.add(&apply_term(&self.ctx, k, &c, g)?);
        }
        Ok(acc)
    }
}

impl WdoNormalForm {
    pub fn zero(ctx: &WorkingContext) -> Self {
        WdoNormalForm {
            ctx: *ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn context(&self) -> &WorkingContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients keyed by multi-index.
    pub fn raw_terms(&self) -> &BTreeMap<Mono, WittVec> {
        &self.terms
    }

    pub fn terms(&self) -> Vec<WdoTerm> {
        self.terms
            .iter()
            .map(|(&k, a)| {
                let idx = self.ctx.split_index(k);
                WdoTerm {
                    twist: idx.twist,
                    coeff: a.clone(),
                    frac: idx.frac,
                    level_index: idx.level_index,
                }
            })
            .collect()
    }

    fn insert_canonical(&mut self, k: Mono, alpha: &WittVec) {
        if mono_deg(k) > self.ctx.budget() {
            return;
        }
        let len = self.ctx.coeff_len(k);
        let a = alpha.with_len(len);
        if a.is_zero() {
            self.terms.remove(&k);
            return;
        }
        match self.terms.get(&k) {
            Some(old) => {
                let sum = old.add(&a).expect("same shape");
                if sum.is_zero() {
                    self.terms.remove(&k);
                } else {
                    self.terms.insert(k, sum);
                }
            }
            None => {
                self.terms.insert(k, a);
            }
        }
    }

    /// Builds a canonical normal form from arbitrary terms. Terms that act
    /// trivially at the context are dropped.
    pub fn from_terms(ctx: &WorkingContext, terms: &[WdoTerm]) -> Result<Self> {
        let mut nf = Self::zero(ctx);
        for t in terms {
            if t.coeff.p() != ctx.p || t.coeff.nvars() != ctx.nvars {
                return invalid("term coefficient lives over a different ring");
            }
            let idx = TermIndex {
                twist: t.twist,
                frac: t.frac.clone(),
                level_index: t.level_index.clone(),
            };
            if idx.frac.len() != ctx.nvars || idx.level_index.len() != ctx.nvars {
                return invalid("index length must equal the number of variables");
            }
            validate_index(ctx, &idx)?;
            if let Some(k) = ctx.join_index(&idx) {
                nf.insert_canonical(k, &t.coeff);
            }
        }
        Ok(nf)
    }

    /// Multiplication by a Witt vector.
    pub fn multiplication(ctx: &WorkingContext, alpha: &WittVec) -> Result<Self> {
        ctx.check_witt(alpha)?;
        let mut nf = Self::zero(ctx);
        nf.insert_canonical(0, alpha);
        Ok(nf)
    }

    pub fn identity(ctx: &WorkingContext) -> Self {
        Self::multiplication(ctx, &WittVec::one(ctx.p, ctx.nvars, ctx.len)).unwrap()
    }

    /// The operator c d^[K] for a polynomial c over Z/p^L.
    pub fn from_divided_power(ctx: &WorkingContext, k: Mono, c: &MultiPoly) -> Result<Self> {
        let mut nf = Self::zero(ctx);
        if mono_deg(k) > ctx.budget() {
            return Ok(nf);
        }
        let s = ctx.s_of(k);
        let c = c.reduce_to(ctx.len as u32 - s);
        if let Some(a) = ctx.alpha_from_coeff(k, &c)? {
            nf.terms.insert(k, a);
        }
        Ok(nf)
    }

    /// The basic operator {d_l}_{j/p^r} with unit coefficient.
    pub fn basic(ctx: &WorkingContext, l: usize, j: u64, r: u32) -> Result<Self> {
        if l >= ctx.nvars {
            return invalid(format!("variable index {} out of range", l + 1));
        }
        let bound = checked_pow(ctx.p, r + ctx.level)
            .ok_or_else(|| WittError::InvalidInput("index overflow".into()))?;
        if j > bound {
            return invalid(format!(
                "{{d{}}}_{{{j}/p^{r}}} is outside the generators of level {} (need j <= {bound})",
                l + 1,
                ctx.level
            ));
        }
        let r_top = ctx.r_top();
        let kl = if r <= r_top {
            j * checked_pow(ctx.p, r_top - r).unwrap()
        } else {
            let q = checked_pow(ctx.p, r - r_top).unwrap();
            if j % q != 0 {
                return Ok(Self::zero(ctx));
            }
            j / q
        };
        if kl > ctx.budget() as u64 {
            return Ok(Self::zero(ctx));
        }
        let mut exps = vec![0u32; ctx.nvars];
        exps[l] = kl as u32;
        Self::from_divided_power(ctx, mono_pack(&exps), &MultiPoly::one(ctx.ring(), ctx.nvars))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return invalid("normal forms live at different contexts");
        }
        let mut out = self.clone();
        for (&k, a) in &other.terms {
            out.insert_canonical(k, a);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        WdoNormalForm {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(&k, a)| (k, a.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// beta * Q: each coefficient alpha of twist r becomes F^r(beta) alpha.
    pub fn left_mul(&self, beta: &WittVec) -> Result<Self> {
        self.ctx.check_witt(beta)?;
        let mut out = Self::zero(&self.ctx);
        for (&k, a) in &self.terms {
            let r = self.ctx.split_index(k).twist;
            let b = beta.frobenius_pow(r).with_len(a.len());
            out.insert_canonical(k, &b.mul(a)?);
        }
        Ok(out)
    }

    /// The expansion sum_K c_K d^[K] over Z/p^L with coefficients lifted.
    pub fn to_diffop(&self) -> DiffOp {
        let ring = self.ctx.ring();
        let mut op = DiffOp::zero(ring, self.ctx.nvars);
        for (&k, a) in &self.terms {
            op.add_term(k, &self.ctx.coeff_poly(k, a).lift_to(ring.e));
        }
        op
    }

    /// Normal form of a divided-power operator over Z/p^L that preserves
    /// the image.
    pub fn from_diffop(ctx: &WorkingContext, op: &DiffOp) -> Result<Self> {
        let mut nf = Self::zero(ctx);
        for (&k, c) in op.terms() {
            if mono_deg(k) > ctx.budget() {
                continue;
            }
            let s = ctx.s_of(k);
            if let Some(a) = ctx.alpha_from_coeff(k, &c.reduce_to(ctx.len as u32 - s))? {
                nf.insert_canonical(k, &a);
            }
        }
        Ok(nf)
    }

    /// Largest i with the operator in the two-sided ideal I^(i).
    pub fn ideal_degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(&k, a)| a.v_valuation() + self.ctx.split_index(k).twist as usize)
            .min()
            .unwrap_or(self.ctx.len)
            .min(self.ctx.len)
    }

    /// F Q F^-1, a normal form at level m + 1 with degree budget p D.
    pub fn frobenius_conjugate(&self) -> Result<Self> {
        let c = self.ctx;
        let new_ctx = WorkingContext::new(c.p, c.nvars, c.len, c.max_deg * c.p as u32, c.level + 1)?;
        let mut out = Self::zero(&new_ctx);
        for (&k, a) in &self.terms {
            let twist = c.split_index(k).twist;
            let nk = crate::poly::mono_scale(k, c.p);
            let coeff = if twist == 0 { a.frobenius() } else { a.clone() };
            debug_assert_eq!(new_ctx.split_index(nk).twist, twist.saturating_sub(1));
            out.insert_canonical(nk, &coeff.with_len(new_ctx.coeff_len(nk)));
        }
        Ok(out)
    }
}

fn validate_index(ctx: &WorkingContext, idx: &TermIndex) -> Result<()> {
    let p = ctx.p;
    if idx.twist == 0 {
        let bound = checked_pow(p, ctx.level).unwrap();
        if idx.frac.iter().any(|&j| j >= bound) {
            return invalid(format!("index J of an untwisted term must be below p^{}", ctx.level));
        }
    } else {
        let bound = checked_pow(p, idx.twist + ctx.level)
            .ok_or_else(|| WittError::InvalidInput("twist too large".into()))?;
        if idx.frac.iter().any(|&j| j >= bound) {
            return invalid(format!("entries of J must be below p^(r+m) = {bound}"));
        }
        if idx.frac.iter().all(|&j| j % p == 0) {
            return invalid("a twisted term needs an entry of J prime to p");
        }
    }
    Ok(())
}

/// Peels a probe table into a normal form.
pub fn reconstruct(table: &ProbeTable) -> Result<WdoNormalForm> {
    let ctx = table.ctx;
    let probes = ctx.probes();
    if table.outputs.len() != probes.len() || table.outputs.iter().zip(&probes).any(|(a, &b)| a.0 != b) {
        return Err(WittError::NotAnOperator("table does not cover the probes of its context".into()));
    }
    let mut found: Vec<(Mono, MultiPoly)> = Vec::new();
    let mut nf = WdoNormalForm::zero(&ctx);
    for (k, out) in &table.outputs {
        if out.ring() != ctx.ring() || !membership(out, ctx.len) {
            return Err(WittError::NotAnOperator(format!(
                "value at {} is not in the embedded image",
                ctx.describe_index(*k)
            )));
        }
        let e = ctx.probe_poly(*k);
        let mut resid = out.clone();
        for (k2, c2) in &found {
            if crate::poly::mono_divides(*k2, *k) {
                resid = resid.sub(&apply_term(&ctx, *k2, c2, &e)?);
            }
        }
        let s = ctx.s_of(*k);
        let c = resid.div_p_pow(s).ok_or_else(|| {
            WittError::NotAnOperator(format!("residual at {} is not divisible by p^{s}", ctx.describe_index(*k)))
        })?;
        if c.is_zero() {
            continue;
        }
        if let Some(a) = ctx.alpha_from_coeff(*k, &c)? {
            nf.terms.insert(*k, a);
        }
        found.push((*k, c));
    }
    Ok(nf)
}

/// Q1 after Q2, through probe evaluation and reconstruction.
pub fn compose(q1: &WdoNormalForm, q2: &WdoNormalForm) -> Result<WdoNormalForm> {
    if q1.ctx != q2.ctx {
        return invalid("normal forms live at different contexts");
    }
    let ctx = q1.ctx;
    let outputs = ctx
        .probes()
        .into_iter()
        .map(|k| {
            let y = q2.apply_embedded(&ctx.probe_poly(k))?;
            Ok((k, q1.apply_embedded(&y)?))
        })
        .collect::<Result<Vec<_>>>()?;
    reconstruct(&ProbeTable { ctx, outputs })
}

/// Q1 after Q2 by expanding the product of divided-power operators with
/// the Leibniz rule.
pub fn compose_symbolic(q1: &WdoNormalForm, q2: &WdoNormalForm) -> Result<WdoNormalForm> {
    if q1.ctx != q2.ctx {
        return invalid("normal forms live at different contexts");
    }
    WdoNormalForm::from_diffop(&q1.ctx, &q1.to_diffop().compose(&q2.to_diffop()))
}

/// F^-r(alpha) * Q, defined when Q maps the image into p^r times it.
pub fn twisted_left_mul(alpha: &WittVec, r: u32, q: &WdoNormalForm) -> Result<WdoNormalForm> {
    let ctx = q.ctx;
    if alpha.p() != ctx.p || alpha.nvars() != ctx.nvars {
        return invalid("coefficient lives over a different ring");
    }
    if r == 0 {
        return q.left_mul(&alpha.with_len(ctx.len));
    }
    if r > ctx.r_top() {
        return Ok(WdoNormalForm::zero(&ctx));
    }
    let e = ctx.len as u32 - r;
    let coeff = embed_at(alpha, e as usize);
    let outputs = ctx
        .probes()
        .into_iter()
        .map(|k| {
            let y = q.apply_embedded(&ctx.probe_poly(k))?;
            let y = y.div_p_pow(r).ok_or_else(|| {
                WittError::InvalidInput(format!("F^-{r} needs an operator with values in V^{r}"))
            })?;
            Ok((k, coeff.mul(&y).shift_up(r)))
        })
        .collect::<Result<Vec<_>>>()?;
    reconstruct(&ProbeTable { ctx, outputs })
}

/// Probe-based equality.
pub fn equal_on_probes(a: &dyn WittOperator, b: &dyn WittOperator) -> Result<bool> {
    if a.context() != b.context() {
        return invalid("operators live at different contexts");
    }
    Ok(a.evaluate()? == b.evaluate()?)
}

/// i-th power by repeated composition.
pub fn power(q: &WdoNormalForm, i: u32) -> Result<WdoNormalForm> {
    let mut acc = WdoNormalForm::identity(&q.ctx);
    for _ in 0..i {
        acc = compose(q, &acc)?;
    }
    Ok(acc)
}
