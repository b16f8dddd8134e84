//! Coordinatized Frobenius lifts F(T_i) = T_i^p + p g_i on (Z/p^L)[T], the
//! induced map Phi into W_L(F_p[T]), projectors onto its image and the
//! comparison of two lifts.
//!
//! Under the embedding W_L(A) -> (Z/p^L)[T] the Witt vector Phi(a) becomes
//! F^(L-1)(a), which gives an independent route to every statement below.

mod ap;
mod delta;

pub use ap::{
    ap_interpolate, bimodule_action_check, check_q_reduction, pi_component, pi_component_expanded, q_polynomial, ApPolynomial, QReduction,
    QPolynomial,
};
pub use delta::{
    check_delta_epsilon_linear, delta_embedded, delta_order_check, gamma_approx, iterated_delta, DeltaFailure,
    GammaResult, GammaStep, GammaTerm,
};

use crate::embed::{decode, embed, image_level};
use crate::error::{invalid, Result, WittError};
use crate::exactnum::{checked_pow, Zmod};
use crate::poly::{mono_exps, parse_poly_with_p, DiffOp, Mono, MultiPoly};
use crate::wdo::{reconstruct, ProbeTable, WdoNormalForm, WittOperator, WorkingContext};
use crate::witt::{peel, WittVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobLift {
    p: u64,
    len: usize,
    /// images[i] = F(T_i) over Z/p^L
    images: Vec<MultiPoly>,
}

impl FrobLift {
    pub fn standard(p: u64, nvars: usize, len: usize) -> Result<Self> {
        let ring = Zmod::try_new(p, len as u32)?;
        let images = (0..nvars).map(|i| MultiPoly::var(ring, nvars, i).pow(p)).collect();
        Ok(FrobLift { p, len, images })
    }

    pub fn from_images(p: u64, len: usize, images: Vec<MultiPoly>) -> Result<Self> {
        let ring = Zmod::try_new(p, len as u32)?;
        let n = images.len();
        for (i, f) in images.iter().enumerate() {
            if f.ring() != ring || f.nvars() != n {
                return invalid("lift images must be polynomials over Z/p^L in the same variables");
            }
            let frob = MultiPoly::var(ring, n, i).pow(p);
            if !f.sub(&frob).reduce_to(1).is_zero() {
                return invalid(format!("F(T{}) is not congruent to T{}^p modulo p", i + 1, i + 1));
            }
        }
        Ok(FrobLift { p, len, images })
    }

    /// Parses `T1->T1^p + p*(<poly>), T2->...`; unlisted variables keep the
    /// standard lift.
    pub fn parse(s: &str, p: u64, nvars: usize, len: usize) -> Result<Self> {
        let mut lift = Self::standard(p, nvars, len)?;
        let ring = Zmod::new(p, len as u32);
        for part in s.split([',', ';']) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (lhs, rhs) = part
                .split_once("->")
                .ok_or_else(|| WittError::Parse(format!("lift entries look like T1->..., got '{part}'")))?;
            let lhs = lhs.trim();
            let idx = match lhs {
                "T" | "t" => 1,
                _ => lhs
                    .strip_prefix('T')
                    .and_then(|x| x.parse::<usize>().ok())
                    .ok_or_else(|| WittError::Parse(format!("unknown variable '{lhs}'")))?,
            };
            if idx == 0 || idx > nvars {
                return Err(WittError::Parse(format!("variable '{lhs}' out of range")));
            }
            lift.images[idx - 1] = parse_poly_with_p(rhs, ring, nvars)?;
        }
        Self::from_images(p, len, lift.images)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn images(&self) -> &[MultiPoly] {
        &self.images
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::standard(self.p, self.nvars(), self.len).unwrap()
    }

    /// F(a) for a over Z/p^e with e <= L.
    pub fn apply(&self, a: &MultiPoly) -> MultiPoly {
        let e = a.ring().e;
        let subs: Vec<MultiPoly> = self.images.iter().map(|f| f.reduce_to(e)).collect();
        a.compose(&subs)
    }

    pub fn apply_iter(&self, a: &MultiPoly, k: u32) -> MultiPoly {
        (0..k).fold(a.clone(), |acc, _| self.apply(&acc))
    }
}

impl std::fmt::Display for FrobLift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, g)| format!("T{}->{}", i + 1, g))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

fn check_lift_poly(lift: &FrobLift, a: &MultiPoly) -> Result<()> {
    if a.ring() != Zmod::new(lift.p, lift.len as u32) || a.nvars() != lift.nvars() {
        return invalid("argument must be a polynomial over Z/p^L in the lift's variables");
    }
    Ok(())
}

/// Phi(a): the Witt vector with ghost components F^s(a), found by peeling.
pub fn phi_apply(lift: &FrobLift, a: &MultiPoly) -> Result<WittVec> {
    check_lift_poly(lift, a)?;
    let mut target = Vec::with_capacity(lift.len);
    let mut cur = a.clone();
    for s in 0..lift.len {
        if s > 0 {
            cur = lift.apply(&cur);
        }
        target.push(cur.reduce_to(s as u32 + 1));
    }
    let coords = peel(&target).map_err(|e| WittError::NotInImage(format!("ghost peel of Phi failed: {e}")))?;
    WittVec::from_coords(lift.p, lift.nvars(), coords)
}

/// Phi(a) in the embedded model: F^(L-1)(a) modulo p^L.
pub fn phi_embedded(lift: &FrobLift, a: &MultiPoly) -> MultiPoly {
    lift.apply_iter(a, lift.len as u32 - 1)
}

/// True when every exponent is divisible by p^(L-1), i.e. the probe is
/// fixed by the coordinate projection.
fn fixed_by_projection(k: Mono, ctx: &WorkingContext) -> bool {
    let q = checked_pow(ctx.p, ctx.r_top()).unwrap();
    mono_exps(k, ctx.nvars).iter().all(|&e| e as u64 % q == 0)
}

/// The coordinate projection onto Phi(A) for the standard lift, on probes.
pub fn projector_semantic(ctx: &WorkingContext) -> ProbeTable {
    let outputs = ctx
        .probes()
        .into_iter()
        .map(|k| {
            let out = if fixed_by_projection(k, ctx) {
                ctx.probe_poly(k)
            } else {
                MultiPoly::zero(ctx.ring(), ctx.nvars)
            };
            (k, out)
        })
        .collect();
    ProbeTable { ctx: *ctx, outputs }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorMode {
    /// Reconstruct from the semantic table.
    Reconstruct,
    /// Per variable, the diagonal operator sum_k lambda_k T^k d^[k] whose
    /// eigenvalue on T^e is 1 when p^(L-1) divides e and 0 otherwise;
    /// lambda_k are the finite differences of that indicator.
    Mahler,
}

fn mahler_projector(ctx: &WorkingContext) -> DiffOp {
    let ring = ctx.ring();
    let n = ctx.nvars;
    let q = checked_pow(ctx.p, ctx.r_top()).unwrap();
    let b = ctx.budget() as u64;
    // lambda_k = sum_t (-1)^(k-t) C(k,t) chi(t)
    let chi: Vec<u64> = (0..=b).map(|t| if t % q == 0 { 1 } else { 0 }).collect();
    let mut diffs = chi.iter().map(|&x| x % ring.m).collect::<Vec<_>>();
    let mut lambda = Vec::with_capacity(diffs.len());
    while !diffs.is_empty() {
        lambda.push(diffs[0]);
        diffs = diffs.windows(2).map(|w| ring.sub(w[1], w[0])).collect();
    }
    let mut total = DiffOp::identity(ring, n);
    for l in 0..n {
        let mut op = DiffOp::zero(ring, n);
        for (k, &lam) in lambda.iter().enumerate() {
            if lam == 0 {
                continue;
            }
            let m = crate::poly::mono_var(l, k as u32);
            op.add_term(m, &MultiPoly::monomial(ring, n, m, lam));
        }
        total = total.compose(&op);
    }
    total
}

/// The projector onto Phi(A) as a normal form at the context.
pub fn projector_normal_form(ctx: &WorkingContext, mode: ProjectorMode) -> Result<WdoNormalForm> {
    match mode {
        ProjectorMode::Reconstruct => reconstruct(&projector_semantic(ctx)),
        ProjectorMode::Mahler => WdoNormalForm::from_diffop(ctx, &mahler_projector(ctx)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ProjectorReport {
    pub modes_agree: bool,
    pub matches_semantic: bool,
    pub idempotent: bool,
    pub image_in_phi: bool,
    pub phi_fixed: bool,
}

impl ProjectorReport {
    pub fn passed(&self) -> bool {
        self.modes_agree && self.matches_semantic && self.idempotent && self.image_in_phi && self.phi_fixed
    }
}

/// Checks both constructions of the projector against the semantic table,
/// idempotence, and both inclusions of the image against Phi(A), the
/// latter on the probes and on the supplied elements of (Z/p^L)[T].
pub fn check_projector(ctx: &WorkingContext, samples: &[MultiPoly]) -> Result<ProjectorReport> {
    let lift = FrobLift::standard(ctx.p, ctx.nvars, ctx.len)?;
    let semantic = projector_semantic(ctx);
    let by_table = projector_normal_form(ctx, ProjectorMode::Reconstruct)?;
    let by_mahler = projector_normal_form(ctx, ProjectorMode::Mahler)?;
    let modes_agree = by_table == by_mahler;
    let matches_semantic = by_mahler.evaluate()? == semantic;
    let idempotent = crate::wdo::compose(&by_table, &by_table)? == by_table;
    let q = checked_pow(ctx.p, ctx.r_top()).unwrap() as u32;
    let mut image_in_phi = true;
    for (_, out) in &semantic.outputs {
        // pi(x) = Phi(a) where a is pi(x) with T^(p^r K) read as T^K
        let a = MultiPoly::from_terms(
            out.ring(),
            ctx.nvars,
            out.terms().iter().map(|&(m, c)| {
                let e: Vec<u32> = mono_exps(m, ctx.nvars).iter().map(|&x| x / q).collect();
                (crate::poly::mono_pack(&e), c)
            }),
        );
        if phi_apply(&lift, &a)? != decode(out, ctx.len)? {
            image_in_phi = false;
        }
    }
    let mut phi_fixed = true;
    for a in samples {
        let w = phi_apply(&lift, a)?;
        let g = embed(&w);
        if g.total_degree().unwrap_or(0) > ctx.budget() {
            return Err(WittError::ContextOverflow("sample exceeds the context degree".into()));
        }
        if by_table.apply_embedded(&g)? != g {
            phi_fixed = false;
        }
    }
    Ok(ProjectorReport {
        modes_agree,
        matches_semantic,
        idempotent,
        image_in_phi,
        phi_fixed,
    })
}

/// Largest m with x in F^m + p^r W_L and largest m with x in V^m + p^r W_L,
/// for x embedded; both capped at L. The F-filtration is read from the
/// expansion of x in the basis a_I V^s[T^I] with I prime to p, which in the
/// embedded model puts the monomial T^K in level s(K).
pub fn filtration_degrees(g: &MultiPoly, len: usize, r: u32) -> (usize, usize) {
    let ring = g.ring();
    let mut f_deg = len as u32;
    let mut v_deg = len as u32;
    for &(k, c) in g.terms() {
        let s = image_level(k, ring.p, len);
        let v = ring.val(c);
        if v >= (s + r).min(len as u32) {
            continue;
        }
        f_deg = f_deg.min(s);
        v_deg = v_deg.min(v);
    }
    (f_deg as usize, v_deg as usize)
}

/// F^m subset V^m and V^(m+r-1) subset F^m in W_L / p^r, for one element:
/// the degrees must satisfy v >= f and f >= min(v - r + 1, L).
pub fn check_two_filtrations(x: &WittVec, r: u32) -> Result<bool> {
    if r == 0 {
        return invalid("r must be at least 1");
    }
    let len = x.len();
    let (f, v) = filtration_degrees(&embed(x), len, r);
    Ok(v >= f && f + r as usize > v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn phi_of_standard_lift_is_teichmuller() {
        let lift = FrobLift::standard(3, 2, 3).unwrap();
        let ring = Zmod::new(3, 3);
        let a = parse_poly("T1^2*T2", ring, 2).unwrap();
        let w = phi_apply(&lift, &a).unwrap();
        assert_eq!(w, WittVec::teichmuller(&a.reduce_to(1), 3).unwrap());
        assert_eq!(phi_apply(&lift, &MultiPoly::one(ring, 2)).unwrap(), WittVec::one(3, 2, 3));
    }

    #[test]
    fn phi_two_routes_and_multiplicative() {
        let lift = FrobLift::parse("T1->T1^3 + 3*(T1^2 + 1)", 3, 1, 3).unwrap();
        let ring = Zmod::new(3, 3);
        let a = parse_poly("T^2 + 5*T + 1", ring, 1).unwrap();
        let b = parse_poly("4*T^3 + T", ring, 1).unwrap();
        let pa = phi_apply(&lift, &a).unwrap();
        assert_eq!(decode(&phi_embedded(&lift, &a), 3).unwrap(), pa);
        let pb = phi_apply(&lift, &b).unwrap();
        assert_eq!(phi_apply(&lift, &a.mul(&b)).unwrap(), pa.mul(&pb).unwrap());
        let ghost = pa.ghost();
        for s in 0..3 {
            assert_eq!(ghost.comps[s], lift.apply_iter(&a, s as u32).reduce_to(s as u32 + 1));
        }
    }

    #[test]
    fn lift_parse_rejects_non_lifts() {
        assert!(FrobLift::parse("T1->T1^2 + T1", 2, 1, 2).is_err());
        assert!(FrobLift::parse("T1->T1^p + p*(T1)", 2, 1, 2).is_ok());
    }

    #[test]
    fn projector_small() {
        for (p, n, len, d) in [(2u64, 1usize, 2usize, 3u32), (2, 1, 3, 2), (3, 1, 2, 2), (2, 2, 2, 2)] {
            let ctx = WorkingContext::new(p, n, len, d, 0).unwrap();
            let ring = ctx.ring();
            let samples = vec![MultiPoly::var(ring, n, 0).add(&MultiPoly::constant(ring, n, 3))];
            let rep = check_projector(&ctx, &samples).unwrap();
            assert!(rep.passed(), "{p} {n} {len} {d}: {rep:?}");
        }
        let ctx = WorkingContext::new(2, 1, 1, 3, 0).unwrap();
        assert_eq!(projector_normal_form(&ctx, ProjectorMode::Mahler).unwrap(), WdoNormalForm::identity(&ctx));
    }

    #[test]
    fn filtrations() {
        let x = WittVec::parse("[0;T;T^2]", 2, 1, 3).unwrap();
        let (f, v) = filtration_degrees(&embed(&x), 3, 2);
        assert_eq!((f, v), (1, 1));
        assert!(check_two_filtrations(&x, 1).unwrap());
        assert!(check_two_filtrations(&x.verschiebung(1), 2).unwrap());
    }
}
