use crate::embed::{decode, embed, embed_at, image_level};
use crate::error::{invalid, Result};
use crate::exactnum::{val_factorial, val_or_inf, ModExp, Zmod};
use crate::hs_lift::{HSDerivation, LiftChoice};
use crate::poly::{mono_var, DiffOp, MultiPoly};
use crate::witt::WittVec;

use super::{compose, power, WdoNormalForm, WittOperator, WorkingContext};

/// The elementary operator F^(val(i) - r)(a) D~_i attached to an HS
/// derivation, where r = L - 1.
#[derive(Clone, Debug)]
pub struct Elementary {
    ctx: WorkingContext,
    a: WittVec,
    i: usize,
    twist: u32,
    component: DiffOp,
}

impl Elementary {
    pub fn new(ctx: &WorkingContext, a: &WittVec, d: &HSDerivation, i: usize) -> Result<Self> {
        ctx.check_witt(a)?;
        if d.p() != ctx.p || d.nvars() != ctx.nvars {
            return invalid("HS derivation lives over a different ring");
        }
        if i == 0 {
            return invalid("elementary operators need i >= 1");
        }
        let component = d.component(i, ctx.len as u32, LiftChoice::Canonical)?;
        let v = val_or_inf(i as u64, ctx.p);
        let r = ctx.r_top();
        let (twist, a) = if v >= r {
            (0, a.frobenius_pow(v - r))
        } else {
            (r - v, a.with_len(ctx.len - (r - v) as usize))
        };
        Ok(Elementary {
            ctx: *ctx,
            a,
            i,
            twist,
            component,
        })
    }

    pub fn index(&self) -> usize {
        self.i
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }
}

impl WittOperator for Elementary {
    fn context(&self) -> &WorkingContext {
        &self.ctx
    }

    fn apply_embedded(&self, g: &MultiPoly) -> Result<MultiPoly> {
        let y = self.component.apply(g);
        let y = y.div_p_pow(self.twist).ok_or_else(|| {
            crate::WittError::NotInImage(format!("D~_{} of the input does not lie in V^{}", self.i, self.twist))
        })?;
        Ok(y.mul(&embed(&self.a)).shift_up(self.twist))
    }
}

/// Checks F Q F^-1 against Q through (F Q F^-1)(F x) = F(Q x) on probes.
pub fn check_frobenius_conjugate(q: &WdoNormalForm, conj: &WdoNormalForm) -> Result<bool> {
    let ctx = *q.context();
    for k in ctx.probes() {
        let e = ctx.probe_poly(k);
        let x = decode(&e, ctx.len)?;
        let lhs = conj.apply_embedded(&embed(&x.frobenius()))?;
        let rhs = embed(&decode(&q.apply_embedded(&e)?, ctx.len)?.frobenius());
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// ({d_l}_{1/p^r})^i = u i! {d_l}_{i/p^r} for a unit u. Returns u, known
/// modulo the precision left after dividing out i!, and the verdict.
pub fn check_products_lemma(ctx: &WorkingContext, l: usize, i: u32, r: u32) -> Result<(ModExp, bool)> {
    if l >= ctx.nvars {
        return invalid(format!("variable index {} out of range", l + 1));
    }
    if r > ctx.r_top() {
        return invalid("r must not exceed L - 1");
    }
    let x = WdoNormalForm::basic(ctx, l, 1, r)?;
    let y = power(&x, i)?;
    let kl = i as u64 * crate::exactnum::checked_pow(ctx.p, ctx.r_top() - r).unwrap();
    if kl > ctx.budget() as u64 {
        return invalid("the index i p^(L-1-r) exceeds the degree budget of the context");
    }
    let k = mono_var(l, kl as u32);
    let s = image_level(k, ctx.p, ctx.len);
    let prec = ctx.len as u32 - s;
    let ring = Zmod::new(ctx.p, prec);
    // c with Y = c d^[K] on the image
    let c = match y.raw_terms().iter().next() {
        None => 0,
        Some(_) if y.raw_terms().len() > 1 => return Ok((ModExp::new(0, ctx.p, 0), false)),
        Some((&kk, a)) => {
            if kk != k {
                return Ok((ModExp::new(0, ctx.p, 0), false));
            }
            let cp = ctx.coeff_poly(kk, a);
            if cp.terms().iter().any(|&(m, _)| m != 0) {
                return Ok((ModExp::new(0, ctx.p, 0), false));
            }
            cp.coeff(0)
        }
    };
    let vf = val_factorial(i as u64, ctx.p);
    let fact_unit = factorial_unit(i as u64, ring);
    if vf >= prec {
        // i! d^[K] already vanishes on the image
        return Ok((ModExp::new(0, ctx.p, 0), c == 0));
    }
    let uprec = prec - vf;
    let uring = Zmod::new(ctx.p, uprec);
    if ring.val(c) < vf {
        return Ok((ModExp::new(0, ctx.p, uprec), false));
    }
    let cu = (c / ring.p_pow(vf)) % uring.m;
    let u = uring.mul(cu, uring.inv(fact_unit % uring.m).unwrap());
    let u = ModExp::new(u, ctx.p, uprec);
    let z = WdoNormalForm::from_divided_power(
        ctx,
        k,
        &MultiPoly::constant(ctx.ring(), ctx.nvars, ctx.ring().mul(u.value, factorial_mod(i as u64, ctx))),
    )?;
    let ok = u.is_unit() && z == y;
    Ok((u, ok))
}

fn factorial_unit(n: u64, ring: Zmod) -> u64 {
    let mut u = 1 % ring.m;
    for k in 1..=n {
        let mut k2 = k;
        while k2 % ring.p == 0 {
            k2 /= ring.p;
        }
        u = ring.mul(u, k2 % ring.m);
    }
    u
}

/// i! modulo p^L.
fn factorial_mod(n: u64, ctx: &WorkingContext) -> u64 {
    let ring = ctx.ring();
    (1..=n).fold(1 % ring.m, |acc, k| ring.mul(acc, k % ring.m))
}

/// [{d_l}_{j/p^r}, alpha] by the Leibniz rule,
/// sum_{k >= 1} D~_k(alpha) d_l^[N - k] with N = j p^(L-1-r).
pub fn commutator_symbolic(ctx: &WorkingContext, l: usize, j: u64, r: u32, alpha: &WittVec) -> Result<WdoNormalForm> {
    ctx.check_witt(alpha)?;
    if r > ctx.r_top() {
        return invalid("r must not exceed L - 1");
    }
    WdoNormalForm::basic(ctx, l, j, r)?;
    let n = j * crate::exactnum::checked_pow(ctx.p, ctx.r_top() - r).unwrap();
    let ea = embed(alpha);
    let mut acc = WdoNormalForm::zero(ctx);
    for k in 1..=n {
        let c = ea.divided_power_var(l, k as u32);
        if c.is_zero() {
            continue;
        }
        let rest = mono_var(l, (n - k) as u32);
        acc = acc.add(&WdoNormalForm::from_divided_power(ctx, rest, &c)?)?;
    }
    Ok(acc)
}

/// The same commutator through composition of normal forms.
pub fn commutator_probe(ctx: &WorkingContext, l: usize, j: u64, r: u32, alpha: &WittVec) -> Result<WdoNormalForm> {
    let d = WdoNormalForm::basic(ctx, l, j, r)?;
    let m = WdoNormalForm::multiplication(ctx, alpha)?;
    compose(&d, &m)?.sub(&compose(&m, &d)?)
}

pub fn check_commutator(ctx: &WorkingContext, l: usize, j: u64, r: u32, alpha: &WittVec) -> Result<bool> {
    Ok(commutator_symbolic(ctx, l, j, r, alpha)? == commutator_probe(ctx, l, j, r, alpha)?)
}

fn in_lattice(g: &MultiPoly, len: usize, need: impl Fn(u32) -> u32) -> bool {
    let ring = g.ring();
    g.terms()
        .iter()
        .all(|&(k, c)| ring.val(c) >= need(image_level(k, ring.p, len)).min(len as u32))
}

/// Q(xy) - Q(x) y - x Q(y) lies in p W_L.
pub fn check_derivation_mod_p(q: &dyn WittOperator, x: &WittVec, y: &WittVec) -> Result<bool> {
    let ctx = q.context();
    ctx.check_witt(x)?;
    ctx.check_witt(y)?;
    let (ex, ey) = (embed(x), embed(y));
    let z = q
        .apply_embedded(&ex.mul(&ey))?
        .sub(&q.apply_embedded(&ex)?.mul(&ey))
        .sub(&ex.mul(&q.apply_embedded(&ey)?));
    Ok(in_lattice(&z, ctx.len, |s| s + 1))
}

/// Q(V^i x) lies in V^i + p W_L.
pub fn check_filtration_mod_p(q: &dyn WittOperator, x: &WittVec, i: usize) -> Result<bool> {
    let ctx = q.context();
    ctx.check_witt(x)?;
    let vx = embed_at(&x.verschiebung(i), ctx.len);
    let z = q.apply_embedded(&vx)?;
    Ok(in_lattice(&z, ctx.len, |s| s.max(i as u32).min(s + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_lemma_small() {
        for (p, len, d) in [(2u64, 3usize, 4u32), (3, 3, 2)] {
            let ctx = WorkingContext::new(p, 1, len, d, 0).unwrap();
            for r in 1..=2u32 {
                for i in 1..=(p * p) as u32 {
                    let kl = i as u64 * p.pow(2 - r);
                    if kl > ctx.budget() as u64 {
                        continue;
                    }
                    let (u, ok) = check_products_lemma(&ctx, 0, i, r).unwrap();
                    assert!(ok, "p={p} r={r} i={i} u={u}");
                }
            }
        }
    }

    #[test]
    fn commutator_paths_agree() {
        let ctx = WorkingContext::new(2, 1, 2, 3, 0).unwrap();
        let a = WittVec::parse("[T^2+T;1]", 2, 1, 2).unwrap();
        assert!(check_commutator(&ctx, 0, 1, 1, &a).unwrap());
        assert!(check_commutator(&ctx, 0, 2, 1, &a).unwrap());
        assert!(check_commutator(&ctx, 0, 1, 0, &a).unwrap());
    }

    #[test]
    fn elementary_matches_canonical_lift() {
        let ctx = WorkingContext::new(2, 1, 3, 2, 0).unwrap();
        let d = HSDerivation::coordinate(2, 1, 0, 4).unwrap();
        let one = WittVec::one(2, 1, 3);
        let x = WittVec::parse("[T;T;0]", 2, 1, 3).unwrap();
        let e = Elementary::new(&ctx, &one, &d, 4).unwrap();
        let lift = crate::hs_lift::canonical_lift_embed(&d, 4, &x, LiftChoice::Canonical).unwrap();
        assert_eq!(e.apply(&x).unwrap(), lift);
        let e1 = Elementary::new(&ctx, &one, &d, 1).unwrap();
        assert!(check_derivation_mod_p(&e1, &x, &WittVec::parse("[T^2+1;0;T]", 2, 1, 3).unwrap()).unwrap());
        assert!(check_filtration_mod_p(&e1, &x, 1).unwrap());
    }
}
