//! The difference delta = Phi - Psi of two coordinatized lifts, regarded as
//! a map (Z/p^L)[T] -> W_L(A) with W_L(A) a module through Phi, and the
//! approximations gamma_n of delta by operators sum a_J Phi o d^[J].

use std::collections::HashMap;

use serde::Serialize;

use crate::embed::image_level;
use crate::error::{invalid, Result, WittError};
use crate::exactnum::{binomial_fast, checked_pow, val_factorial, Zmod};
use crate::poly::{mono_divides, mono_exps, monomials_up_to, Mono, MultiPoly};

use super::{phi_embedded, FrobLift};

fn check_pair(phi: &FrobLift, psi: &FrobLift) -> Result<()> {
    if phi.p() != psi.p() || phi.nvars() != psi.nvars() || phi.len() != psi.len() {
        return invalid("the two lifts live over different rings");
    }
    Ok(())
}

/// delta(b) in the embedded model.
pub fn delta_embedded(phi: &FrobLift, psi: &FrobLift, b: &MultiPoly) -> MultiPoly {
    phi_embedded(phi, b).sub(&phi_embedded(psi, b))
}

/// delta_{a_1..a_k}(b) = delta_{a_1..a_(k-1)}(a_k b) - Phi(a_k) delta_{a_1..a_(k-1)}(b).
pub fn iterated_delta(phi: &FrobLift, psi: &FrobLift, seq: &[MultiPoly], b: &MultiPoly) -> MultiPoly {
    match seq.split_last() {
        None => delta_embedded(phi, psi, b),
        Some((last, rest)) => {
            let x = iterated_delta(phi, psi, rest, &last.mul(b));
            let y = iterated_delta(phi, psi, rest, b);
            x.sub(&phi_embedded(phi, last).mul(&y))
        }
    }
}

/// Membership of an embedded element in p^n W_L.
fn in_p_power(g: &MultiPoly, len: usize, n: u32) -> bool {
    let ring = g.ring();
    g.terms()
        .iter()
        .all(|&(k, c)| ring.val(c) >= (image_level(k, ring.p, len) + n).min(len as u32))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaFailure {
    pub n: u32,
    pub seq: Vec<String>,
    pub b: String,
}

fn multisets(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i, k, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, size, &mut Vec::new(), &mut out);
    out
}

/// For n = 1..=nmax, every (n+1)-fold iterate over multisets of `gens`
/// must land in p^n W_L on every b in `bs`. Returns the first failure.
pub fn delta_order_check(
    phi: &FrobLift,
    psi: &FrobLift,
    nmax: u32,
    gens: &[MultiPoly],
    bs: &[MultiPoly],
) -> Result<Option<DeltaFailure>> {
    check_pair(phi, psi)?;
    for n in 1..=nmax {
        for idx in multisets(gens.len(), n as usize + 1) {
            let seq: Vec<MultiPoly> = idx.iter().map(|&i| gens[i].clone()).collect();
            for b in bs {
                if !in_p_power(&iterated_delta(phi, psi, &seq, b), phi.len(), n) {
                    return Ok(Some(DeltaFailure {
                        n,
                        seq: seq.iter().map(|a| a.to_string()).collect(),
                        b: b.to_string(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// delta_{a_1..a_k} + (-1)^(k+1) eps_{a_1..a_k} is linear over (Z/p^L)[T]
/// acting through Phi, where eps(b) = delta(a_1)...delta(a_k) delta(b).
pub fn check_delta_epsilon_linear(
    phi: &FrobLift,
    psi: &FrobLift,
    seq: &[MultiPoly],
    bs: &[MultiPoly],
    cs: &[MultiPoly],
) -> Result<bool> {
    check_pair(phi, psi)?;
    let k = seq.len();
    let prod = seq
        .iter()
        .fold(MultiPoly::one(Zmod::new(phi.p(), phi.len() as u32), phi.nvars()), |acc, a| {
            acc.mul(&delta_embedded(phi, psi, a))
        });
    let lin = |b: &MultiPoly| {
        let eps = prod.mul(&delta_embedded(phi, psi, b));
        let d = iterated_delta(phi, psi, seq, b);
        if k % 2 == 1 {
            d.add(&eps)
        } else {
            d.sub(&eps)
        }
    };
    for b in bs {
        let lb = lin(b);
        for c in cs {
            if lin(&c.mul(b)) != phi_embedded(phi, c).mul(&lb) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaTerm {
    pub j: Vec<u32>,
    /// a_J modulo p W_L, embedded
    pub coeff: String,
    /// n - val(floor(J / p^m)!)
    pub gain: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaStep {
    pub n: u32,
    pub max_order: u32,
    /// n - val(floor((n+1)/p^m)!), the gain guaranteed for any index of order <= n + 1
    pub bound_gain: i64,
    pub terms: Vec<GammaTerm>,
}

#[derive(Clone, Debug)]
pub struct GammaResult {
    pub steps: Vec<GammaStep>,
    /// (gamma_N - delta)(T^k) lies in p^N W_L for every probe
    pub final_ok: bool,
    /// each correction has order at most n + 1
    pub orders_ok: bool,
    ops: Vec<(Mono, MultiPoly)>,
    lift: FrobLift,
}

impl GammaResult {
    /// gamma_N(b) in the embedded model.
    pub fn apply(&self, b: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero(b.ring(), b.nvars());
        for (j, w) in &self.ops {
            let d = b.divided_power(*j);
            if !d.is_zero() {
                acc = acc.add(&w.mul(&phi_embedded(&self.lift, &d)));
            }
        }
        acc
    }
}

/// Builds gamma_1, ..., gamma_N with (gamma_n - delta) in p^n W_L on all
/// monomials of degree <= max_deg, peeling (gamma_n - delta) / p^n modulo
/// p into sum a_J Phi o d^[J]. At a step n >= 1 that needs a correction,
/// a non-positive gain n - val(floor(J/p^m)!), either for an index that
/// occurs or for the worst index of order n + 1 the step allows, means
/// the corrections are not shown to shrink at level m; this is reported
/// as ConvergenceFailure.
pub fn gamma_approx(phi: &FrobLift, psi: &FrobLift, steps: u32, level: u32, max_deg: u32) -> Result<GammaResult> {
    check_pair(phi, psi)?;
    let (p, n_vars, len) = (phi.p(), phi.nvars(), phi.len());
    if steps as usize > len {
        return invalid("cannot approximate beyond p^L");
    }
    let ring = Zmod::new(p, len as u32);
    let probes = monomials_up_to(n_vars, max_deg);
    let mut phi_cache: HashMap<Mono, MultiPoly> = HashMap::new();
    let mut phi_mono = |m: Mono| -> MultiPoly {
        phi_cache
            .entry(m)
            .or_insert_with(|| phi_embedded(phi, &MultiPoly::monomial(ring, n_vars, m, 1)))
            .clone()
    };
    let deltas: Vec<MultiPoly> = probes
        .iter()
        .map(|&k| delta_embedded(phi, psi, &MultiPoly::monomial(ring, n_vars, k, 1)))
        .collect();
    let pm = checked_pow(p, level).unwrap() as u32;
    let mut ops: Vec<(Mono, MultiPoly)> = Vec::new();
    let mut out_steps = Vec::new();
    let mut orders_ok = true;
    let eval_gamma = |ops: &[(Mono, MultiPoly)], k: Mono, phi_mono: &mut dyn FnMut(Mono) -> MultiPoly| {
        let mut acc = MultiPoly::zero(ring, n_vars);
        for (j, w) in ops {
            if mono_divides(*j, k) {
                let c = binomial_multi(k, *j, n_vars, ring);
                if c != 0 {
                    acc = acc.add(&w.mul(&phi_mono(k - j)).scale(c));
                }
            }
        }
        acc
    };
    for n in 0..steps {
        let prec = len as u32 - n;
        let sub = Zmod::new(p, prec);
        let mut found: Vec<(Mono, MultiPoly)> = Vec::new();
        for (idx, &k) in probes.iter().enumerate() {
            let y = eval_gamma(&ops, k, &mut phi_mono).sub(&deltas[idx]);
            if !in_p_power(&y, len, n) {
                return Err(WittError::ConvergenceFailure(format!(
                    "gamma_{n} - delta is not divisible by p^{n} at T^{:?}",
                    mono_exps(k, n_vars)
                )));
            }
            let mut z = y.div_p_pow(n).expect("divisible by p^n");
            for (j, a) in &found {
                if mono_divides(*j, k) {
                    let c = binomial_multi(k, *j, n_vars, sub);
                    if c != 0 {
                        z = z.sub(&a.mul(&phi_mono(k - j).reduce_to(prec)).scale(c));
                    }
                }
            }
            let a = reduce_mod_p_image(&z, len);
            if !a.is_zero() {
                found.push((k, a));
            }
        }
        let mut terms = Vec::new();
        let mut max_order = 0;
        for (j, a) in &found {
            let js = mono_exps(*j, n_vars);
            let order: u32 = js.iter().sum();
            max_order = max_order.max(order);
            let loss: u32 = js.iter().map(|&x| val_factorial((x / pm) as u64, p)).sum();
            let gain = n as i64 - loss as i64;
            if n >= 1 && gain <= 0 {
                return Err(WittError::ConvergenceFailure(format!(
                    "correction at n = {n} with J = {js:?} has gain {gain} at level {level}"
                )));
            }
            terms.push(GammaTerm {
                j: js,
                coeff: a.to_string(),
                gain,
            });
            ops.push((*j, a.neg().shift_up(n)));
        }
        if max_order > n + 1 {
            orders_ok = false;
        }
        // the correction at step n may have order n + 1, and only the worst
        // such index bounds the gain uniformly
        let bound_gain = n as i64 - val_factorial(((n + 1) / pm) as u64, p) as i64;
        if n >= 1 && !found.is_empty() && bound_gain <= 0 {
            return Err(WittError::ConvergenceFailure(format!(
                "at n = {n} the order {} window only guarantees gain {bound_gain} at level {level}",
                n + 1
            )));
        }
        out_steps.push(GammaStep {
            n,
            max_order,
            bound_gain,
            terms,
        });
    }
    let final_ok = probes
        .iter()
        .enumerate()
        .all(|(idx, &k)| in_p_power(&eval_gamma(&ops, k, &mut phi_mono).sub(&deltas[idx]), len, steps));
    Ok(GammaResult {
        steps: out_steps,
        final_ok,
        orders_ok,
        ops,
        lift: phi.clone(),
    })
}

fn binomial_multi(k: Mono, j: Mono, n: usize, ring: Zmod) -> u64 {
    let (ks, js) = (mono_exps(k, n), mono_exps(j, n));
    ks.iter()
        .zip(&js)
        .fold(1 % ring.m, |acc, (&a, &b)| ring.mul(acc, binomial_fast(a as u64, b as u64, ring)))
}

/// Canonical representative of z modulo p W_L: coefficients of T^K reduced
/// modulo p^(s(K)+1), within the precision of z.
fn reduce_mod_p_image(z: &MultiPoly, len: usize) -> MultiPoly {
    let ring = z.ring();
    MultiPoly::from_terms(
        ring,
        z.nvars(),
        z.terms().iter().map(|&(k, c)| {
            let e = (image_level(k, ring.p, len) + 1).min(ring.e);
            (k, c % checked_pow(ring.p, e).unwrap())
        }),
    )
}
