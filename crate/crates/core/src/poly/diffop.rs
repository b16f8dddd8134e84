use std::collections::BTreeMap;
use std::fmt;

use super::{mono_deg, mono_exp, mono_exps, mono_pack, Mono, MultiPoly};
use crate::exactnum::{binomial_fast, Zmod};

/// A differential operator `sum_K c_K d^[K]` in divided powers, with
/// polynomial coefficients standing to the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    ring: Zmod,
    nvars: usize,
    terms: BTreeMap<Mono, MultiPoly>,
}

/// All monomials componentwise below `k`.
pub(crate) fn sub_monomials(k: Mono, n: usize) -> Vec<Mono> {
    let exps = mono_exps(k, n);
    let mut out = vec![Vec::new()];
    for &e in &exps {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for prefix in &out {
            for x in 0..=e {
                let mut v: Vec<u32> = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    let mut ms: Vec<Mono> = out.iter().map(|v| mono_pack(v)).collect();
    ms.sort_unstable();
    ms
}

/// prod_i C(a_i + b_i, a_i), the constant in d^[a] d^[b] = C d^[a+b].
pub(crate) fn multi_binomial_sum(a: Mono, b: Mono, n: usize, ring: Zmod) -> u64 {
    let mut x = 1 % ring.m;
    for i in 0..n {
        let (ai, bi) = (mono_exp(a, i) as u64, mono_exp(b, i) as u64);
        if ai > 0 && bi > 0 {
            x = ring.mul(x, binomial_fast(ai + bi, ai, ring));
        }
    }
    x
}

impl DiffOp {
    pub fn zero(ring: Zmod, nvars: usize) -> Self {
        DiffOp {
            ring,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(ring: Zmod, nvars: usize) -> Self {
        Self::divided_power(ring, nvars, 0)
    }

    pub fn divided_power(ring: Zmod, nvars: usize, k: Mono) -> Self {
        let mut op = Self::zero(ring, nvars);
        op.add_term(k, &MultiPoly::one(ring, nvars));
        op
    }

    pub fn ring(&self) -> Zmod {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: Mono) -> MultiPoly {
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.ring, self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&k| mono_deg(k)).max()
    }

    pub fn add_term(&mut self, k: Mono, c: &MultiPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&k) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        DiffOp {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(&k, c)| (k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Left multiplication by a polynomial.
    pub fn left_mul(&self, f: &MultiPoly) -> Self {
        let mut out = Self::zero(self.ring, self.nvars);
        for (&k, c) in &self.terms {
            out.add_term(k, &f.mul(c));
        }
        out
    }

    pub fn map_coeffs(&self, ring: Zmod, f: impl Fn(&MultiPoly) -> MultiPoly) -> Self {
        let mut out = Self::zero(ring, self.nvars);
        for (&k, c) in &self.terms {
            out.add_term(k, &f(c));
        }
        out
    }

    pub fn apply(&self, f: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero(self.ring, self.nvars);
        for (&k, c) in &self.terms {
            let d = f.divided_power(k);
            if !d.is_zero() {
                acc = acc.add(&c.mul(&d));
            }
        }
        acc
    }

    /// `self` after `other`, normally ordered by the Leibniz rule.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.nvars;
        let mut out = Self::zero(self.ring, n);
        for (&a, c) in &self.terms {
            let subs = sub_monomials(a, n);
            for (&b, d) in &other.terms {
                for &a1 in &subs {
                    let dd = d.divided_power(a - a1);
                    if dd.is_zero() {
                        continue;
                    }
                    let k = multi_binomial_sum(a1, b, n, self.ring);
                    if k == 0 {
                        continue;
                    }
                    out.add_term(a1 + b, &c.mul(&dd).scale(k));
                }
            }
        }
        out
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&k, c)| {
                let idx: Vec<String> = mono_exps(k, self.nvars).iter().map(|e| e.to_string()).collect();
                format!("({c})*d^[{}]", idx.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{mono_var, parse_poly};

    #[test]
    fn composition_matches_action() {
        let r = Zmod::new(3, 3);
        let a = DiffOp::divided_power(r, 1, mono_var(0, 2)).left_mul(&parse_poly("T + 2", r, 1).unwrap());
        let b = DiffOp::divided_power(r, 1, mono_var(0, 1)).left_mul(&parse_poly("T^3", r, 1).unwrap());
        let ab = a.compose(&b);
        for e in 0..12 {
            let f = parse_poly(&format!("T^{e} + 5*T"), r, 1).unwrap();
            assert_eq!(ab.apply(&f), a.apply(&b.apply(&f)));
        }
    }

    #[test]
    fn divided_powers_multiply() {
        let r = Zmod::new(2, 4);
        let d2 = DiffOp::divided_power(r, 1, mono_var(0, 2));
        let sq = d2.compose(&d2);
        assert_eq!(sq, DiffOp::divided_power(r, 1, mono_var(0, 4)).left_mul(&MultiPoly::constant(r, 1, 6)));
    }
}
