//! Big-integer reference arithmetic for Witt vectors over F_p[T].
//!
//! Coordinates are lifted to Z[T] with coefficients in [0, p), ghost
//! components are formed over Z, and the result coordinates are solved back
//! with exact division. This evaluates the universal sum and product
//! polynomials S_k, P_k on the lifts and shares no code with the library.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use wittop::poly::{mono_exps, MultiPoly};
use wittop::WittVec;

#[derive(Clone, Debug, PartialEq)]
pub struct ZPoly(pub HashMap<u64, BigInt>);

/// Exponents packed 16 bits per variable.
fn pack(e: &[u32]) -> u64 {
    e.iter().fold(0, |acc, &x| (acc << 16) | x as u64)
}

fn unpack(k: u64, n: usize) -> Vec<u32> {
    (0..n).map(|i| ((k >> (16 * (n - 1 - i))) & 0xffff) as u32).collect()
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly(HashMap::new())
    }

    pub fn one(n: usize) -> Self {
        let _ = n;
        let mut m = HashMap::new();
        m.insert(0, BigInt::one());
        ZPoly(m)
    }

    pub fn lift(f: &MultiPoly) -> Self {
        let n = f.nvars();
        ZPoly(
            f.terms()
                .iter()
                .map(|&(m, c)| (pack(&mono_exps(m, n)), BigInt::from(c)))
                .collect(),
        )
    }

    fn insert(&mut self, k: u64, c: BigInt) {
        *self.0.entry(k).or_insert_with(BigInt::zero) += c;
    }

    fn prune(mut self) -> Self {
        self.0.retain(|_, c| !c.is_zero());
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.0 {
            *out.0.entry(*k).or_insert_with(BigInt::zero) += c;
        }
        out.prune()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        ZPoly(self.0.iter().map(|(k, c)| (k.clone(), c * s)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                // fields do not carry for the degrees used here
                out.insert(a + b, x * y);
            }
        }
        out.prune()
    }

    pub fn pow(&self, k: u64, n: usize) -> Self {
        let mut acc = Self::one(n);
        let mut base = self.clone();
        let mut k = k;
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

    /// Exact division by d; panics if some coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Self {
        ZPoly(
            self.0
                .iter()
                .map(|(k, c)| {
                    let (q, r) = c.div_rem(d);
                    assert!(r.is_zero(), "ghost components are not integral");
                    (*k, q)
                })
                .collect(),
        )
    }

    /// Coefficients mod p, as sorted (exponents, residue) pairs.
    pub fn mod_p(&self, p: u64, n: usize) -> Vec<(Vec<u32>, u64)> {
        let pb = BigInt::from(p);
        let mut out: Vec<(Vec<u32>, u64)> = self
            .0
            .iter()
            .filter_map(|(k, c)| {
                let r = c.mod_floor(&pb);
                (!r.is_zero()).then(|| (unpack(*k, n), r.try_into().unwrap()))
            })
            .collect();
        out.sort();
        out
    }
}

fn p_pow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// w_s = sum_{i <= s} p^i c_i^(p^(s-i)) over Z.
pub fn ghost_z(coords: &[ZPoly], p: u64, n: usize) -> Vec<ZPoly> {
    (0..coords.len())
        .map(|s| {
            let mut w = ZPoly::zero();
            for (i, c) in coords.iter().enumerate().take(s + 1) {
                let e = p.pow((s - i) as u32);
                w = w.add(&c.pow(e, n).scale(&p_pow(p, i as u32)));
            }
            w
        })
        .collect()
}

/// Inverse of `ghost_z` on integral ghost vectors.
pub fn solve_z(ghost: &[ZPoly], p: u64, n: usize) -> Vec<ZPoly> {
    let mut coords: Vec<ZPoly> = Vec::new();
    for (s, w) in ghost.iter().enumerate() {
        let mut r = w.clone();
        for (i, c) in coords.iter().enumerate() {
            let e = p.pow((s - i) as u32);
            r = r.sub(&c.pow(e, n).scale(&p_pow(p, i as u32)));
        }
        coords.push(r.div_exact(&p_pow(p, s as u32)));
    }
    coords
}

fn lift_all(w: &WittVec) -> Vec<ZPoly> {
    w.coords().iter().map(ZPoly::lift).collect()
}

fn combine(a: &WittVec, b: &WittVec, op: impl Fn(&ZPoly, &ZPoly) -> ZPoly) -> Vec<Vec<(Vec<u32>, u64)>> {
    let (p, n) = (a.p(), a.nvars());
    let (ga, gb) = (ghost_z(&lift_all(a), p, n), ghost_z(&lift_all(b), p, n));
    let g: Vec<ZPoly> = ga.iter().zip(&gb).map(|(x, y)| op(x, y)).collect();
    solve_z(&g, p, n).iter().map(|c| c.mod_p(p, n)).collect()
}

/// Coordinates of a + b from the universal sum polynomials.
pub fn oracle_add(a: &WittVec, b: &WittVec) -> Vec<Vec<(Vec<u32>, u64)>> {
    combine(a, b, |x, y| x.add(y))
}

/// Coordinates of a * b from the universal product polynomials.
pub fn oracle_mul(a: &WittVec, b: &WittVec) -> Vec<Vec<(Vec<u32>, u64)>> {
    combine(a, b, |x, y| x.mul(y))
}

/// Coordinates of a library Witt vector in the oracle's format.
pub fn coords_of(w: &WittVec) -> Vec<Vec<(Vec<u32>, u64)>> {
    w.coords().iter().map(|c| ZPoly::lift(c).mod_p(w.p(), w.nvars())).collect()
}
