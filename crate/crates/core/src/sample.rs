//! Seeded random inputs for the verification suites: sparse polynomials,
//! Witt vectors, HS derivations and operator normal forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::Zmod;
use crate::hs_lift::HSDerivation;
use crate::poly::{mono_pack, MultiPoly};
use crate::wdo::{WdoNormalForm, WdoTerm, WorkingContext};
use crate::witt::WittVec;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A stream derived from `seed` and a label, so suites do not share
    /// randomness with each other.
    pub fn derived(seed: u64, label: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        Self::new(seed ^ h)
    }

    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen()
    }

    /// Sparse polynomial with at most `terms` monomials of total degree <= deg.
    pub fn poly(&mut self, ring: Zmod, nvars: usize, deg: u32, terms: usize) -> MultiPoly {
        let mut out = Vec::with_capacity(terms);
        let k = self.rng.gen_range(0..=terms);
        for _ in 0..k {
            let mut left = deg;
            let mut exps = vec![0u32; nvars];
            for e in exps.iter_mut() {
                *e = self.rng.gen_range(0..=left);
                left -= *e;
            }
            // spread the degree over all variables
            let shift = self.rng.gen_range(0..nvars);
            exps.rotate_left(shift);
            out.push((mono_pack(&exps), self.rng.gen_range(1..ring.m.max(2))));
        }
        MultiPoly::from_terms(ring, nvars, out)
    }

    /// Witt vector with deg f_i <= deg * p^i, each coordinate sparse.
    pub fn witt(&mut self, p: u64, nvars: usize, len: usize, deg: u32) -> WittVec {
        let f1 = Zmod::new(p, 1);
        let mut bound = deg as u64;
        let mut coords = Vec::with_capacity(len);
        for _ in 0..len {
            coords.push(self.poly(f1, nvars, bound.min(u16::MAX as u64) as u32, 3));
            bound *= p;
        }
        WittVec::from_coords(p, nvars, coords).expect("coordinates over F_p")
    }

    /// Witt vector with deg f_i <= deg for every i, which keeps embedded
    /// degrees small.
    pub fn witt_flat(&mut self, p: u64, nvars: usize, len: usize, deg: u32) -> WittVec {
        let f1 = Zmod::new(p, 1);
        let coords = (0..len).map(|_| self.poly(f1, nvars, deg, 2)).collect();
        WittVec::from_coords(p, nvars, coords).expect("coordinates over F_p")
    }

    /// HS derivation of length `len` with D_k(T_l) random of degree <= deg.
    pub fn hs_derivation(&mut self, p: u64, nvars: usize, len: usize, deg: u32) -> HSDerivation {
        let f1 = Zmod::new(p, 1);
        let images = (0..nvars)
            .map(|_| (0..len).map(|_| self.poly(f1, nvars, deg, 2)).collect())
            .collect();
        HSDerivation::from_images(p, nvars, images).expect("images over F_p")
    }

    /// Normal form with a few terms at random probes of the context.
    pub fn normal_form(&mut self, ctx: &WorkingContext, terms: usize) -> WdoNormalForm {
        let probes = ctx.probes();
        let mut out = Vec::with_capacity(terms);
        for _ in 0..terms {
            let k = probes[self.rng.gen_range(0..probes.len())];
            let idx = ctx.split_index(k);
            let coeff = self.witt_flat(ctx.p, ctx.nvars, ctx.len, ctx.max_deg.min(2));
            out.push(WdoTerm {
                twist: idx.twist,
                coeff,
                frac: idx.frac,
                level_index: idx.level_index,
            });
        }
        WdoNormalForm::from_terms(ctx, &out).expect("terms taken from probes")
    }
}
