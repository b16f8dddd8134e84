//! Truncated p-typical Witt vectors W_L(F_p[T1..Tn]).
//!
//! Sums and products are computed by ghost-solve-peel: the ghost vector of
//! the result over the lift Z[T] is known, and coordinates are recovered
//! one at a time. Ghost component s is only meaningful modulo p^(s+1), so
//! it is stored there.

use std::fmt;

use crate::error::{invalid, Result, WittError};
use crate::exactnum::Zmod;
use crate::poly::{parse_poly, MultiPoly, MAX_VARS};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittVec {
    p: u64,
    nvars: usize,
    coords: Vec<MultiPoly>,
}

/// Ghost components; component s lives in (Z/p^(s+1))[T].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostVec {
    pub comps: Vec<MultiPoly>,
}

/// `x~^(p^k) mod p^prec` for x over F_p, any lift x~; needs prec <= k + 1.
pub(crate) fn tpow(x: &MultiPoly, k: u32, prec: u32) -> MultiPoly {
    debug_assert!(prec <= k + 1);
    debug_assert_eq!(x.ring().e, 1);
    if prec == 0 {
        return MultiPoly::zero(x.ring().with_exp(0), x.nvars());
    }
    x.frob_sub(k + 1 - prec).lift_to(prec).pow_p_iter(prec - 1)
}

/// Successive p-th powers of a fixed polynomial.
struct PowChain {
    base: MultiPoly,
    exp: u64,
    cur: MultiPoly,
}

impl PowChain {
    fn new(start: MultiPoly) -> Self {
        PowChain {
            base: start.clone(),
            exp: 1,
            cur: start,
        }
    }

    fn current(&self) -> &MultiPoly {
        &self.cur
    }

    fn advance(&mut self) {
        let p = self.base.p();
        self.exp *= p;
        // sparse bases are cheaper to raise directly
        self.cur = if self.base.len() <= 6 {
            self.base.pow(self.exp)
        } else {
            self.cur.pow(p)
        };
    }
}

/// Recovers coordinates from ghost components (component k modulo p^(k+1)).
pub(crate) fn peel(target: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
    let len = target.len();
    let mut coords: Vec<MultiPoly> = Vec::with_capacity(len);
    let mut chains: Vec<PowChain> = Vec::with_capacity(len);
    for k in 0..len {
        let prec = k as u32 + 1;
        let mut resid = target[k].clone();
        debug_assert_eq!(resid.ring().e, prec);
        for (i, ch) in chains.iter_mut().enumerate() {
            ch.advance();
            let term = ch.current().reduce_to(prec - i as u32).shift_up(i as u32);
            resid = resid.sub(&term);
        }
        let s = resid.div_p_pow(k as u32).ok_or_else(|| {
            WittError::NotInImage(format!("ghost component {k} is not congruent to a Witt vector"))
        })?;
        debug_assert_eq!(s.ring().e, 1);
        let top = len as u32 - k as u32;
        chains.push(PowChain::new(s.lift_to(top)));
        coords.push(s);
    }
    Ok(coords)
}

impl WittVec {
    pub fn zero(p: u64, nvars: usize, len: usize) -> Self {
        let r = Zmod::new(p, 1);
        WittVec {
            p,
            nvars,
            coords: vec![MultiPoly::zero(r, nvars); len],
        }
    }

    pub fn from_coords(p: u64, nvars: usize, coords: Vec<MultiPoly>) -> Result<Self> {
        if nvars > MAX_VARS {
            return invalid(format!("at most {MAX_VARS} variables"));
        }
        for c in &coords {
            if c.ring() != Zmod::new(p, 1) || c.nvars() != nvars {
                return invalid("Witt coordinates must be polynomials over F_p in the same variables");
            }
        }
        Ok(WittVec { p, nvars, coords })
    }

    pub fn teichmuller(f: &MultiPoly, len: usize) -> Result<Self> {
        let mut w = Self::zero(f.p(), f.nvars(), len);
        if len > 0 {
            w.coords[0] = f.clone();
        }
        Self::from_coords(f.p(), f.nvars(), w.coords)
    }

    pub fn one(p: u64, nvars: usize, len: usize) -> Self {
        let mut w = Self::zero(p, nvars, len);
        if len > 0 {
            w.coords[0] = MultiPoly::one(Zmod::new(p, 1), nvars);
        }
        w
    }

    /// The image of an integer `c` (read modulo p^len).
    pub fn integer(c: u64, p: u64, nvars: usize, len: usize) -> Self {
        if len == 0 {
            return Self::zero(p, nvars, 0);
        }
        let ring = Zmod::new(p, len as u32);
        let g = MultiPoly::constant(ring, nvars, c % ring.m);
        crate::embed::decode(&g, len).expect("integers are in the image")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[MultiPoly] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coordinate, i.e. the largest m with the
    /// vector in V^m; the length for zero.
    pub fn v_valuation(&self) -> usize {
        self.coords.iter().position(|c| !c.is_zero()).unwrap_or(self.len())
    }

    /// True when deg f_i <= d * p^i for every coordinate.
    pub fn fits_degree(&self, d: u32) -> bool {
        let mut bound = d as u64;
        for c in &self.coords {
            if c.total_degree().unwrap_or(0) as u64 > bound {
                return false;
            }
            bound *= self.p;
        }
        true
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.nvars != other.nvars || self.len() != other.len() {
            return invalid(format!(
                "incompatible Witt vectors (p={}, n={}, L={}) and (p={}, n={}, L={})",
                self.p,
                self.nvars,
                self.len(),
                other.p,
                other.nvars,
                other.len()
            ));
        }
        Ok(())
    }

    pub fn ghost(&self) -> GhostVec {
        let len = self.len();
        let mut comps: Vec<MultiPoly> = (0..len)
            .map(|s| MultiPoly::zero(Zmod::new(self.p, s as u32 + 1), self.nvars))
            .collect();
        for (i, f) in self.coords.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let mut ch = PowChain::new(f.lift_to((len - i) as u32));
            for (s, comp) in comps.iter_mut().enumerate().skip(i) {
                if s > i {
                    ch.advance();
                }
                let term = ch.current().reduce_to((s + 1 - i) as u32).shift_up(i as u32);
                *comp = comp.add(&term);
            }
        }
        GhostVec { comps }
    }

    fn from_ghost(p: u64, nvars: usize, g: &GhostVec) -> Result<Self> {
        let coords = peel(&g.comps)?;
        Ok(WittVec { p, nvars, coords })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let (a, b) = (self.ghost(), other.ghost());
        let comps = a.comps.iter().zip(&b.comps).map(|(x, y)| x.add(y)).collect();
        Self::from_ghost(self.p, self.nvars, &GhostVec { comps })
    }

    pub fn neg(&self) -> Self {
        let g = self.ghost();
        let comps = g.comps.iter().map(|x| x.neg()).collect();
        Self::from_ghost(self.p, self.nvars, &GhostVec { comps }).expect("negation is integral")
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let (a, b) = (self.ghost(), other.ghost());
        let comps = a.comps.iter().zip(&b.comps).map(|(x, y)| x.sub(y)).collect();
        Self::from_ghost(self.p, self.nvars, &GhostVec { comps })
    }

    /// Ghost components of the product, assembled from the products
    /// V^i[a_i] V^j[b_j] = p^min V^max[a_i^(p^(j-i)) b_j] (for i <= j).
    fn product_ghost(&self, other: &Self) -> GhostVec {
        let len = self.len();
        let (p, n) = (self.p, self.nvars);
        let mut comps: Vec<MultiPoly> = (0..len)
            .map(|s| MultiPoly::zero(Zmod::new(p, s as u32 + 1), n))
            .collect();
        for i in 0..len {
            let a = &self.coords[i];
            if a.is_zero() {
                continue;
            }
            for j in 0..len - i {
                let b = &other.coords[j];
                if b.is_zero() {
                    continue;
                }
                let lo = i.min(j);
                let x = if i <= j {
                    a.frob_sub((j - i) as u32).mul(b)
                } else {
                    a.mul(&b.frob_sub((i - j) as u32))
                };
                // component k needs x~^(p^(k-max(i,j))) mod p^(k+1-i-j),
                // which equals (F^lo x)~^(p^(k-i-j)) there.
                let mut ch = PowChain::new(x.frob_sub(lo as u32).lift_to((len - i - j) as u32));
                for k in (i + j)..len {
                    if k > i + j {
                        ch.advance();
                    }
                    let term = ch
                        .current()
                        .reduce_to((k + 1 - i - j) as u32)
                        .shift_up((i + j) as u32);
                    comps[k] = comps[k].add(&term);
                }
            }
        }
        GhostVec { comps }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let g = self.product_ghost(other);
        Self::from_ghost(self.p, self.nvars, &g)
    }

    /// Coordinatewise p-th power.
    pub fn frobenius(&self) -> Self {
        WittVec {
            p: self.p,
            nvars: self.nvars,
            coords: self.coords.iter().map(|c| c.frob_sub(1)).collect(),
        }
    }

    pub fn frobenius_pow(&self, k: u32) -> Self {
        WittVec {
            p: self.p,
            nvars: self.nvars,
            coords: self.coords.iter().map(|c| c.frob_sub(k)).collect(),
        }
    }

    /// V^k at fixed length: coordinates shift up by k, the top k drop off.
    pub fn verschiebung(&self, k: usize) -> Self {
        let len = self.len();
        let z = MultiPoly::zero(Zmod::new(self.p, 1), self.nvars);
        let mut coords = vec![z; k.min(len)];
        coords.extend(self.coords.iter().take(len.saturating_sub(k)).cloned());
        WittVec {
            p: self.p,
            nvars: self.nvars,
            coords,
        }
    }

    /// Restriction W_L -> W_len.
    pub fn restrict(&self, len: usize) -> Result<Self> {
        if len > self.len() {
            return invalid(format!("cannot restrict length {} to {len}", self.len()));
        }
        Ok(self.truncate(len))
    }

    pub(crate) fn truncate(&self, len: usize) -> Self {
        WittVec {
            p: self.p,
            nvars: self.nvars,
            coords: self.coords[..len.min(self.len())].to_vec(),
        }
    }

    /// Truncates or pads with zero coordinates.
    pub fn with_len(&self, len: usize) -> Self {
        let mut w = self.truncate(len);
        while w.coords.len() < len {
            w.coords.push(MultiPoly::zero(Zmod::new(self.p, 1), self.nvars));
        }
        w
    }

    /// V^j(a * b) with b the content of a V^j-element.
    pub fn vmul(a: &Self, j: usize, b: &Self) -> Result<Self> {
        a.check_compat(b)?;
        let len = a.len();
        if j >= len {
            return Ok(Self::zero(a.p, a.nvars, len));
        }
        let prod = a.truncate(len - j).mul(&b.truncate(len - j))?;
        Ok(prod.with_len(len).verschiebung(j))
    }

    /// Functoriality along the ring map S_i -> h[i].
    pub fn map_along(&self, h: &[MultiPoly]) -> Result<Self> {
        if h.len() != self.nvars {
            return invalid("need one image per variable");
        }
        let target_n = h.first().map(|x| x.nvars()).unwrap_or(self.nvars);
        for x in h {
            if x.ring() != Zmod::new(self.p, 1) || x.nvars() != target_n {
                return invalid("images must be polynomials over F_p in a common ring");
            }
        }
        let coords = self.coords.iter().map(|c| c.compose(h)).collect();
        Ok(WittVec {
            p: self.p,
            nvars: target_n,
            coords,
        })
    }

    pub fn parse(s: &str, p: u64, nvars: usize, len: usize) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| WittError::Parse(format!("Witt vector must look like [f1; f2; ...], got '{s}'")))?;
        let r = Zmod::try_new(p, 1)?;
        let parts: Vec<&str> = inner.split(';').collect();
        if parts.len() > len {
            return Err(WittError::Parse(format!("{} coordinates for length {len}", parts.len())));
        }
        let mut coords = Vec::with_capacity(len);
        for part in parts {
            coords.push(parse_poly(part, r, nvars)?);
        }
        while coords.len() < len {
            coords.push(MultiPoly::zero(r, nvars));
        }
        Self::from_coords(p, nvars, coords)
    }
}

impl fmt::Display for WittVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(";"))
    }
}

impl fmt::Display for GhostVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, p: u64, n: usize, len: usize) -> WittVec {
        WittVec::parse(s, p, n, len).unwrap()
    }

    #[test]
    fn small_cases() {
        let a = w("[1;0]", 2, 1, 2);
        assert_eq!(a.add(&a).unwrap(), w("[0;1]", 2, 1, 2));
        let b = w("[0;1]", 2, 1, 2);
        assert!(b.mul(&b).unwrap().is_zero());
        assert_eq!(w("[T;1]", 2, 1, 2).frobenius(), w("[T^2;1]", 2, 1, 2));
        let g = w("[T;1]", 2, 1, 2).ghost();
        assert_eq!(g.comps[0].to_string(), "T1");
        assert_eq!(g.comps[1].to_string(), "T1^2 + 2");
        assert_eq!(w("[0;1]", 2, 1, 2).ghost().comps[1].to_string(), "2");
    }

    #[test]
    fn integers_and_negation() {
        let minus_one = WittVec::integer(7, 2, 1, 3);
        assert_eq!(minus_one, w("[1;1;1]", 2, 1, 3));
        let x = w("[T;T^2+1;T]", 3, 1, 3);
        assert!(x.add(&x.neg()).unwrap().is_zero());
        assert_eq!(x.neg(), w("[2*T;2*T^2+2;2*T]", 3, 1, 3));
        let three = WittVec::integer(3, 3, 1, 2);
        assert_eq!(three, w("[0;1]", 3, 1, 2));
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let f = parse_poly("T1 + T2", Zmod::new(3, 1), 2).unwrap();
        let g = parse_poly("T1*T2 + 2", Zmod::new(3, 1), 2).unwrap();
        let tf = WittVec::teichmuller(&f, 3).unwrap();
        let tg = WittVec::teichmuller(&g, 3).unwrap();
        assert_eq!(tf.mul(&tg).unwrap(), WittVec::teichmuller(&f.mul(&g), 3).unwrap());
    }

    #[test]
    fn vmul_and_shift() {
        let t = w("[T]", 2, 1, 2);
        let one = w("[1]", 2, 1, 2);
        assert_eq!(WittVec::vmul(&t, 1, &one).unwrap(), w("[0;T]", 2, 1, 2));
        assert_eq!(t.verschiebung(1), w("[0;T]", 2, 1, 2));
        assert_eq!(t.restrict(1).unwrap(), w("[T]", 2, 1, 1));
    }

    #[test]
    fn map_along_substitutes() {
        let x = w("[T1;T1^2]", 2, 1, 2);
        let h = vec![parse_poly("T1 + T2", Zmod::new(2, 1), 2).unwrap()];
        assert_eq!(x.map_along(&h).unwrap(), w("[T1+T2;T1^2+T2^2]", 2, 2, 2));
    }
}
