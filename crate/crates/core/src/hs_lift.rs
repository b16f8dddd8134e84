//! Hasse-Schmidt derivations of F_p[T] and their canonical lifts to W_L.
//!
//! An HS derivation of a polynomial ring is the algebra map
//! T_l -> T_l + sum_k D_k(T_l) t^k, so it is stored through the images
//! D_k(T_l). Lifting those images to Z/p^L gives an HS derivation of
//! (Z/p^L)[T] whose components preserve the embedded image of W_L.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed::{decode, embed};
use crate::error::{invalid, Result, WittError};
use crate::exactnum::{orbit_enumerate, Zmod};
use crate::poly::{mono_pack, parse_poly, DiffOp, MultiPoly};
use crate::witt::WittVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSDerivation {
    p: u64,
    nvars: usize,
    len: usize,
    /// images[l][k - 1] = D_k(T_l), over F_p.
    images: Vec<Vec<MultiPoly>>,
}

/// How coefficients over F_p are lifted to Z/p^L.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftChoice {
    /// Residues in [0, p).
    Canonical,
    /// Residues in (-p/2, p/2].
    Symmetric,
    /// Canonical plus p times a pseudo-random polynomial.
    Perturbed(u64),
}

fn lift_poly(f: &MultiPoly, e: u32, choice: LiftChoice, salt: u64) -> MultiPoly {
    let ring = Zmod::new(f.p(), e);
    match choice {
        LiftChoice::Canonical => f.lift_to(e),
        LiftChoice::Symmetric => {
            let p = f.p();
            f.map_coeffs(ring, |c| if 2 * c >= p { ring.sub(c % ring.m, p % ring.m) } else { c })
        }
        LiftChoice::Perturbed(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let n = f.nvars();
            let deg = f.total_degree().unwrap_or(0) + 1;
            let mut noise = MultiPoly::zero(ring, n);
            for _ in 0..3 {
                let exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=deg)).collect();
                let c = rng.gen_range(0..ring.m);
                noise = noise.add(&MultiPoly::monomial(ring, n, mono_pack(&exps), c));
            }
            f.lift_to(e).add(&noise.scale(f.p()))
        }
    }
}

impl HSDerivation {
    pub fn from_images(p: u64, nvars: usize, images: Vec<Vec<MultiPoly>>) -> Result<Self> {
        if images.len() != nvars {
            return invalid("need the images of every variable");
        }
        let len = images.first().map(|v| v.len()).unwrap_or(0);
        for row in &images {
            if row.len() != len {
                return invalid("every variable needs the same number of components");
            }
            for f in row {
                if f.ring() != Zmod::new(p, 1) || f.nvars() != nvars {
                    return invalid("images must be polynomials over F_p");
                }
            }
        }
        Ok(HSDerivation {
            p,
            nvars,
            len,
            images,
        })
    }

    /// D_k = a^k d_l^[k], the HS derivation T_l -> T_l + a t.
    pub fn scaled(p: u64, nvars: usize, l: usize, a: &MultiPoly, len: usize) -> Result<Self> {
        if l >= nvars {
            return invalid(format!("variable index {} out of range", l + 1));
        }
        let z = MultiPoly::zero(Zmod::new(p, 1), nvars);
        let mut images = vec![vec![z; len]; nvars];
        if len > 0 {
            images[l][0] = a.clone();
        }
        Self::from_images(p, nvars, images)
    }

    /// The divided powers (id, d_l, d_l^[2], ...).
    pub fn coordinate(p: u64, nvars: usize, l: usize, len: usize) -> Result<Self> {
        Self::scaled(p, nvars, l, &MultiPoly::one(Zmod::new(p, 1), nvars), len)
    }

    /// Parses `T1: D1(T1), D2(T1), ...; T2: ...` over F_p, padding with
    /// zeros up to length `len`; unlisted variables map to zero. `d<l>` is
    /// shorthand for the coordinate derivation in T_l.
    pub fn parse(s: &str, p: u64, nvars: usize, len: usize) -> Result<Self> {
        let s = s.trim();
        if let Some(l) = s.strip_prefix('d').and_then(|x| x.parse::<usize>().ok()) {
            if l == 0 || l > nvars {
                return Err(WittError::Parse(format!("variable d{l} out of range")));
            }
            return Self::coordinate(p, nvars, l - 1, len);
        }
        let f1 = Zmod::new(p, 1);
        let mut images = vec![vec![MultiPoly::zero(f1, nvars); len]; nvars];
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (var, rest) = part
                .split_once(':')
                .ok_or_else(|| WittError::Parse(format!("expected 'T<l>: ...', got '{part}'")))?;
            let var = var.trim();
            let l = match var {
                "T" => 1,
                _ => var
                    .strip_prefix('T')
                    .and_then(|x| x.parse::<usize>().ok())
                    .ok_or_else(|| WittError::Parse(format!("unknown variable '{var}'")))?,
            };
            if l == 0 || l > nvars {
                return Err(WittError::Parse(format!("variable '{var}' out of range")));
            }
            let comps: Vec<&str> = rest.split(',').collect();
            if comps.len() > len {
                return invalid(format!("{} components given for length {len}", comps.len()));
            }
            for (k, c) in comps.into_iter().enumerate() {
                images[l - 1][k] = parse_poly(c.trim(), f1, nvars)?;
            }
        }
        Self::from_images(p, nvars, images)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn images(&self) -> &[Vec<MultiPoly>] {
        &self.images
    }

    /// Component D_k as a divided-power operator over Z/p^e, computed from
    /// the Taylor expansion f(T + h(t)) = sum_J d^[J](f) h^J.
    pub fn component(&self, k: usize, e: u32, choice: LiftChoice) -> Result<DiffOp> {
        if k > self.len {
            return invalid(format!("component {k} requested from an HS derivation of length {}", self.len));
        }
        let ring = Zmod::new(self.p, e);
        let n = self.nvars;
        if k == 0 {
            return Ok(DiffOp::identity(ring, n));
        }
        // h[l][d] = coefficient of t^d in the lifted series of variable l
        let zero = MultiPoly::zero(ring, n);
        let h: Vec<Vec<MultiPoly>> = (0..n)
            .map(|l| {
                let mut s = vec![zero.clone(); k + 1];
                for d in 1..=k.min(self.len) {
                    s[d] = lift_poly(&self.images[l][d - 1], e, choice, (l * 1000 + d) as u64);
                }
                s
            })
            .collect();
        let series_mul = |a: &[MultiPoly], b: &[MultiPoly]| -> Vec<MultiPoly> {
            let mut out = vec![zero.clone(); k + 1];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate().take(k + 1 - i) {
                    if !y.is_zero() {
                        out[i + j] = out[i + j].add(&x.mul(y));
                    }
                }
            }
            out
        };
        // powers[l][e] = h_l^e truncated at t^k
        let mut one_series = vec![zero.clone(); k + 1];
        one_series[0] = MultiPoly::one(ring, n);
        let powers: Vec<Vec<Vec<MultiPoly>>> = h
            .iter()
            .map(|hl| {
                let mut v = vec![one_series.clone()];
                for _ in 0..k {
                    let next = series_mul(v.last().unwrap(), hl);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut op = DiffOp::zero(ring, n);
        let mut idx = vec![0u32; n];
        fn rec(
            l: usize,
            left: usize,
            acc: Vec<MultiPoly>,
            idx: &mut Vec<u32>,
            powers: &[Vec<Vec<MultiPoly>>],
            mul: &dyn Fn(&[MultiPoly], &[MultiPoly]) -> Vec<MultiPoly>,
            k: usize,
            op: &mut DiffOp,
        ) {
            if l == idx.len() {
                if !acc[k].is_zero() {
                    op.add_term(mono_pack(idx), &acc[k]);
                }
                return;
            }
            for e in 0..=left {
                idx[l] = e as u32;
                let next = if e == 0 { acc.clone() } else { mul(&acc, &powers[l][e]) };
                if next.iter().all(|x| x.is_zero()) {
                    continue;
                }
                rec(l + 1, left - e, next, idx, powers, mul, k, op);
            }
            idx[l] = 0;
        }
        rec(0, k, one_series, &mut idx, &powers, &series_mul, k, &mut op);
        Ok(op)
    }
}

/// Canonical lift via the embedding: apply the lifted component to the
/// embedded vector and decode.
pub fn canonical_lift_embed(d: &HSDerivation, j: usize, w: &WittVec, choice: LiftChoice) -> Result<WittVec> {
    check_inputs(d, w)?;
    if j == 0 {
        return Ok(w.clone());
    }
    let len = w.len();
    if len == 0 {
        return Ok(w.clone());
    }
    let op = d.component(j, len as u32, choice)?;
    decode(&op.apply(&embed(w)), len)
}

fn check_inputs(d: &HSDerivation, w: &WittVec) -> Result<()> {
    if d.p != w.p() || d.nvars != w.nvars() {
        return invalid("HS derivation and Witt vector live over different rings");
    }
    Ok(())
}

/// Canonical lift via the closed orbit formula. The contribution of an
/// orbit is b * V^alpha[g] with b the full integer unit, multiplied in
/// W(F_p) rather than reduced to F_p.
pub fn canonical_lift_orbit(d: &HSDerivation, j: usize, w: &WittVec) -> Result<WittVec> {
    check_inputs(d, w)?;
    if j == 0 {
        return Ok(w.clone());
    }
    let (p, n, len) = (d.p, d.nvars, w.len());
    if len == 0 {
        return Ok(w.clone());
    }
    if j > d.len {
        return invalid(format!("component {j} requested from an HS derivation of length {}", d.len));
    }
    let r = len as u32 - 1;
    let comps: Vec<DiffOp> = (0..=j)
        .map(|i| d.component(i, 1, LiftChoice::Canonical))
        .collect::<Result<_>>()?;
    let mut acc = WittVec::zero(p, n, len);
    for (l, f) in w.coords().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let derived: Vec<MultiPoly> = comps.iter().map(|c| c.apply(f)).collect();
        for orbit in orbit_enumerate(j as u64, l as u32, r, p)? {
            let mut g = MultiPoly::one(Zmod::new(p, 1), n);
            for &(v, c) in &orbit.reduced {
                g = g.mul(&derived[v as usize].pow(c));
                if g.is_zero() {
                    break;
                }
            }
            if g.is_zero() {
                continue;
            }
            let alpha = orbit.alpha as usize;
            let b = WittVec::integer(orbit.b.value, p, n, len - alpha);
            let coords: Vec<MultiPoly> = b
                .coords()
                .iter()
                .enumerate()
                .map(|(i, beta)| g.frob_sub(i as u32).mul(beta))
                .collect();
            let contribution = WittVec::from_coords(p, n, coords)?.with_len(len).verschiebung(alpha);
            acc = acc.add(&contribution)?;
        }
    }
    Ok(acc)
}

/// D~_j F = F D~_(j/p), with the right side zero when p does not divide j.
pub fn check_hs_frobenius(d: &HSDerivation, j: usize, w: &WittVec) -> Result<bool> {
    let lhs = canonical_lift_embed(d, j, &w.frobenius(), LiftChoice::Canonical)?;
    let rhs = if j as u64 % d.p == 0 {
        canonical_lift_embed(d, j / d.p as usize, w, LiftChoice::Canonical)?.frobenius()
    } else {
        WittVec::zero(d.p, d.nvars, w.len())
    };
    Ok(lhs == rhs)
}

/// R D~_j = D~_(j/p) R (zero when p does not divide j), and
/// D~_j(W_(r+1)) lies in V^(r - val(j)).
pub fn check_move_down(d: &HSDerivation, j: usize, w: &WittVec) -> Result<bool> {
    let len = w.len();
    if len < 2 {
        return invalid("move-down needs length at least 2");
    }
    let full = canonical_lift_embed(d, j, w, LiftChoice::Canonical)?;
    let lhs = full.restrict(len - 1)?;
    let rw = w.restrict(len - 1)?;
    let rhs = if j as u64 % d.p == 0 {
        canonical_lift_embed(d, j / d.p as usize, &rw, LiftChoice::Canonical)?
    } else {
        WittVec::zero(d.p, d.nvars, len - 1)
    };
    let r = len as u32 - 1;
    let a = crate::exactnum::val_or_inf(j as u64, d.p);
    let contained = a > r || full.v_valuation() as u32 >= r - a;
    Ok(lhs == rhs && contained)
}

impl std::fmt::Display for HSDerivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(l, row)| {
                let parts: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                format!("T{}: {}", l + 1, parts.join(", "))
            })
            .collect();
        write!(f, "{}", rows.join("; "))
    }
}
