//! The ring embedding W_L(F_p[T]) -> (Z/p^L)[T],
//! (f_1, ..., f_L) -> sum_i p^i f~_(i+1)^(p^(L-1-i)), and its inverse on the
//! image.
//!
//! The image is spanned over Z/p^L by p^s(K) T^K, where
//! s(K) = max(0, L-1 - t) and t is the least p-adic valuation among the
//! nonzero exponents of K.

use crate::error::{Result, WittError};
use crate::exactnum::Zmod;
use crate::poly::{mono_min_val, Mono, MultiPoly};
use crate::witt::{tpow, WittVec};

/// Required coefficient valuation of T^K in the image at length `len`.
pub fn image_level(k: Mono, p: u64, len: usize) -> u32 {
    let r = len as u32 - 1;
    match mono_min_val(k, p) {
        None => 0,
        Some(t) => r.saturating_sub(t),
    }
}

pub fn embed(w: &WittVec) -> MultiPoly {
    let len = w.len() as u32;
    let ring = Zmod::new(w.p(), len);
    let mut acc = MultiPoly::zero(ring, w.nvars());
    if len == 0 {
        return acc;
    }
    let r = len - 1;
    for (i, f) in w.coords().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let i = i as u32;
        acc = acc.add(&tpow(f, r - i, len - i).shift_up(i));
    }
    acc
}

/// Inverse of [`embed`] on its image; `g` must have coefficients in Z/p^len.
pub fn decode(g: &MultiPoly, len: usize) -> Result<WittVec> {
    let ring = g.ring();
    if ring.e as usize != len {
        return Err(WittError::InvalidInput(format!(
            "expected coefficients modulo p^{len}, got p^{}",
            ring.e
        )));
    }
    let (p, n) = (ring.p, g.nvars());
    let mut coords = Vec::with_capacity(len);
    let mut cur = g.clone();
    for i in 0..len {
        let prec = (len - i) as u32;
        let f = cur
            .reduce_to(1)
            .pth_root_iter(prec - 1)
            .map_err(|_| WittError::NotInImage(format!("coordinate {} is not a p^{}-th power", i + 1, prec - 1)))?;
        let rest = cur.sub(&tpow(&f, prec - 1, prec));
        cur = rest
            .div_p_pow(1)
            .ok_or_else(|| WittError::NotInImage(format!("residual after coordinate {} is not divisible by p", i + 1)))?;
        coords.push(f);
    }
    WittVec::from_coords(p, n, coords)
}

/// Membership in the image, by the monomial criterion.
pub fn membership(g: &MultiPoly, len: usize) -> bool {
    let ring = g.ring();
    if ring.e as usize != len {
        return false;
    }
    g.terms()
        .iter()
        .all(|&(k, c)| ring.val(c) >= image_level(k, ring.p, len))
}

/// Embedding of `w` truncated or zero-padded to length `len`.
pub fn embed_at(w: &WittVec, len: usize) -> MultiPoly {
    embed(&w.with_len(len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn w(s: &str, p: u64, n: usize, len: usize) -> WittVec {
        WittVec::parse(s, p, n, len).unwrap()
    }

    #[test]
    fn embed_example() {
        assert_eq!(embed(&w("[T;1]", 2, 1, 2)).to_string(), "T1^2 + 2");
    }

    #[test]
    fn decode_inverts_embed() {
        for s in ["[T;1;T^3+1]", "[0;T1*T2;0]", "[T1+T2+1;1;T2^2]"] {
            let x = w(s, 3, 2, 3);
            let g = embed(&x);
            assert!(membership(&g, 3));
            assert_eq!(decode(&g, 3).unwrap(), x);
        }
    }

    #[test]
    fn non_members() {
        let g = parse_poly("2*T", Zmod::new(2, 3), 1).unwrap();
        assert!(matches!(decode(&g, 3), Err(WittError::NotInImage(_))));
        assert!(!membership(&g, 3));
        let h = parse_poly("2*T", Zmod::new(2, 2), 1).unwrap();
        assert!(membership(&h, 2));
        assert_eq!(decode(&h, 2).unwrap(), w("[0;T]", 2, 1, 2));
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let a = w("[T;T^2+1]", 2, 1, 2);
        let b = w("[T+1;T]", 2, 1, 2);
        assert_eq!(embed(&a.add(&b).unwrap()), embed(&a).add(&embed(&b)));
        assert_eq!(embed(&a.mul(&b).unwrap()), embed(&a).mul(&embed(&b)));
    }
}
