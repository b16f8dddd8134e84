//! Exact integer arithmetic: p-adic valuations, binomials modulo prime
//! powers, residue rings Z/p^e and the orbit data used by the closed-form
//! canonical lift.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest modulus accepted for coefficient rings. Products of two residues
/// must fit in a u64.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// p-adic valuation; `None` stands for the valuation of zero.
pub fn p_valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn val_u64(n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut m = n;
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    Some(v)
}

/// Valuation with the convention val(0) = u32::MAX.
pub fn val_or_inf(n: u64, p: u64) -> u32 {
    val_u64(n, p).unwrap_or(u32::MAX)
}

/// Legendre's formula for val_p(n!).
pub fn val_factorial(n: u64, p: u64) -> u32 {
    let mut v = 0u64;
    let mut q = n / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v as u32
}

pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

thread_local! {
    static PRIMES: RefCell<(u64, Vec<u64>)> = const { RefCell::new((1, Vec::new())) };
}

fn primes_up_to(n: u64) -> Vec<u64> {
    PRIMES.with(|cell| {
        let mut cache = cell.borrow_mut();
        if cache.0 < n {
            let limit = n.max(2 * cache.0) as usize;
            let mut sieve = vec![true; limit + 1];
            sieve[0] = false;
            if limit >= 1 {
                sieve[1] = false;
            }
            let mut i = 2;
            while i * i <= limit {
                if sieve[i] {
                    let mut j = i * i;
                    while j <= limit {
                        sieve[j] = false;
                        j += i;
                    }
                }
                i += 1;
            }
            cache.1 = (2..=limit as u64).filter(|&q| sieve[q as usize]).collect();
            cache.0 = limit as u64;
        }
        cache.1.iter().copied().take_while(|&q| q <= n).collect()
    })
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// C(n, k) mod p^e, computed from the prime factorisation of C(n, k).
pub fn binomial_mod(n: u64, k: u64, p: u64, e: u32) -> u64 {
    let m = checked_pow(p, e).expect("modulus overflow");
    if k > n {
        return 0;
    }
    let mut acc = 1 % m;
    for q in primes_up_to(n) {
        let v = val_factorial(n, q) - val_factorial(k, q) - val_factorial(n - k, q);
        if v > 0 {
            acc = (acc as u128 * pow_mod(q, v as u64, m) as u128 % m as u128) as u64;
            if acc == 0 {
                break;
            }
        }
    }
    acc
}

/// Inverse of a unit modulo m.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// The residue ring Z/p^e. `e = 0` is the zero ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zmod {
    pub p: u64,
    pub e: u32,
    pub m: u64,
}

impl Zmod {
    pub fn new(p: u64, e: u32) -> Zmod {
        let m = checked_pow(p, e).filter(|&m| m <= MAX_MODULUS);
        Zmod {
            p,
            e,
            m: m.unwrap_or_else(|| panic!("modulus {p}^{e} too large")),
        }
    }

    pub fn try_new(p: u64, e: u32) -> Result<Zmod> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        match checked_pow(p, e) {
            Some(m) if m <= MAX_MODULUS => Ok(Zmod { p, e, m }),
            _ => invalid(format!("modulus {p}^{e} is too large")),
        }
    }

    pub fn with_exp(&self, e: u32) -> Zmod {
        Zmod::new(self.p, e)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.m
    }

    pub fn pow(&self, a: u64, k: u64) -> u64 {
        pow_mod(a, k, self.m)
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.m as i64) as u64
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        let m = BigInt::from(self.m);
        a.mod_floor(&m).to_u64().unwrap()
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.m)
    }

    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            self.e
        } else {
            val_u64(a, self.p).unwrap()
        }
    }

    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.e {
            0
        } else {
            checked_pow(self.p, k).unwrap()
        }
    }
}

/// An element of Z/p^e.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModExp {
    pub value: u64,
    pub p: u64,
    pub e: u32,
}

impl ModExp {
    pub fn new(value: u64, p: u64, e: u32) -> ModExp {
        let z = Zmod::new(p, e);
        ModExp {
            value: value % z.m,
            p,
            e,
        }
    }

    pub fn ring(&self) -> Zmod {
        Zmod::new(self.p, self.e)
    }

    pub fn is_unit(&self) -> bool {
        self.e > 0 && self.value % self.p != 0
    }

    /// Valuation, with `e` returned for zero.
    pub fn val(&self) -> u32 {
        self.ring().val(self.value)
    }
}

impl std::fmt::Display for ModExp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p, self.e)
    }
}

/// Factorials with the p-part removed, used for fast binomials in inner loops.
struct UnitFactorials {
    ring: Zmod,
    unit: Vec<u64>,
    inv_unit: Vec<u64>,
    val: Vec<u32>,
}

impl UnitFactorials {
    fn new(ring: Zmod) -> Self {
        UnitFactorials {
            ring,
            unit: vec![1 % ring.m],
            inv_unit: vec![1 % ring.m],
            val: vec![0],
        }
    }

    fn grow(&mut self, n: usize) {
        let r = self.ring;
        while self.unit.len() <= n {
            let i = self.unit.len() as u64;
            let mut q = i;
            let mut v = 0;
            while q % r.p == 0 {
                q /= r.p;
                v += 1;
            }
            let last = *self.unit.last().unwrap();
            let u = r.mul(last, q % r.m);
            self.unit.push(u);
            self.inv_unit.push(r.inv(u).unwrap_or(0));
            self.val.push(self.val.last().unwrap() + v);
        }
    }
}

thread_local! {
    static UNIT_FACT: RefCell<HashMap<(u64, u32), UnitFactorials>> = RefCell::new(HashMap::new());
}

/// C(n, k) = p^v * u with u a unit; returns (v, u mod p^e). Zero when k > n
/// is reported as (u32::MAX, 0).
pub fn binomial_pu(n: u64, k: u64, ring: Zmod) -> (u32, u64) {
    if k > n {
        return (u32::MAX, 0);
    }
    if k == 0 || k == n {
        return (0, 1 % ring.m);
    }
    UNIT_FACT.with(|cell| {
        let mut map = cell.borrow_mut();
        let t = map
            .entry((ring.p, ring.e))
            .or_insert_with(|| UnitFactorials::new(ring));
        t.grow(n as usize);
        let (n, k) = (n as usize, k as usize);
        let v = t.val[n] - t.val[k] - t.val[n - k];
        let u = ring.mul(ring.mul(t.unit[n], t.inv_unit[k]), t.inv_unit[n - k]);
        (v, u)
    })
}

/// C(n, k) mod p^e via the unit-factorial tables.
pub fn binomial_fast(n: u64, k: u64, ring: Zmod) -> u64 {
    let (v, u) = binomial_pu(n, k, ring);
    if v >= ring.e {
        0
    } else {
        ring.mul(u, ring.p_pow(v))
    }
}

/// C(l p^r, p^j) == C(l p^(r-1), p^(j-1)) mod p^r for 1 <= j <= r.
pub fn check_basic_id(l: u64, r: u32, j: u32, p: u64) -> Result<bool> {
    if !(1 <= j && j <= r) {
        return invalid(format!("need 1 <= j <= r, got j={j}, r={r}"));
    }
    let pr = checked_pow(p, r).ok_or_else(|| crate::WittError::InvalidInput("overflow".into()))?;
    let lhs = binomial_mod(l * pr, checked_pow(p, j).unwrap(), p, r);
    let rhs = binomial_mod(l * (pr / p), checked_pow(p, j - 1).unwrap(), p, r);
    Ok(lhs == rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDatum {
    /// Distinct part values (descending) with multiplicities c_i.
    pub parts: Vec<(u64, u64)>,
    /// Witt position of the contribution.
    pub alpha: u32,
    /// Multiplicities divided by p^(r - alpha).
    pub reduced: Vec<(u64, u64)>,
    /// p^l * multinomial / p^alpha, a unit modulo p^(r + 1 - alpha).
    pub b: ModExp,
}

fn partitions(j: u64, max_parts: u64, max_part: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if j == 0 {
        out.push(cur.clone());
        return;
    }
    if max_parts == 0 {
        return;
    }
    for part in (1..=max_part.min(j)).rev() {
        cur.push(part);
        partitions(j - part, max_parts - 1, part, cur, out);
        cur.pop();
    }
}

/// Orbits of compositions of `j` into p^(r-l) parts under permutation,
/// with the data of their contribution to D_j(V^l[f]) in W_{r+1}.
/// Orbits landing beyond position r are dropped.
pub fn orbit_enumerate(j: u64, l: u32, r: u32, p: u64) -> Result<Vec<OrbitDatum>> {
    if l > r {
        return invalid(format!("need l <= r, got l={l}, r={r}"));
    }
    let n_parts = checked_pow(p, r - l).ok_or_else(|| crate::WittError::InvalidInput("overflow".into()))?;
    let mut raw = Vec::new();
    partitions(j, n_parts, j, &mut Vec::new(), &mut raw);
    let mut seqs: Vec<Vec<u64>> = raw
        .into_iter()
        .map(|mut s| {
            s.resize(n_parts as usize, 0);
            s
        })
        .collect();
    seqs.sort();
    let mut out = Vec::new();
    for seq in seqs {
        let mut parts: Vec<(u64, u64)> = Vec::new();
        for &x in &seq {
            match parts.last_mut() {
                Some((v, c)) if *v == x => *c += 1,
                _ => parts.push((x, 1)),
            }
        }
        let mut mult = factorial(n_parts);
        for &(_, c) in &parts {
            mult /= factorial(c);
        }
        let vm = p_valuation(&BigInt::from(mult.clone()), p).unwrap();
        let alpha = l + vm;
        if alpha > r {
            continue;
        }
        let shift = checked_pow(p, r - alpha).unwrap();
        let mut reduced = Vec::with_capacity(parts.len());
        for &(v, c) in &parts {
            if c % shift != 0 {
                return invalid(format!("multiplicity {c} not divisible by {shift}"));
            }
            reduced.push((v, c / shift));
        }
        let unit = mult / BigUint::from(p).pow(vm);
        let e = r + 1 - alpha;
        let ring = Zmod::new(p, e);
        let b = ModExp::new(ring.from_bigint(&BigInt::from(unit)), p, e);
        out.push(OrbitDatum {
            parts,
            alpha,
            reduced,
            b,
        });
    }
    Ok(out)
}

/// p^l (p^(r-l))!/prod c_i! == p^l (p^(r-l-1))!/prod (c_i/p)! mod p^r.
pub fn check_multinomial_reduction(r: u32, l: u32, c: &[u64], p: u64) -> Result<bool> {
    if l >= r {
        return invalid("need l < r");
    }
    let n = checked_pow(p, r - l).ok_or_else(|| crate::WittError::InvalidInput("overflow".into()))?;
    if c.iter().sum::<u64>() != n {
        return invalid(format!("multiplicities must sum to {n}"));
    }
    if c.iter().any(|&x| x % p != 0) {
        return invalid("every multiplicity must be divisible by p");
    }
    let modulus = BigUint::from(p).pow(r);
    let pl = BigUint::from(p).pow(l);
    let mut lhs = factorial(n);
    let mut rhs = factorial(n / p);
    for &x in c {
        lhs /= factorial(x);
        rhs /= factorial(x / p);
    }
    Ok((&pl * lhs) % &modulus == (&pl * rhs) % &modulus)
}
