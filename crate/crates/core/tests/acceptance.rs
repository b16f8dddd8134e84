//! Acceptance criteria 1-8. Every criterion prints one PASS/FAIL line; the
//! target exits nonzero if any criterion fails. All comparisons are exact.

mod common;

use std::time::{Duration, Instant};

use wittop::exactnum::{check_basic_id, check_multinomial_reduction, Zmod};
use wittop::frob_phi::{delta_embedded, gamma_approx, FrobLift};
use wittop::hs_lift::{canonical_lift_embed, canonical_lift_orbit, HSDerivation, LiftChoice};
use wittop::poly::{mono_exps, mono_pack, monomials_up_to, MultiPoly};
use wittop::sample::Sampler;
use wittop::verify::{run_suite, SuiteConfig, SuiteReport};
use wittop::wdo::{check_products_lemma, WorkingContext};
use wittop::{WittError, WittVec};

/// Runtime targets.
const GHOST_BUDGET: Duration = Duration::from_secs(60);
const CONGRUENCE_BUDGET: Duration = Duration::from_secs(10);
/// Minimum sample counts.
const GHOST_PAIRS: usize = 200;
const ORACLE_PAIRS: usize = 40;
const LIFT_SAMPLES: usize = 100;
const NORMAL_FORMS: usize = 50;
const LIFT_PAIRS: usize = 3;
const FILTRATION_SAMPLES: usize = 100;
const DERIVATION_PAIRS: usize = 100;

struct Verdict {
    ok: bool,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { ok: true, notes: Vec::new() }
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(format!("failed: {}", what.into()));
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Every check of the report passes, and the named checks ran at
    /// `points` grid points with at least `min_cases` cases each.
    fn suite(&mut self, report: &SuiteReport, check: &str, points: usize, min_cases: usize) {
        let rows: Vec<_> = report.checks.iter().filter(|c| c.check == check).collect();
        self.require(rows.len() >= points, format!("{check}: {} grid points, want {points}", rows.len()));
        for c in &rows {
            self.require(c.cases >= min_cases, format!("{check} [{}]: {} cases, want {min_cases}", c.point, c.cases));
            if let Some(ce) = &c.counterexample {
                self.require(false, format!("{check} [{}]: {}; replay: {}", c.point, ce.detail, ce.replay));
            }
        }
        let cases: usize = rows.iter().map(|c| c.cases).sum();
        self.note(format!("{check}: {} points, {cases} cases", rows.len()));
    }

    fn all_pass(&mut self, report: &SuiteReport) {
        for c in report.failures() {
            let ce = c.counterexample.as_ref().map(|x| x.replay.as_str()).unwrap_or("");
            self.require(false, format!("{} [{}] {}", c.check, c.point, ce));
        }
    }
}

fn grid(primes: &[u64], len: usize, vars: usize, deg: u32) -> SuiteConfig {
    SuiteConfig {
        primes: primes.to_vec(),
        max_len: len,
        max_vars: vars,
        max_deg: deg,
        ..SuiteConfig::default()
    }
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let report = run_suite(&grid(&[2, 3, 5], 4, 2, 4), "ghost-oracle").unwrap();
    v.all_pass(&report);
    // 3 primes x 4 lengths x 2 variable counts
    v.suite(&report, "ghost-add", 24, GHOST_PAIRS);
    v.suite(&report, "ghost-mul", 24, GHOST_PAIRS);
    let mut agree = 0;
    for p in [2u64, 3, 5] {
        for len in 1..=3 {
            for n in 1..=2 {
                let mut rng = Sampler::new(1000 * p + 10 * len as u64 + n as u64);
                for _ in 0..ORACLE_PAIRS {
                    let a = rng.witt_flat(p, n, len, 4);
                    let b = rng.witt_flat(p, n, len, 4);
                    let sum_ok = common::coords_of(&a.add(&b).unwrap()) == common::oracle_add(&a, &b);
                    let prod_ok = common::coords_of(&a.mul(&b).unwrap()) == common::oracle_mul(&a, &b);
                    v.require(sum_ok && prod_ok, format!("universal polynomials disagree at p={p}: a={a} b={b}"));
                    agree += 1;
                }
            }
        }
    }
    v.note(format!("integral oracle: {agree} pairs for L <= 3"));
    let t = start.elapsed();
    v.require(t < GHOST_BUDGET, format!("runtime {t:.1?} over {GHOST_BUDGET:?}"));
    v.note(format!("{t:.1?}"));
    v
}

/// f * df/dT1 over F_p, computed from the terms.
fn f_df(f: &MultiPoly) -> MultiPoly {
    let ring = f.ring();
    let n = f.nvars();
    let d = MultiPoly::from_terms(
        ring,
        n,
        f.terms().iter().filter_map(|&(m, c)| {
            let mut e = mono_exps(m, n);
            let k = e[0] as u64;
            (k % ring.p != 0).then(|| {
                e[0] -= 1;
                (mono_pack(&e), ring.mul(c, k % ring.p))
            })
        }),
    );
    f.mul(&d)
}

fn criteria_2_3() -> (Verdict, Verdict) {
    let report = run_suite(&grid(&[2, 3], 3, 2, 2), "canonical-lift").unwrap();
    let mut c2 = Verdict::new();
    // 2 primes x 3 lengths x 2 variable counts
    c2.suite(&report, "orbit-vs-embed", 12, LIFT_SAMPLES);
    c2.suite(&report, "pinned-lifts", 1, 1);
    // pinned instances, checked against hand formulas
    let f1 = Zmod::new(2, 1);
    let d = HSDerivation::coordinate(2, 1, 0, 2).unwrap();
    let mut rng = Sampler::new(2);
    for _ in 0..LIFT_SAMPLES {
        let f = rng.poly(f1, 1, 5, 3);
        let w = WittVec::from_coords(2, 1, vec![f.clone(), MultiPoly::zero(f1, 1)]).unwrap();
        let want = WittVec::from_coords(2, 1, vec![MultiPoly::zero(f1, 1), f_df(&f)]).unwrap();
        let embed_route = canonical_lift_embed(&d, 1, &w, LiftChoice::Canonical).unwrap();
        let orbit_route = canonical_lift_orbit(&d, 1, &w).unwrap();
        c2.require(embed_route == want && orbit_route == want, format!("D~_1({w}) != (0, f df)"));
    }
    let t2 = WittVec::parse("[T^2;0]", 2, 1, 2).unwrap();
    let want = WittVec::parse("[0;T^2]", 2, 1, 2).unwrap();
    c2.require(canonical_lift_embed(&d, 2, &t2, LiftChoice::Canonical).unwrap() == want, "D~_2(T^2,0) embed route");
    c2.require(canonical_lift_orbit(&d, 2, &t2).unwrap() == want, "D~_2(T^2,0) orbit route");
    c2.note(format!("pinned: D~_1(f,0) on {LIFT_SAMPLES} f, D~_2(T^2,0)"));
    let mut c3 = Verdict::new();
    c3.suite(&report, "hs-frobenius", 12, LIFT_SAMPLES);
    // move-down needs L >= 2
    c3.suite(&report, "move-down", 8, LIFT_SAMPLES);
    (c2, c3)
}

/// C(n, k) mod p^e by the product formula with p-parts tracked apart.
fn binom_oracle(n: u64, k: u64, p: u64, e: u32) -> u64 {
    if k > n {
        return 0;
    }
    let m = p.pow(e) as u128;
    let (mut num, mut den, mut v) = (1u128, 1u128, 0i64);
    for i in 1..=k {
        let (mut a, mut b) = (n - k + i, i);
        while a % p == 0 {
            a /= p;
            v += 1;
        }
        while b % p == 0 {
            b /= p;
            v -= 1;
        }
        num = num * (a as u128 % m) % m;
        den = den * (b as u128 % m) % m;
    }
    if v >= e as i64 {
        return 0;
    }
    let inv = (1..m).find(|x| den * x % m == 1 % m).unwrap_or(0);
    (num * inv % m * (p as u128).pow(v as u32) % m) as u64
}

/// n! / prod c_i! mod p^e, times p^l.
fn multinomial_oracle(n: u64, c: &[u64], l: u32, p: u64, e: u32) -> u64 {
    let mut acc = 1u64;
    let mut left = n;
    for &x in c {
        acc = (acc as u128 * binom_oracle(left, x, p, e) as u128 % p.pow(e) as u128) as u64;
        left -= x;
    }
    (acc as u128 * (p as u128).pow(l) % p.pow(e) as u128) as u64
}

fn multisets(total: u64, step: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if total == 0 {
        out.push(cur.clone());
        return;
    }
    let mut x = max.min(total);
    while x >= step {
        cur.push(x);
        multisets(total - x, step, x, cur, out);
        cur.pop();
        x -= step;
    }
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let report = run_suite(&grid(&[2, 3, 5], 4, 2, 6), "identities").unwrap();
    v.all_pass(&report);
    // l = 0..=8 and 1 <= j <= r <= 6: 9 * 21 cases per prime
    v.suite(&report, "basic-id", 3, 189);
    v.suite(&report, "multinomial-reduction", 2, 1);
    let mut basic = 0;
    for p in [2u64, 3, 5] {
        for l in 0..=8u64 {
            for r in 1..=6u32 {
                for j in 1..=r {
                    let lhs = binom_oracle(l * p.pow(r), p.pow(j), p, r);
                    let rhs = binom_oracle(l * p.pow(r - 1), p.pow(j - 1), p, r);
                    v.require(lhs == rhs, format!("basic-id oracle: p={p} l={l} r={r} j={j}"));
                    v.require(check_basic_id(l, r, j, p).unwrap(), format!("basic-id: p={p} l={l} r={r} j={j}"));
                    basic += 1;
                }
            }
        }
    }
    let mut multi = 0;
    for p in [2u64, 3] {
        for r in 1..=4u32 {
            for l in 0..r {
                let n = p.pow(r - l);
                let mut parts = Vec::new();
                multisets(n, p, n, &mut Vec::new(), &mut parts);
                for c in parts {
                    let reduced: Vec<u64> = c.iter().map(|x| x / p).collect();
                    let lhs = multinomial_oracle(n, &c, l, p, r);
                    let rhs = multinomial_oracle(n / p, &reduced, l, p, r);
                    v.require(lhs == rhs, format!("multinomial oracle: p={p} r={r} l={l} c={c:?}"));
                    v.require(
                        check_multinomial_reduction(r, l, &c, p).unwrap(),
                        format!("multinomial-reduction: p={p} r={r} l={l} c={c:?}"),
                    );
                    multi += 1;
                }
            }
        }
    }
    v.note(format!("oracle: {basic} basic-id, {multi} multinomial cases"));
    let t = start.elapsed();
    v.require(t < CONGRUENCE_BUDGET, format!("runtime {t:.1?} over {CONGRUENCE_BUDGET:?}"));
    v.note(format!("{t:.1?}"));
    v
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::new();
    let report = run_suite(&grid(&[2, 3], 3, 2, 6), "operators").unwrap();
    v.all_pass(&report);
    // 2 primes x 3 lengths x 2 variable counts x D in {2, 6}
    v.suite(&report, "reconstruct-evaluate", 24, NORMAL_FORMS);
    v.suite(&report, "compose-symbolic", 24, 1);
    v.suite(&report, "commutator", 4, 1);
    v.suite(&report, "frobenius-conjugate", 12, 1);
    v.suite(&report, "products-lemma", 2, 1);
    let (mut units, mut vacuous) = (0, 0);
    for p in [2u64, 3] {
        let ctx = WorkingContext::new(p, 1, 3, (p * p) as u32, 0).unwrap();
        for r in 0..=2u32 {
            for i in 1..=(p * p) as u32 {
                let k = i as u64 * p.pow(ctx.r_top() - r);
                if k > ctx.budget() as u64 {
                    continue;
                }
                let (u, ok) = check_products_lemma(&ctx, 0, i, r).unwrap();
                v.require(ok, format!("products lemma p={p} i={i} r={r}"));
                if u.e == 0 {
                    vacuous += 1;
                } else {
                    v.require(u.val() == 0, format!("u = {} is not a unit (p={p} i={i} r={r})", u.value));
                    units += 1;
                }
            }
        }
    }
    v.note(format!("products lemma: {units} units, {vacuous} vacuous"));
    v
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    let report = run_suite(&grid(&[2, 3], 3, 2, 6), "projectors").unwrap();
    v.all_pass(&report);
    v.suite(&report, "projector", 12, 1);
    v.suite(&report, "pi-components", 2, 1);
    v
}

/// (gamma_N - delta)(b) lies in p^N W', read off monomialwise.
fn in_p_power(g: &MultiPoly, n: u32, len: usize) -> bool {
    let r = len as u32 - 1;
    let (p, nv) = (g.p(), g.nvars());
    g.terms().iter().all(|&(m, c)| {
        let minval = mono_exps(m, nv)
            .iter()
            .filter(|&&e| e > 0)
            .map(|&e| {
                let (mut e, mut k) = (e, 0);
                while e % p as u32 == 0 {
                    e /= p as u32;
                    k += 1;
                }
                k
            })
            .min()
            .unwrap_or(u32::MAX);
        let s = r.saturating_sub(minval);
        let need = (s + n).min(len as u32);
        (0..need).all(|i| c % p.pow(i + 1) == 0)
    })
}

fn criterion_7() -> Verdict {
    let mut v = Verdict::new();
    let report = run_suite(&grid(&[2, 3, 5], 4, 2, 6), "delta").unwrap();
    v.all_pass(&report);
    v.suite(&report, "delta-order", 6, LIFT_PAIRS);
    v.suite(&report, "gamma-converges-level-0", 2, 1);
    v.suite(&report, "gamma-stagnates-level-0", 1, 1);
    v.suite(&report, "gamma-converges-level-1", 1, 1);

    let gamma_ok = |p: u64, lift: &str, level: u32| -> Result<bool, WittError> {
        let len = 3;
        let std = FrobLift::standard(p, 1, len)?;
        let other = FrobLift::parse(lift, p, 1, len)?;
        let res = gamma_approx(&std, &other, 2, level, 4)?;
        let ring = Zmod::new(p, len as u32);
        let probes_ok = monomials_up_to(1, 4).into_iter().all(|m| {
            let b = MultiPoly::monomial(ring, 1, m, 1);
            in_p_power(&res.apply(&b).sub(&delta_embedded(&std, &other, &b)), 2, len)
        });
        Ok(res.final_ok && probes_ok)
    };
    v.require(matches!(gamma_ok(3, "T1->T^3+3*T", 0), Ok(true)), "p=3 N=2 does not reach p^2");
    let stress = gamma_ok(2, "T1->T^2+2*T", 0);
    v.require(
        matches!(stress, Err(WittError::ConvergenceFailure(_))),
        format!("p=2 level 0 stress case gave {stress:?}"),
    );
    v.require(matches!(gamma_ok(2, "T1->T^2+2*T", 1), Ok(true)), "p=2 level 1 does not reach p^2");
    v.note("gamma: p=3 converges, p=2 fails at level 0 and converges at level 1");
    v
}

fn criterion_8() -> Verdict {
    let mut v = Verdict::new();
    let report = run_suite(&grid(&[2, 3, 5], 4, 2, 6), "filtrations").unwrap();
    v.all_pass(&report);
    // three radii r per sample
    v.suite(&report, "two-filtrations", 3, 3 * FILTRATION_SAMPLES);
    // two HS derivations x up to three indices, plus the basic operators
    v.suite(&report, "elementary-derivation-mod-p", 6, 3 * DERIVATION_PAIRS);
    v.suite(&report, "elementary-filtration-mod-p", 6, 2 * DERIVATION_PAIRS);
    v
}

fn main() {
    let timed = |id: u32, f: fn() -> Verdict| {
        let t = Instant::now();
        let v = f();
        eprintln!("criterion {id} finished in {:.1?}", t.elapsed());
        v
    };
    let t = Instant::now();
    let (c2, c3) = criteria_2_3();
    eprintln!("criteria 2-3 finished in {:.1?}", t.elapsed());
    let results = [
        (1, "ghost-oracle ring equivalence", timed(1, criterion_1)),
        (2, "canonical lift, two routes", c2),
        (3, "HS-Frobenius and move-down", c3),
        (4, "congruence sweeps", timed(4, criterion_4)),
        (5, "operator algebra", timed(5, criterion_5)),
        (6, "projector", timed(6, criterion_6)),
        (7, "two-lift comparison", timed(7, criterion_7)),
        (8, "filtrations and derivations mod p", timed(8, criterion_8)),
    ];
    let mut failed = Vec::new();
    for (id, name, v) in &results {
        let tag = if v.ok { "PASS" } else { "FAIL" };
        println!("criterion {id} {tag}: {name} ({})", v.notes.join("; "));
        if !v.ok {
            failed.push(*id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
