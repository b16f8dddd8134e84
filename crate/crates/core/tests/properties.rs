mod common;

use proptest::prelude::*;

use wittop::embed::{decode, embed, membership};
use wittop::exactnum::Zmod;
use wittop::frob_phi::{check_projector, phi_apply, FrobLift};
use wittop::poly::MultiPoly;
use wittop::sample::Sampler;
use wittop::wdo::{parse_operator, WittOperator, WorkingContext};
use wittop::WittVec;

fn point() -> impl Strategy<Value = (u64, usize, usize, u64)> {
    (prop::sample::select(vec![2u64, 3, 5]), 1usize..=3, 1usize..=2, any::<u64>())
}

fn pair(p: u64, len: usize, n: usize, seed: u64) -> (WittVec, WittVec, WittVec) {
    let mut rng = Sampler::new(seed);
    let a = rng.witt_flat(p, n, len, 3);
    let b = rng.witt_flat(p, n, len, 3);
    let c = rng.witt_flat(p, n, len, 2);
    (a, b, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms((p, len, n, seed) in point()) {
        let (a, b, c) = pair(p, len, n, seed);
        let zero = WittVec::zero(p, n, len);
        let one = WittVec::one(p, n, len);
        prop_assert_eq!(a.add(&b)?, b.add(&a)?);
        prop_assert_eq!(a.mul(&b)?, b.mul(&a)?);
        prop_assert_eq!(a.add(&b)?.add(&c)?, a.add(&b.add(&c)?)?);
        prop_assert_eq!(a.mul(&b)?.mul(&c)?, a.mul(&b.mul(&c)?)?);
        prop_assert_eq!(a.add(&b)?.mul(&c)?, a.mul(&c)?.add(&b.mul(&c)?)?);
        prop_assert_eq!(a.add(&zero)?, a.clone());
        prop_assert_eq!(a.mul(&one)?, a.clone());
        prop_assert!(a.add(&a.neg())?.is_zero());
        prop_assert_eq!(a.sub(&b)?.add(&b)?, a);
    }

    #[test]
    fn frobenius_and_verschiebung((p, len, n, seed) in point()) {
        let (x, y, _) = pair(p, len, n, seed);
        let pw = WittVec::integer(p, p, n, len);
        // FV = p
        prop_assert_eq!(x.verschiebung(1).frobenius(), pw.mul(&x)?);
        // VF = V(1) * x
        prop_assert_eq!(x.frobenius().verschiebung(1), WittVec::one(p, n, len).verschiebung(1).mul(&x)?);
        // V(x) V(y) = p V(xy)
        prop_assert_eq!(x.verschiebung(1).mul(&y.verschiebung(1))?, pw.mul(&x.mul(&y)?.verschiebung(1))?);
        // F is a ring map
        prop_assert_eq!(x.mul(&y)?.frobenius(), x.frobenius().mul(&y.frobenius())?);
        prop_assert_eq!(x.add(&y)?.frobenius(), x.frobenius().add(&y.frobenius())?);
    }

    #[test]
    fn restriction_commutes((p, len, n, seed) in point()) {
        let (x, y, _) = pair(p, len, n, seed);
        let k = len - 1;
        let r = |w: &WittVec| w.restrict(k).unwrap();
        prop_assert_eq!(r(&x.add(&y)?), r(&x).add(&r(&y))?);
        prop_assert_eq!(r(&x.mul(&y)?), r(&x).mul(&r(&y))?);
        prop_assert_eq!(r(&x.frobenius()), r(&x).frobenius());
    }

    #[test]
    fn teichmuller_is_multiplicative((p, len, n, seed) in point()) {
        let mut rng = Sampler::new(seed);
        let f1 = Zmod::new(p, 1);
        let (f, g) = (rng.poly(f1, n, 3, 3), rng.poly(f1, n, 3, 3));
        let t = |h: &MultiPoly| WittVec::teichmuller(h, len).unwrap();
        prop_assert_eq!(t(&f).mul(&t(&g))?, t(&f.mul(&g)));
    }

    #[test]
    fn ghost_is_a_homomorphism((p, len, n, seed) in point()) {
        let (a, b, _) = pair(p, len, n, seed);
        let (ga, gb) = (a.ghost(), b.ghost());
        let (gs, gp) = (a.add(&b)?.ghost(), a.mul(&b)?.ghost());
        for s in 0..len {
            prop_assert_eq!(&gs.comps[s], &ga.comps[s].add(&gb.comps[s]));
            prop_assert_eq!(&gp.comps[s], &ga.comps[s].mul(&gb.comps[s]));
        }
    }

    #[test]
    fn round_trips((p, len, n, seed) in point()) {
        let (a, _, _) = pair(p, len, n, seed);
        prop_assert_eq!(WittVec::parse(&a.to_string(), p, n, len)?, a.clone());
        let g = embed(&a);
        prop_assert!(membership(&g, len));
        prop_assert_eq!(decode(&g, len)?, a);
    }

    #[test]
    fn agrees_with_integral_oracle((p, len, n, seed) in point()) {
        let (a, b, _) = pair(p, len, n, seed);
        prop_assert_eq!(common::coords_of(&a.add(&b)?), common::oracle_add(&a, &b));
        prop_assert_eq!(common::coords_of(&a.mul(&b)?), common::oracle_mul(&a, &b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projector_fixes_phi_image(p in prop::sample::select(vec![2u64, 3]), len in 1usize..=3, seed in any::<u64>()) {
        let ctx = WorkingContext::new(p, 1, len, 2, 0)?;
        let mut rng = Sampler::new(seed);
        let samples: Vec<MultiPoly> = (0..3).map(|_| rng.poly(ctx.ring(), 1, 2, 3)).collect();
        let report = check_projector(&ctx, &samples)?;
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn phi_lands_in_ghost_frobenius(p in prop::sample::select(vec![2u64, 3, 5]), len in 1usize..=3, seed in any::<u64>()) {
        // ghost_s(Phi(a)) = F^s(a) mod p^(s+1) for the standard lift
        let mut rng = Sampler::new(seed);
        let a = rng.poly(Zmod::new(p, len as u32), 1, 3, 3);
        let lift = FrobLift::standard(p, 1, len)?;
        let g = phi_apply(&lift, &a)?.ghost();
        for s in 0..len {
            let expect = lift.apply_iter(&a, s as u32).reduce_to(s as u32 + 1);
            prop_assert_eq!(&g.comps[s], &expect);
        }
    }

    #[test]
    fn basic_operator_is_additive(p in prop::sample::select(vec![2u64, 3]), seed in any::<u64>()) {
        let ctx = WorkingContext::new(p, 1, 2, 2, 0)?;
        let q = parse_operator(&format!("{{d1}}_{{1/{p}}}"), &ctx)?;
        let mut rng = Sampler::new(seed);
        let x = rng.witt(p, 1, 2, 2);
        let y = rng.witt(p, 1, 2, 2);
        prop_assert_eq!(q.apply(&x.add(&y)?)?, q.apply(&x)?.add(&q.apply(&y)?)?);
    }
}
