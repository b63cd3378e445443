use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use littlewood::cf::{cf_of_rational, continuant, rational_of_word};
use littlewood::constructor::schedule::{growth_condition_holds, minimal_phi_holds};
use littlewood::constructor::{build_beta_thm1, build_beta_thm2, decompose_blocks, GrowthSpec, MarkerRule, PhiFunction};
use littlewood::homography::{apply_mobius, nested_repetition_alpha, nested_repetition_words, thm4_witness, thm5_witness, Mobius};
use littlewood::verifier::{independence_scan, littlewood_product, Bound, RelationOutcome, Verdict};
use littlewood::{BigMobius, CfStream, CfWord, Interval, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn word_strategy(max_len: usize, max: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max, 1..=max_len)
}

fn periodic_strategy(max: u64) -> impl Strategy<Value = CfStream> {
    (prop::collection::vec(1..=max, 0..4), prop::collection::vec(1..=max, 1..4))
        .prop_map(|(pre, per)| CfStream::periodic(CfWord::new(pre).unwrap(), CfWord::new(per).unwrap(), None).unwrap())
}

proptest! {
    #[test]
    fn continuant_is_mirror_symmetric(w in word_strategy(12, 5)) {
        let mut rev = w.clone();
        rev.reverse();
        prop_assert_eq!(continuant::<BigInt>(&w), continuant::<BigInt>(&rev));
    }

    #[test]
    fn continuant_splits(w in word_strategy(16, 6)) {
        let full: BigInt = continuant(&w);
        for k in 1..w.len() {
            let prod = continuant::<BigInt>(&w[..k]) * continuant::<BigInt>(&w[k..]);
            prop_assert!(prod <= full && full <= &prod * 2);
        }
    }

    #[test]
    fn continuant_growth(m in 1u64..6, w in word_strategy(20, 1)) {
        let w: Vec<u64> = w.iter().enumerate().map(|(i, _)| 1 + (i as u64 * 7 + m) % m).collect();
        let n = w.len() as u32;
        let k: BigInt = continuant(&w);
        prop_assert!(&k * &k >= BigInt::one() << (n - 1));
        prop_assert!(k <= num_traits::pow(BigInt::from(m + 1), n as usize));
    }

    #[test]
    fn convergents_follow_the_recurrence(s in periodic_strategy(5), n in 3usize..40) {
        let cs = s.convergents::<BigInt>(n).unwrap();
        let (mut q2, mut q1) = (BigInt::zero(), BigInt::one());
        let (mut p2, mut p1) = (BigInt::one(), BigInt::zero());
        for (i, c) in cs.iter().enumerate() {
            let a = BigInt::from(s.quotient(i + 1).unwrap());
            let q = &a * &q1 + &q2;
            let p = &a * &p1 + &p2;
            prop_assert_eq!(&c.q, &q);
            prop_assert_eq!(&c.p, &p);
            prop_assert!(c.p.gcd(&c.q).is_one());
            if i >= 1 {
                prop_assert!(q > q1);
            }
            (q2, q1, p2, p1) = (q1, q, p1, p);
        }
    }

    #[test]
    fn enclosures_are_nested(s in periodic_strategy(6), d in 2usize..30, extra in 1usize..20) {
        let outer = s.enclosure(d).unwrap();
        let inner = s.enclosure(d + extra).unwrap();
        prop_assert!(inner.is_subset_of(&outer));
    }

    #[test]
    fn finite_value_lies_in_every_enclosure(w in word_strategy(12, 6)) {
        let word = CfWord::new(w.clone()).unwrap();
        let v = rational_of_word(&word).unwrap();
        let s = CfStream::finite(word, None).unwrap();
        for d in 2..=w.len() {
            prop_assert!(s.enclosure(d).unwrap().contains(&v));
        }
    }

    #[test]
    fn norm_dist_agrees_with_a_deeper_evaluation(s in periodic_strategy(4), q in 1u64..1_000_000) {
        let q = BigInt::from(q);
        let width = r(1, 1 << 20);
        let iv = s.norm_dist(&q, &width).unwrap();
        prop_assert!(iv.width() <= width);
        let depth = 4 * q.bits() as usize + 80;
        let deep = s.enclosure(depth).unwrap().scale(&Rational::from_integer(q.clone()));
        let reference = deep.nearest_integer_distance().unwrap();
        prop_assert!(iv.intersects(&reference));
    }

    #[test]
    fn rational_words_are_canonical(w in word_strategy(10, 5)) {
        let v = rational_of_word(&CfWord::new(w).unwrap()).unwrap();
        prop_assume!(v < Rational::one());
        let back = cf_of_rational(v.numer(), v.denom()).unwrap();
        if back.len() >= 2 {
            prop_assert!(*back.as_slice().last().unwrap() >= 2);
        }
        prop_assert_eq!(rational_of_word(&back).unwrap(), v);
    }

    #[test]
    fn gosper_matches_the_exact_image(
        w in word_strategy(8, 6),
        a in -20i64..=20, b in -20i64..=20, c in -20i64..=20, d in -20i64..=20,
    ) {
        prop_assume!(a * d - b * c != 0);
        let word = CfWord::new(w).unwrap();
        let x = rational_of_word(&word).unwrap();
        let m = Mobius::new(BigInt::from(a), BigInt::from(b), BigInt::from(c), BigInt::from(d)).unwrap();
        prop_assume!(!(Rational::from_integer(BigInt::from(c)) * &x + Rational::from_integer(BigInt::from(d))).is_zero());
        let (int, frac) = apply_mobius(&CfStream::finite(word, None).unwrap(), &m).unwrap();
        let mut quotients = Vec::new();
        let mut i = 1;
        while let Ok(q) = frac.quotient(i) {
            quotients.push(q);
            i += 1;
        }
        let tail = if quotients.is_empty() { Rational::zero() } else { rational_of_word(&CfWord::new(quotients).unwrap()).unwrap() };
        prop_assert_eq!(Rational::from_integer(int) + tail, m.apply(&x).unwrap());
    }

    #[test]
    fn unimodular_images_share_the_period(idx in 0usize..5, gens in prop::collection::vec(0usize..3, 0..6)) {
        let catalog = ["0; | (1)", "0; | (2)", "0; | (1,2)", "0; 4 | (3,1,2)", "0; | (1,1,4)"];
        let alpha: CfStream = catalog[idx].parse().unwrap();
        let g = |a: i64, b: i64, c: i64, d: i64| -> BigMobius { Mobius::new(a.into(), b.into(), c.into(), d.into()).unwrap() };
        let generators = [g(1, 1, 0, 1), g(0, 1, 1, 0), g(1, -1, 0, 1)];
        let m = gens.iter().fold(BigMobius::identity(), |acc, &i| acc.compose(&generators[i]));
        prop_assert!(m.is_equivalence());
        let (_, frac) = apply_mobius(&alpha, &m).unwrap();
        let out = frac.prefix(120).unwrap().into_vec();
        let period = match catalog[idx].split_once('(') {
            Some((_, p)) => p.trim_end_matches(')').split(',').map(|t| t.parse::<u64>().unwrap()).collect::<Vec<_>>(),
            None => unreachable!(),
        };
        let window = &out[60..60 + period.len()];
        let is_shift = (0..period.len()).any(|k| period[k..].iter().chain(&period[..k]).eq(window.iter()));
        prop_assert!(is_shift, "window {:?} vs period {:?}", window, period);
        for i in 60..out.len() - period.len() {
            prop_assert_eq!(out[i], out[i + period.len()]);
        }
    }

    #[test]
    fn certificate_trichotomy(lo in 0i64..1000, span in 0i64..1000, b in 0i64..2000) {
        let iv = Interval::new(r(lo, 1000), r(lo + span, 1000)).unwrap();
        let bound = r(b, 1000);
        let v = Bound::Exact(bound.clone()).verdict(&iv);
        let expected = if iv.hi() <= &bound { Verdict::Pass } else if iv.lo() > &bound { Verdict::Fail } else { Verdict::Indeterminate };
        prop_assert_eq!(v, expected);
    }

    #[test]
    fn power_bounds_agree_with_exact_powers(q in 1u64..10_000, num in 1u32..4, den in 1u32..4) {
        // q^(-num/den) <= x  <=>  q^num x^den >= 1
        let b = Bound::PowerNeg { q: BigInt::from(q), num, den };
        let x = b.lower_approx().unwrap();
        let lhs = num_traits::pow(Rational::from_integer(BigInt::from(q)), num as usize) * num_traits::pow(x.clone(), den as usize);
        prop_assert!(lhs <= Rational::one());
        prop_assert!(matches!(b.compare(&x), Some(o) if o.is_le()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refinement_never_flips_a_decided_verdict(a in periodic_strategy(3), b in periodic_strategy(3), q in 1u64..5000, num in 1i64..200) {
        let q = BigInt::from(q);
        let bound = Bound::Exact(r(num, 1000));
        let coarse = littlewood_product(&q, &a, &b, &r(1, 100)).unwrap();
        let fine = littlewood_product(&q, &a, &b, &r(1, 100_000)).unwrap();
        let (vc, vf) = (bound.verdict(&coarse), bound.verdict(&fine));
        prop_assert!(vc == Verdict::Indeterminate || vc == vf, "{vc:?} then {vf:?}");
        prop_assert!(fine.intersects(&coarse));
    }

    #[test]
    fn self_pairs_have_the_trivial_relation(a in periodic_strategy(4), h in 1u32..3) {
        let w = independence_scan(&a, &a, h, &r(1, 1000), 64).unwrap();
        match w.outcome {
            RelationOutcome::Candidate { triples, .. } => prop_assert!(triples.contains(&(1, -1, 0))),
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn thm2_beta_decomposes_into_mirrored_blocks(
        pre in prop::collection::vec(1u64..=3, 0..3),
        per in prop::collection::vec(1u64..=3, 1..3),
        t in prop::collection::vec(4u64..=5, 4),
    ) {
        let alpha = CfStream::periodic(CfWord::new(pre).unwrap(), CfWord::new(per).unwrap(), Some(3)).unwrap();
        let rec = build_beta_thm2(alpha.clone(), 3, r(1, 2), MarkerRule::List(t.clone()), GrowthSpec::Ratio(r(25, 1))).unwrap();
        let m3 = rec.m(3).unwrap() as usize;
        let word = rec.beta().prefix(m3).unwrap();
        prop_assert!(word.iter().all(|&b| (1..=5).contains(&b)));
        let (blocks, markers) = decompose_blocks(&word, 3);
        prop_assert_eq!(blocks.len(), 3);
        for (j, block) in blocks.iter().enumerate() {
            let n = rec.n(j + 1).unwrap() as usize;
            prop_assert_eq!(block, &alpha.prefix(n).unwrap().mirror().into_vec());
        }
        prop_assert_eq!(&markers[..], &t[..2]);
        for j in 2..=3 {
            prop_assert_eq!(rec.m(j).unwrap(), rec.m(j - 1).unwrap() + rec.n(j).unwrap() + 1);
        }
        let again = build_beta_thm2(alpha, 3, r(1, 2), MarkerRule::List(t), GrowthSpec::Ratio(r(25, 1))).unwrap();
        prop_assert_eq!(again.beta().prefix(m3).unwrap(), word);
    }

    #[test]
    fn seeded_markers_are_reproducible(seed in any::<u64>(), m in 1u64..6) {
        let alpha = CfStream::periodic(CfWord::empty(), CfWord::new(vec![m]).unwrap(), None).unwrap();
        let a = build_beta_thm1(alpha.clone(), PhiFunction::power(r(1, 2)).unwrap(), MarkerRule::Seeded(seed)).unwrap();
        let b = build_beta_thm1(alpha, PhiFunction::power(r(1, 2)).unwrap(), MarkerRule::Seeded(seed)).unwrap();
        let ta = a.markers().take(8).unwrap();
        prop_assert_eq!(&ta, &b.markers().take(8).unwrap());
        prop_assert!(ta.iter().all(|&t| t == m + 1 || t == m + 2));
        prop_assert_eq!(a.beta().prefix(60).unwrap(), b.beta().prefix(60).unwrap());
    }

    #[test]
    fn thm5_chain_holds(v in word_strategy(3, 3), u in word_strategy(5, 3)) {
        let vw = CfWord::new(v).unwrap();
        let uw = CfWord::new(u).unwrap();
        let pre = vw.concat(&uw).concat(&uw.mirror());
        let alpha = CfStream::periodic(pre.clone(), CfWord::new(vec![1, 2]).unwrap(), None).unwrap();
        let m: BigMobius = "1,1,0,1".parse().unwrap();
        let w = thm5_witness(&alpha, &vw, &uw, &m, None).unwrap();
        let q_s: BigInt = continuant(&vw);
        let q_s2r: BigInt = continuant(&pre);
        prop_assert!(w.q_k <= &w.q_prime * 1);
        prop_assert!(w.q_prime <= BigInt::from(2) * &q_s * &q_s2r);
        prop_assert!(w.r_value.abs() <= BigInt::from(2) * &w.q_prime);
        prop_assert!(w.prefix_bound_holds);
    }
}

#[test]
fn round_trip_for_every_small_rational() {
    for q in 2u32..=500 {
        for p in 1..q {
            if p.gcd(&q) != 1 {
                continue;
            }
            let w = cf_of_rational(&BigInt::from(p), &BigInt::from(q)).unwrap();
            assert_eq!(rational_of_word(&w).unwrap(), r(p as i64, q as i64));
        }
    }
}

#[test]
fn minimal_schedule_is_minimal() {
    let alpha: CfStream = "0; | (2)".parse().unwrap();
    let phi = PhiFunction::power(r(1, 2)).unwrap();
    let rec = build_beta_thm1(alpha, phi.clone(), MarkerRule::Default).unwrap();
    for j in 2..=4 {
        let n = rec.n(j).unwrap();
        let m_prev = rec.m(j - 1).unwrap();
        assert!(minimal_phi_holds(&phi, 2, m_prev, n).unwrap());
        if n > 1 {
            assert!(!minimal_phi_holds(&phi, 2, m_prev, n - 1).unwrap(), "j = {j}");
        }
    }
}

#[test]
fn growth_condition_holds_past_burn_in() {
    let alpha: CfStream = "0; | (2)".parse().unwrap();
    let rec = build_beta_thm2(alpha, 2, r(1, 2), MarkerRule::Default, GrowthSpec::Ratio(r(19, 1))).unwrap();
    let report = rec.growth_report(8).unwrap().unwrap();
    let burn_in = report.burn_in.unwrap();
    assert_eq!(burn_in, 4);
    for j in burn_in..=8 {
        assert!(growth_condition_holds(rec.n(j).unwrap(), rec.m(j - 1).unwrap(), 2, &r(1, 2)));
    }
    assert!(!growth_condition_holds(rec.n(2).unwrap(), rec.m(1).unwrap(), 2, &r(1, 2)));
}

#[test]
fn dual_form_identity_map_is_degenerate() {
    // c = 0 makes A alpha + B beta an exact integer
    let seed = CfWord::new(vec![1, 2]).unwrap();
    let alpha = nested_repetition_alpha(&seed).unwrap();
    let id = BigMobius::identity();
    for u in nested_repetition_words(&seed, 4) {
        let w = thm4_witness(&alpha, &u, &Rational::one(), &id).unwrap();
        assert_eq!(&w.a + &w.b, BigInt::zero());
        assert!(w.norm.contains(&Rational::zero()));
    }
}

#[test]
fn dual_form_norm_matches_a_direct_evaluation() {
    let seed = CfWord::new(vec![1, 2]).unwrap();
    let alpha = nested_repetition_alpha(&seed).unwrap();
    let m: BigMobius = "1,0,1,1".parse().unwrap();
    let (_, beta) = apply_mobius(&alpha, &m).unwrap();
    for u in nested_repetition_words(&seed, 3) {
        let w = thm4_witness(&alpha, &u, &Rational::one(), &m).unwrap();
        let depth = 400;
        let (ea, eb) = (alpha.enclosure(depth).unwrap(), beta.enclosure(depth).unwrap());
        let lin = ea.scale(&Rational::from_integer(w.a.clone())) + eb.scale(&Rational::from_integer(w.b.clone()));
        let direct = lin.nearest_integer_distance().unwrap();
        assert!(w.norm.intersects(&direct), "{} vs {}", w.norm, direct);
    }
}
