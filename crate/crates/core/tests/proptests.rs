use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use univoque::dimension::{LexShiftAutomaton, Strictness};
use univoque::expansion::{alpha_prefix, expansion_prefix, is_unique_expansion, pi_q, ExpansionKind, Uniqueness};
use univoque::solver::invert_base;
use univoque::words::{Alphabet, EventuallyPeriodicWord, Word};
use univoque::Real;

fn alphabet(m: u32) -> Alphabet {
    Alphabet::new(m).unwrap()
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(pre, period)` digit vectors over `{0, …, m}`.
fn epw_parts(m: u8) -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (prop::collection::vec(0..=m, 0..5), prop::collection::vec(0..=m, 1..5))
}

fn epw(m: u8) -> impl Strategy<Value = EventuallyPeriodicWord> {
    epw_parts(m).prop_map(move |(pre, per)| EventuallyPeriodicWord::new(pre, per, alphabet(m as u32)).unwrap())
}

/// A base `1 + k/1000` inside `(lo, hi)` given in thousandths above 1.
fn base(lo: i64, hi: i64) -> impl Strategy<Value = BigRational> {
    (lo..hi).prop_map(|k| ratio(1000 + k, 1000))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_is_representation_independent((pre, per) in epw_parts(2), extra in 0usize..4, reps in 1usize..3) {
        let m = alphabet(2);
        let w = EventuallyPeriodicWord::new(pre.clone(), per.clone(), m).unwrap();
        // unroll `extra` period digits into the preperiod and repeat the period
        let mut pre2 = pre.clone();
        pre2.extend((0..extra).map(|i| per[i % per.len()]));
        let rot: Vec<u8> = (0..per.len()).map(|i| per[(i + extra) % per.len()]).collect();
        let per2 = rot.repeat(reps);
        let v = EventuallyPeriodicWord::new(pre2, per2, m).unwrap();
        prop_assert_eq!(&w, &v);
        prop_assert_eq!(EventuallyPeriodicWord::parse(&w.to_string(), m).unwrap(), w);
    }

    #[test]
    fn lex_order_matches_long_prefixes(a in epw(2), b in epw(2), c in epw(2)) {
        // eventually periodic words with preperiod < 5 and period < 5 agree
        // everywhere once they agree on 5 + lcm(periods) ≤ 17 digits
        prop_assert_eq!(a.cmp(&b), a.prefix(40).cmp(&b.prefix(40)));
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
    }

    #[test]
    fn metric_is_an_ultrametric(a in epw(1), b in epw(1), c in epw(1)) {
        let ac = a.metric_rho(&c);
        let worst = a.metric_rho(&b).max(b.metric_rho(&c));
        prop_assert!(ac <= worst);
        prop_assert_eq!(a.metric_rho(&a), ratio(0, 1));
    }

    #[test]
    fn shift_agrees_with_streams(w in epw(3), n in 0usize..12) {
        let s = w.to_stream().shift(n);
        let t = w.shift(n);
        for i in 0..10_000 {
            prop_assert_eq!(s.digit(i), t.digit(i));
        }
        prop_assert_eq!(w.reflect().reflect(), w.clone());
        prop_assert_eq!(t.shift(3), w.shift(n + 3));
        prop_assert_eq!(w.prepend(&w.prefix(n)).shift(n), w);
    }

    #[test]
    fn plus_one_and_minus_one_invert(d in prop::collection::vec(0u8..=2, 1..8)) {
        let w = Word::new(d, alphabet(2)).unwrap();
        if let Ok(up) = w.plus_one() {
            prop_assert!(up > w);
            prop_assert_eq!(up.minus_one().unwrap(), w);
        }
    }

    #[test]
    fn greedy_round_trip_and_sandwich(m in 1u32..=3, qk in 50i64..1000, xk in 1i64..1000) {
        let al = alphabet(m);
        let q = ratio(1000 + qk * m as i64, 1000);
        // x in (0, M/(q−1)]
        let top = BigRational::from_integer(BigInt::from(m)) / (&q - ratio(1, 1));
        let x = top * ratio(xk, 1000);
        let (xr, qr) = (Real::from(x.clone()), Real::from(q.clone()));
        let n = 24;
        let greedy = expansion_prefix(&xr, &qr, al, n, ExpansionKind::Greedy).unwrap();
        let quasi = expansion_prefix(&xr, &qr, al, n, ExpansionKind::QuasiGreedy).unwrap();
        prop_assert!(quasi <= greedy);
        let s = pi_q(&greedy.then_zeros(), &qr).unwrap().as_rational().unwrap();
        let residual = &x - &s;
        let q_n = num_traits::pow(q.clone(), n);
        let bound = BigRational::from_integer(BigInt::from(m)) / ((&q - ratio(1, 1)) * q_n);
        prop_assert!(residual >= ratio(0, 1) && residual <= bound);
        // quasi-greedy partial sums stay strictly below x
        let sq = pi_q(&quasi.then_zeros(), &qr).unwrap().as_rational().unwrap();
        prop_assert!(sq < x);
        // after a digit below M the tail is at most α(q)
        let alpha = alpha_prefix(&qr, al, n).unwrap();
        let d = quasi.digits();
        for k in 0..n {
            if d[k] < m as u8 {
                let tail = &d[k + 1..];
                prop_assert!(tail <= &alpha.digits()[..tail.len()], "k = {k}");
            }
        }
    }

    #[test]
    fn quasi_greedy_increases_with_the_base(q1 in base(60, 900), gap in 1i64..90) {
        let al = alphabet(1);
        let x = Real::from_ratio(1, 2);
        let q2 = &q1 + ratio(gap, 1000);
        let a = expansion_prefix(&x, &Real::from(q1), al, 32, ExpansionKind::QuasiGreedy).unwrap();
        let b = expansion_prefix(&x, &Real::from(q2), al, 32, ExpansionKind::QuasiGreedy).unwrap();
        prop_assert!(a <= b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn invert_base_undoes_pi(m in 1u32..=2, (pre, per) in epw_parts(2), qk in 50i64..950) {
        let al = alphabet(m);
        let clamp = |v: Vec<u8>| v.into_iter().map(|d| d.min(m as u8)).collect::<Vec<_>>();
        let d = EventuallyPeriodicWord::new(clamp(pre), clamp(per), al).unwrap();
        prop_assume!(!d.is_zero());
        let q = ratio(1000 + qk * m as i64, 1000);
        let x = pi_q(&d, &Real::from(q.clone())).unwrap();
        let back = invert_base(&d, &x).unwrap();
        let e = back.enclose(80).unwrap();
        prop_assert!(e.contains_rational(&q) || (e.mid_f64() - Real::from(q.clone()).to_f64()).abs() < 2e-12);
    }

    #[test]
    fn pi_decreases_in_the_base(w in epw(1), q1 in base(10, 990), gap in 1i64..100) {
        prop_assume!(!w.is_zero());
        let a = pi_q(&w, &Real::from(q1.clone())).unwrap();
        let b = pi_q(&w, &Real::from(q1 + ratio(gap, 1000))).unwrap();
        prop_assert_eq!(a.cmp_real(&b).unwrap(), Ordering::Greater);
    }

    #[test]
    fn counting_brackets_are_ordered(m in 1u32..=2, qk in 0i64..1000) {
        let al = alphabet(m);
        let q = Real::from(ratio(1000 + (qk + 1) * m as i64, 1000));
        let a = alpha_prefix(&q, al, 8).unwrap();
        let inner = LexShiftAutomaton::build(&a, Strictness::Inner).unwrap();
        let outer = LexShiftAutomaton::build(&a, Strictness::Outer).unwrap();
        for n in 0..16 {
            let (ci, co) = (inner.count_words(n), outer.count_words(n));
            prop_assert!(ci <= co);
            prop_assert!(co.clone() * (m + 1) >= outer.count_words(n + 1));
            // the language is factor-closed, so counts are submultiplicative
            prop_assert!(outer.count_words(n + 3) <= co * outer.count_words(3));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unique_expansions_are_both_greedy_and_quasi_greedy(block in prop::collection::vec(0u8..=1, 2..7), qk in 800i64..1000) {
        let al = alphabet(1);
        let mut per = block;
        per.push(1);
        per.insert(0, 0);
        let d = EventuallyPeriodicWord::new(vec![1], per, al).unwrap();
        let q = Real::from(ratio(1000 + qk, 1000));
        if is_unique_expansion(&d, &q, 64).unwrap() == Uniqueness::Unique {
            let x = pi_q(&d, &q).unwrap();
            let g = expansion_prefix(&x, &q, al, 40, ExpansionKind::Greedy).unwrap();
            let h = expansion_prefix(&x, &q, al, 40, ExpansionKind::QuasiGreedy).unwrap();
            prop_assert_eq!(&g, &d.prefix(40));
            prop_assert_eq!(&h, &d.prefix(40));
        }
    }
}

#[test]
fn reflection_reverses_order_exhaustively() {
    for m in 1..=2u8 {
        let al = alphabet(m as u32);
        let words: Vec<Word> = (0..=6)
            .flat_map(|len| {
                let total = (m as usize + 1).pow(len as u32);
                (0..total).map(move |mut k| {
                    let mut d = vec![0; len];
                    for slot in d.iter_mut().rev() {
                        *slot = (k % (m as usize + 1)) as u8;
                        k /= m as usize + 1;
                    }
                    d
                })
            })
            .map(|d| Word::new(d, al).unwrap())
            .collect();
        for a in &words {
            for b in words.iter().filter(|b| b.len() == a.len()) {
                assert_eq!(a.cmp(b), b.reflect().cmp(&a.reflect()), "{a} {b}");
            }
        }
    }
}
