//! Deterministic module-level properties on fixed grids and fixed witnesses.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use univoque::dimension::{dim_uq, dim_ux};
use univoque::expansion::{is_unique_expansion, Uniqueness};
use univoque::isolated_points::{bifurcation_base, isolate_default, z_point, Family};
use univoque::solver::{critical_constants, invert_base, q_of_x};
use univoque::univoque_x::{
    classify, enumerate_ux, golden_tail_family, Regime, ScanVerdict, DEFAULT_UNIQUENESS_DEPTH,
};
use univoque::words::Alphabet;
use univoque::Real;

fn binary() -> Alphabet {
    Alphabet::new(1).unwrap()
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn classification_changes_exactly_at_the_thresholds() {
    let c = critical_constants(binary(), 1e-12).unwrap();
    let (x_kl, x_g) = (c.x_kl.to_f64(), c.x_g.to_f64());
    let mut last = Regime::FullDim;
    for k in 1..=250 {
        let x = Real::from_ratio(k, 100);
        let xf = k as f64 / 100.0;
        let r = classify(&x, binary(), 1e-12).unwrap().regime;
        let want = if xf <= 1.0 {
            Regime::FullDim
        } else if xf < x_kl {
            Regime::PositiveDim
        } else if xf < x_g {
            Regime::Countable
        } else {
            Regime::Singleton
        };
        assert_eq!(r, want, "x = {xf}");
        assert!(r as u8 >= last as u8);
        last = r;
    }
    // just past x_KL is countable; x_KL itself is computable and undecidable
    let above = Real::from(c.x_kl.enclose(128).unwrap().bounds().1 + ratio(1, 1_000_000_000));
    assert_eq!(classify(&above, binary(), 1e-12).unwrap().regime, Regime::Countable);
}

#[test]
fn violations_survive_deeper_scans() {
    for (x, steps) in [(Real::from_ratio(6, 5), 24), (Real::from_ratio(7, 5), 24), (Real::from_ratio(1, 2), 12)] {
        let shallow = enumerate_ux(&x, binary(), None, steps, 24).unwrap();
        let deep = enumerate_ux(&x, binary(), None, steps, 96).unwrap();
        for (a, b) in shallow.iter().zip(&deep) {
            assert_eq!((&a.lo, &a.hi), (&b.lo, &b.hi));
            if a.verdict == ScanVerdict::Violated {
                assert_eq!(b.verdict, ScanVerdict::Violated, "cell ({}, {})", a.lo, a.hi);
            }
        }
    }
}

/// `x ↦ 𝐔(x)` is non-increasing: an expansion unique for `x` at some base
/// stays unique for every smaller `y > 1` at the base it then needs.
#[test]
fn members_of_x_are_members_for_smaller_y() {
    let x = Real::from_ratio(7, 5);
    let family = golden_tail_family(&x, binary(), 6, DEFAULT_UNIQUENESS_DEPTH).unwrap();
    assert!(!family.is_empty());
    for y in [ratio(27, 20), ratio(6, 5), ratio(21, 20)] {
        let y = Real::from(y);
        for w in &family {
            let p = invert_base(&w.expansion, &y).unwrap();
            assert_eq!(is_unique_expansion(&w.expansion, &p, DEFAULT_UNIQUENESS_DEPTH).unwrap(), Uniqueness::Unique);
        }
    }
}

#[test]
fn dimension_of_ux_is_dimension_of_uq_at_q_x() {
    for x in [ratio(3, 10), ratio(11, 10), ratio(5, 4)] {
        let x = Real::from(x);
        let a = dim_ux(&x, binary(), 16, 48).unwrap();
        let b = dim_uq(&q_of_x(&x, binary()).unwrap(), binary(), 16, 48).unwrap();
        assert_eq!((a.lower, a.upper), (b.lower, b.upper));
    }
}

#[test]
fn longer_alpha_prefixes_give_overlapping_brackets() {
    for q in [ratio(17, 10), ratio(18, 10), ratio(19, 10)] {
        let q = Real::from(q);
        let a = dim_uq(&q, binary(), 12, 48).unwrap();
        let b = dim_uq(&q, binary(), 20, 48).unwrap();
        assert!(a.lower <= a.upper && b.lower <= b.upper);
        assert!(a.lower <= b.upper && b.lower <= a.upper, "{a:?} vs {b:?}");
    }
}

#[test]
fn q_of_x_is_non_increasing() {
    let mut prev = Real::from_i64(3);
    for k in 1..=40 {
        let q = q_of_x(&Real::from_ratio(k, 10), binary()).unwrap();
        if k <= 10 {
            assert_eq!(q.cmp_i64(2).unwrap(), Ordering::Equal);
        }
        assert_ne!(q.cmp_real(&prev).unwrap(), Ordering::Greater);
        prev = q;
    }
}

#[test]
fn bifurcation_bases_increase_below_q_kl() {
    // the bases q_n increase towards q_KL and every z_n exceeds 1
    let mut prev = bifurcation_base(1).unwrap().q;
    for n in 2..=5 {
        let q = bifurcation_base(n).unwrap().q;
        assert_eq!(q.cmp_real(&prev).unwrap(), Ordering::Greater);
        assert!(q.to_f64() < 1.787232);
        assert!(z_point(n).unwrap().cmp_i64(1).unwrap() == Ordering::Greater);
        prev = q;
    }
}

/// Scans of shrinking punctured neighbourhoods of the certified base inside
/// `(q_n, q_{n+1})` are refuted everywhere outside the hole.
#[test]
fn certified_base_is_alone_in_its_neighbourhood() {
    let x = Real::from_ratio(3, 2);
    let cert = isolate_default(&x).unwrap().unwrap();
    assert_eq!(cert.family, Family::C);
    let p = cert.p.enclose(64).unwrap().bounds().0;
    let q_n = bifurcation_base(cert.n).unwrap().q;
    let q_next = bifurcation_base(cert.n + 1).unwrap().q;
    let depth = cert.match_length.max(64);
    for (radius, hole) in [(ratio(1, 100), ratio(1, 1000)), (ratio(1, 1000), ratio(1, 100_000))] {
        let (lo, hi) = (&p - &radius, &p + &radius);
        assert_eq!(q_n.cmp_rational(&lo).unwrap(), Ordering::Less);
        assert_eq!(q_next.cmp_rational(&hi).unwrap(), Ordering::Greater);
        let rows = enumerate_ux(&x, binary(), Some((lo, hi)), 40, depth).unwrap();
        for r in &rows {
            if r.hi < &p - &hole || r.lo > &p + &hole {
                assert_eq!(r.verdict, ScanVerdict::Violated, "cell ({}, {})", r.lo, r.hi);
            }
        }
    }
}
