mod common;

use proptest::prelude::*;

use pcforge::group::Group;
use pcforge::nottingham::TruncSeries;
use pcforge::pcp::{format_presentation, parse_presentation, weight_subgroup, Exps, PcGroup};
use pcforge::pquotient::{format_free_word, parse_free_word, FpPresentation, QuotientTower};

use std::sync::OnceLock;

/// A few stages of different shapes, built once.
fn stages() -> &'static [PcGroup] {
    static CELL: OnceLock<Vec<PcGroup>> = OnceLock::new();
    CELL.get_or_init(|| {
        [
            (FpPresentation::free(), 2, 4),
            (FpPresentation::free(), 3, 4),
            (FpPresentation::free(), 5, 3),
            (FpPresentation::free_product(3), 3, 6),
            (FpPresentation::free_product(7), 7, 3),
        ]
        .into_iter()
        .map(|(fp, p, n)| {
            let t = QuotientTower::compute(&fp, p, n, 64).unwrap();
            t.stage(n).unwrap().group().unwrap()
        })
        .collect()
    })
}

fn element(g: &PcGroup, seed: &[u8]) -> Exps {
    (0..g.ngens()).map(|i| seed[i % seed.len()] % g.p() as u8).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative(which in 0usize..5, a in prop::collection::vec(any::<u8>(), 1..16),
                                     b in prop::collection::vec(any::<u8>(), 1..16),
                                     c in prop::collection::vec(any::<u8>(), 1..16)) {
        let g = &stages()[which];
        let (x, y, z) = (element(g, &a), element(g, &b), element(g, &c));
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
    }

    #[test]
    fn inverses_and_identity(which in 0usize..5, a in prop::collection::vec(any::<u8>(), 1..16)) {
        let g = &stages()[which];
        let x = element(g, &a);
        let e = g.identity();
        prop_assert_eq!(g.mul(&x, &g.inv(&x)), e.clone());
        prop_assert_eq!(g.mul(&g.inv(&x), &x), e.clone());
        prop_assert_eq!(g.mul(&x, &e), x.clone());
        prop_assert_eq!(g.pow(&x, common::order(g, &x) as i64), e);
    }

    #[test]
    fn power_laws(which in 0usize..5, a in prop::collection::vec(any::<u8>(), 1..16), m in -30i64..30, n in -30i64..30) {
        let g = &stages()[which];
        let x = element(g, &a);
        prop_assert_eq!(g.mul(&g.pow(&x, m), &g.pow(&x, n)), g.pow(&x, m + n));
    }

    #[test]
    fn free_words_round_trip(w in prop::collection::vec((0usize..2, prop_oneof![-9i64..=-1, 1i64..=9]), 0..8)) {
        // Merge adjacent syllables on the same generator, as the printer would.
        let mut norm: Vec<(usize, i64)> = Vec::new();
        for (g, e) in w {
            match norm.last_mut() {
                Some((h, f)) if *h == g => {
                    *f += e;
                    if *f == 0 {
                        norm.pop();
                    }
                }
                _ => norm.push((g, e)),
            }
        }
        let text = format_free_word(&norm);
        prop_assert_eq!(parse_free_word(&text).unwrap(), norm);
    }

    #[test]
    fn freely_equal_words_agree(which in 0usize..3, w in prop::collection::vec((0usize..2, -5i64..=5), 1..6),
                                at in 0usize..6, gen in 0usize..2, e in 1i64..5) {
        let p = [2, 3, 5][which];
        let t = QuotientTower::compute(&FpPresentation::free(), p, 3, 64).unwrap();
        let s = t.last();
        let g = s.group().unwrap();
        let mut padded = w.clone();
        let at = at.min(padded.len());
        padded.insert(at, (gen, -e));
        padded.insert(at, (gen, e));
        prop_assert_eq!(s.evaluate(&g, &w).unwrap(), s.evaluate(&g, &padded).unwrap());
    }

    #[test]
    fn series_inverse_is_involutive(c in prop::collection::vec(0u8..5, 6)) {
        let f = TruncSeries::new(5, 7, c).unwrap();
        let inv = f.invert();
        prop_assert!(f.compose(&inv).unwrap().is_identity());
        prop_assert!(inv.compose(&f).unwrap().is_identity());
        prop_assert_eq!(inv.invert(), f.clone());
        prop_assert_eq!(f.to_string().parse::<TruncSeries>().unwrap(), f);
    }

    #[test]
    fn composition_is_associative(a in prop::collection::vec(0u8..3, 7), b in prop::collection::vec(0u8..3, 7),
                                  c in prop::collection::vec(0u8..3, 7)) {
        let (f, g, h) = (TruncSeries::new(3, 8, a).unwrap(), TruncSeries::new(3, 8, b).unwrap(), TruncSeries::new(3, 8, c).unwrap());
        prop_assert_eq!(f.compose(&g).unwrap().compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
    }
}

/// Reversion by exhaustive search: the unique `g` with `f(g(t)) = t`.
#[test]
fn invert_matches_exhaustive_search() {
    let (p, k) = (3u32, 5u32);
    let all: Vec<TruncSeries> = (0..3usize.pow(k - 1))
        .map(|mut i| {
            let c = (0..k - 1)
                .map(|_| {
                    let d = (i % 3) as u8;
                    i /= 3;
                    d
                })
                .collect();
            TruncSeries::new(p, k, c).unwrap()
        })
        .collect();
    for f in &all {
        let found: Vec<&TruncSeries> = all.iter().filter(|g| f.compose(g).unwrap().is_identity()).collect();
        assert_eq!(found, [&f.invert()]);
    }
}

#[test]
fn reversion_of_t_plus_t2() {
    let f = TruncSeries::monomial(3, 4, 2, 1);
    assert_eq!(f.invert().to_string(), "t + 2*t^2 + 2*t^3 + t^4 (mod t^5, p=3)");
    // (t + t^2) composed with itself, by hand: t + t^2 + (t + t^2)^2 = t + 2t^2 + 2t^3 + t^4.
    assert_eq!(f.compose(&f).unwrap().to_string(), "t + 2*t^2 + 2*t^3 + t^4 (mod t^5, p=3)");
}

#[test]
fn presentations_round_trip() {
    for g in stages() {
        let text = format_presentation(g.pcp());
        let back = parse_presentation(&text).unwrap();
        assert_eq!(&back, g.pcp());
        assert_eq!(format_presentation(&back), text);
    }
}

/// `weight_subgroup(n)` against the p-central series computed from multiplication alone.
#[test]
fn weight_subgroups_are_the_p_central_series() {
    for g in stages().iter().filter(|g| g.pcp().order() <= 3u128.pow(10)) {
        let lambda = common::p_central(g, g.p() as u64);
        for (i, l) in lambda.iter().enumerate() {
            let w = weight_subgroup(g, i as u32 + 1).unwrap();
            assert_eq!(w.order(g.p()), l.len() as u128, "λ_{} of order {}", i + 1, g.pcp().order());
            assert!(w.elements(g).iter().all(|x| l.contains(x)));
        }
    }
}
