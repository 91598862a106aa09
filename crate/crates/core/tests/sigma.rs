mod common;

use pcforge::beauville::{beauville_check, cross_validate_socles, parse_certificate, reverify_certificate, sigma, sigma_disjoint};
use pcforge::checks::group_h;
use pcforge::group::{FiniteGroup, Group};
use pcforge::pcp::PcGroup;
use pcforge::pquotient::{FpPresentation, QuotientTower};
use pcforge::table::TableGroup;

fn stage(fp: FpPresentation, p: u32, n: u32) -> PcGroup {
    QuotientTower::compute(&fp, p, n, 64).unwrap().stage(n).unwrap().group().unwrap()
}

#[test]
fn socle_keys_agree_with_conjugate_unions() {
    for g in [stage(FpPresentation::free(), 3, 3), group_h().unwrap(), stage(FpPresentation::free_product(2), 2, 5)] {
        let t = TableGroup::from_pc(&g, 1 << 20).unwrap();
        let (checked, mismatches) = cross_validate_socles(&t);
        assert!(checked > 0);
        assert_eq!(mismatches, 0);
    }
}

/// Socle-orbit disjointness against the element-level Σ intersection, over a spread of
/// pairs in H.
#[test]
fn sigma_disjointness_matches_elementwise() {
    let g = group_h().unwrap();
    let all = g.elements();
    let picks: Vec<_> = all.iter().step_by(17).cloned().collect();
    for (i, a) in picks.iter().enumerate() {
        for b in picks.iter().skip(i + 1).take(4) {
            for c in picks.iter().skip(i + 2).take(3) {
                let d = g.mul(a, c);
                let fast = sigma_disjoint(&sigma(&g, a, b), &sigma(&g, c, &d));
                let slow = common::sigma(&g, &all, a, b)
                    .intersection(&common::sigma(&g, &all, c, &d))
                    .count()
                    == 1;
                assert_eq!(fast, slow, "{a:?} {b:?} / {c:?} {d:?}");
            }
        }
    }
}

#[test]
fn tampered_certificates_are_rejected() {
    let g = stage(FpPresentation::free(), 5, 2);
    let (u, v) = (g.unit(0), g.unit(1));
    let uv2 = g.mul(&u, &g.pow(&v, 2));
    let uv4 = g.mul(&u, &g.pow(&v, 4));
    let cert = beauville_check(&g, (&u, &v), (&uv2, &uv4));
    assert!(cert.verdict);
    let text = cert.to_text(&g);
    assert!(reverify_certificate(&parse_certificate(&text).unwrap(), 1000).unwrap().ok());
    // Swapping in a pair that meets the first one.
    let bad = text.replace("pair 2 = x*y^2 ; x*y^4", "pair 2 = x ; x*y^4");
    assert_ne!(bad, text);
    assert!(!reverify_certificate(&parse_certificate(&bad).unwrap(), 1000).unwrap().ok());
    let bad = text.replace("det 2 = 2", "det 2 = 3");
    assert!(!reverify_certificate(&parse_certificate(&bad).unwrap(), 1000).unwrap().ok());
}
