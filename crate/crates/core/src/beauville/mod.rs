//! Σ-sets, the Beauville criterion, the explicit constructions used for p ≥ 5 and
//! p = 3, and exhaustive searches that can prove absence.
//!
//! Σ(x, y) is the union of the conjugates of `<x>`, `<y>`, `<xy>`. Two cyclic subgroups
//! meet nontrivially iff they share a subgroup of prime order, so Σ is stored as the
//! set of prime-order subgroups of conjugates of those three cyclic groups. Each such
//! subgroup is named by its lexicographically least nontrivial element.

mod cert;
mod search;

pub use cert::{
    defining_images, element_word, evaluate_word, generator_words, parse_certificate,
    reverify_certificate, ParsedCertificate, Reverification,
};
pub use search::{
    cross_validate_socles, exhaustive_beauville_search, search_pc, socle_data, SearchOutcome,
    SearchStats, SocleData,
};

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::group::{conjugacy_class, prime_factors, FiniteGroup, Group};
use crate::pcp::{Exps, PcGroup};

/// The least nontrivial element of `<s>`, where `s` has prime order `q`.
pub fn canonical<G: Group>(g: &G, s: &G::Elem, q: u64) -> G::Elem {
    let mut best = s.clone();
    let mut pw = s.clone();
    for _ in 2..q {
        pw = g.mul(&pw, s);
        if pw < best {
            best = pw.clone();
        }
    }
    best
}

/// Canonical generators of the prime-order subgroups of `<x>`.
pub fn min_subgroups<G: Group>(g: &G, x: &G::Elem) -> Vec<G::Elem> {
    let o = g.order(x);
    prime_factors(o)
        .into_iter()
        .map(|q| canonical(g, &g.pow(x, (o / q) as i64), q))
        .collect()
}

/// All conjugates of the prime-order subgroup named by `s`.
pub fn subgroup_orbit<G: Group>(g: &G, s: &G::Elem) -> BTreeSet<G::Elem> {
    let q = g.order(s);
    let gens = g.generators();
    let start = canonical(g, s, q);
    let mut seen: HashSet<G::Elem> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for h in &gens {
            let b = canonical(g, &g.conj(&a, h), q);
            if seen.insert(b.clone()) {
                queue.push_back(b);
            }
        }
    }
    seen.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSet<E: Ord> {
    pub pair: (E, E),
    /// Named prime-order subgroups of conjugates of `<x>`, `<y>`, `<xy>`.
    pub socle_orbit: BTreeSet<E>,
}

pub fn sigma<G: Group>(g: &G, x: &G::Elem, y: &G::Elem) -> SigmaSet<G::Elem> {
    let xy = g.mul(x, y);
    let mut orbit = BTreeSet::new();
    for a in [x, y, &xy] {
        for s in min_subgroups(g, a) {
            if !orbit.contains(&s) {
                orbit.extend(subgroup_orbit(g, &s));
            }
        }
    }
    SigmaSet {
        pair: (x.clone(), y.clone()),
        socle_orbit: orbit,
    }
}

pub fn sigma_disjoint<E: Ord>(a: &SigmaSet<E>, b: &SigmaSet<E>) -> bool {
    a.socle_orbit.is_disjoint(&b.socle_orbit)
}

/// Σ(x, y) as an element set, straight from the definition.
pub fn sigma_elements<G: FiniteGroup>(g: &G, x: &G::Elem, y: &G::Elem) -> BTreeSet<G::Elem> {
    let all = g.elements();
    let xy = g.mul(x, y);
    let mut out = BTreeSet::new();
    for a in [x, y, &xy] {
        let cyc: Vec<G::Elem> = (0..g.order(a)).map(|k| g.pow(a, k as i64)).collect();
        for h in &all {
            for c in &cyc {
                out.insert(g.conj(c, h));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeauvilleCertificate<E: Ord> {
    pub pair1: (E, E),
    pub pair2: (E, E),
    pub generates1: bool,
    pub generates2: bool,
    /// Determinants of the Frattini images, where the group model provides them.
    pub det1: Option<u32>,
    pub det2: Option<u32>,
    pub sigma1: SigmaSet<E>,
    pub sigma2: SigmaSet<E>,
    pub verdict: bool,
}

pub fn beauville_check<G: Group>(
    g: &G,
    pair1: (&G::Elem, &G::Elem),
    pair2: (&G::Elem, &G::Elem),
) -> BeauvilleCertificate<G::Elem> {
    let generates1 = g.generates(&[pair1.0.clone(), pair1.1.clone()]);
    let generates2 = g.generates(&[pair2.0.clone(), pair2.1.clone()]);
    let sigma1 = sigma(g, pair1.0, pair1.1);
    let sigma2 = sigma(g, pair2.0, pair2.1);
    let verdict = generates1 && generates2 && sigma_disjoint(&sigma1, &sigma2);
    BeauvilleCertificate {
        pair1: (pair1.0.clone(), pair1.1.clone()),
        pair2: (pair2.0.clone(), pair2.1.clone()),
        generates1,
        generates2,
        det1: g.generation_witness(pair1.0, pair1.1),
        det2: g.generation_witness(pair2.0, pair2.1),
        sigma1,
        sigma2,
        verdict,
    }
}

pub type Pairs = ((Exps, Exps), (Exps, Exps));

/// `({u, v}, {u v^2, u v^4})`.
pub fn paper_structure_p_ge_5(g: &PcGroup, u: &Exps, v: &Exps) -> Result<Pairs> {
    if g.p() < 5 {
        return Err(Error::Invalid(format!("construction needs p >= 5, got p = {}", g.p())));
    }
    let v2 = g.pow(v, 2);
    let v4 = g.pow(v, 4);
    Ok(((u.clone(), v.clone()), (g.mul(u, &v2), g.mul(u, &v4))))
}

/// `{[x, h] : h ∈ G}`.
pub fn commutator_values(g: &PcGroup, x: &Exps, bound: u128) -> Result<HashSet<Exps>> {
    Ok(g.enumerate(bound)?.map(|h| g.comm(x, &h)).collect())
}

/// The first element of `Φ(G)` in enumeration order that is not of the form `[x, h]`.
pub fn nonconjugate_element(g: &PcGroup, x: &Exps, bound: u128) -> Result<Exps> {
    let values = commutator_values(g, x, bound)?;
    let phi = frattini_elements(g, bound)?;
    phi.into_iter()
        .find(|t| !values.contains(t))
        .ok_or_else(|| Error::NotFound("every element of Φ(G) is a commutator [x, h]".into()))
}

/// Elements of `Φ(G)` in lexicographic order.
pub fn frattini_elements(g: &PcGroup, bound: u128) -> Result<Vec<Exps>> {
    g.check_enumerable(bound)?;
    let phi = if g.frattini_weighted() {
        crate::pcp::SubgroupBasis::from_generator_range(g, g.pcp().weight_range(2))
    } else {
        let mut gens = Vec::new();
        for a in g.generators() {
            gens.push(g.pow(&a, g.p() as i64));
            for b in g.generators() {
                gens.push(g.comm(&a, &b));
            }
        }
        crate::pcp::SubgroupBasis::normal_closure(g, &gens)
    };
    let mut els = phi.elements(g);
    els.sort();
    Ok(els)
}

/// `({u, v}, {(u z)^-1, v t})` with `z`, `t` from [`nonconjugate_element`].
pub fn paper_structure_p3(g: &PcGroup, u: &Exps, v: &Exps, bound: u128) -> Result<(Pairs, Exps, Exps)> {
    if g.p() != 3 {
        return Err(Error::Invalid(format!("construction needs p = 3, got p = {}", g.p())));
    }
    let z = nonconjugate_element(g, u, bound)?;
    let t = nonconjugate_element(g, v, bound)?;
    let a = g.inv(&g.mul(u, &z));
    let b = g.mul(v, &t);
    Ok((((u.clone(), v.clone()), (a, b)), z, t))
}

/// Whether the conjugates of `<x>` and of `<x t>` meet only in the identity.
pub fn lemma34_check<G: Group>(g: &G, x: &G::Elem, t: &G::Elem) -> bool {
    let xt = g.mul(x, t);
    let mut a = BTreeSet::new();
    for s in min_subgroups(g, x) {
        a.extend(subgroup_orbit(g, &s));
    }
    min_subgroups(g, &xt)
        .iter()
        .all(|s| subgroup_orbit(g, s).is_disjoint(&a))
}

/// Centralizer criterion: some element has a centralizer of order `p^2`.
pub fn is_maximal_class<G: FiniteGroup>(g: &G, p: u32) -> bool {
    let size = g.size();
    let p2 = (p as u128) * (p as u128);
    if size <= p2 {
        return true;
    }
    g.elements()
        .iter()
        .any(|x| size / conjugacy_class(g, x).len() as u128 == p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::CyclicSquare;

    #[test]
    fn abelian_sigma_is_three_lines() {
        let g = CyclicSquare { n: 5 };
        let s = sigma(&g, &(1, 0), &(0, 1));
        assert_eq!(s.socle_orbit.len(), 3);
        let degenerate = sigma(&g, &(1, 0), &(1, 0));
        assert_eq!(degenerate.socle_orbit.len(), 1);
    }

    #[test]
    fn canonical_is_least_power() {
        let g = CyclicSquare { n: 5 };
        assert_eq!(canonical(&g, &(3, 1), 5), (1, 2));
    }

    #[test]
    fn composite_orders_split_into_primes() {
        let g = CyclicSquare { n: 6 };
        let m = min_subgroups(&g, &(1, 1));
        assert_eq!(m.len(), 2);
    }
}
