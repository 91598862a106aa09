//! Brute-force oracles shared by the integration tests. Everything here works from group
//! multiplication alone and avoids the crate's own search and series code.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use pcforge::group::{FiniteGroup, Group};

pub fn order<G: Group>(g: &G, x: &G::Elem) -> u64 {
    let mut y = x.clone();
    let mut n = 1;
    while y != g.identity() {
        y = g.mul(&y, x);
        n += 1;
    }
    n
}

pub fn power<G: Group>(g: &G, x: &G::Elem, k: u64) -> G::Elem {
    let mut acc = g.identity();
    for _ in 0..k {
        acc = g.mul(&acc, x);
    }
    acc
}

/// Subgroup generated by `gens`, grown one useful generator at a time. Returns the
/// elements and the generators that were needed.
pub fn closure<G: Group>(g: &G, gens: &[G::Elem]) -> (HashSet<G::Elem>, Vec<G::Elem>) {
    let mut set: HashSet<G::Elem> = HashSet::from([g.identity()]);
    let mut used: Vec<G::Elem> = Vec::new();
    for s in gens {
        if set.contains(s) {
            continue;
        }
        used.push(s.clone());
        let mut stack: Vec<G::Elem> = set.iter().cloned().collect();
        while let Some(a) = stack.pop() {
            for u in &used {
                let b = g.mul(&a, u);
                if set.insert(b.clone()) {
                    stack.push(b);
                }
            }
        }
    }
    (set, used)
}

/// Normal closure of `gens` under conjugation by `by`.
pub fn normal_closure<G: Group>(g: &G, gens: &[G::Elem], by: &[G::Elem]) -> (HashSet<G::Elem>, Vec<G::Elem>) {
    let mut gens = gens.to_vec();
    loop {
        let (set, used) = closure(g, &gens);
        let extra: Vec<G::Elem> = used
            .iter()
            .flat_map(|u| by.iter().map(move |h| (u, h)))
            .map(|(u, h)| g.conj(u, h))
            .filter(|c| !set.contains(c))
            .collect();
        if extra.is_empty() {
            return (set, used);
        }
        gens = used;
        gens.extend(extra);
    }
}

/// `γ_1 ⊇ γ_2 ⊇ ...` down to the trivial group.
pub fn lower_central<G: Group>(g: &G) -> Vec<HashSet<G::Elem>> {
    let top = g.generators();
    let (all, mut gens) = closure(g, &top);
    let mut out = vec![all];
    while out.last().unwrap().len() > 1 {
        let comms: Vec<G::Elem> = gens.iter().flat_map(|a| top.iter().map(|x| g.comm(a, x))).collect();
        let (next, used) = normal_closure(g, &comms, &top);
        if next.len() == out.last().unwrap().len() {
            break;
        }
        gens = used;
        out.push(next);
    }
    out
}

/// `λ_1 ⊇ λ_2 ⊇ ...` with `λ_(i+1) = [λ_i, G] λ_i^p`, down to the trivial group.
pub fn p_central<G: Group>(g: &G, p: u64) -> Vec<HashSet<G::Elem>> {
    let top = g.generators();
    let (all, mut gens) = closure(g, &top);
    let mut out = vec![all];
    while out.last().unwrap().len() > 1 {
        let last = out.last().unwrap();
        let mut new: Vec<G::Elem> = gens.iter().flat_map(|a| top.iter().map(|x| g.comm(a, x))).collect();
        new.extend(last.iter().map(|a| power(g, a, p)));
        let (next, used) = normal_closure(g, &new, &top);
        if next.len() == last.len() {
            break;
        }
        gens = used;
        out.push(next);
    }
    out
}

/// Union of the conjugates of `<x>`, `<y>`, `<xy>`.
pub fn sigma<G: Group>(g: &G, all: &[G::Elem], x: &G::Elem, y: &G::Elem) -> HashSet<G::Elem> {
    let mut out = HashSet::new();
    for a in [x.clone(), y.clone(), g.mul(x, y)] {
        let o = order(g, &a);
        let cyc: Vec<G::Elem> = (0..o).map(|k| power(g, &a, k)).collect();
        for h in all {
            for c in &cyc {
                out.insert(g.conj(c, h));
            }
        }
    }
    out
}

pub fn generates<G: FiniteGroup>(g: &G, x: &G::Elem, y: &G::Elem) -> bool {
    closure(g, &[x.clone(), y.clone()]).0.len() as u128 == g.size()
}

/// Both pairs generate and their Σ-sets meet only in the identity.
pub fn is_beauville<G: FiniteGroup>(g: &G, pair1: (&G::Elem, &G::Elem), pair2: (&G::Elem, &G::Elem)) -> bool {
    if !generates(g, pair1.0, pair1.1) || !generates(g, pair2.0, pair2.1) {
        return false;
    }
    let all = g.elements();
    let s1 = sigma(g, &all, pair1.0, pair1.1);
    let s2 = sigma(g, &all, pair2.0, pair2.1);
    s1.intersection(&s2).count() == 1
}

/// Whether any Beauville structure exists, by comparing the Σ-sets of all generating
/// pairs. Only for small groups.
pub fn has_beauville_structure<G: FiniteGroup>(g: &G) -> bool {
    let all = g.elements();
    let index: HashMap<&G::Elem, usize> = all.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let words = all.len().div_ceil(64);
    let id = index[&g.identity()];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut sets: Vec<Vec<u64>> = Vec::new();
    for x in &all {
        for y in &all {
            if !generates(g, x, y) {
                continue;
            }
            let mut bits = vec![0u64; words];
            for e in sigma(g, &all, x, y) {
                let i = index[&e];
                if i != id {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            if seen.insert(bits.clone()) {
                sets.push(bits);
            }
        }
    }
    sets.iter()
        .enumerate()
        .any(|(i, a)| sets[i..].iter().any(|b| a.iter().zip(b).all(|(u, v)| u & v == 0)))
}

/// Exhaustive check that `f` is an isomorphism `src -> dst`.
pub fn is_isomorphism<A: FiniteGroup, B: FiniteGroup>(src: &A, dst: &B, f: impl Fn(&A::Elem) -> B::Elem) -> bool {
    if src.size() != dst.size() {
        return false;
    }
    let all = src.elements();
    let image: HashMap<&A::Elem, B::Elem> = all.iter().map(|x| (x, f(x))).collect();
    let distinct: HashSet<&B::Elem> = image.values().collect();
    if distinct.len() != all.len() {
        return false;
    }
    all.iter()
        .all(|x| all.iter().all(|y| image[&src.mul(x, y)] == dst.mul(&image[x], &image[y])))
}

pub fn max_order<G: Group>(g: &G, set: &HashSet<G::Elem>) -> u64 {
    set.iter().map(|x| order(g, x)).max().unwrap_or(1)
}

pub fn ceil_div(a: u32, b: u32) -> u32 {
    a.div_ceil(b)
}
