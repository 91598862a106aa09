use std::collections::{BTreeMap, BTreeSet};

use super::{beauville_check, BeauvilleCertificate};
use crate::error::{Error, Result};
use crate::group::{prime_factors, Group};
use crate::par;
use crate::pcp::presentation::index_to_exps;
use crate::pcp::{Exps, PcGroup};
use crate::table::TableGroup;

/// Per-element data on prime-order subgroups: `keys[x]` lists the conjugacy-class ids
/// of the prime-order subgroups of `<x>`.
#[derive(Clone, Debug)]
pub struct SocleData {
    pub order: Vec<u64>,
    pub keys: Vec<Vec<u32>>,
    pub nclasses: usize,
}

fn canonical_index(t: &TableGroup, s: u32, q: u64) -> u32 {
    let mut best = s;
    let mut pw = s;
    for _ in 2..q {
        pw = t.m(pw, s);
        best = best.min(pw);
    }
    best
}

fn power(t: &TableGroup, x: u32, k: u64) -> u32 {
    let mut acc = t.identity();
    for _ in 0..k {
        acc = t.m(acc, x);
    }
    acc
}

pub fn socle_data(t: &TableGroup) -> SocleData {
    let n = t.len();
    let order: Vec<u64> = par::map_range(n, |x| t.elem_order(x as u32));
    let mins: Vec<Vec<(u32, u64)>> = par::map_range(n, |x| {
        let o = order[x];
        prime_factors(o)
            .into_iter()
            .map(|q| (canonical_index(t, power(t, x as u32, o / q), q), q))
            .collect()
    });
    let gens = t.generators();
    let mut class_of = vec![u32::MAX; n];
    let mut nclasses = 0u32;
    let mut starts: BTreeSet<(u32, u64)> = BTreeSet::new();
    for m in &mins {
        starts.extend(m.iter().copied());
    }
    for (s, q) in starts {
        if class_of[s as usize] != u32::MAX {
            continue;
        }
        class_of[s as usize] = nclasses;
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for &h in &gens {
                let b = canonical_index(t, t.m(t.m(t.i(h), a), h), q);
                if class_of[b as usize] == u32::MAX {
                    class_of[b as usize] = nclasses;
                    stack.push(b);
                }
            }
        }
        nclasses += 1;
    }
    let keys = mins
        .iter()
        .map(|m| {
            let mut k: Vec<u32> = m.iter().map(|&(s, _)| class_of[s as usize]).collect();
            k.sort_unstable();
            k.dedup();
            k
        })
        .collect();
    SocleData {
        order,
        keys,
        nclasses: nclasses as usize,
    }
}

fn union_keys(a: &[u32], b: &[u32], c: &[u32]) -> Vec<u32> {
    let mut k: Vec<u32> = a.iter().chain(b).chain(c).copied().collect();
    k.sort_unstable();
    k.dedup();
    k
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Counters describing how the search space was covered.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub group_order: usize,
    pub generating_pairs: usize,
    /// Classes of generating pairs by their triple of maximal subgroups.
    pub classes: usize,
    pub class_pairs: usize,
    /// Class pairs whose triples share a maximal subgroup.
    pub sharing_pairs: usize,
    /// Sharing pairs refuted by the power-subgroup obstruction.
    pub refuted_by_obstruction: usize,
    /// Pairs refuted by comparing Σ-sets.
    pub refuted_by_sigma: usize,
    /// Maximal subgroups whose elements outside Φ(G) all have conjugate socles.
    pub obstruction_lines: usize,
    pub lines: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub certificate: Option<BeauvilleCertificate<u32>>,
    pub exhaustive: bool,
    pub stats: SearchStats,
}

/// Projective point of a nonzero vector of GF(p)^2, as an index in `0..=p`.
fn line_of(p: u32, v: &[u32]) -> Option<u32> {
    match (v[0] % p, v[1] % p) {
        (0, 0) => None,
        (0, _) => Some(p),
        (a, b) => Some(b * crate::gf::inv_mod(a, p) % p),
    }
}

/// Searches all pairs of generating pairs for a Beauville structure.
///
/// For 2-generator p-groups, generating pairs are classed by the triple of maximal
/// subgroups containing `x`, `y`, `xy`. Two classes whose triples share a maximal
/// subgroup `M` are refuted outright when every element of `M \ Φ(G)` has a socle in the
/// same conjugacy class; all other class pairs are compared by their Σ-keys.
pub fn exhaustive_beauville_search(t: &TableGroup) -> SearchOutcome {
    let n = t.len();
    let sd = socle_data(t);
    let mut stats = SearchStats {
        group_order: n,
        ..Default::default()
    };
    let fr = t.frattini().filter(|f| f.d == 2);
    let lines: Vec<Option<u32>> = match fr {
        Some(f) => f.coords.iter().map(|c| line_of(f.p, c)).collect(),
        None => vec![Some(0); n],
    };
    // Obstruction per maximal subgroup: one socle class on M \ Φ.
    let nlines = fr.map_or(1, |f| f.p as usize + 1);
    let mut line_key: Vec<Option<Vec<u32>>> = vec![None; nlines];
    let mut obstruction = vec![fr.is_some(); nlines];
    if fr.is_some() {
        for x in 0..n {
            if let Some(l) = lines[x] {
                let l = l as usize;
                match &line_key[l] {
                    None => line_key[l] = Some(sd.keys[x].clone()),
                    Some(k) if *k != sd.keys[x] => obstruction[l] = false,
                    _ => {}
                }
            }
        }
    }
    stats.lines = if fr.is_some() { nlines } else { 0 };
    stats.obstruction_lines = obstruction.iter().filter(|&&b| b).count();

    // class (sorted line triple) -> Σ-key -> first witness pair.
    type Classes = BTreeMap<Vec<u32>, BTreeMap<Vec<u32>, (u32, u32)>>;
    let per_x: Vec<(usize, Classes)> = par::map_range(n, |x| {
        let mut local: Classes = BTreeMap::new();
        let mut count = 0;
        let x = x as u32;
        if fr.is_some() && lines[x as usize].is_none() {
            return (0, local);
        }
        for y in 0..n as u32 {
            let gen = match fr {
                Some(_) => matches!((lines[x as usize], lines[y as usize]), (Some(a), Some(b)) if a != b),
                None => t.generates_pair(x, y),
            };
            if !gen {
                continue;
            }
            count += 1;
            let xy = t.m(x, y);
            let class = match fr {
                Some(_) => {
                    let mut c = vec![
                        lines[x as usize].unwrap(),
                        lines[y as usize].unwrap(),
                        lines[xy as usize].expect("xy outside Φ"),
                    ];
                    c.sort_unstable();
                    c
                }
                None => vec![0],
            };
            let key = union_keys(&sd.keys[x as usize], &sd.keys[y as usize], &sd.keys[xy as usize]);
            local.entry(class).or_default().entry(key).or_insert((x, y));
        }
        (count, local)
    });
    let mut classes: Classes = BTreeMap::new();
    for (count, local) in per_x {
        stats.generating_pairs += count;
        for (c, keys) in local {
            let slot = classes.entry(c).or_default();
            for (k, w) in keys {
                slot.entry(k).or_insert(w);
            }
        }
    }
    stats.classes = classes.len();
    let class_list: Vec<_> = classes.iter().collect();
    let mut found: Option<((u32, u32), (u32, u32))> = None;
    'outer: for a in 0..class_list.len() {
        for b in a..class_list.len() {
            stats.class_pairs += 1;
            let (ca, ka) = class_list[a];
            let (cb, kb) = class_list[b];
            if fr.is_some() {
                let shared: Vec<u32> = ca.iter().filter(|l| cb.contains(l)).copied().collect();
                if !shared.is_empty() {
                    stats.sharing_pairs += 1;
                    if shared.iter().any(|&l| obstruction[l as usize]) {
                        stats.refuted_by_obstruction += 1;
                        continue;
                    }
                }
            }
            for (k1, w1) in ka {
                for (k2, w2) in kb {
                    if disjoint(k1, k2) {
                        found = Some((*w1, *w2));
                        break 'outer;
                    }
                }
            }
            stats.refuted_by_sigma += 1;
        }
    }
    let certificate = found.map(|(p1, p2)| beauville_check(t, (&p1.0, &p1.1), (&p2.0, &p2.1)));
    SearchOutcome {
        certificate,
        exhaustive: true,
        stats,
    }
}

/// Exhaustive search on a PC group; the outcome is marked non-exhaustive when the group
/// exceeds `bound`. A found structure is re-checked on the PC group itself.
pub fn search_pc(
    g: &PcGroup,
    bound: u128,
) -> Result<(SearchOutcome, Option<BeauvilleCertificate<Exps>>)> {
    let t = match TableGroup::from_pc(g, bound) {
        Ok(t) => t,
        Err(Error::Bound { .. }) => {
            return Ok((
                SearchOutcome {
                    certificate: None,
                    exhaustive: false,
                    stats: SearchStats::default(),
                },
                None,
            ))
        }
        Err(e) => return Err(e),
    };
    let out = exhaustive_beauville_search(&t);
    let pc_cert = out.certificate.as_ref().map(|c| {
        let (p, m) = (g.p(), g.ngens());
        let e = |i: u32| index_to_exps(i as usize, p, m);
        let (a, b) = (e(c.pair1.0), e(c.pair1.1));
        let (x, y) = (e(c.pair2.0), e(c.pair2.1));
        beauville_check(g, (&a, &b), (&x, &y))
    });
    Ok((out, pc_cert))
}

/// Checks, for every pair of nontrivial elements, that the unions of the conjugates of
/// `<a>` and `<b>` meet trivially exactly when their socle keys are disjoint. Returns
/// (pairs checked, mismatches).
pub fn cross_validate_socles(t: &TableGroup) -> (usize, usize) {
    let n = t.len();
    let sd = socle_data(t);
    let words = n.div_ceil(64);
    let id = t.identity();
    let unions: Vec<Vec<u64>> = par::map_range(n, |a| {
        let mut bits = vec![0u64; words];
        let cyc: Vec<u32> = (0..sd.order[a]).map(|k| power(t, a as u32, k)).collect();
        for h in 0..n as u32 {
            let hi = t.i(h);
            for &c in &cyc {
                let v = t.m(t.m(hi, c), h);
                if v != id {
                    bits[v as usize / 64] |= 1 << (v % 64);
                }
            }
        }
        bits
    });
    let mismatches: usize = par::map_range(n, |a| {
        if a as u32 == id {
            return 0;
        }
        (0..n)
            .filter(|&b| b as u32 != id)
            .filter(|&b| {
                let meet = unions[a].iter().zip(&unions[b]).any(|(x, y)| x & y != 0);
                meet == disjoint(&sd.keys[a], &sd.keys[b])
            })
            .count()
    })
    .into_iter()
    .sum();
    let checked = (n - 1) * (n - 1);
    (checked, mismatches)
}
