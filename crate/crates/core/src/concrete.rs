//! Weighted PC presentations for concretely given finite p-groups.
//!
//! The p-central series is computed by closure; each layer gets a basis chosen greedily
//! among commutators `[b, g]` (b a basis element of the previous layer, g of weight 1)
//! and p-th powers `b^p`, so every non-defining generator is literally a commutator or a
//! power of earlier generators and the definitions carry no correction.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::group::{normal_closure, FiniteGroup, Group};
use crate::pcp::presentation::{exps_to_word, index_to_exps};
use crate::pcp::{is_consistent, Definition, Exps, PcGroup, PcPresentation, Word};
use crate::pquotient::Homomorphism;

/// A PC group isomorphic to a concrete group, with the element correspondence.
#[derive(Clone, Debug)]
pub struct PcModel<G: FiniteGroup> {
    pub pc: PcGroup,
    /// The concrete element represented by each PC generator.
    pub reps: Vec<G::Elem>,
    to_pc: HashMap<G::Elem, Exps>,
    /// Concrete element for every exponent vector, by lexicographic index.
    from_pc: Vec<G::Elem>,
}

impl<G: FiniteGroup> PcModel<G> {
    pub fn to_pc(&self, x: &G::Elem) -> Option<&Exps> {
        self.to_pc.get(x)
    }

    pub fn from_pc(&self, e: &[u8]) -> &G::Elem {
        let idx = crate::pcp::presentation::exps_to_index(e, self.pc.p());
        &self.from_pc[idx]
    }
}

/// Grows `span`, a subgroup containing the next layer, by the powers of `c`.
fn extend_coset_span<G: Group>(
    g: &G,
    span: &HashSet<G::Elem>,
    c: &G::Elem,
    p: u32,
) -> HashSet<G::Elem> {
    let mut out = span.clone();
    let mut pw = g.identity();
    for _ in 1..p {
        pw = g.mul(&pw, c);
        for s in span {
            out.insert(g.mul(s, &pw));
        }
    }
    out
}

/// Builds the weighted PC presentation of `g` on the given generators (which must be
/// independent modulo the Frattini subgroup), and verifies it is an isomorphism.
pub fn pc_from_concrete<G: FiniteGroup + Clone>(
    g: &G,
    p: u32,
    gens: &[G::Elem],
) -> Result<PcModel<G>> {
    let size = g.size();
    // λ-series as element sets.
    let mut series: Vec<HashSet<G::Elem>> = vec![g.elements().into_iter().collect()];
    loop {
        let last = series.last().unwrap();
        if last.len() == 1 {
            break;
        }
        let ambient = g.generators();
        let mut sub: Vec<G::Elem> = Vec::new();
        for x in last {
            sub.push(g.pow(x, p as i64));
            for s in &ambient {
                sub.push(g.comm(x, s));
            }
        }
        let next: HashSet<G::Elem> = normal_closure(g, &sub).into_iter().collect();
        if next.len() == last.len() {
            return Err(Error::Invalid("group is not a finite p-group".into()));
        }
        series.push(next);
    }
    // reps[k], weight of k, definition of k.
    let mut reps: Vec<G::Elem> = Vec::new();
    let mut weights: Vec<u32> = Vec::new();
    let mut defs: Vec<Definition> = Vec::new();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (li, pair) in series.windows(2).enumerate() {
        let (cur, below) = (&pair[0], &pair[1]);
        let w = li as u32 + 1;
        let mut candidates: Vec<(G::Elem, Definition)> = Vec::new();
        if li == 0 {
            for (f, x) in gens.iter().enumerate() {
                candidates.push((
                    x.clone(),
                    Definition::Image {
                        gen: f,
                        correction: Vec::new(),
                    },
                ));
            }
        } else {
            let prev = &layers[li - 1];
            for &b in prev {
                for &s in &layers[0] {
                    if b > s {
                        candidates.push((
                            g.comm(&reps[b], &reps[s]),
                            Definition::Commutator {
                                hi: b,
                                lo: s,
                                correction: Vec::new(),
                            },
                        ));
                    }
                }
            }
            for &b in prev {
                candidates.push((
                    g.pow(&reps[b], p as i64),
                    Definition::Power {
                        base: b,
                        correction: Vec::new(),
                    },
                ));
            }
        }
        let target = cur.len();
        let mut span: HashSet<G::Elem> = below.clone();
        let mut layer = Vec::new();
        for (c, d) in candidates {
            if span.len() == target {
                break;
            }
            if !cur.contains(&c) {
                return Err(Error::Invalid("candidate outside its layer".into()));
            }
            if span.contains(&c) {
                if li == 0 {
                    return Err(Error::Invalid(
                        "generators are dependent modulo the Frattini subgroup".into(),
                    ));
                }
                continue;
            }
            span = extend_coset_span(g, &span, &c, p);
            layer.push(reps.len());
            reps.push(c);
            weights.push(w);
            defs.push(d);
        }
        if span.len() != target {
            return Err(Error::Invalid(format!(
                "layer {w} is not spanned by commutators and powers of the given generators"
            )));
        }
        layers.push(layer);
    }
    let m = reps.len();
    if (p as u128).pow(m as u32) != size {
        return Err(Error::Invalid("layer ranks do not account for the group order".into()));
    }
    // Normal forms.
    let n = size as usize;
    let mut from_pc: Vec<G::Elem> = Vec::with_capacity(n);
    let powers: Vec<Vec<G::Elem>> = reps
        .iter()
        .map(|r| (0..p).map(|k| g.pow(r, k as i64)).collect())
        .collect();
    for idx in 0..n {
        let e = index_to_exps(idx, p, m);
        let mut x = g.identity();
        for (k, &v) in e.iter().enumerate() {
            if v != 0 {
                x = g.mul(&x, &powers[k][v as usize]);
            }
        }
        from_pc.push(x);
    }
    let to_pc: HashMap<G::Elem, Exps> = from_pc
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), index_to_exps(i, p, m)))
        .collect();
    if to_pc.len() != n {
        return Err(Error::Invalid("normal forms are not unique".into()));
    }
    let word = |x: &G::Elem| -> Word { exps_to_word(&to_pc[x]) };
    let power: Vec<Word> = (0..m).map(|i| word(&g.pow(&reps[i], p as i64))).collect();
    let comm: Vec<Vec<Word>> = (0..m)
        .map(|j| (0..j).map(|i| word(&g.comm(&reps[j], &reps[i]))).collect())
        .collect();
    let pcp = PcPresentation::new(p, weights, power, comm, Some(defs))?;
    if !is_consistent(&pcp) {
        return Err(Error::Invalid("derived presentation is inconsistent".into()));
    }
    let pc = PcGroup::new(pcp)?;
    // Relations of the PC group hold in g ...
    Homomorphism::from_pc_images(&pc, g, reps.clone())?;
    // ... and the correspondence respects right multiplication by the generators of g.
    for x in &from_pc {
        for s in g.generators() {
            let lhs = &to_pc[&g.mul(x, &s)];
            let rhs = pc.mul(&to_pc[x], &to_pc[&s]);
            if *lhs != rhs {
                return Err(Error::RelationViolated {
                    relation: "element correspondence".into(),
                });
            }
        }
    }
    Ok(PcModel {
        pc,
        reps,
        to_pc,
        from_pc,
    })
}
