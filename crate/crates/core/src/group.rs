//! Abstract group interfaces and generic finite-group algorithms (closures, orders,
//! centralizers), shared by every concrete group model in the crate.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

pub trait Group: Send + Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// A generating set.
    fn generators(&self) -> Vec<Self::Elem>;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn pow(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        let mut base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = self.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `g^-1 x g`.
    fn conj(&self, x: &Self::Elem, g: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(g), x), g)
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    fn comm(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&self.inv(&ba), &ab)
    }

    /// Element order by repeated multiplication; override for faster models.
    fn order(&self, x: &Self::Elem) -> u64 {
        let mut y = x.clone();
        let mut n = 1u64;
        while !self.is_identity(&y) {
            y = self.mul(&y, x);
            n += 1;
        }
        n
    }

    /// Whether the given elements generate the whole group.
    fn generates(&self, gens: &[Self::Elem]) -> bool;

    /// A checkable witness that a pair generates (for 2-generator p-groups, the
    /// determinant of the Frattini images); `None` when the model has none.
    fn generation_witness(&self, _x: &Self::Elem, _y: &Self::Elem) -> Option<u32> {
        None
    }
}

pub trait FiniteGroup: Group {
    fn size(&self) -> u128;
    /// Every element exactly once, in a fixed deterministic order.
    fn elements(&self) -> Vec<Self::Elem>;
}

/// Adds `s` to the generators of the subgroup `set`, growing the set to the new closure.
fn adjoin<G: Group>(g: &G, set: &mut HashSet<G::Elem>, used: &mut Vec<G::Elem>, s: &G::Elem) {
    if set.contains(s) {
        return;
    }
    used.push(s.clone());
    let mut queue: VecDeque<G::Elem> = set.iter().cloned().collect();
    while let Some(x) = queue.pop_front() {
        for u in used.iter() {
            let y = g.mul(&x, u);
            if set.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
}

/// Subgroup generated by `gens` with the irredundant part of `gens` that generates it.
pub fn closure_with_gens<G: Group>(g: &G, gens: &[G::Elem]) -> (BTreeSet<G::Elem>, Vec<G::Elem>) {
    let mut set: HashSet<G::Elem> = HashSet::from([g.identity()]);
    let mut used = Vec::new();
    for s in gens {
        adjoin(g, &mut set, &mut used, s);
    }
    (set.into_iter().collect(), used)
}

/// Subgroup generated by `gens`, as a sorted set.
pub fn closure<G: Group>(g: &G, gens: &[G::Elem]) -> BTreeSet<G::Elem> {
    closure_with_gens(g, gens).0
}

/// Smallest normal subgroup containing `gens`, with a generating set.
///
/// A subgroup is normal once the conjugates of its generators by the generators of `G`
/// lie in it, so only those conjugates are tested.
pub fn normal_closure_with_gens<G: Group>(
    g: &G,
    gens: &[G::Elem],
) -> (BTreeSet<G::Elem>, Vec<G::Elem>) {
    let ambient = g.generators();
    let mut set: HashSet<G::Elem> = HashSet::from([g.identity()]);
    let mut used: Vec<G::Elem> = Vec::new();
    for s in gens {
        adjoin(g, &mut set, &mut used, s);
    }
    let mut i = 0;
    while i < used.len() {
        let x = used[i].clone();
        for s in &ambient {
            let y = g.conj(&x, s);
            adjoin(g, &mut set, &mut used, &y);
        }
        i += 1;
    }
    (set.into_iter().collect(), used)
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure<G: Group>(g: &G, gens: &[G::Elem]) -> BTreeSet<G::Elem> {
    normal_closure_with_gens(g, gens).0
}

/// `[A, G]` for a normal subgroup `A` given as an element set.
pub fn commutator_with_group<G: Group>(g: &G, a: &BTreeSet<G::Elem>) -> BTreeSet<G::Elem> {
    let ambient = g.generators();
    let gens: Vec<G::Elem> = a
        .iter()
        .flat_map(|x| ambient.iter().map(move |s| (x, s)))
        .map(|(x, s)| g.comm(x, s))
        .collect();
    normal_closure(g, &gens)
}

/// Lower central series `γ_1 ⊇ γ_2 ⊇ ...` down to the trivial group (or to where it
/// stops descending). `[H, G]` is the normal closure of `[x, s]` over generators `x` of
/// `H` and `s` of `G`.
pub fn lower_central_series<G: FiniteGroup>(g: &G) -> Vec<BTreeSet<G::Elem>> {
    descending_series(g, |x, s| vec![g.comm(x, s)], |_| Vec::new())
}

/// p-central series `λ_1 = G`, `λ_{n+1} = [λ_n, G] λ_n^p`, down to the trivial group.
pub fn p_central_series<G: FiniteGroup>(g: &G, p: u32) -> Vec<BTreeSet<G::Elem>> {
    descending_series(g, |x, s| vec![g.comm(x, s)], |x| vec![g.pow(x, p as i64)])
}

fn descending_series<G: FiniteGroup>(
    g: &G,
    with_gen: impl Fn(&G::Elem, &G::Elem) -> Vec<G::Elem>,
    alone: impl Fn(&G::Elem) -> Vec<G::Elem>,
) -> Vec<BTreeSet<G::Elem>> {
    let ambient = g.generators();
    let (first, mut gens) = closure_with_gens(g, &ambient);
    let mut series = vec![first];
    loop {
        let last = series.last().unwrap();
        if last.len() == 1 {
            break;
        }
        let mut next_gens = Vec::new();
        for x in &gens {
            next_gens.extend(alone(x));
            for s in &ambient {
                next_gens.extend(with_gen(x, s));
            }
        }
        let (next, used) = normal_closure_with_gens(g, &next_gens);
        if next.len() == last.len() {
            break;
        }
        series.push(next);
        gens = used;
    }
    series
}

/// Largest element order in a set.
pub fn exponent<G: Group>(g: &G, set: &BTreeSet<G::Elem>) -> u64 {
    set.iter().map(|x| g.order(x)).max().unwrap_or(1)
}

/// `|C_G(x)|`, counting over the supplied element list.
pub fn centralizer_order<G: Group>(g: &G, x: &G::Elem, all: &[G::Elem]) -> usize {
    all.iter()
        .filter(|y| g.mul(x, y) == g.mul(y, x))
        .count()
}

/// Conjugacy class of `x` by orbit closure under the generators.
pub fn conjugacy_class<G: Group>(g: &G, x: &G::Elem) -> BTreeSet<G::Elem> {
    let gens = g.generators();
    let mut seen = BTreeSet::from([x.clone()]);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(y) = queue.pop_front() {
        for s in &gens {
            let z = g.conj(&y, s);
            if seen.insert(z.clone()) {
                queue.push_back(z);
            }
        }
    }
    seen
}

/// Builds an element-to-index map for a finite group.
pub fn index_map<G: FiniteGroup>(g: &G) -> HashMap<G::Elem, usize> {
    g.elements().into_iter().enumerate().map(|(i, x)| (x, i)).collect()
}

/// Prime factors of `n` in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `Z/n × Z/n` with componentwise addition.
#[derive(Clone, Debug)]
pub struct CyclicSquare {
    pub n: u32,
}

impl Group for CyclicSquare {
    type Elem = (u32, u32);

    fn identity(&self) -> Self::Elem {
        (0, 0)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        ((a.0 + b.0) % self.n, (a.1 + b.1) % self.n)
    }
    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        ((self.n - a.0) % self.n, (self.n - a.1) % self.n)
    }
    fn generators(&self) -> Vec<Self::Elem> {
        vec![(1 % self.n, 0), (0, 1 % self.n)]
    }
    fn generates(&self, gens: &[Self::Elem]) -> bool {
        closure(self, gens).len() as u128 == self.size()
    }
}

impl FiniteGroup for CyclicSquare {
    fn size(&self) -> u128 {
        (self.n as u128).pow(2)
    }
    fn elements(&self) -> Vec<Self::Elem> {
        (0..self.n)
            .flat_map(|a| (0..self.n).map(move |b| (a, b)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_square_basics() {
        let g = CyclicSquare { n: 6 };
        assert_eq!(g.elements().len(), 36);
        assert_eq!(g.order(&(2, 3)), 6);
        assert!(g.generates(&[(1, 0), (1, 1)]));
        assert!(!g.generates(&[(2, 0), (0, 1)]));
        assert_eq!(closure(&g, &[(2, 0)]).len(), 3);
        assert_eq!(lower_central_series(&g).len(), 2);
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(12), vec![2, 3]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(49), vec![7]);
    }
}
