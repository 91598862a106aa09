use super::group::PcGroup;
use super::presentation::Exps;
use crate::gf::inv_mod;
use crate::group::Group;

/// An induced generating sequence of a subgroup of a PC group.
///
/// Basis elements have strictly increasing leading generator indices and leading
/// exponent 1, so membership is decided by sifting and `|H| = p^len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupBasis {
    pub gens: Vec<Exps>,
    pub is_normal: bool,
    pub is_central_elementary: bool,
}

fn leading(x: &[u8]) -> Option<usize> {
    x.iter().position(|&v| v != 0)
}

impl SubgroupBasis {
    pub fn trivial() -> Self {
        SubgroupBasis {
            gens: Vec::new(),
            is_normal: true,
            is_central_elementary: true,
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn order(&self, p: u32) -> u128 {
        (p as u128).pow(self.gens.len() as u32)
    }

    pub fn leading_indices(&self) -> Vec<usize> {
        self.gens.iter().map(|g| leading(g).unwrap()).collect()
    }

    /// Reduces `x` by the basis; the remainder is trivial iff `x` is a member.
    pub fn sift(&self, g: &PcGroup, x: &[u8]) -> Exps {
        let p = g.p() as u8;
        let mut x = x.to_vec();
        let mut k = 0;
        while let Some(f) = leading(&x) {
            while k < self.gens.len() && leading(&self.gens[k]).unwrap() < f {
                k += 1;
            }
            if k == self.gens.len() || leading(&self.gens[k]).unwrap() != f {
                return x;
            }
            let b = g.pow(&self.gens[k], (p - x[f]) as i64);
            x = g.mul(&x, &b);
        }
        x
    }

    pub fn contains(&self, g: &PcGroup, x: &[u8]) -> bool {
        self.sift(g, x).iter().all(|&v| v == 0)
    }

    /// Coordinates of a member with respect to the basis (`x = b_1^{c_1} ... b_k^{c_k}`).
    pub fn coordinates(&self, g: &PcGroup, x: &[u8]) -> Option<Vec<u32>> {
        let mut x = x.to_vec();
        let mut coords = vec![0u32; self.gens.len()];
        for (k, b) in self.gens.iter().enumerate() {
            let f = leading(b).unwrap();
            if let Some(l) = leading(&x) {
                if l < f {
                    return None;
                }
            }
            let c = x[f];
            if c != 0 {
                coords[k] = c as u32;
                x = g.mul(&g.pow(b, -(c as i64)), &x);
            }
        }
        if x.iter().all(|&v| v == 0) {
            Some(coords)
        } else {
            None
        }
    }

    fn insert(&mut self, g: &PcGroup, x: Exps) -> Option<Exps> {
        let r = self.sift(g, &x);
        let f = leading(&r)?;
        let p = g.p();
        let k = inv_mod(r[f] as u32, p);
        let r = g.pow(&r, k as i64);
        let pos = self
            .gens
            .iter()
            .position(|b| leading(b).unwrap() > f)
            .unwrap_or(self.gens.len());
        self.gens.insert(pos, r.clone());
        Some(r)
    }

    fn grow(g: &PcGroup, gens: &[Exps], normal: bool) -> Self {
        let mut basis = SubgroupBasis::trivial();
        let ambient = g.generators();
        let mut queue: Vec<Exps> = gens.to_vec();
        while let Some(x) = queue.pop() {
            if let Some(r) = basis.insert(g, x) {
                queue.push(g.pow(&r, g.p() as i64));
                for b in &basis.gens {
                    if *b != r {
                        queue.push(g.comm(&r, b));
                    }
                }
                if normal {
                    for s in &ambient {
                        queue.push(g.comm(&r, s));
                    }
                }
            }
        }
        basis.is_normal = normal || basis.check_normal(g);
        basis.is_central_elementary = basis.check_central_elementary(g);
        basis
    }

    /// Subgroup generated by `gens`.
    pub fn closure(g: &PcGroup, gens: &[Exps]) -> Self {
        Self::grow(g, gens, false)
    }

    /// Normal closure of `gens` in the whole group.
    pub fn normal_closure(g: &PcGroup, gens: &[Exps]) -> Self {
        Self::grow(g, gens, true)
    }

    /// The subgroup spanned by the listed PC generators, assumed closed (e.g. a weight
    /// range of a weighted presentation).
    pub fn from_generator_range(g: &PcGroup, range: std::ops::Range<usize>) -> Self {
        let mut basis = SubgroupBasis {
            gens: range.map(|i| g.unit(i)).collect(),
            is_normal: false,
            is_central_elementary: false,
        };
        basis.is_normal = basis.check_normal(g);
        basis.is_central_elementary = basis.check_central_elementary(g);
        basis
    }

    fn check_normal(&self, g: &PcGroup) -> bool {
        g.generators().iter().all(|s| {
            self.gens
                .iter()
                .all(|b| self.contains(g, &g.comm(b, s)))
        })
    }

    fn check_central_elementary(&self, g: &PcGroup) -> bool {
        self.gens.iter().all(|b| {
            g.is_identity(&g.pow(b, g.p() as i64))
                && g.generators().iter().all(|s| g.is_identity(&g.comm(b, s)))
        })
    }

    pub fn is_subgroup_of(&self, g: &PcGroup, other: &SubgroupBasis) -> bool {
        self.gens.iter().all(|b| other.contains(g, b))
    }

    /// All members, in coordinate order.
    pub fn elements(&self, g: &PcGroup) -> Vec<Exps> {
        let mut out = vec![g.identity()];
        for b in self.gens.iter().rev() {
            let powers: Vec<Exps> = (0..g.p()).map(|c| g.pow(b, c as i64)).collect();
            let mut next = Vec::with_capacity(out.len() * powers.len());
            for pw in &powers {
                for x in &out {
                    next.push(g.mul(pw, x));
                }
            }
            out = next;
        }
        out
    }
}
