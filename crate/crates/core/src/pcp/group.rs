use std::sync::Arc;

use super::collect::{Collector, FromTheLeft, DEFAULT_BUDGET};
use super::presentation::{exps_to_word, index_to_exps, Exps, PcPresentation, Word};
use super::subgroup::SubgroupBasis;
use crate::error::{Error, Result};
use crate::gf;
use crate::group::{FiniteGroup, Group};

/// Default bound on `p^ngens` for operations that enumerate elements.
pub const DEFAULT_MAX_ORDER: u128 = 10_000_000;

/// Reads `PCFORGE_MAX_ORDER`, falling back to [`DEFAULT_MAX_ORDER`].
pub fn max_order_from_env() -> u128 {
    std::env::var("PCFORGE_MAX_ORDER")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

struct Inner {
    pcp: PcPresentation,
    collector: Box<dyn Collector>,
    budget: u64,
    gen_inverses: Vec<Exps>,
    /// Whether the weight-1 generators form a basis of G/Φ(G).
    frattini_weighted: bool,
}

/// A finite p-group given by a consistent PC presentation, with a collector.
///
/// Cloning is cheap; clones share the presentation.
#[derive(Clone)]
pub struct PcGroup {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for PcGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PcGroup")
            .field("p", &self.p())
            .field("ngens", &self.ngens())
            .finish()
    }
}

/// Signed letter of a free word: generator index and direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(gen: usize) -> Self {
        Letter { gen, inverse: false }
    }
    pub fn neg(gen: usize) -> Self {
        Letter { gen, inverse: true }
    }
}

impl PcGroup {
    pub fn new(pcp: PcPresentation) -> Result<Self> {
        Self::with_collector(pcp, Box::new(FromTheLeft), DEFAULT_BUDGET)
    }

    pub fn with_collector(
        pcp: PcPresentation,
        collector: Box<dyn Collector>,
        budget: u64,
    ) -> Result<Self> {
        let mut inner = Inner {
            pcp,
            collector,
            budget,
            gen_inverses: Vec::new(),
            frattini_weighted: false,
        };
        let m = inner.pcp.ngens();
        let mut invs = Vec::with_capacity(m);
        for i in 0..m {
            let mut e = vec![0u8; m];
            e[i] = 1;
            invs.push(invert_raw(&inner, &e)?);
        }
        inner.gen_inverses = invs;
        let mut g = PcGroup {
            inner: Arc::new(inner),
        };
        let fw = g.compute_frattini_weighted()?;
        Arc::get_mut(&mut g.inner).expect("unique").frattini_weighted = fw;
        Ok(g)
    }

    fn compute_frattini_weighted(&self) -> Result<bool> {
        let m = self.ngens();
        let d = self.pcp().rank();
        let mut gens = Vec::new();
        for i in 0..m {
            gens.push(self.try_pow(&self.unit(i), self.p() as i64)?);
            for j in 0..i {
                gens.push(self.try_comm(&self.unit(i), &self.unit(j))?);
            }
        }
        let phi = SubgroupBasis::normal_closure(self, &gens);
        Ok(phi.len() + d == m)
    }

    pub fn pcp(&self) -> &PcPresentation {
        &self.inner.pcp
    }

    pub fn p(&self) -> u32 {
        self.inner.pcp.p()
    }

    pub fn ngens(&self) -> usize {
        self.inner.pcp.ngens()
    }

    pub fn same_as(&self, other: &PcGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.pcp() == other.pcp()
    }

    pub fn frattini_weighted(&self) -> bool {
        self.inner.frattini_weighted
    }

    pub fn unit(&self, i: usize) -> Exps {
        let mut e = vec![0u8; self.ngens()];
        e[i] = 1;
        e
    }

    /// Multiplies `e` on the right by a normal-form-style letter sequence.
    pub fn collect_into(&self, e: &mut [u8], letters: &[(usize, u8)]) -> Result<()> {
        self.inner
            .collector
            .collect(&self.inner.pcp, e, letters, self.inner.budget)
    }

    /// Normal form of a free word in the PC generators.
    pub fn collect(&self, word: &[Letter]) -> Result<Exps> {
        let m = self.ngens();
        let mut e = vec![0u8; m];
        for l in word {
            if l.gen >= m {
                return Err(Error::BadGenerator(l.gen));
            }
            if l.inverse {
                let w = exps_to_word(&self.inner.gen_inverses[l.gen]);
                self.collect_into(&mut e, &w)?;
            } else {
                self.collect_into(&mut e, &[(l.gen, 1)])?;
            }
        }
        Ok(e)
    }

    pub fn try_mul(&self, a: &[u8], b: &[u8]) -> Result<Exps> {
        let mut e = a.to_vec();
        let w = exps_to_word(b);
        self.collect_into(&mut e, &w)?;
        Ok(e)
    }

    pub fn try_inv(&self, a: &[u8]) -> Result<Exps> {
        invert_raw(&self.inner, a)
    }

    pub fn try_pow(&self, a: &[u8], k: i64) -> Result<Exps> {
        let mut base = if k < 0 { self.try_inv(a)? } else { a.to_vec() };
        let mut k = k.unsigned_abs();
        let mut acc = vec![0u8; self.ngens()];
        while k > 0 {
            if k & 1 == 1 {
                acc = self.try_mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.try_mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn try_comm(&self, a: &[u8], b: &[u8]) -> Result<Exps> {
        let ab = self.try_mul(a, b)?;
        let ba = self.try_mul(b, a)?;
        self.try_mul(&self.try_inv(&ba)?, &ab)
    }

    /// Evaluates a normal word (as letters) from the identity.
    pub fn word_elem(&self, w: &Word) -> Exps {
        let mut e = vec![0u8; self.ngens()];
        self.collect_into(&mut e, w).expect("collection within budget");
        e
    }

    /// Coordinates of `x` on the weight-1 generators.
    pub fn frattini_image(&self, x: &[u8]) -> Vec<u32> {
        let d = self.pcp().rank();
        x[..d].iter().map(|&v| v as u32).collect()
    }

    /// Whether `x` and `y` generate, decided by the rank of their images in G/Φ(G).
    pub fn generates_pair(&self, x: &[u8], y: &[u8]) -> bool {
        self.generates_frattini(&[x.to_vec(), y.to_vec()])
    }

    fn generates_frattini(&self, gens: &[Exps]) -> bool {
        let d = self.pcp().rank();
        let rows: Vec<Vec<u32>> = gens.iter().map(|g| self.frattini_image(g)).collect();
        if d == 0 {
            return true;
        }
        gf::rank(self.p(), &rows) == d
    }

    /// Determinant of the 2×2 Frattini-image matrix (rank-2 groups only).
    pub fn frattini_det(&self, x: &[u8], y: &[u8]) -> Option<u32> {
        if self.pcp().rank() != 2 {
            return None;
        }
        let a = self.frattini_image(x);
        let b = self.frattini_image(y);
        Some(gf::det2(self.p(), [a[0], a[1]], [b[0], b[1]]))
    }

    /// Order of `x`, by repeated p-th powering.
    pub fn elem_order(&self, x: &[u8]) -> u64 {
        let mut y = x.to_vec();
        let mut n = 1u64;
        while y.iter().any(|&v| v != 0) {
            y = self.try_pow(&y, self.p() as i64).expect("collection within budget");
            n *= self.p() as u64;
        }
        n
    }

    pub fn check_enumerable(&self, bound: u128) -> Result<()> {
        let size = self.pcp().order();
        if size > bound {
            return Err(Error::Bound { size, bound });
        }
        Ok(())
    }

    /// All elements in lexicographic exponent order, subject to `bound`.
    pub fn enumerate(&self, bound: u128) -> Result<impl Iterator<Item = Exps> + '_> {
        self.check_enumerable(bound)?;
        let p = self.p();
        let m = self.ngens();
        let n = self.pcp().order() as usize;
        Ok((0..n).map(move |i| index_to_exps(i, p, m)))
    }

    /// Wraps an exponent vector as a checked element.
    pub fn element(&self, exps: Exps) -> Result<GroupElement> {
        if exps.len() != self.ngens() || exps.iter().any(|&v| u32::from(v) >= self.p()) {
            return Err(Error::Invalid("exponent vector does not fit presentation".into()));
        }
        Ok(GroupElement {
            group: self.clone(),
            exps,
        })
    }

    pub fn gen(&self, i: usize) -> GroupElement {
        GroupElement {
            group: self.clone(),
            exps: self.unit(i),
        }
    }

    pub fn one(&self) -> GroupElement {
        GroupElement {
            group: self.clone(),
            exps: vec![0; self.ngens()],
        }
    }
}

fn invert_raw(inner: &Inner, a: &[u8]) -> Result<Exps> {
    let m = a.len();
    let p = inner.pcp.p() as u8;
    let mut z = a.to_vec();
    let mut y = vec![0u8; m];
    for i in 0..m {
        if z[i] != 0 {
            let k = p - z[i];
            y[i] = k;
            inner
                .collector
                .collect(&inner.pcp, &mut z, &[(i, k)], inner.budget)?;
        }
    }
    debug_assert!(z.iter().all(|&v| v == 0));
    Ok(y)
}

impl Group for PcGroup {
    type Elem = Exps;

    fn identity(&self) -> Exps {
        vec![0; self.ngens()]
    }
    fn mul(&self, a: &Exps, b: &Exps) -> Exps {
        self.try_mul(a, b).expect("collection within budget")
    }
    fn inv(&self, a: &Exps) -> Exps {
        self.try_inv(a).expect("collection within budget")
    }
    fn generators(&self) -> Vec<Exps> {
        (0..self.ngens()).map(|i| self.unit(i)).collect()
    }
    fn is_identity(&self, a: &Exps) -> bool {
        a.iter().all(|&v| v == 0)
    }
    fn order(&self, x: &Exps) -> u64 {
        self.elem_order(x)
    }
    fn generates(&self, gens: &[Exps]) -> bool {
        if self.frattini_weighted() {
            self.generates_frattini(gens)
        } else {
            SubgroupBasis::closure(self, gens).len() == self.ngens()
        }
    }
    fn generation_witness(&self, x: &Exps, y: &Exps) -> Option<u32> {
        if self.frattini_weighted() {
            self.frattini_det(x, y)
        } else {
            None
        }
    }
}

impl FiniteGroup for PcGroup {
    fn size(&self) -> u128 {
        self.pcp().order()
    }
    fn elements(&self) -> Vec<Exps> {
        self.enumerate(max_order_from_env())
            .expect("group within enumeration bound")
            .collect()
    }
}

/// An element bound to its presentation; operations check that both sides agree.
#[derive(Clone)]
pub struct GroupElement {
    group: PcGroup,
    exps: Exps,
}

impl std::fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps && self.group.same_as(&other.group)
    }
}

impl Eq for GroupElement {}

impl GroupElement {
    pub fn exps(&self) -> &[u8] {
        &self.exps
    }

    pub fn into_exps(self) -> Exps {
        self.exps
    }

    pub fn group(&self) -> &PcGroup {
        &self.group
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&v| v == 0)
    }

    fn check(&self, other: &GroupElement) -> Result<()> {
        if self.group.same_as(&other.group) {
            Ok(())
        } else {
            Err(Error::MixedPresentations)
        }
    }

    fn wrap(&self, exps: Exps) -> GroupElement {
        GroupElement {
            group: self.group.clone(),
            exps,
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check(other)?;
        Ok(self.wrap(self.group.try_mul(&self.exps, &other.exps)?))
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        Ok(self.wrap(self.group.try_inv(&self.exps)?))
    }

    pub fn power(&self, k: i64) -> Result<GroupElement> {
        Ok(self.wrap(self.group.try_pow(&self.exps, k)?))
    }

    /// `g^-1 x g`.
    pub fn conjugate(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        let gi = self.group.try_inv(&g.exps)?;
        let t = self.group.try_mul(&gi, &self.exps)?;
        Ok(self.wrap(self.group.try_mul(&t, &g.exps)?))
    }

    pub fn commutator(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check(other)?;
        Ok(self.wrap(self.group.try_comm(&self.exps, &other.exps)?))
    }

    pub fn order(&self) -> u64 {
        self.group.elem_order(&self.exps)
    }

    pub fn frattini_image(&self) -> Vec<u32> {
        self.group.frattini_image(&self.exps)
    }

    pub fn generates_with(&self, other: &GroupElement) -> Result<bool> {
        self.check(other)?;
        Ok(self.group.generates_pair(&self.exps, &other.exps))
    }
}
