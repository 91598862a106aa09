//! Finite quotients `N/N_k` of the Nottingham group over `F_p`: normalized series
//! `t + a_2 t^2 + ... + a_k t^k` modulo `t^(k+1)` under composition.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::beauville::defining_images;
use crate::concrete::{pc_from_concrete, PcModel};
use crate::error::{Error, Result};
use crate::group::{closure, exponent, lower_central_series, FiniteGroup, Group};
use crate::par;
use crate::pcp::presentation::{index_to_exps, is_prime};
use crate::pcp::{gamma_series, Exps, PcGroup};
use crate::pquotient::Homomorphism;
use crate::table::TableGroup;

/// `t + Σ a_i t^i mod t^(k+1)`; `coeffs[i]` is `a_(i+2)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncSeries {
    p: u32,
    k: u32,
    coeffs: Vec<u8>,
}

impl TruncSeries {
    pub fn new(p: u32, k: u32, coeffs: Vec<u8>) -> Result<Self> {
        if !is_prime(p) || p > 251 {
            return Err(Error::Invalid(format!("p = {p} is not a supported prime")));
        }
        if k < 1 || coeffs.len() != k as usize - 1 {
            return Err(Error::Invalid(format!(
                "level {k} needs {} coefficients",
                k.saturating_sub(1)
            )));
        }
        if coeffs.iter().any(|&c| c as u32 >= p) {
            return Err(Error::Invalid("coefficient out of range".into()));
        }
        Ok(TruncSeries { p, k, coeffs })
    }

    pub fn identity(p: u32, k: u32) -> Self {
        TruncSeries {
            p,
            k,
            coeffs: vec![0; k as usize - 1],
        }
    }

    /// `t + c t^i`.
    pub fn monomial(p: u32, k: u32, i: u32, c: u32) -> Self {
        let mut f = Self::identity(p, k);
        if (2..=k).contains(&i) {
            f.coeffs[i as usize - 2] = (c % p) as u8;
        }
        f
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    /// `a_i`, with `a_1 = 1`.
    pub fn coeff(&self, i: u32) -> u32 {
        match i {
            1 => 1,
            i if i >= 2 && i <= self.k => self.coeffs[i as usize - 2] as u32,
            _ => 0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Dense coefficients `[0, 1, a_2, .., a_k]`.
    fn poly(&self) -> Vec<u32> {
        (0..=self.k).map(|i| if i == 0 { 0 } else { self.coeff(i) }).collect()
    }

    fn from_poly(p: u32, k: u32, v: &[u32]) -> Self {
        TruncSeries {
            p,
            k,
            coeffs: v[2..=k as usize].iter().map(|&c| (c % p) as u8).collect(),
        }
    }

    /// `f(g(t))`.
    pub fn compose(&self, g: &TruncSeries) -> Result<TruncSeries> {
        if self.p != g.p || self.k != g.k {
            return Err(Error::MixedPresentations);
        }
        Ok(self.compose_unchecked(g))
    }

    fn compose_unchecked(&self, g: &TruncSeries) -> TruncSeries {
        let (p, k) = (self.p, self.k as usize);
        let gp = g.poly();
        let mut acc = gp.clone();
        let mut pw = gp.clone();
        for i in 2..=k {
            // pw = g^i, whose lowest term is t^i.
            let mut next = vec![0u32; k + 1];
            for (a, &x) in pw.iter().enumerate().skip(i - 1) {
                if x == 0 {
                    continue;
                }
                for (b, &y) in gp.iter().enumerate().skip(1) {
                    if a + b > k {
                        break;
                    }
                    next[a + b] = (next[a + b] + x * y) % p;
                }
            }
            pw = next;
            let c = self.coeff(i as u32);
            if c != 0 {
                for (s, &x) in acc.iter_mut().zip(&pw) {
                    *s = (*s + c * x) % p;
                }
            }
        }
        Self::from_poly(p, self.k, &acc)
    }

    /// Series reversion, one coefficient at a time.
    pub fn invert(&self) -> TruncSeries {
        let mut h = Self::identity(self.p, self.k);
        for j in 2..=self.k {
            let c = self.compose_unchecked(&h).coeff(j);
            if c != 0 {
                let idx = j as usize - 2;
                h.coeffs[idx] = ((h.coeffs[idx] as u32 + self.p - c) % self.p) as u8;
            }
        }
        h
    }

    /// Image in the level-`m` quotient.
    pub fn truncate(&self, m: u32) -> Result<TruncSeries> {
        if m < 1 || m > self.k {
            return Err(Error::Invalid(format!("cannot truncate level {} to {m}", self.k)));
        }
        Ok(TruncSeries {
            p: self.p,
            k: m,
            coeffs: self.coeffs[..m as usize - 1].to_vec(),
        })
    }

    /// Whether `f ∈ N_m`, i.e. `a_2 = ... = a_m = 0`.
    pub fn in_level(&self, m: u32) -> bool {
        (2..=m.min(self.k)).all(|i| self.coeff(i) == 0)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t")?;
        for i in 2..=self.k {
            match self.coeff(i) {
                0 => {}
                1 => write!(f, " + t^{i}")?,
                c => write!(f, " + {c}*t^{i}")?,
            }
        }
        write!(f, " (mod t^{}, p={})", self.k + 1, self.p)
    }
}

impl FromStr for TruncSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse {
            line: 0,
            msg: format!("{m} in `{s}`"),
        };
        let (body, tail) = s.split_once('(').ok_or_else(|| bad("missing `(mod ...)`"))?;
        let tail = tail.trim().strip_suffix(')').ok_or_else(|| bad("missing `)`"))?;
        let (modpart, ppart) = tail.split_once(',').ok_or_else(|| bad("missing `, p=`"))?;
        let top: u32 = modpart
            .trim()
            .strip_prefix("mod t^")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| bad("bad modulus"))?;
        let p: u32 = ppart
            .trim()
            .strip_prefix("p=")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| bad("bad prime"))?;
        if top < 2 {
            return Err(bad("modulus must be at least t^2"));
        }
        let k = top - 1;
        let mut coeffs = vec![0u8; k as usize - 1];
        let mut terms = body.split('+').map(str::trim);
        if terms.next() != Some("t") {
            return Err(bad("series must start with `t`"));
        }
        for term in terms {
            let (c, mono) = match term.split_once('*') {
                Some((c, m)) => (c.trim().parse::<u32>().map_err(|_| bad("bad coefficient"))?, m.trim()),
                None => (1, term),
            };
            let i: u32 = mono
                .strip_prefix("t^")
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| bad("bad monomial"))?;
            if i < 2 || i > k || c == 0 || c >= p || coeffs[i as usize - 2] != 0 {
                return Err(bad("term out of range or repeated"));
            }
            coeffs[i as usize - 2] = c as u8;
        }
        TruncSeries::new(p, k, coeffs)
    }
}

/// The finite quotient `N/N_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NottinghamGroup {
    pub p: u32,
    pub k: u32,
}

impl NottinghamGroup {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return Err(Error::Invalid(format!("p = {p} must be an odd prime")));
        }
        if k < 2 {
            return Err(Error::Invalid("level must be at least 2".into()));
        }
        Ok(NottinghamGroup { p, k })
    }

    /// `N_m / N_k`.
    pub fn subgroup_nk(&self, m: u32) -> Result<BTreeSet<TruncSeries>> {
        if m < 1 || m > self.k {
            return Err(Error::Invalid(format!("level {m} outside 1..={}", self.k)));
        }
        Ok(self.elements().into_iter().filter(|f| f.in_level(m)).collect())
    }

    /// Whether `set` (a subgroup) is closed under conjugation by the generators.
    pub fn is_normal(&self, set: &BTreeSet<TruncSeries>) -> bool {
        let gens = self.generators();
        set.iter().all(|x| gens.iter().all(|s| set.contains(&self.conj(x, s))))
    }
}

impl Group for NottinghamGroup {
    type Elem = TruncSeries;

    fn identity(&self) -> TruncSeries {
        TruncSeries::identity(self.p, self.k)
    }

    fn mul(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        a.compose_unchecked(b)
    }

    fn inv(&self, a: &TruncSeries) -> TruncSeries {
        a.invert()
    }

    /// `t + t^2` and `t + t^3`.
    fn generators(&self) -> Vec<TruncSeries> {
        let mut g = vec![TruncSeries::monomial(self.p, self.k, 2, 1)];
        if self.k >= 3 {
            g.push(TruncSeries::monomial(self.p, self.k, 3, 1));
        }
        g
    }

    fn generates(&self, gens: &[TruncSeries]) -> bool {
        closure(self, gens).len() as u128 == self.size()
    }
}

impl FiniteGroup for NottinghamGroup {
    fn size(&self) -> u128 {
        (self.p as u128).pow(self.k - 1)
    }

    fn elements(&self) -> Vec<TruncSeries> {
        let m = self.k as usize - 1;
        (0..self.size() as usize)
            .map(|i| TruncSeries {
                p: self.p,
                k: self.k,
                coeffs: index_to_exps(i, self.p, m),
            })
            .collect()
    }
}

/// `r(i) = i + 1 + ⌊(i - 2)/(p - 1)⌋`, for `i ≥ 2`; `r(1) = 1`.
pub fn lcs_level(p: u32, i: u32) -> u32 {
    if i <= 1 {
        1
    } else {
        i + 1 + (i - 2) / (p - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcsRow {
    pub i: u32,
    pub r: u32,
    pub gamma_order: u128,
    /// `|N_r(i) / N_k|`, or 1 when `r(i) ≥ k`.
    pub expected_order: u128,
    pub equal: bool,
    /// `r(i) < k`: the comparison separates `N_r(i)` from `N_(r(i)+1)`.
    pub with_slack: bool,
}

/// `γ_i(N/N_k)` against `N_(r(i)) N_k / N_k`.
pub fn lcs_check(p: u32, k: u32) -> Result<Vec<LcsRow>> {
    let g = NottinghamGroup::new(p, k)?;
    let lcs = lower_central_series(&g);
    let mut rows = Vec::new();
    for (idx, gamma) in lcs.iter().enumerate() {
        let i = idx as u32 + 1;
        let r = lcs_level(p, i);
        let expected: BTreeSet<TruncSeries> = if r >= k {
            BTreeSet::from([g.identity()])
        } else {
            g.subgroup_nk(r)?
        };
        rows.push(LcsRow {
            i,
            r,
            gamma_order: gamma.len() as u128,
            expected_order: expected.len() as u128,
            equal: *gamma == expected,
            with_slack: r < k,
        });
        if gamma.len() == 1 {
            break;
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerCheck {
    pub m: u32,
    /// `mp + r`, `r = m mod p`.
    pub target: u32,
    /// `target < k`, so the quotient can tell `N_target` from the next term.
    pub observable: bool,
    pub holds: bool,
}

/// `<f^p : f ∈ N_m>` against `N_(mp+r)` inside `N/N_k`.
pub fn power_subgroup_check(p: u32, k: u32, m: u32) -> Result<PowerCheck> {
    let g = NottinghamGroup::new(p, k)?;
    let nm = g.subgroup_nk(m)?;
    let powers: Vec<TruncSeries> = nm.iter().map(|f| g.pow(f, p as i64)).collect::<BTreeSet<_>>().into_iter().collect();
    let generated = closure(&g, &powers);
    let target = m * p + m % p;
    let expected = if target >= k {
        BTreeSet::from([g.identity()])
    } else {
        g.subgroup_nk(target)?
    };
    Ok(PowerCheck {
        m,
        target,
        observable: target < k,
        holds: generated == expected,
    })
}

/// Exponent of `γ_2(N/N_k)`.
pub fn exp_gamma2(p: u32, k: u32) -> Result<u64> {
    let g = NottinghamGroup::new(p, k)?;
    let lcs = lower_central_series(&g);
    Ok(lcs.get(1).map_or(1, |s| exponent(&g, s)))
}

/// `z_m = p^m + ... + p + 2` for `m = 1..=max_m`.
pub fn excluded_levels(p: u32, max_m: u32) -> Vec<u64> {
    (1..=max_m)
        .map(|m| (1..=m).map(|e| (p as u64).pow(e)).sum::<u64>() + 2)
        .collect()
}

/// Weighted PC presentation of `N/N_k` on `t + t^2`, `t + t^3`.
pub fn to_pc(g: &NottinghamGroup) -> Result<PcModel<NottinghamGroup>> {
    pc_from_concrete(g, g.p, &g.generators())
}

/// Exponent of `γ_2` of a PC group, by enumeration of the subgroup.
pub fn pc_exp_gamma2(g: &PcGroup) -> u64 {
    let series = gamma_series(g);
    match series.get(1) {
        Some(b) => b.elements(g).iter().map(|x| g.order(x)).max().unwrap_or(1),
        None => 1,
    }
}

#[derive(Clone, Debug)]
pub enum IsoOutcome {
    /// Images of the defining generators of `G1`, and the verified isomorphism.
    Isomorphic {
        images: Vec<Exps>,
        hom: Homomorphism<PcGroup>,
    },
    /// Separated by an invariant, named with both values.
    Distinguished {
        invariant: String,
        left: u128,
        right: u128,
    },
    /// No generating pair of `G2` satisfies the relations of `G1`.
    Absent { candidates: usize },
}

impl IsoOutcome {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic { .. })
    }
}

/// Decides `G1 ≅ G2` for 2-generator groups: order and `exp γ_2` first, then a search
/// over images `(y_1, y_2)` of the defining generators of `G1`.
pub fn iso_search(g1: &PcGroup, g2: &PcGroup, bound: u128) -> Result<IsoOutcome> {
    if g1.size() != g2.size() {
        return Ok(IsoOutcome::Distinguished {
            invariant: "order".into(),
            left: g1.size(),
            right: g2.size(),
        });
    }
    g1.check_enumerable(bound)?;
    let (e1, e2) = (pc_exp_gamma2(g1), pc_exp_gamma2(g2));
    if e1 != e2 {
        return Ok(IsoOutcome::Distinguished {
            invariant: "exp gamma_2".into(),
            left: e1 as u128,
            right: e2 as u128,
        });
    }
    let src_gens = defining_images(g1)?;
    if src_gens.len() != 2 {
        return Err(Error::Invalid("iso_search needs two defining generators".into()));
    }
    let t = TableGroup::from_pc(g2, bound)?;
    let n = t.len();
    let o1 = g1.order(&src_gens[0]);
    let o2 = g1.order(&src_gens[1]);
    let o12 = g1.order(&g1.mul(&src_gens[0], &src_gens[1]));
    let orders: Vec<u64> = par::map_range(n, |x| t.elem_order(x as u32));
    let firsts: Vec<u32> = (0..n as u32).filter(|&x| orders[x as usize] == o1).collect();
    let seconds: Vec<u32> = (0..n as u32).filter(|&x| orders[x as usize] == o2).collect();
    let found = par::find_first(firsts.len(), |ix| {
        let y1 = firsts[ix];
        seconds.iter().find_map(|&y2| {
            if !t.generates_pair(y1, y2) || orders[t.m(y1, y2) as usize] != o12 {
                return None;
            }
            Homomorphism::from_defining_images(g1, &src_gens, &t, &[y1, y2])
                .ok()
                .map(|h| h.images().to_vec())
        })
    });
    match found {
        Some((_, table_images)) => {
            let (p, m) = (g2.p(), g2.ngens());
            let images: Vec<Exps> = table_images
                .iter()
                .map(|&i| index_to_exps(i as usize, p, m))
                .collect();
            let hom = Homomorphism::from_pc_images(g1, g2, images)?;
            if !hom.is_surjective() {
                return Err(Error::Invalid("isomorphism candidate is not surjective".into()));
            }
            let defining = src_gens.iter().map(|x| hom.apply(x)).collect();
            Ok(IsoOutcome::Isomorphic {
                images: defining,
                hom,
            })
        }
        None => Ok(IsoOutcome::Absent {
            candidates: firsts.len() * seconds.len(),
        }),
    }
}
