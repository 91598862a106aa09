//! The maximal-class groups `P = <s> ⋉ A`, with `A = Z^(p-1) / L` where `L` is the row
//! lattice of `(Θ - I)^(n-1)` and `Θ` the companion matrix of `x^(p-1) + ... + x + 1`;
//! `s` acts on row vectors by `a ↦ aΘ`.

use std::collections::BTreeSet;

use crate::beauville::{beauville_check, paper_structure_p3, BeauvilleCertificate};
use crate::concrete::{pc_from_concrete, PcModel};
use crate::error::{Error, Result};
use crate::gf;
use crate::group::{lower_central_series, FiniteGroup, Group};
use crate::pcp::presentation::is_prime;
use crate::pcp::{Exps, PcGroup};
use crate::pquotient::{
    central_quotient, kernel_meet_layer, p_quotient, FpPresentation, Homomorphism, Stage,
};

/// `(σ, a)`: the element `s^σ a`.
pub type MaxElem = (u32, Vec<i64>);

#[derive(Clone, Debug)]
pub struct MaxClassGroup {
    p: u32,
    n: u32,
    d: usize,
    /// `Θ^k` for `k = 0..p`.
    theta_pows: Vec<Vec<Vec<i128>>>,
    /// Hermite normal form of `L`: upper triangular, positive diagonal.
    hnf: Vec<Vec<i128>>,
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn identity(d: usize) -> Vec<Vec<i128>> {
    (0..d)
        .map(|i| (0..d).map(|j| i128::from(i == j)).collect())
        .collect()
}

/// Row-style Hermite normal form of a nonsingular square integer matrix.
pub fn hermite_normal_form(mut m: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let d = m.len();
    for col in 0..d {
        for r in col + 1..d {
            while m[r][col] != 0 {
                let q = m[col][col] / m[r][col];
                for c in 0..d {
                    m[col][c] -= q * m[r][c];
                }
                m.swap(col, r);
            }
        }
        if m[col][col] < 0 {
            for c in 0..d {
                m[col][c] = -m[col][c];
            }
        }
        for r in 0..col {
            let q = m[r][col].div_euclid(m[col][col]);
            for c in 0..d {
                m[r][c] -= q * m[col][c];
            }
        }
    }
    m
}

/// The companion matrix of `x^(p-1) + ... + 1` acting on row vectors: `e_i Θ = e_(i+1)`,
/// `e_(p-2) Θ = -(e_0 + ... + e_(p-2))`.
pub fn cyclotomic_companion(p: u32) -> Vec<Vec<i128>> {
    let d = p as usize - 1;
    let mut t = vec![vec![0i128; d]; d];
    for i in 0..d - 1 {
        t[i][i + 1] = 1;
    }
    for c in 0..d {
        t[d - 1][c] = -1;
    }
    t
}

pub fn maximal_class_group(p: u32, n: u32) -> Result<MaxClassGroup> {
    if !is_prime(p) || p == 2 {
        return Err(Error::Invalid(format!("p = {p} must be an odd prime")));
    }
    if n < 3 {
        return Err(Error::Invalid(format!("n = {n} must be at least 3")));
    }
    let d = p as usize - 1;
    let theta = cyclotomic_companion(p);
    let mut theta_pows = vec![identity(d)];
    for k in 1..p as usize {
        theta_pows.push(mat_mul(&theta_pows[k - 1], &theta));
    }
    if mat_mul(&theta_pows[p as usize - 1], &theta) != identity(d) {
        return Err(Error::Invalid("companion matrix does not have order p".into()));
    }
    let mut shifted = theta.clone();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] -= 1;
    }
    let mut lattice = identity(d);
    for _ in 0..n - 1 {
        lattice = mat_mul(&lattice, &shifted);
    }
    let hnf = hermite_normal_form(lattice);
    let g = MaxClassGroup {
        p,
        n,
        d,
        theta_pows,
        hnf,
    };
    let a_order: i128 = (0..d).map(|i| g.hnf[i][i]).product();
    if a_order != (p as i128).pow(n - 1) {
        return Err(Error::Invalid(format!("|A| = {a_order}, expected p^{}", n - 1)));
    }
    Ok(g)
}

impl MaxClassGroup {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn hnf(&self) -> &[Vec<i128>] {
        &self.hnf
    }

    /// Canonical residue of a vector modulo the lattice.
    pub fn reduce(&self, v: &[i128]) -> Vec<i64> {
        let mut a = v.to_vec();
        for i in 0..self.d {
            let q = a[i].div_euclid(self.hnf[i][i]);
            if q != 0 {
                for c in i..self.d {
                    a[c] -= q * self.hnf[i][c];
                }
            }
        }
        a.into_iter().map(|x| x as i64).collect()
    }

    fn act(&self, a: &[i64], k: u32) -> Vec<i128> {
        let t = &self.theta_pows[(k % self.p) as usize];
        (0..self.d)
            .map(|j| (0..self.d).map(|i| a[i] as i128 * t[i][j]).sum())
            .collect()
    }

    pub fn s(&self) -> MaxElem {
        (1, vec![0; self.d])
    }

    /// The first standard basis vector of `A`.
    pub fn s1(&self) -> MaxElem {
        let mut e = vec![0i128; self.d];
        e[0] = 1;
        (0, self.reduce(&e))
    }

    pub fn element(&self, sigma: u32, a: &[i64]) -> MaxElem {
        let v: Vec<i128> = a.iter().map(|&x| x as i128).collect();
        (sigma % self.p, self.reduce(&v))
    }

    pub fn in_p1(&self, x: &MaxElem) -> bool {
        x.0 == 0
    }

    /// `Σ_k Θ^k` maps every row into the lattice.
    pub fn annihilation_identity(&self) -> bool {
        (0..self.d).all(|i| {
            let mut e = vec![0i64; self.d];
            e[i] = 1;
            let mut sum = vec![0i128; self.d];
            for k in 0..self.p {
                for (s, v) in sum.iter_mut().zip(self.act(&e, k)) {
                    *s += v;
                }
            }
            self.reduce(&sum).iter().all(|&x| x == 0)
        })
    }

    /// `P_1 = A`, then `P_i = γ_i(P)` for `i ≥ 2`, ending with the trivial group.
    pub fn p_series(&self) -> Vec<BTreeSet<MaxElem>> {
        let lcs = lower_central_series(self);
        let a: BTreeSet<MaxElem> = self.elements().into_iter().filter(|x| x.0 == 0).collect();
        let mut out = vec![a];
        out.extend(lcs.into_iter().skip(1));
        out
    }
}

impl Group for MaxClassGroup {
    type Elem = MaxElem;

    fn identity(&self) -> MaxElem {
        (0, vec![0; self.d])
    }

    fn mul(&self, x: &MaxElem, y: &MaxElem) -> MaxElem {
        let mut v = self.act(&x.1, y.0);
        for (a, &b) in v.iter_mut().zip(&y.1) {
            *a += b as i128;
        }
        ((x.0 + y.0) % self.p, self.reduce(&v))
    }

    fn inv(&self, x: &MaxElem) -> MaxElem {
        let k = (self.p - x.0) % self.p;
        let v: Vec<i128> = self.act(&x.1, k).into_iter().map(|c| -c).collect();
        (k, self.reduce(&v))
    }

    fn generators(&self) -> Vec<MaxElem> {
        vec![self.s(), self.s1()]
    }

    fn generates(&self, gens: &[MaxElem]) -> bool {
        crate::group::closure(self, gens).len() as u128 == self.size()
    }
}

impl FiniteGroup for MaxClassGroup {
    fn size(&self) -> u128 {
        (self.p as u128).pow(self.n)
    }

    /// Lexicographic in `(σ, a)` over the residue box.
    fn elements(&self) -> Vec<MaxElem> {
        let diag: Vec<i64> = (0..self.d).map(|i| self.hnf[i][i] as i64).collect();
        let mut vecs: Vec<Vec<i64>> = vec![Vec::new()];
        for &m in &diag {
            vecs = vecs
                .into_iter()
                .flat_map(|v| {
                    (0..m).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        (0..self.p)
            .flat_map(|s| vecs.iter().map(move |v| (s, v.clone())))
            .collect()
    }
}

/// `⌈(n - i) / (p - 1)⌉`.
pub fn expected_exponent_log(p: u32, n: u32, i: u32) -> u32 {
    (n - i).div_ceil(p - 1)
}

/// Per `i`: `(i, expected log_p exp P_i, observed log_p exp P_i, every element of
/// P_i \ P_(i+1) attains it)`.
pub fn exponent_filtration(g: &MaxClassGroup) -> Vec<(u32, u32, u32, bool)> {
    let series = g.p_series();
    let p = g.p as u64;
    let log = |o: u64| {
        let mut k = 0;
        let mut x = o;
        while x > 1 {
            x /= p;
            k += 1;
        }
        k
    };
    let mut out = Vec::new();
    for i in 0..series.len() - 1 {
        let (cur, next) = (&series[i], &series[i + 1]);
        let orders: Vec<u64> = crate::par::map(&cur.iter().collect::<Vec<_>>(), |x| g.order(x));
        let observed = orders.iter().copied().max().map_or(0, log);
        let attained = cur
            .iter()
            .zip(&orders)
            .filter(|(x, _)| !next.contains(*x))
            .all(|(_, &o)| log(o) == observed);
        let i1 = i as u32 + 1;
        out.push((i1, expected_exponent_log(g.p, g.n, i1), observed, attained));
    }
    out
}

/// Whether every element outside `P_1` has order `p`.
pub fn outside_p1_order_p(g: &MaxClassGroup) -> bool {
    let outside: Vec<MaxElem> = g.elements().into_iter().filter(|x| x.0 != 0).collect();
    crate::par::map(&outside, |x| g.order(x)).iter().all(|&o| o == g.p as u64)
}

/// `ψ: u ↦ s^-1, v ↦ s s_1` from a free-product stage.
pub fn psi(stage: &Stage, g: &MaxClassGroup) -> Result<Homomorphism<MaxClassGroup>> {
    psi_with(stage, g, &g.s(), &g.s1())
}

pub fn psi_with(
    stage: &Stage,
    g: &MaxClassGroup,
    s: &MaxElem,
    s1: &MaxElem,
) -> Result<Homomorphism<MaxClassGroup>> {
    let src = stage.group()?;
    Homomorphism::from_defining_images(&src, &stage.images, g, &[g.inv(s), g.mul(s, s1)])
}

/// A weighted PC presentation of `P` on `s`, `s_1`, verified to be isomorphic.
pub fn to_pc(g: &MaxClassGroup) -> Result<PcModel<MaxClassGroup>> {
    pc_from_concrete(g, g.p, &[g.s(), g.s1()])
}

/// One intermediate quotient `F/N` of the refinement series.
#[derive(Clone, Debug)]
pub struct RefinementTerm {
    /// `N/λ_n` in coordinates on the top layer of the stage.
    pub n_basis: Vec<Vec<u32>>,
    pub quotient: Stage,
    pub z: Exps,
    pub t: Exps,
    pub certificate: BeauvilleCertificate<Exps>,
}

#[derive(Clone, Debug)]
pub struct Refinement {
    pub n: u32,
    pub layer_rank: usize,
    /// `(Ker ψ ∩ λ_(n-1)) / λ_n` in layer coordinates.
    pub kernel_basis: Vec<Vec<u32>>,
    /// Every subspace of the kernel, smallest first.
    pub terms: Vec<RefinementTerm>,
    /// Indices into `terms` of a maximal chain from `λ_n` to the kernel.
    pub chain: Vec<usize>,
    /// `F/λ_(n-1)` and its structure, the term above the kernel.
    pub top: RefinementTerm,
}

fn layer_coords(g: &PcGroup, x: &[u8], top: u32) -> Vec<u32> {
    let r = g.pcp().weight_range(top);
    x[r].iter().map(|&v| v as u32).collect()
}

fn certify_p3(stage: &Stage, bound: u128) -> Result<(Exps, Exps, BeauvilleCertificate<Exps>)> {
    let g = stage.group()?;
    let (u, v) = (&stage.images[0], &stage.images[1]);
    let (((a, b), (c, d)), z, t) = paper_structure_p3(&g, u, v, bound)?;
    Ok((z, t, beauville_check(&g, (&a, &b), (&c, &d))))
}

/// The quotients `F/N` for every `N` with `λ_n ≤ N ≤ Ker ψ ∩ λ_(n-1)`, `F = C_3 * C_3`,
/// each with the structure `{u, v}, {(u z)^-1, v t}`.
pub fn refinement_series(p: u32, n: u32, bound: u128) -> Result<Refinement> {
    if p != 3 || n < 5 {
        return Err(Error::Invalid("refinement series needs p = 3 and n >= 5".into()));
    }
    let stage = p_quotient(&FpPresentation::free_product(p), p, n)?;
    if stage.n != n {
        return Err(Error::Invalid(format!("the tower stops at n = {}", stage.n)));
    }
    let g = stage.group()?;
    let mc = maximal_class_group(p, n)?;
    let h = psi(&stage, &mc)?;
    let top = n - 1;
    let layer_rank = g.pcp().weight_range(top).len();
    let kernel = kernel_meet_layer(&h, n)?;
    let kernel_basis: Vec<Vec<u32>> = kernel.gens.iter().map(|x| layer_coords(&g, x, top)).collect();
    if kernel_basis.len() + 1 != layer_rank {
        return Err(Error::NotFound(format!(
            "Ker ψ ∩ λ_{top} has rank {} in a layer of rank {layer_rank}",
            kernel_basis.len()
        )));
    }
    let kd = kernel_basis.len();
    let mut subspaces: Vec<Vec<Vec<u32>>> = Vec::new();
    for sub in gf::all_subspaces(p, kd) {
        // Coordinates relative to the kernel basis, mapped to layer coordinates.
        let rows = sub
            .iter()
            .map(|c| {
                (0..layer_rank)
                    .map(|j| (0..kd).map(|i| c[i] * kernel_basis[i][j]).sum::<u32>() % p)
                    .collect()
            })
            .collect();
        subspaces.push(rows);
    }
    subspaces.sort_by_key(|s| s.len());
    let terms: Vec<RefinementTerm> = subspaces
        .into_iter()
        .map(|nb| {
            let quotient = central_quotient(&stage, top, &nb)?;
            let (z, t, certificate) = certify_p3(&quotient, bound)?;
            Ok(RefinementTerm {
                n_basis: nb,
                quotient,
                z,
                t,
                certificate,
            })
        })
        .collect::<Result<_>>()?;
    // Greedy maximal chain: each step adds one dimension and contains the previous term.
    let mut chain = vec![0usize];
    for dim in 1..=kd {
        let prev = &terms[*chain.last().unwrap()].n_basis;
        let next = terms
            .iter()
            .position(|t| t.n_basis.len() == dim && prev.iter().all(|v| gf::rank(p, &[t.n_basis.clone(), vec![v.clone()]].concat()) == dim))
            .ok_or_else(|| Error::NotFound("no chain through the kernel".into()))?;
        chain.push(next);
    }
    let prev = p_quotient(&FpPresentation::free_product(p), p, top)?;
    let (z, t, certificate) = certify_p3(&prev, bound)?;
    let top = RefinementTerm {
        n_basis: gf::identity(layer_rank),
        quotient: prev,
        z,
        t,
        certificate,
    };
    Ok(Refinement {
        n,
        layer_rank,
        kernel_basis,
        terms,
        chain,
        top,
    })
}
