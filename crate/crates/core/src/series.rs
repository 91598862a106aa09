//! Power and filtration identities checked on concrete groups: the Hall–Petrescu
//! congruences, independence and distinctness of `p^(n-2)`-th powers in free-group
//! stages, and Easterfield's bound on `exp Ω_i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf;
use crate::group::Group;
use crate::par;
use crate::pcp::presentation::index_to_exps;
use crate::pcp::{gamma_series, Exps, PcGroup};
use crate::table::TableGroup;

/// Which pairs a congruence check visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled { pairs: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceResult {
    /// Levels `n` checked (`3 ≤ n ≤ class + 1`).
    pub levels: Vec<u32>,
    pub pairs: usize,
    /// First failure as `(n, x, y)`.
    pub counterexample: Option<(u32, Exps, Exps)>,
}

impl CongruenceResult {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn random_exps(rng: &mut ChaCha8Rng, p: u32, m: usize, skip: usize) -> Exps {
    (0..m)
        .map(|i| if i < skip { 0 } else { rng.gen_range(0..p) as u8 })
        .collect()
}

/// Pairs `(x, y)`; with `coset` the second entry ranges over `λ_2(G)` only.
fn pairs_for(g: &PcGroup, coverage: Coverage, coset: bool, bound: u128) -> Result<Vec<(Exps, Exps)>> {
    let d = if coset { g.pcp().weight_range(2).start } else { 0 };
    match coverage {
        Coverage::Exhaustive => {
            let all: Vec<Exps> = g.enumerate(bound)?.collect();
            let second: Vec<&Exps> = all.iter().filter(|e| e[..d].iter().all(|&v| v == 0)).collect();
            Ok(all
                .iter()
                .flat_map(|x| second.iter().map(move |y| (x.clone(), (*y).clone())))
                .collect())
        }
        Coverage::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (p, m) = (g.p(), g.ngens());
            Ok((0..pairs)
                .map(|_| (random_exps(&mut rng, p, m, 0), random_exps(&mut rng, p, m, d)))
                .collect())
        }
    }
}

/// `(xy)^(p^(n-2)) ≡ x^(p^(n-2)) y^(p^(n-2)) mod λ_n(G)` for every level `n ≥ 3` of `G`.
pub fn hall_petrescu(g: &PcGroup, coverage: Coverage, bound: u128) -> Result<CongruenceResult> {
    congruence(g, coverage, false, bound)
}

/// For `y ∈ λ_2(G)`: `(xy)^(p^(n-2)) ≡ x^(p^(n-2)) mod λ_n(G)`.
pub fn coset_power(g: &PcGroup, coverage: Coverage, bound: u128) -> Result<CongruenceResult> {
    congruence(g, coverage, true, bound)
}

fn congruence(g: &PcGroup, coverage: Coverage, coset: bool, bound: u128) -> Result<CongruenceResult> {
    let p = g.p() as i64;
    let class = g.pcp().class();
    let levels: Vec<u32> = (3..=class + 1).collect();
    let pairs = pairs_for(g, coverage, coset, bound)?;
    let mut counterexample = None;
    for &n in &levels {
        let s = g.pcp().weight_range(n).start;
        let q = p.pow(n - 2);
        let bad = par::find_first(pairs.len(), |i| {
            let (x, y) = &pairs[i];
            let lhs = g.pow(&g.mul(x, y), q);
            let rhs = if coset {
                g.pow(x, q)
            } else {
                g.mul(&g.pow(x, q), &g.pow(y, q))
            };
            let diff = g.mul(&lhs, &g.inv(&rhs));
            diff[..s].iter().any(|&v| v != 0).then_some(())
        });
        if let Some((i, ())) = bad {
            counterexample = Some((n, pairs[i].0.clone(), pairs[i].1.clone()));
            break;
        }
    }
    Ok(CongruenceResult {
        levels,
        pairs: pairs.len(),
        counterexample,
    })
}

fn table_pow(t: &TableGroup, x: u32, k: u64) -> u32 {
    let mut acc = t.identity();
    for _ in 0..k {
        acc = t.m(acc, x);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerLayerReport {
    pub n: u32,
    /// Coordinates of `x^(p^(n-2))`, `y^(p^(n-2))` on `λ_(n-1)/λ_n`.
    pub x_coords: Vec<u32>,
    pub y_coords: Vec<u32>,
    pub independent: bool,
    /// For each maximal subgroup `M` (a line of `G/Φ(G)`), `|M^(p^(n-2))|` modulo `λ_n`.
    pub power_subgroup_orders: Vec<u128>,
    pub pairwise_distinct: bool,
    /// Every element of `M \ Φ(G)` has order `p^(n-1)`.
    pub orders_outside_phi: bool,
}

/// Power structure of a free-group stage `F/λ_n(F)`, read from its top layer.
pub fn power_layer_report(g: &PcGroup, n: u32, bound: u128) -> Result<PowerLayerReport> {
    let pcp = g.pcp();
    if pcp.rank() != 2 || n < 2 || pcp.class() + 1 != n {
        return Err(Error::Invalid(format!(
            "expected a 2-generator stage of class {}",
            n.saturating_sub(1)
        )));
    }
    let p = g.p();
    let q = (p as i64).pow(n - 2);
    let top = pcp.weight_range(n - 1);
    let coords = |e: &[u8]| -> Vec<u32> { e[top.clone()].iter().map(|&v| v as u32).collect() };
    let (x, y) = (g.unit(0), g.unit(1));
    let xc = coords(&g.pow(&x, q));
    let yc = coords(&g.pow(&y, q));
    let independent = gf::rank(p, &[xc.clone(), yc.clone()]) == 2;
    let t = TableGroup::from_pc(g, bound)?;
    let fr = t.frattini().expect("weighted stage");
    let lines: Vec<Vec<u32>> = (0..p).map(|i| vec![1, i]).chain([vec![0, 1]]).collect();
    let mut subspaces = Vec::new();
    let mut orders_ok = true;
    for line in &lines {
        // M = elements whose Frattini image is a multiple of `line`.
        let members: Vec<u32> = (0..t.len() as u32)
            .filter(|&e| {
                let c = &fr.coords[e as usize];
                gf::rank(p, &[c.clone(), line.clone()]) <= 1
            })
            .collect();
        let outside: Vec<u32> = members
            .iter()
            .copied()
            .filter(|&e| fr.coords[e as usize].iter().any(|&v| v != 0))
            .collect();
        orders_ok &= par::all_range(outside.len(), |i| {
            t.elem_order(outside[i]) == (p as u64).pow(n - 1)
        });
        let rows: Vec<Vec<u32>> = members
            .iter()
            .map(|&e| coords(&index_to_exps(table_pow(&t, e, q as u64) as usize, p, g.ngens())))
            .collect();
        let basis = gf::Echelon::from_rows(p, top.len(), &rows, gf::PivotOrder::Lowest);
        subspaces.push(basis);
    }
    let power_subgroup_orders = subspaces
        .iter()
        .map(|b| (p as u128).pow(b.rank() as u32))
        .collect();
    let mut pairwise_distinct = true;
    for i in 0..subspaces.len() {
        for j in i + 1..subspaces.len() {
            let (a, b) = (&subspaces[i], &subspaces[j]);
            let same = a.rank() == b.rank() && a.rows.iter().all(|r| b.contains(r));
            pairwise_distinct &= !same;
        }
    }
    Ok(PowerLayerReport {
        n,
        x_coords: xc,
        y_coords: yc,
        independent,
        power_subgroup_orders,
        pairwise_distinct,
        orders_outside_phi: orders_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EasterfieldRow {
    pub i: u32,
    pub omega_order: u128,
    /// `log_p exp Ω_i(G)`.
    pub exp_log: u32,
    /// `i + k - 1`.
    pub bound_log: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EasterfieldReport {
    pub class: u32,
    /// Least `k` with `γ_(k(p-1)+1)(G) = 1`.
    pub k: u32,
    /// Rows for every `i` with `Ω_i(G)` proper.
    pub rows: Vec<EasterfieldRow>,
}

impl EasterfieldReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.exp_log <= r.bound_log)
    }
}

fn log_p(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

/// `Ω_i(G)` for all `i` by brute force: the closure of the elements of order dividing
/// `p^i`.
pub fn easterfield(g: &PcGroup, bound: u128) -> Result<EasterfieldReport> {
    let t = TableGroup::from_pc(g, bound)?;
    let p = g.p() as u64;
    let class = gamma_series(g).len() as u32 - 1;
    let k = class.div_ceil(p as u32 - 1).max(1);
    let orders: Vec<u64> = par::map_range(t.len(), |x| t.elem_order(x as u32));
    let mut rows = Vec::new();
    for i in 1.. {
        let q = p.pow(i);
        let gens: Vec<u32> = (0..t.len() as u32).filter(|&x| q % orders[x as usize] == 0).collect();
        let size = t.closure_size(&gens) as u128;
        if size == t.len() as u128 {
            break;
        }
        // Exponent of Ω_i: largest element order inside the closure.
        let members = closure_members(&t, &gens);
        let exp = members.iter().map(|&x| orders[x as usize]).max().unwrap_or(1);
        rows.push(EasterfieldRow {
            i,
            omega_order: size,
            exp_log: log_p(exp, p),
            bound_log: i + k - 1,
        });
    }
    Ok(EasterfieldReport { class, k, rows })
}

fn closure_members(t: &TableGroup, gens: &[u32]) -> Vec<u32> {
    let mut seen = vec![false; t.len()];
    let id = t.identity();
    seen[id as usize] = true;
    let mut stack = vec![id];
    let mut out = vec![id];
    // Generators reduced greedily so the search multiplies by few elements.
    let mut used: Vec<u32> = Vec::new();
    for &s in gens {
        if seen[s as usize] {
            continue;
        }
        used.push(s);
        stack.extend(out.iter().copied());
        while let Some(a) = stack.pop() {
            for &u in &used {
                let b = t.m(a, u);
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    out.push(b);
                    stack.push(b);
                }
            }
        }
    }
    out
}
