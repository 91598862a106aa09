//! Acceptance suite: one PASS/FAIL line per criterion. Values derived by the crate are
//! recomputed here with the brute-force oracles in `common`.
//!
//! Runs without the libtest harness so the lines always reach stdout.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcforge::beauville::{
    beauville_check, defining_images, paper_structure_p3, paper_structure_p_ge_5, parse_certificate,
    reverify_certificate, search_pc,
};
use pcforge::checks::{expand, group_h, Checker, Family, Status};
use pcforge::group::{CyclicSquare, FiniteGroup, Group};
use pcforge::maxclass::{self, maximal_class_group};
use pcforge::nottingham::{self, IsoOutcome, NottinghamGroup, TruncSeries};
use pcforge::pcp::{format_presentation, is_consistent, lambda_series, parse_presentation, Exps, PcGroup};
use pcforge::pquotient::parse_tower;
use pcforge::series::{coset_power, easterfield, hall_petrescu, power_layer_report, Coverage};
use pcforge::table::TableGroup;
use pcforge::{beauville::exhaustive_beauville_search, Result};

use common::*;
use Family::{Free, FreeProduct};

const BOUND: u128 = 10_000_000;
const SEED: u64 = 20_240_101;

struct Ctx {
    checker: Checker,
}

impl Ctx {
    fn stage_group(&self, fam: Family, p: u32, n: u32) -> Result<(PcGroup, Exps, Exps)> {
        let s = self.checker.stage(fam, p, n)?;
        Ok((s.group()?, s.images[0].clone(), s.images[1].clone()))
    }
}

type Outcome = Result<(bool, String)>;
type Criterion = (u32, &'static str, fn(&Ctx) -> Outcome);

fn main() {
    let ctx = Ctx {
        checker: Checker::new(BOUND, SEED),
    };
    let criteria: [Criterion; 13] = [
        (1, "cyclic squares", c1_catanese),
        (2, "free stages p=5 are Beauville", c2_free_p5),
        (3, "free stages p=2,3 are not Beauville", c3_free_absent),
        (4, "power congruences", c4_power_congruences),
        (5, "power layers of free stages", c5_power_layers),
        (6, "free-product stages p=5", c6_freeprod_p5),
        (7, "free-product stages p=3", c7_freeprod_p3),
        (8, "quotients between λ_5 and λ_4", c8_refinement),
        (9, "maximal class", c9_maxclass),
        (10, "Easterfield bound", c10_easterfield),
        (11, "Nottingham quotients", c11_nottingham),
        (12, "free product against Nottingham", c12_nottingham_iso),
        (13, "infrastructure", c13_infra),
    ];
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        let start = Instant::now();
        let (ok, detail) = match f(&ctx) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed.push(n);
        }
        println!(
            "{} criterion {n:2} {name}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of 13 criteria pass; failing: {failed:?}", 13 - failed.len());
    // The power congruence (xy)^(p^(n-2)) ≡ x^(p^(n-2)) y^(p^(n-2)) is false for p = 2;
    // every other criterion must hold.
    if failed != [4] {
        eprintln!("unexpected set of failing criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn c1_catanese(_: &Ctx) -> Outcome {
    let mut ok = true;
    let mut found = Vec::new();
    for n in 2..=7u32 {
        let g = CyclicSquare { n };
        let (t, elems) = TableGroup::from_group(&g);
        let res = exhaustive_beauville_search(&t);
        let lib = match &res.certificate {
            Some(c) => {
                let e = |i: u32| elems[i as usize];
                is_beauville(&g, (&e(c.pair1.0), &e(c.pair1.1)), (&e(c.pair2.0), &e(c.pair2.1)))
            }
            None => false,
        };
        let oracle = has_beauville_structure(&g);
        ok &= res.exhaustive && lib == oracle && oracle == [5, 7].contains(&n);
        if lib {
            found.push(n);
        }
    }
    Ok((ok, format!("structures for n in {found:?} of 2..=7, agreeing with brute force")))
}

fn certify_uv(ctx: &Ctx, fam: Family, p: u32, n: u32, log: u32) -> Result<bool> {
    let (g, u, v) = ctx.stage_group(fam, p, n)?;
    let ((a, b), (c, d)) = paper_structure_p_ge_5(&g, &u, &v)?;
    let u2 = g.mul(&u, &power(&g, &v, 2));
    let u4 = g.mul(&u, &power(&g, &v, 4));
    let cert = beauville_check(&g, (&a, &b), (&c, &d));
    Ok(g.size() == (p as u128).pow(log)
        && (c, d) == (u2, u4)
        && cert.verdict
        && is_beauville(&g, (&a, &b), (&cert.pair2.0, &cert.pair2.1)))
}

fn c2_free_p5(ctx: &Ctx) -> Outcome {
    let ok = certify_uv(ctx, Free, 5, 2, 2)? && certify_uv(ctx, Free, 5, 3, 5)?;
    Ok((ok, "{u,v}, {uv^2,uv^4} certified at orders 5^2 and 5^5".into()))
}

/// Proof of absence independent of the search: in each maximal subgroup `M` the
/// `p^(n-2)`-th powers of `M \ Φ` are nontrivial and generate one subgroup of order `p`,
/// and two generating triples always share a maximal subgroup when `p + 1 < 6`.
fn power_obstruction(g: &PcGroup, u: &Exps, v: &Exps, p: u32, n: u32) -> bool {
    let lambda = p_central(g, p as u64);
    let phi = &lambda[1.min(lambda.len() - 1)];
    let q = (p as u64).pow(n - 2);
    let reps: Vec<Exps> = std::iter::once(u.clone())
        .chain((0..p).map(|a| g.mul(&power(g, u, a as u64), v)))
        .collect();
    let phi_gens: Vec<Exps> = phi.iter().cloned().collect();
    let mut subgroups = HashSet::new();
    for r in &reps {
        let mut gens = phi_gens.clone();
        gens.push(r.clone());
        let (m, _) = closure(g, &gens);
        let powers: Vec<Exps> = m.iter().filter(|x| !phi.contains(*x)).map(|x| power(g, x, q)).collect();
        if powers.iter().any(|x| *x == g.identity()) {
            return false;
        }
        let (s, _) = closure(g, &powers);
        if s.len() as u32 != p {
            return false;
        }
        subgroups.insert(s.into_iter().collect::<BTreeSet<_>>());
    }
    p + 1 < 6 && subgroups.len() == reps.len()
}

fn absent(ctx: &Ctx, fam: Family, p: u32, n: u32) -> Result<bool> {
    let (g, u, v) = ctx.stage_group(fam, p, n)?;
    let (out, cert) = search_pc(&g, BOUND)?;
    let found = cert.is_some() || out.certificate.is_some();
    let brute = g.size() > 32 || !has_beauville_structure(&g);
    Ok(match fam {
        // In free stages the power subgroups refute every shared maximal subgroup.
        Free => {
            out.exhaustive
                && !found
                && brute
                && out.stats.sharing_pairs == out.stats.class_pairs
                && out.stats.refuted_by_obstruction == out.stats.sharing_pairs
                && power_obstruction(&g, &u, &v, p, n)
        }
        // Generators of order p: no power obstruction, so brute force is the witness.
        FreeProduct => out.exhaustive && !found && g.size() <= 32 && brute,
    })
}

fn c3_free_absent(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    for (p, n) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
        ok &= absent(ctx, Free, p, n)?;
    }
    Ok((
        ok,
        "exhaustive absence for p=2 n=2,3,4 and p=3 n=2,3; every shared maximal subgroup refuted by its power subgroup".into(),
    ))
}

/// First `(n, x, y)` breaking `(xy)^q ≡ x^q y^q` (or `(xy)^q ≡ x^q` for `y ∈ λ_2` when
/// `coset`) modulo `λ_n`, checked exhaustively on a small group.
fn congruence_oracle(g: &PcGroup, coset: bool) -> Option<(u32, Exps, Exps)> {
    let p = g.p() as u64;
    let lambda = p_central(g, p);
    let all = g.elements();
    for n in 3..=lambda.len() as u32 {
        let q = p.pow(n - 2);
        let ln = &lambda[n as usize - 1];
        for x in &all {
            for y in &all {
                if coset && !lambda[1].contains(y) {
                    continue;
                }
                let lhs = power(g, &g.mul(x, y), q);
                let rhs = if coset { power(g, x, q) } else { g.mul(&power(g, x, q), &power(g, y, q)) };
                if !ln.contains(&g.mul(&lhs, &g.inv(&rhs))) {
                    return Some((n, x.clone(), y.clone()));
                }
            }
        }
    }
    None
}

/// 1000 random pairs; `λ_n` membership through the weight-free series recomputation.
fn congruence_sampled(g: &PcGroup, coset: bool, seed: u64) -> bool {
    let p = g.p();
    let lambda = lambda_series(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = |in_phi: bool| -> Exps {
        loop {
            let e: Exps = (0..g.ngens()).map(|_| rng.gen_range(0..p) as u8).collect();
            if !in_phi || lambda[1].contains(g, &e) {
                return e;
            }
        }
    };
    for _ in 0..1000 {
        let x = random(false);
        let y = random(coset);
        for n in 3..=lambda.len() as u32 {
            let q = (p as u64).pow(n - 2);
            let lhs = power(g, &g.mul(&x, &y), q);
            let rhs = if coset { power(g, &x, q) } else { g.mul(&power(g, &x, q), &power(g, &y, q)) };
            let d = g.mul(&lhs, &g.inv(&rhs));
            let inside = lambda.get(n as usize - 1).map_or(d == g.identity(), |l| l.contains(g, &d));
            if !inside {
                return false;
            }
        }
    }
    true
}

fn c4_power_congruences(ctx: &Ctx) -> Outcome {
    let groups = [
        (Free, 2, 3),
        (Free, 2, 4),
        (Free, 3, 3),
        (Free, 3, 4),
        (Free, 5, 3),
        (FreeProduct, 2, 3),
        (FreeProduct, 2, 4),
        (FreeProduct, 2, 5),
        (FreeProduct, 3, 3),
        (FreeProduct, 3, 4),
        (FreeProduct, 3, 5),
        (FreeProduct, 3, 6),
        (FreeProduct, 5, 3),
        (FreeProduct, 5, 4),
        (FreeProduct, 7, 3),
    ];
    let mut agree = true;
    let mut coset_ok = true;
    let mut broken = Vec::new();
    for (i, (fam, p, n)) in groups.into_iter().enumerate() {
        let (g, _, _) = ctx.stage_group(fam, p, n)?;
        let small = g.size() <= 243;
        let cov = if small {
            Coverage::Exhaustive
        } else {
            Coverage::Sampled {
                pairs: 1000,
                seed: SEED + i as u64,
            }
        };
        let seed = SEED ^ (i as u64) << 8;
        for coset in [false, true] {
            let lib = if coset { coset_power(&g, cov, BOUND)? } else { hall_petrescu(&g, cov, BOUND)? };
            let oracle_holds = if small {
                let o = congruence_oracle(&g, coset);
                if let (Some((lvl, x, y)), Some((l2, x2, y2))) = (&o, &lib.counterexample) {
                    // The crate's counterexample must be one for the oracle too.
                    let q = (p as u64).pow(*l2 - 2);
                    let lam = p_central(&g, p as u64);
                    let d = g.mul(&power(&g, &g.mul(x2, y2), q), &g.inv(&g.mul(&power(&g, x2, q), &power(&g, y2, q))));
                    agree &= !lam[*l2 as usize - 1].contains(&d);
                    let _ = (lvl, x, y);
                }
                o.is_none()
            } else {
                congruence_sampled(&g, coset, seed)
            };
            agree &= lib.holds() == oracle_holds;
            if coset {
                coset_ok &= oracle_holds;
            } else if !oracle_holds {
                broken.push(format!("{}:{p}:{n}", fam.tag()));
            }
        }
    }
    let ok = agree && coset_ok && broken.is_empty();
    let detail = if broken.is_empty() {
        "(xy)^q ≡ x^q y^q and its coset form hold in every stage".to_string()
    } else {
        format!(
            "(xy)^q ≢ x^q y^q mod λ_n in {} (all p = 2; the oracle confirms each counterexample); \
             the coset form (xy)^q ≡ x^q for y ∈ λ_2 holds everywhere: {coset_ok}; crate and oracle agree: {agree}",
            broken.join(", ")
        )
    };
    Ok((ok, detail))
}

fn c5_power_layers(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    for p in [3u32, 5] {
        let n = 3;
        let (g, u, v) = ctx.stage_group(Free, p, n)?;
        let q = (p as u64).pow(n - 2);
        let r = power_layer_report(&g, n, BOUND)?;
        let lambda = p_central(&g, p as u64);
        let (xq, yq) = (power(&g, &u, q), power(&g, &v, q));
        let (span, _) = closure(&g, &[xq.clone(), yq.clone()]);
        let independent = span.len() as u32 == p * p && lambda[n as usize - 2].is_superset(&span);
        let phi: Vec<Exps> = lambda[1].iter().cloned().collect();
        let mut subgroups = HashSet::new();
        let mut orders_p = true;
        let reps = std::iter::once(u.clone()).chain((0..p).map(|a| g.mul(&power(&g, &u, a as u64), &v)));
        for rep in reps {
            let mut gens = phi.clone();
            gens.push(rep);
            let (m, _) = closure(&g, &gens);
            let powers: Vec<Exps> = m.iter().map(|x| power(&g, x, q)).collect();
            let (s, _) = closure(&g, &powers);
            orders_p &= s.len() as u32 == p;
            subgroups.insert(s.into_iter().collect::<BTreeSet<_>>());
        }
        let distinct = subgroups.len() as u32 == p + 1;
        ok &= independent
            && distinct
            && orders_p
            && r.independent
            && r.pairwise_distinct
            && r.power_subgroup_orders.iter().all(|&o| o == p as u128);
    }
    Ok((ok, "p=3,5, n=3: x^p, y^p independent; p+1 power subgroups distinct of order p".into()))
}

fn c6_freeprod_p5(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut orders = Vec::new();
    for (n, log) in [(2, 2), (3, 3), (4, 5)] {
        ok &= certify_uv(ctx, FreeProduct, 5, n, log)?;
        let (g, u, v) = ctx.stage_group(FreeProduct, 5, n)?;
        let o = order(&g, &g.mul(&u, &v));
        ok &= o == 5u64.pow(ceil_div(n - 1, 4));
        orders.push(o);
    }
    Ok((ok, format!("n=2,3,4 certified at 5^2, 5^3, 5^5; o(uv) = {orders:?}")))
}

fn c7_freeprod_p3(ctx: &Ctx) -> Outcome {
    let mut ok = absent(ctx, FreeProduct, 3, 2)? && absent(ctx, FreeProduct, 3, 3)?;
    let (g4, _, _) = ctx.stage_group(FreeProduct, 3, 4)?;
    let h = group_h()?;
    ok &= match nottingham::iso_search(&g4, &h, BOUND)? {
        IsoOutcome::Isomorphic { hom, .. } => is_isomorphism(&g4, &h, |x| hom.apply(x)),
        _ => false,
    };
    let (g5, u, v) = ctx.stage_group(FreeProduct, 3, 5)?;
    let (((a, b), (c, d)), z, t) = paper_structure_p3(&g5, &u, &v, BOUND)?;
    ok &= (a.clone(), b.clone()) == (u.clone(), v.clone())
        && c == g5.inv(&g5.mul(&u, &z))
        && d == g5.mul(&v, &t)
        && g5.size() == 3u128.pow(7)
        && is_beauville(&g5, (&a, &b), (&c, &d));
    Ok((ok, "n=2,3 absent; n=4 ≅ H; n=5 certified by {u,v}, {(uz)^-1, vt}".into()))
}

fn c8_refinement(ctx: &Ctx) -> Outcome {
    let r = maxclass::refinement_series(3, 5, BOUND)?;
    let stage = ctx.checker.stage(FreeProduct, 3, 5)?;
    let g = stage.group()?;
    let mc = maximal_class_group(3, 5)?;
    let h = maxclass::psi(&stage, &mc)?;
    let layer = g.pcp().weight_range(4);
    let elem = |c: &[u32]| -> Exps {
        let mut e = vec![0u8; g.ngens()];
        for (i, &x) in layer.clone().zip(c) {
            e[i] = x as u8;
        }
        e
    };
    // Every vector of the top layer, and those killed by ψ.
    let vectors: Vec<Vec<u32>> = (0..3u32.pow(layer.len() as u32))
        .map(|mut k| {
            (0..layer.len())
                .map(|_| {
                    let d = k % 3;
                    k /= 3;
                    d
                })
                .collect()
        })
        .collect();
    let kernel: HashSet<Vec<u32>> = vectors.iter().filter(|c| h.apply(&elem(c)) == mc.identity()).cloned().collect();
    let span = |basis: &[Vec<u32>]| -> BTreeSet<Vec<u32>> {
        vectors
            .iter()
            .filter(|c| {
                let mut with: Vec<Vec<u32>> = basis.to_vec();
                with.push((*c).clone());
                rank3(&with) == rank3(basis)
            })
            .cloned()
            .collect()
    };
    // Subspaces of the kernel, as sets.
    let mut valid: BTreeSet<BTreeSet<Vec<u32>>> = BTreeSet::new();
    for a in &vectors {
        for b in &vectors {
            let s = span(&[a.clone(), b.clone()]);
            if s.iter().all(|x| kernel.contains(x)) {
                valid.insert(s);
            }
        }
    }
    let mut ok = valid.len() == r.terms.len();
    let mut seen = BTreeSet::new();
    for term in &r.terms {
        let s = span(&term.n_basis);
        ok &= valid.contains(&s) && seen.insert(s);
    }
    for term in r.terms.iter().chain([&r.top]) {
        let q = term.quotient.group()?;
        let (u, v) = (&term.quotient.images[0], &term.quotient.images[1]);
        let c = &term.certificate;
        ok &= c.pair1 == (u.clone(), v.clone())
            && c.pair2 == (q.inv(&q.mul(u, &term.z)), q.mul(v, &term.t))
            && is_beauville(&q, (&c.pair1.0, &c.pair1.1), (&c.pair2.0, &c.pair2.1));
    }
    let mut sizes: Vec<u128> = r.chain.iter().map(|&i| r.terms[i].quotient.group().map(|q| q.size())).collect::<Result<_>>()?;
    sizes.push(r.top.quotient.group()?.size());
    ok &= sizes.windows(2).all(|w| w[0] == 3 * w[1]) && sizes.first() == Some(&3u128.pow(7));
    Ok((
        ok,
        format!(
            "{} valid N (kernel of rank {} in a layer of rank {}), chain orders {sizes:?}, every term certified",
            valid.len(),
            r.kernel_basis.len(),
            r.layer_rank
        ),
    ))
}

fn rank3(rows: &[Vec<u32>]) -> usize {
    let mut m: Vec<Vec<u32>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = if m[rank][c] == 1 { 1 } else { 2 };
        for x in m[rank].iter_mut() {
            *x = *x * inv % 3;
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + 3 * 3 - f * m[rank][j]) % 3;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn c9_maxclass(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    for (p, n) in [(3u32, 4u32), (3, 5), (3, 6), (5, 3), (5, 4)] {
        let g = maximal_class_group(p, n)?;
        let all = g.elements();
        ok &= all.len() as u128 == (p as u128).pow(n);
        ok &= all.iter().filter(|x| !g.in_p1(x)).all(|x| order(&g, x) == p as u64);
        // P_1 = A, then P_(i+1) = [P_i, P].
        let top = g.generators();
        let a: Vec<_> = all.iter().filter(|x| g.in_p1(x)).cloned().collect();
        let (mut pi, mut gens) = closure(&g, &a);
        let mut i = 1;
        while pi.len() > 1 {
            let comms: Vec<_> = gens.iter().flat_map(|x| top.iter().map(|y| g.comm(x, y))).collect();
            let (next, used) = normal_closure(&g, &comms, &top);
            let want = (p as u64).pow(ceil_div(n - i, p - 1));
            let exp = max_order(&g, &pi);
            let attained = pi.iter().any(|x| !next.contains(x) && order(&g, x) == want);
            ok &= exp == want && attained && pi.len() as u128 == (p as u128).pow(n - i);
            pi = next;
            gens = used;
            i += 1;
        }
        ok &= i == n;
    }
    for (p, n) in [(3u32, 4u32), (3, 5), (5, 3), (5, 4)] {
        let stage = ctx.checker.stage(FreeProduct, p, n)?;
        let mc = maximal_class_group(p, n)?;
        let h = maxclass::psi(&stage, &mc)?;
        let (su, sv) = (mc.inv(&mc.s()), mc.mul(&mc.s(), &mc.s1()));
        ok &= h.apply(&stage.images[0]) == su && h.apply(&stage.images[1]) == sv;
        ok &= order(&mc, &su) == p as u64 && order(&mc, &sv) == p as u64;
        ok &= closure(&mc, &[su, sv]).0.len() as u128 == mc.size();
        let src = stage.group()?;
        ok &= homomorphism_sampled(&src, &mc, |x| h.apply(x), 20_000);
    }
    Ok((
        ok,
        "p=3 n=4,5,6 and p=5 n=3,4: o(P \\ P_1) = p, exp P_i = p^⌈(n-i)/(p-1)⌉ attained; ψ a surjective homomorphism".into(),
    ))
}

fn homomorphism_sampled<B: Group>(src: &PcGroup, dst: &B, f: impl Fn(&Exps) -> B::Elem, pairs: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (p, m) = (src.p(), src.ngens());
    let mut random = || -> Exps { (0..m).map(|_| rng.gen_range(0..p) as u8).collect() };
    (0..pairs).all(|_| {
        let (x, y) = (random(), random());
        f(&src.mul(&x, &y)) == dst.mul(&f(&x), &f(&y))
    })
}

fn easterfield_oracle<G: FiniteGroup>(g: &G, p: u64) -> Vec<(u32, u128, u32)> {
    let lcs = lower_central(g);
    let class = lcs.len() as u32 - 1;
    let k = ceil_div(class, p as u32 - 1).max(1);
    let all = g.elements();
    let orders: Vec<u64> = all.iter().map(|x| order(g, x)).collect();
    let mut rows = Vec::new();
    for i in 1.. {
        let q = p.pow(i);
        let gens: Vec<G::Elem> = all.iter().zip(&orders).filter(|(_, o)| q % **o == 0).map(|(x, _)| x.clone()).collect();
        let (omega, _) = closure(g, &gens);
        if omega.len() as u128 == g.size() {
            break;
        }
        let exp = max_order(g, &omega);
        assert!(exp <= p.pow(i + k - 1), "exp Ω_{i} = {exp} exceeds p^{}", i + k - 1);
        rows.push((i, omega.len() as u128, exp.ilog(p)));
    }
    rows
}

fn c10_easterfield(ctx: &Ctx) -> Outcome {
    let mut groups: Vec<(String, PcGroup)> = Vec::new();
    for (fam, p, n) in [
        (Free, 2, 2),
        (Free, 2, 3),
        (Free, 3, 2),
        (Free, 3, 3),
        (Free, 5, 2),
        (Free, 5, 3),
        (Free, 7, 2),
        (FreeProduct, 2, 3),
        (FreeProduct, 2, 5),
        (FreeProduct, 3, 3),
        (FreeProduct, 3, 4),
        (FreeProduct, 5, 3),
        (FreeProduct, 5, 4),
        (FreeProduct, 7, 3),
    ] {
        groups.push((format!("{}:{p}:{n}", fam.tag()), ctx.stage_group(fam, p, n)?.0));
    }
    for (p, n) in [(3, 4), (3, 5), (3, 6), (5, 3), (5, 4)] {
        groups.push((format!("maxclass:{p}:{n}"), maxclass::to_pc(&maximal_class_group(p, n)?)?.pc));
    }
    for k in 3..=7 {
        groups.push((format!("nottingham:{k}"), nottingham::to_pc(&NottinghamGroup::new(3, k)?)?.pc));
    }
    let r = maxclass::refinement_series(3, 5, BOUND)?;
    for (i, t) in r.terms.iter().enumerate() {
        let q = t.quotient.group()?;
        if q.size() <= 729 {
            groups.push((format!("refinement:{i}"), q));
        }
    }
    let mut ok = true;
    let mut rows = 0;
    for (_, g) in &groups {
        let lib = easterfield(g, BOUND)?;
        let oracle = easterfield_oracle(g, g.p() as u64);
        let lib_rows: Vec<(u32, u128, u32)> = lib.rows.iter().map(|r| (r.i, r.omega_order, r.exp_log)).collect();
        ok &= lib.holds() && lib_rows == oracle;
        rows += oracle.len();
    }
    // The same bound on the Nottingham quotient itself, away from its PC model.
    let n6 = NottinghamGroup::new(3, 6)?;
    rows += easterfield_oracle(&n6, 3).len();
    Ok((ok, format!("{} groups, {rows} proper Ω_i, exp Ω_i ≤ p^(i+k-1) throughout", groups.len() + 1)))
}

fn level_set(g: &NottinghamGroup, all: &[TruncSeries], m: u32) -> HashSet<TruncSeries> {
    all.iter()
        .filter(|f| (2..=m.min(g.k)).all(|j| f.coeff(j) == 0))
        .cloned()
        .collect()
}

fn c11_nottingham(_: &Ctx) -> Outcome {
    let p = 3;
    let mut ok = true;
    for k in 2..=10 {
        let g = NottinghamGroup::new(p, k)?;
        let gen = closure(&g, &g.generators()).0.len() as u128;
        ok &= g.size() == 3u128.pow(k - 1) && gen == g.size();
    }
    let g = NottinghamGroup::new(p, 10)?;
    let all = g.elements();
    let lcs = lower_central(&g);
    let lib = nottingham::lcs_check(p, 10)?;
    let mut slack = 0;
    for (idx, gamma) in lcs.iter().enumerate() {
        let i = idx as u32 + 1;
        let r = if i == 1 { 1 } else { i + 1 + (i - 2) / (p - 1) };
        if r < 10 {
            slack += 1;
            ok &= *gamma == level_set(&g, &all, r);
            ok &= lib.iter().any(|row| row.i == i && row.with_slack && row.equal);
        }
    }
    for m in 1..=4u32 {
        let target = 3 * m + m % 3;
        let lib = nottingham::power_subgroup_check(p, 10, m)?;
        if target >= 10 {
            ok &= !lib.observable;
            continue;
        }
        let cubes: Vec<TruncSeries> = level_set(&g, &all, m).iter().map(|f| power(&g, f, 3)).collect();
        ok &= closure(&g, &cubes).0 == level_set(&g, &all, target) && lib.observable && lib.holds;
    }
    // N/γ_5(N): γ_5 = N_7, visible in N/N_8.
    let g8 = NottinghamGroup::new(p, 8)?;
    let all8 = g8.elements();
    ok &= lower_central(&g8)[4] == level_set(&g8, &all8, 7);
    let g7 = NottinghamGroup::new(p, 7)?;
    let e = max_order(&g7, &lower_central(&g7)[1]);
    ok &= e == 3 && nottingham::exp_gamma2(p, 7)? == 3;
    Ok((
        ok,
        format!("|N/N_k| = 3^(k-1) for k ≤ 10; γ_i = N_r(i) on {slack} rows; N_m^3 = N_(3m+r) for m = 1,2,3; exp γ_2(N/γ_5(N)) = {e}"),
    ))
}

fn c12_nottingham_iso(ctx: &Ctx) -> Outcome {
    let (f4, _, _) = ctx.stage_group(FreeProduct, 3, 4)?;
    let n6 = nottingham::to_pc(&NottinghamGroup::new(3, 6)?)?;
    let mut ok = match nottingham::iso_search(&f4, &n6.pc, BOUND)? {
        IsoOutcome::Isomorphic { hom, .. } => {
            // Check against the series themselves as well as the PC model.
            let g6 = NottinghamGroup::new(3, 6)?;
            is_isomorphism(&f4, &n6.pc, |x| hom.apply(x)) && is_isomorphism(&f4, &g6, |x| n6.from_pc(&hom.apply(x)).clone())
        }
        _ => false,
    };
    let g7 = NottinghamGroup::new(3, 7)?;
    let n7 = nottingham::to_pc(&g7)?;
    let e7 = max_order(&g7, &lower_central(&g7)[1]);
    let r = maxclass::refinement_series(3, 5, BOUND)?;
    let mut seen = Vec::new();
    for term in &r.terms {
        let q = term.quotient.group()?;
        let eq = max_order(&q, &lower_central(&q)[1]);
        let lib = nottingham::iso_search(&q, &n7.pc, BOUND)?;
        ok &= !lib.is_isomorphic();
        if q.size() == g7.size() {
            ok &= eq == 9 && e7 == 3;
            ok &= matches!(&lib, IsoOutcome::Distinguished { invariant, left: 9, right: 3 } if invariant.contains("gamma"));
        } else {
            ok &= q.size() != g7.size();
        }
        seen.push(format!("3^{}:{eq}", q.ngens()));
    }
    // The only W between N_7 and N_6 is N_7, since |N_6 : N_7| = 3.
    let g8 = NottinghamGroup::new(3, 8)?;
    let all8 = g8.elements();
    ok &= level_set(&g8, &all8, 6).len() == 3 * level_set(&g8, &all8, 7).len();
    Ok((
        ok,
        format!("F/γ_4(F) ≅ N/γ_4(N) at 3^5; quotients F/N (order:exp γ_2) {seen:?} against N/γ_5(N) with exp γ_2 = {e7}"),
    ))
}

fn c13_infra(ctx: &Ctx) -> Outcome {
    let start = Instant::now();
    let mut sections = Vec::new();
    for name in expand("all")? {
        sections.push(ctx.checker.run(name)?);
    }
    let elapsed = start.elapsed();
    let infra_ok = sections.iter().filter(|s| s.name == "infra").all(|s| s.lines.iter().all(|l| l.status != Status::Fail));
    // Consistency, with a sampled associativity oracle on the smaller groups.
    let mut ok = infra_ok;
    let mut presentations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pcs: Vec<PcGroup> = Vec::new();
    for tower in ctx.checker.towers() {
        let text = tower.to_text();
        ok &= parse_tower(&text)?.to_text() == text;
        for s in &tower.stages {
            pcs.push(s.group()?);
        }
    }
    pcs.push(group_h()?);
    for (p, n) in [(3, 5), (5, 4)] {
        pcs.push(maxclass::to_pc(&maximal_class_group(p, n)?)?.pc);
    }
    pcs.push(nottingham::to_pc(&NottinghamGroup::new(3, 7)?)?.pc);
    for g in &pcs {
        presentations += 1;
        ok &= is_consistent(g.pcp());
        let text = format_presentation(g.pcp());
        let back = parse_presentation(&text)?;
        ok &= format_presentation(&back) == text && back == *g.pcp();
        let (p, m) = (g.p(), g.ngens());
        let mut random = || -> Exps { (0..m).map(|_| rng.gen_range(0..p) as u8).collect() };
        for _ in 0..200 {
            let (a, b, c) = (random(), random(), random());
            ok &= g.mul(&g.mul(&a, &b), &c) == g.mul(&a, &g.mul(&b, &c));
            ok &= g.mul(&a, &g.inv(&a)) == g.identity();
        }
        if g.size() <= 243 {
            ok &= g.elements().into_iter().collect::<HashSet<_>>().len() as u128 == g.size();
        }
    }
    for s in ["t + 2*t^2 + 2*t^3 + t^4 (mod t^5, p=3)", "t + t^3 + 4*t^5 (mod t^7, p=5)"] {
        ok &= s.parse::<TruncSeries>()?.to_string() == s;
    }
    // Certificates: serialize, parse, re-verify.
    let (g, u, v) = ctx.stage_group(Free, 5, 3)?;
    let ((a, b), (c, d)) = paper_structure_p_ge_5(&g, &u, &v)?;
    let cert = beauville_check(&g, (&a, &b), (&c, &d));
    let text = cert.to_text(&g);
    let parsed = parse_certificate(&text)?;
    ok &= reverify_certificate(&parsed, 3125)?.ok() && parsed.group.pcp() == g.pcp();
    ok &= defining_images(&parsed.group)?.len() == 2;
    ok &= elapsed.as_secs() < 20 * 60;
    Ok((
        ok,
        format!(
            "{presentations} presentations consistent and round-tripped; certificate re-verified; reproduce all in {:.1}s",
            elapsed.as_secs_f64()
        ),
    ))
}
