//! The check suite run by `pcforge reproduce`. Every section computes its groups from
//! scratch (sharing quotient towers through a [`Checker`]) and reports one status line
//! per check.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::beauville::{
    beauville_check, exhaustive_beauville_search, is_maximal_class, lemma34_check, nonconjugate_element,
    paper_structure_p3, paper_structure_p_ge_5, parse_certificate, reverify_certificate, search_pc,
    sigma, sigma_disjoint, BeauvilleCertificate, SearchOutcome,
};
use crate::error::{Error, Result};
use crate::group::{conjugacy_class, CyclicSquare, FiniteGroup, Group};
use crate::maxclass::{self, maximal_class_group, Refinement};
use crate::nottingham::{self, IsoOutcome, NottinghamGroup, TruncSeries};
use crate::pcp::presentation::exps_to_word;
use crate::pcp::{format_presentation, format_word, is_consistent, parse_presentation, Exps, PcGroup, PcPresentation};
use crate::pquotient::{parse_tower, FpPresentation, QuotientTower, Stage};
use crate::series::{coset_power, easterfield, hall_petrescu, power_layer_report, Coverage};
use crate::table::TableGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Absent,
    Iso,
    NonIso,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
            Status::Absent => "ABSENT",
            Status::Iso => "ISO",
            Status::NonIso => "NON-ISO",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub id: String,
    pub status: Status,
    pub detail: String,
    /// Certificate text, printed under the line.
    pub certificate: Option<String>,
}

impl CheckLine {
    pub fn new(id: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        CheckLine {
            id: id.into(),
            status,
            detail: detail.into(),
            certificate: None,
        }
    }

    fn pass_if(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(id, if ok { Status::Pass } else { Status::Fail }, detail)
    }
}

#[derive(Clone, Debug)]
pub struct Section {
    pub name: &'static str,
    /// Sorted by check id.
    pub lines: Vec<CheckLine>,
    pub elapsed: Duration,
}

pub const SECTIONS: [&str; 13] = [
    "lemma2.2",
    "lemma2.3",
    "lemma2.4",
    "thmA",
    "easterfield",
    "thm3.2",
    "lemma3.3",
    "thm3.4",
    "thm3.5",
    "catanese",
    "maxclass",
    "nottingham",
    "infra",
];

/// Section names for a `reproduce` argument (`all` expands to every section).
pub fn expand(section: &str) -> Result<Vec<&'static str>> {
    if section == "all" {
        return Ok(SECTIONS.to_vec());
    }
    SECTIONS
        .iter()
        .find(|s| **s == section)
        .map(|s| vec![*s])
        .ok_or_else(|| Error::Invalid(format!("unknown section `{section}`")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Free,
    FreeProduct,
}

impl Family {
    pub fn fp(self, p: u32) -> FpPresentation {
        match self {
            Family::Free => FpPresentation::free(),
            Family::FreeProduct => FpPresentation::free_product(p),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::Free => "free",
            Family::FreeProduct => "freeprod",
        }
    }
}

/// The group `H` of order `3^5`: `[b,a] = c`, `[c,a] = d`, `[c,b] = e`, all of exponent 3.
pub const H_TEXT: &str = "pcp p=3 n=5
w 1 1
w 2 1
w 3 2
w 4 3
w 5 3
comm 2 1 = g3
comm 3 1 = g4
comm 3 2 = g5
";

pub fn group_h() -> Result<PcGroup> {
    PcGroup::new(parse_presentation(H_TEXT)?)
}

fn word(e: &[u8]) -> String {
    format_word(&exps_to_word(e))
}

fn pow_u128(p: u32, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// Deterministic per-check seed.
fn mix(seed: u64, id: &str) -> u64 {
    id.bytes().fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn group_name(fam: Family, p: u32, n: u32) -> String {
    format!("{}.p{p}.n{n}", fam.tag())
}

/// Runs sections; caches towers and the refinement series between them.
pub struct Checker {
    pub bound: u128,
    pub seed: u64,
    towers: Mutex<HashMap<(Family, u32), QuotientTower>>,
    refinement: Mutex<Option<Refinement>>,
}

const GENERATOR_CAP: usize = 64;

impl Checker {
    pub fn new(bound: u128, seed: u64) -> Self {
        Checker {
            bound,
            seed,
            towers: Mutex::new(HashMap::new()),
            refinement: Mutex::new(None),
        }
    }

    pub fn tower(&self, fam: Family, p: u32, n: u32) -> Result<QuotientTower> {
        let mut towers = self.towers.lock().unwrap();
        if let Some(t) = towers.get(&(fam, p)) {
            if t.last().n >= n || t.stabilized {
                return Ok(t.clone());
            }
        }
        let t = QuotientTower::compute(&fam.fp(p), p, n, GENERATOR_CAP)?;
        towers.insert((fam, p), t.clone());
        Ok(t)
    }

    pub fn stage(&self, fam: Family, p: u32, n: u32) -> Result<Stage> {
        self.tower(fam, p, n)?
            .stage(n)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("{} has no stage {n}", fam.tag())))
    }

    /// Towers computed so far, in a fixed order.
    pub fn towers(&self) -> Vec<QuotientTower> {
        let towers = self.towers.lock().unwrap();
        let mut keys: Vec<_> = towers.keys().copied().collect();
        keys.sort_by_key(|(f, p)| (f.tag(), *p));
        keys.iter().map(|k| towers[k].clone()).collect()
    }

    fn refinement(&self) -> Result<Refinement> {
        let mut slot = self.refinement.lock().unwrap();
        if let Some(r) = slot.as_ref() {
            return Ok(r.clone());
        }
        let r = maxclass::refinement_series(3, 5, self.bound)?;
        *slot = Some(r.clone());
        Ok(r)
    }

    pub fn run(&self, section: &'static str) -> Result<Section> {
        let start = Instant::now();
        let mut lines = match section {
            "lemma2.2" => self.lemma22(),
            "lemma2.3" => self.lemma23(),
            "lemma2.4" => self.lemma24(),
            "thmA" => self.theorem_a(),
            "easterfield" => self.easterfield(),
            "thm3.2" => self.theorem32(),
            "lemma3.3" => self.lemma33(),
            "thm3.4" => self.theorem34(),
            "thm3.5" => self.theorem35(),
            "catanese" => self.catanese(),
            "maxclass" => self.maxclass(),
            "nottingham" => self.nottingham(),
            "infra" => self.infra(),
            other => return Err(Error::Invalid(format!("unknown section `{other}`"))),
        };
        lines.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Section {
            name: section,
            lines,
            elapsed: start.elapsed(),
        })
    }

    fn coverage(&self, g: &PcGroup, id: &str) -> Coverage {
        if g.size() <= pow_u128(3, 5) {
            Coverage::Exhaustive
        } else {
            Coverage::Sampled {
                pairs: 1000,
                seed: mix(self.seed, id),
            }
        }
    }

    fn lemma22(&self) -> Vec<CheckLine> {
        use Family::*;
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
        let mut out = Vec::new();
        for (fam, p, n) in groups {
            let name = group_name(fam, p, n);
            for (kind, coset) in [("hp", false), ("eq4", true)] {
                let id = format!("lemma2.2.{kind}.{name}");
                out.push(guard(&id, || {
                    let g = self.stage(fam, p, n)?.group()?;
                    let cov = self.coverage(&g, &id);
                    let r = if coset {
                        coset_power(&g, cov, self.bound)?
                    } else {
                        hall_petrescu(&g, cov, self.bound)?
                    };
                    let scope = match cov {
                        Coverage::Exhaustive => format!("exhaustive over {} pairs", r.pairs),
                        Coverage::Sampled { pairs, seed } => format!("{pairs} sampled pairs (seed {seed})"),
                    };
                    Ok(match &r.counterexample {
                        None => CheckLine::new(
                            &id,
                            Status::Pass,
                            format!("order {}^{}, levels {:?}, {scope}", p, g.ngens(), r.levels),
                        ),
                        Some((lvl, x, y)) => CheckLine::new(
                            &id,
                            Status::Fail,
                            format!(
                                "order {}^{}, fails at level {lvl}: x = {}, y = {}{}",
                                p,
                                g.ngens(),
                                word(x),
                                word(y),
                                if p == 2 { " (p = 2)" } else { "" }
                            ),
                        ),
                    })
                }));
            }
        }
        out
    }

    fn lemma23(&self) -> Vec<CheckLine> {
        let groups = [(2, 5), (3, 4), (5, 3), (7, 3)];
        let mut out = Vec::new();
        for (p, top) in groups {
            for n in 2..=top {
                let id = format!("lemma2.3.{}", group_name(Family::Free, p, n));
                out.push(guard(&id, || {
                    let stage = self.stage(Family::Free, p, n)?;
                    let g = stage.group()?;
                    let q = (p as i64).pow(n - 2);
                    let layer = g.pcp().weight_range(n - 1);
                    let coords = |e: &Exps| -> Vec<u32> { e[layer.clone()].iter().map(|&v| v as u32).collect() };
                    let (x, y) = (&stage.images[0], &stage.images[1]);
                    let (xq, yq) = (coords(&g.pow(x, q)), coords(&g.pow(y, q)));
                    let independent = crate::gf::rank(p, &[xq.clone(), yq.clone()]) == 2;
                    let want = (p as u64).pow(n - 1);
                    let orders = (g.order(x), g.order(y));
                    Ok(CheckLine::pass_if(
                        &id,
                        independent && orders == (want, want),
                        format!(
                            "x^{q} -> {xq:?}, y^{q} -> {yq:?} in λ_{}/λ_{n} (independent: {independent}); o(x) = {}, o(y) = {}",
                            n - 1,
                            orders.0,
                            orders.1
                        ),
                    ))
                }));
            }
        }
        out
    }

    fn lemma24(&self) -> Vec<CheckLine> {
        let groups = [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (5, 3)];
        groups
            .iter()
            .map(|&(p, n)| {
                let id = format!("lemma2.4.{}", group_name(Family::Free, p, n));
                guard(&id, || {
                    let g = self.stage(Family::Free, p, n)?.group()?;
                    let r = power_layer_report(&g, n, self.bound)?;
                    let orders_p = r.power_subgroup_orders.iter().all(|&o| o == p as u128);
                    Ok(CheckLine::pass_if(
                        &id,
                        r.independent && r.pairwise_distinct && orders_p && r.orders_outside_phi,
                        format!(
                            "{} maximal subgroups, |M^{}| = {:?}, pairwise distinct: {}, o(M \\ Φ) = {}^{}: {}",
                            r.power_subgroup_orders.len(),
                            (p as u64).pow(n - 2),
                            r.power_subgroup_orders,
                            r.pairwise_distinct,
                            p,
                            n - 1,
                            r.orders_outside_phi
                        ),
                    ))
                })
            })
            .collect()
    }

    /// A certificate line for an explicit pair of pairs, checked again from its text.
    fn certified(&self, id: &str, g: &PcGroup, pairs: &((Exps, Exps), (Exps, Exps)), extra: &str) -> Result<CheckLine> {
        let ((a, b), (c, d)) = pairs;
        let cert = beauville_check(g, (a, b), (c, d));
        certificate_line(id, g, &cert, self.bound.min(pow_u128(5, 5)), extra)
    }

    fn construction_p_ge_5(&self, fam: Family, p: u32, n: u32, prefix: &str) -> CheckLine {
        let id = format!("{prefix}.{}", group_name(fam, p, n));
        guard(&id, || {
            let stage = self.stage(fam, p, n)?;
            let g = stage.group()?;
            let pairs = paper_structure_p_ge_5(&g, &stage.images[0], &stage.images[1])?;
            self.certified(&id, &g, &pairs, &format!("order {p}^{}, pairs {{u,v}}, {{uv^2,uv^4}}", g.ngens()))
        })
    }

    fn construction_p3(&self, n: u32, prefix: &str) -> CheckLine {
        let id = format!("{prefix}.{}", group_name(Family::FreeProduct, 3, n));
        guard(&id, || {
            let stage = self.stage(Family::FreeProduct, 3, n)?;
            let g = stage.group()?;
            let (pairs, z, t) = paper_structure_p3(&g, &stage.images[0], &stage.images[1], self.bound)?;
            self.certified(
                &id,
                &g,
                &pairs,
                &format!("order 3^{}, pairs {{u,v}}, {{(uz)^-1,vt}} with z = {}, t = {}", g.ngens(), word(&z), word(&t)),
            )
        })
    }

    fn absence(&self, fam: Family, p: u32, n: u32, prefix: &str) -> CheckLine {
        let id = format!("{prefix}.{}", group_name(fam, p, n));
        guard(&id, || {
            let g = self.stage(fam, p, n)?.group()?;
            let (out, _) = search_pc(&g, self.bound)?;
            Ok(absence_line(&id, &out))
        })
    }

    fn theorem_a(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for (p, n) in [(5, 2), (5, 3), (7, 2)] {
            out.push(self.construction_p_ge_5(Family::Free, p, n, "thmA.structure"));
        }
        for (p, n) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
            out.push(self.absence(Family::Free, p, n, "thmA.absent"));
        }
        out
    }

    fn easterfield_groups(&self) -> Vec<(String, Result<PcGroup>)> {
        use Family::*;
        let mut groups: Vec<(String, Result<PcGroup>)> = Vec::new();
        let limit = |p: u32| match p {
            2 | 3 => pow_u128(3, 6),
            5 => pow_u128(5, 5),
            _ => pow_u128(p, 3),
        };
        for (fam, p, top) in [
            (Free, 2, 4),
            (Free, 3, 3),
            (Free, 5, 3),
            (FreeProduct, 2, 6),
            (FreeProduct, 3, 5),
            (FreeProduct, 5, 4),
            (FreeProduct, 7, 3),
        ] {
            for n in 2..=top {
                let g = self.stage(fam, p, n).and_then(|s| s.group());
                if let Ok(h) = &g {
                    if h.size() > limit(p) {
                        continue;
                    }
                }
                groups.push((group_name(fam, p, n), g));
            }
        }
        for (p, n) in [(3, 4), (3, 5), (3, 6), (5, 3), (5, 4)] {
            let g = maximal_class_group(p, n).and_then(|m| maxclass::to_pc(&m)).map(|m| m.pc);
            groups.push((format!("maxclass.p{p}.n{n}"), g));
        }
        for k in 3..=7 {
            let g = NottinghamGroup::new(3, k).and_then(|g| nottingham::to_pc(&g)).map(|m| m.pc);
            groups.push((format!("nottingham.p3.k{k}"), g));
        }
        if let Ok(r) = self.refinement() {
            for (i, term) in r.terms.iter().enumerate() {
                let g = term.quotient.group();
                if g.as_ref().map_or(true, |g| g.size() <= limit(3)) {
                    groups.push((format!("refinement.n5.term{i}"), g));
                }
            }
        }
        groups
    }

    fn easterfield(&self) -> Vec<CheckLine> {
        self.easterfield_groups()
            .into_iter()
            .map(|(name, g)| {
                let id = format!("easterfield.{name}");
                guard(&id, || {
                    let g = g?;
                    let r = easterfield(&g, self.bound)?;
                    let rows: Vec<String> = r
                        .rows
                        .iter()
                        .map(|row| format!("i={}: {}<={}", row.i, row.exp_log, row.bound_log))
                        .collect();
                    Ok(CheckLine::pass_if(
                        &id,
                        r.holds(),
                        format!(
                            "order {}^{}, class {}, k = {}, log_p exp Ω_i vs i+k-1: [{}]",
                            g.p(),
                            g.ngens(),
                            r.class,
                            r.k,
                            rows.join(", ")
                        ),
                    ))
                })
            })
            .collect()
    }

    fn uv_order(&self, p: u32, n: u32, prefix: &str) -> CheckLine {
        let id = format!("{prefix}.{}", group_name(Family::FreeProduct, p, n));
        guard(&id, || {
            let stage = self.stage(Family::FreeProduct, p, n)?;
            let g = stage.group()?;
            let uv = g.mul(&stage.images[0], &stage.images[1]);
            let want = (p as u64).pow((n - 1).div_ceil(p - 1));
            let got = g.order(&uv);
            Ok(CheckLine::pass_if(&id, got == want, format!("o(uv) = {got}, expected {p}^⌈{}/{}⌉ = {want}", n - 1, p - 1)))
        })
    }

    fn psi_line(&self, p: u32, n: u32, prefix: &str) -> CheckLine {
        let id = format!("{prefix}.{}", group_name(Family::FreeProduct, p, n));
        guard(&id, || {
            let stage = self.stage(Family::FreeProduct, p, n)?;
            let mc = maximal_class_group(p, n)?;
            let h = maxclass::psi(&stage, &mc)?;
            let g = stage.group()?;
            let uv = g.mul(&stage.images[0], &stage.images[1]);
            let (o_uv, o_s1) = (g.order(&uv), mc.order(&mc.s1()));
            let image_uv = mc.order(&h.apply(&uv));
            let ok = h.is_surjective() && o_uv == o_s1 && image_uv == o_s1;
            Ok(CheckLine::pass_if(
                &id,
                ok,
                format!(
                    "u -> s^-1, v -> s s_1 onto P of order {p}^{n}: relations hold, surjective {}, o(uv) = {o_uv}, o(ψ(uv)) = {image_uv}, o(s_1) = {o_s1}",
                    h.is_surjective()
                ),
            ))
        })
    }

    fn theorem32(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for (p, n) in [(5, 2), (5, 3), (5, 4), (7, 2), (7, 3)] {
            out.push(self.construction_p_ge_5(Family::FreeProduct, p, n, "thm3.2.structure"));
            out.push(self.uv_order(p, n, "thm3.2.order-uv"));
            if n >= 3 {
                out.push(self.psi_line(p, n, "thm3.2.psi"));
            }
        }
        out
    }

    fn lemma33(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for n in [4, 5] {
            for (xi, xname) in [(0, "u"), (1, "v")] {
                let name = group_name(Family::FreeProduct, 3, n);
                let id = format!("lemma3.3.{name}.{xname}");
                out.push(guard(&id, || {
                    let stage = self.stage(Family::FreeProduct, 3, n)?;
                    let g = stage.group()?;
                    let x = &stage.images[xi];
                    let t = nonconjugate_element(&g, x, self.bound)?;
                    // Oracle: t ∈ Φ(G) and x t is not a conjugate of x.
                    let d = g.pcp().weight_range(2).start;
                    let in_phi = t[..d].iter().all(|&v| v == 0) && t.iter().any(|&v| v != 0);
                    let class = conjugacy_class(&g, x);
                    let not_commutator = !class.contains(&g.mul(x, &t));
                    Ok(CheckLine::pass_if(
                        &id,
                        in_phi && not_commutator,
                        format!("t = {} in Φ: {in_phi}, |x^G| = {}, x t ∉ x^G: {not_commutator}", word(&t), class.len()),
                    ))
                }));
                let id = format!("lemma3.3.lemma3.4.{name}.{xname}");
                out.push(guard(&id, || {
                    let stage = self.stage(Family::FreeProduct, 3, n)?;
                    let g = stage.group()?;
                    let x = &stage.images[xi];
                    let t = nonconjugate_element(&g, x, self.bound)?;
                    let ok = g.order(x) == 3 && lemma34_check(&g, x, &t);
                    Ok(CheckLine::pass_if(&id, ok, format!("conjugates of <x> and <x t> meet trivially, t = {}", word(&t))))
                }));
            }
        }
        let id = "lemma3.3.maxclass.p3.n5";
        out.push(guard(id, || {
            let mc = maximal_class_group(3, 5)?;
            let m = maxclass::to_pc(&mc)?;
            if m.reps[0] != mc.s() {
                return Err(Error::Invalid("PC model is not based at s".into()));
            }
            let s = m.pc.unit(0);
            Ok(match nonconjugate_element(&m.pc, &s, self.bound) {
                Err(Error::NotFound(_)) => CheckLine::new(id, Status::Pass, "maximal class: every element of Φ(P) is [s, g]"),
                Err(e) => return Err(e),
                Ok(t) => CheckLine::new(id, Status::Fail, format!("unexpected t = {}", word(&t))),
            })
        }));
        out
    }

    fn theorem34(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for n in [2, 3] {
            out.push(self.absence(Family::FreeProduct, 3, n, "thm3.4.absent"));
        }
        for n in [4, 5] {
            out.push(self.construction_p3(n, "thm3.4.structure"));
            let id = format!("thm3.4.not-maximal-class.{}", group_name(Family::FreeProduct, 3, n));
            out.push(guard(&id, || {
                let g = self.stage(Family::FreeProduct, 3, n)?.group()?;
                g.check_enumerable(self.bound)?;
                let mc = is_maximal_class(&g, 3);
                Ok(CheckLine::pass_if(&id, !mc, format!("order 3^{}, maximal class: {mc}", g.ngens())))
            }));
        }
        for n in 2..=6 {
            out.push(self.uv_order(3, n, "thm3.4.order-uv"));
        }
        let id = "thm3.4.h.freeprod.p3.n4";
        out.push(guard(id, || {
            let g = self.stage(Family::FreeProduct, 3, 4)?.group()?;
            let h = group_h()?;
            Ok(match nottingham::iso_search(&g, &h, self.bound)? {
                IsoOutcome::Isomorphic { images, .. } => CheckLine::new(
                    id,
                    Status::Iso,
                    format!("F/λ_4(F) ≅ H, x -> {}, y -> {}", word(&images[0]), word(&images[1])),
                ),
                other => CheckLine::new(id, Status::Fail, format!("not isomorphic to H: {other:?}")),
            })
        }));
        out.push(self.psi_line(3, 5, "thm3.4.psi"));
        match self.refinement() {
            Err(e) => out.push(error_line("thm3.4.refinement.n5", &e)),
            Ok(r) => {
                let bound = self.bound.min(pow_u128(5, 5));
                out.push(CheckLine::pass_if(
                    "thm3.4.refinement.n5.kernel",
                    r.kernel_basis.len() + 1 == r.layer_rank,
                    format!(
                        "Ker ψ ∩ λ_4 has index 3 in λ_4 (layer rank {}, kernel rank {})",
                        r.layer_rank,
                        r.kernel_basis.len()
                    ),
                ));
                for (i, term) in r.terms.iter().enumerate() {
                    let id = format!("thm3.4.refinement.n5.term{i}");
                    out.push(guard(&id, || {
                        let g = term.quotient.group()?;
                        certificate_line(
                            &id,
                            &g,
                            &term.certificate,
                            bound,
                            &format!("N/λ_5 of rank {}, |F/N| = 3^{}", term.n_basis.len(), g.ngens()),
                        )
                    }));
                }
                let orders: Vec<usize> = r
                    .chain
                    .iter()
                    .map(|&i| r.terms[i].quotient.pcp.ngens())
                    .chain([r.top.quotient.pcp.ngens()])
                    .collect();
                let steps_ok = orders.windows(2).all(|w| w[0] == w[1] + 1);
                let all_ok = r.chain.iter().all(|&i| r.terms[i].certificate.verdict) && r.top.certificate.verdict;
                out.push(CheckLine::pass_if(
                    "thm3.4.refinement.n5.chain",
                    steps_ok && all_ok,
                    format!(
                        "|F/N| along the chain: {}; index-3 steps: {steps_ok}; every term Beauville: {all_ok}",
                        orders.iter().map(|e| format!("3^{e}")).collect::<Vec<_>>().join(" -> ")
                    ),
                ));
                out.push(guard("thm3.4.refinement.n5.top", || {
                    let g = r.top.quotient.group()?;
                    certificate_line("thm3.4.refinement.n5.top", &g, &r.top.certificate, bound, "F/λ_4(F)")
                }));
            }
        }
        out
    }

    fn theorem35(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        let id = "thm3.5.iso.order3^5";
        out.push(guard(id, || {
            let f = self.stage(Family::FreeProduct, 3, 4)?.group()?;
            let n = nottingham::to_pc(&NottinghamGroup::new(3, 6)?)?;
            Ok(match nottingham::iso_search(&f, &n.pc, self.bound)? {
                IsoOutcome::Isomorphic { images, .. } => {
                    let show = |e: &Exps| n.from_pc(e).to_string();
                    CheckLine::new(
                        id,
                        Status::Iso,
                        format!("F/γ_4(F) ≅ N/γ_4(N) = N/N_6: x -> {}, y -> {}", show(&images[0]), show(&images[1])),
                    )
                }
                other => CheckLine::new(id, Status::Fail, format!("no isomorphism: {other:?}")),
            })
        }));
        match self.refinement() {
            Err(e) => out.push(error_line("thm3.5.non-iso", &e)),
            Ok(r) => {
                for (i, term) in r.terms.iter().enumerate() {
                    let id = format!("thm3.5.non-iso.term{i}");
                    out.push(guard(&id, || {
                        let f = term.quotient.group()?;
                        let n = nottingham::to_pc(&NottinghamGroup::new(3, 7)?)?;
                        Ok(match nottingham::iso_search(&f, &n.pc, self.bound)? {
                            IsoOutcome::Distinguished { invariant, left, right } => CheckLine::new(
                                &id,
                                Status::NonIso,
                                format!(
                                    "F/N (N/λ_5 of rank {}) vs N/γ_5(N) = N/N_7: {invariant} {left} vs {right}",
                                    term.n_basis.len()
                                ),
                            ),
                            IsoOutcome::Absent { candidates } => CheckLine::new(
                                &id,
                                Status::NonIso,
                                format!("no isomorphism among {candidates} candidate pairs"),
                            ),
                            IsoOutcome::Isomorphic { .. } => CheckLine::new(&id, Status::Fail, "isomorphic"),
                        })
                    }));
                }
            }
        }
        let id = "thm3.5.exp-gamma2.k7";
        out.push(guard(id, || {
            let e = nottingham::exp_gamma2(3, 7)?;
            Ok(CheckLine::pass_if(id, e == 3, format!("exp γ_2(N/N_7) = {e}")))
        }));
        let id = "thm3.5.lcs.k8";
        out.push(guard(id, || {
            let rows = nottingham::lcs_check(3, 8)?;
            let find = |i: u32| rows.iter().find(|r| r.i == i);
            let ok = [(2, 3), (4, 6), (5, 7)]
                .iter()
                .all(|&(i, r)| find(i).is_some_and(|row| row.r == r && row.equal));
            Ok(CheckLine::pass_if(id, ok, "γ_2 = N_3, γ_4 = N_6, γ_5 = N_7 in N/N_8"))
        }));
        let id = "thm3.5.w";
        out.push(guard(id, || {
            let g = NottinghamGroup::new(3, 8)?;
            let (n6, n7) = (g.subgroup_nk(6)?, g.subgroup_nk(7)?);
            let index = n6.len() / n7.len();
            Ok(CheckLine::pass_if(
                id,
                index == 3,
                format!("|N_6 : N_7| = {index}, so the only W with N_7 ≤ W < N_6 is N_7"),
            ))
        }));
        let id = "thm3.5.self";
        out.push(guard(id, || {
            let f = self.stage(Family::FreeProduct, 3, 4)?.group()?;
            let ok = nottingham::iso_search(&f, &f, self.bound)?.is_isomorphic();
            Ok(CheckLine::new(id, if ok { Status::Iso } else { Status::Fail }, "F/λ_4(F) against itself"))
        }));
        out
    }

    fn catanese(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for n in 2..=7u32 {
            let id = format!("catanese.c{n}xc{n}");
            let g = CyclicSquare { n };
            let (t, elems) = TableGroup::from_group(&g);
            let res = exhaustive_beauville_search(&t);
            let expected = n % 2 != 0 && n % 3 != 0;
            let line = match &res.certificate {
                Some(c) => {
                    let (a, b) = (elems[c.pair1.0 as usize], elems[c.pair1.1 as usize]);
                    let (x, y) = (elems[c.pair2.0 as usize], elems[c.pair2.1 as usize]);
                    let check = beauville_check(&g, (&a, &b), (&x, &y));
                    CheckLine::pass_if(
                        &id,
                        expected && check.verdict,
                        format!("structure {{{a:?},{b:?}}}, {{{x:?},{y:?}}}"),
                    )
                }
                None if res.exhaustive => CheckLine::new(
                    &id,
                    if expected { Status::Fail } else { Status::Absent },
                    format!("exhaustive: {} generating pairs, {} class pairs refuted", res.stats.generating_pairs, res.stats.refuted_by_sigma),
                ),
                None => CheckLine::new(&id, Status::Skip, "search not exhaustive"),
            };
            out.push(line);
        }
        let g = CyclicSquare { n: 5 };
        let s1 = sigma(&g, &(1, 0), &(0, 1));
        let s2 = sigma(&g, &(1, 2), &(1, 4));
        out.push(CheckLine::pass_if(
            "catanese.c5xc5.lines",
            s1.socle_orbit.len() == 3 && s2.socle_orbit.len() == 3 && sigma_disjoint(&s1, &s2),
            "{u,v,uv} and {uv^2,uv^4,u^2v^6} give six distinct lines",
        ));
        out
    }

    fn maxclass(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for (p, n) in [(3, 4), (3, 5), (3, 6), (5, 3), (5, 4)] {
            let id = format!("maxclass.p{p}.n{n}");
            out.push(guard(&id, || {
                let g = maximal_class_group(p, n)?;
                let size = g.size();
                let ann = g.annihilation_identity();
                let outside = maxclass::outside_p1_order_p(&g);
                let filt = maxclass::exponent_filtration(&g);
                let filt_ok = filt.iter().all(|&(_, e, o, a)| e == o && a);
                let mc = is_maximal_class(&g, p);
                let pc = maxclass::to_pc(&g)?;
                let pc_ok = pc.pc.ngens() as u32 == n && is_consistent(pc.pc.pcp());
                let ok = size == pow_u128(p, n) && ann && outside && filt_ok && mc && pc_ok;
                let exps: Vec<String> = filt.iter().map(|&(i, e, o, _)| format!("P_{i}:{o}/{e}")).collect();
                Ok(CheckLine::pass_if(
                    &id,
                    ok,
                    format!(
                        "|P| = {size}, Θ-identity {ann}, o(P \\ P_1) = p {outside}, log exp observed/expected [{}], maximal class {mc}, PC model {pc_ok}",
                        exps.join(", ")
                    ),
                ))
            }));
        }
        for (p, n) in [(3, 4), (3, 5), (5, 3), (5, 4)] {
            out.push(self.psi_line(p, n, "maxclass.psi"));
        }
        let id = "maxclass.psi.non-surjective";
        out.push(guard(id, || {
            let stage = self.stage(Family::FreeProduct, 5, 3)?;
            let mc = maximal_class_group(5, 3)?;
            let s1_in_derived = mc.element(0, &[-1, 1, 0, 0]);
            let h = maxclass::psi_with(&stage, &mc, &mc.s(), &s1_in_derived)?;
            Ok(CheckLine::pass_if(id, !h.is_surjective(), "s_1 taken in P' gives a proper image"))
        }));
        for (fam, p, n) in [
            (Family::Free, 3, 3),
            (Family::Free, 5, 3),
            (Family::FreeProduct, 3, 4),
            (Family::FreeProduct, 5, 4),
        ] {
            let id = format!("maxclass.stage-not-maximal.{}", group_name(fam, p, n));
            out.push(guard(&id, || {
                let g = self.stage(fam, p, n)?.group()?;
                g.check_enumerable(self.bound)?;
                let mc = is_maximal_class(&g, p);
                Ok(CheckLine::pass_if(&id, !mc, format!("order {p}^{}, maximal class: {mc}", g.ngens())))
            }));
        }
        out
    }

    fn nottingham(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for k in 2..=10u32 {
            let id = format!("nottingham.order.k{k:02}");
            out.push(guard(&id, || {
                let g = NottinghamGroup::new(3, k)?;
                let n = g.elements().len() as u128;
                Ok(CheckLine::pass_if(&id, n == pow_u128(3, k - 1), format!("|N/N_{k}| = {n}")))
            }));
        }
        let id = "nottingham.lcs.k10";
        match nottingham::lcs_check(3, 10) {
            Err(e) => out.push(error_line(id, &e)),
            Ok(rows) => {
                for row in rows {
                    let id = format!("{id}.gamma{:02}", row.i);
                    let detail = format!(
                        "|γ_{}| = {}, |N_{}/N_10| = {}",
                        row.i, row.gamma_order, row.r, row.expected_order
                    );
                    out.push(if row.with_slack {
                        CheckLine::pass_if(id, row.equal, detail)
                    } else {
                        CheckLine::new(id, Status::Skip, format!("{detail} (r(i) ≥ k, boundary)"))
                    });
                }
            }
        }
        for m in 1..=4 {
            let id = format!("nottingham.power.k10.m{m}");
            out.push(guard(&id, || {
                let c = nottingham::power_subgroup_check(3, 10, m)?;
                let detail = format!("<N_{m}^3> = N_{}", c.target);
                Ok(if c.observable {
                    CheckLine::pass_if(&id, c.holds, detail)
                } else {
                    CheckLine::new(&id, Status::Skip, format!("{detail} not observable below level 10"))
                })
            }));
        }
        let id = "nottingham.normal.k7";
        out.push(guard(id, || {
            let g = NottinghamGroup::new(3, 7)?;
            let mut ok = true;
            for m in 1..=7 {
                let s = g.subgroup_nk(m)?;
                ok &= g.is_normal(&s) && s.len() as u128 * pow_u128(3, m - 1) == pow_u128(3, 6);
            }
            Ok(CheckLine::pass_if(id, ok, "N_m normal of index 3^(m-1) for m = 1..7"))
        }));
        let id = "nottingham.exp-gamma2.k7";
        out.push(guard(id, || {
            let e = nottingham::exp_gamma2(3, 7)?;
            Ok(CheckLine::pass_if(id, e == 3, format!("exp γ_2(N/γ_5(N)) = {e}")))
        }));
        let id = "nottingham.compose";
        out.push(guard(id, || {
            let f = TruncSeries::monomial(3, 4, 2, 1);
            let ff = f.compose(&f)?;
            let inv = f.invert();
            let ok = ff.to_string() == "t + 2*t^2 + 2*t^3 + t^4 (mod t^5, p=3)"
                && f.compose(&inv)?.is_identity()
                && inv.compose(&f)?.is_identity();
            Ok(CheckLine::pass_if(id, ok, format!("(t+t^2)∘(t+t^2) = {ff}; inverse {inv}")))
        }));
        let id = "nottingham.excluded-levels";
        let z = nottingham::excluded_levels(3, 3);
        out.push(CheckLine::pass_if(id, z == [5, 14, 41], format!("z_1, z_2, z_3 = {z:?}")));
        out
    }

    fn infra(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        use Family::*;
        for (fam, p, n) in [
            (Free, 2, 5),
            (Free, 3, 4),
            (Free, 5, 3),
            (Free, 7, 3),
            (FreeProduct, 2, 6),
            (FreeProduct, 3, 6),
            (FreeProduct, 5, 4),
            (FreeProduct, 7, 3),
        ] {
            let id = format!("infra.tower.{}.p{p}", fam.tag());
            out.push(guard(&id, || {
                let t = self.tower(fam, p, n)?;
                let consistent = t.stages.iter().all(|s| is_consistent(&s.pcp));
                t.verify_truncations()?;
                let text = t.to_text();
                let back = parse_tower(&text)?;
                let round = back == t && back.to_text() == text;
                let orders: Vec<String> = t.stages.iter().map(|s| format!("{p}^{}", s.pcp.ngens())).collect();
                Ok(CheckLine::pass_if(
                    &id,
                    consistent && round,
                    format!(
                        "stages {}: consistent {consistent}, truncations are epimorphisms, text round trip {round}",
                        orders.join(", ")
                    ),
                ))
            }));
        }
        let mut models: Vec<(String, Result<PcPresentation>)> = Vec::new();
        for (p, n) in [(3, 4), (3, 5), (3, 6), (5, 3), (5, 4)] {
            let g = maximal_class_group(p, n).and_then(|m| maxclass::to_pc(&m)).map(|m| m.pc.pcp().clone());
            models.push((format!("maxclass.p{p}.n{n}"), g));
        }
        for k in [6, 7, 8] {
            let g = NottinghamGroup::new(3, k)
                .and_then(|g| nottingham::to_pc(&g))
                .map(|m| m.pc.pcp().clone());
            models.push((format!("nottingham.p3.k{k}"), g));
        }
        models.push(("h".into(), parse_presentation(H_TEXT)));
        if let Ok(r) = self.refinement() {
            for (i, t) in r.terms.iter().enumerate() {
                models.push((format!("refinement.n5.term{i}"), Ok(t.quotient.pcp.clone())));
            }
        }
        for (name, pcp) in models {
            let id = format!("infra.presentation.{name}");
            out.push(guard(&id, || {
                let pcp = pcp?;
                let text = format_presentation(&pcp);
                let back = parse_presentation(&text)?;
                let round = back == pcp && format_presentation(&back) == text;
                let consistent = is_consistent(&pcp);
                Ok(CheckLine::pass_if(
                    &id,
                    round && consistent,
                    format!("{} generators, consistent {consistent}, text round trip {round}", pcp.ngens()),
                ))
            }));
        }
        let id = "infra.series-format";
        out.push(guard(id, || {
            let g = NottinghamGroup::new(3, 5)?;
            let ok = g
                .elements()
                .iter()
                .all(|f| f.to_string().parse::<TruncSeries>().as_ref() == Ok(f));
            Ok(CheckLine::pass_if(id, ok, "every element of N/N_5 prints and parses back"))
        }));
        let id = "infra.certificate.freeprod.p3.n5";
        out.push(guard(id, || {
            let stage = self.stage(FreeProduct, 3, 5)?;
            let g = stage.group()?;
            let (((a, b), (c, d)), _, _) = paper_structure_p3(&g, &stage.images[0], &stage.images[1], self.bound)?;
            let cert = beauville_check(&g, (&a, &b), (&c, &d));
            let text = cert.to_text(&g);
            let parsed = parse_certificate(&text)?;
            let again = parsed_to_text(&parsed)?;
            let rv = reverify_certificate(&parsed, self.bound.min(pow_u128(5, 5)))?;
            Ok(CheckLine::pass_if(
                id,
                again == text && rv.ok(),
                format!("serialized, parsed, printed identically: {}, re-verified: {}", again == text, rv.ok()),
            ))
        }));
        out
    }
}

/// Prints a parsed certificate again, through a fresh check of its pairs.
fn parsed_to_text(c: &crate::beauville::ParsedCertificate) -> Result<String> {
    let g = &c.group;
    let imgs = crate::beauville::defining_images(g)?;
    let ev = |w| crate::beauville::evaluate_word(g, &imgs, w);
    let (a, b) = (ev(&c.pair1.0)?, ev(&c.pair1.1)?);
    let (x, y) = (ev(&c.pair2.0)?, ev(&c.pair2.1)?);
    Ok(beauville_check(g, (&a, &b), (&x, &y)).to_text(g))
}

/// PASS when the structure holds and survives a round trip through its text form.
pub fn certificate_line(
    id: &str,
    g: &PcGroup,
    cert: &BeauvilleCertificate<Exps>,
    elementwise_bound: u128,
    extra: &str,
) -> Result<CheckLine> {
    let text = cert.to_text(g);
    let parsed = parse_certificate(&text)?;
    let rv = reverify_certificate(&parsed, elementwise_bound)?;
    let ok = cert.verdict && rv.ok();
    let elementwise = match rv.elementwise_disjoint {
        Some(b) => b.to_string(),
        None => "not checked".into(),
    };
    let det = |d: Option<u32>| d.map_or("-".to_string(), |d| d.to_string());
    let mut line = CheckLine::pass_if(
        id,
        ok,
        format!(
            "{extra}; dets {}/{}, {} + {} socle classes, re-verified {} (element unions disjoint: {elementwise})",
            det(cert.det1),
            det(cert.det2),
            cert.sigma1.socle_orbit.len(),
            cert.sigma2.socle_orbit.len(),
            rv.ok()
        ),
    );
    line.certificate = Some(text);
    Ok(line)
}

/// ABSENT for an exhaustive search that found nothing and refuted every class pair
/// sharing a maximal subgroup by the power-subgroup obstruction.
pub fn absence_line(id: &str, out: &SearchOutcome) -> CheckLine {
    let s = &out.stats;
    let detail = format!(
        "order {}: {} generating pairs in {} classes, {} class pairs, {} share a maximal subgroup and {} of those are refuted by the power-subgroup obstruction ({} of {} maximal subgroups obstructed), {} refuted by Σ",
        s.group_order,
        s.generating_pairs,
        s.classes,
        s.class_pairs,
        s.sharing_pairs,
        s.refuted_by_obstruction,
        s.obstruction_lines,
        s.lines,
        s.refuted_by_sigma
    );
    if !out.exhaustive {
        return CheckLine::new(id, Status::Skip, "group exceeds the enumeration bound");
    }
    if out.certificate.is_some() {
        return CheckLine::new(id, Status::Fail, format!("structure found; {detail}"));
    }
    if s.sharing_pairs != s.refuted_by_obstruction {
        return CheckLine::new(id, Status::Fail, format!("obstruction did not refute every sharing pair; {detail}"));
    }
    CheckLine::new(id, Status::Absent, detail)
}

fn error_line(id: &str, e: &Error) -> CheckLine {
    match e {
        Error::Bound { size, bound } => CheckLine::new(id, Status::Skip, format!("order {size} exceeds the bound {bound}")),
        other => CheckLine::new(id, Status::Fail, format!("error: {other}")),
    }
}

fn guard(id: &str, f: impl FnOnce() -> Result<CheckLine>) -> CheckLine {
    f().unwrap_or_else(|e| error_line(id, &e))
}

/// Text report: `<STATUS> <check-id> <detail>` per check, certificate lines prefixed by
/// `CERT <check-id> `, section headers and totals as `#` comments.
pub fn render_text(header: &str, sections: &[Section], timings: bool) -> String {
    let mut s = format!("# {header}\n");
    for sec in sections {
        if timings {
            s.push_str(&format!("# section {} ({:.2}s)\n", sec.name, sec.elapsed.as_secs_f64()));
        } else {
            s.push_str(&format!("# section {}\n", sec.name));
        }
        for l in &sec.lines {
            s.push_str(&format!("{} {} {}\n", l.status, l.id, l.detail));
            if let Some(c) = &l.certificate {
                for cl in c.lines() {
                    s.push_str(&format!("CERT {} {}\n", l.id, cl));
                }
            }
        }
    }
    let (fail, total) = totals(sections);
    s.push_str(&format!("# {total} checks, {fail} failed\n"));
    s
}

/// (failed, total).
pub fn totals(sections: &[Section]) -> (usize, usize) {
    let all = sections.iter().flat_map(|s| &s.lines);
    let total = all.clone().count();
    (all.filter(|l| l.status == Status::Fail).count(), total)
}
