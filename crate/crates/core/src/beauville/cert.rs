//! Plain-text certificates. Layout:
//!
//! ```text
//! certificate
//! pcp p=3 n=5
//! ...                      (presentation with `def` lines)
//! end
//! pair 1 = <xy-word> ; <xy-word>
//! pair 2 = <xy-word> ; <xy-word>
//! det 1 = <d|none>
//! det 2 = <d|none>
//! orbit 1 = <pc-word> ; <pc-word> ; ...
//! orbit 2 = ...
//! verdict true
//! ```
//!
//! Pair entries are words in the defining generators `x`, `y`; orbit entries are the
//! canonical generators of the prime-order subgroups, as PC normal words.

use std::collections::BTreeSet;

use super::{beauville_check, sigma_elements, BeauvilleCertificate};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Group};
use crate::pcp::presentation::{exps_to_word, word_to_exps};
use crate::pcp::{format_presentation, format_word, parse_word, Definition, Exps, PcGroup};
use crate::pquotient::{format_free_word, parse_free_word, FreeWord};

fn push_syllable(w: &mut FreeWord, g: usize, e: i64) {
    if e == 0 {
        return;
    }
    if let Some(last) = w.last_mut() {
        if last.0 == g {
            last.1 += e;
            if last.1 == 0 {
                w.pop();
            }
            return;
        }
    }
    w.push((g, e));
}

fn concat(a: &FreeWord, b: &FreeWord) -> FreeWord {
    let mut w = a.clone();
    for &(g, e) in b {
        push_syllable(&mut w, g, e);
    }
    w
}

fn inverse(a: &FreeWord) -> FreeWord {
    a.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

fn power(a: &FreeWord, k: u32) -> FreeWord {
    (0..k).fold(Vec::new(), |acc, _| concat(&acc, a))
}

/// Each PC generator as a word in the defining generators, read off the definitions.
pub fn generator_words(g: &PcGroup) -> Vec<FreeWord> {
    let pcp = g.pcp();
    let mut words: Vec<FreeWord> = Vec::with_capacity(pcp.ngens());
    for d in pcp.definitions() {
        let lhs = match d {
            Definition::Image { gen, .. } => vec![(*gen, 1)],
            Definition::Power { base, .. } => power(&words[*base], pcp.p()),
            Definition::Commutator { hi, lo, .. } => {
                let (a, b) = (&words[*hi], &words[*lo]);
                concat(&concat(&inverse(a), &inverse(b)), &concat(a, b))
            }
        };
        let corr = pc_word_to_free(&words, d.correction());
        words.push(concat(&inverse(&corr), &lhs));
    }
    words
}

fn pc_word_to_free(words: &[FreeWord], w: &[(usize, u8)]) -> FreeWord {
    w.iter()
        .fold(Vec::new(), |acc, &(k, e)| concat(&acc, &power(&words[k], e as u32)))
}

/// An element in normal form, rewritten as a word in the defining generators.
pub fn element_word(words: &[FreeWord], e: &[u8]) -> FreeWord {
    pc_word_to_free(words, &exps_to_word(e))
}

/// Images of the defining generators in the PC group: `x_f = corr * g_k` for the
/// generator `g_k` defined as the image of `x_f`.
pub fn defining_images(g: &PcGroup) -> Result<Vec<Exps>> {
    let mut out: Vec<Option<Exps>> = Vec::new();
    for (k, d) in g.pcp().definitions().iter().enumerate() {
        if let Definition::Image { gen, correction } = d {
            if out.len() <= *gen {
                out.resize(gen + 1, None);
            }
            out[*gen] = Some(g.mul(&g.word_elem(correction), &g.unit(k)));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(f, x)| x.ok_or_else(|| Error::Invalid(format!("no generator defined by defining generator {}", f + 1))))
        .collect()
}

pub fn evaluate_word(g: &PcGroup, images: &[Exps], w: &FreeWord) -> Result<Exps> {
    let mut acc = g.identity();
    for &(f, e) in w {
        let x = images.get(f).ok_or(Error::BadGenerator(f))?;
        acc = g.mul(&acc, &g.pow(x, e));
    }
    Ok(acc)
}

fn orbit_line(set: &BTreeSet<Exps>) -> String {
    set.iter()
        .map(|e| format_word(&exps_to_word(e)))
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn det_text(d: Option<u32>) -> String {
    d.map_or("none".into(), |d| d.to_string())
}

impl BeauvilleCertificate<Exps> {
    pub fn to_text(&self, g: &PcGroup) -> String {
        let words = generator_words(g);
        let w = |e: &Exps| format_free_word(&element_word(&words, e));
        let mut s = String::from("certificate\n");
        s.push_str(&format_presentation(g.pcp()));
        s.push_str("end\n");
        s.push_str(&format!("pair 1 = {} ; {}\n", w(&self.pair1.0), w(&self.pair1.1)));
        s.push_str(&format!("pair 2 = {} ; {}\n", w(&self.pair2.0), w(&self.pair2.1)));
        s.push_str(&format!("det 1 = {}\n", det_text(self.det1)));
        s.push_str(&format!("det 2 = {}\n", det_text(self.det2)));
        s.push_str(&format!("orbit 1 = {}\n", orbit_line(&self.sigma1.socle_orbit)));
        s.push_str(&format!("orbit 2 = {}\n", orbit_line(&self.sigma2.socle_orbit)));
        s.push_str(&format!("verdict {}\n", self.verdict));
        s
    }
}

/// A certificate as read back from text, before any checking.
#[derive(Clone, Debug)]
pub struct ParsedCertificate {
    pub group: PcGroup,
    pub pair1: (FreeWord, FreeWord),
    pub pair2: (FreeWord, FreeWord),
    pub det1: Option<u32>,
    pub det2: Option<u32>,
    pub orbit1: BTreeSet<Exps>,
    pub orbit2: BTreeSet<Exps>,
    pub verdict: bool,
}

pub fn parse_certificate(text: &str) -> Result<ParsedCertificate> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let bad = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    match lines.next() {
        Some((_, "certificate")) => {}
        _ => return Err(bad(1, "expected `certificate`")),
    }
    let mut body = Vec::new();
    for (i, l) in lines.by_ref() {
        if l == "end" {
            break;
        }
        body.push((i, l));
    }
    let pcp = crate::pcp::format::parse_presentation_lines(body.into_iter())?;
    let group = PcGroup::new(pcp)?;
    let m = group.ngens();
    let mut pairs: [Option<(FreeWord, FreeWord)>; 2] = [None, None];
    let mut dets: [Option<u32>; 2] = [None, None];
    let mut orbits: [Option<BTreeSet<Exps>>; 2] = [None, None];
    let mut verdict = None;
    for (i, l) in lines {
        if l.is_empty() {
            continue;
        }
        if let Some(v) = l.strip_prefix("verdict ") {
            verdict = Some(match v {
                "true" => true,
                "false" => false,
                _ => return Err(bad(i, "verdict must be true or false")),
            });
            continue;
        }
        let (head, rhs) = l.split_once('=').ok_or_else(|| bad(i, "expected `=`"))?;
        let mut hw = head.split_whitespace();
        let (kind, idx) = (hw.next().unwrap_or(""), hw.next().unwrap_or(""));
        let slot = match idx {
            "1" => 0,
            "2" => 1,
            _ => return Err(bad(i, "index must be 1 or 2")),
        };
        let rhs = rhs.trim();
        match kind {
            "pair" => {
                let (a, b) = rhs.split_once(';').ok_or_else(|| bad(i, "pair needs two words"))?;
                pairs[slot] = Some((parse_free_word(a.trim())?, parse_free_word(b.trim())?));
            }
            "det" => {
                dets[slot] = match rhs {
                    "none" => None,
                    d => Some(d.parse().map_err(|_| bad(i, "bad determinant"))?),
                }
            }
            "orbit" => {
                let mut set = BTreeSet::new();
                for w in rhs.split(';') {
                    let w = parse_word(w.trim(), i)?;
                    if w.iter().any(|&(k, _)| k >= m) {
                        return Err(bad(i, "orbit word uses an unknown generator"));
                    }
                    set.insert(word_to_exps(&w, m));
                }
                orbits[slot] = Some(set);
            }
            _ => return Err(bad(i, "unknown line")),
        }
    }
    let [p1, p2] = pairs;
    let [o1, o2] = orbits;
    Ok(ParsedCertificate {
        group,
        pair1: p1.ok_or_else(|| bad(0, "missing pair 1"))?,
        pair2: p2.ok_or_else(|| bad(0, "missing pair 2"))?,
        det1: dets[0],
        det2: dets[1],
        orbit1: o1.ok_or_else(|| bad(0, "missing orbit 1"))?,
        orbit2: o2.ok_or_else(|| bad(0, "missing orbit 2"))?,
        verdict: verdict.ok_or_else(|| bad(0, "missing verdict"))?,
    })
}

/// Outcome of re-checking a parsed certificate from scratch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reverification {
    pub generates: bool,
    pub dets_match: bool,
    pub orbits_match: bool,
    pub orbits_disjoint: bool,
    /// Σ-sets as element unions meet only in the identity; `None` above the bound.
    pub elementwise_disjoint: Option<bool>,
    pub verdict_match: bool,
}

impl Reverification {
    pub fn ok(&self) -> bool {
        self.generates
            && self.dets_match
            && self.orbits_match
            && self.orbits_disjoint
            && self.elementwise_disjoint != Some(false)
            && self.verdict_match
    }
}

/// Recomputes generation (by closure), determinants, socle orbits and, for groups of
/// order at most `bound`, the element unions.
pub fn reverify_certificate(c: &ParsedCertificate, bound: u128) -> Result<Reverification> {
    let g = &c.group;
    let imgs = defining_images(g)?;
    let ev = |w: &FreeWord| evaluate_word(g, &imgs, w);
    let (a, b) = (ev(&c.pair1.0)?, ev(&c.pair1.1)?);
    let (x, y) = (ev(&c.pair2.0)?, ev(&c.pair2.1)?);
    let fresh = beauville_check(g, (&a, &b), (&x, &y));
    let closure_gen = |u: &Exps, v: &Exps| {
        crate::pcp::SubgroupBasis::closure(g, &[u.clone(), v.clone()]).len() == g.ngens()
    };
    let generates = closure_gen(&a, &b) && closure_gen(&x, &y);
    let orbits_disjoint = c.orbit1.is_disjoint(&c.orbit2);
    let elementwise_disjoint = if g.size() <= bound {
        let s1 = sigma_elements(g, &a, &b);
        let s2 = sigma_elements(g, &x, &y);
        Some(s1.intersection(&s2).count() == 1)
    } else {
        None
    };
    Ok(Reverification {
        generates,
        dets_match: fresh.det1 == c.det1 && fresh.det2 == c.det2,
        orbits_match: fresh.sigma1.socle_orbit == c.orbit1 && fresh.sigma2.socle_orbit == c.orbit2,
        orbits_disjoint,
        elementwise_disjoint,
        verdict_match: fresh.verdict == c.verdict && c.verdict == (generates && orbits_disjoint),
    })
}
