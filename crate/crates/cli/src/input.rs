//! Group arguments: `free:P:N`, `freeprod:P:N`, `h`, or a file with a presentation or a
//! tower.

use anyhow::{anyhow, bail, Context, Result};

use pcforge::beauville::defining_images;
use pcforge::checks::group_h;
use pcforge::group::Group;
use pcforge::pcp::{parse_presentation, Exps, PcGroup};
use pcforge::pquotient::{parse_tower, FpPresentation, QuotientTower};

pub struct GroupInput {
    pub group: PcGroup,
    /// Images of the defining generators `u`, `v`.
    pub images: Vec<Exps>,
}

impl GroupInput {
    pub fn load(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if let [fam @ ("free" | "freeprod"), p, n] = parts.as_slice() {
            let p: u32 = p.parse().context("bad prime")?;
            let n: u32 = n.parse().context("bad stage")?;
            let fp = if *fam == "free" {
                FpPresentation::free()
            } else {
                FpPresentation::free_product(p)
            };
            let tower = QuotientTower::compute(&fp, p, n, 64)?;
            let stage = tower.stage(n).ok_or_else(|| anyhow!("the tower stops at n = {}", tower.last().n))?;
            return Ok(GroupInput {
                group: stage.group()?,
                images: stage.images.clone(),
            });
        }
        let group = if spec == "h" {
            group_h()?
        } else {
            let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
            if text.trim_start().starts_with("tower") {
                let t = parse_tower(&text)?;
                let s = t.last();
                return Ok(GroupInput {
                    group: s.group()?,
                    images: s.images.clone(),
                });
            }
            PcGroup::new(parse_presentation(&text)?)?
        };
        let images = defining_images(&group)?;
        if images.len() != 2 {
            bail!("expected two defining generators, found {}", images.len());
        }
        Ok(GroupInput { group, images })
    }
}

/// Parses `"u,v;uv2,uv4"`: two pairs of words in `u`, `v` (also `x`, `y`), each letter
/// optionally followed by a signed exponent.
pub fn parse_pairs(g: &PcGroup, u: &Exps, v: &Exps, spec: &str) -> Result<((Exps, Exps), (Exps, Exps))> {
    let pairs: Vec<&str> = spec.split(';').collect();
    if pairs.len() != 2 {
        bail!("expected two pairs separated by `;`");
    }
    let mut out = Vec::new();
    for pair in pairs {
        let words: Vec<&str> = pair.split(',').collect();
        if words.len() != 2 {
            bail!("expected two words separated by `,` in `{pair}`");
        }
        for w in words {
            out.push(eval_word(g, u, v, w.trim())?);
        }
    }
    let mut it = out.into_iter();
    let mut next = || it.next().unwrap();
    Ok(((next(), next()), (next(), next())))
}

fn eval_word(g: &PcGroup, u: &Exps, v: &Exps, w: &str) -> Result<Exps> {
    let chars: Vec<char> = w.chars().filter(|c| !c.is_whitespace() && *c != '*' && *c != '^').collect();
    let mut acc = g.identity();
    let mut i = 0;
    while i < chars.len() {
        let base = match chars[i] {
            'u' | 'x' => u,
            'v' | 'y' => v,
            c => bail!("unexpected `{c}` in `{w}`"),
        };
        i += 1;
        let start = i;
        if i < chars.len() && chars[i] == '-' {
            i += 1;
        }
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let e: i64 = if i == start {
            1
        } else {
            chars[start..i].iter().collect::<String>().parse().with_context(|| format!("bad exponent in `{w}`"))?
        };
        acc = g.mul(&acc, &g.pow(base, e));
    }
    Ok(acc)
}
