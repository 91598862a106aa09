//! Line-oriented text format for presentations.
//!
//! ```text
//! pcp p=3 n=5
//! w 1 1
//! pow 1 = 1
//! comm 2 1 = g3^1
//! def 3 = comm 2 1 corr 1
//! ```
//!
//! Generator indices are 1-based. Words are `gI^E` factors joined by `*`; `1` is the
//! empty word. Every `w` and `pow` line is printed; `comm` lines only for nontrivial
//! commutators; `def` lines record how each generator was defined (`gen <f>` refers to
//! the f-th defining generator, 1-based). Missing `def` lines are inferred on parsing.

use super::presentation::{Definition, PcPresentation, Word};
use crate::error::{Error, Result};

pub fn format_word(w: &Word) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter()
        .map(|&(g, e)| format!("g{}^{}", g + 1, e))
        .collect::<Vec<_>>()
        .join("*")
}

pub fn parse_word(s: &str, line: usize) -> Result<Word> {
    let s = s.trim();
    if s == "1" {
        return Ok(Vec::new());
    }
    let err = |msg: String| Error::Parse { line, msg };
    let mut w = Vec::new();
    for factor in s.split('*') {
        let factor = factor.trim();
        let rest = factor
            .strip_prefix('g')
            .ok_or_else(|| err(format!("bad factor `{factor}`")))?;
        let (g, e) = match rest.split_once('^') {
            Some((g, e)) => (g, e),
            None => (rest, "1"),
        };
        let g: usize = g.parse().map_err(|_| err(format!("bad generator in `{factor}`")))?;
        let e: u8 = e.parse().map_err(|_| err(format!("bad exponent in `{factor}`")))?;
        if g == 0 {
            return Err(err("generators are 1-based".into()));
        }
        w.push((g - 1, e));
    }
    Ok(w)
}

fn format_definition(k: usize, d: &Definition) -> String {
    match d {
        Definition::Image { gen, correction } => {
            format!("def {} = gen {} corr {}", k + 1, gen + 1, format_word(correction))
        }
        Definition::Power { base, correction } => {
            format!("def {} = pow {} corr {}", k + 1, base + 1, format_word(correction))
        }
        Definition::Commutator { hi, lo, correction } => format!(
            "def {} = comm {} {} corr {}",
            k + 1,
            hi + 1,
            lo + 1,
            format_word(correction)
        ),
    }
}

pub fn format_presentation(pcp: &PcPresentation) -> String {
    let m = pcp.ngens();
    let mut out = format!("pcp p={} n={}\n", pcp.p(), m);
    for i in 0..m {
        out.push_str(&format!("w {} {}\n", i + 1, pcp.weight(i)));
    }
    for i in 0..m {
        out.push_str(&format!("pow {} = {}\n", i + 1, format_word(pcp.power_rel(i))));
    }
    for j in 0..m {
        for i in 0..j {
            let c = pcp.comm_rel(j, i);
            if !c.is_empty() {
                out.push_str(&format!("comm {} {} = {}\n", j + 1, i + 1, format_word(c)));
            }
        }
    }
    for (k, d) in pcp.definitions().iter().enumerate() {
        out.push_str(&format_definition(k, d));
        out.push('\n');
    }
    out
}

fn parse_index(s: &str, line: usize, m: usize) -> Result<usize> {
    let i: usize = s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad index `{s}`"),
    })?;
    if i == 0 || i > m {
        return Err(Error::Parse {
            line,
            msg: format!("index {i} out of range 1..={m}"),
        });
    }
    Ok(i - 1)
}

/// Parses lines of one presentation block. Lines that do not belong to the format
/// (anything other than `pcp`, `w`, `pow`, `comm`, `def`, blank, `#` comments) are errors.
pub fn parse_presentation(text: &str) -> Result<PcPresentation> {
    parse_presentation_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

pub(crate) fn parse_presentation_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<PcPresentation> {
    let mut header: Option<(u32, usize)> = None;
    let mut weights: Vec<Option<u32>> = Vec::new();
    let mut power: Vec<Word> = Vec::new();
    let mut comm: Vec<Vec<Word>> = Vec::new();
    let mut defs: Vec<Option<Definition>> = Vec::new();
    for (ln, raw) in lines {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let perr = |msg: &str| Error::Parse {
            line: ln,
            msg: msg.to_string(),
        };
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks[0] == "pcp" {
            if header.is_some() {
                return Err(perr("duplicate header"));
            }
            let mut p = None;
            let mut n = None;
            for t in &toks[1..] {
                if let Some(v) = t.strip_prefix("p=") {
                    p = v.parse().ok();
                } else if let Some(v) = t.strip_prefix("n=") {
                    n = v.parse().ok();
                }
            }
            let (p, n) = p.zip(n).ok_or_else(|| perr("header needs p= and n="))?;
            header = Some((p, n));
            weights = vec![None; n];
            power = vec![Vec::new(); n];
            comm = (0..n).map(|j| vec![Vec::new(); j]).collect();
            defs = vec![None; n];
            continue;
        }
        let (_, m) = header.ok_or_else(|| perr("missing `pcp` header"))?;
        match toks[0] {
            "w" => {
                if toks.len() != 3 {
                    return Err(perr("expected `w <i> <weight>`"));
                }
                let i = parse_index(toks[1], ln, m)?;
                weights[i] = Some(toks[2].parse().map_err(|_| perr("bad weight"))?);
            }
            "pow" => {
                let (lhs, rhs) = l.split_once('=').ok_or_else(|| perr("missing `=`"))?;
                let lt: Vec<&str> = lhs.split_whitespace().collect();
                if lt.len() != 2 {
                    return Err(perr("expected `pow <i> = <word>`"));
                }
                let i = parse_index(lt[1], ln, m)?;
                power[i] = parse_word(rhs, ln)?;
            }
            "comm" => {
                let (lhs, rhs) = l.split_once('=').ok_or_else(|| perr("missing `=`"))?;
                let lt: Vec<&str> = lhs.split_whitespace().collect();
                if lt.len() != 3 {
                    return Err(perr("expected `comm <j> <i> = <word>`"));
                }
                let j = parse_index(lt[1], ln, m)?;
                let i = parse_index(lt[2], ln, m)?;
                if j <= i {
                    return Err(perr("commutator needs j > i"));
                }
                comm[j][i] = parse_word(rhs, ln)?;
            }
            "def" => {
                let (lhs, rhs) = l.split_once('=').ok_or_else(|| perr("missing `=`"))?;
                let lt: Vec<&str> = lhs.split_whitespace().collect();
                if lt.len() != 2 {
                    return Err(perr("expected `def <k> = ...`"));
                }
                let k = parse_index(lt[1], ln, m)?;
                let (kind, corr) = rhs.split_once("corr").ok_or_else(|| perr("missing `corr`"))?;
                let correction = parse_word(corr, ln)?;
                let kt: Vec<&str> = kind.split_whitespace().collect();
                let d = match kt.as_slice() {
                    ["gen", f] => {
                        let f: usize = f.parse().map_err(|_| perr("bad defining generator"))?;
                        if f == 0 {
                            return Err(perr("defining generators are 1-based"));
                        }
                        Definition::Image { gen: f - 1, correction }
                    }
                    ["pow", i] => Definition::Power {
                        base: parse_index(i, ln, m)?,
                        correction,
                    },
                    ["comm", j, i] => Definition::Commutator {
                        hi: parse_index(j, ln, m)?,
                        lo: parse_index(i, ln, m)?,
                        correction,
                    },
                    _ => return Err(perr("unknown definition kind")),
                };
                defs[k] = Some(d);
            }
            other => return Err(perr(&format!("unknown directive `{other}`"))),
        }
    }
    let (p, _) = header.ok_or(Error::Parse {
        line: 0,
        msg: "empty presentation".into(),
    })?;
    let weights = weights
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            w.ok_or(Error::Parse {
                line: 0,
                msg: format!("missing weight for g{}", i + 1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let definitions = if defs.iter().all(Option::is_some) {
        Some(defs.into_iter().map(Option::unwrap).collect())
    } else if defs.iter().all(Option::is_none) {
        None
    } else {
        return Err(Error::Parse {
            line: 0,
            msg: "definitions must be given for all generators or none".into(),
        });
    };
    PcPresentation::new(p, weights, power, comm, definitions)
}
