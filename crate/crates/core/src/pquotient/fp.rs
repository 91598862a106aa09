use crate::error::{Error, Result};

/// A free word in the defining generators: `(generator, exponent)` syllables, exponents
/// may be negative.
pub type FreeWord = Vec<(usize, i64)>;

/// A finitely presented group on two generators `x`, `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPresentation {
    pub relators: Vec<FreeWord>,
}

pub const GENERATOR_NAMES: [char; 2] = ['x', 'y'];

impl FpPresentation {
    pub fn ngens(&self) -> usize {
        2
    }

    /// The free group on `x`, `y`.
    pub fn free() -> Self {
        FpPresentation { relators: Vec::new() }
    }

    /// `C_p * C_p = <x, y | x^p, y^p>`.
    pub fn free_product(p: u32) -> Self {
        FpPresentation {
            relators: vec![vec![(0, p as i64)], vec![(1, p as i64)]],
        }
    }

    /// Parses comma-separated relators, each a product of syllables `x`, `y^3`, `x^-1`
    /// (`X`, `Y` are shorthand for inverses), optionally joined by `*`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut relators = Vec::new();
        for r in text.split(',') {
            let r = r.trim();
            if r.is_empty() {
                continue;
            }
            relators.push(parse_free_word(r)?);
        }
        Ok(FpPresentation { relators })
    }
}

pub fn parse_free_word(s: &str) -> Result<FreeWord> {
    let bad = |m: String| Error::Parse { line: 0, msg: m };
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    let mut w = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (g, sign) = match chars[i] {
            'x' => (0, 1),
            'y' => (1, 1),
            'X' => (0, -1),
            'Y' => (1, -1),
            '1' if chars.len() == 1 => return Ok(Vec::new()),
            c => return Err(bad(format!("unexpected `{c}` in `{s}`"))),
        };
        i += 1;
        let mut e = 1i64;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && chars[i] == '-' {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = chars[start..i].iter().collect();
            e = t.parse().map_err(|_| bad(format!("bad exponent in `{s}`")))?;
        }
        w.push((g, sign * e));
    }
    Ok(w)
}

pub fn format_free_word(w: &FreeWord) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|&(g, e)| {
            if e == 1 {
                GENERATOR_NAMES[g].to_string()
            } else {
                format!("{}^{}", GENERATOR_NAMES[g], e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_relators() {
        let fp = FpPresentation::parse("x^3, y^3, X*Y*x*y").unwrap();
        assert_eq!(fp.relators.len(), 3);
        assert_eq!(fp.relators[2], vec![(0, -1), (1, -1), (0, 1), (1, 1)]);
        assert_eq!(FpPresentation::parse("x^3, y^3").unwrap(), FpPresentation::free_product(3));
        assert!(FpPresentation::parse("z").is_err());
    }

    #[test]
    fn word_round_trip() {
        let w = parse_free_word("x^-2*y*x^5").unwrap();
        assert_eq!(parse_free_word(&format_free_word(&w)).unwrap(), w);
    }
}
