use super::fp::{format_free_word, FpPresentation, GENERATOR_NAMES};
use super::hom::Homomorphism;
use super::{next_stage, Stage};
use crate::error::{Error, Result};
use crate::pcp::format::{format_word, parse_presentation_lines, parse_word};
use crate::pcp::presentation::{exps_to_word, word_to_exps};
use crate::pcp::PcGroup;

/// Stages `F/λ_2(F), ..., F/λ_N(F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientTower {
    pub p: u32,
    pub fp: FpPresentation,
    pub stages: Vec<Stage>,
    /// Set when a cover step produced no new generators before the requested stage.
    pub stabilized: bool,
}

impl QuotientTower {
    pub fn compute(fp: &FpPresentation, p: u32, n: u32, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("stages start at n = 2".into()));
        }
        if !crate::pcp::presentation::is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let mut stages = vec![Stage::initial(fp, p)?];
        let mut stabilized = false;
        while stages.last().unwrap().n < n {
            match next_stage(fp, stages.last().unwrap(), cap)? {
                Some(s) => stages.push(s),
                None => {
                    stabilized = true;
                    break;
                }
            }
        }
        Ok(QuotientTower {
            p,
            fp: fp.clone(),
            stages,
            stabilized,
        })
    }

    pub fn stage(&self, n: u32) -> Option<&Stage> {
        self.stages.iter().find(|s| s.n == n)
    }

    pub fn last(&self) -> &Stage {
        self.stages.last().expect("tower has a stage")
    }

    /// Checks that dropping the top weight layer of stage `n + 1` is a homomorphism onto
    /// stage `n` compatible with the images of `x`, `y`.
    pub fn verify_truncations(&self) -> Result<()> {
        for w in self.stages.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let gl = PcGroup::new(lo.pcp.clone())?;
            let gh = PcGroup::new(hi.pcp.clone())?;
            let m = lo.pcp.ngens();
            let images = (0..hi.pcp.ngens())
                .map(|i| if i < m { gl.unit(i) } else { vec![0; m] })
                .collect();
            let h = Homomorphism::from_pc_images(&gh, &gl, images)?;
            for (a, b) in hi.images.iter().zip(&lo.images) {
                if h.apply(a) != *b {
                    return Err(Error::RelationViolated {
                        relation: format!("truncation of stage {}", hi.n),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let rel = if self.fp.relators.is_empty() {
            "none".to_string()
        } else {
            self.fp
                .relators
                .iter()
                .map(format_free_word)
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = format!("tower p={} relators={}\n", self.p, rel);
        for s in &self.stages {
            out.push_str(&stage_to_text(s));
        }
        if self.stabilized {
            out.push_str("stabilized\n");
        }
        out
    }
}

pub fn stage_to_text(s: &Stage) -> String {
    let mut out = format!("stage n={}\n", s.n);
    out.push_str(&crate::pcp::format_presentation(&s.pcp));
    for (f, img) in s.images.iter().enumerate() {
        out.push_str(&format!(
            "img {} = {}\n",
            GENERATOR_NAMES[f],
            format_word(&exps_to_word(img))
        ));
    }
    out
}

/// Parses the output of [`QuotientTower::to_text`].
pub fn parse_tower(text: &str) -> Result<QuotientTower> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let perr = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut it = lines.iter().filter(|(_, l)| !l.trim().is_empty());
    let &(ln, head) = it.next().ok_or_else(|| perr(0, "empty tower"))?;
    let mut p = None;
    let mut fp = None;
    for t in head.split_whitespace().skip(1) {
        if let Some(v) = t.strip_prefix("p=") {
            p = v.parse().ok();
        } else if let Some(v) = t.strip_prefix("relators=") {
            fp = Some(if v == "none" {
                FpPresentation::free()
            } else {
                FpPresentation::parse(v)?
            });
        }
    }
    if !head.starts_with("tower") {
        return Err(perr(ln, "expected `tower` header"));
    }
    let p = p.ok_or_else(|| perr(ln, "missing p="))?;
    let fp = fp.ok_or_else(|| perr(ln, "missing relators="))?;
    let mut stages = Vec::new();
    let mut stabilized = false;
    let mut block: Vec<(usize, &str)> = Vec::new();
    let mut current_n: Option<u32> = None;
    let flush = |n: Option<u32>, block: &mut Vec<(usize, &str)>, stages: &mut Vec<Stage>| -> Result<()> {
        let Some(n) = n else { return Ok(()) };
        let mut images = Vec::new();
        let mut pres = Vec::new();
        for &(ln, l) in block.iter() {
            if let Some(rest) = l.trim().strip_prefix("img ") {
                let (_, w) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(ln, "expected `img <name> = <word>`"))?;
                images.push(parse_word(w, ln)?);
            } else {
                pres.push((ln, l));
            }
        }
        let pcp = parse_presentation_lines(pres.into_iter())?;
        let m = pcp.ngens();
        let images = images.iter().map(|w| word_to_exps(w, m)).collect();
        stages.push(Stage { n, pcp, images });
        block.clear();
        Ok(())
    };
    for &(ln, l) in it {
        let t = l.trim();
        if let Some(v) = t.strip_prefix("stage n=") {
            flush(current_n, &mut block, &mut stages)?;
            current_n = Some(v.parse().map_err(|_| perr(ln, "bad stage index"))?);
        } else if t == "stabilized" {
            stabilized = true;
        } else {
            block.push((ln, l));
        }
    }
    flush(current_n, &mut block, &mut stages)?;
    Ok(QuotientTower {
        p,
        fp,
        stages,
        stabilized,
    })
}
