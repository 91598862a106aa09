//! Lower exponent-p central quotients `F/λ_n(F)` of finitely presented 2-generator
//! groups: p-covering group, consistency enforcement, relator imposition.

mod fp;
mod hom;
mod tower;

pub use fp::{format_free_word, parse_free_word, FpPresentation, FreeWord, GENERATOR_NAMES};
pub use hom::{kernel_meet_layer, Homomorphism};
pub use tower::{parse_tower, QuotientTower};

use crate::error::{Error, Result};
use crate::gf::{Echelon, PivotOrder};
use crate::group::Group;
use crate::par;
use crate::pcp::consistency::{evaluate, test_words};
use crate::pcp::presentation::{exps_to_word, word_to_exps};
use crate::pcp::{Definition, Exps, FromTheLeft, PcGroup, PcPresentation, Word};

/// Default cap on the number of PC generators of a computed stage.
pub const DEFAULT_GENERATOR_CAP: usize = 40;

/// `F/λ_n(F)` together with the images of the defining generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub n: u32,
    pub pcp: PcPresentation,
    pub images: Vec<Exps>,
}

impl Stage {
    pub fn group(&self) -> Result<PcGroup> {
        PcGroup::new(self.pcp.clone())
    }

    /// `F/λ_2(F)`: the exponent-sum matrix of the relators, reduced mod p.
    pub fn initial(fp: &FpPresentation, p: u32) -> Result<Stage> {
        let k = fp.ngens();
        let rows: Vec<Vec<u32>> = fp
            .relators
            .iter()
            .map(|r| {
                let mut v = vec![0i64; k];
                for &(g, e) in r {
                    v[g] += e;
                }
                v.iter().map(|&s| s.rem_euclid(p as i64) as u32).collect()
            })
            .collect();
        let ech = Echelon::from_rows(p, k, &rows, PivotOrder::Lowest);
        let (free, images) = ech.quotient_map();
        let d = free.len();
        let defs = free
            .iter()
            .map(|&f| Definition::Image {
                gen: f,
                correction: Vec::new(),
            })
            .collect();
        let pcp = PcPresentation::new(
            p,
            vec![1; d],
            vec![Vec::new(); d],
            (0..d).map(|j| vec![Vec::new(); j]).collect(),
            Some(defs),
        )?;
        let images = images
            .into_iter()
            .map(|v| v.into_iter().map(|x| x as u8).collect())
            .collect();
        Ok(Stage { n: 2, pcp, images })
    }

    /// Evaluates a free word in the defining generators.
    pub fn evaluate(&self, g: &PcGroup, w: &FreeWord) -> Result<Exps> {
        evaluate_free_word(g, &self.images, w)
    }
}

pub(crate) fn evaluate_free_word(g: &PcGroup, images: &[Exps], w: &FreeWord) -> Result<Exps> {
    let mut acc = g.identity();
    for &(gen, e) in w {
        let img = images.get(gen).ok_or(Error::BadGenerator(gen))?;
        let x = g.try_pow(img, e)?;
        acc = g.try_mul(&acc, &x)?;
    }
    Ok(acc)
}

/// Which relation of the covered group a tail generator was attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TailSource {
    Power(usize),
    Commutator(usize, usize),
    Image(usize),
}

/// A presentation of a central extension of `G` by the tail generators, which carry
/// weight `class(G) + 1` and sit after the generators of `G`.
#[derive(Clone, Debug)]
pub struct Cover {
    pub pcp: PcPresentation,
    /// Number of generators of `G`.
    pub m: usize,
    pub tails: Vec<TailSource>,
    /// Lifted images of the defining generators.
    pub images: Vec<Exps>,
}

impl Cover {
    pub fn ntails(&self) -> usize {
        self.tails.len()
    }
}

fn is_definition(defs: &[Definition], src: TailSource) -> bool {
    defs.iter().any(|d| match (d, src) {
        (Definition::Power { base, .. }, TailSource::Power(i)) => *base == i,
        (Definition::Commutator { hi, lo, .. }, TailSource::Commutator(j, i)) => {
            *hi == j && *lo == i
        }
        (Definition::Image { gen, .. }, TailSource::Image(f)) => *gen == f,
        _ => false,
    })
}

/// The p-covering presentation of `pcp` with no defining-generator images.
pub fn p_cover(pcp: &PcPresentation) -> Result<Cover> {
    p_cover_with_images(pcp, &[])
}

/// Adds a tail to every power relation, every commutator relation `[g_j, g_i]` with
/// `w_i + w_j <= class + 1` and every defining-generator image, except where the relation
/// is the definition of a generator.
pub fn p_cover_with_images(pcp: &PcPresentation, images: &[Exps]) -> Result<Cover> {
    let m = pcp.ngens();
    let c = pcp.class();
    let defs = pcp.definitions();
    let mut tails = Vec::new();
    for i in 0..m {
        if !is_definition(defs, TailSource::Power(i)) {
            tails.push(TailSource::Power(i));
        }
    }
    for j in 0..m {
        for i in 0..j {
            if pcp.weight(i) + pcp.weight(j) <= c + 1
                && !is_definition(defs, TailSource::Commutator(j, i))
            {
                tails.push(TailSource::Commutator(j, i));
            }
        }
    }
    for f in 0..images.len() {
        if !is_definition(defs, TailSource::Image(f)) {
            tails.push(TailSource::Image(f));
        }
    }
    let t = tails.len();
    let mut weights = pcp.weights().to_vec();
    weights.extend(std::iter::repeat_n(c + 1, t));
    let mut power: Vec<Word> = (0..m).map(|i| pcp.power_rel(i).clone()).collect();
    power.extend(std::iter::repeat_n(Vec::new(), t));
    let mut comm: Vec<Vec<Word>> = (0..m)
        .map(|j| (0..j).map(|i| pcp.comm_rel(j, i).clone()).collect())
        .collect();
    for j in m..m + t {
        comm.push(vec![Vec::new(); j]);
    }
    let mut lifted: Vec<Exps> = images
        .iter()
        .map(|e| {
            let mut v = e.clone();
            v.resize(m + t, 0);
            v
        })
        .collect();
    let mut definitions = defs.to_vec();
    for (k, &src) in tails.iter().enumerate() {
        let g = m + k;
        match src {
            TailSource::Power(i) => {
                definitions.push(Definition::Power {
                    base: i,
                    correction: power[i].clone(),
                });
                power[i].push((g, 1));
            }
            TailSource::Commutator(j, i) => {
                definitions.push(Definition::Commutator {
                    hi: j,
                    lo: i,
                    correction: comm[j][i].clone(),
                });
                comm[j][i].push((g, 1));
            }
            TailSource::Image(f) => {
                definitions.push(Definition::Image {
                    gen: f,
                    correction: exps_to_word(&images[f]),
                });
                lifted[f][g] = 1;
            }
        }
    }
    let pcp = PcPresentation::new(pcp.p(), weights, power, comm, Some(definitions))?;
    Ok(Cover {
        pcp,
        m,
        tails,
        images: lifted,
    })
}

fn tail_part(v: &[u8], m: usize) -> Vec<u32> {
    v[m..].iter().map(|&x| x as u32).collect()
}

/// Linear relations among the tails forced by the test words over the old generators.
pub fn consistency_system(cover: &Cover) -> Result<Vec<Vec<u32>>> {
    let p = cover.pcp.p();
    let m = cover.m;
    let words = test_words(m);
    let results = par::map(&words, |&t| evaluate(&cover.pcp, &FromTheLeft, t));
    let mut rows = Vec::new();
    for (t, r) in words.iter().zip(results) {
        let (l, r) = r?;
        if l[..m] != r[..m] {
            return Err(Error::Invalid(format!(
                "covered presentation is inconsistent at {t}"
            )));
        }
        let row: Vec<u32> = tail_part(&l, m)
            .iter()
            .zip(tail_part(&r, m))
            .map(|(&a, b)| (a + p - b) % p)
            .collect();
        if row.iter().any(|&x| x != 0) {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Values of the relators at the lifted images; each must lie in the tail layer.
pub fn relator_system(cover: &Cover, fp: &FpPresentation) -> Result<Vec<Vec<u32>>> {
    if cover.images.is_empty() {
        return Ok(Vec::new());
    }
    let g = PcGroup::new(cover.pcp.clone())?;
    let m = cover.m;
    let mut rows = Vec::new();
    for r in &fp.relators {
        let v = evaluate_free_word(&g, &cover.images, r)?;
        if v[..m].iter().any(|&x| x != 0) {
            return Err(Error::NotCentral(format_free_word(r)));
        }
        let row = tail_part(&v, m);
        if row.iter().any(|&x| x != 0) {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Quotients the tail layer by the span of `rows` (pivot = lowest tail index); surviving
/// tails keep their relations as definitions.
pub fn reduce_cover(cover: &Cover, rows: &[Vec<u32>]) -> Result<Cover> {
    let p = cover.pcp.p();
    let m = cover.m;
    let t = cover.ntails();
    let ech = Echelon::from_rows(p, t, rows, PivotOrder::Lowest);
    let (free, proj) = ech.quotient_map();
    let t2 = free.len();
    let map_vec = |e: &[u8]| -> Exps {
        let mut out = e[..m].to_vec();
        let mut tv = vec![0u32; t2];
        for (c, &x) in e[m..].iter().enumerate() {
            if x != 0 {
                for (k, slot) in tv.iter_mut().enumerate() {
                    *slot = (*slot + x as u32 * proj[c][k]) % p;
                }
            }
        }
        out.extend(tv.iter().map(|&x| x as u8));
        out
    };
    let map_word = |w: &Word| exps_to_word(&map_vec(&word_to_exps(w, m + t)));
    let pcp = &cover.pcp;
    let weights = pcp.weights()[..m + t2].to_vec();
    let mut power: Vec<Word> = (0..m).map(|i| map_word(pcp.power_rel(i))).collect();
    power.extend(std::iter::repeat_n(Vec::new(), t2));
    let mut comm: Vec<Vec<Word>> = (0..m)
        .map(|j| (0..j).map(|i| map_word(pcp.comm_rel(j, i))).collect())
        .collect();
    for j in m..m + t2 {
        comm.push(vec![Vec::new(); j]);
    }
    let mut definitions = pcp.definitions()[..m].to_vec();
    let tails: Vec<TailSource> = free.iter().map(|&f| cover.tails[f]).collect();
    for &f in &free {
        definitions.push(pcp.definitions()[m + f].clone());
    }
    let images = cover.images.iter().map(|e| map_vec(e)).collect();
    let pcp = PcPresentation::new(p, weights, power, comm, Some(definitions))?;
    Ok(Cover {
        pcp,
        m,
        tails,
        images,
    })
}

/// Adds the consistency relations to the tail system and quotients by them.
pub fn enforce_consistency(cover: &Cover) -> Result<(Vec<Vec<u32>>, Cover)> {
    let rows = consistency_system(cover)?;
    let reduced = reduce_cover(cover, &rows)?;
    Ok((rows, reduced))
}

/// Quotients by the relator values at the images.
pub fn impose_relations(cover: &Cover, fp: &FpPresentation) -> Result<Cover> {
    let rows = relator_system(cover, fp)?;
    reduce_cover(cover, &rows)
}

/// Computes the next stage `F/λ_{n+1}(F)`, or `None` when the tail layer vanishes.
pub fn next_stage(fp: &FpPresentation, stage: &Stage, cap: usize) -> Result<Option<Stage>> {
    let cover = p_cover_with_images(&stage.pcp, &stage.images)?;
    let mut rows = consistency_system(&cover)?;
    rows.extend(relator_system(&cover, fp)?);
    let reduced = reduce_cover(&cover, &rows)?;
    if reduced.ntails() == 0 {
        return Ok(None);
    }
    if reduced.pcp.ngens() > cap {
        return Err(Error::GeneratorCap(cap));
    }
    Ok(Some(Stage {
        n: stage.n + 1,
        pcp: reduced.pcp,
        images: reduced.images,
    }))
}

/// `F/λ_n(F)` with the images of `x`, `y`. If the series stabilizes before `n` the last
/// distinct stage is returned (its `n` field records where it stopped).
pub fn p_quotient(fp: &FpPresentation, p: u32, n: u32) -> Result<Stage> {
    let tower = QuotientTower::compute(fp, p, n, DEFAULT_GENERATOR_CAP)?;
    Ok(tower.stages.last().cloned().expect("tower has a stage"))
}

/// Quotient of a stage by a subgroup `N` of its top weight layer, given by coordinate
/// vectors on that layer. Eliminated generators are the highest pivots, so the surviving
/// generators keep their definitions.
pub fn central_quotient(stage: &Stage, top: u32, n_basis: &[Vec<u32>]) -> Result<Stage> {
    let pcp = &stage.pcp;
    let p = pcp.p();
    let range = pcp.weight_range(top);
    if range.end != pcp.ngens() || (range.start < range.end && pcp.weight(range.start) != top) {
        return Err(Error::Invalid("quotient layer must be the top weight layer".into()));
    }
    let g = PcGroup::new(pcp.clone())?;
    let layer = crate::pcp::SubgroupBasis::from_generator_range(&g, range.clone());
    if !layer.is_central_elementary {
        return Err(Error::NotCentral(format!("weight {top} layer")));
    }
    let s = range.start;
    let r = range.len();
    let ech = Echelon::from_rows(p, r, n_basis, PivotOrder::Highest);
    let (free, proj) = ech.quotient_map();
    let m2 = s + free.len();
    let map_vec = |e: &[u8]| -> Exps {
        let mut out = e[..s].to_vec();
        let mut tv = vec![0u32; free.len()];
        for (c, &x) in e[s..].iter().enumerate() {
            if x != 0 {
                for (k, slot) in tv.iter_mut().enumerate() {
                    *slot = (*slot + x as u32 * proj[c][k]) % p;
                }
            }
        }
        out.extend(tv.iter().map(|&x| x as u8));
        out
    };
    let m = pcp.ngens();
    let map_word = |w: &Word| exps_to_word(&map_vec(&word_to_exps(w, m)));
    let keep: Vec<usize> = (0..s).chain(free.iter().map(|&f| s + f)).collect();
    let weights = keep.iter().map(|&i| pcp.weight(i)).collect();
    let power = keep.iter().map(|&i| map_word(pcp.power_rel(i))).collect();
    let comm = keep
        .iter()
        .enumerate()
        .map(|(jj, &j)| keep[..jj].iter().map(|&i| map_word(pcp.comm_rel(j, i))).collect())
        .collect();
    let renumber = |w: &Word| -> Word {
        w.iter()
            .map(|&(g, e)| (keep.iter().position(|&k| k == g).expect("kept"), e))
            .collect()
    };
    let definitions = keep
        .iter()
        .map(|&i| match &pcp.definitions()[i] {
            Definition::Image { gen, correction } => Definition::Image {
                gen: *gen,
                correction: renumber(correction),
            },
            Definition::Power { base, correction } => Definition::Power {
                base: keep.iter().position(|&k| k == *base).expect("kept"),
                correction: renumber(correction),
            },
            Definition::Commutator { hi, lo, correction } => Definition::Commutator {
                hi: keep.iter().position(|&k| k == *hi).expect("kept"),
                lo: keep.iter().position(|&k| k == *lo).expect("kept"),
                correction: renumber(correction),
            },
        })
        .collect();
    debug_assert_eq!(keep.len(), m2);
    let new = PcPresentation::new(p, weights, power, comm, Some(definitions))?;
    let images = stage.images.iter().map(|e| map_vec(e)).collect();
    Ok(Stage {
        n: stage.n,
        pcp: new,
        images,
    })
}
