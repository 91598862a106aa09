//! Power-commutator presentations: collection, element arithmetic, consistency,
//! subgroups and the text format.

pub mod collect;
pub mod consistency;
pub mod format;
pub mod group;
pub mod presentation;
pub mod subgroup;

pub use collect::{Collector, FromTheLeft};
pub use consistency::{check_consistency, is_consistent, ConsistencyReport, TestWord};
pub use format::{format_presentation, format_word, parse_presentation, parse_word};
pub use group::{GroupElement, Letter, PcGroup};
pub use presentation::{Definition, Exps, PcPresentation, Word};
pub use subgroup::SubgroupBasis;

use crate::error::{Error, Result};
use crate::group::Group;

/// `λ_n(G)`: the generators of weight `>= n`.
pub fn weight_subgroup(g: &PcGroup, n: u32) -> Result<SubgroupBasis> {
    if n < 1 {
        return Err(Error::Invalid("weight_subgroup needs n >= 1".into()));
    }
    Ok(SubgroupBasis::from_generator_range(
        g,
        g.pcp().weight_range(n),
    ))
}

/// Lower central series computed by iterated `[γ_{k-1}, G]` normal closure.
pub fn gamma_series(g: &PcGroup) -> Vec<SubgroupBasis> {
    let all: Vec<Exps> = g.generators();
    let mut series = vec![SubgroupBasis::closure(g, &all)];
    loop {
        let last = series.last().unwrap();
        if last.is_empty() {
            break;
        }
        let mut gens = Vec::new();
        for b in &last.gens {
            for s in &all {
                gens.push(g.comm(b, s));
            }
        }
        let next = SubgroupBasis::normal_closure(g, &gens);
        if next.len() == last.len() {
            break;
        }
        series.push(next);
    }
    series
}

/// p-central series recomputed from scratch (`[λ, G] λ^p` closures), independent of the
/// weights.
pub fn lambda_series(g: &PcGroup) -> Vec<SubgroupBasis> {
    let all: Vec<Exps> = g.generators();
    let mut series = vec![SubgroupBasis::closure(g, &all)];
    loop {
        let last = series.last().unwrap();
        if last.is_empty() {
            break;
        }
        let mut gens = Vec::new();
        for b in &last.gens {
            gens.push(g.pow(b, g.p() as i64));
            for s in &all {
                gens.push(g.comm(b, s));
            }
        }
        let next = SubgroupBasis::normal_closure(g, &gens);
        if next.len() == last.len() {
            break;
        }
        series.push(next);
    }
    series
}

/// Nilpotency class (length of the lower central series minus one).
pub fn nilpotency_class(g: &PcGroup) -> usize {
    gamma_series(g).len() - 1
}
