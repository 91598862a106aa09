use super::presentation::{PcPresentation, Word};
use crate::error::{Error, Result};

/// Default step budget for a single collection.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// A strategy for rewriting `e * letters` into normal form in place.
///
/// `letters` are `(generator, exponent)` pairs with exponents in `1..p`.
pub trait Collector: Send + Sync {
    fn collect(
        &self,
        pcp: &PcPresentation,
        exps: &mut [u8],
        letters: &[(usize, u8)],
        budget: u64,
    ) -> Result<()>;
}

/// Collection from the left with an explicit stack of pending letters.
///
/// Multiplying the collected element `u * g_i^{e_i} * t` (with `t` supported after `i`) by
/// `g_i` yields `u * g_i^{e_i + 1} * t^{g_i}`, where `g_j^{g_i} = g_j [g_j, g_i]`; the
/// conjugated tail is pushed back onto the stack.
#[derive(Clone, Copy, Debug, Default)]
pub struct FromTheLeft;

fn push_rev(stack: &mut Vec<(usize, u8)>, w: &[(usize, u8)]) {
    stack.extend(w.iter().rev().copied());
}

impl Collector for FromTheLeft {
    fn collect(
        &self,
        pcp: &PcPresentation,
        e: &mut [u8],
        letters: &[(usize, u8)],
        budget: u64,
    ) -> Result<()> {
        let p = pcp.p() as u16;
        let m = e.len();
        let power = pcp.power_table();
        let comm = pcp.comm_table();
        let mut stack: Vec<(usize, u8)> = Vec::with_capacity(64);
        push_rev(&mut stack, letters);
        let mut steps = 0u64;
        let mut scratch: Vec<(usize, u8)> = Vec::new();
        while let Some((i, a)) = stack.pop() {
            steps += 1;
            if steps > budget {
                return Err(Error::Budget(budget));
            }
            if a == 0 {
                continue;
            }
            if i >= m {
                return Err(Error::BadGenerator(i));
            }
            let tail_start = i + 1;
            let has_tail = e[tail_start..].iter().any(|&x| x != 0);
            if !has_tail {
                let s = e[i] as u16 + a as u16;
                if s < p {
                    e[i] = s as u8;
                } else {
                    e[i] = (s - p) as u8;
                    push_rev(&mut stack, &power[i]);
                }
                continue;
            }
            let commutes = (tail_start..m).all(|j| e[j] == 0 || comm[j][i].is_empty());
            if commutes {
                let s = e[i] as u16 + a as u16;
                if s < p {
                    e[i] = s as u8;
                    continue;
                }
                scratch.clear();
                for j in tail_start..m {
                    if e[j] != 0 {
                        scratch.push((j, e[j]));
                        e[j] = 0;
                    }
                }
                e[i] = (s - p) as u8;
                push_rev(&mut stack, &scratch);
                push_rev(&mut stack, &power[i]);
                continue;
            }
            if a > 1 {
                stack.push((i, a - 1));
            }
            scratch.clear();
            for j in tail_start..m {
                let ej = e[j];
                if ej == 0 {
                    continue;
                }
                e[j] = 0;
                let c = &comm[j][i];
                if c.is_empty() {
                    scratch.push((j, ej));
                } else {
                    for _ in 0..ej {
                        scratch.push((j, 1));
                        scratch.extend_from_slice(c);
                    }
                }
            }
            push_rev(&mut stack, &scratch);
            let s = e[i] as u16 + 1;
            if s < p {
                e[i] = s as u8;
            } else {
                e[i] = 0;
                push_rev(&mut stack, &power[i]);
            }
        }
        Ok(())
    }
}

/// Normal form of the word `g_j g_i` for `j > i`, i.e. `g_i g_j [g_j, g_i]`.
pub fn swapped_pair(pcp: &PcPresentation, j: usize, i: usize) -> Word {
    let mut w = vec![(i, 1), (j, 1)];
    w.extend_from_slice(pcp.comm_rel(j, i));
    w
}
