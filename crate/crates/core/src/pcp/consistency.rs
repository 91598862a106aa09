use super::collect::{swapped_pair, Collector, FromTheLeft, DEFAULT_BUDGET};
use super::presentation::{word_to_exps, Exps, PcPresentation};
use crate::error::Result;
use crate::par;

/// One overlap test word of the consistency check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestWord {
    /// `(g_k g_j) g_i` vs `g_k (g_j g_i)`, `k > j > i`.
    Associativity { k: usize, j: usize, i: usize },
    /// `(g_j^p) g_i` vs `g_j^{p-1} (g_j g_i)`, `j > i`.
    PowerLeft { j: usize, i: usize },
    /// `g_j (g_i^p)` vs `(g_j g_i) g_i^{p-1}`, `j > i`.
    PowerRight { j: usize, i: usize },
    /// `g_i (g_i^p)` vs `(g_i^p) g_i`.
    PowerSelf { i: usize },
}

impl std::fmt::Display for TestWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            TestWord::Associativity { k, j, i } => {
                write!(f, "(g{} g{}) g{} = g{} (g{} g{})", k + 1, j + 1, i + 1, k + 1, j + 1, i + 1)
            }
            TestWord::PowerLeft { j, i } => write!(f, "(g{}^p) g{}", j + 1, i + 1),
            TestWord::PowerRight { j, i } => write!(f, "g{} (g{}^p)", j + 1, i + 1),
            TestWord::PowerSelf { i } => write!(f, "g{} (g{}^p)", i + 1, i + 1),
        }
    }
}

/// Every test word over the first `m` generators, in a fixed order.
pub fn test_words(m: usize) -> Vec<TestWord> {
    let mut out = Vec::new();
    for i in 0..m {
        out.push(TestWord::PowerSelf { i });
    }
    for j in 0..m {
        for i in 0..j {
            out.push(TestWord::PowerLeft { j, i });
            out.push(TestWord::PowerRight { j, i });
        }
    }
    for k in 0..m {
        for j in 0..k {
            for i in 0..j {
                out.push(TestWord::Associativity { k, j, i });
            }
        }
    }
    out
}

fn unit(m: usize, i: usize, e: u8) -> Exps {
    let mut v = vec![0u8; m];
    v[i] = e;
    v
}

/// Collects both bracketings of a test word.
pub fn evaluate(
    pcp: &PcPresentation,
    collector: &dyn Collector,
    t: TestWord,
) -> Result<(Exps, Exps)> {
    let m = pcp.ngens();
    let p = pcp.p() as u8;
    let b = DEFAULT_BUDGET;
    Ok(match t {
        TestWord::Associativity { k, j, i } => {
            let mut left = word_to_exps(&swapped_pair(pcp, k, j), m);
            collector.collect(pcp, &mut left, &[(i, 1)], b)?;
            let mut right = unit(m, k, 1);
            collector.collect(pcp, &mut right, &swapped_pair(pcp, j, i), b)?;
            (left, right)
        }
        TestWord::PowerLeft { j, i } => {
            let mut left = word_to_exps(pcp.power_rel(j), m);
            collector.collect(pcp, &mut left, &[(i, 1)], b)?;
            let mut right = unit(m, j, p - 1);
            collector.collect(pcp, &mut right, &swapped_pair(pcp, j, i), b)?;
            (left, right)
        }
        TestWord::PowerRight { j, i } => {
            let mut left = unit(m, j, 1);
            collector.collect(pcp, &mut left, pcp.power_rel(i), b)?;
            let mut right = word_to_exps(&swapped_pair(pcp, j, i), m);
            collector.collect(pcp, &mut right, &[(i, p - 1)], b)?;
            (left, right)
        }
        TestWord::PowerSelf { i } => {
            let mut left = unit(m, i, 1);
            collector.collect(pcp, &mut left, pcp.power_rel(i), b)?;
            let mut right = word_to_exps(pcp.power_rel(i), m);
            collector.collect(pcp, &mut right, &[(i, 1)], b)?;
            (left, right)
        }
    })
}

/// Outcome of the consistency check; carries the first failing test word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub failure: Option<(TestWord, Exps, Exps)>,
    pub tested: usize,
}

/// Runs every test word; reports the first (in test order) that disagrees.
pub fn check_consistency(pcp: &PcPresentation) -> Result<ConsistencyReport> {
    let words = test_words(pcp.ngens());
    let bad = par::find_first(words.len(), |i| match evaluate(pcp, &FromTheLeft, words[i]) {
        Ok((l, r)) if l == r => None,
        Ok((l, r)) => Some(Ok((l, r))),
        Err(e) => Some(Err(e)),
    });
    Ok(match bad {
        None => ConsistencyReport {
            consistent: true,
            failure: None,
            tested: words.len(),
        },
        Some((i, r)) => {
            let (l, r) = r?;
            ConsistencyReport {
                consistent: false,
                failure: Some((words[i], l, r)),
                tested: i + 1,
            }
        }
    })
}

pub fn is_consistent(pcp: &PcPresentation) -> bool {
    check_consistency(pcp).map(|r| r.consistent).unwrap_or(false)
}
