use crate::error::{Error, Result};

/// Dense exponent vector of a collected element `g_1^{e_1} ... g_m^{e_m}`.
pub type Exps = Vec<u8>;

/// A normal word: strictly increasing generator indices, exponents in `1..p`.
pub type Word = Vec<(usize, u8)>;

/// How a PC generator arises from earlier data.
///
/// Every variant reads as "`lhs = correction * g_k`", so `g_k = correction^-1 * lhs`,
/// with `correction` supported on generators before `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Definition {
    /// `lhs` is the image of defining generator `gen` (0 = x, 1 = y, ...).
    Image { gen: usize, correction: Word },
    /// `lhs = g_base^p`.
    Power { base: usize, correction: Word },
    /// `lhs = [g_hi, g_lo]`, `hi > lo`.
    Commutator { hi: usize, lo: usize, correction: Word },
}

impl Definition {
    pub fn correction(&self) -> &Word {
        match self {
            Definition::Image { correction, .. }
            | Definition::Power { correction, .. }
            | Definition::Commutator { correction, .. } => correction,
        }
    }
}

/// A weighted power-commutator presentation in which every relative order is `p`.
///
/// Relations: `g_i^p = power[i]` and `[g_j, g_i] = comm[j][i]` for `j > i`, with
/// `[a, b] = a^-1 b^-1 a b`. Weights are nondecreasing; the right-hand side of a power
/// relation has weight `> w(g_i)` and of a commutator relation weight `>= w(g_i) + w(g_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcPresentation {
    p: u32,
    weights: Vec<u32>,
    power: Vec<Word>,
    comm: Vec<Vec<Word>>,
    definitions: Vec<Definition>,
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl PcPresentation {
    /// Builds and validates a presentation. Missing definitions are inferred from the
    /// relations (see [`PcPresentation::infer_definitions`]).
    pub fn new(
        p: u32,
        weights: Vec<u32>,
        power: Vec<Word>,
        comm: Vec<Vec<Word>>,
        definitions: Option<Vec<Definition>>,
    ) -> Result<Self> {
        if !is_prime(p) || p > 251 {
            return Err(Error::Invalid(format!("p = {p} is not a supported prime")));
        }
        let m = weights.len();
        if power.len() != m || comm.len() != m || comm.iter().enumerate().any(|(j, r)| r.len() != j)
        {
            return Err(Error::Invalid("relation tables do not match generator count".into()));
        }
        let mut pcp = PcPresentation {
            p,
            weights,
            power,
            comm,
            definitions: Vec::new(),
        };
        pcp.validate()?;
        pcp.definitions = match definitions {
            Some(d) => {
                if d.len() != m {
                    return Err(Error::Invalid("definition count mismatch".into()));
                }
                d
            }
            None => pcp.infer_definitions(),
        };
        Ok(pcp)
    }

    /// The trivial group.
    pub fn trivial(p: u32) -> Self {
        PcPresentation::new(p, vec![], vec![], vec![], Some(vec![])).expect("valid")
    }

    /// Elementary abelian group of rank `d`, all generators of weight 1.
    pub fn elementary_abelian(p: u32, d: usize) -> Result<Self> {
        PcPresentation::new(
            p,
            vec![1; d],
            vec![Vec::new(); d],
            (0..d).map(|j| vec![Vec::new(); j]).collect(),
            None,
        )
    }

    fn validate(&self) -> Result<()> {
        let m = self.ngens();
        let p = self.p;
        for w in self.weights.windows(2) {
            if w[0] > w[1] {
                return Err(Error::Weight("weights must be nondecreasing".into()));
            }
        }
        if self.weights.contains(&0) {
            return Err(Error::Weight("weights must be positive".into()));
        }
        let check_word = |w: &Word| -> Result<()> {
            for pair in w.windows(2) {
                if pair[0].0 >= pair[1].0 {
                    return Err(Error::BadWord(format!("{w:?} is not in normal form")));
                }
            }
            for &(g, e) in w {
                if g >= m {
                    return Err(Error::BadGenerator(g));
                }
                if e == 0 || u32::from(e) >= p {
                    return Err(Error::BadWord(format!("exponent {e} out of range")));
                }
            }
            Ok(())
        };
        for i in 0..m {
            check_word(&self.power[i])?;
            for &(g, _) in &self.power[i] {
                if g <= i || self.weights[g] <= self.weights[i] {
                    return Err(Error::Weight(format!(
                        "power relation of g{} involves g{}",
                        i + 1,
                        g + 1
                    )));
                }
            }
            for j in 0..i {
                let w = &self.comm[i][j];
                check_word(w)?;
                for &(g, _) in w {
                    if g <= i || self.weights[g] < self.weights[i] + self.weights[j] {
                        return Err(Error::Weight(format!(
                            "commutator [g{}, g{}] involves g{}",
                            i + 1,
                            j + 1,
                            g + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Finds, for each generator, a relation whose right-hand side is `u * g_k` with `u`
    /// supported before `k`. Generators with no such relation are defining generators,
    /// numbered in order of appearance.
    pub fn infer_definitions(&self) -> Vec<Definition> {
        let m = self.ngens();
        let mut defs = Vec::with_capacity(m);
        let mut next_defining = 0;
        let splits = |w: &Word, k: usize| -> Option<Word> {
            match w.last() {
                Some(&(g, 1)) if g == k => Some(w[..w.len() - 1].to_vec()),
                _ => None,
            }
        };
        for k in 0..m {
            let mut found = None;
            for i in 0..k {
                if let Some(c) = splits(&self.power[i], k) {
                    found = Some(Definition::Power { base: i, correction: c });
                    break;
                }
            }
            if found.is_none() {
                'outer: for hi in 0..k {
                    for lo in 0..hi {
                        if let Some(c) = splits(&self.comm[hi][lo], k) {
                            found = Some(Definition::Commutator { hi, lo, correction: c });
                            break 'outer;
                        }
                    }
                }
            }
            defs.push(found.unwrap_or_else(|| {
                next_defining += 1;
                Definition::Image {
                    gen: next_defining - 1,
                    correction: Vec::new(),
                }
            }));
        }
        defs
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ngens(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weights[i]
    }

    /// Largest weight present; 0 for the trivial group.
    pub fn class(&self) -> u32 {
        self.weights.last().copied().unwrap_or(0)
    }

    pub fn power_rel(&self, i: usize) -> &Word {
        &self.power[i]
    }

    /// `[g_j, g_i]` for `j > i`.
    pub fn comm_rel(&self, j: usize, i: usize) -> &Word {
        &self.comm[j][i]
    }

    pub fn definitions(&self) -> &[Definition] {
        &self.definitions
    }

    /// Number of generators of weight 1 (the rank of G/Φ(G) for presentations built
    /// along the p-central series).
    pub fn rank(&self) -> usize {
        self.weights.iter().filter(|&&w| w == 1).count()
    }

    /// Number of defining generators referenced by the definitions.
    pub fn defining_count(&self) -> usize {
        self.definitions
            .iter()
            .filter_map(|d| match d {
                Definition::Image { gen, .. } => Some(gen + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Generators of weight >= n.
    pub fn weight_range(&self, n: u32) -> std::ops::Range<usize> {
        let start = self.weights.iter().position(|&w| w >= n).unwrap_or(self.ngens());
        start..self.ngens()
    }

    /// log_p of the group order.
    pub fn order_log(&self) -> usize {
        self.ngens()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.ngens() as u32)
    }

    pub(crate) fn power_table(&self) -> &[Word] {
        &self.power
    }

    pub(crate) fn comm_table(&self) -> &[Vec<Word>] {
        &self.comm
    }
}

/// Dense vector from a normal word.
pub fn word_to_exps(word: &Word, m: usize) -> Exps {
    let mut e = vec![0u8; m];
    for &(g, x) in word {
        e[g] = x;
    }
    e
}

pub fn exps_to_word(e: &[u8]) -> Word {
    e.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| (i, x))
        .collect()
}

/// Mixed-radix index of an exponent vector; lexicographic order with g_1 most significant.
pub fn exps_to_index(e: &[u8], p: u32) -> usize {
    e.iter().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

pub fn index_to_exps(mut idx: usize, p: u32, m: usize) -> Exps {
    let mut e = vec![0u8; m];
    for slot in e.iter_mut().rev() {
        *slot = (idx % p as usize) as u8;
        idx /= p as usize;
    }
    e
}
