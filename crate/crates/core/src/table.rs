//! Groups given by a full multiplication table over element indices, used by the
//! exhaustive searches and element-level cross checks.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::Result;
use crate::gf;
use crate::group::{FiniteGroup, Group};
use crate::par;
use crate::pcp::presentation::index_to_exps;
use crate::pcp::{Exps, PcGroup};

/// Coordinates of every element in `G/Φ(G) ≅ GF(p)^d`.
#[derive(Clone, Debug)]
pub struct Frattini {
    pub p: u32,
    pub d: usize,
    pub coords: Vec<Vec<u32>>,
}

#[derive(Clone)]
pub struct TableGroup {
    n: usize,
    table: Arc<Vec<u32>>,
    inverse: Arc<Vec<u32>>,
    identity: u32,
    gens: Vec<u32>,
    frattini: Option<Arc<Frattini>>,
}

impl std::fmt::Debug for TableGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TableGroup").field("n", &self.n).finish()
    }
}

/// Largest order for which a full multiplication table is built (n² entries).
pub const TABLE_LIMIT: u128 = 1 << 14;

impl TableGroup {
    /// Table of a PC group; element `i` is the `i`-th exponent vector in lexicographic
    /// order. Rows are filled right-to-left by generator, one collection per
    /// (element, generator) pair.
    pub fn from_pc(g: &PcGroup, bound: u128) -> Result<Self> {
        g.check_enumerable(bound.min(TABLE_LIMIT))?;
        let p = g.p();
        let m = g.ngens();
        let n = g.pcp().order() as usize;
        let place: Vec<usize> = (0..m).map(|k| (p as usize).pow((m - 1 - k) as u32)).collect();
        let index = |e: &[u8]| e.iter().fold(0usize, |a, &x| a * p as usize + x as usize);
        let right: Vec<Vec<u32>> = par::map_range(n, |z| {
            let e = index_to_exps(z, p, m);
            (0..m)
                .map(|k| {
                    let mut f = e.clone();
                    g.collect_into(&mut f, &[(k, 1)]).expect("collection within budget");
                    index(&f) as u32
                })
                .collect()
        });
        // Last nonzero position of every index.
        let last: Vec<usize> = (0..n)
            .map(|y| {
                let e = index_to_exps(y, p, m);
                e.iter().rposition(|&v| v != 0).unwrap_or(0)
            })
            .collect();
        let rows: Vec<Vec<u32>> = par::map_range(n, |x| {
            let mut row = vec![0u32; n];
            row[0] = x as u32;
            for y in 1..n {
                let k = last[y];
                let prev = y - place[k];
                row[y] = right[row[prev] as usize][k];
            }
            row
        });
        let table: Vec<u32> = rows.into_iter().flatten().collect();
        let gens = (0..m).map(|k| place[k] as u32).collect();
        let d = g.pcp().rank();
        let frattini = if g.frattini_weighted() {
            Some(Arc::new(Frattini {
                p,
                d,
                coords: (0..n)
                    .map(|i| index_to_exps(i, p, m)[..d].iter().map(|&v| v as u32).collect())
                    .collect(),
            }))
        } else {
            None
        };
        Ok(Self::assemble(n, table, 0, gens, frattini))
    }

    /// Table of any finite group, with elements in the order of `g.elements()`.
    pub fn from_group<G: FiniteGroup>(g: &G) -> (Self, Vec<G::Elem>) {
        let elems = g.elements();
        let pos: HashMap<G::Elem, u32> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let n = elems.len();
        let rows: Vec<Vec<u32>> = par::map(&elems, |a| {
            elems.iter().map(|b| pos[&g.mul(a, b)]).collect()
        });
        let table = rows.into_iter().flatten().collect();
        let gens = g.generators().iter().map(|s| pos[s]).collect();
        let id = pos[&g.identity()];
        (Self::assemble(n, table, id, gens, None), elems)
    }

    fn assemble(
        n: usize,
        table: Vec<u32>,
        identity: u32,
        gens: Vec<u32>,
        frattini: Option<Arc<Frattini>>,
    ) -> Self {
        let mut inverse = vec![0u32; n];
        for x in 0..n {
            let row = &table[x * n..(x + 1) * n];
            inverse[x] = row.iter().position(|&v| v == identity).expect("group table") as u32;
        }
        TableGroup {
            n,
            table: Arc::new(table),
            inverse: Arc::new(inverse),
            identity,
            gens,
            frattini,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn m(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn i(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn frattini(&self) -> Option<&Frattini> {
        self.frattini.as_deref()
    }

    /// Order of an element by repeated multiplication.
    pub fn elem_order(&self, x: u32) -> u64 {
        let mut y = x;
        let mut k = 1;
        while y != self.identity {
            y = self.m(y, x);
            k += 1;
        }
        k
    }

    /// Whether `x`, `y` generate: via G/Φ(G) when known, else by closure.
    pub fn generates_pair(&self, x: u32, y: u32) -> bool {
        match &self.frattini {
            Some(f) => {
                if f.d != 2 {
                    return gf::rank(f.p, &[f.coords[x as usize].clone(), f.coords[y as usize].clone()])
                        == f.d;
                }
                let a = &f.coords[x as usize];
                let b = &f.coords[y as usize];
                gf::det2(f.p, [a[0], a[1]], [b[0], b[1]]) != 0
            }
            None => self.closure_size(&[x, y]) == self.n,
        }
    }

    pub fn closure_size(&self, gens: &[u32]) -> usize {
        let mut seen = vec![false; self.n];
        let mut stack = vec![self.identity];
        seen[self.identity as usize] = true;
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for &s in gens {
                let b = self.m(a, s);
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        count
    }
}

impl Group for TableGroup {
    type Elem = u32;

    fn identity(&self) -> u32 {
        self.identity
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.m(*a, *b)
    }
    fn inv(&self, a: &u32) -> u32 {
        self.i(*a)
    }
    fn generators(&self) -> Vec<u32> {
        self.gens.clone()
    }
    fn order(&self, x: &u32) -> u64 {
        self.elem_order(*x)
    }
    fn generates(&self, gens: &[u32]) -> bool {
        self.closure_size(gens) == self.n
    }
    fn generation_witness(&self, x: &u32, y: &u32) -> Option<u32> {
        let f = self.frattini.as_ref().filter(|f| f.d == 2)?;
        let (a, b) = (&f.coords[*x as usize], &f.coords[*y as usize]);
        Some(gf::det2(f.p, [a[0], a[1]], [b[0], b[1]]))
    }
}

impl FiniteGroup for TableGroup {
    fn size(&self) -> u128 {
        self.n as u128
    }
    fn elements(&self) -> Vec<u32> {
        (0..self.n as u32).collect()
    }
}

/// Index of an exponent vector in the table of [`TableGroup::from_pc`].
pub fn pc_index(e: &Exps, p: u32) -> u32 {
    crate::pcp::presentation::exps_to_index(e, p) as u32
}
