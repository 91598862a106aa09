//! Dense linear algebra over GF(p) for small primes.
//!
//! Vectors are `Vec<u32>` with entries in `0..p`. Matrices are lists of row vectors.

pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// Reduced row echelon form of a set of rows.
///
/// The pivot of a row is either its first (`PivotOrder::Lowest`) or last
/// (`PivotOrder::Highest`) nonzero column. Zero rows are dropped. The result is
/// fully reduced: pivot columns are zero in every other row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub p: u32,
    pub ncols: usize,
    pub rows: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    Lowest,
    Highest,
}

impl Echelon {
    pub fn new(p: u32, ncols: usize) -> Self {
        Echelon {
            p,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(p: u32, ncols: usize, rows: &[Vec<u32>], order: PivotOrder) -> Self {
        let mut e = Echelon::new(p, ncols);
        for r in rows {
            e.insert(r.clone(), order);
        }
        e.sort(order);
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows; returns the remainder.
    pub fn reduce(&self, v: &mut [u32]) {
        let p = self.p;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv] % p;
            if c != 0 {
                let f = p - c;
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = (*x + f * r) % p;
                }
            }
        }
    }

    /// Inserts a row; returns true if it increased the rank.
    pub fn insert(&mut self, mut v: Vec<u32>, order: PivotOrder) -> bool {
        let p = self.p;
        for x in v.iter_mut() {
            *x %= p;
        }
        self.reduce(&mut v);
        let piv = match order {
            PivotOrder::Lowest => v.iter().position(|&x| x != 0),
            PivotOrder::Highest => v.iter().rposition(|&x| x != 0),
        };
        let Some(piv) = piv else { return false };
        let s = inv_mod(v[piv], p);
        for x in v.iter_mut() {
            *x = *x * s % p;
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                let f = p - c;
                for (x, &r) in row.iter_mut().zip(&v) {
                    *x = (*x + f * r) % p;
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(piv);
        true
    }

    pub fn sort(&mut self, order: PivotOrder) {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        if order == PivotOrder::Highest {
            idx.reverse();
        }
        let rows = idx.iter().map(|&i| self.rows[i].clone()).collect();
        let pivots = idx.iter().map(|&i| self.pivots[i]).collect();
        self.rows = rows;
        self.pivots = pivots;
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// The projection `GF(p)^ncols -> GF(p)^ncols / rowspace`, in coordinates on the
    /// free columns: returns the free columns and, for every column, its image vector.
    pub fn quotient_map(&self) -> (Vec<usize>, Vec<Vec<u32>>) {
        let p = self.p;
        let free = self.free_columns();
        let mut images = vec![vec![0u32; free.len()]; self.ncols];
        for (k, &f) in free.iter().enumerate() {
            images[f][k] = 1;
        }
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            for (k, &f) in free.iter().enumerate() {
                images[piv][k] = (p - row[f]) % p;
            }
        }
        (free, images)
    }
}

pub fn rank(p: u32, rows: &[Vec<u32>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    Echelon::from_rows(p, ncols, rows, PivotOrder::Lowest).rank()
}

/// Basis of the right nullspace `{v : M v = 0}` where `M` has the given rows.
pub fn nullspace(p: u32, ncols: usize, rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let e = Echelon::from_rows(p, ncols, rows, PivotOrder::Lowest);
    let mut basis = Vec::new();
    for f in e.free_columns() {
        let mut v = vec![0u32; ncols];
        v[f] = 1;
        for (row, &piv) in e.rows.iter().zip(&e.pivots) {
            v[piv] = (p - row[f]) % p;
        }
        basis.push(v);
    }
    basis
}

/// Left kernel: all combinations `c` with `sum c_i * rows[i] = 0`.
pub fn left_kernel(p: u32, rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let transposed: Vec<Vec<u32>> = (0..ncols)
        .map(|c| rows.iter().map(|r| r[c] % p).collect())
        .collect();
    nullspace(p, rows.len(), &transposed)
}

pub fn det2(p: u32, a: [u32; 2], b: [u32; 2]) -> u32 {
    let pp = p as u64;
    let d = (a[0] as u64 * b[1] as u64 + pp * pp - a[1] as u64 * b[0] as u64 % pp) % pp;
    d as u32
}

/// All vectors of the span of `basis` (size p^rank), in lexicographic coefficient order.
pub fn span(p: u32, ncols: usize, basis: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; ncols]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for v in &out {
            for c in 0..p {
                next.push(v.iter().zip(b).map(|(&x, &y)| (x + c * y) % p).collect());
            }
        }
        out = next;
    }
    out
}

/// Enumerates all subspaces of GF(p)^dim (as echelon bases, highest-pivot reduced).
pub fn all_subspaces(p: u32, dim: usize) -> Vec<Vec<Vec<u32>>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let vectors = span(p, dim, &identity(dim));
    // Grow subspaces one vector at a time, deduplicating by reduced basis.
    let mut frontier: Vec<Echelon> = vec![Echelon::new(p, dim)];
    seen.insert(Vec::<Vec<u32>>::new());
    out.push(Vec::new());
    while let Some(e) = frontier.pop() {
        for v in &vectors {
            if e.contains(v) {
                continue;
            }
            let mut f = e.clone();
            f.insert(v.clone(), PivotOrder::Highest);
            f.sort(PivotOrder::Highest);
            if seen.insert(f.rows.clone()) {
                out.push(f.rows.clone());
                frontier.push(f);
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

pub fn identity(dim: usize) -> Vec<Vec<u32>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| u32::from(i == j)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![vec![1, 2, 0], vec![2, 4, 0], vec![0, 0, 1]];
        assert_eq!(rank(5, &rows), 2);
        let ns = nullspace(5, 3, &rows);
        assert_eq!(ns, vec![vec![3, 1, 0]]);
        for v in &ns {
            for r in &rows {
                let s: u32 = r.iter().zip(v).map(|(a, b)| a * b).sum();
                assert_eq!(s % 5, 0);
            }
        }
    }

    #[test]
    fn left_kernel_finds_dependency() {
        let rows = vec![vec![1, 1], vec![2, 2], vec![0, 1]];
        let k = left_kernel(3, &rows);
        assert_eq!(k.len(), 1);
        let c = &k[0];
        for col in 0..2 {
            let s: u32 = (0..3).map(|i| c[i] * rows[i][col]).sum();
            assert_eq!(s % 3, 0);
        }
    }

    #[test]
    fn subspace_count_gf3_dim2() {
        // 1 zero space, 4 lines, 1 plane.
        assert_eq!(all_subspaces(3, 2).len(), 6);
        // GF(2)^3: 1 + 7 + 7 + 1.
        assert_eq!(all_subspaces(2, 3).len(), 16);
    }

    #[test]
    fn det_mod_p() {
        assert_eq!(det2(3, [1, 2], [1, 1]), 2);
        assert_eq!(det2(5, [1, 2], [2, 4]), 0);
        assert_eq!(inv_mod(2, 5), 3);
    }
}
