//! Row permutations and row cycles.
//!
//! For rows `i != j` the row permutation sends `L[i][c]` to `L[j][c]` for
//! every column `c`; its disjoint cycles are the row cycles of `r_i ∪ r_j`.

use std::fmt;

use crate::error::{Error, Result};
use crate::latin::LatinSquare;

/// Weakly decreasing list of cycle lengths.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleStructure(pub Vec<usize>);

impl CycleStructure {
    /// Sorts arbitrary lengths into a cycle structure.
    pub fn from_lengths(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleStructure(lengths)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn longest(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    /// Removes one cycle of the given length, if present.
    pub fn without(&self, len: usize) -> CycleStructure {
        let mut lengths = self.0.clone();
        if let Some(pos) = lengths.iter().position(|&l| l == len) {
            lengths.remove(pos);
        }
        CycleStructure(lengths)
    }
}

impl fmt::Display for CycleStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// The row permutation of rows `i` and `j`, as images of `0..n`.
pub fn sigma(l: &LatinSquare, i: usize, j: usize) -> Result<Vec<usize>> {
    if i == j {
        return Err(Error::EqualRows(i));
    }
    let n = l.order();
    let mut perm = vec![0; n];
    for c in 0..n {
        perm[l.get(i, c)] = l.get(j, c);
    }
    Ok(perm)
}

/// Disjoint-cycle lengths of a permutation, weakly decreasing.
pub fn permutation_cycle_structure(perm: &[usize]) -> CycleStructure {
    let mut seen = vec![false; perm.len()];
    let mut lengths = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        lengths.push(len);
    }
    CycleStructure::from_lengths(lengths)
}

pub fn cycle_structure(l: &LatinSquare, i: usize, j: usize) -> Result<CycleStructure> {
    Ok(permutation_cycle_structure(&sigma(l, i, j)?))
}

/// Fills `out[s]` with the length of the row cycle of rows `i, j` through
/// symbol `s`, and returns the cycle structure.
fn pair_lengths(l: &LatinSquare, i: usize, j: usize, out: &mut [u16]) -> CycleStructure {
    let n = l.order();
    let ri = l.row(i);
    let rj = l.row(j);
    let mut seen = vec![false; n];
    let mut members = Vec::with_capacity(n);
    let mut lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        members.clear();
        let mut s = start;
        while !seen[s] {
            seen[s] = true;
            members.push(s);
            let c = l.column_of(i, s);
            debug_assert_eq!(ri[c] as usize, s);
            s = rj[c] as usize;
        }
        for &m in &members {
            out[m] = members.len() as u16;
        }
        lengths.push(members.len());
    }
    CycleStructure::from_lengths(lengths)
}

/// Row-cycle lengths for every pair of rows, the pairwise cycle structures
/// and the ordered pairs attaining the lexicographically largest structure.
#[derive(Clone, Debug)]
pub struct CycleTable {
    n: usize,
    // indexed by unordered pair; lengths are symmetric in (i, j)
    ell: Vec<u16>,
    gammas: Vec<CycleStructure>,
    r_max: Vec<(usize, usize)>,
}

impl CycleTable {
    pub fn new(l: &LatinSquare) -> Self {
        let n = l.order();
        let pairs = n * n.saturating_sub(1) / 2;
        let mut ell = vec![0u16; pairs * n];
        let mut gammas = Vec::with_capacity(pairs);
        for i in 0..n {
            for j in i + 1..n {
                let idx = gammas.len();
                gammas.push(pair_lengths(l, i, j, &mut ell[idx * n..(idx + 1) * n]));
            }
        }
        let mut table = CycleTable { n, ell, gammas, r_max: Vec::new() };
        if let Some(best) = table.gammas.iter().max().cloned() {
            for i in 0..n {
                for j in 0..n {
                    if i != j && *table.gamma(i, j) == best {
                        table.r_max.push((i, j));
                    }
                }
            }
        }
        table
    }

    #[inline]
    fn pair_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Lengths of the row cycles of rows `i, j`, indexed by symbol.
    pub fn lengths(&self, i: usize, j: usize) -> &[u16] {
        let idx = self.pair_index(i, j);
        &self.ell[idx * self.n..(idx + 1) * self.n]
    }

    pub fn ell(&self, i: usize, j: usize, s: usize) -> usize {
        self.lengths(i, j)[s] as usize
    }

    pub fn gamma(&self, i: usize, j: usize) -> &CycleStructure {
        &self.gammas[self.pair_index(i, j)]
    }

    /// Ordered pairs `(i, j)`, both orientations, whose structure is maximal;
    /// sorted lexicographically.
    pub fn r_max(&self) -> &[(usize, usize)] {
        &self.r_max
    }

    pub fn max_gamma(&self) -> Option<&CycleStructure> {
        self.r_max.first().map(|&(i, j)| self.gamma(i, j))
    }

    pub fn longest(&self) -> usize {
        self.gammas.iter().map(CycleStructure::longest).max().unwrap_or(0)
    }

    /// Unordered pairs whose row permutation is a single `n`-cycle.
    pub fn hamiltonian_count(&self) -> usize {
        self.gammas.iter().filter(|g| g.0.len() == 1).count()
    }
}

/// Length of the longest row cycle.
pub fn longest_cycle(l: &LatinSquare) -> Result<usize> {
    if l.order() < 2 {
        return Err(Error::OrderTooSmall(l.order()));
    }
    Ok(CycleTable::new(l).longest())
}

/// Number of unordered row pairs forming a single row cycle.
///
/// Computed directly without building a full [`CycleTable`].
pub fn hamiltonian_count(l: &LatinSquare) -> usize {
    let n = l.order();
    let mut count = 0;
    for i in 0..n {
        let ri = l.row(i);
        for j in i + 1..n {
            let rj = l.row(j);
            // walk the cycle through column 0
            let start = ri[0] as usize;
            let mut s = rj[0] as usize;
            let mut len = 1;
            while s != start {
                s = rj[l.column_of(i, s)] as usize;
                len += 1;
            }
            if len == n {
                count += 1;
            }
        }
    }
    count
}

/// The per-length label allocation list.
///
/// Entry `k` (for `k = 1..=n`) is the first 1-based column label reserved for
/// the next row cycle of length `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PList {
    p: Vec<usize>,
}

impl PList {
    /// `p[k] = 1 + offset + sum of lengths in gamma exceeding k`, for
    /// `k = 1..=n` with `n = gamma.total() + offset`.
    pub fn new(gamma: &CycleStructure, offset: usize) -> Self {
        let n = gamma.total() + offset;
        let p = (1..=n)
            .map(|k| 1 + offset + gamma.0.iter().filter(|&&len| len > k).sum::<usize>())
            .collect();
        PList { p }
    }

    /// 1-based values for `k = 1..=n`.
    pub fn values(&self) -> &[usize] {
        &self.p
    }

    pub fn get(&self, k: usize) -> usize {
        self.p[k - 1]
    }

    /// Next unassigned 0-based label for a cycle of length `k`.
    #[inline]
    pub(crate) fn next_label(&self, k: usize) -> usize {
        self.p[k - 1] - 1
    }

    #[inline]
    pub(crate) fn advance(&mut self, k: usize, by: usize) {
        self.p[k - 1] += by;
    }

    #[inline]
    pub(crate) fn set(&mut self, k: usize, value: usize) {
        self.p[k - 1] = value;
    }
}
