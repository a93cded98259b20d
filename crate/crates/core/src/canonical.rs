//! Canonical labelling of Latin squares by row-cycle branch-and-extend search.
//!
//! For each ordered row pair `(i, j)` with lexicographically largest cycle
//! structure the search labels whole row cycles of `r_i ∪ r_j` so that they
//! land in standard form, closes the labelled region into a subsquare, and
//! branches on the symbols of the longest unlabelled cycles whenever the
//! subsquare is proper. The least completed square over all leaves and all
//! pairs is the canonical form of the isotopism class.

use crate::cycles::{CycleStructure, CycleTable, PList};
use crate::error::{Error, Result};
use crate::latin::{Conjugate, LatinSquare, PartialLabelling, PartialPermutation};

/// The scan order on cells `(row, column)`, 1-based, that sweeps each
/// `k x k` top-left block before leaving it.
#[inline]
pub fn succ(x: usize, y: usize) -> (usize, usize) {
    if y <= 1 {
        (1, x + 1)
    } else if x < y {
        (x + 1, y)
    } else {
        (x, y - 1)
    }
}

/// Counters collected during a search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Completed isotopisms examined.
    pub leaves: u64,
    /// Calls to the branching step.
    pub branch_nodes: u64,
    /// Deepest branching level at which a leaf was produced (1 = root branch).
    pub max_leaf_depth: usize,
    /// Children of a non-empty labelling checked against the doubling bound.
    pub doubling_checks: u64,
    /// Children whose labelled count was below twice the parent's.
    pub doubling_violations: u64,
    /// Cells scanned by extend, labels assigned and cells compared at leaves.
    pub work: u64,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.leaves += other.leaves;
        self.branch_nodes += other.branch_nodes;
        self.max_leaf_depth = self.max_leaf_depth.max(other.max_leaf_depth);
        self.doubling_checks += other.doubling_checks;
        self.doubling_violations += other.doubling_violations;
        self.work += other.work;
    }
}

/// Result of canonicalization: `form` is `labelling` applied to the input.
#[derive(Clone, Debug)]
pub struct CanonicalResult {
    pub labelling: PartialLabelling,
    pub form: LatinSquare,
    pub stats: SearchStats,
}

impl CanonicalResult {
    pub fn leaves(&self) -> u64 {
        self.stats.leaves
    }
}

/// Best completed square seen so far, shared across pairs.
#[derive(Clone, Debug)]
pub(crate) struct Incumbent {
    pub grid: Vec<u16>,
    pub alpha: Vec<u16>,
    pub beta: Vec<u16>,
    pub gamma: Vec<u16>,
}

impl Incumbent {
    pub fn labelling(&self) -> PartialLabelling {
        PartialLabelling::new(
            PartialPermutation { image: self.alpha.clone() },
            PartialPermutation { image: self.beta.clone() },
            PartialPermutation { image: self.gamma.clone() },
        )
    }
}

#[derive(Clone, Copy, Debug)]
struct Checkpoint {
    curt: usize,
    journal: usize,
    c1: Option<usize>,
}

/// Live state of one search rooted at an ordered row pair.
///
/// Labels are 0-based; an unlabelled entry holds `n`. The `t_*` lists record
/// elements in the order they were labelled, and the journal records every
/// change to `P` so a branch can be undone exactly.
#[derive(Clone, Debug)]
pub struct SearchState<'a> {
    l: &'a LatinSquare,
    i: usize,
    j: usize,
    ell: &'a [u16],
    alpha: Vec<u16>,
    beta: Vec<u16>,
    gamma: Vec<u16>,
    p: PList,
    curt: usize,
    t_alpha: Vec<u16>,
    t_beta: Vec<u16>,
    t_gamma: Vec<u16>,
    c1: Option<usize>,
    journal: Vec<(usize, usize)>,
    // rows and columns share labels (unipotent symmetric inputs)
    symmetric: bool,
    row_at: Vec<u16>,
    col_at: Vec<u16>,
    stats: SearchStats,
}

impl<'a> SearchState<'a> {
    /// Empty labelling for the pair `(i, j)`, with `P` built from its cycle structure.
    pub fn new(l: &'a LatinSquare, table: &'a CycleTable, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::EqualRows(i));
        }
        let n = l.order();
        let star = n as u16;
        Ok(SearchState {
            l,
            i,
            j,
            ell: table.lengths(i, j),
            alpha: vec![star; n],
            beta: vec![star; n],
            gamma: vec![star; n],
            p: PList::new(table.gamma(i, j), 0),
            curt: 0,
            t_alpha: Vec::with_capacity(n),
            t_beta: Vec::with_capacity(n),
            t_gamma: Vec::with_capacity(n),
            c1: None,
            journal: Vec::new(),
            symmetric: false,
            row_at: vec![0; n],
            col_at: vec![0; n],
            stats: SearchStats::default(),
        })
    }

    /// Seeds the labelling of a unipotent symmetric square: rows and columns
    /// `i, j` get labels 0, 1, the diagonal symbol gets 0 and `L[i][j]` gets 1.
    /// `P` ignores that 2-cycle and is offset by 2.
    pub(crate) fn new_unipotent(l: &'a LatinSquare, table: &'a CycleTable, i: usize, j: usize) -> Result<Self> {
        let mut st = SearchState::new(l, table, i, j)?;
        let unit = l.get(i, i);
        let k = l.get(i, j);
        st.p = PList::new(&table.gamma(i, j).without(2), 2);
        for (label, (row, sym)) in [(i, unit), (j, k)].into_iter().enumerate() {
            st.alpha[row] = label as u16;
            st.beta[row] = label as u16;
            st.gamma[sym] = label as u16;
            st.t_alpha.push(row as u16);
            st.t_beta.push(row as u16);
            st.t_gamma.push(sym as u16);
        }
        st.curt = 2;
        st.c1 = Some(i);
        st.symmetric = true;
        Ok(st)
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// Number of labelled symbols (equal to labelled rows and columns).
    pub fn curt(&self) -> usize {
        self.curt
    }

    pub fn p(&self) -> &PList {
        &self.p
    }

    pub fn c1(&self) -> Option<usize> {
        self.c1
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    /// Rows, columns and symbols in the order they were labelled.
    pub fn labelling_order(&self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let f = |v: &[u16]| v.iter().map(|&x| x as usize).collect();
        (f(&self.t_alpha), f(&self.t_beta), f(&self.t_gamma))
    }

    pub fn labelling(&self) -> PartialLabelling {
        PartialLabelling::new(
            PartialPermutation { image: self.alpha.clone() },
            PartialPermutation { image: self.beta.clone() },
            PartialPermutation { image: self.gamma.clone() },
        )
    }

    #[inline]
    fn star(&self) -> u16 {
        self.l.order() as u16
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint { curt: self.curt, journal: self.journal.len(), c1: self.c1 }
    }

    fn restore(&mut self, cp: Checkpoint) {
        let star = self.star();
        for t in cp.curt..self.curt {
            self.alpha[self.t_alpha[t] as usize] = star;
            self.beta[self.t_beta[t] as usize] = star;
            self.gamma[self.t_gamma[t] as usize] = star;
        }
        self.t_alpha.truncate(cp.curt);
        self.t_beta.truncate(cp.curt);
        self.t_gamma.truncate(cp.curt);
        while self.journal.len() > cp.journal {
            let (k, old) = self.journal.pop().unwrap();
            self.p.set(k, old);
        }
        self.curt = cp.curt;
        self.c1 = cp.c1;
    }

    /// Labels the row cycle of `r_i ∪ r_j` through symbol `s` so that it is in
    /// standard form, starting at the next label reserved for its length.
    /// `s` receives the smallest label of the cycle.
    pub fn label_row_cycle(&mut self, s: usize) -> Result<()> {
        let star = self.star();
        if self.gamma[s] != star {
            return Err(Error::AlreadyLabelled(s));
        }
        let k = self.ell[s] as usize;
        let mut lambda = self.p.next_label(k);
        self.journal.push((k, self.p.get(k)));
        let mut sigma = s;
        for _ in 0..k {
            self.curt += 1;
            self.gamma[sigma] = lambda as u16;
            self.t_gamma.push(sigma as u16);

            let b = self.l.column_of(self.i, sigma);
            debug_assert_eq!(self.beta[b], star);
            self.beta[b] = lambda as u16;
            self.t_beta.push(b as u16);
            if lambda == 0 {
                self.c1 = Some(b);
            }

            let c1 = self.c1.expect("column labelled 0 is fixed by the first labelled cycle");
            let a = self.l.row_of(c1, sigma);
            debug_assert_eq!(self.alpha[a], star);
            if self.symmetric {
                assert_eq!(a, b, "symmetric labelling must give rows and columns equal labels");
            }
            self.alpha[a] = lambda as u16;
            self.t_alpha.push(a as u16);

            sigma = self.l.get(self.j, b);
            lambda += 1;
        }
        self.p.advance(k, k);
        self.stats.work += k as u64;
        Ok(())
    }

    /// Labels further row cycles, scanning in `succ` order from the first
    /// column of the most recently labelled cycle, until the labelled rows and
    /// columns carry no unlabelled symbol.
    pub fn extend(&mut self) {
        let n = self.l.order();
        if self.curt == 0 {
            return;
        }
        let last = self.t_gamma[self.curt - 1] as usize;
        let (mut r, mut c) = (1, self.curt - self.ell[last] as usize + 1);
        let star = self.star();
        while c <= self.curt {
            // once every symbol is labelled no cell can hold the marker
            if self.curt == n {
                break;
            }
            let s = self.l.get(self.t_alpha[r - 1] as usize, self.t_beta[c - 1] as usize);
            self.stats.work += 1;
            if self.gamma[s] == star {
                self.label_row_cycle(s).expect("unlabelled symbol");
            }
            (r, c) = succ(r, c);
        }
    }

    /// Symbols lying in the longest row cycles of `r_i ∪ r_j` that are still
    /// unlabelled, ascending.
    pub fn branch_candidates(&self) -> Vec<usize> {
        let star = self.star();
        let longest = (0..self.l.order())
            .filter(|&s| self.gamma[s] == star)
            .map(|s| self.ell[s])
            .max()
            .unwrap_or(0);
        (0..self.l.order())
            .filter(|&s| self.gamma[s] == star && self.ell[s] == longest)
            .collect()
    }

    /// Runs the full branch search from the current state and returns the
    /// least completed square together with its labelling. The state is
    /// restored on return.
    pub fn search(&mut self) -> Result<(PartialLabelling, LatinSquare)> {
        let mut best = None;
        self.run(&mut best)?;
        let best = best.expect("search yields at least one leaf");
        let form = LatinSquare::from_grid_unchecked(self.l.order(), best.grid.clone());
        Ok((best.labelling(), form))
    }

    pub(crate) fn run(&mut self, best: &mut Option<Incumbent>) -> Result<()> {
        if self.curt == self.l.order() {
            self.leaf(0, best);
            Ok(())
        } else {
            self.branch(1, best)
        }
    }

    fn branch(&mut self, depth: usize, best: &mut Option<Incumbent>) -> Result<()> {
        self.stats.branch_nodes += 1;
        let n = self.l.order();
        let candidates = self.branch_candidates();
        if candidates.is_empty() {
            return Err(Error::NoUnlabelledCycle);
        }
        for s in candidates {
            let cp = self.checkpoint();
            let parent = self.curt;
            self.label_row_cycle(s)?;
            self.extend();
            if parent > 0 {
                self.stats.doubling_checks += 1;
                if self.curt < 2 * parent {
                    self.stats.doubling_violations += 1;
                }
            }
            if self.curt < n {
                self.branch(depth + 1, best)?;
            } else {
                self.leaf(depth, best);
            }
            self.restore(cp);
        }
        Ok(())
    }

    fn leaf(&mut self, depth: usize, best: &mut Option<Incumbent>) {
        let n = self.l.order();
        self.stats.leaves += 1;
        self.stats.max_leaf_depth = self.stats.max_leaf_depth.max(depth);
        for x in 0..n {
            self.row_at[self.alpha[x] as usize] = x as u16;
            self.col_at[self.beta[x] as usize] = x as u16;
        }
        let better = match best {
            None => true,
            Some(inc) => {
                let mut ord = std::cmp::Ordering::Equal;
                'rows: for x in 0..n {
                    let row = self.l.row(self.row_at[x] as usize);
                    let cur = &inc.grid[x * n..(x + 1) * n];
                    for y in 0..n {
                        self.stats.work += 1;
                        let v = self.gamma[row[self.col_at[y] as usize] as usize];
                        if v != cur[y] {
                            ord = v.cmp(&cur[y]);
                            break 'rows;
                        }
                    }
                }
                ord == std::cmp::Ordering::Less
            }
        };
        if better {
            let mut grid = Vec::with_capacity(n * n);
            for x in 0..n {
                let row = self.l.row(self.row_at[x] as usize);
                grid.extend((0..n).map(|y| self.gamma[row[self.col_at[y] as usize] as usize]));
            }
            *best = Some(Incumbent {
                grid,
                alpha: self.alpha.clone(),
                beta: self.beta.clone(),
                gamma: self.gamma.clone(),
            });
        }
    }
}

pub(crate) fn trivial_result(l: &LatinSquare) -> CanonicalResult {
    CanonicalResult {
        labelling: PartialLabelling::identity(l.order()),
        form: l.clone(),
        stats: SearchStats { leaves: 1, ..SearchStats::default() },
    }
}

/// Canonical labelling of a Latin square: the least completed square over the
/// searches rooted at every pair in `R_max`.
pub fn canonical_labelling(l: &LatinSquare) -> CanonicalResult {
    if l.order() <= 1 {
        return trivial_result(l);
    }
    let table = CycleTable::new(l);
    let mut best = None;
    let mut stats = SearchStats::default();
    for &(i, j) in table.r_max() {
        let mut st = SearchState::new(l, &table, i, j).expect("distinct rows");
        st.run(&mut best).expect("a proper labelled subsquare always leaves an unlabelled cycle");
        stats.merge(&st.stats);
    }
    let best = best.expect("R_max is non-empty for n >= 2");
    CanonicalResult {
        labelling: best.labelling(),
        form: LatinSquare::from_grid_unchecked(l.order(), best.grid),
        stats,
    }
}

/// Whether two squares are isotopic, decided by comparing canonical forms.
pub fn same_isotopism_class(a: &LatinSquare, b: &LatinSquare) -> Result<bool> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch(a.order(), b.order()));
    }
    Ok(canonical_labelling(a).form == canonical_labelling(b).form)
}

/// Least canonical form over the six conjugates: a representative of the
/// main class (species).
pub fn species_canonical(l: &LatinSquare) -> LatinSquare {
    Conjugate::ALL
        .iter()
        .map(|&sigma| canonical_labelling(&l.conjugate(sigma)).form)
        .min()
        .expect("six conjugates")
}

/// Cycle structure of rows 0 and 1, used to check canonical forms.
pub fn leading_pair_structure(l: &LatinSquare) -> Option<CycleStructure> {
    (l.order() >= 2).then(|| crate::cycles::cycle_structure(l, 0, 1).expect("distinct rows"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::apply_labelling;

    fn z3() -> LatinSquare {
        LatinSquare::cyclic(3)
    }

    #[test]
    fn succ_examples() {
        assert_eq!(succ(1, 1), (1, 2));
        assert_eq!(succ(1, 2), (2, 2));
        assert_eq!(succ(2, 2), (2, 1));
        assert_eq!(succ(2, 1), (1, 3));
    }

    #[test]
    fn succ_sweeps_blocks_in_order() {
        let mut cell = (1, 1);
        let mut seen = vec![cell];
        for _ in 0..35 {
            cell = succ(cell.0, cell.1);
            seen.push(cell);
        }
        for k in 1..=6 {
            let block: Vec<_> = seen[(k - 1) * (k - 1)..k * k].to_vec();
            assert!(block.iter().all(|&(x, y)| x <= k && y <= k && (x == k || y == k)));
            let mut sorted = block.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 2 * k - 1);
        }
    }

    #[test]
    fn label_row_cycle_traces() {
        let z = z3();
        let t = CycleTable::new(&z);
        let mut st = SearchState::new(&z, &t, 0, 1).unwrap();
        st.label_row_cycle(0).unwrap();
        assert_eq!(st.curt(), 3);
        assert_eq!(st.labelling(), PartialLabelling::identity(3));

        let mut st = SearchState::new(&z, &t, 0, 1).unwrap();
        st.label_row_cycle(1).unwrap();
        let lab = st.labelling();
        assert_eq!(lab.alpha, PartialPermutation::identity(3));
        let shifted = PartialPermutation::from_permutation(&[2, 0, 1]).unwrap();
        assert_eq!(lab.beta, shifted);
        assert_eq!(lab.gamma, shifted);
        let arr = apply_labelling(&z, &lab).unwrap();
        let cells = arr.cells();
        assert_eq!(cells[0], vec![Some(0), Some(1), Some(2)]);
        assert_eq!(cells[1], vec![Some(1), Some(2), Some(0)]);
        assert_eq!(st.label_row_cycle(1), Err(Error::AlreadyLabelled(1)));
    }

    #[test]
    fn label_row_cycle_on_intercalate() {
        let k4 = LatinSquare::elementary_abelian(2);
        let t = CycleTable::new(&k4);
        let mut st = SearchState::new(&k4, &t, 0, 1).unwrap();
        assert_eq!(st.p().get(2), 1);
        st.label_row_cycle(0).unwrap();
        assert_eq!(st.curt(), 2);
        assert_eq!(st.p().get(2), 3);
        assert_eq!(st.c1(), Some(0));
        st.extend();
        assert_eq!(st.curt(), 2);
        assert_eq!(st.labelling().alpha.size(), 2);
    }

    #[test]
    fn extend_on_full_cycle() {
        let z4 = LatinSquare::cyclic(4);
        let t = CycleTable::new(&z4);
        let mut st = SearchState::new(&z4, &t, 0, 1).unwrap();
        st.label_row_cycle(2).unwrap();
        st.extend();
        assert_eq!(st.labelling().alpha.size(), 4);

        let z = z3();
        let t = CycleTable::new(&z);
        let mut st = SearchState::new(&z, &t, 0, 1).unwrap();
        st.label_row_cycle(0).unwrap();
        st.extend();
        assert!(st.labelling().is_isotopism());
    }

    #[test]
    fn restore_undoes_everything() {
        let l = LatinSquare::elementary_abelian(3);
        let t = CycleTable::new(&l);
        let mut st = SearchState::new(&l, &t, 0, 1).unwrap();
        st.label_row_cycle(0).unwrap();
        st.extend();
        let before = (st.labelling(), st.p().clone(), st.curt(), st.labelling_order(), st.c1());
        let cp = st.checkpoint();
        st.label_row_cycle(st.branch_candidates()[0]).unwrap();
        st.extend();
        assert!(st.curt() > before.2);
        st.restore(cp);
        let after = (st.labelling(), st.p().clone(), st.curt(), st.labelling_order(), st.c1());
        assert_eq!(before, after);
    }

    #[test]
    fn branch_leaf_counts() {
        let k4 = LatinSquare::elementary_abelian(2);
        let t = CycleTable::new(&k4);
        let mut st = SearchState::new(&k4, &t, 0, 1).unwrap();
        assert_eq!(st.branch_candidates().len(), 4);
        st.search().unwrap();
        assert_eq!(st.stats().leaves, 8);
        assert_eq!(st.stats().max_leaf_depth, 2);

        let z4 = LatinSquare::cyclic(4);
        let t = CycleTable::new(&z4);
        let mut st = SearchState::new(&z4, &t, 0, 1).unwrap();
        st.search().unwrap();
        assert_eq!(st.stats().leaves, 4);
        assert_eq!(st.stats().max_leaf_depth, 1);

        let z = z3();
        let t = CycleTable::new(&z);
        let mut st = SearchState::new(&z, &t, 0, 1).unwrap();
        let (_, form) = st.search().unwrap();
        assert_eq!(st.stats().leaves, 3);
        assert_eq!(form, z);
    }

    #[test]
    fn canonical_small_examples() {
        assert_eq!(canonical_labelling(&z3()).form, z3());
        let z4 = LatinSquare::cyclic(4);
        let k4 = LatinSquare::elementary_abelian(2);
        assert_ne!(canonical_labelling(&z4).form, canonical_labelling(&k4).form);
        assert!(!same_isotopism_class(&z4, &k4).unwrap());
        assert!(same_isotopism_class(&k4, &k4).unwrap());
        assert_eq!(same_isotopism_class(&z4, &z3()), Err(Error::OrderMismatch(4, 3)));

        let row_swapped = LatinSquare::parse("2 3 1\n1 2 3\n3 1 2\n").unwrap();
        assert!(same_isotopism_class(&z3(), &row_swapped).unwrap());
        assert_eq!(species_canonical(&z3()), z3());
    }

    #[test]
    fn canonical_result_is_consistent() {
        let l = LatinSquare::parse("1 2 3 4 5\n2 4 1 5 3\n3 5 4 2 1\n4 1 5 3 2\n5 3 2 1 4\n").unwrap();
        let res = canonical_labelling(&l);
        assert_eq!(l.permuted(&res.labelling).unwrap(), res.form);
        assert!(res.form.is_reduced());
        assert_eq!(res.stats.doubling_violations, 0);
        assert_eq!(canonical_labelling(&res.form).form, res.form);
    }

    #[test]
    fn order_one_and_two() {
        let one = LatinSquare::cyclic(1);
        assert_eq!(canonical_labelling(&one).form, one);
        let two = LatinSquare::parse("2 1\n1 2\n").unwrap();
        assert_eq!(canonical_labelling(&two).form, LatinSquare::cyclic(2));
    }
}
