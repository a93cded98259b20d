//! Steiner triple systems and their Steiner quasigroups.
//!
//! Two canonical forms are provided. [`canonical_sts`] searches isomorphisms
//! directly, labelling inverse pairs of row cycles so the result stays
//! idempotent and totally symmetric. [`canonical_sts_lifted`] runs the general
//! isotopism search and keeps only the symbol labelling.

use std::fmt;

use rand::Rng;

use crate::canonical::{canonical_labelling, SearchStats};
use crate::cycles::{CycleTable, PList};
use crate::error::{Error, Result};
use crate::latin::{LatinSquare, PartialLabelling, PartialPermutation};

/// A Steiner triple system on points `0..n`. Blocks are stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockSet {
    n: usize,
    blocks: Vec<[usize; 3]>,
}

impl BlockSet {
    /// Checks that every pair of points lies in exactly one block.
    pub fn new(n: usize, blocks: &[[usize; 3]]) -> Result<Self> {
        if n % 6 != 1 && n % 6 != 3 {
            return Err(Error::BadOrder(n));
        }
        let mut cover = vec![false; n * n];
        let mut sorted = Vec::with_capacity(blocks.len());
        for &b in blocks {
            let mut b = b;
            b.sort_unstable();
            if b[2] >= n || b[0] == b[1] || b[1] == b[2] {
                return Err(Error::BadBlock(b));
            }
            for (x, y) in [(b[0], b[1]), (b[0], b[2]), (b[1], b[2])] {
                if cover[x * n + y] {
                    return Err(Error::PairDoubled(x, y));
                }
                cover[x * n + y] = true;
            }
            sorted.push(b);
        }
        for x in 0..n {
            for y in x + 1..n {
                if !cover[x * n + y] {
                    return Err(Error::PairUncovered(x, y));
                }
            }
        }
        sorted.sort_unstable();
        Ok(BlockSet { n, blocks: sorted })
    }

    /// The Fano plane `{123, 145, 167, 246, 257, 347, 356}` (1-based).
    pub fn fano() -> Self {
        let blocks = [[1, 2, 3], [1, 4, 5], [1, 6, 7], [2, 4, 6], [2, 5, 7], [3, 4, 7], [3, 5, 6]];
        BlockSet::new(7, &blocks.map(|b| b.map(|x| x - 1))).expect("Fano plane")
    }

    /// The affine plane of order 3, the unique STS(9). Point `3a + b` is `(a, b)`.
    pub fn affine_plane_9() -> Self {
        let mut blocks = Vec::new();
        for x in 0..9usize {
            for y in x + 1..9 {
                let (xa, xb) = (x / 3, x % 3);
                let (ya, yb) = (y / 3, y % 3);
                // third point on the line through x and y
                let z = ((6 - xa - ya) % 3) * 3 + (6 - xb - yb) % 3;
                if z > y {
                    blocks.push([x, y, z]);
                }
            }
        }
        BlockSet::new(9, &blocks).expect("AG(2,3)")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[[usize; 3]] {
        &self.blocks
    }

    /// Image under the point map `x -> perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> BlockSet {
        let blocks: Vec<[usize; 3]> = self.blocks.iter().map(|b| b.map(|x| perm[x])).collect();
        BlockSet::new(self.n, &blocks).expect("relabelling preserves the Steiner property")
    }

    /// Parses the block file format: `n` on the first line, then one block per
    /// line as three 1-based points.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::Parse(1, "empty input".into()))?;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|_| Error::Parse(1, format!("bad order {:?}", first.trim())))?;
        let mut blocks = Vec::new();
        for (lineno, line) in lines {
            let pts: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Parse(lineno + 1, "bad point".into()))?;
            if pts.len() != 3 {
                return Err(Error::Parse(lineno + 1, format!("expected 3 points, got {}", pts.len())));
            }
            blocks.push([pts[0], pts[1], pts[2]]);
        }
        BlockSet::new(n, &blocks)
    }
}

impl fmt::Display for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for b in &self.blocks {
            writeln!(f, "{} {} {}", b[0] + 1, b[1] + 1, b[2] + 1)?;
        }
        Ok(())
    }
}

/// The Cayley table of a Steiner quasigroup: idempotent and totally symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SteinerSquare(LatinSquare);

impl SteinerSquare {
    pub fn new(l: LatinSquare) -> Result<Self> {
        if !l.is_idempotent() {
            return Err(Error::NotIdempotent);
        }
        let n = l.order();
        for x in 0..n {
            for y in 0..n {
                let z = l.get(x, y);
                if l.get(y, x) != z || l.get(x, z) != y {
                    return Err(Error::NotTotallySymmetric);
                }
            }
        }
        Ok(SteinerSquare(l))
    }

    pub fn square(&self) -> &LatinSquare {
        &self.0
    }

    pub fn into_square(self) -> LatinSquare {
        self.0
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }
}

/// `x∘x = x` and `x∘y = z` for every block `{x, y, z}`.
pub fn sts_to_quasigroup(b: &BlockSet) -> SteinerSquare {
    let n = b.n;
    let mut grid = vec![0u16; n * n];
    for x in 0..n {
        grid[x * n + x] = x as u16;
    }
    for &[x, y, z] in &b.blocks {
        for (p, q, r) in [(x, y, z), (y, x, z), (x, z, y), (z, x, y), (y, z, x), (z, y, x)] {
            grid[p * n + q] = r as u16;
        }
    }
    SteinerSquare(LatinSquare::from_grid_unchecked(n, grid))
}

pub fn quasigroup_to_sts(s: &SteinerSquare) -> BlockSet {
    let l = &s.0;
    let n = l.order();
    let mut blocks = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let z = l.get(x, y);
            if z > y {
                blocks.push([x, y, z]);
            }
        }
    }
    BlockSet::new(n, &blocks).expect("Steiner quasigroup yields a Steiner triple system")
}

/// Upper-triangle scan order on 1-based cells `(x, y)` with `x <= y`.
pub fn succ_prime(x: usize, y: usize) -> Result<(usize, usize)> {
    match x.cmp(&y) {
        std::cmp::Ordering::Equal => Ok((1, y + 1)),
        std::cmp::Ordering::Less => Ok((x + 1, y)),
        std::cmp::Ordering::Greater => Err(Error::InvalidCell(x - 1, y - 1)),
    }
}

/// Search state for isomorphisms of a Steiner quasigroup rooted at `(i, j)`.
#[derive(Clone, Debug)]
pub struct StsSearchState<'a> {
    l: &'a LatinSquare,
    i: usize,
    j: usize,
    ell: &'a [u16],
    singular: [usize; 3],
    alpha: Vec<u16>,
    p: PList,
    curt: usize,
    t_alpha: Vec<u16>,
    journal: Vec<(usize, usize)>,
    row_at: Vec<u16>,
    stats: SearchStats,
}

struct StsIncumbent {
    grid: Vec<u16>,
    alpha: Vec<u16>,
}

impl<'a> StsSearchState<'a> {
    /// Labels the singular cycle: `i -> 0`, `j -> 1`, `i∘j -> 2`. `P` is built
    /// from the non-singular cycles and offset by 3.
    pub fn new(s: &'a SteinerSquare, table: &'a CycleTable, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::EqualRows(i));
        }
        let l = &s.0;
        let n = l.order();
        let k = l.get(i, j);
        let mut alpha = vec![n as u16; n];
        for (label, x) in [i, j, k].into_iter().enumerate() {
            alpha[x] = label as u16;
        }
        Ok(StsSearchState {
            l,
            i,
            j,
            ell: table.lengths(i, j),
            singular: [i, j, k],
            alpha,
            p: PList::new(&table.gamma(i, j).without(3), 3),
            curt: 3,
            t_alpha: vec![i as u16, j as u16, k as u16],
            journal: Vec::new(),
            row_at: vec![0; n],
            stats: SearchStats::default(),
        })
    }

    pub fn curt(&self) -> usize {
        self.curt
    }

    pub fn p(&self) -> &PList {
        &self.p
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn alpha(&self) -> PartialPermutation {
        PartialPermutation { image: self.alpha.clone() }
    }

    /// Current labelled array `L_alpha` restricted to labelled points.
    pub fn labelled_array(&self) -> crate::latin::PartialArray {
        crate::latin::apply_labelling(self.l, &PartialLabelling::isomorphism(self.alpha()))
            .expect("single permutation has equal sizes")
    }

    /// Labels the inverse pair containing the non-singular symbol `s`: the
    /// columns of the cycle through `s` get `λ, λ+1, ...` and its symbols get
    /// `λ+ℓ, λ+ℓ+1, ...`, making the pair paired increasing.
    pub fn label_inverse_pair(&mut self, s: usize) -> Result<()> {
        if self.singular.contains(&s) {
            return Err(Error::SingularSymbol(s));
        }
        let star = self.l.order() as u16;
        if self.alpha[s] != star {
            return Err(Error::AlreadyLabelled(s));
        }
        let k = self.ell[s] as usize;
        let mut lambda = self.p.next_label(k);
        self.journal.push((k, self.p.get(k)));
        let mut sigma = s;
        for _ in 0..k {
            self.curt += 2;
            debug_assert_eq!(self.alpha[sigma], star);
            self.alpha[sigma] = (lambda + k) as u16;
            self.t_alpha.push(sigma as u16);
            let b = self.l.column_of(self.i, sigma);
            debug_assert_eq!(self.alpha[b], star);
            self.alpha[b] = lambda as u16;
            self.t_alpha.push(b as u16);
            sigma = self.l.get(self.j, b);
            lambda += 1;
        }
        self.p.advance(k, 2 * k);
        self.stats.work += 2 * k as u64;
        Ok(())
    }

    /// Closes the labelled point set into a subsystem, scanning the upper
    /// triangle from the first column of the most recent inverse pair.
    pub fn extend(&mut self) {
        let n = self.l.order();
        let last = *self.t_alpha.last().expect("singular cycle is labelled") as usize;
        let span = if self.singular.contains(&last) { 3 } else { 2 * self.ell[last] as usize };
        let star = n as u16;
        let (mut r, mut c) = (1, self.curt - span + 1);
        while c <= self.curt {
            if self.curt == n {
                break;
            }
            let s = self.l.get(self.t_alpha[r - 1] as usize, self.t_alpha[c - 1] as usize);
            self.stats.work += 1;
            if self.alpha[s] == star {
                self.label_inverse_pair(s).expect("unlabelled non-singular symbol");
            }
            (r, c) = succ_prime(r, c).expect("scan stays in the upper triangle");
        }
    }

    pub fn branch_candidates(&self) -> Vec<usize> {
        let star = self.l.order() as u16;
        let unlabelled = || (0..self.l.order()).filter(move |&s| self.alpha[s] == star);
        let longest = unlabelled().map(|s| self.ell[s]).max().unwrap_or(0);
        unlabelled().filter(|&s| self.ell[s] == longest).collect()
    }

    fn restore(&mut self, curt: usize, journal: usize) {
        let star = self.l.order() as u16;
        for &x in &self.t_alpha[curt..] {
            self.alpha[x as usize] = star;
        }
        self.t_alpha.truncate(curt);
        while self.journal.len() > journal {
            let (k, old) = self.journal.pop().unwrap();
            self.p.set(k, old);
        }
        self.curt = curt;
    }

    fn run(&mut self, best: &mut Option<StsIncumbent>) -> Result<()> {
        if self.curt == self.l.order() {
            self.leaf(0, best);
            Ok(())
        } else {
            self.branch(1, best)
        }
    }

    fn branch(&mut self, depth: usize, best: &mut Option<StsIncumbent>) -> Result<()> {
        self.stats.branch_nodes += 1;
        let n = self.l.order();
        let candidates = self.branch_candidates();
        if candidates.is_empty() {
            return Err(Error::NoUnlabelledCycle);
        }
        for s in candidates {
            let (curt, journal) = (self.curt, self.journal.len());
            self.label_inverse_pair(s)?;
            self.extend();
            self.stats.doubling_checks += 1;
            if self.curt < 2 * curt {
                self.stats.doubling_violations += 1;
            }
            if self.curt < n {
                self.branch(depth + 1, best)?;
            } else {
                self.leaf(depth, best);
            }
            self.restore(curt, journal);
        }
        Ok(())
    }

    fn leaf(&mut self, depth: usize, best: &mut Option<StsIncumbent>) {
        let n = self.l.order();
        self.stats.leaves += 1;
        self.stats.max_leaf_depth = self.stats.max_leaf_depth.max(depth);
        for x in 0..n {
            self.row_at[self.alpha[x] as usize] = x as u16;
        }
        let cell = |st: &Self, x: usize, y: usize| {
            st.alpha[st.l.get(st.row_at[x] as usize, st.row_at[y] as usize)]
        };
        let better = match best {
            None => true,
            Some(inc) => {
                let mut ord = std::cmp::Ordering::Equal;
                'rows: for x in 0..n {
                    for y in 0..n {
                        self.stats.work += 1;
                        let v = cell(self, x, y);
                        if v != inc.grid[x * n + y] {
                            ord = v.cmp(&inc.grid[x * n + y]);
                            break 'rows;
                        }
                    }
                }
                ord == std::cmp::Ordering::Less
            }
        };
        if better {
            let grid = (0..n * n).map(|k| cell(self, k / n, k % n)).collect();
            *best = Some(StsIncumbent { grid, alpha: self.alpha.clone() });
        }
    }
}

/// Canonical isomorphism of a Steiner quasigroup and the resulting form.
#[derive(Clone, Debug)]
pub struct StsCanonical {
    pub alpha: PartialPermutation,
    pub form: SteinerSquare,
    pub stats: SearchStats,
}

/// Canonical form in paired standard form, searched over isomorphisms only.
pub fn canonical_sts(s: &SteinerSquare) -> StsCanonical {
    let n = s.order();
    if n <= 1 {
        return StsCanonical {
            alpha: PartialPermutation::identity(n),
            form: s.clone(),
            stats: SearchStats { leaves: 1, ..SearchStats::default() },
        };
    }
    let table = CycleTable::new(&s.0);
    let mut best = None;
    let mut stats = SearchStats::default();
    for &(i, j) in table.r_max() {
        let mut st = StsSearchState::new(s, &table, i, j).expect("distinct rows");
        st.run(&mut best).expect("a proper labelled subsystem leaves an unlabelled inverse pair");
        stats.merge(&st.stats);
    }
    let best = best.expect("R_max is non-empty");
    let form = LatinSquare::from_grid_unchecked(n, best.grid);
    StsCanonical {
        alpha: PartialPermutation { image: best.alpha },
        form: SteinerSquare::new(form).expect("isomorphisms preserve Steiner quasigroups"),
        stats,
    }
}

/// Symbol labelling of the general canonical isotopism, applied as an isomorphism.
pub fn canonical_sts_lifted(s: &SteinerSquare) -> SteinerSquare {
    let res = canonical_labelling(&s.0);
    let gamma = res.labelling.gamma;
    let lifted = s.0.permuted(&PartialLabelling::isomorphism(gamma)).expect("total permutation");
    SteinerSquare::new(lifted).expect("isomorphisms preserve Steiner quasigroups")
}

/// Whether a Steiner quasigroup is in paired standard form: the singular
/// cycle of rows 0, 1 uses symbols `{0, 1, 2}`, every other cycle of those
/// rows belongs to a contiguous paired-increasing inverse pair, pairs appear
/// in weakly decreasing length order, and rows 0, 1 have the largest cycle
/// structure of all row pairs.
pub fn is_paired_standard_form(s: &SteinerSquare) -> bool {
    let l = &s.0;
    let n = l.order();
    if n < 3 {
        return true;
    }
    if l.get(0, 1) != 2 {
        return false;
    }
    let table = CycleTable::new(l);
    if table.max_gamma() != Some(table.gamma(0, 1)) {
        return false;
    }
    let mut t = 3;
    let mut prev = usize::MAX;
    while t < n {
        let rho = table.ell(0, 1, l.get(0, t));
        if rho > prev || t + 2 * rho > n {
            return false;
        }
        for u in 0..rho {
            if l.get(0, t + u) != t + rho + u {
                return false;
            }
            let expected = if u + 1 < rho { t + rho + u + 1 } else { t + rho };
            if l.get(1, t + u) != expected {
                return false;
            }
        }
        prev = rho;
        t += 2 * rho;
    }
    true
}

/// A uniformly random point permutation.
pub fn random_point_map<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    PartialPermutation::random(n, rng).images().into_iter().map(|x| x.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::cycle_structure;
    use rand::SeedableRng;

    #[test]
    fn validate_examples() {
        let fano = BlockSet::fano();
        assert_eq!(fano.blocks().len(), 7);
        let mut short = fano.blocks().to_vec();
        short.pop();
        assert!(matches!(BlockSet::new(7, &short), Err(Error::PairUncovered(..))));
        assert_eq!(BlockSet::new(6, &[]), Err(Error::BadOrder(6)));
        let mut doubled = fano.blocks().to_vec();
        doubled[1] = doubled[0];
        assert!(matches!(BlockSet::new(7, &doubled), Err(Error::PairDoubled(..))));
        assert_eq!(BlockSet::affine_plane_9().blocks().len(), 12);
    }

    #[test]
    fn quasigroup_round_trip() {
        let fano = BlockSet::fano();
        let q = sts_to_quasigroup(&fano);
        let l = q.square();
        assert_eq!(l.get(0, 1), 2);
        assert_eq!(l.get(3, 4), 0);
        assert!(l.is_idempotent());
        assert_eq!(quasigroup_to_sts(&q), fano);
        let nine = BlockSet::affine_plane_9();
        assert_eq!(quasigroup_to_sts(&sts_to_quasigroup(&nine)), nine);
    }

    #[test]
    fn quasigroup_rejections() {
        assert_eq!(SteinerSquare::new(LatinSquare::cyclic(3)), Err(Error::NotIdempotent));
        // idempotent and commutative but not semisymmetric
        let l = LatinSquare::parse("1 3 2 5 4\n3 2 5 4 1\n2 5 3 1 4\n5 4 1 4 3\n4 1 4 3 5\n");
        assert!(l.is_err());
        let idem = LatinSquare::parse("1 3 2\n3 2 1\n2 1 3\n").unwrap();
        assert!(SteinerSquare::new(idem).is_ok());
        let not_sym = LatinSquare::parse("1 4 2 3\n3 2 4 1\n4 1 3 2\n2 3 1 4\n").unwrap();
        assert_eq!(SteinerSquare::new(not_sym), Err(Error::NotTotallySymmetric));
    }

    #[test]
    fn fano_first_rows() {
        let q = sts_to_quasigroup(&BlockSet::fano());
        assert_eq!(cycle_structure(q.square(), 0, 1).unwrap().0, vec![3, 2, 2]);
        let t = CycleTable::new(q.square());
        for s in 0..3 {
            assert_eq!(t.ell(0, 1, s), 3);
        }
        for s in 3..7 {
            assert_eq!(t.ell(0, 1, s), 2);
        }
    }

    #[test]
    fn succ_prime_examples() {
        assert_eq!(succ_prime(1, 1).unwrap(), (1, 2));
        assert_eq!(succ_prime(1, 2).unwrap(), (2, 2));
        assert_eq!(succ_prime(2, 2).unwrap(), (1, 3));
        assert_eq!(succ_prime(3, 2), Err(Error::InvalidCell(2, 1)));
    }

    #[test]
    fn label_inverse_pair_on_fano() {
        let q = sts_to_quasigroup(&BlockSet::fano());
        let t = CycleTable::new(q.square());
        let mut st = StsSearchState::new(&q, &t, 0, 1).unwrap();
        assert_eq!(st.p().get(2), 4);
        assert_eq!(st.label_inverse_pair(2), Err(Error::SingularSymbol(2)));
        st.label_inverse_pair(3).unwrap();
        assert_eq!(st.curt(), 7);
        assert_eq!(st.p().get(2), 8);
        // s gets the first symbol label of the pair, not the smallest label
        assert_eq!(st.alpha().get(3), Some(3 + 2));
        assert_eq!(st.label_inverse_pair(3), Err(Error::AlreadyLabelled(3)));

        // rows 0, 1 over the pair's columns 3..7 follow the paired-increasing template (t=3, rho=2)
        let arr = st.labelled_array();
        let row0: Vec<_> = (3..7).map(|c| arr.get(0, c).unwrap()).collect();
        let row1: Vec<_> = (3..7).map(|c| arr.get(1, c).unwrap()).collect();
        assert_eq!(row0, vec![5, 6, 3, 4]);
        assert_eq!(row1, vec![6, 5, 4, 3]);
    }

    #[test]
    fn canonical_sts_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for base in [BlockSet::fano(), BlockSet::affine_plane_9()] {
            let q = sts_to_quasigroup(&base);
            let reference = canonical_sts(&q);
            assert!(is_paired_standard_form(&reference.form));
            let lifted = canonical_sts_lifted(&q);
            for _ in 0..20 {
                let perm = random_point_map(base.order(), &mut rng);
                let relabelled = sts_to_quasigroup(&base.relabel(&perm));
                assert_eq!(canonical_sts(&relabelled).form, reference.form);
                assert_eq!(canonical_sts_lifted(&relabelled), lifted);
            }
        }
    }

    #[test]
    fn canonical_sts_alpha_maps_input_to_form() {
        let q = sts_to_quasigroup(&BlockSet::affine_plane_9());
        let res = canonical_sts(&q);
        let applied = q.square().permuted(&PartialLabelling::isomorphism(res.alpha.clone())).unwrap();
        assert_eq!(&applied, res.form.square());
        assert_eq!(res.stats.doubling_violations, 0);
    }

    #[test]
    fn block_file_round_trip() {
        let fano = BlockSet::fano();
        let text = fano.to_string();
        assert!(text.starts_with("7\n1 2 3\n"));
        assert_eq!(BlockSet::parse(&text).unwrap(), fano);
        assert!(matches!(BlockSet::parse("7\n1 2\n"), Err(Error::Parse(2, _))));
    }

    #[test]
    fn trivial_orders() {
        let one = BlockSet::new(1, &[]).unwrap();
        let three = BlockSet::new(3, &[[0, 1, 2]]).unwrap();
        for b in [one, three] {
            let q = sts_to_quasigroup(&b);
            assert_eq!(quasigroup_to_sts(&canonical_sts(&q).form), b);
        }
    }
}
