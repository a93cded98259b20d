//! Brute-force ground truth for small orders, independent of the cycle search.

use crate::cycles::longest_cycle;
use crate::error::{Error, Result};
use crate::latin::LatinSquare;
use crate::onefact::FactorSet;
use crate::sampler::{JmChain, Schedule};
use crate::steiner::BlockSet;

/// Calls `f` on every permutation of `0..n` (Heap's algorithm) until it returns true.
fn any_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    if f(&p) {
        return true;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            if f(&p) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

/// Isotopism test by trying every row and column permutation. The symbol
/// permutation is forced by row 0. Orders up to 6.
pub fn brute_isotopic(a: &LatinSquare, b: &LatinSquare) -> Result<bool> {
    let n = a.order();
    if n != b.order() {
        return Err(Error::OrderMismatch(n, b.order()));
    }
    if n > 6 {
        return Err(Error::OrderTooLarge(n, 6));
    }
    let mut gamma = vec![0usize; n];
    Ok(any_permutation(n, |alpha| {
        any_permutation(n, |beta| {
            for c in 0..n {
                gamma[a.get(0, c)] = b.get(alpha[0], beta[c]);
            }
            (1..n).all(|r| (0..n).all(|c| gamma[a.get(r, c)] == b.get(alpha[r], beta[c])))
        })
    }))
}

/// A subsquare given by its row, column and symbol sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subsquare {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub symbols: Vec<usize>,
}

impl Subsquare {
    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

/// Incremental subsquare closure with reusable marks.
struct Closer<'a> {
    l: &'a LatinSquare,
    limit: usize,
    in_r: Vec<bool>,
    in_c: Vec<bool>,
    in_s: Vec<bool>,
    rows: Vec<usize>,
    cols: Vec<usize>,
    syms: Vec<usize>,
    queue: Vec<(u8, usize)>,
}

impl<'a> Closer<'a> {
    fn new(l: &'a LatinSquare, limit: usize) -> Self {
        let n = l.order();
        Closer {
            l,
            limit,
            in_r: vec![false; n],
            in_c: vec![false; n],
            in_s: vec![false; n],
            rows: Vec::new(),
            cols: Vec::new(),
            syms: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &r in &self.rows {
            self.in_r[r] = false;
        }
        for &c in &self.cols {
            self.in_c[c] = false;
        }
        for &s in &self.syms {
            self.in_s[s] = false;
        }
        self.rows.clear();
        self.cols.clear();
        self.syms.clear();
        self.queue.clear();
    }

    // false once a set outgrows the limit
    fn add(&mut self, kind: u8, x: usize) -> bool {
        let (mark, list) = match kind {
            0 => (&mut self.in_r, &mut self.rows),
            1 => (&mut self.in_c, &mut self.cols),
            _ => (&mut self.in_s, &mut self.syms),
        };
        if !mark[x] {
            mark[x] = true;
            list.push(x);
            self.queue.push((kind, x));
        }
        list.len() <= self.limit
    }

    /// Smallest subsquare containing the given rows and columns, or `None`
    /// when it would exceed the limit.
    fn close(&mut self, rows: &[usize], cols: &[usize]) -> Option<Subsquare> {
        self.reset();
        let l = self.l;
        let mut ok = rows.iter().all(|&r| self.add(0, r)) && cols.iter().all(|&c| self.add(1, c));
        while ok {
            let Some((kind, x)) = self.queue.pop() else { break };
            // pairs with elements added later are handled when those are processed
            match kind {
                0 => {
                    for k in 0..self.syms.len() {
                        ok &= self.add(1, l.column_of(x, self.syms[k]));
                    }
                    for k in 0..self.cols.len() {
                        ok &= self.add(2, l.get(x, self.cols[k]));
                    }
                }
                1 => {
                    for k in 0..self.syms.len() {
                        ok &= self.add(0, l.row_of(x, self.syms[k]));
                    }
                    for k in 0..self.rows.len() {
                        ok &= self.add(2, l.get(self.rows[k], x));
                    }
                }
                _ => {
                    for k in 0..self.rows.len() {
                        ok &= self.add(1, l.column_of(self.rows[k], x));
                    }
                    for k in 0..self.cols.len() {
                        ok &= self.add(0, l.row_of(self.cols[k], x));
                    }
                }
            }
        }
        ok.then(|| {
            let sorted = |v: &[usize]| {
                let mut v = v.to_vec();
                v.sort_unstable();
                v
            };
            Subsquare { rows: sorted(&self.rows), cols: sorted(&self.cols), symbols: sorted(&self.syms) }
        })
    }
}

/// Proper subsquares of order at least 2, with the order of the largest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsquareReport {
    /// Sorted and deduplicated.
    pub subsquares: Vec<Subsquare>,
    /// Largest proper subsquare order; 1 when there is none of order 2 or more.
    pub largest_proper: usize,
    /// The same quantity by exhaustive subset search, for orders up to 8.
    pub exhaustive_largest: Option<usize>,
}

impl SubsquareReport {
    /// Whether the closure and exhaustive methods agree (vacuously true above order 8).
    pub fn cross_check_agrees(&self) -> bool {
        self.exhaustive_largest.is_none_or(|k| k == self.largest_proper)
    }
}

/// Subsquares found by closing every seed of two rows and two columns. A
/// closure is abandoned once any of its sets exceeds `n/2`, since a proper
/// subsquare has order at most `n/2`. Seeds inside a subsquare generate a
/// subsquare of it. Whether every subsquare is the closure of such a seed is
/// not known in general, so above order 8 `largest_proper` is a lower bound.
pub fn enumerate_subsquares(l: &LatinSquare) -> SubsquareReport {
    let subsquares = closed_subsquares(l);
    let largest_proper = subsquares.iter().map(Subsquare::order).max().unwrap_or(1);
    let exhaustive_largest = exhaustive_largest_proper_subsquare(l).ok();
    SubsquareReport { subsquares, largest_proper, exhaustive_largest }
}

fn closed_subsquares(l: &LatinSquare) -> Vec<Subsquare> {
    let n = l.order();
    let mut closer = Closer::new(l, n / 2);
    let mut out = Vec::new();
    for r1 in 0..n {
        for r2 in r1 + 1..n {
            // the closure of a 2x2 seed contains those of its two 2x1 halves,
            // so a seed can only close if both halves do
            let halves: Vec<Option<Subsquare>> = (0..n).map(|c| closer.close(&[r1, r2], &[c])).collect();
            for c1 in 0..n {
                let Some(h1) = &halves[c1] else { continue };
                for c2 in c1 + 1..n {
                    if halves[c2].is_none() {
                        continue;
                    }
                    if h1.cols.binary_search(&c2).is_ok() {
                        out.push(h1.clone());
                    } else if let Some(sq) = closer.close(&[r1, r2], &[c1, c2]) {
                        out.push(sq);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Largest proper subsquare order by seed closure, 1 when there is none.
pub fn largest_proper_subsquare(l: &LatinSquare) -> usize {
    closed_subsquares(l).iter().map(Subsquare::order).max().unwrap_or(1)
}

/// Largest proper subsquare by testing every `k x k` row and column subset,
/// 1 when there is none. Orders up to 8.
pub fn exhaustive_largest_proper_subsquare(l: &LatinSquare) -> Result<usize> {
    let n = l.order();
    if n > 8 {
        return Err(Error::OrderTooLarge(n, 8));
    }
    let subsets = |k: usize| (0u32..1 << n).filter(move |m| m.count_ones() as usize == k);
    for k in (2..=n / 2).rev() {
        for rm in subsets(k) {
            for cm in subsets(k) {
                let mut syms = 0u32;
                for r in (0..n).filter(|r| rm >> r & 1 == 1) {
                    for c in (0..n).filter(|c| cm >> c & 1 == 1) {
                        syms |= 1 << l.get(r, c);
                    }
                }
                if syms.count_ones() as usize == k {
                    return Ok(k);
                }
            }
        }
    }
    Ok(1)
}

/// STS isomorphism by backtracking over point maps, checking each block as
/// soon as its points are mapped. Orders up to 9.
pub fn brute_isomorphic_sts(a: &BlockSet, b: &BlockSet) -> Result<bool> {
    let n = a.order();
    if n != b.order() {
        return Err(Error::OrderMismatch(n, b.order()));
    }
    if n > 9 {
        return Err(Error::OrderTooLarge(n, 9));
    }
    let mut third = vec![usize::MAX; n * n];
    for &[x, y, z] in b.blocks() {
        for (p, q, r) in [(x, y, z), (y, x, z), (x, z, y), (z, x, y), (y, z, x), (z, y, x)] {
            third[p * n + q] = r;
        }
    }
    fn extend(x: usize, map: &mut Vec<usize>, used: &mut Vec<bool>, a: &BlockSet, third: &[usize], n: usize) -> bool {
        if x == n {
            return true;
        }
        for y in 0..n {
            if used[y] {
                continue;
            }
            map[x] = y;
            let ok = a.blocks().iter().all(|&[p, q, r]| {
                r != x || third[map[p] * n + map[q]] == y
            });
            if ok {
                used[y] = true;
                if extend(x + 1, map, used, a, third, n) {
                    return true;
                }
                used[y] = false;
            }
        }
        false
    }
    Ok(extend(0, &mut vec![usize::MAX; n], &mut vec![false; n], a, &third, n))
}

/// 1-factorisation isomorphism by backtracking over vertex maps, keeping the
/// induced factor map consistent as edges become fully mapped. Up to 10 vertices.
pub fn brute_isomorphic_1f(a: &FactorSet, b: &FactorSet) -> Result<bool> {
    let v = a.vertices();
    if v != b.vertices() {
        return Err(Error::OrderMismatch(v, b.vertices()));
    }
    if v > 10 {
        return Err(Error::OrderTooLarge(v, 10));
    }
    let factor_of = |f: &FactorSet| {
        let mut m = vec![0usize; v * v];
        for (k, factor) in f.factors().iter().enumerate() {
            for &(x, y) in factor {
                m[x * v + y] = k;
                m[y * v + x] = k;
            }
        }
        m
    };
    let fa = factor_of(a);
    let fb = factor_of(b);
    struct Ctx<'a> {
        v: usize,
        fa: &'a [usize],
        fb: &'a [usize],
    }
    fn go(x: usize, map: &mut Vec<usize>, used: &mut Vec<bool>, fmap: &mut Vec<usize>, finv: &mut Vec<usize>, ctx: &Ctx) -> bool {
        let v = ctx.v;
        if x == v {
            return true;
        }
        for y in 0..v {
            if used[y] {
                continue;
            }
            map[x] = y;
            let mut assigned = Vec::new();
            let mut ok = true;
            for w in 0..x {
                let ka = ctx.fa[w * v + x];
                let kb = ctx.fb[map[w] * v + y];
                if fmap[ka] == usize::MAX && finv[kb] == usize::MAX {
                    fmap[ka] = kb;
                    finv[kb] = ka;
                    assigned.push(ka);
                } else if fmap[ka] != kb {
                    ok = false;
                    break;
                }
            }
            if ok {
                used[y] = true;
                if go(x + 1, map, used, fmap, finv, ctx) {
                    return true;
                }
                used[y] = false;
            }
            for ka in assigned {
                finv[fmap[ka]] = usize::MAX;
                fmap[ka] = usize::MAX;
            }
        }
        false
    }
    let ctx = Ctx { v, fa: &fa, fb: &fb };
    Ok(go(0, &mut vec![0; v], &mut vec![false; v], &mut vec![usize::MAX; v], &mut vec![usize::MAX; v], &ctx))
}

/// Every Latin square of order `n` by row-wise backtracking. Orders up to 5.
pub fn all_latin_squares(n: usize) -> Result<Vec<LatinSquare>> {
    if n > 5 {
        return Err(Error::OrderTooLarge(n, 5));
    }
    let mut out = Vec::new();
    let mut grid = vec![0usize; n * n];
    let mut row_used = vec![false; n * n];
    let mut col_used = vec![false; n * n];
    fn fill(k: usize, n: usize, grid: &mut [usize], ru: &mut [bool], cu: &mut [bool], out: &mut Vec<LatinSquare>) {
        if k == n * n {
            out.push(LatinSquare::from_flat(n, grid).expect("backtracking keeps rows and columns Latin"));
            return;
        }
        let (r, c) = (k / n, k % n);
        for s in 0..n {
            if ru[r * n + s] || cu[c * n + s] {
                continue;
            }
            ru[r * n + s] = true;
            cu[c * n + s] = true;
            grid[k] = s;
            fill(k + 1, n, grid, ru, cu, out);
            ru[r * n + s] = false;
            cu[c * n + s] = false;
        }
    }
    fill(0, n, &mut grid, &mut row_used, &mut col_used, &mut out);
    Ok(out)
}

/// Every 1-factorisation of `K_v` with factor `k` containing edge
/// `{0, k + 1}`, so each factorisation appears once. Up to 8 vertices.
pub fn all_one_factorisations(v: usize) -> Result<Vec<FactorSet>> {
    if v > 8 {
        return Err(Error::OrderTooLarge(v, 8));
    }
    if v < 2 || !v.is_multiple_of(2) {
        return Err(Error::NotOneFactorisation(format!("vertex count {v} is not a positive even number")));
    }
    // colour[x][y] = factor of edge xy, filled row by row
    let mut colour = vec![usize::MAX; v * v];
    for k in 0..v - 1 {
        colour[k + 1] = k;
        colour[(k + 1) * v] = k;
    }
    let edges: Vec<(usize, usize)> = (1..v).flat_map(|x| (x + 1..v).map(move |y| (x, y))).collect();
    let mut out = Vec::new();
    fn go(e: usize, edges: &[(usize, usize)], v: usize, colour: &mut [usize], out: &mut Vec<FactorSet>) {
        if e == edges.len() {
            let mut factors = vec![Vec::new(); v - 1];
            for x in 0..v {
                for y in x + 1..v {
                    factors[colour[x * v + y]].push((x, y));
                }
            }
            out.push(FactorSet::new(v, &factors).expect("proper edge colouring"));
            return;
        }
        let (x, y) = edges[e];
        for k in 0..v - 1 {
            let clash = (0..v).any(|w| colour[x * v + w] == k || colour[y * v + w] == k);
            if clash {
                continue;
            }
            colour[x * v + y] = k;
            colour[y * v + x] = k;
            go(e + 1, edges, v, colour, out);
            colour[x * v + y] = usize::MAX;
            colour[y * v + x] = usize::MAX;
        }
    }
    go(0, &edges, v, &mut colour, &mut out);
    Ok(out)
}

/// Longest row cycle against largest proper subsquare for sampled squares.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub order: usize,
    /// `(longest cycle, largest proper subsquare)` per sample.
    pub pairs: Vec<(usize, usize)>,
}

impl ProbeReport {
    /// Fraction of samples whose longest cycle exceeds every proper subsquare.
    pub fn fraction_exceeding(&self) -> f64 {
        let hits = self.pairs.iter().filter(|(l, s)| l > s).count();
        hits as f64 / self.pairs.len().max(1) as f64
    }

    /// Counts of `(longest cycle, largest proper subsquare)` pairs, sorted.
    pub fn distribution(&self) -> Vec<((usize, usize), usize)> {
        let mut map = std::collections::BTreeMap::new();
        for &p in &self.pairs {
            *map.entry(p).or_insert(0) += 1;
        }
        map.into_iter().collect()
    }
}

/// Orders up to 60.
pub fn longest_cycle_vs_subsquare(n: usize, samples: usize, seed: u64) -> Result<ProbeReport> {
    longest_cycle_vs_subsquare_with(n, samples, seed, 1)
}

/// Splits the samples over `chains` independent chains (ChaCha streams
/// `0..chains`), one thread each. Pairs are listed chain by chain.
pub fn longest_cycle_vs_subsquare_with(n: usize, samples: usize, seed: u64, chains: usize) -> Result<ProbeReport> {
    if n > 60 {
        return Err(Error::OrderTooLarge(n, 60));
    }
    if n < 2 {
        return Err(Error::OrderTooSmall(n));
    }
    let chains = chains.max(1);
    let parts: Vec<Vec<(usize, usize)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|k| {
                let quota = samples / chains + usize::from(k < samples % chains);
                scope.spawn(move || {
                    let chain = JmChain::with_schedule(n, seed, k as u64, Schedule::default_for(n)).expect("n >= 2");
                    chain
                        .take(quota)
                        .map(|l| (longest_cycle(&l).expect("n >= 2"), largest_proper_subsquare(&l)))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("probe thread panicked")).collect()
    });
    Ok(ProbeReport { order: n, pairs: parts.concat() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::PartialLabelling;
    use rand::SeedableRng;

    #[test]
    fn square_counts() {
        assert_eq!(all_latin_squares(1).unwrap().len(), 1);
        assert_eq!(all_latin_squares(3).unwrap().len(), 12);
        assert_eq!(all_latin_squares(4).unwrap().len(), 576);
    }

    #[test]
    fn isotopy_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let z4 = LatinSquare::cyclic(4);
        let k4 = LatinSquare::elementary_abelian(2);
        assert!(!brute_isotopic(&z4, &k4).unwrap());
        let phi = PartialLabelling::random(4, &mut rng);
        assert!(brute_isotopic(&z4, &z4.permuted(&phi).unwrap()).unwrap());
        assert_eq!(brute_isotopic(&LatinSquare::cyclic(7), &LatinSquare::cyclic(7)), Err(Error::OrderTooLarge(7, 6)));
    }

    #[test]
    fn subsquares_of_small_groups() {
        let k4 = LatinSquare::elementary_abelian(2);
        // three subgroups of order 2, each with two cosets on rows and two on columns
        let report = enumerate_subsquares(&k4);
        assert_eq!(report.subsquares.len(), 12);
        assert_eq!(report.largest_proper, 2);
        assert!(report.cross_check_agrees());
        assert_eq!(enumerate_subsquares(&LatinSquare::cyclic(3)).largest_proper, 1);
        assert_eq!(largest_proper_subsquare(&LatinSquare::cyclic(5)), 1);
        assert_eq!(largest_proper_subsquare(&LatinSquare::cyclic(6)), 3);
        assert_eq!(largest_proper_subsquare(&LatinSquare::elementary_abelian(3)), 4);
    }

    #[test]
    fn closure_matches_exhaustive_search() {
        for (n, seed) in [(6, 1), (7, 2), (8, 3), (8, 4)] {
            for l in JmChain::new(n, seed).unwrap().take(10) {
                assert_eq!(largest_proper_subsquare(&l), exhaustive_largest_proper_subsquare(&l).unwrap());
            }
        }
    }

    #[test]
    fn sts_oracle() {
        let fano = BlockSet::fano();
        let g = fano.relabel(&[3, 1, 6, 0, 2, 5, 4]);
        assert!(brute_isomorphic_sts(&fano, &g).unwrap());
        let nine = BlockSet::affine_plane_9();
        assert!(brute_isomorphic_sts(&nine, &nine.relabel(&[8, 7, 6, 5, 4, 3, 2, 1, 0])).unwrap());
    }

    #[test]
    fn one_factorisation_counts() {
        assert_eq!(all_one_factorisations(4).unwrap().len(), 1);
        assert_eq!(all_one_factorisations(6).unwrap().len(), 6);
        assert_eq!(all_one_factorisations(8).unwrap().len(), 6240);
    }

    #[test]
    fn one_factorisation_oracle() {
        let all = all_one_factorisations(6).unwrap();
        for f in &all {
            assert!(brute_isomorphic_1f(&all[0], f).unwrap());
        }
        let f = FactorSet::patterned(8).unwrap();
        assert!(brute_isomorphic_1f(&f, &f.relabel(&[7, 6, 5, 4, 3, 2, 1, 0]).reorder(&[6, 5, 4, 3, 2, 1, 0])).unwrap());
    }
}
