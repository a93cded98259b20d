//! 1-factorisations of complete graphs `K_v` and their unipotent symmetric
//! Latin squares.
//!
//! Factor `k` maps to symbol `k + 1`; symbol 0 fills the diagonal. Two
//! 1-factorisations are isomorphic when a vertex permutation carries the
//! factors of one onto the factors of the other.

use std::fmt;

use crate::canonical::{canonical_labelling, Incumbent, SearchState, SearchStats};
use crate::cycles::CycleTable;
use crate::error::{Error, Result};
use crate::latin::{LatinSquare, PartialLabelling, PartialPermutation};

/// A 1-factorisation of `K_v`. Each factor is a perfect matching; edges are
/// stored as `(a, b)` with `a < b`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorSet {
    v: usize,
    factors: Vec<Vec<(usize, usize)>>,
}

impl FactorSet {
    pub fn new(v: usize, factors: &[Vec<(usize, usize)>]) -> Result<Self> {
        if v < 2 || !v.is_multiple_of(2) {
            return Err(Error::NotOneFactorisation(format!("vertex count {v} is not a positive even number")));
        }
        if factors.len() != v - 1 {
            return Err(Error::NotOneFactorisation(format!("expected {} factors, got {}", v - 1, factors.len())));
        }
        let mut used = vec![false; v * v];
        let mut out = Vec::with_capacity(v - 1);
        for (k, f) in factors.iter().enumerate() {
            let mut seen = vec![false; v];
            let mut edges = Vec::with_capacity(v / 2);
            for &(a, b) in f {
                let (a, b) = (a.min(b), a.max(b));
                if b >= v || a == b {
                    return Err(Error::NotOneFactorisation(format!("factor {} has bad edge {}-{}", k + 1, a + 1, b + 1)));
                }
                if seen[a] || seen[b] {
                    return Err(Error::NotOneFactorisation(format!("factor {} is not a matching", k + 1)));
                }
                if used[a * v + b] {
                    return Err(Error::NotOneFactorisation(format!("edge {}-{} appears twice", a + 1, b + 1)));
                }
                seen[a] = true;
                seen[b] = true;
                used[a * v + b] = true;
                edges.push((a, b));
            }
            if edges.len() != v / 2 {
                return Err(Error::NotOneFactorisation(format!("factor {} is not perfect", k + 1)));
            }
            edges.sort_unstable();
            out.push(edges);
        }
        Ok(FactorSet { v, factors: out })
    }

    /// The unique 1-factorisation of `K_4`.
    pub fn k4() -> Self {
        FactorSet::new(4, &[vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(0, 3), (1, 2)]]).expect("K4")
    }

    /// The patterned 1-factorisation `GK_v`: vertex `v-1` is fixed and factor
    /// `k` pairs `k` with it and `k-d` with `k+d` mod `v-1`.
    pub fn patterned(v: usize) -> Result<Self> {
        if v < 2 || !v.is_multiple_of(2) {
            return Err(Error::NotOneFactorisation(format!("vertex count {v} is not a positive even number")));
        }
        let m = v - 1;
        let factors: Vec<Vec<(usize, usize)>> = (0..m)
            .map(|k| {
                let mut f = vec![(k, m)];
                f.extend((1..=m / 2).map(|d| ((k + m - d) % m, (k + d) % m)));
                f
            })
            .collect();
        FactorSet::new(v, &factors)
    }

    pub fn vertices(&self) -> usize {
        self.v
    }

    pub fn factors(&self) -> &[Vec<(usize, usize)>] {
        &self.factors
    }

    /// Image under the vertex map `x -> perm[x]`, factor order kept.
    pub fn relabel(&self, perm: &[usize]) -> FactorSet {
        let factors: Vec<Vec<(usize, usize)>> =
            self.factors.iter().map(|f| f.iter().map(|&(a, b)| (perm[a], perm[b])).collect()).collect();
        FactorSet::new(self.v, &factors).expect("relabelling preserves 1-factorisations")
    }

    /// Same factors listed in the order given by `order`.
    pub fn reorder(&self, order: &[usize]) -> FactorSet {
        FactorSet { v: self.v, factors: order.iter().map(|&k| self.factors[k].clone()).collect() }
    }

    /// Parses the factor file format: `v` on the first line, then one factor
    /// per line as 1-based edges written `a-b`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::Parse(1, "empty input".into()))?;
        let v: usize = first
            .trim()
            .parse()
            .map_err(|_| Error::Parse(1, format!("bad vertex count {:?}", first.trim())))?;
        let mut factors = Vec::new();
        for (lineno, line) in lines {
            let edge = |tok: &str| -> Option<(usize, usize)> {
                let (a, b) = tok.split_once('-')?;
                let a: usize = a.parse().ok().filter(|&a| a >= 1)?;
                let b: usize = b.parse().ok().filter(|&b| b >= 1)?;
                Some((a - 1, b - 1))
            };
            let f = line
                .split_whitespace()
                .map(edge)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Parse(lineno + 1, "bad edge".into()))?;
            factors.push(f);
        }
        FactorSet::new(v, &factors)
    }
}

impl fmt::Display for FactorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.v)?;
        for factor in &self.factors {
            let edges: Vec<String> = factor.iter().map(|&(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
            writeln!(f, "{}", edges.join(" "))?;
        }
        Ok(())
    }
}

/// A symmetric Latin square with 0 on the whole diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnipotentSquare(LatinSquare);

impl UnipotentSquare {
    pub fn new(l: LatinSquare) -> Result<Self> {
        if (0..l.order()).any(|x| l.get(x, x) != 0) {
            return Err(Error::NotUnipotent);
        }
        if !l.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(UnipotentSquare(l))
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

pub fn of_to_unipotent(f: &FactorSet) -> UnipotentSquare {
    let v = f.v;
    let mut grid = vec![0u16; v * v];
    for (k, factor) in f.factors.iter().enumerate() {
        for &(a, b) in factor {
            grid[a * v + b] = (k + 1) as u16;
            grid[b * v + a] = (k + 1) as u16;
        }
    }
    UnipotentSquare(LatinSquare::from_grid_unchecked(v, grid))
}

pub fn unipotent_to_of(u: &UnipotentSquare) -> FactorSet {
    let l = &u.0;
    let v = l.order();
    let mut factors = vec![Vec::new(); v - 1];
    for a in 0..v {
        for b in a + 1..v {
            factors[l.get(a, b) - 1].push((a, b));
        }
    }
    FactorSet::new(v, &factors).expect("unipotent symmetric squares encode 1-factorisations")
}

/// Canonical vertex map `alpha` and factor map `gamma` of a unipotent square.
#[derive(Clone, Debug)]
pub struct OneFactorCanonical {
    pub alpha: PartialPermutation,
    pub gamma: PartialPermutation,
    pub form: UnipotentSquare,
    pub stats: SearchStats,
}

/// Canonical form of a unipotent symmetric square under maps `(α, α, γ)`
/// fixing symbol 0. Rows and columns share one labelling throughout.
pub fn canonical_1f(u: &UnipotentSquare) -> OneFactorCanonical {
    let l = &u.0;
    let n = l.order();
    if n <= 2 {
        return OneFactorCanonical {
            alpha: PartialPermutation::identity(n),
            gamma: PartialPermutation::identity(n),
            form: u.clone(),
            stats: SearchStats { leaves: 1, ..SearchStats::default() },
        };
    }
    let table = CycleTable::new(l);
    let mut best: Option<Incumbent> = None;
    let mut stats = SearchStats::default();
    for &(i, j) in table.r_max() {
        let mut st = SearchState::new_unipotent(l, &table, i, j).expect("distinct rows");
        st.run(&mut best).expect("a proper labelled subsquare always leaves an unlabelled cycle");
        stats.merge(st.stats());
    }
    let best = best.expect("R_max is non-empty");
    let labelling = best.labelling();
    debug_assert_eq!(labelling.alpha, labelling.beta);
    let form = LatinSquare::from_grid_unchecked(n, best.grid);
    OneFactorCanonical {
        alpha: labelling.alpha,
        gamma: labelling.gamma,
        form: UnipotentSquare::new(form).expect("(α, α, γ) with γ(0) = 0 keeps the square unipotent"),
        stats,
    }
}

/// Canonical 1-factorisation: factors sorted by the symbol they receive.
pub fn canonical_of(f: &FactorSet) -> FactorSet {
    unipotent_to_of(&canonical_1f(&of_to_unipotent(f)).form)
}

pub fn same_class_1f(a: &FactorSet, b: &FactorSet) -> Result<bool> {
    if a.v != b.v {
        return Err(Error::OrderMismatch(a.v, b.v));
    }
    Ok(canonical_1f(&of_to_unipotent(a)).form == canonical_1f(&of_to_unipotent(b)).form)
}

/// Rooted variant for idempotent symmetric squares: the general canonical
/// isotopism's symbol map, applied to rows, columns and symbols alike.
pub fn rooted_1f_canonical(l: &LatinSquare) -> Result<LatinSquare> {
    if !l.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    if !l.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let gamma = canonical_labelling(l).labelling.gamma;
    l.permuted(&PartialLabelling::isomorphism(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::PartialPermutation;
    use rand::SeedableRng;

    fn perm(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
        PartialPermutation::random(n, rng).images().into_iter().map(Option::unwrap).collect()
    }

    #[test]
    fn k4_square() {
        let u = of_to_unipotent(&FactorSet::k4());
        assert_eq!(u.square().to_text(), "1 2 3 4\n2 1 4 3\n3 4 1 2\n4 3 2 1\n");
        assert_eq!(unipotent_to_of(&u), FactorSet::k4());
    }

    #[test]
    fn validation() {
        let mut bad = FactorSet::k4().factors().to_vec();
        bad[0] = vec![(0, 1), (1, 2)];
        assert!(matches!(FactorSet::new(4, &bad), Err(Error::NotOneFactorisation(_))));
        assert!(matches!(FactorSet::new(5, &[]), Err(Error::NotOneFactorisation(_))));
        let two = LatinSquare::parse("2 1\n1 2\n").unwrap();
        assert_eq!(UnipotentSquare::new(two), Err(Error::NotUnipotent));
        let asym = LatinSquare::parse("1 2 3 4\n3 1 4 2\n4 3 1 2\n2 4 3 1\n");
        assert!(asym.is_err());
        for v in [2, 4, 6, 8, 10] {
            assert_eq!(FactorSet::patterned(v).unwrap().factors().len(), v - 1);
        }
    }

    #[test]
    fn factor_file_round_trip() {
        let f = FactorSet::patterned(6).unwrap();
        let text = f.to_string();
        assert!(text.starts_with("6\n"));
        assert_eq!(FactorSet::parse(&text).unwrap(), f);
        assert!(matches!(FactorSet::parse("4\n1-2 3/4\n"), Err(Error::Parse(2, _))));
    }

    #[test]
    fn k4_invariance() {
        let reference = canonical_1f(&of_to_unipotent(&FactorSet::k4())).form;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..24 {
            let p = perm(4, &mut rng);
            let f = FactorSet::k4().relabel(&p);
            assert_eq!(canonical_1f(&of_to_unipotent(&f)).form, reference);
        }
    }

    #[test]
    fn canonical_is_consistent_and_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let f = FactorSet::patterned(8).unwrap();
        let u = of_to_unipotent(&f);
        let res = canonical_1f(&u);
        assert_eq!(res.gamma.get(0), Some(0));
        let phi = PartialLabelling::new(res.alpha.clone(), res.alpha.clone(), res.gamma.clone());
        assert_eq!(&u.square().permuted(&phi).unwrap(), res.form.square());
        assert_eq!(res.stats.doubling_violations, 0);
        for _ in 0..10 {
            let p = perm(8, &mut rng);
            let order = perm(7, &mut rng);
            let g = f.relabel(&p).reorder(&order);
            assert!(same_class_1f(&f, &g).unwrap());
        }
    }

    #[test]
    fn rooted_variant() {
        let idem = LatinSquare::parse("1 3 2\n3 2 1\n2 1 3\n").unwrap();
        let r = rooted_1f_canonical(&idem).unwrap();
        assert!(r.is_idempotent() && r.is_symmetric());
        assert_eq!(rooted_1f_canonical(&LatinSquare::cyclic(3)), Err(Error::NotIdempotent));
    }
}
