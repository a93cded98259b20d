//! Jacobson–Matthews Markov chain on Latin squares and the `H(L)` statistic
//! (number of row pairs whose permutation is a single `n`-cycle) over sampled
//! squares.
//!
//! The chain walks an `n x n x n` incidence cube with entries in `{-1, 0, 1}`.
//! Proper cubes are Latin squares; an improper cube has exactly one `-1` cell.
//! Every line of the cube holds at most two ones, so each line keeps a small
//! list of its one-positions and moves run in constant time.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cycles::hamiltonian_count;
use crate::error::{Error, Result};
use crate::latin::LatinSquare;

const EMPTY: u16 = u16::MAX;

#[derive(Clone, Debug)]
pub struct IncidenceCube {
    n: usize,
    cube: Vec<i8>,
    // positions of the ones on each line, EMPTY when unused
    rc: Vec<[u16; 2]>,
    rs: Vec<[u16; 2]>,
    cs: Vec<[u16; 2]>,
    improper: Option<[usize; 3]>,
}

fn line_insert(line: &mut [u16; 2], x: usize) {
    if line[0] == EMPTY {
        line[0] = x as u16;
    } else {
        debug_assert_eq!(line[1], EMPTY, "line already holds two ones");
        line[1] = x as u16;
    }
}

fn line_remove(line: &mut [u16; 2], x: usize) {
    if line[0] == x as u16 {
        line[0] = line[1];
        line[1] = EMPTY;
    } else {
        debug_assert_eq!(line[1], x as u16);
        line[1] = EMPTY;
    }
}

impl IncidenceCube {
    pub fn from_square(l: &LatinSquare) -> Self {
        let n = l.order();
        let mut cube = IncidenceCube {
            n,
            cube: vec![0; n * n * n],
            rc: vec![[EMPTY; 2]; n * n],
            rs: vec![[EMPTY; 2]; n * n],
            cs: vec![[EMPTY; 2]; n * n],
            improper: None,
        };
        for [r, c, s] in l.triples() {
            cube.add(r, c, s, 1);
        }
        cube
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_proper(&self) -> bool {
        self.improper.is_none()
    }

    pub fn improper_cell(&self) -> Option<[usize; 3]> {
        self.improper
    }

    pub fn get(&self, r: usize, c: usize, s: usize) -> i8 {
        self.cube[(r * self.n + c) * self.n + s]
    }

    /// The square represented by a proper cube.
    pub fn to_square(&self) -> Option<LatinSquare> {
        self.is_proper().then(|| {
            let grid = self.rc.iter().map(|line| line[0]).collect();
            LatinSquare::from_grid_unchecked(self.n, grid)
        })
    }

    fn add(&mut self, r: usize, c: usize, s: usize, delta: i8) {
        let n = self.n;
        let idx = (r * n + c) * n + s;
        let old = self.cube[idx];
        let new = old + delta;
        self.cube[idx] = new;
        if old == 1 {
            line_remove(&mut self.rc[r * n + c], s);
            line_remove(&mut self.rs[r * n + s], c);
            line_remove(&mut self.cs[c * n + s], r);
        }
        if new == 1 {
            line_insert(&mut self.rc[r * n + c], s);
            line_insert(&mut self.rs[r * n + s], c);
            line_insert(&mut self.cs[c * n + s], r);
        }
        if old == -1 {
            self.improper = None;
        }
        if new == -1 {
            self.improper = Some([r, c, s]);
        }
    }

    fn pick<R: Rng + ?Sized>(line: [u16; 2], proper: bool, rng: &mut R) -> usize {
        if proper || rng.gen_bool(0.5) {
            line[0] as usize
        } else {
            line[1] as usize
        }
    }

    /// One move of the chain. From a proper cube a uniformly random 0-cell is
    /// chosen; from an improper cube the move pivots on the `-1` cell and picks
    /// one of the two ones on each of its lines.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.n;
        if n < 2 {
            return;
        }
        let proper = self.is_proper();
        let [r, c, s] = match self.improper {
            Some(cell) => cell,
            None => {
                let r = rng.gen_range(0..n);
                let c = rng.gen_range(0..n);
                let filled = self.rc[r * n + c][0] as usize;
                let mut s = rng.gen_range(0..n - 1);
                if s >= filled {
                    s += 1;
                }
                [r, c, s]
            }
        };
        let r2 = Self::pick(self.cs[c * n + s], proper, rng);
        let c2 = Self::pick(self.rs[r * n + s], proper, rng);
        let s2 = Self::pick(self.rc[r * n + c], proper, rng);
        // the pivot goes first so a new -1 cell is not cleared again, then the
        // decrements, so no line ever holds more than two ones
        self.add(r, c, s, 1);
        self.add(r, c, s2, -1);
        self.add(r, c2, s, -1);
        self.add(r2, c, s, -1);
        self.add(r2, c2, s2, -1);
        self.add(r, c2, s2, 1);
        self.add(r2, c, s2, 1);
        self.add(r2, c2, s, 1);
    }
}

/// Burn-in and spacing, counted in moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub burn_in: u64,
    pub spacing: u64,
}

impl Schedule {
    /// `n^3` moves of burn-in and `n^2` moves between samples.
    pub fn default_for(n: usize) -> Self {
        let n = n as u64;
        Schedule { burn_in: n * n * n, spacing: n * n }
    }
}

/// A seeded chain started from the cyclic square.
///
/// Properness is only inspected every `spacing` moves (after the burn-in);
/// a sample is the next cube that is proper at one of those check times.
/// Stopping at the first proper cube after an arbitrary move would favour
/// squares that are easy to reach from improper cubes and biases `H`.
#[derive(Clone, Debug)]
pub struct JmChain {
    cube: IncidenceCube,
    rng: ChaCha8Rng,
    schedule: Schedule,
    started: bool,
}

impl JmChain {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        JmChain::with_schedule(n, seed, 0, Schedule::default_for(n))
    }

    /// `stream` selects an independent ChaCha stream for parallel chains.
    pub fn with_schedule(n: usize, seed: u64, stream: u64, schedule: Schedule) -> Result<Self> {
        if n < 2 {
            return Err(Error::OrderTooSmall(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(JmChain { cube: IncidenceCube::from_square(&LatinSquare::cyclic(n)), rng, schedule, started: false })
    }

    pub fn cube(&self) -> &IncidenceCube {
        &self.cube
    }

    pub fn next_square(&mut self) -> LatinSquare {
        let moves = if self.started { self.schedule.spacing } else { self.schedule.burn_in };
        self.started = true;
        for _ in 0..moves {
            self.cube.step(&mut self.rng);
        }
        while !self.cube.is_proper() {
            for _ in 0..self.schedule.spacing.max(1) {
                self.cube.step(&mut self.rng);
            }
        }
        self.cube.to_square().expect("proper cube")
    }
}

impl Iterator for JmChain {
    type Item = LatinSquare;

    fn next(&mut self) -> Option<LatinSquare> {
        Some(self.next_square())
    }
}

/// One square from a fresh chain with the default schedule.
pub fn jm_sample(n: usize, seed: u64) -> Result<LatinSquare> {
    Ok(JmChain::new(n, seed)?.next_square())
}

/// Summary of `H(L)` over a sample of squares.
#[derive(Clone, Debug, PartialEq)]
pub struct HStats {
    pub order: usize,
    pub samples: u64,
    pub min: usize,
    pub max: usize,
    /// Most frequent value, the smaller one on ties.
    pub mode: usize,
    pub mean: f64,
    /// Sample standard deviation (divisor `samples - 1`).
    pub stddev: f64,
    /// `histogram[h]` counts squares with `H(L) = h`.
    pub histogram: Vec<u64>,
}

impl HStats {
    pub fn from_histogram(order: usize, histogram: Vec<u64>) -> Option<Self> {
        let samples: u64 = histogram.iter().sum();
        if samples == 0 {
            return None;
        }
        let min = histogram.iter().position(|&k| k > 0)?;
        let max = histogram.iter().rposition(|&k| k > 0)?;
        let top = *histogram.iter().max()?;
        let mode = histogram.iter().position(|&k| k == top)?;
        let total: f64 = histogram.iter().enumerate().map(|(h, &k)| h as f64 * k as f64).sum();
        let mean = total / samples as f64;
        let ss: f64 = histogram.iter().enumerate().map(|(h, &k)| k as f64 * (h as f64 - mean).powi(2)).sum();
        let stddev = if samples > 1 { (ss / (samples - 1) as f64).sqrt() } else { 0.0 };
        Some(HStats { order, samples, min, max, mode, mean, stddev, histogram })
    }

    pub fn table_header() -> &'static str {
        "Order Min Max Mode Mean StdDev"
    }

    pub fn table_row(&self) -> String {
        format!("{} {} {} {} {:.4} {:.4}", self.order, self.min, self.max, self.mode, self.mean, self.stddev)
    }

    pub fn key_values(&self) -> String {
        format!(
            "order={}\nsamples={}\nmin={}\nmax={}\nmode={}\nmean={:.6}\nstddev={:.6}\n",
            self.order, self.samples, self.min, self.max, self.mode, self.mean, self.stddev
        )
    }
}

impl fmt::Display for HStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::table_header())?;
        writeln!(f, "{}", self.table_row())
    }
}

/// `H(L)` statistics over `samples` squares from a single chain.
/// `H(L)` counts the Hamiltonian row cycles of `L`.
pub fn h_statistics(n: usize, samples: u64, seed: u64) -> Result<HStats> {
    h_statistics_with(n, samples, seed, 1, Schedule::default_for(n))
}

/// Splits the samples over `chains` independent chains, one thread each.
/// Results depend on `seed` and `chains` but not on thread timing.
pub fn h_statistics_with(n: usize, samples: u64, seed: u64, chains: usize, schedule: Schedule) -> Result<HStats> {
    if n < 2 {
        return Err(Error::OrderTooSmall(n));
    }
    let chains = chains.max(1) as u64;
    let max_h = n * (n - 1) / 2;
    let histograms: Vec<Vec<u64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|k| {
                let quota = samples / chains + u64::from(k < samples % chains);
                scope.spawn(move || {
                    let mut hist = vec![0u64; max_h + 1];
                    let mut chain = JmChain::with_schedule(n, seed, k, schedule).expect("n >= 2");
                    for _ in 0..quota {
                        let h = hamiltonian_count(&chain.next_square());
                        hist[h] += 1;
                    }
                    hist
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampler thread panicked")).collect()
    });
    let mut total = vec![0u64; max_h + 1];
    for hist in histograms {
        for (t, k) in total.iter_mut().zip(hist) {
            *t += k;
        }
    }
    HStats::from_histogram(n, total).ok_or(Error::OrderTooSmall(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_consistent(cube: &IncidenceCube) {
        let n = cube.order();
        let mut minus = 0;
        for r in 0..n {
            for c in 0..n {
                for s in 0..n {
                    let v = cube.get(r, c, s);
                    assert!((-1..=1).contains(&v));
                    minus += usize::from(v == -1);
                }
                let sum: i32 = (0..n).map(|s| cube.get(r, c, s) as i32).sum();
                assert_eq!(sum, 1);
            }
        }
        assert_eq!(minus, usize::from(!cube.is_proper()));
    }

    #[test]
    fn moves_preserve_line_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cube = IncidenceCube::from_square(&LatinSquare::cyclic(5));
        for _ in 0..2000 {
            cube.step(&mut rng);
            assert_consistent(&cube);
            if let Some(l) = cube.to_square() {
                assert!(LatinSquare::new(&l.rows()).is_ok());
            }
        }
    }

    #[test]
    fn chain_is_reproducible() {
        let a: Vec<_> = JmChain::new(7, 9).unwrap().take(5).collect();
        let b: Vec<_> = JmChain::new(7, 9).unwrap().take(5).collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert_eq!(jm_sample(1, 0).unwrap_err(), Error::OrderTooSmall(1));
    }

    #[test]
    fn order_three_is_near_uniform() {
        // all 12 squares of order 3 should appear with similar frequency
        let mut counts = std::collections::HashMap::new();
        let chain = JmChain::new(3, 4).unwrap();
        for l in chain.take(6000) {
            *counts.entry(l).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 12);
        for &k in counts.values() {
            assert!((350..650).contains(&k), "count {k}");
        }
    }

    #[test]
    fn order_four_mean_matches_exhaustive_mean() {
        let all = crate::oracle::all_latin_squares(4).unwrap();
        let exact = all.iter().map(|l| hamiltonian_count(l) as f64).sum::<f64>() / all.len() as f64;
        let sampled = h_statistics(4, 20_000, 11).unwrap();
        assert!((sampled.mean - exact).abs() < 0.1, "sampled {} exact {exact}", sampled.mean);
    }

    #[test]
    fn stats_from_histogram() {
        let s = HStats::from_histogram(4, vec![0, 0, 2, 1, 2]).unwrap();
        assert_eq!((s.min, s.max, s.mode, s.samples), (2, 4, 2, 5));
        assert!((s.mean - 3.0).abs() < 1e-12);
        assert!((s.stddev - 1.0).abs() < 1e-12);
        assert!(s.to_string().starts_with("Order Min Max Mode Mean StdDev\n4 2 4 2 "));
        assert!(HStats::from_histogram(4, vec![0; 5]).is_none());
    }

    #[test]
    fn chain_count_changes_streams_only() {
        let one = h_statistics_with(6, 40, 2, 1, Schedule::default_for(6)).unwrap();
        let again = h_statistics_with(6, 40, 2, 1, Schedule::default_for(6)).unwrap();
        assert_eq!(one, again);
        let four = h_statistics_with(6, 40, 2, 4, Schedule::default_for(6)).unwrap();
        assert_eq!(four.samples, 40);
    }
}
