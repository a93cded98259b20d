//! Dense Latin squares, partial labellings and the arrays they induce.
//!
//! Rows, columns and symbols are `0..n` throughout the Rust API. The
//! unlabelled marker is encoded as `n`, so the natural integer order on cell
//! values already places it after every symbol. The text formats are 1-based.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// A validated `n x n` Latin square with per-row and per-column inverses.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    n: usize,
    grid: Vec<u16>,
    // row_pos[r * n + s] is the column holding s in row r
    row_pos: Vec<u16>,
    // col_pos[c * n + s] is the row holding s in column c
    col_pos: Vec<u16>,
}

impl LatinSquare {
    /// Validates a matrix of 0-based symbols.
    ///
    /// Cells are checked in row-major order and the first violation found is
    /// reported.
    pub fn new(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { row: r, len: row.len(), n });
            }
        }
        assert!(n < u16::MAX as usize, "order {n} exceeds u16 storage");
        let mut row_pos = vec![u16::MAX; n * n];
        let mut col_pos = vec![u16::MAX; n * n];
        let mut grid = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            for (c, &s) in row.iter().enumerate() {
                if s >= n {
                    return Err(Error::OutOfRange(r, c));
                }
                if row_pos[r * n + s] != u16::MAX {
                    return Err(Error::DuplicateInRow(r));
                }
                if col_pos[c * n + s] != u16::MAX {
                    return Err(Error::DuplicateInColumn(c));
                }
                row_pos[r * n + s] = c as u16;
                col_pos[c * n + s] = r as u16;
                grid.push(s as u16);
            }
        }
        Ok(LatinSquare { n, grid, row_pos, col_pos })
    }

    /// Builds a square from a flat row-major grid that is already known to be
    /// Latin. Panics in debug builds if it is not.
    pub(crate) fn from_grid_unchecked(n: usize, grid: Vec<u16>) -> Self {
        let mut row_pos = vec![0u16; n * n];
        let mut col_pos = vec![0u16; n * n];
        for r in 0..n {
            for c in 0..n {
                let s = grid[r * n + c] as usize;
                row_pos[r * n + s] = c as u16;
                col_pos[c * n + s] = r as u16;
            }
        }
        let square = LatinSquare { n, grid, row_pos, col_pos };
        debug_assert!(LatinSquare::new(&square.rows()).is_ok());
        square
    }

    /// Validates a flat row-major grid.
    pub fn from_flat(n: usize, grid: &[usize]) -> Result<Self> {
        if grid.len() != n * n {
            return Err(Error::NotSquare { row: grid.len() / n.max(1), len: grid.len(), n });
        }
        let rows: Vec<Vec<usize>> = grid.chunks(n.max(1)).map(<[usize]>::to_vec).collect();
        Self::new(&rows)
    }

    /// Cayley table of the cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> Self {
        let grid = (0..n * n).map(|k| ((k / n + k % n) % n) as u16).collect();
        Self::from_grid_unchecked(n, grid)
    }

    /// Cayley table of the elementary abelian 2-group of order `2^k`.
    pub fn elementary_abelian(k: u32) -> Self {
        let n = 1usize << k;
        let grid = (0..n * n).map(|x| ((x / n) ^ (x % n)) as u16).collect();
        Self::from_grid_unchecked(n, grid)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> usize {
        self.grid[r * self.n + c] as usize
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u16] {
        &self.grid[r * self.n..(r + 1) * self.n]
    }

    /// Column of row `r` that holds symbol `s`.
    #[inline]
    pub fn column_of(&self, r: usize, s: usize) -> usize {
        self.row_pos[r * self.n + s] as usize
    }

    /// Row of column `c` that holds symbol `s`.
    #[inline]
    pub fn row_of(&self, c: usize, s: usize) -> usize {
        self.col_pos[c * self.n + s] as usize
    }

    pub fn grid(&self) -> &[u16] {
        &self.grid
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|r| self.row(r).iter().map(|&s| s as usize).collect()).collect()
    }

    pub fn is_reduced(&self) -> bool {
        (0..self.n).all(|k| self.get(0, k) == k && self.get(k, 0) == k)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (r + 1..self.n).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.n).all(|x| self.get(x, x) == x)
    }

    /// All cells `(r, c, s)` in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..self.n * self.n).map(move |k| [k / self.n, k % self.n, self.grid[k] as usize])
    }

    /// Applies a full isotopism: the result holds `gamma(L[r][c])` at
    /// `(alpha(r), beta(c))`.
    pub fn permuted(&self, phi: &PartialLabelling) -> Result<LatinSquare> {
        let n = self.n;
        if !phi.is_isotopism() || phi.order() != n {
            let (a, b, g) = phi.sizes();
            return Err(Error::SizeMismatch(a, b, g));
        }
        let mut grid = vec![0u16; n * n];
        for r in 0..n {
            let ar = phi.alpha.image[r] as usize;
            for c in 0..n {
                let bc = phi.beta.image[c] as usize;
                grid[ar * n + bc] = phi.gamma.image[self.get(r, c)];
            }
        }
        Ok(LatinSquare::from_grid_unchecked(n, grid))
    }

    /// One of the six conjugates: every cell `(r, c, s)` becomes the cell
    /// whose coordinates are `sigma` applied to that triple.
    pub fn conjugate(&self, sigma: Conjugate) -> LatinSquare {
        let n = self.n;
        let mut grid = vec![0u16; n * n];
        for t in self.triples() {
            let u = sigma.apply(t);
            grid[u[0] * n + u[1]] = u[2] as u16;
        }
        LatinSquare::from_grid_unchecked(n, grid)
    }

    /// Parses the text format: one row per line, 1-based symbols separated by
    /// whitespace. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| match tok.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::Parse(lineno + 1, format!("bad symbol {tok:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse(1, "empty input".into()));
        }
        Self::new(&rows)
    }

    /// The normalized text form accepted by [`LatinSquare::parse`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the compact one-line format `n:ddd...`, one base-36 digit per
    /// 1-based symbol in row-major order.
    pub fn parse_compact(text: &str) -> Result<Self> {
        let text = text.trim();
        let (order, digits) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(1, "missing ':' separator".into()))?;
        let n: usize = order
            .parse()
            .map_err(|_| Error::Parse(1, format!("bad order {order:?}")))?;
        if n == 0 || n > 35 {
            return Err(Error::Parse(1, format!("compact format needs 1 <= n <= 35, got {n}")));
        }
        let symbols = digits
            .chars()
            .map(|ch| match ch.to_digit(36) {
                Some(v) if v >= 1 => Ok(v as usize - 1),
                _ => Err(Error::Parse(1, format!("bad digit {ch:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if symbols.len() != n * n {
            return Err(Error::Parse(1, format!("expected {} digits, got {}", n * n, symbols.len())));
        }
        Self::from_flat(n, &symbols)
    }

    /// Compact one-line encoding; `None` when `n > 35`.
    pub fn to_compact(&self) -> Option<String> {
        if self.n > 35 {
            return None;
        }
        let mut out = format!("{}:", self.n);
        out.extend(self.grid.iter().map(|&s| std::char::from_digit(s as u32 + 1, 36).unwrap()));
        Some(out)
    }
}

impl fmt::Display for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            for (c, &s) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", s + 1)?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatinSquare(n={})\n{}", self.n, self)
    }
}

/// Row-major lexicographic order; squares of different order compare by order first.
impl Ord for LatinSquare {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.grid.cmp(&other.grid))
    }
}

impl PartialOrd for LatinSquare {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A permutation of the coordinate roles (row, column, symbol).
///
/// `Conjugate([a, b, c])` sends the triple `t` to `[t[a], t[b], t[c]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Conjugate(pub [usize; 3]);

impl Conjugate {
    pub const IDENTITY: Conjugate = Conjugate([0, 1, 2]);
    pub const ALL: [Conjugate; 6] = [
        Conjugate([0, 1, 2]),
        Conjugate([1, 0, 2]),
        Conjugate([0, 2, 1]),
        Conjugate([2, 1, 0]),
        Conjugate([1, 2, 0]),
        Conjugate([2, 0, 1]),
    ];

    #[inline]
    pub fn apply(self, t: [usize; 3]) -> [usize; 3] {
        [t[self.0[0]], t[self.0[1]], t[self.0[2]]]
    }

    pub fn inverse(self) -> Conjugate {
        let mut inv = [0; 3];
        for (k, &p) in self.0.iter().enumerate() {
            inv[p] = k;
        }
        Conjugate(inv)
    }
}

/// A partial map `0..n -> 0..n`, injective where defined. Unlabelled points
/// map to `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialPermutation {
    pub(crate) image: Vec<u16>,
}

impl PartialPermutation {
    pub fn empty(n: usize) -> Self {
        PartialPermutation { image: vec![n as u16; n] }
    }

    pub fn identity(n: usize) -> Self {
        PartialPermutation { image: (0..n as u16).collect() }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut image: Vec<u16> = (0..n as u16).collect();
        image.shuffle(rng);
        PartialPermutation { image }
    }

    /// Builds from explicit images, `None` meaning unlabelled.
    pub fn from_images(images: &[Option<usize>]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut image = Vec::with_capacity(n);
        for (x, im) in images.iter().enumerate() {
            match *im {
                Some(v) if v < n && !seen[v] => {
                    seen[v] = true;
                    image.push(v as u16);
                }
                Some(_) => return Err(Error::OutOfRange(x, 0)),
                None => image.push(n as u16),
            }
        }
        Ok(PartialPermutation { image })
    }

    /// Builds a total permutation from its images.
    pub fn from_permutation(images: &[usize]) -> Result<Self> {
        Self::from_images(&images.iter().map(|&v| Some(v)).collect::<Vec<_>>())
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn get(&self, x: usize) -> Option<usize> {
        let v = self.image[x] as usize;
        (v < self.image.len()).then_some(v)
    }

    pub fn size(&self) -> usize {
        let n = self.image.len() as u16;
        self.image.iter().filter(|&&v| v != n).count()
    }

    pub fn is_total(&self) -> bool {
        self.size() == self.order()
    }

    /// Images as 0-based values, `None` for unlabelled points.
    pub fn images(&self) -> Vec<Option<usize>> {
        (0..self.order()).map(|x| self.get(x)).collect()
    }

    /// Inverse of a total permutation.
    pub fn inverse(&self) -> Option<PartialPermutation> {
        if !self.is_total() {
            return None;
        }
        let mut inv = vec![0u16; self.order()];
        for (x, &v) in self.image.iter().enumerate() {
            inv[v as usize] = x as u16;
        }
        Some(PartialPermutation { image: inv })
    }

    /// `self` after `other`: `x -> self(other(x))`, unlabelled propagating.
    pub fn compose(&self, other: &PartialPermutation) -> PartialPermutation {
        let n = self.order();
        let image = other
            .image
            .iter()
            .map(|&v| if (v as usize) < n { self.image[v as usize] } else { n as u16 })
            .collect();
        PartialPermutation { image }
    }
}

/// Labels for rows (`alpha`), columns (`beta`) and symbols (`gamma`).
/// A total labelling is an isotopism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialLabelling {
    pub alpha: PartialPermutation,
    pub beta: PartialPermutation,
    pub gamma: PartialPermutation,
}

impl PartialLabelling {
    pub fn new(alpha: PartialPermutation, beta: PartialPermutation, gamma: PartialPermutation) -> Self {
        PartialLabelling { alpha, beta, gamma }
    }

    pub fn empty(n: usize) -> Self {
        let e = PartialPermutation::empty(n);
        PartialLabelling::new(e.clone(), e.clone(), e)
    }

    pub fn identity(n: usize) -> Self {
        let id = PartialPermutation::identity(n);
        PartialLabelling::new(id.clone(), id.clone(), id)
    }

    /// A uniformly random isotopism.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        PartialLabelling::new(
            PartialPermutation::random(n, rng),
            PartialPermutation::random(n, rng),
            PartialPermutation::random(n, rng),
        )
    }

    /// An isomorphism `(alpha, alpha, alpha)`.
    pub fn isomorphism(alpha: PartialPermutation) -> Self {
        PartialLabelling::new(alpha.clone(), alpha.clone(), alpha)
    }

    pub fn order(&self) -> usize {
        self.alpha.order()
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.alpha.size(), self.beta.size(), self.gamma.size())
    }

    pub fn is_isotopism(&self) -> bool {
        self.alpha.is_total() && self.beta.is_total() && self.gamma.is_total()
    }
}

/// The array induced on labelled rows and columns, laid out in label order.
/// Cells whose symbol is unlabelled hold `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialArray {
    n: usize,
    rows: usize,
    cols: usize,
    cells: Vec<u16>,
}

impl PartialArray {
    /// Builds an array from cell values, `None` standing for the unlabelled marker.
    pub fn from_cells(n: usize, cells: &[Vec<Option<usize>>]) -> Result<Self> {
        let rows = cells.len();
        let cols = cells.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows * cols);
        for (r, row) in cells.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::NotSquare { row: r, len: row.len(), n: cols });
            }
            for (c, v) in row.iter().enumerate() {
                match *v {
                    Some(s) if s < n => flat.push(s as u16),
                    Some(_) => return Err(Error::OutOfRange(r, c)),
                    None => flat.push(n as u16),
                }
            }
        }
        Ok(PartialArray { n, rows, cols, cells: flat })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        let v = self.cells[r * self.cols + c] as usize;
        (v < self.n).then_some(v)
    }

    pub fn has_unlabelled(&self) -> bool {
        self.cells.iter().any(|&v| v as usize == self.n)
    }

    pub fn cells(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c)).collect()).collect()
    }
}

impl From<&LatinSquare> for PartialArray {
    fn from(l: &LatinSquare) -> Self {
        PartialArray { n: l.n, rows: l.n, cols: l.n, cells: l.grid.clone() }
    }
}

/// The array `L_{alpha beta gamma}` on the labelled rows and columns.
pub fn apply_labelling(l: &LatinSquare, phi: &PartialLabelling) -> Result<PartialArray> {
    let n = l.order();
    let (a, b, g) = phi.sizes();
    if a != b || b != g || phi.order() != n {
        return Err(Error::SizeMismatch(a, b, g));
    }
    let mut rows: Vec<(usize, usize)> = (0..n).filter_map(|r| phi.alpha.get(r).map(|lab| (lab, r))).collect();
    let mut cols: Vec<(usize, usize)> = (0..n).filter_map(|c| phi.beta.get(c).map(|lab| (lab, c))).collect();
    rows.sort_unstable();
    cols.sort_unstable();
    let mut cells = Vec::with_capacity(a * a);
    for &(_, r) in &rows {
        for &(_, c) in &cols {
            cells.push(phi.gamma.image[l.get(r, c)]);
        }
    }
    Ok(PartialArray { n, rows: a, cols: a, cells })
}

/// Row-major lexicographic comparison with the unlabelled marker greatest.
pub fn lex_compare(a: &PartialArray, b: &PartialArray) -> Result<Ordering> {
    if a.dims() != b.dims() || a.n != b.n {
        return Err(Error::DimensionMismatch(a.rows, a.cols, b.rows, b.cols));
    }
    Ok(a.cells.cmp(&b.cells))
}
