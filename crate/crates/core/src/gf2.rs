//! Exact linear algebra over the two-element field.
//!
//! Matrices are bit-packed row-major (`u64` words) because the dominant
//! operation during elimination is a row XOR. All operations are pure and
//! deterministic: pivots are chosen leftmost-column, lowest-row, so ranks,
//! kernels, and representative vectors are reproducible across runs.

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A vector over F_2, bit-packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Gf2Vector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Indices of set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Lowest set bit, or `None` for the zero vector.
    pub fn leading_bit(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                let i = wi * WORD_BITS + w.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
        }
        None
    }
}

impl std::fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A matrix over F_2, bit-packed row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols).max(1);
        Gf2Matrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_rows(rows: &[Gf2Vector], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            for j in r.support() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn from_bit_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "({r}, {c}) out of range");
        (self.data[r * self.words_per_row + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "({r}, {c}) out of range");
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.data[r * self.words_per_row + c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> Gf2Vector {
        let start = r * self.words_per_row;
        Gf2Vector {
            len: self.cols,
            words: self.data[start..start + self.words_per_row].to_vec(),
        }
    }

    pub fn column(&self, c: usize) -> Gf2Vector {
        let mut v = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// XORs row `src` into row `dst`.
    fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let (d0, s0) = (dst * self.words_per_row, src * self.words_per_row);
        for w in 0..self.words_per_row {
            let v = self.data[s0 + w];
            self.data[d0 + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words_per_row {
            self.data.swap(a * self.words_per_row + w, b * self.words_per_row + w);
        }
    }

    /// Matrix-vector product over F_2.
    pub fn mul_vector(&self, v: &Gf2Vector) -> Result<Gf2Vector> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "mul_vector: {}x{} matrix applied to length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            let start = r * self.words_per_row;
            let mut acc = 0u64;
            for (w, &rw) in self.data[start..start + self.words_per_row].iter().enumerate() {
                acc ^= rw & v.words[w];
            }
            if acc.count_ones() % 2 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Matrix product over F_2 (`self * other`), row-oriented: row `r` of
    /// the product is the XOR of the rows of `other` selected by row `r`
    /// of `self`. Fast when `self` is sparse.
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_start = r * out.words_per_row;
            let row_start = r * self.words_per_row;
            for wi in 0..self.words_per_row {
                let mut word = self.data[row_start + wi];
                while word != 0 {
                    let c = wi * WORD_BITS + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let src = c * other.words_per_row;
                    for w in 0..other.words_per_row {
                        out.data[out_start + w] ^= other.data[src + w];
                    }
                }
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}:", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form, rank, and pivot columns.
///
/// Row space is preserved exactly. Pivoting is deterministic: leftmost
/// column first, lowest available row.
pub fn rref_and_rank(m: &Gf2Matrix) -> (Gf2Matrix, usize, Vec<usize>) {
    let mut r = m.clone();
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..r.cols {
        if next_row == r.rows {
            break;
        }
        let Some(pivot_row) = (next_row..r.rows).find(|&i| r.get(i, col)) else {
            continue;
        };
        r.swap_rows(next_row, pivot_row);
        for i in 0..r.rows {
            if i != next_row && r.get(i, col) {
                r.xor_rows(i, next_row);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    (r, pivots.len(), pivots)
}

/// A basis of the null space `{v : m v = 0}`, one vector per free column.
///
/// The basis vectors are independent and there are exactly
/// `cols - rank` of them.
pub fn kernel_basis(m: &Gf2Matrix) -> Vec<Gf2Vector> {
    let (r, _rank, pivots) = rref_and_rank(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = Gf2Vector::zeros(m.cols);
        v.set(free, true);
        for (row, &p) in pivots.iter().enumerate() {
            if r.get(row, free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Reduced echelon basis of the span of `rows`: pivots strictly
/// increasing, each pivot column cleared from every other row. The
/// canonical basis of a subspace.
pub fn reduced_echelon(rows: &[Gf2Vector]) -> Vec<Gf2Vector> {
    let mut ech: Vec<(usize, Gf2Vector)> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        loop {
            let Some(lead) = v.leading_bit() else { break };
            if let Some((_, rv)) = ech.iter().find(|(l, _)| *l == lead) {
                v.xor_assign(rv);
            } else {
                ech.push((lead, v));
                break;
            }
        }
    }
    ech.sort_by_key(|(l, _)| *l);
    // back-substitution for full reduction
    for i in (0..ech.len()).rev() {
        let (lead, row) = (ech[i].0, ech[i].1.clone());
        for j in 0..i {
            if ech[j].1.get(lead) {
                ech[j].1.xor_assign(&row);
            }
        }
    }
    ech.into_iter().map(|(_, v)| v).collect()
}

/// An echelonized span with coefficient tracking, for solving many
/// membership queries against the same basis.
pub struct SpanSolver {
    len: usize,
    k: usize,
    /// (leading bit, reduced vector, expression in the original basis)
    rows: Vec<(usize, Gf2Vector, Gf2Vector)>,
}

impl SpanSolver {
    pub fn new(basis: &[Gf2Vector], len: usize) -> Result<Self> {
        for (i, b) in basis.iter().enumerate() {
            if b.len() != len {
                return Err(Error::Dimension(format!(
                    "span solver: basis[{i}] has length {}, expected {len}",
                    b.len()
                )));
            }
        }
        let mut rows: Vec<(usize, Gf2Vector, Gf2Vector)> = Vec::new();
        for (i, b) in basis.iter().enumerate() {
            let mut v = b.clone();
            let mut c = Gf2Vector::zeros(basis.len());
            c.set(i, true);
            loop {
                let Some(lead) = v.leading_bit() else { break };
                if let Some((_, rv, rc)) = rows.iter().find(|(l, _, _)| *l == lead) {
                    v.xor_assign(rv);
                    c.xor_assign(rc);
                } else {
                    rows.push((lead, v, c));
                    break;
                }
            }
        }
        Ok(SpanSolver {
            len,
            k: basis.len(),
            rows,
        })
    }

    /// Coefficients expressing `target` in the original basis, or `None`
    /// when it is outside the span.
    pub fn solve(&self, target: &Gf2Vector) -> Result<Option<Gf2Vector>> {
        if target.len() != self.len {
            return Err(Error::Dimension(format!(
                "span solver: target has length {}, expected {}",
                target.len(),
                self.len
            )));
        }
        let mut t = target.clone();
        let mut coeffs = Gf2Vector::zeros(self.k);
        loop {
            let Some(lead) = t.leading_bit() else {
                return Ok(Some(coeffs));
            };
            let Some((_, rv, rc)) = self.rows.iter().find(|(l, _, _)| *l == lead) else {
                return Ok(None);
            };
            t.xor_assign(rv);
            coeffs.xor_assign(rc);
        }
    }
}

/// Expresses `target` as an F_2-combination of `basis`, if possible.
///
/// Returns the coefficient vector (length `basis.len()`), or `None` when
/// `target` is outside the span. Recombining with the returned
/// coefficients reproduces `target` exactly.
pub fn solve_in_span(basis: &[Gf2Vector], target: &Gf2Vector) -> Result<Option<Gf2Vector>> {
    SpanSolver::new(basis, target.len())?.solve(target)
}
