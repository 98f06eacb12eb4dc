use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Exact sparse matrix in compressed-row form.
///
/// Column indices are strictly increasing within each row and no stored value
/// is zero, so two matrices are equal iff they are equal as matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Rational>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| Rational::one()))
    }

    pub fn diagonal<I: IntoIterator<Item = Rational>>(diag: I) -> Self {
        let mut b = Builder::new(0, 0);
        let mut n = 0;
        for (i, v) in diag.into_iter().enumerate() {
            b.set(i, i, v);
            n = i + 1;
        }
        b.rows = n;
        b.cols = n;
        b.build()
    }

    /// Builds a matrix from coordinates. Zeros are dropped; duplicate or
    /// out-of-range coordinates are rejected.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            if map.insert((i, j), v).is_some() {
                return Err(Error::InvalidMatrix(format!("duplicate entry ({i}, {j})")));
            }
        }
        Ok(Builder { rows, cols, map }.build())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Largest number of stored entries in any row, diagonal included.
    pub fn d_max(&self) -> usize {
        self.row_ptr
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    pub fn row_counts(&self) -> Vec<usize> {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for &j in &self.col_idx {
            counts[j] += 1;
        }
        counts
    }

    /// Entries of row `i` as `(col, value)`, in increasing column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(&self.values[range])
    }

    /// All entries as `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Rational> {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .binary_search(&j)
            .ok()
            .map(|pos| &self.values[range.start + pos])
    }

    /// Value at `(i, j)`, zero when not stored.
    pub fn value(&self, i: usize, j: usize) -> Rational {
        self.get(i, j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn transpose(&self) -> Self {
        let mut builder = Builder::new(self.cols, self.rows);
        for (i, j, v) in self.iter() {
            builder.set(j, i, v.clone());
        }
        builder.build()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v = &*v * factor;
        }
        out
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut acc: Vec<Option<Rational>> = vec![None; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    let prod = a * b;
                    match &mut acc[j] {
                        Some(slot) => *slot += prod,
                        slot @ None => {
                            *slot = Some(prod);
                            touched.push(j);
                        }
                    }
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                let v = acc[j].take().expect("touched slot");
                if !v.is_zero() {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            touched.clear();
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, "sub", |a, b| a - b)
    }

    fn combine(
        &self,
        other: &SparseMatrix,
        op: &'static str,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<SparseMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        let zero = Rational::zero();
        let mut builder = Builder::new(self.rows, self.cols);
        for i in 0..self.rows {
            merge_rows(self.row(i), other.row(i), |j, a, b| {
                builder.set(i, j, f(a.unwrap_or(&zero), b.unwrap_or(&zero)));
            });
        }
        Ok(builder.build())
    }

    /// Block diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut builder = Builder::new(self.rows + other.rows, self.cols + other.cols);
        builder.add_block(0, 0, self);
        builder.add_block(self.rows, self.cols, other);
        builder.build()
    }

    /// The submatrix with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> SparseMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        let mut builder = Builder::new(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for (j, v) in self.row(i) {
                if (c0..c1).contains(&j) {
                    builder.set(i - r0, j - c0, v.clone());
                }
            }
        }
        builder.build()
    }

    /// Trailing principal submatrix starting at row/column `start`.
    pub fn trailing(&self, start: usize) -> SparseMatrix {
        self.block(start, self.rows, start, self.cols)
    }

    /// Assembles `[[a11, a12], [a21, a22]]`.
    pub fn from_blocks(
        a11: &SparseMatrix,
        a12: &SparseMatrix,
        a21: &SparseMatrix,
        a22: &SparseMatrix,
    ) -> Result<SparseMatrix> {
        if a11.rows != a12.rows
            || a21.rows != a22.rows
            || a11.cols != a21.cols
            || a12.cols != a22.cols
        {
            return Err(Error::ShapeMismatch {
                op: "from_blocks",
                left: a11.shape(),
                right: a22.shape(),
            });
        }
        let mut builder = Builder::new(a11.rows + a21.rows, a11.cols + a12.cols);
        builder.add_block(0, 0, a11);
        builder.add_block(0, a11.cols, a12);
        builder.add_block(a11.rows, 0, a21);
        builder.add_block(a11.rows, a11.cols, a22);
        Ok(builder.build())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| self.row(i).map(|(_, v)| v).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.cols];
        for (_, j, v) in self.iter() {
            sums[j] += v;
        }
        sums
    }

    /// Nonnegative with every row and column summing to exactly one.
    pub fn is_doubly_stochastic(&self) -> bool {
        self.is_square()
            && self.values.iter().all(|v| !v.is_negative())
            && self.row_sums().iter().all(One::is_one)
            && self.col_sums().iter().all(One::is_one)
    }

    pub fn to_dense_f64(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.cols]; self.rows];
        for (i, j, v) in self.iter() {
            dense[i][j] = to_f64(v);
        }
        dense
    }

    /// Compressed rows converted to the nearest `f64` values.
    pub fn to_f64_rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.rows)
            .map(|i| self.row(i).map(|(j, v)| (j, to_f64(v))).collect())
            .collect()
    }
}

pub(crate) fn to_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Walks two sorted rows in lock step, calling `f` once per column present
/// in either.
fn merge_rows<'a>(
    left: impl Iterator<Item = (usize, &'a Rational)>,
    right: impl Iterator<Item = (usize, &'a Rational)>,
    mut f: impl FnMut(usize, Option<&'a Rational>, Option<&'a Rational>),
) {
    let mut left = left.peekable();
    let mut right = right.peekable();
    loop {
        match (left.peek(), right.peek()) {
            (None, None) => break,
            (Some(&(j, a)), None) => {
                f(j, Some(a), None);
                left.next();
            }
            (None, Some(&(j, b))) => {
                f(j, None, Some(b));
                right.next();
            }
            (Some(&(ja, a)), Some(&(jb, b))) => {
                if ja < jb {
                    f(ja, Some(a), None);
                    left.next();
                } else if jb < ja {
                    f(jb, None, Some(b));
                    right.next();
                } else {
                    f(ja, Some(a), Some(b));
                    left.next();
                    right.next();
                }
            }
        }
    }
}

/// `max |a - b|` over all coordinates, exact.
pub fn max_abs_diff(a: &SparseMatrix, b: &SparseMatrix) -> Result<Rational> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            op: "max_abs_diff",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut worst = Rational::zero();
    for i in 0..a.rows {
        merge_rows(a.row(i), b.row(i), |_, x, y| {
            let diff = match (x, y) {
                (Some(x), Some(y)) => (x - y).abs(),
                (Some(v), None) | (None, Some(v)) => v.abs(),
                (None, None) => unreachable!(),
            };
            if diff > worst {
                worst = diff;
            }
        });
    }
    Ok(worst)
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "SparseMatrix {}x{} nnz={}",
            self.rows,
            self.cols,
            self.nnz()
        )?;
        for (i, j, v) in self.iter() {
            writeln!(f, "  ({i}, {j}) = {v}")?;
        }
        Ok(())
    }
}

/// Coordinate accumulator used to assemble matrices.
#[derive(Debug, Clone)]
pub struct Builder {
    rows: usize,
    cols: usize,
    map: BTreeMap<(usize, usize), Rational>,
}

impl Builder {
    pub fn new(rows: usize, cols: usize) -> Self {
        Builder {
            rows,
            cols,
            map: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.map.insert((i, j), v);
    }

    pub fn add(&mut self, i: usize, j: usize, v: Rational) {
        *self.map.entry((i, j)).or_insert_with(Rational::zero) += v;
    }

    /// Adds `m` with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, m: &SparseMatrix) {
        for (i, j, v) in m.iter() {
            self.add(r0 + i, c0 + j, v.clone());
        }
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: Rational) {
        self.map.insert((j, i), v.clone());
        self.map.insert((i, j), v);
    }

    pub fn build(self) -> SparseMatrix {
        let mut row_ptr = vec![0usize; self.rows + 1];
        let mut col_idx = Vec::with_capacity(self.map.len());
        let mut values = Vec::with_capacity(self.map.len());
        for ((i, j), v) in self.map {
            assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
            if v.is_zero() {
                continue;
            }
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..self.rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr,
            col_idx,
            values,
        }
    }
}
