//! Dense arbitrary-precision integer matrices, Smith normal form and the
//! lattice computations built on it (integer solves, kernels, quotients).

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Row-major integer matrix. Matrices act on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, d) in entries.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {}, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(IntMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    /// Convenience constructor from small literals. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("ragged matrix literal")
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<BigInt>], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        self.transpose().mul_vec(v)
    }

    pub fn checked_sub(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn checked_add(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    fn zip_with(&self, rhs: &IntMatrix, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<IntMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "shapes {}x{} and {}x{} differ",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * k).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of widths {} and {}",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        Ok(self.transpose().vstack(&other.transpose())?.transpose())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn has_nonnegative_entries(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative())
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }

    pub fn has_full_column_rank(&self) -> bool {
        self.rank() == self.cols
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * if n == 0 { BigInt::one() } else { a[(n - 1, n - 1)].clone() })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            if !v.is_zero() {
                self[(dst, j)] += v;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            if !v.is_zero() {
                self[(i, dst)] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix shape mismatch")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Result of [`smith_normal_form`]: `u * m * v == s` with `u`, `v` unimodular.
/// The inverses of the transforms are tracked alongside them.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_0 | d_1 | ...` of length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with a minimal-absolute-value pivot strategy.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);

    // Row operation on s is mirrored on u (left) and, inverted, on u_inv (right).
    macro_rules! swap_rows {
        ($a:expr, $b:expr) => {{
            s.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    macro_rules! swap_cols {
        ($a:expr, $b:expr) => {{
            s.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }
    macro_rules! add_row {
        ($dst:expr, $src:expr, $k:expr) => {{
            let k: &BigInt = $k;
            s.add_row_multiple($dst, $src, k);
            u.add_row_multiple($dst, $src, k);
            u_inv.add_col_multiple($src, $dst, &-k);
        }};
    }
    macro_rules! add_col {
        ($dst:expr, $src:expr, $k:expr) => {{
            let k: &BigInt = $k;
            s.add_col_multiple($dst, $src, k);
            v.add_col_multiple($dst, $src, k);
            v_inv.add_row_multiple($src, $dst, &-k);
        }};
    }

    let n = r.min(c);
    for t in 0..n {
        let Some((pi, pj)) = min_abs_position(&s, t..r, t..c) else {
            break;
        };
        swap_rows!(t, pi);
        swap_cols!(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if !s[(i, t)].is_zero() {
                    let q = &s[(i, t)] / &s[(t, t)];
                    add_row!(i, t, &-q);
                    clean &= s[(i, t)].is_zero();
                }
            }
            for j in t + 1..c {
                if !s[(t, j)].is_zero() {
                    let q = &s[(t, j)] / &s[(t, t)];
                    add_col!(j, t, &-q);
                    clean &= s[(t, j)].is_zero();
                }
            }
            if !clean {
                // A remainder is now smaller than the pivot; promote it.
                let col_min = min_abs_position(&s, t..r, t..t + 1);
                let row_min = min_abs_position(&s, t..t + 1, t..c);
                let (pi, pj) = match (col_min, row_min) {
                    (Some(a), Some(b)) => {
                        if s[a].abs() <= s[b].abs() {
                            a
                        } else {
                            b
                        }
                    }
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!("pivot is nonzero"),
                };
                swap_rows!(t, pi);
                swap_cols!(t, pj);
                continue;
            }
            let offender = (t + 1..r).find(|&i| {
                (t + 1..c).any(|j| !(&s[(i, j)] % &s[(t, t)]).is_zero())
            });
            match offender {
                Some(i) => add_row!(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            // Negating row t of u negates column t of u_inv.
            for i in 0..r {
                let x = -&u_inv[(i, t)];
                u_inv[(i, t)] = x;
            }
        }
    }
    SmithForm { s, u, v, u_inv, v_inv }
}

fn min_abs_position(
    m: &IntMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = &m[(i, j)];
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, b)| a < *b) {
                best = Some(((i, j), a));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Integer solution `c` of `m * c = y`, if one exists.
pub fn solve_integer(m: &IntMatrix, y: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if y.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            y.len(),
            m.rows()
        )));
    }
    let snf = smith_normal_form(m);
    Ok(solve_with(&snf, y))
}

/// Solves `m * c = y` against a precomputed Smith form of `m`.
pub fn solve_with(snf: &SmithForm, y: &[BigInt]) -> Option<Vec<BigInt>> {
    let z = snf.u.mul_vec(y).ok()?;
    let diag = snf.diagonal();
    let rank = snf.rank();
    let mut w = vec![BigInt::zero(); snf.s.cols()];
    for (i, zi) in z.iter().enumerate() {
        if i < rank {
            if !(zi % &diag[i]).is_zero() {
                return None;
            }
            w[i] = zi / &diag[i];
        } else if !zi.is_zero() {
            return None;
        }
    }
    snf.v.mul_vec(&w).ok()
}

/// Basis (as columns) of the integer right kernel `{c : m * c = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let cols: Vec<Vec<BigInt>> = (rank..m.cols()).map(|j| snf.v.column(j)).collect();
    IntMatrix::from_columns(&cols, m.cols()).expect("kernel columns have ambient length")
}

/// Basis (as columns) of the lattice spanned by the columns of `m`.
pub fn column_lattice_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let cols: Vec<Vec<BigInt>> = (0..snf.rank())
        .map(|i| snf.u_inv.column(i).iter().map(|x| x * &diag[i]).collect())
        .collect();
    IntMatrix::from_columns(&cols, m.rows()).expect("basis columns have ambient length")
}

/// Invariant factors of `L_big / L_small`, where both lattices are spanned by
/// matrix columns and `L_small ⊆ L_big`. Trivial factors are dropped and free
/// factors appear as zeros at the end.
pub fn lattice_quotient(big: &IntMatrix, small: &IntMatrix) -> Result<Vec<BigInt>> {
    if big.rows() != small.rows() {
        return Err(Error::DimensionMismatch(
            "lattices live in different ambient spaces".into(),
        ));
    }
    let snf = smith_normal_form(big);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let z = snf.u.checked_mul(small)?;
    let mut coords = IntMatrix::zeros(rank, small.cols());
    for i in 0..z.rows() {
        for j in 0..z.cols() {
            let x = &z[(i, j)];
            if i < rank {
                if !(x % &diag[i]).is_zero() {
                    return Err(Error::InvalidInput("sublattice is not contained in lattice".into()));
                }
                coords[(i, j)] = x / &diag[i];
            } else if !x.is_zero() {
                return Err(Error::InvalidInput("sublattice is not contained in lattice".into()));
            }
        }
    }
    Ok(cokernel_invariants(&coords))
}

/// Invariant factors of `Z^rows / (column span of m)`.
pub fn cokernel_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let snf = smith_normal_form(m);
    let mut out: Vec<BigInt> = snf.diagonal().into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
    out.extend(std::iter::repeat_n(BigInt::zero(), m.rows() - snf.rank()));
    out
}
