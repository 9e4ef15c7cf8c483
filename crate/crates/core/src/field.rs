//! Exact linear algebra over a prime field `F_p`.
//!
//! Every Hom, rank, kernel and cokernel computation in the crate bottoms out
//! here. Elimination is plain Gauss–Jordan with first-nonzero pivoting, so the
//! kernel bases and solutions it returns are reproducible run to run.

use std::fmt;

use crate::error::{Error, Result};

/// Default characteristic. Large enough that accidental cancellations in
/// random small matrices are negligible.
pub const DEFAULT_PRIME: u32 = 32003;

/// The prime field `F_p`. Elements are residues `0 <= v < p` stored as `u32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

/// A field element, always reduced modulo the prime of its field.
pub type FieldElem = u32;

impl Default for Fp {
    fn default() -> Self {
        Fp { p: DEFAULT_PRIME }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fp {
    /// Builds `F_p`; `p` must be a prime below `2^31`.
    pub fn new(p: u32) -> Result<Self> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Fp { p })
    }

    pub fn prime(self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    pub fn reduce(self, v: i64) -> FieldElem {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: FieldElem) -> FieldElem {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: FieldElem, b: FieldElem) -> FieldElem {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: FieldElem, mut e: u64) -> FieldElem {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: FieldElem) -> FieldElem {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// Symmetric representative in `(-p/2, p/2]`, used for display.
    pub fn signed(self, a: FieldElem) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// Dense row-major matrix over `F_p`. Zero rows or columns are legal and
/// represent maps to or from the zero space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.field.signed(self.get(r, c)))?;
            }
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub mat: Mat,
    pub pivots: Vec<usize>,
}

impl Mat {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows. `cols` is needed when `rows` is empty.
    pub fn from_rows(field: Fp, cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = Mat::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {r}");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, field.reduce(v));
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<FieldElem>]) -> Self {
        let mut m = Mat::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, &v) in col.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn field(&self) -> Fp {
        self.field
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Integer rows with entries in `(-p/2, p/2]`.
    pub fn to_signed_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&v| self.field.signed(v)).collect())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(
            self.cols, other.rows,
            "shape mismatch in product: {:?} * {:?}",
            self.shape(),
            other.shape()
        );
        let f = self.field;
        let p = f.prime() as u64;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j) as u64;
                    if b != 0 {
                        let cur = out.get(i, j) as u64;
                        out.set(i, j, ((cur + a * b) % p) as u32);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len());
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.shape(), other.shape());
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Mat {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: FieldElem) -> Mat {
        let f = self.field;
        Mat {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block diagonal matrix with the given blocks.
    pub fn block_diag(field: Fp, blocks: &[&Mat]) -> Mat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Copies the columns with the given indices.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, self.rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    /// Reduced row echelon form; pivots are chosen as the first nonzero entry
    /// in each column, scanning rows top to bottom.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col));
            for c in col..m.cols {
                let v = m.get(row, c);
                m.set(row, c, f.mul(v, inv));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { mat: m, pivots }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().pivots.len()
    }

    /// Columns form a basis of `{v : self * v = 0}`, one basis vector per
    /// free column of the echelon form, in increasing column order.
    pub fn kernel_basis(&self) -> Mat {
        let f = self.field;
        let Rref { mat, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = Mat::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                k.set(pc, j, f.neg(mat.get(i, fc)));
            }
        }
        k
    }

    /// Some `x` with `self * x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
        assert_eq!(self.rows, b.len(), "right-hand side has wrong length");
        let rhs = Mat::from_columns(self.field, self.rows, &[b.to_vec()]);
        self.solve_matrix(&rhs).map(|x| x.column(0))
    }

    /// Some `X` with `self * X = b`, or `None` if some column is inconsistent.
    /// Free variables are set to zero.
    pub fn solve_matrix(&self, b: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, b.rows, "right-hand side has wrong row count");
        let aug = self.hstack(b);
        let Rref { mat, pivots } = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.field, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, mat.get(i, self.cols + j));
            }
        }
        Some(x)
    }

    /// Dimension of the cokernel of the span of `sub`'s columns inside an
    /// ambient space of dimension `ambient_dim`.
    pub fn image_complement_dim(&self, ambient_dim: usize) -> usize {
        assert_eq!(self.rows, ambient_dim, "subspace lives in the wrong space");
        ambient_dim - self.rank()
    }

    /// Indices of a maximal set of columns that are independent, chosen
    /// greedily left to right.
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().pivots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Fp {
        Fp::new(7).unwrap()
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Fp::new(32003).is_ok());
        assert!(Fp::new(15).is_err());
        assert!(Fp::new(1).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let f = f7();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn identity_rank() {
        let f = Fp::default();
        assert_eq!(Mat::identity(f, 2).rank(), 2);
        assert_eq!(Mat::identity(f, 2).kernel_basis().cols(), 0);
    }

    #[test]
    fn empty_matrices() {
        let f = Fp::default();
        assert_eq!(Mat::zeros(f, 0, 4).rank(), 0);
        assert_eq!(Mat::zeros(f, 4, 0).rank(), 0);
        assert_eq!(Mat::zeros(f, 0, 4).kernel_basis().cols(), 4);
        assert_eq!(Mat::zeros(f, 3, 0).image_complement_dim(3), 3);
    }

    #[test]
    fn zero_map_kernel_is_everything() {
        let f = Fp::default();
        let k = Mat::zeros(f, 2, 3).kernel_basis();
        assert_eq!(k.shape(), (3, 3));
        assert_eq!(k.rank(), 3);
    }

    #[test]
    fn kernel_of_ones_row_over_f2() {
        let f = Fp::new(2).unwrap();
        let m = Mat::from_rows(f, 2, &[vec![1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        // Enumerate all of F_2^2: exactly one nonzero vector is killed.
        let killed: Vec<(u32, u32)> = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .filter(|&(a, b)| (a, b) != (0, 0) && m.mul_vec(&[a, b]) == vec![0])
            .collect();
        assert_eq!(killed, vec![(1, 1)]);
        assert_eq!(k.column(0), vec![1, 1]);
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let f = Fp::default();
        let b = vec![3, 5, 7];
        assert_eq!(Mat::identity(f, 3).solve(&b), Some(b.clone()));
        assert_eq!(Mat::zeros(f, 3, 3).solve(&b), None);
        assert_eq!(Mat::zeros(f, 3, 3).solve(&[0, 0, 0]), Some(vec![0, 0, 0]));
    }

    #[test]
    fn image_complement_full_span() {
        let f = Fp::default();
        assert_eq!(Mat::identity(f, 3).image_complement_dim(3), 0);
    }

    #[test]
    fn block_diag_and_stacks() {
        let f = f7();
        let a = Mat::from_rows(f, 2, &[vec![1, 2]]);
        let b = Mat::identity(f, 1);
        let d = Mat::block_diag(f, &[&a, &b]);
        assert_eq!(d.to_signed_rows(), vec![vec![1, 2, 0], vec![0, 0, 1]]);
        assert_eq!(a.vstack(&a).rank(), 1);
        assert_eq!(a.hstack(&Mat::zeros(f, 1, 1)).cols(), 3);
    }
}
