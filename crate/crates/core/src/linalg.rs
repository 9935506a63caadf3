//! Dense vectors and matrices over GF(q), with the exact elimination
//! routines the witness machinery is built on: rank, row-space basis
//! extension, expression in a row basis, and linear solving. Pivots are
//! always the lowest-index nonzero entry, so every routine is
//! deterministic.

use crate::field::Field;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A vector over GF(q); entries are canonical element codes.
pub type Vector = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector at position {index} is not in the row space")]
    NotInRowSpace { index: usize },
    #[error("matrix is not expressible in the given row basis")]
    NotExpressible,
    #[error("the supplied basis rows are linearly dependent")]
    DependentBasisRows,
}

/// Indices of the nonzero entries.
pub fn support(x: &[u32]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(i, _)| i)
        .collect()
}

/// Hamming weight.
pub fn weight(x: &[u32]) -> usize {
    x.iter().filter(|&&v| v != 0).count()
}

/// Row-major dense matrix over GF(q).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_cols(cols: Vec<Vector>) -> Matrix {
        Matrix::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Keeps the columns listed in `keep`, in the given order.
    pub fn select_cols(&self, keep: &[usize]) -> Matrix {
        let mut m = Matrix::zero(self.rows, keep.len());
        for i in 0..self.rows {
            for (jj, &j) in keep.iter().enumerate() {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b == 0 {
                        continue;
                    }
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, b)));
                }
            }
        }
        out
    }

    /// Matrix-vector product (x as a column).
    pub fn mul_vec(&self, f: &Field, x: &[u32]) -> Vector {
        assert_eq!(self.cols, x.len(), "inner dimensions must agree");
        let mut out = vec![0u32; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = self.row(i);
            let mut acc = 0u32;
            for (a, &b) in row.iter().zip(x) {
                if *a != 0 && b != 0 {
                    acc = f.add(acc, f.mul(*a, b));
                }
            }
            *slot = acc;
        }
        out
    }

    /// Rank over GF(q) by Gaussian elimination.
    pub fn rank(&self, f: &Field) -> usize {
        let mut elim = Eliminator::new(f, self.cols);
        for i in 0..self.rows {
            elim.insert(self.row(i).to_vec());
        }
        elim.len()
    }

    /// Coordinates of F_q^n (row indices) where some column is nonzero.
    pub fn row_support(&self) -> Vec<usize> {
        (0..self.rows)
            .filter(|&i| self.row(i).iter().any(|&v| v != 0))
            .collect()
    }

    /// Number of nonzero rows.
    pub fn row_weight(&self) -> usize {
        self.row_support().len()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }
}

/// Incremental row-echelon state. Inserted rows are reduced against the
/// stored pivot rows; surviving rows are normalized so their pivot entry
/// is 1. The pivot of a row is its lowest-index nonzero entry.
pub struct Eliminator<'f> {
    field: &'f Field,
    width: usize,
    /// (pivot column, normalized row), kept sorted by pivot column.
    rows: Vec<(usize, Vector)>,
}

impl<'f> Eliminator<'f> {
    pub fn new(field: &'f Field, width: usize) -> Self {
        Eliminator {
            field,
            width,
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` in place against the stored rows.
    pub fn reduce(&self, v: &mut Vector) {
        let f = self.field;
        for (p, row) in &self.rows {
            let c = v[*p];
            if c != 0 {
                for (vi, ri) in v.iter_mut().zip(row) {
                    if *ri != 0 {
                        *vi = f.sub(*vi, f.mul(c, *ri));
                    }
                }
            }
        }
    }

    /// Whether `v` lies in the span of the inserted rows.
    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Inserts a row; returns its pivot column if it was independent of
    /// the rows already stored.
    pub fn insert(&mut self, mut v: Vector) -> Option<usize> {
        assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        let p = v.iter().position(|&x| x != 0)?;
        let f = self.field;
        let inv = f.inv(v[p]).expect("pivot entry is nonzero");
        for x in v.iter_mut() {
            if *x != 0 {
                *x = f.mul(*x, inv);
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        Some(p)
    }
}

/// One solution of A x = b, or None when the system is inconsistent.
/// Free variables are set to zero, so the answer is deterministic.
pub fn solve_linear(f: &Field, a: &Matrix, b: &[u32]) -> Option<Vector> {
    assert_eq!(a.rows(), b.len(), "rhs length must match row count");
    let n = a.cols();
    // eliminate on [A | b]
    let mut elim = Eliminator::new(f, n + 1);
    for (i, &bi) in b.iter().enumerate().take(a.rows()) {
        let mut row = a.row(i).to_vec();
        row.push(bi);
        elim.insert(row);
    }
    let mut x = vec![0u32; n];
    // Rows are sorted by pivot; substitute from the bottom up.
    for (p, row) in elim.rows.iter().rev() {
        if *p == n {
            return None; // pivot in the augmented column
        }
        let mut acc = row[n];
        for j in p + 1..n {
            if row[j] != 0 && x[j] != 0 {
                acc = f.sub(acc, f.mul(row[j], x[j]));
            }
        }
        x[*p] = acc; // pivot entry is 1 after normalization
    }
    Some(x)
}

/// Splits `given` into an independent spanning subset and completes it
/// to a basis of Row(X) using rows of X. Every vector in `given` must
/// lie in Row(X).
pub fn row_space_tools(
    f: &Field,
    x: &Matrix,
    given: &[Vector],
) -> Result<(Vec<Vector>, Vec<Vector>), LinalgError> {
    for v in given {
        if v.len() != x.cols() {
            return Err(LinalgError::DimensionMismatch(format!(
                "given vector has length {}, expected {}",
                v.len(),
                x.cols()
            )));
        }
    }
    let mut row_space = Eliminator::new(f, x.cols());
    for i in 0..x.rows() {
        row_space.insert(x.row(i).to_vec());
    }
    for (index, v) in given.iter().enumerate() {
        if !row_space.contains(v) {
            return Err(LinalgError::NotInRowSpace { index });
        }
    }
    let mut picked = Eliminator::new(f, x.cols());
    let mut basis = Vec::new();
    for v in given {
        if picked.insert(v.clone()).is_some() {
            basis.push(v.clone());
        }
    }
    let mut completion = Vec::new();
    for i in 0..x.rows() {
        let row = x.row(i).to_vec();
        if picked.insert(row.clone()).is_some() {
            completion.push(row);
        }
    }
    Ok((basis, completion))
}

/// The unique M with X = M · W, given independent rows of W and
/// Row(X) ⊆ Row(W). Columns of M are the coefficient vectors of X in
/// the row basis W.
pub fn express_in_row_basis(f: &Field, x: &Matrix, w: &Matrix) -> Result<Matrix, LinalgError> {
    if x.cols() != w.cols() {
        return Err(LinalgError::DimensionMismatch(format!(
            "X has {} columns, W has {}",
            x.cols(),
            w.cols()
        )));
    }
    let t = w.rows();
    // Track how each reduced row decomposes over the original rows of W.
    let f_ref = f;
    let width = w.cols();
    let mut reduced: Vec<(usize, Vector, Vector)> = Vec::new(); // (pivot, row, coeffs over W)
    for i in 0..t {
        let mut row = w.row(i).to_vec();
        let mut coeff = vec![0u32; t];
        coeff[i] = 1;
        for (p, r, c) in &reduced {
            let factor = row[*p];
            if factor != 0 {
                for (xj, rj) in row.iter_mut().zip(r) {
                    if *rj != 0 {
                        *xj = f_ref.sub(*xj, f_ref.mul(factor, *rj));
                    }
                }
                for (cj, oj) in coeff.iter_mut().zip(c) {
                    if *oj != 0 {
                        *cj = f_ref.sub(*cj, f_ref.mul(factor, *oj));
                    }
                }
            }
        }
        let Some(p) = row.iter().position(|&v| v != 0) else {
            return Err(LinalgError::DependentBasisRows);
        };
        let inv = f_ref.inv(row[p]).expect("pivot entry is nonzero");
        for v in row.iter_mut() {
            *v = f_ref.mul(*v, inv);
        }
        for v in coeff.iter_mut() {
            *v = f_ref.mul(*v, inv);
        }
        let at = reduced.partition_point(|(q, _, _)| *q < p);
        reduced.insert(at, (p, row, coeff));
    }
    let mut m = Matrix::zero(x.rows(), t);
    let mut scratch = vec![0u32; width];
    for i in 0..x.rows() {
        scratch.copy_from_slice(x.row(i));
        let mut out = vec![0u32; t];
        for (p, r, c) in &reduced {
            let factor = scratch[*p];
            if factor != 0 {
                for (sj, rj) in scratch.iter_mut().zip(r) {
                    if *rj != 0 {
                        *sj = f_ref.sub(*sj, f_ref.mul(factor, *rj));
                    }
                }
                for (oj, cj) in out.iter_mut().zip(c) {
                    if *cj != 0 {
                        *oj = f_ref.add(*oj, f_ref.mul(factor, *cj));
                    }
                }
            }
        }
        if scratch.iter().any(|&v| v != 0) {
            return Err(LinalgError::NotExpressible);
        }
        for (j, v) in out.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}
