//! Exact dense linear algebra over the rationals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;

/// Row-major rectangular matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vector> {
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
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        rref(&mut self.clone(), &order).len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}
impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Outcome of an exact linear solve `A x = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSolution {
    /// A particular solution, or `None` for an inconsistent system.
    pub particular: Option<Vector>,
    /// A basis of the kernel of `A`.
    pub kernel_basis: Vec<Vector>,
}

/// Reduced-row-echelon solve of `A x = rhs`.
pub fn solve_linear(a: &Matrix, rhs: &[Scalar]) -> Result<LinearSolution> {
    let order: Vec<usize> = (0..a.ncols()).collect();
    solve_linear_with_order(a, rhs, &order)
}

/// Same as [`solve_linear`] but choosing pivot columns in the given order.
/// Used to witness that downstream results do not depend on pivot choices.
pub fn solve_linear_with_order(
    a: &Matrix,
    rhs: &[Scalar],
    col_order: &[usize],
) -> Result<LinearSolution> {
    if rhs.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, rhs has length {}",
            a.nrows(),
            rhs.len()
        )));
    }
    assert_eq!(col_order.len(), a.ncols(), "pivot order must cover all columns");

    // augmented elimination
    let mut m = a.clone();
    let mut b = rhs.to_vec();
    let pivots = rref_aug(&mut m, &mut b, col_order);

    // inconsistency: zero row with nonzero rhs
    let pivot_rows = pivots.len();
    for i in pivot_rows..m.nrows() {
        if !b[i].is_zero() {
            return Ok(LinearSolution {
                particular: None,
                kernel_basis: kernel_from_rref(&m, &pivots),
            });
        }
    }

    let mut particular = vec![Scalar::zero(); m.ncols()];
    for (row, &col) in pivots.iter().enumerate() {
        particular[col] = b[row].clone();
    }
    Ok(LinearSolution {
        particular: Some(particular),
        kernel_basis: kernel_from_rref(&m, &pivots),
    })
}

/// Reduced row echelon form of a list of vectors: returns the nonzero reduced
/// rows together with their pivot columns (canonical span representation).
pub fn rref_rows(rows: Vec<Vector>) -> (Vec<Vector>, Vec<usize>) {
    if rows.is_empty() {
        return (vec![], vec![]);
    }
    let ncols = rows[0].len();
    let mut m = Matrix::from_rows(rows);
    let order: Vec<usize> = (0..ncols).collect();
    let pivots = rref(&mut m, &order);
    let reduced = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
    (reduced, pivots)
}

/// Kernel basis of `A` alone.
pub fn kernel(a: &Matrix) -> Vec<Vector> {
    let order: Vec<usize> = (0..a.ncols()).collect();
    let mut m = a.clone();
    let pivots = rref(&mut m, &order);
    kernel_from_rref(&m, &pivots)
}

fn rref(m: &mut Matrix, col_order: &[usize]) -> Vec<usize> {
    let mut dummy = vec![Scalar::zero(); m.nrows()];
    rref_aug(m, &mut dummy, col_order)
}

// Gauss-Jordan with pivot columns taken in `col_order`; returns pivot columns
// in row order after reduction.
fn rref_aug(m: &mut Matrix, b: &mut [Scalar], col_order: &[usize]) -> Vec<usize> {
    let rows = m.nrows();
    let mut pivots: Vec<usize> = vec![];
    let mut next_row = 0;
    for &col in col_order {
        if next_row >= rows {
            break;
        }
        let Some(pivot_row) = (next_row..rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        swap_rows(m, b, next_row, pivot_row);
        let inv = m[(next_row, col)].inv();
        scale_row(m, b, next_row, &inv);
        for r in 0..rows {
            if r != next_row && !m[(r, col)].is_zero() {
                let factor = m[(r, col)].clone();
                sub_scaled_row(m, b, r, next_row, &factor);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    // move pivot rows into leading position order already maintained
    pivots
}

fn kernel_from_rref(m: &Matrix, pivots: &[usize]) -> Vec<Vector> {
    let free: Vec<usize> = (0..m.ncols()).filter(|c| !pivots.contains(c)).collect();
    let mut basis = vec![];
    for &fc in &free {
        let mut v = vec![Scalar::zero(); m.ncols()];
        v[fc] = Scalar::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -&m[(row, fc)];
        }
        basis.push(v);
    }
    basis
}

fn swap_rows(m: &mut Matrix, b: &mut [Scalar], i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..m.ncols() {
        let t = m[(i, c)].clone();
        m[(i, c)] = m[(j, c)].clone();
        m[(j, c)] = t;
    }
    b.swap(i, j);
}

fn scale_row(m: &mut Matrix, b: &mut [Scalar], i: usize, c: &Scalar) {
    for col in 0..m.ncols() {
        let v = &m[(i, col)] * c;
        m[(i, col)] = v;
    }
    b[i] = &b[i] * c;
}

fn sub_scaled_row(m: &mut Matrix, b: &mut [Scalar], target: usize, src: usize, factor: &Scalar) {
    for col in 0..m.ncols() {
        let v = &m[(target, col)] - &(&m[(src, col)] * factor);
        m[(target, col)] = v;
    }
    b[target] = &b[target] - &(&b[src] * factor);
}
