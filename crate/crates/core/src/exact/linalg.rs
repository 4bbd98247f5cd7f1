use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{is_zero_rat, BigRat};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigRat>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for t in 0..n {
            m.data[t * n + t] = BigRat::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: Vec<BigRat>) {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn mul_vec(&self, v: &[BigRat]) -> Vec<BigRat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Why an exact solve has no unique answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Degenerate {
    /// The right-hand side is outside the column space.
    Inconsistent { rank: usize, augmented_rank: usize },
    /// Consistent, but the kernel is nontrivial.
    Underdetermined { rank: usize, cols: usize },
}

impl fmt::Display for Degenerate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degenerate::Inconsistent {
                rank,
                augmented_rank,
            } => write!(
                f,
                "inconsistent system (rank {rank}, augmented rank {augmented_rank})"
            ),
            Degenerate::Underdetermined { rank, cols } => {
                write!(f, "underdetermined system (rank {rank} < {cols} unknowns)")
            }
        }
    }
}

/// Clears denominators row by row so elimination can stay in the integers.
fn integer_rows(m: &Matrix, rhs: Option<&[BigRat]>) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|r| {
            let mut row: Vec<&BigRat> = m.row(r).iter().collect();
            if let Some(b) = rhs {
                row.push(&b[r]);
            }
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) row echelon form, in place. Returns the pivot
/// columns, restricted to the first `limit` columns.
fn bareiss_echelon(a: &mut [Vec<BigInt>], limit: usize) -> Vec<usize> {
    let rows = a.len();
    let width = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..limit {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            let factor = a[i][c].clone();
            for j in c + 1..width {
                let v = &a[r][c] * &a[i][j] - &factor * &a[r][j];
                // Every entry is a minor of the input, so the division is exact.
                let (qt, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss step left a remainder");
                a[i][j] = qt;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `matrix * x = rhs` exactly.
///
/// Returns the unique solution, or a [`Degenerate`] report carrying rank
/// information when the system is inconsistent or has a nontrivial kernel.
pub fn solve_exact(matrix: &Matrix, rhs: &[BigRat]) -> Result<Vec<BigRat>, Degenerate> {
    assert_eq!(rhs.len(), matrix.rows, "rhs length mismatch");
    let cols = matrix.cols;
    let mut a = integer_rows(matrix, Some(rhs));
    let pivots = bareiss_echelon(&mut a, cols);
    let rank = pivots.len();
    if a[rank..].iter().any(|row| !row[cols].is_zero()) {
        return Err(Degenerate::Inconsistent {
            rank,
            augmented_rank: rank + 1,
        });
    }
    if rank < cols {
        return Err(Degenerate::Underdetermined { rank, cols });
    }
    let mut x = vec![BigRat::zero(); cols];
    for r in (0..rank).rev() {
        let row = &a[r];
        let mut acc = BigRat::from_integer(row[cols].clone());
        for j in r + 1..cols {
            if !row[j].is_zero() {
                acc -= &x[j] * BigRat::from_integer(row[j].clone());
            }
        }
        x[r] = acc / BigRat::from_integer(row[r].clone());
    }
    Ok(x)
}

/// Basis of the right kernel of `matrix`, one vector per free column.
///
/// Each basis vector has a 1 in its free column and zeros in the other free
/// columns. Empty when the matrix has full column rank.
pub fn nullspace_exact(matrix: &Matrix) -> Vec<Vec<BigRat>> {
    let cols = matrix.cols;
    let mut a = integer_rows(matrix, None);
    let pivots = bareiss_echelon(&mut a, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![BigRat::zero(); cols];
            x[fc] = BigRat::one();
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let row = &a[r];
                let mut acc = BigRat::zero();
                for j in pc + 1..cols {
                    if !row[j].is_zero() && !is_zero_rat(&x[j]) {
                        acc -= &x[j] * BigRat::from_integer(row[j].clone());
                    }
                }
                x[pc] = acc / BigRat::from_integer(row[pc].clone());
            }
            x
        })
        .collect()
}
