//! Exact dense linear algebra over the rationals: reduced row echelon form,
//! rank, kernel bases, and particular solutions.
//!
//! Elimination runs fraction-free on integer-scaled rows with per-row gcd
//! reduction, and pivots are normalized to 1 only at the end, which keeps
//! intermediate entries small on the few-hundred-column systems produced by
//! the polynomial-space computations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct RrefResult {
    pub matrix: RationalMatrix,
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
}

/// Basis of the null space; `vectors.len() == cols - rank`.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    pub vectors: Vec<Vec<Rational>>,
    pub rank: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("system is inconsistent: right-hand side is not in the column span")]
    Inconsistent,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            assert_eq!(r.len(), ncols, "ragged rows");
        }
        RationalMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vector(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Integer-scaled copies of the rows (each row multiplied by the lcm of
    /// its denominators; row scaling does not change the row space).
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect()
    }

    /// Exact reduced row echelon form with rank and pivot columns.
    pub fn rref(&self) -> RrefResult {
        let mut m = self.integer_rows();
        let mut pivot_columns = Vec::new();
        let mut next_row = 0;
        for col in 0..self.cols {
            if next_row == self.rows {
                break;
            }
            let Some(pivot_row) = (next_row..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(next_row, pivot_row);
            let pivot_row_entries = std::mem::take(&mut m[next_row]);
            let pivot = pivot_row_entries[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r == next_row || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (entry, pivot_entry) in row.iter_mut().zip(&pivot_row_entries) {
                    *entry = &*entry * &pivot - pivot_entry * &factor;
                }
                reduce_row(row);
            }
            m[next_row] = pivot_row_entries;
            pivot_columns.push(col);
            next_row += 1;
        }
        let rank = pivot_columns.len();
        let mut out = RationalMatrix::zeros(self.rows, self.cols);
        for (i, &pc) in pivot_columns.iter().enumerate() {
            let pivot = m[i][pc].clone();
            for (c, entry) in m[i].iter().enumerate() {
                if !entry.is_zero() {
                    out.set(i, c, Rational::new(entry.clone(), pivot.clone()));
                }
            }
        }
        RrefResult {
            matrix: out,
            rank,
            pivot_columns,
        }
    }

    /// Exact basis of the null space, one vector per free column in
    /// ascending column order.
    pub fn kernel(&self) -> KernelBasis {
        let RrefResult {
            matrix,
            rank,
            pivot_columns,
        } = self.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivot_columns {
                s[c] = true;
            }
            s
        };
        let mut vectors = Vec::with_capacity(self.cols - rank);
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (i, &pc) in pivot_columns.iter().enumerate() {
                v[pc] = -matrix.get(i, free).clone();
            }
            vectors.push(v);
        }
        KernelBasis { vectors, rank }
    }

    /// A particular solution of `M x = b`, with free variables pinned to
    /// zero under the rref pivot structure.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>, SolveError> {
        assert_eq!(rhs.len(), self.rows, "right-hand side length mismatch");
        let mut augmented = RationalMatrix::zeros(self.rows, self.cols + 1);
        for (r, value) in rhs.iter().enumerate() {
            for c in 0..self.cols {
                augmented.set(r, c, self.get(r, c).clone());
            }
            augmented.set(r, self.cols, value.clone());
        }
        let RrefResult {
            matrix,
            pivot_columns,
            ..
        } = augmented.rref();
        if pivot_columns.last() == Some(&self.cols) {
            return Err(SolveError::Inconsistent);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &pc) in pivot_columns.iter().enumerate() {
            x[pc] = matrix.get(i, self.cols).clone();
        }
        Ok(x)
    }
}

fn reduce_row(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    let g = g.abs();
    for x in row.iter_mut() {
        *x = &*x / &g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational_int;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rational_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_proportional_rows() {
        let r = m(&[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivot_columns, vec![0]);
        assert_eq!(r.matrix.get(0, 0), &rational_int(1));
        assert_eq!(r.matrix.get(0, 1), &rational_int(2));
    }

    #[test]
    fn rref_identity() {
        let r = RationalMatrix::identity(3).rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.matrix, RationalMatrix::identity(3));
    }

    #[test]
    fn rref_zero_matrix() {
        let r = m(&[&[0, 0], &[0, 0]]).rref();
        assert_eq!(r.rank, 0);
        assert!(r.pivot_columns.is_empty());
    }

    #[test]
    fn kernel_of_laplacian_row() {
        // Δ on P^2 over Z in the basis {1, x, x^2} is [0 0 1]
        let k = m(&[&[0, 0, 1]]).kernel();
        assert_eq!(k.rank, 1);
        assert_eq!(k.vectors.len(), 2);
        assert_eq!(
            k.vectors[0],
            vec![rational_int(1), rational_int(0), rational_int(0)]
        );
        assert_eq!(
            k.vectors[1],
            vec![rational_int(0), rational_int(1), rational_int(0)]
        );
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let k = RationalMatrix::identity(2).kernel();
        assert_eq!(k.rank, 2);
        assert!(k.vectors.is_empty());
    }

    #[test]
    fn kernel_of_empty_constraints_is_everything() {
        let k = RationalMatrix::zeros(0, 3).kernel();
        assert_eq!(k.rank, 0);
        assert_eq!(k.vectors.len(), 3);
        for (i, v) in k.vectors.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(x, &rational_int(i64::from(i == j)));
            }
        }
    }

    #[test]
    fn solve_poisson_row() {
        let x = m(&[&[0, 0, 1]]).solve(&[rational_int(1)]).unwrap();
        assert_eq!(x, vec![rational_int(0), rational_int(0), rational_int(1)]);
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let rhs = vec![rational_int(4), rational_int(-7)];
        assert_eq!(RationalMatrix::identity(2).solve(&rhs).unwrap(), rhs);
    }

    #[test]
    fn solve_pins_free_variables_to_zero() {
        let x = m(&[&[1, 1]]).solve(&[rational_int(1)]).unwrap();
        assert_eq!(x, vec![rational_int(1), rational_int(0)]);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let err = m(&[&[1, 1], &[1, 1]])
            .solve(&[rational_int(1), rational_int(2)])
            .unwrap_err();
        assert_eq!(err, SolveError::Inconsistent);
    }

    #[test]
    fn rank_nullity_holds() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let k = a.kernel();
        assert_eq!(k.rank + k.vectors.len(), a.cols());
        for v in &k.vectors {
            assert!(a.mul_vector(v).iter().all(Rational::is_zero));
        }
    }
}
