use std::fmt;

use super::{Rational, ScalarError};

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ScalarError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ScalarError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
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

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, ScalarError> {
        if self.cols != other.rows {
            return Err(ScalarError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self · v` for a column vector given as a slice.
    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>, ScalarError> {
        if v.len() != self.cols {
            return Err(ScalarError::Shape(format!("{} columns, vector of {}", self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect())
    }

    /// Smallest `k ≥ 1` with `self^k = 0`, or `None` when the matrix is not nilpotent.
    /// A square matrix of size `n` is nilpotent iff `self^n = 0`.
    pub fn nilpotency_index(&self) -> Option<usize> {
        assert_eq!(self.rows, self.cols, "nilpotency needs a square matrix");
        if self.rows == 0 {
            return Some(1);
        }
        let mut power = self.clone();
        for k in 1..=self.rows {
            if power.is_zero() {
                return Some(k);
            }
            power = power.mul(self).expect("square");
        }
        None
    }

    /// Rank by fraction-exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if pivot != rank {
                for j in 0..m.cols {
                    m.data.swap(pivot * m.cols + j, rank * m.cols + j);
                }
            }
            let inv = m.get(rank, col).recip().expect("nonzero pivot");
            for r in (rank + 1)..m.rows {
                let factor = m.get(r, col) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let sub = &factor * m.get(rank, j);
                    m.data[r * m.cols + j] -= &sub;
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn shift_matrix_is_nilpotent() {
        let d = m(&[&[0, 1, 0], &[0, 0, 2], &[0, 0, 0]]);
        assert_eq!(d.nilpotency_index(), Some(3));
        assert_eq!(Matrix::zeros(2, 2).nilpotency_index(), Some(1));
        assert_eq!(Matrix::identity(2).nilpotency_index(), None);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[1, 2, 3], &[0, 1, 4], &[5, 6, 0]]).rank(), 3);
        assert_eq!(Matrix::zeros(3, 4).rank(), 0);
        assert_eq!(m(&[&[0, 0, 1], &[0, 1, 0]]).rank(), 2);
    }

    #[test]
    fn multiply_and_apply() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[&[2, 1], &[4, 3]]));
        let v = vec![Rational::from(1), Rational::from(-1)];
        assert_eq!(a.apply(&v).unwrap(), vec![Rational::from(-1), Rational::from(-1)]);
        assert!(a.mul(&m(&[&[1, 2, 3]])).is_err());
    }
}
