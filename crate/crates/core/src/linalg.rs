//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::scalar::Q;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

/// Outcome of `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solve {
    /// One particular solution (free variables set to zero).
    Solution(Vec<Q>),
    /// `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent(Vec<Q>),
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![vec![Q::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<Q>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.data[i][j] = v.clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        self.data
            .iter()
            .map(|row| row.iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += &self.data[i][k] * &other.data[k][j];
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.data[i][j].is_one()
                    } else {
                        self.data[i][j].is_zero()
                    }
                })
            })
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.data[i][c].is_zero()) else {
                continue;
            };
            m.data.swap(r, p);
            let inv = m.data[r][c].recip();
            for v in m.data[r].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = m.data[r].clone();
            for i in 0..m.rows {
                if i == r || m.data[i][c].is_zero() {
                    continue;
                }
                let f = m.data[i][c].clone();
                for (v, pv) in m.data[i].iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -matrix.data[r][f].clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.data.clone();
        let n = self.rows;
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= &m[c][c];
            let inv = m[c][c].recip();
            for i in (c + 1)..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let d = &f * &m[c][j];
                    m[i][j] -= d;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i][j] = self.data[i][j].clone();
            }
            aug.data[i][n + i] = Q::one();
        }
        let Rref { matrix, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_rows(
            matrix.data.into_iter().map(|r| r[n..].to_vec()).collect(),
        ))
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    /// Solves `A x = b`, or returns a certificate of inconsistency.
    pub fn solve(&self, b: &[Q]) -> Solve {
        assert_eq!(b.len(), self.rows);
        // augment with b and an identity block tracking row operations
        let mut aug = Matrix::zeros(self.rows, self.cols + 1 + self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.data[i][j] = self.data[i][j].clone();
            }
            aug.data[i][self.cols] = b[i].clone();
            aug.data[i][self.cols + 1 + i] = Q::one();
        }
        let Rref { matrix, pivots } = aug.rref();
        if let Some(r) = pivots.iter().position(|&p| p == self.cols) {
            // row r reads 0 = 1; its transform block is the certificate
            return Solve::Inconsistent(matrix.data[r][self.cols + 1..].to_vec());
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            if p < self.cols {
                x[p] = matrix.data[r][self.cols].clone();
            }
        }
        Solve::Solution(x)
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
    }

    #[test]
    fn determinant_and_rank() {
        assert_eq!(m(&[&[1, 2], &[3, 4]]).det(), q(-2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), q(0));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Matrix::identity(3).det(), q(1));
    }

    #[test]
    fn inconsistent_system_has_certificate() {
        // x = 3 and x = -1
        let a = m(&[&[1], &[1]]);
        let b = vec![q(3), q(-1)];
        match a.solve(&b) {
            Solve::Inconsistent(y) => {
                assert!(a.transpose().mul_vec(&y).iter().all(|v| v.is_zero()));
                assert!(!dot(&y, &b).is_zero());
            }
            Solve::Solution(_) => panic!("expected inconsistency"),
        }
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..4, c), r)
                .prop_map(|rows| Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(q).collect()).collect()))
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(a in arb_matrix()) {
            let ker = a.kernel();
            prop_assert_eq!(ker.len() + a.rank(), a.cols);
            for v in ker {
                prop_assert!(a.mul_vec(&v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn solve_is_sound(a in arb_matrix(), seed in proptest::collection::vec(-3i64..4, 4)) {
            let b: Vec<Q> = (0..a.rows).map(|i| q(seed[i % seed.len()])).collect();
            match a.solve(&b) {
                Solve::Solution(x) => prop_assert_eq!(a.mul_vec(&x), b),
                Solve::Inconsistent(y) => {
                    prop_assert!(a.transpose().mul_vec(&y).iter().all(|v| v.is_zero()));
                    prop_assert!(!dot(&y, &b).is_zero());
                }
            }
        }
    }
}
