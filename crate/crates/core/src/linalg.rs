//! Exact linear algebra over `BigRational`: reduced row echelon form,
//! kernels, consistent solves and least squares via the normal equations.

use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let data: Vec<_> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), n * cols, "ragged rows");
        Self {
            rows: n,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduces in place to RREF and returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = BigRational::one() / self.get(row, col);
            for c in col..self.cols {
                let v = self.get(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let pivot_val = self.get(row, c);
                    if pivot_val.is_zero() {
                        continue;
                    }
                    let v = self.get(r, c) - &factor * pivot_val;
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }
}

/// Basis of `{x : A x = 0}`, one vector per free column, with a one in that
/// free column.
pub fn nullspace(a: &RationalMatrix) -> Vec<Vec<BigRational>> {
    let mut m = a.clone();
    let pivots = m.rref();
    let mut is_pivot = vec![false; a.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..a.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![BigRational::zero(); a.cols];
            v[free] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.get(r, free).clone();
            }
            v
        })
        .collect()
}

/// Solution of a consistent system `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Particular solution with all free variables set to zero.
    pub x: Vec<BigRational>,
    /// Dimension of the solution set.
    pub nullity: usize,
}

/// `None` when `A x = b` is inconsistent.
pub fn solve(a: &RationalMatrix, b: &[BigRational]) -> Option<Solution> {
    assert_eq!(b.len(), a.rows);
    let mut aug = RationalMatrix::zeros(a.rows, a.cols + 1);
    for r in 0..a.rows {
        for c in 0..a.cols {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, a.cols, b[r].clone());
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); a.cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug.get(r, a.cols).clone();
    }
    Some(Solution {
        x,
        nullity: a.cols - pivots.len(),
    })
}

/// Exact least squares: a solution of `AᵀA x = Aᵀb` and the squared residual
/// `‖A x − b‖²`, which is zero iff the original system is consistent.
pub fn least_squares(a: &RationalMatrix, b: &[BigRational]) -> (Vec<BigRational>, BigRational) {
    let at = a.transpose();
    let normal = at.mul(a);
    let rhs = at.mul_vec(b);
    let sol = solve(&normal, &rhs).expect("normal equations are always consistent");
    let ax = a.mul_vec(&sol.x);
    let residual = ax
        .iter()
        .zip(b)
        .map(|(p, q)| {
            let d = p - q;
            &d * &d
        })
        .fold(BigRational::zero(), |acc, v| acc + v);
    (sol.x, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| q(v, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ker = nullspace(&a);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert!(nullspace(&a).is_empty());
        let sol = solve(&a, &[q(3, 1), q(2, 1)]).unwrap();
        assert_eq!(sol.x, vec![q(1, 1), q(1, 1)]);
        assert_eq!(sol.nullity, 0);
    }

    #[test]
    fn inconsistent_system() {
        let a = m(&[&[1], &[1]]);
        assert!(solve(&a, &[q(0, 1), q(1, 1)]).is_none());
        let (x, res) = least_squares(&a, &[q(0, 1), q(1, 1)]);
        assert_eq!(x, vec![q(1, 2)]);
        assert_eq!(res, q(1, 2));
    }

    #[test]
    fn rational_pivots() {
        let a = RationalMatrix::from_rows(vec![
            vec![q(1, 2), q(1, 3)],
            vec![q(1, 4), q(1, 5)],
        ]);
        let sol = solve(&a, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(a.mul_vec(&sol.x), vec![q(1, 1), q(0, 1)]);
    }
}
