//! Dense exact rational matrices.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{rat, LatticeVec, RationalVec};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<RationalVec>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Domain("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// From integer rows; `cols` fixes the width when there are no rows.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn from_columns(cols: &[RationalVec], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension { expected: rows, got: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[BigRational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> RationalVec {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> RationalVec {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::Dimension { expected: self.cols, got: o.rows });
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out.get(i, j) + a * o.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[BigRational]) -> Result<RationalVec> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(BigRational::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect())
    }

    pub fn apply_int(&self, v: &[BigInt]) -> Result<RationalVec> {
        self.apply(&crate::lattice::to_rational(v))
    }

    pub fn scale(&self, s: &BigRational) -> Matrix {
        Matrix { data: self.data.iter().map(|x| x * s).collect(), ..self.clone() }
    }

    pub fn add(&self, o: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::Dimension { expected: self.rows * self.cols, got: o.rows * o.cols });
        }
        Ok(Matrix { data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&rat(-1))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(BigRational::is_integer)
    }

    pub fn is_skew(&self) -> bool {
        self.rows == self.cols && self.add(&self.transpose()).map(|s| s.is_zero()).unwrap_or(false)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Integer column `j`; fails on fractional entries.
    pub fn int_column(&self, j: usize) -> Result<LatticeVec> {
        self.column(j)
            .into_iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(x.to_integer())
                } else {
                    Err(Error::Domain(format!("non-integral entry {x} in column {j}")))
                }
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else { continue };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, row * m.cols + j);
            }
            let inv = m.get(row, col).recip();
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(row, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<RationalVec> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// A solution of `self·x = b` with free variables set to zero.
    pub fn solve(&self, b: &[BigRational]) -> Option<RationalVec> {
        if b.len() != self.rows {
            return None;
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for (i, bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, bi.clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::Dimension { expected: self.rows, got: self.cols });
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !m.get(i, col).is_zero()) else { return Ok(BigRational::zero()) };
            if p != col {
                for j in 0..n {
                    m.data.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for i in col + 1..n {
                let f = m.get(i, col) / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.get(i, j) - &f * m.get(col, j);
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Stacks `self` on top of `o`.
    pub fn vstack(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.cols {
            return Err(Error::Dimension { expected: self.cols, got: o.cols });
        }
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Ok(Matrix { rows: self.rows + o.rows, cols: self.cols, data })
    }

    /// Places `self` left of `o`.
    pub fn hstack(&self, o: &Matrix) -> Result<Matrix> {
        self.transpose().vstack(&o.transpose()).map(|m| m.transpose())
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_string_rows().into_iter().map(|r| format!("[{}]", r.join(","))).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_kernel_solve() {
        let m = Matrix::from_int_rows(&[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).unwrap().iter().all(Zero::is_zero));
        }
        assert!(m.solve(&[rat(1), rat(3)]).is_none());
        let x = m.solve(&[rat(2), rat(4)]).unwrap();
        assert_eq!(m.apply(&x).unwrap(), vec![rat(2), rat(4)]);
    }

    #[test]
    fn determinant_and_skew() {
        let j = Matrix::from_int_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        assert_eq!(j.determinant().unwrap(), rat(1));
        assert!(j.is_skew());
        assert_eq!(j.mul(&j).unwrap(), Matrix::identity(2).neg());
    }
}
