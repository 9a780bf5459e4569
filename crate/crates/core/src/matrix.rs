//! Dense matrices over GF(2^w).

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<u16>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u16) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copy of the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (dst, &c) in cols.iter().enumerate() {
                out.set(r, dst, self.get(r, c));
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix, f: &Field) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                f.mul_add_slice(dst, other.row(k), self.get(r, k));
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[u16], f: &Field) -> Vec<u16> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0u16; self.cols];
        for (k, &c) in v.iter().enumerate() {
            f.mul_add_slice(&mut out, self.row(k), c);
        }
        out
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "only square matrices have inverses");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let scale = f.inv(a.get(col, col)).ok()?;
            a.scale_row(col, scale, f);
            inv.scale_row(col, scale, f);
            for r in 0..n {
                let factor = a.get(r, col);
                if r != col && factor != 0 {
                    a.row_mul_add(r, col, factor, f);
                    inv.row_mul_add(r, col, factor, f);
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self, f: &Field) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(pivot, rank);
            let scale = f.inv(a.get(rank, col)).expect("pivot is nonzero");
            a.scale_row(rank, scale, f);
            for r in 0..self.rows {
                let factor = a.get(r, col);
                if r != rank && factor != 0 {
                    a.row_mul_add(r, rank, factor, f);
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: u16, f: &Field) {
        for v in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *v = f.mul(*v, s);
        }
    }

    // row[dst] += factor * row[src]
    fn row_mul_add(&mut self, dst: usize, src: usize, factor: u16, f: &Field) {
        let cols = self.cols;
        let src_row: Vec<u16> = self.row(src).to_vec();
        f.mul_add_slice(&mut self.data[dst * cols..(dst + 1) * cols], &src_row, factor);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn inverse_roundtrip() {
        let f = FieldSpec::new(8).unwrap().field();
        let m = Matrix::from_rows(3, 3, vec![1, 2, 3, 4, 5, 6, 7, 8, 10]);
        let inv = m.inverse(f).expect("invertible");
        assert_eq!(m.mul(&inv, f), Matrix::identity(3));
        assert_eq!(inv.mul(&m, f), Matrix::identity(3));
        assert_eq!(m.rank(f), 3);
    }

    #[test]
    fn singular_has_no_inverse() {
        let f = FieldSpec::new(4).unwrap().field();
        // second row is 2x the first
        let m = Matrix::from_rows(2, 2, vec![1, 3, 2, f.mul(2, 3)]);
        assert!(m.inverse(f).is_none());
        assert_eq!(m.rank(f), 1);
    }

    #[test]
    fn left_mul_matches_matrix_mul() {
        let f = FieldSpec::new(4).unwrap().field();
        let m = Matrix::from_rows(2, 3, vec![1, 2, 3, 4, 5, 6]);
        let v = [7u16, 9];
        let as_matrix = Matrix::from_rows(1, 2, v.to_vec()).mul(&m, f);
        assert_eq!(m.left_mul_vec(&v, f), as_matrix.row(0));
    }
}
