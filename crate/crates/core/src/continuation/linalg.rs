//! Small dense complex matrices at MPFR precision.

use rug::{Complex, Float};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    prec: u32,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        CMatrix {
            rows,
            cols,
            prec,
            data: vec![Complex::with_val(prec, 0); rows * cols],
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = CMatrix::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = Complex::with_val(prec, 1);
        }
        m
    }

    /// Builds the matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vec<Complex>], prec: u32) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        let mut m = CMatrix::zeros(rows, cols.len(), prec);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = Complex::with_val(prec, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols, self.prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Complex::with_val(self.prec, 0);
                for k in 0..self.cols {
                    acc += Complex::with_val(self.prec, &self[(i, k)] * &other[(k, j)]);
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|c| Float::with_val(self.prec, c.abs_ref()).to_f64())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| Float::with_val(self.prec, self[(i, j)].abs_ref()).to_f64())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Gaussian elimination with partial pivoting; returns `X` with `self·X = rhs`.
    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let n = self.rows;
        if n != self.cols || rhs.rows != n {
            return Err(Error::Structural("solve needs a square system".into()));
        }
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    let x = Float::with_val(self.prec, a[(i, col)].abs_ref());
                    let y = Float::with_val(self.prec, a[(j, col)].abs_ref());
                    x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("nonempty range");
            if a[(pivot, col)].is_zero() {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                    suggestion: "singular matrix; move the endpoint".into(),
                });
            }
            a.swap_rows(pivot, col);
            b.swap_rows(pivot, col);
            let inv = Complex::with_val(self.prec, 1) / &a[(col, col)];
            for row in (col + 1)..n {
                let factor = Complex::with_val(self.prec, &a[(row, col)] * &inv);
                if factor.is_zero() {
                    continue;
                }
                for k in col..n {
                    let t = Complex::with_val(self.prec, &factor * &a[(col, k)]);
                    a[(row, k)] -= t;
                }
                for k in 0..b.cols {
                    let t = Complex::with_val(self.prec, &factor * &b[(col, k)]);
                    b[(row, k)] -= t;
                }
            }
        }
        let mut x = CMatrix::zeros(n, b.cols, self.prec);
        for k in 0..b.cols {
            for row in (0..n).rev() {
                let mut acc = b[(row, k)].clone();
                for j in (row + 1)..n {
                    acc -= Complex::with_val(self.prec, &a[(row, j)] * &x[(j, k)]);
                }
                x[(row, k)] = acc / &a[(row, row)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.solve(&CMatrix::identity(self.rows, self.prec))
    }

    /// `‖A‖_∞ ‖A^{-1}‖_∞`.
    pub fn condition(&self) -> Result<f64> {
        Ok(self.norm_inf() * self.inverse()?.norm_inf())
    }

    pub fn determinant(&self) -> Complex {
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex::with_val(self.prec, 1);
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a[(i, col)].is_zero());
            let Some(p) = pivot else {
                return Complex::with_val(self.prec, 0);
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let inv = Complex::with_val(self.prec, 1) / &a[(col, col)];
            for row in (col + 1)..n {
                let factor = Complex::with_val(self.prec, &a[(row, col)] * &inv);
                for k in col..n {
                    let t = Complex::with_val(self.prec, &factor * &a[(col, k)]);
                    a[(row, k)] -= t;
                }
            }
            det *= &a[(col, col)];
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Entries as `"re+imj"` strings with `digits` significant digits.
    pub fn to_strings(&self, digits: u32) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| complex_to_string(&self[(i, j)], digits))
                    .collect()
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

pub fn complex_to_string(c: &Complex, digits: u32) -> String {
    let re = c.real().to_string_radix(10, Some(digits as usize));
    let im = c.imag().to_string_radix(10, Some(digits as usize));
    if im.starts_with('-') {
        format!("{re}{im}j")
    } else {
        format!("{re}+{im}j")
    }
}
