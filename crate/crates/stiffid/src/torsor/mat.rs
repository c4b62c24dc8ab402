use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::vec::Vec3;

/// Row-major 3x3 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

/// Row-major 6x6 real matrix.
///
/// When used as a stiffness matrix the quadrants follow the fixed block
/// convention: rows/cols 0..3 act on rotations/moments, rows/cols 3..6
/// on translations/forces, so the upper-right block maps translations
/// to forces. See [`crate::solver::Stiffness6`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat6(pub [[f64; 6]; 6]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn identity() -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Mat3 {
        Mat3([r0.to_array(), r1.to_array(), r2.to_array()])
    }

    pub fn from_columns(c0: Vec3, c1: Vec3, c2: Vec3) -> Mat3 {
        Mat3::from_rows(c0, c1, c2).transpose()
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.0[i])
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn transpose(&self) -> Mat3 {
        let mut t = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }

    /// Outer product `a b^T`.
    pub fn outer(a: Vec3, b: Vec3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a.component(i) * b.component(j);
            }
        }
        m
    }

    /// Solves `self * x = b` by LU with partial pivoting.
    pub fn solve(&self, b: Vec3) -> Option<Vec3> {
        let x = lu_solve::<3>(&self.0, &b.to_array())?;
        Some(Vec3::from_array(x))
    }

    pub fn inverse(&self) -> Option<Mat3> {
        let cols = [
            self.solve(Vec3::X)?,
            self.solve(Vec3::Y)?,
            self.solve(Vec3::Z)?,
        ];
        Some(Mat3::from_columns(cols[0], cols[1], cols[2]))
    }

    /// 1-norm condition estimate `‖A‖₁·‖A⁻¹‖₁`; `f64::INFINITY` if singular.
    pub fn condition_1norm(&self) -> f64 {
        match self.inverse() {
            Some(inv) => one_norm::<3>(&self.0) * one_norm::<3>(&inv.0),
            None => f64::INFINITY,
        }
    }
}

impl Mat6 {
    pub const ZERO: Mat6 = Mat6([[0.0; 6]; 6]);

    pub fn identity() -> Mat6 {
        let mut m = Mat6::ZERO;
        for i in 0..6 {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn from_columns(cols: &[[f64; 6]; 6]) -> Mat6 {
        let mut m = Mat6::ZERO;
        for (j, col) in cols.iter().enumerate() {
            for i in 0..6 {
                m.0[i][j] = col[i];
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> [f64; 6] {
        let mut c = [0.0; 6];
        for i in 0..6 {
            c[i] = self.0[i][j];
        }
        c
    }

    pub fn transpose(&self) -> Mat6 {
        let mut t = Mat6::ZERO;
        for i in 0..6 {
            for j in 0..6 {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }

    /// 3x3 quadrant starting at `(row, col)` (each 0 or 3).
    pub fn block(&self, row: usize, col: usize) -> Mat3 {
        debug_assert!(row.is_multiple_of(3) && col.is_multiple_of(3));
        let mut b = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                b.0[i][j] = self.0[row + i][col + j];
            }
        }
        b
    }

    pub fn set_block(&mut self, row: usize, col: usize, b: &Mat3) {
        debug_assert!(row.is_multiple_of(3) && col.is_multiple_of(3));
        for i in 0..3 {
            for j in 0..3 {
                self.0[row + i][col + j] = b.0[i][j];
            }
        }
    }

    pub fn mul_vec(&self, v: &[f64; 6]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn mul_mat(&self, other: &Mat6) -> Mat6 {
        let mut out = Mat6::ZERO;
        for i in 0..6 {
            for j in 0..6 {
                out.0[i][j] = (0..6).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        out
    }

    /// Solves `self * x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[f64; 6]) -> Option<[f64; 6]> {
        lu_solve::<6>(&self.0, b)
    }

    pub fn inverse(&self) -> Option<Mat6> {
        let mut cols = [[0.0; 6]; 6];
        for (j, col) in cols.iter_mut().enumerate() {
            let mut e = [0.0; 6];
            e[j] = 1.0;
            *col = self.solve(&e)?;
        }
        Some(Mat6::from_columns(&cols))
    }

    /// 1-norm condition estimate `‖A‖₁·‖A⁻¹‖₁`; `f64::INFINITY` if singular.
    pub fn condition_1norm(&self) -> f64 {
        match self.inverse() {
            Some(inv) => one_norm::<6>(&self.0) * one_norm::<6>(&inv.0),
            None => f64::INFINITY,
        }
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Index<(usize, usize)> for Mat6 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat6 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.row(0).dot(v),
            self.row(1).dot(v),
            self.row(2).dot(v),
        )
    }
}

impl Mul<Mat3> for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

impl Sub for Mat6 {
    type Output = Mat6;
    fn sub(self, rhs: Mat6) -> Mat6 {
        let mut m = self;
        for i in 0..6 {
            for j in 0..6 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

fn one_norm<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| m[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting, then forward/back substitution.
/// Returns `None` when a pivot vanishes (singular to machine precision).
fn lu_solve<const N: usize>(a: &[[f64; N]; N], b: &[f64; N]) -> Option<[f64; N]> {
    let mut lu = *a;
    let mut x = *b;
    let mut perm = [0usize; N];
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }

    for k in 0..N {
        let mut pivot = k;
        for i in (k + 1)..N {
            if lu[i][k].abs() > lu[pivot][k].abs() {
                pivot = i;
            }
        }
        if lu[pivot][k] == 0.0 {
            return None;
        }
        if pivot != k {
            lu.swap(pivot, k);
            x.swap(pivot, k);
        }
        for i in (k + 1)..N {
            let f = lu[i][k] / lu[k][k];
            lu[i][k] = f;
            for j in (k + 1)..N {
                lu[i][j] -= f * lu[k][j];
            }
            x[i] -= f * x[k];
        }
    }

    for i in (0..N).rev() {
        let mut s = x[i];
        for j in (i + 1)..N {
            s -= lu[i][j] * x[j];
        }
        x[i] = s / lu[i][i];
    }
    Some(x)
}
