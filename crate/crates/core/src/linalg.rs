//! Fixed-size 3-vectors and 3×3 matrices over any [`Scalar`].
//!
//! nalgebra is used at the edges (validation, test oracles); the hot paths
//! need to run on nested dual numbers, so they use these small types.

use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec3<T = f64>(pub [T; 3]);

impl<T> From<[T; 3]> for Vec3<T> {
    fn from(a: [T; 3]) -> Self {
        Vec3(a)
    }
}

impl<T> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        v.0
    }
}

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    pub fn from_f64(v: Vec3<f64>) -> Self {
        Vec3(v.0.map(T::cst))
    }

    pub fn value(&self) -> Vec3<f64> {
        Vec3(self.0.map(Scalar::value))
    }

    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Vec3(self.0.map(|c| c * s))
    }

    pub fn scale_f(&self, s: f64) -> Self {
        Vec3(self.0.map(|c| c * s))
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = o.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }
}

impl Vec3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3(self.0.map(|c| -c))
    }
}

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3<T = f64>(pub [[T; 3]; 3]);

impl<T> From<[[T; 3]; 3]> for Mat3<T> {
    fn from(a: [[T; 3]; 3]) -> Self {
        Mat3(a)
    }
}

impl<T> From<Mat3<T>> for [[T; 3]; 3] {
    fn from(m: Mat3<T>) -> Self {
        m.0
    }
}

impl<T: Scalar> Mat3<T> {
    pub fn identity() -> Self {
        Self::diag([T::cst(1.0), T::cst(1.0), T::cst(1.0)])
    }

    pub fn diag(d: [T; 3]) -> Self {
        let z = T::zero();
        Mat3([[d[0], z, z], [z, d[1], z], [z, z, d[2]]])
    }

    pub fn from_rows(r: [Vec3<T>; 3]) -> Self {
        Mat3([r[0].0, r[1].0, r[2].0])
    }

    pub fn from_cols(c: [Vec3<T>; 3]) -> Self {
        Self::from_rows(c).transpose()
    }

    pub fn from_f64(m: &Mat3<f64>) -> Self {
        Mat3(m.0.map(|r| r.map(T::cst)))
    }

    pub fn value(&self) -> Mat3<f64> {
        Mat3(self.0.map(|r| r.map(Scalar::value)))
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    /// `vᵀ M`, returned as a vector.
    pub fn left_mul(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3([self.col(0).dot(v), self.col(1).dot(v), self.col(2).dot(v)])
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = self.row(i).dot(&o.col(j));
            }
        }
        Mat3(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c += o.0[i][j];
            }
        }
        Mat3(out)
    }

    pub fn scale(&self, s: T) -> Self {
        Mat3(self.0.map(|r| r.map(|c| c * s)))
    }

    pub fn outer(a: &Vec3<T>, b: &Vec3<T>) -> Self {
        Mat3([0, 1, 2].map(|i| [0, 1, 2].map(|j| a.0[i] * b.0[j])))
    }

    pub fn det(&self) -> T {
        self.row(0).dot(&self.row(1).cross(&self.row(2)))
    }
}

impl Mat3<f64> {
    pub fn to_na(&self) -> nalgebra::Matrix3<f64> {
        let m = &self.0;
        nalgebra::Matrix3::new(m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2])
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| (self.0[i][j] - self.0[j][i]).abs() <= tol))
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn sym_eigenvalues(&self) -> [f64; 3] {
        let m = self.to_na();
        let sym = (m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        m
    }
}

impl<T: Scalar> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        self.mul_vec(&v)
    }
}
