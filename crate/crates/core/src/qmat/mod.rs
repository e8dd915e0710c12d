//! Square quaternionic matrices acting on the right module ℍⁿ.
//!
//! The complex adjoint writes `A = A₁ + A₂·j` and embeds it as
//! `Φ(A) = [[A₁, A₂], [-conj(A₂), conj(A₁)]]`. Vectors are identified so that
//! `Φ(A)·φ(x) = φ(A·x)`: a column `x = y₁ + y₂·j` (complex `y₁`, `y₂`, with `j`
//! on the right) maps to `φ(x) = (y₁, -conj(y₂))`. Written with `j` on the left,
//! `x = x₁ + j·x₂` maps to `(x₁, -x₂)`. Right multiplication by a complex scalar
//! is complex scaling of `φ(x)`, and right multiplication by `j` is the
//! antilinear map `(u, v) ↦ (conj(v), -conj(u))`, which commutes with every `Φ(A)`.

mod eigen;
mod jordan;
mod svd;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::quat::{ComplexRep, Quaternion};
use crate::{Error, Result, EPSILON};

pub use eigen::right_eigenvalues;
pub use jordan::{assemble as assemble_jordan, jordan_analyze, DeclaredAngle, ExactBlocks, JordanBlock, JordanData, JordanMode};
pub use svd::{qsvd, Svd};
pub(crate) use svd::complete_basis;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Quaternionic vector in ℍⁿ.
pub type QVector = Vec<Quaternion>;

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    dim: usize,
    entries: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "QMatrix needs dim >= 1");
        Self { dim, entries: vec![Quaternion::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        Ok(Self { dim, entries: rows.concat() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[QVector]) -> Self {
        let dim = cols.len();
        Self::from_fn(dim, |r, c| cols[c][r])
    }

    pub fn diag(d: &[Quaternion]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &q) in d.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    pub fn real_diag(d: &[f64]) -> Self {
        let q: Vec<_> = d.iter().map(|&x| Quaternion::real(x)).collect();
        Self::diag(&q)
    }

    /// `J(λ, size)`: λ on the diagonal, 1 on the superdiagonal.
    pub fn jordan_block(lambda: Quaternion, size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m[(i, i)] = lambda;
            if i + 1 < size {
                m[(i, i + 1)] = Quaternion::ONE;
            }
        }
        m
    }

    pub fn block_diag(blocks: &[QMatrix]) -> Self {
        let dim = blocks.iter().map(|b| b.dim).sum();
        let mut m = Self::zeros(dim);
        let mut off = 0;
        for b in blocks {
            for r in 0..b.dim {
                for c in 0..b.dim {
                    m[(off + r, off + c)] = b[(r, c)];
                }
            }
            off += b.dim;
        }
        m
    }

    /// Permutation matrix sending `e_{perm[i]}` to `e_i`, i.e. `(P x)_i = x_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zeros(perm.len());
        for (i, &p) in perm.iter().enumerate() {
            m[(i, p)] = Quaternion::ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, r: usize) -> &[Quaternion] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> QVector {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Quaternion]> {
        self.entries.chunks(self.dim)
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|q| q.scale(s)).collect() }
    }

    /// Multiply every entry on the left by the quaternion `q` (that is, `q·I·A`).
    pub fn left_scale(&self, q: Quaternion) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&a| q * a).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(r, c)] - o[(r, c)])
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(r, c)] + o[(r, c)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|q| q.is_finite())
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == Quaternion::ZERO {
                    continue;
                }
                for c in 0..n {
                    m.entries[r * n + c] += a * o[(k, c)];
                }
            }
        }
        m
    }

    pub fn apply(&self, x: &[Quaternion]) -> QVector {
        assert_eq!(self.dim, x.len(), "dimension mismatch in apply");
        self.rows()
            .map(|row| row.iter().zip(x).fold(Quaternion::ZERO, |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn phi(&self) -> CMatrix {
        phi_embed(self)
    }

    pub fn det_h(&self) -> f64 {
        det_h(self)
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting on entry modulus.
    pub fn inverse(&self) -> Result<Self> {
        let d = det_h(self);
        if d <= EPSILON {
            return Err(Error::Singular(d));
        }
        self.inverse_unchecked().ok_or(Error::Singular(d))
    }

    pub(crate) fn inverse_unchecked(&self) -> Option<Self> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))?;
            if a[(piv, col)].norm() <= f64::EPSILON * scale * n as f64 {
                return None;
            }
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let q = a[(col, col)];
            let p = q.conj().scale(1.0 / q.norm_sqr());
            a.left_mul_row(col, p);
            inv.left_mul_row(col, p);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == Quaternion::ZERO {
                    continue;
                }
                for c in 0..n {
                    let t = f * a[(col, c)];
                    a[(r, c)] -= t;
                    let t = f * inv[(col, c)];
                    inv[(r, c)] -= t;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.dim {
                self.entries.swap(a * self.dim + c, b * self.dim + c);
            }
        }
    }

    fn left_mul_row(&mut self, r: usize, q: Quaternion) {
        for c in 0..self.dim {
            self[(r, c)] = q * self[(r, c)];
        }
    }

    /// Unit-Frobenius-norm copy; `None` for the zero matrix.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.frobenius_norm();
        (n > 0.0 && n.is_finite()).then(|| self.scale(1.0 / n))
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.entries[r * self.dim + c]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        self.matmul(o)
    }
}

/// Complex adjoint `[[A₁, A₂], [-conj(A₂), conj(A₁)]]`.
pub fn phi_embed(a: &QMatrix) -> CMatrix {
    let n = a.dim;
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let (z1, z2) = a[(r, c)].to_pair();
            m[(r, c)] = z1;
            m[(r, n + c)] = z2;
            m[(n + r, c)] = -z2.conj();
            m[(n + r, n + c)] = z1.conj();
        }
    }
    m
}

/// Read a quaternionic matrix back from (the quaternionic part of) a complex `2n × 2n` matrix.
pub fn phi_unembed(m: &CMatrix) -> QMatrix {
    let n = m.nrows() / 2;
    QMatrix::from_fn(n, |r, c| {
        let z1 = (m[(r, c)] + m[(n + r, n + c)].conj()) * 0.5;
        let z2 = (m[(r, n + c)] - m[(n + r, c)].conj()) * 0.5;
        Quaternion::from_pair(z1, z2)
    })
}

/// `φ(x)` for the coordinate identification in the module docs.
pub fn phi_vector(x: &[Quaternion]) -> CVector {
    let n = x.len();
    let mut v = CVector::zeros(2 * n);
    for (i, q) in x.iter().enumerate() {
        let (y1, y2) = q.to_pair();
        v[i] = y1;
        v[n + i] = -y2.conj();
    }
    v
}

pub fn phi_unvector(v: &CVector) -> QVector {
    let n = v.len() / 2;
    (0..n).map(|i| Quaternion::from_pair(v[i], -v[n + i].conj())).collect()
}

/// `φ(x·j)` expressed on `φ(x)`.
pub fn j_map(v: &CVector) -> CVector {
    let n = v.len() / 2;
    let mut w = CVector::zeros(2 * n);
    for i in 0..n {
        w[i] = v[n + i].conj();
        w[n + i] = -v[i].conj();
    }
    w
}

/// `det Φ(A)`, real and non-negative; the imaginary part is rounding noise.
pub fn det_h(a: &QMatrix) -> f64 {
    let d = phi_embed(a).lu().determinant();
    debug_assert!(d.im.abs() <= 1e-6 * (1.0 + d.re.abs()), "det of Φ has imaginary part {}", d.im);
    d.re
}

/// `A^m` by square-and-multiply; negative powers go through the inverse.
pub fn mat_pow(a: &QMatrix, m: i64) -> Result<QMatrix> {
    let base = if m < 0 { a.inverse()? } else { a.clone() };
    Ok(pow_unsigned(&base, m.unsigned_abs()))
}

pub(crate) fn pow_unsigned(a: &QMatrix, mut e: u64) -> QMatrix {
    let mut result = QMatrix::identity(a.dim);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = result.matmul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base);
        }
    }
    result
}

/// Binomial coefficient as a float, exact while it stays below 2⁵³.
pub fn binomial(m: u64, k: u64) -> f64 {
    if k > m {
        return 0.0;
    }
    let k = k.min(m - k);
    let mut acc = 1.0f64;
    for t in 0..k {
        acc = acc * (m - t) as f64 / (t + 1) as f64;
    }
    if acc < 9.0e15 {
        acc.round()
    } else {
        acc
    }
}

/// `J(λ, size)^m` from the binomial formula: entry `(r, r+s)` is `C(m, s)·λ^{m-s}`.
pub fn jordan_block_power(lambda: ComplexRep, size: usize, m: u64) -> QMatrix {
    let z = lambda.to_complex();
    let mut out = QMatrix::zeros(size);
    for s in 0..size.min(m as usize + 1) {
        let coef = Complex64::new(binomial(m, s as u64), 0.0) * z.powu((m - s as u64) as u32);
        for r in 0..size - s {
            out[(r, r + s)] = Quaternion::from_complex(coef);
        }
    }
    out
}

pub fn qdot(x: &[Quaternion], y: &[Quaternion]) -> Quaternion {
    x.iter().zip(y).fold(Quaternion::ZERO, |acc, (&a, &b)| acc + a.conj() * b)
}

pub fn qnorm(x: &[Quaternion]) -> f64 {
    x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_examples() {
        let j = phi_embed(&QMatrix::diag(&[Quaternion::J]));
        assert_eq!(j, CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]));
        let i = phi_embed(&QMatrix::diag(&[Quaternion::I]));
        assert_eq!(i, CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]));
        let r = QMatrix::from_fn(2, |a, b| Quaternion::real((a * 2 + b) as f64 + 1.0));
        let p = phi_embed(&r);
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(p[(a, b)], p[(a + 2, b + 2)]);
                assert_eq!(p[(a, b + 2)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn det_examples() {
        assert!((det_h(&QMatrix::identity(3)) - 1.0).abs() < 1e-15);
        assert!((det_h(&QMatrix::diag(&[Quaternion::J])) - 1.0).abs() < 1e-15);
        assert!((det_h(&QMatrix::real_diag(&[2.0, 0.5])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pow_examples() {
        let j12 = QMatrix::jordan_block(Quaternion::ONE, 2);
        let want = QMatrix::from_rows(&[vec![1.0.into(), 3.0.into()], vec![0.0.into(), 1.0.into()]]).unwrap();
        assert_eq!(mat_pow(&j12, 3).unwrap(), want);
        assert_eq!(mat_pow(&j12, 0).unwrap(), QMatrix::identity(2));
        let d = QMatrix::diag(&[Quaternion::I, Quaternion::ONE]);
        assert_eq!(mat_pow(&d, 4).unwrap(), QMatrix::identity(2));
        let inv = mat_pow(&j12, -3).unwrap();
        assert!(close(&inv.matmul(&want), &QMatrix::identity(2), 1e-15));
        let sing = QMatrix::real_diag(&[1.0, 0.0]);
        assert!(matches!(mat_pow(&sing, -1), Err(Error::Singular(_))));
    }

    #[test]
    fn vector_identification_intertwines_phi() {
        let mut r = rng(1);
        for _ in 0..50 {
            let a = rand_matrix(&mut r, 3);
            let x: QVector = (0..3).map(|_| rand_quat(&mut r)).collect();
            let lhs = phi_embed(&a) * phi_vector(&x);
            let rhs = phi_vector(&a.apply(&x));
            assert!((lhs - rhs).norm() < 1e-13);
            let xj: QVector = x.iter().map(|&q| q * Quaternion::J).collect();
            assert!((phi_vector(&xj) - j_map(&phi_vector(&x))).norm() < 1e-15);
            let z = Quaternion::new(0.3, -0.8, 0.0, 0.0);
            let xz: QVector = x.iter().map(|&q| q * z).collect();
            assert!((phi_vector(&xz) - phi_vector(&x) * c(0.3, -0.8)).norm() < 1e-15);
            assert_eq!(phi_unvector(&phi_vector(&x)), x);
            assert!(close(&phi_unembed(&phi_embed(&a)), &a, 1e-15));
        }
    }

    #[test]
    fn inverse_and_binomial_power() {
        let mut r = rng(2);
        for _ in 0..50 {
            let a = rand_matrix(&mut r, 4);
            let inv = a.inverse().unwrap();
            assert!(close(&a.matmul(&inv), &QMatrix::identity(4), 1e-9));
            assert!(close(&inv.matmul(&a), &QMatrix::identity(4), 1e-9));
        }
        for n in 1..=5usize {
            for m in 0..=30u64 {
                for lam in [ComplexRep::new(1.0, 0.0), ComplexRep::new(0.6, 0.8), ComplexRep::new(1.1, 0.3)] {
                    let direct = mat_pow(&QMatrix::jordan_block(lam.to_quaternion(), n), m as i64).unwrap();
                    let closed = jordan_block_power(lam, n, m);
                    for i in 0..n {
                        for j in 0..n {
                            let (x, y) = (direct[(i, j)], closed[(i, j)]);
                            assert!((x - y).norm() <= 1e-9 * (1.0 + y.norm()), "n={n} m={m} ({i},{j})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn phi_and_det_are_multiplicative() {
        let mut r = rng(3);
        for _ in 0..500 {
            let dim = r.random_range(1..=4);
            let (a, b) = (rand_matrix(&mut r, dim), rand_matrix(&mut r, dim));
            let lhs = phi_embed(&a.matmul(&b));
            let rhs = phi_embed(&a) * phi_embed(&b);
            assert!((lhs - rhs).norm() <= 1e-10);
            let (da, db, dab) = (det_h(&a), det_h(&b), det_h(&a.matmul(&b)));
            assert!(da >= -1e-10 && db >= -1e-10 && dab >= -1e-10);
            assert!((dab - da * db).abs() <= 1e-8 * (da * db).abs().max(1e-300) + 1e-14);
        }
    }

}
