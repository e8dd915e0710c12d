//! Quaternionic singular value decomposition by one-sided Jacobi rotations.
//!
//! For a column pair `(p, q)` with inner product `γ = ⟨a_p, a_q⟩ = |γ|·u`, scaling
//! column `q` on the right by `conj(u)` makes the inner product real, after which an
//! ordinary real Jacobi rotation orthogonalizes the pair. The singular values are
//! cross-checked against the complex SVD of `Φ(A)`, where each one appears twice.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::{phi_embed, qdot, qnorm, QMatrix, QVector};
use crate::quat::Quaternion;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;
const DOUBLING_TOL: f64 = 1e-8;

/// `A = U·diag(sigma)·V` with `U`, `V` quaternionic unitary and `sigma` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: QMatrix,
    pub sigma: Vec<f64>,
    pub v: QMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> QMatrix {
        let n = self.sigma.len();
        let us = QMatrix::from_fn(n, |r, c| self.u[(r, c)].scale(self.sigma[c]));
        us.matmul(&self.v)
    }
}

fn scale_right(x: &mut [Quaternion], q: Quaternion) {
    for e in x {
        *e = *e * q;
    }
}

fn rotate(xp: &mut [Quaternion], xq: &mut [Quaternion], c: f64, s: f64) {
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let (ap, aq) = (*a, *b);
        *a = ap.scale(c) - aq.scale(s);
        *b = ap.scale(s) + aq.scale(c);
    }
}

pub fn qsvd(a: &QMatrix) -> Result<Svd> {
    let n = a.dim();
    let mut w: Vec<QVector> = (0..n).map(|c| a.column(c)).collect();
    let mut v: Vec<QVector> = (0..n).map(|c| QMatrix::identity(n).column(c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (np, nq) = (qnorm(&w[p]), qnorm(&w[q]));
                let (alpha, beta) = (np * np, nq * nq);
                let gamma = qdot(&w[p], &w[q]);
                let g = gamma.norm();
                // Below 1e-290 the phase `γ/|γ|` overflows; such pairs are numerically orthogonal.
                if g < 1e-290 || g <= 1e-15 * np * nq {
                    continue;
                }
                rotated = true;
                let u = gamma.scale(1.0 / g).conj();
                scale_right(&mut w[q], u);
                scale_right(&mut v[q], u);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (lo, hi) = w.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], cs, sn);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|c| qnorm(c)).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();

    let tiny = sigma[0] * f64::EPSILON * n as f64;
    let mut ucols: Vec<QVector> = Vec::with_capacity(n);
    for &k in &order {
        if norms[k] > tiny && norms[k] > 0.0 {
            ucols.push(w[k].iter().map(|e| e.scale(1.0 / norms[k])).collect());
        }
    }
    complete_basis(&mut ucols, n);
    let u = QMatrix::from_columns(&ucols);
    let vcols: Vec<QVector> = order.iter().map(|&k| v[k].clone()).collect();
    let v = QMatrix::from_columns(&vcols).conj_transpose();

    check_doubling(a, &sigma)?;
    Ok(Svd { u, sigma, v })
}

/// Extend orthonormal columns to a basis of ℍⁿ using the standard basis vectors.
pub(crate) fn complete_basis(cols: &mut Vec<QVector>, n: usize) {
    let mut k = 0;
    while cols.len() < n && k < n {
        let mut x: QVector = (0..n).map(|i| if i == k { Quaternion::ONE } else { Quaternion::ZERO }).collect();
        for _ in 0..2 {
            for c in cols.iter() {
                let h = qdot(c, &x);
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi -= *ci * h;
                }
            }
        }
        let nx = qnorm(&x);
        if nx > 1e-6 {
            cols.push(x.iter().map(|e| e.scale(1.0 / nx)).collect());
        }
        k += 1;
    }
}

fn check_doubling(a: &QMatrix, sigma: &[f64]) -> Result<()> {
    let mut phi = phi_embed(a);
    // Entries near underflow can stall the complex SVD and are far below the check tolerance.
    let floor = phi.iter().map(|z| z.norm()).fold(0.0, f64::max) * 1e-150;
    phi.apply(|z| {
        if z.norm() < floor || z.norm() < f64::MIN_POSITIVE {
            *z = Complex64::new(0.0, 0.0);
        }
    });
    let svd = phi.try_svd(false, false, f64::EPSILON, 100_000).ok_or(Error::DoublingFailure)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    let scale = s[0].max(f64::MIN_POSITIVE);
    for (k, &sk) in sigma.iter().enumerate() {
        let (s1, s2) = (s[2 * k], s[2 * k + 1]);
        if (s1 - s2).abs() > DOUBLING_TOL * scale || (sk - 0.5 * (s1 + s2)).abs() > DOUBLING_TOL * scale {
            return Err(Error::DoublingFailure);
        }
    }
    Ok(())
}
