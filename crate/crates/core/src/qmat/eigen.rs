//! Right eigenvalues through the spectrum of the complex adjoint.
//!
//! `Φ(A)` has the eigenvalues of `A` together with their conjugates. Perturbed
//! eigenvalues of a defective block of size `k` spread over a disc of radius
//! about `δ^{1/k}`, so clusters are grown with a size-dependent radius rather
//! than a fixed one.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::Schur;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{phi_embed, CMatrix, QMatrix};
use crate::quat::ComplexRep;
use crate::{Error, Result};

/// Eigenvalue cluster of `Φ(A)` with non-negative imaginary part.
#[derive(Clone, Debug)]
pub(crate) struct Cluster {
    pub center: Complex64,
    /// Number of `Φ` eigenvalues in the cluster.
    pub phi_size: usize,
    /// Quaternionic algebraic multiplicity.
    pub multiplicity: usize,
    pub real: bool,
    pub radius: f64,
}

pub(crate) struct Spectrum {
    pub phi: CMatrix,
    pub clusters: Vec<Cluster>,
}

fn radius_for(noise: f64, k: usize, dim: usize) -> f64 {
    10.0 * noise.powf(1.0 / k.min(dim) as f64)
}

fn centroid(pts: &[Complex64]) -> Complex64 {
    pts.iter().sum::<Complex64>() / pts.len() as f64
}

fn spread(pts: &[Complex64], c: Complex64) -> f64 {
    pts.iter().map(|&p| (p - c).norm()).fold(0.0, f64::max)
}

/// Cluster the spectrum of `Φ(a)`. Clusters whose centers lie within `overlap_tol`
/// of each other (or of their own conjugates) are reported as [`Error::ClusterOverlap`].
pub(crate) fn cluster_spectrum(a: &QMatrix, overlap_tol: f64) -> Result<Spectrum> {
    let dim = a.dim();
    let phi = phi_embed(a);
    let noise = 1e-14 * phi.norm().max(1.0);
    let eig: Vec<Complex64> = Schur::new(phi.clone())
        .eigenvalues()
        .ok_or(Error::PairingFailure)?
        .iter()
        .copied()
        .collect();
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::PairingFailure);
    }

    let mut free: Vec<usize> = (0..eig.len()).collect();
    free.sort_by(|&x, &y| {
        eig[y].norm().total_cmp(&eig[x].norm()).then(eig[x].arg().total_cmp(&eig[y].arg()))
    });
    let mut groups: Vec<(Complex64, usize, f64)> = Vec::new();
    while let Some(&seed) = free.first() {
        let s = eig[seed];
        free.sort_by(|&x, &y| (eig[x] - s).norm().total_cmp(&(eig[y] - s).norm()));
        let mut take = 1;
        for k in (1..=free.len()).rev() {
            let pts: Vec<Complex64> = free[..k].iter().map(|&i| eig[i]).collect();
            let c = centroid(&pts);
            if spread(&pts, c) <= radius_for(noise, k, dim) {
                take = k;
                break;
            }
        }
        let pts: Vec<Complex64> = free[..take].iter().map(|&i| eig[i]).collect();
        let c = centroid(&pts);
        groups.push((c, take, spread(&pts, c)));
        free.drain(..take);
    }

    let mut used = alloc::vec![false; groups.len()];
    let mut clusters = Vec::new();
    for a_idx in 0..groups.len() {
        if used[a_idx] {
            continue;
        }
        let (c, k, rad) = groups[a_idx];
        used[a_idx] = true;
        if c.im.abs() <= radius_for(noise, k, dim) {
            if k % 2 != 0 {
                return Err(Error::PairingFailure);
            }
            clusters.push(Cluster {
                center: Complex64::new(c.re, 0.0),
                phi_size: k,
                multiplicity: k / 2,
                real: true,
                radius: rad,
            });
            continue;
        }
        let partner = (0..groups.len()).find(|&b| {
            !used[b] && groups[b].1 == k && (groups[b].0 - c.conj()).norm() <= 2.0 * radius_for(noise, k, dim)
        });
        let Some(b_idx) = partner else {
            return Err(Error::PairingFailure);
        };
        used[b_idx] = true;
        let mut center = (c + groups[b_idx].0.conj()) * 0.5;
        center.im = center.im.abs();
        clusters.push(Cluster {
            center,
            phi_size: k,
            multiplicity: k,
            real: false,
            radius: rad.max(groups[b_idx].2),
        });
    }

    clusters.sort_by(|x, y| {
        y.center.norm().total_cmp(&x.center.norm()).then(x.center.arg().total_cmp(&y.center.arg()))
    });
    if overlap_tol > 0.0 {
        for (i, x) in clusters.iter().enumerate() {
            if !x.real && 2.0 * x.center.im <= overlap_tol {
                return Err(overlap(x.center, x.center.conj()));
            }
            for y in &clusters[i + 1..] {
                if (x.center - y.center).norm() <= overlap_tol {
                    return Err(overlap(x.center, y.center));
                }
            }
        }
    }
    Ok(Spectrum { phi, clusters })
}

pub(crate) fn overlap(a: Complex64, b: Complex64) -> Error {
    Error::ClusterOverlap(format!("{a}"), format!("{b}"))
}

/// One representative per conjugate pair of `Φ` eigenvalues, with algebraic multiplicity.
pub fn right_eigenvalues(a: &QMatrix) -> Result<Vec<(ComplexRep, usize)>> {
    let spec = cluster_spectrum(a, 0.0)?;
    Ok(spec
        .clusters
        .iter()
        .map(|c| (ComplexRep::from_complex(c.center), c.multiplicity))
        .collect())
}
