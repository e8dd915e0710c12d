//! Points, subspaces and hyperplanes of ℙⁿ_ℍ.
//!
//! Points are homogeneous coordinates modulo right scaling, stored as the
//! canonical representative: unit Euclidean norm with the first nonzero
//! coordinate real and positive. Distances use the Fubini–Study chordal
//! distance `sqrt(1 - |⟨p̂, q̂⟩|²)`, computed as the norm of the component of
//! `q̂` orthogonal to `p̂` to avoid cancellation near zero.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::qmat::{qdot, qnorm, QMatrix, QVector};
use crate::quat::Quaternion;
use crate::{Error, Result, EPSILON};

/// Generators closer than this to the span of the previous ones are dropped.
const DEPENDENCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    coords: QVector,
}

impl ProjPoint {
    /// Canonical representative of `[coords]`; fails on the zero vector.
    pub fn new(coords: QVector) -> Result<Self> {
        let n = qnorm(&coords);
        if !(n > EPSILON) || !n.is_finite() {
            return Err(Error::ZeroDivisor(n));
        }
        let mut v: QVector = coords.iter().map(|q| q.scale(1.0 / n)).collect();
        if let Some(f) = v.iter().position(|q| q.norm() > EPSILON) {
            let x = v[f];
            let phase = x.conj().scale(1.0 / x.norm());
            for e in v.iter_mut() {
                *e = *e * phase;
            }
            v[f] = Quaternion::real(v[f].a0);
        }
        Ok(Self { coords: v })
    }

    /// Standard basis point `e_{i+1}` (indices are 0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = alloc::vec![Quaternion::ZERO; dim];
        v[i] = Quaternion::ONE;
        Self { coords: v }
    }

    pub fn from_reals(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|&a| Quaternion::real(a)).collect())
    }

    pub fn coords(&self) -> &[Quaternion] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `g·x` without the invertibility check; fails only if `x` lands in the kernel.
    pub fn mapped_by(&self, g: &QMatrix) -> Result<Self> {
        Self::new(g.apply(&self.coords))
    }
}

pub fn fs_distance(p: &ProjPoint, q: &ProjPoint) -> f64 {
    let c = qdot(&p.coords, &q.coords);
    let r: QVector = q.coords.iter().zip(&p.coords).map(|(&y, &x)| y - x * c).collect();
    qnorm(&r).min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    QuaternionicSpan,
    /// `L_ℂ{e_i : i ∈ support}`, the left-ℍ multiples of complex vectors; descriptive only.
    ComplexSlice,
    /// A finite set of points.
    PointSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjSubspace {
    generators: Vec<ProjPoint>,
    flavor: Flavor,
}

impl ProjSubspace {
    /// Coordinate subspace spanned by `e_{i+1}` for `i` in `indices` (0-based).
    pub fn coordinate(dim: usize, indices: &[usize], flavor: Flavor) -> Self {
        Self { generators: indices.iter().map(|&i| ProjPoint::basis(dim, i)).collect(), flavor }
    }

    pub fn generators(&self) -> &[ProjPoint] {
        &self.generators
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn ambient_dim(&self) -> usize {
        self.generators[0].dim()
    }

    /// Projective dimension; a point set counts as 0-dimensional.
    pub fn dimension(&self) -> usize {
        match self.flavor {
            Flavor::PointSet => 0,
            _ => self.generators.len() - 1,
        }
    }

    /// 0-based indices of the coordinate axes spanning this subspace, if it is coordinate-aligned.
    pub fn coordinate_support(&self) -> Option<Vec<usize>> {
        self.generators
            .iter()
            .map(|g| {
                let nz: Vec<usize> = (0..g.dim()).filter(|&i| g.coords[i].norm() > 1e-12).collect();
                (nz.len() == 1 && (g.coords[nz[0]] - Quaternion::ONE).norm() <= 1e-12).then(|| nz[0])
            })
            .collect()
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> Result<bool> {
        Ok(distance_to_subspace(p, self)? <= tol)
    }
}

fn project_out(basis: &[QVector], v: &mut QVector) {
    for _ in 0..2 {
        for u in basis {
            let h = qdot(u, v);
            for (vi, &ui) in v.iter_mut().zip(u) {
                *vi -= ui * h;
            }
        }
    }
}

/// Orthonormal generators for the right-ℍ span of `vectors` (Gram–Schmidt, dependent vectors dropped).
/// With [`Flavor::PointSet`] the points are kept as a deduplicated list instead.
pub fn subspace_span(vectors: &[ProjPoint], flavor: Flavor) -> Result<ProjSubspace> {
    if flavor == Flavor::PointSet {
        let mut pts: Vec<ProjPoint> = Vec::new();
        for v in vectors {
            if pts.iter().all(|p| fs_distance(p, v) > EPSILON) {
                pts.push(v.clone());
            }
        }
        return if pts.is_empty() { Err(Error::EmptySpan) } else { Ok(ProjSubspace { generators: pts, flavor }) };
    }
    let mut basis: Vec<QVector> = Vec::new();
    for v in vectors {
        let mut w = v.coords.clone();
        let n0 = qnorm(&w);
        project_out(&basis, &mut w);
        let n = qnorm(&w);
        if n > DEPENDENCE_TOL * n0.max(EPSILON) && n > EPSILON {
            basis.push(w.iter().map(|q| q.scale(1.0 / n)).collect());
        }
    }
    if basis.is_empty() {
        return Err(Error::EmptySpan);
    }
    let generators = basis.into_iter().map(ProjPoint::new).collect::<Result<Vec<_>>>()?;
    // Canonical scaling can rotate a generator only by a unit factor, so orthonormality survives.
    Ok(ProjSubspace { generators, flavor })
}

pub fn distance_to_subspace(p: &ProjPoint, w: &ProjSubspace) -> Result<f64> {
    match w.flavor {
        Flavor::ComplexSlice => Err(Error::FlavorUnsupported),
        Flavor::PointSet => Ok(w.generators.iter().map(|g| fs_distance(p, g)).fold(1.0, f64::min)),
        Flavor::QuaternionicSpan => {
            let mut r = p.coords.clone();
            let basis: Vec<QVector> = w.generators.iter().map(|g| g.coords.clone()).collect();
            project_out(&basis, &mut r);
            Ok(qnorm(&r).min(1.0))
        }
    }
}

/// Largest distance from a generator of one subspace to the other, symmetrized.
/// Subspaces of different dimension or flavor are at distance 1.
pub fn subspace_distance(a: &ProjSubspace, b: &ProjSubspace) -> Result<f64> {
    if a.flavor != b.flavor || a.generators.len() != b.generators.len() {
        return Ok(1.0);
    }
    if a.flavor == Flavor::ComplexSlice {
        return Err(Error::FlavorUnsupported);
    }
    let mut d: f64 = 0.0;
    for g in &a.generators {
        d = d.max(distance_to_subspace(g, b)?);
    }
    for g in &b.generators {
        d = d.max(distance_to_subspace(g, a)?);
    }
    Ok(d)
}

pub fn subspaces_equal(a: &ProjSubspace, b: &ProjSubspace, tol: f64) -> bool {
    subspace_distance(a, b).map(|d| d <= tol).unwrap_or(false)
}

/// Objects moved by projective transformations.
pub trait Transformable: Sized {
    /// Image under `g` without checking that `g` is invertible.
    fn mapped_by(&self, g: &QMatrix) -> Result<Self>;
}

impl Transformable for ProjPoint {
    fn mapped_by(&self, g: &QMatrix) -> Result<Self> {
        ProjPoint::mapped_by(self, g)
    }
}

impl Transformable for ProjSubspace {
    /// Generator-wise image, re-orthonormalized for spans; point sets and complex slices map point by point.
    fn mapped_by(&self, g: &QMatrix) -> Result<Self> {
        let imgs = self.generators.iter().map(|p| p.mapped_by(g)).collect::<Result<Vec<_>>>()?;
        if self.flavor != Flavor::QuaternionicSpan {
            return Ok(ProjSubspace { generators: imgs, flavor: self.flavor });
        }
        subspace_span(&imgs, self.flavor)
    }
}

pub fn apply_transform<T: Transformable>(g: &QMatrix, x: &T) -> Result<T> {
    let d = g.det_h();
    if d <= EPSILON {
        return Err(Error::Singular(d));
    }
    x.mapped_by(g)
}

/// The hyperplane `l(α) = {x : Σ conj(αᵢ)·xᵢ = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: ProjPoint,
}

impl Hyperplane {
    pub fn new(normal: ProjPoint) -> Self {
        Self { normal }
    }

    pub fn pairing(&self, x: &ProjPoint) -> Quaternion {
        qdot(&self.normal.coords, &x.coords)
    }

    pub fn contains(&self, x: &ProjPoint, eps: f64) -> bool {
        self.pairing(x).norm() <= eps
    }
}

/// `g(l(α)) = l((g⁻¹)*·α)`.
pub fn dual_hyperplane_apply(g: &QMatrix, h: &Hyperplane) -> Result<Hyperplane> {
    let inv = g.inverse()?;
    let beta = inv.conj_transpose().apply(h.normal.coords());
    Ok(Hyperplane::new(ProjPoint::new(beta)?))
}

pub fn hyperplanes_equal(a: &Hyperplane, b: &Hyperplane) -> bool {
    fs_distance(&a.normal, &b.normal) <= EPSILON
}

/// Whether `p` lies in the complex slice `L_ℂ{e_i : i ∈ support}` (0-based indices).
pub fn complex_slice_membership(p: &ProjPoint, support: &[usize]) -> bool {
    complex_slice_membership_tol(p, support, EPSILON)
}

pub fn complex_slice_membership_tol(p: &ProjPoint, support: &[usize], eps: f64) -> bool {
    let x = &p.coords;
    if (0..x.len()).any(|i| !support.contains(&i) && x[i].norm() > eps) {
        return false;
    }
    let nz: Vec<Quaternion> = support.iter().map(|&i| x[i]).filter(|q| q.norm() > eps).collect();
    let Some(&pivot) = nz.first() else {
        return false;
    };
    let pinv = pivot.conj().scale(1.0 / pivot.norm_sqr());
    let ratios: Vec<Quaternion> = nz.iter().map(|&q| q * pinv).collect();
    for (a, &r) in ratios.iter().enumerate() {
        for &s in &ratios[a + 1..] {
            if r.commutator(s).norm() > eps * r.norm() * s.norm() {
                return false;
            }
        }
    }
    true
}
