//! Kulkarni limit sets of cyclic groups in closed form.
//!
//! Sets are emitted in the coordinates of the matched catalog row (see
//! [`crate::classify::classify_element`]) and pulled back to the original
//! coordinates through the Jordan conjugator. Coordinate indices are 0-based
//! throughout, so `e₁` is index 0.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::classify::{angles_screw_related, ClassTag, ElementClass};
use crate::projective::{distance_to_subspace, subspace_distance, Flavor, ProjPoint, ProjSubspace, Transformable};
use crate::qmat::QMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitKind {
    Empty,
    Whole,
    Union,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    L0,
    L1,
    L2,
    Lambda,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::L0 => "L0",
            Level::L1 => "L1",
            Level::L2 => "L2",
            Level::Lambda => "Lambda",
        }
    }
}

/// A limit set with the pieces of its Kulkarni levels.
///
/// `components` holds every piece referenced by `levels`. For `Union` the
/// `Lambda` level lists the components of the limit set itself; `Empty` and
/// `Whole` have no `Lambda` components, though a `Whole` set may still describe
/// its `L0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitSet {
    pub kind: LimitKind,
    pub components: Vec<ProjSubspace>,
    pub levels: BTreeMap<Level, Vec<usize>>,
    /// Level data reproduced from a displayed formula whose index bookkeeping is not self-consistent.
    pub as_printed: bool,
}

impl LimitSet {
    pub fn empty() -> Self {
        Self { kind: LimitKind::Empty, components: Vec::new(), levels: BTreeMap::new(), as_printed: false }
    }

    pub fn whole() -> Self {
        Self { kind: LimitKind::Whole, ..Self::empty() }
    }

    fn union() -> Self {
        Self { kind: LimitKind::Union, ..Self::empty() }
    }

    /// Add `piece` to `level`, reusing an identical existing component.
    fn push(&mut self, level: Level, piece: ProjSubspace) {
        let idx = match self.components.iter().position(|c| *c == piece) {
            Some(i) => i,
            None => {
                self.components.push(piece);
                self.components.len() - 1
            }
        };
        let ids = self.levels.entry(level).or_default();
        if !ids.contains(&idx) {
            ids.push(idx);
        }
    }

    pub fn level(&self, level: Level) -> Vec<&ProjSubspace> {
        self.levels.get(&level).map(|ids| ids.iter().map(|&i| &self.components[i]).collect()).unwrap_or_default()
    }

    /// Components of the limit set proper.
    pub fn lambda(&self) -> Vec<&ProjSubspace> {
        self.level(Level::Lambda)
    }
}

fn span(dim: usize, idx: impl IntoIterator<Item = usize>) -> ProjSubspace {
    let idx: Vec<usize> = idx.into_iter().collect();
    ProjSubspace::coordinate(dim, &idx, Flavor::QuaternionicSpan)
}

fn points(dim: usize, idx: &[usize]) -> ProjSubspace {
    ProjSubspace::coordinate(dim, idx, Flavor::PointSet)
}

fn slice(dim: usize, idx: &[usize]) -> ProjSubspace {
    ProjSubspace::coordinate(dim, idx, Flavor::ComplexSlice)
}

/// Limit set of the catalog row in its own Jordan coordinates.
pub fn kulkarni_sets_canonical(row: &ElementClass) -> Result<LimitSet> {
    let dim: usize = row.params.sizes.iter().sum();
    let n = dim - 1;
    let p = &row.params;
    let mut ls = LimitSet::union();
    match row.tag {
        ClassTag::OutOfCatalog => return Err(Error::OutOfCatalogRow),
        ClassTag::EllipticRational => return Ok(LimitSet::empty()),
        ClassTag::EllipticSimpleIrrational => {
            let mut w = LimitSet::whole();
            w.push(Level::L0, slice(dim, &(0..dim).collect::<Vec<_>>()));
            return Ok(w);
        }
        ClassTag::EllipticCompound => return Ok(compound_elliptic(row, dim)),
        ClassTag::Parabolic1 => {
            ls.push(Level::Lambda, span(dim, 0..n));
            ls.push(Level::L2, span(dim, 0..n));
            ls.push(Level::L0, points(dim, &[0]));
            ls.push(Level::L1, points(dim, &[0]));
        }
        ClassTag::Parabolic2 => {
            let (k, l) = (p.k.unwrap(), p.l.unwrap());
            ls.push(Level::Lambda, span(dim, 0..k + l - 1));
        }
        ClassTag::Parabolic3 => {
            let l = p.l.unwrap();
            ls.push(Level::Lambda, span(dim, (0..l - 1).chain(l..2 * l - 1)));
        }
        ClassTag::Parabolic4 => {
            let (k, l) = (p.k.unwrap(), p.l.unwrap());
            ls.push(Level::Lambda, span(dim, (0..k - 1).chain(k..k + l - 1)));
        }
        ClassTag::Loxodromic1 => {
            for h in [span(dim, 0..n), span(dim, 1..n + 1)] {
                ls.push(Level::Lambda, h.clone());
                ls.push(Level::L2, h);
            }
            let all: Vec<usize> = (0..dim).collect();
            ls.push(Level::L0, points(dim, &all));
            ls.push(Level::L1, points(dim, &all));
        }
        ClassTag::Loxodromic2 => {
            let m = p.m.unwrap();
            ls.push(Level::Lambda, span(dim, 0..n));
            ls.push(Level::Lambda, span(dim, m..n + 1));
            let declared_rational = p.angles[..m].iter().all(|a| a.declared && a.is_rational());
            if declared_rational {
                // Every eigenvalue of the equal-modulus cluster has a real common power.
                ls.push(Level::L0, span(dim, 0..m));
                if m < dim {
                    ls.push(Level::L0, points(dim, &(m..dim).collect::<Vec<_>>()));
                }
            }
        }
        ClassTag::Loxoparabolic => {
            let (k, l) = (p.k.unwrap(), p.l.unwrap());
            for h in [span(dim, (0..k - 1).chain(k..k + l)), span(dim, 0..k + l - 1)] {
                ls.push(Level::Lambda, h.clone());
                ls.push(Level::L2, h);
            }
            ls.push(Level::L0, points(dim, &[0, k]));
            ls.push(Level::L1, points(dim, &[0, k]));
        }
    }
    Ok(ls)
}

/// `L0` of a compound elliptic element: the span of the rational-angle axes, a complex slice
/// per cluster of screw-related irrational angles and isolated points for the rest.
fn compound_elliptic(row: &ElementClass, dim: usize) -> LimitSet {
    let angles = &row.params.angles;
    let rational: Vec<usize> = (0..dim).filter(|&i| angles[i].is_rational()).collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in (0..dim).filter(|&i| !angles[i].is_rational()) {
        let (tol, max_den) = (row.params.angle_tol, row.params.max_den);
        let found = clusters
            .iter_mut()
            .find(|c| c.iter().any(|&j| angles_screw_related(angles[i].angle, angles[j].angle, max_den, tol)));
        match found {
            Some(c) => c.push(i),
            None => clusters.push(alloc::vec![i]),
        }
    }
    let mut ls = LimitSet::whole();
    ls.as_printed = true;
    if !rational.is_empty() {
        ls.push(Level::L0, span(dim, rational));
    }
    let singles: Vec<usize> = clusters.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
    for c in clusters.iter().filter(|c| c.len() > 1) {
        ls.push(Level::L0, slice(dim, c));
    }
    if !singles.is_empty() {
        ls.push(Level::L0, points(dim, &singles));
    }
    ls
}

/// Pull a limit set back from Jordan coordinates: with `S·A·S⁻¹ = J`, `Λ(A) = S⁻¹·Λ(J)`.
pub fn conjugate_limit_set(ls: &LimitSet, s: &QMatrix) -> Result<LimitSet> {
    let s_inv = s.inverse()?;
    let components = ls.components.iter().map(|c| c.mapped_by(&s_inv)).collect::<Result<Vec<_>>>()?;
    Ok(LimitSet { components, ..ls.clone() })
}

/// Distance from `p` to the limit set proper, and whether it is within `tol`.
pub fn limit_set_membership(p: &ProjPoint, ls: &LimitSet, tol: f64) -> (bool, f64) {
    let d = match ls.kind {
        LimitKind::Whole => 0.0,
        LimitKind::Empty => return (false, 1.0),
        LimitKind::Union => ls
            .lambda()
            .into_iter()
            .map(|c| distance_to_subspace(p, c).unwrap_or(1.0))
            .fold(1.0, f64::min),
    };
    (d <= tol, d)
}

/// Symmetric set distance between the limit-set components of two limit sets: every component
/// is matched to its nearest counterpart. Different kinds are at distance 1.
pub fn limit_set_distance(a: &LimitSet, b: &LimitSet) -> f64 {
    if a.kind != b.kind {
        return 1.0;
    }
    let (la, lb) = (a.lambda(), b.lambda());
    let one_sided = |x: &[&ProjSubspace], y: &[&ProjSubspace]| {
        x.iter()
            .map(|c| y.iter().map(|d| subspace_distance(c, d).unwrap_or(1.0)).fold(1.0, f64::min))
            .fold(0.0, f64::max)
    };
    one_sided(&la, &lb).max(one_sided(&lb, &la))
}
