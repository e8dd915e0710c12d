//! Numerical verification of a predicted limit set.
//!
//! Containment: accumulation points of random orbits and pushforwards of small random
//! spheres must lie in the predicted `Λ`. Coverage is witnessed per component with
//! moving targets: for a target `q` and a source `z` off `L0 ∪ L1`, find `x` near `z`
//! with `g^{±m}x` near `q`. Elliptic rows are checked by finite order or by recurrence.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;

use super::sample::{random_point, sample_subspace, seeded_rng, sphere_sample, SampleRng};
use super::{cluster_points, generator, iterate_orbit, normalized_power, pushforward_points, Direction};
use crate::classify::{ClassTag, ElementClass};
use crate::limitset::{limit_set_membership, Level, LimitKind, LimitSet};
use crate::projective::{distance_to_subspace, fs_distance, Flavor, ProjPoint, ProjSubspace};
use crate::qmat::{complete_basis, phi_vector, qdot, qnorm, CMatrix, CVector, QMatrix, QVector};
use crate::quat::Quaternion;
use crate::Result;

const TAIL_POINTS: usize = 200;
const SPHERE_RADIUS: f64 = 0.1;
const SOURCE_SEEDS: usize = 6;
const SOURCES_PER_COMPONENT: usize = 6;
const SOURCE_MARGIN: f64 = 0.05;
const RIDGE: [f64; 4] = [1e-1, 1e-3, 1e-6, 1e-9];
const ORBIT_MATCH: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyParams {
    pub seed: u64,
    /// Random orbit seeds.
    pub seeds: usize,
    /// Random compact spheres pushed forward.
    pub samples: usize,
    /// Orbit length and pushforward exponent.
    pub iters: u64,
    /// Containment tolerance; `None` picks [`default_eps_contain`].
    pub eps_contain: Option<f64>,
    pub min_containment: f64,
    /// Targets per limit-set component for coverage.
    pub coverage_samples: usize,
    pub coverage_max_power: u64,
    pub max_recurrence: u64,
    pub eps_recurrence: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            seed: 0,
            seeds: 50,
            samples: 20,
            iters: 10_000,
            eps_contain: None,
            min_containment: 1.0,
            coverage_samples: 200,
            coverage_max_power: 1 << 14,
            max_recurrence: 100_000,
            eps_recurrence: 1e-2,
        }
    }
}

/// Parabolic orbits approach `Λ` like `1/m`; everything else converges geometrically.
pub fn default_eps_contain(tag: ClassTag) -> f64 {
    if tag.is_parabolic() {
        1e-2
    } else {
        1e-6
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EllipticCheck {
    /// `order` is the least `N` with `g^N` central; `returned` records `g^N x = x` for every seed.
    FiniteOrder { order: Option<u64>, max_orbit_size: usize, returned: bool },
    /// First power at which every seed came back within the recurrence tolerance.
    Recurrence { power: Option<u64>, displacement: f64 },
}

impl EllipticCheck {
    pub fn ok(&self) -> bool {
        match *self {
            EllipticCheck::FiniteOrder { order, max_orbit_size, returned } => {
                order.is_some_and(|n| max_orbit_size as u64 <= n) && returned
            }
            EllipticCheck::Recurrence { power, .. } => power.is_some(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub seed: u64,
    pub tag: ClassTag,
    pub eps_contain: f64,
    /// Fraction of cloud points within `eps_contain` of `Λ`.
    pub containment: f64,
    pub cloud_size: usize,
    pub max_distance: f64,
    /// Per limit-set component: worst target distance (empty for `Whole` and `Empty`).
    pub coverage: Vec<f64>,
    pub elliptic: Option<EllipticCheck>,
    pub seeds: usize,
    pub samples: usize,
    pub iters: u64,
    pub passed: bool,
}

pub fn verify_limit_set(
    g: &QMatrix,
    row: &ElementClass,
    predicted: &LimitSet,
    params: &VerifyParams,
) -> Result<VerificationReport> {
    let dim = g.dim();
    let eps = params.eps_contain.unwrap_or_else(|| default_eps_contain(row.tag));
    let mut seed_rng = seeded_rng(params.seed, 0);
    let seeds: Vec<ProjPoint> = (0..params.seeds).map(|_| random_point(&mut seed_rng, dim)).collect();

    let mut cloud = Vec::new();
    let trivial = row.tag.is_elliptic() || predicted.kind != LimitKind::Union;
    if !trivial {
        for dir in [Direction::Forward, Direction::Backward] {
            for s in &seeds {
                let o = iterate_orbit(g, s, params.iters, dir)?;
                let tail = &o.points[o.points.len() - TAIL_POINTS.min(o.points.len() / 2).max(1)..];
                cloud.extend(cluster_points(tail, eps));
            }
        }
        let mut sample_rng = seeded_rng(params.seed, 1);
        let spheres: Vec<ProjPoint> = (0..params.samples)
            .flat_map(|_| {
                let c = random_point(&mut sample_rng, dim);
                sphere_sample(&c, SPHERE_RADIUS, 10, &mut sample_rng)
            })
            .collect();
        for dir in [Direction::Forward, Direction::Backward] {
            let h = generator(g, dir)?;
            cloud.extend(cluster_points(&pushforward_points(&h, &spheres, params.iters)?, eps));
        }
    }
    let distances: Vec<f64> = cloud.iter().map(|p| limit_set_membership(p, predicted, eps).1).collect();
    let inside = distances.iter().filter(|&&d| d <= eps).count();
    let containment = if cloud.is_empty() { 1.0 } else { inside as f64 / cloud.len() as f64 };
    let max_distance = distances.iter().copied().fold(0.0, f64::max);

    let coverage = if trivial {
        Vec::new()
    } else {
        let mut cov_rng = seeded_rng(params.seed, 2);
        coverage(g, predicted, &cloud, params, &mut cov_rng)?
    };

    let elliptic = match row.tag {
        ClassTag::EllipticRational => Some(finite_order_check(g, row, &seeds, params.max_recurrence)?),
        t if t.is_elliptic() => Some(recurrence_check(g, &seeds, params.max_recurrence, params.eps_recurrence)?),
        _ => None,
    };
    let passed = containment >= params.min_containment && elliptic.as_ref().is_none_or(EllipticCheck::ok);
    Ok(VerificationReport {
        seed: params.seed,
        tag: row.tag,
        eps_contain: eps,
        containment,
        cloud_size: cloud.len(),
        max_distance,
        coverage,
        elliptic,
        seeds: params.seeds,
        samples: params.samples,
        iters: params.iters,
        passed,
    })
}

/// Least `N ≤ cap` such that all `e^{2πiNα}` coincide and are real.
pub(crate) fn projective_order(row: &ElementClass, cap: u64) -> Option<u64> {
    let fracs: Vec<(u64, u64)> = row.params.angles.iter().map(|a| a.rational).collect::<Option<_>>()?;
    let lcm = fracs.iter().fold(1u64, |acc, &(_, q)| lcm(acc, q.max(1)));
    let bound = lcm.saturating_mul(2).min(cap);
    (1..=bound).find(|&n| {
        // Twice N·p/q modulo 2; all must agree and be 0 (value 1) or 1 (value -1).
        let mut class = None;
        fracs.iter().all(|&(p, q)| {
            let num = (2 * n % (2 * q)) * p % (2 * q);
            if num % q != 0 {
                return false;
            }
            let c = num / q;
            *class.get_or_insert(c) == c
        })
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    (a / gcd(a, b)).saturating_mul(b)
}

fn finite_order_check(g: &QMatrix, row: &ElementClass, seeds: &[ProjPoint], cap: u64) -> Result<EllipticCheck> {
    let order = projective_order(row, cap);
    let steps = order.unwrap_or(cap.min(1000));
    let mut max_orbit_size = 0;
    let mut returned = order.is_some();
    for s in seeds {
        let o = iterate_orbit(g, s, steps, Direction::Forward)?;
        let distinct = cluster_points(&o.points[..steps as usize], ORBIT_MATCH).len();
        max_orbit_size = max_orbit_size.max(distinct);
        returned &= fs_distance(&o.points[steps as usize], s) <= ORBIT_MATCH;
    }
    Ok(EllipticCheck::FiniteOrder { order, max_orbit_size, returned })
}

fn recurrence_check(g: &QMatrix, seeds: &[ProjPoint], cap: u64, eps: f64) -> Result<EllipticCheck> {
    let h = generator(g, Direction::Forward)?;
    let mut xs: Vec<ProjPoint> = seeds.to_vec();
    let mut best = f64::INFINITY;
    for m in 1..=cap {
        let mut worst: f64 = 0.0;
        for (x, s) in xs.iter_mut().zip(seeds) {
            *x = x.mapped_by(&h)?;
            worst = worst.max(fs_distance(x, s));
        }
        best = best.min(worst);
        if worst <= eps {
            return Ok(EllipticCheck::Recurrence { power: Some(m), displacement: worst });
        }
    }
    Ok(EllipticCheck::Recurrence { power: None, displacement: best })
}

/// Targets to cover on a component: its points, or a random sample of a span.
fn targets(c: &ProjSubspace, count: usize, r: &mut SampleRng) -> Vec<ProjPoint> {
    match c.flavor() {
        Flavor::PointSet => c.generators().to_vec(),
        _ => sample_subspace(c, count, r),
    }
}

fn coverage(
    g: &QMatrix,
    predicted: &LimitSet,
    cloud: &[ProjPoint],
    params: &VerifyParams,
    r: &mut SampleRng,
) -> Result<Vec<f64>> {
    let dim = g.dim();
    let lambda = predicted.lambda();
    let mut avoid: Vec<&ProjSubspace> = predicted.level(Level::L0);
    avoid.extend(predicted.level(Level::L1));
    let far = |p: &ProjPoint| avoid.iter().all(|w| distance_to_subspace(p, w).map_or(true, |d| d >= SOURCE_MARGIN));
    let mut sources: Vec<ProjPoint> = (0..SOURCE_SEEDS).map(|_| random_point(r, dim)).collect();
    for c in &lambda {
        if c.flavor() != Flavor::PointSet {
            sources.extend(sample_subspace(c, SOURCES_PER_COMPONENT, r).into_iter().filter(|p| far(p)));
        }
    }

    let mut powers = Vec::new();
    for dir in [Direction::Forward, Direction::Backward] {
        let h = generator(g, dir)?;
        let mut m = 1;
        while m <= params.coverage_max_power {
            powers.push(normalized_power(&h, m).0);
            m *= 2;
        }
    }

    lambda
        .iter()
        .map(|c| {
            let qs = targets(c, params.coverage_samples, r);
            let mut best: Vec<f64> =
                qs.iter().map(|q| cloud.iter().map(|p| fs_distance(p, q)).fold(1.0, f64::min)).collect();
            for z in &sources {
                let mut basis = alloc::vec![z.coords().to_vec()];
                complete_basis(&mut basis, dim);
                let t = &basis[1..];
                for p in &powers {
                    let u = p.apply(z.coords());
                    let b: Vec<QVector> = t.iter().map(|ti| p.apply(ti)).collect();
                    for (q, best_q) in qs.iter().zip(best.iter_mut()) {
                        if *best_q > 0.0 {
                            *best_q = best_q.min(moving_target(z, t, &u, &b, q));
                        }
                    }
                }
            }
            Ok(best.into_iter().fold(0.0, f64::max))
        })
        .collect()
}

/// `v − q⟨q, v⟩` for unit `q`.
fn project_off(q: &[Quaternion], v: &[Quaternion]) -> QVector {
    let h = qdot(q, v);
    v.iter().zip(q).map(|(&vi, &qi)| vi - qi * h).collect()
}

/// Best score `max(d(x, z), d(Gx, q))` over `x = z + T·a`, with `a` from ridge least squares on
/// `‖P(Gz + GTa)‖`, `P` the projection off `q`. `u = Gz` and `b = GT` column by column.
fn moving_target(z: &ProjPoint, t: &[QVector], u: &[Quaternion], b: &[QVector], q: &ProjPoint) -> f64 {
    let score = |a: &[Quaternion]| -> f64 {
        let mut x = z.coords().to_vec();
        let mut y = u.to_vec();
        for ((ti, bi), &ai) in t.iter().zip(b).zip(a) {
            for (xk, &tk) in x.iter_mut().zip(ti) {
                *xk += tk * ai;
            }
            for (yk, &bk) in y.iter_mut().zip(bi) {
                *yk += bk * ai;
            }
        }
        match (ProjPoint::new(x), ProjPoint::new(y)) {
            (Ok(x), Ok(y)) => fs_distance(&x, z).max(fs_distance(&y, q)),
            _ => 1.0,
        }
    };
    let zero = alloc::vec![Quaternion::ZERO; t.len()];
    let mut best = score(&zero);
    let pu = project_off(q.coords(), u);
    let pb: Vec<QVector> = b.iter().map(|bi| project_off(q.coords(), bi)).collect();
    let scale: f64 = pb.iter().map(|c| qnorm(c).powi(2)).sum();
    if scale == 0.0 || !scale.is_finite() {
        return best;
    }
    let m = quaternionic_columns(&pb);
    let mh = m.adjoint();
    let normal = &mh * &m;
    let rhs: CVector = -(&mh * phi_vector(&pu));
    for lam in RIDGE {
        let mu = Complex64::new(lam * lam * scale, 0.0);
        let mut lhs = normal.clone();
        for i in 0..lhs.nrows() {
            lhs[(i, i)] += mu;
        }
        if let Some(sol) = lhs.cholesky().map(|c| c.solve(&rhs)) {
            best = best.min(score(&unpack(&sol)));
        }
    }
    best
}

/// Complex matrix of `a ↦ Σ bᵢaᵢ` in the coordinates `aᵢ = αᵢ + j·γᵢ` with `α, γ ∈ ℂ`:
/// column `i` is `φ(bᵢ)` and column `n+i` is `φ(bᵢ·j)`.
pub(crate) fn quaternionic_columns(b: &[QVector]) -> CMatrix {
    let n = b.len();
    let rows = 2 * b.first().map_or(0, Vec::len);
    let mut m = CMatrix::zeros(rows, 2 * n);
    for (i, bi) in b.iter().enumerate() {
        m.set_column(i, &phi_vector(bi));
        let bj: QVector = bi.iter().map(|&e| e * Quaternion::J).collect();
        m.set_column(n + i, &phi_vector(&bj));
    }
    m
}

/// Inverse of the coordinates of [`quaternionic_columns`].
pub(crate) fn unpack(c: &CVector) -> QVector {
    let n = c.len() / 2;
    (0..n)
        .map(|i| Quaternion::from_complex(c[i]) + Quaternion::J * Quaternion::from_complex(c[n + i]))
        .collect()
}
