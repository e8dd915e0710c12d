//! Numerical dynamics of cyclic groups: orbits, accumulation points, limits of
//! normalized powers and pushforwards of compact samples.
//!
//! Powers are never formed raw. Orbits renormalize the point after every step
//! and matrix powers are built by squaring with a renormalization after each
//! product, keeping the discarded scale in log form where it matters.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::projective::{fs_distance, subspace_span, Flavor, ProjPoint, ProjSubspace};
use crate::qmat::{binomial, jordan_block_power, qdot, qnorm, qsvd, QMatrix, QVector};
use crate::quat::{ComplexRep, Quaternion};
use crate::{Error, Result, EPSILON};

mod sample;
mod verify;

pub use sample::{random_point, sample_subspace, seeded_rng, sphere_sample, SampleRng};
pub use verify::{default_eps_contain, verify_limit_set, EllipticCheck, VerificationReport, VerifyParams};

/// Successive differences below this count as settled.
const CONVERGENCE_TOL: f64 = 1e-10;
/// Relative singular value at or below which a direction belongs to the kernel.
const KERNEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }
}

/// `g` or `g⁻¹`, scaled to unit max entry.
pub(crate) fn generator(g: &QMatrix, dir: Direction) -> Result<QMatrix> {
    let h = match dir {
        Direction::Forward => {
            let d = g.det_h();
            if !(d > EPSILON) {
                return Err(Error::Singular(d));
            }
            g.clone()
        }
        Direction::Backward => g.inverse()?,
    };
    Ok(h.scale(1.0 / h.max_abs()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub points: Vec<ProjPoint>,
    pub powers: Vec<i64>,
}

/// Orbit `g^{±t}(seed)` for `t = 0..=n`.
pub fn iterate_orbit(g: &QMatrix, seed: &ProjPoint, n: u64, dir: Direction) -> Result<OrbitRecord> {
    let h = generator(g, dir)?;
    let mut points = Vec::with_capacity(n as usize + 1);
    let mut x = seed.clone();
    points.push(x.clone());
    for _ in 0..n {
        x = x.mapped_by(&h)?;
        points.push(x.clone());
    }
    let powers = (0..=n as i64).map(|t| t * dir.sign()).collect();
    Ok(OrbitRecord { points, powers })
}

/// `x` multiplied on the right by the unit scalar that best aligns it with `reference`.
fn aligned(x: &[Quaternion], reference: &[Quaternion]) -> QVector {
    let c = qdot(x, reference);
    let n = c.norm();
    if n <= EPSILON {
        return x.to_vec();
    }
    let u = c.scale(1.0 / n);
    x.iter().map(|&e| e * u).collect()
}

/// Greedy first-fit clustering at radius `eps`; returns centroids.
pub fn cluster_points(points: &[ProjPoint], eps: f64) -> Vec<ProjPoint> {
    let mut clusters: Vec<(ProjPoint, QVector, usize)> = Vec::new();
    for p in points {
        match clusters.iter_mut().find(|c| fs_distance(&c.0, p) <= eps) {
            Some(c) => {
                for (s, e) in c.1.iter_mut().zip(aligned(p.coords(), c.0.coords())) {
                    *s += e;
                }
                c.2 += 1;
            }
            None => clusters.push((p.clone(), p.coords().to_vec(), 1)),
        }
    }
    clusters.into_iter().map(|(first, sum, _)| ProjPoint::new(sum).unwrap_or(first)).collect()
}

/// Cluster centroids of the last `tail_fraction` of the orbit.
pub fn accumulation_points(orbit: &OrbitRecord, eps: f64, tail_fraction: f64) -> Vec<ProjPoint> {
    let n = orbit.points.len();
    let take = ((n as f64 * tail_fraction).ceil() as usize).clamp(1, n);
    cluster_points(&orbit.points[n - take..], eps)
}

/// `g^m = e^{log_scale}·matrix`, by squaring with renormalization.
pub fn normalized_power(g: &QMatrix, m: u64) -> (QMatrix, f64) {
    let mut result = QMatrix::identity(g.dim());
    let mut log_scale = 0.0;
    let s0 = g.max_abs();
    let mut base = g.scale(1.0 / s0);
    let mut base_log = s0.ln();
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            result = result.matmul(&base);
            log_scale += base_log;
            let s = result.max_abs();
            result = result.scale(1.0 / s);
            log_scale += s.ln();
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base);
            base_log *= 2.0;
            let s = base.max_abs();
            base = base.scale(1.0 / s);
            base_log += s.ln();
        }
    }
    (result, log_scale)
}

#[derive(Clone, Debug)]
pub struct PseudoLimit {
    /// Last normalized power `g^m/σ₁(g^m)`.
    pub limit_matrix: QMatrix,
    /// `None` when the limit is invertible.
    pub kernel: Option<ProjSubspace>,
    pub image: ProjSubspace,
    pub converged: bool,
    /// Difference between the last two checkpoints.
    pub defect: f64,
    /// Exponent `m` of the last checkpoint.
    pub power: u64,
}

fn sign_free_diff(a: &QMatrix, b: &QMatrix) -> (f64, bool) {
    let minus = a.sub(b).frobenius_norm();
    let plus = a.add(b).frobenius_norm();
    if plus < minus {
        (plus, true)
    } else {
        (minus, false)
    }
}

/// Limit of `g^{±m}/σ₁` along `m = 2^k ≤ max_m`. Converged once three consecutive
/// checkpoints differ (up to the projectively trivial sign) by less than `1e-10`.
pub fn pseudo_projective_limit(g: &QMatrix, max_m: u64, dir: Direction) -> Result<PseudoLimit> {
    let h = generator(g, dir)?;
    let mut a = h.scale(1.0 / qsvd(&h)?.sigma[0]);
    let mut m = 1u64;
    let mut settled = 0;
    let mut defect = f64::INFINITY;
    while settled < 3 && m <= max_m / 2 {
        let sq = a.matmul(&a);
        let s = qsvd(&sq)?.sigma[0];
        let mut b = sq.scale(1.0 / s);
        let (d, flip) = sign_free_diff(&b, &a);
        if flip {
            b = b.scale(-1.0);
        }
        defect = d;
        settled = if d < CONVERGENCE_TOL { settled + 1 } else { 0 };
        a = b;
        m *= 2;
    }
    let svd = qsvd(&a)?;
    let n = a.dim();
    let rank = svd.sigma.iter().filter(|&&s| s > KERNEL_TOL * svd.sigma[0]).count();
    let col_points = |mat: &QMatrix, idx: core::ops::Range<usize>| -> Result<Vec<ProjPoint>> {
        idx.map(|i| ProjPoint::new(mat.column(i))).collect()
    };
    let image = subspace_span(&col_points(&svd.u, 0..rank)?, Flavor::QuaternionicSpan)?;
    let kernel = if rank < n {
        let v_star = svd.v.conj_transpose();
        Some(subspace_span(&col_points(&v_star, rank..n)?, Flavor::QuaternionicSpan)?)
    } else {
        None
    };
    Ok(PseudoLimit { limit_matrix: a, kernel, image, converged: settled >= 3, defect, power: m })
}

/// Accumulation points of `g^j(x)` over the sample `k` and `j = m, m+1, m+2`, clustered at `eps`.
pub fn compact_pushforward_limit(g: &QMatrix, k: &[ProjPoint], m: u64, eps: f64) -> Result<Vec<ProjPoint>> {
    let h = generator(g, Direction::Forward)?;
    Ok(cluster_points(&pushforward_points(&h, k, m)?, eps))
}

pub(crate) fn pushforward_points(h: &QMatrix, k: &[ProjPoint], m: u64) -> Result<Vec<ProjPoint>> {
    let (mut p, _) = normalized_power(h, m);
    let mut out = Vec::with_capacity(3 * k.len());
    for _ in 0..3 {
        for x in k {
            if let Some(y) = image_point(&p, x) {
                out.push(y);
            }
        }
        p = h.matmul(&p);
        p = p.scale(1.0 / p.max_abs());
    }
    Ok(out)
}

/// Image of `x` under a normalized power, rescaled before the zero test so that strongly
/// contracted directions survive. Points mapped to exactly zero have no image.
pub(crate) fn image_point(p: &QMatrix, x: &ProjPoint) -> Option<ProjPoint> {
    let y = p.apply(x.coords());
    let n = qnorm(&y);
    if !(n > 0.0) || !n.is_finite() {
        return None;
    }
    ProjPoint::new(y.into_iter().map(|e| e.scale(1.0 / n)).collect()).ok()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthRow {
    pub m: u64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// `σ₁/C(m, n)`.
    pub sigma1_over_binomial: f64,
    pub sigma2_over_m: f64,
    /// Product of all singular values.
    pub sigma_product: f64,
}

/// Singular values of `J(1, n+1)^m` for each `m` in `ms`.
pub fn jordan_block_singular_growth(n: usize, ms: impl IntoIterator<Item = u64>) -> Result<Vec<GrowthRow>> {
    let mut rows = Vec::new();
    for m in ms {
        let c = binomial(m, n as u64);
        if !c.is_finite() || c > 1e300 {
            return Err(Error::Overflow(m, n as u64));
        }
        let p = jordan_block_power(ComplexRep::new(1.0, 0.0), n + 1, m);
        let s = qsvd(&p)?.sigma;
        rows.push(GrowthRow {
            m,
            sigma1: s[0],
            sigma2: s.get(1).copied().unwrap_or(0.0),
            sigma1_over_binomial: s[0] / c,
            sigma2_over_m: s.get(1).copied().unwrap_or(0.0) / m as f64,
            sigma_product: s.iter().product(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::distance_to_subspace;
    use crate::qmat::mat_pow;
    use crate::qmat::testutil::*;

    fn pts(x: &[f64]) -> ProjPoint {
        ProjPoint::from_reals(x).unwrap()
    }

    #[test]
    fn loxodromic_orbit_decay() {
        let g = QMatrix::real_diag(&[0.5, 2.0]);
        let o = iterate_orbit(&g, &pts(&[1.0, 1.0]), 30, Direction::Forward).unwrap();
        let e2 = ProjPoint::basis(2, 1);
        for (t, p) in o.points.iter().enumerate() {
            let want = 1.0 / (1.0 + 16f64.powi(t as i32)).sqrt();
            assert!((fs_distance(p, &e2) - want).abs() <= 1e-12 * want.max(1e-300) + 1e-300, "{t}");
        }
        let acc = accumulation_points(&o, 1e-6, 0.5);
        assert_eq!(acc.len(), 1);
        assert!(fs_distance(&acc[0], &e2) < 1e-6);
    }

    #[test]
    fn parabolic_orbit_tends_to_e1() {
        let g = QMatrix::jordan_block(Quaternion::ONE, 2);
        let o = iterate_orbit(&g, &ProjPoint::basis(2, 1), 1000, Direction::Forward).unwrap();
        let e1 = ProjPoint::basis(2, 0);
        for m in [10usize, 100, 1000] {
            let want = 1.0 / ((m * m + 1) as f64).sqrt();
            assert!((fs_distance(&o.points[m], &e1) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_orbit_and_fixed_seed() {
        let mut r = rng(51);
        let g = QMatrix::diag(&[Quaternion::I, Quaternion::I]);
        let seed = random_point(&mut r, 2);
        let o = iterate_orbit(&g, &seed, 40, Direction::Forward).unwrap();
        let distinct = cluster_points(&o.points, 1e-9);
        assert!(distinct.len() <= 4);
        assert_eq!(accumulation_points(&o, 1e-9, 0.5).len(), distinct.len());

        let g = QMatrix::real_diag(&[0.5, 2.0]);
        let o = iterate_orbit(&g, &ProjPoint::basis(2, 0), 20, Direction::Forward).unwrap();
        let acc = accumulation_points(&o, 1e-9, 0.5);
        assert_eq!(acc, [ProjPoint::basis(2, 0)]);
    }

    #[test]
    fn orbit_matches_explicit_powers() {
        let mut r = rng(52);
        for _ in 0..50 {
            let g = rand_well_conditioned(&mut r, 3, 10.0);
            let seed = random_point(&mut r, 3);
            for dir in [Direction::Forward, Direction::Backward] {
                let o = iterate_orbit(&g, &seed, 8, dir).unwrap();
                for (p, &t) in o.points.iter().zip(&o.powers) {
                    let direct = seed.mapped_by(&mat_pow(&g, t).unwrap()).unwrap();
                    assert!(fs_distance(p, &direct) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn normalized_power_scale() {
        let g = QMatrix::real_diag(&[0.5, 3.0]);
        let (p, ls) = normalized_power(&g, 40);
        assert!((ls - 40.0 * 3f64.ln()).abs() < 1e-10);
        assert!((p[(1, 1)].a0 - 1.0).abs() < 1e-15 && p[(0, 0)].a0 < 1e-30);
    }

    #[test]
    fn pseudo_limit_examples() {
        let pl = pseudo_projective_limit(&QMatrix::jordan_block(Quaternion::ONE, 2), 1 << 50, Direction::Forward).unwrap();
        assert!(pl.converged);
        let z = QMatrix::from_fn(2, |r, c| if r == 0 && c == 1 { Quaternion::ONE } else { Quaternion::ZERO });
        assert!(pl.limit_matrix.sub(&z).frobenius_norm() < 1e-8);
        let e1 = ProjPoint::basis(2, 0);
        assert!(distance_to_subspace(&e1, pl.kernel.as_ref().unwrap()).unwrap() < 1e-8);
        assert!(distance_to_subspace(&e1, &pl.image).unwrap() < 1e-8);

        let pl = pseudo_projective_limit(&QMatrix::real_diag(&[0.5, 2.0]), 1 << 50, Direction::Forward).unwrap();
        assert!(pl.converged);
        assert!(pl.limit_matrix.sub(&QMatrix::real_diag(&[0.0, 1.0])).frobenius_norm() < 1e-12);
        assert!(distance_to_subspace(&e1, pl.kernel.as_ref().unwrap()).unwrap() < 1e-12);
        assert!(distance_to_subspace(&ProjPoint::basis(2, 1), &pl.image).unwrap() < 1e-12);

        let back = pseudo_projective_limit(&QMatrix::real_diag(&[0.5, 2.0]), 1 << 50, Direction::Backward).unwrap();
        assert!(distance_to_subspace(&e1, &back.image).unwrap() < 1e-12);

        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let lam = ComplexRep::from_polar(1.0, 2.0 * core::f64::consts::PI * theta).to_quaternion();
        for dim in 1..=3 {
            let g = QMatrix::diag(&alloc::vec![lam; dim]);
            let pl = pseudo_projective_limit(&g, 1 << 50, Direction::Forward).unwrap();
            assert!(!pl.converged && pl.kernel.is_none());
        }
    }

    #[test]
    fn pushforward_examples() {
        let mut r = rng(53);
        let g = QMatrix::real_diag(&[0.5, 2.0]);
        let k = sphere_sample(&pts(&[1.0, 1.0]), 0.3, 100, &mut r);
        let acc = compact_pushforward_limit(&g, &k, 100, 1e-6).unwrap();
        let e2 = ProjPoint::basis(2, 1);
        assert!(!acc.is_empty() && acc.iter().all(|p| fs_distance(p, &e2) < 1e-6));

        let j = QMatrix::jordan_block(Quaternion::ONE, 3);
        let plane = ProjSubspace::coordinate(3, &[1, 2], Flavor::QuaternionicSpan);
        let k: Vec<ProjPoint> = sample_subspace(&plane, 50, &mut r)
            .into_iter()
            .filter(|p| fs_distance(p, &ProjPoint::basis(3, 1)) > 0.1)
            .collect();
        let l12 = ProjSubspace::coordinate(3, &[0, 1], Flavor::QuaternionicSpan);
        let acc = compact_pushforward_limit(&j, &k, 10_000, 1e-3).unwrap();
        assert!(acc.iter().all(|p| distance_to_subspace(p, &l12).unwrap() < 1e-6));

        let fixed = [ProjPoint::basis(2, 0)];
        assert_eq!(compact_pushforward_limit(&g, &fixed, 50, 1e-12).unwrap(), fixed);
    }

    #[test]
    fn kernel_consistency() {
        let mut r = rng(54);
        let cases = [
            QMatrix::real_diag(&[0.5, 1.0, 2.0]),
            QMatrix::jordan_block(Quaternion::ONE, 3),
            QMatrix::block_diag(&[QMatrix::jordan_block(Quaternion::real(0.5), 2), QMatrix::real_diag(&[2.0])]),
        ];
        for g in &cases {
            let pl = pseudo_projective_limit(g, 1 << 50, Direction::Forward).unwrap();
            assert!(pl.converged);
            let ker = pl.kernel.clone().unwrap();
            let k: Vec<ProjPoint> = (0..40)
                .map(|_| random_point(&mut r, 3))
                .filter(|p| distance_to_subspace(p, &ker).unwrap() > 0.2)
                .collect();
            let m = if g[(0, 1)].a0 != 0.0 && g[(0, 0)].a0 == 1.0 { 1 << 30 } else { 200 };
            for p in compact_pushforward_limit(g, &k, m, 1e-9).unwrap() {
                let d = distance_to_subspace(&p, &pl.image).unwrap();
                assert!(d < 1e-6, "{d} {:?} {:?}", pl.image, p);
            }
        }
    }

    #[test]
    fn singular_growth() {
        let rows = jordan_block_singular_growth(1, [10, 100, 1000]).unwrap();
        for row in &rows {
            let m = row.m as f64;
            assert!((row.sigma1 - (m + (m * m + 4.0).sqrt()) / 2.0).abs() < 1e-9 * m);
        }
        let rows = jordan_block_singular_growth(2, [50, 200]).unwrap();
        assert!((rows[0].sigma1 - 1227.0399003200).abs() < 1e-6);
        assert!((rows[0].sigma2 - 1.0406834299).abs() < 1e-9);
        assert!((rows[1].sigma1 - 19902.0099984851).abs() < 1e-6);
        assert!((rows[1].sigma2 - 1.0100482315).abs() < 1e-9);
        for n in 1..=4 {
            for row in jordan_block_singular_growth(n, [1, 7, 50, 200]).unwrap() {
                assert!((row.sigma_product - 1.0).abs() < 1e-6, "n={n} m={}", row.m);
            }
        }
        assert!(matches!(jordan_block_singular_growth(200, [10_000]), Err(Error::Overflow(..))));
    }

    #[test]
    fn second_singular_value_over_m() {
        for n in 1..=3 {
            let rows = jordan_block_singular_growth(n, [50, 200]).unwrap();
            assert!(rows[1].sigma2_over_m < rows[0].sigma2_over_m, "n={n}");
        }
        // For n = 4 the ratio grows (σ₂ scales like m²).
        let rows = jordan_block_singular_growth(4, [50, 200]).unwrap();
        assert!((rows[0].sigma2_over_m - 8.93).abs() < 0.01 && (rows[1].sigma2_over_m - 33.86).abs() < 0.01);
    }
}
