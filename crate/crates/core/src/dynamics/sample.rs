//! Random points and samples of subspaces.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::projective::{Flavor, ProjPoint, ProjSubspace};
use crate::qmat::{qdot, qnorm, QVector};
use crate::quat::Quaternion;

pub type SampleRng = ChaCha8Rng;

/// Deterministic generator for `seed`; independent tasks use distinct streams.
pub fn seeded_rng(seed: u64, stream: u64) -> SampleRng {
    let mut r = SampleRng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn rand_quat(r: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    )
}

fn rand_vector(r: &mut impl Rng, dim: usize) -> QVector {
    loop {
        let v: QVector = (0..dim).map(|_| rand_quat(r)).collect();
        if qnorm(&v) > 0.1 {
            return v;
        }
    }
}

pub fn random_point(r: &mut impl Rng, dim: usize) -> ProjPoint {
    ProjPoint::new(rand_vector(r, dim)).expect("nonzero by construction")
}

/// `count` random points of `w`: right-ℍ combinations of the generators, or the points
/// themselves (cycled) for a point set.
pub fn sample_subspace(w: &ProjSubspace, count: usize, r: &mut impl Rng) -> Vec<ProjPoint> {
    let gens = w.generators();
    if w.flavor() == Flavor::PointSet || gens.len() == 1 {
        return (0..count).map(|i| gens[i % gens.len()].clone()).collect();
    }
    let dim = w.ambient_dim();
    (0..count)
        .map(|_| {
            let c = rand_vector(r, gens.len());
            let mut v = alloc::vec![Quaternion::ZERO; dim];
            for (g, &ci) in gens.iter().zip(&c) {
                for (vi, &gi) in v.iter_mut().zip(g.coords()) {
                    *vi += gi * ci;
                }
            }
            ProjPoint::new(v).expect("generators are independent")
        })
        .collect()
}

/// `count` points at Fubini–Study distance `radius` from `center`, in random directions.
pub fn sphere_sample(center: &ProjPoint, radius: f64, count: usize, r: &mut impl Rng) -> Vec<ProjPoint> {
    let c = center.coords();
    let t = radius.clamp(0.0, 1.0).asin();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut u = rand_vector(r, c.len());
        let h = qdot(c, &u);
        for (ui, &ci) in u.iter_mut().zip(c) {
            *ui -= ci * h;
        }
        let n = qnorm(&u);
        if n < 1e-3 {
            continue;
        }
        let x: QVector = c.iter().zip(&u).map(|(&ci, &ui)| ci.scale(t.cos()) + ui.scale(t.sin() / n)).collect();
        out.push(ProjPoint::new(x).expect("unit combination"));
    }
    out
}
