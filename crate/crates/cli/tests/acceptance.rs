//! Acceptance suite: one line per criterion with its verdict and wall time.
//! Runs without the libtest harness so the lines always show in `cargo test` output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use qkul::{parse_input, InputSpec};
use qkul_core::classify::{classify_element, ClassTag, ClassifyOptions, ElementClass};
use qkul_core::dynamics::{
    accumulation_points, cluster_points, iterate_orbit, jordan_block_singular_growth, pseudo_projective_limit,
    random_point, seeded_rng, verify_limit_set, Direction, EllipticCheck, SampleRng, VerifyParams,
};
use qkul_core::limitset::{
    conjugate_limit_set, kulkarni_sets_canonical, limit_set_distance, limit_set_membership, Level, LimitKind, LimitSet,
};
use qkul_core::projective::{
    dual_hyperplane_apply, fs_distance, subspace_distance, Flavor, Hyperplane, ProjPoint, ProjSubspace,
};
use qkul_core::qmat::{phi_embed, qdot, qsvd, right_eigenvalues, JordanData, QMatrix, QVector};
use qkul_core::quat::Quaternion;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn input(text: &str) -> InputSpec {
    parse_input(text).unwrap_or_else(|e| panic!("bad acceptance input: {e}\n{text}"))
}

fn classify(spec: &InputSpec) -> Result<(ElementClass, JordanData), String> {
    let opts = ClassifyOptions { mode: spec.jordan_mode(), ..ClassifyOptions::default() };
    let g = spec.matrix().map_err(|e| e.to_string())?;
    classify_element(&g, &opts).map_err(|e| e.to_string())
}

fn limit_set(spec: &InputSpec) -> Result<(QMatrix, ElementClass, LimitSet), String> {
    let (cls, jd) = classify(spec)?;
    let canonical = kulkarni_sets_canonical(&cls).map_err(|e| e.to_string())?;
    let ls = conjugate_limit_set(&canonical, &jd.conjugator).map_err(|e| e.to_string())?;
    Ok((spec.matrix().map_err(|e| e.to_string())?, cls, ls))
}

fn supports(ls: &LimitSet, level: Level) -> Vec<Vec<usize>> {
    ls.level(level).iter().map(|c| c.coordinate_support().unwrap_or_default()).collect()
}

fn criterion_1() -> Check {
    let golden = "0.6180339887498949";
    let rows: [(ClassTag, String, Option<Vec<Vec<usize>>>); 10] = [
        (ClassTag::EllipticRational, "block e2pi(1/4) 1\nblock e2pi(1/3) 1".into(), None),
        (ClassTag::EllipticSimpleIrrational, format!("block e2pi(irr:{golden}) 1\nblock e2pi(irr:{golden}) 1"), None),
        (ClassTag::EllipticCompound, format!("block e2pi(1/4) 1\nblock e2pi(irr:{golden}) 1"), None),
        (ClassTag::Parabolic1, "block 1 4".into(), Some(vec![vec![0, 1, 2]])),
        (ClassTag::Parabolic2, "block e2pi(1/5) 1\nblock 1 3".into(), Some(vec![vec![0, 1, 2]])),
        (ClassTag::Parabolic3, "block 1 2\nblock 1 2".into(), Some(vec![vec![0, 2]])),
        (ClassTag::Parabolic4, "block 1 3\nblock 1 2".into(), Some(vec![vec![0, 1, 3]])),
        (ClassTag::Loxodromic1, "block 1/2 1\nblock e2pi(3/10) 1\nblock 2 1".into(), Some(vec![vec![0, 1], vec![1, 2]])),
        (ClassTag::Loxodromic2, "block 1/2 1\nblock 1/2*e2pi(3/10) 1\nblock 4 1".into(), Some(vec![vec![0, 1], vec![2]])),
        (ClassTag::Loxoparabolic, "block 1/2*e2pi(1/10) 2\nblock 2 1".into(), Some(vec![vec![0, 2], vec![0, 1]])),
    ];
    for (tag, blocks, want) in &rows {
        let dim: usize = blocks.lines().map(|l| l.rsplit(' ').next().unwrap().parse::<usize>().unwrap()).sum();
        let spec = input(&format!("mode jordan\ndim {dim}\n{blocks}\n"));
        let (cls, jd) = classify(&spec)?;
        ensure(cls.tag == *tag, || format!("{blocks:?} classified as {}", cls.tag))?;
        let ls = kulkarni_sets_canonical(&cls).map_err(|e| e.to_string())?;
        let got_kind = match tag {
            ClassTag::EllipticRational => LimitKind::Empty,
            t if t.is_elliptic() => LimitKind::Whole,
            _ => LimitKind::Union,
        };
        ensure(ls.kind == got_kind, || format!("{tag}: kind {:?}", ls.kind))?;
        if let Some(want) = want {
            ensure(&supports(&ls, Level::Lambda) == want, || {
                format!("{tag}: Λ supports {:?}, want {want:?}", supports(&ls, Level::Lambda))
            })?;
            ensure(ls.lambda().iter().all(|c| c.flavor() == Flavor::QuaternionicSpan), || format!("{tag}: flavor"))?;
        }
        ensure(jd.residual < 1e-12, || format!("{tag}: Jordan residual {}", jd.residual))?;
    }
    let spec = input("mode jordan\ndim 4\nblock 1 2\nblock 2 1\nblock 1/4 1\n");
    let (cls, _) = classify(&spec)?;
    ensure(cls.tag == ClassTag::OutOfCatalog, || format!("out-of-catalog input classified as {}", cls.tag))?;
    ensure(kulkarni_sets_canonical(&cls).is_err(), || "out-of-catalog input produced a limit set".into())?;
    Ok("10 catalog rows and the out-of-catalog verdict".into())
}

fn criterion_2() -> Check {
    let spec = input("mode matrix\ndim 2\nrow i 0\nrow 0 -i\n");
    let (g, cls, ls) = limit_set(&spec)?;
    ensure(cls.tag == ClassTag::EllipticRational, || format!("D(i,-i) classified as {}", cls.tag))?;
    ensure(ls.kind == LimitKind::Empty, || format!("D(i,-i) limit set {:?}", ls.kind))?;
    let mut r = seeded_rng(2, 0);
    let mut most = 0;
    for _ in 0..50 {
        let o = iterate_orbit(&g, &random_point(&mut r, 2), 100, Direction::Forward).map_err(|e| e.to_string())?;
        most = most.max(cluster_points(&o.points, 1e-9).len());
    }
    ensure(most <= 4, || format!("orbit with {most} distinct points"))?;

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let spec = input(&format!("mode jordan\ndim 3\n{}", format!("block e2pi(irr:{golden:?}) 1\n").repeat(3)));
    let (g, cls, ls) = limit_set(&spec)?;
    ensure(ls.kind == LimitKind::Whole, || format!("golden D(λ,λ,λ) limit set {:?}", ls.kind))?;
    let rep = verify_limit_set(&g, &cls, &ls, &VerifyParams { seed: 2, ..VerifyParams::default() })
        .map_err(|e| e.to_string())?;
    match rep.elliptic {
        Some(EllipticCheck::Recurrence { power: Some(m), displacement }) if m <= 100_000 && displacement <= 1e-2 => {
            Ok(format!("D(i,-i) orbits ≤ {most} points; recurrence at m = {m}, displacement {displacement:.2e}"))
        }
        other => Err(format!("no recurrence witness: {other:?}")),
    }
}

fn criterion_3() -> Check {
    let spec = input("mode jordan\ndim 3\nblock 1 3\n");
    let (g, cls, ls) = limit_set(&spec)?;
    ensure(cls.tag == ClassTag::Parabolic1, || format!("J(1,3) classified as {}", cls.tag))?;
    let pl = pseudo_projective_limit(&g, 1 << 50, Direction::Forward).map_err(|e| e.to_string())?;
    ensure(pl.converged, || "pseudo-limit did not converge".into())?;
    let kernel = pl.kernel.as_ref().ok_or("pseudo-limit has no kernel")?;
    let dk = subspace_distance(kernel, &ProjSubspace::coordinate(3, &[0, 1], Flavor::QuaternionicSpan))
        .map_err(|e| e.to_string())?;
    let di = subspace_distance(&pl.image, &ProjSubspace::coordinate(3, &[0], Flavor::QuaternionicSpan))
        .map_err(|e| e.to_string())?;
    ensure(dk <= 1e-8 && di <= 1e-8, || format!("kernel distance {dk:.2e}, image distance {di:.2e}"))?;
    let o = iterate_orbit(&g, &ProjPoint::basis(3, 2), 10_000, Direction::Forward).map_err(|e| e.to_string())?;
    let d_orbit = fs_distance(&o.points[10_000], &ProjPoint::basis(3, 0));
    ensure(d_orbit <= 1e-2, || format!("orbit of [0:0:1] at m = 1e4 is {d_orbit:.2e} from e1"))?;
    let p = VerifyParams { seed: 3, seeds: 50, eps_contain: Some(1e-2), ..VerifyParams::default() };
    let rep = verify_limit_set(&g, &cls, &ls, &p).map_err(|e| e.to_string())?;
    ensure(rep.containment == 1.0, || format!("containment {}", rep.containment))?;
    Ok(format!(
        "kernel {dk:.1e}, image {di:.1e} at m = 2^{}; orbit {d_orbit:.1e}; containment 1.0",
        pl.power.trailing_zeros()
    ))
}

fn criterion_4() -> Check {
    let spec = input("mode matrix\ndim 2\nrow 1/2 0\nrow 0 2\n");
    let (g, cls, ls) = limit_set(&spec)?;
    ensure(cls.tag == ClassTag::Loxodromic1, || format!("D(1/2,2) classified as {}", cls.tag))?;
    let mut r = seeded_rng(4, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let seed = random_point(&mut r, 2);
        for (dir, target) in [(Direction::Forward, 1), (Direction::Backward, 0)] {
            let o = iterate_orbit(&g, &seed, 100, dir).map_err(|e| e.to_string())?;
            for a in accumulation_points(&o, 1e-10, 0.1) {
                worst = worst.max(fs_distance(&a, &ProjPoint::basis(2, target)));
            }
        }
    }
    ensure(worst <= 1e-10, || format!("accumulation {worst:.2e} from e2/e1"))?;
    let p = VerifyParams { seed: 4, iters: 100, ..VerifyParams::default() };
    let rep = verify_limit_set(&g, &cls, &ls, &p).map_err(|e| e.to_string())?;
    ensure(rep.containment == 1.0, || format!("containment {}", rep.containment))?;
    ensure(rep.coverage.len() == 2 && rep.coverage.iter().all(|&c| c <= 1e-3), || {
        format!("coverage {:?}", rep.coverage)
    })?;
    Ok(format!("accumulation {worst:.1e}; coverage {:.1e}, {:.1e}", rep.coverage[0], rep.coverage[1]))
}

fn criterion_5() -> Check {
    let spec = input("mode matrix\ndim 3\nrow 1/2 0 0\nrow 0 1 0\nrow 0 0 2\n");
    let (g, cls, ls) = limit_set(&spec)?;
    ensure(cls.tag == ClassTag::Loxodromic1, || format!("D(1/2,1,2) classified as {}", cls.tag))?;
    let p = VerifyParams { seed: 5, iters: 200, coverage_samples: 200, ..VerifyParams::default() };
    let rep = verify_limit_set(&g, &cls, &ls, &p).map_err(|e| e.to_string())?;
    ensure(rep.coverage.len() == 2 && rep.coverage.iter().all(|&c| c <= 1e-2), || {
        format!("coverage {:?}", rep.coverage)
    })?;
    ensure(rep.containment == 1.0, || format!("containment {}", rep.containment))?;
    Ok(format!("coverage {:.1e}, {:.1e} over 200 targets each", rep.coverage[0], rep.coverage[1]))
}

fn criterion_6() -> Check {
    let (a, b) = (0.5f64.sqrt(), 2f64.sqrt());
    let spec = input(&format!("mode jordan\ndim 3\nblock {a:?} 2\nblock {b:?} 1\n"));
    let (g, cls, ls) = limit_set(&spec)?;
    ensure(cls.tag == ClassTag::Loxoparabolic, || format!("classified as {}", cls.tag))?;
    for level in [Level::L0, Level::L1] {
        let s = supports(&ls, level);
        ensure(s == [vec![0, 2]], || format!("{} supports {s:?}", level.name()))?;
        ensure(ls.level(level).iter().all(|c| c.flavor() == Flavor::PointSet), || "L0/L1 must be points".into())?;
    }
    let p = VerifyParams { seed: 6, eps_contain: Some(1e-3), coverage_samples: 50, ..VerifyParams::default() };
    let rep = verify_limit_set(&g, &cls, &ls, &p).map_err(|e| e.to_string())?;
    ensure(rep.containment == 1.0, || format!("containment {}", rep.containment))?;
    let pl = pseudo_projective_limit(&g, 1 << 50, Direction::Forward).map_err(|e| e.to_string())?;
    let worst = pl
        .image
        .generators()
        .iter()
        .map(|x| limit_set_membership(x, &ls, 1e-8).1)
        .fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("pseudo-limit image {worst:.2e} from Λ"))?;
    Ok(format!("L0 = L1 = {{e1, e3}}; containment 1.0; image {worst:.1e} from Λ"))
}

fn criterion_7() -> Check {
    let rows = jordan_block_singular_growth(2, 50..=200).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.sigma1_over_binomial).collect();
    let band = ratios.iter().copied().fold(0.0, f64::max) / ratios.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(band <= 1.5, || format!("band ratio {band}"))?;
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    ensure(last.sigma2_over_m < first.sigma2_over_m, || {
        format!("σ₂/m: {} at 50, {} at 200", first.sigma2_over_m, last.sigma2_over_m)
    })?;
    Ok(format!("band {band:.5}; σ₂/m {:.4} → {:.4}", first.sigma2_over_m, last.sigma2_over_m))
}

fn rand_quat(r: &mut SampleRng) -> Quaternion {
    Quaternion::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

fn rand_matrix(r: &mut SampleRng, dim: usize) -> QMatrix {
    QMatrix::from_fn(dim, |_, _| rand_quat(r))
}

/// Random matrix with condition number at most `cond`.
fn rand_conditioned(r: &mut SampleRng, dim: usize, cond: f64) -> QMatrix {
    loop {
        let m = rand_matrix(r, dim);
        let s = qsvd(&m).expect("svd of a random matrix").sigma;
        if s[dim - 1] > 0.0 && s[0] / s[dim - 1] <= cond {
            return m;
        }
    }
}

fn criterion_8() -> Check {
    const N: usize = 500;
    let mut r = seeded_rng(8, 0);

    let mut phi_err: f64 = 0.0;
    let mut det_err: f64 = 0.0;
    let mut det_min = f64::INFINITY;
    for k in 0..N {
        let dim = 1 + k % 5;
        let (a, b) = (rand_matrix(&mut r, dim), rand_matrix(&mut r, dim));
        let lhs = phi_embed(&a.matmul(&b));
        let rhs = phi_embed(&a) * phi_embed(&b);
        phi_err = phi_err.max((lhs - &rhs).norm() / rhs.norm().max(1.0));
        let (da, db, dab) = (a.det_h(), b.det_h(), a.matmul(&b).det_h());
        det_err = det_err.max((dab - da * db).abs() / (da * db).max(1e-300));
        det_min = det_min.min(da.min(db));
    }
    ensure(phi_err <= 1e-12, || format!("Φ multiplicativity error {phi_err:.2e}"))?;
    ensure(det_err <= 1e-9, || format!("det_H multiplicativity error {det_err:.2e}"))?;
    ensure(det_min >= 0.0, || format!("negative det_H {det_min}"))?;

    let mut eig_err: f64 = 0.0;
    for k in 0..N {
        let dim = 1 + k % 4;
        let a = rand_matrix(&mut r, dim);
        let s = rand_conditioned(&mut r, dim, 10.0);
        let b = s.matmul(&a).matmul(&s.inverse().map_err(|e| e.to_string())?);
        let (ea, eb) = (right_eigenvalues(&a), right_eigenvalues(&b));
        let (Ok(ea), Ok(eb)) = (ea, eb) else { continue };
        let mut eb: Vec<_> = eb.into_iter().map(|(z, _)| Some(z)).collect();
        for (z, _) in ea {
            let (i, d) = eb
                .iter()
                .enumerate()
                .filter_map(|(i, w)| w.map(|w| (i, z.dist(w))))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .ok_or("eigenvalue counts differ")?;
            eig_err = eig_err.max(d / z.modulus().max(1.0));
            eb[i] = None;
        }
    }
    ensure(eig_err <= 1e-6, || format!("eigenvalue conjugation error {eig_err:.2e}"))?;

    let mut axiom_err: f64 = 0.0;
    let mut unitary_err: f64 = 0.0;
    for k in 0..N {
        let dim = 2 + k % 4;
        let (p, q, s) = (random_point(&mut r, dim), random_point(&mut r, dim), random_point(&mut r, dim));
        let (dpq, dqs, dps) = (fs_distance(&p, &q), fs_distance(&q, &s), fs_distance(&p, &s));
        axiom_err = axiom_err
            .max(fs_distance(&p, &p))
            .max((dpq - fs_distance(&q, &p)).abs())
            .max(dps - dpq - dqs)
            .max(-dpq)
            .max(dpq - 1.0);
        let u = qsvd(&rand_matrix(&mut r, dim)).map_err(|e| e.to_string())?.u;
        let (up, uq) = (p.mapped_by(&u).map_err(|e| e.to_string())?, q.mapped_by(&u).map_err(|e| e.to_string())?);
        unitary_err = unitary_err.max((fs_distance(&up, &uq) - dpq).abs());
    }
    ensure(axiom_err <= 1e-12, || format!("metric axiom violation {axiom_err:.2e}"))?;
    ensure(unitary_err <= 1e-12, || format!("unitary invariance error {unitary_err:.2e}"))?;

    let mut dual_err: f64 = 0.0;
    for k in 0..N {
        let dim = 2 + k % 4;
        let alpha = random_point(&mut r, dim);
        let y = random_point(&mut r, dim);
        let h = qdot(alpha.coords(), y.coords());
        let x: QVector = y.coords().iter().zip(alpha.coords()).map(|(&yi, &ai)| yi - ai * h).collect();
        let Ok(x) = ProjPoint::new(x) else { continue };
        let g = rand_conditioned(&mut r, dim, 10.0);
        let hyper = dual_hyperplane_apply(&g, &Hyperplane::new(alpha)).map_err(|e| e.to_string())?;
        dual_err = dual_err.max(hyper.pairing(&x.mapped_by(&g).map_err(|e| e.to_string())?).norm());
    }
    ensure(dual_err <= 1e-12, || format!("dual hyperplane error {dual_err:.2e}"))?;
    Ok(format!(
        "{N} each: Φ {phi_err:.0e}, det {det_err:.0e}, eig {eig_err:.0e}, metric {axiom_err:.0e}, unitary {unitary_err:.0e}, dual {dual_err:.0e}"
    ))
}

fn criterion_9() -> Check {
    let mut r = seeded_rng(9, 0);
    let rows = [
        "block 1 3",
        "block 1/2 1\nblock e2pi(3/10) 1\nblock 2 1",
        "block 1/2+1/2i 2\nblock 2 1",
    ];
    let mut worst: f64 = 0.0;
    for blocks in rows {
        let spec = input(&format!("mode jordan\ndim 3\n{blocks}\n"));
        let (g, _, base) = limit_set(&spec)?;
        for _ in 0..20 {
            let s = rand_conditioned(&mut r, 3, 10.0);
            let s_inv = s.inverse().map_err(|e| e.to_string())?;
            let h = s.matmul(&g).matmul(&s_inv);
            let (c2, jd2) = classify_element(&h, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
            let canonical = kulkarni_sets_canonical(&c2).map_err(|e| e.to_string())?;
            let got = conjugate_limit_set(&canonical, &jd2.conjugator).map_err(|e| e.to_string())?;
            let want = conjugate_limit_set(&base, &s_inv).map_err(|e| e.to_string())?;
            worst = worst.max(limit_set_distance(&got, &want));
        }
    }
    ensure(worst <= 1e-6, || format!("equivariance distance {worst:.2e}"))?;
    Ok(format!("60 conjugates, worst distance {worst:.1e}"))
}

fn criterion_10() -> Check {
    let dir = std::env::temp_dir().join(format!("qkul-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("lox.txt");
    std::fs::write(&path, "mode matrix\ndim 3\nrow 1/2 0 0\nrow 0 1 0\nrow 0 0 2\n").map_err(|e| e.to_string())?;
    let run = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_qkul"))
            .args(["verify", path.to_str().unwrap(), "--seed", "17", "--iters", "200", "--samples", "5"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    let _ = std::fs::remove_dir_all(&dir);
    ensure(a.status.success() && b.status.success(), || format!("exit {:?}", a.status.code()))?;
    ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || "reports differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("table reproduction", criterion_1, Duration::from_secs(1)),
        ("elliptic rows", criterion_2, Duration::from_secs(5)),
        ("parabolic J(1,3)", criterion_3, Duration::from_secs(10)),
        ("loxodromic on P^1", criterion_4, Duration::from_secs(2)),
        ("loxodromic on P^2 coverage", criterion_5, Duration::from_secs(20)),
        ("loxoparabolic", criterion_6, Duration::from_secs(10)),
        ("singular value growth", criterion_7, Duration::from_secs(5)),
        ("algebraic suites", criterion_8, Duration::from_secs(10)),
        ("equivariance", criterion_9, Duration::from_secs(10)),
        ("determinism", criterion_10, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let took = start.elapsed();
        let (ok, detail) = match verdict {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {:<28} {} {:>8.3}s  {detail}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
