//! Element classes and the catalog of canonical Jordan forms.
//!
//! An element is first rescaled by a positive real (projectively trivial), then
//! sorted into elliptic / parabolic / loxodromic / loxoparabolic by its moduli and
//! semisimplicity, and finally matched against the catalog rows. Matching also
//! fixes the block order each row is stated in, and the returned Jordan data is
//! permuted to that order so limit sets can be read off in its coordinates.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::qmat::{jordan_analyze, DeclaredAngle, JordanData, JordanMode, QMatrix};
use crate::quat::ComplexRep;
use crate::{Error, Result, EPSILON};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleVerdict {
    /// `arg(λ)/2π` in `[0, 1)`.
    pub angle: f64,
    /// `(p, q)` in lowest terms.
    pub rational: Option<(u64, u64)>,
    /// Taken from the input rather than detected.
    pub declared: bool,
}

impl AngleVerdict {
    pub fn is_rational(&self) -> bool {
        self.rational.is_some()
    }
}

/// Best rational approximation of the angle of a unit complex number by continued-fraction
/// convergents with denominator at most `max_den`.
pub fn detect_rational_angle(lambda: ComplexRep, max_den: u64, tol: f64) -> Result<AngleVerdict> {
    let r = lambda.modulus();
    if (r - 1.0).abs() > EPSILON {
        return Err(Error::NotUnitModulus(r));
    }
    let mut angle = lambda.im.atan2(lambda.re) / (2.0 * PI);
    if angle < 0.0 {
        angle += 1.0;
    }
    Ok(AngleVerdict { angle, rational: rational_approx(angle, max_den, tol), declared: false })
}

fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    let (mut h1, mut h2) = (1u64, 0u64);
    let (mut k1, mut k2) = (0u64, 1u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > u64::MAX as f64 / 2.0 {
            return None;
        }
        let a = a as u64;
        let h = a.checked_mul(h1)?.checked_add(h2)?;
        let k = a.checked_mul(k1)?.checked_add(k2)?;
        if k > max_den {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some(if h == k { (0, 1) } else { (h, k) });
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (h2, h1, k2, k1) = (h1, h, k1, k);
    }
    None
}

/// Whether `e^{2πia}` and `e^{2πib}` have similar common powers, i.e. `a - b` or `a + b` is rational.
pub fn angles_screw_related(a: f64, b: f64, max_den: u64, tol: f64) -> bool {
    [a - b, a + b].iter().any(|&d| rational_approx(d - d.floor(), max_den, tol).is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoarseClass {
    Elliptic,
    Parabolic,
    Loxodromic,
    Loxoparabolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassTag {
    EllipticRational,
    EllipticSimpleIrrational,
    EllipticCompound,
    Parabolic1,
    Parabolic2,
    Parabolic3,
    Parabolic4,
    Loxodromic1,
    Loxodromic2,
    Loxoparabolic,
    OutOfCatalog,
}

impl ClassTag {
    pub const ROWS: [ClassTag; 10] = [
        ClassTag::EllipticRational,
        ClassTag::EllipticSimpleIrrational,
        ClassTag::EllipticCompound,
        ClassTag::Parabolic1,
        ClassTag::Parabolic2,
        ClassTag::Parabolic3,
        ClassTag::Parabolic4,
        ClassTag::Loxodromic1,
        ClassTag::Loxodromic2,
        ClassTag::Loxoparabolic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::EllipticRational => "EllipticRational",
            ClassTag::EllipticSimpleIrrational => "EllipticSimpleIrrational",
            ClassTag::EllipticCompound => "EllipticCompound",
            ClassTag::Parabolic1 => "Parabolic1",
            ClassTag::Parabolic2 => "Parabolic2",
            ClassTag::Parabolic3 => "Parabolic3",
            ClassTag::Parabolic4 => "Parabolic4",
            ClassTag::Loxodromic1 => "Loxodromic1",
            ClassTag::Loxodromic2 => "Loxodromic2",
            ClassTag::Loxoparabolic => "Loxoparabolic",
            ClassTag::OutOfCatalog => "OutOfCatalog",
        }
    }

    pub fn is_elliptic(self) -> bool {
        matches!(self, ClassTag::EllipticRational | ClassTag::EllipticSimpleIrrational | ClassTag::EllipticCompound)
    }

    pub fn is_parabolic(self) -> bool {
        matches!(self, ClassTag::Parabolic1 | ClassTag::Parabolic2 | ClassTag::Parabolic3 | ClassTag::Parabolic4)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shape data of a catalog row. Block lists follow the row's block order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowParams {
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub p: Option<usize>,
    /// Normalized block eigenvalues.
    pub eigenvalues: Vec<ComplexRep>,
    pub sizes: Vec<usize>,
    /// Angle of each block eigenvalue's direction `λ/|λ|`.
    pub angles: Vec<AngleVerdict>,
    /// Rationality settings the angles were judged with.
    pub angle_tol: f64,
    pub max_den: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementClass {
    pub coarse: CoarseClass,
    pub tag: ClassTag,
    pub params: RowParams,
    /// Row block order as indices into the blocks of the analyzed Jordan data.
    pub block_order: Vec<usize>,
    /// Some angle's rationality was decided numerically rather than declared.
    pub rationality_inferred: bool,
    /// Real scalar `r` such that `r·g` is the normalized lift.
    pub normalization: f64,
    /// Why the element fell outside the catalog.
    pub note: Option<String>,
}

impl ElementClass {
    /// Catalog rows sharing the coarse class, for diagnostics.
    pub fn nearest_rows(&self) -> Vec<ClassTag> {
        use ClassTag::*;
        match self.coarse {
            CoarseClass::Elliptic => alloc::vec![EllipticRational, EllipticSimpleIrrational, EllipticCompound],
            CoarseClass::Parabolic => alloc::vec![Parabolic1, Parabolic2, Parabolic3, Parabolic4],
            CoarseClass::Loxodromic => alloc::vec![Loxodromic1, Loxodromic2],
            CoarseClass::Loxoparabolic => alloc::vec![Loxoparabolic],
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub mode: JordanMode,
    /// Angle tolerance for rationality detection.
    pub tol: f64,
    pub max_den: u64,
    /// Eigenvalue and modulus comparison tolerance, also used for Jordan clustering.
    pub cluster_tol: f64,
    /// Accept unit eigenvalues other than `±1` in the rows stated for eigenvalue 1.
    pub assume_extension: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { mode: JordanMode::Numeric, tol: 1e-9, max_den: 1_000_000, cluster_tol: 1e-6, assume_extension: false }
    }
}

/// Classify `g` and return the Jordan data permuted to the matched row's block order.
pub fn classify_element(g: &QMatrix, opts: &ClassifyOptions) -> Result<(ElementClass, JordanData)> {
    let d = g.det_h();
    if !(d > EPSILON) {
        return Err(Error::Singular(d));
    }
    let jd = jordan_analyze(g, &opts.mode, opts.cluster_tol)?;
    let dim = jd.dim() as f64;
    let r = d.powf(-1.0 / (2.0 * dim));
    let mods: Vec<f64> = jd.blocks.iter().map(|b| b.eigenvalue.modulus() * r).collect();
    let unit = mods.iter().all(|&m| (m - 1.0).abs() <= opts.cluster_tol);
    let coarse = match (unit, jd.is_semisimple()) {
        (true, true) => CoarseClass::Elliptic,
        (true, false) => CoarseClass::Parabolic,
        (false, true) => CoarseClass::Loxodromic,
        (false, false) => CoarseClass::Loxoparabolic,
    };
    let angles = jd.blocks.iter().map(|b| block_angle(b.eigenvalue, b.angle, opts)).collect::<Result<Vec<_>>>()?;
    let cls = ElementClass {
        coarse,
        tag: ClassTag::OutOfCatalog,
        params: RowParams {
            eigenvalues: jd.blocks.iter().map(|b| b.eigenvalue.scale(r)).collect(),
            sizes: jd.blocks.iter().map(|b| b.size).collect(),
            angles,
            angle_tol: opts.tol,
            max_den: opts.max_den,
            ..RowParams::default()
        },
        block_order: (0..jd.blocks.len()).collect(),
        rationality_inferred: false,
        normalization: r,
        note: None,
    };
    let cls = catalog_match(&jd, &cls, opts);
    let jd = jd.reordered(&cls.block_order);
    Ok((cls, jd))
}

fn block_angle(lambda: ComplexRep, declared: Option<DeclaredAngle>, opts: &ClassifyOptions) -> Result<AngleVerdict> {
    let unit = lambda.scale(1.0 / lambda.modulus());
    let mut v = detect_rational_angle(unit, opts.max_den, opts.tol)?;
    match declared {
        Some(DeclaredAngle::Rational { num, den }) => {
            v.rational = Some((num, den));
            v.declared = true;
        }
        Some(DeclaredAngle::Irrational) => {
            v.rational = None;
            v.declared = true;
        }
        None => {}
    }
    Ok(v)
}

fn out(mut cls: ElementClass, why: &str) -> ElementClass {
    cls.tag = ClassTag::OutOfCatalog;
    cls.note = Some(String::from(why));
    cls
}

fn permuted<T: Clone>(v: &[T], order: &[usize]) -> Vec<T> {
    order.iter().map(|&i| v[i].clone()).collect()
}

/// Refine a coarse class to a catalog row. `cls` must come from [`classify_element`]
/// on the same Jordan data (its block order is ignored and recomputed).
pub fn catalog_match(jd: &JordanData, cls: &ElementClass, opts: &ClassifyOptions) -> ElementClass {
    let base = ElementClass {
        block_order: (0..jd.blocks.len()).collect(),
        params: RowParams {
            eigenvalues: cls.params.eigenvalues.clone(),
            sizes: cls.params.sizes.clone(),
            angles: cls.params.angles.clone(),
            angle_tol: cls.params.angle_tol,
            max_den: cls.params.max_den,
            ..RowParams::default()
        },
        note: None,
        rationality_inferred: false,
        ..cls.clone()
    };
    let mut m = match cls.coarse {
        CoarseClass::Elliptic => match_elliptic(base, opts),
        CoarseClass::Parabolic => match_parabolic(jd, base, opts),
        CoarseClass::Loxodromic => match_loxodromic(base, opts),
        CoarseClass::Loxoparabolic => match_loxoparabolic(base),
    };
    let order = m.block_order.clone();
    m.params.eigenvalues = permuted(&m.params.eigenvalues, &order);
    m.params.sizes = permuted(&m.params.sizes, &order);
    m.params.angles = permuted(&m.params.angles, &order);
    m
}

fn match_elliptic(mut cls: ElementClass, opts: &ClassifyOptions) -> ElementClass {
    let a = &cls.params.angles;
    cls.rationality_inferred = a.iter().any(|v| !v.declared);
    cls.tag = if a.iter().all(AngleVerdict::is_rational) {
        ClassTag::EllipticRational
    } else if a.iter().all(|v| !v.is_rational() && (v.angle - a[0].angle).abs() <= opts.tol) {
        ClassTag::EllipticSimpleIrrational
    } else {
        ClassTag::EllipticCompound
    };
    cls
}

fn match_parabolic(jd: &JordanData, mut cls: ElementClass, opts: &ClassifyOptions) -> ElementClass {
    let n = jd.dim();
    let big: Vec<usize> = (0..jd.blocks.len()).filter(|&i| jd.blocks[i].size > 1).collect();
    let small: Vec<usize> = (0..jd.blocks.len()).filter(|&i| jd.blocks[i].size == 1).collect();
    if big.len() == 1 && small.is_empty() {
        cls.tag = ClassTag::Parabolic1;
        cls.params.l = Some(n);
        return cls;
    }
    // The remaining rows are stated for eigenvalue 1 on the nontrivial blocks; −1 is the same projective map.
    let ev = &cls.params.eigenvalues;
    let one = ComplexRep::new(1.0, 0.0);
    let sign = if big.iter().all(|&i| ev[i].dist(one) <= opts.cluster_tol) {
        1.0
    } else if big.iter().all(|&i| ev[i].dist(one.scale(-1.0)) <= opts.cluster_tol) {
        -1.0
    } else if opts.assume_extension {
        1.0
    } else {
        return out(cls, "nontrivial Jordan blocks must have eigenvalue 1 (pass assume-extension to relax)");
    };
    if sign < 0.0 {
        cls.normalization = -cls.normalization;
        cls.params.eigenvalues = ev.iter().map(|e| e.scale(-1.0)).collect();
    }
    let sz = |i: usize| jd.blocks[i].size;
    match (big.len(), small.len()) {
        (1, _) => {
            cls.tag = ClassTag::Parabolic2;
            cls.params.k = Some(small.len());
            cls.params.l = Some(sz(big[0]));
            cls.block_order = small.iter().chain(&big).copied().collect();
            cls
        }
        (2, 0) if sz(big[0]) == sz(big[1]) => {
            cls.tag = ClassTag::Parabolic3;
            cls.params.l = Some(sz(big[0]));
            cls
        }
        (2, 0) => {
            cls.tag = ClassTag::Parabolic4;
            let (a, b) = if sz(big[0]) > sz(big[1]) { (big[0], big[1]) } else { (big[1], big[0]) };
            cls.params.k = Some(sz(a));
            cls.params.l = Some(sz(b));
            cls.block_order = alloc::vec![a, b];
            cls
        }
        _ => out(cls, "more than one nontrivial Jordan block alongside other blocks"),
    }
}

/// Indices sorted by ascending modulus, grouped into equal-modulus levels.
fn modulus_levels(ev: &[ComplexRep], tol: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..ev.len()).collect();
    idx.sort_by(|&a, &b| ev[a].modulus().total_cmp(&ev[b].modulus()).then(ev[a].arg().total_cmp(&ev[b].arg())));
    let mut levels: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match levels.last_mut() {
            Some(lv) if (ev[i].modulus() / ev[lv[0]].modulus() - 1.0).abs() <= tol => lv.push(i),
            _ => levels.push(alloc::vec![i]),
        }
    }
    levels
}

fn match_loxodromic(mut cls: ElementClass, opts: &ClassifyOptions) -> ElementClass {
    let levels = modulus_levels(&cls.params.eigenvalues, opts.cluster_tol);
    cls.block_order = levels.concat();
    if levels.iter().all(|lv| lv.len() == 1) {
        cls.tag = ClassTag::Loxodromic1;
    } else if levels[1..].iter().all(|lv| lv.len() == 1) {
        cls.tag = ClassTag::Loxodromic2;
        cls.params.m = Some(levels[0].len());
        cls.params.p = Some(levels.len() - 1);
    } else {
        return out(cls, "equal-modulus eigenvalues allowed only at the smallest modulus");
    }
    cls
}

fn match_loxoparabolic(mut cls: ElementClass) -> ElementClass {
    let ev = &cls.params.eigenvalues;
    if ev.len() != 2 {
        return out(cls, "loxoparabolic row needs exactly two Jordan blocks");
    }
    let (a, b) = if ev[0].modulus() < ev[1].modulus() { (0, 1) } else { (1, 0) };
    let r = 1.0 / (ev[a].modulus() * ev[b].modulus()).sqrt();
    cls.normalization *= r;
    cls.params.eigenvalues = ev.iter().map(|e| e.scale(r)).collect();
    cls.params.k = Some(cls.params.sizes[a]);
    cls.params.l = Some(cls.params.sizes[b]);
    cls.block_order = alloc::vec![a, b];
    cls.tag = ClassTag::Loxoparabolic;
    cls
}
