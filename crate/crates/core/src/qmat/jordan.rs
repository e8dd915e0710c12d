//! Quaternionic Jordan form `S·A·S⁻¹ = J`.
//!
//! In numeric mode each eigenvalue cluster of `Φ(A)` with non-negative imaginary
//! part contributes generalized-eigenvector chains. Chains are built top-down
//! inside the generalized eigenspace; for real eigenvalues every chain is paired
//! with its image under right multiplication by `j`, and only one chain of each
//! pair is kept. Pulling a chain back through `φ⁻¹` gives quaternionic columns
//! `X` with `A·X = X·J`, so `S = X⁻¹`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::eigen::{cluster_spectrum, overlap};
use super::{j_map, phi_unvector, CMatrix, CVector, QMatrix, QVector};
use crate::quat::{ComplexRep, Quaternion};
use crate::{Error, Result, EPSILON};

const MAX_NUMERIC_DIM: usize = 8;
const RANK_TOL: f64 = 1e-9;
const CHAIN_TOL: f64 = 1e-6;

/// Angle of an eigenvalue known from the input rather than measured, in turns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclaredAngle {
    /// `num/den` in lowest terms, folded into `[0, 1/2]` like the class representative.
    Rational { num: u64, den: u64 },
    Irrational,
}

impl DeclaredAngle {
    /// Angle `p/q` of `e^{2πi p/q}`, reduced and folded onto the representative's half turn.
    pub fn rational(p: i64, q: u64) -> Self {
        assert!(q > 0, "zero denominator");
        let qi = q as i64;
        let mut num = p.rem_euclid(qi) as u64;
        if 2 * num > q {
            num = q - num;
        }
        let g = gcd(num, q);
        Self::Rational { num: num / g, den: q / g }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: ComplexRep,
    pub size: usize,
    pub angle: Option<DeclaredAngle>,
}

impl JordanBlock {
    pub fn new(eigenvalue: ComplexRep, size: usize) -> Self {
        Self { eigenvalue, size, angle: None }
    }
}

#[derive(Clone, Debug)]
pub struct JordanData {
    pub blocks: Vec<JordanBlock>,
    pub conjugator: QMatrix,
    pub residual: f64,
}

impl JordanData {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn is_semisimple(&self) -> bool {
        self.blocks.iter().all(|b| b.size == 1)
    }

    /// First coordinate index of every block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = acc;
                acc += b.size;
                o
            })
            .collect()
    }

    pub fn jordan_matrix(&self) -> QMatrix {
        assemble(&self.blocks)
    }

    /// Same decomposition with the blocks listed in `order`; the conjugator rows follow.
    pub fn reordered(&self, order: &[usize]) -> JordanData {
        let offs = self.offsets();
        let perm: Vec<usize> = order
            .iter()
            .flat_map(|&b| offs[b]..offs[b] + self.blocks[b].size)
            .collect();
        JordanData {
            blocks: order.iter().map(|&b| self.blocks[b].clone()).collect(),
            conjugator: QMatrix::permutation(&perm).matmul(&self.conjugator),
            residual: self.residual,
        }
    }
}

/// Declared block structure, optionally with the conjugator `S` such that `S·A·S⁻¹ = J`.
#[derive(Clone, Debug, Default)]
pub struct ExactBlocks {
    pub blocks: Vec<JordanBlock>,
    pub conjugator: Option<QMatrix>,
}

#[derive(Clone, Debug)]
pub enum JordanMode {
    Numeric,
    Exact(ExactBlocks),
}

pub fn assemble(blocks: &[JordanBlock]) -> QMatrix {
    let parts: Vec<QMatrix> = blocks
        .iter()
        .map(|b| QMatrix::jordan_block(b.eigenvalue.to_quaternion(), b.size))
        .collect();
    QMatrix::block_diag(&parts)
}

/// Canonical block order: descending modulus, then descending size, then ascending argument.
pub(crate) fn canonical_cmp(a: &JordanBlock, b: &JordanBlock) -> Ordering {
    let (ma, mb) = (a.eigenvalue.modulus(), b.eigenvalue.modulus());
    if (ma - mb).abs() > 1e-9 * ma.max(mb).max(1.0) {
        return mb.total_cmp(&ma);
    }
    if a.size != b.size {
        return b.size.cmp(&a.size);
    }
    let (ta, tb) = (a.eigenvalue.arg(), b.eigenvalue.arg());
    if (ta - tb).abs() > 1e-12 {
        return ta.total_cmp(&tb);
    }
    Ordering::Equal
}

fn canonicalize(jd: JordanData) -> JordanData {
    let mut order: Vec<usize> = (0..jd.blocks.len()).collect();
    order.sort_by(|&x, &y| canonical_cmp(&jd.blocks[x], &jd.blocks[y]));
    jd.reordered(&order)
}

fn residual(a: &QMatrix, s: &QMatrix, s_inv: &QMatrix, blocks: &[JordanBlock]) -> f64 {
    s.matmul(a).matmul(s_inv).sub(&assemble(blocks)).frobenius_norm()
}

pub fn jordan_analyze(a: &QMatrix, mode: &JordanMode, tol: f64) -> Result<JordanData> {
    match mode {
        JordanMode::Exact(decl) => exact(a, decl),
        JordanMode::Numeric => {
            if a.dim() > MAX_NUMERIC_DIM {
                return Err(Error::TooLarge(a.dim()));
            }
            match read_jordan_form(a, tol) {
                Some(jd) => jd,
                None => numeric(a, tol),
            }
        }
    }
}

fn exact(a: &QMatrix, decl: &ExactBlocks) -> Result<JordanData> {
    let total: usize = decl.blocks.iter().map(|b| b.size).sum();
    if total != a.dim() || decl.blocks.iter().any(|b| b.size == 0) {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: total });
    }
    let s = decl.conjugator.clone().unwrap_or_else(|| QMatrix::identity(a.dim()));
    if s.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: s.dim() });
    }
    let s_inv = s.inverse()?;
    let res = residual(a, &s, &s_inv, &decl.blocks);
    Ok(canonicalize(JordanData { blocks: decl.blocks.clone(), conjugator: s, residual: res }))
}

/// Blocks read off directly when `a` is already upper bidiagonal with a 0/1
/// superdiagonal and constant diagonal along each chain.
fn read_jordan_form(a: &QMatrix, tol: f64) -> Option<Result<JordanData>> {
    let n = a.dim();
    let mut starts = alloc::vec![0usize];
    for r in 0..n {
        for c in 0..n {
            let e = a[(r, c)];
            if c == r + 1 {
                if (e - Quaternion::ONE).norm() <= EPSILON {
                    if (a[(r, r)] - a[(c, c)]).norm() > EPSILON {
                        return None;
                    }
                } else if e.norm() <= EPSILON {
                    starts.push(c);
                } else {
                    return None;
                }
            } else if c != r && e.norm() > EPSILON {
                return None;
            }
        }
    }
    starts.push(n);
    let mut blocks = Vec::new();
    let mut units = Vec::with_capacity(n);
    for w in starts.windows(2) {
        let q = a[(w[0], w[0])];
        blocks.push(JordanBlock::new(q.similarity_representative(), w[1] - w[0]));
        units.extend(core::iter::repeat_n(q.unit_conjugator(), w[1] - w[0]));
    }
    // Entries equal up to roundoff name the same eigenvalue.
    for j in 1..blocks.len() {
        if let Some(i) = (0..j).find(|&i| blocks[i].eigenvalue.dist(blocks[j].eigenvalue) <= EPSILON) {
            blocks[j].eigenvalue = blocks[i].eigenvalue;
        }
    }
    for (i, x) in blocks.iter().enumerate() {
        let (zx, tx) = (x.eigenvalue.to_complex(), x.eigenvalue);
        if tx.im > 0.0 && 2.0 * tx.im <= tol {
            return Some(Err(overlap(zx, zx.conj())));
        }
        for y in &blocks[i + 1..] {
            let d = x.eigenvalue.dist(y.eigenvalue);
            if d > 0.0 && d <= tol {
                return Some(Err(overlap(zx, y.eigenvalue.to_complex())));
            }
        }
    }
    let s = QMatrix::diag(&units);
    let s_inv = s.conj_transpose();
    let res = residual(a, &s, &s_inv, &blocks);
    Some(Ok(canonicalize(JordanData { blocks, conjugator: s, residual: res })))
}

/// Right singular vectors of `m` ordered by ascending singular value, with the values.
fn ascending_right_singular(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    let vals = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let vecs = idx.iter().map(|&i| vt.row(i).adjoint()).collect();
    (vals, vecs)
}

/// Gram–Schmidt step with re-orthogonalization; returns the new unit vector if independent.
fn extend_basis(basis: &mut Vec<CVector>, v: &CVector, tol: f64) -> Option<CVector> {
    let r = residual_against(basis, v);
    let nr = r.norm();
    if nr <= tol * v.norm().max(f64::MIN_POSITIVE) {
        return None;
    }
    let u = r / Complex64::new(nr, 0.0);
    basis.push(u.clone());
    Some(u)
}

fn residual_against(basis: &[CVector], v: &CVector) -> CVector {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let h = b.dotc(&r);
            r -= b * h;
        }
    }
    r
}

fn mat_from_columns(cols: &[CVector], rows: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols.len());
    for (c, v) in cols.iter().enumerate() {
        m.set_column(c, v);
    }
    m
}

struct Chain {
    /// Levels 1..=len; `vecs[0]` is an eigenvector.
    vecs: Vec<CVector>,
    primary: bool,
}

fn numeric(a: &QMatrix, tol: f64) -> Result<JordanData> {
    let n = a.dim();
    let spec = cluster_spectrum(a, tol)?;
    let big = 2 * n;
    let phi = &spec.phi;
    let mut blocks: Vec<(JordanBlock, Vec<QVector>)> = Vec::new();

    for cl in &spec.clusters {
        let lam = cl.center;
        let k = cl.phi_size;
        let b: CMatrix = phi - CMatrix::identity(big, big) * lam;
        let bk = (1..k).fold(b.clone(), |acc, _| &acc * &b);
        let (vals, vecs) = ascending_right_singular(&bk);
        let scale_k = bk.norm().max(1.0);
        if k < big && vals[k] <= RANK_TOL * scale_k {
            return Err(Error::ChainDefect("generalized eigenspace is larger than the cluster"));
        }
        let q = mat_from_columns(&vecs[..k], big);
        let bq = q.adjoint() * &b * &q;
        let bq_norm = bq.norm().max(1.0);

        // Kernels of B_Q^p, in full coordinates, until they exhaust the cluster.
        let mut kernels: Vec<Vec<CVector>> = alloc::vec![Vec::new()];
        let mut power = DMatrix::<Complex64>::identity(k, k);
        loop {
            let p = kernels.len();
            power = &power * &bq;
            let (sv, rv) = ascending_right_singular(&power);
            let thr = RANK_TOL * bq_norm.powi(p as i32);
            let nullity = sv.iter().filter(|&&s| s <= thr).count();
            kernels.push(rv[..nullity].iter().map(|c| &q * c).collect());
            if nullity == k {
                break;
            }
            if p == k {
                return Err(Error::ChainDefect("nilpotent part does not vanish"));
            }
        }
        let depth = kernels.len() - 1;
        // counts[p] = number of chains of length >= p
        let counts: Vec<usize> = (0..=depth + 1)
            .map(|p| if p == 0 || p > depth { 0 } else { kernels[p].len() - kernels[p - 1].len() })
            .collect();
        for p in 2..=depth {
            if counts[p] > counts[p - 1] {
                return Err(overlap(lam, lam));
            }
        }
        let phi_scale = phi.norm().max(1.0);
        if depth == 1 && cl.radius > RANK_TOL * phi_scale {
            return Err(overlap(lam, lam));
        }
        if cl.real && counts.iter().any(|c| c % 2 != 0) {
            return Err(Error::ChainDefect("real eigenvalue with unpaired chains"));
        }

        let mut chains: Vec<Chain> = Vec::new();
        for p in (1..=depth).rev() {
            let new = counts[p] - counts[p + 1];
            if new == 0 {
                continue;
            }
            let mut span: Vec<CVector> = Vec::new();
            for v in &kernels[p - 1] {
                extend_basis(&mut span, v, 1e-10);
            }
            for c in &chains {
                extend_basis(&mut span, &c.vecs[p - 1], 1e-10);
            }
            let picks = if cl.real { new / 2 } else { new };
            for _ in 0..picks {
                let best = kernels[p]
                    .iter()
                    .map(|w| residual_against(&span, w))
                    .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                    .ok_or(Error::ChainDefect("empty kernel"))?;
                let nb = best.norm();
                if nb < CHAIN_TOL {
                    return Err(Error::ChainDefect("no chain top outside the lower kernel"));
                }
                let top = best / Complex64::new(nb, 0.0);
                let mut vecs = alloc::vec![top.clone(); p];
                for lvl in (0..p - 1).rev() {
                    vecs[lvl] = &b * &vecs[lvl + 1];
                }
                extend_basis(&mut span, &top, 1e-10);
                if cl.real {
                    let jt = j_map(&top);
                    extend_basis(&mut span, &jt, 1e-10);
                    chains.push(Chain { vecs: vecs.iter().map(j_map).collect(), primary: false });
                }
                chains.push(Chain { vecs, primary: true });
            }
        }

        let rep = ComplexRep::from_complex(lam);
        for c in chains.into_iter().filter(|c| c.primary) {
            let cols: Vec<QVector> = c.vecs.iter().map(phi_unvector).collect();
            blocks.push((JordanBlock::new(rep, cols.len()), cols));
        }
    }

    if blocks.iter().map(|b| b.0.size).sum::<usize>() != n {
        return Err(Error::ChainDefect("chain lengths do not add up to the dimension"));
    }
    blocks.sort_by(|x, y| canonical_cmp(&x.0, &y.0));
    let cols: Vec<QVector> = blocks.iter().flat_map(|b| b.1.iter().cloned()).collect();
    let x = QMatrix::from_columns(&cols);
    let s = x.inverse_unchecked().ok_or(Error::ChainDefect("chain vectors are dependent"))?;
    let jblocks: Vec<JordanBlock> = blocks.into_iter().map(|b| b.0).collect();
    let res = residual(a, &s, &x, &jblocks);
    Ok(JordanData { blocks: jblocks, conjugator: s, residual: res })
}
