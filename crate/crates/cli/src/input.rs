//! Line-oriented input files.
//!
//! ```text
//! # D(1/2, 2)
//! mode matrix
//! dim 2
//! row 1/2 0
//! row 0 2
//! ```
//!
//! Jordan mode lists `block <eigenvalue> <size>` lines and may add a `conjugator`
//! line followed by `dim` rows. Eigenvalues are quaternion literals or
//! `[c*]e2pi(p/q)`, `[c*]e2pi(irr:x)` and `[c*]e2pi(x)` for `c·e^{2πi·angle}`.
//! Options (`tol`, `max-den`, `seed`, `iters`, `samples`, `eps`, `assume-extension`)
//! may appear once each.

use std::f64::consts::PI;
use std::fmt::{self, Write};

use qkul_core::qmat::{assemble_jordan, DeclaredAngle, ExactBlocks, JordanBlock, JordanMode, QMatrix};
use qkul_core::quat::{format_literal, parse_literal, ComplexRep, Quaternion};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> InputError {
    InputError::Parse { line, column, message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleSpec {
    /// Exact `p/q` of a turn.
    Rational(i64, u64),
    /// Declared irrational, with the numeric value used to build the matrix.
    Irrational(f64),
    /// Plain value; rationality is left to detection.
    Turns(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenSpec {
    Literal(Quaternion),
    Turn { modulus: f64, angle: AngleSpec },
}

impl EigenSpec {
    pub fn value(&self) -> ComplexRep {
        match *self {
            EigenSpec::Literal(q) => q.similarity_representative(),
            EigenSpec::Turn { modulus, angle } => {
                let t = match angle {
                    AngleSpec::Rational(p, q) => p as f64 / q as f64,
                    AngleSpec::Irrational(x) | AngleSpec::Turns(x) => x,
                };
                ComplexRep::from_polar(modulus, 2.0 * PI * t)
            }
        }
    }

    pub fn declared(&self) -> Option<DeclaredAngle> {
        match *self {
            EigenSpec::Turn { angle: AngleSpec::Rational(p, q), .. } => Some(DeclaredAngle::rational(p, q)),
            EigenSpec::Turn { angle: AngleSpec::Irrational(_), .. } => Some(DeclaredAngle::Irrational),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    pub eigenvalue: EigenSpec,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Matrix(Vec<Vec<Quaternion>>),
    Jordan { blocks: Vec<BlockSpec>, conjugator: Option<Vec<Vec<Quaternion>>> },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub tol: Option<f64>,
    pub max_den: Option<u64>,
    pub seed: Option<u64>,
    pub iters: Option<u64>,
    pub samples: Option<usize>,
    pub eps: Option<f64>,
    pub assume_extension: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputSpec {
    pub dim: usize,
    pub body: Body,
    pub options: Options,
}

fn rows_to_matrix(rows: &[Vec<Quaternion>]) -> QMatrix {
    QMatrix::from_fn(rows.len(), |r, c| rows[r][c])
}

impl InputSpec {
    pub fn blocks(&self) -> Option<Vec<JordanBlock>> {
        match &self.body {
            Body::Matrix(_) => None,
            Body::Jordan { blocks, .. } => Some(
                blocks
                    .iter()
                    .map(|b| JordanBlock { eigenvalue: b.eigenvalue.value(), size: b.size, angle: b.eigenvalue.declared() })
                    .collect(),
            ),
        }
    }

    pub fn conjugator(&self) -> Option<QMatrix> {
        match &self.body {
            Body::Jordan { conjugator: Some(rows), .. } => Some(rows_to_matrix(rows)),
            _ => None,
        }
    }

    /// The element itself: the matrix, or `S⁻¹·J·S` for Jordan input.
    pub fn matrix(&self) -> qkul_core::Result<QMatrix> {
        match &self.body {
            Body::Matrix(rows) => Ok(rows_to_matrix(rows)),
            Body::Jordan { .. } => {
                let j = assemble_jordan(&self.blocks().unwrap_or_default());
                match self.conjugator() {
                    Some(s) => Ok(s.inverse()?.matmul(&j).matmul(&s)),
                    None => Ok(j),
                }
            }
        }
    }

    /// Exact Jordan data for Jordan input, numeric analysis otherwise.
    pub fn jordan_mode(&self) -> JordanMode {
        match self.blocks() {
            Some(blocks) => JordanMode::Exact(ExactBlocks { blocks, conjugator: self.conjugator() }),
            None => JordanMode::Numeric,
        }
    }
}

/// Characters consumed so far, 1-based, for column numbers.
fn column_of(line: &str, token: &str) -> usize {
    line[..token.as_ptr() as usize - line.as_ptr() as usize].chars().count() + 1
}

fn parse_number<T: std::str::FromStr>(line_no: usize, line: &str, tok: &str) -> Result<T, InputError> {
    tok.parse().map_err(|_| perr(line_no, column_of(line, tok), format!("invalid number '{tok}'")))
}

fn parse_real(s: &str) -> Option<f64> {
    let q = parse_literal(s).ok()?;
    (q.a1 == 0.0 && q.a2 == 0.0 && q.a3 == 0.0).then_some(q.a0)
}

fn parse_eigen(tok: &str) -> Result<EigenSpec, String> {
    let Some(pos) = tok.find("e2pi(") else {
        return parse_literal(tok).map(EigenSpec::Literal).map_err(|e| e.to_string());
    };
    let modulus = match &tok[..pos] {
        "" => 1.0,
        pre => {
            let c = pre.strip_suffix('*').ok_or("expected '*' before e2pi")?;
            parse_real(c).filter(|&m| m > 0.0).ok_or("modulus must be a positive real")?
        }
    };
    let inner = tok[pos + 5..].strip_suffix(')').ok_or("unclosed e2pi(")?;
    let angle = if let Some(x) = inner.strip_prefix("irr:") {
        AngleSpec::Irrational(parse_real(x).ok_or("invalid irrational angle")?)
    } else if let Some((p, q)) = inner.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| "invalid numerator")?;
        let q: u64 = q.trim().parse().map_err(|_| "invalid denominator")?;
        if q == 0 {
            return Err("zero denominator".into());
        }
        AngleSpec::Rational(p, q)
    } else {
        AngleSpec::Turns(parse_real(inner).ok_or("invalid angle")?)
    };
    Ok(EigenSpec::Turn { modulus, angle })
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

fn set_once<T>(slot: &mut Option<T>, v: T, line: usize, key: &str) -> Result<(), InputError> {
    if slot.is_some() {
        return Err(perr(line, 1, format!("duplicate key '{key}'")));
    }
    *slot = Some(v);
    Ok(())
}

pub fn parse_input(text: &str) -> Result<InputSpec, InputError> {
    let mut mode: Option<&str> = None;
    let mut dim: Option<usize> = None;
    let mut rows: Vec<Vec<Quaternion>> = Vec::new();
    let mut conj_rows: Option<Vec<Vec<Quaternion>>> = None;
    let mut blocks = Vec::new();
    let mut options = Options::default();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some((&key, args)) = toks.split_first() else { continue };
        let col = |t: &str| column_of(raw, t);
        let one = |what: &str| -> Result<&str, InputError> {
            match args {
                [a] => Ok(a),
                _ => Err(perr(line_no, col(key), format!("'{what}' takes one value"))),
            }
        };
        match key {
            "mode" => {
                let m = one("mode")?;
                if !matches!(m, "matrix" | "jordan") {
                    return Err(perr(line_no, col(m), "mode must be 'matrix' or 'jordan'"));
                }
                set_once(&mut mode, m, line_no, key)?;
            }
            "dim" => {
                let d: usize = parse_number(line_no, raw, one("dim")?)?;
                if d == 0 {
                    return Err(perr(line_no, col(args[0]), "dim must be positive"));
                }
                set_once(&mut dim, d, line_no, key)?;
            }
            "row" => {
                let d = dim.ok_or_else(|| perr(line_no, col(key), "'row' before 'dim'"))?;
                if args.len() != d {
                    return Err(InputError::DimensionMismatch { line: line_no, expected: d, found: args.len() });
                }
                let row = args
                    .iter()
                    .map(|t| parse_literal(t).map_err(|e| perr(line_no, col(t) + e.offset, e.message)))
                    .collect::<Result<Vec<_>, _>>()?;
                let target = match (&mut conj_rows, mode) {
                    (Some(c), _) => c,
                    (None, Some("matrix")) => &mut rows,
                    _ => return Err(perr(line_no, col(key), "'row' outside a matrix or conjugator")),
                };
                if target.len() == d {
                    return Err(perr(line_no, col(key), format!("more than {d} rows")));
                }
                target.push(row);
            }
            "block" => {
                if mode != Some("jordan") {
                    return Err(perr(line_no, col(key), "'block' requires mode jordan"));
                }
                if conj_rows.is_some() {
                    return Err(perr(line_no, col(key), "'block' after 'conjugator'"));
                }
                let [eig, size] = args else {
                    return Err(perr(line_no, col(key), "'block' takes an eigenvalue and a size"));
                };
                let eigenvalue = parse_eigen(eig).map_err(|m| perr(line_no, col(eig), m))?;
                let size: usize = parse_number(line_no, raw, size)?;
                if size == 0 {
                    return Err(perr(line_no, col(args[1]), "block size must be positive"));
                }
                blocks.push(BlockSpec { eigenvalue, size });
            }
            "conjugator" => {
                if !args.is_empty() {
                    return Err(perr(line_no, col(args[0]), "'conjugator' takes no value"));
                }
                if mode != Some("jordan") {
                    return Err(perr(line_no, col(key), "'conjugator' requires mode jordan"));
                }
                set_once(&mut conj_rows, Vec::new(), line_no, key)?;
            }
            "tol" => set_once(&mut options.tol, parse_number(line_no, raw, one(key)?)?, line_no, key)?,
            "max-den" => set_once(&mut options.max_den, parse_number(line_no, raw, one(key)?)?, line_no, key)?,
            "seed" => set_once(&mut options.seed, parse_number(line_no, raw, one(key)?)?, line_no, key)?,
            "iters" => set_once(&mut options.iters, parse_number(line_no, raw, one(key)?)?, line_no, key)?,
            "samples" => set_once(&mut options.samples, parse_number(line_no, raw, one(key)?)?, line_no, key)?,
            "eps" => set_once(&mut options.eps, parse_number(line_no, raw, one(key)?)?, line_no, key)?,
            "assume-extension" => {
                let v = one(key)?;
                let b = parse_bool(v).ok_or_else(|| perr(line_no, col(v), "expected true or false"))?;
                set_once(&mut options.assume_extension, b, line_no, key)?;
            }
            _ => return Err(perr(line_no, col(key), format!("unknown key '{key}'"))),
        }
    }

    let end = last_line + 1;
    let mode = mode.ok_or_else(|| perr(end, 1, "missing 'mode'"))?;
    let dim = dim.ok_or_else(|| perr(end, 1, "missing 'dim'"))?;
    if let Some(c) = &conj_rows {
        if c.len() != dim {
            return Err(InputError::DimensionMismatch { line: end, expected: dim, found: c.len() });
        }
    }
    let body = if mode == "matrix" {
        if rows.len() != dim {
            return Err(InputError::DimensionMismatch { line: end, expected: dim, found: rows.len() });
        }
        Body::Matrix(rows)
    } else {
        let total: usize = blocks.iter().map(|b| b.size).sum();
        if total != dim {
            return Err(InputError::DimensionMismatch { line: end, expected: dim, found: total });
        }
        Body::Jordan { blocks, conjugator: conj_rows }
    };
    Ok(InputSpec { dim, body, options })
}

fn real_literal(x: f64) -> String {
    format_literal(Quaternion::real(x))
}

impl fmt::Display for EigenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EigenSpec::Literal(q) => f.write_str(&format_literal(q)),
            EigenSpec::Turn { modulus, angle } => {
                if modulus != 1.0 {
                    write!(f, "{}*", real_literal(modulus))?;
                }
                match angle {
                    AngleSpec::Rational(p, q) => write!(f, "e2pi({p}/{q})"),
                    AngleSpec::Irrational(x) => write!(f, "e2pi(irr:{})", real_literal(x)),
                    AngleSpec::Turns(x) => write!(f, "e2pi({})", real_literal(x)),
                }
            }
        }
    }
}

fn write_rows(out: &mut String, rows: &[Vec<Quaternion>]) {
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&q| format_literal(q)).collect();
        let _ = writeln!(out, "row {}", cells.join(" "));
    }
}

/// Canonical text of an input; parsing it gives back the same [`InputSpec`].
pub fn print_input(spec: &InputSpec) -> String {
    let mut out = String::new();
    match &spec.body {
        Body::Matrix(rows) => {
            let _ = writeln!(out, "mode matrix\ndim {}", spec.dim);
            write_rows(&mut out, rows);
        }
        Body::Jordan { blocks, conjugator } => {
            let _ = writeln!(out, "mode jordan\ndim {}", spec.dim);
            for b in blocks {
                let _ = writeln!(out, "block {} {}", b.eigenvalue, b.size);
            }
            if let Some(rows) = conjugator {
                out.push_str("conjugator\n");
                write_rows(&mut out, rows);
            }
        }
    }
    let o = &spec.options;
    if let Some(v) = o.tol {
        let _ = writeln!(out, "tol {v:?}");
    }
    if let Some(v) = o.max_den {
        let _ = writeln!(out, "max-den {v}");
    }
    if let Some(v) = o.seed {
        let _ = writeln!(out, "seed {v}");
    }
    if let Some(v) = o.iters {
        let _ = writeln!(out, "iters {v}");
    }
    if let Some(v) = o.samples {
        let _ = writeln!(out, "samples {v}");
    }
    if let Some(v) = o.eps {
        let _ = writeln!(out, "eps {v:?}");
    }
    if let Some(v) = o.assume_extension {
        let _ = writeln!(out, "assume-extension {v}");
    }
    out
}
