//! Quaternion scalars, similarity classes and the textual literal grammar.
//!
//! Literals are signed terms `c`, `ci`, `cj`, `ck` joined by `+`/`-` without
//! whitespace, where `c` is a decimal (optionally with exponent) or a ratio
//! `p/q`; a bare unit stands for coefficient 1. Example: `1-1/2i+3k`.

use alloc::string::String;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, EPSILON};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self { a0, a1, a2, a3 }
    }

    pub const fn real(a0: f64) -> Self {
        Self::new(a0, 0.0, 0.0, 0.0)
    }

    /// The quaternion `z1 + z2·j`.
    pub fn from_pair(z1: Complex64, z2: Complex64) -> Self {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }

    /// Inverse of [`Quaternion::from_pair`]: `q = z1 + z2·j`.
    pub fn to_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.a0, self.a1), Complex64::new(self.a2, self.a3))
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.a0, -self.a1, -self.a2, -self.a3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    pub fn norm(self) -> f64 {
        self.a0.hypot(self.a1).hypot(self.a2.hypot(self.a3))
    }

    /// Norm of the imaginary part.
    pub fn vector_norm(self) -> f64 {
        self.a1.hypot(self.a2).hypot(self.a3)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.a0 * s, self.a1 * s, self.a2 * s, self.a3 * s)
    }

    pub fn is_zero(self, eps: f64) -> bool {
        self.norm() <= eps
    }

    pub fn is_finite(self) -> bool {
        self.a0.is_finite() && self.a1.is_finite() && self.a2.is_finite() && self.a3.is_finite()
    }

    pub fn inverse(self) -> Result<Self> {
        quat_inverse(self)
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if n <= EPSILON {
            return Err(Error::ZeroDivisor(n));
        }
        Ok(self.scale(1.0 / n))
    }

    /// `pq - qp`
    pub fn commutator(self, q: Self) -> Self {
        self * q - q * self
    }

    pub fn similarity_representative(self) -> ComplexRep {
        similarity_representative(self)
    }

    /// A unit `u` with `u·self·u⁻¹` equal to the similarity representative.
    pub fn unit_conjugator(self) -> Self {
        let r = self.vector_norm();
        if r <= f64::MIN_POSITIVE {
            return Self::ONE;
        }
        // Rotate the unit axis a of self onto i: u ∝ (1 + a·i) + a × i. For axes in the
        // half space facing -i, first apply the half turn about j, which negates a1 and a3.
        let (ax, ay, az) = (self.a1 / r, self.a2 / r, self.a3 / r);
        let rot = |ax: f64, ay: f64, az: f64| {
            Self::new(1.0 + ax, 0.0, az, -ay).scale(1.0 / (2.0 * (1.0 + ax)).sqrt())
        };
        if ax >= 0.0 {
            rot(ax, ay, az)
        } else {
            rot(-ax, ay, -az) * Self::J
        }
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a0 - o.a0, self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a0, -self.a1, -self.a2, -self.a3)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, q: Self) -> Self {
        quat_mul(self, q)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl From<f64> for Quaternion {
    fn from(a0: f64) -> Self {
        Self::real(a0)
    }
}

/// Hamilton product.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.a0 * q.a0 - p.a1 * q.a1 - p.a2 * q.a2 - p.a3 * q.a3,
        p.a0 * q.a1 + p.a1 * q.a0 + p.a2 * q.a3 - p.a3 * q.a2,
        p.a0 * q.a2 - p.a1 * q.a3 + p.a2 * q.a0 + p.a3 * q.a1,
        p.a0 * q.a3 + p.a1 * q.a2 - p.a2 * q.a1 + p.a3 * q.a0,
    )
}

pub fn quat_inverse(q: Quaternion) -> Result<Quaternion> {
    let n = q.norm();
    if n <= EPSILON {
        return Err(Error::ZeroDivisor(n));
    }
    let n2 = q.norm_sqr();
    Ok(q.conj().scale(1.0 / n2))
}

/// Canonical complex representative `a0 + |(a1, a2, a3)|·i` of the similarity class of `q`.
pub fn similarity_representative(q: Quaternion) -> ComplexRep {
    ComplexRep { re: q.a0, im: q.vector_norm() }
}

/// Complex number with non-negative imaginary part, standing for a similarity class.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexRep {
    pub re: f64,
    pub im: f64,
}

impl ComplexRep {
    /// Representative of the class of `z` (conjugates fold onto the upper half plane).
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im: im.abs() }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::from_complex(Complex64::from_polar(r, theta))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(self.re, self.im, 0.0, 0.0)
    }

    pub fn modulus(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument in `[0, π]`.
    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    pub fn dist(self, o: Self) -> f64 {
        (self.re - o.re).hypot(self.im - o.im)
    }
}

impl fmt::Display for ComplexRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_quaternion(), f)
    }
}

/// Syntax error in a quaternion literal; `offset` counts characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralError {
    pub offset: usize,
    pub message: &'static str,
}

impl fmt::Display for LiteralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.message, self.offset)
    }
}

impl FromStr for Quaternion {
    type Err = LiteralError;
    fn from_str(s: &str) -> core::result::Result<Self, LiteralError> {
        parse_literal(s)
    }
}

struct Scanner<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    pos: usize,
}

impl Scanner<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn err(&self, message: &'static str) -> LiteralError {
        LiteralError { offset: self.pos, message }
    }

    fn sign(&mut self) -> Option<f64> {
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(1.0)
            }
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn digits(&mut self, buf: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            buf.push(c);
            self.bump();
            n += 1;
        }
        n
    }

    /// Unsigned decimal with optional fraction and exponent; `None` if no digits start here.
    fn decimal(&mut self) -> core::result::Result<Option<f64>, LiteralError> {
        let start = self.pos;
        let mut buf = String::new();
        let mut n = self.digits(&mut buf);
        if self.peek() == Some('.') {
            buf.push('.');
            self.bump();
            n += self.digits(&mut buf);
        }
        if n == 0 {
            if self.pos != start {
                return Err(self.err("expected digits"));
            }
            return Ok(None);
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            buf.push('e');
            self.bump();
            if let Some(s) = self.sign() {
                buf.push(if s < 0.0 { '-' } else { '+' });
            }
            if self.digits(&mut buf) == 0 {
                return Err(self.err("expected exponent digits"));
            }
        }
        buf.parse::<f64>()
            .map(Some)
            .map_err(|_| LiteralError { offset: start, message: "malformed number" })
    }
}

/// Parse a quaternion literal.
pub fn parse_literal(s: &str) -> core::result::Result<Quaternion, LiteralError> {
    let mut sc = Scanner { chars: s.chars().peekable(), pos: 0 };
    let mut parts = [None::<f64>; 4];
    let mut first = true;
    loop {
        let sign = match sc.sign() {
            Some(s) => s,
            None if first => 1.0,
            None => return Err(sc.err("expected '+' or '-'")),
        };
        let coef = match sc.decimal()? {
            Some(num) => {
                if sc.peek() == Some('/') {
                    sc.bump();
                    let at = sc.pos;
                    match sc.decimal()? {
                        Some(0.0) => return Err(LiteralError { offset: at, message: "zero denominator" }),
                        Some(den) => Some(num / den),
                        None => return Err(sc.err("expected denominator")),
                    }
                } else {
                    Some(num)
                }
            }
            None => None,
        };
        let slot = match sc.peek() {
            Some('i') => 1,
            Some('j') => 2,
            Some('k') => 3,
            _ => 0,
        };
        if slot != 0 {
            sc.bump();
        } else if coef.is_none() {
            return Err(sc.err("expected a number or unit"));
        }
        if parts[slot].is_some() {
            return Err(sc.err("repeated component"));
        }
        parts[slot] = Some(sign * coef.unwrap_or(1.0));
        first = false;
        if sc.peek().is_none() {
            break;
        }
    }
    let v = |k: usize| parts[k].unwrap_or(0.0);
    Ok(Quaternion::new(v(0), v(1), v(2), v(3)))
}

/// Shortest round-trip decimal for a non-negative finite value.
fn push_magnitude(out: &mut String, x: f64) {
    use core::fmt::Write;
    let mut s = String::new();
    let _ = write!(s, "{:?}", x);
    if let Some(stripped) = s.strip_suffix(".0") {
        out.push_str(stripped);
    } else {
        out.push_str(&s);
    }
}

/// Render a quaternion in the literal grammar; zero components (including -0) are omitted.
pub fn format_literal(q: Quaternion) -> String {
    let mut out = String::new();
    let comps = [(q.a0, ""), (q.a1, "i"), (q.a2, "j"), (q.a3, "k")];
    for (c, unit) in comps {
        if c == 0.0 {
            continue;
        }
        if c < 0.0 {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        let m = c.abs();
        if !(m == 1.0 && !unit.is_empty()) {
            push_magnitude(&mut out, m);
        }
        out.push_str(unit);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_literal(*self))
    }
}
