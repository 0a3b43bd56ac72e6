//! Exact arithmetic in `Q[L, L^-1]` and in its completion along the
//! dimension filtration, truncated at a finite depth.
//!
//! [`LPoly`] is a Laurent polynomial in the Lefschetz class `L`. [`LSeries`]
//! is an element of the completion known modulo terms of exponent below
//! `-depth`. Coefficients are arbitrary-precision rationals throughout.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational coefficient.
pub type Rat = BigRational;

/// Completion depth used when the caller does not pick one.
pub const DEFAULT_DEPTH: i64 = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LringError {
    #[error("cannot invert the zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero while specializing L = 0")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Relative dimension: the top exponent of a nonzero element, or `Bottom`
/// for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelDim {
    Bottom,
    Value(i64),
}

impl RelDim {
    /// The value, with zero read as dimension 0.
    pub fn or_zero(self) -> i64 {
        match self {
            RelDim::Bottom => 0,
            RelDim::Value(v) => v,
        }
    }

    pub fn value(self) -> Option<i64> {
        match self {
            RelDim::Bottom => None,
            RelDim::Value(v) => Some(v),
        }
    }

    /// `Bottom` is absorbing, mirroring `0 * x = 0`.
    pub fn add(self, other: RelDim) -> RelDim {
        match (self, other) {
            (RelDim::Value(a), RelDim::Value(b)) => RelDim::Value(a + b),
            _ => RelDim::Bottom,
        }
    }
}

impl PartialOrd for RelDim {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RelDim {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (RelDim::Bottom, RelDim::Bottom) => Equal,
            (RelDim::Bottom, _) => Less,
            (_, RelDim::Bottom) => Greater,
            (RelDim::Value(a), RelDim::Value(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for RelDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelDim::Bottom => write!(f, "BOTTOM"),
            RelDim::Value(v) => write!(f, "{v}"),
        }
    }
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn insert_term(map: &mut BTreeMap<i64, Rat>, k: i64, c: Rat) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(k).or_insert_with(Rat::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(&k);
    }
}

fn mul_maps(a: &BTreeMap<i64, Rat>, b: &BTreeMap<i64, Rat>) -> BTreeMap<i64, Rat> {
    let mut out = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            insert_term(&mut out, i + j, x * y);
        }
    }
    out
}

fn top_of(map: &BTreeMap<i64, Rat>) -> RelDim {
    map.keys().next_back().map_or(RelDim::Bottom, |&k| RelDim::Value(k))
}

/// Laurent polynomial in `L` with exact rational coefficients.
///
/// Invariant: no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LPoly {
    coeffs: BTreeMap<i64, Rat>,
}

impl LPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), 0)
    }

    /// The class `L` itself.
    pub fn lefschetz() -> Self {
        Self::monomial(Rat::one(), 1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(rat(c), 0)
    }

    pub fn monomial(c: Rat, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        insert_term(&mut coeffs, k, c);
        LPoly { coeffs }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(terms: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            insert_term(&mut coeffs, k, c);
        }
        LPoly { coeffs }
    }

    /// Builds from integer coefficients, `coeffs[i]` multiplying `L^i`.
    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &c)| (i as i64, rat(c))))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rat)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn top_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn relative_dimension(&self) -> RelDim {
        top_of(&self.coeffs)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn pow(&self, e: u32) -> LPoly {
        let mut acc = LPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiply by `L^k`.
    pub fn shift(&self, k: i64) -> LPoly {
        LPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> LPoly {
        Self::from_terms(self.coeffs.iter().map(|(k, x)| (*k, x * c)))
    }

    /// Evaluate at `L = q` exactly.
    pub fn specialize(&self, q: &Rat) -> Result<Rat, LringError> {
        if q.is_zero() && self.low_degree().is_some_and(|k| k < 0) {
            return Err(LringError::DivisionByZero);
        }
        let mut acc = Rat::zero();
        for (k, c) in &self.coeffs {
            let p = if *k >= 0 {
                num_traits::pow(q.clone(), *k as usize)
            } else {
                num_traits::pow(q.recip(), (-*k) as usize)
            };
            acc += c * p;
        }
        Ok(acc)
    }

    /// Evaluate at an integer `q`, requiring an integer result.
    pub fn specialize_int(&self, q: i64) -> Result<BigInt, LringError> {
        let v = self.specialize(&rat(q))?;
        Ok(v.to_integer())
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    ///
    /// Works for Laurent polynomials by long division from the top degree.
    pub fn div_exact(&self, divisor: &LPoly) -> Option<LPoly> {
        let dtop = divisor.top_degree()?;
        let dlead = divisor.coeff(dtop);
        let dlow = divisor.low_degree()?;
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while let Some(rtop) = rem.top_degree() {
            // Remainder degree window can never shrink below the divisor span.
            if rtop - dtop < rem.low_degree()? - dlow {
                return None;
            }
            let k = rtop - dtop;
            let c = rem.coeff(rtop) / &dlead;
            rem = &rem - &divisor.shift(k).scale(&c);
            insert_term(&mut quot, k, c);
        }
        Some(LPoly { coeffs: quot })
    }

    pub fn to_series(&self, depth: i64) -> LSeries {
        LSeries::from_poly(self, depth)
    }
}

fn fmt_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (i64, &'a Rat)>,
{
    let mut first = true;
    for (k, c) in terms {
        let abs = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        write!(f, "{abs}*L^{k}")?;
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for LPoly {
    /// Renders `c_k*L^k + ...` with exponents descending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, self.coeffs.iter().rev().map(|(k, c)| (*k, c)))
    }
}

impl FromStr for LPoly {
    type Err = LringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (poly, _) = parse_expr(s)?;
        Ok(poly)
    }
}

/// Parses a polynomial and an optional trailing `O(L^-n)` marker.
fn parse_expr(s: &str) -> Result<(LPoly, Option<i64>), LringError> {
    let b = s.as_bytes();
    let mut pos = 0usize;
    let mut terms = Vec::new();
    let mut order = None;
    let err = |pos: usize, msg: &str| LringError::Parse { pos, msg: msg.to_string() };
    let skip_ws = |pos: &mut usize| {
        while *pos < b.len() && b[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let read_int = |pos: &mut usize| -> Option<BigInt> {
        let start = *pos;
        if *pos < b.len() && (b[*pos] == b'-' || b[*pos] == b'+') {
            *pos += 1;
        }
        let digits = *pos;
        while *pos < b.len() && b[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == digits {
            *pos = start;
            return None;
        }
        s[start..*pos].parse().ok()
    };

    skip_ws(&mut pos);
    let mut sign = 1i64;
    if pos < b.len() && b[pos] == b'-' {
        sign = -1;
        pos += 1;
    }
    loop {
        skip_ws(&mut pos);
        if pos >= b.len() {
            return Err(err(pos, "expected a term"));
        }
        if b[pos] == b'O' {
            pos += 1;
            skip_ws(&mut pos);
            let ok = pos + 3 <= b.len() && &s[pos..pos + 3] == "(L^";
            if !ok {
                return Err(err(pos, "expected O(L^n)"));
            }
            pos += 3;
            let n = read_int(&mut pos).ok_or_else(|| err(pos, "expected exponent"))?;
            if pos >= b.len() || b[pos] != b')' {
                return Err(err(pos, "expected ')'"));
            }
            pos += 1;
            let n: i64 = n.try_into().map_err(|_| err(pos, "exponent out of range"))?;
            order = Some(n);
        } else {
            let mut coef = Rat::one();
            let mut has_coef = false;
            if b[pos].is_ascii_digit() {
                let num = read_int(&mut pos).ok_or_else(|| err(pos, "bad integer"))?;
                let mut c = Rat::from_integer(num);
                if pos < b.len() && b[pos] == b'/' {
                    pos += 1;
                    let den = read_int(&mut pos).ok_or_else(|| err(pos, "bad denominator"))?;
                    if den.is_zero() {
                        return Err(err(pos, "zero denominator"));
                    }
                    c /= Rat::from_integer(den);
                }
                coef = c;
                has_coef = true;
                let mut look = pos;
                skip_ws(&mut look);
                if look < b.len() && b[look] == b'*' {
                    pos = look + 1;
                    skip_ws(&mut pos);
                    if pos >= b.len() || b[pos] != b'L' {
                        return Err(err(pos, "expected 'L'"));
                    }
                }
            }
            let mut exp = 0i64;
            let mut has_l = false;
            if pos < b.len() && b[pos] == b'L' {
                has_l = true;
                pos += 1;
                exp = 1;
                if pos < b.len() && b[pos] == b'^' {
                    pos += 1;
                    let e = read_int(&mut pos).ok_or_else(|| err(pos, "expected exponent"))?;
                    exp = e.try_into().map_err(|_| err(pos, "exponent out of range"))?;
                }
            }
            if !has_coef && !has_l {
                return Err(err(pos, "expected a coefficient or L"));
            }
            terms.push((exp, coef * rat(sign)));
        }
        skip_ws(&mut pos);
        if pos >= b.len() {
            break;
        }
        if order.is_some() {
            return Err(err(pos, "O(...) must be the final term"));
        }
        sign = match b[pos] {
            b'+' => 1,
            b'-' => -1,
            _ => return Err(err(pos, "expected '+' or '-'")),
        };
        pos += 1;
    }
    Ok((LPoly::from_terms(terms), order))
}

macro_rules! forward_binop {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &'a $ty) -> $ty {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<$ty> for &'a $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                self.$m(&rhs)
            }
        }
    };
}

impl<'b> Add<&'b LPoly> for &LPoly {
    type Output = LPoly;
    fn add(self, rhs: &'b LPoly) -> LPoly {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            insert_term(&mut coeffs, *k, c.clone());
        }
        LPoly { coeffs }
    }
}

impl<'b> Sub<&'b LPoly> for &LPoly {
    type Output = LPoly;
    fn sub(self, rhs: &'b LPoly) -> LPoly {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            insert_term(&mut coeffs, *k, -c.clone());
        }
        LPoly { coeffs }
    }
}

impl<'b> Mul<&'b LPoly> for &LPoly {
    type Output = LPoly;
    fn mul(self, rhs: &'b LPoly) -> LPoly {
        LPoly { coeffs: mul_maps(&self.coeffs, &rhs.coeffs) }
    }
}

impl Neg for LPoly {
    type Output = LPoly;
    fn neg(self) -> LPoly {
        LPoly { coeffs: self.coeffs.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Neg for &LPoly {
    type Output = LPoly;
    fn neg(self) -> LPoly {
        -self.clone()
    }
}

forward_binop!(LPoly, Add, add);
forward_binop!(LPoly, Sub, sub);
forward_binop!(LPoly, Mul, mul);

impl std::iter::Sum for LPoly {
    fn sum<I: Iterator<Item = LPoly>>(iter: I) -> LPoly {
        iter.fold(LPoly::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for LPoly {
    fn product<I: Iterator<Item = LPoly>>(iter: I) -> LPoly {
        iter.fold(LPoly::one(), |a, b| a * b)
    }
}

/// Element of the completion known modulo exponents below `-depth`.
///
/// Every stored exponent is `>= -depth`. Sums have depth `min(N1, N2)`.
/// Products have depth at most `min(N1, N2)`, reduced further when a factor
/// has positive relative dimension, since multiplying by `L^t` with `t > 0`
/// lifts the unknown tail of the other factor by `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSeries {
    coeffs: BTreeMap<i64, Rat>,
    depth: i64,
}

impl LSeries {
    pub fn zero(depth: i64) -> Self {
        LSeries { coeffs: BTreeMap::new(), depth }
    }

    pub fn one(depth: i64) -> Self {
        Self::from_poly(&LPoly::one(), depth)
    }

    pub fn from_poly(p: &LPoly, depth: i64) -> Self {
        let coeffs = p.coeffs.range(-depth..).map(|(k, c)| (*k, c.clone())).collect();
        LSeries { coeffs, depth }
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rat)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Known part as a Laurent polynomial.
    pub fn to_poly(&self) -> LPoly {
        LPoly { coeffs: self.coeffs.clone() }
    }

    /// Drop everything below `-depth`; never increases the depth.
    pub fn truncate(&self, depth: i64) -> LSeries {
        let depth = depth.min(self.depth);
        let coeffs = self.coeffs.range(-depth..).map(|(k, c)| (*k, c.clone())).collect();
        LSeries { coeffs, depth }
    }

    pub fn relative_dimension(&self) -> RelDim {
        top_of(&self.coeffs)
    }

    /// Product with an exact Laurent polynomial.
    pub fn mul_poly(&self, p: &LPoly) -> LSeries {
        let lift = p.top_degree().unwrap_or(0).max(0);
        let depth = self.depth - lift;
        let coeffs = mul_maps(&self.coeffs, &p.coeffs);
        LSeries { coeffs, depth: i64::MAX }.truncate(depth)
    }

    pub fn pow(&self, e: u32) -> LSeries {
        let mut acc = LSeries::one(self.depth);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial sum at `L = q`; the omitted tail is `O(q^(-depth-1))`.
    pub fn specialize_known(&self, q: &Rat) -> Result<Rat, LringError> {
        self.to_poly().specialize(q)
    }
}

impl fmt::Display for LSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "O(L^{})", -self.depth - 1);
        }
        fmt_terms(f, self.coeffs.iter().rev().map(|(k, c)| (*k, c)))?;
        write!(f, " + O(L^{})", -self.depth - 1)
    }
}

impl FromStr for LSeries {
    type Err = LringError;

    /// Accepts the `Display` form; without an `O(...)` marker the default
    /// depth is used.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, order) = parse_expr(s)?;
        let depth = order.map_or(DEFAULT_DEPTH, |o| -o - 1);
        Ok(LSeries::from_poly(&p, depth))
    }
}

impl<'b> Add<&'b LSeries> for &LSeries {
    type Output = LSeries;
    fn add(self, rhs: &'b LSeries) -> LSeries {
        let depth = self.depth.min(rhs.depth);
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            insert_term(&mut coeffs, *k, c.clone());
        }
        LSeries { coeffs, depth: i64::MAX }.truncate(depth)
    }
}

impl<'b> Sub<&'b LSeries> for &LSeries {
    type Output = LSeries;
    fn sub(self, rhs: &'b LSeries) -> LSeries {
        self + &(-rhs)
    }
}

impl<'b> Mul<&'b LSeries> for &LSeries {
    type Output = LSeries;
    fn mul(self, rhs: &'b LSeries) -> LSeries {
        let lift = |s: &LSeries| s.relative_dimension().value().unwrap_or(0).max(0);
        let depth = (self.depth - lift(rhs)).min(rhs.depth - lift(self));
        let coeffs = mul_maps(&self.coeffs, &rhs.coeffs);
        LSeries { coeffs, depth: i64::MAX }.truncate(depth)
    }
}

impl Neg for LSeries {
    type Output = LSeries;
    fn neg(self) -> LSeries {
        LSeries {
            coeffs: self.coeffs.into_iter().map(|(k, c)| (k, -c)).collect(),
            depth: self.depth,
        }
    }
}

impl Neg for &LSeries {
    type Output = LSeries;
    fn neg(self) -> LSeries {
        -self.clone()
    }
}

forward_binop!(LSeries, Add, add);
forward_binop!(LSeries, Sub, sub);
forward_binop!(LSeries, Mul, mul);

/// Inverse of a nonzero Laurent polynomial in the completion, exact at all
/// exponents `>= -depth`.
///
/// Writes `p = L^d * Q(1/L)` with `Q(0)` the leading coefficient and inverts
/// `Q` as a power series in `U = 1/L`.
pub fn invert_poly(p: &LPoly, depth: i64) -> Result<LSeries, LringError> {
    let d = p.top_degree().ok_or(LringError::ZeroPolynomial)?;
    let lead_inv = p.coeff(d).recip();
    // Q(U) = sum_j a_{d-j} U^j
    let q: Vec<(usize, Rat)> = p.terms().map(|(k, c)| ((d - k) as usize, c.clone())).collect();
    let nterms = depth - d + 1;
    let mut b: Vec<Rat> = Vec::new();
    for j in 0..nterms.max(0) as usize {
        let bj = if j == 0 {
            lead_inv.clone()
        } else {
            let mut acc = Rat::zero();
            for (i, a) in &q {
                if *i >= 1 && *i <= j {
                    acc += a * &b[j - i];
                }
            }
            -(acc * &lead_inv)
        };
        b.push(bj);
    }
    let terms = b.into_iter().enumerate().map(|(j, c)| (-d - j as i64, c));
    let mut coeffs = BTreeMap::new();
    for (k, c) in terms {
        insert_term(&mut coeffs, k, c);
    }
    Ok(LSeries { coeffs, depth })
}

/// Top exponent with nonzero coefficient, or `Bottom` for zero.
pub fn relative_dimension(x: &LPoly) -> RelDim {
    x.relative_dimension()
}

/// Evaluate `L = q`.
pub fn specialize(x: &LPoly, q: &Rat) -> Result<Rat, LringError> {
    x.specialize(q)
}
